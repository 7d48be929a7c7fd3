//! Finite abelian groups ℤ_{n₁}×…×ℤ_{nₖ}, their characters, character
//! tables, and entrywise DFTs of group-indexed matrix sequences.
//!
//! The dual group is identified with the group itself through the standard
//! pairing `γ_m(g) = exp(2πi Σ_j m_j g_j / n_j)`, so characters are labeled
//! by group elements. Elements are enumerated lexicographically on their
//! coordinate tuples; every file format and certificate relies on that order.

use crate::cmatrix::ComplexMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GroupError {
    #[error("group factors must be positive")]
    ZeroFactor,
    #[error("sequence has {got} entries but the group has order {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error("matrices in the sequence must share one square size")]
    SizeMismatch,
    #[error("element has {got} coordinates, group has {expected} factors")]
    CoordinateMismatch { got: usize, expected: usize },
}

/// Additive group ℤ_{n₁}×…×ℤ_{nₖ}.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteAbelianGroup {
    factors: Vec<u32>,
}

/// Element of a [`FiniteAbelianGroup`], stored with each coordinate reduced
/// modulo its factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupElement(pub Vec<u32>);

/// Character labeled by a group element via the self-duality pairing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Character {
    pub label: GroupElement,
}

impl FiniteAbelianGroup {
    pub fn new(factors: Vec<u32>) -> Result<Self, GroupError> {
        if factors.is_empty() || factors.contains(&0) {
            return Err(GroupError::ZeroFactor);
        }
        Ok(Self { factors })
    }

    pub fn cyclic(n: u32) -> Self {
        Self::new(vec![n]).expect("positive factor")
    }

    pub fn factors(&self) -> &[u32] {
        &self.factors
    }

    pub fn order(&self) -> usize {
        self.factors.iter().map(|&n| n as usize).product()
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement(vec![0; self.factors.len()])
    }

    /// Element at position `index` in the lexicographic enumeration
    /// (leftmost coordinate most significant).
    pub fn element_at(&self, index: usize) -> GroupElement {
        debug_assert!(index < self.order());
        let mut coords = vec![0u32; self.factors.len()];
        let mut rem = index;
        for (j, &n) in self.factors.iter().enumerate().rev() {
            coords[j] = (rem % n as usize) as u32;
            rem /= n as usize;
        }
        GroupElement(coords)
    }

    pub fn index_of(&self, g: &GroupElement) -> usize {
        debug_assert_eq!(g.0.len(), self.factors.len());
        let mut idx = 0usize;
        for (j, &n) in self.factors.iter().enumerate() {
            idx = idx * n as usize + (g.0[j] % n) as usize;
        }
        idx
    }

    /// Deterministic enumeration of all elements; the first is the identity.
    pub fn elements(&self) -> Vec<GroupElement> {
        (0..self.order()).map(|i| self.element_at(i)).collect()
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        GroupElement(
            self.factors
                .iter()
                .zip(a.0.iter().zip(&b.0))
                .map(|(&n, (&x, &y))| (x + y) % n)
                .collect(),
        )
    }

    pub fn neg(&self, a: &GroupElement) -> GroupElement {
        GroupElement(
            self.factors
                .iter()
                .zip(&a.0)
                .map(|(&n, &x)| (n - x % n) % n)
                .collect(),
        )
    }

    pub fn sub(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        self.add(a, &self.neg(b))
    }

    pub fn character(&self, label: GroupElement) -> Character {
        Character { label }
    }

    /// γ_m(g) as a unit-modulus complex number. The phase is accumulated as
    /// one exact rational over the lcm of the factors before the single call
    /// to `exp`, so characters of the same element are bit-identical wherever
    /// they appear.
    pub fn character_value(&self, label: &GroupElement, g: &GroupElement) -> Complex64 {
        let l = self.factors.iter().fold(1u64, |acc, &n| lcm(acc, n as u64));
        let mut num = 0u64;
        for (j, &n) in self.factors.iter().enumerate() {
            let term = (label.0[j] as u64 % n as u64) * (g.0[j] as u64 % n as u64) % n as u64;
            num = (num + term * (l / n as u64)) % l;
        }
        unit_phase(num, l)
    }

    /// G×G character table: entry (g, γ_m) = γ_m(g) with both axes in
    /// enumeration order. Satisfies Γ* Γ = G·I.
    pub fn character_table(&self) -> ComplexMatrix {
        let els = self.elements();
        let g = els.len();
        ComplexMatrix::from_fn(g, g, |i, j| self.character_value(&els[j], &els[i]))
    }

    /// Entrywise DFT of a group-indexed sequence of equal-size square
    /// matrices: output at γ is `Σ_g conj(γ(g)) · seq[g]`, indexed by the
    /// character labels in enumeration order.
    pub fn entrywise_dft(&self, seq: &[ComplexMatrix]) -> Result<Vec<ComplexMatrix>, GroupError> {
        let order = self.order();
        if seq.len() != order {
            return Err(GroupError::LengthMismatch { got: seq.len(), expected: order });
        }
        let r = seq.first().map_or(0, |m| m.rows());
        if seq.iter().any(|m| m.rows() != r || m.cols() != r) {
            return Err(GroupError::SizeMismatch);
        }
        let els = self.elements();
        let mut out = Vec::with_capacity(order);
        for label in &els {
            let mut acc = ComplexMatrix::zeros(r, r);
            for (g, m) in els.iter().zip(seq) {
                let w = self.character_value(label, g).conj();
                acc = &acc + &m.scale(w);
            }
            out.push(acc);
        }
        Ok(out)
    }

    /// Inverse of [`Self::entrywise_dft`]: recovers the group-indexed sequence from
    /// its character-indexed DFT.
    pub fn entrywise_dft_inverse(
        &self,
        spectrum: &[ComplexMatrix],
    ) -> Result<Vec<ComplexMatrix>, GroupError> {
        let order = self.order();
        if spectrum.len() != order {
            return Err(GroupError::LengthMismatch { got: spectrum.len(), expected: order });
        }
        let r = spectrum.first().map_or(0, |m| m.rows());
        if spectrum.iter().any(|m| m.rows() != r || m.cols() != r) {
            return Err(GroupError::SizeMismatch);
        }
        let els = self.elements();
        let scale = 1.0 / order as f64;
        let mut out = Vec::with_capacity(order);
        for g in &els {
            let mut acc = ComplexMatrix::zeros(r, r);
            for (label, m) in els.iter().zip(spectrum) {
                let w = self.character_value(label, g);
                acc = &acc + &m.scale(w);
            }
            out.push(acc.scale_re(scale));
        }
        Ok(out)
    }
}

impl Character {
    pub fn eval(&self, group: &FiniteAbelianGroup, g: &GroupElement) -> Complex64 {
        group.character_value(&self.label, g)
    }
}

/// exp(2πi num/den) with the argument reduced exactly first.
pub(crate) fn unit_phase(num: u64, den: u64) -> Complex64 {
    let num = num % den;
    // Exact values on the axes keep downstream realness checks sharp.
    if (4 * num).is_multiple_of(den) {
        return match (4 * num / den) % 4 {
            0 => Complex64::ONE,
            1 => Complex64::I,
            2 => -Complex64::ONE,
            _ => -Complex64::I,
        };
    }
    let (s, c) = (TAU * num as f64 / den as f64).sin_cos();
    Complex64::new(c, s)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_enumeration() {
        let z5 = FiniteAbelianGroup::cyclic(5);
        let els: Vec<u32> = z5.elements().iter().map(|e| e.0[0]).collect();
        assert_eq!(els, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn product_enumeration_is_lexicographic() {
        let g = FiniteAbelianGroup::new(vec![2, 2]).unwrap();
        let els: Vec<Vec<u32>> = g.elements().iter().map(|e| e.0.clone()).collect();
        assert_eq!(els, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(g.identity(), g.element_at(0));
    }

    #[test]
    fn seven_elements_from_zero() {
        let z7 = FiniteAbelianGroup::cyclic(7);
        assert_eq!(z7.order(), 7);
        assert_eq!(z7.element_at(0), z7.identity());
    }

    #[test]
    fn character_table_z2() {
        let t = FiniteAbelianGroup::cyclic(2).character_table();
        let expect = [[1.0, 1.0], [1.0, -1.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((t[(i, j)] - Complex64::new(expect[i][j], 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn character_table_z5_matches_roots_of_unity() {
        let z5 = FiniteAbelianGroup::cyclic(5);
        let t = z5.character_table();
        for n in 0..5usize {
            for m in 0..5usize {
                let expect = Complex64::from_polar(1.0, TAU * (m * n % 5) as f64 / 5.0);
                assert!((t[(n, m)] - expect).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn character_table_is_scaled_unitary() {
        for factors in [vec![5], vec![2, 3], vec![2, 2, 2], vec![4, 3]] {
            let g = FiniteAbelianGroup::new(factors).unwrap();
            let t = g.character_table();
            let prod = &t.adjoint() * &t;
            let scaled = prod.scale_re(1.0 / g.order() as f64);
            assert!(scaled.distance_from_identity() < 1e-12, "Γ*Γ != G·I");
        }
    }

    #[test]
    fn character_orthogonality() {
        // Σ_g conj(γ1(g)) γ2(g) = 0 for γ1 != γ2, groups up to order 128.
        for factors in [vec![7], vec![12], vec![2, 2, 2, 2], vec![8, 16]] {
            let g = FiniteAbelianGroup::new(factors).unwrap();
            let els = g.elements();
            for a in [0usize, 1, g.order() - 1] {
                for b in [0usize, 2 % g.order(), g.order() / 2] {
                    if a == b {
                        continue;
                    }
                    let (la, lb) = (g.element_at(a), g.element_at(b));
                    let s: Complex64 = els
                        .iter()
                        .map(|e| g.character_value(&la, e).conj() * g.character_value(&lb, e))
                        .sum();
                    assert!(s.norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn character_homomorphism_exact() {
        // γ(g1+g2) = γ(g1)γ(g2) within 1e-14, exhaustively for orders <= 64.
        for factors in [vec![9], vec![4, 4], vec![3, 5]] {
            let g = FiniteAbelianGroup::new(factors).unwrap();
            let els = g.elements();
            for label in &els {
                for g1 in &els {
                    for g2 in &els {
                        let lhs = g.character_value(label, &g.add(g1, g2));
                        let rhs = g.character_value(label, g1) * g.character_value(label, g2);
                        assert!((lhs - rhs).norm() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn dft_of_zeros_is_zero() {
        let z3 = FiniteAbelianGroup::cyclic(3);
        let seq = vec![ComplexMatrix::zeros(2, 2); 3];
        for m in z3.entrywise_dft(&seq).unwrap() {
            assert_eq!(m.frobenius_norm(), 0.0);
        }
    }

    #[test]
    fn dft_of_delta_is_constant() {
        let z3 = FiniteAbelianGroup::cyclic(3);
        let mut seq = vec![ComplexMatrix::zeros(2, 2); 3];
        seq[0] = ComplexMatrix::identity(2);
        for m in z3.entrywise_dft(&seq).unwrap() {
            assert!(m.distance_from_identity() < 1e-15);
        }
    }

    #[test]
    fn dft_rejects_mixed_sizes() {
        let z2 = FiniteAbelianGroup::cyclic(2);
        let seq = vec![ComplexMatrix::identity(2), ComplexMatrix::identity(3)];
        assert!(matches!(z2.entrywise_dft(&seq), Err(GroupError::SizeMismatch)));
    }
}
