//! GF(p^k) arithmetic with multiplicative/additive characters, the Legendre
//! symbol, and Gauss sums.
//!
//! Construction is fully deterministic: the modulus is the lexicographically
//! smallest monic irreducible of degree k (ordered by the integer encoding of
//! its lower coefficients), and the generator is the smallest element in
//! coefficient-lex order that generates the multiplicative group. For GF(11)
//! this picks generator 2; for GF(7) it picks 3.
//!
//! Elements are polynomial-basis coefficient tuples over ℤ_p. The element
//! with index n has coefficients equal to the base-p digits of n, so
//! enumeration order doubles as a packed integer encoding.

use crate::abelian_group::{unit_phase, FiniteAbelianGroup, GroupElement};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("field size {0}^{1} exceeds 2^16")]
    TooLarge(u32, u32),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("operation requires odd field size, got {0}")]
    EvenField(u32),
    #[error("character does not belong to this field")]
    FieldMismatch,
    #[error("the trivial multiplicative character is not allowed here")]
    TrivialCharacter,
    #[error("no multiplicative character with the requested parity exists for Q={0}")]
    NoSuchParity(u32),
    #[error("modulus polynomial is not irreducible")]
    ReducibleModulus,
}

/// Element of GF(p^k) in polynomial-basis coordinates, reduced mod p.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldElement(pub Vec<u32>);

/// Multiplicative character χ_m with χ_m(x₀ⁿ) = exp(2πi·mn/(Q−1)) for the
/// field's fixed generator x₀.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MultChar {
    pub index: u32,
    group_order: u32, // Q - 1, used to detect cross-field misuse
}

/// Additive character γ_y with γ_y(x) = exp(2πi·Tr(xy)/p), Tr the absolute
/// trace onto ℤ_p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AddChar {
    pub label: FieldElement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Debug, Clone)]
pub struct FiniteField {
    p: u32,
    k: u32,
    q: u32,
    modulus: Vec<u32>,     // length k+1, ascending powers, monic
    generator_index: u32,
    dlog: Vec<u32>,        // dlog[index(x)] for nonzero x; dlog[0] unused
    powers: Vec<u32>,      // powers[n] = index(generator^n), n in 0..q-1
}

#[derive(Serialize, Deserialize)]
struct FieldJson {
    p: u32,
    k: u32,
    modulus: Vec<u32>,
}

impl Serialize for FiniteField {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        FieldJson { p: self.p, k: self.k, modulus: self.modulus.clone() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FiniteField {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = FieldJson::deserialize(deserializer)?;
        FiniteField::with_modulus(raw.p, raw.k, raw.modulus).map_err(serde::de::Error::custom)
    }
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Trailing-zero-trimmed polynomial remainder over ℤ_p; inputs ascending.
fn poly_rem(mut f: Vec<u32>, g: &[u32], p: u32) -> Vec<u32> {
    let dg = g.len() - 1;
    let lead_inv = mod_inverse(g[dg], p);
    while f.len() > dg {
        let df = f.len() - 1;
        let coef = f[df] % p;
        if coef != 0 {
            let factor = coef as u64 * lead_inv as u64 % p as u64;
            for (i, &gc) in g.iter().enumerate() {
                let idx = df - dg + i;
                let sub = factor * gc as u64 % p as u64;
                f[idx] = ((f[idx] as u64 + p as u64 - sub) % p as u64) as u32;
            }
        }
        f.pop();
        while f.len() > 1 && *f.last().unwrap() == 0 {
            f.pop();
        }
    }
    f
}

fn mod_inverse(a: u32, p: u32) -> u32 {
    // p is prime, a nonzero mod p
    mod_pow(a % p, p - 2, p)
}

fn mod_pow(base: u32, mut exp: u32, m: u32) -> u32 {
    let mut acc = 1u64;
    let mut b = base as u64 % m as u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m as u64;
        }
        b = b * b % m as u64;
        exp >>= 1;
    }
    acc as u32
}

fn is_irreducible(f: &[u32], p: u32) -> bool {
    let k = f.len() - 1;
    if k == 1 {
        return true;
    }
    // trial division by every monic polynomial of degree 1..=k/2
    for d in 1..=k / 2 {
        let count = (p as u64).pow(d as u32);
        for enc in 0..count {
            let mut g = vec![0u32; d + 1];
            let mut rem = enc;
            for c in g.iter_mut().take(d) {
                *c = (rem % p as u64) as u32;
                rem /= p as u64;
            }
            g[d] = 1;
            let r = poly_rem(f.to_vec(), &g, p);
            if r.len() == 1 && r[0] == 0 {
                return false;
            }
        }
    }
    true
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

impl FiniteField {
    /// Build GF(p^k) with the deterministic modulus and generator choices.
    pub fn build(p: u32, k: u32) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if k == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let q = (p as u64).checked_pow(k).filter(|&q| q <= 1 << 16).ok_or(FieldError::TooLarge(p, k))? as u32;

        // lexicographically smallest monic irreducible: scan lower-coefficient
        // encodings in increasing order
        let mut modulus = None;
        for enc in 0..q as u64 {
            let mut f = vec![0u32; k as usize + 1];
            let mut rem = enc;
            for c in f.iter_mut().take(k as usize) {
                *c = (rem % p as u64) as u32;
                rem /= p as u64;
            }
            f[k as usize] = 1;
            if is_irreducible(&f, p) {
                modulus = Some(f);
                break;
            }
        }
        let modulus = modulus.ok_or(FieldError::ReducibleModulus)?;
        Self::with_modulus(p, k, modulus)
    }

    /// Build GF(p^k) on an explicitly supplied monic irreducible modulus.
    pub fn with_modulus(p: u32, k: u32, modulus: Vec<u32>) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if k == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let q = (p as u64).checked_pow(k).filter(|&q| q <= 1 << 16).ok_or(FieldError::TooLarge(p, k))? as u32;
        if modulus.len() != k as usize + 1
            || modulus[k as usize] % p != 1
            || !is_irreducible(&modulus, p)
        {
            return Err(FieldError::ReducibleModulus);
        }

        let mut field = Self {
            p,
            k,
            q,
            modulus,
            generator_index: 0,
            dlog: vec![0; q as usize],
            powers: Vec::new(),
        };

        let factors = prime_factors(q - 1);
        let mut generator = None;
        'search: for idx in 1..q {
            let el = field.element_at(idx);
            for &f in &factors {
                if field.index_of(&field.pow(&el, ((q - 1) / f) as u64)) == 1 {
                    continue 'search;
                }
            }
            generator = Some(idx);
            break;
        }
        field.generator_index = generator.expect("multiplicative group of a finite field is cyclic");

        let gen = field.element_at(field.generator_index);
        let mut acc = field.one();
        field.powers = Vec::with_capacity(q as usize - 1);
        for n in 0..q - 1 {
            let idx = field.index_of(&acc);
            field.powers.push(idx);
            field.dlog[idx as usize] = n;
            acc = field.mul(&acc, &gen);
        }
        debug_assert_eq!(field.index_of(&acc), 1, "generator order check");
        Ok(field)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn generator(&self) -> FieldElement {
        self.element_at(self.generator_index)
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement(vec![0; self.k as usize])
    }

    pub fn one(&self) -> FieldElement {
        self.element_at(1)
    }

    /// Element whose coefficients are the base-p digits of `index`.
    pub fn element_at(&self, index: u32) -> FieldElement {
        debug_assert!(index < self.q);
        let mut coeffs = vec![0u32; self.k as usize];
        let mut rem = index;
        for c in coeffs.iter_mut() {
            *c = rem % self.p;
            rem /= self.p;
        }
        FieldElement(coeffs)
    }

    pub fn index_of(&self, x: &FieldElement) -> u32 {
        let mut idx = 0u32;
        for &c in x.0.iter().rev() {
            idx = idx * self.p + c % self.p;
        }
        idx
    }

    pub fn elements(&self) -> Vec<FieldElement> {
        (0..self.q).map(|i| self.element_at(i)).collect()
    }

    pub fn nonzero_elements(&self) -> Vec<FieldElement> {
        (1..self.q).map(|i| self.element_at(i)).collect()
    }

    pub fn is_zero(&self, x: &FieldElement) -> bool {
        x.0.iter().all(|&c| c % self.p == 0)
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement(
            a.0.iter()
                .zip(&b.0)
                .map(|(&x, &y)| (x + y) % self.p)
                .collect(),
        )
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        FieldElement(a.0.iter().map(|&x| (self.p - x % self.p) % self.p).collect())
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let k = self.k as usize;
        let mut conv = vec![0u64; 2 * k - 1];
        for i in 0..k {
            for j in 0..k {
                conv[i + j] += a.0[i] as u64 * b.0[j] as u64;
            }
        }
        // reduce mod modulus, high degree first
        for deg in (k..2 * k - 1).rev() {
            let c = conv[deg] % self.p as u64;
            if c != 0 {
                for i in 0..k {
                    let sub = c * self.modulus[i] as u64 % self.p as u64;
                    conv[deg - k + i] = (conv[deg - k + i] % self.p as u64 + self.p as u64 - sub)
                        % self.p as u64;
                }
            }
            conv[deg] = 0;
        }
        FieldElement((0..k).map(|i| (conv[i] % self.p as u64) as u32).collect())
    }

    pub fn pow(&self, a: &FieldElement, mut e: u64) -> FieldElement {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn inverse(&self, a: &FieldElement) -> Option<FieldElement> {
        if self.is_zero(a) {
            return None;
        }
        let n = self.dlog(a).expect("nonzero element has a dlog");
        Some(self.generator_power((self.q - 1 - n) % (self.q - 1)))
    }

    /// Discrete log base the field generator; `None` for zero.
    pub fn dlog(&self, x: &FieldElement) -> Option<u32> {
        let idx = self.index_of(x);
        if idx == 0 {
            None
        } else {
            Some(self.dlog[idx as usize])
        }
    }

    pub fn generator_power(&self, n: u32) -> FieldElement {
        self.element_at(self.powers[(n % (self.q - 1)) as usize])
    }

    /// Absolute trace Tr(x) = Σ x^{p^i} as an integer in ℤ_p.
    pub fn trace(&self, x: &FieldElement) -> u32 {
        let mut acc = self.zero();
        let mut term = x.clone();
        for _ in 0..self.k {
            acc = self.add(&acc, &term);
            term = self.pow(&term, self.p as u64);
        }
        debug_assert!(acc.0.iter().skip(1).all(|&c| c == 0), "trace lies in the prime subfield");
        acc.0[0]
    }

    pub fn mult_char(&self, index: u32) -> MultChar {
        MultChar { index: index % (self.q - 1), group_order: self.q - 1 }
    }

    /// The quadratic character as a multiplicative character (odd Q only).
    pub fn legendre_char(&self) -> Result<MultChar, FieldError> {
        if self.q.is_multiple_of(2) {
            return Err(FieldError::EvenField(self.q));
        }
        Ok(self.mult_char((self.q - 1) / 2))
    }

    pub fn add_char(&self, label: FieldElement) -> AddChar {
        AddChar { label }
    }

    pub fn trivial_add_char(&self) -> AddChar {
        AddChar { label: self.zero() }
    }

    /// χ_m(x) for nonzero x; zero input is a caller bug.
    pub fn mult_char_value(&self, chi: &MultChar, x: &FieldElement) -> Complex64 {
        let n = self.dlog(x).expect("multiplicative character of zero");
        let m = chi.index as u64;
        unit_phase(m * n as u64 % (self.q as u64 - 1), self.q as u64 - 1)
    }

    /// χ_m extended by zero at 0 (the Paley/Legendre convention).
    pub fn mult_char_value_or_zero(&self, chi: &MultChar, x: &FieldElement) -> Complex64 {
        if self.is_zero(x) {
            Complex64::ZERO
        } else {
            self.mult_char_value(chi, x)
        }
    }

    pub fn add_char_value(&self, gamma: &AddChar, x: &FieldElement) -> Complex64 {
        let t = self.trace(&self.mul(&gamma.label, x));
        unit_phase(t as u64, self.p as u64)
    }

    /// Legendre symbol: 0 at zero, ±1 by quadratic-residue status. Odd Q only.
    pub fn legendre(&self, x: &FieldElement) -> Result<i32, FieldError> {
        if self.q.is_multiple_of(2) {
            return Err(FieldError::EvenField(self.q));
        }
        Ok(match self.dlog(x) {
            None => 0,
            Some(n) if n % 2 == 0 => 1,
            Some(_) => -1,
        })
    }

    /// Even iff χ(−1) = 1. Exact integer computation, no rounding.
    pub fn char_parity(&self, chi: &MultChar) -> Result<Parity, FieldError> {
        if chi.group_order != self.q - 1 {
            return Err(FieldError::FieldMismatch);
        }
        let minus_one = self.neg(&self.one());
        let n = self.dlog(&minus_one).expect("-1 is nonzero");
        let t = chi.index as u64 * n as u64 % (self.q as u64 - 1);
        Ok(if t == 0 { Parity::Even } else { Parity::Odd })
    }

    /// Smallest nontrivial character index with the requested parity.
    pub fn smallest_char_index_with_parity(&self, parity: Parity) -> Result<u32, FieldError> {
        for m in 1..self.q - 1 {
            if self.char_parity(&self.mult_char(m))? == parity {
                return Ok(m);
            }
        }
        Err(FieldError::NoSuchParity(self.q))
    }

    /// Gauss sum ⟨γ, χ⟩ = Σ_{x≠0} conj(γ(x))·χ(x). Each term's phase is
    /// assembled as one exact rational over p(Q−1) before exponentiation.
    pub fn gauss_sum(&self, gamma: &AddChar, chi: &MultChar) -> Result<Complex64, FieldError> {
        if chi.group_order != self.q - 1 || gamma.label.0.len() != self.k as usize {
            return Err(FieldError::FieldMismatch);
        }
        let qm1 = self.q as u64 - 1;
        let den = self.p as u64 * qm1; // p and Q-1 are coprime
        let mut sum = Complex64::ZERO;
        for idx in 1..self.q {
            let x = self.element_at(idx);
            let t = self.trace(&self.mul(&gamma.label, &x)) as u64;
            let n = self.dlog(&x).unwrap() as u64;
            let phase =
                ((self.p as u64 - t % self.p as u64) % self.p as u64 * qm1 + chi.index as u64 * n % qm1 * self.p as u64)
                    % den;
            sum += unit_phase(phase, den);
        }
        Ok(sum)
    }

    /// Additive group (ℤ_p)^k together with the coordinate bijection.
    /// Group coordinates are the field coefficients reversed, so the group's
    /// lexicographic enumeration matches the field's index order.
    pub fn additive_group(&self) -> FiniteAbelianGroup {
        FiniteAbelianGroup::new(vec![self.p; self.k as usize]).expect("p >= 2")
    }

    pub fn to_group_element(&self, x: &FieldElement) -> GroupElement {
        GroupElement(x.0.iter().rev().copied().collect())
    }

    pub fn from_group_element(&self, g: &GroupElement) -> FieldElement {
        FieldElement(g.0.iter().rev().copied().collect())
    }

    /// Label m of the group character satisfying γ_m(to_group(x)) = γ_y(x)
    /// for all x, via m_j = Tr(x^{k-1-j}·y).
    pub fn matching_character_label(&self, y: &FieldElement) -> GroupElement {
        let k = self.k as usize;
        let mut coords = vec![0u32; k];
        for i in 0..k {
            // basis element x^i as a coefficient tuple
            let mut basis = self.zero();
            basis.0[i] = 1;
            coords[k - 1 - i] = self.trace(&self.mul(&basis, y));
        }
        GroupElement(coords)
    }
}
