//! Fusion frames as ordered sequences of isometries, together with the
//! verification machinery: tightness and Welch-bound constants, principal
//! angles, chordal/spectral distances, equichordal/equi-isoclinic
//! certificates, Naimark and spatial complements, and direct sums.
//!
//! All equality claims from exact arithmetic become residual bounds here.
//! Every certificate records the tolerance it was judged against and the
//! measured deviations, so a reader can re-audit any claim.

use crate::abelian_group::FiniteAbelianGroup;
use crate::cmatrix::{ComplexMatrix, MatrixError};
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FrameError {
    #[error("a fusion frame needs at least one subspace")]
    Empty,
    #[error("isometry {index} has {rows} rows, ambient dimension is {ambient}")]
    AmbientMismatch { index: usize, rows: usize, ambient: usize },
    #[error("all subspaces have rank zero")]
    AllRanksZero,
    #[error("isometry {index} has rank {rank} above the ambient dimension {ambient}")]
    RankTooLarge { index: usize, rank: usize, ambient: usize },
    #[error("group tag has order {group} but the frame has {subspaces} subspaces")]
    GroupOrderMismatch { group: usize, subspaces: usize },
    #[error("frame is not tight: residual {residual:.3e} exceeds {tolerance:.3e}")]
    NotTight { residual: f64, tolerance: f64 },
    #[error("Naimark complement requires D < sum of ranks (got D = {0})")]
    NoNaimarkComplement(usize),
    #[error("spatial complement requires some rank below the ambient dimension")]
    NoSpatialComplement,
    #[error("direct sum needs at least one frame")]
    EmptySum,
    #[error("direct summands must share one subspace count, got {0} and {1}")]
    SubspaceCountMismatch(usize, usize),
    #[error(
        "direct sum consistency violated by summand {index}: \
         (1/{d_j})*{sum_r_j} != (1/{d0})*{sum_r0}"
    )]
    InconsistentRatio { index: usize, d_j: usize, sum_r_j: usize, d0: usize, sum_r0: usize },
    #[error("pair indices must be distinct, got ({0}, {0})")]
    SamePair(usize),
    #[error("subspace index {index} out of range for {count} subspaces")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("complement has rank {got}, expected {expected}; input is too far from tight")]
    ComplementRank { got: usize, expected: usize },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// Sequence of D×R_n isometries onto subspaces of a D-dimensional space.
/// Ranks may be zero and may differ across subspaces. An optional group tag
/// marks frames whose indices carry abelian-group structure (used by the
/// block-circulant checks). Deserialization runs the same shape validation
/// as [`FusionFrame::new`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "FrameData")]
pub struct FusionFrame {
    ambient_dim: usize,
    isometries: Vec<ComplexMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    group: Option<FiniteAbelianGroup>,
}

#[derive(Deserialize)]
struct FrameData {
    ambient_dim: usize,
    isometries: Vec<ComplexMatrix>,
    #[serde(default)]
    group: Option<FiniteAbelianGroup>,
}

impl TryFrom<FrameData> for FusionFrame {
    type Error = FrameError;
    fn try_from(data: FrameData) -> Result<Self, FrameError> {
        FusionFrame::new(data.ambient_dim, data.isometries, data.group)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TightnessReport {
    pub is_tight: bool,
    pub frame_constant: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairAngles {
    pub pair: (usize, usize),
    pub angles: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Violation {
    pub property: String,
    pub deviation: f64,
    pub tolerance: f64,
}

/// Structured verification report for one fusion frame.
///
/// Equichordal/equi-isoclinic classification is only defined for uniform
/// frames; non-uniform frames get tightness-only certificates with the
/// classification fields absent. `is_equiisoclinic` implies `is_equichordal`
/// on every certificate emitted. `is_real` states that the fusion Gram is
/// entrywise real as presented; a false value never rules out realness of
/// an equivalent set of isometries.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Certificate {
    pub ambient_dim: usize,
    pub num_subspaces: usize,
    pub ranks: Vec<usize>,
    pub tolerance: f64,
    pub max_isometry_deviation: f64,
    pub is_tight: bool,
    pub frame_constant: f64,
    pub tightness_residual: f64,
    pub is_uniform: bool,
    pub welch_bound: Option<f64>,
    pub is_equichordal: Option<bool>,
    pub common_chordal_distance: Option<f64>,
    pub equichordal_deviation: Option<f64>,
    pub is_equiisoclinic: Option<bool>,
    pub isoclinic_sigma: Option<f64>,
    pub equiisoclinic_deviation: Option<f64>,
    pub sigma_matches_welch: Option<bool>,
    pub is_real: bool,
    pub max_imaginary_entry: f64,
    pub principal_angle_table: Vec<PairAngles>,
    pub violations: Vec<Violation>,
}

impl FusionFrame {
    pub fn new(
        ambient_dim: usize,
        isometries: Vec<ComplexMatrix>,
        group: Option<FiniteAbelianGroup>,
    ) -> Result<Self, FrameError> {
        if isometries.is_empty() {
            return Err(FrameError::Empty);
        }
        for (index, m) in isometries.iter().enumerate() {
            if m.rows() != ambient_dim {
                return Err(FrameError::AmbientMismatch { index, rows: m.rows(), ambient: ambient_dim });
            }
            if m.cols() > ambient_dim {
                return Err(FrameError::RankTooLarge { index, rank: m.cols(), ambient: ambient_dim });
            }
        }
        if isometries.iter().all(|m| m.cols() == 0) {
            return Err(FrameError::AllRanksZero);
        }
        if let Some(g) = &group {
            if g.order() != isometries.len() {
                return Err(FrameError::GroupOrderMismatch {
                    group: g.order(),
                    subspaces: isometries.len(),
                });
            }
        }
        Ok(Self { ambient_dim, isometries, group })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn num_subspaces(&self) -> usize {
        self.isometries.len()
    }

    pub fn isometries(&self) -> &[ComplexMatrix] {
        &self.isometries
    }

    pub fn isometry(&self, n: usize) -> &ComplexMatrix {
        &self.isometries[n]
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.isometries.iter().map(|m| m.cols()).collect()
    }

    pub fn total_rank(&self) -> usize {
        self.isometries.iter().map(|m| m.cols()).sum()
    }

    pub fn group(&self) -> Option<&FiniteAbelianGroup> {
        self.group.as_ref()
    }

    pub fn with_group(mut self, group: Option<FiniteAbelianGroup>) -> Result<Self, FrameError> {
        if let Some(g) = &group {
            if g.order() != self.isometries.len() {
                return Err(FrameError::GroupOrderMismatch {
                    group: g.order(),
                    subspaces: self.isometries.len(),
                });
            }
        }
        self.group = group;
        Ok(self)
    }

    pub fn is_uniform(&self) -> bool {
        let r0 = self.isometries[0].cols();
        self.isometries.iter().all(|m| m.cols() == r0)
    }

    /// Column offsets of each block inside the fusion synthesis matrix.
    fn col_offsets(&self) -> Vec<usize> {
        let mut offsets = Vec::with_capacity(self.isometries.len() + 1);
        let mut acc = 0;
        for m in &self.isometries {
            offsets.push(acc);
            acc += m.cols();
        }
        offsets.push(acc);
        offsets
    }

    /// D × ΣR_n synthesis matrix: the isometries side by side.
    pub fn synthesis(&self) -> ComplexMatrix {
        let total = self.total_rank();
        let mut out = ComplexMatrix::zeros(self.ambient_dim, total);
        let offsets = self.col_offsets();
        for (n, m) in self.isometries.iter().enumerate() {
            out.set_block(0, offsets[n], m);
        }
        out
    }

    /// ΣR_n × ΣR_n fusion Gram matrix; the (n1, n2) block is the cross-Gram
    /// Φ_{n1}* Φ_{n2}, and diagonal blocks of a valid frame are identities.
    pub fn fusion_gram(&self) -> ComplexMatrix {
        let total = self.total_rank();
        let offsets = self.col_offsets();
        let mut out = ComplexMatrix::zeros(total, total);
        for n1 in 0..self.isometries.len() {
            for n2 in 0..self.isometries.len() {
                let block = self.cross_gram(n1, n2);
                out.set_block(offsets[n1], offsets[n2], &block);
            }
        }
        out
    }

    pub fn cross_gram(&self, n1: usize, n2: usize) -> ComplexMatrix {
        &self.isometries[n1].adjoint() * &self.isometries[n2]
    }

    /// Σ_n Φ_n Φ_n*, the fusion frame operator.
    pub fn frame_operator(&self) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.ambient_dim, self.ambient_dim);
        for m in &self.isometries {
            acc = &acc + &(m * &m.adjoint());
        }
        acc
    }

    /// Frame constant A = (ΣR_n)/D that tightness is judged against.
    pub fn frame_constant(&self) -> f64 {
        self.total_rank() as f64 / self.ambient_dim as f64
    }

    pub fn check_tight(&self, tol: f64) -> TightnessReport {
        let a = self.frame_constant();
        let op = self.frame_operator();
        let target = ComplexMatrix::identity(self.ambient_dim).scale_re(a);
        let residual = (&op - &target).frobenius_norm();
        TightnessReport { is_tight: residual <= tol, frame_constant: a, residual }
    }

    pub fn max_isometry_deviation(&self) -> f64 {
        self.isometries
            .iter()
            .map(|m| (&m.adjoint() * m).distance_from_identity())
            .fold(0.0, f64::max)
    }

    /// Principal angles between subspaces n1 and n2, ascending in [0, π/2].
    pub fn principal_angles(&self, n1: usize, n2: usize) -> Result<Vec<f64>, FrameError> {
        self.check_pair(n1, n2)?;
        let b = self.cross_gram(n1, n2);
        Ok(b
            .singular_values()
            .iter()
            .map(|&s| s.clamp(0.0, 1.0).acos())
            .collect())
    }

    /// Chordal distance (R − ‖B‖²_Fro)^{1/2} with R the smaller rank.
    pub fn chordal_distance(&self, n1: usize, n2: usize) -> Result<f64, FrameError> {
        self.check_pair(n1, n2)?;
        let b = self.cross_gram(n1, n2);
        let r = self.isometries[n1].cols().min(self.isometries[n2].cols()) as f64;
        Ok((r - b.frobenius_norm().powi(2)).max(0.0).sqrt())
    }

    /// Spectral distance (1 − ‖B‖²₂)^{1/2}.
    pub fn spectral_distance(&self, n1: usize, n2: usize) -> Result<f64, FrameError> {
        self.check_pair(n1, n2)?;
        let b = self.cross_gram(n1, n2);
        Ok((1.0 - b.spectral_norm().powi(2)).max(0.0).sqrt())
    }

    fn check_pair(&self, n1: usize, n2: usize) -> Result<(), FrameError> {
        let count = self.isometries.len();
        for index in [n1, n2] {
            if index >= count {
                return Err(FrameError::IndexOutOfRange { index, count });
            }
        }
        if n1 == n2 {
            return Err(FrameError::SamePair(n1));
        }
        Ok(())
    }

    /// Welch bound [(NR−D)/(D(N−1))]^{1/2} for a uniform frame with N ≥ 2.
    pub fn welch_bound(&self) -> Option<f64> {
        let n = self.isometries.len();
        if !self.is_uniform() || n < 2 {
            return None;
        }
        let r = self.isometries[0].cols();
        let num = (n * r) as f64 - self.ambient_dim as f64;
        Some((num / (self.ambient_dim as f64 * (n - 1) as f64)).max(0.0).sqrt())
    }

    /// Full verification report at the given tolerance.
    pub fn certify(&self, tol: f64) -> Certificate {
        let n = self.isometries.len();
        let ranks = self.ranks();
        let tight = self.check_tight(tol);
        let iso_dev = self.max_isometry_deviation();
        let uniform = self.is_uniform();

        let mut max_imag = 0.0f64;
        let mut angle_table = Vec::new();
        let mut block_fro: Vec<f64> = Vec::new();
        let mut blocks: Vec<(usize, usize, ComplexMatrix)> = Vec::new();
        for n1 in 0..n {
            max_imag = max_imag.max(self.cross_gram(n1, n1).max_imag_entry());
            for n2 in (n1 + 1)..n {
                let b = self.cross_gram(n1, n2);
                max_imag = max_imag.max(b.max_imag_entry());
                block_fro.push(b.frobenius_norm());
                angle_table.push(PairAngles {
                    pair: (n1, n2),
                    angles: b.singular_values().iter().map(|&s| s.clamp(0.0, 1.0).acos()).collect(),
                });
                blocks.push((n1, n2, b));
            }
        }

        let mut cert = Certificate {
            ambient_dim: self.ambient_dim,
            num_subspaces: n,
            ranks: ranks.clone(),
            tolerance: tol,
            max_isometry_deviation: iso_dev,
            is_tight: tight.is_tight,
            frame_constant: tight.frame_constant,
            tightness_residual: tight.residual,
            is_uniform: uniform,
            welch_bound: self.welch_bound(),
            is_equichordal: None,
            common_chordal_distance: None,
            equichordal_deviation: None,
            is_equiisoclinic: None,
            isoclinic_sigma: None,
            equiisoclinic_deviation: None,
            sigma_matches_welch: None,
            is_real: max_imag <= tol,
            max_imaginary_entry: max_imag,
            principal_angle_table: angle_table,
            violations: Vec::new(),
        };

        if uniform {
            let r = ranks[0];
            if n < 2 {
                cert.is_equichordal = Some(true);
                cert.is_equiisoclinic = Some(true);
                cert.equichordal_deviation = Some(0.0);
                cert.equiisoclinic_deviation = Some(0.0);
            } else {
                let mean_fro = block_fro.iter().sum::<f64>() / block_fro.len() as f64;
                let ec_dev = block_fro.iter().map(|v| (v - mean_fro).abs()).fold(0.0, f64::max);
                let mean_sq = block_fro.iter().map(|v| v * v).sum::<f64>() / block_fro.len() as f64;
                cert.common_chordal_distance = Some((r as f64 - mean_sq).max(0.0).sqrt());
                cert.equichordal_deviation = Some(ec_dev);

                // For a tight frame the only admissible isoclinicity parameter
                // is the Welch bound; otherwise fit it from the mean block norm.
                let sigma_sq = if tight.is_tight {
                    cert.welch_bound.map(|w| w * w).unwrap_or(0.0)
                } else {
                    mean_sq / r.max(1) as f64
                };
                let target = ComplexMatrix::identity(r).scale_re(sigma_sq);
                let ei_dev = blocks
                    .iter()
                    .map(|(_, _, b)| (&(&b.adjoint() * b) - &target).frobenius_norm())
                    .fold(0.0, f64::max);
                let is_ei = ei_dev <= tol;
                cert.is_equiisoclinic = Some(is_ei);
                cert.isoclinic_sigma = Some(sigma_sq.sqrt());
                cert.equiisoclinic_deviation = Some(ei_dev);
                // equi-isoclinic implies equichordal
                cert.is_equichordal = Some(ec_dev <= tol || is_ei);
                cert.sigma_matches_welch = cert
                    .welch_bound
                    .map(|w| (sigma_sq.sqrt() - w).abs() <= tol);
            }
        }

        let mut violations = Vec::new();
        if iso_dev > tol {
            violations.push(Violation {
                property: "isometry_columns_orthonormal".into(),
                deviation: iso_dev,
                tolerance: tol,
            });
        }
        if !cert.is_tight {
            violations.push(Violation {
                property: "tightness_frame_operator_multiple_of_identity".into(),
                deviation: cert.tightness_residual,
                tolerance: tol,
            });
        }
        if cert.is_equichordal == Some(false) {
            violations.push(Violation {
                property: "equichordal_constant_cross_gram_norms".into(),
                deviation: cert.equichordal_deviation.unwrap_or(f64::NAN),
                tolerance: tol,
            });
        }
        if cert.is_equiisoclinic == Some(false) {
            violations.push(Violation {
                property: "equiisoclinic_scaled_unitary_cross_grams".into(),
                deviation: cert.equiisoclinic_deviation.unwrap_or(f64::NAN),
                tolerance: tol,
            });
        }
        cert.violations = violations;
        cert
    }

    /// Naimark complement, realized by factoring the complementary Gram
    /// matrix (A/(A−1))(I − G/A). The output lives in ΣR_n − D dimensions,
    /// has the same ranks, and its cross-Grams are −D/(ΣR−D) times the
    /// originals.
    pub fn naimark_complement(&self, tol: f64) -> Result<FusionFrame, FrameError> {
        let tight = self.check_tight(tol);
        if !tight.is_tight {
            return Err(FrameError::NotTight { residual: tight.residual, tolerance: tol });
        }
        let total = self.total_rank();
        if self.ambient_dim >= total {
            return Err(FrameError::NoNaimarkComplement(self.ambient_dim));
        }
        let a = tight.frame_constant;
        let gram = self.fusion_gram();
        let ident = ComplexMatrix::identity(total);
        let complement_gram = (&ident - &gram.scale_re(1.0 / a)).scale_re(a / (a - 1.0));
        let factor = complement_gram.factor_gram(1e-8)?;
        let expected = total - self.ambient_dim;
        if factor.rows() != expected {
            return Err(FrameError::ComplementRank { got: factor.rows(), expected });
        }
        let offsets = self.col_offsets();
        let isometries = (0..self.isometries.len())
            .map(|n| factor.block(0, offsets[n], expected, self.isometries[n].cols()))
            .collect();
        FusionFrame::new(expected, isometries, self.group.clone())
    }

    /// Spatial complement: isometries onto the orthogonal complements of the
    /// subspaces, in the same ambient space. A tight input with constant A
    /// yields a tight output with constant N − A.
    pub fn spatial_complement(&self, tol: f64) -> Result<FusionFrame, FrameError> {
        let tight = self.check_tight(tol);
        if !tight.is_tight {
            return Err(FrameError::NotTight { residual: tight.residual, tolerance: tol });
        }
        if self.isometries.iter().all(|m| m.cols() == self.ambient_dim) {
            return Err(FrameError::NoSpatialComplement);
        }
        let ident = ComplexMatrix::identity(self.ambient_dim);
        let mut isometries = Vec::with_capacity(self.isometries.len());
        for m in &self.isometries {
            let projection = m * &m.adjoint();
            let complement = &ident - &projection;
            let factor = complement.factor_gram(1e-8)?;
            let expected = self.ambient_dim - m.cols();
            if factor.rows() != expected {
                return Err(FrameError::ComplementRank { got: factor.rows(), expected });
            }
            isometries.push(factor.adjoint());
        }
        FusionFrame::new(self.ambient_dim, isometries, self.group.clone())
    }

    /// Direct sum of frames over the same index set, valid when every
    /// summand has the same frame constant (checked exactly on the integer
    /// ratios ΣR/D).
    pub fn direct_sum(frames: &[FusionFrame]) -> Result<FusionFrame, FrameError> {
        let first = frames.first().ok_or(FrameError::EmptySum)?;
        let n = first.num_subspaces();
        let d0 = first.ambient_dim;
        let sum_r0 = first.total_rank();
        for (index, f) in frames.iter().enumerate().skip(1) {
            if f.num_subspaces() != n {
                return Err(FrameError::SubspaceCountMismatch(n, f.num_subspaces()));
            }
            let (d_j, sum_r_j) = (f.ambient_dim, f.total_rank());
            if sum_r_j * d0 != sum_r0 * d_j {
                return Err(FrameError::InconsistentRatio { index, d_j, sum_r_j, d0, sum_r0 });
            }
        }
        let ambient: usize = frames.iter().map(|f| f.ambient_dim).sum();
        let mut isometries = Vec::with_capacity(n);
        for idx in 0..n {
            let cols: usize = frames.iter().map(|f| f.isometries[idx].cols()).sum();
            let mut block = ComplexMatrix::zeros(ambient, cols);
            let mut row0 = 0;
            let mut col0 = 0;
            for f in frames {
                block.set_block(row0, col0, &f.isometries[idx]);
                row0 += f.ambient_dim;
                col0 += f.isometries[idx].cols();
            }
            isometries.push(block);
        }
        let group = if frames.windows(2).all(|w| w[0].group == w[1].group) {
            first.group.clone()
        } else {
            None
        };
        FusionFrame::new(ambient, isometries, group)
    }
}

/// Isometries obtained by partitioning the standard basis of C^{nr} into n
/// groups of r columns: the trivial equi-isoclinic frame with D = NR.
pub fn orthonormal_partition_frame(n: usize, r: usize) -> FusionFrame {
    let d = n * r;
    let ident = ComplexMatrix::identity(d);
    let isometries = (0..n).map(|i| ident.block(0, i * r, d, r)).collect();
    FusionFrame::new(d, isometries, None).expect("valid partition frame")
}

/// Clamp helper kept public for report formatting.
pub fn right_angle() -> f64 {
    FRAC_PI_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Deterministic pseudo-random isometry: the leading columns of the
    /// eigenvector matrix of a seeded random Hermitian matrix.
    fn random_isometry(d: usize, r: usize, seed: u64) -> ComplexMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw = ComplexMatrix::from_fn(d, d, |_, _| {
            c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let herm = &raw + &raw.adjoint();
        let (_, vecs) = herm.hermitian_eig(1e-9).unwrap();
        vecs.block(0, 0, d, r)
    }

    /// Example generating frame: five isometries into C^2 with ranks
    /// {0,1,1,1,1} whose projections sum to 2I.
    fn five_vector_generating_frame() -> FusionFrame {
        let s = 1.0 / 2f64.sqrt();
        let cols = [
            vec![],
            vec![c(s, 0.), c(s, 0.)],
            vec![c(s, 0.), c(0., s)],
            vec![c(s, 0.), c(0., -s)],
            vec![c(s, 0.), c(-s, 0.)],
        ];
        let isometries = cols
            .iter()
            .map(|col| {
                if col.is_empty() {
                    ComplexMatrix::zeros(2, 0)
                } else {
                    ComplexMatrix::new(2, 1, col.clone()).unwrap()
                }
            })
            .collect();
        FusionFrame::new(2, isometries, Some(FiniteAbelianGroup::cyclic(5))).unwrap()
    }

    #[test]
    fn single_subspace_gram_is_identity() {
        let f = FusionFrame::new(3, vec![ComplexMatrix::identity(3)], None).unwrap();
        assert!(f.fusion_gram().distance_from_identity() < 1e-15);
    }

    #[test]
    fn orthonormal_partition_gram_is_identity() {
        let f = orthonormal_partition_frame(3, 2);
        assert!(f.fusion_gram().distance_from_identity() < 1e-15);
        let cert = f.certify(1e-9);
        assert_eq!(cert.is_equiisoclinic, Some(true));
        assert_eq!(cert.isoclinic_sigma, Some(0.0));
        assert!(cert.is_tight);
    }

    #[test]
    fn copies_of_full_space_are_tight() {
        let copies = vec![ComplexMatrix::identity(3); 4];
        let f = FusionFrame::new(3, copies, None).unwrap();
        let report = f.check_tight(1e-9);
        assert!(report.is_tight);
        assert!((report.frame_constant - 4.0).abs() < 1e-15);
        let cert = f.certify(1e-9);
        assert_eq!(cert.is_equiisoclinic, Some(true));
        assert!((cert.isoclinic_sigma.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn generating_frame_is_tight_with_constant_two() {
        let f = five_vector_generating_frame();
        let report = f.check_tight(1e-12);
        assert!(report.is_tight);
        assert!((report.frame_constant - 2.0).abs() < 1e-15);
        let cert = f.certify(1e-9);
        assert!(!cert.is_uniform);
        assert!(cert.is_equichordal.is_none(), "nonuniform frames are not classified");
    }

    #[test]
    fn random_isometries_are_not_tight() {
        let iso = vec![random_isometry(4, 2, 7), random_isometry(4, 2, 8)];
        let f = FusionFrame::new(4, iso, None).unwrap();
        assert!(!f.check_tight(1e-9).is_tight);
    }

    #[test]
    fn principal_angles_identical_and_orthogonal() {
        let ident = ComplexMatrix::identity(4);
        let u = ident.block(0, 0, 4, 2);
        let same = FusionFrame::new(4, vec![u.clone(), u.clone()], None).unwrap();
        for angle in same.principal_angles(0, 1).unwrap() {
            assert!(angle.abs() < 1e-12);
        }
        let v = ident.block(0, 2, 4, 2);
        let orth = FusionFrame::new(4, vec![u, v], None).unwrap();
        for angle in orth.principal_angles(0, 1).unwrap() {
            assert!((angle - right_angle()).abs() < 1e-12);
        }
        assert!(matches!(orth.principal_angles(1, 1), Err(FrameError::SamePair(1))));
    }

    #[test]
    fn distances_identical_and_orthogonal() {
        let ident = ComplexMatrix::identity(4);
        let u = ident.block(0, 0, 4, 2);
        let v = ident.block(0, 2, 4, 2);
        let same = FusionFrame::new(4, vec![u.clone(), u.clone()], None).unwrap();
        assert!(same.chordal_distance(0, 1).unwrap() < 1e-12);
        assert!(same.spectral_distance(0, 1).unwrap() < 1e-12);
        let orth = FusionFrame::new(4, vec![u, v], None).unwrap();
        assert!((orth.chordal_distance(0, 1).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        assert!((orth.spectral_distance(0, 1).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spatial_complement_of_generating_frame() {
        let f = five_vector_generating_frame();
        let s = f.spatial_complement(1e-9).unwrap();
        assert_eq!(s.ranks(), vec![2, 1, 1, 1, 1]);
        assert_eq!(s.ambient_dim(), 2);
        let report = s.check_tight(1e-9);
        assert!(report.is_tight);
        assert!((report.frame_constant - 3.0).abs() < 1e-12, "N - A = 5 - 2");
    }

    #[test]
    fn naimark_requires_room() {
        let f = orthonormal_partition_frame(2, 2);
        assert!(matches!(f.naimark_complement(1e-9), Err(FrameError::NoNaimarkComplement(4))));
    }

    #[test]
    fn naimark_cross_gram_sign_relation() {
        let f = five_vector_generating_frame();
        let total = f.total_rank();
        let d = f.ambient_dim();
        let comp = f.naimark_complement(1e-9).unwrap();
        assert_eq!(comp.ambient_dim(), total - d);
        assert_eq!(comp.ranks(), f.ranks());
        let scale = -(d as f64) / (total - d) as f64;
        for n1 in 0..5 {
            for n2 in 0..5 {
                if n1 == n2 {
                    continue;
                }
                let lhs = comp.cross_gram(n1, n2);
                let rhs = f.cross_gram(n1, n2).scale_re(scale);
                assert!((&lhs - &rhs).frobenius_norm() < 1e-9);
            }
        }
        assert!(comp.check_tight(1e-9).is_tight);
    }

    #[test]
    fn direct_sum_ratio_check_is_exact() {
        let a = orthonormal_partition_frame(3, 1); // A = 1
        let b = orthonormal_partition_frame(3, 2); // A = 1
        let sum = FusionFrame::direct_sum(&[a.clone(), b]).unwrap();
        assert_eq!(sum.ambient_dim(), 9);
        assert_eq!(sum.ranks(), vec![3, 3, 3]);
        assert!(sum.check_tight(1e-12).is_tight);

        let copies = vec![ComplexMatrix::identity(2); 3];
        let full = FusionFrame::new(2, copies, None).unwrap(); // A = 3
        let err = FusionFrame::direct_sum(&[a, full]);
        assert!(matches!(err, Err(FrameError::InconsistentRatio { index: 1, .. })));
    }

    #[test]
    fn direct_sum_of_single_frame_is_identity_operation() {
        let f = five_vector_generating_frame();
        let sum = FusionFrame::direct_sum(std::slice::from_ref(&f)).unwrap();
        assert_eq!(sum.ambient_dim(), f.ambient_dim());
        for n in 0..5 {
            assert!((&sum.isometry(n).clone() - f.isometry(n)).frobenius_norm() == 0.0);
        }
    }

    #[test]
    fn trace_identity_on_random_frames() {
        // ‖ΦΦ* − (NR/D)I‖²_Fro = Tr[(Φ*Φ)²] − N²R²/D
        for seed in 0..4u64 {
            let (d, r, n) = (5, 2, 4);
            let isometries: Vec<_> =
                (0..n).map(|i| random_isometry(d, r, 100 + seed * 10 + i as u64)).collect();
            let f = FusionFrame::new(d, isometries, None).unwrap();
            let a = (n * r) as f64 / d as f64;
            let op = f.frame_operator();
            let lhs = (&op - &ComplexMatrix::identity(d).scale_re(a)).frobenius_norm().powi(2);
            let gram = f.fusion_gram();
            let rhs = (&gram * &gram).trace().re - ((n * r) as f64).powi(2) / d as f64;
            assert!((lhs - rhs).abs() < 1e-8);
        }
    }

    #[test]
    fn certificate_flags_perturbed_frame() {
        let mut ident_cols = ComplexMatrix::identity(4);
        ident_cols[(0, 0)] = c(1.001, 0.0);
        let f = FusionFrame::new(
            4,
            vec![ident_cols.block(0, 0, 4, 2), ident_cols.block(0, 2, 4, 2)],
            None,
        )
        .unwrap();
        let cert = f.certify(1e-9);
        assert!(!cert.is_tight);
        assert!(cert.violations.iter().any(|v| v.property.contains("tightness")));
        assert!(cert.max_isometry_deviation > 1e-9);
    }

    #[test]
    fn frame_construction_validates_shapes() {
        assert!(matches!(FusionFrame::new(3, vec![], None), Err(FrameError::Empty)));
        let wrong_rows = ComplexMatrix::zeros(2, 1);
        assert!(matches!(
            FusionFrame::new(3, vec![wrong_rows], None),
            Err(FrameError::AmbientMismatch { .. })
        ));
        let all_zero = vec![ComplexMatrix::zeros(3, 0)];
        assert!(matches!(FusionFrame::new(3, all_zero, None), Err(FrameError::AllRanksZero)));
    }
}
