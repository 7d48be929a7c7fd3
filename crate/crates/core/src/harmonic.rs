//! Harmonic matrix ensembles: modulating a (possibly nonuniform) generating
//! frame for C^R into a uniform fusion frame on C^D whose Gram is
//! block-circulant over the dual group, plus the matrix-valued-DFT tests
//! that decide when the result is equichordal or equi-isoclinic.
//!
//! The generating data is a group-indexed sequence of R×D_g isometries with
//! projections P_g = Ψ_g Ψ_g*. Its entrywise DFT M_γ = Σ_g conj(γ(g)) P_g
//! controls everything: M_1 = A·I iff the generators form a tight frame, the
//! ensemble is equi-isoclinic iff every M_γ (γ ≠ 1) is √B times a unitary,
//! and equichordal iff ‖M_γ‖²/R is the constant B. The scalar B is never
//! fitted: it is pinned to D(GR−D)/(R²(G−1)), which makes the checks strict.

use crate::abelian_group::{FiniteAbelianGroup, GroupError, GroupElement};
use crate::cmatrix::{ComplexMatrix, MatrixError};
use crate::fusion_frame::{FrameError, FusionFrame};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarmonicError {
    #[error("generating frame has {got} isometries, group order is {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error("isometry {index} has {rows} rows, expected rank {rank}")]
    RankMismatch { index: usize, rows: usize, rank: usize },
    #[error("isometry {index} has {cols} columns, more than the rank {rank}")]
    WidthTooLarge { index: usize, cols: usize, rank: usize },
    #[error("total generator dimension is zero")]
    ZeroDimension,
    #[error("rank must be positive")]
    ZeroRank,
    #[error("generators do not form a tight frame: residual {residual:.3e} exceeds {tolerance:.3e}")]
    NotTff { residual: f64, tolerance: f64 },
    #[error("frame carries no group tag")]
    MissingGroupTag,
    #[error("block-circulant analysis requires uniform ranks")]
    NonUniform,
    #[error("fusion Gram is not block-circulant: deviation {residual:.3e} exceeds {tolerance:.3e}")]
    NotBlockCirculant { residual: f64, tolerance: f64 },
    #[error("frame is not tight: residual {residual:.3e} exceeds {tolerance:.3e}")]
    FrameNotTight { residual: f64, tolerance: f64 },
    #[error(
        "operator and autocorrelation criteria disagree \
         (deviations {operator:.3e} vs {autocorrelation:.3e}); internal inconsistency"
    )]
    InternalInconsistency { operator: f64, autocorrelation: f64 },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Frame(#[from] FrameError),
}

/// Group-indexed isometries Ψ_g : C^{D_g} → C^R that generate a harmonic
/// ensemble. Stored as isometries; projections are derived on demand.
/// Deserialization runs the same shape validation as [`GeneratingTff::new`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "GeneratingData")]
pub struct GeneratingTff {
    group: FiniteAbelianGroup,
    rank: usize,
    isometries: Vec<ComplexMatrix>,
}

#[derive(Deserialize)]
struct GeneratingData {
    group: FiniteAbelianGroup,
    rank: usize,
    isometries: Vec<ComplexMatrix>,
}

impl TryFrom<GeneratingData> for GeneratingTff {
    type Error = HarmonicError;
    fn try_from(data: GeneratingData) -> Result<Self, HarmonicError> {
        GeneratingTff::new(data.group, data.rank, data.isometries)
    }
}

/// Entrywise DFT of the generating projections, with the pinned constants.
/// Serializable for inspection of the spectrum matrices.
#[derive(Debug, Clone, Serialize)]
pub struct DftSpectrum {
    group: FiniteAbelianGroup,
    rank: usize,
    total_dim: usize,
    matrices: Vec<ComplexMatrix>,
    /// A = D/R; `M_1 = A·I` holds iff the generators form a tight frame.
    pub frame_constant: f64,
    pub tightness_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HarmonicClass {
    EquiIsoclinic,
    EquichordalOnly,
    TightOnly,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HarmonicClassification {
    pub class: HarmonicClass,
    /// Pinned B = D(GR−D)/(R²(G−1)).
    pub ei_constant: f64,
    /// Pinned C = D(D−R)/(R²(G−1)).
    pub autocorrelation_constant: f64,
    pub ei_deviation: f64,
    pub ec_deviation: f64,
    pub autocorrelation_deviation: f64,
    /// Set when D = GR or G = 1, where the classification is degenerate.
    pub trivial: bool,
    pub tolerance: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DifferenceProjectionReport {
    pub passes: bool,
    pub autocorrelation_constant: f64,
    pub deviation: f64,
    pub trivial: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockCirculantReport {
    pub is_block_circulant: bool,
    pub max_deviation: f64,
}

impl GeneratingTff {
    pub fn new(
        group: FiniteAbelianGroup,
        rank: usize,
        isometries: Vec<ComplexMatrix>,
    ) -> Result<Self, HarmonicError> {
        if rank == 0 {
            return Err(HarmonicError::ZeroRank);
        }
        if isometries.len() != group.order() {
            return Err(HarmonicError::LengthMismatch {
                got: isometries.len(),
                expected: group.order(),
            });
        }
        for (index, m) in isometries.iter().enumerate() {
            if m.rows() != rank {
                return Err(HarmonicError::RankMismatch { index, rows: m.rows(), rank });
            }
            if m.cols() > rank {
                return Err(HarmonicError::WidthTooLarge { index, cols: m.cols(), rank });
            }
        }
        Ok(Self { group, rank, isometries })
    }

    /// Recover a generating frame from projections alone; each projection is
    /// factored into an isometry of matching rank.
    pub fn from_projections(
        group: FiniteAbelianGroup,
        projections: &[ComplexMatrix],
        rank_tol: f64,
    ) -> Result<Self, HarmonicError> {
        let rank = projections.first().map_or(0, |p| p.rows());
        let mut isometries = Vec::with_capacity(projections.len());
        for p in projections {
            isometries.push(p.factor_gram(rank_tol)?.adjoint());
        }
        Self::new(group, rank, isometries)
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn isometries(&self) -> &[ComplexMatrix] {
        &self.isometries
    }

    pub fn dims(&self) -> Vec<usize> {
        self.isometries.iter().map(|m| m.cols()).collect()
    }

    /// D = Σ_g D_g.
    pub fn total_dim(&self) -> usize {
        self.isometries.iter().map(|m| m.cols()).sum()
    }

    pub fn projections(&self) -> Vec<ComplexMatrix> {
        self.isometries.iter().map(|m| m * &m.adjoint()).collect()
    }

    /// Residual of Σ_g P_g against (D/R)·I.
    pub fn tightness_residual(&self) -> f64 {
        let d = self.total_dim();
        let mut acc = ComplexMatrix::zeros(self.rank, self.rank);
        for p in self.projections() {
            acc = &acc + &p;
        }
        let target = ComplexMatrix::identity(self.rank).scale_re(d as f64 / self.rank as f64);
        (&acc - &target).frobenius_norm()
    }

    pub fn max_isometry_deviation(&self) -> f64 {
        self.isometries
            .iter()
            .map(|m| (&m.adjoint() * m).distance_from_identity())
            .fold(0.0, f64::max)
    }

    /// The harmonic matrix ensemble: one D×R isometry per character, with
    /// entry ((g,d), r) = √(R/D) γ(g) conj(Ψ_g(r,d)). Rows are ordered by
    /// group enumeration, then inner index; characters by their labels in
    /// the same enumeration.
    pub fn harmonic_ensemble(&self) -> Result<FusionFrame, HarmonicError> {
        let d = self.total_dim();
        if d == 0 {
            return Err(HarmonicError::ZeroDimension);
        }
        let scale = (self.rank as f64 / d as f64).sqrt();
        let elements = self.group.elements();
        let mut row_offsets = Vec::with_capacity(elements.len());
        let mut acc = 0;
        for m in &self.isometries {
            row_offsets.push(acc);
            acc += m.cols();
        }

        let mut frames = Vec::with_capacity(elements.len());
        for label in &elements {
            let mut iso = ComplexMatrix::zeros(d, self.rank);
            for (gi, g) in elements.iter().enumerate() {
                let chi = self.group.character_value(label, g);
                let psi = &self.isometries[gi];
                for dd in 0..psi.cols() {
                    for r in 0..self.rank {
                        iso[(row_offsets[gi] + dd, r)] = scale * (chi * psi[(r, dd)].conj());
                    }
                }
            }
            frames.push(iso);
        }
        Ok(FusionFrame::new(d, frames, Some(self.group.clone()))?)
    }

    /// Entrywise DFT of the generating projections.
    pub fn dft_spectrum(&self) -> Result<DftSpectrum, HarmonicError> {
        let projections = self.projections();
        let matrices = self.group.entrywise_dft(&projections)?;
        let d = self.total_dim();
        let a = d as f64 / self.rank as f64;
        let target = ComplexMatrix::identity(self.rank).scale_re(a);
        let tightness_residual = (&matrices[0] - &target).frobenius_norm();
        Ok(DftSpectrum {
            group: self.group.clone(),
            rank: self.rank,
            total_dim: d,
            matrices,
            frame_constant: a,
            tightness_residual,
        })
    }

    /// Classification shortcut: spectrum + classify in one call.
    pub fn classify(&self, tol: f64) -> Result<HarmonicClassification, HarmonicError> {
        classify_spectrum(&self.dft_spectrum()?, tol)
    }

    /// Autocorrelation test: Σ_{g'} P_{g'} P_{g+g'} = C·I for every g ≠ 0,
    /// with C pinned to D(D−R)/(R²(G−1)).
    pub fn check_difference_projections(
        &self,
        tol: f64,
    ) -> Result<DifferenceProjectionReport, HarmonicError> {
        let projections = self.projections();
        let (constant, deviation, trivial) = autocorrelation_deviation(
            &self.group,
            &projections,
            self.total_dim(),
            self.rank,
        );
        Ok(DifferenceProjectionReport {
            passes: deviation <= tol,
            autocorrelation_constant: constant,
            deviation,
            trivial,
        })
    }

    /// Sufficient realness test: P_g = conj(P_{−g}) entrywise. A false
    /// return does not prove the ensemble is not real.
    pub fn check_real(&self, tol: f64) -> bool {
        let projections = self.projections();
        let elements = self.group.elements();
        for (gi, g) in elements.iter().enumerate() {
            let ni = self.group.index_of(&self.group.neg(g));
            let diff = (&projections[gi] - &projections[ni].conjugate()).max_abs_entry();
            if diff > tol {
                return false;
            }
        }
        true
    }

    /// Generating frame of the spatial complements: isometries onto the
    /// orthocomplement of each Ψ_g inside C^R.
    pub fn spatial_complement(&self) -> Result<GeneratingTff, HarmonicError> {
        let ident = ComplexMatrix::identity(self.rank);
        let mut isometries = Vec::with_capacity(self.isometries.len());
        for m in &self.isometries {
            let complement = &ident - &(m * &m.adjoint());
            isometries.push(complement.factor_gram(1e-8)?.adjoint());
        }
        GeneratingTff::new(self.group.clone(), self.rank, isometries)
    }
}

impl DftSpectrum {
    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    /// Matrices M_γ in character-label enumeration order.
    pub fn matrices(&self) -> &[ComplexMatrix] {
        &self.matrices
    }

    /// Tr(M_γ) must equal Σ_g conj(γ(g))·D_g; exposed for audits.
    pub fn trace_at(&self, index: usize) -> num_complex::Complex64 {
        self.matrices[index].trace()
    }
}

fn pinned_constants(d: usize, r: usize, g: usize) -> (f64, f64) {
    if g <= 1 {
        return (0.0, 0.0);
    }
    let (df, rf, gf) = (d as f64, r as f64, g as f64);
    let b = df * (gf * rf - df) / (rf * rf * (gf - 1.0));
    let c = df * (df - rf) / (rf * rf * (gf - 1.0));
    (b, c)
}

fn autocorrelation_deviation(
    group: &FiniteAbelianGroup,
    projections: &[ComplexMatrix],
    d: usize,
    r: usize,
) -> (f64, f64, bool) {
    let g = group.order();
    let (_, c) = pinned_constants(d, r, g);
    let trivial = g <= 1 || d == g * r;
    if g <= 1 {
        return (c, 0.0, trivial);
    }
    let elements = group.elements();
    let target = ComplexMatrix::identity(r).scale_re(c);
    let mut deviation = 0.0f64;
    for shift in elements.iter().skip(1) {
        let mut acc = ComplexMatrix::zeros(r, r);
        for (gi, base) in elements.iter().enumerate() {
            let shifted = group.index_of(&group.add(base, shift));
            acc = &acc + &(&projections[gi] * &projections[shifted]);
        }
        deviation = deviation.max((&acc - &target).frobenius_norm());
    }
    (c, deviation, trivial)
}

/// Decide EI / EC-only / tight-only from the spectrum. The operator
/// criterion (every M_γ*M_γ = B·I) is primary; the autocorrelation criterion
/// is recomputed from the inverse DFT as a cross-check, and disagreement
/// beyond 2× the tolerance is reported as an internal error.
pub fn classify_spectrum(
    spectrum: &DftSpectrum,
    tol: f64,
) -> Result<HarmonicClassification, HarmonicError> {
    if spectrum.tightness_residual > tol {
        return Err(HarmonicError::NotTff {
            residual: spectrum.tightness_residual,
            tolerance: tol,
        });
    }
    let (d, r, g) = (spectrum.total_dim, spectrum.rank, spectrum.group.order());
    let (b, c) = pinned_constants(d, r, g);
    let trivial = g <= 1 || d == g * r;

    let mut ei_dev = 0.0f64;
    let mut ec_dev = 0.0f64;
    let target = ComplexMatrix::identity(r).scale_re(b);
    for m in spectrum.matrices.iter().skip(1) {
        ei_dev = ei_dev.max((&(&m.adjoint() * m) - &target).frobenius_norm());
        ec_dev = ec_dev.max((m.frobenius_norm().powi(2) / r as f64 - b).abs());
    }

    let projections = spectrum.group.entrywise_dft_inverse(&spectrum.matrices)?;
    let (_, auto_dev, _) = autocorrelation_deviation(&spectrum.group, &projections, d, r);

    let ei_by_operator = ei_dev <= tol;
    let ei_by_autocorrelation = auto_dev <= tol;
    if ei_by_operator != ei_by_autocorrelation && ei_dev.max(auto_dev) > 2.0 * tol {
        return Err(HarmonicError::InternalInconsistency {
            operator: ei_dev,
            autocorrelation: auto_dev,
        });
    }

    let class = if ei_by_operator {
        HarmonicClass::EquiIsoclinic
    } else if ec_dev <= tol {
        HarmonicClass::EquichordalOnly
    } else {
        HarmonicClass::TightOnly
    };
    Ok(HarmonicClassification {
        class,
        ei_constant: b,
        autocorrelation_constant: c,
        ei_deviation: ei_dev,
        ec_deviation: ec_dev,
        autocorrelation_deviation: auto_dev,
        trivial,
        tolerance: tol,
    })
}

/// True iff every cross-Gram Φ_{γ1}*Φ_{γ2} depends only on the label
/// difference. The frame must be uniform and carry a group tag whose order
/// matches the subspace count.
pub fn check_block_circulant(
    frame: &FusionFrame,
    tol: f64,
) -> Result<BlockCirculantReport, HarmonicError> {
    let group = frame.group().ok_or(HarmonicError::MissingGroupTag)?.clone();
    if !frame.is_uniform() {
        return Err(HarmonicError::NonUniform);
    }
    let elements = group.elements();
    let n = elements.len();
    let r = frame.isometry(0).cols();
    let mut representatives: Vec<Option<ComplexMatrix>> = vec![None; n];
    let mut max_deviation = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let diff = group.index_of(&group.sub(&elements[j], &elements[i]));
            let block = if i == j {
                ComplexMatrix::identity(r)
            } else {
                frame.cross_gram(i, j)
            };
            match &representatives[diff] {
                None => representatives[diff] = Some(block),
                Some(rep) => {
                    max_deviation = max_deviation.max((&block - rep).frobenius_norm());
                }
            }
        }
    }
    Ok(BlockCirculantReport { is_block_circulant: max_deviation <= tol, max_deviation })
}

/// Reconstruct the unitary representation behind a tight block-circulant
/// frame: π(γ1) = (D/GR)·Σ_{γ2} Φ_{γ1γ2} Φ_{γ2}*, indexed like the
/// characters. Each π(γ) is unitary, π is a homomorphism, and
/// π(γ)Φ_1 = Φ_γ, all within the tolerance used to admit the input.
pub fn reconstruct_representation(
    frame: &FusionFrame,
    tol: f64,
) -> Result<Vec<ComplexMatrix>, HarmonicError> {
    let report = check_block_circulant(frame, tol)?;
    if !report.is_block_circulant {
        return Err(HarmonicError::NotBlockCirculant {
            residual: report.max_deviation,
            tolerance: tol,
        });
    }
    let tight = frame.check_tight(tol);
    if !tight.is_tight {
        return Err(HarmonicError::FrameNotTight { residual: tight.residual, tolerance: tol });
    }
    let group = frame.group().expect("checked above").clone();
    let elements = group.elements();
    let n = elements.len();
    let d = frame.ambient_dim();
    let r = frame.isometry(0).cols();
    let scale = d as f64 / (n * r) as f64;
    let mut out = Vec::with_capacity(n);
    for label in &elements {
        let mut acc = ComplexMatrix::zeros(d, d);
        for (j, base) in elements.iter().enumerate() {
            let shifted = group.index_of(&group.add(label, base));
            acc = &acc + &(frame.isometry(shifted) * &frame.isometry(j).adjoint());
        }
        out.push(acc.scale_re(scale));
    }
    Ok(out)
}

/// Per-element difference counts of a subset: the classical oracle that a
/// subset is a difference set iff all counts over g ≠ 0 agree.
pub fn difference_counts(group: &FiniteAbelianGroup, subset: &[GroupElement]) -> Vec<usize> {
    let mut counts = vec![0usize; group.order()];
    for a in subset {
        for b in subset {
            counts[group.index_of(&group.sub(a, b))] += 1;
        }
    }
    counts
}

/// Brute-force difference-set test over all nonzero differences.
pub fn is_difference_set(group: &FiniteAbelianGroup, subset: &[GroupElement]) -> bool {
    let counts = difference_counts(group, subset);
    counts.len() <= 1 || counts[1..].iter().all(|&c| c == counts[1])
}
