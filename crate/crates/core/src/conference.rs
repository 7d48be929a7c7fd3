//! Complex conference matrices, their ε-normalizations and ε-cores, the
//! Paley-type construction from a multiplicative character, and the
//! signature-matrix route from a core to a rank-2 equi-isoclinic frame.
//!
//! A complex conference matrix of size M has zero diagonal, unimodular
//! off-diagonal entries, and satisfies C*C = (M−1)I. When it is ε-symmetric
//! (Cᵀ = εC, ε = ±1) and ε-normalized (first column of ones, first row of
//! ε's), its lower-right (M−1)×(M−1) block Z — the ε-core — is characterized
//! by Z*Z = (M−1)I − J together with the symmetry, zero diagonal and
//! unimodularity; its rows and columns then sum to zero. Cores of size N
//! fuel 2×2-block signature matrices of EITFF(N,N,2) (symmetric case) and
//! EITFF(N−1,N,2) (skew case).

use crate::cmatrix::{ComplexMatrix, MatrixError};
use crate::finite_field::{FieldError, FiniteField, MultChar, Parity};
use crate::fusion_frame::{FrameError, FusionFrame};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConferenceError {
    #[error("matrix must be square, got {0}x{1}")]
    NotSquare(usize, usize),
    #[error("invalid conference matrix: {check} deviation {deviation:.3e} exceeds {tolerance:.3e}")]
    InvalidConference { check: &'static str, deviation: f64, tolerance: f64 },
    #[error("matrix is not epsilon-normalized")]
    NotNormalized,
    #[error("epsilon must be +1 or -1, got {0}")]
    BadEpsilon(i8),
    #[error("matrix is neither symmetric nor skew-symmetric within tolerance")]
    NoSymmetryTag,
    #[error("invalid core: {check} deviation {deviation:.3e} exceeds {tolerance:.3e}")]
    InvalidCore { check: &'static str, deviation: f64, tolerance: f64 },
    #[error("signature matrix is not self-adjoint: residual {0:.3e}")]
    NotSelfAdjoint(f64),
    #[error("S^2 is not a combination of S and I: residual {residual:.3e} exceeds {tolerance:.3e}")]
    NotQuadratic { residual: f64, tolerance: f64 },
    #[error("signature spectrum is degenerate (no negative eigenvalue)")]
    DegenerateSpectrum,
    #[error("block size {rows}x{cols} at ({n1},{n2}) does not match rank {rank}")]
    BadBlock { n1: usize, n2: usize, rows: usize, cols: usize, rank: usize },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Frame(#[from] FrameError),
}

/// Complex conference matrix with an optional symmetry tag ε ∈ {+1, −1}.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConferenceMatrix {
    pub matrix: ComplexMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<i8>,
}

/// ε-core of an ε-normalized ε-symmetric conference matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Core {
    pub matrix: ComplexMatrix,
    pub epsilon: i8,
}

/// Self-adjoint N×N array of R×R blocks with zero diagonal blocks and
/// unitary off-diagonal blocks, stored flat.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SignatureMatrix {
    pub subspaces: usize,
    pub rank: usize,
    pub matrix: ComplexMatrix,
}

impl ConferenceMatrix {
    pub fn size(&self) -> usize {
        self.matrix.rows()
    }

    /// Check the defining properties; with a tag, also the ε-symmetry.
    pub fn validate(&self, tol: f64) -> Result<(), ConferenceError> {
        let m = &self.matrix;
        if m.rows() != m.cols() {
            return Err(ConferenceError::NotSquare(m.rows(), m.cols()));
        }
        let size = m.rows();
        let mut diag_dev = 0.0f64;
        let mut unimod_dev = 0.0f64;
        for i in 0..size {
            diag_dev = diag_dev.max(m[(i, i)].norm());
            for j in 0..size {
                if i != j {
                    unimod_dev = unimod_dev.max((m[(i, j)].norm() - 1.0).abs());
                }
            }
        }
        if diag_dev > tol {
            return Err(ConferenceError::InvalidConference {
                check: "zero diagonal",
                deviation: diag_dev,
                tolerance: tol,
            });
        }
        if unimod_dev > tol {
            return Err(ConferenceError::InvalidConference {
                check: "unimodular off-diagonal",
                deviation: unimod_dev,
                tolerance: tol,
            });
        }
        let target = ComplexMatrix::identity(size).scale_re(size as f64 - 1.0);
        let gram_dev = (&(&m.adjoint() * m) - &target).frobenius_norm();
        if gram_dev > tol * size as f64 {
            return Err(ConferenceError::InvalidConference {
                check: "C*C = (M-1)I",
                deviation: gram_dev,
                tolerance: tol * size as f64,
            });
        }
        if let Some(eps) = self.epsilon {
            if eps != 1 && eps != -1 {
                return Err(ConferenceError::BadEpsilon(eps));
            }
            let sym_dev = (&m.transpose() - &m.scale_re(eps as f64)).frobenius_norm();
            if sym_dev > tol * size as f64 {
                return Err(ConferenceError::InvalidConference {
                    check: "epsilon symmetry",
                    deviation: sym_dev,
                    tolerance: tol * size as f64,
                });
            }
        }
        Ok(())
    }

    /// Infer the symmetry tag by testing Cᵀ = ±C.
    pub fn auto_tag(&mut self, tol: f64) -> Result<i8, ConferenceError> {
        let t = self.matrix.transpose();
        let size = self.size() as f64;
        for eps in [1i8, -1] {
            if (&t - &self.matrix.scale_re(eps as f64)).frobenius_norm() <= tol * size {
                self.epsilon = Some(eps);
                return Ok(eps);
            }
        }
        Err(ConferenceError::NoSymmetryTag)
    }

    pub fn is_normalized(&self, eps: i8, tol: f64) -> bool {
        let m = &self.matrix;
        let size = m.rows();
        (1..size).all(|i| {
            (m[(i, 0)] - Complex64::ONE).norm() <= tol
                && (m[(0, i)] - Complex64::new(eps as f64, 0.0)).norm() <= tol
        })
    }

    /// Phase the rows and columns so the first column is all ones and the
    /// first row is all ε. Preserves the conference property, realness and
    /// ε-symmetry.
    pub fn normalize(&self, eps: i8, tol: f64) -> Result<ConferenceMatrix, ConferenceError> {
        if eps != 1 && eps != -1 {
            return Err(ConferenceError::BadEpsilon(eps));
        }
        self.validate(tol)?;
        let m = &self.matrix;
        let size = m.rows();
        let out = ComplexMatrix::from_fn(size, size, |i, j| {
            let left = if i == 0 { Complex64::ONE } else { m[(i, 0)].conj() };
            let right = if j == 0 {
                Complex64::ONE
            } else {
                m[(0, j)].conj() * eps as f64
            };
            left * m[(i, j)] * right
        });
        Ok(ConferenceMatrix { matrix: out, epsilon: self.epsilon })
    }

    /// Lower-right (M−1)×(M−1) block of an ε-normalized matrix.
    pub fn extract_core(&self, eps: i8, tol: f64) -> Result<Core, ConferenceError> {
        if !self.is_normalized(eps, tol) {
            return Err(ConferenceError::NotNormalized);
        }
        let size = self.size();
        Ok(Core { matrix: self.matrix.block(1, 1, size - 1, size - 1), epsilon: eps })
    }
}

impl Core {
    pub fn size(&self) -> usize {
        self.matrix.rows()
    }

    /// Check the core conditions: Z*Z = (M−1)I − J, Zᵀ = εZ, zero diagonal,
    /// unimodular off-diagonal, and the implied zero row/column sums.
    pub fn verify(&self, tol: f64) -> Result<(), ConferenceError> {
        let z = &self.matrix;
        if z.rows() != z.cols() {
            return Err(ConferenceError::NotSquare(z.rows(), z.cols()));
        }
        let n = z.rows();
        let m = n as f64 + 1.0; // conference matrix size M = core size + 1
        for i in 0..n {
            if z[(i, i)].norm() > tol {
                return Err(ConferenceError::InvalidCore {
                    check: "zero diagonal",
                    deviation: z[(i, i)].norm(),
                    tolerance: tol,
                });
            }
            for j in 0..n {
                if i != j && (z[(i, j)].norm() - 1.0).abs() > tol {
                    return Err(ConferenceError::InvalidCore {
                        check: "unimodular off-diagonal",
                        deviation: (z[(i, j)].norm() - 1.0).abs(),
                        tolerance: tol,
                    });
                }
            }
        }
        let sym_dev = (&z.transpose() - &z.scale_re(self.epsilon as f64)).frobenius_norm();
        if sym_dev > tol * n as f64 {
            return Err(ConferenceError::InvalidCore {
                check: "epsilon symmetry",
                deviation: sym_dev,
                tolerance: tol * n as f64,
            });
        }
        let ones = ComplexMatrix::from_fn(n, n, |_, _| Complex64::ONE);
        let target = &ComplexMatrix::identity(n).scale_re(m - 1.0) - &ones;
        let gram_dev = (&(&z.adjoint() * z) - &target).frobenius_norm();
        if gram_dev > tol * m {
            return Err(ConferenceError::InvalidCore {
                check: "Z*Z = (M-1)I - J",
                deviation: gram_dev,
                tolerance: tol * m,
            });
        }
        // row sums vanish as a consequence; assert it as a cheap invariant
        let mut row_sum_dev = 0.0f64;
        for i in 0..n {
            let s: Complex64 = (0..n).map(|j| z[(i, j)]).sum();
            row_sum_dev = row_sum_dev.max(s.norm());
        }
        if row_sum_dev > tol * m {
            return Err(ConferenceError::InvalidCore {
                check: "zero row sums",
                deviation: row_sum_dev,
                tolerance: tol * m,
            });
        }
        Ok(())
    }

    /// Border the core back into the ε-normalized conference matrix it came
    /// from.
    pub fn border(&self) -> ConferenceMatrix {
        let n = self.size();
        let eps = self.epsilon as f64;
        let out = ComplexMatrix::from_fn(n + 1, n + 1, |i, j| match (i, j) {
            (0, 0) => Complex64::ZERO,
            (0, _) => Complex64::new(eps, 0.0),
            (_, 0) => Complex64::ONE,
            _ => self.matrix[(i - 1, j - 1)],
        });
        ConferenceMatrix { matrix: out, epsilon: Some(self.epsilon) }
    }
}

/// Paley-type conference matrix of size Q+1 from a nontrivial multiplicative
/// character: the circulant core Z(x₁,x₂) = χ(x₁−x₂) (zero on the diagonal)
/// is bordered by ones and ε = χ(−1).
pub fn paley_conference(
    field: &FiniteField,
    chi: &MultChar,
) -> Result<ConferenceMatrix, ConferenceError> {
    if chi.index == 0 {
        return Err(ConferenceError::Field(FieldError::TrivialCharacter));
    }
    let parity = field.char_parity(chi)?;
    let eps = match parity {
        Parity::Even => 1i8,
        Parity::Odd => -1,
    };
    let q = field.q() as usize;
    let elements = field.elements();
    let core = ComplexMatrix::from_fn(q, q, |i, j| {
        let diff = field.sub(&elements[i], &elements[j]);
        field.mult_char_value_or_zero(chi, &diff)
    });
    Ok(Core { matrix: core, epsilon: eps }.border())
}

impl SignatureMatrix {
    pub fn new(subspaces: usize, rank: usize, matrix: ComplexMatrix) -> Result<Self, ConferenceError> {
        if matrix.rows() != subspaces * rank || matrix.cols() != subspaces * rank {
            return Err(ConferenceError::BadBlock {
                n1: 0,
                n2: 0,
                rows: matrix.rows(),
                cols: matrix.cols(),
                rank,
            });
        }
        Ok(Self { subspaces, rank, matrix })
    }

    pub fn block(&self, n1: usize, n2: usize) -> ComplexMatrix {
        self.matrix.block(n1 * self.rank, n2 * self.rank, self.rank, self.rank)
    }

    /// Residuals of the defining conditions for a signature matrix of an
    /// EITFF(D,N,R): self-adjointness with zero diagonal blocks and unitary
    /// off-diagonal blocks, plus the blockwise quadratic condition
    /// Σ_{n₃} S_{n₁,n₃}S_{n₃,n₂} = (NR−2D)·√((N−1)/(D(NR−D)))·S_{n₁,n₂}
    /// off the diagonal and (N−1)·I on it.
    pub fn condition_residual(&self, ambient_dim: usize) -> f64 {
        let n = self.subspaces;
        let r = self.rank;
        let d = ambient_dim as f64;
        let nf = n as f64;
        let rf = r as f64;
        let off_scale = (nf * rf - 2.0 * d) * ((nf - 1.0) / (d * (nf * rf - d))).sqrt();
        let square = &self.matrix * &self.matrix;
        let mut dev = (&self.matrix.adjoint() - &self.matrix).frobenius_norm();
        for n1 in 0..n {
            dev = dev.max(self.block(n1, n1).frobenius_norm());
            for n2 in 0..n {
                let sq_block = square.block(n1 * r, n2 * r, r, r);
                let target = if n1 == n2 {
                    ComplexMatrix::identity(r).scale_re(nf - 1.0)
                } else {
                    self.block(n1, n2).scale_re(off_scale)
                };
                dev = dev.max((&sq_block - &target).frobenius_norm());
                if n1 != n2 {
                    let b = self.block(n1, n2);
                    dev = dev.max((&b.adjoint() * &b).distance_from_identity());
                }
            }
        }
        dev
    }
}

/// Signature matrix built from an ε-core. A skew core of size N targets an
/// EITFF(N−1,N,2); a symmetric core of size N targets an EITFF(N,N,2). The
/// output satisfies the signature conditions exactly when the core is valid.
pub fn signature_from_core(core: &Core) -> Result<SignatureMatrix, ConferenceError> {
    if core.epsilon != 1 && core.epsilon != -1 {
        return Err(ConferenceError::BadEpsilon(core.epsilon));
    }
    let n = core.size();
    let nf = n as f64;
    let z = &core.matrix;
    let mut matrix = ComplexMatrix::zeros(2 * n, 2 * n);
    for n1 in 0..n {
        for n2 in 0..n {
            if n1 == n2 {
                continue;
            }
            let zv = z[(n1, n2)];
            let block = if core.epsilon == -1 {
                let scale = 1.0 / (nf + 1.0).sqrt();
                ComplexMatrix::new(
                    2,
                    2,
                    vec![
                        Complex64::new(-scale, 0.0),
                        zv.conj() * (-scale * nf.sqrt()),
                        zv * (scale * nf.sqrt()),
                        Complex64::new(-scale, 0.0),
                    ],
                )
                .expect("2x2 shape")
            } else {
                let scale = 1.0 / (nf - 1.0).sqrt();
                ComplexMatrix::new(
                    2,
                    2,
                    vec![
                        Complex64::new(scale, 0.0),
                        zv.conj() * (scale * (nf - 2.0).sqrt()),
                        zv * (scale * (nf - 2.0).sqrt()),
                        Complex64::new(-scale, 0.0),
                    ],
                )
                .expect("2x2 shape")
            };
            matrix.set_block(2 * n1, 2 * n2, &block);
        }
    }
    SignatureMatrix::new(n, 2, matrix)
}

/// Result of synthesizing a frame from a signature matrix.
#[derive(Debug, Clone)]
pub struct SignatureFrame {
    pub frame: FusionFrame,
    pub frame_constant: f64,
    pub welch_parameter: f64,
    pub ambient_dim: usize,
}

/// Rebuild the frame a signature matrix encodes: fit S² = C·S + E·I (E from
/// the diagonal blocks, C from one off-diagonal block), verify the fit
/// globally, then factor I + S/F where −F is the negative root of
/// λ² − Cλ − E.
pub fn frame_from_signature(
    sig: &SignatureMatrix,
    tol: f64,
) -> Result<SignatureFrame, ConferenceError> {
    let n = sig.subspaces;
    let r = sig.rank;
    let total = n * r;
    let self_adjoint_dev = (&sig.matrix.adjoint() - &sig.matrix).frobenius_norm();
    if self_adjoint_dev > tol * total as f64 {
        return Err(ConferenceError::NotSelfAdjoint(self_adjoint_dev));
    }
    let square = &sig.matrix * &sig.matrix;

    // E from the average diagonal entry of S^2, C from the best off-diagonal
    // block fit <S_{01}, (S^2)_{01}> / ‖S_{01}‖².
    let e = (0..total).map(|i| square[(i, i)].re).sum::<f64>() / total as f64;
    let c = if n < 2 {
        0.0
    } else {
        let s01 = sig.block(0, 1);
        let sq01 = square.block(0, r, r, r);
        let denom = s01.frobenius_norm().powi(2);
        if denom <= tol {
            0.0
        } else {
            (s01.frobenius_inner(&sq01) / denom).re
        }
    };
    let fit = &(&square - &sig.matrix.scale_re(c)) - &ComplexMatrix::identity(total).scale_re(e);
    let fit_residual = fit.frobenius_norm();
    if fit_residual > tol * total as f64 {
        return Err(ConferenceError::NotQuadratic {
            residual: fit_residual,
            tolerance: tol * total as f64,
        });
    }

    let discriminant = (c * c + 4.0 * e).max(0.0).sqrt();
    let f = (discriminant - c) / 2.0; // -F is the negative eigenvalue
    if f <= tol {
        return Err(ConferenceError::DegenerateSpectrum);
    }
    let gram = &ComplexMatrix::identity(total) + &sig.matrix.scale_re(1.0 / f);
    let factor = gram.factor_gram(1e-8)?;
    let ambient_dim = factor.rows();
    let isometries = (0..n).map(|i| factor.block(0, i * r, ambient_dim, r)).collect();
    let frame = FusionFrame::new(ambient_dim, isometries, None)?;
    Ok(SignatureFrame {
        frame,
        frame_constant: (n * r) as f64 / ambient_dim as f64,
        welch_parameter: 1.0 / f,
        ambient_dim,
    })
}

/// Signature matrix of an existing equi-isoclinic frame: (G − I)/B with B
/// its Welch bound.
pub fn signature_of_frame(frame: &FusionFrame) -> Result<SignatureMatrix, ConferenceError> {
    let b = frame.welch_bound().unwrap_or(0.0);
    if b <= 0.0 {
        return Err(ConferenceError::DegenerateSpectrum);
    }
    let total = frame.total_rank();
    let gram = frame.fusion_gram();
    let sig = (&gram - &ComplexMatrix::identity(total)).scale_re(1.0 / b);
    SignatureMatrix::new(frame.num_subspaces(), frame.isometry(0).cols(), sig)
}
