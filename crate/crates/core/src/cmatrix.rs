//! Dense complex-matrix kernel.
//!
//! Everything downstream (frames, Gram operators, spectra) runs on this one
//! matrix type: products, adjoints, norms, a Jacobi Hermitian eigensolver and
//! a PSD Gram factorizer. Sizes are desk-scale (≤ a few hundred), so the
//! implementation favors determinism and accuracy over speed: the Jacobi
//! sweep order is fixed, which makes eigendecompositions bit-reproducible
//! across runs.

use num_complex::Complex64;
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::{Add, Mul, Sub};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatrixError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("matrix is not Hermitian: asymmetry {residual:.3e} exceeds {tolerance:.3e}")]
    NotHermitian { residual: f64, tolerance: f64 },
    #[error("matrix is not positive semidefinite: eigenvalue {eigenvalue:.3e} below -{tolerance:.3e}")]
    NotPsd { eigenvalue: f64, tolerance: f64 },
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("invalid matrix data: {0}")]
    InvalidData(String),
}

/// Dense row-major complex matrix. Degenerate shapes (zero rows or zero
/// columns) are legal and behave as the corresponding empty linear maps.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.entries[i * self.cols + j]
    }
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self, MatrixError> {
        if entries.len() != rows * cols {
            return Err(MatrixError::InvalidData(format!(
                "entry count {} does not match {}x{}",
                entries.len(),
                rows,
                cols
            )));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![Complex64::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self { rows, cols, entries }
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self, MatrixError> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(MatrixError::InvalidData("ragged rows".into()));
        }
        Ok(Self { rows: nrows, cols: ncols, entries: rows.concat() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conjugate(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].conj())
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn scale_re(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        debug_assert_eq!(self.rows, self.cols);
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_imag_entry(&self) -> f64 {
        self.entries.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    /// Frobenius inner product `<self, other> = Tr(self* other)`.
    pub fn frobenius_inner(&self, other: &Self) -> Complex64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "frobenius_inner shape");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn block(&self, row0: usize, col0: usize, nrows: usize, ncols: usize) -> Self {
        assert!(row0 + nrows <= self.rows && col0 + ncols <= self.cols, "block out of range");
        Self::from_fn(nrows, ncols, |i, j| self[(row0 + i, col0 + j)])
    }

    pub fn set_block(&mut self, row0: usize, col0: usize, m: &Self) {
        assert!(row0 + m.rows <= self.rows && col0 + m.cols <= self.cols, "block out of range");
        for i in 0..m.rows {
            for j in 0..m.cols {
                self[(row0 + i, col0 + j)] = m[(i, j)];
            }
        }
    }

    /// ‖self − I‖_Fro; the matrix must be square.
    pub fn distance_from_identity(&self) -> f64 {
        debug_assert_eq!(self.rows, self.cols);
        let mut acc = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let expected = if i == j { Complex64::ONE } else { Complex64::ZERO };
                acc += (self[(i, j)] - expected).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// ‖self − self*‖_Fro.
    pub fn hermitian_residual(&self) -> f64 {
        debug_assert_eq!(self.rows, self.cols);
        let mut acc = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
    /// rotations. Returns eigenvalues in descending order and a unitary matrix
    /// whose columns are the matching eigenvectors, so that
    /// `self * V ≈ V * diag(values)`.
    pub fn hermitian_eig(&self, tol: f64) -> Result<(Vec<f64>, ComplexMatrix), MatrixError> {
        if self.rows != self.cols {
            return Err(MatrixError::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        let scale = self.frobenius_norm();
        let herm_res = self.hermitian_residual();
        if herm_res > tol * scale.max(1.0) {
            return Err(MatrixError::NotHermitian { residual: herm_res, tolerance: tol * scale.max(1.0) });
        }
        if n == 0 {
            return Ok((Vec::new(), ComplexMatrix::zeros(0, 0)));
        }

        let mut a = self.entries.clone();
        // Symmetrize once so rounding in the input cannot bias the sweeps.
        for p in 0..n {
            for q in 0..p {
                let avg = 0.5 * (a[p * n + q] + a[q * n + p].conj());
                a[p * n + q] = avg;
                a[q * n + p] = avg.conj();
            }
            let d = a[p * n + p];
            a[p * n + p] = Complex64::new(d.re, 0.0);
        }
        let mut v = ComplexMatrix::identity(n).entries;

        let off_sq = |a: &[Complex64]| -> f64 {
            let mut s = 0.0;
            for p in 0..n {
                for q in 0..n {
                    if p != q {
                        s += a[p * n + q].norm_sqr();
                    }
                }
            }
            s
        };
        let stop = (1e-14 * scale.max(1e-300)).powi(2);

        for _sweep in 0..100 {
            if off_sq(&a) <= stop {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[p * n + q];
                    let b = apq.norm();
                    if b <= 1e-300 {
                        continue;
                    }
                    let app = a[p * n + p].re;
                    let aqq = a[q * n + q].re;
                    let phase = apq / b;
                    let tau = (aqq - app) / (2.0 * b);
                    let t = if tau == 0.0 {
                        1.0
                    } else {
                        tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;

                    // A <- J* A  (rows p, q)
                    for k in 0..n {
                        let apk = a[p * n + k];
                        let aqk = a[q * n + k];
                        a[p * n + k] = c * apk - s * phase * aqk;
                        a[q * n + k] = s * apk + c * phase * aqk;
                    }
                    // A <- A J  (columns p, q)
                    for k in 0..n {
                        let akp = a[k * n + p];
                        let akq = a[k * n + q];
                        a[k * n + p] = c * akp - s * phase.conj() * akq;
                        a[k * n + q] = s * akp + c * phase.conj() * akq;
                    }
                    // V <- V J
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = c * vkp - s * phase.conj() * vkq;
                        v[k * n + q] = s * vkp + c * phase.conj() * vkq;
                    }
                    a[p * n + q] = Complex64::ZERO;
                    a[q * n + p] = Complex64::ZERO;
                    let dp = a[p * n + p];
                    let dq = a[q * n + q];
                    a[p * n + p] = Complex64::new(dp.re, 0.0);
                    a[q * n + q] = Complex64::new(dq.re, 0.0);
                }
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        let diag: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
        order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).unwrap());
        let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
        let vectors = ComplexMatrix::from_fn(n, n, |i, j| v[i * n + order[j]]);
        Ok((values, vectors))
    }

    /// Singular values in descending order; length `min(rows, cols)`.
    pub fn singular_values(&self) -> Vec<f64> {
        let k = self.rows.min(self.cols);
        if k == 0 {
            return Vec::new();
        }
        let gram = if self.rows <= self.cols {
            self * &self.adjoint()
        } else {
            &self.adjoint() * self
        };
        let (values, _) = gram
            .hermitian_eig(1e-9)
            .expect("gram of a matrix is Hermitian");
        values.iter().take(k).map(|&l| l.max(0.0).sqrt()).collect()
    }

    /// Largest singular value (operator 2-norm).
    pub fn spectral_norm(&self) -> f64 {
        self.singular_values().first().copied().unwrap_or(0.0)
    }

    /// Factor a Hermitian PSD matrix `g` as `f* f` with `f` of full row rank.
    /// The row count of `f` is the number of eigenvalues exceeding
    /// `rank_tol * lambda_max`.
    pub fn factor_gram(&self, rank_tol: f64) -> Result<ComplexMatrix, MatrixError> {
        let (values, vectors) = self.hermitian_eig(1e-8)?;
        let n = self.rows;
        let lambda_max = values.first().copied().unwrap_or(0.0).max(0.0);
        let neg_floor = rank_tol * lambda_max.max(1e-300);
        if let Some(&lambda_min) = values.last() {
            if lambda_min < -neg_floor {
                return Err(MatrixError::NotPsd { eigenvalue: lambda_min, tolerance: neg_floor });
            }
        }
        let rank = values.iter().filter(|&&l| l > rank_tol * lambda_max).count();
        let mut f = ComplexMatrix::zeros(rank, n);
        for i in 0..rank {
            let root = values[i].sqrt();
            for j in 0..n {
                f[(i, j)] = root * vectors[(j, i)].conj();
            }
        }
        Ok(f)
    }
}

impl Mul<&ComplexMatrix> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            self.cols, rhs.rows,
            "matrix product shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self[(i, k)];
                if aik == Complex64::ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += aik * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl Add<&ComplexMatrix> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix sum shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub<&ComplexMatrix> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix difference shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let re = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)].re).collect())
            .collect();
        let im = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)].im).collect())
            .collect();
        MatrixJson { rows: self.rows, cols: self.cols, re, im }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = MatrixJson::deserialize(deserializer)?;
        let check = |part: &Vec<Vec<f64>>, name: &str| -> Result<(), D::Error> {
            if part.len() != raw.rows || part.iter().any(|r| r.len() != raw.cols) {
                return Err(D::Error::custom(format!(
                    "{name} part does not match shape {}x{}",
                    raw.rows, raw.cols
                )));
            }
            Ok(())
        };
        check(&raw.re, "re")?;
        check(&raw.im, "im")?;
        Ok(ComplexMatrix::from_fn(raw.rows, raw.cols, |i, j| {
            Complex64::new(raw.re[i][j], raw.im[i][j])
        }))
    }
}
