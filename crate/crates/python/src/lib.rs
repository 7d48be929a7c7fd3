//! Python bindings: a `Frame` class wrapping fusion frames plus module
//! functions for the character-theoretic constructions, Gauss sums and the
//! conference-matrix pipeline. Matrices cross the boundary as nested lists
//! of Python complex numbers; certificates as plain dicts.

use harmonic_frames::abelian_group::FiniteAbelianGroup;
use harmonic_frames::cmatrix::ComplexMatrix;
use harmonic_frames::conference::{frame_from_signature, paley_conference, signature_from_core};
use harmonic_frames::constructions::{Family, FamilySpec};
use harmonic_frames::finite_field::{FiniteField, Parity};
use harmonic_frames::harmonic::check_block_circulant;
use harmonic_frames::FusionFrame;
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

fn value_error(err: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(err.to_string())
}

fn matrix_to_py<'py>(py: Python<'py>, m: &ComplexMatrix) -> PyResult<Bound<'py, PyList>> {
    let rows: Vec<Vec<Complex64>> = (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m[(i, j)]).collect())
        .collect();
    PyList::new(py, rows)
}

fn matrix_from_py(rows: Vec<Vec<Complex64>>) -> PyResult<ComplexMatrix> {
    ComplexMatrix::from_rows(&rows).map_err(value_error)
}

fn json_to_py<'py>(py: Python<'py>, value: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match value {
        serde_json::Value::Null => py.None().into_bound(py),
        serde_json::Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_pyobject(py)?.into_any()
            } else {
                n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any()
            }
        }
        serde_json::Value::String(s) => s.into_pyobject(py)?.into_any(),
        serde_json::Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_any()
        }
        serde_json::Value::Object(map) => {
            let dict = PyDict::new(py);
            for (key, item) in map {
                dict.set_item(key, json_to_py(py, item)?)?;
            }
            dict.into_any()
        }
    })
}

/// Fusion frame: a sequence of D×R_n isometries onto subspaces of C^D.
#[pyclass(from_py_object)]
#[derive(Clone)]
struct Frame {
    inner: FusionFrame,
}

#[pymethods]
impl Frame {
    /// Build a frame from its ambient dimension and a list of isometries
    /// (each a list of rows of complex numbers). An optional list of cyclic
    /// group factors tags the frame for block-circulant analysis.
    #[new]
    #[pyo3(signature = (ambient_dim, isometries, group=None))]
    fn new(
        ambient_dim: usize,
        isometries: Vec<Vec<Vec<Complex64>>>,
        group: Option<Vec<u32>>,
    ) -> PyResult<Self> {
        let mats: Vec<ComplexMatrix> = isometries
            .into_iter()
            .map(matrix_from_py)
            .collect::<PyResult<_>>()?;
        let group = group
            .map(FiniteAbelianGroup::new)
            .transpose()
            .map_err(value_error)?;
        Ok(Self { inner: FusionFrame::new(ambient_dim, mats, group).map_err(value_error)? })
    }

    #[getter]
    fn ambient_dim(&self) -> usize {
        self.inner.ambient_dim()
    }

    #[getter]
    fn num_subspaces(&self) -> usize {
        self.inner.num_subspaces()
    }

    #[getter]
    fn ranks(&self) -> Vec<usize> {
        self.inner.ranks()
    }

    fn isometries<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyList>> {
        let list = PyList::empty(py);
        for m in self.inner.isometries() {
            list.append(matrix_to_py(py, m)?)?;
        }
        Ok(list)
    }

    /// Full verification report as a dict (tightness, Welch bound,
    /// equichordality, equi-isoclinicity, realness, residuals).
    #[pyo3(signature = (tol=1e-9))]
    fn certify<'py>(&self, py: Python<'py>, tol: f64) -> PyResult<Bound<'py, PyAny>> {
        let cert = self.inner.certify(tol);
        let value = serde_json::to_value(&cert).map_err(value_error)?;
        json_to_py(py, &value)
    }

    #[pyo3(signature = (tol=1e-9))]
    fn naimark_complement(&self, tol: f64) -> PyResult<Frame> {
        Ok(Frame { inner: self.inner.naimark_complement(tol).map_err(value_error)? })
    }

    #[pyo3(signature = (tol=1e-9))]
    fn spatial_complement(&self, tol: f64) -> PyResult<Frame> {
        Ok(Frame { inner: self.inner.spatial_complement(tol).map_err(value_error)? })
    }

    /// Cross-Gram matrix between two subspaces.
    fn cross_gram<'py>(&self, py: Python<'py>, n1: usize, n2: usize) -> PyResult<Bound<'py, PyList>> {
        if n1 >= self.inner.num_subspaces() || n2 >= self.inner.num_subspaces() {
            return Err(value_error("subspace index out of range"));
        }
        matrix_to_py(py, &self.inner.cross_gram(n1, n2))
    }

    fn principal_angles(&self, n1: usize, n2: usize) -> PyResult<Vec<f64>> {
        self.inner.principal_angles(n1, n2).map_err(value_error)
    }

    /// Deviation of the fusion Gram from block-circulant structure; the
    /// frame must carry a group tag.
    #[pyo3(signature = (tol=1e-9))]
    fn block_circulant_deviation(&self, tol: f64) -> PyResult<f64> {
        Ok(check_block_circulant(&self.inner, tol).map_err(value_error)?.max_deviation)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string_pretty(&self.inner).map_err(value_error)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Frame> {
        let frame: FusionFrame = serde_json::from_str(text).map_err(value_error)?;
        Ok(Frame { inner: frame })
    }

    fn __repr__(&self) -> String {
        format!(
            "Frame(ambient_dim={}, num_subspaces={}, ranks={:?})",
            self.inner.ambient_dim(),
            self.inner.num_subspaces(),
            self.inner.ranks()
        )
    }
}

/// Build one of the named families and return (frame, generator_frame).
/// Families: "eitff-qm1-q-2", "ectff-qm1-q-r", "eitff-q-q-2", "ectff-q-q-r",
/// "eitff-11-11-3", "harmonic-etf", "example-4-5-2".
#[pyfunction]
#[pyo3(signature = (family, p=None, k=None, q=None, r=None, chi=None, diff_set=None, group=None, realify=false))]
#[allow(clippy::too_many_arguments)]
fn construct_family(
    family: &str,
    p: Option<u32>,
    k: Option<u32>,
    q: Option<u32>,
    r: Option<usize>,
    chi: Option<Vec<u32>>,
    diff_set: Option<Vec<usize>>,
    group: Option<Vec<u32>>,
    realify: bool,
) -> PyResult<(Frame, Frame)> {
    let family: Family = serde_json::from_value(serde_json::Value::String(family.into()))
        .map_err(|_| value_error(format!("unknown family {family:?}")))?;
    let (p, k) = match (p, q) {
        (Some(_), Some(_)) => return Err(value_error("give p/k or q, not both")),
        (None, Some(q)) => factor_prime_power(q)?,
        _ => (p, k),
    };
    let spec = FamilySpec {
        family,
        p,
        k,
        r,
        char_indices: chi,
        diff_set,
        group_factors: group,
        realify,
    };
    let build = spec.build().map_err(value_error)?;
    let gen_frame = FusionFrame::new(
        build.generator.rank(),
        build.generator.isometries().to_vec(),
        Some(build.generator.group().clone()),
    )
    .map_err(value_error)?;
    Ok((Frame { inner: build.frame }, Frame { inner: gen_frame }))
}

fn factor_prime_power(q: u32) -> PyResult<(Option<u32>, Option<u32>)> {
    if q < 2 {
        return Err(value_error(format!("{q} is not a prime power")));
    }
    let mut p = 2;
    while p * p <= q {
        if q.is_multiple_of(p) {
            let mut k = 0;
            let mut rem = q;
            while rem.is_multiple_of(p) {
                rem /= p;
                k += 1;
            }
            if rem != 1 {
                return Err(value_error(format!("{q} is not a prime power")));
            }
            return Ok((Some(p), Some(k)));
        }
        p += 1;
    }
    Ok((Some(q), Some(1)))
}

/// Direct sum of frames over the same index set.
#[pyfunction]
fn direct_sum(frames: Vec<Frame>) -> PyResult<Frame> {
    let inner: Vec<FusionFrame> = frames.into_iter().map(|f| f.inner).collect();
    Ok(Frame { inner: FusionFrame::direct_sum(&inner).map_err(value_error)? })
}

/// Gauss sum over GF(p^k) of the additive character labeled by element
/// index `gamma` against the multiplicative character with exponent `chi`.
#[pyfunction]
#[pyo3(signature = (p, k, chi, gamma))]
fn gauss_sum(p: u32, k: u32, chi: u32, gamma: u32) -> PyResult<Complex64> {
    let field = FiniteField::build(p, k).map_err(value_error)?;
    if gamma >= field.q() {
        return Err(value_error(format!("gamma must be below {}", field.q())));
    }
    let gamma = field.add_char(field.element_at(gamma));
    let chi = field.mult_char(chi);
    field.gauss_sum(&gamma, &chi).map_err(value_error)
}

/// Legendre symbol of the element with index `x` in GF(p^k) (odd Q only).
#[pyfunction]
fn legendre_symbol(p: u32, k: u32, x: u32) -> PyResult<i32> {
    let field = FiniteField::build(p, k).map_err(value_error)?;
    if x >= field.q() {
        return Err(value_error(format!("x must be below {}", field.q())));
    }
    field.legendre(&field.element_at(x)).map_err(value_error)
}

/// Paley-type complex conference matrix of size Q+1 as a nested list.
/// `eps` = +1 (symmetric) or -1 (skew-symmetric).
#[pyfunction]
fn paley_conference_matrix(py: Python<'_>, p: u32, k: u32, eps: i8) -> PyResult<Bound<'_, PyList>> {
    let field = FiniteField::build(p, k).map_err(value_error)?;
    let parity = match eps {
        1 => Parity::Even,
        -1 => Parity::Odd,
        other => return Err(value_error(format!("eps must be +1 or -1, got {other}"))),
    };
    let index = field.smallest_char_index_with_parity(parity).map_err(value_error)?;
    let conf = paley_conference(&field, &field.mult_char(index)).map_err(value_error)?;
    matrix_to_py(py, &conf.matrix)
}

/// Run the conference -> core -> signature pipeline over GF(p^k) and return
/// the synthesized frame (an EITFF(Q,Q,2) for eps=+1, EITFF(Q-1,Q,2) for
/// eps=-1).
#[pyfunction]
#[pyo3(signature = (p, k, eps, tol=1e-9))]
fn frame_from_paley_core(p: u32, k: u32, eps: i8, tol: f64) -> PyResult<Frame> {
    let field = FiniteField::build(p, k).map_err(value_error)?;
    let parity = match eps {
        1 => Parity::Even,
        -1 => Parity::Odd,
        other => return Err(value_error(format!("eps must be +1 or -1, got {other}"))),
    };
    let index = field.smallest_char_index_with_parity(parity).map_err(value_error)?;
    let conf = paley_conference(&field, &field.mult_char(index)).map_err(value_error)?;
    let core = conf.extract_core(eps, tol).map_err(value_error)?;
    core.verify(tol).map_err(value_error)?;
    let sig = signature_from_core(&core).map_err(value_error)?;
    let built = frame_from_signature(&sig, tol).map_err(value_error)?;
    Ok(Frame { inner: built.frame })
}

#[pymodule]
fn hframes_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Frame>()?;
    m.add_function(wrap_pyfunction!(construct_family, m)?)?;
    m.add_function(wrap_pyfunction!(direct_sum, m)?)?;
    m.add_function(wrap_pyfunction!(gauss_sum, m)?)?;
    m.add_function(wrap_pyfunction!(legendre_symbol, m)?)?;
    m.add_function(wrap_pyfunction!(paley_conference_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(frame_from_paley_core, m)?)?;
    Ok(())
}
