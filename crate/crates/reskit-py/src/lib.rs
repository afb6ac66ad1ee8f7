use std::sync::Arc;

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use reskit_core::coloring::{admissible_colorings, canonical_coloring, face_coloring, BitMatrix, Flavor};
use reskit_core::construction::is_exceptional;
use reskit_core::degree::{cdeg, DEFAULT_SEED};
use reskit_core::io::{strategy_name, CertificateFile, PartitionFile, ProblemFile};
use reskit_core::partition::{validate, PartitionMatrix};
use reskit_core::polytope::is_essential;
use reskit_core::residue::{self, Strategy};
use reskit_core::{Error, Point, PolytopeFamily};

create_exception!(reskit, ReskitError, PyException);
create_exception!(reskit, NotEssentialError, ReskitError);
create_exception!(reskit, ExceptionalFamilyError, ReskitError);
create_exception!(reskit, IncompatibleError, ReskitError);

fn to_py(e: Error) -> PyErr {
    let msg = e.to_string();
    match e {
        Error::InvalidInput(_) => PyValueError::new_err(msg),
        Error::NonEssential(..) => NotEssentialError::new_err(msg),
        Error::ExceptionalFamily(_) => ExceptionalFamilyError::new_err(msg),
        Error::PreconditionViolated(_) => IncompatibleError::new_err(msg),
        _ => ReskitError::new_err(msg),
    }
}

fn parse_strategy(name: &str) -> PyResult<Strategy> {
    [Strategy::Auto, Strategy::LocallyUnmixed, Strategy::Dim2, Strategy::Search]
        .into_iter()
        .find(|s| strategy_name(*s) == name)
        .ok_or_else(|| PyValueError::new_err(format!("unknown strategy {name:?}")))
}

/// Family of n+1 lattice polytopes in dimension n, each given by its lattice points.
#[pyclass(frozen, module = "reskit")]
struct Family {
    inner: Arc<PolytopeFamily>,
}

#[pymethods]
impl Family {
    #[new]
    #[pyo3(signature = (members, names=None))]
    fn new(members: Vec<Vec<Point>>, names: Option<Vec<Vec<Option<String>>>>) -> PyResult<Self> {
        let n = members.first().and_then(|m| m.first()).map(|p| p.len()).unwrap_or(0);
        let inner = PolytopeFamily::from_terms(n, &members, &names.unwrap_or_default()).map_err(to_py)?;
        Ok(Family { inner: Arc::new(inner) })
    }

    /// Family from the JSON problem format read by the command line tool.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = ProblemFile::parse(text).and_then(|p| p.family()).map_err(to_py)?;
        Ok(Family { inner })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn vertices(&self, member: usize) -> PyResult<Vec<Point>> {
        self.inner.members().get(member).map(|p| p.vertices().to_vec()).ok_or_else(|| PyValueError::new_err("no such member"))
    }

    fn lattice_points(&self, member: usize) -> PyResult<Vec<Point>> {
        self.inner.members().get(member).map(|_| self.inner.points(member).to_vec()).ok_or_else(|| PyValueError::new_err("no such member"))
    }

    fn sum_vertices(&self) -> Vec<Point> {
        self.inner.sum().vertices().to_vec()
    }

    fn is_essential(&self) -> bool {
        is_essential(&self.inner).essential
    }

    fn is_exceptional(&self) -> bool {
        self.inner.n() == 2 && is_exceptional(&self.inner)
    }

    /// Compatible partition matrix; strategy is one of auto, locally-unmixed, dim2, search.
    #[pyo3(signature = (strategy="auto"))]
    fn partition(&self, py: Python<'_>, strategy: &str) -> PyResult<Partition> {
        let s = parse_strategy(strategy)?;
        let (inner, used, _) = py.detach(|| residue::construct_partition(&self.inner, s)).map_err(to_py)?;
        Ok(Partition { inner, strategy: Some(strategy_name(used).into()) })
    }

    fn partition_from_cells(&self, cells: Vec<Vec<Vec<Point>>>) -> PyResult<Partition> {
        let inner = PartitionMatrix::new(self.inner.clone(), cells).map_err(to_py)?;
        Ok(Partition { inner, strategy: None })
    }

    #[pyo3(signature = (strategy="auto", seed=DEFAULT_SEED))]
    fn residue(&self, py: Python<'_>, strategy: &str, seed: u64) -> PyResult<Certificate> {
        let s = parse_strategy(strategy)?;
        certify(py, &self.inner, s, None, seed)
    }

    fn __repr__(&self) -> String {
        format!("Family(n={}, sum_vertices={:?})", self.inner.n(), self.inner.sum().vertices())
    }
}

/// Partition matrix: cell (i, j) holds lattice points of member i.
#[pyclass(frozen, module = "reskit")]
struct Partition {
    inner: PartitionMatrix,
    strategy: Option<String>,
}

#[pymethods]
impl Partition {
    #[getter]
    fn cells(&self) -> Vec<Vec<Vec<Point>>> {
        self.inner.cells().to_vec()
    }

    #[getter]
    fn strategy(&self) -> Option<String> {
        self.strategy.clone()
    }

    /// First violated condition, or None for a compatible partition.
    fn violation(&self) -> Option<String> {
        validate(&self.inner).map(|v| format!("{v:?}"))
    }

    #[pyo3(signature = (seed=DEFAULT_SEED))]
    fn cdeg(&self, py: Python<'_>, seed: u64) -> PyResult<i64> {
        py.detach(|| cdeg(&self.inner, seed)).map_err(to_py)
    }

    /// Maximal canonical color set of every proper face of the sum, in face order.
    fn face_colors(&self) -> PyResult<Vec<Vec<usize>>> {
        let fc = face_coloring(&self.inner, Flavor::Max).map_err(to_py)?;
        Ok((0..fc.colors.len()).map(|k| fc.colors_of(k)).collect())
    }

    #[pyo3(signature = (seed=DEFAULT_SEED))]
    fn residue(&self, py: Python<'_>, seed: u64) -> PyResult<Certificate> {
        certify(py, self.inner.family_arc(), Strategy::Auto, Some(self.inner.clone()), seed)
    }

    fn to_json(&self) -> String {
        let mut file = PartitionFile::from_matrix(&self.inner);
        file.strategy = self.strategy.clone();
        file.to_json()
    }
}

/// Residue element with the checks that certify it.
#[pyclass(frozen, module = "reskit")]
struct Certificate {
    file: CertificateFile,
    matrix: String,
}

fn certify(py: Python<'_>, family: &Arc<PolytopeFamily>, s: Strategy, given: Option<PartitionMatrix>, seed: u64) -> PyResult<Certificate> {
    py.detach(|| {
        let cert = residue::residue_element(family, s, given, seed)?;
        let file = CertificateFile::new(&cert, seed)?;
        Ok(Certificate { file, matrix: cert.matrix.to_string() })
    })
    .map_err(to_py)
}

#[pymethods]
impl Certificate {
    #[getter]
    fn determinant(&self) -> String {
        self.file.determinant.clone()
    }

    #[getter]
    fn matrix(&self) -> String {
        self.matrix.clone()
    }

    #[getter]
    fn cdeg(&self) -> i64 {
        self.file.cdeg
    }

    #[getter]
    fn vanishing(&self) -> bool {
        self.file.vanishing
    }

    #[getter]
    fn support(&self) -> Vec<Point> {
        self.file.support.clone()
    }

    #[getter]
    fn partition(&self) -> Vec<Vec<Vec<Point>>> {
        self.file.partition.clone()
    }

    #[getter]
    fn strategy(&self) -> String {
        self.file.strategy.clone()
    }

    #[getter]
    fn planar_case(&self) -> Option<String> {
        self.file.planar_case.clone()
    }

    fn to_json(&self) -> String {
        self.file.to_json()
    }
}

fn bits(matrix: Vec<Vec<i64>>) -> BitMatrix {
    matrix.into_iter().map(|row| row.into_iter().map(|x| x != 0).collect()).collect()
}

/// All admissible column sets of a square 0/1 matrix with permanent 0.
#[pyfunction]
fn admissible(matrix: Vec<Vec<i64>>) -> PyResult<Vec<Vec<usize>>> {
    admissible_colorings(&bits(matrix)).map(|s| s.colorings).map_err(to_py)
}

/// Minimal and maximal canonical colorings (c, C) of a 0/1 matrix with permanent 0.
#[pyfunction]
fn canonical(matrix: Vec<Vec<i64>>) -> PyResult<(Vec<usize>, Vec<usize>)> {
    canonical_coloring(&bits(matrix)).map_err(to_py)
}

#[pymodule]
fn reskit(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Family>()?;
    m.add_class::<Partition>()?;
    m.add_class::<Certificate>()?;
    m.add_function(wrap_pyfunction!(admissible, m)?)?;
    m.add_function(wrap_pyfunction!(canonical, m)?)?;
    m.add("ReskitError", m.py().get_type::<ReskitError>())?;
    m.add("NotEssentialError", m.py().get_type::<NotEssentialError>())?;
    m.add("ExceptionalFamilyError", m.py().get_type::<ExceptionalFamilyError>())?;
    m.add("IncompatibleError", m.py().get_type::<IncompatibleError>())?;
    m.add("DEFAULT_SEED", DEFAULT_SEED)?;
    Ok(())
}
