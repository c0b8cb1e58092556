//! Python bindings. Structured results (reports, certificates) are returned
//! as plain dicts and lists.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyModule;
use serde::Serialize;

use uhgraph_core as uh;
use uh::classifier::{Classification, VerifyOptions};
use uh::{Budget, Ccd, Error, FamilySpec, OrderedPartition, PartialIso};

create_exception!(uhgraph, UhError, PyException);
create_exception!(uhgraph, ClassificationViolation, UhError);

fn err(e: Error) -> PyErr {
    match e {
        Error::ClassificationViolation(_) => ClassificationViolation::new_err(e.to_string()),
        _ => UhError::new_err(e.to_string()),
    }
}

fn to_py<T: Serialize>(py: Python<'_>, v: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

/// A graph with vertex colors and a color on every ordered pair of distinct
/// vertices.
#[pyclass(name = "Graph", module = "uhgraph", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
pub struct PyGraph {
    inner: Ccd,
}

fn wrap(inner: Ccd) -> PyGraph {
    PyGraph { inner }
}

#[pymethods]
impl PyGraph {
    /// Oriented graph from an arc list; `vcolors` defaults to one class.
    #[staticmethod]
    #[pyo3(signature = (n, arcs, vcolors=None))]
    fn from_arcs(n: usize, arcs: Vec<(usize, usize)>, vcolors: Option<Vec<u32>>) -> PyResult<PyGraph> {
        let g = Ccd::from_arcs(n, &arcs).map_err(err)?;
        match vcolors {
            None => Ok(wrap(g)),
            Some(vc) => uh::ccd::with_vcolors(&g, vc).map(wrap).map_err(err),
        }
    }

    /// Graph from vertex colors and a row-major list of n * n pair colors;
    /// diagonal entries are ignored.
    #[staticmethod]
    fn from_matrix(vcolors: Vec<u32>, colors: Vec<u32>) -> PyResult<PyGraph> {
        let n = vcolors.len();
        if colors.len() != n * n {
            return Err(PyValueError::new_err(format!("expected {} pair colors", n * n)));
        }
        Ccd::from_fn(vcolors, |u, v| colors[u * n + v]).map(wrap).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<PyGraph> {
        uh::io::from_json(text).map(wrap).map_err(err)
    }

    fn to_json(&self) -> String {
        uh::io::to_json(&self.inner)
    }

    fn to_dot(&self) -> String {
        uh::io::to_dot(&self.inner)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn vcolors(&self) -> Vec<u32> {
        self.inner.vcolors().to_vec()
    }

    fn ecolor(&self, u: usize, v: usize) -> PyResult<u32> {
        let n = self.inner.n();
        if u >= n || v >= n || u == v {
            return Err(PyValueError::new_err("need two distinct vertices of the graph"));
        }
        Ok(self.inner.ecolor(u, v))
    }

    fn color_classes(&self) -> Vec<Vec<usize>> {
        self.inner.color_classes()
    }

    fn is_ultrahomogeneous(&self) -> PyResult<bool> {
        Ok(uh::uh::is_ultrahomogeneous(&self.inner).map_err(err)?.is_uh)
    }

    /// A partial isomorphism `(domain, images)` extending to no automorphism,
    /// or None for an ultrahomogeneous graph.
    fn uh_witness(&self) -> PyResult<Option<(Vec<usize>, Vec<usize>)>> {
        let v = uh::uh::is_ultrahomogeneous(&self.inner).map_err(err)?;
        Ok(v.witness.map(|w| (w.domain, w.images)))
    }

    fn automorphism_group_order(&self) -> PyResult<u128> {
        Ok(uh::autiso::automorphism_group(&self.inner).map_err(err)?.order())
    }

    /// Generators as image lists.
    fn automorphism_generators(&self) -> PyResult<Vec<Vec<usize>>> {
        let g = uh::autiso::automorphism_group(&self.inner).map_err(err)?;
        Ok(g.generators().iter().map(|p| p.images().to_vec()).collect())
    }

    /// An automorphism extending the map `domain[i] -> images[i]`.
    fn extend_partial_iso(&self, domain: Vec<usize>, images: Vec<usize>) -> PyResult<Option<Vec<usize>>> {
        let p = uh::autiso::extend_partial_iso(&self.inner, &PartialIso::new(domain, images)).map_err(err)?;
        Ok(p.map(|p| p.images().to_vec()))
    }

    fn canonical_form(&self) -> PyResult<PyGraph> {
        Ok(wrap(uh::autiso::canonical_form(&self.inner).map_err(err)?.graph))
    }

    fn induced(&self, vertices: Vec<usize>) -> PyResult<PyGraph> {
        Ok(wrap(uh::ccd::induced_subgraph(&self.inner, &vertices).map_err(err)?.0))
    }

    fn __len__(&self) -> usize {
        self.inner.n()
    }

    fn __repr__(&self) -> String {
        format!("Graph({})", uh::io::to_json(&self.inner))
    }
}

/// The graph of a family spec such as `tri(t=2)` or `union(H0, C4)`.
#[pyfunction]
fn gen(spec: &str) -> PyResult<PyGraph> {
    let s: FamilySpec = spec.parse().map_err(err)?;
    uh::families::gen(&s).map(wrap).map_err(err)
}

/// The canonical text of a family spec.
#[pyfunction]
fn normalize_spec(spec: &str) -> PyResult<String> {
    let s: FamilySpec = spec.parse().map_err(err)?;
    s.validate().map_err(err)?;
    Ok(s.normalized().to_string())
}

/// Every classified graph with at most `max_vertices` vertices, as specs.
#[pyfunction]
fn enumerate_specs(max_vertices: usize) -> PyResult<Vec<String>> {
    let specs = uh::families::enumerate_specs(max_vertices).map_err(err)?;
    Ok(specs.iter().map(|s| s.to_string()).collect())
}

/// A dict with `verdict` "uh" and a certificate, or "not_uh" and a witness.
#[pyfunction]
fn classify(py: Python<'_>, g: &PyGraph) -> PyResult<Py<PyAny>> {
    let c: Classification = uh::classifier::classify(&g.inner).map_err(err)?;
    to_py(py, &c)
}

#[pyfunction]
fn equivalent(a: &PyGraph, b: &PyGraph) -> bool {
    uh::moves::equivalent_up_to_colors(&a.inner, &b.inner).is_some()
}

#[pyfunction]
fn wreath_product(d: &PyGraph, dp: &PyGraph) -> PyGraph {
    wrap(uh::ccd::wreath_product(&d.inner, &dp.inner))
}

#[pyfunction]
fn disjoint_union(a: &PyGraph, b: &PyGraph) -> PyGraph {
    wrap(uh::ccd::color_disjoint_union(&a.inner, &b.inner))
}

/// The extension conditions for a two-colored graph.
#[pyfunction]
fn check_extension(py: Python<'_>, g: &PyGraph, red: u32, blue: u32) -> PyResult<Py<PyAny>> {
    let r = uh::theory::check_general_extension(&g.inner, red, blue, &Budget::default()).map_err(err)?;
    to_py(py, &r)
}

/// The two-colored graph generated by a partition of a class graph.
#[pyfunction]
fn minimal_extension(g: &PyGraph, parts: Vec<Vec<usize>>) -> PyResult<PyGraph> {
    let a = OrderedPartition::new(g.inner.n(), parts).map_err(err)?;
    uh::theory::minimal_extension(&g.inner, &a, &Budget::default()).map(wrap).map_err(err)
}

/// Every reading of `g` as a blow-up of one color class.
#[pyfunction]
fn blowup_decompositions(py: Python<'_>, g: &PyGraph) -> PyResult<Py<PyAny>> {
    let d = uh::theory::blowup_decompositions(&g.inner, &Budget::default()).map_err(err)?;
    to_py(py, &d)
}

fn options(jobs: usize, seed: u64) -> VerifyOptions {
    VerifyOptions {
        jobs,
        seed,
        ..VerifyOptions::default()
    }
}

#[pyfunction]
#[pyo3(signature = (max_n, jobs=0))]
fn verify_lachlan(py: Python<'_>, max_n: usize, jobs: usize) -> PyResult<Py<PyAny>> {
    let r = py.detach(|| uh::classifier::verify_lachlan(max_n, &options(jobs, 0))).map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
#[pyo3(signature = (max_total, jobs=0))]
fn verify_bichromatic(py: Python<'_>, max_total: usize, jobs: usize) -> PyResult<Py<PyAny>> {
    let r = py.detach(|| uh::classifier::verify_bichromatic(max_total, &options(jobs, 0))).map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
#[pyo3(signature = (seed=0, random=500, class_max=3, jobs=0))]
fn verify_extension(py: Python<'_>, seed: u64, random: usize, class_max: usize, jobs: usize) -> PyResult<Py<PyAny>> {
    let opts = VerifyOptions {
        random_instances: random,
        exhaustive_class_max: class_max,
        ..options(jobs, seed)
    };
    let r = py.detach(|| uh::classifier::verify_extension_equivalence(&opts)).map_err(err)?;
    to_py(py, &r)
}

#[pymodule]
fn uhgraph(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add("UhError", m.py().get_type::<UhError>())?;
    m.add("ClassificationViolation", m.py().get_type::<ClassificationViolation>())?;
    m.add_function(wrap_pyfunction!(gen, m)?)?;
    m.add_function(wrap_pyfunction!(normalize_spec, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_specs, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(equivalent, m)?)?;
    m.add_function(wrap_pyfunction!(wreath_product, m)?)?;
    m.add_function(wrap_pyfunction!(disjoint_union, m)?)?;
    m.add_function(wrap_pyfunction!(check_extension, m)?)?;
    m.add_function(wrap_pyfunction!(minimal_extension, m)?)?;
    m.add_function(wrap_pyfunction!(blowup_decompositions, m)?)?;
    m.add_function(wrap_pyfunction!(verify_lachlan, m)?)?;
    m.add_function(wrap_pyfunction!(verify_bichromatic, m)?)?;
    m.add_function(wrap_pyfunction!(verify_extension, m)?)?;
    Ok(())
}
