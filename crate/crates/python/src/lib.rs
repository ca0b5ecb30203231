//! Python bindings for the magic24 engine.
//!
//! Vertex indices and labels are 1-based at this boundary, like the JSON files.

use magic24_core::labelings::enumerate_parity_binary_with;
use magic24_core::solver::{resume, solve_parallel};
use magic24_core::{self as core, Checkpoint, IncidenceStructure, SearchConfig, SearchOutcome};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn digits(bits: &[core::BinaryLabeling]) -> Vec<Vec<u8>> {
    bits.iter().map(|b| b.digits().to_vec()).collect()
}

/// A vertex/cell incidence structure.
#[pyclass(module = "magic24", frozen)]
struct Structure {
    inner: IncidenceStructure,
}

#[pymethods]
impl Structure {
    /// The 24-cell: 24 vertices, 24 octahedral cells.
    #[staticmethod]
    fn cell24() -> Self {
        Structure { inner: core::build_24cell() }
    }

    #[staticmethod]
    fn cube() -> Self {
        Structure { inner: core::build_cube() }
    }

    #[staticmethod]
    fn tesseract() -> Self {
        Structure { inner: core::build_tesseract() }
    }

    /// Builds a structure from 1-based member lists, one per cell.
    #[staticmethod]
    fn from_cells(name: &str, num_vertices: usize, cells: Vec<Vec<usize>>) -> PyResult<Self> {
        let zero_based = cells
            .into_iter()
            .map(|c| c.into_iter().map(|v| v.checked_sub(1)).collect::<Option<Vec<_>>>())
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| PyValueError::new_err("vertex indices are 1-based"))?;
        IncidenceStructure::from_cells(name, num_vertices, zero_based).map(|inner| Structure { inner }).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let file = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        IncidenceStructure::from_file(file).map(|inner| Structure { inner }).map_err(err)
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner.to_file()).expect("structure serializes")
    }

    #[getter]
    fn name(&self) -> &str {
        self.inner.name()
    }

    #[getter]
    fn num_vertices(&self) -> usize {
        self.inner.num_vertices()
    }

    #[getter]
    fn num_cells(&self) -> usize {
        self.inner.num_cells()
    }

    /// 1-based member lists.
    #[getter]
    fn cells(&self) -> Vec<Vec<usize>> {
        self.inner.cells().iter().map(|c| c.members.iter().map(|v| v + 1).collect()).collect()
    }

    fn magic_sum(&self) -> PyResult<u64> {
        core::magic_sum(&self.inner).map_err(err)
    }

    /// Returns a dict with `is_permutation`, `cell_sums`, `magic` and `magic_sum`.
    fn verify<'py>(&self, py: Python<'py>, labels: Vec<i64>) -> PyResult<Bound<'py, PyDict>> {
        let r = core::verify_labeling(&self.inner, &labels).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("is_permutation", r.is_permutation)?;
        d.set_item("cell_sums", r.cell_sums)?;
        d.set_item("magic", r.magic)?;
        d.set_item("magic_sum", r.magic_sum)?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!(
            "Structure({:?}, vertices={}, cells={})",
            self.inner.name(),
            self.inner.num_vertices(),
            self.inner.num_cells()
        )
    }
}

/// A permutation group acting on vertices.
#[pyclass(module = "magic24", frozen)]
struct Group {
    inner: core::SymmetryGroup,
}

#[pymethods]
impl Group {
    /// The 1152-element symmetry group of the 24-cell, from coordinate generators.
    #[staticmethod]
    fn symmetry_24cell(py: Python<'_>, s: &Structure) -> PyResult<Self> {
        let s = &s.inner;
        py.detach(|| core::symmetry_24cell(s)).map(|inner| Group { inner }).map_err(err)
    }

    /// All incidence-preserving vertex permutations, by backtracking.
    #[staticmethod]
    #[pyo3(signature = (s, cap = 1 << 20))]
    fn automorphisms(py: Python<'_>, s: &Structure, cap: usize) -> PyResult<Self> {
        let s = &s.inner;
        py.detach(|| core::automorphisms(s, cap)).map(|inner| Group { inner }).map_err(err)
    }

    /// Closure of 1-based generator images.
    #[staticmethod]
    #[pyo3(signature = (generators, cap = 1 << 20))]
    fn generated_by(generators: Vec<Vec<usize>>, cap: usize) -> PyResult<Self> {
        let gens = generators
            .into_iter()
            .map(core::Permutation::from_one_based)
            .collect::<core::Result<Vec<_>>>()
            .map_err(err)?;
        core::group_closure(&gens, cap).map(|inner| Group { inner }).map_err(err)
    }

    #[getter]
    fn order(&self) -> usize {
        self.inner.order()
    }

    #[getter]
    fn degree(&self) -> usize {
        self.inner.degree()
    }

    /// 1-based images, sorted.
    fn elements(&self) -> Vec<Vec<usize>> {
        self.inner.elements().iter().map(|p| p.one_based()).collect()
    }

    fn contains(&self, image: Vec<usize>) -> PyResult<bool> {
        Ok(self.inner.contains(&core::Permutation::from_one_based(image).map_err(err)?))
    }

    /// Lexicographically least image of `labels` under the group.
    fn canonical_form(&self, labels: Vec<i64>) -> PyResult<Vec<i64>> {
        core::canonical_form(&labels, &self.inner).map_err(err)
    }

    /// Returns `(count, representatives, hits)`, with representatives sorted.
    fn count_orbits(&self, py: Python<'_>, labelings: Vec<Vec<i64>>) -> PyResult<(usize, Vec<Vec<i64>>, Vec<usize>)> {
        let g = &self.inner;
        let o = py.detach(|| core::count_orbits(&labelings, g)).map_err(err)?;
        Ok((o.count, o.representatives, o.hits))
    }

    fn __len__(&self) -> usize {
        self.inner.order()
    }
}

/// Weight-12 0/1 labelings with an odd count in every cell.
///
/// Returns a dict with `total_candidates` and digit lists under
/// `solutions`, `balanced` and `unbalanced`.
#[pyfunction]
#[pyo3(signature = (s, workers = 1))]
fn parity_search<'py>(py: Python<'py>, s: &Structure, workers: usize) -> PyResult<Bound<'py, PyDict>> {
    let st = &s.inner;
    let p = py.detach(|| enumerate_parity_binary_with(st, workers)).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("total_candidates", p.total_candidates)?;
    d.set_item("solutions", digits(&p.solutions))?;
    d.set_item("balanced", digits(&p.balanced))?;
    d.set_item("unbalanced", digits(&p.unbalanced))?;
    Ok(d)
}

/// The same solution set by linear algebra over GF(2): `(rank, coset_size, solutions)`.
#[pyfunction]
fn parity_gf2(s: &Structure) -> PyResult<(usize, u64, Vec<Vec<u8>>)> {
    let g = core::parity_solutions_gf2(&s.inner).map_err(err)?;
    Ok((g.rank, g.coset_size, digits(&g.solutions)))
}

/// The coordinate-pair ternary labeling, with trits relabeled by `perm` (e.g. "120").
#[pyfunction]
#[pyo3(signature = (s, perm = "012"))]
fn ternary(s: &Structure, perm: &str) -> PyResult<Vec<u8>> {
    let pi: core::TritPerm = perm.parse().map_err(err)?;
    let t = core::ternary_16cell(&s.inner).map_err(err)?;
    Ok(core::permute_trits(&t, pi).trits().to_vec())
}

/// Every magic labeling from the superimposition construction, sorted.
///
/// Returns a dict with `triples`, `raw`, `distinct` and `labelings`.
#[pyfunction]
fn construct(py: Python<'_>) -> PyResult<Bound<'_, PyDict>> {
    let c = py.detach(core::construct_all).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("triples", c.triples.len())?;
    d.set_item("raw", c.raw())?;
    d.set_item("distinct", c.distinct())?;
    d.set_item("labelings", c.distinct_labels())?;
    Ok(d)
}

fn outcome_dict<'py>(py: Python<'py>, o: SearchOutcome) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("labelings", o.labelings.into_iter().map(|m| m.labels).collect::<Vec<_>>())?;
    d.set_item("nodes", o.nodes_explored)?;
    d.set_item("complete", o.complete)?;
    let cp = o.checkpoint.map(|c| serde_json::to_string(&c).expect("checkpoint serializes"));
    d.set_item("checkpoint", cp)?;
    Ok(d)
}

/// Backtracking search for labelings with every cell summing to `target_sum`.
///
/// `fixed` holds 1-based `(vertex, label)` pairs. Pass the `checkpoint`
/// string of an incomplete run to continue it. Returns a dict with
/// `labelings`, `nodes`, `complete` and `checkpoint`.
#[pyfunction]
#[pyo3(signature = (
    s, target_sum, *, node_budget = None, emit_limit = None,
    symmetry_reduction = false, fixed = Vec::new(), workers = 1, checkpoint = None,
))]
#[allow(clippy::too_many_arguments)]
fn solve<'py>(
    py: Python<'py>,
    s: &Structure,
    target_sum: i64,
    node_budget: Option<u64>,
    emit_limit: Option<u64>,
    symmetry_reduction: bool,
    fixed: Vec<(usize, u32)>,
    workers: usize,
    checkpoint: Option<&str>,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = SearchConfig { target_sum, node_budget, emit_limit, symmetry_reduction, fixed };
    let cp: Option<Checkpoint> = checkpoint
        .map(serde_json::from_str)
        .transpose()
        .map_err(|e| PyValueError::new_err(format!("bad checkpoint: {e}")))?;
    let st = &s.inner;
    let out = py
        .detach(|| match &cp {
            Some(cp) => resume(st, &cfg, cp),
            None => solve_parallel(st, &cfg, workers),
        })
        .map_err(err)?;
    outcome_dict(py, out)
}

#[pymodule]
fn magic24(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Structure>()?;
    m.add_class::<Group>()?;
    m.add_function(wrap_pyfunction!(parity_search, m)?)?;
    m.add_function(wrap_pyfunction!(parity_gf2, m)?)?;
    m.add_function(wrap_pyfunction!(ternary, m)?)?;
    m.add_function(wrap_pyfunction!(construct, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    Ok(())
}
