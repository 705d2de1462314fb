//! Python bindings. Rationals cross the boundary as `fractions.Fraction`;
//! any value whose `str()` reads `p/q` or `p` is accepted as input.

use num::{BigInt, BigRational};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use tree_ramsey::formats::{self, SetFile, Witness};
use tree_ramsey::markov::{self, CommutingPair, FiniteMarkovSystem, StateFunction, StateSet};
use tree_ramsey::search::{self, IncrementMode, Outcome, PipelineOutcome, SearchBudget};
use tree_ramsey::semigroup::{Alphabet, Level, PairWord, Word};
use tree_ramsey::sets::{self, GridSet, GridTreeSet, TreeSet};
use tree_ramsey::structures;

fn err(e: tree_ramsey::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn alphabet(k: usize) -> PyResult<Alphabet> {
    Alphabet::new(k).map_err(err)
}

fn rational(obj: &Bound<'_, PyAny>) -> PyResult<BigRational> {
    let s = obj.str()?.to_string();
    let (n, d) = s.split_once('/').unwrap_or((&s, "1"));
    let bad = || PyValueError::new_err(format!("not a rational: {s}"));
    let n: BigInt = n.trim().parse().map_err(|_| bad())?;
    let d: BigInt = d.trim().parse().map_err(|_| bad())?;
    if d == BigInt::from(0) {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

fn fraction<'py>(py: Python<'py>, q: &BigRational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((format!("{}/{}", q.numer(), q.denom()),))
}

fn fractions<'py>(py: Python<'py>, qs: &[BigRational]) -> PyResult<Vec<Bound<'py, PyAny>>> {
    qs.iter().map(|q| fraction(py, q)).collect()
}

fn budget(nodes: Option<u64>, workers: usize) -> SearchBudget {
    SearchBudget { node_cap: nodes, workers, ..SearchBudget::default() }
}

/// `None` when exhausted; raises when the node budget runs out.
fn outcome<T>(o: Outcome<T>) -> PyResult<Option<T>> {
    match o {
        Outcome::Found(t) => Ok(Some(t)),
        Outcome::Exhausted => Ok(None),
        Outcome::BudgetExhausted { nodes } => Err(PyValueError::new_err(format!("budget exhausted after {nodes} nodes"))),
    }
}

#[pyclass(name = "TreeSet", frozen)]
struct PyTreeSet {
    inner: TreeSet,
}

#[pymethods]
impl PyTreeSet {
    #[staticmethod]
    fn explicit(k: usize, depth: usize, words: Vec<String>) -> PyResult<Self> {
        let a = alphabet(k)?;
        let words = words.iter().map(|w| Word::parse(a, w)).collect::<Result<Vec<_>, _>>().map_err(err)?;
        Ok(PyTreeSet { inner: TreeSet::explicit(a, depth, words).map_err(err)? })
    }

    #[staticmethod]
    fn level_mask(k: usize, depth: usize, levels: Vec<usize>) -> PyResult<Self> {
        Ok(PyTreeSet { inner: TreeSet::level_mask(alphabet(k)?, depth, levels).map_err(err)? })
    }

    #[staticmethod]
    fn full(k: usize, depth: usize) -> PyResult<Self> {
        Ok(PyTreeSet { inner: TreeSet::full(alphabet(k)?, depth) })
    }

    #[staticmethod]
    fn random(k: usize, depth: usize, delta: &Bound<'_, PyAny>, seed: u64) -> PyResult<Self> {
        Ok(PyTreeSet { inner: TreeSet::random(alphabet(k)?, depth, &rational(delta)?, seed).map_err(err)? })
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.alphabet().size()
    }

    #[getter]
    fn depth(&self) -> usize {
        self.inner.depth()
    }

    fn contains(&self, word: &str) -> PyResult<bool> {
        Ok(self.inner.contains(&Word::parse(self.inner.alphabet(), word).map_err(err)?))
    }

    fn members(&self) -> Vec<String> {
        self.inner.members().map(|w| w.to_string()).collect()
    }

    fn density<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &sets::density_1d(&self.inner))
    }

    fn density_sequence<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyAny>>> {
        fractions(py, &sets::density_sequence_1d(&self.inner))
    }

    fn to_text(&self) -> String {
        formats::write_tree_set(&self.inner)
    }

    fn __len__(&self) -> usize {
        self.inner.members().count()
    }

    fn __repr__(&self) -> String {
        format!("TreeSet(k={}, depth={})", self.k(), self.depth())
    }
}

#[pyclass(name = "GridTreeSet", frozen)]
struct PyGridTreeSet {
    inner: GridTreeSet,
}

fn pair_word(a: Alphabet, p: &(String, String)) -> PyResult<PairWord> {
    PairWord::new(Word::parse(a, &p.0).map_err(err)?, Word::parse(a, &p.1).map_err(err)?).map_err(err)
}

#[pymethods]
impl PyGridTreeSet {
    #[staticmethod]
    fn explicit(k: usize, depth: usize, pairs: Vec<(String, String)>) -> PyResult<Self> {
        let a = alphabet(k)?;
        let members = pairs.iter().map(|p| pair_word(a, p)).collect::<PyResult<Vec<_>>>()?;
        Ok(PyGridTreeSet { inner: GridTreeSet::explicit(a, depth, members).map_err(err)? })
    }

    #[staticmethod]
    fn level_lift(k: usize, depth: usize, cells: Vec<(usize, usize)>) -> PyResult<Self> {
        let grid = GridSet::new(depth, cells).map_err(err)?;
        Ok(PyGridTreeSet { inner: sets::level_lift(&grid, alphabet(k)?) })
    }

    #[staticmethod]
    fn full(k: usize, depth: usize) -> PyResult<Self> {
        Ok(PyGridTreeSet { inner: GridTreeSet::full(alphabet(k)?, depth) })
    }

    #[staticmethod]
    fn random(k: usize, depth: usize, delta: &Bound<'_, PyAny>, seed: u64) -> PyResult<Self> {
        Ok(PyGridTreeSet { inner: GridTreeSet::random(alphabet(k)?, depth, &rational(delta)?, seed).map_err(err)? })
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.alphabet().size()
    }

    #[getter]
    fn depth(&self) -> usize {
        self.inner.depth()
    }

    fn contains(&self, first: String, second: String) -> PyResult<bool> {
        Ok(self.inner.contains(&pair_word(self.inner.alphabet(), &(first, second))?))
    }

    fn members(&self) -> PyResult<Vec<(String, String)>> {
        Ok(self.inner.members().map_err(err)?.iter().map(|p| (p.first.to_string(), p.second.to_string())).collect())
    }

    fn density<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &sets::density_2d(&self.inner).map_err(err)?)
    }

    fn density_sequence<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyAny>>> {
        fractions(py, &sets::density_sequence(&self.inner).map_err(err)?)
    }

    /// The left translate by `(first, second)`.
    fn translate(&self, first: String, second: String) -> PyResult<Self> {
        let alpha = pair_word(self.inner.alphabet(), &(first, second))?;
        Ok(PyGridTreeSet { inner: sets::translate(&self.inner, &alpha).map_err(err)? })
    }

    fn to_text(&self) -> PyResult<String> {
        formats::write_grid_set(&self.inner).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("GridTreeSet(k={}, depth={})", self.k(), self.depth())
    }
}

/// Parses a set file into a `TreeSet` or a `GridTreeSet`.
#[pyfunction]
fn parse_set(py: Python<'_>, text: &str) -> PyResult<Py<PyAny>> {
    Ok(match formats::parse_set(text).map_err(err)? {
        SetFile::Tree(inner) => Py::new(py, PyTreeSet { inner })?.into_any(),
        SetFile::Grid(inner) => Py::new(py, PyGridTreeSet { inner })?.into_any(),
    })
}

#[pyfunction]
#[pyo3(signature = (set, r, q=None, budget=None, workers=1))]
fn find_arithmetic_subtree(set: &PyTreeSet, r: usize, q: Option<usize>, budget: Option<u64>, workers: usize) -> PyResult<Option<String>> {
    let found = outcome(search::find_arithmetic_subtree(&set.inner, r, q.map(|q| q..=q), &self::budget(budget, workers)).map_err(err)?)?;
    Ok(found.map(|w| formats::witness_to_json(&Witness::Tree(w))))
}

#[pyfunction]
#[pyo3(signature = (set, depth, budget=None, workers=1))]
fn find_regular_embedding(set: &PyTreeSet, depth: usize, budget: Option<u64>, workers: usize) -> PyResult<Option<String>> {
    let found = outcome(search::find_regular_embedding(&set.inner, depth, &self::budget(budget, workers)).map_err(err)?)?;
    Ok(found.map(|w| formats::witness_to_json(&Witness::Regular(w))))
}

/// Returns `(witness_json, None)` or `(None, failure)`.
#[pyfunction]
#[pyo3(signature = (set, r, delta, budget=None))]
fn construct_tree_array(set: &PyGridTreeSet, r: usize, delta: &Bound<'_, PyAny>, budget: Option<u64>) -> PyResult<(Option<String>, Option<String>)> {
    Ok(match search::construct_tree_array(&set.inner, r, &rational(delta)?, &self::budget(budget, 1)).map_err(err)? {
        PipelineOutcome::Found(w) => (Some(formats::witness_to_json(&Witness::Array(w))), None),
        PipelineOutcome::Failed(f) => (None, Some(f.to_string())),
        PipelineOutcome::BudgetExhausted { stage, nodes } => (None, Some(format!("{stage}: budget exhausted after {nodes} nodes"))),
    })
}

/// Returns `(n, witness_json)` for the least `n` in `n_lo..=n_hi`.
#[pyfunction]
#[pyo3(signature = (set, r, u=(1, 1), v=(1, 1), n_lo=1, n_hi=1, relaxed=false, budget=None, workers=1))]
#[allow(clippy::too_many_arguments)]
fn find_product_tree(
    set: &PyGridTreeSet,
    r: usize,
    u: (usize, usize),
    v: (usize, usize),
    n_lo: usize,
    n_hi: usize,
    relaxed: bool,
    budget: Option<u64>,
    workers: usize,
) -> PyResult<Option<(usize, String)>> {
    let mode = if relaxed { IncrementMode::Relaxed } else { IncrementMode::Strict };
    let o = search::find_product_tree(&set.inner, r, Level(u.0, u.1), Level(v.0, v.1), n_lo..=n_hi, mode, &self::budget(budget, workers)).map_err(err)?;
    Ok(outcome(o)?.map(|(n, w)| (n, formats::witness_to_json(&Witness::Product(w)))))
}

/// `"PASS"` or `"FAIL: <violation>"`.
#[pyfunction]
fn verify(witness: &str, set: &Bound<'_, PyAny>) -> PyResult<String> {
    let w = formats::parse_witness(witness).map_err(err)?;
    let verdict = match &w {
        Witness::Tree(t) => structures::verify_arithmetic_subtree(t, &set.extract::<PyRef<PyTreeSet>>()?.inner),
        Witness::Regular(t) => structures::verify_regular_embedding(t, &set.extract::<PyRef<PyTreeSet>>()?.inner),
        Witness::Array(t) => structures::verify_tree_array(t, &set.extract::<PyRef<PyGridTreeSet>>()?.inner),
        Witness::Product(t) => structures::verify_product_tree(t, &set.extract::<PyRef<PyGridTreeSet>>()?.inner),
    };
    Ok(verdict.map_err(err)?.to_string())
}

#[pyclass(name = "MarkovSystem", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyMarkovSystem {
    inner: FiniteMarkovSystem,
}

#[pymethods]
impl PyMarkovSystem {
    /// `transitions[l][x]` and `probabilities[l][x]` for letter `l`, state `x`.
    #[new]
    fn new(k: usize, transitions: Vec<Vec<usize>>, probabilities: Vec<Vec<Bound<'_, PyAny>>>) -> PyResult<Self> {
        let p = probabilities.iter().map(|row| row.iter().map(rational).collect::<PyResult<Vec<_>>>()).collect::<PyResult<Vec<_>>>()?;
        Ok(PyMarkovSystem { inner: FiniteMarkovSystem::new(alphabet(k)?, transitions, p).map_err(err)? })
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Vec<PyMarkovSystem>> {
        Ok(formats::parse_markov(text).map_err(err)?.into_iter().map(|inner| PyMarkovSystem { inner }).collect())
    }

    #[getter]
    fn states(&self) -> usize {
        self.inner.states()
    }

    /// `(Pf)(x) = Σ_λ p_λ(x) f(T_λ x)`.
    fn apply<'py>(&self, py: Python<'py>, f: Vec<Bound<'py, PyAny>>) -> PyResult<Vec<Bound<'py, PyAny>>> {
        let f = StateFunction(f.iter().map(rational).collect::<PyResult<_>>()?);
        fractions(py, &markov::markov_apply(&self.inner, &f).map_err(err)?.0)
    }

    fn to_text(&self) -> String {
        formats::write_markov(&self.inner)
    }
}

fn pair(first: &PyMarkovSystem, second: &PyMarkovSystem) -> PyResult<CommutingPair> {
    CommutingPair::new(first.inner.clone(), second.inner.clone()).map_err(err)
}

#[pyfunction]
fn validate_pair<'py>(py: Python<'py>, first: &PyMarkovSystem, second: &PyMarkovSystem) -> PyResult<Bound<'py, PyDict>> {
    let r = markov::validate_systems(&first.inner, &second.inner).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("commuting", r.commuting)?;
    d.set_item("non_degenerate", r.non_degenerate.to_vec())?;
    d.set_item("disjoint_images", r.disjoint_images.to_vec())?;
    d.set_item("constant_probabilities", r.constant_probabilities.to_vec())?;
    d.set_item("valid", r.is_valid())?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (first, second, target, r, n=1, u=(1, 1), v=(1, 1)))]
#[allow(clippy::too_many_arguments)]
fn compute_phi_r<'py>(
    py: Python<'py>,
    first: &PyMarkovSystem,
    second: &PyMarkovSystem,
    target: Vec<usize>,
    r: usize,
    n: usize,
    u: (usize, usize),
    v: (usize, usize),
) -> PyResult<Vec<Bound<'py, PyAny>>> {
    let target: StateSet = target.into_iter().collect();
    let phi = markov::compute_phi_r(&pair(first, second)?, &target, Level(u.0, u.1), Level(v.0, v.1), n, r).map_err(err)?;
    fractions(py, &phi.0)
}

#[pyfunction]
#[pyo3(signature = (first, second, target, r, n=1, u=(1, 1), v=(1, 1)))]
fn roots_by_search(
    first: &PyMarkovSystem,
    second: &PyMarkovSystem,
    target: Vec<usize>,
    r: usize,
    n: usize,
    u: (usize, usize),
    v: (usize, usize),
) -> PyResult<Vec<usize>> {
    let target: StateSet = target.into_iter().collect();
    let roots = markov::roots_by_search(&pair(first, second)?, &target, Level(u.0, u.1), Level(v.0, v.1), n, r).map_err(err)?;
    Ok(roots.into_iter().collect())
}

#[pyfunction]
fn mu_n_exact<'py>(py: Python<'py>, set: &PyGridTreeSet, n: usize) -> PyResult<Bound<'py, PyAny>> {
    fraction(py, &markov::mu_n_exact(&set.inner, n).map_err(err)?)
}

/// `(estimate, standard_error)`.
#[pyfunction]
fn mu_n_monte_carlo(set: &PyGridTreeSet, n: usize, samples: u64, seed: u64) -> PyResult<(f64, f64)> {
    use num::ToPrimitive;
    let (est, stderr) = markov::mu_n_monte_carlo(&set.inner, n, samples, seed).map_err(err)?;
    Ok((est.to_f64().unwrap_or(f64::NAN), stderr))
}

#[pymodule]
fn tree_ramsey_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTreeSet>()?;
    m.add_class::<PyGridTreeSet>()?;
    m.add_class::<PyMarkovSystem>()?;
    m.add_function(wrap_pyfunction!(parse_set, m)?)?;
    m.add_function(wrap_pyfunction!(find_arithmetic_subtree, m)?)?;
    m.add_function(wrap_pyfunction!(find_regular_embedding, m)?)?;
    m.add_function(wrap_pyfunction!(construct_tree_array, m)?)?;
    m.add_function(wrap_pyfunction!(find_product_tree, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(validate_pair, m)?)?;
    m.add_function(wrap_pyfunction!(compute_phi_r, m)?)?;
    m.add_function(wrap_pyfunction!(roots_by_search, m)?)?;
    m.add_function(wrap_pyfunction!(mu_n_exact, m)?)?;
    m.add_function(wrap_pyfunction!(mu_n_monte_carlo, m)?)?;
    Ok(())
}
