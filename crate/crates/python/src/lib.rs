//! Python bindings: automata, the transformation pipeline and the bounded
//! checks.

use std::collections::BTreeMap;

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

use blockfree::io::{dot, parse_epda, write_epda, Names};
use blockfree::oracle::{self, Bounds};
use blockfree::pipeline::{self, Options, PipelineRun, STEP_NAMES};
use blockfree::reach;
use blockfree::{Budget, BoundedLanguage, Epda, Error};

create_exception!(blockfree_py, BlockfreeError, PyException);
create_exception!(blockfree_py, ParseError, BlockfreeError);
create_exception!(blockfree_py, EmptyLanguageError, BlockfreeError);
create_exception!(blockfree_py, SubclassError, BlockfreeError);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Parse { .. } => ParseError::new_err(e.to_string()),
        Error::EmptyLanguage => EmptyLanguageError::new_err(e.to_string()),
        Error::Subclass(_) => SubclassError::new_err(e.to_string()),
        e => BlockfreeError::new_err(e.to_string()),
    }
}

fn names(lenient: bool) -> Names {
    if lenient {
        Names::Lenient
    } else {
        Names::Strict
    }
}

/// An extended pushdown automaton. Edges are tuples
/// `(src, label or None, pop, push, dst)` with top-first stack words.
#[pyclass(name = "Epda", module = "blockfree_py", skip_from_py_object)]
#[derive(Clone)]
pub struct PyEpda {
    inner: Epda,
}

type EdgeTuple = (String, Option<String>, Vec<String>, Vec<String>, String);

#[pymethods]
impl PyEpda {
    #[new]
    #[pyo3(signature = (initial, edges, marking))]
    fn new(initial: &str, edges: Vec<EdgeTuple>, marking: Vec<String>) -> PyResult<Self> {
        let mut a = Epda::new(initial);
        for (src, label, pop, push, dst) in &edges {
            let pop: Vec<&str> = pop.iter().map(String::as_str).collect();
            let push: Vec<&str> = push.iter().map(String::as_str).collect();
            a.add_edge(src, label.as_deref(), &pop, &push, dst);
        }
        let marking: Vec<&str> = marking.iter().map(String::as_str).collect();
        a.set_marking(&marking);
        a.check_valid().map_err(to_py)?;
        Ok(PyEpda { inner: a })
    }

    #[staticmethod]
    #[pyo3(signature = (text, lenient = false))]
    fn parse(text: &str, lenient: bool) -> PyResult<Self> {
        let inner = parse_epda(text, names(lenient)).map_err(to_py)?;
        Ok(PyEpda { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (path, lenient = false))]
    fn load(path: &str, lenient: bool) -> PyResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| BlockfreeError::new_err(format!("{}: {}", path, e)))?;
        Self::parse(&text, lenient)
    }

    #[staticmethod]
    fn running_example() -> Self {
        PyEpda {
            inner: blockfree::corpus::running_example(),
        }
    }

    fn to_text(&self) -> String {
        write_epda(&self.inner)
    }

    fn to_dot(&self) -> String {
        dot::epda_to_dot(&self.inner)
    }

    #[getter]
    fn states(&self) -> Vec<String> {
        self.inner.states.clone()
    }

    #[getter]
    fn outputs(&self) -> Vec<String> {
        self.inner.outputs.clone()
    }

    #[getter]
    fn stack(&self) -> Vec<String> {
        self.inner.stack.clone()
    }

    #[getter]
    fn initial(&self) -> String {
        self.inner.state_name(self.inner.initial).to_string()
    }

    #[getter]
    fn marking(&self) -> Vec<String> {
        self.inner.marking.iter().map(|s| self.inner.state_name(*s).to_string()).collect()
    }

    #[getter]
    fn edges(&self) -> Vec<EdgeTuple> {
        let a = &self.inner;
        a.edges
            .iter()
            .map(|e| {
                (
                    a.state_name(e.src).to_string(),
                    e.label.map(|l| a.output_name(l).to_string()),
                    e.pop.iter().map(|g| a.stack_name(*g).to_string()).collect(),
                    e.push.iter().map(|g| a.stack_name(*g).to_string()).collect(),
                    a.state_name(e.dst).to_string(),
                )
            })
            .collect()
    }

    fn is_dpda(&self) -> bool {
        self.inner.classify().is_dpda()
    }

    /// Words of length at most `maxlen`, each a list of output symbols.
    #[pyo3(signature = (maxlen, marked = true))]
    fn language(&self, maxlen: usize, marked: bool) -> PyResult<Vec<Vec<String>>> {
        let l = self.inner.bounded_language(marked, maxlen, Budget::default());
        if !l.complete {
            return Err(BlockfreeError::new_err("language enumeration hit the budget"));
        }
        let mut words: Vec<Vec<String>> = l.words.into_iter().collect();
        words.sort_by(blockfree::ats::length_lex);
        Ok(words)
    }

    fn __str__(&self) -> String {
        self.to_text()
    }

    fn __repr__(&self) -> String {
        format!(
            "Epda({} states, {} edges)",
            self.inner.states.len(),
            self.inner.edges.len()
        )
    }

    fn __eq__(&self, other: PyRef<'_, PyEpda>) -> bool {
        self.inner == other.inner
    }
}

/// The intermediate artifacts of one pipeline run.
#[pyclass(name = "Run", module = "blockfree_py")]
pub struct PyRun {
    inner: PipelineRun,
}

#[pymethods]
impl PyRun {
    #[getter]
    fn ok(&self) -> bool {
        self.inner.aborted.is_none()
    }

    #[getter]
    fn error(&self) -> Option<String> {
        self.inner.aborted.as_ref().map(|e| e.to_string())
    }

    /// `(step, name, kind, size)` for every completed step.
    #[getter]
    fn stages(&self) -> Vec<(usize, String, String, usize)> {
        self.inner
            .stages
            .iter()
            .map(|s| (s.step, s.name().to_string(), s.artifact.kind().to_string(), s.artifact.size()))
            .collect()
    }

    /// The artifact of `step` in its text format.
    fn artifact(&self, step: usize) -> PyResult<String> {
        self.inner
            .stage(step)
            .map(|s| s.artifact.to_string())
            .ok_or_else(|| BlockfreeError::new_err(format!("no artifact for step {}", step)))
    }

    fn epda(&self, step: usize) -> Option<PyEpda> {
        self.inner.epda(step).map(|a| PyEpda { inner: a.clone() })
    }

    fn output(&self) -> PyResult<PyEpda> {
        let a = self.inner.output().map_err(to_py)?;
        Ok(PyEpda { inner: a.clone() })
    }

    fn summary(&self) -> String {
        self.inner.summary()
    }
}

/// Outcome of `verify_solution`.
#[pyclass(name = "Report", module = "blockfree_py")]
pub struct PyReport {
    inner: oracle::Report,
}

#[pymethods]
impl PyReport {
    #[getter]
    fn passed(&self) -> bool {
        self.inner.passed()
    }

    /// `(name, passed, detail, complete)` per item.
    #[getter]
    fn items(&self) -> Vec<(String, bool, String, bool)> {
        self.inner
            .items
            .iter()
            .map(|i| (i.name.to_string(), i.passed, i.detail.clone(), i.complete))
            .collect()
    }

    fn render(&self) -> String {
        self.inner.render()
    }

    fn __bool__(&self) -> bool {
        self.passed()
    }
}

#[pyfunction]
#[pyo3(signature = (epda, k = Some(1), productive = false, last = 12))]
fn run_pipeline(epda: PyRef<'_, PyEpda>, k: Option<usize>, productive: bool, last: usize) -> PyResult<PyRun> {
    if last >= STEP_NAMES.len() {
        return Err(BlockfreeError::new_err(format!("no step {}", last)));
    }
    let opts = Options {
        k,
        grammar_mode: if productive {
            blockfree::cfg::StepThreeMode::Productive
        } else {
            blockfree::cfg::StepThreeMode::Full
        },
        last,
    };
    Ok(PyRun {
        inner: pipeline::run_pipeline(&epda.inner, opts),
    })
}

#[pyfunction]
fn solve(epda: PyRef<'_, PyEpda>) -> PyResult<PyEpda> {
    let inner = pipeline::solve(&epda.inner).map_err(to_py)?;
    Ok(PyEpda { inner })
}

#[pyfunction]
#[pyo3(signature = (original, solution, n = 8, depth = 40, horizon = 40, max_configs = 100_000))]
fn verify_solution(
    original: PyRef<'_, PyEpda>,
    solution: PyRef<'_, PyEpda>,
    n: usize,
    depth: usize,
    horizon: usize,
    max_configs: usize,
) -> PyResult<PyReport> {
    let bounds = Bounds {
        n,
        depth,
        horizon,
        max_configs,
    };
    let inner = oracle::verify_solution(&original.inner, &solution.inner, bounds).map_err(to_py)?;
    Ok(PyReport { inner })
}

/// The first word on which the two languages differ, or None.
#[pyfunction]
#[pyo3(signature = (a, b, maxlen, marked = true))]
fn equiv(a: PyRef<'_, PyEpda>, b: PyRef<'_, PyEpda>, maxlen: usize, marked: bool) -> PyResult<Option<Vec<String>>> {
    oracle::languages_equal_upto(&a.inner, &b.inner, maxlen, marked, Budget::default()).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (epda, depth = 40))]
fn deadlock_free(epda: PyRef<'_, PyEpda>, depth: usize) -> bool {
    oracle::has_deadlock_bounded(&epda.inner.system(), depth, Budget::default()).is_clean()
}

#[pyfunction]
#[pyo3(signature = (epda, depth = 40))]
fn lifelock_free(epda: PyRef<'_, PyEpda>, depth: usize) -> bool {
    oracle::has_lifelock_bounded(&epda.inner.system(), depth, Budget::default()).is_clean()
}

#[pyfunction]
#[pyo3(name = "blockfree", signature = (epda, depth = 40, horizon = 40))]
fn operationally_blockfree(epda: PyRef<'_, PyEpda>, depth: usize, horizon: usize) -> bool {
    oracle::blockfree_bounded(&epda.inner.system(), depth, horizon, Budget::default()).all_ok()
}

#[pyfunction]
#[pyo3(signature = (epda, depth = 40))]
fn deterministic(epda: PyRef<'_, PyEpda>, depth: usize) -> bool {
    oracle::determinism_bounded(&epda.inner.system(), depth, Budget::default()).is_clean()
}

/// For every state, the `k`-prefixes of stacks with which it may be reached
/// from the initial configuration, top first.
#[pyfunction]
fn reach_prefixes(epda: PyRef<'_, PyEpda>, k: usize) -> PyResult<BTreeMap<String, Vec<Vec<String>>>> {
    let a = &epda.inner;
    let r = reach::k_prefix_overapprox(a, k).map_err(to_py)?;
    let mut out = BTreeMap::new();
    for (i, name) in a.states.iter().enumerate() {
        let words = r
            .from_initial(blockfree::epda::State(i as u32))
            .into_iter()
            .map(|w| w.iter().map(|g| a.stack_name(*g).to_string()).collect())
            .collect();
        out.insert(name.clone(), words);
    }
    Ok(out)
}

#[pyfunction]
fn prune(epda: PyRef<'_, PyEpda>, k: usize) -> PyResult<(PyEpda, Vec<String>)> {
    let (inner, report) = reach::prune_obvious(&epda.inner, k).map_err(to_py)?;
    Ok((PyEpda { inner }, report.removed_states))
}

#[pymodule]
pub fn blockfree_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyEpda>()?;
    m.add_class::<PyRun>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(run_pipeline, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(verify_solution, m)?)?;
    m.add_function(wrap_pyfunction!(equiv, m)?)?;
    m.add_function(wrap_pyfunction!(deadlock_free, m)?)?;
    m.add_function(wrap_pyfunction!(lifelock_free, m)?)?;
    m.add_function(wrap_pyfunction!(operationally_blockfree, m)?)?;
    m.add_function(wrap_pyfunction!(deterministic, m)?)?;
    m.add_function(wrap_pyfunction!(reach_prefixes, m)?)?;
    m.add_function(wrap_pyfunction!(prune, m)?)?;
    let py = m.py();
    m.add("BlockfreeError", py.get_type::<BlockfreeError>())?;
    m.add("ParseError", py.get_type::<ParseError>())?;
    m.add("EmptyLanguageError", py.get_type::<EmptyLanguageError>())?;
    m.add("SubclassError", py.get_type::<SubclassError>())?;
    m.add("STEP_NAMES", STEP_NAMES.to_vec())?;
    Ok(())
}
