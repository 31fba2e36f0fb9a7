//! Python bindings. Every analysis returns the same document the command
//! line prints with `--json`, decoded into Python objects.

use std::path::Path;

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use rsubst::complexity::FamilyParams;
use rsubst::report::{self, Report, RunConfig};
use rsubst::{bundled, parse_spec, to_canonical_json, Budget, Error, RandomSubstitution};

create_exception!(rsubst_py, SpecError, PyValueError);
create_exception!(rsubst_py, BudgetExceeded, PyException);
create_exception!(rsubst_py, PreconditionError, PyValueError);

fn to_py(e: Error) -> PyErr {
    let msg = e.to_string();
    if e.is_spec_error() {
        SpecError::new_err(msg)
    } else if matches!(e, Error::BudgetExceeded { .. }) {
        BudgetExceeded::new_err(msg)
    } else {
        PreconditionError::new_err(msg)
    }
}

/// A JSON document, a bundled example name, or a path to a document.
fn load(spec: &str) -> PyResult<RandomSubstitution> {
    let text = if spec.trim_start().starts_with('{') {
        spec.to_string()
    } else if let Some(src) = bundled::source(spec) {
        src.to_string()
    } else if Path::new(spec).exists() {
        std::fs::read_to_string(spec).map_err(|e| SpecError::new_err(format!("{spec}: {e}")))?
    } else {
        return Err(SpecError::new_err(format!("{spec}: not a document, bundled example or file")));
    };
    parse_spec(&text).map_err(to_py)
}

fn decode<'py>(py: Python<'py>, json: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (json,))
}

struct Options {
    m: usize,
    k: usize,
    n: usize,
    margin: Option<usize>,
    engine: String,
    mode: Option<String>,
    fit: Option<String>,
    reference: Option<f64>,
    threads: Option<usize>,
    budget_words: Option<usize>,
}

impl Options {
    fn config(&self) -> PyResult<RunConfig> {
        let mut cfg = RunConfig {
            m: self.m,
            k: self.k,
            n: self.n,
            margin: self.margin,
            engine: self.engine.parse().map_err(to_py)?,
            reference: self.reference,
            threads: self.threads,
            ..RunConfig::default()
        };
        if let Some(mode) = &self.mode {
            cfg.mode = mode.parse().map_err(to_py)?;
        }
        if let Some(fit) = &self.fit {
            cfg.fit = fit.parse().map_err(to_py)?;
        }
        if let Some(w) = self.budget_words {
            cfg.budget = Budget { max_words: w, ..cfg.budget };
        }
        cfg.validate().map_err(to_py)?;
        Ok(cfg)
    }
}

fn run<'py>(
    py: Python<'py>,
    spec: &str,
    opts: Options,
    cmd: fn(&RandomSubstitution, &RunConfig) -> rsubst::Result<Report>,
) -> PyResult<Bound<'py, PyAny>> {
    let sub = load(spec)?;
    let cfg = opts.config()?;
    let report = cfg.install(|| cmd(&sub, &cfg)).map_err(to_py)?.map_err(to_py)?;
    decode(py, &report.to_json())
}

/// Canonical JSON text of a substitution.
#[pyfunction]
fn canonical(spec: &str) -> PyResult<String> {
    Ok(to_canonical_json(&load(spec)?))
}

/// Names of the bundled examples.
#[pyfunction]
fn examples() -> Vec<&'static str> {
    bundled::names().collect()
}

#[pyfunction]
#[pyo3(signature = (spec, m=4, threads=None, budget_words=None))]
fn check<'py>(
    py: Python<'py>,
    spec: &str,
    m: usize,
    threads: Option<usize>,
    budget_words: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let opts = Options {
        m,
        k: 1,
        n: 8,
        margin: None,
        engine: "auto".into(),
        mode: None,
        fit: None,
        reference: None,
        threads,
        budget_words,
    };
    run(py, spec, opts, report::cmd_check)
}

#[pyfunction]
#[pyo3(signature = (spec, m=12, k=4, engine="auto", reference=None, threads=None, budget_words=None))]
#[allow(clippy::too_many_arguments)]
fn entropy<'py>(
    py: Python<'py>,
    spec: &str,
    m: usize,
    k: usize,
    engine: &str,
    reference: Option<f64>,
    threads: Option<usize>,
    budget_words: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let opts = Options {
        m,
        k,
        n: 1,
        margin: None,
        engine: engine.into(),
        mode: None,
        fit: None,
        reference,
        threads,
        budget_words,
    };
    run(py, spec, opts, report::cmd_entropy)
}

#[pyfunction]
#[pyo3(signature = (spec, m=4, n=12, threads=None, budget_words=None))]
fn classify<'py>(
    py: Python<'py>,
    spec: &str,
    m: usize,
    n: usize,
    threads: Option<usize>,
    budget_words: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let opts = Options {
        m,
        k: 1,
        n,
        margin: None,
        engine: "auto".into(),
        mode: None,
        fit: None,
        reference: None,
        threads,
        budget_words,
    };
    run(py, spec, opts, report::cmd_classify)
}

#[pyfunction]
#[pyo3(signature = (spec, n=12, mode="subshift", margin=None, threads=None, budget_words=None))]
fn language<'py>(
    py: Python<'py>,
    spec: &str,
    n: usize,
    mode: &str,
    margin: Option<usize>,
    threads: Option<usize>,
    budget_words: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let opts = Options {
        m: 1,
        k: 1,
        n,
        margin,
        engine: "auto".into(),
        mode: Some(mode.to_string()),
        fit: None,
        reference: None,
        threads,
        budget_words,
    };
    run(py, spec, opts, report::cmd_language)
}

#[pyfunction]
#[pyo3(signature = (spec, n=243, mode="subshift", fit="polynomial", threads=None, budget_words=None))]
fn complexity<'py>(
    py: Python<'py>,
    spec: &str,
    n: usize,
    mode: &str,
    fit: &str,
    threads: Option<usize>,
    budget_words: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let opts = Options {
        m: 8,
        k: 8,
        n,
        margin: None,
        engine: "auto".into(),
        mode: Some(mode.to_string()),
        fit: Some(fit.to_string()),
        reference: None,
        threads,
        budget_words,
    };
    run(py, spec, opts, report::cmd_complexity)
}

/// Returns `(document, report)` for a permutation family member.
#[pyfunction]
#[pyo3(signature = (ell, perms=None))]
fn family<'py>(
    py: Python<'py>,
    ell: usize,
    perms: Option<Vec<String>>,
) -> PyResult<(String, Bound<'py, PyAny>)> {
    let params = match perms {
        Some(p) => {
            let p: Vec<&str> = p.iter().map(String::as_str).collect();
            FamilyParams::new(ell, &p)
        }
        None => FamilyParams::all_permutations(ell),
    }
    .map_err(to_py)?;
    let (doc, report) = report::cmd_family(&params).map_err(to_py)?;
    Ok((doc, decode(py, &report.to_json())?))
}

#[pymodule]
fn rsubst_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("SpecError", py.get_type::<SpecError>())?;
    m.add("BudgetExceeded", py.get_type::<BudgetExceeded>())?;
    m.add("PreconditionError", py.get_type::<PreconditionError>())?;
    m.add_function(wrap_pyfunction!(canonical, m)?)?;
    m.add_function(wrap_pyfunction!(examples, m)?)?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(entropy, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(language, m)?)?;
    m.add_function(wrap_pyfunction!(complexity, m)?)?;
    m.add_function(wrap_pyfunction!(family, m)?)?;
    Ok(())
}
