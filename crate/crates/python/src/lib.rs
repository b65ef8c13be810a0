//! Python bindings for `metriclass`.

use std::sync::Arc;

use metriclass::enumeration::DomainSpec;
use metriclass::ingest::{default_scheme, parse_qrels, parse_run, to_rankings};
use metriclass::intrinsic::{self, ClassifyOptions};
use metriclass::measures::{self, AggregateKind, MeasureId, MeasureSpec};
use metriclass::model::{ContingencyTable, Element, GradeScheme, Ranking, Universe, UserContext};
use metriclass::report::{paper_suite, render_table, run_suite, Format};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

create_exception!(metriclass_py, MetriclassError, PyValueError);

fn err(e: metriclass::Error) -> PyErr {
    MetriclassError::new_err(e.to_string())
}

/// A measure value, exact or approximate.
#[pyclass(frozen, from_py_object, name = "Value", module = "metriclass_py")]
#[derive(Clone)]
struct PyValue(metriclass::Value);

#[pymethods]
impl PyValue {
    #[getter]
    fn exact(&self) -> bool {
        self.0.as_exact().is_some()
    }

    /// `fractions.Fraction` for exact values, `None` otherwise.
    fn as_fraction<'py>(&self, py: Python<'py>) -> PyResult<Option<Bound<'py, PyAny>>> {
        let Some(q) = self.0.as_exact() else { return Ok(None) };
        let fraction = py.import("fractions")?.getattr("Fraction")?;
        Ok(Some(fraction.call1((format!("{}/{}", q.numer(), q.denom()),))?))
    }

    fn fraction(&self) -> String {
        self.0.fraction()
    }

    fn __float__(&self) -> f64 {
        self.0.to_f64()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Value({})", self.0)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0.same(&other.0)
    }
}

#[pyclass(frozen, from_py_object, name = "Measure", module = "metriclass_py")]
#[derive(Clone)]
struct PyMeasure(MeasureSpec);

#[pymethods]
impl PyMeasure {
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        spec.parse().map(Self).map_err(err)
    }

    #[getter]
    fn label(&self) -> String {
        self.0.label()
    }

    #[getter]
    fn family(&self) -> String {
        format!("{:?}", self.0.family())
    }

    /// Ranked list of grades. `relevant` defaults to the relevant items
    /// retrieved and `collection` to `len + relevant`.
    #[pyo3(signature = (grades, relevant=None, collection=None, levels=2))]
    fn evaluate_ranking(&self, grades: Vec<u8>, relevant: Option<u64>, collection: Option<u64>, levels: usize) -> PyResult<PyValue> {
        if levels < 2 {
            return Err(PyValueError::new_err("levels must be at least 2"));
        }
        let scheme = Arc::new(if levels == 2 { GradeScheme::binary() } else { GradeScheme::graded(levels) });
        let ranking = Ranking::new(scheme, grades).map_err(err)?;
        let r = relevant.unwrap_or_else(|| ranking.relevant_count());
        let n = collection.unwrap_or(ranking.len() as u64 + r);
        let element = Element::ranked(ranking, Universe::new(n, r).map_err(err)?);
        self.0.evaluate(&element).map(PyValue).map_err(err)
    }

    #[pyo3(signature = (tp, fp, fn_, tn))]
    fn evaluate_table(&self, tp: u64, fp: u64, fn_: u64, tn: u64) -> PyResult<PyValue> {
        let element = Element::Table { table: ContingencyTable::new(tp, fp, fn_, tn) };
        self.0.evaluate(&element).map(PyValue).map_err(err)
    }

    fn evaluate_user(&self, known: u64, retrieved_known: u64, retrieved_unknown: u64, retrieved: u64) -> PyResult<PyValue> {
        let context = UserContext::new(known, retrieved_known, retrieved_unknown, retrieved).map_err(err)?;
        self.0.evaluate(&Element::User { context }).map(PyValue).map_err(err)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Measure('{}')", self.0)
    }
}

#[pyclass(frozen, from_py_object, name = "Domain", module = "metriclass_py")]
#[derive(Clone)]
struct PyDomain(DomainSpec);

#[pymethods]
impl PyDomain {
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        spec.parse().map(Self).map_err(err)
    }

    #[getter]
    fn cardinality(&self) -> u128 {
        self.0.cardinality()
    }

    /// Element labels in enumeration order.
    fn labels(&self) -> PyResult<Vec<String>> {
        Ok(self.0.elements().map_err(err)?.iter().map(|e| e.label_with_universe()).collect())
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Domain('{}')", self.0)
    }
}

#[pyclass(frozen, name = "Verdict", module = "metriclass_py")]
struct PyVerdict(intrinsic::Verdict);

#[pymethods]
impl PyVerdict {
    #[getter]
    fn category(&self) -> &'static str {
        self.0.category.as_str()
    }

    #[getter]
    fn injective(&self) -> bool {
        self.0.injective
    }

    #[getter]
    fn elements(&self) -> usize {
        self.0.elements
    }

    #[getter]
    fn classes(&self) -> usize {
        self.0.classes
    }

    /// `(first, second, value)` or `None`.
    #[getter]
    fn collision(&self) -> Option<(String, String, PyValue)> {
        self.0.collision.as_ref().map(|c| (c.first.clone(), c.second.clone(), PyValue(c.value.clone())))
    }

    #[getter]
    fn spacing(&self) -> String {
        self.0.spacing.to_string()
    }

    #[getter]
    fn oracle_interval(&self) -> Option<bool> {
        self.0.oracle.is_interval()
    }

    fn summary(&self) -> String {
        self.0.summary()
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(|e| MetriclassError::new_err(e.to_string()))
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Verdict('{}')", self.0.summary())
    }
}

#[derive(FromPyObject)]
#[allow(clippy::large_enum_variant)]
enum MeasureArg {
    Spec(PyMeasure),
    Text(String),
}

impl MeasureArg {
    fn resolve(self) -> PyResult<MeasureSpec> {
        match self {
            MeasureArg::Spec(m) => Ok(m.0),
            MeasureArg::Text(s) => s.parse().map_err(err),
        }
    }
}

#[derive(FromPyObject)]
enum DomainArg {
    Spec(PyDomain),
    Text(String),
}

impl DomainArg {
    fn resolve(self) -> PyResult<DomainSpec> {
        match self {
            DomainArg::Spec(d) => Ok(d.0),
            DomainArg::Text(s) => s.parse().map_err(err),
        }
    }
}

#[pyfunction]
#[pyo3(signature = (measure, domain, oracle_cap=200))]
fn classify(py: Python<'_>, measure: MeasureArg, domain: DomainArg, oracle_cap: usize) -> PyResult<PyVerdict> {
    let (m, d) = (measure.resolve()?, domain.resolve()?);
    let opts = ClassifyOptions { oracle_cap, ..ClassifyOptions::default() };
    py.detach(|| intrinsic::classify(&m, &d, &opts)).map(PyVerdict).map_err(err)
}

/// `(id, family, description)` for every measure.
#[pyfunction]
fn list_measures() -> Vec<(String, String, String)> {
    MeasureId::ALL.iter().map(|id| (id.name().to_string(), format!("{:?}", id.family()), id.description().to_string())).collect()
}

/// The reference suite rendered as markdown, text, csv or json.
#[pyfunction]
#[pyo3(signature = (format="markdown"))]
fn paper_table(py: Python<'_>, format: &str) -> PyResult<String> {
    let format: Format = format.parse().map_err(err)?;
    py.detach(|| run_suite(&paper_suite(), &ClassifyOptions::default()).and_then(|r| render_table(&r, format))).map_err(err)
}

/// Per-topic values of `measure` for TREC qrels and run texts.
#[pyfunction]
fn ingest_eval(qrels: &str, run: &str, measure: MeasureArg, depth: usize) -> PyResult<Vec<(String, PyValue)>> {
    let m = measure.resolve()?;
    let qrels = parse_qrels(qrels).map_err(err)?;
    let run = parse_run(run).map_err(err)?;
    let conv = to_rankings(&run, &qrels, &default_scheme(&qrels), depth).map_err(err)?;
    conv.topics
        .iter()
        .map(|t| Ok((t.topic.clone(), PyValue(m.eval_ranking(&t.ranking, &t.universe).map_err(err)?))))
        .collect()
}

/// Mean (`"mean"`) or geometric mean (`"gmean"`) with the permissibility note.
#[pyfunction]
fn aggregate(values: Vec<PyValue>, kind: &str) -> PyResult<(PyValue, String)> {
    let kind: AggregateKind = kind.parse().map_err(err)?;
    let values: Vec<_> = values.into_iter().map(|v| v.0).collect();
    let a = measures::aggregate(&values, kind).map_err(err)?;
    Ok((PyValue(a.value), a.warning.to_string()))
}

#[pymodule]
fn metriclass_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("MetriclassError", m.py().get_type::<MetriclassError>())?;
    m.add_class::<PyValue>()?;
    m.add_class::<PyMeasure>()?;
    m.add_class::<PyDomain>()?;
    m.add_class::<PyVerdict>()?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(list_measures, m)?)?;
    m.add_function(wrap_pyfunction!(paper_table, m)?)?;
    m.add_function(wrap_pyfunction!(ingest_eval, m)?)?;
    m.add_function(wrap_pyfunction!(aggregate, m)?)?;
    Ok(())
}
