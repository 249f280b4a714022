//! Python bindings. Structured results come back as plain dicts and lists
//! decoded from the same JSON the command line writes.
// pyo3 0.22 macro expansions trip this lint on every `PyResult` return
#![allow(clippy::useless_conversion)]

use airdrop_forge_core::detectors::{detect_group, DetectorConfig, DEFAULT_TIMELINE_BUCKET};
use airdrop_forge_core::ledger::{
    parse_groups, parse_prices_csv, parse_transactions_csv, parse_transactions_jsonl,
    write_groups, write_prices_csv, write_transactions, AttackerGroup, LedgerFormat,
};
use airdrop_forge_core::mechanism::{
    end_to_end_solve, optimal_self_report_ratio, verify_mechanism, MechanismInput,
    OrganizerParams,
};
use airdrop_forge_core::profit::{compute_reward as reward, group_profit_report, RewardParams};
use airdrop_forge_core::synth::{generate as synth_generate, SynthSpec};
use airdrop_forge_core::Decimal;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;

create_exception!(airdrop_forge, AirdropForgeError, PyValueError);

fn fail(e: impl std::fmt::Display) -> PyErr {
    AirdropForgeError::new_err(e.to_string())
}

fn from_json<T: DeserializeOwned>(text: &str) -> PyResult<T> {
    serde_json::from_str(text).map_err(fail)
}

fn optional<T: DeserializeOwned + Default>(text: Option<&str>) -> PyResult<T> {
    text.map_or_else(|| Ok(T::default()), from_json)
}

/// Converts via JSON so Python sees the documented output schema.
fn to_py<T: Serialize>(py: Python<'_>, value: &T) -> PyResult<PyObject> {
    let text = serde_json::to_string(value).map_err(fail)?;
    Ok(py.import_bound("json")?.call_method1("loads", (text,))?.unbind())
}

/// An immutable, validated transaction ledger.
#[pyclass(frozen, module = "airdrop_forge")]
struct Ledger {
    inner: airdrop_forge_core::ledger::Ledger,
}

#[pymethods]
impl Ledger {
    #[staticmethod]
    fn from_csv(text: &str) -> PyResult<Self> {
        parse_transactions_csv(text).map(|inner| Self { inner }).map_err(fail)
    }

    #[staticmethod]
    fn from_jsonl(text: &str) -> PyResult<Self> {
        parse_transactions_jsonl(text).map(|inner| Self { inner }).map_err(fail)
    }

    fn to_csv(&self) -> PyResult<String> {
        let mut buf = Vec::new();
        write_transactions(&self.inner, LedgerFormat::Csv, &mut buf).map_err(fail)?;
        String::from_utf8(buf).map_err(fail)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Ledger({} transactions)", self.inner.len())
    }

    /// One detection report per group in `groups_json`.
    #[pyo3(signature = (groups_json, config_json=None, timeline_bucket=DEFAULT_TIMELINE_BUCKET))]
    fn detect(
        &self,
        py: Python<'_>,
        groups_json: &str,
        config_json: Option<&str>,
        timeline_bucket: i64,
    ) -> PyResult<PyObject> {
        let groups = parse_groups(groups_json).map_err(fail)?;
        let cfg: DetectorConfig = optional(config_json)?;
        let reports = py.allow_threads(|| {
            groups
                .iter()
                .map(|g| detect_group(&self.inner, g, &cfg, timeline_bucket))
                .collect::<Result<Vec<_>, _>>()
        });
        to_py(py, &reports.map_err(fail)?)
    }

    /// One profit report per group in `groups_json`.
    #[pyo3(signature = (groups_json, prices_csv, params_json=None))]
    fn profit(
        &self,
        py: Python<'_>,
        groups_json: &str,
        prices_csv: &str,
        params_json: Option<&str>,
    ) -> PyResult<PyObject> {
        let groups: Vec<AttackerGroup> = parse_groups(groups_json).map_err(fail)?;
        let prices = parse_prices_csv(prices_csv).map_err(fail)?;
        let params: RewardParams = optional(params_json)?;
        let reports = groups
            .iter()
            .map(|g| group_profit_report(&self.inner, g, &params, &prices))
            .collect::<Result<Vec<_>, _>>()
            .map_err(fail)?;
        to_py(py, &reports)
    }
}

/// Per-address reward for an early-bird multiplier and volume band.
#[pyfunction]
#[pyo3(signature = (early_multiplier, volume_band, params_json=None))]
fn compute_reward(early_multiplier: &str, volume_band: u8, params_json: Option<&str>) -> PyResult<String> {
    let early: Decimal = early_multiplier.parse().map_err(fail)?;
    let params: RewardParams = optional(params_json)?;
    Ok(reward(early, volume_band, &params).to_string())
}

/// Closed-form organizer self-report ratio, clamped to the unit interval.
#[pyfunction]
fn self_report_ratio(params_json: &str, mean_reward: f64) -> PyResult<f64> {
    let params: OrganizerParams = from_json(params_json)?;
    optimal_self_report_ratio(&params, mean_reward).map(|r| r.value).map_err(fail)
}

/// Full mechanism solution for a parameter object.
#[pyfunction]
fn solve(py: Python<'_>, params_json: &str) -> PyResult<PyObject> {
    let input: MechanismInput = from_json(params_json)?;
    to_py(py, &end_to_end_solve(&input).map_err(fail)?)
}

/// Oracle cross-checks of the mechanism solution.
#[pyfunction]
fn verify(py: Python<'_>, params_json: &str) -> PyResult<PyObject> {
    let input: MechanismInput = from_json(params_json)?;
    to_py(py, &verify_mechanism(&input).map_err(fail)?)
}

/// Synthetic ledger with planted patterns. Returns the ledger as a `Ledger`
/// alongside groups, prices and ground truth.
#[pyfunction]
#[pyo3(signature = (spec_json=None, seed=None))]
fn generate(py: Python<'_>, spec_json: Option<&str>, seed: Option<u64>) -> PyResult<PyObject> {
    let mut spec: SynthSpec = optional(spec_json)?;
    if let Some(seed) = seed {
        spec.seed = seed;
    }
    let out = synth_generate(&spec).map_err(fail)?;
    let dict = pyo3::types::PyDict::new_bound(py);
    dict.set_item("groups_json", write_groups(&out.groups))?;
    dict.set_item("prices_csv", write_prices_csv(&out.prices).map_err(fail)?)?;
    dict.set_item("truth", to_py(py, &out.truth)?)?;
    dict.set_item("metadata", to_py(py, &out.metadata)?)?;
    dict.set_item("ledger", Py::new(py, Ledger { inner: out.ledger })?)?;
    Ok(dict.into_any().unbind())
}

#[pymodule]
fn airdrop_forge(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("AirdropForgeError", m.py().get_type_bound::<AirdropForgeError>())?;
    m.add_class::<Ledger>()?;
    m.add_function(wrap_pyfunction!(compute_reward, m)?)?;
    m.add_function(wrap_pyfunction!(self_report_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
