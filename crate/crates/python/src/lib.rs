//! Python bindings. Structured reports are returned as JSON strings.

use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

use sodmetric_core::analysis::{self, emdm, families, qi, CertifyConfig, EventMetric};
use sodmetric_core::signal::Current;
use sodmetric_core::spike_metrics::{
    self, SchreiberKernel, SchreiberParams, SimilarityToDistance, VanRossumParams, VictorPurpuraParams,
    VpSignMode,
};
use sodmetric_core::{io, norms, sampler, structure, Error, NormKind, Threshold};

fn err(e: Error) -> PyErr {
    match e {
        Error::Io(e) => PyOSError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn json<T: Serialize>(value: &T) -> PyResult<String> {
    serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn threshold(theta: f64) -> PyResult<Threshold> {
    Threshold::new(theta).map_err(err)
}

fn norm_kind(kind: &str) -> PyResult<NormKind> {
    kind.parse().map_err(err)
}

/// Piecewise-polynomial signal with `f(0) = 0` on `[0, T]`.
#[pyclass(name = "Signal", frozen, skip_from_py_object, module = "sodmetric")]
#[derive(Clone)]
pub struct PySignal(sodmetric_core::Signal);

#[pymethods]
impl PySignal {
    /// Piecewise-linear interpolant through `(0, 0)` and `points`.
    #[staticmethod]
    fn from_points(horizon: f64, points: Vec<(f64, f64)>) -> PyResult<Self> {
        sodmetric_core::Signal::from_points(horizon, &points).map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text).map(Self).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[staticmethod]
    fn local_max(height: f64) -> PyResult<Self> {
        sodmetric_core::Signal::local_max(height).map(Self).map_err(err)
    }

    #[staticmethod]
    fn ramp_plateau(horizon: f64) -> PyResult<Self> {
        sodmetric_core::Signal::ramp_plateau(horizon).map(Self).map_err(err)
    }

    #[staticmethod]
    fn random_walk(horizon: f64, seed: u64, n_breaks: usize, amplitude: f64) -> PyResult<Self> {
        sodmetric_core::Signal::random_walk(horizon, seed, n_breaks, amplitude).map(Self).map_err(err)
    }

    fn to_json(&self) -> PyResult<String> {
        json(&self.0)
    }

    #[getter]
    fn horizon(&self) -> f64 {
        self.0.horizon()
    }

    fn evaluate(&self, t: f64) -> PyResult<f64> {
        self.0.evaluate(t).map_err(err)
    }

    fn diameter_norm(&self) -> f64 {
        self.0.diameter_norm()
    }

    fn sup_norm(&self) -> f64 {
        self.0.sup_norm()
    }

    fn __sub__(&self, other: &PySignal) -> PyResult<Self> {
        self.0.sub(&other.0).map(Self).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Signal(T={}, segments={})", self.0.horizon(), self.0.segments().len())
    }
}

/// Finite sequence of signed events on `[0, T]`.
#[pyclass(name = "EventSequence", frozen, eq, skip_from_py_object, module = "sodmetric")]
#[derive(Clone, PartialEq)]
pub struct PyEvents(sodmetric_core::EventSequence);

#[pymethods]
impl PyEvents {
    #[new]
    fn new(horizon: f64, pairs: Vec<(f64, f64)>) -> PyResult<Self> {
        sodmetric_core::EventSequence::from_pairs(horizon, &pairs).map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_csv(text: &str, horizon: f64) -> PyResult<Self> {
        io::events_from_csv(text, horizon).map(Self).map_err(err)
    }

    fn to_csv(&self) -> String {
        io::events_to_csv(&self.0)
    }

    #[getter]
    fn horizon(&self) -> f64 {
        self.0.horizon()
    }

    fn times(&self) -> Vec<f64> {
        self.0.times()
    }

    fn amplitudes(&self) -> Vec<f64> {
        self.0.amplitudes()
    }

    fn difference(&self, other: &PyEvents) -> PyResult<Self> {
        self.0.difference(&other.0).map(Self).map_err(err)
    }

    fn is_alternating(&self) -> bool {
        self.0.is_alternating()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!("EventSequence(T={}, events={})", self.0.horizon(), self.0.len())
    }
}

#[pyfunction]
fn sod_sample(f: &PySignal, theta: f64) -> PyResult<PyEvents> {
    Ok(PyEvents(sampler::sod_sample(&f.0, threshold(theta)?)))
}

/// `lim_{ε↓0} Φ_{ϑ+ε}(f)` rescaled to amplitude `ϑ`.
#[pyfunction]
fn sod_right_limit(f: &PySignal, theta: f64) -> PyResult<PyEvents> {
    Ok(PyEvents(sampler::sod_right_limit(&f.0, threshold(theta)?)))
}

#[pyfunction]
fn lc_sample(f: &PySignal, theta: f64) -> PyResult<PyEvents> {
    Ok(PyEvents(sampler::lc_sample(&f.0, threshold(theta)?)))
}

/// Integrate-and-fire on a piecewise-linear input current given as signal
/// JSON (the input need not start at zero).
#[pyfunction]
fn if_sample(current_json: &str, theta: f64) -> PyResult<PyEvents> {
    let input: Current = serde_json::from_str(current_json).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(PyEvents(sampler::if_sample(&input, threshold(theta)?)))
}

#[pyfunction]
fn reconstruct(eta: &PyEvents) -> PyResult<PySignal> {
    sampler::reconstruct(&eta.0).map(PySignal).map_err(err)
}

/// `kind` is `D`, `A` or `M`.
#[pyfunction]
#[pyo3(signature = (eta, kind = "D", bruteforce = false))]
fn norm(eta: &PyEvents, kind: &str, bruteforce: bool) -> PyResult<f64> {
    let kind = norm_kind(kind)?;
    if bruteforce {
        if kind != NormKind::Discrepancy {
            return Err(PyValueError::new_err("bruteforce applies to D only"));
        }
        return norms::discrepancy_bruteforce(&eta.0.amplitudes()).map_err(err);
    }
    Ok(kind.of(&eta.0))
}

#[pyfunction]
fn van_rossum(a: &PyEvents, b: &PyEvents, alpha: f64) -> PyResult<f64> {
    spike_metrics::van_rossum(&a.0, &b.0, VanRossumParams::new(alpha).map_err(err)?).map_err(err)
}

/// `mode` is `separate` (each sign its own train) or `combined`.
#[pyfunction]
#[pyo3(signature = (a, b, s, mode = "separate"))]
fn victor_purpura(a: &PyEvents, b: &PyEvents, s: f64, mode: &str) -> PyResult<f64> {
    let mode = match mode {
        "separate" => VpSignMode::Separate,
        "combined" => VpSignMode::Combined,
        other => return Err(PyValueError::new_err(format!("unknown mode '{other}'"))),
    };
    spike_metrics::victor_purpura(&a.0, &b.0, VictorPurpuraParams::new(s, mode).map_err(err)?).map_err(err)
}

fn schreiber_params(sigma: Option<f64>, alpha: Option<f64>) -> PyResult<SchreiberParams> {
    let kernel = match (sigma, alpha) {
        (Some(sigma), None) => SchreiberKernel::Gaussian { sigma },
        (None, Some(alpha)) => SchreiberKernel::CausalExponential { alpha },
        _ => return Err(PyValueError::new_err("pass exactly one of sigma or alpha")),
    };
    SchreiberParams::new(kernel, SimilarityToDistance::OneMinusS).map_err(err)
}

/// Gaussian kernel with `sigma`, or causal exponential with `alpha`.
#[pyfunction]
#[pyo3(signature = (a, b, sigma = None, alpha = None))]
fn schreiber_similarity(a: &PyEvents, b: &PyEvents, sigma: Option<f64>, alpha: Option<f64>) -> PyResult<f64> {
    spike_metrics::schreiber_similarity(&a.0, &b.0, schreiber_params(sigma, alpha)?).map_err(err)
}

/// `{"intervals": [...], "discrepancy": r}`.
#[pyfunction]
fn mmd_intervals(eta: &PyEvents) -> PyResult<String> {
    json(&structure::mmd_intervals(&eta.0).map_err(err)?)
}

#[pyfunction]
fn chain_decompose(eta: &PyEvents) -> PyResult<String> {
    json(&structure::chain_decompose(&eta.0).map_err(err)?)
}

#[pyfunction]
fn pi_map(eta: &PyEvents) -> PyResult<String> {
    json(&structure::pi_map(&eta.0).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (trials = 1000, theta = 0.1, norm = "D", seed = 0))]
fn qi_check(trials: usize, theta: f64, norm: &str, seed: u64) -> PyResult<String> {
    let corpus = families::signal_pair_corpus(seed, trials, 1.0, 12, 1.0).map_err(err)?;
    json(&qi::qi_verify(&corpus, threshold(theta)?, norm_kind(norm)?).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (norm = "D", sizes = vec![8, 16, 32, 64, 128], random_per_size = 4, seed = 0))]
fn certify(norm: &str, sizes: Vec<usize>, random_per_size: usize, seed: u64) -> PyResult<String> {
    let config = CertifyConfig { sizes, random_per_size, seed };
    json(&analysis::certify_norm(norm_kind(norm)?, &config).map_err(err)?)
}

/// `metric` is `D`, `A`, `M`, `vr` or `vp`; `rate` is `α` or `s`.
#[pyfunction]
#[pyo3(signature = (f, metric, thetas, rate = 1.0))]
fn emdm_sweep(f: &PySignal, metric: &str, thetas: Vec<f64>, rate: f64) -> PyResult<String> {
    let metric = EventMetric::parse(metric, rate).map_err(err)?;
    json(&emdm::emdm_sweep(&f.0, metric, &thetas, &emdm::default_eps_grid()).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (f, theta0, steps = 30))]
fn probe_continuity(f: &PySignal, theta0: f64, steps: usize) -> PyResult<String> {
    json(&analysis::left_continuity_probe(&f.0, threshold(theta0)?, steps).map_err(err)?)
}

#[pymodule]
fn sodmetric(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySignal>()?;
    m.add_class::<PyEvents>()?;
    m.add_function(wrap_pyfunction!(sod_sample, m)?)?;
    m.add_function(wrap_pyfunction!(sod_right_limit, m)?)?;
    m.add_function(wrap_pyfunction!(lc_sample, m)?)?;
    m.add_function(wrap_pyfunction!(if_sample, m)?)?;
    m.add_function(wrap_pyfunction!(reconstruct, m)?)?;
    m.add_function(wrap_pyfunction!(norm, m)?)?;
    m.add_function(wrap_pyfunction!(van_rossum, m)?)?;
    m.add_function(wrap_pyfunction!(victor_purpura, m)?)?;
    m.add_function(wrap_pyfunction!(schreiber_similarity, m)?)?;
    m.add_function(wrap_pyfunction!(mmd_intervals, m)?)?;
    m.add_function(wrap_pyfunction!(chain_decompose, m)?)?;
    m.add_function(wrap_pyfunction!(pi_map, m)?)?;
    m.add_function(wrap_pyfunction!(qi_check, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(emdm_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(probe_continuity, m)?)?;
    Ok(())
}
