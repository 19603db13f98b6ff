//! Event metric discontinuity measure: per-signal sweeps `Λ_f` and the
//! characterization over the unit sphere of the discrepancy norm.
//!
//! `Φ_ϑ(f)` is piecewise constant in `ϑ` only up to event times, so the
//! limit `ε ↓ 0` of `(1/(ϑ+ε)) Φ_{ϑ+ε}(f)` is taken exactly with the
//! strict-crossing sampler. The finite `ε` grid is still evaluated to show
//! how the sequences approach that limit.

use serde::{Deserialize, Serialize};

use super::{families, normalized, EventMetric};
use crate::error::{domain, Result};
use crate::events::EventSequence;
use crate::norms::NormKind;
use crate::sampler::{sod_right_limit, sod_sample, Threshold};
use crate::signal::Signal;
use crate::spike_metrics::{schreiber_distance, schreiber_similarity, SchreiberParams};

/// `10^{-1}, ..., 10^{-6}`, relative to `ϑ`.
pub fn default_eps_grid() -> Vec<f64> {
    (1..=6).map(|k| 10f64.powi(-k)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonPoint {
    /// Absolute threshold increment.
    pub eps: f64,
    pub count: usize,
    /// `d((1/ϑ)Φ_ϑ f, (1/(ϑ+ε))Φ_{ϑ+ε} f)`.
    pub value: f64,
    /// Same sign pattern as the exact limit.
    pub matches_limit_pattern: bool,
    /// `max_k |t_k(ϑ+ε) - t_k^+|` when the patterns match.
    pub time_gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaRow {
    pub theta: f64,
    pub count: usize,
    pub limit_count: usize,
    /// `d((1/ϑ)Φ_ϑ f, lim_{ε↓0} (1/(ϑ+ε))Φ_{ϑ+ε} f)`.
    pub limit_value: f64,
    pub series: Vec<EpsilonPoint>,
    /// The two finest grid points share the limit's sign pattern.
    pub stabilized: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmdmSweep {
    pub metric: EventMetric,
    /// `Λ_f = max_ϑ limit_value`.
    pub lambda: f64,
    pub argmax_theta: f64,
    pub rows: Vec<ThetaRow>,
}

fn pattern(eta: &EventSequence) -> Vec<bool> {
    eta.events().iter().map(|e| e.v > 0.0).collect()
}

fn check_grid(name: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() || grid.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return domain(format!("{name} grid must be nonempty, finite and positive"));
    }
    Ok(())
}

/// Sweeps `ϑ` over `theta_grid`; `eps_rel` holds increments relative to `ϑ`
/// and must be descending.
pub fn emdm_sweep(
    f: &Signal,
    metric: EventMetric,
    theta_grid: &[f64],
    eps_rel: &[f64],
) -> Result<EmdmSweep> {
    check_grid("theta", theta_grid)?;
    check_grid("epsilon", eps_rel)?;
    if eps_rel.windows(2).any(|w| w[1] >= w[0]) {
        return domain("epsilon grid must be strictly descending");
    }
    let mut rows = Vec::with_capacity(theta_grid.len());
    for &theta in theta_grid {
        let th = Threshold::new(theta)?;
        let eta = normalized(&sod_sample(f, th), theta);
        let limit = normalized(&sod_right_limit(f, th), theta);
        let limit_pattern = pattern(&limit);
        let mut series = Vec::with_capacity(eps_rel.len());
        for &r in eps_rel {
            let eps = r * theta;
            let shifted = normalized(&sod_sample(f, Threshold::new(theta + eps)?), theta + eps);
            let matches = pattern(&shifted) == limit_pattern;
            let time_gap = matches.then(|| {
                shifted
                    .times()
                    .iter()
                    .zip(limit.times())
                    .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
            });
            series.push(EpsilonPoint {
                eps,
                count: shifted.len(),
                value: metric.distance(&eta, &shifted)?,
                matches_limit_pattern: matches,
                time_gap,
            });
        }
        let stabilized = series.len() >= 2
            && series[series.len() - 2..].iter().all(|p| p.matches_limit_pattern);
        rows.push(ThetaRow {
            theta,
            count: eta.len(),
            limit_count: limit.len(),
            limit_value: metric.distance(&eta, &limit)?,
            series,
            stabilized,
        });
    }
    let best = rows
        .iter()
        .fold(&rows[0], |b, r| if r.limit_value > b.limit_value { r } else { b });
    Ok(EmdmSweep {
        metric,
        lambda: best.limit_value,
        argmax_theta: best.theta,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub horizon: f64,
    pub spacing: f64,
    /// Train length attaining `value`.
    pub n_best: usize,
    /// `sup_n d(η_n, 0)` over alternating trains `η_n` at `t_k = kΔ`.
    pub value: f64,
    /// Known lower bound for this `(T, Δ)`, if any.
    pub lower_bound: Option<f64>,
    pub upper_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Characterization {
    pub metric: EventMetric,
    /// `sup d(η, 0)` over alternating unit sequences, i.e. over the unit
    /// sphere of the discrepancy norm.
    pub value: f64,
    pub witness_n: usize,
    pub growth: Vec<GrowthRow>,
}

/// `κ_{α,Δ} = e^{-2αΔ}(1 - e^{-αΔ})^2` for `α > 0`, `1/2` for `α = 0`.
pub fn van_rossum_kappa(alpha: f64, spacing: f64) -> f64 {
    if alpha == 0.0 {
        return 0.5;
    }
    let q = (-alpha * spacing).exp();
    q * q * (1.0 - q).powi(2)
}

/// Characterization of the right-limit discrepancy. For norms the value is the supremum
/// over alternating sequences of length `1..=n_max`. For time-sensitive
/// metrics a growth table over `(T, Δ)` is produced from trains
/// `t_k = kΔ`, `n <= min(n_max, T/Δ)`, and the value is its maximum.
pub fn emdm_characterize(
    metric: EventMetric,
    n_max: usize,
    horizons: &[f64],
    spacings: &[f64],
) -> Result<Characterization> {
    if n_max < 1 {
        return domain("n_max must be at least 1");
    }
    if let EventMetric::Norm { norm } = metric {
        let mut best = (0.0f64, 0usize);
        for n in 1..=n_max {
            for start in [true, false] {
                let v = norm.of(&families::alternating(n, start));
                if v > best.0 {
                    best = (v, n);
                }
            }
        }
        return Ok(Characterization { metric, value: best.0, witness_n: best.1, growth: Vec::new() });
    }
    check_grid("horizon", horizons)?;
    check_grid("spacing", spacings)?;
    let mut growth = Vec::new();
    for &horizon in horizons {
        let zero = EventSequence::empty(horizon)?;
        for &spacing in spacings {
            let cap = ((horizon / spacing) * (1.0 + 1e-12)).floor() as usize;
            let cap = cap.min(n_max);
            if cap == 0 {
                continue;
            }
            let mut best = (f64::NEG_INFINITY, 0usize);
            for n in 1..=cap {
                let train = families::alternating_train(n, spacing, horizon, true)?;
                let v = metric.distance(&train, &zero)?;
                if v > best.0 {
                    best = (v, n);
                }
            }
            let (lower_bound, upper_bound) = match metric {
                EventMetric::VanRossum { alpha } => {
                    (Some(van_rossum_kappa(alpha, spacing) * horizon), Some(horizon))
                }
                EventMetric::VictorPurpura { s, .. } => (
                    Some(((cap as f64) - 1.0).min(s * (horizon / 2.0 - 2.0 * spacing)).max(0.0)),
                    None,
                ),
                EventMetric::Norm { .. } => (None, None),
            };
            growth.push(GrowthRow {
                horizon,
                spacing,
                n_best: best.1,
                value: best.0,
                lower_bound,
                upper_bound,
            });
        }
    }
    let top = growth
        .iter()
        .fold(None::<&GrowthRow>, |b, r| match b {
            Some(x) if x.value >= r.value => Some(x),
            _ => Some(r),
        })
        .ok_or_else(|| crate::error::Error::Domain("no train fits any (T, Δ)".into()))?;
    Ok(Characterization {
        metric,
        value: top.value,
        witness_n: top.n_best,
        growth,
    })
}

/// Convenience: `emdm_characterize` for a norm.
pub fn norm_characterization(norm: NormKind, n_max: usize) -> f64 {
    emdm_characterize(norm.into(), n_max, &[], &[])
        .map(|c| c.value)
        .unwrap_or(0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalSweep {
    pub name: String,
    pub sweep: EmdmSweep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmdmReport {
    pub metric: EventMetric,
    pub theta_grid: Vec<f64>,
    pub eps_grid: Vec<f64>,
    pub signals: Vec<SignalSweep>,
    pub characterization: Characterization,
    /// Largest `Λ_f` over the signals.
    pub max_lambda: f64,
    /// `characterization >= max_lambda`; only meaningful for norms, where
    /// the characterization is the supremum over the whole unit sphere.
    pub bound_holds: Option<bool>,
}

/// Per-signal sweeps plus the characterization, for one metric.
pub fn emdm_report(
    signals: &[(String, Signal)],
    metric: EventMetric,
    theta_grid: &[f64],
    eps_rel: &[f64],
    n_max: usize,
    horizons: &[f64],
    spacings: &[f64],
) -> Result<EmdmReport> {
    let signals = signals
        .iter()
        .map(|(name, f)| {
            Ok(SignalSweep { name: name.clone(), sweep: emdm_sweep(f, metric, theta_grid, eps_rel)? })
        })
        .collect::<Result<Vec<_>>>()?;
    let characterization = emdm_characterize(metric, n_max, horizons, spacings)?;
    let max_lambda = signals.iter().map(|s| s.sweep.lambda).fold(0.0, f64::max);
    Ok(EmdmReport {
        metric,
        theta_grid: theta_grid.to_vec(),
        eps_grid: eps_rel.to_vec(),
        bound_holds: (!metric.is_time_sensitive()).then(|| characterization.value >= max_lambda),
        max_lambda,
        characterization,
        signals,
    })
}

/// Two pairs that Schreiber's measure cannot tell apart: a block sign flip
/// `(η1, -η1)` and an alternating flip `(η3, -η3)`. Both have `S = -1`,
/// while their discrepancy distances are `n` and `2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchreiberWitness {
    pub sequences: [EventSequence; 4],
    pub similarity_12: f64,
    pub similarity_34: f64,
    pub distance_12: f64,
    pub distance_34: f64,
    pub discrepancy_12: f64,
    pub discrepancy_34: f64,
}

pub fn schreiber_witness(n: usize, params: SchreiberParams) -> Result<SchreiberWitness> {
    if n < 2 || n % 2 != 0 {
        return domain(format!("witness needs an even n >= 2, got {n}"));
    }
    let seqs = families::schreiber_quadruple(n);
    let d = |a: &EventSequence, b: &EventSequence| -> Result<f64> {
        Ok(NormKind::Discrepancy.of(&a.difference(b)?))
    };
    Ok(SchreiberWitness {
        similarity_12: schreiber_similarity(&seqs[0], &seqs[1], params)?,
        similarity_34: schreiber_similarity(&seqs[2], &seqs[3], params)?,
        distance_12: schreiber_distance(&seqs[0], &seqs[1], params)?,
        distance_34: schreiber_distance(&seqs[2], &seqs[3], params)?,
        discrepancy_12: d(&seqs[0], &seqs[1])?,
        discrepancy_34: d(&seqs[2], &seqs[3])?,
        sequences: seqs,
    })
}
