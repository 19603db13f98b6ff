//! Left-continuity of `ϑ ↦ Φ_ϑ(f)`: thresholds `ϑ_n = ϑ₀(1 - 2^{-n})`
//! approach `ϑ₀` from below, with a control ladder `ϑ₀(1 + 2^{-n})` from
//! above that exposes the right discontinuity.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::sampler::{sod_sample, Threshold};
use crate::signal::Signal;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeStep {
    pub n: usize,
    pub theta: f64,
    pub count: usize,
    pub times: Vec<f64>,
    /// `max_k |t_k(ϑ_n) - t_k(ϑ₀)|` over the shared prefix.
    pub max_time_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuityReport {
    pub theta0: f64,
    pub baseline_times: Vec<f64>,
    pub baseline_count: usize,
    pub from_below: Vec<ProbeStep>,
    pub from_above: Vec<ProbeStep>,
    /// Every shared event index has `t_k(ϑ_n) <= t_k(ϑ_{n+1})`.
    pub times_monotone: bool,
    /// Every shared event index has `t_k(ϑ_n) <= t_k(ϑ₀)`.
    pub approach_from_below: bool,
    /// First `N` after which the count equals the baseline count.
    pub stabilized_at: Option<usize>,
    /// Baseline count minus the count at the closest threshold above.
    pub count_drop_above: i64,
    /// Shared-prefix time gap at the last step below.
    pub final_gap: f64,
}

fn gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

fn ladder(f: &Signal, theta0: f64, baseline: &[f64], n_steps: usize, sign: f64) -> Result<Vec<ProbeStep>> {
    (1..=n_steps)
        .map(|n| {
            let theta = theta0 * (1.0 + sign * 2f64.powi(-(n as i32)));
            let times = sod_sample(f, Threshold::new(theta)?).times();
            Ok(ProbeStep {
                n,
                theta,
                count: times.len(),
                max_time_gap: gap(&times, baseline),
                times,
            })
        })
        .collect()
}

pub fn left_continuity_probe(f: &Signal, theta0: Threshold, n_steps: usize) -> Result<ContinuityReport> {
    if n_steps < 1 {
        return domain("probe needs at least one step");
    }
    let t0 = theta0.value();
    let baseline = sod_sample(f, theta0).times();
    let below = ladder(f, t0, &baseline, n_steps, -1.0)?;
    let above = ladder(f, t0, &baseline, n_steps, 1.0)?;

    let times_monotone = below
        .windows(2)
        .all(|w| w[0].times.iter().zip(&w[1].times).all(|(a, b)| a <= b));
    let approach_from_below = below
        .iter()
        .all(|s| s.times.iter().zip(&baseline).all(|(a, b)| a <= b));
    let stabilized_at = below
        .iter()
        .rposition(|s| s.count != baseline.len())
        .map_or(Some(1), |i| (i + 1 < below.len()).then_some(i + 2));
    Ok(ContinuityReport {
        theta0: t0,
        baseline_count: baseline.len(),
        count_drop_above: baseline.len() as i64 - above.last().map_or(0, |s| s.count as i64),
        final_gap: below.last().map_or(0.0, |s| s.max_time_gap),
        baseline_times: baseline,
        from_below: below,
        from_above: above,
        times_monotone,
        approach_from_below,
        stabilized_at,
    })
}
