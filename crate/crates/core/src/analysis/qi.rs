//! Quasi-isometry checks for `Φ_ϑ` between the diameter norm on signals
//! and an event-sequence norm.
//!
//! For the discrepancy norm every pair must satisfy
//! `‖f-g‖_⌀ - 4ϑ <= ‖Φ_ϑ f - Φ_ϑ g‖_D <= ‖f-g‖_⌀ + 2ϑ`; for the Alexiewicz
//! norm the lower side halves: `½‖f-g‖_⌀ - 2ϑ`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::norms::NormKind;
use crate::sampler::{reconstruct, sod_sample, Threshold};
use crate::signal::Signal;

/// Absolute slack granted to each side of the sandwich.
pub const SLACK: f64 = 1e-9;

/// `(lower, upper)` bounds on `‖Φf - Φg‖` given `‖f-g‖_⌀`, if known.
pub fn sandwich(norm: NormKind, diam: f64, theta: f64) -> Option<(f64, f64)> {
    match norm {
        NormKind::Discrepancy => Some((diam - 4.0 * theta, diam + 2.0 * theta)),
        NormKind::Alexiewicz => Some((0.5 * diam - 2.0 * theta, diam + 2.0 * theta)),
        NormKind::MaxMaxSum => None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QiRow {
    pub trial: usize,
    pub theta: f64,
    /// `‖f - g‖_⌀`.
    pub diam: f64,
    /// `‖Φ_ϑ f - Φ_ϑ g‖`.
    pub dist: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub violated: bool,
    /// `Φ_ϑ(reconstruct(Φ_ϑ f)) = Φ_ϑ f` and likewise for `g`.
    pub roundtrip_exact: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaugePoint {
    pub diam: f64,
    /// Lower envelope `ρ₁`: least distance among pairs at least this far apart.
    pub rho1: f64,
    /// Upper envelope `ρ₂`: largest distance among pairs at most this far apart.
    pub rho2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QiReport {
    pub norm: NormKind,
    pub theta: f64,
    pub trials: usize,
    /// Sandwich violations; `None` when no bound is known for the norm.
    pub violations: Option<usize>,
    /// Largest `lower - dist` and `dist - upper` seen (negative is safe).
    pub worst_lower_excess: Option<f64>,
    pub worst_upper_excess: Option<f64>,
    /// `(A, B)` minimizing `A + B` subject to
    /// `diam/A - B <= dist <= A·diam + B`, `A >= 1`, `B >= 0`.
    pub fit_a: f64,
    pub fit_b: f64,
    /// Smallest `B` with `A = 1`.
    pub b_at_a1: f64,
    /// Coarse surjectivity constant certified by exact round trips.
    pub c: Option<f64>,
    pub roundtrip_failures: usize,
    pub gauges: Vec<GaugePoint>,
    pub rows: Vec<QiRow>,
}

/// `B(A) = max(0, max_i diam_i/A - dist_i, max_i dist_i - A·diam_i)`.
fn b_of(rows: &[QiRow], a: f64) -> f64 {
    rows.iter()
        .fold(0.0f64, |b, r| b.max(r.diam / a - r.dist).max(r.dist - a * r.diam))
}

/// Minimizes the convex `A + B(A)` over `A >= 1`.
fn fit(rows: &[QiRow]) -> (f64, f64) {
    let cost = |a: f64| a + b_of(rows, a);
    // coarse geometric grid, then ternary search around the best cell
    let grid: Vec<f64> = (0..=80).map(|k| 2f64.powf(k as f64 / 8.0)).collect();
    let k = (0..grid.len())
        .min_by(|&i, &j| cost(grid[i]).total_cmp(&cost(grid[j])))
        .unwrap();
    let (mut lo, mut hi) = (grid[k.saturating_sub(1)], grid[(k + 1).min(grid.len() - 1)]);
    for _ in 0..200 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if cost(m1) <= cost(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let a = 0.5 * (lo + hi);
    (a, b_of(rows, a))
}

fn gauges(rows: &[QiRow]) -> Vec<GaugePoint> {
    let mut pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.diam, r.dist)).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut suffix_min = vec![f64::INFINITY; pts.len() + 1];
    for i in (0..pts.len()).rev() {
        suffix_min[i] = suffix_min[i + 1].min(pts[i].1);
    }
    let mut run_max = f64::NEG_INFINITY;
    pts.iter()
        .enumerate()
        .map(|(i, &(diam, dist))| {
            run_max = run_max.max(dist);
            GaugePoint { diam, rho1: suffix_min[i], rho2: run_max }
        })
        .collect()
}

fn roundtrip_exact(f: &Signal, theta: Threshold) -> bool {
    let eta = sod_sample(f, theta);
    match reconstruct(&eta) {
        Ok(h) => sod_sample(&h, theta) == eta,
        // an event at t = 0 cannot occur for f(0) = 0, so this is a failure
        Err(_) => false,
    }
}

pub fn qi_verify(corpus: &[(Signal, Signal)], theta: Threshold, norm: NormKind) -> Result<QiReport> {
    if corpus.is_empty() {
        return domain("quasi-isometry check needs a nonempty corpus");
    }
    let th = theta.value();
    let rows: Vec<QiRow> = corpus
        .par_iter()
        .enumerate()
        .map(|(trial, (f, g))| -> Result<QiRow> {
            let diam = f.sub(g)?.diameter_norm();
            let dist = norm.of(&sod_sample(f, theta).difference(&sod_sample(g, theta))?);
            let bounds = sandwich(norm, diam, th);
            let violated = bounds.is_some_and(|(lo, hi)| dist < lo - SLACK || dist > hi + SLACK);
            Ok(QiRow {
                trial,
                theta: th,
                diam,
                dist,
                lower: bounds.map(|b| b.0),
                upper: bounds.map(|b| b.1),
                violated,
                roundtrip_exact: roundtrip_exact(f, theta) && roundtrip_exact(g, theta),
            })
        })
        .collect::<Result<_>>()?;
    let has_bounds = sandwich(norm, 0.0, th).is_some();
    let worst = |sel: fn(&QiRow) -> Option<f64>| {
        has_bounds.then(|| rows.iter().filter_map(sel).fold(f64::NEG_INFINITY, f64::max))
    };
    let (fit_a, fit_b) = fit(&rows);
    let roundtrip_failures = rows.iter().filter(|r| !r.roundtrip_exact).count();
    Ok(QiReport {
        norm,
        theta: th,
        trials: rows.len(),
        violations: has_bounds.then(|| rows.iter().filter(|r| r.violated).count()),
        worst_lower_excess: worst(|r| r.lower.map(|lo| lo - r.dist)),
        worst_upper_excess: worst(|r| r.upper.map(|hi| r.dist - hi)),
        fit_a,
        fit_b,
        b_at_a1: b_of(&rows, 1.0),
        c: (roundtrip_failures == 0).then_some(0.0),
        roundtrip_failures,
        gauges: gauges(&rows),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticRow {
    pub theta: f64,
    pub diam: f64,
    pub dist: f64,
    /// `|dist - diam|`.
    pub gap: f64,
    pub ratio: f64,
    pub within_4theta: bool,
}

/// Rescales both signals so that `‖f - g‖_⌀ = 1`.
pub fn normalize_pair(f: &Signal, g: &Signal) -> Result<(Signal, Signal)> {
    let d = f.sub(g)?.diameter_norm();
    if d == 0.0 {
        return domain("signals coincide up to a constant; cannot normalize");
    }
    Ok((f.scale(1.0 / d), g.scale(1.0 / d)))
}

/// `|‖Φf - Φg‖_D - ‖f-g‖_⌀|` along a threshold ladder.
pub fn asymptotic_table(f: &Signal, g: &Signal, thetas: &[f64], norm: NormKind) -> Result<Vec<AsymptoticRow>> {
    let diam = f.sub(g)?.diameter_norm();
    thetas
        .iter()
        .map(|&theta| {
            let th = Threshold::new(theta)?;
            let dist = norm.of(&sod_sample(f, th).difference(&sod_sample(g, th))?);
            let gap = (dist - diam).abs();
            Ok(AsymptoticRow {
                theta,
                diam,
                dist,
                gap,
                ratio: dist / diam,
                within_4theta: gap <= 4.0 * theta + SLACK,
            })
        })
        .collect()
}
