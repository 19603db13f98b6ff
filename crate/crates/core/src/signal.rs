//! Continuous piecewise-polynomial signals of degree at most two on `[0, T]`
//! with `f(0) = 0`.
//!
//! A segment starting at `t` holds `f(s) = c0 + c1 (s - t) + c2 (s - t)^2`
//! until the next segment starts. The value at a breakpoint is, by
//! convention, the `c0` of the segment starting there; the sampler relies on
//! this to hit levels that sit exactly on a breakpoint. A zero-length final
//! segment starting at `T` is allowed and pins the value at the horizon.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Absolute tolerance for structural comparisons (continuity, `f(0) = 0`),
/// scaled by `max(1, |value|)`.
pub const STRUCTURAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub t: f64,
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
}

impl Segment {
    pub fn new(t: f64, c0: f64, c1: f64, c2: f64) -> Self {
        Self { t, c0, c1, c2 }
    }

    pub fn linear(t: f64, c0: f64, c1: f64) -> Self {
        Self::new(t, c0, c1, 0.0)
    }

    /// Value at local offset `tau = s - t`.
    #[inline]
    pub fn eval_local(&self, tau: f64) -> f64 {
        self.c0 + tau * (self.c1 + tau * self.c2)
    }

    pub fn degree(&self) -> usize {
        if self.c2 != 0.0 {
            2
        } else if self.c1 != 0.0 {
            1
        } else {
            0
        }
    }

    /// The same polynomial expanded around `s` instead of `self.t`.
    fn recentered(&self, s: f64) -> Segment {
        let d = s - self.t;
        Segment {
            t: s,
            c0: self.eval_local(d),
            c1: self.c1 + 2.0 * self.c2 * d,
            c2: self.c2,
        }
    }
}

/// An element of the input space: continuous, piecewise quadratic, zero at 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Signal {
    #[serde(rename = "T")]
    horizon: f64,
    segments: Vec<Segment>,
}

#[derive(Deserialize)]
struct RawSignal {
    #[serde(rename = "T")]
    horizon: f64,
    segments: Vec<Segment>,
}

impl<'de> Deserialize<'de> for Signal {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawSignal::deserialize(d)?;
        Signal::new(raw.horizon, raw.segments).map_err(serde::de::Error::custom)
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= STRUCTURAL_TOL * 1f64.max(a.abs()).max(b.abs())
}

fn validate(horizon: f64, segments: &mut [Segment], anchored: bool) -> Result<()> {
    if !(horizon.is_finite() && horizon > 0.0) {
        return domain(format!("horizon must be finite and positive, got {horizon}"));
    }
    let Some(first) = segments.first_mut() else {
        return domain("signal needs at least one segment");
    };
    if first.t != 0.0 {
        return domain(format!("first segment must start at 0, got {}", first.t));
    }
    if anchored {
        if first.c0.abs() > STRUCTURAL_TOL {
            return domain(format!("f(0) must be 0, got {}", first.c0));
        }
        first.c0 = 0.0;
    }
    for (i, s) in segments.iter().enumerate() {
        if ![s.t, s.c0, s.c1, s.c2].iter().all(|x| x.is_finite()) {
            return domain(format!("segment {i} has a non-finite field"));
        }
        if s.t > horizon {
            return domain(format!("segment {i} starts at {} beyond horizon {horizon}", s.t));
        }
    }
    for (i, w) in segments.windows(2).enumerate() {
        if w[1].t <= w[0].t {
            return domain(format!("segment starts not strictly increasing at index {}", i + 1));
        }
        let left = w[0].eval_local(w[1].t - w[0].t);
        if !close(left, w[1].c0) {
            return domain(format!(
                "discontinuity at t={}: left limit {left}, right value {}",
                w[1].t, w[1].c0
            ));
        }
    }
    Ok(())
}

/// Continuous piecewise-linear drive for integrate-and-fire. Unlike a
/// [`Signal`] it need not vanish at `t = 0`; only its integral does.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Current {
    #[serde(rename = "T")]
    horizon: f64,
    segments: Vec<Segment>,
}

impl Current {
    pub fn new(horizon: f64, mut segments: Vec<Segment>) -> Result<Self> {
        validate(horizon, &mut segments, false)?;
        if segments.iter().any(|s| s.c2 != 0.0) {
            return Err(Error::Unsupported(
                "integration of quadratic segments would exceed degree 2".into(),
            ));
        }
        Ok(Self { horizon, segments })
    }

    pub fn constant(horizon: f64, level: f64) -> Result<Self> {
        Self::new(horizon, vec![Segment::linear(0.0, level, 0.0)])
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Exact antiderivative `∫_0^t`.
    pub fn integrate(&self) -> Signal {
        integrate_linear(self.horizon, &self.segments)
    }
}

impl<'de> Deserialize<'de> for Current {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawSignal::deserialize(d)?;
        Current::new(raw.horizon, raw.segments).map_err(serde::de::Error::custom)
    }
}

impl From<&Signal> for Current {
    fn from(f: &Signal) -> Self {
        Current { horizon: f.horizon, segments: f.segments.clone() }
    }
}

fn integrate_linear(horizon: f64, segs: &[Segment]) -> Signal {
    let mut acc = 0.0;
    let mut segments = Vec::with_capacity(segs.len());
    for (i, s) in segs.iter().enumerate() {
        segments.push(Segment::new(s.t, acc, s.c0, s.c1 / 2.0));
        let end = segs.get(i + 1).map_or(horizon, |n| n.t);
        let d = end - s.t;
        acc += d * (s.c0 + d * s.c1 / 2.0);
    }
    Signal { horizon, segments }
}

impl Signal {
    /// Validates and builds a signal. A first-segment `c0` within the
    /// structural tolerance of zero is snapped to exactly zero.
    pub fn new(horizon: f64, mut segments: Vec<Segment>) -> Result<Self> {
        validate(horizon, &mut segments, true)?;
        Ok(Self { horizon, segments })
    }

    /// Piecewise-linear interpolant through `(0, 0)` and the given points,
    /// held constant after the last point.
    pub fn from_points(horizon: f64, points: &[(f64, f64)]) -> Result<Self> {
        let mut prev = (0.0, 0.0);
        let mut segments = Vec::with_capacity(points.len() + 1);
        for &(t, y) in points {
            if t <= prev.0 {
                return domain(format!("points must have strictly increasing times (at t={t})"));
            }
            segments.push(Segment::linear(prev.0, prev.1, (y - prev.1) / (t - prev.0)));
            prev = (t, y);
        }
        if prev.0 <= horizon {
            segments.push(Segment::linear(prev.0, prev.1, 0.0));
        }
        if segments.is_empty() {
            segments.push(Segment::linear(0.0, 0.0, 0.0));
        }
        Self::new(horizon, segments)
    }

    pub fn zero(horizon: f64) -> Result<Self> {
        Self::new(horizon, vec![Segment::linear(0.0, 0.0, 0.0)])
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn max_degree(&self) -> usize {
        self.segments.iter().map(Segment::degree).max().unwrap_or(0)
    }

    /// Right end of segment `i`.
    pub fn segment_end(&self, i: usize) -> f64 {
        self.segments.get(i + 1).map_or(self.horizon, |s| s.t)
    }

    /// Canonical value at the right end of segment `i`: the next segment's
    /// `c0`, or the polynomial value at `T` for the last segment.
    pub fn end_value(&self, i: usize) -> f64 {
        match self.segments.get(i + 1) {
            Some(next) => next.c0,
            None => {
                let s = &self.segments[i];
                s.eval_local(self.horizon - s.t)
            }
        }
    }

    /// Index of the segment governing time `t` (the last one starting at or
    /// before `t`).
    pub fn segment_index(&self, t: f64) -> usize {
        self.segments.partition_point(|s| s.t <= t).saturating_sub(1)
    }

    pub fn evaluate(&self, t: f64) -> Result<f64> {
        if !(0.0..=self.horizon).contains(&t) {
            return domain(format!("t={t} outside [0, {}]", self.horizon));
        }
        Ok(self.value_at(t))
    }

    /// Unchecked evaluation; callers guarantee `t` lies in `[0, T]`.
    pub(crate) fn value_at(&self, t: f64) -> f64 {
        let s = &self.segments[self.segment_index(t)];
        s.eval_local(t - s.t)
    }

    pub fn scale(&self, lambda: f64) -> Signal {
        let segments = self
            .segments
            .iter()
            .map(|s| Segment::new(s.t, lambda * s.c0, lambda * s.c1, lambda * s.c2))
            .collect();
        Signal { horizon: self.horizon, segments }
    }

    /// Pointwise sum on the merged breakpoint grid.
    pub fn add(&self, other: &Signal) -> Result<Signal> {
        if self.horizon != other.horizon {
            return domain(format!(
                "horizons differ: {} vs {}",
                self.horizon, other.horizon
            ));
        }
        let mut starts: Vec<f64> = self
            .segments
            .iter()
            .chain(other.segments.iter())
            .map(|s| s.t)
            .collect();
        starts.sort_by(f64::total_cmp);
        starts.dedup();
        let segments = starts
            .into_iter()
            .map(|s| {
                let a = self.segments[self.segment_index(s)].recentered(s);
                let b = other.segments[other.segment_index(s)].recentered(s);
                Segment::new(s, a.c0 + b.c0, a.c1 + b.c1, a.c2 + b.c2)
            })
            .collect();
        Signal::new(self.horizon, segments)
    }

    pub fn sub(&self, other: &Signal) -> Result<Signal> {
        self.add(&other.scale(-1.0))
    }

    /// Exact `(inf, sup)` over `[0, T]` from breakpoint values and interior
    /// vertices of the quadratic pieces.
    pub fn extrema(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut visit = |v: f64| {
            lo = lo.min(v);
            hi = hi.max(v);
        };
        for (i, s) in self.segments.iter().enumerate() {
            visit(s.c0);
            visit(self.end_value(i));
            let len = self.segment_end(i) - s.t;
            if s.c2 != 0.0 {
                let tau = -s.c1 / (2.0 * s.c2);
                if tau > 0.0 && tau < len {
                    visit(s.eval_local(tau));
                }
            }
        }
        (lo, hi)
    }

    /// Diameter of the graph: `|sup f - inf f|`.
    pub fn diameter_norm(&self) -> f64 {
        let (lo, hi) = self.extrema();
        (hi - lo).abs()
    }

    pub fn sup_norm(&self) -> f64 {
        let (lo, hi) = self.extrema();
        lo.abs().max(hi.abs())
    }

    /// Exact antiderivative `g(t) = ∫_0^t f` of a piecewise-linear signal.
    pub fn integrate(&self) -> Result<Signal> {
        if self.max_degree() > 1 {
            return Err(Error::Unsupported(
                "integration of quadratic segments would exceed degree 2".into(),
            ));
        }
        Ok(integrate_linear(self.horizon, &self.segments))
    }

    // ---- generators ----

    /// `min{1/2, t}` on `[0, T]`.
    pub fn ramp_plateau(horizon: f64) -> Result<Self> {
        if horizon <= 0.5 {
            return Self::new(horizon, vec![Segment::linear(0.0, 0.0, 1.0)]);
        }
        Self::new(
            horizon,
            vec![Segment::linear(0.0, 0.0, 1.0), Segment::linear(0.5, 0.5, 0.0)],
        )
    }

    /// Piecewise-linear interpolant of `sin(t)/4` (the curve `(sin t + 1)/4`
    /// shifted to start at zero) with `resolution` breakpoints per period.
    pub fn sine_pwl(horizon: f64, resolution: usize) -> Result<Self> {
        if resolution < 2 {
            return domain(format!("resolution must be >= 2 points per period, got {resolution}"));
        }
        let step = std::f64::consts::TAU / resolution as f64;
        let mut points = Vec::new();
        let mut k = 1usize;
        loop {
            let t = k as f64 * step;
            if t >= horizon {
                break;
            }
            points.push((t, t.sin() / 4.0));
            k += 1;
        }
        points.push((horizon, horizon.sin() / 4.0));
        Self::from_points(horizon, &points)
    }

    /// Seeded piecewise-linear random walk with `n_breaks` interior
    /// breakpoints and increments uniform in `[-amplitude, amplitude]`.
    pub fn random_walk(horizon: f64, seed: u64, n_breaks: usize, amplitude: f64) -> Result<Self> {
        if n_breaks < 1 {
            return domain("random walk needs at least one breakpoint");
        }
        if !(amplitude.is_finite() && amplitude > 0.0) {
            return domain(format!("amplitude must be positive, got {amplitude}"));
        }
        if !(horizon.is_finite() && horizon > 0.0) {
            return domain(format!("horizon must be finite and positive, got {horizon}"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut times: Vec<f64> = (0..n_breaks)
            .map(|_| rng.gen_range(0.0..horizon))
            .filter(|&t| t > 0.0)
            .collect();
        times.sort_by(f64::total_cmp);
        times.dedup();
        times.push(horizon);
        let mut y = 0.0;
        let points: Vec<(f64, f64)> = times
            .into_iter()
            .map(|t| {
                y += rng.gen_range(-amplitude..=amplitude);
                (t, y)
            })
            .collect();
        Self::from_points(horizon, &points)
    }

    /// Sawtooth `0 -> height -> 0` repeated `teeth` times over `[0, T]`.
    /// Each peak touches `height` exactly at a breakpoint.
    pub fn extrema_comb(horizon: f64, teeth: usize, height: f64) -> Result<Self> {
        if teeth == 0 {
            return domain("comb needs at least one tooth");
        }
        let w = horizon / teeth as f64;
        let mut points = Vec::with_capacity(2 * teeth);
        for k in 0..teeth {
            let t0 = k as f64 * w;
            points.push((t0 + 0.5 * w, height));
            let t1 = if k + 1 == teeth { horizon } else { t0 + w };
            points.push((t1, 0.0));
        }
        Self::from_points(horizon, &points)
    }

    /// One local maximum touching `height` at `t = 1`, back to zero at
    /// `t = 2`, flat until `T = 3`.
    pub fn local_max(height: f64) -> Result<Self> {
        Self::from_points(3.0, &[(1.0, height), (2.0, 0.0)])
    }

    /// `0 -> h -> -h -> 0` at `t = 1, 3, 4`: a maximum and a minimum, both
    /// touching `±h` exactly.
    pub fn max_then_min(height: f64) -> Result<Self> {
        Self::from_points(4.0, &[(1.0, height), (3.0, -height), (4.0, 0.0)])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn brute_extrema(f: &Signal, step: f64) -> (f64, f64) {
        let n = (f.horizon() / step).ceil() as usize;
        (0..=n)
            .map(|k| f.evaluate((k as f64 * step).min(f.horizon())).unwrap())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    }

    #[test]
    fn ramp_plateau_values() {
        let f = Signal::ramp_plateau(1.0).unwrap();
        assert_eq!(f.evaluate(0.25).unwrap(), 0.25);
        assert_eq!(f.evaluate(0.0).unwrap(), 0.0);
        assert_eq!(f.evaluate(0.8).unwrap(), 0.5);
        assert_eq!(f.diameter_norm(), 0.5);
        assert_eq!(f.scale(2.0).evaluate(0.5).unwrap(), 1.0);
    }

    #[test]
    fn evaluate_outside_horizon_is_domain_error() {
        let f = Signal::ramp_plateau(1.0).unwrap();
        assert!(matches!(f.evaluate(1.5), Err(Error::Domain(_))));
        assert!(matches!(f.evaluate(-0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn rejects_broken_invariants() {
        assert!(Signal::new(1.0, vec![Segment::linear(0.0, 0.1, 0.0)]).is_err());
        assert!(Signal::new(1.0, vec![Segment::linear(0.1, 0.0, 0.0)]).is_err());
        assert!(Signal::new(
            1.0,
            vec![Segment::linear(0.0, 0.0, 1.0), Segment::linear(0.5, 0.7, 0.0)]
        )
        .is_err());
        assert!(Signal::new(
            1.0,
            vec![Segment::linear(0.0, 0.0, 1.0), Segment::linear(0.0, 0.0, 0.0)]
        )
        .is_err());
        assert!(Signal::new(0.0, vec![Segment::linear(0.0, 0.0, 0.0)]).is_err());
    }

    #[test]
    fn scale_identity_and_cancellation() {
        let f = Signal::random_walk(2.0, 3, 9, 0.4).unwrap();
        assert_eq!(f.scale(1.0), f);
        let z = f.add(&f.scale(-1.0)).unwrap();
        assert!(z.segments().iter().all(|s| s.c0 == 0.0 && s.c1 == 0.0 && s.c2 == 0.0));
        assert_eq!(z.diameter_norm(), 0.0);
    }

    #[test]
    fn add_mismatched_horizons() {
        let f = Signal::zero(1.0).unwrap();
        let g = Signal::zero(2.0).unwrap();
        assert!(matches!(f.add(&g), Err(Error::Domain(_))));
    }

    #[test]
    fn add_merges_grids() {
        let f = Signal::random_walk(1.0, 1, 5, 1.0).unwrap();
        let g = Signal::random_walk(1.0, 2, 7, 1.0).unwrap();
        let h = f.add(&g).unwrap();
        for k in 0..=1000 {
            let t = k as f64 / 1000.0;
            let want = f.evaluate(t).unwrap() + g.evaluate(t).unwrap();
            assert!((h.evaluate(t).unwrap() - want).abs() < 1e-12);
        }
    }

    #[test]
    fn sine_generator_matches_closed_form() {
        let r = 64;
        let f = Signal::sine_pwl(10.0, r).unwrap();
        let h = std::f64::consts::TAU / r as f64;
        let bound = h * h / 32.0 + 1e-12;
        let at = f.evaluate(PI / 2.0).unwrap();
        assert!((at - 0.25).abs() <= bound, "{at}");
        let n = 100_000;
        for k in 0..=n {
            let t = 10.0 * k as f64 / n as f64;
            assert!((f.evaluate(t).unwrap() - t.sin() / 4.0).abs() <= bound);
        }
        assert!(Signal::sine_pwl(1.0, 1).is_err());
    }

    #[test]
    fn random_walk_is_deterministic() {
        let a = Signal::random_walk(5.0, 7, 20, 0.3).unwrap();
        let b = Signal::random_walk(5.0, 7, 20, 0.3).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, Signal::random_walk(5.0, 8, 20, 0.3).unwrap());
        assert!(Signal::random_walk(5.0, 7, 0, 0.3).is_err());
    }

    #[test]
    fn diameter_matches_grid_oracle() {
        for seed in 0..20 {
            let f = Signal::random_walk(1.0, seed, 12, 1.0).unwrap();
            let (lo, hi) = brute_extrema(&f, 1e-4);
            // Breakpoints are not on the grid, so the grid can only undershoot.
            let d = f.diameter_norm();
            assert!(d >= hi - lo - 1e-12);
            // a grid of step h misses a peak by at most slope * h
            let slope = f.segments().iter().fold(0.0f64, |m, s| m.max(s.c1.abs()));
            assert!(d - (hi - lo) <= 2.0 * slope * 1e-4, "seed {seed}: {d} vs {}", hi - lo);
            assert!(d <= 2.0 * f.sup_norm() + 1e-12);
        }
    }

    #[test]
    fn diameter_of_quadratic_uses_vertex() {
        // f(t) = t - t^2 on [0,1]: max 1/4 at t = 1/2.
        let f = Signal::new(1.0, vec![Segment::new(0.0, 0.0, 1.0, -1.0)]).unwrap();
        assert_eq!(f.diameter_norm(), 0.25);
    }

    #[test]
    fn integrate_ramp_and_zero() {
        let f = Signal::from_points(1.0, &[(1.0, 1.0)]).unwrap();
        let g = f.integrate().unwrap();
        assert_eq!(g.evaluate(1.0).unwrap(), 0.5);
        let z = Signal::zero(3.0).unwrap().integrate().unwrap();
        assert_eq!(z.diameter_norm(), 0.0);
        let q = Signal::new(1.0, vec![Segment::new(0.0, 0.0, 0.0, 1.0)]).unwrap();
        assert!(matches!(q.integrate(), Err(Error::Unsupported(_))));
    }

    #[test]
    fn integrate_matches_trapezoid_oracle() {
        let f = Signal::random_walk(3.0, 11, 15, 0.8).unwrap();
        let g = f.integrate().unwrap();
        let mut acc = 0.0;
        for (i, s) in f.segments().iter().enumerate() {
            let end = f.segment_end(i);
            acc += 0.5 * (s.c0 + f.end_value(i)) * (end - s.t);
            assert!((g.evaluate(end).unwrap() - acc).abs() < 1e-12);
        }
        // differentiating back recovers the coefficients
        for (a, b) in f.segments().iter().zip(g.segments()) {
            assert_eq!(b.c1, a.c0);
            assert_eq!(2.0 * b.c2, a.c1);
        }
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let f = Signal::random_walk(2.5, 5, 10, 0.7).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        let g: Signal = serde_json::from_str(&s).unwrap();
        assert_eq!(f, g);
        assert!(serde_json::from_str::<Signal>(r#"{"T":1,"segments":[{"t":0,"c0":1,"c1":0,"c2":0}]}"#).is_err());
    }

    #[test]
    fn local_max_and_comb_touch_heights() {
        let f = Signal::local_max(1.0).unwrap();
        assert_eq!(f.evaluate(1.0).unwrap(), 1.0);
        assert_eq!(f.evaluate(2.5).unwrap(), 0.0);
        let c = Signal::extrema_comb(4.0, 4, 0.5).unwrap();
        assert_eq!(c.evaluate(0.5).unwrap(), 0.5);
        assert_eq!(c.evaluate(3.5).unwrap(), 0.5);
        assert_eq!(c.evaluate(4.0).unwrap(), 0.0);
    }
}
