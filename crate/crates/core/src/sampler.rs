//! Send-on-delta, level-crossing with hysteresis, integrate-and-fire, and the
//! canonical right inverse of send-on-delta.
//!
//! Crossings are roots of at most quadratic polynomials and are computed in
//! closed form, segment by segment, earliest root first. When a level is
//! met exactly at a breakpoint (the breakpoint value equals the level bit for
//! bit) the event is placed exactly on the breakpoint.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::events::{Event, EventSequence};
use crate::signal::{Current, Segment, Signal};

/// Positive, finite sampling threshold `ϑ`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Threshold(f64);

impl Threshold {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 {
            Ok(Self(value))
        } else {
            domain(format!("threshold must be finite and positive, got {value}"))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// When does reaching a level count as an event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Trigger {
    /// First time `|f(t) - f(t_k)| >= ϑ`; touching the level is enough.
    Touch,
    /// First time `|f(t) - f(t_k)| > ϑ`, i.e. the level is passed.
    Cross,
}

/// Relative window (in units of the searched span) within which an interior
/// root is snapped onto a breakpoint that meets the level exactly.
const SNAP_REL: f64 = 1e-9;

/// Real roots of `a x^2 + b x + c`, ascending.
fn quadratic_roots(a: f64, b: f64, c: f64) -> ([f64; 2], usize) {
    if a == 0.0 {
        if b == 0.0 {
            return ([0.0; 2], 0);
        }
        return ([-c / b, 0.0], 1);
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return ([0.0; 2], 0);
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let r1 = q / a;
    let r2 = if q != 0.0 { c / q } else { r1 };
    if r1 <= r2 {
        ([r1, r2], 2)
    } else {
        ([r2, r1], 2)
    }
}

/// Earliest time in `(lo, hi]` where the segment meets `level` from below
/// (`up`) or from above (`!up`), or `None`.
fn first_hit(
    seg: &Segment,
    lo: f64,
    hi: f64,
    end_value: f64,
    level: f64,
    up: bool,
    trigger: Trigger,
) -> Option<f64> {
    // g >= 0 (resp. > 0) is the trigger region in both directions.
    let sgn = if up { 1.0 } else { -1.0 };
    let (a, b, c) = (sgn * seg.c2, sgn * seg.c1, sgn * (seg.c0 - level));
    let g_end = sgn * (end_value - level);
    let tau_lo = lo - seg.t;
    let tau_hi = hi - seg.t;
    let (roots, n) = quadratic_roots(a, b, c);
    let roots = &roots[..n];
    let local = |tau: f64| (seg.t + tau).clamp(lo.next_up(), hi);

    match trigger {
        Trigger::Touch => {
            let cand = roots.iter().copied().find(|&r| r > tau_lo && r <= tau_hi);
            if g_end >= 0.0 {
                match cand {
                    Some(r) if !(g_end == 0.0 && tau_hi - r <= SNAP_REL * (tau_hi - tau_lo)) => {
                        Some(local(r))
                    }
                    _ => Some(hi),
                }
            } else {
                cand.map(local)
            }
        }
        Trigger::Cross => {
            if lo == seg.t && c == 0.0 && (b > 0.0 || (b == 0.0 && a > 0.0)) {
                return Some(lo);
            }
            let upcrossing = match (a == 0.0, a > 0.0) {
                (true, _) => (b > 0.0).then(|| roots.first().copied()).flatten(),
                (false, true) => roots.last().copied(),
                (false, false) => (n == 2 && roots[0] < roots[1]).then(|| roots[0]),
            };
            match upcrossing {
                Some(r) if r > tau_lo && r < tau_hi => Some(local(r)),
                _ if g_end > 0.0 => Some(hi),
                _ => None,
            }
        }
    }
}

/// Reference-level bookkeeping shared by the SOD and LC samplers.
trait Levels {
    fn bounds(&self) -> (f64, f64);
    /// Lattice index of the current reference, `reference = index·ϑ`.
    fn index(&self) -> i64;
    fn advance(&mut self, up: bool);
}

/// SOD: the reference is the running sum of emitted amplitudes, which is
/// exactly `f(t_k)`.
struct RunningReference {
    reference: f64,
    index: i64,
    theta: f64,
}

impl Levels for RunningReference {
    fn bounds(&self) -> (f64, f64) {
        (self.reference - self.theta, self.reference + self.theta)
    }

    fn index(&self) -> i64 {
        self.index
    }

    fn advance(&mut self, up: bool) {
        let (lower, upper) = self.bounds();
        self.reference = if up { upper } else { lower };
        self.index += if up { 1 } else { -1 };
    }
}

/// LC with hysteresis: an integer index into the lattice `{kϑ}`.
struct Lattice {
    index: i64,
    theta: f64,
}

impl Levels for Lattice {
    fn bounds(&self) -> (f64, f64) {
        (
            (self.index - 1) as f64 * self.theta,
            (self.index + 1) as f64 * self.theta,
        )
    }

    fn index(&self) -> i64 {
        self.index
    }

    fn advance(&mut self, up: bool) {
        self.index += if up { 1 } else { -1 };
    }
}

/// How each level is triggered during a run.
#[derive(Clone, Copy)]
enum Mode {
    Fixed(Trigger),
    /// Limit `ε ↓ 0` of `Touch` sampling at `ϑ + ε`. The level `kϑ` moves to
    /// `k(ϑ+ε)`: away from the signal when `k` has the sign of the move, so
    /// it must be passed; otherwise it moves toward the signal (or stays, at
    /// `k = 0`) and touching it is enough.
    RightLimit,
}

impl Mode {
    fn triggers(self, index: i64) -> (Trigger, Trigger) {
        match self {
            Mode::Fixed(t) => (t, t),
            Mode::RightLimit => {
                let pick = |away: bool| if away { Trigger::Cross } else { Trigger::Touch };
                (pick(index - 1 < 0), pick(index + 1 > 0))
            }
        }
    }
}

fn run<L: Levels>(f: &Signal, theta: f64, mode: Mode, mut levels: L) -> EventSequence {
    let segs = f.segments();
    let mut events: Vec<Event> = Vec::new();
    let mut i = 0;
    let mut lo = 0.0;
    while i < segs.len() {
        let hi = f.segment_end(i);
        if lo >= hi {
            i += 1;
            continue;
        }
        let (lower, upper) = levels.bounds();
        let (down_trigger, up_trigger) = mode.triggers(levels.index());
        let end_value = f.end_value(i);
        let up = first_hit(&segs[i], lo, hi, end_value, upper, true, up_trigger);
        let down = first_hit(&segs[i], lo, hi, end_value, lower, false, down_trigger);
        let hit = match (up, down) {
            (Some(u), Some(d)) => Some(if u <= d { (u, true) } else { (d, false) }),
            (Some(u), None) => Some((u, true)),
            (None, Some(d)) => Some((d, false)),
            (None, None) => None,
        };
        match hit {
            None => {
                i += 1;
                lo = hi;
            }
            Some((mut t, is_up)) => {
                if let Some(last) = events.last() {
                    if t <= last.t {
                        t = last.t.next_up();
                    }
                }
                events.push(Event::new(t, if is_up { theta } else { -theta }));
                levels.advance(is_up);
                lo = t;
                if t >= hi {
                    i += 1;
                }
            }
        }
    }
    EventSequence::from_sorted_unchecked(f.horizon(), events)
}

/// Send-on-delta sampling `Φ_ϑ(f)` with the chosen trigger semantics.
pub fn sod_sample_with(f: &Signal, theta: Threshold, trigger: Trigger) -> EventSequence {
    let theta = theta.value();
    run(f, theta, Mode::Fixed(trigger), RunningReference { reference: 0.0, index: 0, theta })
}

/// Send-on-delta sampling `Φ_ϑ(f)`. An event whose crossing falls exactly
/// on `t = T` is emitted.
pub fn sod_sample(f: &Signal, theta: Threshold) -> EventSequence {
    sod_sample_with(f, theta, Trigger::Touch)
}

/// `lim_{ε↓0} Φ_{ϑ+ε}(f)` rescaled to amplitude `ϑ`. A level away from
/// zero that is only touched is skipped; a level at or toward zero that is
/// touched still fires.
pub fn sod_right_limit(f: &Signal, theta: Threshold) -> EventSequence {
    let theta = theta.value();
    run(f, theta, Mode::RightLimit, RunningReference { reference: 0.0, index: 0, theta })
}

/// Level-crossing sampling with hysteresis on the lattice `{kϑ}`, starting
/// at level index 0.
pub fn lc_sample(f: &Signal, theta: Threshold) -> EventSequence {
    let theta = theta.value();
    run(f, theta, Mode::Fixed(Trigger::Touch), Lattice { index: 0, theta })
}

/// Non-leaky integrate-and-fire: SOD applied to `∫_0^t f`.
pub fn if_sample(input: &Current, theta: Threshold) -> EventSequence {
    sod_sample(&input.integrate(), theta)
}

/// Piecewise-linear signal through `(0, 0)` and the cumulative sums
/// `(t_k, Σ_{j<=k} v_j)`, constant after the last event. Sampling the result
/// at `ϑ = |v_k|` reproduces `η` exactly.
pub fn reconstruct(eta: &EventSequence) -> Result<Signal> {
    let horizon = eta.horizon();
    if eta.is_empty() {
        return Signal::zero(horizon);
    }
    if eta.purity().is_none() {
        return domain("reconstruction needs a ϑ-pure sequence (all |v_k| equal)");
    }
    if eta.events()[0].t <= 0.0 {
        return domain("first event must lie strictly after t = 0");
    }
    let mut level = 0.0;
    let points: Vec<(f64, f64)> = eta
        .events()
        .iter()
        .map(|e| {
            level += e.v;
            (e.t, level)
        })
        .collect();
    Signal::from_points(horizon, &points)
}

/// Checks `Φ_ϑ̃(f) = Φ_ϑ((ϑ/ϑ̃) f)`: same event count, same signs, event
/// times equal to within `1e-9·max(1, T)` and amplitudes related by the
/// factor `ϑ̃/ϑ` to within `1e-12` relative.
pub fn homogeneity_check(f: &Signal, theta: Threshold, theta_tilde: Threshold) -> bool {
    let (a, b) = (theta.value(), theta_tilde.value());
    let lhs = sod_sample(f, theta_tilde);
    let rhs = sod_sample(&f.scale(a / b), theta);
    let tol = 1e-9 * f.horizon().max(1.0);
    lhs.len() == rhs.len()
        && lhs.events().iter().zip(rhs.events()).all(|(x, y)| {
            (x.t - y.t).abs() <= tol
                && (x.v > 0.0) == (y.v > 0.0)
                && (x.v - y.v * b / a).abs() <= 1e-12 * b
        })
}
