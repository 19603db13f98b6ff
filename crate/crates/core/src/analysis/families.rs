//! Deterministic generators for event sequences and signal pairs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, Result};
use crate::events::{Event, EventSequence};
use crate::signal::Signal;

fn unit_on_integers(signs: impl IntoIterator<Item = f64>) -> EventSequence {
    let events: Vec<Event> = signs
        .into_iter()
        .enumerate()
        .map(|(k, v)| Event::new((k + 1) as f64, v))
        .collect();
    EventSequence::from_sorted_unchecked((events.len() + 1) as f64, events)
}

fn sign(k: usize, start_positive: bool) -> f64 {
    if (k % 2 == 0) == start_positive {
        1.0
    } else {
        -1.0
    }
}

/// `n` alternating unit events at `t_k = kΔ`, `0 <= k < n`.
pub fn alternating_train(
    n: usize,
    spacing: f64,
    horizon: f64,
    start_positive: bool,
) -> Result<EventSequence> {
    if n > 0 && (n - 1) as f64 * spacing > horizon {
        return domain(format!("{n} events at spacing {spacing} do not fit in [0, {horizon}]"));
    }
    let events = (0..n)
        .map(|k| Event::new(k as f64 * spacing, sign(k, start_positive)))
        .collect();
    EventSequence::new(horizon, events)
}

/// Alternating unit sequence on the grid `1, 2, ..., n`.
pub fn alternating(n: usize, start_positive: bool) -> EventSequence {
    unit_on_integers((0..n).map(|k| sign(k, start_positive)))
}

/// `+1` at `k/n` for `k <= ⌈n/2⌉`, `-1` after, on `[0, 1]`.
pub fn mmsn(n: usize) -> EventSequence {
    let half = n.div_ceil(2);
    let events = (1..=n)
        .map(|k| Event::new(k as f64 / n as f64, if k <= half { 1.0 } else { -1.0 }))
        .collect();
    EventSequence::from_sorted_unchecked(1.0, events)
}

pub fn all_positive(n: usize) -> EventSequence {
    unit_on_integers(std::iter::repeat(1.0).take(n))
}

pub fn random_unit(seed: u64, n: usize) -> EventSequence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    unit_on_integers((0..n).map(|_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 }).collect::<Vec<_>>())
}

/// Random amplitudes from `choices` on the grid `1..=n`.
pub fn random_from(seed: u64, n: usize, choices: &[f64]) -> EventSequence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    unit_on_integers((0..n).map(|_| choices[rng.gen_range(0..choices.len())]).collect::<Vec<_>>())
}

/// Random `ϑ`-pure sequence with `n` distinct times in `(0, T]`.
pub fn random_pure(seed: u64, n: usize, theta: f64, horizon: f64) -> EventSequence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut times: Vec<f64> = (0..n)
        .map(|_| horizon - rng.gen_range(0.0..horizon))
        .collect();
    if n > 0 && rng.gen_bool(0.25) {
        times[0] = horizon;
    }
    times.sort_by(f64::total_cmp);
    times.dedup();
    let events = times
        .into_iter()
        .map(|t| Event::new(t, if rng.gen_bool(0.5) { theta } else { -theta }))
        .collect();
    EventSequence::from_sorted_unchecked(horizon, events)
}

/// Two independent random piecewise-linear walks on `[0, T]`.
pub fn random_signal_pair(seed: u64, horizon: f64, max_breaks: usize, amplitude: f64) -> Result<(Signal, Signal)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut one = || {
        let breaks = rng.gen_range(1..=max_breaks);
        let amp = rng.gen_range(0.1 * amplitude..=amplitude);
        Signal::random_walk(horizon, rng.gen(), breaks, amp)
    };
    Ok((one()?, one()?))
}

/// Piecewise-linear walk on the integer grid `0, 1, ..., n` with integer
/// values and nonzero steps in `[-max_step, max_step]`. Every extremum sits
/// exactly on a level of the lattice `{k}`, so `ϑ = 1` (or `1/m`) is critical
/// at each of them.
pub fn lattice_walk(seed: u64, n: usize, max_step: i64) -> Result<Signal> {
    if n == 0 || max_step < 1 {
        return domain("lattice walk needs n >= 1 and max_step >= 1");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut y = 0i64;
    let points: Vec<(f64, f64)> = (1..=n)
        .map(|k| {
            let mut step = 0;
            while step == 0 {
                step = rng.gen_range(-max_step..=max_step);
            }
            y += step;
            (k as f64, y as f64)
        })
        .collect();
    Signal::from_points(n as f64, &points)
}

/// `n` seeded pairs; pair `i` depends only on `(seed, i)`.
pub fn signal_pair_corpus(
    seed: u64,
    trials: usize,
    horizon: f64,
    max_breaks: usize,
    amplitude: f64,
) -> Result<Vec<(Signal, Signal)>> {
    (0..trials)
        .map(|i| random_signal_pair(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ i as u64, horizon, max_breaks, amplitude))
        .collect()
}

/// `[η1, -η1, η3, -η3]` on `[0, 1]` with events at `k/n`: `η1` is `+1` up to
/// the middle and `-1` after, `η3(k/n) = (-1)^k`.
pub fn schreiber_quadruple(n: usize) -> [EventSequence; 4] {
    let at = |f: &dyn Fn(usize) -> f64| {
        let events = (1..=n).map(|k| Event::new(k as f64 / n as f64, f(k))).collect();
        EventSequence::from_sorted_unchecked(1.0, events)
    };
    let eta1 = at(&|k| if 2 * k <= n { 1.0 } else { -1.0 });
    let eta3 = at(&|k| if k % 2 == 0 { 1.0 } else { -1.0 });
    let (eta2, eta4) = (eta1.scale(-1.0), eta3.scale(-1.0));
    [eta1, eta2, eta3, eta4]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::{discrepancy, max_max_sum};

    #[test]
    fn mmsn_norms() {
        for n in [4, 10, 40, 100] {
            let v = mmsn(n).amplitudes();
            assert_eq!(max_max_sum(&v), 1.0);
            assert_eq!(discrepancy(&v), n.div_ceil(2) as f64);
        }
    }

    #[test]
    fn trains_and_determinism() {
        let a = alternating_train(5, 0.5, 2.0, true).unwrap();
        assert!(a.is_alternating());
        assert_eq!(a.times(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        assert!(alternating_train(6, 0.5, 2.0, true).is_err());
        assert_eq!(random_unit(3, 50), random_unit(3, 50));
        let p = random_pure(9, 40, 0.25, 3.0);
        assert_eq!(p.purity(), Some(0.25));
        assert!(p.events()[0].t > 0.0);
        let c1 = signal_pair_corpus(42, 5, 1.0, 8, 1.0).unwrap();
        let c2 = signal_pair_corpus(42, 5, 1.0, 8, 1.0).unwrap();
        assert_eq!(c1, c2);
    }
}
