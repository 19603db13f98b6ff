//! Finite event sequences `η = Σ v_k 1_{t_k}` on `[0, T]`.
//!
//! Storage is sparse: zero amplitudes never appear. Grid merging compares
//! times with exact float equality.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub t: f64,
    pub v: f64,
}

impl Event {
    pub fn new(t: f64, v: f64) -> Self {
        Self { t, v }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventSequence {
    #[serde(rename = "T")]
    horizon: f64,
    events: Vec<Event>,
}

impl EventSequence {
    pub fn new(horizon: f64, events: Vec<Event>) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return domain(format!("horizon must be finite and positive, got {horizon}"));
        }
        for (i, e) in events.iter().enumerate() {
            if !(e.t.is_finite() && (0.0..=horizon).contains(&e.t)) {
                return domain(format!("event {i} at t={} outside [0, {horizon}]", e.t));
            }
            if !e.v.is_finite() || e.v == 0.0 {
                return domain(format!("event {i} has invalid amplitude {}", e.v));
            }
        }
        if let Some(i) = events.windows(2).position(|w| w[1].t <= w[0].t) {
            return domain(format!("event times not strictly increasing at index {}", i + 1));
        }
        Ok(Self { horizon, events })
    }

    /// Builds from `(t, v)` pairs, dropping zero amplitudes.
    pub fn from_pairs(horizon: f64, pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            horizon,
            pairs
                .iter()
                .filter(|p| p.1 != 0.0)
                .map(|&(t, v)| Event::new(t, v))
                .collect(),
        )
    }

    pub fn empty(horizon: f64) -> Result<Self> {
        Self::new(horizon, Vec::new())
    }

    /// Internal constructor for callers that already uphold the invariants.
    pub(crate) fn from_sorted_unchecked(horizon: f64, events: Vec<Event>) -> Self {
        debug_assert!(events.windows(2).all(|w| w[0].t < w[1].t));
        debug_assert!(events.iter().all(|e| e.v != 0.0));
        Self { horizon, events }
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.events.iter().map(|e| e.t).collect()
    }

    pub fn amplitudes(&self) -> Vec<f64> {
        self.events.iter().map(|e| e.v).collect()
    }

    /// Common magnitude `ϑ` if every `|v_k|` is bitwise equal.
    pub fn purity(&self) -> Option<f64> {
        let first = self.events.first()?.v.abs();
        self.events
            .iter()
            .all(|e| e.v.abs() == first)
            .then_some(first)
    }

    pub fn scale(&self, lambda: f64) -> EventSequence {
        if lambda == 0.0 {
            return Self::from_sorted_unchecked(self.horizon, Vec::new());
        }
        let events = self.events.iter().map(|e| Event::new(e.t, lambda * e.v)).collect();
        Self::from_sorted_unchecked(self.horizon, events)
    }

    fn merge_with(&self, other: &EventSequence, sign: f64) -> Result<EventSequence> {
        if self.horizon != other.horizon {
            return domain(format!(
                "horizons differ: {} vs {}",
                self.horizon, other.horizon
            ));
        }
        let (a, b) = (&self.events, &other.events);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let e = match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) if x.t == y.t => {
                    i += 1;
                    j += 1;
                    Event::new(x.t, x.v + sign * y.v)
                }
                (Some(x), Some(y)) if x.t < y.t => {
                    i += 1;
                    *x
                }
                (Some(x), None) => {
                    i += 1;
                    *x
                }
                (_, Some(y)) => {
                    j += 1;
                    Event::new(y.t, sign * y.v)
                }
                (None, None) => unreachable!(),
            };
            if e.v != 0.0 {
                out.push(e);
            }
        }
        Ok(Self::from_sorted_unchecked(self.horizon, out))
    }

    /// `self - other` on the merged grid; cancelled events are dropped.
    pub fn difference(&self, other: &EventSequence) -> Result<EventSequence> {
        self.merge_with(other, -1.0)
    }

    pub fn sum(&self, other: &EventSequence) -> Result<EventSequence> {
        self.merge_with(other, 1.0)
    }

    /// Events with `t` in the closed interval `[a, b]`.
    pub fn restrict(&self, a: f64, b: f64) -> Result<EventSequence> {
        if !(a <= b && a >= 0.0 && b <= self.horizon) {
            return domain(format!(
                "interval [{a}, {b}] is not inside [0, {}]",
                self.horizon
            ));
        }
        let events = self
            .events
            .iter()
            .filter(|e| e.t >= a && e.t <= b)
            .copied()
            .collect();
        Ok(Self::from_sorted_unchecked(self.horizon, events))
    }

    /// Positive part and the magnitude of the negative part, so that
    /// `η = plus - minus` with both parts nonnegative.
    pub fn split_signs(&self) -> (EventSequence, EventSequence) {
        let (plus, minus): (Vec<Event>, Vec<Event>) =
            self.events.iter().partition(|e| e.v > 0.0);
        let minus = minus.into_iter().map(|e| Event::new(e.t, -e.v)).collect();
        (
            Self::from_sorted_unchecked(self.horizon, plus),
            Self::from_sorted_unchecked(self.horizon, minus),
        )
    }

    /// Consecutive amplitudes strictly alternate in sign.
    pub fn is_alternating(&self) -> bool {
        self.events
            .windows(2)
            .all(|w| (w[0].v > 0.0) != (w[1].v > 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(pairs: &[(f64, f64)]) -> EventSequence {
        EventSequence::from_pairs(10.0, pairs).unwrap()
    }

    #[test]
    fn difference_cases() {
        let a = seq(&[(1.0, 1.0), (3.0, -1.0)]);
        assert!(a.difference(&a).unwrap().is_empty());
        let d = seq(&[(1.0, 1.0)]).difference(&seq(&[(2.0, 1.0)])).unwrap();
        assert_eq!(d.events(), &[Event::new(1.0, 1.0), Event::new(2.0, -1.0)]);
        // a shared time with equal sign cancels, opposite signs double
        let x = seq(&[(1.0, 0.5), (2.0, 0.5), (3.0, -0.5)]);
        let y = seq(&[(2.0, 0.5), (3.0, 0.5)]);
        let d = x.difference(&y).unwrap();
        assert_eq!(d.events(), &[Event::new(1.0, 0.5), Event::new(3.0, -1.0)]);
        assert_eq!(y.difference(&x).unwrap(), d.scale(-1.0));
    }

    #[test]
    fn difference_needs_equal_horizons() {
        let a = EventSequence::empty(1.0).unwrap();
        let b = EventSequence::empty(2.0).unwrap();
        assert!(a.difference(&b).is_err());
    }

    #[test]
    fn restrict_cases() {
        let e = seq(&[(1.0, 1.0), (2.0, 1.0), (3.0, -1.0)]);
        assert_eq!(e.restrict(0.0, 10.0).unwrap(), e);
        assert!(e.restrict(4.0, 5.0).unwrap().is_empty());
        assert_eq!(
            e.restrict(2.0, 3.0).unwrap().events(),
            &[Event::new(2.0, 1.0), Event::new(3.0, -1.0)]
        );
        assert!(e.restrict(-1.0, 3.0).is_err());
        assert!(e.restrict(3.0, 11.0).is_err());
        assert!(e.restrict(3.0, 2.0).is_err());
        // nested restriction equals restriction to the intersection
        assert_eq!(
            e.restrict(0.5, 2.5).unwrap().restrict(1.5, 3.5).unwrap(),
            e.restrict(1.5, 2.5).unwrap()
        );
    }

    #[test]
    fn split_signs_cases() {
        let p = seq(&[(1.0, 1.0), (2.0, 2.0)]);
        let (a, b) = p.split_signs();
        assert_eq!(a, p);
        assert!(b.is_empty());
        let (a, b) = seq(&[(1.0, 1.0), (2.0, -1.0)]).split_signs();
        assert_eq!(a.events(), &[Event::new(1.0, 1.0)]);
        assert_eq!(b.events(), &[Event::new(2.0, 1.0)]);
    }

    #[test]
    fn alternation() {
        assert!(seq(&[(1.0, 1.0), (2.0, -1.0), (3.0, 1.0)]).is_alternating());
        assert!(!seq(&[(1.0, 1.0), (2.0, 1.0)]).is_alternating());
        assert!(seq(&[]).is_alternating());
        assert!(seq(&[(1.0, -1.0)]).is_alternating());
    }

    #[test]
    fn validation() {
        assert!(EventSequence::new(1.0, vec![Event::new(0.5, 0.0)]).is_err());
        assert!(EventSequence::new(1.0, vec![Event::new(1.5, 1.0)]).is_err());
        assert!(EventSequence::new(1.0, vec![Event::new(0.5, 1.0), Event::new(0.5, 1.0)]).is_err());
        assert!(EventSequence::new(-1.0, vec![]).is_err());
    }

    #[test]
    fn purity() {
        assert_eq!(seq(&[(1.0, 0.3), (2.0, -0.3)]).purity(), Some(0.3));
        assert_eq!(seq(&[(1.0, 0.3), (2.0, -0.6)]).purity(), None);
        assert_eq!(seq(&[]).purity(), None);
    }
}
