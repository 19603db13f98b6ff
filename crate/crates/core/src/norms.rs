//! Weyl's discrepancy norm, the Alexiewicz norm and the Max-Max-Sum norm.
//!
//! All three depend on event times only through their order, so the core
//! routines take the amplitude slice.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::events::EventSequence;

/// Largest input accepted by [`discrepancy_bruteforce`].
pub const BRUTEFORCE_LIMIT: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    Discrepancy,
    Alexiewicz,
    MaxMaxSum,
}

impl NormKind {
    pub const ALL: [NormKind; 3] = [Self::Discrepancy, Self::Alexiewicz, Self::MaxMaxSum];

    pub fn eval(self, v: &[f64]) -> f64 {
        match self {
            Self::Discrepancy => discrepancy(v),
            Self::Alexiewicz => alexiewicz(v),
            Self::MaxMaxSum => max_max_sum(v),
        }
    }

    pub fn of(self, eta: &EventSequence) -> f64 {
        self.eval(&eta.amplitudes())
    }

    pub fn short(self) -> &'static str {
        match self {
            Self::Discrepancy => "D",
            Self::Alexiewicz => "A",
            Self::MaxMaxSum => "M",
        }
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short())
    }
}

impl FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "D" | "d" | "discrepancy" => Ok(Self::Discrepancy),
            "A" | "a" | "alexiewicz" => Ok(Self::Alexiewicz),
            "M" | "m" | "max_max_sum" => Ok(Self::MaxMaxSum),
            other => Err(Error::Parse(format!("unknown norm '{other}', expected D, A or M"))),
        }
    }
}

/// `max(max_k P_k, 0) - min(min_k P_k, 0)` over the prefix sums `P_k`:
/// the range of the walk `0, P_1, ..., P_n`.
pub fn discrepancy(v: &[f64]) -> f64 {
    let (mut lo, mut hi, mut p) = (0.0f64, 0.0f64, 0.0);
    for &x in v {
        p += x;
        lo = lo.min(p);
        hi = hi.max(p);
    }
    hi - lo
}

/// Direct evaluation of `max |Σ_{i=a..=b} v_i|` over all index intervals.
pub fn discrepancy_bruteforce(v: &[f64]) -> Result<f64> {
    if v.len() > BRUTEFORCE_LIMIT {
        return Err(Error::SizeGuard {
            what: "discrepancy brute force",
            len: v.len(),
            limit: BRUTEFORCE_LIMIT,
        });
    }
    let mut best = 0.0f64;
    for a in 0..v.len() {
        let mut s = 0.0;
        for &x in &v[a..] {
            s += x;
            best = best.max(s.abs());
        }
    }
    Ok(best)
}

/// `max_k |P_k|`: intervals anchored at the origin.
pub fn alexiewicz(v: &[f64]) -> f64 {
    let mut p = 0.0f64;
    let mut best = 0.0f64;
    for &x in v {
        p += x;
        best = best.max(p.abs());
    }
    best
}

/// `max(max_k |v_k|, |Σ_k v_k|)`.
pub fn max_max_sum(v: &[f64]) -> f64 {
    let peak = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    peak.max(v.iter().sum::<f64>().abs())
}

pub fn discrepancy_norm(eta: &EventSequence) -> f64 {
    discrepancy(&eta.amplitudes())
}

pub fn alexiewicz_norm(eta: &EventSequence) -> f64 {
    alexiewicz(&eta.amplitudes())
}

pub fn max_max_sum_norm(eta: &EventSequence) -> f64 {
    max_max_sum(&eta.amplitudes())
}
