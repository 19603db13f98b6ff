//! MMD intervals, chain decomposition, transcription operators and the Π map.
//!
//! Transcription needs positional zeros, so these routines work on
//! [`DenseEvents`]: a fixed time grid whose values may be zero.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::events::{Event, EventSequence};
use crate::norms::{self, NormKind};

/// Largest sequence accepted by [`transcription_sweep`].
pub const SWEEP_LIMIT: usize = 300;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseEvents {
    #[serde(rename = "T")]
    horizon: f64,
    times: Vec<f64>,
    values: Vec<f64>,
}

impl DenseEvents {
    pub fn new(horizon: f64, times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return domain("times and values differ in length");
        }
        let pairs: Vec<Event> = times
            .iter()
            .zip(&values)
            .map(|(&t, &v)| Event::new(t, if v == 0.0 { 1.0 } else { v }))
            .collect();
        // reuse the sequence validator for grid and finiteness checks
        EventSequence::new(horizon, pairs)?;
        Ok(Self { horizon, times, values })
    }

    pub fn from_sequence(eta: &EventSequence) -> Self {
        Self {
            horizon: eta.horizon(),
            times: eta.times(),
            values: eta.amplitudes(),
        }
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn nonzero_count(&self) -> usize {
        self.values.iter().filter(|v| **v != 0.0).count()
    }

    /// All nonzero values share one sign (vacuously true without any).
    pub fn is_single_signed(&self) -> bool {
        let mut nz = self.values.iter().filter(|v| **v != 0.0);
        match nz.next() {
            None => true,
            Some(first) => nz.all(|v| (*v > 0.0) == (*first > 0.0)),
        }
    }

    pub fn to_sequence(&self) -> EventSequence {
        let events = self
            .times
            .iter()
            .zip(&self.values)
            .filter(|(_, v)| **v != 0.0)
            .map(|(&t, &v)| Event::new(t, v))
            .collect();
        EventSequence::from_sorted_unchecked(self.horizon, events)
    }

    /// Grid positions `first..=last`.
    pub fn slice(&self, first: usize, last: usize) -> DenseEvents {
        DenseEvents {
            horizon: self.horizon,
            times: self.times[first..=last].to_vec(),
            values: self.values[first..=last].to_vec(),
        }
    }

    /// Pointwise difference on a shared grid.
    pub fn difference(&self, other: &DenseEvents) -> Result<DenseEvents> {
        if self.times != other.times || self.horizon != other.horizon {
            return domain("dense difference needs identical grids");
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(DenseEvents { horizon: self.horizon, times: self.times.clone(), values })
    }

    fn check_unit(&self) -> Result<()> {
        match self.values.iter().position(|v| !matches!(*v, -1.0 | 0.0 | 1.0)) {
            Some(i) => domain(format!(
                "expected values in {{-1, 0, 1}}, got {} at index {i}",
                self.values[i]
            )),
            None => Ok(()),
        }
    }
}

fn check_unit_sequence(eta: &EventSequence) -> Result<()> {
    match eta.events().iter().position(|e| e.v.abs() != 1.0) {
        Some(i) => domain(format!(
            "expected unit amplitudes, got {} at index {i}; normalize by 1/ϑ first",
            eta.events()[i].v
        )),
        None => Ok(()),
    }
}

// ---- MMD intervals ----

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MmdInterval {
    /// Grid index of the first element.
    pub first: usize,
    /// Grid index of the last element.
    pub last: usize,
    pub a: f64,
    pub b: f64,
    /// `D_m`, the sum of the values inside the interval.
    pub partial_sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MmdDecomposition {
    pub discrepancy: f64,
    pub intervals: Vec<MmdInterval>,
}

/// MMD intervals of a value list with prefix sums `P` (`P[0] = 0`).
///
/// `b_{m+1}` is searched strictly after `b_m`, starting a fresh restriction
/// there; `a_{m+1}` is the latest start that keeps the full discrepancy.
fn mmd_of_values(times: &[f64], values: &[f64]) -> MmdDecomposition {
    let mut p = Vec::with_capacity(values.len() + 1);
    p.push(0.0);
    for v in values {
        p.push(p.last().unwrap() + v);
    }
    let r = norms::discrepancy(values);
    let mut intervals = Vec::new();
    if r == 0.0 {
        return MmdDecomposition { discrepancy: r, intervals };
    }
    let mut start = 0;
    while start < values.len() {
        // earliest b with range(P[start..=b+1]) == r
        let (mut lo, mut hi) = (p[start], p[start]);
        let mut found = None;
        for b in start..values.len() {
            lo = lo.min(p[b + 1]);
            hi = hi.max(p[b + 1]);
            if hi - lo == r {
                found = Some(b);
                break;
            }
        }
        let Some(b) = found else { break };
        // latest a <= b with range(P[a..=b+1]) == r
        let (mut lo, mut hi) = (p[b + 1], p[b + 1]);
        let mut a = b;
        loop {
            lo = lo.min(p[a]);
            hi = hi.max(p[a]);
            if hi - lo == r {
                break;
            }
            a -= 1;
        }
        intervals.push(MmdInterval {
            first: a,
            last: b,
            a: times[a],
            b: times[b],
            partial_sum: p[b + 1] - p[a],
        });
        start = b + 1;
    }
    MmdDecomposition { discrepancy: r, intervals }
}

pub fn mmd_intervals(eta: &EventSequence) -> Result<MmdDecomposition> {
    if eta.is_empty() {
        return domain("MMD intervals of an empty sequence are undefined");
    }
    Ok(mmd_of_values(&eta.times(), &eta.amplitudes()))
}

pub fn mmd_intervals_dense(eta: &DenseEvents) -> Result<MmdDecomposition> {
    if eta.nonzero_count() == 0 {
        return domain("MMD intervals of a zero sequence are undefined");
    }
    Ok(mmd_of_values(&eta.times, &eta.values))
}

// ---- chain decomposition ----

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainDecomposition {
    /// `η_0 = 0, η_1, ..., η_r = η`, all on the grid of `η`.
    pub stages: Vec<DenseEvents>,
}

impl ChainDecomposition {
    pub fn depth(&self) -> usize {
        self.stages.len() - 1
    }

    /// `η_k - η_{k-1}` for `k = 1..=r`.
    pub fn increments(&self) -> Vec<DenseEvents> {
        self.stages
            .windows(2)
            .map(|w| w[1].difference(&w[0]).expect("stages share a grid"))
            .collect()
    }
}

/// Peels `η` into `‖η‖_D` unit-discrepancy layers by repeatedly zeroing the
/// first element of every MMD interval.
pub fn chain_decompose(eta: &EventSequence) -> Result<ChainDecomposition> {
    if eta.is_empty() {
        return domain("chain decomposition of an empty sequence is undefined");
    }
    check_unit_sequence(eta)?;
    let top = DenseEvents::from_sequence(eta);
    let r = norms::discrepancy(top.values()) as usize;
    let mut stages = vec![top];
    for _ in 0..r {
        let cur = stages.last().unwrap();
        let mut next = cur.clone();
        for iv in mmd_of_values(&cur.times, &cur.values).intervals {
            next.values[iv.first] = 0.0;
        }
        stages.push(next);
    }
    stages.reverse();
    if stages[0].nonzero_count() != 0 {
        return Err(Error::Domain("chain did not terminate at zero".into()));
    }
    Ok(ChainDecomposition { stages })
}

// ---- transcription ----

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pattern {
    /// `(+1, 0, ..., 0, -1)`.
    PlusMinus,
    /// `(-1, 0, ..., 0, +1)`.
    MinusPlus,
}

impl Pattern {
    fn lead(self) -> f64 {
        match self {
            Self::PlusMinus => 1.0,
            Self::MinusPlus => -1.0,
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::PlusMinus => "plus_minus",
            Self::MinusPlus => "minus_plus",
        })
    }
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus_minus" | "+-" => Ok(Self::PlusMinus),
            "minus_plus" | "-+" => Ok(Self::MinusPlus),
            other => Err(Error::Parse(format!("unknown pattern '{other}'"))),
        }
    }
}

/// One application: zero the leftmost `(lead, 0.., -lead)` occurrence.
/// Returns false at a fixpoint.
fn transcribe_once(values: &mut [f64], pattern: Pattern) -> bool {
    let lead = pattern.lead();
    let mut prev: Option<usize> = None;
    for i in 0..values.len() {
        if values[i] == 0.0 {
            continue;
        }
        if let Some(j) = prev {
            if values[j] == lead && values[i] == -lead {
                values[j] = 0.0;
                values[i] = 0.0;
                return true;
            }
        }
        prev = Some(i);
    }
    false
}

/// `T_p^n(η)`. Applications past the fixpoint leave the input unchanged.
pub fn transcribe(eta: &DenseEvents, pattern: Pattern, n: usize) -> Result<DenseEvents> {
    eta.check_unit()?;
    let mut out = eta.clone();
    for _ in 0..n {
        if !transcribe_once(&mut out.values, pattern) {
            break;
        }
    }
    Ok(out)
}

/// Fixpoint of `T_p` and the number of applications needed to reach it.
pub fn transcribe_to_fixpoint(eta: &DenseEvents, pattern: Pattern) -> Result<(DenseEvents, usize)> {
    eta.check_unit()?;
    let mut out = eta.clone();
    let mut depth = 0;
    while transcribe_once(&mut out.values, pattern) {
        depth += 1;
    }
    Ok((out, depth))
}

// ---- transcription sweep ----

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepWitness {
    pub value: f64,
    /// Index interval `I` into the events of `η`; `None` for empty `η`.
    pub interval: Option<(usize, usize)>,
    /// Applications of `T_(+-)`.
    pub m: usize,
    /// Applications of `T_(-+)` that follow.
    pub n: usize,
}

impl SweepWitness {
    /// Recomputes `T^n_(-+)(T^m_(+-)(η|_I))` with the direct operators.
    pub fn realize(&self, eta: &EventSequence) -> Result<DenseEvents> {
        let dense = DenseEvents::from_sequence(eta);
        let Some((first, last)) = self.interval else {
            return Ok(dense);
        };
        let inner = transcribe(&dense.slice(first, last), Pattern::PlusMinus, self.m)?;
        transcribe(&inner, Pattern::MinusPlus, self.n)
    }
}

/// Sparse tables for O(1) range min/max over the prefix sums.
struct RangeTable {
    min: Vec<Vec<i64>>,
    max: Vec<Vec<i64>>,
}

impl RangeTable {
    fn new(p: &[i64]) -> Self {
        let mut min = vec![p.to_vec()];
        let mut max = vec![p.to_vec()];
        let mut w = 1;
        while 2 * w <= p.len() {
            let (pm, px) = (min.last().unwrap(), max.last().unwrap());
            let nm = (0..=p.len() - 2 * w).map(|i| pm[i].min(pm[i + w])).collect();
            let nx = (0..=p.len() - 2 * w).map(|i| px[i].max(px[i + w])).collect();
            min.push(nm);
            max.push(nx);
            w *= 2;
        }
        Self { min, max }
    }

    /// Min and max over `p[lo..=hi]`.
    fn query(&self, lo: usize, hi: usize) -> (i64, i64) {
        let k = (usize::BITS - 1 - (hi - lo + 1).leading_zeros()) as usize;
        let w = 1 << k;
        (
            self.min[k][lo].min(self.min[k][hi + 1 - w]),
            self.max[k][lo].max(self.max[k][hi + 1 - w]),
        )
    }
}

/// Leftmost-first transcription coincides with a stack scan: after `m`
/// applications the prefix read so far has collapsed into two sign runs and
/// the rest is untouched. Every intermediate sequence is therefore
/// `(s1)^l1 (s2)^l2 ++ c[k..=e]`, and its norm follows from the run lengths
/// and range queries on the prefix sums of `c`.
struct Sweeper<'a> {
    c: &'a [i64],
    p: Vec<i64>,
    table: RangeTable,
    norm: NormKind,
}

impl Sweeper<'_> {
    fn eval(&self, s1: i64, l1: i64, s2: i64, l2: i64, k: usize, e: usize) -> i64 {
        let v1 = s1 * l1;
        let v2 = v1 + s2 * l2;
        let (mut lo, mut hi) = (0.min(v1).min(v2), 0.max(v1).max(v2));
        let mut total = v2;
        let mut any = l1 + l2 > 0;
        if k <= e {
            let base = self.p[k];
            let (smin, smax) = self.table.query(k, e + 1);
            lo = lo.min(v2 + smin - base);
            hi = hi.max(v2 + smax - base);
            total += self.p[e + 1] - base;
            any = true;
        }
        match self.norm {
            NormKind::Discrepancy => hi - lo,
            NormKind::Alexiewicz => hi.max(-lo),
            NormKind::MaxMaxSum => total.abs().max(any as i64),
        }
    }

    /// Best `(value, m, n)` over all transcriptions of `c[s..=e]`.
    fn interval(&self, s: usize, e: usize) -> (i64, usize, usize) {
        let mut best = (i64::MIN, 0, 0);
        let mut offer = |v: i64, m: usize, n: usize| {
            if v > best.0 {
                best = (v, m, n);
            }
        };
        // T_(+-) scan: stack is -^a +^b, next unread index j
        let (mut a, mut b, mut m) = (0i64, 0i64, 0usize);
        self.inner(a, b, s, e, m, &mut offer);
        for j in s..=e {
            if self.c[j] < 0 && b > 0 {
                b -= 1;
                m += 1;
                self.inner(a, b, j + 1, e, m, &mut offer);
            } else if self.c[j] > 0 {
                b += 1;
            } else {
                a += 1;
            }
        }
        best
    }

    /// T_(-+) scan over `-^a +^b ++ c[j..=e]`.
    fn inner(&self, a: i64, b: i64, j: usize, e: usize, m: usize, offer: &mut impl FnMut(i64, usize, usize)) {
        offer(self.eval(-1, a, 1, b, j, e), m, 0);
        let pops = a.min(b);
        for k in 1..=pops {
            offer(self.eval(-1, a - k, 1, b - k, j, e), m, k as usize);
        }
        let mut n = pops as usize;
        // stack is now +^pl -^q
        let (mut pl, mut q) = ((b - a).max(0), (a - b).max(0));
        for k in j..=e {
            if self.c[k] > 0 && q > 0 {
                q -= 1;
                n += 1;
                offer(self.eval(1, pl, -1, q, k + 1, e), m, n);
            } else if self.c[k] > 0 {
                pl += 1;
            } else {
                q += 1;
            }
        }
    }
}

/// `max_{I, m, n} ‖T^n_(-+)(T^m_(+-)(η|_I))‖` over all index intervals `I`
/// and all `m, n` up to the fixpoint depths. Requires unit amplitudes.
pub fn transcription_sweep(eta: &EventSequence, norm: NormKind) -> Result<SweepWitness> {
    check_unit_sequence(eta)?;
    if eta.len() > SWEEP_LIMIT {
        return Err(Error::SizeGuard {
            what: "transcription sweep",
            len: eta.len(),
            limit: SWEEP_LIMIT,
        });
    }
    if eta.is_empty() {
        return Ok(SweepWitness { value: 0.0, interval: None, m: 0, n: 0 });
    }
    let c: Vec<i64> = eta.events().iter().map(|e| e.v as i64).collect();
    let mut p = vec![0i64];
    for x in &c {
        p.push(p.last().unwrap() + x);
    }
    let sweeper = Sweeper { c: &c, table: RangeTable::new(&p), p, norm };
    let len = c.len();
    // ties resolve to the lexicographically smallest (s, e, m, n)
    let (value, s, e, m, n) = (0..len)
        .into_par_iter()
        .flat_map_iter(|s| {
            let sw = &sweeper;
            (s..len).map(move |e| {
                let (v, m, n) = sw.interval(s, e);
                (v, s, e, m, n)
            })
        })
        .reduce(
            || (i64::MIN, usize::MAX, usize::MAX, 0, 0),
            |x, y| {
                if y.0 > x.0 || (y.0 == x.0 && (y.1, y.2, y.3, y.4) < (x.1, x.2, x.3, x.4)) {
                    y
                } else {
                    x
                }
            },
        );
    Ok(SweepWitness { value: value as f64, interval: Some((s, e)), m, n })
}

// ---- Π map ----

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiResult {
    /// `‖η‖_D`.
    pub r: usize,
    /// First MMD interval the map acts on.
    pub interval: MmdInterval,
    /// Applications of `T_(+-)` and `T_(-+)` until their fixpoints.
    pub depths: (usize, usize),
    pub image: DenseEvents,
}

/// Restricts `η` to its first MMD interval and transcribes with `T_(+-)`
/// and then `T_(-+)`, each to its fixpoint. The image is single-signed
/// with `‖η‖_D` nonzero entries.
pub fn pi_map(eta: &EventSequence) -> Result<PiResult> {
    if eta.is_empty() {
        return domain("Π of an empty sequence is undefined");
    }
    check_unit_sequence(eta)?;
    let mmd = mmd_intervals(eta)?;
    let first = mmd.intervals[0].clone();
    let dense = DenseEvents::from_sequence(eta).slice(first.first, first.last);
    let (mid, d1) = transcribe_to_fixpoint(&dense, Pattern::PlusMinus)?;
    let (image, d2) = transcribe_to_fixpoint(&mid, Pattern::MinusPlus)?;
    Ok(PiResult {
        r: mmd.discrepancy as usize,
        interval: first,
        depths: (d1, d2),
        image,
    })
}
