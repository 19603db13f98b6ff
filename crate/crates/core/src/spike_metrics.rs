//! van Rossum, Schreiber and Victor-Purpura distances for signed event
//! sequences on `[0, T]`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::events::EventSequence;

fn check_horizons(a: &EventSequence, b: &EventSequence) -> Result<()> {
    if a.horizon() != b.horizon() {
        return domain(format!("horizons differ: {} vs {}", a.horizon(), b.horizon()));
    }
    Ok(())
}

/// `(1 - e^{-2αL}) / (2α)`, continuous at `α = 0` where it equals `L`.
fn decay_energy(alpha: f64, len: f64) -> f64 {
    let x = 2.0 * alpha * len;
    if x < 1e-8 {
        len * (1.0 - 0.5 * x)
    } else {
        -(-x).exp_m1() / (2.0 * alpha)
    }
}

// ---- van Rossum ----

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VanRossumParams {
    /// Decay rate `α = 1/t_c`; zero selects the unit-step kernel.
    pub alpha: f64,
}

impl VanRossumParams {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return domain(format!("alpha must be finite and >= 0, got {alpha}"));
        }
        Ok(Self { alpha })
    }
}

/// `∫_{max(a,b)}^T e^{-α(t-a)} e^{-α(t-b)} dt`.
pub fn causal_kernel(alpha: f64, horizon: f64, a: f64, b: f64) -> f64 {
    let len = horizon - a.max(b);
    if len <= 0.0 {
        return 0.0;
    }
    (-alpha * (a - b).abs()).exp() * decay_energy(alpha, len)
}

/// `R_η(t) = Σ_{t_k <= t} v_k e^{-α(t - t_k)}`.
pub fn van_rossum_trace(eta: &EventSequence, alpha: f64, t: f64) -> f64 {
    eta.events()
        .iter()
        .take_while(|e| e.t <= t)
        .map(|e| e.v * (-alpha * (t - e.t)).exp())
        .sum()
}

/// Values `R_η(t_k)` right after each event.
fn trace_at_events(eta: &EventSequence, alpha: f64) -> Vec<f64> {
    let mut r = 0.0;
    let mut prev = 0.0;
    eta.events()
        .iter()
        .map(|e| {
            r = r * (-alpha * (e.t - prev)).exp() + e.v;
            prev = e.t;
            r
        })
        .collect()
}

/// `‖R_η‖_2^2` on `[0, T]`. `R_η` decays exponentially between events, so
/// each gap integrates in closed form.
pub fn van_rossum_energy(eta: &EventSequence, alpha: f64) -> f64 {
    let ev = eta.events();
    trace_at_events(eta, alpha)
        .iter()
        .enumerate()
        .map(|(k, r)| {
            let end = ev.get(k + 1).map_or(eta.horizon(), |n| n.t);
            r * r * decay_energy(alpha, end - ev[k].t)
        })
        .sum()
}

/// The same energy as a double sum of pairwise kernels. Quadratic cost and
/// prone to cancellation on long trains; kept as an independent check.
pub fn van_rossum_energy_pairwise(eta: &EventSequence, alpha: f64) -> f64 {
    let ev = eta.events();
    let t_end = eta.horizon();
    let mut total = 0.0;
    for (i, a) in ev.iter().enumerate() {
        total += a.v * a.v * causal_kernel(alpha, t_end, a.t, a.t);
        for b in &ev[i + 1..] {
            total += 2.0 * a.v * b.v * causal_kernel(alpha, t_end, a.t, b.t);
        }
    }
    total
}

/// `d_{R,α}(η1, η2) = ‖R_{η1} - R_{η2}‖_2` on `[0, T]`.
pub fn van_rossum(a: &EventSequence, b: &EventSequence, p: VanRossumParams) -> Result<f64> {
    Ok(van_rossum_squared(a, b, p)?.sqrt())
}

/// `‖R_{η1} - R_{η2}‖_2^2`, the inner-product form.
pub fn van_rossum_squared(a: &EventSequence, b: &EventSequence, p: VanRossumParams) -> Result<f64> {
    let diff = a.difference(b)?;
    Ok(van_rossum_energy(&diff, p.alpha).max(0.0))
}

/// `inf |R_η(t)|` over `[t_1, T]`. Between events `|R_η|` only decays, so the
/// infimum is taken over left limits at event times and the value at `T`.
pub fn van_rossum_floor(eta: &EventSequence, alpha: f64) -> Option<f64> {
    let ev = eta.events();
    let r = trace_at_events(eta, alpha);
    let mut floor = f64::INFINITY;
    for (k, rk) in r.iter().enumerate() {
        let end = ev.get(k + 1).map_or(eta.horizon(), |n| n.t);
        floor = floor.min(rk.abs() * (-alpha * (end - ev[k].t)).exp());
    }
    (!ev.is_empty()).then_some(floor)
}

// ---- Schreiber ----

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SchreiberKernel {
    /// `e^{-αt}` for `t >= 0`, smoothed trains compared on `[0, T]`.
    CausalExponential { alpha: f64 },
    /// `e^{-t²/(2σ²)}`, smoothed trains compared on the whole line.
    Gaussian { sigma: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimilarityToDistance {
    #[default]
    OneMinusS,
    Arccos,
}

impl SimilarityToDistance {
    pub fn apply(self, s: f64) -> f64 {
        match self {
            Self::OneMinusS => 1.0 - s,
            Self::Arccos => s.acos(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchreiberParams {
    pub kernel: SchreiberKernel,
    pub h: SimilarityToDistance,
}

impl SchreiberParams {
    pub fn new(kernel: SchreiberKernel, h: SimilarityToDistance) -> Result<Self> {
        let ok = match kernel {
            SchreiberKernel::CausalExponential { alpha } => alpha.is_finite() && alpha >= 0.0,
            SchreiberKernel::Gaussian { sigma } => sigma.is_finite() && sigma > 0.0,
        };
        if !ok {
            return domain(format!("invalid kernel parameter in {kernel:?}"));
        }
        Ok(Self { kernel, h })
    }

    fn inner(&self, a: &EventSequence, b: &EventSequence) -> f64 {
        let horizon = a.horizon();
        let k = |s: f64, t: f64| match self.kernel {
            SchreiberKernel::CausalExponential { alpha } => causal_kernel(alpha, horizon, s, t),
            SchreiberKernel::Gaussian { sigma } => (-(s - t).powi(2) / (4.0 * sigma * sigma)).exp(),
        };
        a.events()
            .iter()
            .map(|x| b.events().iter().map(|y| x.v * y.v * k(x.t, y.t)).sum::<f64>())
            .sum()
    }
}

/// Normalized inner product of the kernel-smoothed trains, in `[-1, 1]`.
pub fn schreiber_similarity(a: &EventSequence, b: &EventSequence, p: SchreiberParams) -> Result<f64> {
    check_horizons(a, b)?;
    let (aa, bb) = (p.inner(a, a), p.inner(b, b));
    if !(aa > 0.0 && bb > 0.0) {
        return Err(Error::UndefinedSimilarity(
            "a smoothed train has zero energy".into(),
        ));
    }
    // sqrt of the product keeps S(η, ±η) = ±1 exact
    Ok((p.inner(a, b) / (aa * bb).sqrt()).clamp(-1.0, 1.0))
}

/// `h(S(η1, η2))`.
pub fn schreiber_distance(a: &EventSequence, b: &EventSequence, p: SchreiberParams) -> Result<f64> {
    Ok(p.h.apply(schreiber_similarity(a, b, p)?))
}

// ---- Victor-Purpura ----

/// How signed trains are reduced to nonnegative ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VpSignMode {
    /// `d(η1⁺, η2⁺) + d(η1⁻, η2⁻)`.
    #[default]
    Separate,
    /// One edit distance between `η1⁺ + η2⁻` and `η1⁻ + η2⁺`.
    Combined,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VictorPurpuraParams {
    /// Cost per unit of time shift.
    pub s: f64,
    #[serde(default)]
    pub mode: VpSignMode,
}

impl VictorPurpuraParams {
    pub fn new(s: f64, mode: VpSignMode) -> Result<Self> {
        if !(s.is_finite() && s >= 0.0) {
            return domain(format!("shift cost must be finite and >= 0, got {s}"));
        }
        Ok(Self { s, mode })
    }
}

/// Spike times of a nonnegative train, each event repeated by its
/// (integer) multiplicity.
fn expand(eta: &EventSequence) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(eta.len());
    for e in eta.events() {
        let m = e.v.abs();
        if m.fract() != 0.0 || m > u32::MAX as f64 {
            return domain(format!(
                "Victor-Purpura needs integer multiplicities, got {} at t={}",
                e.v, e.t
            ));
        }
        out.extend(std::iter::repeat(e.t).take(m as usize));
    }
    Ok(out)
}

/// Classic edit distance between two sorted spike-time lists: insert and
/// delete cost 1, a shift by `Δt` costs `s·|Δt|`.
pub fn vp_edit_distance(x: &[f64], y: &[f64], s: f64) -> f64 {
    let mut prev: Vec<f64> = (0..=y.len()).map(|j| j as f64).collect();
    let mut cur = vec![0.0; y.len() + 1];
    for (i, &xi) in x.iter().enumerate() {
        cur[0] = (i + 1) as f64;
        for (j, &yj) in y.iter().enumerate() {
            let dt = (xi - yj).abs();
            let shift = if dt == 0.0 { 0.0 } else { s * dt };
            cur[j + 1] = (prev[j + 1] + 1.0).min(cur[j] + 1.0).min(prev[j] + shift);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[y.len()]
}

pub fn victor_purpura(a: &EventSequence, b: &EventSequence, p: VictorPurpuraParams) -> Result<f64> {
    check_horizons(a, b)?;
    let (ap, am) = a.split_signs();
    let (bp, bm) = b.split_signs();
    match p.mode {
        VpSignMode::Separate => Ok(vp_edit_distance(&expand(&ap)?, &expand(&bp)?, p.s)
            + vp_edit_distance(&expand(&am)?, &expand(&bm)?, p.s)),
        VpSignMode::Combined => {
            let x = expand(&ap.sum(&bm)?)?;
            let y = expand(&am.sum(&bp)?)?;
            Ok(vp_edit_distance(&x, &y, p.s))
        }
    }
}
