//! Empirical check of the three conditions that make a norm on event
//! sequences equivalent to the discrepancy norm:
//!
//! 1. bounded on alternating sequences,
//! 2. `‖η‖ / #τ_η` bounded away from zero on same-sign sequences,
//! 3. transcription sweeps bounded by a multiple of `‖η‖`.
//!
//! Each statistic is tracked along a doubling ladder of sequence sizes. A
//! supremum that grows by [`GROWTH_FACTOR`] or more over the last doubling
//! is judged unbounded; an infimum that shrinks by that factor is judged
//! vanishing.

use serde::{Deserialize, Serialize};

use super::families;
use crate::error::{domain, Result};
use crate::events::EventSequence;
use crate::norms::NormKind;
use crate::structure::{transcription_sweep, SweepWitness, SWEEP_LIMIT};

pub const GROWTH_FACTOR: f64 = 1.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifyConfig {
    /// Increasing sizes, ideally doubling.
    pub sizes: Vec<usize>,
    /// Random unit sequences per size in the sweep condition.
    pub random_per_size: usize,
    pub seed: u64,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        Self { sizes: vec![8, 16, 32, 64, 128], random_per_size: 4, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    /// `‖η‖`.
    Norm,
    /// `‖η‖ / #τ_η`.
    NormPerEvent,
    /// `sweep(η) / ‖η‖`.
    SweepRatio,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub family: String,
    pub size: usize,
    pub sequence: EventSequence,
    pub norm_value: f64,
    pub sweep: Option<SweepWitness>,
    pub value: f64,
}

fn evaluate(norm: NormKind, stat: Statistic, eta: &EventSequence) -> Result<(f64, f64, Option<SweepWitness>)> {
    let nv = norm.of(eta);
    Ok(match stat {
        Statistic::Norm => (nv, nv, None),
        Statistic::NormPerEvent => (nv, nv / eta.len() as f64, None),
        Statistic::SweepRatio => {
            let sw = transcription_sweep(eta, norm)?;
            (nv, sw.value / nv, Some(sw))
        }
    })
}

impl Witness {
    /// Recomputes the statistic and checks it reproduces exactly.
    pub fn recheck(&self, norm: NormKind, stat: Statistic) -> Result<bool> {
        let (nv, value, sweep) = evaluate(norm, stat, &self.sequence)?;
        let sweep_ok = match (&self.sweep, &sweep) {
            (Some(a), Some(b)) => {
                a.value == b.value && norm.eval(a.realize(&self.sequence)?.values()) == a.value
            }
            (None, None) => true,
            _ => false,
        };
        Ok(nv == self.norm_value && value == self.value && sweep_ok)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderPoint {
    pub size: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyResult {
    pub family: String,
    pub ladder: Vec<LadderPoint>,
    pub holds: bool,
    pub witness: Witness,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub statistic: Statistic,
    /// `true` for a supremum that must stay bounded, `false` for an
    /// infimum that must stay positive.
    pub is_supremum: bool,
    /// Extreme value over all families and sizes.
    pub estimate: f64,
    pub holds: bool,
    pub witness: Witness,
    pub families: Vec<FamilyResult>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Equivalent,
    NotEquivalent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub norm: NormKind,
    pub config: CertifyConfig,
    pub alternating: ConditionReport,
    pub same_sign: ConditionReport,
    pub sweep: ConditionReport,
    pub verdict: Verdict,
}

impl CertificationReport {
    /// Every reported witness reproduces its value.
    pub fn recheck_witnesses(&self) -> Result<bool> {
        for c in [&self.alternating, &self.same_sign, &self.sweep] {
            if !c.witness.recheck(self.norm, c.statistic)? {
                return Ok(false);
            }
            for fam in &c.families {
                if !fam.witness.recheck(self.norm, c.statistic)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

type Generator<'a> = Box<dyn Fn(usize) -> Vec<EventSequence> + 'a>;

/// `better(a, b)`: `a` is more extreme than `b`.
fn better(is_sup: bool, a: f64, b: f64) -> bool {
    if is_sup {
        a > b
    } else {
        a < b
    }
}

fn ladder_holds(is_sup: bool, ladder: &[LadderPoint]) -> bool {
    match ladder {
        [.., prev, last] => {
            if is_sup {
                last.value < GROWTH_FACTOR * prev.value
            } else {
                last.value > 0.0 && prev.value < GROWTH_FACTOR * last.value
            }
        }
        [only] => only.value.is_finite() && (is_sup || only.value > 0.0),
        [] => true,
    }
}

fn condition(
    norm: NormKind,
    stat: Statistic,
    is_sup: bool,
    sizes: &[usize],
    generators: Vec<(&str, Generator<'_>)>,
) -> Result<ConditionReport> {
    let mut families = Vec::new();
    for (name, gen) in generators {
        let mut ladder = Vec::new();
        let mut witness: Option<Witness> = None;
        for &size in sizes {
            let mut best: Option<Witness> = None;
            for eta in gen(size) {
                let (nv, value, sweep) = evaluate(norm, stat, &eta)?;
                if best.as_ref().is_none_or(|b| better(is_sup, value, b.value)) {
                    best = Some(Witness {
                        family: name.to_string(),
                        size,
                        sequence: eta,
                        norm_value: nv,
                        sweep,
                        value,
                    });
                }
            }
            let best = best.expect("generators yield at least one sequence");
            ladder.push(LadderPoint { size, value: best.value });
            if witness.as_ref().is_none_or(|w| better(is_sup, best.value, w.value)) {
                witness = Some(best);
            }
        }
        families.push(FamilyResult {
            family: name.to_string(),
            holds: ladder_holds(is_sup, &ladder),
            ladder,
            witness: witness.expect("at least one size"),
        });
    }
    let overall: Vec<LadderPoint> = sizes
        .iter()
        .enumerate()
        .map(|(i, &size)| LadderPoint {
            size,
            value: families
                .iter()
                .map(|f| f.ladder[i].value)
                .reduce(|a, b| if better(is_sup, b, a) { b } else { a })
                .unwrap(),
        })
        .collect();
    let top = families
        .iter()
        .map(|f| &f.witness)
        .reduce(|a, b| if better(is_sup, b.value, a.value) { b } else { a })
        .unwrap()
        .clone();
    Ok(ConditionReport {
        statistic: stat,
        is_supremum: is_sup,
        estimate: top.value,
        holds: ladder_holds(is_sup, &overall) && families.iter().all(|f| f.holds),
        witness: top,
        families,
    })
}

pub fn certify_norm(norm: NormKind, config: &CertifyConfig) -> Result<CertificationReport> {
    let sizes = &config.sizes;
    if sizes.is_empty() || sizes.windows(2).any(|w| w[1] <= w[0]) || sizes[0] == 0 {
        return domain("sizes must be positive and strictly increasing");
    }
    if *sizes.last().unwrap() > SWEEP_LIMIT {
        return domain(format!("sizes are capped at {SWEEP_LIMIT}"));
    }
    let alternating = condition(
        norm,
        Statistic::Norm,
        true,
        sizes,
        vec![
            ("alternating_plus_first", Box::new(|n| vec![families::alternating(n, true)])),
            ("alternating_minus_first", Box::new(|n| vec![families::alternating(n, false)])),
        ],
    )?;
    let same_sign = condition(
        norm,
        Statistic::NormPerEvent,
        false,
        sizes,
        vec![
            ("all_positive", Box::new(|n| vec![families::all_positive(n)])),
            ("all_negative", Box::new(|n| vec![families::all_positive(n).scale(-1.0)])),
        ],
    )?;
    let seed = config.seed;
    let per = config.random_per_size.max(1);
    let sweep = condition(
        norm,
        Statistic::SweepRatio,
        true,
        sizes,
        vec![
            ("alternating", Box::new(|n| vec![families::alternating(n, true)])),
            ("mmsn", Box::new(|n| vec![families::mmsn(n)])),
            ("all_positive", Box::new(|n| vec![families::all_positive(n)])),
            (
                "random_unit",
                Box::new(move |n| {
                    (0..per)
                        .map(|i| families::random_unit(seed ^ ((n as u64) << 32) ^ i as u64, n))
                        .collect()
                }),
            ),
        ],
    )?;
    let verdict = if alternating.holds && same_sign.holds && sweep.holds {
        Verdict::Equivalent
    } else {
        Verdict::NotEquivalent
    };
    Ok(CertificationReport {
        norm,
        config: config.clone(),
        alternating,
        same_sign,
        sweep,
        verdict,
    })
}
