//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails. Tolerances are the constants below.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sodmetric_core::analysis::certify::Verdict;
use sodmetric_core::analysis::emdm::{default_eps_grid, emdm_characterize, emdm_sweep, schreiber_witness, van_rossum_kappa};
use sodmetric_core::analysis::families::{self, signal_pair_corpus};
use sodmetric_core::analysis::qi::{asymptotic_table, normalize_pair, qi_verify};
use sodmetric_core::analysis::{certify_norm, left_continuity_probe, CertifyConfig, EventMetric};
use sodmetric_core::cli::adversarial_family;
use sodmetric_core::norms::{alexiewicz, discrepancy, discrepancy_bruteforce, max_max_sum, NormKind};
use sodmetric_core::sampler::{homogeneity_check, reconstruct, sod_sample};
use sodmetric_core::spike_metrics::{
    van_rossum_floor, victor_purpura, SchreiberKernel, SchreiberParams, SimilarityToDistance,
    VictorPurpuraParams, VpSignMode,
};
use sodmetric_core::structure::{chain_decompose, pi_map, transcribe, DenseEvents, Pattern};
use sodmetric_core::{EventSequence, Signal, Threshold};

/// Absolute slack on each side of the quasi-isometry sandwich.
const QI_SLACK: f64 = 1e-9;
const QI_BUDGET: Duration = Duration::from_secs(10);
/// Relative tolerance on `‖Φf - Φg‖_D / ‖f - g‖_⌀` at the finest threshold.
const ASYMPTOTIC_RATIO_TOL: f64 = 0.05;
/// Per-signal sweeps may exceed the characterization by this much.
const EMDM_GRID_RESOLUTION: f64 = 1e-9;
const VR_FLOOR_SLACK: f64 = 1e-9;
const VP_SHIFT_TOL: f64 = 1e-12;

type Outcome = Result<String, String>;

fn th(v: f64) -> Threshold {
    Threshold::new(v).unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn c01_quasi_isometry() -> Outcome {
    let start = Instant::now();
    let corpus = signal_pair_corpus(42, 1000, 1.0, 12, 1.0).map_err(|e| e.to_string())?;
    let mut worst = f64::NEG_INFINITY;
    for theta in [0.05, 0.1, 0.2, 0.5] {
        let r = qi_verify(&corpus, th(theta), NormKind::Discrepancy).map_err(|e| e.to_string())?;
        for row in &r.rows {
            let lo = row.diam - 4.0 * theta;
            let hi = row.diam + 2.0 * theta;
            ensure(row.dist >= lo - QI_SLACK && row.dist <= hi + QI_SLACK, || {
                format!("trial {} at ϑ={theta}: {} not in [{lo}, {hi}]", row.trial, row.dist)
            })?;
            worst = worst.max((lo - row.dist).max(row.dist - hi));
        }
        ensure(r.violations == Some(0), || format!("report counts {:?} violations", r.violations))?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < QI_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!("4000 checks, 0 violations, worst excess {worst:.3e}, {elapsed:.2?}"))
}

fn c02_asymptotic_isometry() -> Outcome {
    let f = Signal::random_walk(1.0, 7, 20, 1.0).map_err(|e| e.to_string())?;
    let g = Signal::random_walk(1.0, 8, 20, 1.0).map_err(|e| e.to_string())?;
    let (f, g) = normalize_pair(&f, &g).map_err(|e| e.to_string())?;
    let thetas = [0.2, 0.1, 0.05, 0.025, 0.0125];
    let rows = asymptotic_table(&f, &g, &thetas, NormKind::Discrepancy).map_err(|e| e.to_string())?;
    ensure((rows[0].diam - 1.0).abs() <= 1e-12, || format!("diameter {}", rows[0].diam))?;
    for r in &rows {
        ensure(r.gap <= 4.0 * r.theta + QI_SLACK, || format!("ϑ={}: gap {}", r.theta, r.gap))?;
    }
    let last = rows.last().unwrap();
    ensure((last.ratio - 1.0).abs() <= ASYMPTOTIC_RATIO_TOL, || format!("final ratio {}", last.ratio))?;
    let gaps: Vec<String> = rows.iter().map(|r| format!("{:.4}", r.gap)).collect();
    Ok(format!("gaps [{}], final ratio {:.4}", gaps.join(", "), last.ratio))
}

fn c03_norm_equivalence() -> Outcome {
    let choices = [-3.0, -2.0, -1.5, -1.0, -0.5, 0.5, 1.0, 1.5, 2.0, 3.0];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for i in 0..10_000u64 {
        let n = rng.gen_range(1..=60);
        let v = families::random_from(i, n, &choices).amplitudes();
        let (d, a) = (discrepancy(&v), alexiewicz(&v));
        ensure(0.5 * d <= a && a <= d, || format!("sequence {i}: D={d} A={a}"))?;
    }
    let w = [-1.0, 1.0, 1.0];
    ensure(alexiewicz(&w) == 1.0 && discrepancy(&w) == 2.0, || "witness values".into())?;
    Ok("10000 sequences; witness (-1,+1,+1) has A=1, D=2".into())
}

fn c04_fast_vs_oracle() -> Outcome {
    let choices = [-4.0, -2.0, -1.0, -0.25, 0.25, 1.0, 2.0, 4.0];
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for i in 0..10_000u64 {
        let n = rng.gen_range(1..=500);
        let v = families::random_from(i ^ 0xACCE, n, &choices).amplitudes();
        let brute = discrepancy_bruteforce(&v).map_err(|e| e.to_string())?;
        ensure(discrepancy(&v) == brute, || format!("sequence {i}: {} vs {brute}", discrepancy(&v)))?;
    }
    Ok("10000 sequences, n <= 500, exact".into())
}

fn c05_mmsn() -> Outcome {
    for n in [4, 10, 40, 100] {
        let v = families::mmsn(n).amplitudes();
        ensure(max_max_sum(&v) == 1.0, || format!("n={n}: M={}", max_max_sum(&v)))?;
        ensure(discrepancy(&v) == n.div_ceil(2) as f64, || format!("n={n}: D={}", discrepancy(&v)))?;
    }
    let r = certify_norm(NormKind::MaxMaxSum, &CertifyConfig::default()).map_err(|e| e.to_string())?;
    ensure(r.verdict == Verdict::NotEquivalent, || "M certified equivalent".into())?;
    ensure(!r.sweep.holds, || "sweep condition holds".into())?;
    let mmsn = r.sweep.families.iter().find(|f| f.family == "mmsn").ok_or("no mmsn family")?;
    ensure(!mmsn.holds, || "mmsn family holds".into())?;
    ensure(r.sweep.witness.family == "mmsn", || format!("witness family {}", r.sweep.witness.family))?;
    ensure(r.recheck_witnesses().map_err(|e| e.to_string())?, || "witness does not re-evaluate".into())?;
    Ok(format!("sweep ratio {} at n={} (mmsn)", r.sweep.estimate, r.sweep.witness.size))
}

fn c06_chain() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for i in 0..500u64 {
        let n = rng.gen_range(1..=200);
        let eta = families::random_unit(i ^ 0xC4A1, n);
        let d = discrepancy(&eta.amplitudes());
        let chain = chain_decompose(&eta).map_err(|e| e.to_string())?;
        let mut total = 0.0;
        for (k, inc) in chain.increments().iter().enumerate() {
            let dk = discrepancy(inc.values());
            ensure(dk == 1.0, || format!("sequence {i} stage {k}: increment D={dk}"))?;
            ensure(inc.to_sequence().is_alternating(), || format!("sequence {i} stage {k}: not alternating"))?;
            total += dk;
        }
        ensure(total == d, || format!("sequence {i}: telescoped {total} vs D={d}"))?;
        ensure(chain.stages.last().unwrap().values() == eta.amplitudes().as_slice(), || {
            format!("sequence {i}: last stage differs from η")
        })?;
    }
    Ok("500 sequences".into())
}

fn c07_transcription() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checks = 0usize;
    for i in 0..400u64 {
        let n = rng.gen_range(1..=80);
        let eta = families::random_unit(i ^ 0x7A, n);
        let d = discrepancy(&eta.amplitudes());
        let dense = DenseEvents::from_sequence(&eta);
        for p in [Pattern::PlusMinus, Pattern::MinusPlus] {
            for k in 0..=n.div_ceil(2) {
                let t = transcribe(&dense, p, k).map_err(|e| e.to_string())?;
                ensure(discrepancy(t.values()) <= d, || format!("sequence {i}, {p:?}^{k}"))?;
                checks += 1;
            }
        }
        let pi = pi_map(&eta).map_err(|e| e.to_string())?;
        ensure(pi.image.is_single_signed(), || format!("sequence {i}: Π image mixed"))?;
        ensure(pi.image.nonzero_count() as f64 == d, || {
            format!("sequence {i}: Π has {} nonzeros, D={d}", pi.image.nonzero_count())
        })?;
    }
    Ok(format!("{checks} transcriptions, 400 Π images"))
}

fn c08_emdm() -> Outcome {
    let thetas = [0.05, 0.1, 0.2, 0.25, 0.5, 1.0];
    let signals = adversarial_family().map_err(|e| e.to_string())?;
    let mut failures = Vec::new();
    let mut summary = Vec::new();
    for norm in [NormKind::Discrepancy, NormKind::Alexiewicz] {
        let c = emdm_characterize(norm.into(), 200, &[], &[]).map_err(|e| e.to_string())?;
        ensure(c.value == 1.0, || format!("{norm}: characterization {}", c.value))?;
        let mut worst = (0.0f64, String::new());
        for (name, f) in &signals {
            let s = emdm_sweep(f, EventMetric::from(norm), &thetas, &default_eps_grid())
                .map_err(|e| e.to_string())?;
            if s.lambda > worst.0 {
                worst = (s.lambda, format!("{name} at ϑ={}", s.argmax_theta));
            }
            if s.lambda > c.value + EMDM_GRID_RESOLUTION {
                failures.push(format!("{}: Λ={} on {name} (ϑ={})", norm.short(), s.lambda, s.argmax_theta));
            }
        }
        summary.push(format!("{}: Ω=1, max Λ={} ({})", norm.short(), worst.0, worst.1));
    }
    if failures.is_empty() {
        Ok(summary.join("; "))
    } else {
        Err(format!("{}; exceeds characterization: {}", summary.join("; "), failures.join(", ")))
    }
}

fn c09_van_rossum() -> Outcome {
    let mut rows = 0;
    for alpha in [0.5, 1.0, 2.0] {
        for horizon in [10.0, 20.0, 40.0] {
            for per_unit in [1usize, 2] {
                let n = horizon as usize * per_unit;
                let spacing = horizon / n as f64;
                let eta = families::alternating_train(n, spacing, horizon, true).map_err(|e| e.to_string())?;
                let floor = van_rossum_floor(&eta, alpha).ok_or("empty train")?;
                let q = (-alpha * spacing).exp();
                let bound = q * (1.0 - q);
                ensure(floor >= bound - VR_FLOOR_SLACK, || {
                    format!("α={alpha} T={horizon} Δ={spacing}: floor {floor} < {bound}")
                })?;
            }
        }
        let c = emdm_characterize(EventMetric::VanRossum { alpha }, 400, &[10.0, 20.0, 40.0], &[0.5, 1.0])
            .map_err(|e| e.to_string())?;
        for g in &c.growth {
            let lo = van_rossum_kappa(alpha, g.spacing) * g.horizon;
            ensure(g.value >= lo && g.value <= g.horizon, || {
                format!("α={alpha} T={} Δ={}: {} not in [{lo}, {}]", g.horizon, g.spacing, g.value, g.horizon)
            })?;
            rows += 1;
        }
    }
    Ok(format!("18 trains above the floor, {rows} growth rows within [κT, T]"))
}

fn c10_victor_purpura() -> Outcome {
    let params0 = VictorPurpuraParams::new(0.0, VpSignMode::Separate).map_err(|e| e.to_string())?;
    let count = |e: &EventSequence| {
        let pos = e.events().iter().filter(|x| x.v > 0.0).count() as f64;
        (pos, e.len() as f64 - pos)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for i in 0..1000u64 {
        let a = families::random_pure(2 * i, rng.gen_range(0..30), 1.0, 5.0);
        let b = families::random_pure(2 * i + 1, rng.gen_range(0..30), 1.0, 5.0);
        let ((pa, na), (pb, nb)) = (count(&a), count(&b));
        let expected = (pa - pb).abs() + (na - nb).abs();
        let got = victor_purpura(&a, &b, params0).map_err(|e| e.to_string())?;
        ensure(got == expected, || format!("pair {i}: {got} vs {expected}"))?;
    }
    for s in [0.5, 1.0, 4.0] {
        let p = VictorPurpuraParams::new(s, VpSignMode::Separate).map_err(|e| e.to_string())?;
        for dt in [0.01, 0.1, 0.3, 0.5, 1.0, 2.0] {
            let a = EventSequence::from_pairs(5.0, &[(1.0, 1.0)]).map_err(|e| e.to_string())?;
            let b = EventSequence::from_pairs(5.0, &[(1.0 + dt, 1.0)]).map_err(|e| e.to_string())?;
            let got = victor_purpura(&a, &b, p).map_err(|e| e.to_string())?;
            let want = (s * dt).min(2.0);
            ensure((got - want).abs() <= VP_SHIFT_TOL, || format!("s={s} Δt={dt}: {got} vs {want}"))?;
        }
    }
    Ok("1000 counting pairs, 18 shifted pairs".into())
}

fn c11_left_continuity() -> Outcome {
    let f = Signal::local_max(1.0).map_err(|e| e.to_string())?;
    let r = left_continuity_probe(&f, th(1.0), 30).map_err(|e| e.to_string())?;
    ensure(r.times_monotone, || "times not monotone".into())?;
    ensure(r.approach_from_below, || "times overshoot".into())?;
    let n = r.stabilized_at.ok_or("count never stabilizes")?;
    ensure(r.final_gap < 1e-6, || format!("final gap {}", r.final_gap))?;
    ensure(r.count_drop_above > 0, || "no count drop above".into())?;
    ensure(r.from_above.iter().all(|s| s.count < r.baseline_count), || "drop not persistent".into())?;
    Ok(format!(
        "stable from n={n}, final gap {:.1e}, count {} -> {} above",
        r.final_gap,
        r.baseline_count,
        r.baseline_count as i64 - r.count_drop_above
    ))
}

fn c12_coarse_surjectivity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for i in 0..1000u64 {
        let theta = rng.gen_range(0.01..2.0);
        let horizon = rng.gen_range(0.5..10.0);
        let eta = families::random_pure(i, rng.gen_range(0..40), theta, horizon);
        let f = reconstruct(&eta).map_err(|e| e.to_string())?;
        ensure(sod_sample(&f, th(theta)) == eta, || format!("sequence {i} (ϑ={theta})"))?;
    }
    Ok("1000 sequences, C = 0".into())
}

fn c13_homogeneity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for i in 0..1000u64 {
        let horizon = rng.gen_range(0.5..5.0);
        let f = Signal::random_walk(horizon, i, rng.gen_range(1..20), 1.0).map_err(|e| e.to_string())?;
        let (a, b) = (rng.gen_range(0.02..0.8), rng.gen_range(0.02..0.8));
        ensure(homogeneity_check(&f, th(a), th(b)), || format!("triple {i}: ϑ={a} ϑ̃={b}"))?;
    }
    Ok("1000 triples".into())
}

fn c14_schreiber() -> Outcome {
    let kernels = [
        SchreiberKernel::Gaussian { sigma: 0.05 },
        SchreiberKernel::CausalExponential { alpha: 2.0 },
    ];
    for kernel in kernels {
        let p = SchreiberParams::new(kernel, SimilarityToDistance::OneMinusS).map_err(|e| e.to_string())?;
        let w = schreiber_witness(20, p).map_err(|e| e.to_string())?;
        ensure(w.similarity_12 == -1.0 && w.similarity_34 == -1.0, || {
            format!("{kernel:?}: S = {}, {}", w.similarity_12, w.similarity_34)
        })?;
        ensure(w.distance_12 == w.distance_34, || format!("{kernel:?}: d_S differ"))?;
        ensure(w.discrepancy_12 != w.discrepancy_34, || "pairs not distinct in D".into())?;
    }
    Ok("S = -1 on both pairs, d_S equal, D distances 20 vs 2".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 14] = [
        ("quasi-isometry sandwich", c01_quasi_isometry),
        ("asymptotic isometry", c02_asymptotic_isometry),
        ("norm equivalence A vs D", c03_norm_equivalence),
        ("fast discrepancy vs brute force", c04_fast_vs_oracle),
        ("max-max-sum counterexample", c05_mmsn),
        ("chain decomposition", c06_chain),
        ("transcription inequality and Π", c07_transcription),
        ("EMDM characterization", c08_emdm),
        ("van Rossum bounds", c09_van_rossum),
        ("Victor-Purpura", c10_victor_purpura),
        ("left-continuity", c11_left_continuity),
        ("coarse surjectivity", c12_coarse_surjectivity),
        ("homogeneity", c13_homogeneity),
        ("Schreiber witness", c14_schreiber),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        match result {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{took:.2?}]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} [{took:.2?}]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
