//! Acceptance criteria A1-A9.
//!
//! Runs every criterion, prints one `PASS`/`FAIL` line each with the
//! measured runtime against its budget, and exits nonzero if any fails.
//! Run with `cargo test -p rookstat-core --test acceptance`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use rookstat_core::bounds::{chen_stein_report, conditional_tail_bound, lll_lower, sandwich, suen_upper};
use rookstat_core::coincidence::{
    exhaustive_coincidence_law, sample_coincidence_moments, PairProbabilities, DEFAULT_EXHAUSTIVE_CAP,
};
use rookstat_core::rook_board::{count_nonattacking, decode, encode, Mark};
use rookstat_core::spectra::{empirical_spectrum, tv_spectrum_exact, tv_to_poisson};
use rookstat_core::stirling::{enum_structures, factorial, stirling, DEFAULT_ENUM_CAP};
use rookstat_core::{Kind, Model, RealInterval};

const SEED: u64 = 0x5EED_2024;
const SHARDS: u64 = 8;

type Outcome = Result<String, String>;
type Criterion = (&'static str, &'static str, Duration, fn() -> Outcome);

fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

fn int(v: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(v.into())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// `r! Stirling(n, n - r) / C(n,2)^r`, zero when `r > n`.
fn stirling_identity(kind: Kind, n: usize, r: usize) -> BigRational {
    if r > n {
        return BigRational::zero();
    }
    let nn = BigInt::from(n * (n - 1) / 2);
    BigRational::new(factorial(r) * stirling(kind, n, n - r), num_traits::pow(nn, r))
}

fn a1_stirling_identity() -> Outcome {
    let mut checked = 0;
    for n in 2..=7usize {
        for r in 0..=3usize {
            let law = exhaustive_coincidence_law(n, r, DEFAULT_EXHAUSTIVE_CAP).map_err(|e| e.to_string())?;
            let part = law.probability(|v| v.w_rr + v.w_cc == 0);
            let perm = law.probability(|v| v.w_cc == 0);
            ensure(part == stirling_identity(Kind::Second, n, r), || {
                format!("P(W_RR+W_CC=0) mismatch at n={n}, r={r}: {part}")
            })?;
            ensure(perm == stirling_identity(Kind::First, n, r), || {
                format!("P(W_CC=0) mismatch at n={n}, r={r}: {perm}")
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} (n, r) cells exact"))
}

fn a2_bijections() -> Outcome {
    let mut structures = 0usize;
    for model in [Model::Partition, Model::Permutation] {
        for n in 1..=9usize {
            for k in 1..=n {
                let all = enum_structures(model, n, k, DEFAULT_ENUM_CAP).map_err(|e| e.to_string())?;
                for x in &all {
                    let back = decode(&encode(x), model).map_err(|e| format!("{model} {x}: {e}"))?;
                    ensure(&back == x, || format!("{model}: decode(encode({x})) = {back}"))?;
                }
                structures += all.len();
                let count = count_nonattacking(n, n - k, model);
                let want = stirling(model.kind(), n, k);
                ensure(BigInt::from(count) == want, || {
                    format!("{model} n={n} k={k}: {count} placements, Stirling {want}")
                })?;
                ensure(BigInt::from(all.len()) == want, || {
                    format!("{model} n={n} k={k}: enumeration size")
                })?;
            }
        }
    }
    Ok(format!("{structures} structures round-tripped, placement counts match"))
}

/// Exact TV between the joint law of the four mark counts and the product
/// of independent Poissons with the same means.
fn tv_to_independent_poissons(n: usize, r: usize) -> Result<RealInterval, String> {
    let law = exhaustive_coincidence_law(n, r, DEFAULT_EXHAUSTIVE_CAP).map_err(|e| e.to_string())?;
    let joint = law.map(|v| v.marks());
    let pp = PairProbabilities::new(n).map_err(|e| e.to_string())?;
    let pairs = int(r * (r - 1) / 2);
    let means = [&pairs * &pp.p, &pairs * &pp.p, &pairs * &pp.q, &pairs * &pp.q];
    let exps: Vec<RealInterval> = means.iter().map(|m| (-RealInterval::from_rational(m)).exp()).collect();
    let pmf = |i: usize, z: u64| -> RealInterval {
        let mut acc = exps[i].clone();
        for j in 1..=z {
            acc = acc.mul_rational(&(&means[i] / int(j)));
        }
        acc
    };
    let mut covered = RealInterval::zero();
    let mut acc = RealInterval::zero();
    for (v, m) in joint.iter() {
        let mut prod = RealInterval::one();
        for (i, &z) in v.iter().enumerate() {
            prod = &prod * &pmf(i, z);
        }
        covered = &covered + &prod;
        acc = &acc + &(RealInterval::from_rational(m) - prod).abs();
    }
    acc = &acc + &(RealInterval::one() - covered);
    Ok(acc.mul_rational(&q(1, 2)))
}

fn a3_chen_stein_desk_scale() -> Outcome {
    let mut worst = 0f64;
    for n in [5usize, 6, 7] {
        for r in [2usize, 3] {
            let rep = chen_stein_report(n, r).map_err(|e| e.to_string())?;
            let tv = tv_to_independent_poissons(n, r)?;
            ensure(tv.le_rational(&rep.d), || {
                format!("n={n} r={r}: TV {tv} > d = {}", rep.d)
            })?;
            worst = worst.max(tv.hi_f64() / rep.d.to_f64().unwrap());

            // Point bound |P(W_CC = 0) - e^{-lambda_C}| <= min(1, 1/lambda_C)(b1 + b2).
            let law = exhaustive_coincidence_law(n, r, DEFAULT_EXHAUSTIVE_CAP).map_err(|e| e.to_string())?;
            let p0 = law.probability(|v| v.get(Mark::CC) == 0);
            let lhs = (RealInterval::from_rational(&p0) - (-RealInterval::from_rational(&rep.lambda_c)).exp()).abs();
            let factor = if rep.lambda_c > BigRational::one() {
                rep.lambda_c.recip()
            } else {
                BigRational::one()
            };
            let rhs = factor * (&rep.b1 + &rep.b2);
            ensure(lhs.le_rational(&rhs), || {
                format!("n={n} r={r}: point error {lhs} > {rhs}")
            })?;
        }
    }
    Ok(format!("max TV/d = {worst:.4}; point bound holds on all 6 cells"))
}

fn a4_cross_identities() -> Outcome {
    let rep = chen_stein_report(6, 3).map_err(|e| e.to_string())?;
    ensure(rep.p == q(11, 45), || format!("p(6) = {}", rep.p))?;
    ensure(rep.q == q(4, 45), || format!("q(6) = {}", rep.q))?;
    ensure(rep.b1_a == q(484, 225), || format!("b1_a(6,3) = {}", rep.b1_a))?;
    let mut failures = Vec::new();
    let mut cells = 0;
    for n in 2..=200usize {
        for r in 0..=20usize {
            let rep = chen_stein_report(n, r).map_err(|e| e.to_string())?;
            cells += 1;
            if !rep.cross_identity_holds() {
                failures.push((n, r, rep.d.clone(), rep.d_from_parts()));
            }
        }
    }
    if let Some((n, r, d, parts)) = failures.first() {
        return Err(format!(
            "p(6), q(6), b1_a(6,3) exact; d = 4(b1+b2) fails on {}/{cells} cells, e.g. n={n} r={r}: d = {:.6}, 4(b1+b2) = {:.6}",
            failures.len(),
            d.to_f64().unwrap(),
            parts.to_f64().unwrap()
        ));
    }
    Ok(format!("{cells} cells exact; p(6), q(6), b1_a(6,3) exact"))
}

fn a5_containment() -> Outcome {
    let cells: Vec<(Kind, usize, usize)> = [Kind::First, Kind::Second]
        .into_iter()
        .flat_map(|kind| (2..=60usize).flat_map(move |n| (1..=n).map(move |k| (kind, n, k))))
        .collect();
    let counts = cells
        .par_iter()
        .map(|&(kind, n, k)| -> Result<[u32; 3], String> {
            let exact = int(stirling(kind, n, k));
            let s = sandwich(kind, n, k).map_err(|e| e.to_string())?;
            let l = lll_lower(kind, n, k).map_err(|e| e.to_string())?;
            let u = suen_upper(kind, n, k).map_err(|e| e.to_string())?;
            if s.valid {
                ensure(s.lower.le_rational(&exact) && s.upper.ge_rational(&exact), || {
                    format!("sandwich {kind} ({n},{k}): [{}, {}] misses {exact}", s.lower, s.upper)
                })?;
            }
            if l.valid {
                ensure(l.value.le_rational(&exact), || {
                    format!("LLL {kind} ({n},{k}): {} > {exact}", l.value)
                })?;
            }
            if u.valid {
                ensure(u.value.ge_rational(&exact), || {
                    format!("Suen {kind} ({n},{k}): {} < {exact}", u.value)
                })?;
            }
            Ok([u32::from(s.valid), u32::from(l.valid), u32::from(u.valid)])
        })
        .collect::<Result<Vec<_>, _>>()?;
    let total = counts
        .iter()
        .fold([0u32; 3], |a, c| [a[0] + c[0], a[1] + c[1], a[2] + c[2]]);

    let s = sandwich(Kind::First, 10, 7).map_err(|e| e.to_string())?;
    ensure(s.valid, || "sandwich(first, 10, 7) not valid".into())?;
    ensure(
        s.lower.le_rational(&int(9450)) && s.upper.ge_rational(&int(9450)),
        || format!("sandwich(first, 10, 7) = [{}, {}] misses 9450", s.lower, s.upper),
    )?;
    ensure((4200.0..4220.0).contains(&s.lower.lo_f64()), || {
        format!("sandwich lower {} not near 4211", s.lower)
    })?;
    let u = suen_upper(Kind::Second, 10, 7).map_err(|e| e.to_string())?;
    ensure(u.value.ge_rational(&int(5880)), || {
        format!("suen_upper(second, 10, 7) = {} < 5880", u.value)
    })?;
    Ok(format!(
        "{} cells; valid sandwich {}, LLL {}, Suen {}; s(10,7) in [{:.1}, {:.1}]",
        cells.len(),
        total[0],
        total[1],
        total[2],
        s.lower.lo_f64(),
        s.upper.hi_f64()
    ))
}

fn a6_monte_carlo() -> Outcome {
    let (n, r, samples) = (400usize, 20usize, 100_000u64);
    let m = sample_coincidence_moments(n, r, samples, SEED, SHARDS).map_err(|e| e.to_string())?;
    let pp = PairProbabilities::new(n).map_err(|e| e.to_string())?;
    let target_cc = (int(r * (r - 1) / 2) * &pp.p).to_f64().unwrap();
    let mean = m.mean(Mark::CC);
    let se = m.std_err(Mark::CC);
    ensure((mean - target_cc).abs() <= 4.0 * se, || {
        format!("mean W_CC {mean:.5} vs {target_cc:.5} (4 se = {:.5})", 4.0 * se)
    })?;
    let target_p0 = stirling_identity(Kind::Second, n, r).to_f64().unwrap();
    let freq = m.no_attack_frequency(Model::Partition);
    let se_p0 = (target_p0 * (1.0 - target_p0) / samples as f64).sqrt();
    ensure((freq - target_p0).abs() <= 4.0 * se_p0, || {
        format!("P(no attack) {freq:.5} vs {target_p0:.5} (4 se = {:.5})", 4.0 * se_p0)
    })?;
    Ok(format!(
        "E W_CC {mean:.5} vs {target_cc:.5} ({:.2} se); P0 {freq:.5} vs {target_p0:.5} ({:.2} se)",
        (mean - target_cc).abs() / se,
        (freq - target_p0).abs() / se_p0
    ))
}

/// Independent f64 evaluation of the (8, 5) partition distance from the
/// hand-derived exact law {(2,3): 420, (3,1,1): 560, (4,0,0,1): 70} / 1050.
fn tv_eight_five_oracle() -> f64 {
    let rate = 0.75f64;
    let p0 = (-rate).exp();
    let p1 = rate * p0;
    let a = 420.0 / 1050.0;
    let b = 560.0 / 1050.0;
    let c = 70.0 / 1050.0;
    0.5 * ((a - p0).abs() + (b - p1).abs() + c + (1.0 - p0 - p1))
}

fn a7_spectrum_tv() -> Outcome {
    let mut worst = 0f64;
    for n in 4..=12usize {
        let tv = tv_spectrum_exact(Model::Partition, n, n - 1, DEFAULT_ENUM_CAP).map_err(|e| e.to_string())?;
        let want = RealInterval::one() - (-RealInterval::from_rational(&q(2, 3 * n as i64))).exp();
        let gap = (&tv - &want).abs().hi_f64();
        ensure(gap <= 1e-12, || format!("n={n}: {tv} vs 1 - e^(-2/(3n)) = {want}"))?;
        worst = worst.max(gap);
    }
    let tv = tv_spectrum_exact(Model::Partition, 8, 5, DEFAULT_ENUM_CAP).map_err(|e| e.to_string())?;
    let oracle = tv_eight_five_oracle();
    let v = tv.midpoint_f64();
    ensure((v - oracle).abs() < 5e-5 && (v - 0.2457).abs() < 5e-5, || {
        format!("tv(8,5) = {v:.6}, oracle {oracle:.6}")
    })?;
    Ok(format!("max gap {worst:.1e}; tv(8,5) = {v:.6} (oracle {oracle:.6})"))
}

fn a8_regime() -> Outcome {
    let (n, k, samples) = (900usize, 870usize, 200_000u64);
    let part = empirical_spectrum(Model::Partition, n, k, samples, SEED, SHARDS).map_err(|e| e.to_string())?;
    let tv_d3 = tv_to_poisson(&part.component_law(3), &q(2, 3));
    ensure(tv_d3.le_rational(&q(6, 100)), || {
        format!("TV(D3, Poisson(2/3)) = {tv_d3}")
    })?;
    let big_blocks = part.frequency_with_component_at_least(4);
    ensure(big_blocks <= 0.05, || {
        format!("blocks of size >= 4 in {big_blocks:.4} of samples")
    })?;
    let perm = empirical_spectrum(Model::Permutation, n, k, samples, SEED, SHARDS).map_err(|e| e.to_string())?;
    let tv_c3 = tv_to_poisson(&perm.component_law(3), &q(4, 3));
    ensure(tv_c3.le_rational(&q(6, 100)), || {
        format!("TV(C3, Poisson(4/3)) = {tv_c3}")
    })?;
    Ok(format!(
        "TV(D3) = {:.4}, TV(C3) = {:.4}, size>=4 blocks {:.4}, cycles {:.4}",
        tv_d3.hi_f64(),
        tv_c3.hi_f64(),
        big_blocks,
        perm.frequency_with_component_at_least(4)
    ))
}

fn a9_conditional_tail() -> Outcome {
    let small = conditional_tail_bound(Model::Partition, 900, 870).map_err(|e| e.to_string())?;
    ensure(!small.valid, || {
        format!("(900, 870) reported valid with {}", small.value)
    })?;
    let large = conditional_tail_bound(Model::Partition, 40000, 39800).map_err(|e| e.to_string())?;
    ensure(large.valid, || "(40000, 39800) reported invalid".into())?;
    ensure(large.value.le_rational(&q(3, 100)), || {
        format!("(40000, 39800) value {}", large.value)
    })?;
    ensure(!large.value.lo().to_rational().is_negative(), || {
        "negative tail bound".into()
    })?;
    Ok(format!(
        "(900,870) invalid; (40000,39800) valid, value {:.5}",
        large.value.hi_f64()
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("A1", "Stirling identity", Duration::from_secs(30), a1_stirling_identity),
        ("A2", "bijection soundness", Duration::from_secs(120), a2_bijections),
        (
            "A3",
            "Chen-Stein bound at desk scale",
            Duration::from_secs(60),
            a3_chen_stein_desk_scale,
        ),
        (
            "A4",
            "closed-form cross-identities",
            Duration::from_secs(10),
            a4_cross_identities,
        ),
        (
            "A5",
            "sandwich/LLL/Suen containment",
            Duration::from_secs(120),
            a5_containment,
        ),
        (
            "A6",
            "Monte Carlo consistency",
            Duration::from_secs(120),
            a6_monte_carlo,
        ),
        ("A7", "spectrum TV exactness", Duration::from_secs(60), a7_spectrum_tv),
        ("A8", "regime behavior", Duration::from_secs(300), a8_regime),
        (
            "A9",
            "conditional tail bound",
            Duration::from_secs(1),
            a9_conditional_tail,
        ),
    ];
    let mut failed = 0;
    for (id, name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let over = elapsed > budget;
        let (status, detail) = match &outcome {
            Ok(d) if !over => ("PASS", d.clone()),
            Ok(d) => ("FAIL", format!("{d}; over runtime budget")),
            Err(e) => ("FAIL", e.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!(
            "{id} {status} {name} [{:.2}s / {}s] {detail}",
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
