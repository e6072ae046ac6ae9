//! The invariant suite behind `rookstat verify`.

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::json;

use rookstat_core::bounds::{chen_stein_report, lll_lower, sandwich, suen_upper};
use rookstat_core::coincidence::{
    coincidence_vector, exhaustive_coincidence_law, no_attack_probability, sample_coincidence_moments,
    PairProbabilities, DEFAULT_EXHAUSTIVE_CAP,
};
use rookstat_core::rook_board::{
    count_nonattacking, decode, encode, for_each_nonattacking_placement, has_attack, Mark, RookPlacement,
};
use rookstat_core::sampling::shard_rng;
use rookstat_core::spectra::{approx_law, empirical_spectrum, tv_spectrum_exact, RejectionSampler};
use rookstat_core::stirling::{enum_structures, exact_spectrum_law, factorial, stirling};
use rookstat_core::{Kind, Model, RealInterval, Structure};

use crate::args::Format;
use crate::error::CliError;

type Check = Result<String, String>;
type Property = (&'static str, fn() -> Check);

const MODELS: [Model; 2] = [Model::Partition, Model::Permutation];

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

fn core<T>(r: rookstat_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn pairs(r: usize) -> BigRational {
    int(r * r.saturating_sub(1) / 2)
}

fn stirling_matches_enumeration() -> Check {
    let mut cells = 0;
    for model in MODELS {
        for n in 0..=9usize {
            for k in 0..=n {
                let count = core(enum_structures(model, n, k, 9))?.len();
                ensure(BigInt::from(count) == stirling(model.kind(), n, k), || {
                    format!("{model} n={n} k={k}")
                })?;
                cells += 1;
            }
        }
    }
    Ok(format!("{cells} cells"))
}

fn stirling_row_sums() -> Check {
    for n in 0..=9usize {
        let bell: usize = (0..=n)
            .map(|k| enum_structures(Model::Partition, n, k, 9).map(|v| v.len()))
            .sum::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        let s_sum: BigInt = (0..=n).map(|k| stirling(Kind::Second, n, k)).sum();
        let c_sum: BigInt = (0..=n).map(|k| stirling(Kind::First, n, k)).sum();
        ensure(s_sum == BigInt::from(bell), || format!("Bell({n})"))?;
        ensure(c_sum == factorial(n), || format!("{n}!"))?;
    }
    Ok("n <= 9".into())
}

fn spectrum_conservation() -> Check {
    for model in MODELS {
        for n in 1..=9usize {
            for k in 1..=n {
                for (v, _) in core(exact_spectrum_law(model, n, k, 9))?.iter() {
                    ensure(v.component_count() == k as u64 && v.total_size() == n as u64, || {
                        format!("{model} {v} at ({n},{k})")
                    })?;
                }
            }
        }
    }
    Ok("n <= 9".into())
}

fn round_trip() -> Check {
    let mut count = 0;
    for model in MODELS {
        for n in 1..=9usize {
            for k in 1..=n {
                for x in core(enum_structures(model, n, k, 9))? {
                    let p = encode(&x);
                    ensure(p.r() == n - k && !has_attack(&p, model), || {
                        format!("encode({x}) = {p}")
                    })?;
                    ensure(core(decode(&p, model))? == x, || format!("round trip of {x}"))?;
                    count += 1;
                }
            }
        }
    }
    Ok(format!("{count} structures"))
}

fn placement_counts() -> Check {
    for model in MODELS {
        for n in 1..=9usize {
            for r in 0..n {
                let c = count_nonattacking(n, r, model);
                ensure(BigInt::from(c) == stirling(model.kind(), n, n - r), || {
                    format!("{model} n={n} r={r}: {c}")
                })?;
            }
        }
    }
    Ok("n <= 9".into())
}

fn decode_shapes() -> Check {
    for model in MODELS {
        for n in 1..=7usize {
            for r in 0..n {
                let mut bad = None;
                for_each_nonattacking_placement(n, r, model, |p| {
                    if bad.is_none() {
                        match decode(p, model) {
                            Ok(s) if s.component_count() == n - r => {}
                            _ => bad = Some(p.to_string()),
                        }
                    }
                });
                if let Some(p) = bad {
                    return Err(format!("{model}: {p} has wrong component count"));
                }
            }
        }
    }
    let aligned: RookPlacement = core("5;(1,2),(2,4)".parse())?;
    let s = core(decode(&aligned, Model::Partition))?;
    ensure(s.spectrum().get(3) == 1 && s.to_string() == "1 2 4|3|5", || {
        format!("alignment decodes to {s}")
    })?;
    let same_row: RookPlacement = core("5;(2,3),(2,5)".parse())?;
    let c = core(decode(&same_row, Model::Permutation))?;
    ensure(c.to_string() == "(1)(2 3 5)(4)", || {
        format!("same-row rooks decode to {c}")
    })?;
    Ok("component counts n - r (n <= 7); orientation checks".into())
}

fn coincidence_marginals_and_identity() -> Check {
    for n in 2..=7usize {
        let pp = core(PairProbabilities::new(n))?;
        for r in 0..=3usize.min(n - 1) {
            let law = core(exhaustive_coincidence_law(n, r, DEFAULT_EXHAUSTIVE_CAP))?;
            let mean = |m: Mark| law.expectation(|v| int(v.get(m)));
            ensure(
                mean(Mark::RR) == pairs(r) * &pp.p && mean(Mark::CC) == pairs(r) * &pp.p,
                || format!("RR/CC mean at ({n},{r})"),
            )?;
            ensure(
                mean(Mark::RC) == pairs(r) * &pp.q && mean(Mark::CR) == pairs(r) * &pp.q,
                || format!("RC/CR mean at ({n},{r})"),
            )?;
            let part = law.probability(|v| v.w_rr == 0 && v.w_cc == 0);
            let perm = law.probability(|v| v.w_cc == 0);
            ensure(part == core(no_attack_probability(Model::Partition, n, r))?, || {
                format!("partition identity at ({n},{r})")
            })?;
            ensure(perm == core(no_attack_probability(Model::Permutation, n, r))?, || {
                format!("permutation identity at ({n},{r})")
            })?;
            let bound = BigRational::new(BigInt::from(r * r * r), BigInt::from(3 * n * n));
            ensure(law.expectation(|v| int(v.r2)) <= bound, || {
                format!("E[R2] at ({n},{r})")
            })?;
        }
    }
    Ok("n <= 7, r <= 3".into())
}

fn structure_equivalence() -> Check {
    let mut checked = 0u64;
    for n in 2..=7usize {
        for r in 0..=3usize.min(n - 1) {
            for model in MODELS {
                let approx = core(approx_law(model, n, n - r))?;
                let mut bad = None;
                for_each_nonattacking_placement(n, r, model, |p| {
                    checked += 1;
                    let v = coincidence_vector(p);
                    let spec = decode(p, model).expect("non-attacking").spectrum();
                    let (w, overlap) = match model {
                        Model::Partition => (v.w_l(), v.r2),
                        Model::Permutation => (v.w_p(), v.r1),
                    };
                    let small = spec.largest_component() <= 3 && spec.get(3) == w;
                    let mapped = overlap != 0 || approx.vector_map(w).as_ref() == Some(&spec);
                    if (small != (overlap == 0) || !mapped) && bad.is_none() {
                        bad = Some(format!("{model} {p}"));
                    }
                });
                if let Some(b) = bad {
                    return Err(b);
                }
            }
        }
    }
    Ok(format!("{checked} placements"))
}

fn coincidence_monte_carlo() -> Check {
    let (n, r) = (400usize, 20usize);
    let m = core(sample_coincidence_moments(n, r, 100_000, 1, 8))?;
    let pp = core(PairProbabilities::new(n))?;
    let c = (r * (r - 1) / 2) as f64;
    let (p, q) = (pp.p.to_f64().unwrap(), pp.q.to_f64().unwrap());
    let mut worst = 0f64;
    for (mark, want) in [
        (Mark::RR, c * p),
        (Mark::CC, c * p),
        (Mark::RC, c * q),
        (Mark::CR, c * q),
    ] {
        let z = (m.mean(mark) - want).abs() / m.std_err(mark);
        ensure(z <= 4.0, || format!("{mark:?}: {} vs {want} ({z:.2} se)", m.mean(mark)))?;
        worst = worst.max(z);
    }
    Ok(format!("max deviation {worst:.2} se"))
}

fn cross_identity() -> Check {
    let mut failures = 0;
    let mut first = None;
    for n in 2..=200usize {
        for r in 0..=20usize {
            let rep = core(chen_stein_report(n, r))?;
            if !rep.cross_identity_holds() {
                failures += 1;
                first.get_or_insert((n, r));
            }
        }
    }
    match first {
        None => Ok("all cells".into()),
        Some((n, r)) => Err(format!(
            "closed-form d differs from 4(b1+b2) on {failures} cells, first at n={n} r={r}"
        )),
    }
}

fn chen_stein_desk_scale() -> Check {
    for n in [5usize, 6, 7] {
        for r in [2usize, 3] {
            let rep = core(chen_stein_report(n, r))?;
            let law = core(exhaustive_coincidence_law(n, r, DEFAULT_EXHAUSTIVE_CAP))?;
            let joint = law.map(|v| v.marks());
            let means = [
                pairs(r) * &rep.p,
                pairs(r) * &rep.p,
                pairs(r) * &rep.q,
                pairs(r) * &rep.q,
            ];
            let base: Vec<RealInterval> = means.iter().map(|m| (-RealInterval::from_rational(m)).exp()).collect();
            let pmf =
                |i: usize, z: u64| (1..=z).fold(base[i].clone(), |acc, j| acc.mul_rational(&(&means[i] / int(j))));
            let mut covered = RealInterval::zero();
            let mut tv = RealInterval::zero();
            for (v, mass) in joint.iter() {
                let prod = (0..4).fold(RealInterval::one(), |acc, i| &acc * &pmf(i, v[i]));
                covered = &covered + &prod;
                tv = &tv + &(RealInterval::from_rational(mass) - prod).abs();
            }
            let tv = (&tv + &(RealInterval::one() - covered)).mul_rational(&BigRational::new(1.into(), 2.into()));
            ensure(tv.le_rational(&rep.d), || format!("TV at ({n},{r}) exceeds d"))?;

            let p0 = law.probability(|v| v.w_cc == 0);
            let err = (RealInterval::from_rational(&p0) - (-RealInterval::from_rational(&rep.lambda_c)).exp()).abs();
            let factor = if rep.lambda_c > BigRational::one() {
                rep.lambda_c.recip()
            } else {
                BigRational::one()
            };
            ensure(err.le_rational(&(factor * (&rep.b1 + &rep.b2))), || {
                format!("point bound at ({n},{r})")
            })?;
        }
    }
    Ok("n in {5,6,7}, r in {2,3}".into())
}

fn bound_containment() -> Check {
    let mut valid = [0u32; 3];
    for kind in [Kind::First, Kind::Second] {
        for n in 2..=60usize {
            for k in 1..=n {
                let exact = int(stirling(kind, n, k));
                let s = core(sandwich(kind, n, k))?;
                let l = core(lll_lower(kind, n, k))?;
                let u = core(suen_upper(kind, n, k))?;
                if s.valid {
                    valid[0] += 1;
                    ensure(s.lower.le_rational(&exact) && s.upper.ge_rational(&exact), || {
                        format!("sandwich {kind} ({n},{k})")
                    })?;
                }
                if l.valid {
                    valid[1] += 1;
                    ensure(l.value.le_rational(&exact), || format!("LLL {kind} ({n},{k})"))?;
                }
                if u.valid {
                    valid[2] += 1;
                    ensure(u.value.ge_rational(&exact), || format!("Suen {kind} ({n},{k})"))?;
                }
            }
        }
    }
    Ok(format!(
        "valid sandwich {}, LLL {}, Suen {}",
        valid[0], valid[1], valid[2]
    ))
}

fn d_monotone() -> Check {
    for n in 2..=200usize {
        let mut prev = BigRational::zero();
        for r in 0..=40usize {
            let d = core(chen_stein_report(n, r))?.d;
            ensure(d >= prev, || format!("d decreases at n={n} r={r}"))?;
            prev = d;
        }
    }
    Ok("n <= 200, r <= 40".into())
}

fn sampled_spectra() -> Check {
    let mut rng = shard_rng(17, 0);
    for model in MODELS {
        for (n, k) in [(8usize, 5usize), (60, 52), (400, 380)] {
            let approx = core(approx_law(model, n, k))?;
            let mut sampler = core(RejectionSampler::new(model, n, k))?;
            for _ in 0..300 {
                let (p, _) = core(sampler.sample_placement(&mut rng))?;
                let spec = core(decode(&p, model))?.spectrum();
                ensure(
                    spec.component_count() == k as u64 && spec.total_size() == n as u64,
                    || format!("{model} {spec} at ({n},{k})"),
                )?;
                let v = coincidence_vector(&p);
                let (w, overlap) = match model {
                    Model::Partition => (v.w_l(), v.r2),
                    Model::Permutation => (v.w_p(), v.r1),
                };
                ensure(overlap != 0 || approx.vector_map(w).as_ref() == Some(&spec), || {
                    format!("{model} {p} vs vector map")
                })?;
            }
        }
    }
    Ok("300 samples per cell".into())
}

fn tv_regime_monotone() -> Check {
    let mut report = Vec::new();
    let mut ok = true;
    for model in MODELS {
        let tvs: Vec<f64> = [8usize, 10, 12]
            .iter()
            .map(|&n| {
                let r = (n as f64).sqrt().floor() as usize;
                tv_spectrum_exact(model, n, n - r, 12).map(|t| t.midpoint_f64())
            })
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        ok &= tvs.windows(2).all(|w| w[1] <= w[0]);
        report.push(format!("{model} {:.4} {:.4} {:.4}", tvs[0], tvs[1], tvs[2]));
    }
    let detail = format!("n = 8, 10, 12 with r = floor(sqrt n): {}", report.join("; "));
    if ok {
        Ok(detail)
    } else {
        Err(format!("not non-increasing: {detail}"))
    }
}

fn acceptance_rate() -> Check {
    let mut worst = 0f64;
    for model in MODELS {
        for (n, k) in [(8usize, 5usize), (400, 380)] {
            let samples = 100_000u64;
            let e = core(empirical_spectrum(model, n, k, samples, 23, 8))?;
            let p = core(no_attack_probability(model, n, n - k))?.to_f64().unwrap();
            let m = samples as f64;
            let z = (e.attempts as f64 / m - 1.0 / p).abs() / ((1.0 - p).sqrt() / p / m.sqrt());
            ensure(z <= 4.0, || format!("{model} ({n},{k}): {z:.2} sd"))?;
            worst = worst.max(z);
        }
    }
    Ok(format!("max deviation {worst:.2} sd"))
}

fn single_rook_tv() -> Check {
    for model in MODELS {
        for n in 2..=12usize {
            let tv = core(tv_spectrum_exact(model, n, n - 1, 12))?;
            let rate = core(approx_law(model, n, n - 1))?.rate;
            let want = RealInterval::one() - (-RealInterval::from_rational(&rate)).exp();
            ensure((&tv - &want).abs().hi_f64() < 1e-30, || {
                format!("{model} n={n}: {tv} vs {want}")
            })?;
        }
    }
    Ok("n <= 12".into())
}

fn text_formats() -> Check {
    for (model, s) in [(Model::Partition, "1 3 6|2|4|5"), (Model::Permutation, "(1 3 2)(4)")] {
        let x = core(Structure::parse(model, s))?;
        ensure(x.to_string() == s, || format!("{s} renders as {x}"))?;
        let p = encode(&x);
        let back: RookPlacement = core(p.to_string().parse())?;
        ensure(back == p, || format!("placement {p}"))?;
    }
    Ok("partitions, permutations, placements".into())
}

pub fn run(out: &mut dyn Write, format: Format) -> Result<(), CliError> {
    let checks: [Property; 18] = [
        ("stirling: recurrence equals enumeration", stirling_matches_enumeration),
        ("stirling: row sums are Bell numbers and factorials", stirling_row_sums),
        ("stirling: exact spectra conserve n and k", spectrum_conservation),
        ("rook_board: decode(encode(x)) = x", round_trip),
        (
            "rook_board: non-attacking counts equal Stirling numbers",
            placement_counts,
        ),
        ("rook_board: decode component counts and orientation", decode_shapes),
        ("rook_board: text formats round trip", text_formats),
        (
            "coincidence: marginals, no-attack identity, E[R2] bound",
            coincidence_marginals_and_identity,
        ),
        (
            "coincidence: structure equivalence and vector map",
            structure_equivalence,
        ),
        ("coincidence: Monte Carlo means at (400, 20)", coincidence_monte_carlo),
        ("bounds: d equals 4(b1 + b2)", cross_identity),
        (
            "bounds: Chen-Stein TV and point bounds at desk scale",
            chen_stein_desk_scale,
        ),
        (
            "bounds: sandwich, LLL and Suen contain the exact value",
            bound_containment,
        ),
        ("bounds: d non-decreasing in r", d_monotone),
        (
            "spectra: sampled spectra conserve n, k and follow the vector map",
            sampled_spectra,
        ),
        ("spectra: TV non-increasing along r = floor(sqrt n)", tv_regime_monotone),
        (
            "spectra: acceptance rate matches no-attack probability",
            acceptance_rate,
        ),
        ("spectra: one-rook TV equals 1 - exp(-rate)", single_rook_tv),
    ];
    if format == Format::Csv {
        writeln!(out, "property,pass,detail")?;
    }
    let mut failed = 0;
    let mut records = Vec::new();
    for (name, check) in checks {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let (pass, detail) = match result {
            Ok(d) => (true, d),
            Err(d) => {
                failed += 1;
                (false, d)
            }
        };
        match format {
            Format::Text => writeln!(out, "{} {name}: {detail}", if pass { "PASS" } else { "FAIL" })?,
            Format::Csv => writeln!(out, "\"{name}\",{pass},\"{}\"", detail.replace('"', "'"))?,
            Format::Json => {}
        }
        out.flush()?;
        records.push(json!({ "property": name, "pass": pass, "detail": detail }));
    }
    if format == Format::Json {
        serde_json::to_writer_pretty(&mut *out, &records).map_err(std::io::Error::from)?;
        writeln!(out)?;
    }
    if failed > 0 {
        return Err(CliError::VerifyFailed(failed));
    }
    Ok(())
}
