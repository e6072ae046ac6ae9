use std::io::Write;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

use rookstat_core::bounds::{
    chen_stein_report, compare_table, conditional_tail_bound, lll_lower, sandwich, suen_displayed, suen_upper,
    CompareRow, LsBound, COMPARE_CSV_HEADER, ENDPOINT_DIGITS,
};
use rookstat_core::interval::Round;
use rookstat_core::rook_board::{decode, encode};
use rookstat_core::spectra::{approx_law, empirical_spectrum, tv_spectrum_exact, SPECTRUM_CSV_HEADER};
use rookstat_core::stirling::stirling;
use rookstat_core::{Kind, Model, RealInterval, Structure};

use crate::args::{Format, Size};
use crate::decimal::{rational_json, to_decimal};
use crate::error::CliError;

type Out<'a> = &'a mut dyn Write;

fn lo(iv: &RealInterval) -> String {
    iv.lo().to_sci_string(ENDPOINT_DIGITS, Round::Down)
}

fn hi(iv: &RealInterval) -> String {
    iv.hi().to_sci_string(ENDPOINT_DIGITS, Round::Up)
}

fn interval_json(iv: &RealInterval) -> Value {
    json!({ "lo": lo(iv), "hi": hi(iv) })
}

fn ls_json(b: &LsBound) -> Value {
    json!({ "value": interval_json(&b.value), "valid": b.valid })
}

fn write_json(out: Out, v: &Value) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, v).map_err(std::io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

pub fn stirling_cmd(out: Out, kind: Kind, size: Size, format: Format) -> Result<(), CliError> {
    let value = stirling(kind, size.n, size.k);
    match format {
        Format::Text => writeln!(out, "{value}")?,
        Format::Csv => {
            writeln!(out, "kind,n,k,r,value")?;
            writeln!(out, "{kind},{},{},{},{value}", size.n, size.k, size.r)?;
        }
        Format::Json => write_json(
            out,
            &json!({ "kind": kind.as_str(), "n": size.n, "k": size.k, "r": size.r, "value": value.to_string() }),
        )?,
    }
    Ok(())
}

pub fn bounds_cmd(out: Out, size: Size, format: Format) -> Result<(), CliError> {
    let Size { n, k, r } = size;
    if n < 2 {
        return Err(CliError::config("n", format!("need n >= 2, got {n}")));
    }
    if k == 0 {
        return Err(CliError::config("r", format!("need r < n, got r = {r}")));
    }
    let report = chen_stein_report(n, r)?;
    let d_f64 = report.d.to_f64().unwrap_or(f64::NAN);

    let mut per_kind = Vec::new();
    for kind in [Kind::First, Kind::Second] {
        let exact = BigRational::from_integer(stirling(kind, n, k));
        per_kind.push((
            kind,
            exact,
            sandwich(kind, n, k)?,
            lll_lower(kind, n, k)?,
            suen_upper(kind, n, k)?,
            suen_displayed(kind, n, k)?,
        ));
    }
    let mut tails = Vec::new();
    for model in [Model::Partition, Model::Permutation] {
        tails.push((model, conditional_tail_bound(model, n, k)?));
    }

    match format {
        Format::Json => {
            let exact: Map<String, Value> = report
                .exact_fields()
                .into_iter()
                .map(|(name, v)| (name.to_string(), rational_json(v)))
                .collect();
            let mut kinds = Map::new();
            for (kind, exact_value, s, l, u, disp) in &per_kind {
                kinds.insert(
                    kind.as_str().to_string(),
                    json!({
                        "exact": to_decimal(exact_value),
                        "sandwich": {
                            "lower": interval_json(&s.lower),
                            "upper": interval_json(&s.upper),
                            "valid": s.valid,
                        },
                        "lll_lower": ls_json(l),
                        "suen_upper": ls_json(u),
                        "suen_displayed": {
                            "with_c2a": interval_json(&disp.with_c2a),
                            "with_c3a": interval_json(&disp.with_c3a),
                        },
                    }),
                );
            }
            let tail: Map<String, Value> = tails
                .iter()
                .map(|(m, b)| (m.as_str().to_string(), ls_json(b)))
                .collect();
            write_json(
                out,
                &json!({
                    "n": n,
                    "k": k,
                    "r": r,
                    "t": size.t(),
                    "d": d_f64,
                    "exact": exact,
                    "d_from_parts": rational_json(&report.d_from_parts()),
                    "cross_identity_holds": report.cross_identity_holds(),
                    "bounds": kinds,
                    "conditional_tail": tail,
                }),
            )?;
        }
        Format::Csv => {
            writeln!(out, "quantity,decimal,num,den")?;
            for (name, v) in report.exact_fields() {
                writeln!(out, "{name},{},{},{}", to_decimal(v), v.numer(), v.denom())?;
            }
            let dp = report.d_from_parts();
            writeln!(out, "d_from_parts,{},{},{}", to_decimal(&dp), dp.numer(), dp.denom())?;
            writeln!(out)?;
            writeln!(out, "bound,kind,lower,upper,valid")?;
            for (kind, _, s, l, u, disp) in &per_kind {
                writeln!(
                    out,
                    "sandwich_lower,{kind},{},{},{}",
                    lo(&s.lower),
                    hi(&s.lower),
                    s.valid
                )?;
                writeln!(
                    out,
                    "sandwich_upper,{kind},{},{},{}",
                    lo(&s.upper),
                    hi(&s.upper),
                    s.valid
                )?;
                writeln!(out, "lll_lower,{kind},{},{},{}", lo(&l.value), hi(&l.value), l.valid)?;
                writeln!(out, "suen_upper,{kind},{},{},{}", lo(&u.value), hi(&u.value), u.valid)?;
                writeln!(
                    out,
                    "suen_displayed_c2a,{kind},{},{},",
                    lo(&disp.with_c2a),
                    hi(&disp.with_c2a)
                )?;
                writeln!(
                    out,
                    "suen_displayed_c3a,{kind},{},{},",
                    lo(&disp.with_c3a),
                    hi(&disp.with_c3a)
                )?;
            }
            for (model, b) in &tails {
                writeln!(
                    out,
                    "conditional_tail,{model},{},{},{}",
                    lo(&b.value),
                    hi(&b.value),
                    b.valid
                )?;
            }
        }
        Format::Text => {
            writeln!(out, "n = {n}, k = {k}, r = {r}, t = {:.6}", size.t())?;
            for (name, v) in report.exact_fields() {
                writeln!(out, "{name:>12} = {}", to_decimal(v))?;
            }
            writeln!(out, "{:>12} = {}", "4(b1+b2)", to_decimal(&report.d_from_parts()))?;
            writeln!(out, "{:>12} = {}", "d matches", report.cross_identity_holds())?;
            for (kind, exact, s, l, u, _) in &per_kind {
                writeln!(out, "{kind} kind: exact {}", to_decimal(exact))?;
                let flag = |v: bool| if v { "" } else { " (invalid)" };
                writeln!(out, "  sandwich  [{}, {}]{}", lo(&s.lower), hi(&s.upper), flag(s.valid))?;
                writeln!(out, "  lll       >= {}{}", lo(&l.value), flag(l.valid))?;
                writeln!(out, "  suen      <= {}{}", hi(&u.value), flag(u.valid))?;
            }
            for (model, b) in &tails {
                let note = if b.valid { "" } else { " (invalid)" };
                writeln!(out, "conditional tail ({model}) <= {}{note}", hi(&b.value))?;
            }
        }
    }
    Ok(())
}

fn compare_json(row: &CompareRow) -> Value {
    json!({
        "kind": row.kind.as_str(),
        "n": row.n,
        "k": row.k,
        "r": row.r,
        "exact": row.exact.to_string(),
        "sandwich": {
            "lower": lo(&row.sandwich.lower),
            "upper": hi(&row.sandwich.upper),
            "valid": row.sandwich.valid,
        },
        "lll": { "lower": lo(&row.lll.value), "valid": row.lll.valid },
        "suen": { "upper": hi(&row.suen.value), "valid": row.suen.valid },
        "rel_err_sandwich_lo": row.rel_err_sandwich_lo(),
        "rel_err_sandwich_hi": row.rel_err_sandwich_hi(),
        "rel_err_lll": row.rel_err_lll(),
        "rel_err_suen": row.rel_err_suen(),
    })
}

/// Rows are computed in growing chunks of increasing `r` and flushed one by one.
pub fn compare_cmd(out: Out, kind: Kind, n: usize, k_min: usize, k_max: usize, format: Format) -> Result<(), CliError> {
    let mut chunk = 32usize;
    let mut first = true;
    let mut hi_k = k_max;
    loop {
        let lo_k = hi_k.saturating_sub(chunk - 1).max(k_min);
        let rows = compare_table(kind, n, lo_k, hi_k)?;
        if first {
            match format {
                Format::Csv => writeln!(out, "{COMPARE_CSV_HEADER}")?,
                Format::Json => writeln!(out, "[")?,
                Format::Text => writeln!(
                    out,
                    "{:>5} {:>5} {:>24} {:>24} {:>24} {:>24}",
                    "k", "r", "exact", "sandwich_lo", "lll", "suen"
                )?,
            }
        }
        for row in &rows {
            match format {
                Format::Csv => writeln!(out, "{}", row.csv_record())?,
                Format::Json => {
                    let sep = if first { "" } else { ",\n" };
                    let line = serde_json::to_string(&compare_json(row)).map_err(std::io::Error::from)?;
                    write!(out, "{sep}{line}")?;
                }
                Format::Text => {
                    let show = |v: bool, s: String| if v { s } else { "-".to_string() };
                    writeln!(
                        out,
                        "{:>5} {:>5} {:>24} {:>24} {:>24} {:>24}",
                        row.k,
                        row.r,
                        row.exact.to_string(),
                        show(row.sandwich.valid, lo(&row.sandwich.lower)),
                        show(row.lll.valid, lo(&row.lll.value)),
                        hi(&row.suen.value)
                    )?;
                }
            }
            first = false;
            out.flush()?;
        }
        if lo_k == k_min {
            break;
        }
        hi_k = lo_k - 1;
        chunk = (chunk * 2).min(512);
    }
    if format == Format::Json {
        writeln!(out, "\n]")?;
    }
    Ok(())
}

pub struct SampleConfig {
    pub model: Model,
    pub size: Size,
    pub samples: u64,
    pub seed: u64,
    pub shards: u64,
}

pub fn sample_cmd(out: Out, cfg: &SampleConfig, format: Format) -> Result<(), CliError> {
    let Size { n, k, r } = cfg.size;
    if k == 0 {
        return Err(CliError::config("k", "need k >= 1"));
    }
    if cfg.shards == 0 {
        return Err(CliError::config("shards", "need at least one shard"));
    }
    let e = empirical_spectrum(cfg.model, n, k, cfg.samples, cfg.seed, cfg.shards)?;
    match format {
        Format::Csv => {
            writeln!(out, "{SPECTRUM_CSV_HEADER}")?;
            for row in e.csv_rows() {
                writeln!(out, "{row}")?;
            }
        }
        Format::Text => {
            writeln!(
                out,
                "model = {}, n = {n}, k = {k}, r = {r}, t = {:.6}",
                cfg.model,
                cfg.size.t()
            )?;
            writeln!(
                out,
                "samples = {}, attempts = {}, seed = {}, shards = {}",
                e.sample_count, e.attempts, cfg.seed, cfg.shards
            )?;
            writeln!(out, "acceptance rate = {}", to_decimal(&e.acceptance_rate()))?;
            for (v, c) in &e.frequencies {
                writeln!(out, "{v:<24} {c:>10} {}", *c as f64 / e.sample_count as f64)?;
            }
        }
        Format::Json => {
            let law: Vec<Value> = e
                .frequencies
                .iter()
                .map(|(v, &c)| json!({ "spectrum": v.to_string(), "count": c, "probability": c as f64 / e.sample_count as f64 }))
                .collect();
            write_json(
                out,
                &json!({
                    "model": cfg.model.as_str(),
                    "n": n,
                    "k": k,
                    "r": r,
                    "t": cfg.size.t(),
                    "samples": e.sample_count,
                    "attempts": e.attempts,
                    "seed": cfg.seed,
                    "shards": cfg.shards,
                    "acceptance_rate": rational_json(&e.acceptance_rate()),
                    "law": law,
                }),
            )?;
        }
    }
    Ok(())
}

pub fn tv_cmd(out: Out, model: Model, size: Size, cap: usize, format: Format) -> Result<(), CliError> {
    let Size { n, k, r } = size;
    if k == 0 {
        return Err(CliError::config("k", "need k >= 1"));
    }
    let tv = tv_spectrum_exact(model, n, k, cap)?;
    let rate = approx_law(model, n, k)?.rate;
    match format {
        Format::Text => {
            writeln!(
                out,
                "model = {model}, n = {n}, k = {k}, r = {r}, rate = {}",
                to_decimal(&rate)
            )?;
            writeln!(out, "tv in [{}, {}]", lo(&tv), hi(&tv))?;
        }
        Format::Csv => {
            writeln!(out, "model,n,k,r,rate,tv_lower,tv_upper")?;
            writeln!(out, "{model},{n},{k},{r},{},{},{}", to_decimal(&rate), lo(&tv), hi(&tv))?;
        }
        Format::Json => write_json(
            out,
            &json!({
                "model": model.as_str(),
                "n": n,
                "k": k,
                "r": r,
                "t": size.t(),
                "rate": rational_json(&rate),
                "tv": interval_json(&tv),
            }),
        )?,
    }
    Ok(())
}

pub fn decode_cmd(out: Out, model: Model, placement: &str, format: Format) -> Result<(), CliError> {
    let p = placement
        .parse()
        .map_err(|e: rookstat_core::Error| CliError::config("placement", e.to_string()))?;
    let s = decode(&p, model)?;
    write_structure(out, &s, &p.to_string(), format)
}

pub fn encode_cmd(out: Out, model: Model, structure: &str, format: Format) -> Result<(), CliError> {
    let s = Structure::parse(model, structure).map_err(|e| CliError::config("structure", e.to_string()))?;
    let p = encode(&s);
    write_structure(out, &s, &p.to_string(), format)
}

fn write_structure(out: Out, s: &Structure, placement: &str, format: Format) -> Result<(), CliError> {
    let spectrum = s.spectrum();
    match format {
        Format::Text => writeln!(out, "{placement}\n{s}\n{spectrum}")?,
        Format::Csv => {
            writeln!(out, "model,placement,structure,spectrum")?;
            writeln!(out, "{},\"{placement}\",{s},{spectrum}", s.model())?;
        }
        Format::Json => write_json(
            out,
            &json!({
                "model": s.model().as_str(),
                "placement": placement,
                "structure": s.to_string(),
                "spectrum": spectrum.to_string(),
            }),
        )?,
    }
    Ok(())
}
