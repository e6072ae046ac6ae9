mod args;
mod commands;
mod decimal;
mod error;
mod verify;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;
use rookstat_core::stirling::DEFAULT_ENUM_CAP;

use args::{Cli, Command, Format, OutputArgs};
use commands::SampleConfig;
use error::CliError;

fn open(output: &OutputArgs) -> Result<Box<dyn Write>, CliError> {
    Ok(match &output.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cap = cli.cap.unwrap_or(DEFAULT_ENUM_CAP);
    let (output, default_format) = match &cli.command {
        Command::Stirling { output, .. }
        | Command::Bounds { output, .. }
        | Command::Tv { output, .. }
        | Command::Decode { output, .. }
        | Command::Encode { output, .. }
        | Command::Verify { output } => (output.clone(), Format::Text),
        Command::Compare { output, .. } | Command::Sample { output, .. } => (output.clone(), Format::Csv),
    };
    let format = output.format_or(default_format);

    // Resolve configuration before opening the output, so a bad config
    // never truncates an existing report.
    enum Job {
        Stirling(rookstat_core::Kind, args::Size),
        Bounds(args::Size),
        Compare(rookstat_core::Kind, usize, usize, usize),
        Sample(SampleConfig),
        Tv(rookstat_core::Model, args::Size),
        Decode(rookstat_core::Model, String),
        Encode(rookstat_core::Model, String),
        Verify,
    }
    let job = match cli.command {
        Command::Stirling { kind, size, .. } => Job::Stirling(kind.into(), size.resolve()?),
        Command::Bounds { size, .. } => Job::Bounds(size.resolve()?),
        Command::Compare {
            kind, n, k_min, k_max, ..
        } => {
            let k_min = k_min.unwrap_or(1);
            let k_max = k_max.unwrap_or(n);
            if k_min == 0 {
                return Err(CliError::config("k-min", "need k-min >= 1"));
            }
            if k_min > k_max || k_max > n {
                return Err(CliError::config(
                    "k-max",
                    format!("need k-min <= k-max <= n, got {k_min}..={k_max}, n = {n}"),
                ));
            }
            Job::Compare(kind.into(), n, k_min, k_max)
        }
        Command::Sample {
            model,
            size,
            samples,
            seed,
            shards,
            ..
        } => {
            let seed = seed.ok_or_else(|| CliError::config("seed", "sampling requires --seed"))?;
            if samples == 0 {
                return Err(CliError::config("samples", "need at least one sample"));
            }
            if shards == 0 {
                return Err(CliError::config("shards", "need at least one shard"));
            }
            Job::Sample(SampleConfig {
                model: model.into(),
                size: size.resolve()?,
                samples,
                seed,
                shards,
            })
        }
        Command::Tv { model, size, .. } => Job::Tv(model.into(), size.resolve()?),
        Command::Decode { model, placement, .. } => Job::Decode(model.into(), placement),
        Command::Encode { model, structure, .. } => Job::Encode(model.into(), structure),
        Command::Verify { .. } => Job::Verify,
    };

    let mut out = open(&output)?;
    let result = match job {
        Job::Stirling(kind, size) => commands::stirling_cmd(&mut out, kind, size, format),
        Job::Bounds(size) => commands::bounds_cmd(&mut out, size, format),
        Job::Compare(kind, n, k_min, k_max) => commands::compare_cmd(&mut out, kind, n, k_min, k_max, format),
        Job::Sample(cfg) => commands::sample_cmd(&mut out, &cfg, format),
        Job::Tv(model, size) => commands::tv_cmd(&mut out, model, size, cap, format),
        Job::Decode(model, p) => commands::decode_cmd(&mut out, model, &p, format),
        Job::Encode(model, s) => commands::encode_cmd(&mut out, model, &s, format),
        Job::Verify => verify::run(&mut out, format),
    };
    out.flush()?;
    result
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rookstat: {e}");
            e.exit_code()
        }
    }
}
