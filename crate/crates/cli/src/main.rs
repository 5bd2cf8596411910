mod args;
mod commands;
mod manifest;

use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::error::ErrorKind;
use clap::Parser;

use args::Cli;
use commands::Failure;
use manifest::{write_manifest, Run, RunManifest};

const EXIT_VALIDATION: u8 = 2;
const EXIT_LIKELIHOOD: u8 = 3;
const EXIT_USAGE: u8 = 64;

fn clock_seed() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_nanos() as u64)
}

fn configure_threads() {
    if let Some(n) = std::env::var("PMMF_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    configure_threads();
    let seed = cli.common.seed.unwrap_or_else(clock_seed);
    let mut run = match Run::new(cli.common.out.clone(), seed) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: cannot create {}: {e}", cli.common.out.display());
            return ExitCode::from(EXIT_VALIDATION);
        }
    };
    let start = Instant::now();
    let result = commands::dispatch(&cli, &mut run);
    let (code, error) = match &result {
        Ok(()) => (0, None),
        Err(f) => {
            eprintln!("error: {f}");
            let code = match f {
                Failure::Core(e) if is_likelihood_error(e) => EXIT_LIKELIHOOD,
                _ => EXIT_VALIDATION,
            };
            (code, Some(f.to_string()))
        }
    };
    let mut config = serde_json::to_value(&cli).unwrap_or(serde_json::Value::Null);
    if let Some(obj) = config.as_object_mut() {
        if let Some(common) = obj.get_mut("common").and_then(|c| c.as_object_mut()) {
            common.insert("seed".into(), seed.into());
        }
        obj.insert("resolved".into(), serde_json::Value::Object(run.resolved.clone()));
    }
    let manifest = RunManifest {
        subcommand: cli.command.name().to_string(),
        config,
        seed,
        inputs: run.inputs.clone(),
        outputs: run.outputs.clone(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        duration_secs: start.elapsed().as_secs_f64(),
        exit_code: i32::from(code),
        error,
    };
    if let Err(e) = write_manifest(&run.out, &manifest) {
        eprintln!("error: cannot write manifest: {e}");
    }
    ExitCode::from(code)
}

fn is_likelihood_error(e: &pmmf_core::Error) -> bool {
    matches!(
        e,
        pmmf_core::Error::ZeroLikelihood { .. } | pmmf_core::Error::InvalidWindow(_) | pmmf_core::Error::BlockTooLong { .. }
    )
}
