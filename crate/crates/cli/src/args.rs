use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(name = "pmmf", version, about = "Smoothing and forgetting diagnostics for pairwise Markov models")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Serialize)]
pub struct Common {
    /// Model JSON file, or the name of a bundled model such as `mod4.json`.
    #[arg(long, global = true)]
    pub model: Option<String>,
    /// Output directory.
    #[arg(long, global = true, default_value = "pmmf-out")]
    pub out: PathBuf,
    /// Root seed; chosen from the clock and recorded when omitted.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Start {
    Initial,
    Stationary,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Auto,
    Enumerate,
    Cluster,
    PositiveRow,
    Lmsm,
    /// Certify, then bound the routing ratio through `--via` at `--split`.
    Sopot,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Draw a trajectory from the model.
    Simulate {
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, value_enum, default_value = "initial")]
        start: Start,
    },
    /// Law of a hidden block given an observation window.
    Smooth {
        #[arg(long)]
        obs: PathBuf,
        #[arg(long)]
        t: usize,
        #[arg(long, default_value_t = 1)]
        m: usize,
        /// Window `l:n`; the whole file by default.
        #[arg(long, value_parser = parse_window)]
        window: Option<(usize, usize)>,
        #[arg(long, value_enum, default_value = "initial")]
        start: Start,
    },
    /// Marginal-posterior state sequence.
    Decode {
        #[arg(long)]
        obs: PathBuf,
    },
    /// Check the forgetting conditions and emit a certificate.
    Check {
        #[arg(long, value_enum, default_value = "auto")]
        method: Method,
        #[arg(long, default_value_t = 8)]
        r_max: usize,
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        /// Split time inside the block for `sopot`.
        #[arg(long, default_value_t = 2)]
        split: usize,
        /// Routing state for `sopot`.
        #[arg(long, default_value_t = 0)]
        via: usize,
        /// Sampled blocks for `sopot` when the block set is not finite.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[command(flatten)]
        cert: CertArgs,
    },
    /// Distance between smoothers started at `l` and at `s`, as `t` grows.
    ForgetCurve {
        #[arg(long, default_value_t = 1)]
        l: usize,
        #[arg(long, default_value_t = 5)]
        s: usize,
        /// Largest block start.
        #[arg(long, default_value_t = 200)]
        t: usize,
        #[arg(long, default_value_t = 5)]
        t_step: usize,
        /// Path length.
        #[arg(long, default_value_t = 300)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, default_value_t = 100)]
        paths: usize,
        #[arg(long, value_enum, default_value = "initial")]
        start: Start,
        #[command(flatten)]
        cert: CertArgs,
        /// Also write a gnuplot script for the curves.
        #[arg(long)]
        plot: bool,
    },
    /// Distance between window smoothers and the whole-path smoother.
    TwoSided {
        /// Block start.
        #[arg(long, default_value_t = 100)]
        t: usize,
        /// Path length.
        #[arg(long, default_value_t = 200)]
        n: usize,
        /// Window depths used on both sides.
        #[arg(long, value_delimiter = ',', default_value = "0,1,2,4,8,16,32")]
        depths: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, default_value_t = 50)]
        paths: usize,
        #[command(flatten)]
        cert: CertArgs,
    },
    /// Marginal-posterior segmentation with per-site confidence.
    Segment {
        #[arg(long)]
        obs: PathBuf,
    },
    /// Monte Carlo estimate of the per-site decoding error.
    EstimateR {
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        #[arg(long)]
        burn_l: Option<usize>,
        #[arg(long)]
        burn_s: Option<usize>,
        /// Smooth one long path and report no truncation bound.
        #[arg(long)]
        no_bound: bool,
        #[command(flatten)]
        cert: CertArgs,
    },
}

#[derive(Debug, Args, Serialize)]
pub struct CertArgs {
    /// Certificate JSON from `check`; derived automatically when omitted.
    #[arg(long)]
    pub cert: Option<PathBuf>,
    /// Run without any certificate.
    #[arg(long, conflicts_with = "cert")]
    pub no_cert: bool,
}

fn parse_window(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(':').ok_or("expected l:n")?;
    let l = a.trim().parse::<usize>().map_err(|e| e.to_string())?;
    let n = b.trim().parse::<usize>().map_err(|e| e.to_string())?;
    if l == 0 || l > n {
        return Err("need 1 <= l <= n".into());
    }
    Ok((l, n))
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate { .. } => "simulate",
            Command::Smooth { .. } => "smooth",
            Command::Decode { .. } => "decode",
            Command::Check { .. } => "check",
            Command::ForgetCurve { .. } => "forget-curve",
            Command::TwoSided { .. } => "two-sided",
            Command::Segment { .. } => "segment",
            Command::EstimateR { .. } => "estimate-r",
        }
    }
}
