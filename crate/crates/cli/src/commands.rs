use std::fmt;
use std::fmt::Write as _;
use std::path::Path;

use pmmf_core::bundled;
use pmmf_core::condition::cells::N0_SAMPLES;
use pmmf_core::condition::{
    certify, certify_by_cluster, check_a1_a2_finite, check_lmsm, check_positive_row, check_sopot, find_clusters, CheckOutcome,
    ForgettingCertificate,
};
use pmmf_core::forgetting::{
    one_sided_experiment, two_sided_experiment, ForgettingExperiment, OneSidedConfig, TwoSidedBounds, TwoSidedConfig,
};
use pmmf_core::inference::{pmap_decode, smoothing_block};
use pmmf_core::model::{
    parse_model, read_obs_csv, reversed_model, sample_path, validate_model, write_obs_csv, write_trajectory_csv,
    Trajectory,
};
use pmmf_core::rng::seeded_rng;
use pmmf_core::segmentation::{default_burn, estimate_r, expected_error, EstimateRConfig};
use pmmf_core::{Error, Model, Obs, StartLaw};

use crate::args::{CertArgs, Cli, Command, Method, Start};
use crate::manifest::Run;

/// Default window burn-in is capped so that weak certificates stay usable.
const BURN_CAP: usize = 1000;
const BURN_TOL: f64 = 1e-6;

#[derive(Debug)]
pub enum Failure {
    Core(Error),
    Validation(String),
    Io(std::io::Error),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Validation(m) => write!(f, "{m}"),
            Failure::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

type Outcome = Result<(), Failure>;

fn start_law(s: Start) -> StartLaw {
    match s {
        Start::Initial => StartLaw::Initial,
        Start::Stationary => StartLaw::Stationary,
    }
}

fn read_input(run: &mut Run, path: &Path) -> Result<Vec<u8>, Failure> {
    let bytes = std::fs::read(path)?;
    run.record_input(&path.display().to_string(), &bytes);
    Ok(bytes)
}

fn load_model(cli: &Cli, run: &mut Run) -> Result<Model, Failure> {
    let name = cli.common.model.as_deref().ok_or_else(|| Failure::Validation("--model is required".into()))?;
    let path = Path::new(name);
    let text = if path.exists() {
        String::from_utf8(read_input(run, path)?).map_err(|e| Failure::Validation(e.to_string()))?
    } else {
        let file = path.file_name().and_then(|f| f.to_str()).unwrap_or(name);
        let text = bundled::by_name(file)
            .ok_or_else(|| Failure::Validation(format!("model file {name} not found")))?;
        run.record_input(&format!("bundled:{file}"), text.as_bytes());
        text.to_string()
    };
    let model = parse_model(&text)?;
    let report = validate_model(&model);
    if !report.is_valid() {
        run.write_json("validation.json", &report)?;
        return Err(Failure::Validation(format!("model failed validation with {} issues", report.issues.len())));
    }
    Ok(model)
}

fn load_obs(run: &mut Run, model: &Model, path: &Path) -> Result<Vec<Obs>, Failure> {
    let bytes = read_input(run, path)?;
    Ok(read_obs_csv(bytes.as_slice(), model.obs_space())?)
}

fn load_certificate(run: &mut Run, model: &Model, args: &CertArgs) -> Result<Option<ForgettingCertificate>, Failure> {
    if args.no_cert {
        run.resolve("certificate", "none");
        return Ok(None);
    }
    if let Some(path) = &args.cert {
        let text = String::from_utf8(read_input(run, path)?).map_err(|e| Failure::Validation(e.to_string()))?;
        run.resolve("certificate", path.display().to_string());
        return Ok(Some(ForgettingCertificate::from_json(&text)?));
    }
    match certify(model) {
        Ok(c) => {
            run.resolve("certificate", "derived");
            run.write_json("certificate.json", &c)?;
            Ok(Some(c))
        }
        Err(e) => {
            run.resolve("certificate", format!("none: {e}"));
            Ok(None)
        }
    }
}

fn reversed_certificate(run: &mut Run, model: &Model, want: bool) -> Option<(Model, ForgettingCertificate)> {
    if !want {
        return None;
    }
    let pair = reversed_model(model).and_then(|rev| certify(&rev).map(|c| (rev, c)));
    match pair {
        Ok(p) => {
            run.resolve("reversed_certificate", "derived");
            Some(p)
        }
        Err(e) => {
            run.resolve("reversed_certificate", format!("none: {e}"));
            None
        }
    }
}

fn path_string(path: &[usize]) -> String {
    if path.iter().all(|&s| s < 10) {
        path.iter().map(|s| s.to_string()).collect()
    } else {
        path.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",")
    }
}

pub fn dispatch(cli: &Cli, run: &mut Run) -> Outcome {
    let model = load_model(cli, run)?;
    let seed = run.seed;
    match &cli.command {
        Command::Simulate { n, start } => {
            let (xs, ys) = sample_path(&model, *n, &start_law(*start), &mut seeded_rng(seed))?;
            let traj = Trajectory { xs, ys, seed };
            let mut buf = Vec::new();
            write_trajectory_csv(&mut buf, &traj)?;
            run.write("trajectory.csv", &buf)?;
            let mut obs = Vec::new();
            write_obs_csv(&mut obs, &traj.xs)?;
            run.write("obs.csv", &obs)?;
        }
        Command::Smooth { obs, t, m, window, start } => {
            let xs = load_obs(run, &model, obs)?;
            let window = window.unwrap_or((1, xs.len()));
            run.resolve("window", window);
            let law = smoothing_block(&model, &xs, window, *t, *m, &start_law(*start))?;
            run.write_json("smoothing.json", &law)?;
        }
        Command::Decode { obs } => {
            let xs = load_obs(run, &model, obs)?;
            let path = pmap_decode(&model, &xs)?;
            run.write("path.txt", format!("{}\n", path_string(&path)).as_bytes())?;
            let mut csv = String::from("t,y\n");
            for (t, y) in path.iter().enumerate() {
                let _ = writeln!(csv, "{},{y}", t + 1);
            }
            run.write("path.csv", csv.as_bytes())?;
        }
        Command::Segment { obs } => {
            let xs = load_obs(run, &model, obs)?;
            let seg = expected_error(&model, &xs)?;
            run.write("path.txt", format!("{}\n", path_string(&seg.path)).as_bytes())?;
            run.write_json("segmentation.json", &seg)?;
        }
        Command::Check { method: Method::Sopot, split, via, samples, cert, .. } => {
            let cert = load_certificate(run, &model, cert)?
                .ok_or_else(|| Failure::Validation("sopot needs a certificate".into()))?;
            let out = check_sopot(&model, &cert, *split, *via, *samples, &mut seeded_rng(run.seed))?;
            run.write_json("sopot.json", &out)?;
        }
        Command::Check { method, r_max, epsilon, .. } => check(run, &model, *method, *r_max, *epsilon)?,
        Command::ForgetCurve { l, s, t, t_step, n, m, paths, start, cert, plot } => {
            let cert = load_certificate(run, &model, cert)?;
            let ts: Vec<usize> = (*s..=*t).step_by((*t_step).max(1)).collect();
            let mut cfg = OneSidedConfig::new(*l, *s, ts, *n);
            cfg.m = *m;
            cfg.n_paths = *paths;
            cfg.seed = seed;
            cfg.start = start_law(*start);
            let res = one_sided_experiment(&model, cert.as_ref(), &cfg)?;
            write_curves(run, &res)?;
            if *plot {
                run.write("forget_curve.gp", plot_script(&run.path("forget_curve.csv")).as_bytes())?;
            }
        }
        Command::TwoSided { t, n, depths, m, paths, cert } => {
            let cert = load_certificate(run, &model, cert)?;
            let rev = reversed_certificate(run, &model, true);
            let mut l_grid: Vec<usize> = depths.iter().copied().filter(|&d| d < *t).collect();
            let mut s_grid: Vec<usize> = depths.iter().map(|&d| d.max(m.saturating_sub(1))).filter(|&d| t + d <= *n).collect();
            l_grid.dedup();
            s_grid.dedup();
            let cfg = TwoSidedConfig { t: *t, l_grid, s_grid, n_total: *n, m: *m, n_paths: *paths, seed };
            let bounds = TwoSidedBounds { forward: cert.as_ref(), reversed: rev.as_ref().map(|(a, b)| (a, b)) };
            let res = two_sided_experiment(&model, bounds, &cfg)?;
            let mut csv = csv::Writer::from_writer(Vec::new());
            csv.write_record(["l", "s", "mean_tv", "max_tv", "mean_envelope", "violations"]).map_err(io)?;
            for c in &res.cells {
                csv.serialize((c.l, c.s, c.mean_tv, c.max_tv, c.mean_envelope, c.violations)).map_err(io)?;
            }
            let bytes = csv.into_inner().map_err(|e| Failure::Io(std::io::Error::other(e.to_string())))?;
            run.write("two_sided.csv", &bytes)?;
            run.write_json("summary.json", &res)?;
        }
        Command::EstimateR { n, burn_l, burn_s, no_bound, cert } => {
            let (cert, rev) = if *no_bound {
                run.resolve("certificate", "none");
                (None, None)
            } else {
                let c = load_certificate(run, &model, cert)?;
                (c, reversed_certificate(run, &model, true))
            };
            let default = cert.as_ref().map_or(0, |c| default_burn(c.rho, c.r, BURN_TOL));
            if default > BURN_CAP && (burn_l.is_none() || burn_s.is_none()) {
                run.resolve("burn_capped_from", default);
            }
            let bl = burn_l.unwrap_or(default.min(BURN_CAP));
            let bs = burn_s.unwrap_or(default.min(BURN_CAP));
            run.resolve("burn_l", bl);
            run.resolve("burn_s", bs);
            let mut cfg = EstimateRConfig::new(*n, bl, bs, seed);
            cfg.no_bound = *no_bound;
            let bounds = TwoSidedBounds { forward: cert.as_ref(), reversed: rev.as_ref().map(|(a, b)| (a, b)) };
            let est = estimate_r(&model, bounds, &cfg)?;
            run.write_json("estimate_r.json", &est)?;
        }
    }
    Ok(())
}

fn io<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Io(std::io::Error::other(e.to_string()))
}

fn check(run: &mut Run, model: &Model, method: Method, r_max: usize, epsilon: f64) -> Outcome {
    let cert = match method {
        Method::Enumerate => match check_a1_a2_finite(model, r_max)? {
            CheckOutcome::Certified(c) => c,
            CheckOutcome::Failed(report) => {
                run.write_json("failure.json", &report)?;
                return Err(Failure::Validation(format!("no product block found for r <= {r_max}")));
            }
        },
        Method::Cluster => {
            if let Ok(report) = find_clusters(model) {
                run.write_json("clusters.json", &report)?;
            }
            certify_by_cluster(model)?
        }
        Method::PositiveRow => {
            let out = check_positive_row(model)?;
            run.write_json("positive_row.json", &out)?;
            match out.certificate {
                Some(c) if out.holds => c,
                _ => return Err(Failure::Validation("the positive-row condition does not hold".into())),
            }
        }
        Method::Lmsm => check_lmsm(model, epsilon, N0_SAMPLES, &mut seeded_rng(run.seed))?,
        Method::Auto | Method::Sopot => certify(model)?,
    };
    run.write_json("certificate.json", &cert)?;
    Ok(())
}

fn write_curves(run: &mut Run, res: &ForgettingExperiment) -> Outcome {
    let mut csv = csv::Writer::from_writer(Vec::new());
    csv.write_record(["path", "t", "emp_tv", "envelope", "kappa", "delta_product"]).map_err(io)?;
    for c in &res.curves {
        for (i, &t) in c.ts.iter().enumerate() {
            csv.serialize((c.path, t, c.emp_tv[i], c.envelope[i], c.kappa[i], c.delta_product[i])).map_err(io)?;
        }
    }
    let bytes = csv.into_inner().map_err(io)?;
    run.write("forget_curve.csv", &bytes)?;
    #[derive(serde::Serialize)]
    struct PathFit {
        path: usize,
        fitted_alpha: Option<f64>,
        fit_window: Option<(usize, usize)>,
        violations: usize,
    }
    let fits: Vec<PathFit> = res
        .curves
        .iter()
        .map(|c| PathFit { path: c.path, fitted_alpha: c.fitted_alpha, fit_window: c.fit_window, violations: c.violations })
        .collect();
    let windows = res.curves.iter().filter_map(|c| c.fit_window);
    let span = windows.clone().map(|w| w.0).min().zip(windows.map(|w| w.1).max());
    let mut summary = serde_json::to_value(&res.summary).map_err(|e| Failure::Validation(e.to_string()))?;
    summary["fit_window"] = serde_json::json!(span);
    run.write_json("summary.json", &serde_json::json!({ "summary": summary, "paths": fits }))?;
    Ok(())
}

fn plot_script(csv: &Path) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set logscale y");
    let _ = writeln!(s, "set xlabel 't'");
    let _ = writeln!(s, "set ylabel 'total variation'");
    let _ = writeln!(
        s,
        "plot '{0}' every ::1 using 2:3 with points pt 7 ps 0.3 title 'measured', \\\n     '{0}' every ::1 using 2:6 with points pt 6 ps 0.3 title 'sharp bound'",
        csv.display()
    );
    s
}
