//! Command-line front end. Exit codes: 0 success, 1 runtime failure,
//! 2 invalid input or config, 3 distribution fit did not converge.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use nalgebra::DMatrix;
use serde::Serialize;

use crate::config::{load_experiment, load_fit_config, read_samples_csv, FitCommandConfig, TargetSource};
use crate::distributions::to_germ;
use crate::error::{Error, Result};
use crate::experiments::{write_aggregate_json, write_plot_data, write_results_csv, ExperimentConfig, Study};
use crate::fracmoments::{
    fractional_moments_from_pce_with, fractional_moments_from_samples, holder_bias_norm,
    sample_standard_error_norm,
};
use crate::meigd::{fit_meigd, FitConfig};
use crate::pce::{fit_ols, q_squared_loo};
use crate::sampling::ExperimentalDesign;

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "fracpce", version, about = "Fractional moments from PCE and moment-matched distributions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a PCE and a distribution to one sample file.
    Fit(FitArgs),
    /// Run a convergence study from an experiment config.
    Study(StudyArgs),
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// CSV with one column per input followed by the response.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Overrides the fitter seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct StudyArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Overrides the master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides the number of repetitions.
    #[arg(long = "n-stat")]
    pub n_stat: Option<usize>,
    #[arg(long)]
    pub threads: Option<usize>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            }
        }
    }
}

pub fn run(cli: Cli) -> i32 {
    let threads = match &cli.command {
        Command::Fit(a) => a.threads,
        Command::Study(a) => a.threads,
    };
    let pool = match threads {
        Some(0) => {
            eprintln!("error: --threads must be at least 1");
            return EXIT_INVALID;
        }
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build(),
        None => rayon::ThreadPoolBuilder::new().build(),
    };
    let pool = match pool {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start thread pool: {e}");
            return EXIT_RUNTIME;
        }
    };
    pool.install(|| match cli.command {
        Command::Fit(a) => cmd_fit(&a),
        Command::Study(a) => cmd_study(&a),
    })
}

fn report(e: &Error) -> i32 {
    eprintln!("error: {e}");
    match e {
        Error::Config { .. } => EXIT_INVALID,
        _ => EXIT_RUNTIME,
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Internal(e.to_string()))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

fn unix_seconds() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

/// Summary of one study run, written before it starts and finalized after.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub config_path: String,
    pub output_dir: String,
    pub tool_version: String,
    pub master_seed: u64,
    pub n_stat: usize,
    pub started_unix: u64,
    pub finished_unix: Option<u64>,
    pub status: String,
    pub rows: usize,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
struct FitDiagnostics {
    rows: usize,
    source: TargetSource,
    basis_terms: usize,
    q2_loo: Option<f64>,
    fit_tolerance: f64,
    converged: bool,
}

/// `fit`: PCE, fractional moments and distribution for one data file.
pub fn cmd_fit(args: &FitArgs) -> i32 {
    let cfg = match load_fit_config(&args.config) {
        Ok(c) => c,
        Err(e) => return report(&e),
    };
    let table = match read_samples_csv(&args.data, cfg.inputs.len()) {
        Ok(t) => t,
        Err(e) => return report(&e),
    };
    match fit_pipeline(&cfg, &table, args) {
        Ok(true) => EXIT_OK,
        Ok(false) => {
            eprintln!("distribution fit did not reach its tolerance; artifacts written to {}", args.out.display());
            EXIT_NOT_CONVERGED
        }
        Err(e) => report(&e),
    }
}

fn fit_pipeline(cfg: &FitCommandConfig, table: &crate::config::SampleTable, args: &FitArgs) -> Result<bool> {
    std::fs::create_dir_all(&args.out)?;
    let n = table.y.len();
    let m = cfg.inputs.len();
    let germ = cfg.inputs.natural_germ();
    let x = DMatrix::from_fn(n, m, |i, j| table.x[i][j]);
    let mut xi = DMatrix::zeros(n, m);
    for i in 0..n {
        let z = to_germ(&table.x[i], &cfg.inputs, &germ)?;
        for j in 0..m {
            xi[(i, j)] = z[j];
        }
    }
    let ed = ExperimentalDesign::from_parts(x, xi, table.y.clone(), 0)?;
    let basis = cfg.basis.basis_for(m, n)?;
    let pce = fit_ols(&ed, &basis, &germ)?;
    write_json(&args.out.join("pce.json"), &pce)?;

    let (targets, uncertainty) = match cfg.source {
        TargetSource::PceHolder => (
            fractional_moments_from_pce_with(&pce, &cfg.orders, &cfg.holder)?,
            holder_bias_norm(pce.mean(), pce.variance(), &cfg.orders),
        ),
        TargetSource::Samples => (
            fractional_moments_from_samples(&table.y, &cfg.orders)?,
            sample_standard_error_norm(&table.y, &cfg.orders),
        ),
    };
    write_json(&args.out.join("fractional_moments.json"), &targets)?;

    let fit_cfg = FitConfig {
        tolerance: cfg.tolerance.tolerance(uncertainty),
        seed: args.seed.unwrap_or(cfg.fit.seed),
        stop_at_tolerance: cfg.tolerance.early_stop || cfg.fit.stop_at_tolerance,
        ..cfg.fit
    };
    let fit = fit_meigd(&targets, &fit_cfg)?;
    write_json(&args.out.join("fit.json"), &fit)?;
    let diag = FitDiagnostics {
        rows: n,
        source: cfg.source,
        basis_terms: basis.len(),
        q2_loo: q_squared_loo(&pce, &ed).ok(),
        fit_tolerance: fit_cfg.tolerance,
        converged: fit.converged,
    };
    write_json(&args.out.join("diagnostics.json"), &diag)?;
    Ok(fit.converged)
}

/// `study`: runs the sweep and writes results, aggregates, plot data and
/// the manifest. Rows finished before a failure are still written.
pub fn cmd_study(args: &StudyArgs) -> i32 {
    let mut cfg: ExperimentConfig = match load_experiment(&args.config) {
        Ok(c) => c,
        Err(e) => return report(&e),
    };
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(n) = args.n_stat {
        cfg.n_stat = n;
    }
    if let Err(e) = cfg.validate() {
        return report(&e);
    }
    if let Err(e) = std::fs::create_dir_all(&args.out) {
        return report(&e.into());
    }
    let mut manifest = RunManifest {
        config_path: args.config.display().to_string(),
        output_dir: args.out.display().to_string(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        master_seed: cfg.seed,
        n_stat: cfg.n_stat,
        started_unix: unix_seconds(),
        finished_unix: None,
        status: "running".into(),
        rows: 0,
        error: None,
    };
    let manifest_path = args.out.join("manifest.json");
    if let Err(e) = write_json(&manifest_path, &manifest).and_then(|_| write_json(&args.out.join("config.json"), &cfg)) {
        return report(&e);
    }

    let (code, error) = match Study::prepare(cfg.clone()) {
        Err(e) => (report(&e), Some(e)),
        Ok(study) => {
            let outcome = study.run();
            let res = &outcome.result;
            manifest.rows = res.records.len();
            let written = write_results_csv(&res.records, &args.out.join("results.csv"))
                .and_then(|_| write_aggregate_json(res, &cfg, &args.out.join("aggregate.json")))
                .and_then(|_| write_plot_data(&res.plots, &args.out.join("plots")).map(|_| ()));
            match (outcome.error, written) {
                (Some(e), _) | (None, Err(e)) => (report(&e), Some(e)),
                (None, Ok(())) => (EXIT_OK, None),
            }
        }
    };
    manifest.finished_unix = Some(unix_seconds());
    manifest.status = if code == EXIT_OK { "completed".into() } else { "failed".into() };
    manifest.error = error.map(|e| e.to_string());
    if let Err(e) = write_json(&manifest_path, &manifest) {
        return report(&e);
    }
    code
}
