//! Convergence studies: repeated PCE-Hölder and sampling-based estimates of
//! the fractional moments, each followed by a distribution fit scored
//! against a reference CDF.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::InputVector;
use crate::error::{Error, Result};
use crate::fracmoments::{
    fractional_moments_from_pce_with, fractional_moments_from_samples, holder_bias_norm,
    sample_standard_error_norm, FractionalMomentSet, HolderOptions, DEFAULT_ORDERS,
};
use crate::meigd::{fit_meigd, meigd_cdf_many, meigd_pdf, FitConfig, FitResult};
use crate::metrics::{error_profile, integration_grid, ErrorProfile, GridConfig, ReferenceCdf};
use crate::models::{ForwardModel, ModelSpec};
use crate::pce::{eval_pce, fit_ols, PceModel};
use crate::polybasis::{hyperbolic_set, MultiIndexSet};
use crate::sampling::{sample_germ, sample_inputs, ExperimentalDesign};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Hölder estimates from the analytic moments of a PCE surrogate.
    PceHolder,
    /// Sample averages over the LHS design.
    Lhs,
    /// Sample averages over fresh LHS draws of a PCE surrogate.
    PceLhs,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::PceHolder, Method::Lhs, Method::PceLhs];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::PceHolder => "pce-holder",
            Self::Lhs => "lhs",
            Self::PceLhs => "pce-lhs",
        }
    }

    fn tag(self) -> u64 {
        match self {
            Self::PceHolder => 1,
            Self::Lhs => 2,
            Self::PceLhs => 3,
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisConfig {
    pub p: usize,
    #[serde(default = "one")]
    pub q: f64,
}

fn one() -> f64 {
    1.0
}

impl BasisConfig {
    /// Hyperbolic set, lowering `p` until it has fewer terms than `n_sim`.
    pub fn basis_for(&self, dim: usize, n_sim: usize) -> Result<MultiIndexSet> {
        let mut p = self.p;
        loop {
            let set = hyperbolic_set(dim, p, self.q)?;
            if set.len() < n_sim {
                return Ok(set);
            }
            if p <= 1 {
                return Err(Error::domain(format!(
                    "n_sim = {n_sim} is too small for a degree-1 expansion in {dim} variables"
                )));
            }
            p -= 1;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ReferenceSpec {
    Normal {
        mean: f64,
        std: f64,
    },
    /// LHS sample of the true model.
    Empirical {
        #[serde(default = "default_reference_samples")]
        samples: usize,
        /// Defaults to a value derived from the master seed.
        #[serde(default)]
        seed: Option<u64>,
    },
}

fn default_reference_samples() -> usize {
    100_000
}

impl Default for ReferenceSpec {
    fn default() -> Self {
        Self::Empirical { samples: default_reference_samples(), seed: None }
    }
}

/// Acceptance threshold handed to the fitter: `max(floor, factor · u)`,
/// where `u` is the estimated uncertainty of the targets (the predicted
/// Hölder bias for PCE-Hölder, the sample standard error otherwise).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TolerancePolicy {
    pub factor: f64,
    pub floor: f64,
    /// Stop local searches once inside the threshold.
    pub early_stop: bool,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        Self { factor: 1.0, floor: 1e-6, early_stop: true }
    }
}

impl TolerancePolicy {
    pub fn tolerance(&self, uncertainty: f64) -> f64 {
        let t = self.factor * uncertainty;
        if t.is_finite() {
            t.max(self.floor)
        } else {
            self.floor
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub model: ModelSpec,
    pub basis: BasisConfig,
    #[serde(default = "default_orders")]
    pub orders: Vec<f64>,
    pub n_sim: Vec<usize>,
    #[serde(default = "default_n_stat")]
    pub n_stat: usize,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    #[serde(default)]
    pub reference: ReferenceSpec,
    pub seed: u64,
    #[serde(default)]
    pub fit: FitConfig,
    #[serde(default)]
    pub tolerance: TolerancePolicy,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub holder: HolderOptions,
    /// Repetitions per (method, n_sim) whose error profiles are kept.
    #[serde(default = "one_usize")]
    pub plot_repetitions: usize,
    /// When false, `wall_ms` is written as 0 so result files are byte-stable.
    #[serde(default = "yes")]
    pub record_timing: bool,
}

fn default_orders() -> Vec<f64> {
    DEFAULT_ORDERS.to_vec()
}

fn default_n_stat() -> usize {
    100
}

fn default_methods() -> Vec<Method> {
    Method::ALL.to_vec()
}

fn one_usize() -> usize {
    1
}

fn yes() -> bool {
    true
}

impl ExperimentConfig {
    /// Config with the documented defaults for a model.
    pub fn new(model: ModelSpec, basis: BasisConfig, n_sim: Vec<usize>, n_stat: usize, seed: u64) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            model,
            basis,
            orders: default_orders(),
            n_sim,
            n_stat,
            methods: default_methods(),
            reference: ReferenceSpec::default(),
            seed,
            fit: FitConfig::default(),
            tolerance: TolerancePolicy::default(),
            grid: GridConfig::default(),
            holder: HolderOptions::default(),
            plot_repetitions: 1,
            record_timing: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |path: &str, message: String| Err(Error::Config { path: path.into(), message });
        if self.schema_version != SCHEMA_VERSION {
            return bad("schema_version", format!("expected {SCHEMA_VERSION}, got {}", self.schema_version));
        }
        if let Err(e) = self.model.validate() {
            return bad("model", e.to_string());
        }
        if self.basis.p == 0 || !(self.basis.q > 0.0 && self.basis.q <= 1.0) {
            return bad("basis", format!("need p >= 1 and 0 < q <= 1, got {:?}", self.basis));
        }
        if self.orders.is_empty() || self.orders.windows(2).any(|w| !(w[1] > w[0])) {
            return bad("orders", "orders must be non-empty and strictly increasing".into());
        }
        if let Some(r) = self.orders.iter().find(|r| !(1.0..=4.0).contains(*r)) {
            return bad("orders", format!("order {r} outside [1, 4]"));
        }
        if self.n_sim.is_empty() || self.n_sim.windows(2).any(|w| w[1] <= w[0]) {
            return bad("n_sim", "grid must be non-empty and strictly increasing".into());
        }
        if self.n_sim[0] < 2 {
            return bad("n_sim", "every n_sim must be at least 2".into());
        }
        if self.n_stat == 0 {
            return bad("n_stat", "need at least one repetition".into());
        }
        if self.methods.is_empty() {
            return bad("methods", "no methods selected".into());
        }
        for (i, m) in self.methods.iter().enumerate() {
            if self.methods[..i].contains(m) {
                return bad("methods", format!("{m} listed twice"));
            }
        }
        if let ReferenceSpec::Empirical { samples, .. } = self.reference {
            if samples < crate::metrics::MIN_REFERENCE_SAMPLES {
                return bad("reference.samples", format!("need at least {}", crate::metrics::MIN_REFERENCE_SAMPLES));
            }
        }
        if self.fit.starts == 0 || self.fit.batch == 0 {
            return bad("fit", "need at least one start and a positive batch".into());
        }
        if let Err(e) = self.fit.bounds.validate() {
            return bad("fit.bounds", e.to_string());
        }
        if !(self.tolerance.factor >= 0.0 && self.tolerance.floor > 0.0) {
            return bad("tolerance", "factor must be >= 0 and floor > 0".into());
        }
        if self.grid.points < 2 || !(self.grid.tail > 0.0 && self.grid.tail < 0.5) {
            return bad("grid", format!("invalid grid {:?}", self.grid));
        }
        Ok(())
    }
}

/// SplitMix64 finalizer folded over the parts.
pub fn derive_seed(parts: &[u64]) -> u64 {
    let mut h = 0x243f_6a88_85a3_08d3u64;
    for &p in parts {
        h ^= p;
        h = h.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = h;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        h = z ^ (z >> 31);
    }
    h
}

/// Seed of the experimental design for one (n_sim, repetition); shared by
/// all methods so they see paired designs.
pub fn design_seed(master: u64, n_sim: usize, repetition: usize) -> u64 {
    derive_seed(&[master, n_sim as u64, repetition as u64])
}

const REFERENCE_TAG: u64 = 0x7265_6665;
const SURROGATE_TAG: u64 = 0x7375_7267;

/// Builds the reference CDF for a model.
pub fn build_reference(
    spec: &ReferenceSpec,
    model: &dyn ForwardModel,
    inputs: &InputVector,
    master_seed: u64,
) -> Result<ReferenceCdf> {
    match *spec {
        ReferenceSpec::Normal { mean, std } => ReferenceCdf::normal(mean, std),
        ReferenceSpec::Empirical { samples, seed } => {
            let seed = seed.unwrap_or_else(|| derive_seed(&[master_seed, REFERENCE_TAG]));
            let ed = sample_inputs(inputs, samples, seed)?;
            let y = evaluate_rows(model, &ed)?;
            ReferenceCdf::empirical(y)
        }
    }
}

fn evaluate_rows(model: &dyn ForwardModel, ed: &ExperimentalDesign) -> Result<Vec<f64>> {
    let m = ed.dim();
    (0..ed.len())
        .into_par_iter()
        .map(|i| {
            let row: Vec<f64> = (0..m).map(|j| ed.x[(i, j)]).collect();
            let v = model.evaluate(&row)?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::NonFinite(format!("model response at row {i}")))
            }
        })
        .collect()
}

/// Everything a single run needs besides its method, size and seed.
pub struct RunContext<'a> {
    pub model: &'a dyn ForwardModel,
    pub inputs: &'a InputVector,
    pub basis: BasisConfig,
    pub orders: &'a [f64],
    pub fit: FitConfig,
    pub tolerance: TolerancePolicy,
    pub holder: HolderOptions,
    pub reference: &'a ReferenceCdf,
    pub grid: &'a [f64],
}

/// Output of one end-to-end run.
#[derive(Debug, Clone)]
pub struct MethodRun {
    pub targets: FractionalMomentSet,
    /// `None` when the distribution fit raised an error.
    pub fit: Option<FitResult>,
    /// `+∞` when the fit failed.
    pub epsilon: f64,
    pub profile: Option<ErrorProfile>,
    pub fit_tolerance: f64,
    pub pce: Option<PceModel>,
    pub model_evals: usize,
}

/// Sample (or surrogate) targets plus their standard-error norm.
fn sample_targets(y: &[f64], orders: &[f64]) -> Result<(FractionalMomentSet, f64)> {
    Ok((fractional_moments_from_samples(y, orders)?, sample_standard_error_norm(y, orders)))
}

fn run_method_inner(method: Method, ctx: &RunContext<'_>, n_sim: usize, seed: u64) -> Result<MethodRun> {
    let mut ed = sample_inputs(ctx.inputs, n_sim, seed)?;
    ed.y = evaluate_rows(ctx.model, &ed)?;
    let model_evals = ed.len();

    let surrogate = |ed: &ExperimentalDesign| -> Result<PceModel> {
        let basis = ctx.basis.basis_for(ctx.inputs.len(), n_sim)?;
        fit_ols(ed, &basis, &ctx.inputs.natural_germ())
    };
    let (targets, uncertainty, pce) = match method {
        Method::PceHolder => {
            let pce = surrogate(&ed)?;
            let holder = HolderOptions { seed: derive_seed(&[seed, ctx.holder.seed]), ..ctx.holder };
            let targets = fractional_moments_from_pce_with(&pce, ctx.orders, &holder)?;
            let u = holder_bias_norm(pce.mean(), pce.variance(), ctx.orders);
            (targets, u, Some(pce))
        }
        Method::Lhs => {
            let (t, u) = sample_targets(&ed.y, ctx.orders)?;
            (t, u, None)
        }
        Method::PceLhs => {
            let pce = surrogate(&ed)?;
            let xi = sample_germ(&pce.germ, n_sim, derive_seed(&[seed, SURROGATE_TAG]))?;
            let y = eval_pce(&pce, &xi)?;
            let (t, u) = sample_targets(&y, ctx.orders)?;
            (t, u, Some(pce))
        }
    };

    let fit_tolerance = ctx.tolerance.tolerance(uncertainty);
    let cfg = FitConfig {
        tolerance: fit_tolerance,
        seed: derive_seed(&[seed, method.tag()]),
        stop_at_tolerance: ctx.tolerance.early_stop || ctx.fit.stop_at_tolerance,
        ..ctx.fit
    };
    let (fit, epsilon, profile) = match fit_meigd(&targets, &cfg) {
        Ok(fit) => {
            let profile = score(&fit, ctx.reference, ctx.grid)?;
            let eps = profile.epsilon;
            (Some(fit), eps, Some(profile))
        }
        Err(_) => (None, f64::INFINITY, None),
    };
    Ok(MethodRun { targets, fit, epsilon, profile, fit_tolerance, pce, model_evals })
}

/// Scores a fitted distribution on the integration grid.
pub fn score(fit: &FitResult, reference: &ReferenceCdf, grid: &[f64]) -> Result<ErrorProfile> {
    let approx = meigd_cdf_many(&fit.params, grid)?;
    error_profile(reference, grid, approx)
}

/// One end-to-end estimate for `method` on an LHS design of size `n_sim`.
///
/// Errors before the distribution fit are returned with their context; a
/// failed fit is recorded as `epsilon = +∞`.
pub fn run_method_once(method: Method, ctx: &RunContext<'_>, n_sim: usize, seed: u64) -> Result<MethodRun> {
    run_method_inner(method, ctx, n_sim, seed).map_err(|e| Error::Run {
        method: method.as_str().into(),
        n_sim,
        seed,
        source: Box::new(e),
    })
}

/// One row of the results table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub method: Method,
    pub n_sim: usize,
    pub repetition: usize,
    pub seed: u64,
    pub epsilon: f64,
    pub fit_residual: f64,
    pub converged: bool,
    pub model_evals: usize,
    pub wall_ms: u64,
}

/// Summary over the repetitions of one (method, n_sim).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub method: Method,
    pub n_sim: usize,
    pub count: usize,
    /// Rows whose fit raised an error (`ε = ∞`); excluded from the statistics.
    pub failed: usize,
    pub converged: usize,
    pub mean_epsilon: f64,
    /// Sample standard deviation (`n - 1`).
    pub std_epsilon: f64,
    pub median_epsilon: f64,
    pub min_epsilon: f64,
    pub max_epsilon: f64,
    pub mean_fit_residual: f64,
    pub model_evals: usize,
}

/// Grid, reference CDF, fitted CDF and PDF, and pointwise divergence of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotCase {
    pub method: Method,
    pub n_sim: usize,
    pub repetition: usize,
    pub profile: ErrorProfile,
    pub fitted_pdf: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceResult {
    pub records: Vec<RunRecord>,
    pub aggregates: Vec<Aggregate>,
    pub plots: Vec<PlotCase>,
    pub wall_ms: u64,
}

impl ConvergenceResult {
    pub fn aggregate(&self, method: Method, n_sim: usize) -> Option<&Aggregate> {
        self.aggregates.iter().find(|a| a.method == method && a.n_sim == n_sim)
    }
}

pub fn aggregate(records: &[RunRecord], methods: &[Method], n_sims: &[usize]) -> Vec<Aggregate> {
    let mut out = Vec::new();
    for &method in methods {
        for &n_sim in n_sims {
            let rows: Vec<&RunRecord> = records.iter().filter(|r| r.method == method && r.n_sim == n_sim).collect();
            if rows.is_empty() {
                continue;
            }
            let mut eps: Vec<f64> = rows.iter().map(|r| r.epsilon).filter(|e| e.is_finite()).collect();
            eps.sort_by(f64::total_cmp);
            let k = eps.len();
            let mean = eps.iter().sum::<f64>() / k as f64;
            let std = if k > 1 {
                (eps.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (k - 1) as f64).sqrt()
            } else {
                0.0
            };
            let median = match k {
                0 => f64::NAN,
                _ if k % 2 == 1 => eps[k / 2],
                _ => 0.5 * (eps[k / 2 - 1] + eps[k / 2]),
            };
            let res: Vec<f64> = rows.iter().map(|r| r.fit_residual).filter(|v| v.is_finite()).collect();
            out.push(Aggregate {
                method,
                n_sim,
                count: rows.len(),
                failed: rows.len() - k,
                converged: rows.iter().filter(|r| r.converged).count(),
                mean_epsilon: if k > 0 { mean } else { f64::NAN },
                std_epsilon: std,
                median_epsilon: median,
                min_epsilon: eps.first().copied().unwrap_or(f64::NAN),
                max_epsilon: eps.last().copied().unwrap_or(f64::NAN),
                mean_fit_residual: res.iter().sum::<f64>() / res.len().max(1) as f64,
                model_evals: rows.iter().map(|r| r.model_evals).sum(),
            });
        }
    }
    out
}

/// A validated config with its model and reference built.
pub struct Study {
    pub config: ExperimentConfig,
    model: crate::models::Model,
    reference: ReferenceCdf,
    grid: Vec<f64>,
}

/// Successful rows plus the first error, if any run failed.
pub struct StudyOutcome {
    pub result: ConvergenceResult,
    pub error: Option<Error>,
}

impl Study {
    pub fn prepare(config: ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let model = config.model.build()?;
        let reference = build_reference(&config.reference, &model, &config.model.inputs, config.seed)?;
        let grid = integration_grid(&reference, &config.grid)?;
        Ok(Self { config, model, reference, grid })
    }

    pub fn reference(&self) -> &ReferenceCdf {
        &self.reference
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn context(&self) -> RunContext<'_> {
        RunContext {
            model: &self.model,
            inputs: &self.config.model.inputs,
            basis: self.config.basis,
            orders: &self.config.orders,
            fit: self.config.fit,
            tolerance: self.config.tolerance,
            holder: self.config.holder,
            reference: &self.reference,
            grid: &self.grid,
        }
    }

    /// Runs the full sweep. Rows come back ordered by method (config
    /// order), n_sim and repetition, independent of scheduling.
    pub fn run(&self) -> StudyOutcome {
        let cfg = &self.config;
        let started = Instant::now();
        let tasks: Vec<(Method, usize, usize)> = cfg
            .methods
            .iter()
            .flat_map(|&m| cfg.n_sim.iter().flat_map(move |&n| (0..cfg.n_stat).map(move |r| (m, n, r))))
            .collect();
        let ctx = self.context();
        let outcomes: Vec<Result<(RunRecord, Option<PlotCase>)>> = tasks
            .par_iter()
            .map(|&(method, n_sim, repetition)| {
                let seed = design_seed(cfg.seed, n_sim, repetition);
                let t0 = Instant::now();
                let run = run_method_once(method, &ctx, n_sim, seed)?;
                let wall_ms = if cfg.record_timing { t0.elapsed().as_millis() as u64 } else { 0 };
                let record = RunRecord {
                    method,
                    n_sim,
                    repetition,
                    seed,
                    epsilon: run.epsilon,
                    fit_residual: run.fit.as_ref().map_or(f64::INFINITY, |f| f.residual),
                    converged: run.fit.as_ref().is_some_and(|f| f.converged),
                    model_evals: run.model_evals,
                    wall_ms,
                };
                let plot = match (&run.fit, run.profile) {
                    (Some(fit), Some(profile)) if repetition < cfg.plot_repetitions => {
                        let fitted_pdf =
                            profile.grid.iter().map(|&x| meigd_pdf(&fit.params, x)).collect::<Result<Vec<_>>>()?;
                        Some(PlotCase { method, n_sim, repetition, profile, fitted_pdf })
                    }
                    _ => None,
                };
                Ok((record, plot))
            })
            .collect();

        let mut records = Vec::new();
        let mut plots = Vec::new();
        let mut error = None;
        for o in outcomes {
            match o {
                Ok((r, p)) => {
                    records.push(r);
                    plots.extend(p);
                }
                Err(e) => {
                    error.get_or_insert(e);
                }
            }
        }
        let aggregates = aggregate(&records, &cfg.methods, &cfg.n_sim);
        let wall_ms = if cfg.record_timing { started.elapsed().as_millis() as u64 } else { 0 };
        StudyOutcome { result: ConvergenceResult { records, aggregates, plots, wall_ms }, error }
    }
}

/// Validates the config, builds the reference and runs every
/// method × n_sim × repetition.
pub fn run_convergence_study(config: &ExperimentConfig) -> Result<ConvergenceResult> {
    let outcome = Study::prepare(config.clone())?.run();
    match outcome.error {
        Some(e) => Err(e),
        None => Ok(outcome.result),
    }
}

pub const RESULTS_HEADER: [&str; 9] =
    ["method", "n_sim", "repetition", "seed", "epsilon", "fit_residual", "converged", "model_evals", "wall_ms"];

pub fn write_results_csv(records: &[RunRecord], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Io(e.to_string()))?;
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(RESULTS_HEADER).map_err(io)?;
    for r in records {
        w.write_record([
            r.method.as_str().to_string(),
            r.n_sim.to_string(),
            r.repetition.to_string(),
            r.seed.to_string(),
            format!("{:e}", r.epsilon),
            format!("{:e}", r.fit_residual),
            r.converged.to_string(),
            r.model_evals.to_string(),
            r.wall_ms.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

/// Aggregates keyed by method, then n_sim. Non-finite values become `null`.
pub fn aggregate_json(result: &ConvergenceResult, config: &ExperimentConfig) -> serde_json::Value {
    let mut by_method: BTreeMap<String, Vec<&Aggregate>> = BTreeMap::new();
    for a in &result.aggregates {
        by_method.entry(a.method.to_string()).or_default().push(a);
    }
    serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "model": config.model.name,
        "seed": config.seed,
        "n_stat": config.n_stat,
        "n_sim": config.n_sim,
        "orders": config.orders,
        "rows": result.records.len(),
        "aggregates": by_method,
    })
}

pub fn write_aggregate_json(result: &ConvergenceResult, config: &ExperimentConfig, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(&aggregate_json(result, config))
        .map_err(|e| Error::Internal(e.to_string()))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

/// One CSV per plot case: `x,reference_cdf,fitted_cdf,fitted_pdf,kl`.
pub fn write_plot_data(plots: &[PlotCase], dir: &Path) -> Result<Vec<std::path::PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    for p in plots {
        let path = dir.join(format!("{}_n{}_rep{}.csv", p.method, p.n_sim, p.repetition));
        let mut out = std::io::BufWriter::new(std::fs::File::create(&path)?);
        writeln!(out, "x,reference_cdf,fitted_cdf,fitted_pdf,kl")?;
        let pr = &p.profile;
        for i in 0..pr.grid.len() {
            writeln!(
                out,
                "{:e},{:e},{:e},{:e},{:e}",
                pr.grid[i], pr.reference[i], pr.approx[i], p.fitted_pdf[i], pr.kl[i]
            )?;
        }
        out.flush()?;
        paths.push(path);
    }
    Ok(paths)
}
