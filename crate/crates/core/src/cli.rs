//! Commands behind the `iteb` binary.
//!
//! Exit codes: 0 success, 2 malformed input or flags, 3 design violation,
//! 4 numerical or estimator failure. Failures are reported on stderr as a
//! one-line JSON object `{"error": <reason>, "message": ...}`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::estimators::{
    central_matching, iteb, truncated_mle, CmConfig, Diagnostics, ItebConfig, Method,
    TauEstimate, TmleConfig,
};
use crate::io::{self, fmt_f64};
use crate::simulation::{
    fdr_power_experiment, roc_experiment, tau_error_experiment, RocCurve, RocMethod,
    ScenarioConfig, VarianceSource,
};
use crate::summaries::{
    quantile_normalize, summarize_one_sample, summarize_paired, summarize_pooled,
    summarize_welch, paired_log_diff, GeneSummary,
};
use crate::testing::{pvalue_order, Procedure, TestOutcome};

#[derive(Debug, Parser)]
#[command(name = "iteb", version, about = "Testing for strong signals when null effects spread")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reduce a replicate matrix to per-gene summaries.
    Summarize(SummarizeArgs),
    /// Estimate the null spreading variance tau2.
    Estimate(EstimateArgs),
    /// Per-gene p-values and rejections.
    Test(TestArgs),
    /// Run a simulation experiment.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DesignArg {
    Pooled,
    Welch,
    Paired,
    OneSample,
}

#[derive(Debug, Args)]
pub struct SummarizeArgs {
    /// Matrix TSV.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "pooled")]
    pub design: DesignArg,
    /// Quantile-normalize all columns first.
    #[arg(long)]
    pub quantile_normalize: bool,
    /// Summarize per-pair log ratios (columns paired by batch label).
    #[arg(long)]
    pub log_diff: bool,
    /// Output TSV; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Summary TSV.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "iteb")]
    pub method: Method,
    #[arg(long, default_value_t = 0.1)]
    pub alpha1: f64,
    #[arg(long, default_value_t = 0.01)]
    pub alpha2: f64,
    /// Defaults to sqrt(8 / N).
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, default_value_t = 0.2)]
    pub leave_out: f64,
    /// Output JSON; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Use this tau2 instead of estimating it.
    #[arg(long, conflicts_with = "estimate_method")]
    pub tau2: Option<f64>,
    #[arg(long)]
    pub estimate_method: Option<Method>,
    #[arg(long, default_value = "dual")]
    pub procedure: Procedure,
    #[arg(long, default_value_t = 0.1)]
    pub alpha1: f64,
    #[arg(long, default_value_t = 0.01)]
    pub alpha2: f64,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Experiment {
    Roc,
    TauError,
    FdrPower,
}

impl Experiment {
    fn name(self) -> &'static str {
        match self {
            Experiment::Roc => "roc",
            Experiment::TauError => "tau-error",
            Experiment::FdrPower => "fdr-power",
        }
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub experiment: Experiment,
    /// JSON experiment configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the configured seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides the configured number of replications.
    #[arg(long)]
    pub reps: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

/// Experiment configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub scenario: ScenarioConfig,
    /// Grid for `tau-error`; defaults to the scenario's `tau`.
    #[serde(default)]
    pub taus: Option<Vec<f64>>,
    /// Grid for `tau-error`; defaults to the scenario's `gamma`.
    #[serde(default)]
    pub gammas: Option<Vec<f64>>,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    #[serde(default = "default_roc_methods")]
    pub roc_methods: Vec<RocMethod>,
    #[serde(default = "default_alpha1")]
    pub alpha1: f64,
    #[serde(default = "default_alpha2")]
    pub alpha2: f64,
    /// Per-gene level for the power comparison.
    #[serde(default = "default_alpha2")]
    pub alpha: f64,
}

fn default_methods() -> Vec<Method> {
    vec![Method::Iteb, Method::Tmle, Method::Cm]
}

fn default_roc_methods() -> Vec<RocMethod> {
    vec![RocMethod::ItebTest, RocMethod::TTest]
}

fn default_alpha1() -> f64 {
    0.1
}

fn default_alpha2() -> f64 {
    0.01
}

/// Record of one run, written next to its outputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub config: Value,
    pub seed: Option<u64>,
    pub inputs: Vec<InputDigest>,
    pub outputs: Vec<PathBuf>,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: PathBuf,
    pub sha256: String,
}

impl RunManifest {
    fn new(command: &str, config: Value, seed: Option<u64>) -> Self {
        RunManifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            seed,
            inputs: Vec::new(),
            outputs: Vec::new(),
            seconds: 0.0,
        }
    }

    fn input(&mut self, path: &Path) -> Result<()> {
        self.inputs.push(InputDigest {
            path: path.to_path_buf(),
            sha256: io::file_sha256(path)?,
        });
        Ok(())
    }

    fn write(mut self, path: &Path, started: Instant) -> Result<()> {
        self.seconds = started.elapsed().as_secs_f64();
        let mut text = serde_json::to_string_pretty(&self)?;
        text.push('\n');
        io::write_atomic(path, text.as_bytes())
    }
}

/// `<out>.manifest.json`.
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse { .. } | Error::Input(_) | Error::Domain(_) | Error::Io(_) | Error::Json(_) => 2,
        Error::Design(_) => 3,
        Error::AllRemoved
        | Error::EmptyWindow
        | Error::NonFinite(_)
        | Error::CentralMatchingFailed { .. }
        | Error::Numeric(_) => 4,
    }
}

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Summarize(a) => cmd_summarize(&a),
        Command::Estimate(a) => cmd_estimate(&a),
        Command::Test(a) => cmd_test(&a),
        Command::Simulate(a) => cmd_simulate(&a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!(
                "{}",
                json!({ "error": e.reason(), "message": e.to_string() })
            );
            exit_code(&e)
        }
    }
}

fn emit(out: Option<&Path>, bytes: &[u8], manifest: RunManifest, started: Instant) -> Result<()> {
    match out {
        Some(path) => {
            let mut manifest = manifest;
            manifest.outputs.push(path.to_path_buf());
            io::write_atomic(path, bytes)?;
            manifest.write(&manifest_path(path), started)
        }
        None => {
            use std::io::Write;
            std::io::stdout().write_all(bytes)?;
            Ok(())
        }
    }
}

pub fn cmd_summarize(args: &SummarizeArgs) -> Result<()> {
    let started = Instant::now();
    let mut matrix = io::read_matrix_file(&args.input)?;
    if args.quantile_normalize {
        matrix = quantile_normalize(&matrix);
    }
    let summaries = if args.log_diff {
        if !matches!(args.design, DesignArg::Paired | DesignArg::OneSample) {
            return Err(Error::Design(
                "--log-diff produces paired differences; use --design paired".into(),
            ));
        }
        summarize_one_sample(&paired_log_diff(&matrix)?)?
    } else {
        match args.design {
            DesignArg::Pooled => summarize_pooled(&matrix)?,
            DesignArg::Welch => summarize_welch(&matrix)?,
            DesignArg::Paired => summarize_paired(&matrix)?,
            DesignArg::OneSample => summarize_one_sample(&matrix)?,
        }
    };
    let mut buf = Vec::new();
    io::write_summaries(&summaries, &mut buf)?;

    let mut manifest = RunManifest::new(
        "summarize",
        json!({
            "design": args.design,
            "quantile_normalize": args.quantile_normalize,
            "log_diff": args.log_diff,
        }),
        None,
    );
    manifest.input(&args.input)?;
    emit(args.out.as_deref(), &buf, manifest, started)
}

fn estimate(summaries: &[GeneSummary], method: Method, args: &EstimateParams) -> Result<TauEstimate> {
    match method {
        Method::Iteb => iteb(summaries, &args.iteb),
        Method::Tmle => truncated_mle(summaries, &args.tmle),
        Method::Cm => central_matching(summaries, &args.cm),
    }
}

struct EstimateParams {
    iteb: ItebConfig,
    tmle: TmleConfig,
    cm: CmConfig,
}

impl EstimateParams {
    fn new(alpha1: f64, alpha2: f64, delta: Option<f64>, leave_out: f64) -> Self {
        EstimateParams {
            iteb: ItebConfig {
                alpha1,
                alpha2,
                delta,
                ..ItebConfig::default()
            },
            tmle: TmleConfig {
                leave_out,
                ..TmleConfig::default()
            },
            cm: CmConfig {
                leave_out,
                ..CmConfig::default()
            },
        }
    }

    fn echo(&self, method: Method, n: usize) -> Value {
        match method {
            Method::Iteb => json!({
                "method": method,
                "alpha1": self.iteb.alpha1,
                "alpha2": self.iteb.alpha2,
                "delta": self.iteb.resolved_delta(n),
                "max_iterations": self.iteb.max_iterations.unwrap_or(n),
            }),
            Method::Tmle => json!({ "method": method, "tmle": self.tmle }),
            Method::Cm => json!({ "method": method, "cm": self.cm }),
        }
    }
}

pub fn cmd_estimate(args: &EstimateArgs) -> Result<()> {
    let started = Instant::now();
    let summaries = io::read_summaries_file(&args.input)?;
    let params = EstimateParams::new(args.alpha1, args.alpha2, args.delta, args.leave_out);
    let est = estimate(&summaries, args.method, &params)?;

    let mut report = json!({
        "tau2": est.tau2,
        "method": est.method,
        "iterations": est.iterations,
        "diagnostics": est.diagnostics,
    });
    if let Diagnostics::Iteb {
        surviving, rejected, ..
    } = &est.diagnostics
    {
        let ids = |idx: &[usize]| -> Vec<&str> {
            idx.iter().map(|&i| summaries[i].id.as_str()).collect()
        };
        report["surviving_ids"] = json!(ids(surviving));
        report["rejected_ids"] = json!(ids(rejected));
    }
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');

    let mut manifest = RunManifest::new("estimate", params.echo(args.method, summaries.len()), None);
    manifest.input(&args.input)?;
    emit(args.out.as_deref(), text.as_bytes(), manifest, started)
}

pub fn cmd_test(args: &TestArgs) -> Result<()> {
    let started = Instant::now();
    let summaries = io::read_summaries_file(&args.input)?;
    let params = EstimateParams::new(args.alpha1, args.alpha2, None, 0.2);
    let (tau2, source) = match (args.tau2, args.estimate_method) {
        (Some(t), _) => (t, json!("given")),
        (None, m) => {
            let m = m.unwrap_or(Method::Iteb);
            (estimate(&summaries, m, &params)?.tau2, params.echo(m, summaries.len()))
        }
    };
    let alpha2 = (args.procedure == Procedure::Dual).then_some(args.alpha2);
    let outcome = TestOutcome::run(&summaries, tau2, args.procedure, args.alpha1, alpha2)?;

    let mut csv = String::from("gene_id,pvalue,rejected\n");
    for i in pvalue_order(&outcome.pvalues) {
        writeln!(
            csv,
            "{},{},{}",
            summaries[i].id,
            fmt_f64(outcome.pvalues[i]),
            u8::from(outcome.rejected[i])
        )
        .expect("writing to a String");
    }

    let mut manifest = RunManifest::new(
        "test",
        json!({
            "tau2": tau2,
            "tau2_source": source,
            "procedure": args.procedure,
            "alpha1": args.alpha1,
            "alpha2": alpha2,
        }),
        None,
    );
    manifest.input(&args.input)?;
    emit(args.out.as_deref(), csv.as_bytes(), manifest, started)
}

fn load_simulate_config(path: &Path) -> Result<SimulateConfig> {
    let text = std::fs::read_to_string(path)?;
    let mut config: SimulateConfig = serde_json::from_str(&text)?;
    // Variance files are looked up relative to the configuration file.
    if let VarianceSource::EmpiricalFile(p) = &mut config.scenario.variance_source {
        if p.is_relative() {
            if let Some(dir) = path.parent() {
                *p = dir.join(&*p);
            }
        }
    }
    Ok(config)
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let started = Instant::now();
    let mut config = load_simulate_config(&args.config)?;
    if let Some(seed) = args.seed {
        config.scenario.seed = seed;
    }
    if let Some(reps) = args.reps {
        config.scenario.reps = reps;
    }
    // A configuration that cannot describe a scenario is a schema problem.
    config.scenario.validate().map_err(|e| match e {
        Error::Design(msg) => Error::Input(msg),
        other => other,
    })?;

    let sc = &config.scenario;
    let csv = match args.experiment {
        Experiment::Roc => {
            let mut out = format!("{}\n", RocCurve::csv_header());
            for &m in &config.roc_methods {
                roc_experiment(sc, m)?.write_csv_rows(&mut out);
            }
            out
        }
        Experiment::TauError => {
            let taus = config.taus.clone().unwrap_or_else(|| vec![sc.tau]);
            let gammas = config.gammas.clone().unwrap_or_else(|| vec![sc.gamma]);
            tau_error_experiment(sc, &taus, &gammas, &config.methods)?.to_csv()
        }
        Experiment::FdrPower => {
            fdr_power_experiment(sc, config.alpha1, config.alpha2, config.alpha)?.to_csv()
        }
    };

    std::fs::create_dir_all(&args.out)?;
    let csv_path = args.out.join(format!("{}.csv", args.experiment.name()));
    io::write_atomic(&csv_path, csv.as_bytes())?;

    let mut echo = serde_json::to_value(&config)?;
    echo["experiment"] = json!(args.experiment.name());
    echo["non_null_count"] = json!(sc.n_non_null());
    echo["non_null_rounding"] = json!("floor(gamma * n_genes)");
    echo["df_sigma"] = json!(sc.df_sigma());
    let mut manifest = RunManifest::new("simulate", echo, Some(sc.seed));
    manifest.input(&args.config)?;
    manifest.outputs.push(csv_path);
    manifest.write(&args.out.join("manifest.json"), started)
}
