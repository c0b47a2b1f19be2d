//! `bowtie` - command line front end for the verification suites and the
//! trajectory integrators.
//!
//! Exit codes: 0 success (all requested checks pass), 1 suite failure,
//! 2 usage error, 3 I/O error. Every error line on stderr starts with
//! `ERROR:<code>:`.

use bowtie_core::dynamics::{self, SimConfig};
use bowtie_core::instances::InstanceName;
use bowtie_core::verify::{self, SuiteReport, VerifyError};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "bowtie",
    version,
    about = "matched-pair Lie group dynamics workbench"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run named verification suites and write their JSON reports.
    Check(CheckArgs),
    /// Integrate a configured system and write the trajectory.
    Simulate(SimulateArgs),
    /// Run the residual / equivalence suite set from a config file.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct CheckArgs {
    /// Suite name, `all`, or `sign_resolution`.
    #[arg(long, default_value = "all")]
    suite: String,
    /// Instance name: `su2k`, `heisenberg`, `abelian:<n>`.
    #[arg(long, default_value = "su2k")]
    instance: String,
    /// Output path for the reports (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// `json` (default) or `csv`.
    #[arg(long, default_value = "json")]
    format: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Override the per-suite default sample count.
    #[arg(long)]
    samples: Option<u64>,
    /// Override the per-suite default tolerance.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Simulation config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output path for the trajectory (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// `csv` (default) or `json`.
    #[arg(long, default_value = "csv")]
    format: String,
    /// Override the config's step size.
    #[arg(long)]
    dt: Option<f64>,
    /// Override the config's horizon.
    #[arg(long)]
    t_final: Option<f64>,
    /// Override the config's spline sign branch (`upper` | `lower`).
    #[arg(long)]
    sign_branch: Option<String>,
    /// Override the config's seed echo.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Verification config (JSON); a built-in default set runs when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    format: String,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Debug, Deserialize)]
struct VerifyConfig {
    #[serde(default = "default_instance")]
    instance: String,
    #[serde(default)]
    suites: Vec<String>,
    #[serde(default)]
    samples: Option<u64>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    tol: Option<f64>,
    #[serde(default = "default_true")]
    sign_resolution: bool,
}

fn default_instance() -> String {
    "su2k".into()
}

fn default_true() -> bool {
    true
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            instance: default_instance(),
            suites: Vec::new(),
            samples: None,
            seed: None,
            tol: None,
            sign_resolution: true,
        }
    }
}

/// The residual / equivalence set used by `verify` when the config does not
/// name suites explicitly.
const VERIFY_DEFAULT_SUITES: &[&str] = &[
    "field_equivalence",
    "degeneration_coherence",
    "residual_identity",
    "so_el_consistency",
    "el2_consistency",
];

enum CliFailure {
    Usage(String, String),
    Io(String),
    Suites,
}

impl CliFailure {
    fn exit(&self) -> ExitCode {
        match self {
            CliFailure::Usage(code, msg) => {
                eprintln!("ERROR:{code}: {msg}");
                ExitCode::from(2)
            }
            CliFailure::Io(msg) => {
                eprintln!("ERROR:io: {msg}");
                ExitCode::from(3)
            }
            CliFailure::Suites => ExitCode::from(1),
        }
    }
}

fn usage(code: &str, msg: impl ToString) -> CliFailure {
    CliFailure::Usage(code.to_string(), msg.to_string())
}

fn classify_verify_error(e: VerifyError) -> CliFailure {
    match e {
        VerifyError::UnknownSuite(s) => usage("unknown-suite", s),
        VerifyError::NotApplicable { suite, instance } => usage(
            "unknown-suite",
            format!("{suite} is not defined for {instance}"),
        ),
        VerifyError::Instance(e) => usage("unknown-instance", e),
        VerifyError::ConventionUnresolved(msg) => {
            eprintln!("ERROR:convention-unresolved: {msg}");
            CliFailure::Suites
        }
        other => usage("bad-config", other),
    }
}

fn write_output(path: &Option<PathBuf>, data: &str) -> Result<(), CliFailure> {
    match path {
        Some(p) => std::fs::write(p, data)
            .map_err(|e| CliFailure::Io(format!("writing {}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(data.as_bytes())
                .map_err(|e| CliFailure::Io(format!("writing stdout: {e}")))
        }
    }
}

fn reports_csv(reports: &[SuiteReport]) -> String {
    let mut out = String::from("suite,instance,samples,seed,tolerance,max_residual,pass\n");
    for r in reports {
        out.push_str(&format!(
            "{},{},{},{},{:e},{:e},{}\n",
            r.suite, r.instance, r.samples, r.seed, r.tolerance, r.max_residual, r.pass
        ));
    }
    out
}

fn render_reports(reports: &[SuiteReport], format: &str) -> Result<String, CliFailure> {
    match format {
        "json" => Ok(format!("{:#}\n", serde_json::json!(reports))),
        "csv" => Ok(reports_csv(reports)),
        other => Err(usage("bad-args", format!("unknown format {other:?}"))),
    }
}

fn parse_instance(name: &str) -> Result<InstanceName, CliFailure> {
    InstanceName::parse(name).map_err(|e| usage("unknown-instance", e))
}

fn log_reports(reports: &[SuiteReport]) {
    for r in reports {
        eprintln!(
            "suite {:<24} instance {:<10} samples {:<5} seed {:<4} tol {:<9.1e} max {:<10.3e} {}",
            r.suite,
            r.instance,
            r.samples,
            r.seed,
            r.tolerance,
            r.max_residual,
            if r.pass { "pass" } else { "FAIL" }
        );
    }
}

fn run_check(args: &CheckArgs) -> Result<(), CliFailure> {
    let instance = parse_instance(&args.instance)?;
    eprintln!(
        "check: suite={} instance={} seed={} samples={:?} tol={:?}",
        args.suite, args.instance, args.seed, args.samples, args.tol
    );
    let reports: Vec<SuiteReport> = if args.suite == "all" {
        verify::run_all(&instance, args.samples, args.seed, args.tol)
            .map_err(classify_verify_error)?
    } else if args.suite == "sign_resolution" {
        let samples = args.samples.unwrap_or(100);
        let tol = args.tol.unwrap_or(1e-12);
        let res = verify::sign_resolution(&instance, samples, args.seed, tol)
            .map_err(classify_verify_error)?;
        eprintln!("sign_resolution: {}", res.details);
        vec![verify::sign_resolution_report(&res)]
    } else {
        vec![
            verify::run_suite(&args.suite, &instance, args.samples, args.seed, args.tol)
                .map_err(classify_verify_error)?,
        ]
    };
    log_reports(&reports);
    let rendered = render_reports(&reports, &args.format)?;
    write_output(&args.out, &rendered)?;
    if reports.iter().all(|r| r.pass) {
        Ok(())
    } else {
        Err(CliFailure::Suites)
    }
}

fn run_simulate(args: &SimulateArgs) -> Result<(), CliFailure> {
    let raw = std::fs::read_to_string(&args.config)
        .map_err(|e| CliFailure::Io(format!("reading {}: {e}", args.config.display())))?;
    let mut cfg: SimConfig = serde_json::from_str(&raw).map_err(|e| usage("bad-config", e))?;
    if let Some(dt) = args.dt {
        cfg.h = dt;
    }
    if let Some(t) = args.t_final {
        cfg.t_final = t;
    }
    if let Some(b) = &args.sign_branch {
        cfg.sign_branch = Some(
            dynamics::SignBranch::parse(b)
                .ok_or_else(|| usage("bad-args", format!("unknown sign branch {b:?}")))?,
        );
    }
    if let Some(seed) = args.seed {
        cfg.seed = Some(seed);
    }
    if cfg.h.is_nan() || cfg.h <= 0.0 {
        return Err(usage(
            "bad-config",
            format!("step must be positive, got {}", cfg.h),
        ));
    }
    if cfg.t_final.is_nan() || cfg.t_final <= 0.0 {
        return Err(usage(
            "bad-config",
            format!("horizon must be positive, got {}", cfg.t_final),
        ));
    }
    eprintln!(
        "simulate: instance={} system={} t_final={} h={} stride={} seed={:?}",
        cfg.instance, cfg.system, cfg.t_final, cfg.h, cfg.output_stride, cfg.seed
    );
    let out = dynamics::run_simulation(&cfg).map_err(|e| usage("bad-config", e))?;
    let rendered = match args.format.as_str() {
        "csv" => {
            dynamics::trajectory_csv(&out.columns, &out.trajectory.times, &out.trajectory.states)
        }
        "json" => {
            let rows: Vec<serde_json::Value> = out
                .trajectory
                .times
                .iter()
                .zip(&out.trajectory.states)
                .map(|(t, s)| serde_json::json!({ "t": t, "state": s.as_slice() }))
                .collect();
            format!(
                "{:#}\n",
                serde_json::json!({ "columns": out.columns, "rows": rows })
            )
        }
        other => return Err(usage("bad-args", format!("unknown format {other:?}"))),
    };
    write_output(&args.out, &rendered)
}

fn run_verify(args: &VerifyArgs) -> Result<(), CliFailure> {
    let mut cfg = match &args.config {
        Some(path) => {
            let raw = std::fs::read_to_string(path)
                .map_err(|e| CliFailure::Io(format!("reading {}: {e}", path.display())))?;
            serde_json::from_str::<VerifyConfig>(&raw).map_err(|e| usage("bad-config", e))?
        }
        None => VerifyConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.seed = Some(seed);
    }
    if let Some(samples) = args.samples {
        cfg.samples = Some(samples);
    }
    if let Some(tol) = args.tol {
        cfg.tol = Some(tol);
    }
    let instance = parse_instance(&cfg.instance)?;
    let seed = cfg.seed.unwrap_or(0);
    let suites: Vec<String> = if cfg.suites.is_empty() {
        VERIFY_DEFAULT_SUITES
            .iter()
            .map(|s| s.to_string())
            .collect()
    } else {
        cfg.suites.clone()
    };
    eprintln!(
        "verify: instance={} suites={:?} seed={seed}",
        cfg.instance, suites
    );
    let mut reports = Vec::new();
    for name in &suites {
        reports.push(
            verify::run_suite(name, &instance, cfg.samples, seed, cfg.tol)
                .map_err(classify_verify_error)?,
        );
    }
    if cfg.sign_resolution {
        let res = verify::sign_resolution(
            &instance,
            cfg.samples.unwrap_or(100),
            seed,
            cfg.tol.unwrap_or(1e-12),
        )
        .map_err(classify_verify_error)?;
        eprintln!("sign_resolution: {}", res.details);
        reports.push(verify::sign_resolution_report(&res));
    }
    log_reports(&reports);
    let rendered = render_reports(&reports, &args.format)?;
    write_output(&args.out, &rendered)?;
    if reports.iter().all(|r| r.pass) {
        Ok(())
    } else {
        Err(CliFailure::Suites)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                eprintln!("ERROR:usage: {e}");
                return ExitCode::from(2);
            }
            // --help / --version go to stdout with status 0
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    let outcome = match &cli.cmd {
        Cmd::Check(args) => run_check(args),
        Cmd::Simulate(args) => run_simulate(args),
        Cmd::Verify(args) => run_verify(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => failure.exit(),
    }
}
