//! `qrwr` command-line front end.
//!
//! Exit status: 0 on success, 1 for domain, singular or infeasible
//! computations (and failed self-checks), 2 for configuration errors.

// `!(x > y)` is used on purpose so NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod output;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qrwr_core::detection::{error_probability, required_snr, DetectionInputs, Protocol, RmResult};
use qrwr_core::mc::{
    simulate_direct_detection, simulate_sp_covariance, validate_erfc, McConfig, McReport,
};
use qrwr_core::selfcheck::{self, CheckOutcome, SelfcheckOptions};
use qrwr_core::sweep::{
    contour_rm_unity, scenario_line, sweep_grid, Axis, ContourLine, OutputQuantity, ScenarioLine,
};

use config::{Efficiencies, McExperiment, ScenarioConfig};
use output::{scenario_csv, sweep_csv, to_json, ResultEnvelope, ENGINE_VERSION};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Engine(#[from] qrwr_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("selfcheck failed: {0}")]
    CheckFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Engine(qrwr_core::Error::Config(_)) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "qrwr",
    version,
    about = "Quantum radar vs. quantum radar warning receiver calculations"
)]
pub struct Cli {
    /// Scenario configuration file (TOML). Defaults apply when omitted.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Output file. JSON commands print to stdout when omitted; sweep and
    /// scenario default to `sweep.csv` / `scenario.csv`.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// RNG seed for Monte Carlo work; overrides `[mc] seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// SNR and error probability of one protocol at `K` trials.
    Snr(SnrArgs),
    /// Error probability for an SNR, or the SNR needed for an error probability.
    Perr(PerrArgs),
    /// Measurement ratio R_M = K_T / K_R and its regime.
    Rm,
    /// Grid sweep to CSV, with a JSON sidecar holding metadata and the R_M = 1 contour.
    Sweep,
    /// Range/weather scenario lines to CSV, with a JSON sidecar.
    Scenario,
    /// Monte Carlo photon-counting experiment.
    Mc(McArgs),
    /// Built-in reference checks; exits 1 if any fails.
    Selfcheck(SelfcheckArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ProtocolArg {
    Target,
    Sp,
    Gs,
}

impl From<ProtocolArg> for Protocol {
    fn from(p: ProtocolArg) -> Self {
        match p {
            ProtocolArg::Target => Protocol::TargetDirect,
            ProtocolArg::Sp => Protocol::QiSinglePhoton,
            ProtocolArg::Gs => Protocol::QiGaussian,
        }
    }
}

#[derive(Debug, Args)]
pub struct SnrArgs {
    /// Defaults to `[detection] protocol`.
    #[arg(long, value_enum)]
    pub protocol: Option<ProtocolArg>,
    /// Number of trials `K`; defaults to `[detection] trials`.
    #[arg(long, allow_negative_numbers = true)]
    pub trials: Option<f64>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct PerrArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub snr: Option<f64>,
    /// Inverse direction: the SNR reaching this error probability.
    #[arg(long = "p-err", allow_negative_numbers = true)]
    pub p_err: Option<f64>,
}

#[derive(Debug, Args)]
pub struct McArgs {
    #[arg(long, value_enum)]
    pub experiment: Option<ExperimentArg>,
    #[arg(long)]
    pub shots: Option<u64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ExperimentArg {
    Direct,
    SpCovariance,
    Erfc,
}

#[derive(Debug, Args)]
pub struct SelfcheckArgs {
    /// Monte Carlo shots per SNR value.
    #[arg(long, default_value_t = 100_000)]
    pub mc_shots: u64,
}

/// Parses `argv`, runs the command, prints diagnostics, and returns the exit status.
pub fn run<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn load_config(path: Option<&Path>) -> Result<ScenarioConfig, CliError> {
    match path {
        None => Ok(ScenarioConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|source| CliError::Io {
                path: p.to_path_buf(),
                source,
            })?;
            ScenarioConfig::parse(&text).map_err(|e| match e {
                CliError::Config(msg) => CliError::Config(format!("{}: {msg}", p.display())),
                other => other,
            })
        }
    }
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let mut cfg = load_config(cli.config.as_deref())?;
    if let Some(seed) = cli.seed {
        cfg.mc.seed = seed;
    }
    match &cli.command {
        Command::Snr(args) => emit(cli, &cfg, "snr", &snr(&cfg, args)?),
        Command::Perr(args) => emit(cli, &cfg, "perr", &perr(args)?),
        Command::Rm => emit(cli, &cfg, "rm", &rm(&cfg)?),
        Command::Sweep => sweep(cli, &cfg),
        Command::Scenario => scenario(cli, &cfg),
        Command::Mc(args) => {
            if let Some(e) = args.experiment {
                cfg.mc.experiment = match e {
                    ExperimentArg::Direct => McExperiment::Direct,
                    ExperimentArg::SpCovariance => McExperiment::SpCovariance,
                    ExperimentArg::Erfc => McExperiment::Erfc,
                };
            }
            if let Some(shots) = args.shots {
                cfg.mc.shots = shots;
            }
            emit(cli, &cfg, "mc", &mc(&cfg)?)
        }
        Command::Selfcheck(args) => {
            let opts = SelfcheckOptions {
                seed: cli.seed.unwrap_or(SelfcheckOptions::default().seed),
                mc_shots: args.mc_shots,
            };
            let outcomes = selfcheck::run(&opts);
            for c in &outcomes {
                eprintln!(
                    "{} {:>3} {}: {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.id,
                    c.name,
                    c.detail
                );
            }
            emit(
                cli,
                &cfg,
                "selfcheck",
                &SelfcheckPayload::new(outcomes.clone()),
            )?;
            let failed: Vec<_> = outcomes
                .iter()
                .filter(|c| !c.passed)
                .map(|c| c.id.as_str())
                .collect();
            if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError::CheckFailed(failed.join(", ")))
            }
        }
    }
}

fn envelope<T: Serialize>(cfg: &ScenarioConfig, command: &str, payload: T) -> ResultEnvelope<T> {
    ResultEnvelope {
        command: command.to_string(),
        config_hash: cfg.hash(),
        engine_version: ENGINE_VERSION,
        payload,
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Envelope JSON to `--out` or stdout.
fn emit<T: Serialize>(
    cli: &Cli,
    cfg: &ScenarioConfig,
    command: &str,
    payload: &T,
) -> Result<(), CliError> {
    let text = to_json(&envelope(cfg, command, payload));
    match &cli.out {
        Some(path) => write_file(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SnrPayload {
    pub protocol: Protocol,
    pub trials: f64,
    pub snr: f64,
    pub p_err: f64,
    pub n_s: f64,
    pub var_bg: f64,
    pub efficiencies: Efficiencies,
}

fn snr(cfg: &ScenarioConfig, args: &SnrArgs) -> Result<SnrPayload, CliError> {
    let protocol = args
        .protocol
        .map(Protocol::from)
        .unwrap_or(cfg.detection.protocol);
    let trials = args.trials.unwrap_or(cfg.detection.trials);
    let op = cfg.operating_point()?;
    let inputs: DetectionInputs = match protocol {
        Protocol::TargetDirect => op.target_inputs(),
        _ => op.radar_inputs(),
    };
    let result = inputs.evaluate(protocol, trials)?;
    Ok(SnrPayload {
        protocol,
        trials,
        snr: result.snr,
        p_err: result.p_err,
        n_s: inputs.signal.total(),
        var_bg: inputs.var_bg,
        efficiencies: cfg.efficiencies()?,
    })
}

#[derive(Debug, Serialize)]
pub struct PerrPayload {
    pub snr: f64,
    pub p_err: f64,
}

fn perr(args: &PerrArgs) -> Result<PerrPayload, CliError> {
    match (args.snr, args.p_err) {
        (Some(snr), _) => Ok(PerrPayload {
            snr,
            p_err: error_probability(snr)?,
        }),
        (None, Some(p)) => Ok(PerrPayload {
            snr: required_snr(p)?,
            p_err: p,
        }),
        (None, None) => Err(CliError::Config("perr needs --snr or --p-err".into())),
    }
}

#[derive(Debug, Serialize)]
pub struct RmPayload {
    pub radar_protocol: Protocol,
    pub p_err: f64,
    pub required_snr: f64,
    pub var_bg_target: f64,
    pub var_bg_radar: f64,
    pub n_s: f64,
    pub efficiencies: Efficiencies,
    #[serde(flatten)]
    pub result: RmResult,
}

fn rm(cfg: &ScenarioConfig) -> Result<RmPayload, CliError> {
    let op = cfg.operating_point()?;
    Ok(RmPayload {
        radar_protocol: op.radar_protocol,
        p_err: op.p_err,
        required_snr: required_snr(op.p_err)?,
        var_bg_target: op.target_background.variance(),
        var_bg_radar: op.radar_background.variance(),
        n_s: op.signal.total(),
        efficiencies: cfg.efficiencies()?,
        result: op.rm()?,
    })
}

/// Sidecar path: the output path with a `.json` extension.
fn sidecar_path(out: &Path) -> Result<PathBuf, CliError> {
    if out.extension().is_some_and(|e| e == "json") {
        return Err(CliError::Config(format!(
            "--out {} would collide with its JSON sidecar; use a .csv name",
            out.display()
        )));
    }
    Ok(out.with_extension("json"))
}

#[derive(Debug, Serialize)]
pub struct InfeasibleNode {
    pub x: f64,
    pub y: f64,
    pub reason: String,
}

#[derive(Debug, Serialize)]
pub struct SweepPayload {
    pub csv: String,
    pub x: Axis,
    pub y: Axis,
    pub output: OutputQuantity,
    pub radar_protocol: Protocol,
    /// FNV-1a digest of the resolved sweep specification.
    pub scenario_hash: String,
    pub nodes: usize,
    pub infeasible: Vec<InfeasibleNode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contour: Option<Vec<ContourLine>>,
}

fn sweep(cli: &Cli, cfg: &ScenarioConfig) -> Result<(), CliError> {
    let spec = cfg.sweep_spec()?;
    let result = sweep_grid(&spec)?;
    let out = cli
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("sweep.csv"));
    let sidecar = sidecar_path(&out)?;
    let contour = if cfg.sweep.contour {
        Some(contour_rm_unity(&spec)?.lines)
    } else {
        None
    };
    let infeasible = result
        .rows()
        .filter_map(|(x, y, n)| {
            n.infeasible.as_ref().map(|reason| InfeasibleNode {
                x,
                y,
                reason: reason.clone(),
            })
        })
        .collect();
    let payload = SweepPayload {
        csv: file_name(&out),
        x: result.x,
        y: result.y,
        output: result.output,
        radar_protocol: spec.fixed.radar_protocol,
        scenario_hash: format!("{:016x}", result.metadata.scenario_hash),
        nodes: result.x_values.len() * result.y_values.len(),
        infeasible,
        contour,
    };
    write_file(&out, &sweep_csv(&result))?;
    write_file(&sidecar, &to_json(&envelope(cfg, "sweep", payload)))?;
    eprintln!("wrote {} and {}", out.display(), sidecar.display());
    Ok(())
}

fn file_name(p: &Path) -> String {
    p.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default()
}

#[derive(Debug, Serialize)]
pub struct ScenarioPayload {
    pub csv: String,
    pub radar_protocol: Protocol,
    pub n_s: f64,
    pub var_bg: f64,
    pub lines: Vec<ScenarioLine>,
}

fn scenario(cli: &Cli, cfg: &ScenarioConfig) -> Result<(), CliError> {
    let setup = cfg.scenario_setup()?;
    let lines = cfg
        .scenario
        .weathers
        .iter()
        .map(|&w| scenario_line(&cfg.scenario.ranges_km, w, &setup))
        .collect::<qrwr_core::Result<Vec<_>>>()?;
    let out = cli
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("scenario.csv"));
    let sidecar = sidecar_path(&out)?;
    let payload = ScenarioPayload {
        csv: file_name(&out),
        radar_protocol: setup.radar_protocol,
        n_s: setup.signal.total(),
        var_bg: setup.background.variance(),
        lines,
    };
    write_file(&out, &scenario_csv(&payload.lines))?;
    write_file(&sidecar, &to_json(&envelope(cfg, "scenario", &payload)))?;
    eprintln!("wrote {} and {}", out.display(), sidecar.display());
    Ok(())
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum McPayload {
    Single(McReport),
    Grid {
        snr_grid: Vec<f64>,
        reports: Vec<McReport>,
    },
}

fn mc(cfg: &ScenarioConfig) -> Result<McPayload, CliError> {
    let eta = cfg.efficiencies()?;
    let m = &cfg.mc;
    let mut run = McConfig {
        seed: m.seed,
        shots: m.shots,
        trials_per_shot: m.trials_per_shot,
        signal: cfg.signal()?,
        background: cfg.target_background()?,
        eta_signal: eta.eta_t,
        eta_ancilla: eta.eta_anc,
        threshold_rule: m.threshold,
    };
    Ok(match m.experiment {
        McExperiment::Direct => McPayload::Single(simulate_direct_detection(&run)?),
        McExperiment::SpCovariance => {
            run.background = cfg.radar_background()?;
            run.eta_signal = eta.eta_r;
            McPayload::Single(simulate_sp_covariance(&run)?)
        }
        McExperiment::Erfc => McPayload::Grid {
            snr_grid: m.snr_grid.clone(),
            reports: validate_erfc(&m.snr_grid, &run)?,
        },
    })
}

#[derive(Debug, Serialize)]
pub struct SelfcheckPayload {
    pub passed: usize,
    pub failed: usize,
    pub checks: Vec<CheckOutcome>,
}

impl SelfcheckPayload {
    fn new(checks: Vec<CheckOutcome>) -> Self {
        let passed = checks.iter().filter(|c| c.passed).count();
        Self {
            passed,
            failed: checks.len() - passed,
            checks,
        }
    }
}
