//! Command-line driver for the on-site density study.
//!
//! Three subcommands cover the full workflow: `trace` estimates the
//! time-dependent density of one site with any of the three measurement
//! routes and writes a per-point CSV; `signal` dumps one raw phase-probe
//! signal at a fixed time for external spectral analysis; `sweep` runs the
//! loss-versus-trials comparison across all routes and writes both the
//! loss table and the fitted log-log slopes.
//!
//! Every run is exactly reproducible from its `--seed`, and every output
//! CSV is accompanied by a `<name>.config.txt` sidecar recording the fully
//! resolved configuration that produced it. Diagnostics go to stderr; data
//! goes only to the output files.
//!
//! Exit codes: 0 on success, 1 for usage errors, 2 for model or I/O
//! errors, 3 for numerical failures.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qdens::benchmark::{
    estimate_trace, render_signal_csv, render_slope_csv, render_sweep_csv, render_trace_csv,
    sample_probe_signal, sweep_trials, tau_grid, time_grid, Experiment, SWEEP_REPLICATES,
};
use qdens::error::Error;
use qdens::estimators::Method;
use qdens::fermion::{jordan_wigner, load_model};
use qdens::measurement::{hadamard_test_probability, NoiseModel};
use qdens::seeding::derive_seed;
use qdens::statevector::StateVector;

/// Estimate and benchmark time-dependent on-site densities from simulated
/// quantum measurements.
#[derive(Parser)]
#[command(name = "qdens", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the density trace over a time grid and write a trace CSV.
    Trace(TraceArgs),
    /// Sample one raw probe signal at a fixed time and write a signal CSV.
    Signal(SignalArgs),
    /// Run the loss-versus-trials sweep and write sweep and slope CSVs.
    Sweep(SweepArgs),
}

/// Flags shared by every subcommand; defaults are the study's constants.
#[derive(Args)]
struct CommonArgs {
    /// Model file (`modes`/`1body`/`2body` text format).
    #[arg(long)]
    model: PathBuf,

    /// Site (mode index) whose density is estimated.
    #[arg(long, default_value_t = 0)]
    site: usize,

    /// End of the time grid, in the model's time units.
    #[arg(long, default_value_t = 3.0)]
    t_max: f64,

    /// Number of equally spaced time points, endpoints included.
    #[arg(long, default_value_t = 15)]
    t_points: usize,

    /// First-order product-formula steps per evolution.
    #[arg(long, default_value_t = 3)]
    trotter_steps: usize,

    /// Measurement shots per point (direct route) or per probe angle
    /// (harmonic route).
    #[arg(long, default_value_t = 3000)]
    shots: u64,

    /// Readout bit-flip probability applied to every sampled bit.
    #[arg(long, default_value_t = 0.01)]
    epsilon: f64,

    /// Estimation route, or `all` to run every route.
    #[arg(long, value_enum, default_value_t = MethodFlag::All)]
    method: MethodFlag,

    /// Number of probe angles for the harmonic route.
    #[arg(long, default_value_t = 40)]
    tau_points: usize,

    /// End of the probe-angle grid (start is 0, end excluded).
    #[arg(long, default_value_t = 12.566_370_614)]
    tau_max: f64,

    /// Particle count for the sequential-Monte-Carlo route.
    #[arg(long, default_value_t = 1000)]
    particles: usize,

    /// Adaptive experiment count for the sequential-Monte-Carlo route.
    #[arg(long, default_value_t = 3000)]
    experiments: u64,

    /// Master seed; equal seeds give byte-identical outputs.
    #[arg(long)]
    seed: u64,

    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TraceArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct SignalArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Evolution time at which the probe signal is sampled.
    #[arg(long, default_value_t = 0.0)]
    t: f64,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Comma-separated, strictly increasing trial counts.
    #[arg(
        long,
        value_delimiter = ',',
        default_values_t = [256u64, 512, 1024, 2048, 4096, 8192, 16384]
    )]
    trials: Vec<u64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodFlag {
    Direct,
    Harminv,
    Bayes,
    All,
}

impl MethodFlag {
    fn label(self) -> &'static str {
        match self {
            MethodFlag::Direct => "direct",
            MethodFlag::Harminv => "harminv",
            MethodFlag::Bayes => "bayes",
            MethodFlag::All => "all",
        }
    }

    fn selects(self, method: Method) -> bool {
        match self {
            MethodFlag::All => true,
            MethodFlag::Direct => method == Method::DirectZ,
            MethodFlag::Harminv => method == Method::HarmonicInversion,
            MethodFlag::Bayes => method == Method::Bayesian,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version print to stdout and succeed; everything
            // else is a usage error.
            let code = u8::from(err.use_stderr());
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

/// Map pipeline errors onto the documented exit codes: flag-level problems
/// are usage errors (1), anything about the model file or the filesystem
/// is a data error (2), and the rest are numerical failures (3).
fn exit_code(err: &Error) -> u8 {
    match err {
        Error::ZeroShots
        | Error::InvalidParameter(_)
        | Error::TooFewSamples { .. }
        | Error::TooFewPoints { .. } => 1,
        Error::Io { .. }
        | Error::ModelParse { .. }
        | Error::ModeIndex { .. }
        | Error::Hermiticity { .. }
        | Error::OccupationLength { .. } => 2,
        _ => 3,
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Trace(args) => cmd_trace(args),
        Command::Signal(args) => cmd_signal(args),
        Command::Sweep(args) => cmd_sweep(args),
    }
}

/// Build the experiment description shared by every subcommand: the model
/// is loaded, encoded, and paired with the two-electron initial state
/// (modes 0 and 1 occupied).
fn build_experiment(common: &CommonArgs) -> Result<Experiment, Error> {
    let model = load_model(&common.model)?;
    let n_modes = model.n_modes();
    if n_modes < 2 {
        // The initial state puts one electron in each of the first two
        // modes, so mode index 1 must exist.
        return Err(Error::ModeIndex { index: 1, n_modes });
    }
    if common.site >= n_modes {
        return Err(Error::ModeIndex {
            index: common.site,
            n_modes,
        });
    }
    let occupations: Vec<bool> = (0..n_modes).map(|p| p < 2).collect();
    let exp = Experiment {
        hamiltonian: jordan_wigner(&model),
        initial: StateVector::basis_state(&occupations),
        site: common.site,
        times: time_grid(common.t_points, common.t_max),
        trotter_steps: common.trotter_steps,
        noise: NoiseModel::new(common.epsilon)?,
        tau_points: common.tau_points,
        tau_max: common.tau_max,
        smc_particles: common.particles,
    };
    exp.validate()?;
    Ok(exp)
}

fn budget_for(common: &CommonArgs, method: Method) -> u64 {
    match method {
        Method::Bayesian => common.experiments,
        _ => common.shots,
    }
}

fn cmd_trace(args: TraceArgs) -> Result<(), Error> {
    let common = &args.common;
    basic_checks(common)?;
    let exp = build_experiment(common)?;

    let mut traces = Vec::new();
    for (mi, &method) in Method::ALL.iter().enumerate() {
        if !common.method.selects(method) {
            continue;
        }
        traces.push(estimate_trace(
            &exp,
            method,
            budget_for(common, method),
            derive_seed(common.seed, &[mi as u64]),
        )?);
    }

    write_output(&common.out, &render_trace_csv(&traces))?;
    write_sidecar(&common.out, &config_echo("trace", common, &[]))?;
    eprintln!("wrote {}", common.out.display());
    Ok(())
}

fn cmd_signal(args: SignalArgs) -> Result<(), Error> {
    let common = &args.common;
    basic_checks(common)?;
    if !args.t.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "--t must be finite, got {}",
            args.t
        )));
    }
    let exp = build_experiment(common)?;
    let state = exp.evolved(args.t)?;
    let taus = tau_grid(common.tau_points, common.tau_max);

    let mut ideal = Vec::with_capacity(taus.len());
    for &tau in &taus {
        ideal.push((tau, hadamard_test_probability(&state, common.site, tau)?));
    }
    let observed = sample_probe_signal(
        &state,
        common.site,
        &exp.noise,
        &taus,
        common.shots,
        common.seed,
        &[0],
    )?;

    write_output(
        &common.out,
        &render_signal_csv(&ideal, &observed, common.shots),
    )?;
    let extra = [("t".to_string(), format!("{}", args.t))];
    write_sidecar(&common.out, &config_echo("signal", common, &extra))?;
    eprintln!("wrote {}", common.out.display());
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<(), Error> {
    let common = &args.common;
    basic_checks(common)?;
    let exp = build_experiment(common)?;

    let seeds: Vec<u64> = (0..SWEEP_REPLICATES)
        .map(|r| derive_seed(common.seed, &[r as u64]))
        .collect();
    let results = sweep_trials(&exp, &args.trials, &seeds)?;

    let trials_text = args
        .trials
        .iter()
        .map(u64::to_string)
        .collect::<Vec<_>>()
        .join(",");
    let extra = [("trials".to_string(), trials_text)];

    write_output(&common.out, &render_sweep_csv(&results, seeds.len()))?;
    write_sidecar(&common.out, &config_echo("sweep", common, &extra))?;

    let slopes = slopes_path(&common.out);
    write_output(&slopes, &render_slope_csv(&results))?;
    write_sidecar(&slopes, &config_echo("sweep", common, &extra))?;

    eprintln!("wrote {} and {}", common.out.display(), slopes.display());
    Ok(())
}

/// Flag-range validation shared by all subcommands; failures are usage
/// errors.
fn basic_checks(common: &CommonArgs) -> Result<(), Error> {
    let mut problems: Vec<&str> = Vec::new();
    if common.shots == 0 {
        problems.push("--shots must be positive");
    }
    if common.experiments == 0 {
        problems.push("--experiments must be positive");
    }
    if common.particles < 100 {
        problems.push("--particles must be at least 100");
    }
    if common.t_points == 0 {
        problems.push("--t-points must be positive");
    }
    if !(common.t_max.is_finite() && common.t_max > 0.0) {
        problems.push("--t-max must be positive");
    }
    if common.trotter_steps == 0 {
        problems.push("--trotter-steps must be positive");
    }
    if common.tau_points < 8 {
        problems.push("--tau-points must be at least 8");
    }
    if !(common.tau_max.is_finite() && common.tau_max > 0.0) {
        problems.push("--tau-max must be positive");
    }
    match problems.first() {
        Some(msg) => Err(Error::InvalidParameter((*msg).to_string())),
        None => Ok(()),
    }
}

/// The sweep's companion file for fitted slopes: `sweep.csv` becomes
/// `sweep.slopes.csv`.
fn slopes_path(out: &Path) -> PathBuf {
    match (out.file_stem(), out.extension()) {
        (Some(stem), Some(ext)) => out.with_file_name(format!(
            "{}.slopes.{}",
            stem.to_string_lossy(),
            ext.to_string_lossy()
        )),
        _ => {
            let mut raw = out.as_os_str().to_owned();
            raw.push(".slopes");
            PathBuf::from(raw)
        }
    }
}

/// Render the fully resolved configuration as `key = value` lines.
fn config_echo(command: &str, common: &CommonArgs, extra: &[(String, String)]) -> String {
    let mut text = String::new();
    let mut put = |key: &str, value: String| {
        let _ = writeln!(text, "{key} = {value}");
    };
    put("command", command.to_string());
    put("model", common.model.display().to_string());
    put("site", common.site.to_string());
    put("t_max", format!("{}", common.t_max));
    put("t_points", common.t_points.to_string());
    put("trotter_steps", common.trotter_steps.to_string());
    put("shots", common.shots.to_string());
    put("epsilon", format!("{}", common.epsilon));
    put("method", common.method.label().to_string());
    put("tau_points", common.tau_points.to_string());
    put("tau_max", format!("{}", common.tau_max));
    put("particles", common.particles.to_string());
    put("experiments", common.experiments.to_string());
    put("seed", common.seed.to_string());
    put("out", common.out.display().to_string());
    for (key, value) in extra {
        put(key, value.clone());
    }
    text
}

fn write_output(path: &Path, content: &str) -> Result<(), Error> {
    std::fs::write(path, content).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_sidecar(csv_path: &Path, content: &str) -> Result<(), Error> {
    let mut raw = csv_path.as_os_str().to_owned();
    raw.push(".config.txt");
    write_output(&PathBuf::from(raw), content)
}
