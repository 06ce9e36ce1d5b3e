//! Argument parsing and dispatch for the `randstate` binary.
//!
//! Exit codes: 0 success, 1 usage or parameter error, 2 I/O error, 3 a run
//! finished but `--require-convergence` was set and something did not
//! converge.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use randstate::brachistochrone::{optimal_gate_time, sweep_phi};
use randstate::haar_baseline::haar_global_baseline;
use randstate::output::{write_baseline, write_lambda_sweep, write_run, write_sweep, Format};
use randstate::protocol::{convergence_report, run_ensemble, sweep_lambda, with_workers, DEFAULT_FIT_HI, DEFAULT_FIT_LO};
use randstate::qstate::MAX_QUBITS;
use randstate::{GeometryKind, MeasureKind, ProtocolConfig64, TwoQubitGate64};

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Help or version text requested; printed to stdout, exit 0.
    #[error("{0}")]
    Info(String),
    #[error("{0}")]
    Usage(String),
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("{0}")]
    Run(#[from] randstate::Error),
    #[error("not converged: {0}")]
    NotConverged(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Info(_) => 0,
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) | CliError::Run(randstate::Error::Io(_)) => EXIT_IO,
            CliError::Run(_) => EXIT_USAGE,
            CliError::NotConverged(_) => EXIT_NOT_CONVERGED,
        }
    }
}

fn usage(flag: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("error: invalid value for {flag}: {msg}"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Run,
    SweepPhi,
    SweepLambda,
    Baseline,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GateSpec {
    Canonical([f64; 3]),
    Entangler(f64),
}

impl GateSpec {
    fn build(self) -> randstate::Result<TwoQubitGate64> {
        match self {
            GateSpec::Canonical(l) => Ok(TwoQubitGate64::canonical(l).gate),
            GateSpec::Entangler(phi) => TwoQubitGate64::entangler(phi),
        }
    }
}

/// A validated invocation.
#[derive(Clone, Debug)]
pub struct RunSpec {
    pub command: Command,
    /// Protocol settings; `fixed_gate` is built from `gate`.
    pub config: ProtocolConfig64,
    pub gate: GateSpec,
    pub omega: f64,
    pub phi_grid: Vec<f64>,
    pub lambda_grid: Vec<f64>,
    pub workers: usize,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub require_convergence: bool,
}

#[derive(Parser, Debug)]
#[command(name = "randstate", version, about = "Random entangled states from repeated two-qubit gates")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Run the protocol and write the ΔE trajectory and convergence report.
    Run(Opts),
    /// Gate count and physical time for the entangler U_φ over a φ grid.
    SweepPhi(Opts),
    /// Gate counts for canonical gates over an ordered λ grid.
    SweepLambda(Opts),
    /// Haar-average entanglement for every level.
    Baseline(Opts),
}

#[derive(Args, Debug)]
struct Opts {
    /// Number of qubits N.
    #[arg(long, default_value_t = 6)]
    qubits: usize,
    /// nonlocal, local-open or local-periodic.
    #[arg(long, default_value = "nonlocal")]
    geometry: String,
    /// Canonical gate parameters λx,λy,λz in radians [default: pi/4,0,0].
    #[arg(long, value_name = "X,Y,Z", conflicts_with = "phi", allow_hyphen_values = true)]
    lambda: Option<String>,
    /// Use the entangler U_φ with this angle in [0, π] as the fixed gate.
    #[arg(long)]
    phi: Option<String>,
    #[arg(long, default_value_t = 1000)]
    realizations: usize,
    #[arg(long, default_value_t = 400)]
    max_gates: usize,
    #[arg(long, default_value_t = 1)]
    eval_stride: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 0.01)]
    threshold: f64,
    #[arg(long, default_value_t = 10)]
    confirm_window: usize,
    /// linear, vonneumann or both.
    #[arg(long, default_value = "linear")]
    measure: String,
    /// Energy scale of the gate-time formula.
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    /// φ grid as start:stop:step; angles may use pi, e.g. 3pi/4.
    #[arg(long, default_value = "pi/12:11pi/12:pi/12")]
    phi_grid: String,
    /// 1-D grid for each λ component, as start:stop:step.
    #[arg(long, default_value = "0:pi/4:pi/12")]
    lambda_grid: String,
    /// Worker threads [default: available processors].
    #[arg(long)]
    workers: Option<usize>,
    /// Output file; standard output when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    /// csv or json.
    #[arg(long, default_value = "csv")]
    format: String,
    /// Exit with status 3 when any reported quantity fails to converge.
    #[arg(long)]
    require_convergence: bool,
}

/// Parse an angle: a plain number, or a multiple of π such as `pi`, `-pi/2`,
/// `3pi/4`, `3*pi/4` or `π/12`, or a plain fraction such as `1/2`.
pub fn parse_angle(text: &str) -> Result<f64, String> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if let Ok(v) = t.parse::<f64>() {
        return if v.is_finite() { Ok(v) } else { Err(format!("{text:?} is not finite")) };
    }
    let bad = || format!("cannot read angle {text:?}");
    let (sign, body) = match t.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, t.as_str()),
    };
    let (numer, denom) = match body.split_once('/') {
        Some((n, d)) => (n, d.parse::<f64>().map_err(|_| bad())?),
        None => (body, 1.0),
    };
    if !(denom.is_finite() && denom != 0.0) {
        return Err(bad());
    }
    let value = match numer.strip_suffix("pi").or_else(|| numer.strip_suffix('π')) {
        Some(coef) => {
            let coef = coef.strip_suffix('*').unwrap_or(coef);
            let k = if coef.is_empty() { 1.0 } else { coef.parse::<f64>().map_err(|_| bad())? };
            k * std::f64::consts::PI
        }
        None => numer.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(sign * value / denom)
}

/// Expand `start:stop:step` into grid points. The last point is clamped to
/// `stop` so rounding never pushes it outside the range.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = text.split(':').collect();
    let [start, stop, step] = parts[..] else {
        return Err(format!("expected start:stop:step, got {text:?}"));
    };
    let (start, stop, step) = (parse_angle(start)?, parse_angle(stop)?, parse_angle(step)?);
    if !(step > 0.0) || stop < start {
        return Err(format!("grid {text:?} needs step > 0 and start ≤ stop"));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|k| (start + k as f64 * step).min(stop)).collect())
}

fn parse_lambda(text: &str) -> Result<[f64; 3], String> {
    let v = text.split(',').map(parse_angle).collect::<Result<Vec<f64>, String>>()?;
    <[f64; 3]>::try_from(v).map_err(|_| format!("expected three comma-separated values, got {text:?}"))
}

/// Parse the arguments that follow the program name.
pub fn parse_args<I, S>(argv: I) -> Result<RunSpec, CliError>
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let args = std::iter::once(OsString::from("randstate")).chain(argv.into_iter().map(Into::into));
    let cli = Cli::try_parse_from(args).map_err(|e| match e.kind() {
        clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => CliError::Info(e.to_string()),
        _ => CliError::Usage(e.to_string()),
    })?;
    let (command, o) = match cli.command {
        Sub::Run(o) => (Command::Run, o),
        Sub::SweepPhi(o) => (Command::SweepPhi, o),
        Sub::SweepLambda(o) => (Command::SweepLambda, o),
        Sub::Baseline(o) => (Command::Baseline, o),
    };

    if !(2..=MAX_QUBITS).contains(&o.qubits) {
        return Err(usage("--qubits", format!("{} is outside 2..={MAX_QUBITS}", o.qubits)));
    }
    let geometry: GeometryKind = o.geometry.parse().map_err(|e| usage("--geometry", e))?;
    let measures = match o.measure.as_str() {
        "both" => MeasureKind::ALL.to_vec(),
        m => vec![m.parse::<MeasureKind>().map_err(|e| usage("--measure", e))?],
    };
    let format: Format = o.format.parse().map_err(|e| usage("--format", e))?;
    let gate = match (&o.lambda, &o.phi) {
        (Some(l), _) => GateSpec::Canonical(parse_lambda(l).map_err(|e| usage("--lambda", e))?),
        (None, Some(p)) => {
            let phi = parse_angle(p).map_err(|e| usage("--phi", e))?;
            if !(0.0..=std::f64::consts::PI).contains(&phi) {
                return Err(usage("--phi", format!("{phi} is outside [0, π]")));
            }
            GateSpec::Entangler(phi)
        }
        (None, None) => GateSpec::Canonical([std::f64::consts::FRAC_PI_4, 0.0, 0.0]),
    };
    if o.realizations < 1 {
        return Err(usage("--realizations", "at least one realization is required"));
    }
    if o.eval_stride < 1 {
        return Err(usage("--eval-stride", "must be at least 1"));
    }
    if !(o.threshold > 0.0 && o.threshold < 1.0) {
        return Err(usage("--threshold", format!("{} is outside (0, 1)", o.threshold)));
    }
    if !(o.omega > 0.0 && o.omega.is_finite()) {
        return Err(usage("--omega", format!("{} is not positive", o.omega)));
    }
    let workers = match o.workers {
        Some(0) => return Err(usage("--workers", "must be at least 1")),
        Some(w) => w,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let phi_grid = parse_grid(&o.phi_grid).map_err(|e| usage("--phi-grid", e))?;
    if let Some(&bad) = phi_grid.iter().find(|&&p| !(0.0..=std::f64::consts::PI).contains(&p)) {
        return Err(usage("--phi-grid", format!("angle {bad} is outside [0, π]")));
    }
    let lambda_grid = parse_grid(&o.lambda_grid).map_err(|e| usage("--lambda-grid", e))?;

    let mut config = ProtocolConfig64::new(o.qubits, gate.build()?);
    config.geometry = geometry;
    config.realizations = o.realizations;
    config.max_gates = o.max_gates;
    config.eval_stride = o.eval_stride;
    config.seed = o.seed;
    config.measures = measures;
    config.threshold = o.threshold;
    config.confirm_window = o.confirm_window;

    Ok(RunSpec {
        command,
        config,
        gate,
        omega: o.omega,
        phi_grid,
        lambda_grid,
        workers,
        output: o.output,
        format,
        require_convergence: o.require_convergence,
    })
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| {
            CliError::Io(io::Error::new(e.kind(), format!("{}: {e}", p.display())))
        })?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Run a validated invocation, writing results to the chosen output.
pub fn execute(spec: &RunSpec) -> Result<(), CliError> {
    let mut out = open_output(&spec.output)?;
    let config = &spec.config;
    let mut missing = Vec::new();
    match spec.command {
        Command::Run => {
            if let GateSpec::Canonical(l) = spec.gate {
                if TwoQubitGate64::canonical(l).outside_reduced_range {
                    eprintln!("warning: λ = {l:?} lies outside [0, π/4]³; the gate is still applied as given");
                }
            }
            let traj = with_workers(spec.workers, || run_ensemble(config))??;
            let report = convergence_report(&traj, config.threshold, config.confirm_window, DEFAULT_FIT_HI, DEFAULT_FIT_LO);
            write_run(&mut out, &traj, &report, spec.format)?;
            for e in report.entries.iter().filter(|e| e.n_gates.gates().is_none()) {
                missing.push(format!("{} level {}", e.measure, e.level));
            }
        }
        Command::SweepPhi => {
            optimal_gate_time(0.0, spec.omega)?;
            let table = with_workers(spec.workers, || sweep_phi(config, &spec.phi_grid, spec.omega))??;
            write_sweep(&mut out, &table, spec.format)?;
            for r in table.rows.iter().filter(|r| r.n_gates.gates().is_none()) {
                missing.push(format!("φ = {}", r.phi));
            }
        }
        Command::SweepLambda => {
            if spec.lambda_grid.iter().any(|&l| !(0.0..=std::f64::consts::FRAC_PI_4).contains(&l)) {
                eprintln!("warning: λ grid leaves [0, π/4]; gates are still applied as given");
            }
            let rows = with_workers(spec.workers, || sweep_lambda(config, &spec.lambda_grid))??;
            write_lambda_sweep(&mut out, &rows, spec.format)?;
            for r in rows.iter().filter(|r| r.n_gates.gates().is_none()) {
                missing.push(format!("λ = {:?}", r.lambda));
            }
        }
        Command::Baseline => {
            let tables = config
                .measures
                .iter()
                .map(|&m| haar_global_baseline::<f64>(config.num_qubits, m))
                .collect::<randstate::Result<Vec<_>>>()?;
            write_baseline(&mut out, &tables, spec.format)?;
        }
    }
    out.flush()?;
    if spec.require_convergence && !missing.is_empty() {
        return Err(CliError::NotConverged(missing.join(", ")));
    }
    Ok(())
}

/// Parse, execute and report; returns the process exit status.
pub fn main_with<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let result = parse_args(argv).and_then(|spec| execute(&spec));
    match result {
        Ok(()) => 0,
        Err(CliError::Info(text)) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprintln!("{}", e.to_string().trim_end());
            e.exit_code()
        }
    }
}
