//! The `revcap` command line.
//!
//! Arguments are parsed with clap, validated into a [`CommandRequest`] before
//! any computation, executed on a rayon pool of `--jobs` threads and printed
//! as CSV or JSON. Exit codes: 0 success, 1 computation or suite failure,
//! 2 usage error.

use std::f64::consts::FRAC_PI_2;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::capacity::{
    capacity_curve, noise_threshold, noise_threshold_curve, optimize_population_with, CurveRow,
    NoiseThreshold, DEFAULT_TOL,
};
use crate::channels::{ChannelSpec, Family};
use crate::closedform::{
    closed_form_value, extremum_scan, general_input, generic_value, theta_profile, InputParams,
};
use crate::output::{format_number, Cell, Format, Table};
use crate::qinfo::{information, Measure, Method};
use crate::verify::{self, Suite};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const DEFAULT_THRESHOLD_TOL: f64 = 1e-6;
pub const DEFAULT_SCAN_GRID: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Identity,
    Ad,
    Gad,
    Erasure,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MeasureArg {
    Ci,
    Rci,
    Both,
}

impl MeasureArg {
    fn measures(self) -> Vec<Measure> {
        match self {
            MeasureArg::Ci => vec![Measure::Ci],
            MeasureArg::Rci => vec![Measure::Rci],
            MeasureArg::Both => Measure::BOTH.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Generic,
    Closed,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScanWhat {
    Curve,
    Extrema,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureId {
    Fig4,
    Fig6,
    Fig7,
    Fig8,
}

#[derive(Debug, Parser)]
#[command(
    name = "revcap",
    version,
    about = "Coherent and reverse coherent information of small quantum channels"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: FormatArg,

    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for sweeps and suites.
    #[arg(long, global = true, env = "REVCAP_JOBS", default_value_t = 1)]
    jobs: usize,
}

#[derive(Debug, Args)]
struct ChannelArgs {
    #[arg(long, value_enum)]
    channel: FamilyArg,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Dimension of the identity channel.
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    in_dim: Option<usize>,
    #[arg(long)]
    out_dim: Option<usize>,
    #[arg(long)]
    env_dim: Option<usize>,
    /// Seed of the random channel.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Information of one channel at one input.
    Info {
        #[command(flatten)]
        channel: ChannelArgs,
        /// Excited-state population of the input.
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = FRAC_PI_2)]
        theta: f64,
        #[arg(long, default_value_t = 0.0)]
        phi: f64,
        #[arg(long, value_enum, default_value = "both")]
        measure: MeasureArg,
        #[arg(long, value_enum, default_value = "generic")]
        method: MethodArg,
    },
    /// Single-letter capacity optimized over the input population.
    Capacity {
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long, value_enum, default_value = "both")]
        measure: MeasureArg,
        #[arg(long, value_enum, default_value = "closed")]
        method: MethodArg,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Capacities on a uniform grid of the damping parameter.
    Curve {
        #[arg(long, value_enum)]
        channel: FamilyArg,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        eta_from: f64,
        #[arg(long, default_value_t = 1.0)]
        eta_to: f64,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[arg(long, value_enum, default_value = "both")]
        measure: MeasureArg,
        /// Also print the unclamped optima.
        #[arg(long)]
        raw: bool,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Smallest thermal noise α that removes the GAD capacity.
    NoiseThreshold {
        /// Single damping parameter; otherwise sweep.
        #[arg(long, conflicts_with_all = ["eta_from", "eta_to", "steps"])]
        eta: Option<f64>,
        #[arg(long)]
        eta_from: Option<f64>,
        #[arg(long)]
        eta_to: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long, value_enum, default_value = "both")]
        measure: MeasureArg,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD_TOL)]
        tol: f64,
    },
    /// Information against the input angle θ at fixed population.
    ScanTheta {
        #[arg(long, value_enum)]
        channel: FamilyArg,
        #[arg(long)]
        eta: f64,
        #[arg(long)]
        alpha: Option<f64>,
        /// Populations, comma separated or repeated.
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<f64>,
        #[arg(long, value_enum, default_value = "both")]
        measure: MeasureArg,
        #[arg(long, value_enum, default_value = "curve")]
        what: ScanWhat,
        #[arg(long, default_value_t = DEFAULT_SCAN_GRID)]
        grid: usize,
    },
    /// Run verification suites.
    Verify {
        /// Suite names, comma separated, or `all`.
        #[arg(long, value_delimiter = ',', default_value = "all")]
        suite: Vec<String>,
        /// Replace every suite's tolerance.
        #[arg(long)]
        tolerance: Option<f64>,
        #[arg(long, default_value_t = verify::DEFAULT_SEED)]
        seed: u64,
        /// Print the formula-errata table instead of the suite summary.
        #[arg(long)]
        errata: bool,
    },
    /// Print, or with --out-dir run, the commands behind a figure.
    Figure {
        #[arg(value_enum)]
        id: FigureId,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum EtaSelection {
    Single(f64),
    Sweep(f64, f64, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Info {
        channel: ChannelSpec,
        input: InputParams,
        measures: Vec<Measure>,
        methods: Vec<Method>,
    },
    Capacity {
        channel: ChannelSpec,
        measures: Vec<Measure>,
        method: Method,
        tol: f64,
    },
    Curve {
        family: Family,
        alpha: Option<f64>,
        sweep: (f64, f64, usize),
        measures: Vec<Measure>,
        raw: bool,
        tol: f64,
    },
    NoiseThreshold {
        etas: EtaSelection,
        measures: Vec<Measure>,
        tol: f64,
    },
    ScanTheta {
        family: Family,
        eta: f64,
        alpha: f64,
        ps: Vec<f64>,
        measures: Vec<Measure>,
        what: ScanWhat,
        grid: usize,
    },
    Verify {
        suites: Vec<Suite>,
        tolerance: Option<f64>,
        seed: u64,
        errata: bool,
    },
}

/// A validated invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandRequest {
    pub command: Command,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub jobs: usize,
}

impl CommandRequest {
    fn new(command: Command) -> Self {
        Self {
            command,
            format: Format::Csv,
            out: None,
            jobs: 1,
        }
    }

    /// Arguments that reproduce this request, without the program name.
    pub fn to_args(&self) -> Vec<String> {
        let mut a: Vec<String> = Vec::new();
        let flag = |a: &mut Vec<String>, name: &str, value: String| {
            a.push(format!("--{name}"));
            a.push(value);
        };
        match &self.command {
            Command::Info {
                channel,
                input,
                measures,
                methods,
            } => {
                a.push("info".into());
                channel_args(&mut a, channel);
                flag(&mut a, "p", num(input.p()));
                flag(&mut a, "theta", num(input.theta()));
                flag(&mut a, "phi", num(input.phi()));
                flag(&mut a, "measure", measure_arg(measures));
                let m = match methods.as_slice() {
                    [Method::Generic] => "generic",
                    [Method::ClosedForm] => "closed",
                    _ => "both",
                };
                flag(&mut a, "method", m.into());
            }
            Command::Capacity {
                channel,
                measures,
                method,
                tol,
            } => {
                a.push("capacity".into());
                channel_args(&mut a, channel);
                flag(&mut a, "measure", measure_arg(measures));
                flag(&mut a, "method", method.name().into());
                flag(&mut a, "tol", num(*tol));
            }
            Command::Curve {
                family,
                alpha,
                sweep,
                measures,
                raw,
                tol,
            } => {
                a.push("curve".into());
                flag(&mut a, "channel", family.name().into());
                if let Some(alpha) = alpha {
                    flag(&mut a, "alpha", num(*alpha));
                }
                flag(&mut a, "eta-from", num(sweep.0));
                flag(&mut a, "eta-to", num(sweep.1));
                flag(&mut a, "steps", sweep.2.to_string());
                flag(&mut a, "measure", measure_arg(measures));
                if *raw {
                    a.push("--raw".into());
                }
                flag(&mut a, "tol", num(*tol));
            }
            Command::NoiseThreshold {
                etas,
                measures,
                tol,
            } => {
                a.push("noise-threshold".into());
                match etas {
                    EtaSelection::Single(eta) => flag(&mut a, "eta", num(*eta)),
                    EtaSelection::Sweep(from, to, steps) => {
                        flag(&mut a, "eta-from", num(*from));
                        flag(&mut a, "eta-to", num(*to));
                        flag(&mut a, "steps", steps.to_string());
                    }
                }
                flag(&mut a, "measure", measure_arg(measures));
                flag(&mut a, "tol", num(*tol));
            }
            Command::ScanTheta {
                family,
                eta,
                alpha,
                ps,
                measures,
                what,
                grid,
            } => {
                a.push("scan-theta".into());
                flag(&mut a, "channel", family.name().into());
                flag(&mut a, "eta", num(*eta));
                if *family == Family::Gad {
                    flag(&mut a, "alpha", num(*alpha));
                }
                let ps: Vec<String> = ps.iter().map(|&p| num(p)).collect();
                flag(&mut a, "p", ps.join(","));
                flag(&mut a, "measure", measure_arg(measures));
                let what = match what {
                    ScanWhat::Curve => "curve",
                    ScanWhat::Extrema => "extrema",
                };
                flag(&mut a, "what", what.into());
                flag(&mut a, "grid", grid.to_string());
            }
            Command::Verify {
                suites,
                tolerance,
                seed,
                errata,
            } => {
                a.push("verify".into());
                let names: Vec<&str> = suites.iter().map(|s| s.name()).collect();
                let all = suites.as_slice() == Suite::ALL.as_slice();
                flag(
                    &mut a,
                    "suite",
                    if all { "all".into() } else { names.join(",") },
                );
                if let Some(t) = tolerance {
                    flag(&mut a, "tolerance", num(*t));
                }
                flag(&mut a, "seed", seed.to_string());
                if *errata {
                    a.push("--errata".into());
                }
            }
        }
        if self.format == Format::Json {
            flag(&mut a, "format", "json".into());
        }
        if let Some(out) = &self.out {
            flag(&mut a, "out", out.display().to_string());
        }
        if self.jobs != 1 {
            flag(&mut a, "jobs", self.jobs.to_string());
        }
        a
    }
}

fn num(x: f64) -> String {
    format_number(x)
}

fn measure_arg(measures: &[Measure]) -> String {
    match measures {
        [m] => m.name().into(),
        _ => "both".into(),
    }
}

fn channel_args(a: &mut Vec<String>, spec: &ChannelSpec) {
    let mut push = |k: &str, v: String| {
        a.push(format!("--{k}"));
        a.push(v);
    };
    push("channel", spec.family().name().into());
    match *spec {
        ChannelSpec::Identity { dim } => push("dim", dim.to_string()),
        ChannelSpec::AmplitudeDamping { eta } => push("eta", num(eta)),
        ChannelSpec::GeneralizedAmplitudeDamping { eta, alpha } => {
            push("eta", num(eta));
            push("alpha", num(alpha));
        }
        ChannelSpec::Erasure { epsilon } => push("epsilon", num(epsilon)),
        ChannelSpec::Random {
            in_dim,
            out_dim,
            env_dim,
            seed,
        } => {
            push("in-dim", in_dim.to_string());
            push("out-dim", out_dim.to_string());
            push("env-dim", env_dim.to_string());
            push("seed", seed.to_string());
        }
    }
}

/// The requests that regenerate a figure's data.
pub fn figure_presets(id: FigureId) -> Vec<CommandRequest> {
    let both = Measure::BOTH.to_vec();
    match id {
        FigureId::Fig4 => vec![CommandRequest::new(Command::Curve {
            family: Family::Ad,
            alpha: None,
            sweep: (0.0, 1.0, 100),
            measures: both,
            raw: false,
            tol: DEFAULT_TOL,
        })],
        FigureId::Fig6 => vec![
            CommandRequest::new(Command::NoiseThreshold {
                etas: EtaSelection::Sweep(0.5, 1.0, 50),
                measures: vec![Measure::Ci],
                tol: DEFAULT_THRESHOLD_TOL,
            }),
            CommandRequest::new(Command::NoiseThreshold {
                etas: EtaSelection::Sweep(0.0, 1.0, 100),
                measures: vec![Measure::Rci],
                tol: DEFAULT_THRESHOLD_TOL,
            }),
        ],
        FigureId::Fig7 => vec![CommandRequest::new(Command::ScanTheta {
            family: Family::Gad,
            eta: 0.62,
            alpha: 0.5,
            ps: vec![0.25, 0.5],
            measures: vec![Measure::Ci],
            what: ScanWhat::Curve,
            grid: DEFAULT_SCAN_GRID,
        })],
        FigureId::Fig8 => vec![CommandRequest::new(Command::ScanTheta {
            family: Family::Gad,
            eta: 0.75,
            alpha: 0.4,
            ps: vec![0.25, 0.5],
            measures: vec![Measure::Rci],
            what: ScanWhat::Curve,
            grid: DEFAULT_SCAN_GRID,
        })],
    }
}

fn figure_name(id: FigureId) -> &'static str {
    match id {
        FigureId::Fig4 => "fig4",
        FigureId::Fig6 => "fig6",
        FigureId::Fig7 => "fig7",
        FigureId::Fig8 => "fig8",
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}

fn channel_spec(c: &ChannelArgs) -> Result<ChannelSpec> {
    let need = |v: Option<f64>, name: &str| {
        v.ok_or_else(|| {
            usage(format!(
                "{name} required for {}",
                family_of(c.channel).name()
            ))
        })
    };
    let spec = match c.channel {
        FamilyArg::Identity => ChannelSpec::Identity {
            dim: c.dim.unwrap_or(2),
        },
        FamilyArg::Ad => ChannelSpec::AmplitudeDamping {
            eta: need(c.eta, "eta")?,
        },
        FamilyArg::Gad => ChannelSpec::GeneralizedAmplitudeDamping {
            eta: need(c.eta, "eta")?,
            alpha: need(c.alpha, "alpha")?,
        },
        FamilyArg::Erasure => ChannelSpec::Erasure {
            epsilon: need(c.epsilon, "epsilon")?,
        },
        FamilyArg::Random => ChannelSpec::Random {
            in_dim: c.in_dim.unwrap_or(2),
            out_dim: c.out_dim.unwrap_or(2),
            env_dim: c.env_dim.unwrap_or(2),
            seed: c.seed.ok_or_else(|| usage("seed required for random"))?,
        },
    };
    // Cheap for these sizes; surfaces range errors before any computation.
    spec.build()?;
    Ok(spec)
}

fn family_of(f: FamilyArg) -> Family {
    match f {
        FamilyArg::Identity => Family::Identity,
        FamilyArg::Ad => Family::Ad,
        FamilyArg::Gad => Family::Gad,
        FamilyArg::Erasure => Family::Erasure,
        FamilyArg::Random => Family::Random,
    }
}

fn damping_family(f: FamilyArg) -> Result<Family> {
    match f {
        FamilyArg::Ad => Ok(Family::Ad),
        FamilyArg::Gad => Ok(Family::Gad),
        other => Err(usage(format!(
            "only ad and gad are supported here, not {}",
            family_of(other).name()
        ))),
    }
}

fn check_unit(name: &'static str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::Range {
            name,
            value: x,
            lo: 0.0,
            hi: 1.0,
        })
    }
}

fn check_sweep(from: f64, to: f64, steps: usize) -> Result<()> {
    check_unit("eta_from", from)?;
    check_unit("eta_to", to)?;
    if from >= to {
        return Err(usage(format!(
            "eta-from ({from}) must be below eta-to ({to})"
        )));
    }
    if steps < 2 {
        return Err(usage(format!("steps must be at least 2, got {steps}")));
    }
    Ok(())
}

fn check_tol(tol: f64, min: f64) -> Result<()> {
    if tol >= min {
        Ok(())
    } else {
        Err(usage(format!("tol must be at least {min:e}, got {tol}")))
    }
}

fn validate(cli: Cli) -> Result<Validated> {
    if cli.jobs == 0 {
        return Err(usage("jobs must be at least 1"));
    }
    let format = match cli.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };
    let command = match cli.command {
        Cmd::Figure { id, out_dir } => {
            return Ok(Validated::Figure {
                id,
                out_dir,
                format,
                jobs: cli.jobs,
            })
        }
        Cmd::Info {
            channel,
            p,
            theta,
            phi,
            measure,
            method,
        } => {
            let spec = channel_spec(&channel)?;
            let input = InputParams::new(p, theta, phi)?;
            let methods = match method {
                MethodArg::Generic => vec![Method::Generic],
                MethodArg::Closed => vec![Method::ClosedForm],
                MethodArg::Both => vec![Method::Generic, Method::ClosedForm],
            };
            if methods.contains(&Method::ClosedForm) && spec.damping_params().is_none() {
                return Err(usage(format!(
                    "closed form available only for ad and gad, not {}",
                    spec.family().name()
                )));
            }
            if spec.build()?.in_dim() != 2 {
                return Err(usage(
                    "info evaluates qubit inputs; the channel input must be 2-dimensional",
                ));
            }
            Command::Info {
                channel: spec,
                input,
                measures: measure.measures(),
                methods,
            }
        }
        Cmd::Capacity {
            channel,
            measure,
            method,
            tol,
        } => {
            damping_family(channel.channel)?;
            let spec = channel_spec(&channel)?;
            check_tol(tol, 1e-10)?;
            let method = match method {
                MethodArg::Generic => Method::Generic,
                MethodArg::Closed => Method::ClosedForm,
                MethodArg::Both => return Err(usage("capacity takes --method generic or closed")),
            };
            Command::Capacity {
                channel: spec,
                measures: measure.measures(),
                method,
                tol,
            }
        }
        Cmd::Curve {
            channel,
            alpha,
            eta_from,
            eta_to,
            steps,
            measure,
            raw,
            tol,
        } => {
            let family = damping_family(channel)?;
            let alpha = match (family, alpha) {
                (Family::Gad, None) => return Err(usage("alpha required for gad")),
                (Family::Gad, Some(a)) => {
                    check_unit("alpha", a)?;
                    Some(a)
                }
                _ => None,
            };
            check_sweep(eta_from, eta_to, steps)?;
            check_tol(tol, 1e-10)?;
            Command::Curve {
                family,
                alpha,
                sweep: (eta_from, eta_to, steps),
                measures: measure.measures(),
                raw,
                tol,
            }
        }
        Cmd::NoiseThreshold {
            eta,
            eta_from,
            eta_to,
            steps,
            measure,
            tol,
        } => {
            let etas = match (eta, eta_from, eta_to, steps) {
                (Some(eta), ..) => {
                    check_unit("eta", eta)?;
                    EtaSelection::Single(eta)
                }
                (None, Some(from), Some(to), Some(steps)) => {
                    check_sweep(from, to, steps)?;
                    EtaSelection::Sweep(from, to, steps)
                }
                _ => return Err(usage("give --eta or all of --eta-from, --eta-to, --steps")),
            };
            if !(tol > 0.0) {
                return Err(usage(format!("tol must be positive, got {tol}")));
            }
            Command::NoiseThreshold {
                etas,
                measures: measure.measures(),
                tol,
            }
        }
        Cmd::ScanTheta {
            channel,
            eta,
            alpha,
            p,
            measure,
            what,
            grid,
        } => {
            let family = damping_family(channel)?;
            check_unit("eta", eta)?;
            let alpha = match (family, alpha) {
                (Family::Gad, None) => return Err(usage("alpha required for gad")),
                (Family::Gad, Some(a)) => {
                    check_unit("alpha", a)?;
                    a
                }
                _ => 0.0,
            };
            for &x in &p {
                if !(x > 0.0 && x < 1.0) {
                    return Err(usage(format!("p must lie in (0, 1), got {x}")));
                }
            }
            if what == ScanWhat::Extrema && grid < crate::closedform::MIN_GRID {
                return Err(usage(format!(
                    "grid must be at least {} for extrema",
                    crate::closedform::MIN_GRID
                )));
            }
            if grid < 1 {
                return Err(usage("grid must be at least 1"));
            }
            Command::ScanTheta {
                family,
                eta,
                alpha,
                ps: p,
                measures: measure.measures(),
                what,
                grid,
            }
        }
        Cmd::Verify {
            suite,
            tolerance,
            seed,
            errata,
        } => {
            let suites = if suite.iter().any(|s| s == "all") {
                Suite::ALL.to_vec()
            } else {
                suite
                    .iter()
                    .map(|s| s.parse())
                    .collect::<Result<Vec<Suite>>>()?
            };
            if let Some(t) = tolerance {
                if !(t >= 0.0) {
                    return Err(usage(format!("tolerance must be nonnegative, got {t}")));
                }
            }
            Command::Verify {
                suites,
                tolerance,
                seed,
                errata,
            }
        }
    };
    Ok(Validated::Request(CommandRequest {
        command,
        format,
        out: cli.out,
        jobs: cli.jobs,
    }))
}

enum Validated {
    Request(CommandRequest),
    Figure {
        id: FigureId,
        out_dir: Option<PathBuf>,
        format: Format,
        jobs: usize,
    },
}

/// Result of executing a request: a table plus whether any suite failed.
pub struct Execution {
    pub table: Table,
    pub failed: bool,
    /// Lines destined for the error stream, e.g. suite timings.
    pub notes: Vec<String>,
}

/// Runs a validated request on the current rayon pool.
pub fn execute(req: &CommandRequest) -> Result<Execution> {
    let plain = |table| Execution {
        table,
        failed: false,
        notes: Vec::new(),
    };
    match &req.command {
        Command::Info {
            channel,
            input,
            measures,
            methods,
        } => info_table(channel, input, measures, methods).map(plain),
        Command::Capacity {
            channel,
            measures,
            method,
            tol,
        } => {
            let mut t = Table::new([
                "measure",
                "method",
                "value",
                "raw_value",
                "argmax_p",
                "evaluations",
            ]);
            for &m in measures {
                let r = optimize_population_with(channel, m, *tol, *method)?;
                t.push(vec![
                    m.name().into(),
                    method.name().into(),
                    r.value.into(),
                    r.raw_value.into(),
                    r.argmax_p.into(),
                    r.evaluations.into(),
                ])?;
            }
            Ok(plain(t))
        }
        Command::Curve {
            family,
            alpha,
            sweep,
            measures,
            raw,
            tol,
        } => {
            let rows = capacity_curve(*family, *sweep, *alpha, *tol)?;
            curve_table(&rows, measures, *raw).map(plain)
        }
        Command::NoiseThreshold {
            etas,
            measures,
            tol,
        } => {
            let rows = match *etas {
                EtaSelection::Single(eta) => vec![measures
                    .iter()
                    .map(|&m| noise_threshold(m, eta, *tol))
                    .collect::<Result<Vec<_>>>()?],
                EtaSelection::Sweep(from, to, steps) => {
                    noise_threshold_curve(measures, (from, to, steps), *tol)?
                }
            };
            threshold_table(&rows, measures).map(plain)
        }
        Command::ScanTheta {
            family,
            eta,
            alpha,
            ps,
            measures,
            what,
            grid,
        } => scan_table(*family, *eta, *alpha, ps, measures, *what, *grid).map(plain),
        Command::Verify {
            suites,
            tolerance,
            seed,
            errata,
        } => {
            let report = verify::run(suites, *tolerance, *seed)?;
            let notes = report
                .suites
                .iter()
                .map(|s| {
                    format!(
                        "{}: {} cases, {} failures, {:.2} s",
                        s.suite,
                        s.cases,
                        s.failures,
                        s.wall_time.as_secs_f64()
                    )
                })
                .collect();
            let table = if *errata {
                report.errata_table()?
            } else {
                report.table()?
            };
            Ok(Execution {
                table,
                failed: report.failures() > 0,
                notes,
            })
        }
    }
}

fn info_table(
    spec: &ChannelSpec,
    input: &InputParams,
    measures: &[Measure],
    methods: &[Method],
) -> Result<Table> {
    let both = methods.len() > 1;
    let mut header = vec!["measure", "method", "value"];
    if both {
        header.push("abs_diff");
    }
    let mut t = Table::new(header);
    for &m in measures {
        let values = methods
            .iter()
            .map(|&method| {
                let v = match (spec.damping_params(), method) {
                    (Some((eta, alpha)), Method::Generic) => {
                        generic_value(spec.family(), m, eta, alpha, input)?.value
                    }
                    (Some((eta, alpha)), Method::ClosedForm) => {
                        closed_form_value(spec.family(), m, eta, alpha, input)?.value
                    }
                    (None, _) => {
                        let (rho, _) = general_input(input)?;
                        information(&spec.build()?, &rho, m)?.value
                    }
                };
                Ok((method, v))
            })
            .collect::<Result<Vec<_>>>()?;
        let diff = if both {
            Some((values[0].1 - values[1].1).abs())
        } else {
            None
        };
        for (method, v) in values {
            let mut row: Vec<Cell> = vec![m.name().into(), method.name().into(), v.into()];
            if let Some(d) = diff {
                row.push(d.into());
            }
            t.push(row)?;
        }
    }
    Ok(t)
}

/// Columns `eta[,alpha],value_ci,p_ci,value_rci,p_rci[,raw_ci,raw_rci]`
/// restricted to `measures`.
pub fn curve_table(rows: &[CurveRow], measures: &[Measure], raw: bool) -> Result<Table> {
    let with_alpha = rows.first().is_some_and(|r| r.alpha.is_some());
    let mut header = vec!["eta".to_string()];
    if with_alpha {
        header.push("alpha".into());
    }
    for m in measures {
        header.push(format!("value_{m}"));
        header.push(format!("p_{m}"));
    }
    if raw {
        header.extend(measures.iter().map(|m| format!("raw_{m}")));
    }
    let mut t = Table::new(header);
    for r in rows {
        let mut row: Vec<Cell> = vec![r.eta.into()];
        if with_alpha {
            row.push(r.alpha.into());
        }
        for m in measures {
            let (v, p) = match m {
                Measure::Ci => (r.value_ci, r.p_ci),
                Measure::Rci => (r.value_rci, r.p_rci),
            };
            row.push(v.into());
            row.push(p.into());
        }
        if raw {
            for m in measures {
                row.push(
                    match m {
                        Measure::Ci => r.raw_ci,
                        Measure::Rci => r.raw_rci,
                    }
                    .into(),
                );
            }
        }
        t.push(row)?;
    }
    Ok(t)
}

fn threshold_table(rows: &[Vec<NoiseThreshold>], measures: &[Measure]) -> Result<Table> {
    let mut header = vec!["eta".to_string()];
    for m in measures {
        header.push(format!("alpha_{m}"));
        header.push(format!("p_{m}"));
    }
    let mut t = Table::new(header);
    for r in rows {
        let mut row: Vec<Cell> = vec![r[0].eta.into()];
        for th in r {
            row.push(th.alpha_star.into());
            row.push(th.p_at_threshold.into());
        }
        t.push(row)?;
    }
    Ok(t)
}

fn scan_table(
    family: Family,
    eta: f64,
    alpha: f64,
    ps: &[f64],
    measures: &[Measure],
    what: ScanWhat,
    grid: usize,
) -> Result<Table> {
    let mut t = match what {
        ScanWhat::Curve => Table::new(["measure", "p", "theta", "value", "slope"]),
        ScanWhat::Extrema => Table::new([
            "measure",
            "p",
            "theta",
            "kind",
            "value",
            "second_difference",
        ]),
    };
    for &m in measures {
        for &p in ps {
            match what {
                ScanWhat::Curve => {
                    for pt in theta_profile(family, m, eta, alpha, p, grid)? {
                        t.push(vec![
                            m.name().into(),
                            p.into(),
                            pt.theta.into(),
                            pt.value.into(),
                            pt.slope.into(),
                        ])?;
                    }
                }
                ScanWhat::Extrema => {
                    for e in extremum_scan(family, m, eta, alpha, p, grid)?.extrema {
                        t.push(vec![
                            m.name().into(),
                            p.into(),
                            e.theta.into(),
                            e.kind.name().into(),
                            e.value.into(),
                            e.second_difference.into(),
                        ])?;
                    }
                }
            }
        }
    }
    Ok(t)
}

fn in_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn run_request(req: &CommandRequest, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let exec = match in_pool(req.jobs, || execute(req)).and_then(|r| r) {
        Ok(e) => e,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_FAILURE;
        }
    };
    for note in &exec.notes {
        let _ = writeln!(err, "{note}");
    }
    if let Err(e) = exec.table.emit(req.format, req.out.as_deref(), out) {
        let _ = writeln!(err, "error: {e}");
        return EXIT_FAILURE;
    }
    if exec.failed {
        EXIT_FAILURE
    } else {
        EXIT_OK
    }
}

fn run_figure(
    id: FigureId,
    out_dir: Option<&Path>,
    format: Format,
    jobs: usize,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let presets = figure_presets(id);
    let Some(dir) = out_dir else {
        for req in &presets {
            let _ = writeln!(out, "revcap {}", req.to_args().join(" "));
        }
        return EXIT_OK;
    };
    if let Err(e) = std::fs::create_dir_all(dir) {
        let _ = writeln!(err, "error: {e}");
        return EXIT_FAILURE;
    }
    let ext = match format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    for (k, mut req) in presets.into_iter().enumerate() {
        let suffix = match (id, k) {
            (FigureId::Fig6, 0) => "-ci",
            (FigureId::Fig6, _) => "-rci",
            _ => "",
        };
        req.format = format;
        req.jobs = jobs;
        req.out = Some(dir.join(format!("{}{suffix}.{ext}", figure_name(id))));
        let code = run_request(&req, out, err);
        if code != EXIT_OK {
            return code;
        }
    }
    EXIT_OK
}

/// Entry point used by the binary; `args` includes the program name.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    match validate(cli) {
        Ok(Validated::Request(req)) => run_request(&req, out, err),
        Ok(Validated::Figure {
            id,
            out_dir,
            format,
            jobs,
        }) => run_figure(id, out_dir.as_deref(), format, jobs, out, err),
        Err(e) => {
            let _ = writeln!(err, "error: {}", usage_message(&e));
            EXIT_USAGE
        }
    }
}

/// Preconditions print verbatim; other errors keep their prefix.
fn usage_message(e: &Error) -> String {
    match e {
        Error::Precondition(msg) => msg.clone(),
        other => other.to_string(),
    }
}
