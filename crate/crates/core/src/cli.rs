//! Command-line front end: parameter sweeps, protocol runs, PO graphs and the
//! verification table.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::channels::{disturbance_probability, BathParams, ChannelKind};
use crate::detector::{parity_measure, Parity};
use crate::elements::parse_angle;
use crate::error::{Error, Result};
use crate::fock::Statistics;
use crate::numfmt::{fmt15, round15};
use crate::po_equiv::{po_graph, DEFAULT_DEPTH};
use crate::protocol::{
    dominant_reference, post_bs_state, run_exact, run_monte_carlo, InitialStateParams,
    ProtocolScheme, Scenario,
};
use crate::verify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_VERIFICATION: i32 = 2;
pub const EXIT_IO: i32 = 3;

pub const SWEEP_HEADER: &str =
    "statistics,channel,a,phi,gamma,lambda,t,p_disturb,p_odd,p_even,fidelity_odd,fidelity_even,purity_odd,purity_even";

#[derive(Debug, Parser)]
#[command(
    name = "parity-distill",
    version,
    about = "Parity-check distillation of two identical qubits"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Branch probabilities, fidelities and purities over an (a, φ, t) grid.
    Sweep(SweepArgs),
    /// Run a distillation scheme and print its summary as JSON.
    Protocol(ProtocolArgs),
    /// Passive-optical reachability graph of the named states.
    PoGraph(PoGraphArgs),
    /// Run the built-in checks and print a pass/fail table.
    Verify,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SweepFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GraphFormat {
    Dot,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    ResetDep,
    ResetAd,
    NonReset,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Mc,
}

#[derive(Clone, Debug, Args)]
pub struct BathArgs {
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1.0)]
    pub omega0: f64,
}

impl BathArgs {
    fn params(&self) -> Result<BathParams> {
        BathParams::new(self.gamma, self.lambda, self.omega0)
    }
}

#[derive(Clone, Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_parser = parse_value::<ChannelKind>)]
    pub channel: ChannelKind,
    #[arg(long, value_parser = parse_value::<Statistics>)]
    pub statistics: Statistics,
    #[arg(long, default_value_t = 0.0)]
    pub a_min: f64,
    #[arg(long, default_value_t = 1.0)]
    pub a_max: f64,
    #[arg(long, default_value_t = 11)]
    pub a_steps: usize,
    /// Comma-separated angles, e.g. "0,pi/2,pi".
    #[arg(long, default_value = "0,pi")]
    pub phi: String,
    #[arg(long, default_value_t = 0.0)]
    pub t_min: f64,
    #[arg(long, default_value_t = 20.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 201)]
    pub t_steps: usize,
    #[command(flatten)]
    pub bath: BathArgs,
    #[arg(long, value_enum, default_value_t = SweepFormat::Csv)]
    pub format: SweepFormat,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Debug, Args)]
pub struct ProtocolArgs {
    #[arg(long, value_enum)]
    pub scheme: SchemeArg,
    #[arg(long, value_parser = parse_value::<Statistics>)]
    pub statistics: Statistics,
    /// Rounds for reset schemes (default 10); non-reset runs accept only 1.
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Collected parity; defaults to odd for bosons and even for fermions.
    #[arg(long, value_parser = parse_value::<Parity>)]
    pub target: Option<Parity>,
    #[arg(long, value_parser = parse_value::<ChannelKind>)]
    pub channel: Option<ChannelKind>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long, value_parser = parse_angle_arg)]
    pub phi: Option<f64>,
    #[arg(long)]
    pub t: Option<f64>,
    #[command(flatten)]
    pub bath: BathArgs,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Debug, Args)]
pub struct PoGraphArgs {
    #[arg(long, value_parser = parse_value::<Statistics>)]
    pub statistics: Statistics,
    #[arg(long, default_value_t = DEFAULT_DEPTH)]
    pub depth: usize,
    #[arg(long, value_enum, default_value_t = GraphFormat::Dot)]
    pub format: GraphFormat,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

fn parse_value<T: std::str::FromStr<Err = Error>>(s: &str) -> std::result::Result<T, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_angle_arg(s: &str) -> std::result::Result<f64, String> {
    parse_angle(s).map_err(|e| e.to_string())
}

/// `steps` evenly spaced points from `min` to `max`; a single step yields `min`.
pub fn linspace(min: f64, max: f64, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 {
        return Err(Error::InvalidParameter(
            "grid needs at least one step".into(),
        ));
    }
    if !min.is_finite() || !max.is_finite() || max < min {
        return Err(Error::InvalidParameter(format!(
            "invalid range [{min}, {max}]"
        )));
    }
    if steps == 1 {
        return Ok(vec![min]);
    }
    let h = (max - min) / (steps - 1) as f64;
    Ok((0..steps)
        .map(|k| {
            if k + 1 == steps {
                max
            } else {
                min + h * k as f64
            }
        })
        .collect())
}

pub fn parse_angle_list(s: &str) -> Result<Vec<f64>> {
    let v: Vec<f64> = s
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(parse_angle)
        .collect::<Result<_>>()?;
    if v.is_empty() {
        return Err(Error::InvalidParameter("phi list is empty".into()));
    }
    Ok(v)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub channel: ChannelKind,
    pub statistics: Statistics,
    pub a: Vec<f64>,
    pub phi: Vec<f64>,
    pub t: Vec<f64>,
    pub bath: BathParams,
}

impl SweepConfig {
    pub fn from_args(args: &SweepArgs) -> Result<Self> {
        let a = linspace(args.a_min, args.a_max, args.a_steps)?;
        if a[0] < 0.0 || a[a.len() - 1] > 1.0 {
            return Err(Error::InvalidParameter("a range must lie in [0, 1]".into()));
        }
        let t = linspace(args.t_min, args.t_max, args.t_steps)?;
        if t[0] < 0.0 {
            return Err(Error::NegativeTime(t[0]));
        }
        Ok(SweepConfig {
            channel: args.channel,
            statistics: args.statistics,
            a,
            phi: parse_angle_list(&args.phi)?,
            t,
            bath: args.bath.params()?,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub statistics: Statistics,
    pub channel: ChannelKind,
    pub a: f64,
    pub phi: f64,
    pub gamma: f64,
    pub lambda: f64,
    pub t: f64,
    pub p_disturb: f64,
    pub p_odd: f64,
    pub p_even: f64,
    pub fidelity_odd: Option<f64>,
    pub fidelity_even: Option<f64>,
    pub reference_odd: Option<String>,
    pub reference_even: Option<String>,
    pub purity_odd: Option<f64>,
    pub purity_even: Option<f64>,
}

fn sweep_point(cfg: &SweepConfig, a: f64, phi: f64, t: f64) -> Result<SweepRow> {
    let init = InitialStateParams::new(a, phi)?;
    let p = disturbance_probability(&cfg.bath, t)?;
    let rho = post_bs_state(Scenario::NonReset(cfg.channel), cfg.statistics, &init, p)?;
    let m = parity_measure(&rho);
    let scored = |par: Parity| {
        m.branch(par).conditional_state.as_ref().map(|s| {
            let (r, f) = dominant_reference(s);
            (f, r.to_string(), s.purity())
        })
    };
    let (odd, even) = (scored(Parity::Odd), scored(Parity::Even));
    Ok(SweepRow {
        statistics: cfg.statistics,
        channel: cfg.channel,
        a,
        phi: init.phi(),
        gamma: cfg.bath.gamma,
        lambda: cfg.bath.lambda,
        t,
        p_disturb: p,
        p_odd: m.odd.probability,
        p_even: m.even.probability,
        fidelity_odd: odd.as_ref().map(|x| x.0),
        fidelity_even: even.as_ref().map(|x| x.0),
        reference_odd: odd.as_ref().map(|x| x.1.clone()),
        reference_even: even.as_ref().map(|x| x.1.clone()),
        purity_odd: odd.map(|x| x.2),
        purity_even: even.map(|x| x.2),
    })
}

/// Rows in loop order a, then φ, then t; points are evaluated in parallel.
pub fn sweep_rows(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    let points: Vec<(f64, f64, f64)> = cfg
        .a
        .iter()
        .flat_map(|&a| {
            cfg.phi
                .iter()
                .flat_map(move |&phi| cfg.t.iter().map(move |&t| (a, phi, t)))
        })
        .collect();
    points
        .par_iter()
        .map(|&(a, phi, t)| sweep_point(cfg, a, phi, t))
        .collect()
}

fn opt15(x: Option<f64>) -> String {
    x.map(fmt15).unwrap_or_default()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        let fields = [
            r.statistics.to_string(),
            r.channel.to_string(),
            fmt15(r.a),
            fmt15(r.phi),
            fmt15(r.gamma),
            fmt15(r.lambda),
            fmt15(r.t),
            fmt15(r.p_disturb),
            fmt15(r.p_odd),
            fmt15(r.p_even),
            opt15(r.fidelity_odd),
            opt15(r.fidelity_even),
            opt15(r.purity_odd),
            opt15(r.purity_even),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn sweep_json(rows: &[SweepRow]) -> Value {
    let r15 = |x: Option<f64>| x.map(round15);
    Value::Array(
        rows.iter()
            .map(|r| {
                json!({
                    "statistics": r.statistics,
                    "channel": r.channel,
                    "a": round15(r.a),
                    "phi": round15(r.phi),
                    "gamma": round15(r.gamma),
                    "lambda": round15(r.lambda),
                    "t": round15(r.t),
                    "p_disturb": round15(r.p_disturb),
                    "p_odd": round15(r.p_odd),
                    "p_even": round15(r.p_even),
                    "fidelity_odd": r15(r.fidelity_odd),
                    "fidelity_even": r15(r.fidelity_even),
                    "reference_odd": r.reference_odd,
                    "reference_even": r.reference_even,
                    "purity_odd": r15(r.purity_odd),
                    "purity_even": r15(r.purity_even),
                })
            })
            .collect(),
    )
}

pub fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

pub fn scheme_from_args(args: &ProtocolArgs) -> Result<ProtocolScheme> {
    let stats = args.statistics;
    let nonreset_only = [
        ("--channel", args.channel.is_some()),
        ("--a", args.a.is_some()),
        ("--phi", args.phi.is_some()),
        ("--t", args.t.is_some()),
    ];
    let scheme = match args.scheme {
        SchemeArg::ResetDep | SchemeArg::ResetAd => {
            if let Some((flag, _)) = nonreset_only.iter().find(|(_, given)| *given) {
                return Err(Error::InvalidScheme(format!(
                    "{flag} applies to non-reset runs only"
                )));
            }
            let n = args.iterations.unwrap_or(10);
            if args.scheme == SchemeArg::ResetDep {
                let mut s = ProtocolScheme::reset_depolarize(stats, n);
                if let Some(t) = args.target {
                    s.target_parity = t;
                }
                s
            } else {
                let target = args.target.unwrap_or(match stats {
                    Statistics::Boson => Parity::Odd,
                    Statistics::Fermion => Parity::Even,
                });
                ProtocolScheme::reset_amplitude_damp(stats, target, n)
            }
        }
        SchemeArg::NonReset => {
            let channel = args.channel.ok_or(Error::MissingParameter {
                kind: "non-reset",
                parameter: "channel",
            })?;
            let a = args.a.ok_or(Error::MissingParameter {
                kind: "non-reset",
                parameter: "a",
            })?;
            let t = args.t.ok_or(Error::MissingParameter {
                kind: "non-reset",
                parameter: "t",
            })?;
            let init = InitialStateParams::new(a, args.phi.unwrap_or(0.0))?;
            let mut s = ProtocolScheme::non_reset(stats, channel, init, args.bath.params()?, t);
            if let Some(n) = args.iterations {
                s.max_iterations = n;
            }
            if let Some(p) = args.target {
                s.target_parity = p;
            }
            s
        }
    };
    scheme.validate()?;
    Ok(scheme)
}

pub fn protocol_json(args: &ProtocolArgs) -> Result<Value> {
    let scheme = scheme_from_args(args)?;
    let summary = match args.mode {
        ModeArg::Exact => run_exact(&scheme)?,
        ModeArg::Mc => run_monte_carlo(&scheme, args.trials, args.seed)?,
    };
    Ok(summary.to_json())
}

pub fn po_graph_text(args: &PoGraphArgs) -> Result<String> {
    if args.depth == 0 {
        return Err(Error::InvalidParameter("depth must be positive".into()));
    }
    let g = po_graph(args.statistics, args.depth)?;
    Ok(match args.format {
        GraphFormat::Dot => g.to_dot(),
        GraphFormat::Json => json_text(&g.to_json()),
    })
}

/// Failure modes mapped onto exit codes.
#[derive(Debug)]
pub enum CliError {
    Validation(Error),
    Verification(String),
    Io(io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Verification(_) => EXIT_VERIFICATION,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(e) => write!(f, "error: {e}"),
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Validation(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

fn emit(text: &str, output: Option<&PathBuf>) -> std::result::Result<(), CliError> {
    match output {
        Some(p) => fs::write(p, text)?,
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

pub fn execute(cli: &Cli) -> std::result::Result<(), CliError> {
    match &cli.command {
        Command::Sweep(args) => {
            let cfg = SweepConfig::from_args(args)?;
            let rows = sweep_rows(&cfg)?;
            let text = match args.format {
                SweepFormat::Csv => sweep_csv(&rows),
                SweepFormat::Json => json_text(&sweep_json(&rows)),
            };
            emit(&text, args.output.as_ref())
        }
        Command::Protocol(args) => emit(&json_text(&protocol_json(args)?), args.output.as_ref()),
        Command::PoGraph(args) => emit(&po_graph_text(args)?, args.output.as_ref()),
        Command::Verify => {
            let checks = verify::run_checks();
            emit(&verify::render_table(&checks), None)?;
            let failed = checks.iter().filter(|c| !c.passed).count();
            if failed > 0 {
                return Err(CliError::Verification(format!(
                    "{failed} of {} checks failed",
                    checks.len()
                )));
            }
            Ok(())
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_VALIDATION
            } else {
                EXIT_OK
            };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
