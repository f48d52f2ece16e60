//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for unreadable or invalid input files, 2 for
//! invalid flags or configuration.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::catalyst::{find_witnesses, optimize_dv, Objective, WitnessPolicy};
use crate::error::Error;
use crate::jc_sim::{betas_for, linspace, run_experiment, ExperimentConfig, JcRecord, TimePolicy, LOOP_TUPLE};
use crate::optimal_erasure::{check_erasure, Periodicity};
use crate::qstate::{mutual_information, EnergyLadder, JointState, ProbDist};

pub const CSV_HEADER: [&str; 10] = [
    "x_exp_minus_beta_omega",
    "dSs",
    "Qe",
    "Ise",
    "gamma_H",
    "gamma_E",
    "dI",
    "best_dv",
    "t",
    "coherence_diag",
];

const DEFAULT_SAMPLES: usize = 2000;

#[derive(Debug)]
pub enum CliError {
    /// Bad input data; exit code 1.
    Input(String),
    /// Bad flags or configuration; exit code 2.
    Config(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Config(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Config(m) => write!(f, "configuration error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

fn input<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

fn config<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Config(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "catalytic-erasure", version, about = "Catalytic mitigation of erasure heat and entropy")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep the oscillator temperature of the Jaynes-Cummings erasure and
    /// write one CSV row per grid point.
    JcSweep(SweepArgs),
    /// Find correlation witnesses in a classical joint state and apply the
    /// best catalyst.
    Catalyze(CatalyzeArgs),
    /// Check maximum-erasure conditions and heat bounds for two marginals.
    CheckErasure(CheckArgs),
}

#[derive(Debug, clap::Args)]
pub struct SweepArgs {
    /// JSON configuration; flags given on the command line take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// CSV output path.
    #[arg(long, default_value = "jc_sweep.csv")]
    pub out: PathBuf,
    /// Write the JSON summary here instead of stdout.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    /// Omit the timestamp comment line.
    #[arg(long)]
    pub deterministic: bool,
    /// Recorded in the summary; the sweep itself draws no random numbers.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub dv_min: Option<usize>,
    #[arg(long)]
    pub dv_max: Option<usize>,
    /// `max-erasure`, `max-erasure:<samples>` or `fixed:<t>`.
    #[arg(long)]
    pub t_policy: Option<String>,
    /// Grid over exp(-beta omega) as `start:stop:steps`.
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long)]
    pub omega: Option<f64>,
    /// Also score every correlation witness, not just the (2,1,1,2) loop.
    #[arg(long)]
    pub all_witnesses: bool,
}

#[derive(Debug, clap::Args)]
pub struct CatalyzeArgs {
    /// State file: a `dims = d_s d_e` line, then one population per line.
    pub state: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub dv_min: usize,
    #[arg(long, default_value_t = 10)]
    pub dv_max: usize,
    /// Environment energies: `uniform:<omega>` or a comma-separated list.
    #[arg(long, default_value = "uniform:1")]
    pub ladder: String,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct CheckArgs {
    /// System populations, one per line.
    pub ps: PathBuf,
    /// Thermal environment populations, one per line.
    pub pe: PathBuf,
    /// Environment energies: `uniform:<omega>` or a comma-separated list.
    #[arg(long, default_value = "uniform:1")]
    pub ladder: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = match cli.command {
        Command::JcSweep(a) => cmd_jc_sweep(&a),
        Command::Catalyze(a) => cmd_catalyze(&a),
        Command::CheckErasure(a) => cmd_check_erasure(&a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

/// Rounds to 12 significant digits.
pub fn sig12(v: f64) -> f64 {
    if v.is_finite() {
        format!("{v:.11e}").parse().expect("formatted float")
    } else {
        v
    }
}

fn fmt12(v: f64) -> String {
    let r = sig12(v);
    if r != 0.0 && (r.abs() < 1e-4 || r.abs() >= 1e15) {
        format!("{r:e}")
    } else {
        format!("{r}")
    }
}

fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if let Some(f) = n.as_f64().filter(|_| !n.is_i64() && !n.is_u64()) {
                *v = json!(sig12(f));
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_json),
        Value::Object(o) => o.values_mut().for_each(round_json),
        _ => {}
    }
}

fn emit_json(mut v: Value, out: Option<&Path>) -> Result<(), CliError> {
    round_json(&mut v);
    let text = serde_json::to_string_pretty(&v).expect("serializable report");
    match out {
        Some(p) => fs::write(p, text + "\n").map_err(|e| input(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            match writeln!(stdout, "{text}") {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(input(format!("stdout: {e}"))),
                _ => Ok(()),
            }
        }
    }
}

/// A parsed state file.
#[derive(Debug, Clone, PartialEq)]
pub struct StateFile {
    pub dims: Option<Vec<usize>>,
    pub values: Vec<f64>,
}

/// Reads the key-value state format: `#` comments, blank lines, an optional
/// `dims = ...` line, and one decimal probability per remaining line.
pub fn parse_state_file(text: &str) -> Result<StateFile, String> {
    let mut dims = None;
    let mut values = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some((key, rest)) = line.split_once('=') {
            if key.trim() != "dims" {
                return Err(format!("line {line_no}: unknown key '{}'", key.trim()));
            }
            if dims.is_some() {
                return Err(format!("line {line_no}: dims given twice"));
            }
            let parsed: Result<Vec<usize>, _> = rest.split_whitespace().map(usize::from_str).collect();
            match parsed {
                Ok(d) if !d.is_empty() && !d.contains(&0) => dims = Some(d),
                _ => return Err(format!("line {line_no}: dims must be positive integers")),
            }
            continue;
        }
        let v: f64 = line
            .parse()
            .map_err(|_| format!("line {line_no}: expected one probability, found '{line}'"))?;
        if !v.is_finite() || v < 0.0 {
            return Err(format!("line {line_no}: probability {v} out of range"));
        }
        values.push(v);
    }
    if let Some(d) = &dims {
        let total: usize = d.iter().product();
        if total != values.len() {
            return Err(format!("dims {d:?} need {total} populations, found {}", values.len()));
        }
    }
    if values.is_empty() {
        return Err("no populations".into());
    }
    Ok(StateFile { dims, values })
}

fn read_state(path: &Path) -> Result<StateFile, CliError> {
    let text = fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    parse_state_file(&text).map_err(|m| input(format!("{}: {m}", path.display())))
}

fn read_distribution(path: &Path) -> Result<ProbDist, CliError> {
    let state = read_state(path)?;
    if let Some(d) = &state.dims {
        if d.len() != 1 {
            return Err(input(format!("{}: expected a single factor", path.display())));
        }
    }
    ProbDist::new(state.values).map_err(|e| input(format!("{}: {e}", path.display())))
}

/// `uniform:<omega>` or a comma-separated list of energies.
pub fn parse_ladder(text: &str, dim: usize) -> Result<EnergyLadder, String> {
    if let Some(w) = text.strip_prefix("uniform:") {
        let omega: f64 = w.trim().parse().map_err(|_| format!("bad ladder spacing '{w}'"))?;
        if !(omega.is_finite() && omega > 0.0) {
            return Err(format!("ladder spacing {omega} must be positive"));
        }
        return Ok(EnergyLadder::uniform(dim, omega));
    }
    let levels: Result<Vec<f64>, _> = text.split(',').map(|s| s.trim().parse::<f64>()).collect();
    let levels = levels.map_err(|_| format!("bad ladder '{text}'"))?;
    if levels.len() != dim {
        return Err(format!("ladder has {} levels, state has {dim}", levels.len()));
    }
    EnergyLadder::new(levels).map_err(|e| e.to_string())
}

/// `max-erasure`, `max-erasure:<samples>` or `fixed:<t>`.
pub fn parse_time_policy(text: &str) -> Result<TimePolicy, String> {
    let text = text.trim();
    if text == "max-erasure" {
        return Ok(TimePolicy::MaxErasure { samples: DEFAULT_SAMPLES });
    }
    if let Some(n) = text.strip_prefix("max-erasure:") {
        return match n.parse::<usize>() {
            Ok(s) if s > 0 => Ok(TimePolicy::MaxErasure { samples: s }),
            _ => Err(format!("bad sample count '{n}'")),
        };
    }
    if let Some(t) = text.strip_prefix("fixed:") {
        return match t.parse::<f64>() {
            Ok(v) if v.is_finite() && v >= 0.0 => Ok(TimePolicy::Fixed(v)),
            _ => Err(format!("bad time '{t}'")),
        };
    }
    Err(format!("unknown time policy '{text}'"))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, n] = parts[..] else {
            return Err(format!("grid '{s}' is not start:stop:steps"));
        };
        let start: f64 = a.trim().parse().map_err(|_| format!("bad grid start '{a}'"))?;
        let stop: f64 = b.trim().parse().map_err(|_| format!("bad grid stop '{b}'"))?;
        let steps: usize = n.trim().parse().map_err(|_| format!("bad grid steps '{n}'"))?;
        Ok(Grid { start, stop, steps })
    }
}

/// Contents of a `--config` file. Every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub omega: Option<f64>,
    pub grid: Option<String>,
    pub dv_min: Option<usize>,
    pub dv_max: Option<usize>,
    pub t_policy: Option<String>,
    pub seed: Option<u64>,
    pub all_witnesses: Option<bool>,
}

/// The fully resolved sweep settings.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlan {
    pub xs: Vec<f64>,
    pub experiment: ExperimentConfig,
    pub seed: Option<u64>,
}

pub fn resolve_sweep(args: &SweepArgs) -> Result<SweepPlan, CliError> {
    let file: SweepConfig = match &args.config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| config(format!("{}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| config(format!("{}: {e}", p.display())))?
        }
        None => SweepConfig::default(),
    };
    let omega = args.omega.or(file.omega).unwrap_or(1.0);
    if !(omega.is_finite() && omega > 0.0) {
        return Err(config(format!("omega {omega} must be positive")));
    }
    let grid: Grid = args
        .grid
        .clone()
        .or(file.grid)
        .unwrap_or_else(|| "0.05:0.65:25".into())
        .parse()
        .map_err(config)?;
    let xs = linspace(grid.start, grid.stop, grid.steps);
    if xs.is_empty() {
        return Err(config("empty grid"));
    }
    if let Some(x) = xs.iter().find(|x| !(**x > 0.0 && **x < 1.0)) {
        return Err(config(format!("grid value {x} outside (0, 1)")));
    }
    let dv_min = args.dv_min.or(file.dv_min).unwrap_or(3);
    let dv_max = args.dv_max.or(file.dv_max).unwrap_or(10);
    if dv_min < 3 || dv_max < dv_min {
        return Err(config(format!("catalyst dimensions {dv_min}..{dv_max} need 3 <= min <= max")));
    }
    let time_policy = match args.t_policy.clone().or(file.t_policy) {
        Some(s) => parse_time_policy(&s).map_err(config)?,
        None => TimePolicy::default(),
    };
    Ok(SweepPlan {
        xs,
        experiment: ExperimentConfig {
            omega,
            time_policy,
            dv_range: dv_min..=dv_max,
            witness: WitnessPolicy::Fixed(LOOP_TUPLE),
            scan_all_witnesses: args.all_witnesses || file.all_witnesses.unwrap_or(false),
        },
        seed: args.seed.or(file.seed),
    })
}

/// CSV text for the sweep records, with an optional leading comment line.
pub fn sweep_csv(records: &[JcRecord], comment: Option<&str>) -> String {
    let mut out = Vec::new();
    if let Some(c) = comment {
        writeln!(out, "# {c}").expect("in-memory write");
    }
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(CSV_HEADER).expect("in-memory write");
        for r in records {
            w.write_record([
                fmt12(r.x),
                fmt12(r.d_ss),
                fmt12(r.q_e),
                fmt12(r.i_se),
                fmt12(r.gamma_h),
                fmt12(r.gamma_e),
                fmt12(r.d_i),
                r.best_dv.to_string(),
                fmt12(r.t),
                fmt12(r.coherence_diag),
            ])
            .expect("in-memory write");
        }
        w.flush().expect("in-memory write");
    }
    String::from_utf8(out).expect("ascii output")
}

pub fn cmd_jc_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let plan = resolve_sweep(args)?;
    let betas = betas_for(&plan.xs, plan.experiment.omega);
    let records = run_experiment(&betas, &plan.experiment).map_err(input)?;

    let comment = if args.deterministic {
        None
    } else {
        let secs = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Some(format!("generated at unix time {secs}"))
    };
    let text = sweep_csv(&records, comment.as_deref());
    fs::write(&args.out, text).map_err(|e| input(format!("{}: {e}", args.out.display())))?;

    let peak = records
        .iter()
        .max_by(|a, b| a.gamma_h.total_cmp(&b.gamma_h))
        .expect("non-empty grid");
    let summary = json!({
        "csv": args.out.display().to_string(),
        "rows": records.len(),
        "omega": plan.experiment.omega,
        "t_policy": plan.experiment.time_policy.to_string(),
        "dv_range": [plan.experiment.dv_range.start(), plan.experiment.dv_range.end()],
        "seed": plan.seed,
        "peak": {
            "gamma_H": peak.gamma_h,
            "x_exp_minus_beta_omega": peak.x,
            "t": peak.t,
            "best_dv": peak.best_dv,
        },
        "max_landauer_residual": records.iter().map(|r| r.residual.abs()).fold(0.0, f64::max),
    });
    emit_json(summary, args.summary.as_deref())
}

fn env_energy(ladder: &EnergyLadder, p: &ProbDist) -> f64 {
    ladder.expectation(p).expect("matching dimensions")
}

pub fn cmd_catalyze(args: &CatalyzeArgs) -> Result<(), CliError> {
    if args.dv_min < 3 || args.dv_max < args.dv_min {
        return Err(config(format!("catalyst dimensions {}..{} need 3 <= min <= max", args.dv_min, args.dv_max)));
    }
    let state = read_state(&args.state)?;
    let dims = state.dims.clone().ok_or_else(|| input(format!("{}: missing dims line", args.state.display())))?;
    if dims.len() != 2 {
        return Err(input(format!("{}: expected dims = d_s d_e", args.state.display())));
    }
    let joint = JointState::classical(&dims, state.values).map_err(input)?;
    let ladder = parse_ladder(&args.ladder, dims[1]).map_err(config)?;
    let witnesses = find_witnesses(&joint).map_err(input)?;
    let env = joint.marginal(1);
    let before = json!({
        "S_e": joint.marginal_entropy(1),
        "E_e": env_energy(&ladder, &env),
        "I": mutual_information(&joint),
    });
    let listed: Vec<Value> = witnesses
        .iter()
        .map(|w| {
            json!({
                "tuple": w.one_based(),
                "ratio_strong": w.ratio_strong(),
                "ratio_weak": w.ratio_weak(),
                "receiver_dominant": w.receiver_dominant,
            })
        })
        .collect();

    if witnesses.is_empty() {
        let report = json!({
            "status": "uncorrelated",
            "dims": dims,
            "witnesses": listed,
            "before": before,
            "message": "no correlation witness: the state is a product and no catalyst can lower the environment entropy",
        });
        return emit_json(report, args.out.as_deref());
    }

    let opt = optimize_dv(&joint, args.dv_min..=args.dv_max, Objective::Entropy, WitnessPolicy::Exhaustive, None);
    let report = match opt {
        Ok(opt) => {
            let best = &opt.best;
            let rep = &best.report;
            json!({
                "status": "ok",
                "dims": dims,
                "witnesses": listed,
                "catalyst": {
                    "witness": best.witness.one_based(),
                    "dim": best.dim(),
                    "spectrum": best.solution.spectrum.probs(),
                    "delta": best.solution.delta,
                    "environment_transfer": best.solution.environment_transfer(),
                },
                "before": before,
                "after": {
                    "S_e": joint.marginal_entropy(1) + rep.entropy_change_env,
                    "E_e": env_energy(&ladder, &rep.env_after),
                    "I": rep.mutual_info_after,
                },
                "heat_change": rep.heat_change(&ladder).map_err(input)?,
                "gamma_E": best.scores.gamma_e,
                "environment_majorizes_input": rep.env_majorizes(),
                "catalyst_deviation": rep.catalyst_deviation(),
                "system_deviation": rep.system_deviation(),
            })
        }
        Err(Error::CatalystInfeasible { reason, .. }) => json!({
            "status": "infeasible",
            "dims": dims,
            "witnesses": listed,
            "before": before,
            "message": reason,
        }),
        Err(e) => return Err(input(e)),
    };
    emit_json(report, args.out.as_deref())
}

pub fn cmd_check_erasure(args: &CheckArgs) -> Result<(), CliError> {
    let p_s = read_distribution(&args.ps)?;
    let p_e = read_distribution(&args.pe)?;
    let ladder = parse_ladder(&args.ladder, p_e.len()).map_err(config)?;
    let check = check_erasure(&p_s, &p_e, &ladder).map_err(input)?;
    let condition = match check.periodicity.condition {
        Periodicity::EnvironmentPeriodic(m) => json!({"kind": "i", "m": m}),
        Periodicity::SystemPeriodic(m) => json!({"kind": "ii", "m": m}),
        Periodicity::None => json!({"kind": "none"}),
    };
    let message = if p_s.len() == 2 && p_e.len() == 2 {
        "swap optimal, no catalytic gain"
    } else if check.periodicity.admits_block_sort() {
        "block sort reaches maximum erasure with a product output"
    } else {
        "maximum erasure leaves correlations; no product-form optimum guaranteed"
    };
    let report = json!({
        "premise_ok": check.periodicity.premise_ok,
        "condition": condition,
        "env_ratios": check.periodicity.env_ratios,
        "system_ratios": check.periodicity.system_ratios,
        "max_erasure_bounds": check.bounds,
        "dSs": check.d_ss,
        "sigma_s": check.sigma_s.as_ref().map(|p| p.probs().to_vec()),
        "sigma_e": check.sigma_e.as_ref().map(|p| p.probs().to_vec()),
        "gamma": check.gamma,
        "achieved_heat": check.achieved_heat,
        "min_heat": check.min_heat,
        "message": message,
    });
    emit_json(report, args.out.as_deref())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_file_parsing() {
        let s = parse_state_file("# joint\ndims = 2 2\n0.4\n0.1\n\n0.2 # comment\n0.3\n").unwrap();
        assert_eq!(s.dims, Some(vec![2, 2]));
        assert_eq!(s.values, vec![0.4, 0.1, 0.2, 0.3]);

        let e = parse_state_file("dims = 2 2\n0.4\nabc\n").unwrap_err();
        assert!(e.starts_with("line 3"), "{e}");
        assert!(parse_state_file("dims = 2 2\n0.5\n0.5\n").is_err());
        assert!(parse_state_file("size = 2\n").unwrap_err().starts_with("line 1"));
        assert!(parse_state_file("0.5 0.5\n").is_err());
    }

    #[test]
    fn flag_parsing() {
        assert_eq!(parse_time_policy("fixed:1.5").unwrap(), TimePolicy::Fixed(1.5));
        assert_eq!(
            parse_time_policy("max-erasure").unwrap(),
            TimePolicy::MaxErasure { samples: DEFAULT_SAMPLES }
        );
        assert!(parse_time_policy("fixed:-1").is_err());
        assert!(parse_time_policy("random").is_err());
        let g: Grid = "0.1:0.5:5".parse().unwrap();
        assert_eq!(g, Grid { start: 0.1, stop: 0.5, steps: 5 });
        assert!("0.1:0.5".parse::<Grid>().is_err());
        assert_eq!(parse_ladder("uniform:2", 3).unwrap().levels(), &[2.0, 4.0, 6.0]);
        assert_eq!(parse_ladder("0, 1, 3", 3).unwrap().levels(), &[0.0, 1.0, 3.0]);
        assert!(parse_ladder("0,1", 3).is_err());
    }

    #[test]
    fn twelve_digits() {
        assert_eq!(fmt12(0.1234567890123456), "0.123456789012");
        assert_eq!(fmt12(3.0), "3");
        assert_eq!(fmt12(-2.5e-13), "-2.5e-13");
    }
}
