//! Command-line front end: squeezing time series, field-angle sweeps, the
//! optimal field ratio and adiabatic-versus-full comparisons.
//!
//! Output is assembled in memory and written in one go, with floats printed
//! to 17 significant digits, so identical invocations give identical bytes.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use spinsqueeze::analytic::optimize_r;
use spinsqueeze::dynamics::{
    run_series, Model, NPolicy, Scenario, SeriesConfig, SqueezeSeries, TimeGrid,
};
use spinsqueeze::spin::Manifold;
use spinsqueeze::{CConst, FieldParams, LabParams};

/// OH ground-state defaults for laboratory inputs.
pub const DEFAULT_DELTA_HZ: f64 = 1.667e9;
/// Bohr magneton in Hz/G.
pub const DEFAULT_MU_B: f64 = 1.399_624_6e6;
/// 1.668 D in Hz per V/cm.
pub const DEFAULT_MU_E: f64 = 0.8398e6;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] spinsqueeze::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("config {path}: {reason}")]
    Config { path: String, reason: String },
}

impl CliError {
    /// 2 for bad input, 3 for failures while computing or writing.
    pub fn exit_code(&self) -> i32 {
        use spinsqueeze::Error as E;
        match self {
            CliError::Usage(_) | CliError::Config { .. } => 2,
            CliError::Core(E::InvalidParameter { .. })
            | CliError::Core(E::InconsistentKind { .. })
            | CliError::Core(E::UnsupportedAxis(_))
            | CliError::Core(E::InvalidSpin(_))
            | CliError::Core(E::EmptyGrid) => 2,
            CliError::Core(_) | CliError::Io { .. } => 3,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Debug, Parser)]
#[command(
    name = "spinsqueeze",
    version,
    about = "Spin squeezing of a J = 3/2 molecule in crossed fields"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Squeezing parameters on a time grid.
    Simulate(RunArgs),
    /// One series per field angle, in long format.
    SweepTheta(SweepArgs),
    /// Zeeman-to-twisting ratio minimizing squeezing at t_S.
    OptimizeR(OptimizeArgs),
    /// Adiabatic and full models side by side.
    Compare(RunArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ScenarioArg {
    Ku,
    Lnl,
    General,
}

impl From<ScenarioArg> for Scenario {
    fn from(s: ScenarioArg) -> Self {
        match s {
            ScenarioArg::Ku => Scenario::Ku,
            ScenarioArg::Lnl => Scenario::Lnl,
            ScenarioArg::General => Scenario::General,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Adiabatic,
    Full,
    Both,
}

impl ModelArg {
    fn models(self) -> Vec<Model> {
        match self {
            ModelArg::Adiabatic => vec![Model::FourDim],
            ModelArg::Full => vec![Model::EightDim],
            ModelArg::Both => vec![Model::FourDim, Model::EightDim],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DataFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ManifoldArg {
    E,
    F,
}

fn parse_n_policy(s: &str) -> Result<NPolicy, String> {
    s.parse().map_err(|e: spinsqueeze::Error| e.to_string())
}

fn parse_c_const(s: &str) -> Result<CConst, String> {
    s.parse().map_err(|e: spinsqueeze::Error| e.to_string())
}

#[derive(Clone, Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct RunArgs {
    #[arg(long, value_enum, default_value = "ku")]
    pub scenario: ScenarioArg,
    #[arg(long, value_enum, default_value = "adiabatic")]
    pub model: ModelArg,
    /// Field angle in degrees (default 0 for ku, 90 otherwise).
    #[arg(long)]
    pub theta_deg: Option<f64>,
    #[arg(long, default_value_t = 2001)]
    pub points: usize,
    /// Largest dimensionless time (|κ̃|t for ku, Pt otherwise).
    #[arg(long, default_value_t = PI)]
    pub t_max: f64,
    /// formula, scan or fixed:N with N in radians.
    #[arg(long, default_value = "formula", value_parser = parse_n_policy)]
    pub n_policy: NPolicy,
    /// +1 or -1 (default +1 for ku, -1 otherwise).
    #[arg(long, value_parser = parse_c_const, allow_hyphen_values = true)]
    pub c_const: Option<CConst>,
    /// Pseudo-spin block holding the initial state of the full model.
    #[arg(long, value_enum, default_value = "e")]
    pub manifold: ManifoldArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: DataFormat,
    /// TOML file with laboratory parameters.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Report time in seconds (laboratory parameters only).
    #[arg(long)]
    pub si_time: bool,
    #[command(flatten)]
    pub reduced: ReducedArgs,
    #[command(flatten)]
    pub lab: LabArgs,
}

/// Parameters in units of Δ̃.
#[derive(Clone, Debug, Default, Args)]
pub struct ReducedArgs {
    /// Ẽ/Δ̃ (default 0.25).
    #[arg(long)]
    pub e_ratio: Option<f64>,
    /// B̃/Δ̃.
    #[arg(long)]
    pub b_ratio: Option<f64>,
    /// B̃/|κ̃| (default 3.3 for lnl and general).
    #[arg(long)]
    pub r: Option<f64>,
}

impl ReducedArgs {
    fn any(&self) -> bool {
        self.e_ratio.is_some() || self.b_ratio.is_some() || self.r.is_some()
    }
}

#[derive(Clone, Debug, Default, Args)]
pub struct LabArgs {
    /// Electric field in V/cm.
    #[arg(long)]
    pub e_vpcm: Option<f64>,
    /// Magnetic field in G.
    #[arg(long)]
    pub b_gauss: Option<f64>,
    /// Lambda-doublet splitting in GHz.
    #[arg(long)]
    pub delta_ghz: Option<f64>,
    /// Dipole moment in Hz per V/cm.
    #[arg(long)]
    pub mu_e: Option<f64>,
    /// Bohr magneton in Hz/G.
    #[arg(long)]
    pub mu_b: Option<f64>,
}

impl LabArgs {
    fn any(&self) -> bool {
        self.e_vpcm.is_some()
            || self.b_gauss.is_some()
            || self.delta_ghz.is_some()
            || self.mu_e.is_some()
            || self.mu_b.is_some()
    }
}

#[derive(Clone, Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Comma-separated field angles in degrees.
    #[arg(long, value_delimiter = ',', default_value = "90,85,80,75")]
    pub thetas_deg: Vec<f64>,
}

#[derive(Clone, Debug, Args)]
pub struct OptimizeArgs {
    #[arg(long, value_enum, default_value = "text")]
    pub format: ReportFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Laboratory parameters read from `--config`.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabConfig {
    pub delta_hz: Option<f64>,
    pub e_vpcm: Option<f64>,
    pub b_gauss: Option<f64>,
    pub theta_deg: Option<f64>,
    pub mu_b_hz_per_gauss: Option<f64>,
    pub mu_e_hz_per_vpcm: Option<f64>,
    pub c_const: Option<i64>,
}

impl LabConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        toml::from_str(&text).map_err(|e| CliError::Config {
            path: path.display().to_string(),
            reason: e.to_string(),
        })
    }
}

/// Fully resolved inputs of one run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Resolved {
    pub scenario: Scenario,
    pub params: FieldParams,
    /// Whether the parameters came from laboratory units.
    pub lab: bool,
}

/// Combines flags and the optional config file into reduced parameters.
pub fn resolve(args: &RunArgs) -> CliResult<Resolved> {
    let scenario = Scenario::from(args.scenario);
    let config = args.config.as_deref().map(LabConfig::load).transpose()?;
    let lab = config.is_some() || args.lab.any();
    if lab && args.reduced.any() {
        return Err(usage(
            "reduced flags (--e-ratio, --b-ratio, --r) cannot be mixed with laboratory inputs",
        ));
    }
    if args.reduced.b_ratio.is_some() && args.reduced.r.is_some() {
        return Err(usage("--b-ratio and --r are alternatives; give one"));
    }
    if args.si_time && !lab {
        return Err(usage("--si-time needs laboratory parameters"));
    }
    let cfg = config.unwrap_or_default();
    let theta_deg = args.theta_deg.or(cfg.theta_deg).unwrap_or(match scenario {
        Scenario::Ku => 0.0,
        Scenario::Lnl | Scenario::General => 90.0,
    });
    let theta = if theta_deg == 90.0 {
        FRAC_PI_2
    } else {
        theta_deg.to_radians()
    };
    let c_const = match (args.c_const, cfg.c_const) {
        (Some(c), _) => c,
        (None, Some(c)) => CConst::from_value(c as f64)?,
        (None, None) => match scenario {
            Scenario::Ku => CConst::Plus,
            Scenario::Lnl | Scenario::General => CConst::Minus,
        },
    };
    let params = if lab {
        LabParams {
            lambda_doubling: args
                .lab
                .delta_ghz
                .map(|g| g * 1e9)
                .or(cfg.delta_hz)
                .unwrap_or(DEFAULT_DELTA_HZ),
            e_field: args.lab.e_vpcm.or(cfg.e_vpcm).unwrap_or(0.0),
            b_field: args.lab.b_gauss.or(cfg.b_gauss).unwrap_or(0.0),
            theta,
            bohr_magneton: args
                .lab
                .mu_b
                .or(cfg.mu_b_hz_per_gauss)
                .unwrap_or(DEFAULT_MU_B),
            dipole_moment: args
                .lab
                .mu_e
                .or(cfg.mu_e_hz_per_vpcm)
                .unwrap_or(DEFAULT_MU_E),
        }
        .to_reduced()?
        .with_c(c_const)
    } else {
        let e = args.reduced.e_ratio.unwrap_or(0.25);
        match (args.reduced.b_ratio, args.reduced.r, scenario) {
            (Some(b), _, _) => FieldParams::from_ratios(e, b, theta, c_const)?,
            (None, Some(r), _) => FieldParams::from_twist_ratio(e, r, theta, c_const)?,
            (None, None, Scenario::Ku) => FieldParams::from_ratios(e, 0.0, theta, c_const)?,
            (None, None, _) => FieldParams::from_twist_ratio(e, 3.3, theta, c_const)?,
        }
    };
    Ok(Resolved {
        scenario,
        params,
        lab,
    })
}

fn grid(args: &RunArgs) -> CliResult<TimeGrid> {
    Ok(TimeGrid::new(args.t_max, args.points)?)
}

fn manifold(args: &RunArgs) -> Manifold {
    match args.manifold {
        ManifoldArg::E => Manifold::E,
        ManifoldArg::F => Manifold::F,
    }
}

fn series_for(args: &RunArgs, res: &Resolved, model: Model) -> CliResult<SqueezeSeries> {
    let cfg = SeriesConfig::new(res.scenario, model, res.params)
        .with_grid(grid(args)?)
        .with_n_policy(args.n_policy)
        .with_manifold(manifold(args));
    Ok(run_series(&cfg)?)
}

/// Stderr notes produced alongside the data.
fn warnings(res: &Resolved) -> Vec<String> {
    let mut out = Vec::new();
    if !res.params.is_adiabatic() {
        out.push(format!(
            "warning: fields are not small against the splitting (E/delta = {}, B/delta = {}); the adiabatic model is unreliable",
            fmt_float(res.params.e_field / res.params.delta),
            fmt_float(res.params.b_field / res.params.delta),
        ));
    }
    out
}

/// 17 significant digits; `inf` marks divergent squeezing parameters.
pub fn fmt_float(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.16e}")
    }
}

fn json_float(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn time_label(args: &RunArgs) -> &'static str {
    if args.si_time {
        "t_seconds"
    } else {
        "t"
    }
}

/// Dimensionless time, or seconds when the constants are read as rad/s.
fn time_value(args: &RunArgs, s: &SqueezeSeries, k: usize) -> f64 {
    let r = &s.records[k];
    if args.si_time {
        r.time
    } else {
        r.tau
    }
}

#[derive(Serialize)]
struct JsonSeries {
    model: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    theta_deg: Option<f64>,
    rows: Vec<Vec<Option<f64>>>,
}

#[derive(Serialize)]
struct JsonDocument {
    scenario: &'static str,
    columns: Vec<&'static str>,
    series: Vec<JsonSeries>,
}

/// Result of one command: data for stdout or `--out`, notes for stderr.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Output {
    pub data: String,
    pub notes: Vec<String>,
}

fn tagged_series(
    args: &RunArgs,
    res: &Resolved,
    theta_deg: Option<f64>,
    series: &[SqueezeSeries],
    with_model: bool,
) -> CliResult<(Vec<&'static str>, Vec<JsonSeries>, String)> {
    let (a, b) = res.scenario.xi_labels();
    let mut columns = Vec::new();
    if theta_deg.is_some() {
        columns.push("theta_deg");
    }
    if with_model {
        columns.push("model");
    }
    columns.extend([time_label(args), a, b]);
    let mut csv = String::new();
    let mut json = Vec::new();
    for s in series {
        let mut rows = Vec::new();
        for (k, r) in s.records.iter().enumerate() {
            let t = time_value(args, s, k);
            if let Some(th) = theta_deg {
                write!(csv, "{},", fmt_float(th)).unwrap();
            }
            if with_model {
                write!(csv, "{},", s.model().name()).unwrap();
            }
            writeln!(
                csv,
                "{},{},{}",
                fmt_float(t),
                fmt_float(r.xi.0),
                fmt_float(r.xi.1)
            )
            .unwrap();
            rows.push(vec![Some(t), json_float(r.xi.0), json_float(r.xi.1)]);
        }
        json.push(JsonSeries {
            model: s.model().name(),
            theta_deg,
            rows,
        });
    }
    Ok((columns, json, csv))
}

fn render(
    format: DataFormat,
    scenario: Scenario,
    columns: Vec<&'static str>,
    series: Vec<JsonSeries>,
    body: String,
) -> String {
    match format {
        DataFormat::Csv => format!("{}\n{}", columns.join(","), body),
        DataFormat::Json => {
            // the JSON rows omit the grouping columns carried by each series
            let columns = columns
                .into_iter()
                .filter(|c| *c != "theta_deg" && *c != "model")
                .collect();
            let doc = JsonDocument {
                scenario: scenario.name(),
                columns,
                series,
            };
            serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
        }
    }
}

pub fn cmd_simulate(args: &RunArgs) -> CliResult<Output> {
    let res = resolve(args)?;
    let models = args.model.models();
    let series = models
        .iter()
        .map(|&m| series_for(args, &res, m))
        .collect::<CliResult<Vec<_>>>()?;
    let (columns, json, body) = tagged_series(args, &res, None, &series, models.len() > 1)?;
    Ok(Output {
        data: render(args.format, res.scenario, columns, json, body),
        notes: warnings(&res),
    })
}

pub fn cmd_sweep_theta(args: &SweepArgs) -> CliResult<Output> {
    let run = &args.run;
    if run.scenario == ScenarioArg::Ku {
        return Err(usage(
            "sweep-theta applies to the lnl and general scenarios",
        ));
    }
    if run.theta_deg.is_some() {
        return Err(usage("sweep-theta takes --thetas-deg, not --theta-deg"));
    }
    if args.thetas_deg.is_empty() {
        return Err(usage("--thetas-deg is empty"));
    }
    let base = resolve(run)?;
    let models = run.model.models();
    let per_theta = args
        .thetas_deg
        .par_iter()
        .map(|&deg| {
            let theta = if deg == 90.0 {
                FRAC_PI_2
            } else {
                deg.to_radians()
            };
            let res = Resolved {
                scenario: Scenario::General,
                params: base.params.with_theta(theta),
                ..base
            };
            let series = models
                .iter()
                .map(|&m| series_for(run, &res, m))
                .collect::<CliResult<Vec<_>>>()?;
            tagged_series(run, &res, Some(deg), &series, models.len() > 1)
        })
        .collect::<CliResult<Vec<_>>>()?;
    let mut columns = Vec::new();
    let mut json = Vec::new();
    let mut body = String::new();
    for (c, j, b) in per_theta {
        columns = c;
        json.extend(j);
        body.push_str(&b);
    }
    Ok(Output {
        data: render(run.format, base.scenario, columns, json, body),
        notes: warnings(&base),
    })
}

#[derive(Serialize)]
struct OptimizeReport {
    r_opt: f64,
    xi_min: f64,
    convention: Option<String>,
}

pub fn cmd_optimize_r(args: &OptimizeArgs) -> CliResult<Output> {
    let opt = optimize_r();
    let report = OptimizeReport {
        r_opt: opt.r_opt,
        xi_min: opt.xi_min,
        convention: opt.convention.map(|c| c.to_string()),
    };
    let data = match args.format {
        ReportFormat::Json => serde_json::to_string_pretty(&report).expect("serializable") + "\n",
        ReportFormat::Text => format!(
            "r_opt = {}\nxi_min = {}\nconvention: {}\n",
            fmt_float(report.r_opt),
            fmt_float(report.xi_min),
            report.convention.as_deref().unwrap_or("undetermined"),
        ),
    };
    Ok(Output {
        data,
        notes: Vec::new(),
    })
}

/// Summary statistics printed by `compare`.
#[derive(Clone, Debug, PartialEq)]
pub struct CompareSummary {
    pub min_adiabatic: Option<(f64, f64)>,
    pub min_full: Option<(f64, f64)>,
    pub first_min_adiabatic: Option<(f64, f64)>,
    pub first_min_full: Option<(f64, f64)>,
    pub max_abs_diff: f64,
}

pub fn compare_summary(adiabatic: &SqueezeSeries, full: &SqueezeSeries) -> CompareSummary {
    let max_abs_diff = adiabatic
        .records
        .iter()
        .zip(&full.records)
        .map(|(a, b)| (a.xi.0 - b.xi.0).abs())
        .filter(|d| d.is_finite())
        .fold(0.0, f64::max);
    CompareSummary {
        min_adiabatic: adiabatic.min_first(),
        min_full: full.min_first(),
        first_min_adiabatic: adiabatic.first_minimum_first(),
        first_min_full: full.first_minimum_first(),
        max_abs_diff,
    }
}

pub fn cmd_compare(args: &RunArgs) -> CliResult<Output> {
    let res = resolve(args)?;
    let four = series_for(args, &res, Model::FourDim)?;
    let eight = series_for(args, &res, Model::EightDim)?;
    let (a, b) = res.scenario.xi_labels();
    let columns = [
        time_label(args).to_string(),
        format!("{a}_adiabatic"),
        format!("{b}_adiabatic"),
        format!("{a}_full"),
        format!("{b}_full"),
    ];
    let data = match args.format {
        DataFormat::Csv => {
            let mut out = columns.join(",") + "\n";
            for (k, (x, y)) in four.records.iter().zip(&eight.records).enumerate() {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    fmt_float(time_value(args, &four, k)),
                    fmt_float(x.xi.0),
                    fmt_float(x.xi.1),
                    fmt_float(y.xi.0),
                    fmt_float(y.xi.1)
                )
                .unwrap();
            }
            out
        }
        DataFormat::Json => {
            let rows: Vec<Vec<Option<f64>>> = four
                .records
                .iter()
                .zip(&eight.records)
                .enumerate()
                .map(|(k, (x, y))| {
                    vec![
                        Some(time_value(args, &four, k)),
                        json_float(x.xi.0),
                        json_float(x.xi.1),
                        json_float(y.xi.0),
                        json_float(y.xi.1),
                    ]
                })
                .collect();
            let doc = serde_json::json!({
                "scenario": res.scenario.name(),
                "columns": columns,
                "rows": rows,
            });
            serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
        }
    };
    let s = compare_summary(&four, &eight);
    let point = |p: Option<(f64, f64)>| match p {
        Some((t, v)) => format!("{} at t = {}", fmt_float(v), fmt_float(t)),
        None => "none".to_string(),
    };
    let mut notes = warnings(&res);
    notes.push(format!("min {a} adiabatic: {}", point(s.min_adiabatic)));
    notes.push(format!("min {a} full: {}", point(s.min_full)));
    notes.push(format!(
        "first minimum {a} adiabatic: {}",
        point(s.first_min_adiabatic)
    ));
    notes.push(format!(
        "first minimum {a} full: {}",
        point(s.first_min_full)
    ));
    notes.push(format!("max |delta {a}|: {}", fmt_float(s.max_abs_diff)));
    Ok(Output { data, notes })
}

pub fn execute(cli: &Cli) -> CliResult<(Output, Option<PathBuf>)> {
    Ok(match &cli.command {
        Command::Simulate(a) => (cmd_simulate(a)?, a.out.clone()),
        Command::SweepTheta(a) => (cmd_sweep_theta(a)?, a.run.out.clone()),
        Command::OptimizeR(a) => (cmd_optimize_r(a)?, a.out.clone()),
        Command::Compare(a) => (cmd_compare(a)?, a.out.clone()),
    })
}

/// Runs the command, writing data to `--out` or stdout and notes to stderr.
pub fn run(cli: &Cli) -> CliResult<()> {
    let (output, out) = execute(cli)?;
    for note in &output.notes {
        eprintln!("{note}");
    }
    match out {
        Some(path) => {
            std::fs::write(&path, output.data.as_bytes()).map_err(|source| CliError::Io {
                path: path.display().to_string(),
                source,
            })
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(output.data.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".to_string(),
                    source,
                })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("spinsqueeze").chain(args.iter().copied())).unwrap()
    }

    fn run_args(args: &[&str]) -> RunArgs {
        match parse(args).command {
            Command::Simulate(a) | Command::Compare(a) => a,
            _ => panic!("not a run command"),
        }
    }

    fn column(csv: &str, name: &str) -> Vec<f64> {
        let mut lines = csv.lines();
        let header: Vec<&str> = lines.next().unwrap().split(',').collect();
        let idx = header.iter().position(|h| *h == name).unwrap();
        lines
            .map(|l| {
                let v = l.split(',').nth(idx).unwrap();
                if v == "inf" {
                    f64::INFINITY
                } else {
                    v.parse().unwrap()
                }
            })
            .collect()
    }

    #[test]
    fn float_format() {
        assert_eq!(fmt_float(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_float(f64::INFINITY), "inf");
        assert_eq!(fmt_float(-0.5), "-5.0000000000000000e-1");
    }

    #[test]
    fn ku_simulation_minimum() {
        let out = cmd_simulate(&run_args(&[
            "simulate",
            "--scenario",
            "ku",
            "--e-ratio",
            "0.25",
        ]))
        .unwrap();
        assert!(out.data.starts_with("t,xi_y,xi_z\n"));
        let xi = column(&out.data, "xi_y");
        assert_eq!(xi.len(), 2001);
        let min = xi.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!((min - 0.7617).abs() < 1e-3, "{min}");
        assert!(out.notes.is_empty());
    }

    #[test]
    fn ku_without_field_is_flat() {
        let out = cmd_simulate(&run_args(&[
            "simulate",
            "--e-ratio",
            "0",
            "--points",
            "101",
        ]))
        .unwrap();
        assert!(column(&out.data, "xi_y")
            .iter()
            .all(|x| (x - 1.0).abs() < 1e-12));
    }

    #[test]
    fn lnl_simulation() {
        let args = run_args(&[
            "simulate",
            "--scenario",
            "lnl",
            "--r",
            "3.3",
            "--points",
            "2001",
        ]);
        let out = cmd_simulate(&args).unwrap();
        let t = column(&out.data, "t");
        let xi = column(&out.data, "xi_y");
        // Pt = π/4 is node 500 of the default grid
        assert!((t[500] - PI / 4.0).abs() < 1e-15);
        assert!((xi[500] - 0.9086).abs() < 1e-3, "{}", xi[500]);
        let quarter = run_args(&[
            "simulate",
            "--scenario",
            "lnl",
            "--r",
            "3.3",
            "--t-max",
            "0.7853981633974483",
        ]);
        let xi = column(&cmd_simulate(&quarter).unwrap().data, "xi_y");
        let min = xi.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!((min - 0.909).abs() < 1e-3);
    }

    #[test]
    fn both_models_add_column() {
        let out = cmd_simulate(&run_args(&[
            "simulate", "--model", "both", "--points", "11",
        ]))
        .unwrap();
        assert!(out.data.starts_with("model,t,xi_y,xi_z\n"));
        assert_eq!(out.data.lines().count(), 23);
        assert!(out.data.lines().nth(12).unwrap().starts_with("full,"));
    }

    #[test]
    fn mixing_units_is_usage_error() {
        let args = run_args(&["simulate", "--e-ratio", "0.2", "--e-vpcm", "100"]);
        let err = cmd_simulate(&args).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let args = run_args(&[
            "simulate",
            "--scenario",
            "lnl",
            "--b-ratio",
            "0.1",
            "--r",
            "2",
        ]);
        assert_eq!(cmd_simulate(&args).unwrap_err().exit_code(), 2);
        let args = run_args(&["simulate", "--si-time"]);
        assert_eq!(cmd_simulate(&args).unwrap_err().exit_code(), 2);
        let args = run_args(&["simulate", "--b-ratio", "0.1"]);
        assert_eq!(cmd_simulate(&args).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn lab_inputs_and_warning() {
        let res = resolve(&run_args(&[
            "simulate",
            "--e-vpcm",
            "100",
            "--delta-ghz",
            "1.66",
        ]))
        .unwrap();
        assert!(res.lab);
        assert!((res.params.delta - 0.83e9).abs() < 1e-3);
        let res = resolve(&run_args(&["simulate", "--e-ratio", "2.0"])).unwrap();
        assert_eq!(warnings(&res).len(), 1);
    }

    #[test]
    fn c_const_defaults_and_override() {
        let ku = resolve(&run_args(&["simulate"])).unwrap();
        assert_eq!(ku.params.c_const, CConst::Plus);
        let lnl = resolve(&run_args(&["simulate", "--scenario", "lnl"])).unwrap();
        assert_eq!(lnl.params.c_const, CConst::Minus);
        assert!((lnl.params.twist_ratio() - 3.3).abs() < 1e-12);
        let forced = resolve(&run_args(&["simulate", "--c-const", "-1"])).unwrap();
        assert_eq!(forced.params.c_const, CConst::Minus);
    }

    #[test]
    fn sweep_theta_ninety_matches_simulate() {
        let sweep = match parse(&[
            "sweep-theta",
            "--scenario",
            "general",
            "--thetas-deg",
            "90",
            "--points",
            "51",
        ])
        .command
        {
            Command::SweepTheta(a) => a,
            _ => unreachable!(),
        };
        let swept = cmd_sweep_theta(&sweep).unwrap().data;
        let lnl = cmd_simulate(&run_args(&[
            "simulate",
            "--scenario",
            "lnl",
            "--points",
            "51",
        ]))
        .unwrap()
        .data;
        let stripped: Vec<&str> = swept
            .lines()
            .skip(1)
            .map(|l| l.split_once(',').unwrap().1)
            .collect();
        let plain: Vec<&str> = lnl.lines().skip(1).collect();
        assert_eq!(stripped, plain);
    }

    #[test]
    fn optimize_json_schema() {
        let out = cmd_optimize_r(&OptimizeArgs {
            format: ReportFormat::Json,
            out: None,
        })
        .unwrap();
        let v: serde_json::Value = serde_json::from_str(&out.data).unwrap();
        assert!((v["r_opt"].as_f64().unwrap() - 3.3).abs() < 0.05);
        assert!((v["xi_min"].as_f64().unwrap() - 0.9086).abs() < 1e-3);
        assert!(v["convention"].as_str().unwrap().contains("kappa > 0"));
    }

    #[test]
    fn compare_summary_in_adiabatic_limit() {
        let args = run_args(&[
            "compare",
            "--e-ratio",
            "0.01",
            "--n-policy",
            "scan",
            "--points",
            "801",
        ]);
        let out = cmd_compare(&args).unwrap();
        assert!(out
            .data
            .starts_with("t,xi_y_adiabatic,xi_z_adiabatic,xi_y_full,xi_z_full\n"));
        let a = column(&out.data, "xi_y_adiabatic")
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        let f = column(&out.data, "xi_y_full")
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        assert!((a - f).abs() / a < 0.02);
        assert_eq!(out.notes.len(), 5);
    }

    #[test]
    fn json_output_uses_null_for_divergence() {
        let args = run_args(&[
            "simulate",
            "--format",
            "json",
            "--points",
            "3",
            "--t-max",
            "3.141592653589793",
        ]);
        let out = cmd_simulate(&args).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out.data).unwrap();
        assert_eq!(v["columns"], serde_json::json!(["t", "xi_y", "xi_z"]));
        let rows = v["series"][0]["rows"].as_array().unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows[1][1].is_null());
    }

    #[test]
    fn config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("lab.toml");
        std::fs::write(&path, "delta_hz = 1.66e9\ne_vpcm = 100.0\nc_const = -1\n").unwrap();
        let p = path.to_str().unwrap();
        let res = resolve(&run_args(&["simulate", "--config", p])).unwrap();
        assert_eq!(res.params.c_const, CConst::Minus);
        assert!((res.params.delta - 0.83e9).abs() < 1e-3);
        let err = resolve(&run_args(&["simulate", "--config", p, "--r", "2"])).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        std::fs::write(&path, "bogus = 1\n").unwrap();
        assert_eq!(
            resolve(&run_args(&["simulate", "--config", p]))
                .unwrap_err()
                .exit_code(),
            2
        );
    }
}
