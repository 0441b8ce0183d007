//! Command-line front end: `check`, `moments`, `reduce`, `simulate`, `bode`.
//!
//! Reports and models are JSON (to `--output` or stdout); a short human
//! summary goes to stderr. Exit codes: 0 success, 2 input error,
//! 3 infeasible order or failed precondition, 4 non-informative data,
//! 1 numerical failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::informativity::{
    self, InformativityVerdict, InterpolationSpec, MomentEntry, MomentReport, MomentSet,
    VerdictKind,
};
use crate::numlin::{RankReport, RankTolerance, Tolerances};
use crate::polynomial::SystemParams;
use crate::romsynth::{self, Feasibility, ReducedModel};
use crate::simkit::{self, SimConfig, StateSpace};
use crate::trajectory::{self, fixtures, make_pair, Trajectory};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERICAL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_NOT_INFORMATIVE: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "ddmor",
    version,
    about = "Data-driven moment matching and model reduction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct JobArgs {
    /// Trajectory CSV (`t,u,y`) or a builtin dataset name.
    data: String,
    /// Job configuration: a JSON file or an inline JSON object.
    #[arg(long)]
    config: String,
    /// Absolute rank threshold; also loosens the residual bound to this value.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Informativity verdicts for identification and every configured point.
    Check(JobArgs),
    /// Moments determined by the data at every configured point.
    Moments(JobArgs),
    /// Reduced-order model matching the data moments.
    Reduce(JobArgs),
    /// Simulate a model (JSON or builtin name) on an input CSV.
    Simulate {
        model: String,
        input: PathBuf,
        /// Comma-separated `y_0..y_{n-1}` (default zeros).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        initial: Option<Vec<f64>>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Frequency response on the unit circle as CSV.
    Bode {
        model: String,
        /// `lin:start:stop:count` or `log:start:stop:count`.
        #[arg(long, conflicts_with = "omega")]
        grid: Option<String>,
        /// Comma-separated frequencies in rad/sample.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        omega: Option<Vec<f64>>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Complex number as `{re, im}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl From<Complex64> for ComplexJson {
    fn from(z: Complex64) -> Self {
        ComplexJson { re: z.re, im: z.im }
    }
}

impl From<ComplexJson> for Complex64 {
    fn from(z: ComplexJson) -> Self {
        Complex64::new(z.re, z.im)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointConfig {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
    #[serde(default)]
    pub k: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    /// System order; optional for builtin datasets.
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub points: Vec<PointConfig>,
    #[serde(default)]
    pub r: Option<usize>,
    #[serde(default)]
    pub r_max: Option<usize>,
    #[serde(default)]
    pub prescribed_poles: Option<Vec<f64>>,
    #[serde(default)]
    pub tolerance: Option<f64>,
}

impl JobConfig {
    fn spec(&self) -> Result<InterpolationSpec, Error> {
        InterpolationSpec::new(
            self.points
                .iter()
                .map(|p| (Complex64::new(p.re, p.im), p.k))
                .collect(),
        )
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TolerancesJson {
    /// `relative` (scaled by size and largest singular value) or `absolute`.
    pub rank_mode: String,
    pub rank_value: f64,
    pub residual: f64,
}

impl From<&Tolerances> for TolerancesJson {
    fn from(t: &Tolerances) -> Self {
        let (rank_mode, rank_value) = match t.rank {
            RankTolerance::Relative(s) => ("relative", s),
            RankTolerance::Absolute(a) => ("absolute", a),
        };
        TolerancesJson {
            rank_mode: rank_mode.into(),
            rank_value,
            residual: t.residual,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RankJson {
    pub matrix: String,
    pub rank: usize,
    pub tolerance: f64,
    pub singular_values: Vec<f64>,
}

fn rank_json(label: &str, r: &RankReport) -> RankJson {
    RankJson {
        matrix: label.into(),
        rank: r.rank,
        tolerance: r.tolerance_used,
        singular_values: r.singular_values.clone(),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerdictJson {
    /// `system_identification`, `interpolation` or `moment_order`.
    pub kind: String,
    pub order: Option<usize>,
    pub verdict: bool,
    pub ranks: Vec<RankJson>,
    pub moment: Option<ComplexJson>,
    pub residual: Option<f64>,
    pub diagnostic: Option<String>,
}

impl From<&InformativityVerdict> for VerdictJson {
    fn from(v: &InformativityVerdict) -> Self {
        let (kind, order) = match v.kind {
            VerdictKind::SystemIdentification => ("system_identification", None),
            VerdictKind::Interpolation => ("interpolation", Some(0)),
            VerdictKind::MomentOrder(j) => ("moment_order", Some(j)),
        };
        VerdictJson {
            kind: kind.into(),
            order,
            verdict: v.verdict,
            ranks: v.ranks.iter().map(|(l, r)| rank_json(l, r)).collect(),
            moment: v.moment.map(Into::into),
            residual: v.residual,
            diagnostic: v.diagnostic.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PointJson {
    pub sigma: ComplexJson,
    pub k: usize,
    pub informative: bool,
    pub failed_order: Option<usize>,
    pub moments: Vec<ComplexJson>,
    pub orders: Vec<VerdictJson>,
}

impl From<&MomentReport> for PointJson {
    fn from(m: &MomentReport) -> Self {
        PointJson {
            sigma: m.sigma.into(),
            k: m.requested,
            informative: m.informative(),
            failed_order: m.failed_order,
            moments: m.moments.iter().map(|&z| z.into()).collect(),
            orders: m.orders.iter().map(Into::into).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProjectionJson {
    pub holds: bool,
    pub input_rank: RankJson,
    pub projected_rank: Option<RankJson>,
    pub diagnostic: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckReport {
    pub n: usize,
    pub samples: usize,
    pub tolerances: TolerancesJson,
    pub system_identification: VerdictJson,
    pub projection_condition: ProjectionJson,
    pub points: Vec<PointJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MomentsReport {
    pub n: usize,
    pub tolerances: TolerancesJson,
    pub points: Vec<PointJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FeasibilityJson {
    pub r: usize,
    pub rank_a: usize,
    pub rank_full: usize,
    pub feasible: bool,
}

impl From<&Feasibility> for FeasibilityJson {
    fn from(f: &Feasibility) -> Self {
        FeasibilityJson {
            r: f.r,
            rank_a: f.rank_a.rank,
            rank_full: f.rank_full.rank,
            feasible: f.feasible,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatchedJson {
    pub sigma: ComplexJson,
    pub moments: Vec<ComplexJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CommonFactorJson {
    pub sylvester_ratio: f64,
    pub suspected: bool,
}

/// Model file written by `reduce`; `simulate` and `bode` read `p` and `q`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelJson {
    pub r: usize,
    /// `p_0..p_{r-1}` of the monic denominator.
    pub p: Vec<f64>,
    /// `q_0..q_r`.
    pub q: Vec<f64>,
    #[serde(default)]
    pub residual: Option<f64>,
    #[serde(default)]
    pub moment_residual: Option<f64>,
    #[serde(default)]
    pub matched: Vec<MatchedJson>,
    #[serde(default)]
    pub feasibility: Vec<FeasibilityJson>,
    #[serde(default)]
    pub prescribed_poles: bool,
    #[serde(default)]
    pub common_factor: Option<CommonFactorJson>,
    #[serde(default)]
    pub tolerances: Option<TolerancesJson>,
}

impl ModelJson {
    fn from_model(m: &ReducedModel, feasibility: Vec<FeasibilityJson>, tols: &Tolerances) -> Self {
        ModelJson {
            r: m.order(),
            p: m.params.p().to_vec(),
            q: m.params.q().to_vec(),
            residual: Some(m.residual),
            moment_residual: Some(m.moment_residual),
            matched: m
                .matched
                .entries
                .iter()
                .map(|e| MatchedJson {
                    sigma: e.sigma.into(),
                    moments: e.moments.iter().map(|&z| z.into()).collect(),
                })
                .collect(),
            feasibility,
            prescribed_poles: m.prescribed_poles,
            common_factor: Some(CommonFactorJson {
                sylvester_ratio: m.coprimeness.sylvester_ratio,
                suspected: m.coprimeness.near_common_factor,
            }),
            tolerances: Some(tols.into()),
        }
    }

    pub fn params(&self) -> Result<SystemParams, Error> {
        if self.p.len() != self.r {
            return Err(Error::input(format!(
                "model declares r = {} but has {} denominator coefficients",
                self.r,
                self.p.len()
            )));
        }
        SystemParams::new(self.q.clone(), self.p.clone())
    }
}

/// Failure carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Input(_) | Error::Parse { .. } | Error::Io(_) | Error::Pole { .. } => EXIT_INPUT,
            Error::Infeasible { .. } | Error::Precondition(_) => EXIT_INFEASIBLE,
            Error::Numerical(_) => EXIT_NUMERICAL,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn input_failure(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

/// Parses `args` (program name first) and runs, writing to the process's
/// stdout and stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = write!(err, "{e}");
            return if code == 0 { EXIT_OK } else { EXIT_INPUT };
        }
    };
    let result = match cli.command {
        Command::Check(job) => cmd_check(&job, out, err),
        Command::Moments(job) => cmd_moments(&job, out, err),
        Command::Reduce(job) => cmd_reduce(&job, out, err),
        Command::Simulate {
            model,
            input,
            initial,
            output,
        } => cmd_simulate(&model, &input, initial, output.as_deref(), out),
        Command::Bode {
            model,
            grid,
            omega,
            output,
        } => cmd_bode(&model, grid.as_deref(), omega, output.as_deref(), out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn read_config(arg: &str) -> Result<JobConfig, Failure> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        fs::read_to_string(arg).map_err(|e| input_failure(format!("config `{arg}`: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| input_failure(format!("config: {e}")))
}

fn load_data(name: &str, n: Option<usize>) -> Result<Trajectory, Failure> {
    if let Some(t) = fixtures::by_name(name) {
        return Ok(match n {
            Some(n) => t.with_order(n)?,
            None => t,
        });
    }
    let n = n.ok_or_else(|| input_failure("config must give the order `n` for CSV data"))?;
    Ok(trajectory::load_csv(name, n)?)
}

fn tolerances(job: &JobArgs, cfg: &JobConfig) -> Result<Tolerances, Failure> {
    Ok(Tolerances::from_user(job.tol.or(cfg.tolerance))?)
}

fn emit<S: Serialize>(value: &S, path: Option<&Path>, out: &mut dyn Write) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure {
        code: EXIT_NUMERICAL,
        message: e.to_string(),
    })?;
    match path {
        Some(p) => fs::write(p, text + "\n").map_err(Error::from)?,
        None => writeln!(out, "{text}").map_err(Error::from)?,
    }
    Ok(())
}

fn fmt_c(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{:.6}", z.re)
    } else {
        format!("{:.6}{:+.6}i", z.re, z.im)
    }
}

struct Job {
    cfg: JobConfig,
    spec: InterpolationSpec,
    traj: Trajectory,
    tols: Tolerances,
}

fn prepare(job: &JobArgs) -> Result<Job, Failure> {
    let cfg = read_config(&job.config)?;
    let spec = cfg.spec()?;
    let traj = load_data(&job.data, cfg.n)?;
    let tols = tolerances(job, &cfg)?;
    Ok(Job {
        cfg,
        spec,
        traj,
        tols,
    })
}

fn point_reports(j: &Job) -> Result<Vec<MomentReport>, Failure> {
    let pair = make_pair(&j.traj);
    Ok(informativity::compute_moment_set(&pair, &j.spec, &j.tols)?)
}

fn cmd_check(job: &JobArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let j = prepare(job)?;
    let pair = make_pair(&j.traj);
    let sysid = informativity::check_sysid(&pair, &j.tols)?;
    let proj = informativity::check_verhaegen_condition(&pair, &j.tols)?;
    let points = point_reports(&j)?;
    let _ = writeln!(
        err,
        "identification: {}",
        if sysid.verdict {
            "informative"
        } else {
            "not informative"
        }
    );
    for p in &points {
        let _ = writeln!(
            err,
            "sigma = {} (k = {}): {}",
            fmt_c(p.sigma),
            p.requested,
            match p.failed_order {
                None => "informative".to_string(),
                Some(o) => format!("not informative from order {o}"),
            }
        );
    }
    let report = CheckReport {
        n: j.traj.order(),
        samples: j.traj.horizon(),
        tolerances: (&j.tols).into(),
        system_identification: (&sysid).into(),
        projection_condition: ProjectionJson {
            holds: proj.holds,
            input_rank: rank_json("Hu", &proj.input_rank),
            projected_rank: proj.projected_rank.as_ref().map(|r| rank_json("Hy Pi", r)),
            diagnostic: proj.diagnostic.clone(),
        },
        points: points.iter().map(Into::into).collect(),
    };
    emit(&report, job.output.as_deref(), out)
}

fn cmd_moments(job: &JobArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let j = prepare(job)?;
    let points = point_reports(&j)?;
    for p in &points {
        for (i, m) in p.moments.iter().enumerate() {
            let _ = writeln!(err, "sigma = {}: M{i} = {}", fmt_c(p.sigma), fmt_c(*m));
        }
        if let Some(o) = p.failed_order {
            let _ = writeln!(
                err,
                "sigma = {}: not informative at order {o}",
                fmt_c(p.sigma)
            );
        }
    }
    let report = MomentsReport {
        n: j.traj.order(),
        tolerances: (&j.tols).into(),
        points: points.iter().map(Into::into).collect(),
    };
    emit(&report, job.output.as_deref(), out)
}

enum ReduceMode {
    Fixed(usize),
    Search(usize),
    Prescribed(Vec<f64>),
}

fn reduce_mode(cfg: &JobConfig) -> Result<ReduceMode, Failure> {
    match (&cfg.prescribed_poles, cfg.r, cfg.r_max) {
        (Some(_), _, Some(_)) => Err(input_failure(
            "prescribed_poles cannot be combined with r_max",
        )),
        (Some(p), Some(r), None) if r != p.len() => Err(input_failure(format!(
            "r = {r} disagrees with {} prescribed denominator coefficients",
            p.len()
        ))),
        (Some(p), _, None) => Ok(ReduceMode::Prescribed(p.clone())),
        (None, Some(r), None) => Ok(ReduceMode::Fixed(r)),
        (None, None, Some(m)) => Ok(ReduceMode::Search(m)),
        (None, Some(_), Some(_)) => Err(input_failure("give exactly one of r and r_max")),
        (None, None, None) => Err(input_failure("reduce needs r, r_max or prescribed_poles")),
    }
}

fn cmd_reduce(job: &JobArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let j = prepare(job)?;
    let mode = reduce_mode(&j.cfg)?;
    if j.spec.points().is_empty() {
        return Err(input_failure(
            "reduce needs at least one interpolation point",
        ));
    }
    let points = point_reports(&j)?;
    if let Some(bad) = points.iter().find(|p| !p.informative()) {
        let order = bad.failed_order.unwrap_or(0);
        let why = bad
            .orders
            .last()
            .and_then(|v| v.diagnostic.clone())
            .unwrap_or_default();
        return Err(Failure {
            code: EXIT_NOT_INFORMATIVE,
            message: format!(
                "data are not informative at sigma = {} (order {order}): {why}",
                fmt_c(bad.sigma)
            ),
        });
    }
    let set = MomentSet::new(
        points
            .iter()
            .map(|p| MomentEntry {
                sigma: p.sigma,
                moments: p.moments.clone(),
            })
            .collect(),
    );
    let (model, trace) = match mode {
        ReduceMode::Prescribed(p) => (
            romsynth::solve_rom_prescribed(&p, &set, &j.tols)?,
            Vec::new(),
        ),
        ReduceMode::Fixed(r) => {
            let f = romsynth::feasible(r, &set, &j.tols)?;
            let trace = vec![FeasibilityJson::from(&f)];
            (romsynth::solve_rom(r, &set, &j.tols)?, trace)
        }
        ReduceMode::Search(r_max) => {
            if r_max == 0 {
                return Err(input_failure("r_max must be at least 1"));
            }
            let mut trace = Vec::new();
            let mut found = None;
            for r in 1..=r_max {
                let f = romsynth::feasible(r, &set, &j.tols)?;
                trace.push(FeasibilityJson::from(&f));
                if f.feasible {
                    found = Some(r);
                    break;
                }
            }
            let Some(r) = found else {
                let last = trace.last().expect("r_max >= 1");
                return Err(Failure {
                    code: EXIT_INFEASIBLE,
                    message: format!(
                        "no reduced model up to order {r_max}: at r = {r_max} rank of constraint rows is {}, rank with target row is {}",
                        last.rank_a, last.rank_full
                    ),
                });
            };
            (romsynth::solve_rom(r, &set, &j.tols)?, trace)
        }
    };
    let _ = writeln!(
        err,
        "reduced model of order {} (relative residual {:.3e})",
        model.order(),
        model.residual
    );
    if model.coprimeness.near_common_factor {
        let _ = writeln!(
            err,
            "warning: numerator and denominator nearly share a factor"
        );
    }
    emit(
        &ModelJson::from_model(&model, trace, &j.tols),
        job.output.as_deref(),
        out,
    )
}

enum Model {
    Params(SystemParams),
    Discrete(StateSpace),
}

impl Model {
    fn params(&self) -> Result<SystemParams, Error> {
        match self {
            Model::Params(p) => Ok(p.clone()),
            Model::Discrete(ss) => simkit::ss_to_params(ss),
        }
    }
}

fn load_model(arg: &str) -> Result<Model, Failure> {
    if arg == fixtures::RL_CIRCUIT {
        return Ok(Model::Discrete(simkit::circuit_system()));
    }
    let text = fs::read_to_string(arg).map_err(|e| input_failure(format!("model `{arg}`: {e}")))?;
    let m: ModelJson =
        serde_json::from_str(&text).map_err(|e| input_failure(format!("model `{arg}`: {e}")))?;
    Ok(Model::Params(m.params()?))
}

fn cmd_simulate(
    model: &str,
    input: &Path,
    initial: Option<Vec<f64>>,
    output: Option<&Path>,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let model = load_model(model)?;
    let file = fs::File::open(input)
        .map_err(|e| input_failure(format!("input `{}`: {e}", input.display())))?;
    let u = trajectory::read_samples(file, false)?.u;
    let y = match (&model, initial) {
        (Model::Discrete(_), Some(_)) => {
            return Err(input_failure(
                "builtin systems start from rest; --initial is not accepted",
            ))
        }
        (Model::Discrete(ss), None) => simkit::simulate_state_space(ss, &u),
        (Model::Params(p), init) => {
            let cfg = SimConfig {
                initial_outputs: init.unwrap_or_else(|| vec![0.0; p.order()]),
                input: u.clone(),
            };
            simkit::simulate_io(p, &cfg)?.y().to_vec()
        }
    };
    match output {
        Some(path) => {
            let f = fs::File::create(path).map_err(Error::from)?;
            trajectory::write_csv(std::io::BufWriter::new(f), &u, &y)?;
        }
        None => trajectory::write_csv(out, &u, &y)?,
    }
    Ok(())
}

/// Frequencies from `lin:start:stop:count` or `log:start:stop:count`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, Error> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Error::input(format!("grid `{spec}`: expected lin|log:start:stop:count"));
    if parts.len() != 4 {
        return Err(bad());
    }
    let start: f64 = parts[1].parse().map_err(|_| bad())?;
    let stop: f64 = parts[2].parse().map_err(|_| bad())?;
    let count: usize = parts[3].parse().map_err(|_| bad())?;
    if count == 0 || !start.is_finite() || !stop.is_finite() {
        return Err(bad());
    }
    let step = |i: usize| {
        if count == 1 {
            0.0
        } else {
            i as f64 / (count - 1) as f64
        }
    };
    match parts[0] {
        "lin" => Ok((0..count)
            .map(|i| start + (stop - start) * step(i))
            .collect()),
        "log" => {
            if start <= 0.0 || stop <= 0.0 {
                return Err(Error::input(format!(
                    "grid `{spec}`: log bounds must be positive"
                )));
            }
            let (a, b) = (start.ln(), stop.ln());
            Ok((0..count).map(|i| (a + (b - a) * step(i)).exp()).collect())
        }
        _ => Err(bad()),
    }
}

/// One row of the frequency response; `None` where `e^{i omega}` is a pole.
pub fn bode_point(sys: &SystemParams, omega: f64) -> Option<Complex64> {
    sys.transfer(Complex64::from_polar(1.0, omega)).ok()
}

fn cmd_bode(
    model: &str,
    grid: Option<&str>,
    omega: Option<Vec<f64>>,
    output: Option<&Path>,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let sys = load_model(model)?.params()?;
    let omegas = match (grid, omega) {
        (_, Some(w)) => w,
        (Some(g), None) => parse_grid(g)?,
        (None, None) => parse_grid(&format!("lin:0:{}:101", std::f64::consts::PI))?,
    };
    if omegas.iter().any(|w| !w.is_finite()) {
        return Err(input_failure("frequencies must be finite"));
    }
    let mut text = String::from("omega,magnitude,magnitude_db,phase_rad,status\n");
    for w in omegas {
        match bode_point(&sys, w) {
            Some(g) => text.push_str(&format!(
                "{w},{},{},{},ok\n",
                g.norm(),
                20.0 * g.norm().log10(),
                g.arg()
            )),
            None => text.push_str(&format!("{w},,,,pole\n")),
        }
    }
    match output {
        Some(p) => fs::write(p, text).map_err(Error::from)?,
        None => out.write_all(text.as_bytes()).map_err(Error::from)?,
    }
    Ok(())
}
