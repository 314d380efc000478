//! JSON-configured runs: solve, scan, bench and toy modes writing CSV and JSON
//! files into an output directory.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dirac::{assemble, exact_level, ChannelSpec};
use crate::error::{Error, Result};
use crate::gap::{
    all_levels, minmax_iterate, toy_laplacian_block, BlockOperator, SolveTrace, SolverOptions, DEFAULT_MAXIT,
    DEFAULT_TOL,
};
use crate::pollution::{pollution_report, PollutionReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Solve,
    Scan,
    Bench,
    Toy,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToySpec {
    pub n: usize,
    pub length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default)]
    pub e0: Option<f64>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_maxit")]
    pub maxit: usize,
    #[serde(default)]
    pub gap_edge: Option<f64>,
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

fn default_maxit() -> usize {
    DEFAULT_MAXIT
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            e0: None,
            tol: DEFAULT_TOL,
            maxit: DEFAULT_MAXIT,
            gap_edge: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub e_min: f64,
    pub e_max: f64,
    pub n_points: usize,
    pub kmax: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub gap: (f64, f64),
    pub k_max: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_formats() -> Vec<Format> {
    vec![Format::Csv, Format::Json]
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: default_dir(),
            formats: default_formats(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    #[serde(default)]
    pub channel: Option<ChannelSpec>,
    #[serde(default)]
    pub toy: Option<ToySpec>,
    #[serde(default)]
    pub targets: Vec<usize>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub scan: Option<ScanConfig>,
    #[serde(default)]
    pub bench: Option<BenchConfig>,
    #[serde(default)]
    pub output: OutputConfig,
    /// Only used to generate random test instances; solves are deterministic.
    #[serde(default)]
    pub seed: Option<u64>,
}

/// The operator a config describes, with its closed-form levels if known.
pub enum Problem {
    Channel(ChannelSpec),
    Toy(ToySpec),
}

impl Problem {
    pub fn operator(&self) -> Result<BlockOperator> {
        match self {
            Problem::Channel(spec) => assemble(spec),
            Problem::Toy(t) => toy_laplacian_block(t.n, t.length),
        }
    }

    pub fn exact(&self, k: usize) -> Option<f64> {
        match self {
            Problem::Channel(spec) => exact_level(spec, k),
            Problem::Toy(t) => toy_exact(t, k),
        }
    }

    /// Gap edge used when the config does not give one.
    fn default_gap_edge(&self) -> Option<f64> {
        match self {
            Problem::Channel(_) => Some(1.0),
            Problem::Toy(_) => None,
        }
    }
}

/// `(4/h²)·sin²(kπ/(2(n + 1)))`, the k-th eigenvalue of the second-difference
/// Laplacian.
fn toy_exact(t: &ToySpec, k: usize) -> Option<f64> {
    if k == 0 || k > t.n {
        return None;
    }
    let h = t.length / (t.n + 1) as f64;
    let theta = k as f64 * std::f64::consts::PI / (t.n + 1) as f64;
    Some(4.0 / (h * h) * (theta / 2.0).sin().powi(2))
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let cfg: RunConfig = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Physically questionable but accepted settings.
    pub fn warnings(&self) -> Vec<String> {
        self.channel.as_ref().map(ChannelSpec::warnings).unwrap_or_default()
    }

    pub fn problem(&self) -> Result<Problem> {
        match (self.mode, &self.channel, &self.toy) {
            (Mode::Toy, _, Some(t)) => Ok(Problem::Toy(*t)),
            (Mode::Toy, _, None) => Err(Error::InvalidConfig("toy mode needs a \"toy\" section".into())),
            (_, Some(_), Some(_)) => Err(Error::InvalidConfig(
                "give either \"channel\" or \"toy\", not both".into(),
            )),
            (_, Some(c), None) => Ok(Problem::Channel(c.clone())),
            (Mode::Bench, None, _) => Err(Error::InvalidConfig("bench mode needs a \"channel\" section".into())),
            (_, None, Some(t)) => Ok(Problem::Toy(*t)),
            (_, None, None) => Err(Error::InvalidConfig("missing \"channel\" or \"toy\" section".into())),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.into()));
        if !(self.solver.tol > 0.0) {
            return bad("solver.tol must be positive");
        }
        if self.solver.maxit == 0 {
            return bad("solver.maxit must be positive");
        }
        if self.output.formats.is_empty() {
            return bad("output.formats must name at least one format");
        }
        self.problem()?;
        match self.mode {
            Mode::Solve | Mode::Toy => {
                if self.targets.is_empty() {
                    return bad("targets must be nonempty");
                }
                if self.targets.contains(&0) {
                    return bad("targets are 1-based level indices");
                }
            }
            Mode::Scan => {
                let Some(s) = self.scan else {
                    return bad("scan mode needs a \"scan\" section");
                };
                if s.n_points < 2 || !(s.e_min < s.e_max) || s.kmax == 0 {
                    return bad("scan needs e_min < e_max, n_points >= 2 and kmax >= 1");
                }
            }
            Mode::Bench => {
                let Some(b) = &self.bench else {
                    return bad("bench mode needs a \"bench\" section");
                };
                if b.sizes.len() < 2 {
                    return bad("bench.sizes needs at least two sizes");
                }
                if !self.output.formats.contains(&Format::Json) {
                    return bad("bench output is JSON; add \"json\" to output.formats");
                }
            }
        }
        Ok(())
    }

    fn solver_options(&self, problem: &Problem) -> SolverOptions {
        SolverOptions {
            e0: self.solver.e0,
            tol: Some(self.solver.tol),
            maxit: Some(self.solver.maxit),
            gap_edge: self.solver.gap_edge.or_else(|| problem.default_gap_edge()),
        }
    }

    fn wants(&self, f: Format) -> bool {
        self.output.formats.contains(&f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub k: usize,
    pub lambda: f64,
    pub exact: Option<f64>,
    pub abs_error: Option<f64>,
    pub iterations: usize,
    pub residual: f64,
    pub multiplicity: usize,
}

/// Contents of `trace.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceFile {
    pub lambda0: f64,
    pub maxit: usize,
    pub traces: Vec<SolveTrace>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub e: f64,
    /// `None` where `E` is not above `λ₀`.
    pub levels: Option<Vec<f64>>,
}

/// What a run produced.
#[derive(Debug)]
pub struct RunOutput {
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub results: Vec<ResultRow>,
    pub traces: Vec<SolveTrace>,
    pub scan: Vec<ScanRow>,
    pub report: Option<PollutionReport>,
    pub warnings: Vec<String>,
}

/// Levels `ℓ₁ … ℓ_kmax` along an ascending grid of shifts. Rows at or below
/// `λ₀` have no levels. Each column changes sign once, at `λ_k`.
pub fn emit_scan(op: &BlockOperator, grid: &[f64], kmax: usize) -> Result<Vec<ScanRow>> {
    if kmax == 0 || kmax > op.n_plus() {
        return Err(Error::KTooLarge {
            k: kmax,
            max: op.n_plus(),
        });
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidConfig("scan grid must be strictly ascending".into()));
    }
    grid.iter()
        .map(|&e| {
            let levels = match all_levels(op, e) {
                Ok(mut l) => {
                    l.truncate(kmax);
                    Some(l)
                }
                Err(Error::ShiftBelowLambda0 { .. }) => None,
                Err(err) => return Err(err),
            };
            Ok(ScanRow { e, levels })
        })
        .collect()
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

/// Formats `x` like C's `%.17g`.
pub fn fmt_num(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..17).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (16 - exp).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, x)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt_num(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

fn solve_targets(cfg: &RunConfig, problem: &Problem, op: &BlockOperator) -> Result<(Vec<ResultRow>, Vec<SolveTrace>)> {
    let opts = cfg.solver_options(problem);
    let mut rows = Vec::new();
    let mut traces = Vec::new();
    for &k in &cfg.targets {
        let t = minmax_iterate(op, k, &opts)?;
        let exact = problem.exact(k);
        rows.push(ResultRow {
            k,
            lambda: t.lambda,
            exact,
            abs_error: exact.map(|x| (t.lambda - x).abs()),
            iterations: t.iterations(),
            residual: t.residual,
            multiplicity: t.multiplicity,
        });
        traces.push(t);
    }
    Ok((rows, traces))
}

fn write_results(path: &Path, rows: &[ResultRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["k", "lambda", "exact", "abs_error", "iterations", "residual", "multiplicity"])?;
    for r in rows {
        w.write_record([
            r.k.to_string(),
            fmt_num(r.lambda),
            opt_num(r.exact),
            opt_num(r.abs_error),
            r.iterations.to_string(),
            fmt_num(r.residual),
            r.multiplicity.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn write_scan(path: &Path, rows: &[ScanRow], kmax: usize) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let header: Vec<String> = std::iter::once("E".to_string())
        .chain((1..=kmax).map(|k| format!("l{k}")))
        .collect();
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![fmt_num(r.e)];
        match &r.levels {
            Some(l) => rec.extend(l.iter().map(|&x| fmt_num(x))),
            None => rec.extend(std::iter::repeat(String::new()).take(kmax)),
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n")?;
    Ok(())
}

/// Runs the configuration at `config_path`. `out` overrides `output.dir`.
///
/// Output files are written once all computation has finished. A solve that
/// exhausts `maxit` still writes its files and then reports
/// [`Error::NotConverged`].
pub fn run(config_path: &Path, out: Option<&Path>) -> Result<RunOutput> {
    let cfg = RunConfig::from_path(config_path)?;
    run_config(&cfg, out)
}

pub fn run_config(cfg: &RunConfig, out: Option<&Path>) -> Result<RunOutput> {
    cfg.validate()?;
    let problem = cfg.problem()?;
    let warnings = match &problem {
        Problem::Channel(spec) => spec.warnings(),
        Problem::Toy(_) => Vec::new(),
    };
    let dir = out.map(Path::to_path_buf).unwrap_or_else(|| cfg.output.dir.clone());
    let mut output = RunOutput {
        dir: dir.clone(),
        files: Vec::new(),
        results: Vec::new(),
        traces: Vec::new(),
        scan: Vec::new(),
        report: None,
        warnings,
    };

    let mut pending: Vec<(PathBuf, Box<dyn Fn(&Path) -> Result<()>>)> = Vec::new();
    match cfg.mode {
        Mode::Solve | Mode::Toy => {
            let op = problem.operator()?;
            let (rows, traces) = solve_targets(cfg, &problem, &op)?;
            if cfg.wants(Format::Csv) {
                let rows = rows.clone();
                pending.push((dir.join("results.csv"), Box::new(move |p| write_results(p, &rows))));
            }
            if cfg.wants(Format::Json) {
                let file = TraceFile {
                    lambda0: op.lambda0(),
                    maxit: cfg.solver.maxit,
                    traces: traces.clone(),
                };
                pending.push((dir.join("trace.json"), Box::new(move |p| write_json(p, &file))));
            }
            output.results = rows;
            output.traces = traces;
        }
        Mode::Scan => {
            let s = cfg.scan.expect("validated");
            let op = problem.operator()?;
            let rows = emit_scan(&op, &linspace(s.e_min, s.e_max, s.n_points), s.kmax)?;
            if cfg.wants(Format::Csv) {
                let rows = rows.clone();
                pending.push((dir.join("scan.csv"), Box::new(move |p| write_scan(p, &rows, s.kmax))));
            }
            if cfg.wants(Format::Json) {
                let rows = rows.clone();
                pending.push((dir.join("scan.json"), Box::new(move |p| write_json(p, &rows))));
            }
            output.scan = rows;
        }
        Mode::Bench => {
            let b = cfg.bench.as_ref().expect("validated");
            let Problem::Channel(spec) = &problem else {
                unreachable!("bench mode requires a channel");
            };
            let report = pollution_report(spec, &b.sizes, b.gap, b.k_max)?;
            let copy = report.clone();
            pending.push((dir.join("pollution.json"), Box::new(move |p| write_json(p, &copy))));
            output.report = Some(report);
        }
    }

    fs::create_dir_all(&dir)?;
    for (path, write) in pending {
        write(&path)?;
        output.files.push(path);
    }

    if let Some(t) = output.traces.iter().find(|t| !t.converged) {
        return Err(Error::NotConverged {
            k: t.k,
            iterations: t.iterations(),
            residual: t.residual,
        });
    }
    Ok(output)
}

/// Re-runs every solve recorded in a `trace.json` from its starting shift and
/// returns `(recorded, replayed)` final values per trace.
pub fn replay_traces(cfg: &RunConfig, trace: &TraceFile) -> Result<Vec<(f64, f64)>> {
    let problem = cfg.problem()?;
    let op = problem.operator()?;
    let base = cfg.solver_options(&problem);
    trace
        .traces
        .iter()
        .map(|t| {
            let e0 = t
                .iterates
                .first()
                .ok_or_else(|| Error::InvalidConfig("trace without iterates".into()))?
                .e;
            let opts = SolverOptions {
                e0: Some(e0),
                tol: Some(t.tol),
                maxit: Some(trace.maxit),
                gap_edge: base.gap_edge,
            };
            let again = minmax_iterate(&op, t.k, &opts)?;
            Ok((t.lambda, again.lambda))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SymMatrix;
    use nalgebra::DMatrix;

    #[test]
    fn number_formatting() {
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(0.5), "0.5");
        assert_eq!(fmt_num(2f64.sqrt()), "1.4142135623730951");
        assert_eq!(fmt_num(1e-20), "9.9999999999999995e-21");
        assert_eq!(fmt_num(0.1), "0.10000000000000001");
        assert_eq!(fmt_num(-2.5e-7), "-2.4999999999999999e-07");
        assert_eq!(fmt_num(123456.0), "123456");
        for x in [0.1, 1.0 / 3.0, 0.8660254037844386, 1e-13, 6.02e23] {
            assert_eq!(fmt_num(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn scalar_scan() {
        let op = BlockOperator::orthonormal(
            SymMatrix::from_diagonal(&[1.0]),
            DMatrix::from_element(1, 1, 1.0),
            SymMatrix::from_diagonal(&[-1.0]),
        )
        .unwrap();
        let rows = emit_scan(&op, &[-1.5, 0.5, 1.0, 1.5], 1).unwrap();
        assert_eq!(rows[0].levels, None);
        let l: Vec<f64> = rows[1..].iter().map(|r| r.levels.as_ref().unwrap()[0]).collect();
        assert!((l[0] - 0.807_692_307_7).abs() < 1e-9);
        assert!((l[1] - 0.4).abs() < 1e-15);
        // (−0.5 + 0.4) / 1.16
        assert!((l[2] + 0.1 / 1.16).abs() < 1e-15);
        assert!(emit_scan(&op, &[1.0, 0.5], 1).is_err());
        assert!(emit_scan(&op, &[1.0], 2).is_err());
    }

    #[test]
    fn decoupled_scan_is_linear() {
        let op = BlockOperator::orthonormal(
            SymMatrix::from_diagonal(&[1.0, 2.0]),
            DMatrix::zeros(2, 1),
            SymMatrix::from_diagonal(&[-1.0]),
        )
        .unwrap();
        for r in emit_scan(&op, &linspace(-0.5, 3.0, 8), 2).unwrap() {
            let l = r.levels.unwrap();
            assert!((l[0] - (1.0 - r.e)).abs() < 1e-14);
            assert!((l[1] - (2.0 - r.e)).abs() < 1e-14);
        }
    }

    #[test]
    fn config_parsing_and_validation() {
        let ok: RunConfig = serde_json::from_str(r#"{"mode":"toy","toy":{"n":3,"length":3.14159265},"targets":[1]}"#).unwrap();
        ok.validate().unwrap();
        assert!(serde_json::from_str::<RunConfig>(r#"{"toy":{"n":3,"length":1},"targets":[1]}"#).is_err());
        let no_targets: RunConfig = serde_json::from_str(r#"{"mode":"toy","toy":{"n":3,"length":1}}"#).unwrap();
        assert!(matches!(no_targets.validate(), Err(Error::InvalidConfig(_))));
        let bad_tol: RunConfig =
            serde_json::from_str(r#"{"mode":"toy","toy":{"n":3,"length":1},"targets":[1],"solver":{"tol":0}}"#).unwrap();
        assert!(bad_tol.validate().is_err());
        let no_scan: RunConfig = serde_json::from_str(r#"{"mode":"scan","toy":{"n":3,"length":1}}"#).unwrap();
        assert!(no_scan.validate().is_err());
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn toy_closed_form() {
        let t = ToySpec { n: 3, length: 3.14159265 };
        assert!((toy_exact(&t, 1).unwrap() - 0.949_641_205_722).abs() < 1e-11);
        assert!((toy_exact(&t, 3).unwrap() - 5.534_914_562_207).abs() < 1e-11);
        assert_eq!(toy_exact(&t, 4), None);
    }
}
