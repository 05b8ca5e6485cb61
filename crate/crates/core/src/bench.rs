//! Seeded success-rate experiments over planted instances, CSV output and
//! log-linear scaling fits.
//!
//! An experiment is a grid of cells `(n, k, m, t)`. Each cell draws
//! `trials` planted instances and runs `iterations` independent single
//! attempts of the measured procedure on each. The success rate is pooled
//! over all attempts and `mean_iterations` is attempts per success.
//!
//! | algorithm | one attempt                                  | theory column            |
//! |-----------|----------------------------------------------|--------------------------|
//! | `branch`  | one branching pass on the planted instance   | `(2/3)^r`, `r = n − t`   |
//! | `ppz`     | one PPZ pass, success if the output is in `A` | `2^{−n+n/k} / n^2`       |
//! | `pafdeg`  | one degree reduction with `l` combinations on a planted degree-`k` system; success if the planted point survives | `(1 − 2^{−l})^m` |

use std::path::PathBuf;
use std::str::FromStr;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::formula::to_affine_clause_form;
use crate::reductions::{planted_instance, planted_paf};
use crate::rng::{derive_seed, trial_rng, SolverRng};
use crate::solvers::{branch_iteration, ppz::Ppz, reduce_degree};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BenchError {
    #[error("line {line}: {message}")]
    Spec { line: usize, message: String },
    #[error("trials must be at least 1")]
    ZeroTrials,
    #[error("iterations must be at least 1")]
    ZeroIterations,
    #[error("parameter grid is empty")]
    EmptyGrid,
    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),
}

fn spec_error(line: usize, message: impl Into<String>) -> BenchError {
    BenchError::Spec {
        line,
        message: message.into(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Measure {
    Branch,
    Ppz,
    PafDegree,
}

impl Measure {
    pub fn id(self) -> &'static str {
        match self {
            Measure::Branch => "branch",
            Measure::Ppz => "ppz",
            Measure::PafDegree => "pafdeg",
        }
    }
}

impl FromStr for Measure {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "branch" => Ok(Measure::Branch),
            "ppz" => Ok(Measure::Ppz),
            "pafdeg" => Ok(Measure::PafDegree),
            _ => Err(format!("unknown algorithm `{s}` (expected branch, ppz or pafdeg)")),
        }
    }
}

/// One grid point. For `pafdeg`, `k` is the number of factors per equation
/// and `t` is unused.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellParams {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub t: usize,
}

impl CellParams {
    pub fn r(&self) -> usize {
        self.n - self.t
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Experiment {
    pub algorithm: Measure,
    pub grid: Vec<CellParams>,
    /// Planted instances per cell.
    pub trials: usize,
    /// Attempts per instance.
    pub iterations: u64,
    /// Require a unique solution (`branch` and `ppz`).
    pub unique: bool,
    /// Combinations per equation (`pafdeg`).
    pub l: usize,
    pub seed: u64,
    /// Record wall time; otherwise the column reads `NA`.
    pub timing: bool,
    pub output: Option<PathBuf>,
}

impl Experiment {
    pub fn new(algorithm: Measure, grid: Vec<CellParams>, trials: usize, iterations: u64) -> Result<Self, BenchError> {
        let e = Self {
            algorithm,
            grid,
            trials,
            iterations,
            unique: false,
            l: 2,
            seed: 0,
            timing: false,
            output: None,
        };
        e.validate()?;
        Ok(e)
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.trials == 0 {
            return Err(BenchError::ZeroTrials);
        }
        if self.iterations == 0 {
            return Err(BenchError::ZeroIterations);
        }
        if self.grid.is_empty() {
            return Err(BenchError::EmptyGrid);
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellResult {
    pub params: CellParams,
    pub trials: usize,
    pub attempts: u64,
    pub successes: u64,
    pub median_wall: Option<Duration>,
    pub theory: f64,
    pub error: Option<String>,
}

impl CellResult {
    pub fn success_rate(&self) -> f64 {
        if self.attempts == 0 {
            return 0.0;
        }
        self.successes as f64 / self.attempts as f64
    }

    /// Binomial standard error of the success rate.
    pub fn std_error(&self) -> f64 {
        if self.attempts == 0 {
            return 0.0;
        }
        let p = self.success_rate();
        (p * (1.0 - p) / self.attempts as f64).sqrt()
    }

    /// Attempts per success; `None` without successes.
    pub fn mean_iterations(&self) -> Option<f64> {
        (self.successes > 0).then(|| self.attempts as f64 / self.successes as f64)
    }
}

/// Success bound per attempt for the given cell.
pub fn theory(algorithm: Measure, p: &CellParams, l: usize) -> f64 {
    match algorithm {
        Measure::Branch => (2.0f64 / 3.0).powi(p.r() as i32),
        Measure::Ppz => {
            let (n, k) = (p.n as f64, p.k.max(1) as f64);
            (-n + n / k).exp2() / (n * n).max(1.0)
        }
        Measure::PafDegree => (1.0 - 0.5f64.powi(l as i32)).powi(p.m as i32),
    }
}

/// Runs every cell; trial `j` of cell `i` uses stream `j` under
/// `derive_seed(seed, i)`. Rows come back sorted by parameters.
pub fn run_experiment(e: &Experiment) -> Result<Vec<CellResult>, BenchError> {
    e.validate()?;
    let mut rows: Vec<CellResult> = e
        .grid
        .iter()
        .enumerate()
        .map(|(i, p)| run_cell(e, p, derive_seed(e.seed, i as u64)))
        .collect();
    rows.sort_by_key(|c| c.params);
    Ok(rows)
}

fn run_cell(e: &Experiment, p: &CellParams, seed: u64) -> CellResult {
    let mut result = CellResult {
        params: *p,
        trials: e.trials,
        attempts: 0,
        successes: 0,
        median_wall: None,
        theory: theory(e.algorithm, p, e.l),
        error: None,
    };
    let mut walls = Vec::with_capacity(e.trials);
    for trial in 0..e.trials {
        let mut rng = trial_rng(seed, trial as u64);
        let start = Instant::now();
        match run_trial(e, p, &mut rng) {
            Ok(s) => {
                result.attempts += e.iterations;
                result.successes += s;
            }
            Err(msg) => {
                result.error = Some(msg);
                return result;
            }
        }
        walls.push(start.elapsed());
    }
    if e.timing {
        walls.sort();
        result.median_wall = walls.get(walls.len() / 2).copied();
    }
    result
}

fn run_trial(e: &Experiment, p: &CellParams, rng: &mut SolverRng) -> Result<u64, String> {
    let mut successes = 0;
    match e.algorithm {
        Measure::Branch => {
            let inst = planted_instance(p.n, p.k, p.m, p.t, rng, e.unique).map_err(|x| x.to_string())?;
            let view = to_affine_clause_form(&inst.instance).map_err(|x| x.to_string())?;
            for _ in 0..e.iterations {
                if branch_iteration(&view.psi, p.k, rng)
                    .map_err(|x| x.to_string())?
                    .is_some()
                {
                    successes += 1;
                }
            }
        }
        Measure::Ppz => {
            let inst = planted_instance(p.n, p.k, p.m, p.t, rng, e.unique).map_err(|x| x.to_string())?;
            let space = inst.instance.space().expect("planted instances are satisfiable");
            let mut ppz = Ppz::new(inst.instance.phi());
            for _ in 0..e.iterations {
                if ppz.iterate(rng).is_some_and(|x| space.contains(&x)) {
                    successes += 1;
                }
            }
        }
        Measure::PafDegree => {
            let planted = planted_paf(p.n, p.m, p.k, rng).map_err(|x| x.to_string())?;
            for _ in 0..e.iterations {
                if reduce_degree(&planted.paf, e.l, rng).is_solution(&planted.planted) {
                    successes += 1;
                }
            }
        }
    }
    Ok(successes)
}

pub const CSV_HEADER: &str =
    "algorithm,n,k,m,t,r,trials,attempts,successes,success_rate,std_error,mean_iterations,median_wall_ms,theory,error";

/// CSV with a header row, LF line endings, `NA` for missing values.
pub fn to_csv(algorithm: Measure, rows: &[CellResult]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for c in rows {
        let p = &c.params;
        let mean = c.mean_iterations().map_or("NA".into(), |v| v.to_string());
        let wall = c
            .median_wall
            .map_or("NA".into(), |d| format!("{:.3}", d.as_secs_f64() * 1e3));
        let error = c.error.as_deref().unwrap_or("").replace([',', '\n'], " ");
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            algorithm.id(),
            p.n,
            p.k,
            p.m,
            p.t,
            p.r(),
            c.trials,
            c.attempts,
            c.successes,
            c.success_rate(),
            c.std_error(),
            mean,
            wall,
            c.theory,
            error
        ));
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    /// `base^slope`.
    pub growth_ratio: f64,
    pub residuals: Vec<f64>,
}

/// Least-squares line through `(x, log_base y)`.
pub fn scaling_fit(points: &[(f64, f64)], base: f64) -> Result<ScalingFit, BenchError> {
    if points.len() < 3 {
        return Err(BenchError::DegenerateGrid(format!(
            "{} cells, need at least 3",
            points.len()
        )));
    }
    if base.is_nan() || base <= 1.0 {
        return Err(BenchError::DegenerateGrid(format!("base {base}")));
    }
    if let Some(&(x, y)) = points.iter().find(|(_, y)| !(*y > 0.0 && y.is_finite())) {
        return Err(BenchError::DegenerateGrid(format!("value {y} at {x}")));
    }
    let ys: Vec<f64> = points.iter().map(|&(_, y)| y.ln() / base.ln()).collect();
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(BenchError::DegenerateGrid("parameter does not vary".into()));
    }
    let sxy: f64 = points.iter().zip(&ys).map(|(p, y)| (p.0 - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals = points
        .iter()
        .zip(&ys)
        .map(|(p, y)| y - (intercept + slope * p.0))
        .collect();
    Ok(ScalingFit {
        slope,
        intercept,
        growth_ratio: base.powf(slope),
        residuals,
    })
}

/// Fits `log_base(mean_iterations)` against `axis(params)` over result rows.
pub fn fit_rows(rows: &[CellResult], axis: impl Fn(&CellParams) -> usize, base: f64) -> Result<ScalingFit, BenchError> {
    let points = rows
        .iter()
        .map(|c| {
            c.mean_iterations()
                .map(|m| (axis(&c.params) as f64, m))
                .ok_or_else(|| BenchError::DegenerateGrid(format!("no successes at {:?}", c.params)))
        })
        .collect::<Result<Vec<_>, _>>()?;
    scaling_fit(&points, base)
}

/// `10,12,14`, `10..16` or `10..16:2` (inclusive).
fn parse_list(value: &str, line: usize) -> Result<Vec<usize>, BenchError> {
    let num = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| spec_error(line, format!("expected a number, found `{s}`")))
    };
    if let Some((lo, rest)) = value.split_once("..") {
        let (hi, step) = match rest.split_once(':') {
            Some((hi, step)) => (num(hi)?, num(step)?),
            None => (num(rest)?, 1),
        };
        if step == 0 {
            return Err(spec_error(line, "step 0"));
        }
        return Ok((num(lo)?..=hi).step_by(step).collect());
    }
    value.split(',').map(num).collect()
}

/// Parses a flat `key = value` experiment description.
///
/// Keys: `algorithm`, `k`, `n` or `n_per_r`, `t` or `r`, `m` or `m_per_n`,
/// `trials`, `iterations`, `seed`, `unique`, `l`, `timing`, `output`.
/// Grid keys take lists or inclusive ranges; the grid is their product.
/// Lines starting with `#` are comments.
pub fn parse_experiment(text: &str) -> Result<Experiment, BenchError> {
    let mut algorithm = None;
    let mut lists: std::collections::BTreeMap<&str, Vec<usize>> = Default::default();
    let (mut n_per_r, mut m_per_n) = (None, None);
    let (mut trials, mut iterations, mut seed, mut l) = (1usize, 1u64, 0u64, 2usize);
    let (mut unique, mut timing, mut output) = (false, false, None);
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let raw = raw.split_once('#').map_or(raw, |(before, _)| before).trim();
        if raw.is_empty() {
            continue;
        }
        let (key, value) = raw
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| spec_error(line, "expected `key = value`"))?;
        let int = |v: &str| {
            v.parse::<u64>()
                .map_err(|_| spec_error(line, format!("expected an integer, found `{v}`")))
        };
        let flag = |v: &str| match v {
            "true" | "1" | "yes" => Ok(true),
            "false" | "0" | "no" => Ok(false),
            _ => Err(spec_error(line, format!("expected a boolean, found `{v}`"))),
        };
        match key {
            "algorithm" => algorithm = Some(value.parse::<Measure>().map_err(|m| spec_error(line, m))?),
            "n" | "k" | "m" | "t" | "r" => {
                lists.insert(
                    match key {
                        "n" => "n",
                        "k" => "k",
                        "m" => "m",
                        "t" => "t",
                        _ => "r",
                    },
                    parse_list(value, line)?,
                );
            }
            "n_per_r" => n_per_r = Some(int(value)? as usize),
            "m_per_n" => {
                m_per_n = Some(
                    value
                        .parse::<f64>()
                        .ok()
                        .filter(|v| *v >= 0.0)
                        .ok_or_else(|| spec_error(line, format!("expected a ratio, found `{value}`")))?,
                )
            }
            "trials" => trials = int(value)? as usize,
            "iterations" => iterations = int(value)?,
            "seed" => seed = int(value)?,
            "l" => l = int(value)? as usize,
            "unique" => unique = flag(value)?,
            "timing" => timing = flag(value)?,
            "output" => output = Some(PathBuf::from(value)),
            _ => return Err(spec_error(line, format!("unknown key `{key}`"))),
        }
    }
    let algorithm = algorithm.ok_or_else(|| spec_error(0, "missing `algorithm`"))?;
    let ks = lists.get("k").cloned().unwrap_or_else(|| vec![3]);
    let ts = lists.get("t");
    let rs = lists.get("r");
    if ts.is_some() && rs.is_some() {
        return Err(spec_error(0, "give either `t` or `r`"));
    }
    if lists.contains_key("n") == n_per_r.is_some() {
        return Err(spec_error(0, "give exactly one of `n` and `n_per_r`"));
    }
    if lists.contains_key("m") && m_per_n.is_some() {
        return Err(spec_error(0, "give either `m` or `m_per_n`"));
    }
    // (n, t) pairs
    let mut shapes = Vec::new();
    match (lists.get("n"), rs) {
        (Some(ns), Some(rs)) => {
            for &n in ns {
                for &r in rs {
                    if r <= n {
                        shapes.push((n, n - r));
                    }
                }
            }
        }
        (Some(ns), None) => {
            for &n in ns {
                for &t in ts.cloned().unwrap_or_else(|| vec![0]).iter() {
                    shapes.push((n, t));
                }
            }
        }
        (None, _) => {
            let rs = rs.ok_or_else(|| spec_error(0, "`n_per_r` requires `r`"))?;
            let f = n_per_r.expect("checked above");
            for &r in rs {
                shapes.push((f * r, f * r - r));
            }
        }
    }
    let mut grid = Vec::new();
    for &(n, t) in &shapes {
        for &k in &ks {
            let ms = match (lists.get("m"), m_per_n) {
                (Some(ms), _) => ms.clone(),
                (None, Some(ratio)) => vec![(ratio * n as f64).round() as usize],
                (None, None) => vec![2 * n],
            };
            for m in ms {
                grid.push(CellParams { n, k, m, t });
            }
        }
    }
    let e = Experiment {
        algorithm,
        grid,
        trials,
        iterations,
        unique,
        l,
        seed,
        timing,
        output,
    };
    e.validate()?;
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Experiment {
        let grid = (2..=4)
            .map(|r| CellParams {
                n: 2 * r,
                k: 2,
                m: 4 * r,
                t: r,
            })
            .collect();
        Experiment::new(Measure::Branch, grid, 3, 20).unwrap()
    }

    #[test]
    fn zero_trials_rejected() {
        let grid = vec![CellParams { n: 4, k: 2, m: 4, t: 0 }];
        assert_eq!(
            Experiment::new(Measure::Branch, grid, 0, 1),
            Err(BenchError::ZeroTrials)
        );
        assert_eq!(
            Experiment::new(Measure::Branch, vec![], 1, 1),
            Err(BenchError::EmptyGrid)
        );
    }

    #[test]
    fn same_seed_same_csv() {
        let e = small();
        let a = to_csv(e.algorithm, &run_experiment(&e).unwrap());
        let b = to_csv(e.algorithm, &run_experiment(&e).unwrap());
        assert_eq!(a, b);
        assert!(a.starts_with(CSV_HEADER));
        assert_eq!(a.lines().count(), 4);
        assert!(a.lines().skip(1).all(|l| l.contains(",NA,")));
    }

    #[test]
    fn rows_are_sorted() {
        let mut e = small();
        e.grid.reverse();
        let rows = run_experiment(&e).unwrap();
        assert!(rows.windows(2).all(|w| w[0].params < w[1].params));
    }

    #[test]
    fn cell_errors_are_recorded() {
        let grid = vec![CellParams {
            n: 40,
            k: 3,
            m: 10,
            t: 0,
        }];
        let mut e = Experiment::new(Measure::Ppz, grid, 1, 1).unwrap();
        e.unique = true;
        let rows = run_experiment(&e).unwrap();
        assert!(rows[0].error.is_some());
        assert!(to_csv(e.algorithm, &rows).contains("unique solution"));
    }

    #[test]
    fn constant_series_has_zero_slope() {
        let fit = scaling_fit(&[(1.0, 8.0), (2.0, 8.0), (3.0, 8.0)], 2.0).unwrap();
        assert_eq!(fit.slope, 0.0);
        assert_eq!(fit.growth_ratio, 1.0);
        assert!(fit.residuals.iter().all(|r| r.abs() < 1e-12));
    }

    #[test]
    fn exact_exponential_is_recovered() {
        let pts: Vec<(f64, f64)> = (10..=16).map(|r| (r as f64, 1.5f64.powi(r))).collect();
        let fit = scaling_fit(&pts, 2.0).unwrap();
        assert!((fit.slope - 1.5f64.log2()).abs() < 1e-12);
        assert!((fit.growth_ratio - 1.5).abs() < 1e-12);
    }

    #[test]
    fn degenerate_fits_rejected() {
        assert!(scaling_fit(&[(1.0, 2.0), (2.0, 4.0)], 2.0).is_err());
        assert!(scaling_fit(&[(1.0, 2.0), (1.0, 4.0), (1.0, 8.0)], 2.0).is_err());
        assert!(scaling_fit(&[(1.0, 2.0), (2.0, 0.0), (3.0, 8.0)], 2.0).is_err());
    }

    #[test]
    fn spec_file() {
        let e = parse_experiment(
            "# branch scaling\nalgorithm = branch\nk = 2 # width\nr = 10..16:2\nn_per_r = 4\nm_per_n = 2\ntrials = 5\niterations = 100\nseed = 9\n",
        )
        .unwrap();
        assert_eq!(e.grid.len(), 4);
        assert_eq!(
            e.grid[0],
            CellParams {
                n: 40,
                k: 2,
                m: 80,
                t: 30
            }
        );
        assert_eq!((e.trials, e.iterations, e.seed), (5, 100, 9));
        let e = parse_experiment("algorithm = ppz\nn = 12,14\nk = 3\nm = 60\n").unwrap();
        assert_eq!(
            e.grid[1],
            CellParams {
                n: 14,
                k: 3,
                m: 60,
                t: 0
            }
        );
        assert!(matches!(
            parse_experiment("algorithm = x\n"),
            Err(BenchError::Spec { line: 1, .. })
        ));
        assert!(matches!(
            parse_experiment("algorithm = ppz\nn = 4\ntrials = 0\n"),
            Err(BenchError::ZeroTrials)
        ));
        assert!(matches!(
            parse_experiment("algorithm = ppz\nbogus\n"),
            Err(BenchError::Spec { line: 2, .. })
        ));
    }

    #[test]
    fn theory_columns() {
        let p = CellParams {
            n: 20,
            k: 2,
            m: 40,
            t: 10,
        };
        assert!((theory(Measure::Branch, &p, 2) - (2.0f64 / 3.0).powi(10)).abs() < 1e-15);
        let q = CellParams {
            n: 12,
            k: 3,
            m: 24,
            t: 0,
        };
        assert_eq!(theory(Measure::Ppz, &q, 2), 2f64.powi(-8) / 144.0);
        assert_eq!(theory(Measure::PafDegree, &q, 2), 0.75f64.powi(24));
    }
}
