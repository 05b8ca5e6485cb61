//! Command-line front end: solving, reductions, generators, maximization
//! and experiments.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use thiserror::Error;

use subsat::bench::{fit_rows, parse_experiment, run_experiment, to_csv, BenchError};
use subsat::formula::{paf_to_subsat_instance, subsat_to_paf, PafInstance};
use subsat::io::{
    format_witness, parse_dimacs_xor, parse_graph, parse_linear, parse_oxr, parse_partition, serialize_dimacs_xor,
    ParseError,
};
use subsat::maxsat::{approx_max_derand, approx_max_random, satisfiable_threequarters, MaxResult, MaxSatError};
use subsat::reductions::{
    four_coloring_to_2paf, maxlin2_to_e2paf, multicolored_clique_to_2subsat, oxr_to_2paf, planted_instance,
    PartitionedGraph, ReductionError,
};
use subsat::rng::seeded;
use subsat::solvers::{
    affine_extender, brute_force, ppz_solve_in, solve_2subsat_det, solve_branch, solve_codim_pluck,
    solve_oblivious_pluck, solve_paf_degree_reduction, BruteForcePaf, SolveError, SolveStats,
};
use subsat::{BitVec, SolveResult, SolverBudget, SubSatInstance, Verdict};

pub const EXIT_SAT: i32 = 10;
pub const EXIT_UNSAT: i32 = 20;
pub const EXIT_UNKNOWN: i32 = 30;
pub const EXIT_ERROR: i32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    MaxSat(#[from] MaxSatError),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error(transparent)]
    Bench(#[from] BenchError),
    #[error("{0}")]
    Usage(String),
}

#[derive(Parser, Debug)]
#[command(
    name = "subsat",
    version,
    about = "CNF satisfiability inside affine subspaces of GF(2)^n"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide a DIMACS-XOR instance.
    Solve(SolveArgs),
    /// Maximize the number of satisfied clauses inside A.
    Maxsat(SolveArgs),
    /// Emit the DIMACS-XOR encoding of a reduction.
    Reduce(ReduceArgs),
    /// Generate a planted instance.
    Gen(GenArgs),
    /// Run an experiment and write CSV.
    Bench(BenchArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    Brute,
    Ppz,
    Codim,
    Pluck,
    Branch,
    Det2,
    Pafdeg,
    MaxRand,
    MaxDerand,
    MaxSat34,
}

impl Algorithm {
    pub fn id(self) -> &'static str {
        match self {
            Algorithm::Brute => "brute",
            Algorithm::Ppz => "ppz",
            Algorithm::Codim => "codim",
            Algorithm::Pluck => "pluck",
            Algorithm::Branch => "branch",
            Algorithm::Det2 => "det2",
            Algorithm::Pafdeg => "pafdeg",
            Algorithm::MaxRand => "max-rand",
            Algorithm::MaxDerand => "max-derand",
            Algorithm::MaxSat34 => "max-sat34",
        }
    }

    fn is_max(self) -> bool {
        matches!(self, Algorithm::MaxRand | Algorithm::MaxDerand | Algorithm::MaxSat34)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Human,
    JsonLines,
}

/// Everything `solve` and `maxsat` need besides the input text.
#[derive(Args, Clone, Debug)]
pub struct RunConfig {
    #[arg(long, value_enum, default_value = "brute")]
    pub algo: Algorithm,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.01)]
    pub delta: f64,
    #[arg(long = "max-iters")]
    pub max_iters: Option<u64>,
    #[arg(long, default_value_t = 0.5)]
    pub nu: f64,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    /// Equation density bound `m ≤ c·n` for `pafdeg`.
    #[arg(long, default_value_t = 2.0)]
    pub density: f64,
    #[arg(long, value_enum, default_value = "human")]
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            algo: Algorithm::Brute,
            seed: 0,
            delta: 0.01,
            max_iters: None,
            nu: 0.5,
            beta: 1.0,
            density: 2.0,
            format: Format::Human,
        }
    }
}

impl RunConfig {
    pub fn budget(&self) -> SolverBudget {
        SolverBudget {
            delta: self.delta,
            max_iterations: self.max_iters,
            seed: self.seed,
            nu: self.nu,
            beta: self.beta,
            density: self.density,
        }
    }
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    /// DIMACS-XOR input file.
    pub input: PathBuf,
    #[command(flatten)]
    pub config: RunConfig,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Reduction {
    /// Edge list to the 4-coloring product system.
    FourColoring,
    /// Edge list and partition to the multicolored-clique instance.
    Clique,
    /// `p oxr` constraint list to its product system.
    Oxr,
    /// `p lin` equation list to the pairwise product system.
    Maxlin2,
}

#[derive(Args, Debug)]
pub struct ReduceArgs {
    #[arg(value_enum)]
    pub kind: Reduction,
    pub input: PathBuf,
    /// Partition file for `clique`.
    #[arg(long)]
    pub partition: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    /// Planted parameters `n=.. k=.. t=.. [m=..]`; `m` defaults to `2n`.
    #[arg(long, num_args = 1.., required = true)]
    pub planted: Vec<String>,
    /// Reject until the instance has exactly one solution.
    #[arg(long)]
    pub unique: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Experiment file of `key = value` lines.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Extra `key=value` settings, applied after the file.
    #[arg(long = "set")]
    pub set: Vec<String>,
    /// Report a log2 scaling fit of mean iterations against `r` or `n` on stderr.
    #[arg(long)]
    pub fit: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A solver verdict together with what is printed for it.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub algo: Algorithm,
    pub result: SolveResult,
    pub max: Option<(usize, MaxResult)>,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        match self.result.verdict {
            Verdict::Sat(_) => EXIT_SAT,
            Verdict::Unsat => EXIT_UNSAT,
            Verdict::Unknown => EXIT_UNKNOWN,
        }
    }

    /// The report body, free of timing so that fixed-seed runs are
    /// byte-identical.
    pub fn render(&self, format: Format) -> String {
        let stats = &self.result.stats;
        let verdict = &self.result.verdict;
        match format {
            Format::Human => {
                let mut out = format!(
                    "c algo={} seed={} iterations={}\n",
                    self.algo.id(),
                    stats.seed,
                    stats.iterations
                );
                if let Some((m, r)) = &self.max {
                    out.push_str(&format!("c clauses={m} satisfied={} bound={}\n", r.satisfied, r.bound));
                    out.push_str(&format!("o {}\n", m - r.satisfied));
                }
                out.push_str(&format!("s {}\n", verdict.label()));
                let witness = verdict.witness().or(self.max.as_ref().map(|(_, r)| &r.assignment));
                if let Some(x) = witness {
                    out.push_str(&format_witness(x));
                    out.push('\n');
                }
                out
            }
            Format::JsonLines => {
                let lits = |x: &BitVec| -> Vec<i64> {
                    (0..x.len())
                        .map(|i| if x.get(i) { i as i64 + 1 } else { -(i as i64 + 1) })
                        .collect()
                };
                let mut v = json!({
                    "algo": self.algo.id(),
                    "seed": stats.seed,
                    "iterations": stats.iterations,
                    "status": verdict.label(),
                    "witness": verdict.witness().map(lits),
                });
                if let Some((m, r)) = &self.max {
                    v["clauses"] = json!(m);
                    v["satisfied"] = json!(r.satisfied);
                    v["bound"] = json!(r.bound);
                    v["assignment"] = json!(lits(&r.assignment));
                }
                format!("{v}\n")
            }
        }
    }
}

/// Runs one algorithm on a parsed instance.
pub fn solve_instance(inst: &SubSatInstance, config: &RunConfig) -> Result<Report, CliError> {
    let budget = config.budget();
    budget.validate()?;
    let algo = config.algo;
    if algo.is_max() {
        return maximize(inst, config);
    }
    let result = match algo {
        Algorithm::Brute => brute_force(inst)?,
        Algorithm::Ppz => ppz_solve_in(inst, &budget)?,
        Algorithm::Codim => solve_codim_pluck(inst, &budget)?,
        Algorithm::Pluck => match inst.space() {
            Some(a) => solve_oblivious_pluck(inst.phi(), &affine_extender(a.clone()), &budget)?,
            None => unknown(config.seed),
        },
        Algorithm::Branch => solve_branch(inst, &budget)?,
        Algorithm::Det2 => solve_2subsat_det(inst)?,
        Algorithm::Pafdeg => {
            let paf = subsat_to_paf(inst);
            let r = solve_paf_degree_reduction(&paf, &budget, &mut BruteForcePaf::default())?;
            if r.witness().is_some_and(|x| !inst.is_solution(x)) {
                return Err(SolveError::WitnessRejected.into());
            }
            r
        }
        _ => unreachable!("maximization handled above"),
    };
    Ok(Report {
        algo,
        result,
        max: None,
    })
}

fn unknown(seed: u64) -> SolveResult {
    SolveResult {
        verdict: Verdict::Unknown,
        stats: SolveStats {
            iterations: 0,
            elapsed: Default::default(),
            seed,
        },
    }
}

/// Maximization; the verdict is `Sat` when every clause is satisfied and
/// `Unknown` otherwise.
pub fn maximize(inst: &SubSatInstance, config: &RunConfig) -> Result<Report, CliError> {
    let start = Instant::now();
    let r = match config.algo {
        Algorithm::MaxRand => approx_max_random(inst, &mut seeded(config.seed))?,
        Algorithm::MaxDerand => approx_max_derand(inst)?,
        Algorithm::MaxSat34 => satisfiable_threequarters(inst)?,
        other => {
            return Err(CliError::Usage(format!(
                "`{}` is not a maximization algorithm",
                other.id()
            )))
        }
    };
    let m = inst.phi().len();
    let verdict = if inst.is_solution(&r.assignment) {
        Verdict::Sat(r.assignment.clone())
    } else {
        Verdict::Unknown
    };
    Ok(Report {
        algo: config.algo,
        result: SolveResult {
            verdict,
            stats: SolveStats {
                iterations: 1,
                elapsed: start.elapsed(),
                seed: config.seed,
            },
        },
        max: Some((m, r)),
    })
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn parsed<T>(path: &Path, r: Result<T, ParseError>) -> Result<T, CliError> {
    r.map_err(|source| CliError::Parse {
        path: path.to_owned(),
        source,
    })
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
            path: path.to_owned(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

pub fn load_instance(path: &Path) -> Result<SubSatInstance, CliError> {
    let text = read(path)?;
    parsed(path, parse_dimacs_xor(&text))
}

fn solve_command(args: &SolveArgs, force_max: bool) -> Result<i32, CliError> {
    let inst = load_instance(&args.input)?;
    if force_max && !args.config.algo.is_max() {
        return Err(CliError::Usage(format!(
            "maxsat expects max-rand, max-derand or max-sat34, not `{}`",
            args.config.algo.id()
        )));
    }
    let start = Instant::now();
    let report = solve_instance(&inst, &args.config)?;
    eprintln!("c wall_ms={:.3}", start.elapsed().as_secs_f64() * 1e3);
    emit(args.out.as_deref(), &report.render(args.config.format))?;
    Ok(if force_max { 0 } else { report.exit_code() })
}

/// The DIMACS-XOR encoding of a reduction's output.
pub fn reduce_to_instance(kind: Reduction, input: &str, partition: Option<&str>) -> Result<SubSatInstance, CliError> {
    let p = Path::new("<input>");
    let paf: PafInstance = match kind {
        Reduction::FourColoring => four_coloring_to_2paf(&parsed(p, parse_graph(input))?),
        Reduction::Clique => {
            let g = parsed(p, parse_graph(input))?;
            let text = partition.ok_or_else(|| CliError::Usage("clique needs --partition".into()))?;
            let parts = parsed(Path::new("<partition>"), parse_partition(text))?;
            return Ok(multicolored_clique_to_2subsat(&PartitionedGraph::new(g, parts)?));
        }
        Reduction::Oxr => {
            let (n, triples) = parsed(p, parse_oxr(input))?;
            oxr_to_2paf(n, &triples)?
        }
        Reduction::Maxlin2 => {
            let (n, forms) = parsed(p, parse_linear(input))?;
            maxlin2_to_e2paf(n, &forms)?
        }
    };
    Ok(paf_to_subsat_instance(&paf))
}

fn reduce_command(args: &ReduceArgs) -> Result<i32, CliError> {
    let input = read(&args.input)?;
    let partition = args.partition.as_deref().map(read).transpose()?;
    let inst = reduce_to_instance(args.kind, &input, partition.as_deref()).map_err(|e| match e {
        CliError::Parse { source, .. } => CliError::Parse {
            path: args.input.clone(),
            source,
        },
        e => e,
    })?;
    emit(args.out.as_deref(), &serialize_dimacs_xor(&inst))?;
    Ok(0)
}

/// Parses `n=.. k=.. t=.. [m=..]`.
pub fn planted_params(items: &[String]) -> Result<(usize, usize, usize, usize), CliError> {
    let (mut n, mut k, mut t, mut m) = (None, None, 0, None);
    for item in items.iter().flat_map(|s| s.split_whitespace()) {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("expected key=value, found `{item}`")))?;
        let v: usize = value
            .parse()
            .map_err(|_| CliError::Usage(format!("expected a number for `{key}`, found `{value}`")))?;
        match key {
            "n" => n = Some(v),
            "k" => k = Some(v),
            "t" => t = v,
            "m" => m = Some(v),
            _ => return Err(CliError::Usage(format!("unknown planted parameter `{key}`"))),
        }
    }
    let n = n.ok_or_else(|| CliError::Usage("missing n".into()))?;
    let k = k.ok_or_else(|| CliError::Usage("missing k".into()))?;
    Ok((n, k, m.unwrap_or(2 * n), t))
}

fn gen_command(args: &GenArgs) -> Result<i32, CliError> {
    let (n, k, m, t) = planted_params(&args.planted)?;
    let p = planted_instance(n, k, m, t, &mut seeded(args.seed), args.unique)?;
    let mut text = format!("c planted n={n} k={k} m={m} t={t} seed={}\n", args.seed);
    text.push_str(&serialize_dimacs_xor(&p.instance));
    emit(args.out.as_deref(), &text)?;
    Ok(0)
}

fn bench_command(args: &BenchArgs) -> Result<i32, CliError> {
    let mut text = match &args.spec {
        Some(p) => read(p)?,
        None => String::new(),
    };
    for s in &args.set {
        text.push('\n');
        text.push_str(s);
    }
    let e = parse_experiment(&text)?;
    let rows = run_experiment(&e)?;
    if let Some(axis) = &args.fit {
        let fit = match axis.as_str() {
            "r" => fit_rows(&rows, |p| p.r(), 2.0)?,
            "n" => fit_rows(&rows, |p| p.n, 2.0)?,
            other => return Err(CliError::Usage(format!("--fit takes r or n, not `{other}`"))),
        };
        eprintln!("c fit slope={} growth={}", fit.slope, fit.growth_ratio);
    }
    let out = args.out.as_deref().or(e.output.as_deref());
    emit(out, &to_csv(e.algorithm, &rows))?;
    Ok(0)
}

/// Dispatches a parsed command line and returns the process exit status.
pub fn run(cli: &Cli) -> i32 {
    let r = match &cli.command {
        Command::Solve(a) => solve_command(a, false),
        Command::Maxsat(a) => solve_command(a, true),
        Command::Reduce(a) => reduce_command(a),
        Command::Gen(a) => gen_command(a),
        Command::Bench(a) => bench_command(a),
    };
    r.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        EXIT_ERROR
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(text: &str) -> SubSatInstance {
        parse_dimacs_xor(text).unwrap()
    }

    #[test]
    fn exit_codes() {
        let sat = inst("p cnf 2 1\n1 2 0\nx 1 2 0\n");
        let unsat = inst("p cnf 1 2\n1 0\n-1 0\n");
        let cfg = RunConfig::default();
        assert_eq!(solve_instance(&sat, &cfg).unwrap().exit_code(), EXIT_SAT);
        assert_eq!(solve_instance(&unsat, &cfg).unwrap().exit_code(), EXIT_UNSAT);
        let ppz = RunConfig {
            algo: Algorithm::Ppz,
            ..Default::default()
        };
        assert_eq!(solve_instance(&unsat, &ppz).unwrap().exit_code(), EXIT_UNKNOWN);
    }

    #[test]
    fn human_report() {
        let r = solve_instance(&inst("p cnf 2 1\n1 0\nx 1 2 0\n"), &RunConfig::default()).unwrap();
        assert_eq!(
            r.render(Format::Human),
            "c algo=brute seed=0 iterations=2\ns SATISFIABLE\nv 1 -2 0\n"
        );
    }

    #[test]
    fn json_report() {
        let r = solve_instance(&inst("p cnf 1 1\n-1 0\n"), &RunConfig::default()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.render(Format::JsonLines)).unwrap();
        assert_eq!(v["status"], "SATISFIABLE");
        assert_eq!(v["witness"], json!([-1]));
    }

    #[test]
    fn every_algorithm_runs() {
        let i = inst("p cnf 3 2\n1 2 0\n-1 3 0\nx 1 2 3 0\n");
        for algo in Algorithm::value_variants() {
            let cfg = RunConfig {
                algo: *algo,
                ..Default::default()
            };
            let r = solve_instance(&i, &cfg).unwrap();
            if let Some(x) = r.result.verdict.witness() {
                assert!(i.is_solution(x), "{}", algo.id());
            }
        }
    }

    #[test]
    fn planted_parameters() {
        assert_eq!(
            planted_params(&["n=14".into(), "k=3".into(), "t=2".into()]).unwrap(),
            (14, 3, 28, 2)
        );
        assert_eq!(planted_params(&["n=4 k=2 m=3".into()]).unwrap(), (4, 2, 3, 0));
        assert!(planted_params(&["k=2".into()]).is_err());
        assert!(planted_params(&["n=4".into(), "q=1".into()]).is_err());
    }

    #[test]
    fn four_coloring_of_k5_is_unsat() {
        let mut g = String::from("5 10\n");
        for u in 0..5 {
            for v in u + 1..5 {
                g.push_str(&format!("{u} {v}\n"));
            }
        }
        let i = reduce_to_instance(Reduction::FourColoring, &g, None).unwrap();
        assert_eq!(
            solve_instance(&i, &RunConfig::default()).unwrap().exit_code(),
            EXIT_UNSAT
        );
    }
}
