//! Implementation of the `ltp` commands. Every command returns the text it
//! would print on standard output, so the binary only routes output and
//! picks the exit code.

use std::fmt::Write as _;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use ltp_core::qmax::DEFAULT_BUDGET_CONSTANT;
use ltp_core::{
    full_dp_longest_trail, longest_trail_bruteforce, random_graph, solve_hybrid, theoretical_costs,
    validate_trail, Graph, HybridConfig, Mode, QueryLedger, DEFAULT_ALPHA,
};

#[derive(Parser, Debug)]
#[command(
    name = "ltp",
    version,
    about = "Longest trail solvers: brute force, subset DP and a simulated hybrid search"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a random multigraph as an edge list.
    Gen(GenArgs),
    /// Solve one graph and print a JSON run report.
    Solve(SolveArgs),
    /// Cross-check oracle, DP and deterministic hybrid.
    Verify(VerifyArgs),
    /// Print the closed-form cost report as JSON.
    Costs(CostsArgs),
    /// Run the hybrid on many random graphs against DP ground truth.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Hybrid parameters shared by `solve` and `bench`.
#[derive(Args, Debug, Clone)]
pub struct Tuning {
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
    /// Runs per boosted search (default 2m).
    #[arg(long)]
    pub repeats: Option<usize>,
    /// Per-run query budget multiplier.
    #[arg(long, default_value_t = DEFAULT_BUDGET_CONSTANT)]
    pub budget_constant: f64,
}

impl Default for Tuning {
    fn default() -> Self {
        Tuning {
            alpha: DEFAULT_ALPHA,
            repeats: None,
            budget_constant: DEFAULT_BUDGET_CONSTANT,
        }
    }
}

impl Tuning {
    fn config(&self, mode: Mode, seed: u64) -> HybridConfig {
        HybridConfig {
            alpha: self.alpha,
            mode,
            repeats_per_level: self.repeats,
            seed,
            budget_constant: self.budget_constant,
            ..HybridConfig::default()
        }
    }
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    /// Edge-list file, or `-` for standard input.
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = Engine::Hybrid)]
    pub engine: Engine,
    #[arg(long, value_enum, default_value_t = ModeArg::Det)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub tuning: Tuning,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Edge-list file to check; omit when using --random.
    #[arg(required_unless_present = "random", conflicts_with = "random")]
    pub input: Option<PathBuf>,
    /// Check COUNT random graphs with N vertices and M edges, seeds SEED, SEED+1, ...
    #[arg(long, num_args = 4, value_names = ["COUNT", "N", "M", "SEED"])]
    pub random: Option<Vec<u64>>,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
}

#[derive(Args, Debug)]
pub struct CostsArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Edge counts to run, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub sizes: Vec<usize>,
    /// Graphs per size.
    #[arg(long, default_value_t = 10)]
    pub runs: u64,
    #[arg(long, value_enum, default_value_t = ModeArg::Stoch)]
    pub mode: ModeArg,
    /// Vertices per graph.
    #[arg(long, default_value_t = 6)]
    pub n: usize,
    /// First graph seed; run `i` uses `seed + i` for the graph and the solver.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub tuning: Tuning,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    Oracle,
    Dp,
    Hybrid,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Det,
    Stoch,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Det => Mode::Deterministic,
            ModeArg::Stoch => Mode::Stochastic,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportEngine {
    Oracle,
    Dp,
    HybridDet,
    HybridStoch,
}

/// One solve, as printed by `ltp solve`. Fields that do not apply to the
/// engine are `null`, never omitted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub engine: ReportEngine,
    pub n: usize,
    pub m: usize,
    pub length: usize,
    pub trail: Vec<usize>,
    pub queries: Option<QueryLedger>,
    pub seed: u64,
    pub alpha: Option<f64>,
    pub mode: Option<Mode>,
    pub repeats: Option<usize>,
    pub budget_constant: Option<f64>,
    pub classical_entries: Option<usize>,
    pub success_nominal: Option<bool>,
    pub wall_ms: f64,
}

/// Text for standard output plus whether the command succeeded.
#[derive(Debug)]
pub struct Output {
    pub text: String,
    pub out: Option<PathBuf>,
    pub ok: bool,
}

impl Output {
    fn ok(text: String, out: Option<PathBuf>) -> Self {
        Output {
            text,
            out,
            ok: true,
        }
    }
}

pub fn run(cli: Cli) -> Result<Output> {
    match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Costs(a) => cmd_costs(a),
        Command::Bench(a) => cmd_bench(a),
    }
}

pub fn read_graph(path: &Path) -> Result<Graph> {
    let text = if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .context("reading standard input")?;
        s
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
    };
    Graph::parse(&text).with_context(|| format!("parsing {}", path.display()))
}

fn cmd_gen(a: GenArgs) -> Result<Output> {
    let g = random_graph(a.n, a.m, a.seed)?;
    Ok(Output::ok(g.to_edge_list(), a.out))
}

/// Run one engine on `g`.
pub fn solve(
    g: &Graph,
    engine: Engine,
    mode: Mode,
    tuning: &Tuning,
    seed: u64,
) -> Result<RunReport> {
    let start = Instant::now();
    let mut report = RunReport {
        engine: ReportEngine::Oracle,
        n: g.vertex_count(),
        m: g.edge_count(),
        length: 0,
        trail: Vec::new(),
        queries: None,
        seed,
        alpha: None,
        mode: None,
        repeats: None,
        budget_constant: None,
        classical_entries: None,
        success_nominal: None,
        wall_ms: 0.0,
    };
    match engine {
        Engine::Oracle | Engine::Dp => {
            let r = if engine == Engine::Oracle {
                longest_trail_bruteforce(g)?
            } else {
                report.engine = ReportEngine::Dp;
                full_dp_longest_trail(g)?
            };
            report.length = r.length;
            report.trail = r.trail.0;
        }
        Engine::Hybrid => {
            let cfg = tuning.config(mode, seed);
            let r = solve_hybrid(g, &cfg)?;
            report.engine = match mode {
                Mode::Deterministic => ReportEngine::HybridDet,
                Mode::Stochastic => ReportEngine::HybridStoch,
            };
            report.length = r.length;
            report.trail = r.trail.0;
            report.queries = Some(r.ledger);
            report.alpha = Some(cfg.alpha);
            report.mode = Some(mode);
            report.repeats = Some(cfg.repeats_for(g.edge_count()));
            report.budget_constant = Some(cfg.budget_constant);
            report.classical_entries = Some(r.classical_entries);
            report.success_nominal = Some(r.success_nominal);
        }
    }
    report.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(report)
}

fn cmd_solve(a: SolveArgs) -> Result<Output> {
    let g = read_graph(&a.input)?;
    let report = solve(&g, a.engine, a.mode.into(), &a.tuning, a.seed)?;
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    Ok(Output::ok(text, a.out))
}

/// Lengths from the three exact engines; `None` marks an invalid trail.
fn verify_one(g: &Graph, alpha: f64) -> Result<[Option<usize>; 3]> {
    let tuning = Tuning {
        alpha,
        ..Tuning::default()
    };
    let mut out = [None; 3];
    for (slot, engine) in out
        .iter_mut()
        .zip([Engine::Oracle, Engine::Dp, Engine::Hybrid])
    {
        let r = solve(g, engine, Mode::Deterministic, &tuning, 0)?;
        let trail = ltp_core::Trail(r.trail);
        if validate_trail(g, &trail).is_ok() && trail.len() == r.length {
            *slot = Some(r.length);
        }
    }
    Ok(out)
}

fn cmd_verify(a: VerifyArgs) -> Result<Output> {
    let graphs: Vec<(String, Graph)> = match (&a.input, &a.random) {
        (Some(path), _) => vec![(path.display().to_string(), read_graph(path)?)],
        (None, Some(r)) => {
            let [count, n, m, seed] = r[..] else {
                bail!("--random takes COUNT N M SEED");
            };
            (0..count)
                .map(|i| {
                    let s = seed + i;
                    Ok((
                        format!("seed {s}"),
                        random_graph(n as usize, m as usize, s)?,
                    ))
                })
                .collect::<Result<_>>()?
        }
        (None, None) => bail!("give an input file or --random COUNT N M SEED"),
    };
    let mut text = String::new();
    let mut agree = 0;
    for (label, g) in &graphs {
        let [o, d, h] = verify_one(g, a.alpha)?;
        let show = |x: Option<usize>| x.map_or("invalid".to_string(), |l| l.to_string());
        let ok = o.is_some() && o == d && d == h;
        agree += ok as usize;
        writeln!(
            text,
            "{label}: oracle {} dp {} hybrid-det {}{}",
            show(o),
            show(d),
            show(h),
            if ok { "" } else { "  MISMATCH" }
        )?;
    }
    writeln!(text, "{agree}/{} agree", graphs.len())?;
    Ok(Output {
        text,
        out: None,
        ok: agree == graphs.len(),
    })
}

fn cmd_costs(a: CostsArgs) -> Result<Output> {
    let r = theoretical_costs(a.m, a.alpha)?;
    let mut text = serde_json::to_string_pretty(&r)?;
    text.push('\n');
    Ok(Output::ok(text, None))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub m: usize,
    pub seed: u64,
    pub n: usize,
    pub length: usize,
    /// Longest trail length from the subset DP.
    pub truth: usize,
    pub success: bool,
    pub success_nominal: bool,
    pub queries: QueryLedger,
    pub wall_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl Stat {
    fn of(xs: impl Iterator<Item = f64> + Clone) -> Stat {
        let n = xs.clone().count().max(1) as f64;
        Stat {
            mean: xs.clone().sum::<f64>() / n,
            min: xs.clone().fold(f64::INFINITY, f64::min),
            max: xs.fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchSummary {
    pub m: usize,
    pub runs: usize,
    pub success_rate: f64,
    pub queries: Stat,
    pub wall_ms: Stat,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub mode: Mode,
    pub alpha: f64,
    pub repeats: Option<usize>,
    pub budget_constant: f64,
    pub records: Vec<BenchRecord>,
    pub summary: Vec<BenchSummary>,
}

/// Run the hybrid on `runs` random graphs per size. Records come out sorted
/// by `(m, seed)`.
pub fn bench(
    sizes: &[usize],
    runs: u64,
    n: usize,
    seed: u64,
    mode: Mode,
    tuning: &Tuning,
) -> Result<BenchReport> {
    let mut sizes = sizes.to_vec();
    sizes.sort_unstable();
    sizes.dedup();
    let mut records = Vec::new();
    let mut summary = Vec::new();
    for &m in &sizes {
        let first = records.len();
        for i in 0..runs {
            let s = seed + i;
            let g = random_graph(n, m, s)?;
            let truth = full_dp_longest_trail(&g)?.length;
            let r = solve(&g, Engine::Hybrid, mode, tuning, s)?;
            records.push(BenchRecord {
                m,
                seed: s,
                n,
                length: r.length,
                truth,
                success: r.length == truth,
                success_nominal: r.success_nominal.unwrap_or(true),
                queries: r.queries.unwrap_or_default(),
                wall_ms: r.wall_ms,
            });
        }
        let rs = &records[first..];
        let s = BenchSummary {
            m,
            runs: rs.len(),
            success_rate: rs.iter().filter(|r| r.success).count() as f64 / rs.len().max(1) as f64,
            queries: Stat::of(rs.iter().map(|r| r.queries.total() as f64)),
            wall_ms: Stat::of(rs.iter().map(|r| r.wall_ms)),
        };
        eprintln!(
            "m={m}: success {:.3} over {} runs, mean queries {:.4e}, mean {:.1} ms",
            s.success_rate, s.runs, s.queries.mean, s.wall_ms.mean
        );
        summary.push(s);
    }
    Ok(BenchReport {
        mode,
        alpha: tuning.alpha,
        repeats: tuning.repeats,
        budget_constant: tuning.budget_constant,
        records,
        summary,
    })
}

/// Two CSV tables separated by a blank line: one row per run, then one row
/// per size. Per-level counts are `;`-separated.
pub fn bench_csv(r: &BenchReport) -> String {
    let mut s = String::from(
        "m,seed,n,length,truth,success,success_nominal,queries_total,queries_per_level,wall_ms\n",
    );
    for x in &r.records {
        let levels: Vec<String> = x.queries.levels().iter().map(|q| q.to_string()).collect();
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{:.3}",
            x.m,
            x.seed,
            x.n,
            x.length,
            x.truth,
            x.success,
            x.success_nominal,
            x.queries.total(),
            levels.join(";"),
            x.wall_ms
        );
    }
    s.push_str("\nm,runs,success_rate,queries_mean,queries_min,queries_max,wall_ms_mean,wall_ms_min,wall_ms_max\n");
    for x in &r.summary {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{:.3},{:.3},{:.3}",
            x.m,
            x.runs,
            x.success_rate,
            x.queries.mean,
            x.queries.min,
            x.queries.max,
            x.wall_ms.mean,
            x.wall_ms.min,
            x.wall_ms.max
        );
    }
    s
}

fn cmd_bench(a: BenchArgs) -> Result<Output> {
    if a.runs == 0 {
        bail!("--runs must be at least 1");
    }
    let report = bench(&a.sizes, a.runs, a.n, a.seed, a.mode.into(), &a.tuning)?;
    let text = match a.format {
        Format::Json => serde_json::to_string_pretty(&report)? + "\n",
        Format::Csv => bench_csv(&report),
    };
    Ok(Output::ok(text, a.out))
}
