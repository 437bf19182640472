use std::collections::BTreeMap;
use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use scaffold_core::eval::{self, AttemptRecord, DivergenceReport, Lead};
use scaffold_core::ingest::{self, Problem};
use scaffold_core::pe_parser::{parse_piece_with, ParserOptions};
use scaffold_core::scaffold::{check_program, Regime};
use scaffold_core::search::{self, regime_name, Algorithm, Budget, Constraint};
use scaffold_core::synth;

#[derive(Parser)]
#[command(name = "scaffold", version, about = "Assemble programs from per-line code candidates under scope and symbol-table constraints")]
struct Cli {
    /// Seed for tie-breaking and synthetic instances.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search each problem and emit ranked programs as JSON lines.
    Search(SearchArgs),
    /// Success curves, leads and divergence statistics from attempt logs.
    Eval(EvalArgs),
    /// Print the parse of code pieces.
    Parse(ParseArgs),
    /// Check one program, given as candidate ranks, against its problem.
    Check(CheckArgs),
    /// Write a set-packing reduction instance.
    GenSetpacking(GenArgs),
    /// Fraction of problems whose every line has a gold candidate.
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ConstraintArg {
    None,
    Syntactic,
    Symtable,
    Backoff,
}

impl From<ConstraintArg> for Constraint {
    fn from(c: ConstraintArg) -> Self {
        match c {
            ConstraintArg::None => Constraint::None,
            ConstraintArg::Syntactic => Constraint::Syntactic,
            ConstraintArg::Symtable => Constraint::SymTable,
            ConstraintArg::Backoff => Constraint::Backoff,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Hierarchical,
    Beam,
}

#[derive(Clone, Copy, ValueEnum)]
enum RegimeArg {
    Syntactic,
    Symtable,
}

impl From<RegimeArg> for Regime {
    fn from(r: RegimeArg) -> Self {
        match r {
            RegimeArg::Syntactic => Regime::Syntactic,
            RegimeArg::Symtable => Regime::SymTable,
        }
    }
}

#[derive(Args)]
struct SearchArgs {
    /// Problem files (`*.problem.tsv`) or directories of them.
    #[arg(required = true)]
    problems: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "backoff")]
    constraint: ConstraintArg,
    #[arg(long, value_enum, default_value = "hierarchical")]
    algorithm: AlgorithmArg,
    /// Programs to emit per problem.
    #[arg(short = 'B', default_value_t = 100)]
    b: usize,
    /// Beam width.
    #[arg(short = 'W', default_value_t = 50)]
    w: usize,
    /// Scaffolds kept (default: min(W, 20)).
    #[arg(short = 'K')]
    k: Option<usize>,
    /// Candidates kept per line.
    #[arg(short = 'C', default_value_t = 100)]
    c: usize,
    /// Judge each emitted program: `gold` or `cmd:<template>` with `{file}`.
    #[arg(long)]
    judge: Option<String>,
    /// External judge timeout in milliseconds.
    #[arg(long, default_value_t = 10_000)]
    timeout_ms: u64,
}

#[derive(Args)]
struct EvalArgs {
    /// Attempt logs (JSON lines with problem, attempt or rank, passed).
    #[arg(required = true)]
    logs: Vec<PathBuf>,
    /// Budgets to report.
    #[arg(long, value_delimiter = ',', default_value = "1,10,100,1000")]
    budgets: Vec<usize>,
    /// Largest budget of the dense grid used for leads.
    #[arg(long, default_value_t = 1000)]
    grid_max: usize,
}

#[derive(Args)]
struct ParseArgs {
    /// Code pieces; `-` reads one piece per line from stdin.
    #[arg(required = true)]
    pieces: Vec<String>,
}

#[derive(Args)]
struct CheckArgs {
    problem: PathBuf,
    /// Comma-separated candidate ranks, one per line.
    choices: String,
    #[arg(long, value_enum, default_value = "symtable")]
    constraint: RegimeArg,
    #[arg(short = 'C', default_value_t = 100)]
    c: usize,
}

#[derive(Args)]
struct GenArgs {
    /// Universe size; elements are numbered from 1.
    #[arg(long)]
    universe: Option<usize>,
    /// Subsets separated by `;`, elements by `,`, e.g. "1,2;3,4;1,3".
    #[arg(long)]
    family: Option<String>,
    /// Packing size (lines to fill).
    #[arg(short = 'L', default_value_t = 2)]
    l: usize,
    /// Sample a random instance instead (uses --seed).
    #[arg(long)]
    random: bool,
    /// Directory for `<id>.problem.tsv` and `<id>.cands.tsv`.
    #[arg(long, default_value = ".")]
    dir: PathBuf,
    #[arg(long, default_value = "setpacking")]
    id: String,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(required = true)]
    problems: Vec<PathBuf>,
    #[arg(short = 'C', default_value_t = 100)]
    c: usize,
}

/// A configuration problem; exits with status 2.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

#[derive(Serialize)]
struct SearchRecord<'a> {
    problem: &'a str,
    rank: usize,
    score: f64,
    regime: &'static str,
    choices: &'a [usize],
    code: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    passed: Option<bool>,
}

/// Accepts search output as well as bare attempt records.
#[derive(Deserialize)]
struct LogLine {
    problem: String,
    #[serde(alias = "rank")]
    attempt: usize,
    passed: Option<bool>,
    choices: Option<Vec<usize>>,
}

enum Judge {
    Gold,
    External(String, Duration),
}

fn parse_judge(spec: &str, timeout: Duration) -> Result<Judge> {
    if spec == "gold" {
        return Ok(Judge::Gold);
    }
    match spec.strip_prefix("cmd:") {
        Some(t) => {
            eval::render_template(t, "x").map_err(|e| usage(e.to_string()))?;
            Ok(Judge::External(t.to_string(), timeout))
        }
        None => Err(usage(format!("unknown judge {spec:?}; use gold or cmd:<template>"))),
    }
}

fn problem_files(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for input in inputs {
        if input.is_dir() {
            for entry in fs::read_dir(input).with_context(|| format!("reading {}", input.display()))? {
                let path = entry?.path();
                if path.to_string_lossy().ends_with(".problem.tsv") {
                    out.push(path);
                }
            }
        } else {
            out.push(input.clone());
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

fn load(path: &Path, cap: usize) -> Result<Problem> {
    let cands = ingest::candidates_path_for(path);
    let problem = ingest::load_problem_with_candidates(path, &cands, cap).with_context(|| format!("loading {}", path.display()))?;
    problem.validate().with_context(|| format!("validating {}", path.display()))?;
    Ok(problem)
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?)
}

struct Output {
    sink: Box<dyn Write>,
}

impl Output {
    fn new(path: Option<&Path>) -> Result<Self> {
        let sink: Box<dyn Write> = match path {
            Some(p) => Box::new(io::BufWriter::new(fs::File::create(p).with_context(|| format!("creating {}", p.display()))?)),
            None => Box::new(io::BufWriter::new(io::stdout().lock())),
        };
        Ok(Output { sink })
    }

    fn line(&mut self, value: &impl Serialize) -> Result<()> {
        serde_json::to_writer(&mut self.sink, value)?;
        self.sink.write_all(b"\n")?;
        Ok(())
    }
}

impl Drop for Output {
    fn drop(&mut self) {
        let _ = self.sink.flush();
    }
}

fn cmd_search(cli: &Cli, args: &SearchArgs) -> Result<()> {
    if args.b == 0 || args.w == 0 || args.c == 0 {
        return Err(usage("-B, -W and -C must be at least 1"));
    }
    let k = args.k.unwrap_or(args.w.min(20));
    if k == 0 || k > args.w {
        return Err(usage(format!("-K must be between 1 and W ({}), got {k}", args.w)));
    }
    let judge = args
        .judge
        .as_deref()
        .map(|j| parse_judge(j, Duration::from_millis(args.timeout_ms)))
        .transpose()?;
    let budget = Budget { b: args.b, w: args.w, k };
    let constraint = Constraint::from(args.constraint);
    let algorithm = match args.algorithm {
        AlgorithmArg::Hierarchical => Algorithm::Hierarchical,
        AlgorithmArg::Beam => Algorithm::Beam,
    };
    let paths = problem_files(&args.problems)?;
    let problems: Vec<Problem> = paths.iter().map(|p| load(p, args.c)).collect::<Result<_>>()?;
    let opts = ParserOptions::default();

    let results: Vec<Result<(usize, search::Outcome, Vec<Option<bool>>)>> = pool(cli.jobs)?.install(|| {
        problems
            .par_iter()
            .enumerate()
            .map(|(i, problem)| {
                let outcome = search::search(problem, constraint, algorithm, &budget, &opts);
                let verdicts = outcome
                    .programs
                    .iter()
                    .map(|p| match &judge {
                        None => Ok(None),
                        Some(Judge::Gold) => eval::judge_gold(p, problem).map(Some),
                        Some(Judge::External(t, timeout)) => eval::judge_external(p, t, *timeout).map(|v| Some(v.passed)),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok((i, outcome, verdicts))
            })
            .collect()
    });

    let mut out = Output::new(cli.out.as_deref())?;
    let mut emitted = 0;
    let mut calls = 0;
    for r in results {
        let (i, outcome, verdicts) = r?;
        let problem = &problems[i];
        emitted += outcome.programs.len();
        calls += outcome.verifier_calls;
        for (rank, (program, passed)) in outcome.programs.iter().zip(verdicts).enumerate() {
            out.line(&SearchRecord {
                problem: &problem.id,
                rank: rank + 1,
                score: program.score,
                regime: regime_name(outcome.regime),
                choices: &program.choices,
                code: &program.code,
                passed,
            })?;
        }
        log::info!("{}: {} programs, {} verifier calls", problem.id, outcome.programs.len(), outcome.verifier_calls);
    }
    eprintln!(
        "{}",
        serde_json::json!({"problems": problems.len(), "programs": emitted, "verifier_calls": calls, "constraint": constraint.name()})
    );
    Ok(())
}

fn read_log(path: &Path) -> Result<(String, eval::AttemptLog, BTreeMap<String, Vec<Vec<usize>>>)> {
    let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut records = Vec::new();
    let mut programs: BTreeMap<String, Vec<(usize, Vec<usize>)>> = BTreeMap::new();
    for (n, line) in io::BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: LogLine = serde_json::from_str(&line).with_context(|| format!("{}:{}", path.display(), n + 1))?;
        let passed = rec
            .passed
            .with_context(|| format!("{}:{}: record has no verdict; search with --judge", path.display(), n + 1))?;
        if let Some(c) = rec.choices {
            programs.entry(rec.problem.clone()).or_default().push((rec.attempt, c));
        }
        records.push(AttemptRecord {
            problem: rec.problem,
            attempt: rec.attempt,
            passed,
        });
    }
    let programs = programs
        .into_iter()
        .map(|(k, mut v)| {
            v.sort();
            (k, v.into_iter().map(|(_, c)| c).collect())
        })
        .collect();
    let name = path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().to_string());
    Ok((name, eval::attempt_log(&records), programs))
}

#[derive(Serialize)]
struct LeadRecord<'a> {
    a1: &'a str,
    a2: &'a str,
    budget: usize,
    lead: Option<usize>,
}

#[derive(Serialize)]
struct BucketRecord {
    lengths: &'static str,
    first_half: usize,
    divergences: usize,
    identical: usize,
    fraction: f64,
}

fn cmd_eval(cli: &Cli, args: &EvalArgs) -> Result<()> {
    if args.budgets.iter().any(|&b| b == 0 || b > args.grid_max) {
        return Err(usage(format!("budgets must lie in 1..={}", args.grid_max)));
    }
    let logs: Vec<_> = args.logs.iter().map(|p| read_log(p)).collect::<Result<_>>()?;
    for (name, log, _) in &logs[1..] {
        eval::same_problems(&logs[0].1, log).with_context(|| format!("{} vs {name}", logs[0].0))?;
    }
    let grid = eval::dense_grid(args.grid_max);
    let mut out = Output::new(cli.out.as_deref())?;
    let mut curves = Vec::new();
    for (name, log, programs) in &logs {
        let curve = eval::f_curve(log, &grid)?;
        let at: BTreeMap<String, f64> = args.budgets.iter().map(|&b| (b.to_string(), curve.at(b).unwrap_or(0.0))).collect();
        let mut report = DivergenceReport::default();
        for (i, rows) in programs.values().enumerate() {
            if rows.len() >= 2 {
                report.add(&eval::variation_analysis(rows, cli.seed.wrapping_add(i as u64))?);
            }
        }
        let buckets: Vec<BucketRecord> = eval::BUCKET_LABELS
            .iter()
            .zip(report.buckets)
            .map(|(label, b)| BucketRecord {
                lengths: label,
                first_half: b.first_half,
                divergences: b.divergences,
                identical: b.identical,
                fraction: b.fraction(),
            })
            .collect();
        out.line(&serde_json::json!({"log": name, "problems": log.len(), "f": at, "divergence": buckets}))?;
        curves.push((name, curve));
    }
    for (n1, c1) in &curves {
        for (n2, c2) in &curves {
            if n1 == n2 {
                continue;
            }
            for &b in &args.budgets {
                let lead = match eval::lead(c1, c2, b)? {
                    Lead::Finite(x) => Some(x),
                    Lead::Infinite => None,
                };
                out.line(&LeadRecord { a1: n1, a2: n2, budget: b, lead })?;
            }
        }
    }
    Ok(())
}

fn cmd_parse(cli: &Cli, args: &ParseArgs) -> Result<()> {
    let mut pieces = Vec::new();
    for p in &args.pieces {
        if p == "-" {
            for line in io::stdin().lock().lines() {
                pieces.push(line?);
            }
        } else {
            pieces.push(p.clone());
        }
    }
    let opts = ParserOptions::default();
    let mut out = Output::new(cli.out.as_deref())?;
    for code in pieces {
        match parse_piece_with(&code, &opts) {
            Ok(parse) => out.line(&serde_json::json!({"code": code, "parse": parse}))?,
            Err(e) => out.line(&serde_json::json!({"code": code, "error": e.to_string()}))?,
        }
    }
    Ok(())
}

fn cmd_check(cli: &Cli, args: &CheckArgs) -> Result<bool> {
    let problem = load(&args.problem, args.c)?;
    let choices: Vec<usize> = args
        .choices
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|e| usage(format!("bad choices {:?}: {e}", args.choices)))?;
    let program = problem.program(&choices).map_err(|e| usage(e.to_string()))?;
    let mut out = Output::new(cli.out.as_deref())?;
    match check_program(&program, &problem, args.constraint.into()) {
        Ok(()) => {
            writeln!(out.sink, "PASS")?;
            Ok(true)
        }
        Err(v) => {
            out.line(&v)?;
            Ok(false)
        }
    }
}

fn parse_family(spec: &str) -> Result<Vec<Vec<usize>>> {
    spec.split(';')
        .map(|s| {
            s.split(',')
                .map(str::trim)
                .filter(|e| !e.is_empty())
                .map(|e| e.parse::<usize>().map_err(|err| usage(format!("bad element {e:?}: {err}"))))
                .collect()
        })
        .collect()
}

fn cmd_gen(cli: &Cli, args: &GenArgs) -> Result<()> {
    let (universe, family, l) = if args.random {
        let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
        synth::random_setpacking(&mut rng, 8, 6, 4)
    } else {
        let (Some(universe), Some(family)) = (args.universe, args.family.as_deref()) else {
            return Err(usage("give --universe and --family, or --random"));
        };
        let family = if family.trim().is_empty() { Vec::new() } else { parse_family(family)? };
        (universe, family, args.l)
    };
    let mut problem = synth::gen_setpacking(universe, &family, l).map_err(|e| usage(e.to_string()))?;
    problem.id = args.id.clone();
    fs::create_dir_all(&args.dir)?;
    let problem_path = args.dir.join(format!("{}.problem.tsv", args.id));
    fs::write(&problem_path, ingest::write_problem(&problem))?;
    fs::write(ingest::candidates_path_for(&problem_path), ingest::write_candidates(&problem.candidates))?;
    let mut out = Output::new(cli.out.as_deref())?;
    out.line(&serde_json::json!({"problem": problem_path, "universe": universe, "family": family, "L": l}))?;
    Ok(())
}

fn cmd_oracle(cli: &Cli, args: &OracleArgs) -> Result<()> {
    let paths = problem_files(&args.problems)?;
    let problems: Vec<Problem> = paths.iter().map(|p| load(p, args.c)).collect::<Result<_>>()?;
    let bound = eval::oracle_bound(&problems)?;
    let mut out = Output::new(cli.out.as_deref())?;
    out.line(&serde_json::json!({"problems": problems.len(), "bound": bound}))?;
    Ok(())
}

fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Search(a) => cmd_search(cli, a).map(|_| true),
        Command::Eval(a) => cmd_eval(cli, a).map(|_| true),
        Command::Parse(a) => cmd_parse(cli, a).map(|_| true),
        Command::Check(a) => cmd_check(cli, a),
        Command::GenSetpacking(a) => cmd_gen(cli, a).map(|_| true),
        Command::Oracle(a) => cmd_oracle(cli, a).map(|_| true),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SCAFFOLD_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) if e.is::<Usage>() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_syntax() {
        assert_eq!(parse_family("1,2;3,4;1,3").unwrap(), vec![vec![1, 2], vec![3, 4], vec![1, 3]]);
        assert_eq!(parse_family("1;").unwrap(), vec![vec![1], vec![]]);
        assert!(parse_family("1,x").is_err());
    }

    #[test]
    fn judge_specs() {
        let t = Duration::from_secs(1);
        assert!(matches!(parse_judge("gold", t), Ok(Judge::Gold)));
        assert!(matches!(parse_judge("cmd:true", t), Ok(Judge::External(..))));
        assert!(parse_judge("cmd:", t).is_err());
        assert!(parse_judge("exec", t).is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
