//! Judging emitted programs and the metrics computed over attempt logs:
//! success curves, lead, the oracle bound and divergence analysis.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{Problem, Program};
use crate::pe_parser::tokenize;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("line {line} has no gold translation")]
    JudgeUnavailable { line: usize },
    #[error("judge configuration: {0}")]
    Config(String),
    #[error("no problems to evaluate")]
    EmptyEval,
    #[error("budget {0} is not on the curve grid")]
    Range(usize),
    #[error("curves are over different budget grids")]
    GridMismatch,
    #[error("need at least two programs, got {0}")]
    InsufficientPrograms(usize),
    #[error("programs have different lengths")]
    Ragged,
    #[error("attempt logs cover different problems: {0}")]
    Mismatch(String),
    #[error("running judge: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct JudgeVerdict {
    pub passed: bool,
    /// 1-based position of the attempt in the emitted stream.
    pub attempt: usize,
    #[serde(default)]
    pub timed_out: bool,
}

/// Whitespace-insensitive token form used for gold comparison.
pub fn normalize(code: &str) -> String {
    match tokenize(code) {
        Ok(tokens) => tokens.iter().map(|t| t.text.as_str()).collect::<Vec<_>>().join(" "),
        Err(_) => code.split_whitespace().collect::<Vec<_>>().join(" "),
    }
}

/// Passes iff every chosen piece matches the gold line up to token
/// normalization.
pub fn judge_gold(program: &Program, problem: &Problem) -> Result<bool, EvalError> {
    let mut passed = true;
    for (l, line) in problem.lines.iter().enumerate() {
        let gold = line.gold.as_ref().ok_or(EvalError::JudgeUnavailable { line: l })?;
        let chosen = &problem.candidates[l][program.choices[l]].code;
        passed &= normalize(chosen) == normalize(gold);
    }
    Ok(passed)
}

/// Outcome of an external judge run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExternalVerdict {
    pub passed: bool,
    pub timed_out: bool,
}

/// Fills `{file}` in a judge template. Any other placeholder is an error.
pub fn render_template(template: &str, file: &str) -> Result<String, EvalError> {
    if template.trim().is_empty() {
        return Err(EvalError::Config("empty judge command".into()));
    }
    let rendered = template.replace("{file}", file);
    let rest = template.replace("{file}", "");
    if let Some(start) = rest.find('{') {
        if rest[start..].contains('}') {
            return Err(EvalError::Config(format!("unknown placeholder in {template:?}")));
        }
    }
    Ok(rendered)
}

/// Writes the program to a temporary file and runs the judge command
/// through `sh -c`. Exit status 0 passes. The file path is substituted for
/// `{file}` and is also exported as `PROGRAM_FILE`.
pub fn judge_external(program: &Program, template: &str, timeout: Duration) -> Result<ExternalVerdict, EvalError> {
    let mut file = tempfile::Builder::new().suffix(".cpp").tempfile()?;
    file.write_all(program.code.as_bytes())?;
    file.flush()?;
    let path = file.path().display().to_string();
    let command = render_template(template, &path)?;
    let mut child = Command::new("sh")
        .arg("-c")
        .arg(&command)
        .env("PROGRAM_FILE", &path)
        .stdin(Stdio::null())
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .spawn()?;
    let start = Instant::now();
    loop {
        if let Some(status) = child.try_wait()? {
            return Ok(ExternalVerdict {
                passed: status.success(),
                timed_out: false,
            });
        }
        if start.elapsed() >= timeout {
            let _ = child.kill();
            let _ = child.wait();
            return Ok(ExternalVerdict {
                passed: false,
                timed_out: true,
            });
        }
        std::thread::sleep(Duration::from_millis(5));
    }
}

/// One judged attempt as stored in attempt logs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttemptRecord {
    pub problem: String,
    pub attempt: usize,
    pub passed: bool,
}

/// Per-problem verdicts in attempt order.
pub type AttemptLog = BTreeMap<String, Vec<bool>>;

pub fn attempt_log(records: &[AttemptRecord]) -> AttemptLog {
    let mut sorted: Vec<&AttemptRecord> = records.iter().collect();
    sorted.sort_by(|a, b| (&a.problem, a.attempt).cmp(&(&b.problem, b.attempt)));
    let mut log = AttemptLog::new();
    for r in sorted {
        log.entry(r.problem.clone()).or_default().push(r.passed);
    }
    log
}

/// Problems present in one log and not in the other.
pub fn same_problems(a: &AttemptLog, b: &AttemptLog) -> Result<(), EvalError> {
    let diff: Vec<&String> = a.keys().filter(|k| !b.contains_key(*k)).chain(b.keys().filter(|k| !a.contains_key(*k))).collect();
    if diff.is_empty() {
        Ok(())
    } else {
        Err(EvalError::Mismatch(format!("{diff:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FCurve {
    pub budgets: Vec<usize>,
    pub fractions: Vec<f64>,
}

impl FCurve {
    pub fn at(&self, b: usize) -> Option<f64> {
        self.budgets.binary_search(&b).ok().map(|i| self.fractions[i])
    }
}

/// Fraction of problems with a passing attempt within each budget.
pub fn f_curve(log: &AttemptLog, budgets: &[usize]) -> Result<FCurve, EvalError> {
    if log.is_empty() {
        return Err(EvalError::EmptyEval);
    }
    let mut budgets = budgets.to_vec();
    budgets.sort_unstable();
    budgets.dedup();
    let first_pass: Vec<Option<usize>> = log.values().map(|v| v.iter().position(|&p| p).map(|i| i + 1)).collect();
    let n = log.len() as f64;
    let fractions = budgets
        .iter()
        .map(|&b| first_pass.iter().filter(|p| p.is_some_and(|p| p <= b)).count() as f64 / n)
        .collect();
    Ok(FCurve { budgets, fractions })
}

/// The dense budget grid `1..=max`.
pub fn dense_grid(max: usize) -> Vec<usize> {
    (1..=max).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Lead {
    Finite(usize),
    /// Not reached within the grid.
    Infinite,
}

/// Extra budget `a2` needs to reach the success fraction `a1` has at `b`.
pub fn lead(a1: &FCurve, a2: &FCurve, b: usize) -> Result<Lead, EvalError> {
    if a1.budgets != a2.budgets {
        return Err(EvalError::GridMismatch);
    }
    let start = a1.budgets.binary_search(&b).map_err(|_| EvalError::Range(b))?;
    let target = a1.fractions[start];
    Ok(a2.budgets[start..]
        .iter()
        .zip(&a2.fractions[start..])
        .find(|(_, &f)| f >= target)
        .map_or(Lead::Infinite, |(&bb, _)| Lead::Finite(bb - b)))
}

/// Fraction of problems where every line has some candidate equal to gold
/// under token normalization.
pub fn oracle_bound(problems: &[Problem]) -> Result<f64, EvalError> {
    if problems.is_empty() {
        return Err(EvalError::EmptyEval);
    }
    let mut solvable = 0;
    for p in problems {
        let mut all = true;
        for (l, line) in p.lines.iter().enumerate() {
            let gold = normalize(line.gold.as_ref().ok_or(EvalError::JudgeUnavailable { line: l })?);
            all &= p.candidates[l].iter().any(|c| normalize(&c.code) == gold);
        }
        solvable += usize::from(all);
    }
    Ok(solvable as f64 / problems.len() as f64)
}

/// Divergence of one problem's top programs from their representative
/// branch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Divergence {
    pub length: usize,
    pub representative: Vec<usize>,
    /// Line index where each non-identical program first leaves the
    /// representative, in input order.
    pub points: Vec<usize>,
    pub first_half: usize,
    pub identical: usize,
}

fn distinct_leaves(rows: &[&Vec<usize>]) -> usize {
    let mut v: Vec<&Vec<usize>> = rows.to_vec();
    v.sort();
    v.dedup();
    v.len()
}

/// Builds the prefix tree of the programs, walks the branch that always
/// takes the child with the most leaves (seeded random choice among ties)
/// and records where every other program diverges from it. A divergence
/// counts as early when it happens before line `ceil(L/2)`.
pub fn variation_analysis(programs: &[Vec<usize>], seed: u64) -> Result<Divergence, EvalError> {
    if programs.len() < 2 {
        return Err(EvalError::InsufficientPrograms(programs.len()));
    }
    let length = programs[0].len();
    if programs.iter().any(|p| p.len() != length) {
        return Err(EvalError::Ragged);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows: Vec<&Vec<usize>> = programs.iter().collect();
    let mut representative = Vec::with_capacity(length);
    for col in 0..length {
        let mut children: BTreeMap<usize, Vec<&Vec<usize>>> = BTreeMap::new();
        for r in &rows {
            children.entry(r[col]).or_default().push(r);
        }
        let best = children.values().map(|c| distinct_leaves(c)).max().unwrap_or(0);
        let tied: Vec<usize> = children
            .iter()
            .filter(|(_, c)| distinct_leaves(c) == best)
            .map(|(&k, _)| k)
            .collect();
        let pick = if tied.len() == 1 {
            tied[0]
        } else {
            *tied.choose(&mut rng).expect("at least one child")
        };
        representative.push(pick);
        rows = children.remove(&pick).unwrap_or_default();
    }
    let half = length.div_ceil(2);
    let mut points = Vec::new();
    let mut identical = 0;
    for p in programs {
        match p.iter().zip(&representative).position(|(a, b)| a != b) {
            Some(i) => points.push(i),
            None => identical += 1,
        }
    }
    let first_half = points.iter().filter(|&&i| i < half).count();
    Ok(Divergence {
        length,
        representative,
        points,
        first_half,
        identical,
    })
}

pub const BUCKET_LABELS: [&str; 5] = ["(0,10]", "(10,20]", "(20,30]", "(30,40]", "(40,inf)"];

pub fn bucket_of(length: usize) -> usize {
    match length {
        0..=10 => 0,
        11..=20 => 1,
        21..=30 => 2,
        31..=40 => 3,
        _ => 4,
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Bucket {
    pub first_half: usize,
    pub divergences: usize,
    pub identical: usize,
}

impl Bucket {
    /// Early-divergence fraction; 0 when nothing diverged.
    pub fn fraction(&self) -> f64 {
        if self.divergences == 0 {
            0.0
        } else {
            self.first_half as f64 / self.divergences as f64
        }
    }
}

/// Divergence statistics pooled by program length.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DivergenceReport {
    pub buckets: [Bucket; 5],
}

impl DivergenceReport {
    pub fn add(&mut self, d: &Divergence) {
        let b = &mut self.buckets[bucket_of(d.length)];
        b.first_half += d.first_half;
        b.divergences += d.points.len();
        b.identical += d.identical;
    }

    pub fn fractions(&self) -> [f64; 5] {
        self.buckets.map(|b| b.fraction())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    fn log(entries: &[(&str, &[bool])]) -> AttemptLog {
        entries.iter().map(|(k, v)| (k.to_string(), v.to_vec())).collect()
    }

    #[test]
    fn gold_judge() {
        let p = synth::problem_with_candidates("g", &[(0, &[("a += 1;", 0.6), ("a -= 1;", 0.4)])]);
        let mut p = p;
        p.lines[0].gold = Some("a  +=  1 ;".into());
        assert!(judge_gold(&p.program(&[0]).unwrap(), &p).unwrap());
        assert!(!judge_gold(&p.program(&[1]).unwrap(), &p).unwrap());
        p.lines[0].gold = None;
        assert!(matches!(
            judge_gold(&p.program(&[0]).unwrap(), &p),
            Err(EvalError::JudgeUnavailable { line: 0 })
        ));
    }

    #[test]
    fn external_judge() {
        let p = synth::problem_from_lines("e", &[("int x;", 0)]);
        let prog = p.program(&[0]).unwrap();
        let t = Duration::from_secs(5);
        assert!(judge_external(&prog, "true", t).unwrap().passed);
        assert!(!judge_external(&prog, "false", t).unwrap().passed);
        assert!(judge_external(&prog, "grep -q 'int x;' {file}", t).unwrap().passed);
        assert!(judge_external(&prog, "grep -q 'int y;' \"$PROGRAM_FILE\"", t).map(|v| !v.passed).unwrap());
        let slow = judge_external(&prog, "sleep 5", Duration::from_millis(100)).unwrap();
        assert!(slow.timed_out && !slow.passed);
        assert!(matches!(judge_external(&prog, "  ", t), Err(EvalError::Config(_))));
        assert!(matches!(judge_external(&prog, "cat {src}", t), Err(EvalError::Config(_))));
    }

    #[test]
    fn curve_examples() {
        let l = log(&[("p1", &[true]), ("p2", &[false, false])]);
        let f = f_curve(&l, &[1, 10]).unwrap();
        assert_eq!(f.fractions, vec![0.5, 0.5]);
        let l = log(&[("p1", &[true]), ("p2", &[true, false])]);
        assert_eq!(f_curve(&l, &[1, 5, 100]).unwrap().fractions, vec![1.0; 3]);
        assert!(matches!(f_curve(&AttemptLog::new(), &[1]), Err(EvalError::EmptyEval)));
    }

    #[test]
    fn lead_examples() {
        let grid = dense_grid(1000);
        let early = FCurve {
            budgets: grid.clone(),
            fractions: grid.iter().map(|_| 1.0).collect(),
        };
        let late = FCurve {
            budgets: grid.clone(),
            fractions: grid.iter().map(|&b| if b >= 401 { 1.0 } else { 0.0 }).collect(),
        };
        assert_eq!(lead(&early, &late, 1).unwrap(), Lead::Finite(400));
        assert_eq!(lead(&early, &early, 7).unwrap(), Lead::Finite(0));
        assert_eq!(lead(&late, &early, 1).unwrap(), Lead::Finite(0));
        assert!(matches!(lead(&early, &late, 1001), Err(EvalError::Range(1001))));
        let never = FCurve {
            budgets: grid.clone(),
            fractions: vec![0.0; grid.len()],
        };
        assert_eq!(lead(&early, &never, 1).unwrap(), Lead::Infinite);
    }

    #[test]
    fn oracle_bound_examples() {
        let mut p = synth::problem_with_candidates("o", &[(0, &[("int a;", 0.5), ("a;", 0.5)]), (0, &[("b;", 1.0)])]);
        p.lines[0].gold = Some("int a;".into());
        p.lines[1].gold = Some("b ;".into());
        assert_eq!(oracle_bound(&[p.clone()]).unwrap(), 1.0);
        p.lines[1].gold = Some("c;".into());
        assert_eq!(oracle_bound(&[p]).unwrap(), 0.0);
    }

    #[test]
    fn variation_identical_and_last_line() {
        let same = vec![vec![0, 1, 2]; 4];
        let d = variation_analysis(&same, 0).unwrap();
        assert!(d.points.is_empty());
        assert_eq!(d.identical, 4);
        let mut r = DivergenceReport::default();
        r.add(&d);
        assert_eq!(r.fractions()[0], 0.0);

        let last: Vec<Vec<usize>> = (0..5).map(|k| vec![0, 0, 0, 0, k]).collect();
        let d = variation_analysis(&last, 9).unwrap();
        assert_eq!(d.points, vec![4; 4]);
        assert_eq!(d.first_half, 0);

        assert!(matches!(variation_analysis(&same[..1], 0), Err(EvalError::InsufficientPrograms(1))));
    }

    #[test]
    fn variation_follows_heaviest_child() {
        let programs = vec![vec![1, 0, 0], vec![1, 0, 1], vec![1, 1, 0], vec![2, 0, 0]];
        let d = variation_analysis(&programs, 3).unwrap();
        assert_eq!(&d.representative[..2], &[1, 0]);
        // odd length: lines 0 and 1 are the first half
        assert_eq!(d.first_half, 2);
    }

    #[test]
    fn buckets() {
        assert_eq!(bucket_of(10), 0);
        assert_eq!(bucket_of(11), 1);
        assert_eq!(bucket_of(40), 3);
        assert_eq!(bucket_of(41), 4);
    }
}
