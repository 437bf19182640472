//! Program search: unconstrained best-first enumeration, regular beam
//! search over code pieces, hierarchical scaffold search with backoff, and
//! quota-limited brute force.
//!
//! Every ordering in this module is score descending, then choice vector
//! ascending. Scores are recomputed from the chosen pieces as a
//! left-to-right sum so that equal programs always compare equal.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{Problem, Program};
use crate::pe_parser::ParserOptions;
use crate::scaffold::{Configuration, PreparedProblem, Regime, ScaffoldState, Verifier};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("line {line} has no parseable candidate")]
    EmptyLine { line: usize },
    #[error("no valid scaffold")]
    EmptyScaffolds,
}

/// Constraint ladder exposed to callers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Constraint {
    None,
    Syntactic,
    SymTable,
    Backoff,
}

impl Constraint {
    pub fn name(self) -> &'static str {
        match self {
            Constraint::None => "none",
            Constraint::Syntactic => "syntactic",
            Constraint::SymTable => "symtable",
            Constraint::Backoff => "backoff",
        }
    }
}

pub fn regime_name(regime: Option<Regime>) -> &'static str {
    match regime {
        None => "none",
        Some(Regime::Syntactic) => "syntactic",
        Some(Regime::SymTable) => "symtable",
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Programs to emit.
    pub b: usize,
    /// Beam width.
    pub w: usize,
    /// Scaffolds kept by hierarchical search.
    pub k: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { b: 100, w: 50, k: 20 }
    }
}

fn better(score_a: f64, ids_a: &[usize], score_b: f64, ids_b: &[usize]) -> Ordering {
    score_a.total_cmp(&score_b).then_with(|| ids_b.cmp(ids_a))
}

fn fresh_sum(terms: impl Iterator<Item = f64>) -> f64 {
    terms.fold(0.0, |acc, x| acc + x)
}

struct Node {
    score: f64,
    ids: Vec<usize>,
    pos: Vec<usize>,
    pivot: usize,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        better(self.score, &self.ids, other.score, &other.ids)
    }
}

/// Lazy exact enumeration of a product of scored lists, best first.
///
/// Each list holds `(id, log score)` pairs. Emitted items are the id
/// vectors with their summed scores.
pub struct KBest {
    lists: Vec<Vec<(usize, f64)>>,
    heap: BinaryHeap<Node>,
}

impl KBest {
    pub fn new(mut lists: Vec<Vec<(usize, f64)>>) -> Self {
        for list in &mut lists {
            list.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        }
        let mut heap = BinaryHeap::new();
        if lists.iter().all(|l| !l.is_empty()) {
            let pos = vec![0; lists.len()];
            heap.push(Self::node(&lists, pos, 0));
        }
        KBest { lists, heap }
    }

    fn node(lists: &[Vec<(usize, f64)>], pos: Vec<usize>, pivot: usize) -> Node {
        let score = fresh_sum(pos.iter().zip(lists).map(|(&p, l)| l[p].1));
        let ids = pos.iter().zip(lists).map(|(&p, l)| l[p].0).collect();
        Node { score, ids, pos, pivot }
    }
}

impl Iterator for KBest {
    type Item = (Vec<usize>, f64);

    fn next(&mut self) -> Option<Self::Item> {
        let node = self.heap.pop()?;
        for i in node.pivot..self.lists.len() {
            if node.pos[i] + 1 < self.lists[i].len() {
                let mut pos = node.pos.clone();
                pos[i] += 1;
                let child = Self::node(&self.lists, pos, i);
                self.heap.push(child);
            }
        }
        Some((node.ids, node.score))
    }
}

fn log_lists(problem: &Problem) -> Vec<Vec<(usize, f64)>> {
    problem
        .candidates
        .iter()
        .map(|slot| slot.iter().map(|p| (p.cand, p.log_prob())).collect())
        .collect()
}

fn make_program(problem: &Problem, choices: Vec<usize>, score: f64) -> Program {
    let mut program = problem.program(&choices).expect("choices come from the candidate lists");
    debug_assert_eq!(program.score.to_bits(), score.to_bits());
    program.score = score;
    program
}

/// Unconstrained programs in score order, lazily.
pub fn best_first(problem: &Problem) -> impl Iterator<Item = Program> + '_ {
    KBest::new(log_lists(problem)).map(move |(choices, score)| make_program(problem, choices, score))
}

struct Hyp {
    state: ScaffoldState,
    choices: Vec<usize>,
    score: f64,
}

/// Line-by-line beam search over configurations or code pieces.
///
/// `options[l]` lists `(id, log score, config)` for line `l`. Expansions are
/// ranked first and validated in rank order until `width` survive, so the
/// kept set is the top `width` valid extensions. On the last line a
/// hypothesis must also be a complete program to survive.
fn beam(
    options: &[Vec<(usize, f64, &Configuration)>],
    indents: &[u32],
    width: usize,
    verifier: &Verifier,
) -> Vec<Hyp> {
    let mut beam = vec![Hyp {
        state: ScaffoldState::new(),
        choices: Vec::new(),
        score: 0.0,
    }];
    let last = options.len().saturating_sub(1);
    for (l, opts) in options.iter().enumerate() {
        let mut expansions: Vec<(f64, Vec<usize>, usize, usize)> = Vec::with_capacity(beam.len() * opts.len());
        for (h, hyp) in beam.iter().enumerate() {
            for (o, (id, lp, _)) in opts.iter().enumerate() {
                let mut choices = hyp.choices.clone();
                choices.push(*id);
                expansions.push((hyp.score + lp, choices, h, o));
            }
        }
        expansions.sort_by(|a, b| better(b.0, &b.1, a.0, &a.1));
        let mut next = Vec::with_capacity(width);
        for (score, choices, h, o) in expansions {
            if next.len() >= width {
                break;
            }
            let Ok(state) = verifier.extend(&beam[h].state, opts[o].2, indents[l]) else {
                continue;
            };
            if l == last && !state.is_complete(options.len()).unwrap_or(false) {
                continue;
            }
            next.push(Hyp { state, choices, score });
        }
        beam = next;
        log::trace!("beam line {l}: {} hypotheses", beam.len());
        if beam.is_empty() {
            break;
        }
    }
    if options.is_empty() {
        beam.retain(|h| h.state.is_complete(0).unwrap_or(false));
    }
    beam
}

/// Regular beam search over code pieces. Unparseable pieces are skipped.
pub fn beam_search(problem: &Problem, prepared: &PreparedProblem, width: usize, b: usize, verifier: &Verifier) -> Vec<Program> {
    let options: Vec<Vec<(usize, f64, &Configuration)>> = problem
        .candidates
        .iter()
        .enumerate()
        .map(|(l, slot)| {
            slot.iter()
                .filter_map(|p| prepared.config(l, p.cand).ok().map(|c| (p.cand, p.log_prob(), c)))
                .collect()
        })
        .collect();
    let mut found = beam(&options, &prepared.indents, width, verifier);
    found.truncate(b);
    found
        .into_iter()
        .map(|h| {
            // rescore from the pieces so ties resolve exactly as elsewhere
            let score = fresh_sum(h.choices.iter().enumerate().map(|(l, &c)| problem.candidates[l][c].log_prob()));
            make_program(problem, h.choices, score)
        })
        .collect()
}

/// Candidates of one line that share a configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigGroup {
    pub config: Arc<Configuration>,
    pub mass: f64,
    /// Candidate ranks, ascending.
    pub members: Vec<usize>,
}

/// Groups each line's parseable candidates by configuration under `regime`,
/// heaviest group first.
pub fn config_distributions(problem: &Problem, prepared: &PreparedProblem, regime: Regime) -> Result<Vec<Vec<ConfigGroup>>, SearchError> {
    let mut out = Vec::with_capacity(problem.len());
    for (l, slot) in problem.candidates.iter().enumerate() {
        let mut groups: Vec<ConfigGroup> = Vec::new();
        let mut index: HashMap<Configuration, usize> = HashMap::new();
        for piece in slot {
            let Ok(cfg) = prepared.config(l, piece.cand) else {
                continue;
            };
            let key = cfg.project(regime);
            match index.get(&key) {
                Some(&g) => {
                    groups[g].mass += piece.prob;
                    groups[g].members.push(piece.cand);
                }
                None => {
                    index.insert(key.clone(), groups.len());
                    groups.push(ConfigGroup {
                        config: Arc::new(key),
                        mass: piece.prob,
                        members: vec![piece.cand],
                    });
                }
            }
        }
        if groups.is_empty() {
            return Err(SearchError::EmptyLine { line: l });
        }
        groups.sort_by(|a, b| b.mass.total_cmp(&a.mass).then(a.members[0].cmp(&b.members[0])));
        out.push(groups);
    }
    Ok(out)
}

/// A complete valid sequence of configurations, one group per line.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaffoldCandidate {
    /// Index into that line's groups.
    pub groups: Vec<usize>,
    /// Sum of the log group masses.
    pub logscore: f64,
}

/// Beam search over configurations; returns up to `k` complete valid
/// scaffolds, best first.
pub fn scaffold_beam(dists: &[Vec<ConfigGroup>], indents: &[u32], width: usize, k: usize, verifier: &Verifier) -> Vec<ScaffoldCandidate> {
    let options: Vec<Vec<(usize, f64, &Configuration)>> = dists
        .iter()
        .map(|groups| {
            groups
                .iter()
                .enumerate()
                .map(|(g, grp)| (g, grp.mass.ln(), grp.config.as_ref()))
                .collect()
        })
        .collect();
    let mut found = beam(&options, indents, width, verifier);
    found.truncate(k);
    found
        .into_iter()
        .map(|h| ScaffoldCandidate {
            groups: h.choices,
            logscore: h.score,
        })
        .collect()
}

/// Programs whose pieces all carry the configurations of `scaffold`, best
/// first.
pub fn programs_from_scaffold<'a>(
    problem: &'a Problem,
    dists: &[Vec<ConfigGroup>],
    scaffold: &ScaffoldCandidate,
) -> impl Iterator<Item = Program> + 'a {
    let lists = scaffold
        .groups
        .iter()
        .enumerate()
        .map(|(l, &g)| {
            dists[l][g]
                .members
                .iter()
                .map(|&c| (c, problem.candidates[l][c].log_prob()))
                .collect()
        })
        .collect();
    KBest::new(lists).map(move |(choices, score)| make_program(problem, choices, score))
}

struct Head {
    score: f64,
    choices: Vec<usize>,
    stream: usize,
}

impl PartialEq for Head {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Head {}

impl PartialOrd for Head {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Head {
    fn cmp(&self, other: &Self) -> Ordering {
        better(self.score, &self.choices, other.score, &other.choices)
    }
}

/// Merges per-scaffold program streams into one globally ordered stream.
pub struct MergedStreams<'a> {
    streams: Vec<Box<dyn Iterator<Item = Program> + 'a>>,
    heap: BinaryHeap<Head>,
    pending: Vec<Option<Program>>,
    last: Option<Vec<usize>>,
}

impl<'a> MergedStreams<'a> {
    fn new(mut streams: Vec<Box<dyn Iterator<Item = Program> + 'a>>) -> Self {
        let mut heap = BinaryHeap::new();
        let mut pending = Vec::with_capacity(streams.len());
        for (i, s) in streams.iter_mut().enumerate() {
            let p = s.next();
            if let Some(p) = &p {
                heap.push(Head {
                    score: p.score,
                    choices: p.choices.clone(),
                    stream: i,
                });
            }
            pending.push(p);
        }
        MergedStreams {
            streams,
            heap,
            pending,
            last: None,
        }
    }
}

impl Iterator for MergedStreams<'_> {
    type Item = Program;

    fn next(&mut self) -> Option<Program> {
        let head = self.heap.pop()?;
        let out = self.pending[head.stream].take().expect("heap entry has a pending program");
        let next = self.streams[head.stream].next();
        if let Some(p) = &next {
            self.heap.push(Head {
                score: p.score,
                choices: p.choices.clone(),
                stream: head.stream,
            });
        }
        self.pending[head.stream] = next;
        assert!(
            self.last.as_ref() != Some(&out.choices),
            "scaffold streams overlap; configurations must partition candidates"
        );
        self.last = Some(out.choices.clone());
        Some(out)
    }
}

/// Hierarchical scaffold search: a lazy stream of valid programs in score
/// order, drawn from the top `budget.k` scaffolds found with beam width
/// `budget.w`. Take `budget.b` items from it.
pub fn hierarchical_search<'a>(
    problem: &'a Problem,
    prepared: &'a PreparedProblem,
    budget: &Budget,
    verifier: &Verifier,
) -> Result<MergedStreams<'a>, SearchError> {
    let regime = verifier.regime;
    let dists = Arc::new(config_distributions(problem, prepared, regime)?);
    let scaffolds = scaffold_beam(&dists, &prepared.indents, budget.w, budget.k, verifier);
    log::debug!("{}: {} scaffolds under {:?}", problem.id, scaffolds.len(), regime);
    if scaffolds.is_empty() {
        return Err(SearchError::EmptyScaffolds);
    }
    let streams = scaffolds
        .into_iter()
        .map(|s| {
            let stream = programs_from_scaffold(problem, &dists, &s);
            let checked = stream.inspect(move |p| {
                if cfg!(debug_assertions) {
                    let uncounted = Verifier::new(regime);
                    if let Err(v) = prepared.check_choices(&p.choices, &uncounted) {
                        panic!("scaffold program failed its own constraints: {v}");
                    }
                }
            });
            Box::new(checked) as Box<dyn Iterator<Item = Program> + 'a>
        })
        .collect();
    Ok(MergedStreams::new(streams))
}

/// Symbol-table hierarchical search, falling back to syntactic constraints
/// when no scaffold survives. Returns the programs and the regime that
/// produced them.
pub fn backoff_search(problem: &Problem, prepared: &PreparedProblem, budget: &Budget) -> (Vec<Program>, Option<Regime>, u64) {
    let mut calls = 0;
    for regime in [Regime::SymTable, Regime::Syntactic] {
        let verifier = Verifier::new(regime);
        let result = hierarchical_search(problem, prepared, budget, &verifier).map(|s| s.take(budget.b).collect::<Vec<_>>());
        calls += verifier.calls();
        match result {
            Ok(programs) => return (programs, Some(regime), calls),
            Err(e) => log::debug!("{}: {:?} search failed: {e}", problem.id, regime),
        }
    }
    (Vec::new(), None, calls)
}

/// Draws unconstrained programs best first and keeps those that pass the
/// verifier, rejecting early on the first bad line. Stops after `limit`
/// valid programs or when `quota` verifier calls have been spent.
pub fn brute_force_quota(problem: &Problem, prepared: &PreparedProblem, verifier: &Verifier, quota: u64, limit: usize) -> (Vec<Program>, u64) {
    let start = verifier.calls();
    let spent = |v: &Verifier| v.calls() - start;
    let mut found = Vec::new();
    if quota == 0 || limit == 0 {
        return (found, 0);
    }
    'draws: for program in best_first(problem) {
        let mut state = ScaffoldState::new();
        for (l, &c) in program.choices.iter().enumerate() {
            if spent(verifier) >= quota {
                break 'draws;
            }
            state = match prepared.config(l, c) {
                Ok(cfg) => match verifier.extend(&state, cfg, prepared.indents[l]) {
                    Ok(s) => s,
                    Err(_) => continue 'draws,
                },
                Err(e) => {
                    verifier.reject_unparseable(l, e);
                    continue 'draws;
                }
            };
        }
        if state.is_complete(problem.len()).unwrap_or(false) {
            found.push(program);
            if found.len() >= limit {
                break;
            }
        }
    }
    (found, spent(verifier))
}

/// Result of a driver-level search.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub programs: Vec<Program>,
    /// Regime that produced the programs; `None` for unconstrained search
    /// or when nothing was found.
    pub regime: Option<Regime>,
    pub verifier_calls: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    #[default]
    Hierarchical,
    Beam,
}

/// Runs one search under a constraint ladder setting.
pub fn search(problem: &Problem, constraint: Constraint, algorithm: Algorithm, budget: &Budget, opts: &ParserOptions) -> Outcome {
    if constraint == Constraint::None {
        return Outcome {
            programs: best_first(problem).take(budget.b).collect(),
            regime: None,
            verifier_calls: 0,
        };
    }
    let prepared = PreparedProblem::new(problem, opts);
    let single = |regime: Regime| {
        let verifier = Verifier::new(regime);
        let programs: Result<Vec<Program>, SearchError> = match algorithm {
            Algorithm::Hierarchical => hierarchical_search(problem, &prepared, budget, &verifier).map(|s| s.take(budget.b).collect()),
            Algorithm::Beam => Ok(beam_search(problem, &prepared, budget.w, budget.b, &verifier)),
        };
        let programs = programs.unwrap_or_else(|e| {
            log::debug!("{}: {e}", problem.id);
            Vec::new()
        });
        (programs, verifier.calls())
    };
    match constraint {
        Constraint::None => unreachable!(),
        Constraint::Syntactic | Constraint::SymTable => {
            let regime = if constraint == Constraint::Syntactic {
                Regime::Syntactic
            } else {
                Regime::SymTable
            };
            let (programs, calls) = single(regime);
            Outcome {
                regime: (!programs.is_empty()).then_some(regime),
                programs,
                verifier_calls: calls,
            }
        }
        Constraint::Backoff => match algorithm {
            Algorithm::Hierarchical => {
                let (programs, regime, calls) = backoff_search(problem, &prepared, budget);
                Outcome {
                    programs,
                    regime,
                    verifier_calls: calls,
                }
            }
            Algorithm::Beam => {
                let (programs, calls) = single(Regime::SymTable);
                if !programs.is_empty() {
                    return Outcome {
                        programs,
                        regime: Some(Regime::SymTable),
                        verifier_calls: calls,
                    };
                }
                let (programs, more) = single(Regime::Syntactic);
                Outcome {
                    regime: (!programs.is_empty()).then_some(Regime::Syntactic),
                    programs,
                    verifier_calls: calls + more,
                }
            }
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{CodePiece, PseudoLine};
    use crate::scaffold::check_program;
    use crate::synth;

    /// Exhaustive ranked enumeration of the product space.
    fn enumerate_all(problem: &Problem) -> Vec<(f64, Vec<usize>)> {
        let mut out: Vec<(f64, Vec<usize>)> = vec![(0.0, vec![])];
        for slot in &problem.candidates {
            out = out
                .into_iter()
                .flat_map(|(_, prefix)| {
                    slot.iter().map(move |p| {
                        let mut c = prefix.clone();
                        c.push(p.cand);
                        (0.0, c)
                    })
                })
                .collect();
        }
        for (score, c) in &mut out {
            *score = c.iter().enumerate().map(|(l, &k)| problem.candidates[l][k].prob.ln()).fold(0.0, |a, x| a + x);
        }
        out.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        out
    }

    fn problem(lines: &[(u32, &[(&str, f64)])]) -> Problem {
        synth::problem_with_candidates("t", lines)
    }

    #[test]
    fn best_first_small_example() {
        let p = problem(&[(0, &[("a;", 0.6), ("b;", 0.4)]), (0, &[("c;", 0.7), ("d;", 0.3)])]);
        let top: Vec<f64> = best_first(&p).take(3).map(|q| q.prob()).collect();
        let expect = [0.42, 0.28, 0.18];
        for (got, want) in top.iter().zip(expect) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
        assert_eq!(best_first(&p).count(), 4);
    }

    #[test]
    fn best_first_single_line_in_rank_order() {
        let p = problem(&[(0, &[("a;", 0.5), ("b;", 0.3), ("c;", 0.2)])]);
        let order: Vec<Vec<usize>> = best_first(&p).map(|q| q.choices).collect();
        assert_eq!(order, vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn kbest_handles_ties_and_empty() {
        let lists = vec![vec![(0, -1.0), (1, -1.0)], vec![(0, -1.0), (1, -1.0)]];
        let got: Vec<Vec<usize>> = KBest::new(lists).map(|x| x.0).collect();
        assert_eq!(got, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(KBest::new(vec![vec![(0, 0.0)], vec![]]).count(), 0);
        assert_eq!(KBest::new(vec![]).collect::<Vec<_>>(), vec![(vec![], 0.0)]);
    }

    #[test]
    fn grouping_sums_mass() {
        let p = problem(&[(0, &[("int a = 1;", 0.5), ("a += 1;", 0.4), ("a -= 1;", 0.1)])]);
        let prepared = PreparedProblem::new(&p, &ParserOptions::default());
        let d = config_distributions(&p, &prepared, Regime::SymTable).unwrap();
        assert_eq!(d[0].len(), 2);
        assert!((d[0][0].mass - 0.5).abs() < 1e-12);
        assert!((d[0][1].mass - 0.5).abs() < 1e-12);
        assert_eq!(d[0][0].members, vec![0]);
        assert_eq!(d[0][1].members, vec![1, 2]);

        let q = problem(&[(0, &[("x = 1;", 0.3), ("y = 2;", 0.2)])]);
        let prepared = PreparedProblem::new(&q, &ParserOptions::default());
        let d = config_distributions(&q, &prepared, Regime::SymTable).unwrap();
        assert_eq!(d[0].len(), 2);
        let d = config_distributions(&q, &prepared, Regime::Syntactic).unwrap();
        assert_eq!(d[0].len(), 1);
        assert!((d[0][0].mass - 0.5).abs() < 1e-12);
    }

    #[test]
    fn empty_line_is_an_error() {
        let p = problem(&[(0, &[("if x {", 1.0)])]);
        let prepared = PreparedProblem::new(&p, &ParserOptions::default());
        assert_eq!(
            config_distributions(&p, &prepared, Regime::Syntactic),
            Err(SearchError::EmptyLine { line: 0 })
        );
    }

    fn main_wrapped(body: &[&[(&str, f64)]]) -> Problem {
        let mut lines: Vec<(u32, &[(&str, f64)])> = vec![(0, &[("int main() {", 1.0)])];
        for b in body {
            lines.push((1, b));
        }
        lines.push((0, &[("}", 1.0)]));
        problem(&lines)
    }

    #[test]
    fn declared_scaffold_admits_declaration() {
        let p = main_wrapped(&[
            &[("N = 222222;", 0.7), ("int N = 222222;", 0.3)],
            &[("cout << N;", 1.0)],
        ]);
        let prepared = PreparedProblem::new(&p, &ParserOptions::default());
        let v = Verifier::new(Regime::SymTable);
        let got: Vec<Program> = hierarchical_search(&p, &prepared, &Budget::default(), &v).unwrap().collect();
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].choices, vec![0, 1, 0, 0]);
        assert!(got[0].code.contains("int N = 222222;"));
        // without constraints the undeclared version wins
        assert_eq!(best_first(&p).next().unwrap().choices, vec![0, 0, 0, 0]);
    }

    #[test]
    fn interleaved_scaffolds_merge_in_order() {
        // two scaffolds: (decl, use) and (use-of-global, use)
        let p = problem(&[
            (0, &[("int g;", 1.0)]),
            (0, &[("int a;", 0.5), ("g = 1;", 0.3), ("g = 2;", 0.2)]),
            (0, &[("g++;", 0.6), ("g--;", 0.4)]),
        ]);
        let prepared = PreparedProblem::new(&p, &ParserOptions::default());
        let v = Verifier::new(Regime::SymTable);
        let got: Vec<(f64, Vec<usize>)> = hierarchical_search(&p, &prepared, &Budget { b: 10, w: 10, k: 10 }, &v)
            .unwrap()
            .map(|q| (q.score, q.choices))
            .collect();
        let want = enumerate_all(&p);
        assert_eq!(got, want);
        let groups: Vec<usize> = got.iter().map(|(_, c)| usize::from(c[1] > 0)).collect();
        assert!(groups.windows(2).any(|w| w[0] != w[1]), "streams interleave");
    }

    #[test]
    fn no_program_when_every_piece_uses_undeclared() {
        let p = main_wrapped(&[&[("x = 1;", 0.5), ("x = 2;", 0.5)]]);
        let prepared = PreparedProblem::new(&p, &ParserOptions::default());
        let v = Verifier::new(Regime::SymTable);
        assert!(beam_search(&p, &prepared, 100, 100, &v).is_empty());
        assert!(matches!(
            hierarchical_search(&p, &prepared, &Budget::default(), &v),
            Err(SearchError::EmptyScaffolds)
        ));
        let (programs, regime, _) = backoff_search(&p, &prepared, &Budget::default());
        assert_eq!(regime, Some(Regime::Syntactic));
        assert_eq!(programs.len(), 2);
        for q in &programs {
            assert!(check_program(q, &p, Regime::Syntactic).is_ok());
        }
    }

    #[test]
    fn backoff_prefers_symtable_and_can_fail() {
        let p = main_wrapped(&[&[("int x = 1;", 0.5), ("x = 2;", 0.5)]]);
        let prepared = PreparedProblem::new(&p, &ParserOptions::default());
        let (programs, regime, _) = backoff_search(&p, &prepared, &Budget::default());
        assert_eq!(regime, Some(Regime::SymTable));
        assert_eq!(programs.len(), 1);

        let bad = problem(&[(0, &[("}", 1.0)])]);
        let prepared = PreparedProblem::new(&bad, &ParserOptions::default());
        let (programs, regime, _) = backoff_search(&bad, &prepared, &Budget::default());
        assert!(programs.is_empty());
        assert_eq!(regime, None);
    }

    #[test]
    fn single_valid_config_per_line() {
        let p = main_wrapped(&[&[("int a = 1;", 0.4), ("int a = 2;", 0.4)], &[("a++;", 0.5), ("++a;", 0.5)]]);
        let prepared = PreparedProblem::new(&p, &ParserOptions::default());
        let d = config_distributions(&p, &prepared, Regime::SymTable).unwrap();
        let v = Verifier::new(Regime::SymTable);
        let s = scaffold_beam(&d, &prepared.indents, 10, 10, &v);
        assert_eq!(s.len(), 1);
        let want = 0.8f64.ln() + 1.0f64.ln();
        assert!((s[0].logscore - want).abs() < 1e-12);
    }

    #[test]
    fn low_mass_scaffold_found_with_k1() {
        // the heavy configuration on line 1 never validates
        let p = main_wrapped(&[&[("y = 1;", 0.9), ("int y = 1;", 0.1)], &[("y++;", 1.0)]]);
        let prepared = PreparedProblem::new(&p, &ParserOptions::default());
        let d = config_distributions(&p, &prepared, Regime::SymTable).unwrap();
        let s = scaffold_beam(&d, &prepared.indents, 4, 1, &Verifier::new(Regime::SymTable));
        assert_eq!(s.len(), 1);
        assert_eq!(d[1][s[0].groups[1]].members, vec![1]);
    }

    #[test]
    fn brute_force_quota_accounting() {
        let p = main_wrapped(&[&[("x = 1;", 0.6), ("int x = 1;", 0.4)], &[("x++;", 1.0)]]);
        let prepared = PreparedProblem::new(&p, &ParserOptions::default());
        let v = Verifier::new(Regime::SymTable);
        assert_eq!(brute_force_quota(&p, &prepared, &v, 0, 1), (vec![], 0));
        let (found, calls) = brute_force_quota(&p, &prepared, &v, 1000, 1);
        assert_eq!(found.len(), 1);
        // first draw rejected at line 1, second passes all four lines
        assert_eq!(calls, 2 + 4);
        let v = Verifier::new(Regime::SymTable);
        let (found, calls) = brute_force_quota(&p, &prepared, &v, 3, 1);
        assert!(found.is_empty());
        assert_eq!(calls, 3);
    }

    #[test]
    fn unparseable_pieces_are_skipped_in_constrained_search() {
        let p = main_wrapped(&[&[("int x = 1", 0.9), ("int x = 1;", 0.1)]]);
        let out = search(&p, Constraint::SymTable, Algorithm::Hierarchical, &Budget::default(), &ParserOptions::default());
        assert_eq!(out.programs.len(), 1);
        assert_eq!(out.programs[0].choices[1], 1);
        let out = search(&p, Constraint::None, Algorithm::Hierarchical, &Budget::default(), &ParserOptions::default());
        assert_eq!(out.programs[0].choices[1], 0);
    }

    #[test]
    fn enumerate_all_covers_product() {
        let p = Problem {
            id: "e".into(),
            lines: (0..2)
                .map(|i| PseudoLine {
                    index: i,
                    indent: 0,
                    text: String::new(),
                    gold: None,
                })
                .collect(),
            candidates: (0..2)
                .map(|l| {
                    (0..3)
                        .map(|c| CodePiece {
                            line: l,
                            cand: c,
                            code: ";".into(),
                            prob: 1.0 / 3.0,
                        })
                        .collect()
                })
                .collect(),
        };
        let all = enumerate_all(&p);
        assert_eq!(all.len(), 9);
        assert_eq!(all[0].1, vec![0, 0]);
        assert_eq!(all[8].1, vec![2, 2]);
    }
}
