//! Synthetic problems: hand-written programs turned into problems,
//! noisy candidate lists, random small instances and set-packing reductions.

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::ingest::{CodePiece, Problem, PseudoLine};
use crate::pe_parser::{tokenize, TokenKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthError {
    #[error("empty subset family")]
    EmptyFamily,
    #[error("packing size must be at least 1")]
    ZeroLength,
    #[error("element {element} outside universe 1..={universe}")]
    OutsideUniverse { element: usize, universe: usize },
    #[error("line {line}: indentation must be a multiple of two spaces")]
    Indent { line: usize },
}

fn pseudo_lines(lines: impl Iterator<Item = (u32, Option<String>)>) -> Vec<PseudoLine> {
    lines
        .enumerate()
        .map(|(index, (indent, gold))| PseudoLine {
            index,
            indent,
            text: String::new(),
            gold,
        })
        .collect()
}

/// Sorts a line's pieces by descending probability and renumbers ranks.
pub fn rank_pieces(line: usize, mut pieces: Vec<(String, f64)>) -> Vec<CodePiece> {
    pieces.sort_by(|a, b| b.1.total_cmp(&a.1));
    pieces
        .into_iter()
        .enumerate()
        .map(|(cand, (code, prob))| CodePiece { line, cand, code, prob })
        .collect()
}

/// A problem whose only candidate on each line is the given code, which is
/// also the gold translation.
pub fn problem_from_lines(id: &str, lines: &[(&str, u32)]) -> Problem {
    Problem {
        id: id.to_string(),
        lines: pseudo_lines(lines.iter().map(|(code, indent)| (*indent, Some(code.to_string())))),
        candidates: lines
            .iter()
            .enumerate()
            .map(|(l, (code, _))| rank_pieces(l, vec![(code.to_string(), 1.0)]))
            .collect(),
    }
}

/// A problem from explicit `(indent, [(code, prob)])` lines, without gold.
pub fn problem_with_candidates(id: &str, lines: &[(u32, &[(&str, f64)])]) -> Problem {
    Problem {
        id: id.to_string(),
        lines: pseudo_lines(lines.iter().map(|(indent, _)| (*indent, None))),
        candidates: lines
            .iter()
            .enumerate()
            .map(|(l, (_, pieces))| rank_pieces(l, pieces.iter().map(|(c, p)| (c.to_string(), *p)).collect()))
            .collect(),
    }
}

/// Rough pseudocode for a line of code; empty for brace-only lines.
pub fn describe(code: &str) -> String {
    let Ok(tokens) = tokenize(code) else {
        return code.trim().to_string();
    };
    let words: Vec<&str> = tokens
        .iter()
        .filter_map(|t| match t.text.as_str() {
            ";" | "{" | "}" | "(" | ")" => None,
            "==" => Some("equals"),
            "!=" => Some("is not"),
            "&&" => Some("and"),
            "||" => Some("or"),
            "=" => Some("set to"),
            "+=" => Some("increase by"),
            "-=" => Some("decrease by"),
            "++" => Some("increment"),
            "--" => Some("decrement"),
            "<<" => Some("print"),
            ">>" => Some("read"),
            other => Some(other),
        })
        .collect();
    words.join(" ")
}

/// A problem whose gold translation is a 2-space indented source file.
/// Blank lines are skipped; the only candidate on each line is the gold.
pub fn problem_from_source(id: &str, src: &str) -> Result<Problem, SynthError> {
    let mut lines = Vec::new();
    for (n, raw) in src.lines().enumerate() {
        if raw.trim().is_empty() {
            continue;
        }
        let spaces = raw.len() - raw.trim_start_matches(' ').len();
        if spaces % 2 != 0 || raw[spaces..].starts_with('\t') {
            return Err(SynthError::Indent { line: n + 1 });
        }
        lines.push(((spaces / 2) as u32, raw.trim().to_string()));
    }
    let mut problem = Problem {
        id: id.to_string(),
        lines: pseudo_lines(lines.iter().map(|(i, code)| (*i, Some(code.clone())))),
        candidates: lines
            .iter()
            .enumerate()
            .map(|(l, (_, code))| rank_pieces(l, vec![(code.clone(), 1.0)]))
            .collect(),
    };
    for line in &mut problem.lines {
        line.text = describe(line.gold.as_deref().unwrap_or(""));
    }
    Ok(problem)
}

const NAMES: [&str; 6] = ["a", "b", "n", "x", "y", "s"];

#[derive(Clone, Copy, PartialEq)]
enum Open {
    Loop,
    If,
    Else,
    Do,
}

/// A random small program that passes every constraint, as
/// `(code, indent)` lines. Nesting stays shallow so `len` lines suffice to
/// close every scope.
pub fn random_program<R: Rng>(rng: &mut R, len: usize) -> Vec<(String, u32)> {
    let mut out = Vec::with_capacity(len);
    let mut scopes: Vec<Vec<String>> = vec![Vec::new()];
    let mut opens: Vec<Open> = Vec::new();
    let mut loop_vars = 0;

    fn visible(scopes: &[Vec<String>]) -> Vec<String> {
        let mut v: Vec<String> = scopes.iter().flatten().cloned().collect();
        v.sort();
        v.dedup();
        v
    }
    fn operand<R: Rng>(rng: &mut R, vis: &[String]) -> String {
        match vis.choose(rng) {
            Some(n) if rng.gen_bool(0.7) => n.clone(),
            _ => rng.gen_range(0..10).to_string(),
        }
    }

    for step in 0..len {
        let remaining = len - step;
        let depth = opens.len();
        let indent = depth as u32;
        if depth > 0 && remaining <= depth {
            let closed = opens.pop().unwrap();
            scopes.pop();
            let line = if closed == Open::Do {
                let vis = visible(&scopes);
                format!("}} while ({} > 0);", operand(rng, &vis))
            } else {
                "}".to_string()
            };
            out.push((line, indent - 1));
            continue;
        }
        let vis = visible(&scopes);
        let fresh: Vec<&str> = NAMES
            .iter()
            .copied()
            .filter(|n| !scopes.last().unwrap().iter().any(|d| d == n))
            .collect();
        let can_open = remaining >= depth + 3 && depth < 3;
        let mut moves = vec![0u8];
        if !vis.is_empty() {
            moves.extend([1, 1, 2]);
        }
        if can_open {
            moves.extend([3, 4, 5, 6]);
        }
        if depth > 0 {
            moves.push(7);
            if opens[depth - 1] == Open::If && remaining >= depth + 2 {
                moves.push(8);
            }
        }
        if !vis.is_empty() && remaining > depth {
            moves.push(9);
        }
        let line = match *moves.choose(rng).unwrap() {
            0 if !fresh.is_empty() => {
                let name = fresh.choose(rng).unwrap().to_string();
                let line = format!("int {name} = {};", operand(rng, &vis));
                scopes.last_mut().unwrap().push(name);
                line
            }
            0 => ";".to_string(),
            1 => {
                let target = vis.choose(rng).unwrap();
                let op = ["=", "+=", "-=", "*="].choose(rng).unwrap();
                format!("{target} {op} {} + {};", operand(rng, &vis), operand(rng, &vis))
            }
            2 => format!("cout << {} << endl;", operand(rng, &vis)),
            3 => {
                let i = format!("i{loop_vars}");
                loop_vars += 1;
                let bound = operand(rng, &vis);
                opens.push(Open::Loop);
                scopes.push(vec![i.clone()]);
                format!("for (int {i} = 0; {i} < {bound}; {i}++) {{")
            }
            4 => {
                opens.push(Open::If);
                scopes.push(Vec::new());
                format!("if ({} > {}) {{", operand(rng, &vis), operand(rng, &vis))
            }
            5 => {
                opens.push(Open::Loop);
                scopes.push(Vec::new());
                format!("while ({} < {}) {{", operand(rng, &vis), operand(rng, &vis))
            }
            6 => {
                opens.push(Open::Do);
                scopes.push(Vec::new());
                "do {".to_string()
            }
            7 => {
                let closed = opens.pop().unwrap();
                scopes.pop();
                let line = if closed == Open::Do {
                    let vis = visible(&scopes);
                    format!("}} while ({} > 0);", operand(rng, &vis))
                } else {
                    "}".to_string()
                };
                out.push((line, indent - 1));
                continue;
            }
            8 => {
                *opens.last_mut().unwrap() = Open::Else;
                *scopes.last_mut().unwrap() = Vec::new();
                out.push(("} else {".to_string(), indent - 1));
                continue;
            }
            _ => {
                let target = vis.choose(rng).unwrap();
                format!("if ({} > 0) {target}++;", operand(rng, &vis))
            }
        };
        out.push((line, indent));
    }
    out
}

fn join_tokens(tokens: &[String]) -> String {
    tokens.join(" ")
}

/// Plausible wrong or equivalent variants of one line of code.
pub fn mutations<R: Rng>(rng: &mut R, code: &str) -> Vec<String> {
    let mut out = Vec::new();
    let trimmed = code.trim();
    if let Some(rest) = trimmed.strip_prefix("int ") {
        out.push(rest.to_string());
    } else if trimmed.ends_with(';') && !trimmed.starts_with('}') {
        let first = trimmed.split_whitespace().next().unwrap_or("");
        if NAMES.contains(&first) {
            out.push(format!("int {trimmed}"));
        }
    }
    let Ok(tokens) = tokenize(trimmed) else {
        return out;
    };
    let texts: Vec<String> = tokens.iter().map(|t| t.text.clone()).collect();
    let idents: Vec<usize> = tokens
        .iter()
        .enumerate()
        .filter(|(_, t)| t.kind == TokenKind::Ident && NAMES.contains(&t.text.as_str()))
        .map(|(i, _)| i)
        .collect();
    if let Some(&i) = idents.choose(rng) {
        let other = NAMES.iter().filter(|n| **n != texts[i]).collect::<Vec<_>>();
        let mut t = texts.clone();
        t[i] = other.choose(rng).unwrap().to_string();
        out.push(join_tokens(&t));
    }
    let numbers: Vec<usize> = tokens
        .iter()
        .enumerate()
        .filter(|(_, t)| t.kind == TokenKind::Number)
        .map(|(i, _)| i)
        .collect();
    if let Some(&i) = numbers.choose(rng) {
        let mut t = texts.clone();
        t[i] = rng.gen_range(10..100).to_string();
        out.push(join_tokens(&t));
    }
    for (from, to) in [("+=", "-="), ("<", "<="), (">", ">="), ("++", "--")] {
        if let Some(i) = texts.iter().position(|t| t == from) {
            let mut t = texts.clone();
            t[i] = to.to_string();
            out.push(join_tokens(&t));
            break;
        }
    }
    if let Some(stripped) = trimmed.strip_suffix(';') {
        out.push(stripped.to_string());
    }
    if let Some(stripped) = trimmed.strip_suffix(" {") {
        out.push(stripped.to_string());
    } else if trimmed.starts_with("for") || trimmed.starts_with("if") || trimmed.starts_with("while") {
        out.push(format!("{trimmed} {{"));
    }
    out.retain(|m| m.trim() != trimmed);
    out.sort();
    out.dedup();
    out
}

/// `c` candidates per line: the gold line plus variants of it and of other
/// lines, with random probabilities. The gold piece is present on every
/// line but not always ranked first. Lines without pseudocode text give
/// the translator nothing to go on, so their gold piece is made unlikely.
pub fn noisy_candidates<R: Rng>(rng: &mut R, lines: &[PseudoLine], c: usize) -> Vec<Vec<CodePiece>> {
    let gold: Vec<String> = lines.iter().map(|l| l.gold.clone().unwrap_or_default()).collect();
    gold.iter()
        .enumerate()
        .map(|(l, code)| {
            let mut pool = mutations(rng, code);
            for _ in 0..2 {
                if let Some(other) = gold.choose(rng) {
                    if other != code {
                        pool.push(other.clone());
                    }
                }
            }
            pool.sort();
            pool.dedup();
            pool.shuffle(rng);
            let mut weight = rng.gen_range(0.05..1.0);
            if lines[l].text.is_empty() {
                weight *= 0.1;
            }
            let mut pieces = vec![(code.clone(), weight)];
            for m in pool.into_iter().take(c.saturating_sub(1)) {
                pieces.push((m, rng.gen_range(0.05..1.0)));
            }
            normalize(&mut pieces);
            rank_pieces(l, pieces)
        })
        .collect()
}

fn normalize(pieces: &mut [(String, f64)]) {
    let total: f64 = pieces.iter().map(|p| p.1).sum();
    for p in pieces {
        p.1 /= total;
    }
}

/// A random instance with at most `max_l` lines and `max_c` candidates per
/// line, built around a valid program so that the constraints matter.
/// Probabilities are sometimes drawn from a coarse grid to create ties.
pub fn random_instance<R: Rng>(rng: &mut R, id: &str, max_l: usize, max_c: usize) -> Problem {
    let len = rng.gen_range(1..=max_l);
    let program = random_program(rng, len);
    let coarse = rng.gen_bool(0.3);
    let candidates = program
        .iter()
        .enumerate()
        .map(|(l, (code, _))| {
            let c = rng.gen_range(1..=max_c);
            let mut pool = mutations(rng, code);
            if rng.gen_bool(0.3) {
                pool.push(program.choose(rng).unwrap().0.clone());
            }
            pool.shuffle(rng);
            let mut codes = vec![code.clone()];
            codes.extend(pool.into_iter().take(c - 1));
            if rng.gen_bool(0.2) {
                let last = codes.len() - 1;
                codes.swap(0, last);
            }
            let mut pieces: Vec<(String, f64)> = codes
                .into_iter()
                .map(|code| {
                    let p = if coarse {
                        f64::from(rng.gen_range(1..=4u8)) / 10.0
                    } else {
                        rng.gen_range(0.01..1.0)
                    };
                    (code, p)
                })
                .collect();
            if !coarse {
                normalize(&mut pieces);
            }
            rank_pieces(l, pieces)
        })
        .collect();
    Problem {
        id: id.to_string(),
        lines: pseudo_lines(program.iter().map(|(code, indent)| (*indent, Some(code.clone())))),
        candidates,
    }
}

fn declarations(subset: &[usize]) -> String {
    if subset.is_empty() {
        return ";".to_string();
    }
    subset.iter().map(|v| format!("int v{v};")).collect::<Vec<_>>().join(" ")
}

fn check_family(universe: usize, family: &[Vec<usize>], l: usize) -> Result<(), SynthError> {
    if family.is_empty() {
        return Err(SynthError::EmptyFamily);
    }
    if l == 0 {
        return Err(SynthError::ZeroLength);
    }
    for &element in family.iter().flatten() {
        if element == 0 || element > universe {
            return Err(SynthError::OutsideUniverse { element, universe });
        }
    }
    Ok(())
}

fn packing_problem(id: &str, l: usize, slot: impl Fn(usize) -> Vec<(String, f64)>) -> Problem {
    let mut candidates = vec![rank_pieces(0, vec![("int main() {".to_string(), 1.0)])];
    for i in 1..=l {
        candidates.push(rank_pieces(i, slot(i)));
    }
    candidates.push(rank_pieces(l + 1, vec![("}".to_string(), 1.0)]));
    let mut indents = vec![0];
    indents.extend(std::iter::repeat(1).take(l));
    indents.push(0);
    Problem {
        id: id.to_string(),
        lines: pseudo_lines(indents.into_iter().map(|i| (i, None))),
        candidates,
    }
}

/// Reduces set packing to program search: each of the `l` body lines may
/// declare the elements of any subset in `family`, so a valid program is a
/// choice of `l` pairwise disjoint subsets. Elements are numbered from 1.
pub fn gen_setpacking(universe: usize, family: &[Vec<usize>], l: usize) -> Result<Problem, SynthError> {
    check_family(universe, family, l)?;
    let p = 1.0 / family.len() as f64;
    Ok(packing_problem("setpacking", l, |_| {
        family.iter().map(|s| (declarations(s), p)).collect()
    }))
}

/// A random set-packing instance within the given bounds:
/// `(universe, family, l)`. Subsets are never empty.
pub fn random_setpacking<R: Rng>(rng: &mut R, max_universe: usize, max_family: usize, max_l: usize) -> (usize, Vec<Vec<usize>>, usize) {
    let universe = rng.gen_range(1..=max_universe);
    let family = (0..rng.gen_range(1..=max_family))
        .map(|_| {
            let mut s: Vec<usize> = (1..=universe).filter(|_| rng.gen_bool(0.35)).collect();
            if s.is_empty() {
                s.push(rng.gen_range(1..=universe));
            }
            s
        })
        .collect();
    (universe, family, rng.gen_range(1..=max_l))
}

/// A set-packing instance that defeats unconstrained ranking: the most
/// probable subsets all share element 1, so any program taking two of them
/// redeclares `v1`, while the `disjoint >= l` low-probability subsets pack.
pub fn adversarial_setpacking<R: Rng>(rng: &mut R, l: usize, poisoned: usize, disjoint: usize) -> Problem {
    assert!(disjoint >= l, "need at least l disjoint subsets");
    let mut next = 2;
    let mut take = |n: usize| {
        let s: Vec<usize> = (next..next + n).collect();
        next += n;
        s
    };
    let clean: Vec<Vec<usize>> = (0..disjoint).map(|_| take(rng.gen_range(1..=2))).collect();
    let spoiled: Vec<Vec<usize>> = (0..poisoned)
        .map(|_| {
            let mut s = vec![1];
            s.extend(take(rng.gen_range(0..=1)));
            s
        })
        .collect();
    let heavy = 0.6 / poisoned as f64;
    let light = 0.4 / disjoint as f64;
    let mut pieces = Vec::new();
    for s in &spoiled {
        pieces.push((declarations(s), heavy * rng.gen_range(0.9..1.0)));
    }
    for s in &clean {
        pieces.push((declarations(s), light * rng.gen_range(0.9..1.0)));
    }
    packing_problem("adversarial", l, |_| pieces.clone())
}

/// A large instance for timing: `l` lines with `c` candidates each, where
/// every body line assigns to one of four globals, so scaffolds differ only
/// by the assigned variable and each holds many programs.
pub fn large_instance<R: Rng>(rng: &mut R, l: usize, c: usize) -> Problem {
    assert!(l >= 3);
    let vars = ["p", "q", "r", "t"];
    let mut candidates = vec![rank_pieces(0, vec![("int p = 0, q = 0, r = 0, t = 0;".to_string(), 1.0)])];
    candidates.push(rank_pieces(1, vec![("int main() {".to_string(), 1.0)]));
    for line in 2..l - 1 {
        let mut pieces: Vec<(String, f64)> = (0..c)
            .map(|i| {
                let v = vars[i % vars.len()];
                (format!("{v} = {v} + {i};"), rng.gen_range(0.01..1.0))
            })
            .collect();
        normalize(&mut pieces);
        candidates.push(rank_pieces(line, pieces));
    }
    candidates.push(rank_pieces(l - 1, vec![("}".to_string(), 1.0)]));
    let mut indents = vec![0, 0];
    indents.extend(std::iter::repeat(1).take(l - 3));
    indents.push(0);
    Problem {
        id: "large".to_string(),
        lines: pseudo_lines(indents.into_iter().map(|i| (i, None))),
        candidates,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scaffold::{check_program, Regime};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_programs_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for len in 1..=12 {
            for _ in 0..50 {
                let lines = random_program(&mut rng, len);
                assert_eq!(lines.len(), len);
                let refs: Vec<(&str, u32)> = lines.iter().map(|(c, i)| (c.as_str(), *i)).collect();
                let p = problem_from_lines("r", &refs);
                let program = p.program(&vec![0; len]).unwrap();
                assert!(check_program(&program, &p, Regime::SymTable).is_ok(), "{lines:?}");
            }
        }
    }

    #[test]
    fn random_instances_respect_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for i in 0..100 {
            let p = random_instance(&mut rng, &format!("r{i}"), 6, 4);
            p.validate().unwrap();
            assert!(p.len() <= 6);
            assert!(p.candidates.iter().all(|s| !s.is_empty() && s.len() <= 4));
        }
    }

    #[test]
    fn setpacking_layout() {
        let p = gen_setpacking(4, &[vec![1, 2], vec![3, 4], vec![1, 3]], 2).unwrap();
        assert_eq!(p.len(), 4);
        assert_eq!(p.indents(), vec![0, 1, 1, 0]);
        assert_eq!(p.candidates[1][0].code, "int v1; int v2;");
        assert!(p.candidates[1].iter().all(|c| (c.prob - 1.0 / 3.0).abs() < 1e-12));
        assert_eq!(gen_setpacking(4, &[], 2).unwrap_err(), SynthError::EmptyFamily);
        assert_eq!(
            gen_setpacking(2, &[vec![3]], 1).unwrap_err(),
            SynthError::OutsideUniverse { element: 3, universe: 2 }
        );
        let e = gen_setpacking(2, &[vec![]], 1).unwrap();
        assert_eq!(e.candidates[1][0].code, ";");
    }

    #[test]
    fn mutations_differ_from_source() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = mutations(&mut rng, "int a = b + 1;");
        assert!(m.contains(&"a = b + 1;".to_string()));
        assert!(m.iter().all(|x| x != "int a = b + 1;"));
        let m = mutations(&mut rng, "a += 1;");
        assert!(m.contains(&"int a += 1;".to_string()));
    }

    #[test]
    fn adversarial_top_program_is_invalid() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = adversarial_setpacking(&mut rng, 4, 3, 5);
        p.validate().unwrap();
        let top = p.program(&vec![0; p.len()]).unwrap();
        assert!(check_program(&top, &p, Regime::SymTable).is_err());
    }
}
