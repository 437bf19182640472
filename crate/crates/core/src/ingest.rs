//! Problem and candidate files, plus the program score model.
//!
//! Problem files hold one record per pseudocode line:
//! `index<TAB>indent<TAB>text<TAB>gold`. Candidate files hold one record per
//! code piece: `line<TAB>rank<TAB>prob<TAB>code`. Lines starting with `#` are
//! comments in both formats.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("format error at line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("rank {rank} out of range for line {line} ({available} candidates)")]
    Index {
        line: usize,
        rank: usize,
        available: usize,
    },
}

fn format_err(line: usize, msg: impl Into<String>) -> IngestError {
    IngestError::Format {
        line,
        msg: msg.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PseudoLine {
    pub index: usize,
    pub indent: u32,
    pub text: String,
    pub gold: Option<String>,
}

/// One candidate translation of one line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodePiece {
    pub line: usize,
    /// Rank within the line after sorting by descending probability.
    pub cand: usize,
    pub code: String,
    pub prob: f64,
}

impl CodePiece {
    pub fn log_prob(&self) -> f64 {
        self.prob.ln()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Problem {
    pub id: String,
    pub lines: Vec<PseudoLine>,
    pub candidates: Vec<Vec<CodePiece>>,
}

impl Problem {
    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn indents(&self) -> Vec<u32> {
        self.lines.iter().map(|l| l.indent).collect()
    }

    /// Checks the cross-structure invariants: one candidate slot per line,
    /// every slot non-empty, candidate line indices matching their slot.
    pub fn validate(&self) -> Result<(), IngestError> {
        if self.candidates.len() != self.lines.len() {
            return Err(format_err(
                0,
                format!(
                    "{} candidate slots for {} lines",
                    self.candidates.len(),
                    self.lines.len()
                ),
            ));
        }
        for (l, slot) in self.candidates.iter().enumerate() {
            if slot.is_empty() {
                return Err(format_err(l, format!("line {l} has no candidates")));
            }
            for (c, piece) in slot.iter().enumerate() {
                if piece.line != l || piece.cand != c {
                    return Err(format_err(
                        l,
                        format!("candidate ({}, {}) stored in slot ({l}, {c})", piece.line, piece.cand),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Concatenates the chosen pieces into a program, indenting each line
    /// by two spaces per level.
    pub fn program(&self, choices: &[usize]) -> Result<Program, IngestError> {
        let score = score_program(choices, &self.candidates)?;
        let mut code = String::new();
        for (l, &c) in choices.iter().enumerate() {
            let indent = self.lines[l].indent as usize;
            let _ = writeln!(code, "{:width$}{}", "", self.candidates[l][c].code, width = indent * 2);
        }
        Ok(Program {
            choices: choices.to_vec(),
            code,
            score,
        })
    }
}

/// A full program: one candidate rank per line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Program {
    pub choices: Vec<usize>,
    pub code: String,
    /// Sum of the chosen log-probabilities.
    pub score: f64,
}

impl Program {
    pub fn prob(&self) -> f64 {
        self.score.exp()
    }
}

/// Log-score of a choice vector: log-probabilities summed left to right.
pub fn score_program(choices: &[usize], candidates: &[Vec<CodePiece>]) -> Result<f64, IngestError> {
    if choices.len() != candidates.len() {
        return Err(IngestError::Index {
            line: choices.len().min(candidates.len()),
            rank: 0,
            available: 0,
        });
    }
    let mut total = 0.0;
    for (l, (&c, slot)) in choices.iter().zip(candidates).enumerate() {
        let piece = slot.get(c).ok_or(IngestError::Index {
            line: l,
            rank: c,
            available: slot.len(),
        })?;
        total += piece.log_prob();
    }
    Ok(total)
}

fn read(path: &Path) -> Result<String, IngestError> {
    fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn records(src: &str) -> impl Iterator<Item = (usize, &str)> {
    src.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
        .filter(|(_, l)| !l.starts_with('#') && !l.trim().is_empty())
}

/// Problem id derived from a file name: `foo.problem.tsv` and `foo.tsv`
/// both give `foo`.
pub fn problem_id(path: &Path) -> String {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    for suffix in [".problem.tsv", ".tsv"] {
        if let Some(stem) = name.strip_suffix(suffix) {
            return stem.to_string();
        }
    }
    name
}

pub fn parse_problem(id: &str, src: &str) -> Result<Problem, IngestError> {
    let mut lines = Vec::new();
    for (ln, rec) in records(src) {
        let fields: Vec<&str> = rec.splitn(4, '\t').collect();
        if fields.len() < 3 {
            return Err(format_err(ln, "expected index, indent, text[, gold]"));
        }
        let index: usize = fields[0]
            .trim()
            .parse()
            .map_err(|_| format_err(ln, format!("bad line index {:?}", fields[0])))?;
        let indent: u32 = fields[1]
            .trim()
            .parse()
            .map_err(|_| format_err(ln, format!("bad indent {:?}", fields[1])))?;
        if index != lines.len() {
            return Err(format_err(
                ln,
                format!("non-contiguous index {index}, expected {}", lines.len()),
            ));
        }
        if index == 0 && indent != 0 {
            return Err(format_err(ln, "line 0 must have indent 0"));
        }
        let gold = fields.get(3).map(|g| g.to_string()).filter(|g| !g.is_empty());
        lines.push(PseudoLine {
            index,
            indent,
            text: fields[2].to_string(),
            gold,
        });
    }
    Ok(Problem {
        id: id.to_string(),
        candidates: vec![Vec::new(); lines.len()],
        lines,
    })
}

/// Loads a problem file. Candidate slots are left empty.
pub fn load_problem(path: &Path) -> Result<Problem, IngestError> {
    parse_problem(&problem_id(path), &read(path)?)
}

pub fn write_problem(problem: &Problem) -> String {
    let mut out = String::new();
    for line in &problem.lines {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}",
            line.index,
            line.indent,
            line.text,
            line.gold.as_deref().unwrap_or("")
        );
    }
    out
}

pub fn parse_candidates(src: &str, num_lines: usize, cap: usize) -> Result<Vec<Vec<CodePiece>>, IngestError> {
    assert!(cap >= 1, "candidate cap must be at least 1");
    let mut slots: Vec<Vec<CodePiece>> = vec![Vec::new(); num_lines];
    for (ln, rec) in records(src) {
        let fields: Vec<&str> = rec.splitn(4, '\t').collect();
        if fields.len() != 4 {
            return Err(format_err(ln, "expected line, rank, prob, code"));
        }
        let line: usize = fields[0]
            .trim()
            .parse()
            .map_err(|_| format_err(ln, format!("bad line index {:?}", fields[0])))?;
        fields[1]
            .trim()
            .parse::<usize>()
            .map_err(|_| format_err(ln, format!("bad rank {:?}", fields[1])))?;
        let prob: f64 = fields[2]
            .trim()
            .parse()
            .map_err(|_| format_err(ln, format!("bad probability {:?}", fields[2])))?;
        if !(prob > 0.0 && prob.is_finite()) {
            return Err(format_err(ln, format!("probability must be positive, got {prob}")));
        }
        let slot = slots
            .get_mut(line)
            .ok_or_else(|| format_err(ln, format!("candidate for unknown line {line}")))?;
        slot.push(CodePiece {
            line,
            cand: 0,
            code: fields[3].to_string(),
            prob,
        });
    }
    for slot in &mut slots {
        // stable: ties keep file order
        slot.sort_by(|a, b| b.prob.total_cmp(&a.prob));
        slot.truncate(cap);
        for (c, piece) in slot.iter_mut().enumerate() {
            piece.cand = c;
        }
    }
    Ok(slots)
}

/// Loads per-line candidate lists, keeping at most `cap` per line.
/// Probabilities are not renormalized after truncation.
pub fn load_candidates(path: &Path, num_lines: usize, cap: usize) -> Result<Vec<Vec<CodePiece>>, IngestError> {
    parse_candidates(&read(path)?, num_lines, cap)
}

pub fn write_candidates(candidates: &[Vec<CodePiece>]) -> String {
    let mut out = String::new();
    for slot in candidates {
        for piece in slot {
            let _ = writeln!(out, "{}\t{}\t{}\t{}", piece.line, piece.cand, piece.prob, piece.code);
        }
    }
    out
}

/// Loads a problem together with its candidate file and checks that every
/// line ended up with at least one candidate.
pub fn load_problem_with_candidates(problem: &Path, candidates: &Path, cap: usize) -> Result<Problem, IngestError> {
    let mut p = load_problem(problem)?;
    p.candidates = load_candidates(candidates, p.lines.len(), cap)?;
    p.validate()?;
    Ok(p)
}

/// Default candidate path for a problem file: `foo.problem.tsv` → `foo.cands.tsv`.
pub fn candidates_path_for(problem: &Path) -> std::path::PathBuf {
    let id = problem_id(problem);
    problem.with_file_name(format!("{id}.cands.tsv"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn piece(line: usize, cand: usize, prob: f64) -> CodePiece {
        CodePiece {
            line,
            cand,
            code: String::new(),
            prob,
        }
    }

    #[test]
    fn three_line_problem() {
        let src = "0\t0\tmain\tint main() {\n1\t1\tprint hi\tcout << 1;\n2\t0\t\t}\n";
        let p = parse_problem("p", src).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p.indents(), vec![0, 1, 0]);
    }

    #[test]
    fn empty_pseudocode_is_kept() {
        let src = "0\t0\t\tint main() {\n1\t0\t\t}\n";
        let p = parse_problem("p", src).unwrap();
        assert_eq!(p.lines[1].text, "");
        assert_eq!(p.lines[1].gold.as_deref(), Some("}"));
    }

    #[test]
    fn skipped_index_is_rejected() {
        let src = "0\t0\ta\tx;\n1\t0\tb\ty;\n3\t0\tc\tz;\n";
        match parse_problem("p", src) {
            Err(IngestError::Format { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn comments_are_skipped() {
        let src = "# header\n0\t0\ta\tx;\n";
        assert_eq!(parse_problem("p", src).unwrap().len(), 1);
    }

    #[test]
    fn cap_keeps_highest() {
        let mut src = String::new();
        for r in 0..150 {
            let prob = (r + 1) as f64 / 1000.0;
            src.push_str(&format!("0\t{r}\t{prob}\tx{r};\n"));
        }
        let slots = parse_candidates(&src, 1, 100).unwrap();
        assert_eq!(slots[0].len(), 100);
        assert_eq!(slots[0][0].code, "x149;");
        assert!(slots[0].windows(2).all(|w| w[0].prob >= w[1].prob));
    }

    #[test]
    fn single_candidate_kept() {
        let slots = parse_candidates("0\t0\t0.3\tx;\n", 1, 100).unwrap();
        assert_eq!(slots[0].len(), 1);
        assert_eq!(slots[0][0].prob, 0.3);
    }

    #[test]
    fn out_of_order_probs_are_sorted() {
        let slots = parse_candidates("0\t0\t0.2\ta;\n0\t1\t0.5\tb;\n", 1, 100).unwrap();
        let probs: Vec<f64> = slots[0].iter().map(|p| p.prob).collect();
        assert_eq!(probs, vec![0.5, 0.2]);
        assert_eq!(slots[0][0].cand, 0);
    }

    #[test]
    fn ties_keep_file_order_and_duplicates() {
        let slots = parse_candidates("0\t0\t0.5\tb;\n0\t1\t0.5\ta;\n0\t2\t0.5\tb;\n", 1, 10).unwrap();
        let codes: Vec<&str> = slots[0].iter().map(|p| p.code.as_str()).collect();
        assert_eq!(codes, vec!["b;", "a;", "b;"]);
    }

    #[test]
    fn bad_candidates_rejected() {
        assert!(matches!(
            parse_candidates("3\t0\t0.5\tx;\n", 2, 10),
            Err(IngestError::Format { .. })
        ));
        assert!(matches!(
            parse_candidates("0\t0\t0\tx;\n", 2, 10),
            Err(IngestError::Format { .. })
        ));
        assert!(matches!(
            parse_candidates("0\t0\t-0.1\tx;\n", 2, 10),
            Err(IngestError::Format { .. })
        ));
    }

    #[test]
    fn scores() {
        let two = vec![vec![piece(0, 0, 0.5)], vec![piece(1, 0, 0.4)]];
        assert!((score_program(&[0, 0], &two).unwrap() - 0.2f64.ln()).abs() < 1e-12);

        let one = vec![vec![piece(0, 0, 0.7)]];
        assert_eq!(score_program(&[0], &one).unwrap(), 0.7f64.ln());

        // 0.9 * 0.1 * 0.5 * 0.2 = 0.009
        let four: Vec<Vec<CodePiece>> = [0.9, 0.1, 0.5, 0.2]
            .iter()
            .enumerate()
            .map(|(l, &p)| vec![piece(l, 0, p)])
            .collect();
        let s = score_program(&[0, 0, 0, 0], &four).unwrap();
        assert!((s.exp() - 0.009).abs() / 0.009 < 1e-12);
    }

    #[test]
    fn score_rank_out_of_range() {
        let one = vec![vec![piece(0, 0, 0.7)]];
        assert!(matches!(score_program(&[1], &one), Err(IngestError::Index { rank: 1, .. })));
    }

    #[test]
    fn problem_round_trip() {
        let src = "# comment\n0\t0\tstart\tint main() {\n1\t1\t\treturn 0;\n2\t0\t\t}\n";
        let p = parse_problem("p", src).unwrap();
        let written = write_problem(&p);
        let canonical: String = src.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
        assert_eq!(written, canonical);
        assert_eq!(parse_problem("p", &written).unwrap(), p);
    }

    #[test]
    fn ids_from_paths() {
        assert_eq!(problem_id(Path::new("a/b/foo.problem.tsv")), "foo");
        assert_eq!(problem_id(Path::new("foo.tsv")), "foo");
        assert_eq!(candidates_path_for(Path::new("a/foo.problem.tsv")), Path::new("a/foo.cands.tsv"));
    }
}
