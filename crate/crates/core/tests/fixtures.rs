use std::fs;
use std::path::PathBuf;

use scaffold_core::eval::oracle_bound;
use scaffold_core::ingest::{self, candidates_path_for, load_problem_with_candidates};
use scaffold_core::pe_parser::ParserOptions;
use scaffold_core::search::{self, Algorithm, Budget, Constraint};
use scaffold_core::synth::problem_from_source;

fn problem_paths() -> Vec<PathBuf> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/problems");
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.to_string_lossy().ends_with(".problem.tsv"))
        .collect();
    paths.sort();
    paths
}

#[test]
fn fixtures_load_and_round_trip() {
    let paths = problem_paths();
    assert!(paths.len() >= 50);
    for path in &paths {
        let problem = load_problem_with_candidates(path, &candidates_path_for(path), 100).unwrap();
        problem.validate().unwrap();
        let again = ingest::parse_problem(&problem.id, &ingest::write_problem(&problem)).unwrap();
        assert_eq!(again.lines, problem.lines);
        let cands = ingest::parse_candidates(&ingest::write_candidates(&problem.candidates), problem.len(), 100).unwrap();
        assert_eq!(cands, problem.candidates);
    }
}

#[test]
fn fixture_gold_matches_corpus_source() {
    for path in problem_paths() {
        let problem = ingest::load_problem(&path).unwrap();
        let src = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
            .join("fixtures/corpus")
            .join(format!("{}.cpp", problem.id));
        let source = problem_from_source(&problem.id, &fs::read_to_string(src).unwrap()).unwrap();
        assert_eq!(source.lines, problem.lines);
    }
}

#[test]
fn every_fixture_line_has_its_gold_candidate() {
    let problems: Vec<_> = problem_paths()
        .iter()
        .map(|p| load_problem_with_candidates(p, &candidates_path_for(p), 100).unwrap())
        .collect();
    assert_eq!(oracle_bound(&problems).unwrap(), 1.0);
}

#[test]
fn unconstrained_top_program_is_usually_invalid() {
    let mut invalid = 0;
    let paths = problem_paths();
    for path in &paths {
        let problem = load_problem_with_candidates(path, &candidates_path_for(path), 100).unwrap();
        let top = search::search(&problem, Constraint::None, Algorithm::Hierarchical, &Budget { b: 1, w: 1, k: 1 }, &ParserOptions::default());
        let ok = scaffold_core::scaffold::check_program(&top.programs[0], &problem, scaffold_core::Regime::Syntactic).is_ok();
        invalid += usize::from(!ok);
    }
    assert!(invalid * 2 > paths.len(), "{invalid}/{}", paths.len());
}
