//! Regenerates `fixtures/problems` from the gold corpus.
//!
//! Usage: cargo run -p scaffold-core --example make_fixtures [candidates-per-line]

use std::fs;
use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use scaffold_core::ingest::{write_candidates, write_problem};
use scaffold_core::synth::{noisy_candidates, problem_from_source};

fn main() {
    let c: usize = std::env::args().nth(1).map_or(8, |a| a.parse().expect("candidate count"));
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let out = root.join("problems");
    fs::create_dir_all(&out).unwrap();
    let mut paths: Vec<PathBuf> = fs::read_dir(root.join("corpus"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    paths.sort();
    let mut rng = ChaCha8Rng::seed_from_u64(2019);
    for path in paths {
        let id = path.file_stem().unwrap().to_string_lossy().to_string();
        let mut problem = problem_from_source(&id, &fs::read_to_string(&path).unwrap()).unwrap();
        problem.candidates = noisy_candidates(&mut rng, &problem.lines, c);
        fs::write(out.join(format!("{id}.problem.tsv")), write_problem(&problem)).unwrap();
        fs::write(out.join(format!("{id}.cands.tsv")), write_candidates(&problem.candidates)).unwrap();
    }
}
