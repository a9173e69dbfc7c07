//! Evolves a model for a noise-free synthetic problem and prints the best
//! equation with its held-out R².
//!
//! `cargo run --release -p mgsr-core --example synthetic -- [seed]`

use std::time::Instant;

use mgsr_core::data::{Dataset, SplitKind};
use mgsr_core::evolve::{run, RunConfig};
use mgsr_core::expr::Palette;
use mgsr_core::regress::evaluate_model;
use mgsr_core::simplify::{simplify_model, to_infix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
    let n = 1000;
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..6).map(|_| rng.random_range(-3.0..3.0)).collect())
        .collect();
    let y: Vec<f64> = rows
        .iter()
        .map(|x| 0.23 * x[0] + 0.33 * (x[0] - x[4]) + 1.23 * x[2] * x[2] - 3.34 * x[0].cos() + 0.22)
        .collect();
    let labels: Vec<SplitKind> = (0..n)
        .map(|i| if i < 700 { SplitKind::Train } else { SplitKind::Test })
        .collect();
    let names = (1..=6).map(|i| format!("x{i}")).collect();
    let ds = Dataset::from_rows(&rows, &y, &labels, names).expect("dataset");

    let cfg = RunConfig {
        population_size: 200,
        max_generations: 100,
        max_genes: 6,
        max_depth: 4,
        seed,
        ..RunConfig::default()
    };
    let started = Instant::now();
    let pop = run(&cfg, &ds, &Palette::default_for(6)).expect("run");
    let best = &pop.individuals[pop.best_index().expect("non-empty")];
    let model = evaluate_model(&best.genes, &ds, cfg.complexity).expect("valid best");
    println!("seed {seed}: {:.2}s", started.elapsed().as_secs_f64());
    println!("train R2 {:.6}", model.train().r2);
    println!("test  R2 {:.6}", model.stat(SplitKind::Test).expect("test split").r2);
    println!("{}", to_infix(&simplify_model(&model).canonical.expr));
}
