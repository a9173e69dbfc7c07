#![allow(dead_code)]

pub mod oracles;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use mgsr_core::data::{Dataset, SplitKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Noise-free benchmark target on six inputs.
pub fn benchmark_target(x: &[f64]) -> f64 {
    0.23 * x[0] + 0.33 * (x[0] - x[4]) + 1.23 * x[2] * x[2] - 3.34 * x[0].cos() + 0.22
}

/// 1000 rows with inputs U(-3, 3); the first 700 train, the rest test.
pub fn benchmark_dataset(seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
    let n = 1000;
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..6).map(|_| rng.random_range(-3.0..3.0)).collect())
        .collect();
    let y: Vec<f64> = rows.iter().map(|r| benchmark_target(r)).collect();
    let labels: Vec<SplitKind> = (0..n)
        .map(|i| if i < 700 { SplitKind::Train } else { SplitKind::Test })
        .collect();
    Dataset::from_rows(&rows, &y, &labels, (1..=6).map(|i| format!("x{i}")).collect()).expect("benchmark dataset")
}

/// Writes `rows` of the benchmark problem (with `inputs` columns) as CSV.
pub fn write_benchmark_csv(path: &Path, rows: usize, inputs: usize, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut text = String::new();
    for i in 1..=inputs {
        let _ = write!(text, "x{i},");
    }
    text.push_str("y\n");
    for _ in 0..rows {
        let mut x: Vec<f64> = (0..inputs).map(|_| rng.random_range(-3.0..3.0)).collect();
        x.resize(inputs.max(6), 0.0);
        for v in &x[..inputs] {
            let _ = write!(text, "{v},");
        }
        let _ = writeln!(text, "{}", benchmark_target(&x));
    }
    std::fs::write(path, text).expect("write csv");
}

/// Writes a project config next to `data.csv` in `dir` and returns its path.
pub fn write_project(dir: &Path, engine: &str, functions: &[&str]) -> PathBuf {
    let names: Vec<String> = functions.iter().map(|f| format!("\"{f}\"")).collect();
    let text = format!(
        "[dataset]\npath = \"data.csv\"\nsplit_seed = 3\n\n[engine]\n{engine}\n\n[palette]\nfunctions = [{}]\n",
        names.join(", ")
    );
    let path = dir.join("mgsr.toml");
    std::fs::write(&path, text).expect("write config");
    path
}
