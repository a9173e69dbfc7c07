//! CSV ingestion with per-row or seeded random train/validation/test splits.

use std::path::Path;

use mgsr_core::data::{Dataset, SplitKind};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::config::DatasetConfig;
use crate::error::{CliError, CliResult};

/// A dataset together with the SHA-256 of its source bytes.
#[derive(Debug, Clone)]
pub struct LoadedData {
    pub dataset: Dataset,
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

pub fn load_csv(cfg: &DatasetConfig) -> CliResult<LoadedData> {
    let bytes = std::fs::read(&cfg.path).map_err(|e| CliError::io(&cfg.path, e))?;
    let dataset = parse_csv(&bytes, cfg, &cfg.path)?;
    Ok(LoadedData {
        dataset,
        sha256: sha256_hex(&bytes),
    })
}

pub fn parse_csv(bytes: &[u8], cfg: &DatasetConfig, origin: &Path) -> CliResult<Dataset> {
    let origin = origin.display();
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(bytes);
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::Data(format!("{origin}: {e}")))?
        .iter()
        .map(str::to_string)
        .collect();
    let split_col = header.iter().position(|h| *h == cfg.split_column);
    let numeric: Vec<usize> = (0..header.len()).filter(|&i| Some(i) != split_col).collect();
    let response = match &cfg.response {
        Some(name) => header
            .iter()
            .position(|h| h == name)
            .filter(|&i| Some(i) != split_col)
            .ok_or_else(|| CliError::Data(format!("{origin}: no response column '{name}'")))?,
        None => *numeric
            .last()
            .ok_or_else(|| CliError::Data(format!("{origin}: no numeric columns")))?,
    };
    let inputs: Vec<usize> = numeric.iter().copied().filter(|&i| i != response).collect();
    if inputs.is_empty() {
        return Err(CliError::Data(format!("{origin}: at least one input column is required")));
    }

    let mut rows = Vec::new();
    let mut y = Vec::new();
    let mut labels = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| CliError::Data(format!("{origin}: {e}")))?;
        let line = rec.position().map_or(0, |p| p.line());
        let cell = |i: usize| -> CliResult<f64> {
            let raw = rec.get(i).unwrap_or("");
            raw.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| {
                CliError::Data(format!(
                    "{origin}: line {line}, column '{}': '{raw}' is not a finite number",
                    header[i]
                ))
            })
        };
        rows.push(inputs.iter().map(|&i| cell(i)).collect::<CliResult<Vec<f64>>>()?);
        y.push(cell(response)?);
        if let Some(s) = split_col {
            let raw = rec.get(s).unwrap_or("");
            labels.push(SplitKind::parse(raw).ok_or_else(|| {
                CliError::Data(format!("{origin}: line {line}: unknown split label '{raw}'"))
            })?);
        }
    }
    if split_col.is_none() {
        labels = random_split(rows.len(), cfg.fractions, cfg.split_seed);
    }
    let names = inputs.iter().map(|&i| header[i].clone()).collect();
    Dataset::from_rows(&rows, &y, &labels, names).map_err(|e| CliError::Data(format!("{origin}: {e}")))
}

/// Seeded shuffle assigning `round(f·n)` rows to each of validation and test.
pub fn random_split(n: usize, fractions: [f64; 3], seed: u64) -> Vec<SplitKind> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_val = (fractions[1] * n as f64).round() as usize;
    let n_test = ((fractions[2] * n as f64).round() as usize).min(n - n_val.min(n));
    let mut labels = vec![SplitKind::Train; n];
    for (rank, &row) in order.iter().enumerate() {
        if rank < n_val {
            labels[row] = SplitKind::Validation;
        } else if rank < n_val + n_test {
            labels[row] = SplitKind::Test;
        }
    }
    labels
}
