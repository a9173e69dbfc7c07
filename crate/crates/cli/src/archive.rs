//! Versioned JSON population archives.
//!
//! Archives hold configuration, a dataset fingerprint, run histories and
//! every model with its fitted weights. They carry no timestamps, so equal
//! runs serialize to identical bytes.

use std::collections::BTreeMap;
use std::path::Path;

use mgsr_core::analyze::fit_population;
use mgsr_core::data::{Dataset, SplitKind};
use mgsr_core::evolve::{FitnessCache, GenerationStats, Individual, Population, RunHistory};
use mgsr_core::expr::{parse_prefix, ComplexityMeasure, ExprTree, Palette};
use mgsr_core::regress::{FittedModel, SplitStats};
use mgsr_core::simplify::StatSummary;
use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::config::ProjectConfig;
use crate::dataset::{load_csv, LoadedData};
use crate::error::{read_text, write_text, CliError, CliResult};

pub const ARCHIVE_FORMAT: &str = "mgsr-archive";
pub const ARCHIVE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetFingerprint {
    pub path: String,
    pub sha256: String,
    pub var_names: Vec<String>,
    pub rows: BTreeMap<SplitKind, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: usize,
    /// Absent when every individual was invalid.
    pub best_rmse: Option<f64>,
    pub mean_rmse: Option<f64>,
    pub best_r2: Option<f64>,
    pub invalid_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryRecord {
    pub seed: u64,
    pub generations: Vec<GenerationRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelRecord {
    pub id: usize,
    pub run: usize,
    pub genes: Vec<String>,
    /// Training RMSE; absent for invalid models.
    pub fitness: Option<f64>,
    pub complexity: usize,
    /// Bias first; absent for invalid models.
    pub weights: Option<Vec<f64>>,
    pub stats: BTreeMap<SplitKind, StatSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Archive {
    pub format: String,
    pub version: u32,
    pub config: ProjectConfig,
    pub dataset: DatasetFingerprint,
    pub palette: Palette,
    pub complexity: ComplexityMeasure,
    pub generation: usize,
    pub histories: Vec<HistoryRecord>,
    pub models: Vec<ModelRecord>,
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

impl Archive {
    pub fn from_population(pop: &Population, cfg: &ProjectConfig, data: &LoadedData) -> Archive {
        let fitted = fit_population(pop, &data.dataset);
        let models = pop
            .individuals
            .iter()
            .zip(fitted)
            .enumerate()
            .map(|(i, (ind, fit))| ModelRecord {
                id: i + 1,
                run: ind.run,
                genes: ind.genes.iter().map(ExprTree::to_string).collect(),
                fitness: ind.fitness.and_then(finite),
                complexity: ind.complexity_with(pop.complexity),
                weights: fit.as_ref().map(|m| m.weights.iter().copied().collect()),
                stats: fit
                    .map(|m| {
                        m.stats
                            .iter()
                            .map(|(k, s)| (*k, StatSummary { rmse: s.rmse, r2: s.r2 }))
                            .collect()
                    })
                    .unwrap_or_default(),
            })
            .collect();
        Archive {
            format: ARCHIVE_FORMAT.into(),
            version: ARCHIVE_VERSION,
            config: cfg.clone(),
            dataset: DatasetFingerprint {
                path: cfg.dataset.path.display().to_string(),
                sha256: data.sha256.clone(),
                var_names: data.dataset.var_names.clone(),
                rows: data.dataset.splits().map(|(k, s)| (k, s.len())).collect(),
            },
            palette: pop.palette.clone(),
            complexity: pop.complexity,
            generation: pop.generation,
            histories: pop
                .histories
                .iter()
                .map(|h| HistoryRecord {
                    seed: h.seed,
                    generations: h
                        .generations
                        .iter()
                        .map(|g| GenerationRecord {
                            generation: g.generation,
                            best_rmse: finite(g.best_rmse),
                            mean_rmse: finite(g.mean_rmse),
                            best_r2: finite(g.best_r2),
                            invalid_count: g.invalid_count,
                        })
                        .collect(),
                })
                .collect(),
            models,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("archive serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str, origin: &str) -> CliResult<Archive> {
        let probe: serde_json::Value =
            serde_json::from_str(text).map_err(|e| CliError::Archive(format!("{origin}: {e}")))?;
        if probe.get("format").and_then(|f| f.as_str()) != Some(ARCHIVE_FORMAT) {
            return Err(CliError::Archive(format!("{origin}: not an mgsr archive")));
        }
        let version = probe.get("version").and_then(|v| v.as_u64()).unwrap_or(0);
        if version != u64::from(ARCHIVE_VERSION) {
            return Err(CliError::Archive(format!("{origin}: unsupported archive version {version}")));
        }
        let archive: Archive =
            serde_json::from_value(probe).map_err(|e| CliError::Archive(format!("{origin}: {e}")))?;
        archive.check(origin)?;
        Ok(archive)
    }

    fn check(&self, origin: &str) -> CliResult<()> {
        for (i, m) in self.models.iter().enumerate() {
            if m.id != i + 1 {
                return Err(CliError::Archive(format!("{origin}: model IDs must be 1..N in order")));
            }
            if m.weights.as_ref().is_some_and(|w| w.len() != m.genes.len() + 1) {
                return Err(CliError::Archive(format!("{origin}: model {} has a malformed weight vector", m.id)));
            }
        }
        Ok(())
    }

    pub fn load(path: &Path) -> CliResult<Archive> {
        Archive::from_json(&read_text(path)?, &path.display().to_string())
    }

    pub fn save(&self, path: &Path) -> CliResult<()> {
        write_text(path, &self.to_json())
    }

    pub fn genes(&self, id: usize) -> CliResult<Vec<ExprTree>> {
        let m = self.model(id)?;
        m.genes
            .iter()
            .map(|g| {
                let t = parse_prefix(g).map_err(|e| CliError::Archive(format!("model {id}: {e}")))?;
                t.validate(self.palette.num_inputs)
                    .map_err(|e| CliError::Archive(format!("model {id}: {e}")))?;
                Ok(t)
            })
            .collect()
    }

    pub fn model(&self, id: usize) -> CliResult<&ModelRecord> {
        id.checked_sub(1)
            .and_then(|i| self.models.get(i))
            .ok_or_else(|| CliError::Model(format!("unknown model ID {id}")))
    }

    /// Resolves a model ID or the keywords `best` and `testbest`.
    pub fn resolve(&self, selector: &str) -> CliResult<usize> {
        match selector {
            "best" => self
                .models
                .iter()
                .filter(|m| m.fitness.is_some())
                .min_by(|a, b| {
                    a.fitness
                        .unwrap_or(f64::INFINITY)
                        .total_cmp(&b.fitness.unwrap_or(f64::INFINITY))
                        .then(a.complexity.cmp(&b.complexity))
                        .then(a.id.cmp(&b.id))
                })
                .map(|m| m.id)
                .ok_or_else(|| CliError::Model("archive contains no valid model".into())),
            "testbest" => {
                if !self.dataset.rows.contains_key(&SplitKind::Test) {
                    return Err(CliError::Model("'testbest' requires a test split".into()));
                }
                self.models
                    .iter()
                    .filter_map(|m| m.stats.get(&SplitKind::Test).map(|s| (m, s.r2)))
                    .max_by(|(a, ra), (b, rb)| ra.total_cmp(rb).then(b.id.cmp(&a.id)))
                    .map(|(m, _)| m.id)
                    .ok_or_else(|| CliError::Model("archive contains no valid model".into()))
            }
            other => {
                let id: usize = other.parse().map_err(|_| {
                    CliError::Usage(format!("model must be an ID, 'best' or 'testbest', got '{other}'"))
                })?;
                self.model(id).map(|m| m.id)
            }
        }
    }

    /// A fitted model from archived weights; predictions are not stored.
    pub fn fitted(&self, id: usize) -> CliResult<FittedModel> {
        let genes = self.genes(id)?;
        let m = self.model(id)?;
        let weights = m
            .weights
            .clone()
            .ok_or_else(|| CliError::Model(format!("model {id} is invalid and has no weights")))?;
        Ok(FittedModel {
            genes,
            weights: DVector::from_vec(weights),
            stats: m
                .stats
                .iter()
                .map(|(k, s)| {
                    (
                        *k,
                        SplitStats {
                            rmse: s.rmse,
                            r2: s.r2,
                            predictions: Vec::new(),
                        },
                    )
                })
                .collect(),
            complexity: m.complexity,
        })
    }

    /// Rebuilds the in-memory population. The fitness cache starts empty.
    pub fn population(&self) -> CliResult<Population> {
        let individuals = self
            .models
            .iter()
            .map(|m| {
                let mut ind = Individual::new(self.genes(m.id)?);
                ind.fitness = Some(m.fitness.unwrap_or(f64::INFINITY));
                ind.complexity = Some(m.complexity);
                ind.run = m.run;
                Ok(ind)
            })
            .collect::<CliResult<Vec<_>>>()?;
        Ok(Population {
            individuals,
            generation: self.generation,
            histories: self
                .histories
                .iter()
                .map(|h| RunHistory {
                    seed: h.seed,
                    generations: h
                        .generations
                        .iter()
                        .map(|g| GenerationStats {
                            generation: g.generation,
                            best_rmse: g.best_rmse.unwrap_or(f64::INFINITY),
                            mean_rmse: g.mean_rmse.unwrap_or(f64::NAN),
                            best_r2: g.best_r2.unwrap_or(f64::NAN),
                            invalid_count: g.invalid_count,
                        })
                        .collect(),
                })
                .collect(),
            cache: FitnessCache::default(),
            palette: self.palette.clone(),
            complexity: self.complexity,
        })
    }

    /// Loads the archived dataset, or `override_path`, and checks its fingerprint.
    pub fn load_dataset(&self, override_path: Option<&Path>) -> CliResult<Dataset> {
        let mut cfg = self.config.dataset.clone();
        if let Some(p) = override_path {
            cfg.path = p.to_path_buf();
        }
        let data = load_csv(&cfg)?;
        if data.sha256 != self.dataset.sha256 {
            return Err(CliError::Data(format!(
                "{}: contents differ from the dataset this archive was built on",
                cfg.path.display()
            )));
        }
        Ok(data.dataset)
    }

    /// Concatenates archives over the same dataset, palette and measure.
    pub fn merge(parts: Vec<Archive>) -> CliResult<Archive> {
        let mut it = parts.into_iter();
        let mut out = it.next().ok_or_else(|| CliError::Usage("merge needs at least one archive".into()))?;
        for next in it {
            if next.dataset.sha256 != out.dataset.sha256 {
                return Err(CliError::Archive("cannot merge archives built on different datasets".into()));
            }
            if next.palette != out.palette || next.complexity != out.complexity {
                return Err(CliError::Archive(
                    "cannot merge archives with different palettes or complexity measures".into(),
                ));
            }
            let run_offset = out.histories.len();
            for mut m in next.models {
                m.id = out.models.len() + 1;
                m.run += run_offset;
                out.models.push(m);
            }
            out.histories.extend(next.histories);
            out.generation = out.generation.max(next.generation);
        }
        out.config.engine.num_runs = out.histories.len();
        Ok(out)
    }
}
