//! The JSON document embedded in HTML reports.
//!
//! The cross-product block lets a client refit any subset of catalog genes:
//! with `A = [1 t_1 … t_U]` over the training rows, it carries `AᵀA`, `Aᵀy`,
//! `yᵀy`, the row count and the total sum of squares about the mean.

use std::collections::{BTreeMap, BTreeSet};

use mgsr_core::analyze::{
    fit_population, gene_impact, pareto_front_report, probe_matrix, rec_curve, run_summary, unique_genes,
    GeneCatalog, GeneImpact, ReportOrder,
};
use mgsr_core::data::{Dataset, SplitKind};
use mgsr_core::evolve::Population;
use mgsr_core::simplify::{simplify_model, to_infix, to_latex};
use serde::{Deserialize, Serialize};

pub const PAYLOAD_SCHEMA_MAJOR: u32 = 1;
pub const PAYLOAD_SCHEMA_MINOR: u32 = 0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemaVersion {
    pub major: u32,
    pub minor: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitScore {
    pub r2: f64,
    pub rmse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelEntry {
    pub id: usize,
    pub complexity: usize,
    pub scores: BTreeMap<SplitKind, SplitScore>,
    pub equation: String,
    pub latex: String,
    pub gene_ids: Vec<usize>,
    pub weights: Vec<f64>,
    pub pareto: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneEntry {
    pub id: usize,
    pub prefix: String,
    pub equation: String,
    pub latex: String,
    pub models: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemovalEntry {
    pub gene_id: usize,
    pub r2_if_removed: f64,
    pub delta_r2: f64,
    pub bloat: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdditionEntry {
    pub gene_id: usize,
    pub r2_if_added: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpactEntry {
    pub model_id: usize,
    pub r2_full: f64,
    pub removed: Vec<RemovalEntry>,
    pub added: Vec<AdditionEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecEntry {
    pub model_id: usize,
    pub split: SplitKind,
    pub points: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub run: usize,
    pub seed: u64,
    pub generation: Vec<usize>,
    pub log10_best_rmse: Vec<Option<f64>>,
    pub mean_rmse: Vec<Option<f64>>,
    pub invalid_count: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossProducts {
    /// Catalog IDs of columns `1..=U`; column 0 is the bias.
    pub gene_ids: Vec<usize>,
    pub ata: Vec<Vec<f64>>,
    pub aty: Vec<f64>,
    pub yty: f64,
    pub n: usize,
    pub sst: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportPayload {
    pub schema: SchemaVersion,
    pub generator: String,
    pub var_names: Vec<String>,
    pub split: SplitKind,
    pub bloat_threshold: f64,
    pub models: Vec<ModelEntry>,
    pub genes: Vec<GeneEntry>,
    pub impact: Vec<ImpactEntry>,
    pub rec: Vec<RecEntry>,
    pub history: Vec<HistoryEntry>,
    pub cross_products: CrossProducts,
}

pub struct PayloadOptions {
    pub split: SplitKind,
    pub bloat_threshold: f64,
    pub max_genes: usize,
}

/// Builds the report document. Impact tables and REC curves cover the
/// Pareto-front models on `split`.
pub fn build_payload(pop: &Population, dataset: &Dataset, opts: &PayloadOptions) -> ReportPayload {
    let split = if dataset.split(opts.split).is_some() { opts.split } else { SplitKind::Train };
    let fitted = fit_population(pop, dataset);
    let front: BTreeSet<usize> = pareto_front_report(&fitted, split, ReportOrder::Complexity)
        .iter()
        .map(|r| r.model_id)
        .collect();
    let catalog = unique_genes(pop, &probe_matrix(&dataset.train));

    let models = fitted
        .iter()
        .enumerate()
        .filter_map(|(i, m)| {
            let m = m.as_ref()?;
            let expr = simplify_model(m).canonical.expr;
            Some(ModelEntry {
                id: i + 1,
                complexity: m.complexity,
                scores: m.stats.iter().map(|(k, s)| (*k, SplitScore { r2: s.r2, rmse: s.rmse })).collect(),
                equation: to_infix(&expr),
                latex: to_latex(&expr),
                gene_ids: catalog.model_genes[i].clone(),
                weights: m.weights.iter().copied().collect(),
                pareto: front.contains(&(i + 1)),
            })
        })
        .collect();

    let impacts: Vec<GeneImpact> = front
        .iter()
        .filter_map(|&id| gene_impact(id, &catalog, pop, dataset, opts.bloat_threshold).ok())
        .collect();

    let rec = front
        .iter()
        .filter_map(|&id| {
            let m = fitted[id - 1].as_ref()?;
            let s = m.stat(split)?;
            let y = &dataset.split(split)?.y;
            let curve = rec_curve(y, &s.predictions);
            Some(RecEntry {
                model_id: id,
                split,
                points: curve.points.iter().map(|&(e, p)| [e, p]).collect(),
            })
        })
        .collect();

    let history = run_summary(pop)
        .into_iter()
        .map(|r| HistoryEntry {
            run: r.run,
            seed: r.seed,
            generation: r.points.iter().map(|p| p.generation).collect(),
            log10_best_rmse: r.points.iter().map(|p| p.log10_best_rmse).collect(),
            mean_rmse: r.points.iter().map(|p| p.mean_rmse).collect(),
            invalid_count: r.points.iter().map(|p| p.invalid_count).collect(),
        })
        .collect();

    let selected = select_genes(&catalog, &impacts, opts.max_genes, dataset);
    let cross_products = cross_products(&catalog, &selected, dataset);
    let genes = catalog
        .entries
        .iter()
        .map(|e| GeneEntry {
            id: e.gene_id,
            prefix: e.genotype.to_string(),
            equation: to_infix(&e.simplified.expr),
            latex: to_latex(&e.simplified.expr),
            models: e.member_models.iter().copied().collect(),
        })
        .collect();

    ReportPayload {
        schema: SchemaVersion {
            major: PAYLOAD_SCHEMA_MAJOR,
            minor: PAYLOAD_SCHEMA_MINOR,
        },
        generator: format!("mgsr {}", env!("CARGO_PKG_VERSION")),
        var_names: dataset.var_names.clone(),
        split,
        bloat_threshold: opts.bloat_threshold,
        models,
        genes,
        impact: impacts
            .into_iter()
            .map(|g| ImpactEntry {
                model_id: g.model_id,
                r2_full: g.r2_full,
                removed: g
                    .removed
                    .iter()
                    .map(|r| RemovalEntry {
                        gene_id: r.gene_id,
                        r2_if_removed: r.r2_if_removed,
                        delta_r2: r.delta_r2,
                        bloat: r.bloat,
                    })
                    .collect(),
                added: g
                    .added
                    .iter()
                    .map(|a| AdditionEntry {
                        gene_id: a.gene_id,
                        r2_if_added: a.r2_if_added,
                    })
                    .collect(),
            })
            .collect(),
        rec,
        history,
        cross_products,
    }
}

/// Picks at most `cap` catalog genes with finite training output, ranked by
/// the largest `|ΔR²|` seen for them in any impact table, ties by ID.
fn select_genes(catalog: &GeneCatalog, impacts: &[GeneImpact], cap: usize, dataset: &Dataset) -> Vec<usize> {
    let mut score: BTreeMap<usize, f64> = BTreeMap::new();
    let mut bump = |id: usize, v: f64| {
        if v.is_finite() {
            let s = score.entry(id).or_insert(0.0);
            *s = s.max(v.abs());
        }
    };
    for imp in impacts {
        for r in &imp.removed {
            bump(r.gene_id, r.delta_r2);
        }
        for a in &imp.added {
            bump(a.gene_id, a.r2_if_added - imp.r2_full);
        }
    }
    let mut ids: Vec<usize> = catalog
        .entries
        .iter()
        .filter(|e| e.genotype.eval_unchecked(&dataset.train.x).iter().all(|v| v.is_finite()))
        .map(|e| e.gene_id)
        .collect();
    ids.sort_by(|a, b| {
        let sa = score.get(a).copied().unwrap_or(-1.0);
        let sb = score.get(b).copied().unwrap_or(-1.0);
        sb.total_cmp(&sa).then(a.cmp(b))
    });
    ids.truncate(cap);
    ids.sort_unstable();
    ids
}

pub fn cross_products(catalog: &GeneCatalog, ids: &[usize], dataset: &Dataset) -> CrossProducts {
    let train = &dataset.train;
    let n = train.len();
    let mut cols: Vec<Vec<f64>> = vec![vec![1.0; n]];
    for &id in ids {
        let entry = catalog.get(id).expect("selected IDs come from the catalog");
        cols.push(entry.genotype.eval_unchecked(&train.x));
    }
    let k = cols.len();
    let mut ata = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in i..k {
            let v: f64 = cols[i].iter().zip(&cols[j]).map(|(a, b)| a * b).sum();
            ata[i][j] = v;
            ata[j][i] = v;
        }
    }
    let aty = cols.iter().map(|c| c.iter().zip(train.y.iter()).map(|(a, b)| a * b).sum()).collect();
    CrossProducts {
        gene_ids: ids.to_vec(),
        ata,
        aty,
        yty: train.y.iter().map(|v| v * v).sum(),
        n,
        sst: train.sst(),
    }
}

impl ReportPayload {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("payload serializes")
    }
}
