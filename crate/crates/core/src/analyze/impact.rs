use rayon::prelude::*;

use crate::data::{Dataset, Split};
use crate::error::{Error, Result};
use crate::evolve::Population;
use crate::expr::{ComplexityMeasure, ExprTree};
use crate::regress::{evaluate_model, fit_weights, r_squared, FittedModel, GeneResponseMatrix};

use super::catalog::GeneCatalog;
use super::model_index;

/// Genes whose removal costs less training R² than this are flagged as bloat.
pub const DEFAULT_BLOAT_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct RemovedGene {
    /// Zero-based position within the model.
    pub position: usize,
    pub gene_id: usize,
    pub r2_if_removed: f64,
    pub delta_r2: f64,
    pub bloat: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AddedGene {
    pub gene_id: usize,
    pub r2_if_added: f64,
    pub gain: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneImpact {
    pub model_id: usize,
    pub r2_full: f64,
    pub removed: Vec<RemovedGene>,
    /// Catalog genes absent from the model with finite training output.
    pub added: Vec<AddedGene>,
}

fn refit_r2(gm: &GeneResponseMatrix, train: &Split) -> Option<f64> {
    let w = fit_weights(gm, &train.y).ok()?;
    let r2 = r_squared(&train.y, &gm.predict(&w));
    r2.is_finite().then_some(r2)
}

/// Leave-one-out and add-one-in training R² for one model, each by a full
/// least-squares refit. Add-one-in previews ignore the gene-count cap.
pub fn gene_impact(
    model_id: usize,
    catalog: &GeneCatalog,
    pop: &Population,
    dataset: &Dataset,
    bloat_threshold: f64,
) -> Result<GeneImpact> {
    let idx = model_index(model_id, pop.len())?;
    let genes = &pop.individuals[idx].genes;
    let ids = catalog
        .model_genes
        .get(idx)
        .ok_or_else(|| Error::Invalid("catalog was built from a different population".into()))?;
    let train = &dataset.train;
    let gm = GeneResponseMatrix::new(genes, &train.x)?;
    let r2_full = refit_r2(&gm, train).ok_or_else(|| Error::Invalid(format!("model {model_id} is invalid")))?;
    let removed = (0..genes.len())
        .into_par_iter()
        .map(|p| {
            let r2 = refit_r2(&gm.without_gene(p), train).unwrap_or(f64::NAN);
            let delta = r2_full - r2;
            RemovedGene {
                position: p,
                gene_id: ids[p],
                r2_if_removed: r2,
                delta_r2: delta,
                bloat: delta < bloat_threshold,
            }
        })
        .collect();
    let added = catalog
        .entries
        .par_iter()
        .filter(|e| !ids.contains(&e.gene_id))
        .filter_map(|e| {
            let t = e.genotype.eval_unchecked(&train.x);
            if t.iter().any(|v| !v.is_finite()) {
                return None;
            }
            let r2 = refit_r2(&gm.with_column(&t), train)?;
            Some(AddedGene {
                gene_id: e.gene_id,
                r2_if_added: r2,
                gain: r2 - r2_full,
            })
        })
        .collect();
    Ok(GeneImpact {
        model_id,
        r2_full,
        removed,
        added,
    })
}

/// Builds a model from catalog genotypes and fits fresh weights.
pub fn model_from_genes(
    gene_ids: &[usize],
    catalog: &GeneCatalog,
    dataset: &Dataset,
    measure: ComplexityMeasure,
    max_genes: Option<usize>,
) -> Result<FittedModel> {
    if gene_ids.is_empty() {
        return Err(Error::Invalid("gene list is empty".into()));
    }
    if let Some(max) = max_genes {
        if gene_ids.len() > max {
            return Err(Error::Invalid(format!("{} genes exceed the cap of {max}", gene_ids.len())));
        }
    }
    let genes: Vec<ExprTree> = gene_ids
        .iter()
        .map(|&id| catalog.get(id).map(|e| e.genotype.clone()).ok_or(Error::UnknownGene(id)))
        .collect::<Result<_>>()?;
    evaluate_model(&genes, dataset, measure)
}
