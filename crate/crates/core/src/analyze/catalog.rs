use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::Split;
use crate::evolve::Population;
use crate::expr::{CanonicalKey, ExprTree};
use crate::simplify::{simplify, CanonicalExpr};

pub const PROBE_ROWS: usize = 256;
pub const PROBE_SEED: u64 = 0x5eed_9e7e;
pub const PROBE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub gene_id: usize,
    /// First genotype seen with this phenotype.
    pub genotype: ExprTree,
    pub simplified: CanonicalExpr,
    pub member_models: BTreeSet<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneCatalog {
    pub entries: Vec<CatalogEntry>,
    /// Per model (by index), the catalog ID of each of its genes in order.
    pub model_genes: Vec<Vec<usize>>,
}

impl GeneCatalog {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, gene_id: usize) -> Option<&CatalogEntry> {
        gene_id.checked_sub(1).and_then(|i| self.entries.get(i))
    }
}

/// Uniform random rows spanning each training column's observed range.
pub fn probe_matrix(train: &Split) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
    let m = train.x.ncols();
    let ranges: Vec<(f64, f64)> = (0..m)
        .map(|c| {
            let col = train.x.column(c);
            (col.min(), col.max())
        })
        .collect();
    let mut x = DMatrix::zeros(PROBE_ROWS, m);
    for r in 0..PROBE_ROWS {
        for (c, &(lo, hi)) in ranges.iter().enumerate() {
            x[(r, c)] = if hi > lo { rng.random_range(lo..=hi) } else { lo };
        }
    }
    x
}

fn probe_equal(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(&u, &v)| {
        if u.is_finite() && v.is_finite() {
            (u - v).abs() <= PROBE_TOLERANCE * 1f64.max(u.abs()).max(v.abs())
        } else {
            (u.is_nan() && v.is_nan()) || u == v
        }
    })
}

/// Deduplicates all genes of a population in three stages: structural key,
/// simplified form, then numeric output on `probe`. IDs are assigned in
/// first-appearance order starting at 1.
pub fn unique_genes(pop: &Population, probe: &DMatrix<f64>) -> GeneCatalog {
    let mut entries: Vec<CatalogEntry> = Vec::new();
    let mut outputs: Vec<Vec<f64>> = Vec::new();
    let mut by_key: BTreeMap<CanonicalKey, usize> = BTreeMap::new();
    let mut by_form: BTreeMap<String, usize> = BTreeMap::new();
    let mut model_genes = Vec::with_capacity(pop.len());
    for (mi, ind) in pop.individuals.iter().enumerate() {
        let mut ids = Vec::with_capacity(ind.genes.len());
        for gene in &ind.genes {
            let key = gene.canonical_key();
            let slot = match by_key.get(&key) {
                Some(&s) => s,
                None => {
                    let simplified = simplify(gene);
                    let form = simplified.expr.to_string();
                    let slot = match by_form.get(&form) {
                        Some(&s) => s,
                        None => {
                            let out = gene.eval_unchecked(probe);
                            let slot = match outputs.iter().position(|o| probe_equal(o, &out)) {
                                Some(s) => s,
                                None => {
                                    entries.push(CatalogEntry {
                                        gene_id: entries.len() + 1,
                                        genotype: gene.clone(),
                                        simplified,
                                        member_models: BTreeSet::new(),
                                    });
                                    outputs.push(out);
                                    entries.len() - 1
                                }
                            };
                            by_form.insert(form, slot);
                            slot
                        }
                    };
                    by_key.insert(key, slot);
                    slot
                }
            };
            entries[slot].member_models.insert(mi + 1);
            ids.push(slot + 1);
        }
        model_genes.push(ids);
    }
    GeneCatalog { entries, model_genes }
}
