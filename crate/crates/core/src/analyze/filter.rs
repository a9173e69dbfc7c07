use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, SplitKind};
use crate::evolve::{fast_nondominated_front, Population};
use crate::regress::FittedModel;
use crate::simplify::simplify_model;

use super::report::fit_population;

/// Population filter. Variable indices are one-based; absent fields impose
/// no constraint.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterCriteria {
    pub min_r2_train: Option<f64>,
    pub include_vars: BTreeSet<usize>,
    pub exclude_vars: BTreeSet<usize>,
    pub max_complexity: Option<usize>,
    pub min_num_vars: Option<usize>,
    pub max_num_vars: Option<usize>,
    pub pareto_only: bool,
}

impl FilterCriteria {
    pub fn is_empty(&self) -> bool {
        *self == FilterCriteria::default()
    }

    pub fn is_contradictory(&self) -> bool {
        self.include_vars.intersection(&self.exclude_vars).next().is_some()
            || matches!((self.min_num_vars, self.max_num_vars), (Some(lo), Some(hi)) if lo > hi)
    }

    /// Checks one fitted model; `on_front` is its Pareto membership.
    pub fn accepts(&self, m: &FittedModel, on_front: bool) -> bool {
        if self.pareto_only && !on_front {
            return false;
        }
        if let Some(min) = self.min_r2_train {
            if !(m.train().r2 >= min) {
                return false;
            }
        }
        if let Some(max) = self.max_complexity {
            if m.complexity > max {
                return false;
            }
        }
        let needs_vars = !self.include_vars.is_empty()
            || !self.exclude_vars.is_empty()
            || self.min_num_vars.is_some()
            || self.max_num_vars.is_some();
        if needs_vars {
            let used: BTreeSet<usize> =
                simplify_model(m).canonical.variables().into_iter().map(|v| v + 1).collect();
            if !self.include_vars.is_subset(&used) || !self.exclude_vars.is_disjoint(&used) {
                return false;
            }
            if self.min_num_vars.is_some_and(|lo| used.len() < lo)
                || self.max_num_vars.is_some_and(|hi| used.len() > hi)
            {
                return false;
            }
        }
        true
    }
}

/// Retains the models meeting every present criterion.
///
/// Variable usage is judged on the simplified model. Empty criteria return
/// the population unchanged; otherwise invalid models never survive.
pub fn apply_filter(pop: &Population, criteria: &FilterCriteria, dataset: &Dataset) -> Population {
    if criteria.is_empty() {
        return pop.clone();
    }
    if criteria.is_contradictory() {
        return pop.with_individuals(Vec::new());
    }
    let models = fit_population(pop, dataset);
    let front = training_front(&models);
    let kept = pop
        .individuals
        .iter()
        .zip(&models)
        .zip(front)
        .filter(|((_, m), on)| m.as_ref().is_some_and(|m| criteria.accepts(m, *on)))
        .map(|((ind, _), _)| ind.clone())
        .collect();
    pop.with_individuals(kept)
}

/// Pareto membership on `(1 − R²_train, complexity)` among valid models.
pub(crate) fn training_front(models: &[Option<FittedModel>]) -> Vec<bool> {
    let valid: Vec<usize> = (0..models.len()).filter(|&i| models[i].is_some()).collect();
    let points: Vec<(f64, f64)> = valid
        .iter()
        .map(|&i| {
            let m = models[i].as_ref().expect("valid");
            (1.0 - m.stat(SplitKind::Train).map_or(f64::NAN, |s| s.r2), m.complexity as f64)
        })
        .collect();
    let mut out = vec![false; models.len()];
    for (i, on) in valid.into_iter().zip(fast_nondominated_front(&points)) {
        out[i] = on;
    }
    out
}
