use rayon::prelude::*;

use crate::data::{Dataset, SplitKind};
use crate::evolve::{fast_nondominated_front, Population};
use crate::regress::{evaluate_model, FittedModel};
use crate::simplify::{simplify_model, to_infix};

/// Refits every individual; invalid models map to `None`.
pub fn fit_population(pop: &Population, dataset: &Dataset) -> Vec<Option<FittedModel>> {
    pop.individuals
        .par_iter()
        .map(|ind| evaluate_model(&ind.genes, dataset, pop.complexity).ok())
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParetoRow {
    pub model_id: usize,
    pub r2: f64,
    pub complexity: usize,
    pub equation: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportOrder {
    #[default]
    Complexity,
    R2,
}

/// Non-dominated models over `(1 − R², complexity)` on `split`.
///
/// Models that are invalid or lack the split are excluded. Rows are
/// ordered by the chosen column, ties broken by model ID.
pub fn pareto_front_report(
    models: &[Option<FittedModel>],
    split: SplitKind,
    order: ReportOrder,
) -> Vec<ParetoRow> {
    let candidates: Vec<(usize, &FittedModel, f64)> = models
        .iter()
        .enumerate()
        .filter_map(|(i, m)| {
            let m = m.as_ref()?;
            let r2 = m.stat(split)?.r2;
            r2.is_finite().then_some((i, m, r2))
        })
        .collect();
    let points: Vec<(f64, f64)> = candidates.iter().map(|(_, m, r2)| (1.0 - r2, m.complexity as f64)).collect();
    let front = fast_nondominated_front(&points);
    let mut rows: Vec<ParetoRow> = candidates
        .iter()
        .zip(front)
        .filter(|(_, on)| *on)
        .map(|((i, m, r2), _)| ParetoRow {
            model_id: i + 1,
            r2: *r2,
            complexity: m.complexity,
            equation: to_infix(&simplify_model(m).canonical.expr),
        })
        .collect();
    match order {
        ReportOrder::Complexity => rows.sort_by(|a, b| {
            a.complexity.cmp(&b.complexity).then(a.r2.total_cmp(&b.r2)).then(a.model_id.cmp(&b.model_id))
        }),
        ReportOrder::R2 => rows.sort_by(|a, b| {
            b.r2.total_cmp(&a.r2).then(a.complexity.cmp(&b.complexity)).then(a.model_id.cmp(&b.model_id))
        }),
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    use nalgebra::DVector;

    use crate::expr::ExprTree;
    use crate::regress::SplitStats;

    fn fake(r2: f64, complexity: usize) -> Option<FittedModel> {
        let mut stats = BTreeMap::new();
        stats.insert(
            SplitKind::Train,
            SplitStats {
                rmse: 1.0 - r2,
                r2,
                predictions: vec![],
            },
        );
        Some(FittedModel {
            genes: vec![ExprTree::Var(0)],
            weights: DVector::from_vec(vec![0.0, 1.0]),
            stats,
            complexity,
        })
    }

    #[test]
    fn single_model_is_the_front() {
        let rows = pareto_front_report(&[fake(0.5, 3)], SplitKind::Train, ReportOrder::Complexity);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].model_id, 1);
        assert_eq!(rows[0].equation, "x1");
    }

    #[test]
    fn dominated_model_is_excluded() {
        let rows = pareto_front_report(&[fake(0.9, 10), fake(0.8, 20), None], SplitKind::Train, ReportOrder::R2);
        assert_eq!(rows.iter().map(|r| r.model_id).collect::<Vec<_>>(), vec![1]);
    }

    #[test]
    fn missing_split_is_skipped() {
        assert!(pareto_front_report(&[fake(0.9, 10)], SplitKind::Test, ReportOrder::R2).is_empty());
    }
}
