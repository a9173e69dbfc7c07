use crate::evolve::Population;

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryPoint {
    pub generation: usize,
    pub best_rmse: f64,
    /// `log10` of the best RMSE; absent when it is zero or infinite.
    pub log10_best_rmse: Option<f64>,
    /// Mean over valid individuals only; absent when none are valid.
    pub mean_rmse: Option<f64>,
    pub invalid_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub run: usize,
    pub seed: u64,
    pub points: Vec<SummaryPoint>,
}

/// Per-run convergence series, one point per recorded generation.
pub fn run_summary(pop: &Population) -> Vec<RunSummary> {
    pop.histories
        .iter()
        .enumerate()
        .map(|(run, h)| RunSummary {
            run,
            seed: h.seed,
            points: h
                .generations
                .iter()
                .map(|g| {
                    let log = g.best_rmse.log10();
                    SummaryPoint {
                        generation: g.generation,
                        best_rmse: g.best_rmse,
                        log10_best_rmse: log.is_finite().then_some(log),
                        mean_rmse: g.mean_rmse.is_finite().then_some(g.mean_rmse),
                        invalid_count: g.invalid_count,
                    }
                })
                .collect(),
        })
        .collect()
}
