//! Post-run analytics over evolved populations.
//!
//! Model IDs are one-based positions in the population.

mod catalog;
mod filter;
mod impact;
mod rec;
mod report;
mod summary;

pub use catalog::{probe_matrix, unique_genes, CatalogEntry, GeneCatalog, PROBE_ROWS, PROBE_SEED, PROBE_TOLERANCE};
pub use filter::{apply_filter, FilterCriteria};
pub use impact::{
    gene_impact, model_from_genes, AddedGene, GeneImpact, RemovedGene, DEFAULT_BLOAT_THRESHOLD,
};
pub use rec::{rec_curve, rec_curves, RecCurve};
pub use report::{fit_population, pareto_front_report, ParetoRow, ReportOrder};
pub use summary::{run_summary, RunSummary, SummaryPoint};

use crate::error::{Error, Result};

/// Converts a one-based model ID to a population index.
pub fn model_index(model_id: usize, population_len: usize) -> Result<usize> {
    if model_id == 0 || model_id > population_len {
        return Err(Error::UnknownModel(model_id));
    }
    Ok(model_id - 1)
}
