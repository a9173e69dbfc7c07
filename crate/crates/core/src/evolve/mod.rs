//! The multigene genetic programming engine.

mod config;
mod crossover;
mod engine;
mod individual;
mod mutation;
mod pareto;
mod selection;

pub use config::{MutationWeights, RunConfig, TournamentMix};
pub use crossover::{
    exchange_with_mask, high_level_crossover, low_level_crossover, rate_based_exchange, subtree_crossover,
    GeneExchange, DEPTH_REPAIR_ATTEMPTS,
};
pub use engine::{
    evaluate_population, init_population, merge_populations, run, run_multi, run_with_threads, FitnessCache,
    GenerationStats, Population, RunHistory, UNIQUE_GENE_ATTEMPTS,
};
pub use individual::{CacheKey, Individual};
pub use mutation::{mutate, mutate_tree, MutationKind, ERC_PERTURBATION_FRACTION};
pub use pareto::{dominates, fast_nondominated_front, nondominated_ranks};
pub use selection::{draw_entrants, draw_tournament_kind, select_parent, tournament, TournamentKind, FITNESS_TIE};
