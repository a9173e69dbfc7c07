use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::ComplexityMeasure;

/// Probability of each tournament type at a selection event.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TournamentMix {
    pub regular: f64,
    pub pareto: f64,
    pub lexicographic: f64,
}

impl Default for TournamentMix {
    fn default() -> Self {
        TournamentMix {
            regular: 0.7,
            pareto: 0.3,
            lexicographic: 0.0,
        }
    }
}

/// Relative weights of the six tree mutation operators, in the order:
/// subtree replacement, node substitution, constant perturbation, constant
/// replacement, shrink, input-variable swap.
pub type MutationWeights = [f64; 6];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub population_size: usize,
    pub max_generations: usize,
    /// Wall-clock budget per run; `None` for no limit.
    pub max_run_seconds: Option<f64>,
    /// Stop once the best training RMSE is at or below this value.
    pub target_fitness: Option<f64>,
    /// Upper bound on genes per individual.
    pub max_genes: usize,
    pub max_depth: usize,
    pub tournament_size: usize,
    pub tournament_mix: TournamentMix,
    pub crossover_prob: f64,
    /// Share of crossover events that are high-level (whole-gene) crossovers.
    pub high_level_fraction: f64,
    /// Per-gene move probability in high-level crossover.
    pub crossover_rate: f64,
    pub mutation_prob: f64,
    pub mutation_weights: MutationWeights,
    pub elitism: usize,
    pub complexity: ComplexityMeasure,
    pub num_runs: usize,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            population_size: 100,
            max_generations: 150,
            max_run_seconds: None,
            target_fitness: None,
            max_genes: 4,
            max_depth: 4,
            tournament_size: 4,
            tournament_mix: TournamentMix::default(),
            crossover_prob: 0.84,
            high_level_fraction: 0.2,
            crossover_rate: 0.5,
            mutation_prob: 0.14,
            mutation_weights: [1.0; 6],
            elitism: 1,
            complexity: ComplexityMeasure::Expressional,
            num_runs: 1,
            seed: 0,
        }
    }
}

fn check_prob(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must lie in [0, 1], got {p}")))
    }
}

impl RunConfig {
    pub fn reproduction_prob(&self) -> f64 {
        (1.0 - self.crossover_prob - self.mutation_prob).max(0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::Config("population_size must be at least 2".into()));
        }
        if self.tournament_size < 2 {
            return Err(Error::Config("tournament_size must be at least 2".into()));
        }
        if self.max_genes == 0 {
            return Err(Error::Config("max_genes must be at least 1".into()));
        }
        if self.max_depth == 0 {
            return Err(Error::Config("max_depth must be at least 1".into()));
        }
        if self.num_runs == 0 {
            return Err(Error::Config("num_runs must be at least 1".into()));
        }
        if self.elitism > self.population_size {
            return Err(Error::Config("elitism exceeds population_size".into()));
        }
        check_prob("crossover_prob", self.crossover_prob)?;
        check_prob("mutation_prob", self.mutation_prob)?;
        check_prob("high_level_fraction", self.high_level_fraction)?;
        if !(self.crossover_rate > 0.0 && self.crossover_rate < 1.0) {
            return Err(Error::Config(format!(
                "crossover_rate must lie strictly between 0 and 1, got {}",
                self.crossover_rate
            )));
        }
        if self.crossover_prob + self.mutation_prob > 1.0 + 1e-9 {
            return Err(Error::Config("crossover_prob + mutation_prob exceeds 1".into()));
        }
        let mix = self.tournament_mix;
        for (n, p) in [("regular", mix.regular), ("pareto", mix.pareto), ("lexicographic", mix.lexicographic)] {
            check_prob(&format!("tournament_mix.{n}"), p)?;
        }
        if ((mix.regular + mix.pareto + mix.lexicographic) - 1.0).abs() > 1e-9 {
            return Err(Error::Config("tournament_mix probabilities must sum to 1".into()));
        }
        if self.mutation_weights.iter().any(|w| !(*w >= 0.0 && w.is_finite()))
            || self.mutation_weights.iter().sum::<f64>() <= 0.0
        {
            return Err(Error::Config("mutation_weights must be non-negative with a positive sum".into()));
        }
        if let Some(s) = self.max_run_seconds {
            if !(s > 0.0) {
                return Err(Error::Config("max_run_seconds must be positive".into()));
            }
        }
        Ok(())
    }
}
