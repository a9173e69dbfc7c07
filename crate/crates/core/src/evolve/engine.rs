use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::RunConfig;
use super::crossover::{high_level_crossover, low_level_crossover};
use super::individual::{CacheKey, Individual};
use super::mutation::mutate;
use super::selection::select_parent;
use crate::data::{Dataset, Split};
use crate::error::{Error, Result};
use crate::expr::{ramped_tree, ComplexityMeasure, Palette};
use crate::regress::fitness;

/// Attempts at drawing a gene not already present in a generation-0 individual.
pub const UNIQUE_GENE_ATTEMPTS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationStats {
    pub generation: usize,
    pub best_rmse: f64,
    /// Mean over valid (finite-fitness) individuals; NaN when none are valid.
    pub mean_rmse: f64,
    pub best_r2: f64,
    pub invalid_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunHistory {
    pub seed: u64,
    pub generations: Vec<GenerationStats>,
}

/// Memoised training RMSE keyed on the multiset of gene structures.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FitnessCache {
    entries: BTreeMap<CacheKey, f64>,
}

impl FitnessCache {
    pub fn get(&self, key: &CacheKey) -> Option<f64> {
        self.entries.get(key).copied()
    }

    /// Keeps the existing value on collision.
    pub fn insert(&mut self, key: CacheKey, rmse: f64) {
        self.entries.entry(key).or_insert(rmse);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn union(&mut self, other: &FitnessCache) {
        for (k, v) in &other.entries {
            self.insert(k.clone(), *v);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub individuals: Vec<Individual>,
    pub generation: usize,
    pub histories: Vec<RunHistory>,
    pub cache: FitnessCache,
    pub palette: Palette,
    pub complexity: ComplexityMeasure,
}

impl Population {
    pub fn len(&self) -> usize {
        self.individuals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.individuals.is_empty()
    }

    /// History of the first (or only) run.
    pub fn history(&self) -> &[GenerationStats] {
        self.histories.first().map_or(&[], |h| &h.generations)
    }

    /// Index of the best individual: lowest RMSE, then lowest complexity, then lowest index.
    pub fn best_index(&self) -> Option<usize> {
        (0..self.len()).min_by(|&a, &b| self.rank_cmp(a, b))
    }

    pub fn best_fitness(&self) -> f64 {
        self.best_index()
            .map_or(f64::INFINITY, |i| self.individuals[i].fitness_or_worst())
    }

    fn rank_cmp(&self, a: usize, b: usize) -> std::cmp::Ordering {
        let (ia, ib) = (&self.individuals[a], &self.individuals[b]);
        ia.fitness_or_worst()
            .total_cmp(&ib.fitness_or_worst())
            .then(ia.complexity_with(self.complexity).cmp(&ib.complexity_with(self.complexity)))
            .then(a.cmp(&b))
    }

    /// A population with a subset of individuals and the same metadata.
    pub fn with_individuals(&self, individuals: Vec<Individual>) -> Population {
        Population {
            individuals,
            generation: self.generation,
            histories: self.histories.clone(),
            cache: self.cache.clone(),
            palette: self.palette.clone(),
            complexity: self.complexity,
        }
    }
}

/// Creates `population_size` individuals with uniformly random gene counts in
/// `1..=max_genes`, avoiding duplicate genes within each individual.
pub fn init_population<R: Rng + ?Sized>(cfg: &RunConfig, palette: &Palette, rng: &mut R) -> Result<Population> {
    cfg.validate()?;
    palette.validate()?;
    let individuals = (0..cfg.population_size)
        .map(|_| {
            let n = rng.random_range(1..=cfg.max_genes);
            let mut genes = Vec::with_capacity(n);
            let mut keys = Vec::with_capacity(n);
            for _ in 0..n {
                let mut gene = ramped_tree(palette, cfg.max_depth, rng);
                for _ in 1..UNIQUE_GENE_ATTEMPTS {
                    if !keys.contains(&gene.canonical_key()) {
                        break;
                    }
                    gene = ramped_tree(palette, cfg.max_depth, rng);
                }
                keys.push(gene.canonical_key());
                genes.push(gene);
            }
            Individual::new(genes)
        })
        .collect();
    Ok(Population {
        individuals,
        generation: 0,
        histories: vec![RunHistory {
            seed: cfg.seed,
            generations: Vec::new(),
        }],
        cache: FitnessCache::default(),
        palette: palette.clone(),
        complexity: cfg.complexity,
    })
}

/// Fills in fitness and complexity for every unevaluated individual.
///
/// Cache misses are evaluated in parallel on the current rayon pool; cache
/// updates happen afterwards in population order, so the outcome does not
/// depend on the number of worker threads.
pub fn evaluate_population(pop: &mut Population, train: &Split) {
    let measure = pop.complexity;
    let mut pending: Vec<(CacheKey, usize)> = Vec::new();
    let mut seen: BTreeMap<CacheKey, ()> = BTreeMap::new();
    for (i, ind) in pop.individuals.iter_mut().enumerate() {
        ind.complexity = Some(measure.of_genes(&ind.genes));
        if ind.fitness.is_some() {
            continue;
        }
        let key = ind.cache_key();
        if let Some(f) = pop.cache.get(&key) {
            ind.fitness = Some(f);
        } else if seen.insert(key.clone(), ()).is_none() {
            pending.push((key, i));
        }
    }
    let individuals = &pop.individuals;
    let computed: Vec<f64> = pending
        .par_iter()
        .map(|(_, i)| fitness(&individuals[*i].genes, train))
        .collect();
    for ((key, _), f) in pending.into_iter().zip(computed) {
        pop.cache.insert(key, f);
    }
    for ind in pop.individuals.iter_mut().filter(|i| i.fitness.is_none()) {
        ind.fitness = pop.cache.get(&ind.cache_key());
    }
}

fn generation_stats(pop: &Population, train: &Split) -> GenerationStats {
    let best_rmse = pop.best_fitness();
    let valid: Vec<f64> = pop
        .individuals
        .iter()
        .map(Individual::fitness_or_worst)
        .filter(|f| f.is_finite())
        .collect();
    let mean_rmse = if valid.is_empty() {
        f64::NAN
    } else {
        valid.iter().sum::<f64>() / valid.len() as f64
    };
    let sst = train.sst();
    let best_r2 = if sst > 0.0 {
        1.0 - best_rmse * best_rmse * train.len() as f64 / sst
    } else {
        0.0
    };
    GenerationStats {
        generation: pop.generation,
        best_rmse,
        mean_rmse,
        best_r2,
        invalid_count: pop.len() - valid.len(),
    }
}

fn breed<R: Rng + ?Sized>(pop: &Population, cfg: &RunConfig, palette: &Palette, rng: &mut R) -> Vec<Individual> {
    let parents = &pop.individuals;
    let mut next: Vec<Individual> = Vec::with_capacity(cfg.population_size);
    let mut ranked: Vec<usize> = (0..pop.len()).collect();
    ranked.sort_by(|&a, &b| pop.rank_cmp(a, b));
    next.extend(ranked.iter().take(cfg.elitism).map(|&i| parents[i].clone()));

    while next.len() < cfg.population_size {
        let u: f64 = rng.random();
        if u < cfg.crossover_prob {
            let a = &parents[select_parent(parents, cfg, rng)];
            let b = &parents[select_parent(parents, cfg, rng)];
            let (o1, o2) = if rng.random::<f64>() < cfg.high_level_fraction {
                high_level_crossover(a, b, cfg, rng)
            } else {
                low_level_crossover(a, b, cfg, rng)
            };
            next.push(o1);
            if next.len() < cfg.population_size {
                next.push(o2);
            }
        } else if u < cfg.crossover_prob + cfg.mutation_prob {
            let p = &parents[select_parent(parents, cfg, rng)];
            next.push(mutate(p, cfg, palette, rng));
        } else {
            next.push(parents[select_parent(parents, cfg, rng)].clone());
        }
    }
    next
}

fn check_inputs(cfg: &RunConfig, dataset: &Dataset, palette: &Palette) -> Result<()> {
    cfg.validate()?;
    palette.validate()?;
    dataset.validate()?;
    if palette.num_inputs != dataset.num_inputs() {
        return Err(Error::Config(format!(
            "palette expects {} input variable(s), dataset has {}",
            palette.num_inputs,
            dataset.num_inputs()
        )));
    }
    Ok(())
}

/// One seeded evolutionary run using `cfg.seed`.
///
/// Terminates after evaluating a generation when `max_generations` is
/// reached, the best training RMSE meets `target_fitness`, or the wall-clock
/// budget is exhausted.
pub fn run(cfg: &RunConfig, dataset: &Dataset, palette: &Palette) -> Result<Population> {
    check_inputs(cfg, dataset, palette)?;
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut pop = init_population(cfg, palette, &mut rng)?;
    loop {
        evaluate_population(&mut pop, &dataset.train);
        let stats = generation_stats(&pop, &dataset.train);
        let best = stats.best_rmse;
        pop.histories[0].generations.push(stats);

        let target_met = cfg.target_fitness.is_some_and(|t| best <= t);
        let out_of_time = cfg
            .max_run_seconds
            .is_some_and(|s| started.elapsed().as_secs_f64() > s);
        if pop.generation >= cfg.max_generations || target_met || out_of_time {
            return Ok(pop);
        }
        pop.individuals = breed(&pop, cfg, palette, &mut rng);
        pop.generation += 1;
    }
}

/// Runs `cfg.num_runs` independent runs seeded `seed, seed+1, …` and merges them.
pub fn run_multi(cfg: &RunConfig, dataset: &Dataset, palette: &Palette) -> Result<Population> {
    check_inputs(cfg, dataset, palette)?;
    let pops = (0..cfg.num_runs)
        .map(|k| {
            let cfg_k = RunConfig {
                seed: cfg.seed.wrapping_add(k as u64),
                ..cfg.clone()
            };
            run(&cfg_k, dataset, palette)
        })
        .collect::<Result<Vec<_>>>()?;
    merge_populations(pops)
}

/// [`run_multi`] on a dedicated pool of `threads` workers.
pub fn run_with_threads(cfg: &RunConfig, dataset: &Dataset, palette: &Palette, threads: usize) -> Result<Population> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))?;
    pool.install(|| run_multi(cfg, dataset, palette))
}

/// Concatenates populations from independent runs over the same problem.
pub fn merge_populations(pops: Vec<Population>) -> Result<Population> {
    let mut iter = pops.into_iter();
    let mut merged = iter
        .next()
        .ok_or_else(|| Error::Merge("no populations to merge".into()))?;
    for mut p in iter {
        if p.palette != merged.palette {
            return Err(Error::Merge("populations were evolved with different palettes".into()));
        }
        if p.complexity != merged.complexity {
            return Err(Error::Merge("populations use different complexity measures".into()));
        }
        let offset = merged.histories.len();
        for ind in &mut p.individuals {
            ind.run += offset;
        }
        merged.individuals.append(&mut p.individuals);
        merged.histories.append(&mut p.histories);
        merged.cache.union(&p.cache);
        merged.generation = merged.generation.max(p.generation);
    }
    Ok(merged)
}
