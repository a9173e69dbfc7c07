use rand::seq::index::sample;
use rand::Rng;

use super::config::RunConfig;
use super::individual::Individual;
use super::pareto::fast_nondominated_front;
use crate::expr::ComplexityMeasure;

/// Fitness differences at or below this count as a tie in lexicographic tournaments.
pub const FITNESS_TIE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TournamentKind {
    Regular,
    Pareto,
    Lexicographic,
}

pub fn draw_tournament_kind<R: Rng + ?Sized>(cfg: &RunConfig, rng: &mut R) -> TournamentKind {
    let u: f64 = rng.random();
    let mix = cfg.tournament_mix;
    if u < mix.regular {
        TournamentKind::Regular
    } else if u < mix.regular + mix.pareto {
        TournamentKind::Pareto
    } else {
        TournamentKind::Lexicographic
    }
}

/// Draws `size` distinct entrants (or every index if the population is smaller).
pub fn draw_entrants<R: Rng + ?Sized>(pop_len: usize, size: usize, rng: &mut R) -> Vec<usize> {
    sample(rng, pop_len, size.min(pop_len)).into_vec()
}

/// Decides a tournament among `entrants` (indices into `pop`).
pub fn tournament<R: Rng + ?Sized>(
    pop: &[Individual],
    entrants: &[usize],
    kind: TournamentKind,
    measure: ComplexityMeasure,
    rng: &mut R,
) -> usize {
    let fit = |i: usize| pop[i].fitness_or_worst();
    let cplx = |i: usize| pop[i].complexity_with(measure);
    match kind {
        TournamentKind::Regular => {
            let mut best = entrants[0];
            for &e in &entrants[1..] {
                if fit(e) < fit(best) {
                    best = e;
                }
            }
            best
        }
        TournamentKind::Lexicographic => {
            let mut best = entrants[0];
            for &e in &entrants[1..] {
                let (fe, fb) = (fit(e), fit(best));
                let tie = fe == fb || (fe - fb).abs() <= FITNESS_TIE;
                if (tie && cplx(e) < cplx(best)) || (!tie && fe < fb) {
                    best = e;
                }
            }
            best
        }
        TournamentKind::Pareto => {
            let points: Vec<(f64, f64)> = entrants.iter().map(|&e| (fit(e), cplx(e) as f64)).collect();
            let front: Vec<usize> = fast_nondominated_front(&points)
                .into_iter()
                .zip(entrants)
                .filter_map(|(on, &e)| on.then_some(e))
                .collect();
            front[rng.random_range(0..front.len())]
        }
    }
}

/// One selection event: draws the tournament type and entrants, returns the winner's index.
pub fn select_parent<R: Rng + ?Sized>(pop: &[Individual], cfg: &RunConfig, rng: &mut R) -> usize {
    let kind = draw_tournament_kind(cfg, rng);
    let entrants = draw_entrants(pop.len(), cfg.tournament_size, rng);
    tournament(pop, &entrants, kind, cfg.complexity, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::ExprTree;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ind(fitness: f64, complexity: usize) -> Individual {
        Individual {
            genes: vec![ExprTree::Var(0)],
            fitness: Some(fitness),
            complexity: Some(complexity),
            run: 0,
        }
    }

    #[test]
    fn regular_picks_lowest_rmse() {
        let pop = [ind(1.0, 5), ind(2.0, 1)];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for entrants in [[0, 1], [1, 0]] {
            let w = tournament(&pop, &entrants, TournamentKind::Regular, ComplexityMeasure::NodeCount, &mut rng);
            assert_eq!(w, 0);
        }
    }

    #[test]
    fn lexicographic_breaks_ties_by_complexity() {
        let pop = [ind(0.5, 30), ind(0.5, 12)];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let w = tournament(&pop, &[0, 1], TournamentKind::Lexicographic, ComplexityMeasure::NodeCount, &mut rng);
        assert_eq!(w, 1);
        let pop = [ind(0.4, 30), ind(0.5, 12)];
        let w = tournament(&pop, &[1, 0], TournamentKind::Lexicographic, ComplexityMeasure::NodeCount, &mut rng);
        assert_eq!(w, 0);
    }

    #[test]
    fn pareto_winner_is_uniform_over_front() {
        let pop = [ind(1.0, 9), ind(2.0, 5), ind(3.0, 3), ind(3.0, 9)];
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut wins = [0usize; 4];
        for _ in 0..30_000 {
            wins[tournament(&pop, &[0, 1, 2, 3], TournamentKind::Pareto, ComplexityMeasure::NodeCount, &mut rng)] += 1;
        }
        assert_eq!(wins[3], 0);
        for w in &wins[..3] {
            assert!((*w as f64 / 30_000.0 - 1.0 / 3.0).abs() < 0.02, "{wins:?}");
        }
    }

    #[test]
    fn invalid_models_lose() {
        let pop = [ind(f64::INFINITY, 1), ind(100.0, 50)];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for kind in [TournamentKind::Regular, TournamentKind::Lexicographic] {
            assert_eq!(tournament(&pop, &[0, 1], kind, ComplexityMeasure::NodeCount, &mut rng), 1);
        }
    }
}
