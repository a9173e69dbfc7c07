use rand::Rng;

use super::config::RunConfig;
use super::individual::Individual;
use crate::expr::ExprTree;

/// Attempts at finding depth-compliant crossover points before falling back to the parent gene.
pub const DEPTH_REPAIR_ATTEMPTS: usize = 10;

/// Result of a whole-gene exchange between two gene lists.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneExchange<T> {
    pub first: Vec<T>,
    pub second: Vec<T>,
    /// Genes whose move draw succeeded, before any size repair.
    pub moved: usize,
}

/// Exchanges genes according to explicit move masks.
///
/// Offspring keep their own unmoved genes in order followed by the genes
/// moved in from the other parent. An empty offspring receives one random
/// gene from its sibling; an offspring above `max_genes` loses random genes
/// until it complies.
pub fn exchange_with_mask<T: Clone, R: Rng + ?Sized>(
    a: &[T],
    b: &[T],
    move_a: &[bool],
    move_b: &[bool],
    max_genes: usize,
    rng: &mut R,
) -> GeneExchange<T> {
    debug_assert_eq!(a.len(), move_a.len());
    debug_assert_eq!(b.len(), move_b.len());
    let pick = |genes: &[T], mask: &[bool], moved: bool| -> Vec<T> {
        genes
            .iter()
            .zip(mask)
            .filter(|(_, &m)| m == moved)
            .map(|(g, _)| g.clone())
            .collect()
    };
    let mut first = pick(a, move_a, false);
    first.extend(pick(b, move_b, true));
    let mut second = pick(b, move_b, false);
    second.extend(pick(a, move_a, true));
    let moved = move_a.iter().chain(move_b).filter(|&&m| m).count();

    if first.is_empty() && second.len() > 1 {
        let g = second.remove(rng.random_range(0..second.len()));
        first.push(g);
    } else if second.is_empty() && first.len() > 1 {
        let g = first.remove(rng.random_range(0..first.len()));
        second.push(g);
    }
    for side in [&mut first, &mut second] {
        while side.len() > max_genes {
            side.remove(rng.random_range(0..side.len()));
        }
    }
    GeneExchange { first, second, moved }
}

/// Rate-based exchange: each gene moves independently when `r ≤ rate`, `r ~ U(0,1)`.
pub fn rate_based_exchange<T: Clone, R: Rng + ?Sized>(
    a: &[T],
    b: &[T],
    rate: f64,
    max_genes: usize,
    rng: &mut R,
) -> GeneExchange<T> {
    let mut draw = |n: usize| -> Vec<bool> { (0..n).map(|_| rng.random::<f64>() <= rate).collect() };
    let move_a = draw(a.len());
    let move_b = draw(b.len());
    exchange_with_mask(a, b, &move_a, &move_b, max_genes, rng)
}

pub fn high_level_crossover<R: Rng + ?Sized>(
    p1: &Individual,
    p2: &Individual,
    cfg: &RunConfig,
    rng: &mut R,
) -> (Individual, Individual) {
    let ex = rate_based_exchange(&p1.genes, &p2.genes, cfg.crossover_rate, cfg.max_genes, rng);
    (p1.offspring(ex.first), p2.offspring(ex.second))
}

/// Standard subtree crossover between one randomly chosen gene of each parent.
pub fn low_level_crossover<R: Rng + ?Sized>(
    p1: &Individual,
    p2: &Individual,
    cfg: &RunConfig,
    rng: &mut R,
) -> (Individual, Individual) {
    let i = rng.random_range(0..p1.genes.len());
    let j = rng.random_range(0..p2.genes.len());
    let (c1, c2) = subtree_crossover(&p1.genes[i], &p2.genes[j], cfg.max_depth, rng);
    let mut g1 = p1.genes.clone();
    g1[i] = c1;
    let mut g2 = p2.genes.clone();
    g2[j] = c2;
    (p1.offspring(g1), p2.offspring(g2))
}

/// Swaps uniformly chosen subtrees. Each child that exceeds `max_depth` is
/// retried with fresh points; after the attempt budget it reverts to its parent.
pub fn subtree_crossover<R: Rng + ?Sized>(
    a: &ExprTree,
    b: &ExprTree,
    max_depth: usize,
    rng: &mut R,
) -> (ExprTree, ExprTree) {
    let (na, nb) = (a.node_count(), b.node_count());
    let mut first = None;
    let mut second = None;
    for _ in 0..DEPTH_REPAIR_ATTEMPTS {
        let ia = rng.random_range(0..na);
        let ib = rng.random_range(0..nb);
        let sa = a.subtree(ia).expect("index within node count").clone();
        let sb = b.subtree(ib).expect("index within node count").clone();
        if first.is_none() {
            let mut c = a.clone();
            c.replace_subtree(ia, sb);
            if c.depth() <= max_depth {
                first = Some(c);
            }
        }
        if second.is_none() {
            let mut c = b.clone();
            c.replace_subtree(ib, sa);
            if c.depth() <= max_depth {
                second = Some(c);
            }
        }
        if first.is_some() && second.is_some() {
            break;
        }
    }
    (first.unwrap_or_else(|| a.clone()), second.unwrap_or_else(|| b.clone()))
}
