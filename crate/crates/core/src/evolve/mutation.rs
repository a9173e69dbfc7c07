use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_distr::Normal;

use super::config::RunConfig;
use super::individual::Individual;
use crate::expr::{random_erc, random_leaf, random_tree, ExprTree, Method, Palette};

/// Standard deviation of constant perturbation as a fraction of the ERC range width.
pub const ERC_PERTURBATION_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MutationKind {
    SubtreeReplace,
    NodeSubstitute,
    ConstantPerturb,
    ConstantReplace,
    Shrink,
    VariableSwap,
}

impl MutationKind {
    pub const ALL: [MutationKind; 6] = [
        MutationKind::SubtreeReplace,
        MutationKind::NodeSubstitute,
        MutationKind::ConstantPerturb,
        MutationKind::ConstantReplace,
        MutationKind::Shrink,
        MutationKind::VariableSwap,
    ];

    /// Whether the operator always preserves node count.
    pub fn preserves_size(self) -> bool {
        !matches!(self, MutationKind::SubtreeReplace | MutationKind::Shrink)
    }
}

/// Mutates one uniformly chosen gene with an operator drawn by the configured weights.
pub fn mutate<R: Rng + ?Sized>(ind: &Individual, cfg: &RunConfig, palette: &Palette, rng: &mut R) -> Individual {
    let dist = WeightedIndex::new(cfg.mutation_weights).expect("weights validated with the config");
    let kind = MutationKind::ALL[dist.sample(rng)];
    let i = rng.random_range(0..ind.genes.len());
    let mut genes = ind.genes.clone();
    genes[i] = mutate_tree(&genes[i], kind, cfg.max_depth, palette, rng).0;
    ind.offspring(genes)
}

/// Applies `kind` to `tree`, falling back to subtree replacement when the
/// operator has nothing to act on. Returns the new tree and the operator
/// actually applied.
pub fn mutate_tree<R: Rng + ?Sized>(
    tree: &ExprTree,
    kind: MutationKind,
    max_depth: usize,
    palette: &Palette,
    rng: &mut R,
) -> (ExprTree, MutationKind) {
    let mut out = tree.clone();
    let applied = match kind {
        MutationKind::SubtreeReplace => None,
        MutationKind::NodeSubstitute => substitute_node(&mut out, palette, rng),
        MutationKind::ConstantPerturb => {
            let sigma = ERC_PERTURBATION_FRACTION * palette.erc_width();
            let noise = Normal::new(0.0, sigma).expect("finite positive sigma");
            with_random_node(&mut out, rng, |t| matches!(t, ExprTree::Const(_)), |node, rng| {
                if let ExprTree::Const(c) = node {
                    *c += noise.sample(rng);
                }
            })
        }
        MutationKind::ConstantReplace => {
            with_random_node(&mut out, rng, |t| matches!(t, ExprTree::Const(_)), |node, rng| {
                *node = ExprTree::Const(random_erc(palette, rng));
            })
        }
        MutationKind::Shrink => with_random_node(&mut out, rng, |t| !t.is_leaf(), |node, rng| {
            *node = random_leaf(palette, rng);
        }),
        MutationKind::VariableSwap if palette.num_inputs > 1 => {
            with_random_node(&mut out, rng, |t| matches!(t, ExprTree::Var(_)), |node, rng| {
                if let ExprTree::Var(i) = node {
                    let j = rng.random_range(0..palette.num_inputs - 1);
                    *i = if j >= *i { j + 1 } else { j };
                }
            })
        }
        MutationKind::VariableSwap => None,
    };
    match applied {
        Some(()) => (out, kind),
        None => (replace_subtree(tree, max_depth, palette, rng), MutationKind::SubtreeReplace),
    }
}

fn replace_subtree<R: Rng + ?Sized>(tree: &ExprTree, max_depth: usize, palette: &Palette, rng: &mut R) -> ExprTree {
    let mut out = tree.clone();
    let idx = rng.random_range(0..tree.node_count());
    let level = tree.depth_of(idx).expect("index within node count");
    let room = max_depth.saturating_sub(level) + 1;
    let fresh = random_tree(palette, room.max(1), rng, Method::Grow).expect("palette validated");
    out.replace_subtree(idx, fresh);
    out
}

fn substitute_node<R: Rng + ?Sized>(tree: &mut ExprTree, palette: &Palette, rng: &mut R) -> Option<()> {
    let candidates: Vec<usize> = (0..tree.node_count())
        .filter(|&i| match tree.subtree(i) {
            Some(ExprTree::Func(f, _)) => palette.functions_with_arity(f.arity()).any(|g| g != *f),
            Some(_) => true,
            None => false,
        })
        .collect();
    if candidates.is_empty() {
        return None;
    }
    let idx = candidates[rng.random_range(0..candidates.len())];
    let node = tree.subtree_mut(idx)?;
    match node {
        ExprTree::Func(f, _) => {
            let options: Vec<_> = palette.functions_with_arity(f.arity()).filter(|g| g != f).collect();
            *f = options[rng.random_range(0..options.len())];
        }
        leaf => *leaf = random_leaf(palette, rng),
    }
    Some(())
}

fn with_random_node<R: Rng + ?Sized>(
    tree: &mut ExprTree,
    rng: &mut R,
    eligible: impl Fn(&ExprTree) -> bool,
    apply: impl FnOnce(&mut ExprTree, &mut R),
) -> Option<()> {
    let candidates: Vec<usize> = (0..tree.node_count())
        .filter(|&i| tree.subtree(i).is_some_and(&eligible))
        .collect();
    if candidates.is_empty() {
        return None;
    }
    let idx = candidates[rng.random_range(0..candidates.len())];
    apply(tree.subtree_mut(idx)?, rng);
    Some(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Function;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_perturbation_spread() {
        let palette = Palette::default_for(2);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let deltas: Vec<f64> = (0..10_000)
            .map(|_| {
                let (t, k) = mutate_tree(&ExprTree::Const(2.0), MutationKind::ConstantPerturb, 4, &palette, &mut rng);
                assert_eq!(k, MutationKind::ConstantPerturb);
                match t {
                    ExprTree::Const(c) => c - 2.0,
                    other => panic!("unexpected {other}"),
                }
            })
            .collect();
        assert!(deltas.iter().all(|d| *d != 0.0));
        let n = deltas.len() as f64;
        let mean = deltas.iter().sum::<f64>() / n;
        let sd = (deltas.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / n).sqrt();
        // N(0, 2^2): standard error of the mean 0.02, of the sd ~0.014.
        assert!(mean.abs() < 0.1, "mean {mean}");
        assert!((sd - 2.0).abs() < 0.1, "sd {sd}");
    }

    #[test]
    fn shrink_on_leaf_falls_through() {
        let palette = Palette::default_for(2);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let (t, k) = mutate_tree(&ExprTree::Var(0), MutationKind::Shrink, 4, &palette, &mut rng);
        assert_eq!(k, MutationKind::SubtreeReplace);
        assert!(t.validate(2).is_ok() && t.depth() <= 4);
    }

    #[test]
    fn size_preserving_operators() {
        let palette = Palette::default_for(3);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5_000 {
            let t = random_tree(&palette, 4, &mut rng, Method::Grow).unwrap();
            for kind in MutationKind::ALL {
                let (m, applied) = mutate_tree(&t, kind, 4, &palette, &mut rng);
                assert!(m.depth() <= 4 && m.validate(3).is_ok());
                if applied.preserves_size() {
                    assert_eq!(m.node_count(), t.node_count(), "{kind:?} on {t}");
                }
                if applied != kind {
                    assert_eq!(applied, MutationKind::SubtreeReplace);
                }
            }
        }
    }

    #[test]
    fn variable_swap_changes_index() {
        let palette = Palette::default_for(3);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let t = ExprTree::binary(Function::Plus, ExprTree::Var(1), ExprTree::Const(1.0));
        for _ in 0..100 {
            let (m, k) = mutate_tree(&t, MutationKind::VariableSwap, 4, &palette, &mut rng);
            assert_eq!(k, MutationKind::VariableSwap);
            assert_ne!(m.children()[0], ExprTree::Var(1));
        }
    }
}
