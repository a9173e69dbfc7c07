use rand::Rng;

use super::palette::Palette;
use super::tree::ExprTree;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Nodes above the depth limit may be functions or terminals.
    Grow,
    /// Every branch reaches exactly the depth limit.
    Full,
}

/// Draws a random tree no deeper than `depth_limit` levels.
pub fn random_tree<R: Rng + ?Sized>(
    palette: &Palette,
    depth_limit: usize,
    rng: &mut R,
    method: Method,
) -> Result<ExprTree> {
    if depth_limit == 0 {
        return Err(Error::Config("tree depth limit must be at least 1".into()));
    }
    palette.validate()?;
    Ok(build(palette, depth_limit, rng, method))
}

/// Ramped half-and-half: depth uniform in `2..=max_depth`, method by coin flip.
pub fn ramped_tree<R: Rng + ?Sized>(palette: &Palette, max_depth: usize, rng: &mut R) -> ExprTree {
    let depth = if max_depth <= 2 {
        max_depth.max(1)
    } else {
        rng.random_range(2..=max_depth)
    };
    let method = if rng.random_bool(0.5) {
        Method::Grow
    } else {
        Method::Full
    };
    build(palette, depth, rng, method)
}

fn build<R: Rng + ?Sized>(palette: &Palette, depth: usize, rng: &mut R, method: Method) -> ExprTree {
    let pick_leaf = depth <= 1
        || match method {
            Method::Full => false,
            Method::Grow => {
                let terminals = palette.terminal_count();
                rng.random_range(0..terminals + palette.functions.len()) < terminals
            }
        };
    if pick_leaf {
        return random_leaf(palette, rng);
    }
    let f = palette.functions[rng.random_range(0..palette.functions.len())];
    let children = (0..f.arity()).map(|_| build(palette, depth - 1, rng, method)).collect();
    ExprTree::Func(f, children)
}

/// An input variable or, when enabled, a fresh ERC; each terminal kind is equally likely.
pub fn random_leaf<R: Rng + ?Sized>(palette: &Palette, rng: &mut R) -> ExprTree {
    let k = rng.random_range(0..palette.terminal_count());
    if k < palette.num_inputs {
        ExprTree::Var(k)
    } else {
        ExprTree::Const(random_erc(palette, rng))
    }
}

pub fn random_erc<R: Rng + ?Sized>(palette: &Palette, rng: &mut R) -> f64 {
    let (lo, hi) = palette.erc_range;
    rng.random_range(lo..=hi)
}
