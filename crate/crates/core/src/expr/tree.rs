use std::fmt;

use nalgebra::DMatrix;

use super::function::Function;
use crate::error::{Error, Result};

/// One gene: a rooted expression tree over functions, input variables and
/// ephemeral random constants.
///
/// Input variables are stored as zero-based column indices; they print as
/// `x1..xM`.
#[derive(Debug, Clone, PartialEq)]
pub enum ExprTree {
    Func(Function, Vec<ExprTree>),
    Var(usize),
    Const(f64),
}

/// Structural identity of a tree. Constants are compared bit-for-bit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey(String);

impl CanonicalKey {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl ExprTree {
    pub fn func(f: Function, children: Vec<ExprTree>) -> ExprTree {
        debug_assert_eq!(f.arity(), children.len());
        ExprTree::Func(f, children)
    }

    pub fn unary(f: Function, a: ExprTree) -> ExprTree {
        ExprTree::func(f, vec![a])
    }

    pub fn binary(f: Function, a: ExprTree, b: ExprTree) -> ExprTree {
        ExprTree::func(f, vec![a, b])
    }

    pub fn is_leaf(&self) -> bool {
        !matches!(self, ExprTree::Func(..))
    }

    pub fn children(&self) -> &[ExprTree] {
        match self {
            ExprTree::Func(_, c) => c,
            _ => &[],
        }
    }

    pub fn node_count(&self) -> usize {
        1 + self.children().iter().map(ExprTree::node_count).sum::<usize>()
    }

    /// Number of levels; a single leaf has depth 1.
    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(ExprTree::depth).max().unwrap_or(0)
    }

    /// Sum of the node counts of every full subtree.
    pub fn expressional_complexity(&self) -> usize {
        fn walk(t: &ExprTree) -> (usize, usize) {
            let (mut count, mut total) = (1, 0);
            for c in t.children() {
                let (n, ec) = walk(c);
                count += n;
                total += ec;
            }
            (count, total + count)
        }
        walk(self).1
    }

    /// Zero-based indices of the input variables referenced anywhere in the tree.
    pub fn variables(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.visit(&mut |t| {
            if let ExprTree::Var(i) = t {
                out.push(*i);
            }
        });
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn max_var_index(&self) -> Option<usize> {
        self.variables().last().copied()
    }

    pub fn has_constant(&self) -> bool {
        let mut found = false;
        self.visit(&mut |t| found |= matches!(t, ExprTree::Const(_)));
        found
    }

    /// Pre-order traversal.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a ExprTree)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    /// The subtree at pre-order position `index` (root is 0).
    pub fn subtree(&self, index: usize) -> Option<&ExprTree> {
        let mut remaining = index;
        let mut cur = self;
        'descend: loop {
            if remaining == 0 {
                return Some(cur);
            }
            remaining -= 1;
            for c in cur.children() {
                let n = c.node_count();
                if remaining < n {
                    cur = c;
                    continue 'descend;
                }
                remaining -= n;
            }
            return None;
        }
    }

    pub fn subtree_mut(&mut self, index: usize) -> Option<&mut ExprTree> {
        let mut remaining = index;
        let mut cur = self;
        loop {
            if remaining == 0 {
                return Some(cur);
            }
            remaining -= 1;
            let ExprTree::Func(_, children) = cur else {
                return None;
            };
            let mut chosen = None;
            for (i, c) in children.iter().enumerate() {
                let n = c.node_count();
                if remaining < n {
                    chosen = Some(i);
                    break;
                }
                remaining -= n;
            }
            cur = &mut children[chosen?];
        }
    }

    /// Depth of the node at pre-order position `index`, counting the root as 1.
    pub fn depth_of(&self, index: usize) -> Option<usize> {
        fn find(t: &ExprTree, target: usize, level: usize, next: &mut usize) -> Option<usize> {
            if *next == target {
                return Some(level);
            }
            *next += 1;
            t.children().iter().find_map(|c| find(c, target, level + 1, next))
        }
        find(self, index, 1, &mut 0)
    }

    /// Replaces the subtree at `index`, returning the one removed.
    pub fn replace_subtree(&mut self, index: usize, with: ExprTree) -> Option<ExprTree> {
        self.subtree_mut(index).map(|slot| std::mem::replace(slot, with))
    }

    pub fn canonical_key(&self) -> CanonicalKey {
        fn write(t: &ExprTree, out: &mut String) {
            use std::fmt::Write;
            match t {
                ExprTree::Var(i) => {
                    let _ = write!(out, "x{}", i + 1);
                }
                ExprTree::Const(c) => {
                    let _ = write!(out, "#{:016x}", c.to_bits());
                }
                ExprTree::Func(f, children) => {
                    out.push('(');
                    out.push_str(f.name());
                    for c in children {
                        out.push(' ');
                        write(c, out);
                    }
                    out.push(')');
                }
            }
        }
        let mut s = String::new();
        write(self, &mut s);
        CanonicalKey(s)
    }

    /// Checks arity and variable bounds against `num_inputs` columns.
    pub fn validate(&self, num_inputs: usize) -> Result<()> {
        match self {
            ExprTree::Var(i) if *i >= num_inputs => Err(Error::Structural(format!(
                "variable x{} referenced but data has {} input column(s)",
                i + 1,
                num_inputs
            ))),
            ExprTree::Func(f, c) if c.len() != f.arity() => Err(Error::Structural(format!(
                "{} expects {} argument(s), got {}",
                f,
                f.arity(),
                c.len()
            ))),
            ExprTree::Func(_, c) => c.iter().try_for_each(|c| c.validate(num_inputs)),
            _ => Ok(()),
        }
    }

    /// Evaluates the tree on every row of `x` (rows are observations, columns inputs).
    pub fn eval(&self, x: &DMatrix<f64>) -> Result<Vec<f64>> {
        if x.nrows() == 0 {
            return Err(Error::Data("cannot evaluate on an empty data matrix".into()));
        }
        self.validate(x.ncols())?;
        Ok(self.eval_unchecked(x))
    }

    /// Evaluation without bounds validation; panics on out-of-range variables.
    pub fn eval_unchecked(&self, x: &DMatrix<f64>) -> Vec<f64> {
        match self {
            ExprTree::Var(i) => x.column(*i).iter().copied().collect(),
            ExprTree::Const(c) => vec![*c; x.nrows()],
            ExprTree::Func(f, children) => {
                let args: Vec<Vec<f64>> = children.iter().map(|c| c.eval_unchecked(x)).collect();
                f.apply_columns(&args)
            }
        }
    }

    /// Evaluates on a single observation.
    pub fn eval_row(&self, row: &[f64]) -> f64 {
        match self {
            ExprTree::Var(i) => row[*i],
            ExprTree::Const(c) => *c,
            ExprTree::Func(f, children) => {
                let mut args = [0.0; 3];
                for (slot, c) in args.iter_mut().zip(children) {
                    *slot = c.eval_row(row);
                }
                f.apply(&args[..children.len()])
            }
        }
    }
}

/// Prefix text form, e.g. `(plus (sin x1) (times 3.0 x1))`.
///
/// Constants use the shortest representation that parses back to the same
/// `f64`.
impl fmt::Display for ExprTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprTree::Var(i) => write!(f, "x{}", i + 1),
            ExprTree::Const(c) => write!(f, "{c:?}"),
            ExprTree::Func(func, children) => {
                write!(f, "({}", func.name())?;
                for c in children {
                    write!(f, " {c}")?;
                }
                f.write_str(")")
            }
        }
    }
}
