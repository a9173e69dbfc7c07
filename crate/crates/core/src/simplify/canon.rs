//! A bounded rewrite system producing canonical algebraic forms.
//!
//! Sums and products are flattened into n-ary nodes, numeric factors are
//! folded, like terms are collected with numeric coefficients and operands
//! are sorted by a fixed total order:
//!
//! 1. input variables, by index
//! 2. integer powers, by base then exponent
//! 3. products
//! 4. sums
//! 5. other functions, by name then arguments
//! 6. numeric constants, by value
//!
//! No factoring and no trigonometric identities are attempted.

use std::cmp::Ordering;
use std::fmt;

use crate::expr::{ExprTree, Function, PROTECTED_DIV_EPS};

/// Largest integer exponent folded into a power node from `power(x, n)`.
const MAX_FOLDED_EXPONENT: f64 = 16.0;
const MAX_PASSES: usize = 32;

#[derive(Debug, Clone)]
pub enum Sym {
    Num(f64),
    Var(usize),
    Add(Vec<Sym>),
    Mul(Vec<Sym>),
    Pow(Box<Sym>, i32),
    Call(Function, Vec<Sym>),
}

/// Rewrites that change the value where the source was defined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Caveat {
    /// `x/x → 1`, which differs where `x` vanishes.
    SelfDivision,
}

/// A simplified expression plus the caveats incurred producing it.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalExpr {
    pub expr: Sym,
    pub caveats: Vec<Caveat>,
}

impl PartialEq for Sym {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Sym {}

impl PartialOrd for Sym {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Sym {
    fn cmp(&self, other: &Self) -> Ordering {
        fn rank(s: &Sym) -> u8 {
            match s {
                Sym::Var(_) => 0,
                Sym::Pow(..) => 1,
                Sym::Mul(_) => 2,
                Sym::Add(_) => 3,
                Sym::Call(..) => 4,
                Sym::Num(_) => 5,
            }
        }
        match (self, other) {
            (Sym::Num(a), Sym::Num(b)) => a.total_cmp(b),
            (Sym::Var(a), Sym::Var(b)) => a.cmp(b),
            (Sym::Pow(a, n), Sym::Pow(b, m)) => a.cmp(b).then(n.cmp(m)),
            (Sym::Add(a), Sym::Add(b)) | (Sym::Mul(a), Sym::Mul(b)) => a.cmp(b),
            (Sym::Call(f, a), Sym::Call(g, b)) => f.name().cmp(g.name()).then_with(|| a.cmp(b)),
            _ => rank(self).cmp(&rank(other)),
        }
    }
}

fn num(v: f64) -> Sym {
    // Normalise signed zero so structurally equal forms compare equal.
    Sym::Num(if v == 0.0 { 0.0 } else { v })
}

impl Sym {
    pub fn from_tree(tree: &ExprTree) -> Sym {
        use Function::*;
        match tree {
            ExprTree::Var(i) => Sym::Var(*i),
            ExprTree::Const(c) => num(*c),
            ExprTree::Func(f, c) => {
                let a = |i: usize| Sym::from_tree(&c[i]);
                match f {
                    Plus | Add3 => Sym::Add(c.iter().map(Sym::from_tree).collect()),
                    Times | Mult3 => Sym::Mul(c.iter().map(Sym::from_tree).collect()),
                    Minus => Sym::Add(vec![a(0), Sym::Mul(vec![num(-1.0), a(1)])]),
                    Negate => Sym::Mul(vec![num(-1.0), a(0)]),
                    Divide => Sym::Mul(vec![a(0), Sym::Pow(Box::new(a(1)), -1)]),
                    Square => Sym::Pow(Box::new(a(0)), 2),
                    Cube => Sym::Pow(Box::new(a(0)), 3),
                    NegExp => Sym::Call(Exp, vec![Sym::Mul(vec![num(-1.0), a(0)])]),
                    Gauss => Sym::Call(
                        Exp,
                        vec![Sym::Mul(vec![num(-1.0), Sym::Pow(Box::new(a(0)), 2)])],
                    ),
                    _ => Sym::Call(*f, c.iter().map(Sym::from_tree).collect()),
                }
            }
        }
    }

    pub fn as_num(&self) -> Option<f64> {
        match self {
            Sym::Num(v) => Some(*v),
            _ => None,
        }
    }

    pub fn eval_row(&self, row: &[f64]) -> f64 {
        match self {
            Sym::Num(v) => *v,
            Sym::Var(i) => row[*i],
            Sym::Add(t) => t.iter().map(|s| s.eval_row(row)).sum(),
            Sym::Mul(f) => f.iter().map(|s| s.eval_row(row)).product(),
            Sym::Pow(b, n) => b.eval_row(row).powi(*n),
            Sym::Call(f, args) => {
                let mut vals = [0.0; 3];
                for (slot, a) in vals.iter_mut().zip(args) {
                    *slot = a.eval_row(row);
                }
                f.apply(&vals[..args.len()])
            }
        }
    }

    /// Zero-based input indices referenced.
    pub fn variables(&self) -> Vec<usize> {
        fn walk(s: &Sym, out: &mut Vec<usize>) {
            match s {
                Sym::Var(i) => out.push(*i),
                Sym::Num(_) => {}
                Sym::Pow(b, _) => walk(b, out),
                Sym::Add(c) | Sym::Mul(c) | Sym::Call(_, c) => c.iter().for_each(|c| walk(c, out)),
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Splits a term into its numeric coefficient and the remaining factor.
    pub fn split_coefficient(&self) -> (f64, Option<Sym>) {
        match self {
            Sym::Num(v) => (*v, None),
            Sym::Mul(factors) => {
                let coef: f64 = factors.iter().filter_map(Sym::as_num).product();
                let rest: Vec<Sym> = factors.iter().filter(|f| f.as_num().is_none()).cloned().collect();
                let rest = match rest.len() {
                    0 => None,
                    1 => rest.into_iter().next(),
                    _ => Some(Sym::Mul(rest)),
                };
                (coef, rest)
            }
            other => (1.0, Some(other.clone())),
        }
    }
}

fn term(coef: f64, mono: Option<Sym>) -> Sym {
    match mono {
        None => num(coef),
        Some(m) if coef == 1.0 => m,
        Some(Sym::Mul(mut f)) => {
            f.push(num(coef));
            Sym::Mul(f)
        }
        Some(m) => Sym::Mul(vec![m, num(coef)]),
    }
}

struct Rewriter {
    caveats: Vec<Caveat>,
}

impl Rewriter {
    fn rewrite(&mut self, s: Sym) -> Sym {
        match s {
            Sym::Num(v) => num(v),
            Sym::Var(i) => Sym::Var(i),
            Sym::Add(terms) => {
                let terms = terms.into_iter().map(|t| self.rewrite(t)).collect();
                self.sum(terms)
            }
            Sym::Mul(factors) => {
                let factors = factors.into_iter().map(|f| self.rewrite(f)).collect();
                self.product(factors)
            }
            Sym::Pow(base, n) => {
                let b = self.rewrite(*base);
                self.power(b, n)
            }
            Sym::Call(f, args) => {
                let args: Vec<Sym> = args.into_iter().map(|a| self.rewrite(a)).collect();
                self.call(f, args)
            }
        }
    }

    fn sum(&mut self, terms: Vec<Sym>) -> Sym {
        let mut flat = Vec::with_capacity(terms.len());
        for t in terms {
            match t {
                Sym::Add(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        let mut parts: Vec<(Option<Sym>, f64)> = flat
            .iter()
            .map(|t| {
                let (c, m) = t.split_coefficient();
                (m, c)
            })
            .collect();
        // Constants (None) sort last; coefficients summed in sorted order.
        parts.sort_by(|a, b| match (&a.0, &b.0) {
            (None, None) => a.1.total_cmp(&b.1),
            (None, Some(_)) => Ordering::Greater,
            (Some(_), None) => Ordering::Less,
            (Some(x), Some(y)) => x.cmp(y).then(a.1.total_cmp(&b.1)),
        });
        let mut out: Vec<Sym> = Vec::new();
        let mut i = 0;
        while i < parts.len() {
            let mut j = i;
            let mut coef = 0.0;
            while j < parts.len() && parts[j].0 == parts[i].0 {
                coef += parts[j].1;
                j += 1;
            }
            if coef != 0.0 {
                out.push(term(coef, parts[i].0.clone()));
            }
            i = j;
        }
        match out.len() {
            0 => num(0.0),
            1 => out.pop().expect("one term"),
            _ => Sym::Add(out),
        }
    }

    fn product(&mut self, factors: Vec<Sym>) -> Sym {
        let mut flat = Vec::with_capacity(factors.len());
        for f in factors {
            match f {
                Sym::Mul(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        let mut consts: Vec<f64> = flat.iter().filter_map(Sym::as_num).collect();
        consts.sort_by(f64::total_cmp);
        let coef: f64 = consts.iter().product();
        if coef == 0.0 {
            return num(0.0);
        }
        // Group by base, summing integer exponents.
        let mut powers: Vec<(Sym, i32)> = flat
            .into_iter()
            .filter(|f| f.as_num().is_none())
            .map(|f| match f {
                Sym::Pow(b, n) => (*b, n),
                other => (other, 1),
            })
            .collect();
        powers.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut rest: Vec<Sym> = Vec::new();
        let mut i = 0;
        while i < powers.len() {
            let mut j = i;
            let mut exp = 0;
            let mut saw_negative = false;
            let mut saw_positive = false;
            while j < powers.len() && powers[j].0 == powers[i].0 {
                exp += powers[j].1;
                saw_negative |= powers[j].1 < 0;
                saw_positive |= powers[j].1 > 0;
                j += 1;
            }
            if exp == 0 && saw_negative && saw_positive {
                self.caveats.push(Caveat::SelfDivision);
            }
            match exp {
                0 => {}
                1 => rest.push(powers[i].0.clone()),
                n => rest.push(Sym::Pow(Box::new(powers[i].0.clone()), n)),
            }
            i = j;
        }
        if rest.is_empty() {
            return num(coef);
        }
        // Distribute a numeric coefficient over a lone sum.
        if rest.len() == 1 && coef != 1.0 {
            if let Sym::Add(terms) = &rest[0] {
                let scaled = terms
                    .iter()
                    .map(|t| {
                        let (c, m) = t.split_coefficient();
                        term(c * coef, m)
                    })
                    .collect();
                return self.sum(scaled);
            }
        }
        rest.sort();
        if coef != 1.0 {
            rest.push(num(coef));
        }
        if rest.len() == 1 {
            rest.pop().expect("one factor")
        } else {
            Sym::Mul(rest)
        }
    }

    fn power(&mut self, base: Sym, n: i32) -> Sym {
        match (base, n) {
            (_, 0) => num(1.0),
            (b, 1) => b,
            (Sym::Num(v), n) => num(v.powi(n)),
            (Sym::Pow(b, m), n) => self.power(*b, m * n),
            (Sym::Mul(factors), n) => {
                let raised = factors.into_iter().map(|f| self.power(f, n)).collect();
                self.product(raised)
            }
            (b, n) => Sym::Pow(Box::new(b), n),
        }
    }

    fn call(&mut self, f: Function, args: Vec<Sym>) -> Sym {
        if args.iter().all(|a| a.as_num().is_some()) {
            let vals: Vec<f64> = args.iter().filter_map(Sym::as_num).collect();
            let v = f.apply(&vals);
            if v.is_finite() {
                return num(v);
            }
        }
        match f {
            Function::PDivide => {
                if args[1] == args[0] {
                    self.caveats.push(Caveat::SelfDivision);
                    return num(1.0);
                }
                if args[0] == Sym::Num(0.0) {
                    return num(0.0);
                }
                if let Some(c) = args[1].as_num() {
                    if c.abs() < PROTECTED_DIV_EPS {
                        return num(0.0);
                    }
                    let mut it = args.into_iter();
                    let numer = it.next().expect("two args");
                    return self.product(vec![numer, num(1.0 / c)]);
                }
                Sym::Call(f, args)
            }
            Function::Power => {
                if let Some(n) = args[1].as_num() {
                    if n.fract() == 0.0 && n.abs() <= MAX_FOLDED_EXPONENT {
                        let base = args.into_iter().next().expect("two args");
                        return self.power(base, n as i32);
                    }
                }
                Sym::Call(f, args)
            }
            Function::Abs => match args.into_iter().next().expect("one arg") {
                inner @ Sym::Call(Function::Abs, _) => inner,
                Sym::Pow(b, n) if n % 2 == 0 => Sym::Pow(b, n),
                other => Sym::Call(f, vec![other]),
            },
            _ => Sym::Call(f, args),
        }
    }
}

/// Canonicalises a symbolic expression to a fixpoint.
pub fn canonicalize(expr: Sym) -> CanonicalExpr {
    let mut rw = Rewriter { caveats: Vec::new() };
    let mut cur = expr;
    for _ in 0..MAX_PASSES {
        let next = rw.rewrite(cur.clone());
        if next == cur {
            break;
        }
        cur = next;
    }
    let mut caveats = rw.caveats;
    caveats.sort();
    caveats.dedup();
    CanonicalExpr { expr: cur, caveats }
}

/// Simplifies one gene.
pub fn simplify(tree: &ExprTree) -> CanonicalExpr {
    canonicalize(Sym::from_tree(tree))
}

impl CanonicalExpr {
    pub fn eval_row(&self, row: &[f64]) -> f64 {
        self.expr.eval_row(row)
    }

    pub fn variables(&self) -> Vec<usize> {
        self.expr.variables()
    }

    pub fn has_caveat(&self, c: Caveat) -> bool {
        self.caveats.contains(&c)
    }
}

/// Full-precision structural text, used as a stable identity for simplified forms.
impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, head: &str, items: &[Sym]| -> fmt::Result {
            write!(f, "({head}")?;
            for i in items {
                write!(f, " {i}")?;
            }
            f.write_str(")")
        };
        match self {
            Sym::Num(v) => write!(f, "{v:?}"),
            Sym::Var(i) => write!(f, "x{}", i + 1),
            Sym::Add(t) => list(f, "+", t),
            Sym::Mul(t) => list(f, "*", t),
            Sym::Pow(b, n) => write!(f, "(^ {b} {n})"),
            Sym::Call(func, a) => list(f, func.name(), a),
        }
    }
}
