//! Reference implementations written independently of the engine.

#![allow(dead_code)]

use mgsr_core::expr::ExprTree;

/// Dense column-major matrix for the oracle routines.
#[derive(Clone, Debug)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Mat {
    pub fn from_columns(cols: &[Vec<f64>]) -> Mat {
        let rows = cols[0].len();
        Mat {
            rows,
            cols: cols.len(),
            data: cols.iter().flat_map(|c| c.iter().copied()).collect(),
        }
    }

    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }
}

/// One-sided Jacobi SVD. Returns `(u, σ, v)` with `u` holding `σ_j·u_j` per
/// column (column-major), `σ` unsorted, and `v` column-major `K × K`.
fn jacobi_svd(a: &Mat) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let (n, k) = (a.rows, a.cols);
    let mut u = a.data.clone();
    let mut v = vec![0.0; k * k];
    for i in 0..k {
        v[i * k + i] = 1.0;
    }
    for _sweep in 0..100 {
        let mut rotated = false;
        for p in 0..k {
            for q in (p + 1)..k {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for r in 0..n {
                    let (up, uq) = (u[p * n + r], u[q * n + r]);
                    alpha += up * up;
                    beta += uq * uq;
                    gamma += up * uq;
                }
                if gamma == 0.0 || gamma.abs() <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = if zeta == 0.0 {
                    1.0
                } else {
                    zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for r in 0..n {
                    let (up, uq) = (u[p * n + r], u[q * n + r]);
                    u[p * n + r] = c * up - s * uq;
                    u[q * n + r] = s * up + c * uq;
                }
                for r in 0..k {
                    let (vp, vq) = (v[p * k + r], v[q * k + r]);
                    v[p * k + r] = c * vp - s * vq;
                    v[q * k + r] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let sigma = (0..k)
        .map(|j| u[j * n..(j + 1) * n].iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    (u, sigma, v)
}

/// Minimum-norm least-squares solution via a one-sided Jacobi SVD.
///
/// Singular values at or below `max(N, K)·σmax·ε` are treated as zero.
pub fn jacobi_pinv_solve(a: &Mat, y: &[f64]) -> Vec<f64> {
    let (n, k) = (a.rows, a.cols);
    let (u, sigma, v) = jacobi_svd(a);
    let smax = sigma.iter().cloned().fold(0.0, f64::max);
    let tol = n.max(k) as f64 * smax * f64::EPSILON;
    let mut b = vec![0.0; k];
    for j in 0..k {
        if sigma[j] <= tol {
            continue;
        }
        // Column j of u is σ_j·u_j, so the coefficient is (σ_j u_j)ᵀy / σ_j².
        let proj: f64 = (0..n).map(|r| u[j * n + r] * y[r]).sum::<f64>() / (sigma[j] * sigma[j]);
        for i in 0..k {
            b[i] += v[j * k + i] * proj;
        }
    }
    b
}

fn jacobi_truncated(a: &Mat, d: &[f64], y: &[f64]) -> (Vec<f64>, bool) {
    let (n, k) = (a.rows, a.cols);
    let scaled = Mat {
        rows: n,
        cols: k,
        data: (0..k).flat_map(|j| a.col(j).iter().map(|v| v / d[j]).collect::<Vec<_>>()).collect(),
    };
    let (u, sigma, v) = jacobi_svd(&scaled);
    let smax = sigma.iter().cloned().fold(0.0, f64::max);
    let tol = n.max(k) as f64 * smax * f64::EPSILON;
    let mut b = vec![0.0; k];
    let mut truncated = false;
    for j in 0..k {
        if sigma[j] <= tol {
            truncated = true;
            continue;
        }
        let proj: f64 = (0..n).map(|r| u[j * n + r] * y[r]).sum::<f64>() / (sigma[j] * sigma[j]);
        for i in 0..k {
            b[i] += v[j * k + i] * proj / d[i];
        }
    }
    (b, truncated)
}

/// Least squares as the engine specifies it: the plain truncated pseudo-inverse,
/// replaced by the equilibrated-rank solve only when that is strictly better
/// by more than `1e-12·‖y‖²`.
pub fn reference_lstsq(a: &Mat, y: &[f64]) -> Vec<f64> {
    let k = a.cols;
    let (plain, truncated) = jacobi_truncated(a, &vec![1.0; k], y);
    if !truncated {
        return plain;
    }
    let d: Vec<f64> = (0..k)
        .map(|j| {
            let m = a.col(j).iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if m > 0.0 {
                m
            } else {
                1.0
            }
        })
        .collect();
    let (eq, _) = jacobi_truncated(a, &d, y);
    let sse = |b: &[f64]| -> f64 {
        oracle_predict(a, b).iter().zip(y).map(|(p, t)| (t - p) * (t - p)).sum()
    };
    let yty: f64 = y.iter().map(|v| v * v).sum();
    if eq.iter().all(|v| v.is_finite()) && sse(&eq) < sse(&plain) - 1e-12 * yty {
        eq
    } else {
        plain
    }
}

pub fn oracle_predict(a: &Mat, b: &[f64]) -> Vec<f64> {
    (0..a.rows).map(|r| (0..a.cols).map(|j| a.col(j)[r] * b[j]).sum()).collect()
}

pub fn oracle_r2(y: &[f64], pred: &[f64]) -> f64 {
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let sst: f64 = y.iter().map(|v| (v - mean) * (v - mean)).sum();
    let sse: f64 = y.iter().zip(pred).map(|(a, p)| (a - p) * (a - p)).sum();
    1.0 - sse / sst
}

/// Expressional complexity from the preorder arity sequence: the size of the
/// subtree rooted at each position, found by counting open slots, summed.
pub fn ec_bruteforce(t: &ExprTree) -> usize {
    fn arities(t: &ExprTree, out: &mut Vec<usize>) {
        match t {
            ExprTree::Func(_, c) => {
                out.push(c.len());
                for ch in c {
                    arities(ch, out);
                }
            }
            _ => out.push(0),
        }
    }
    let mut seq = Vec::new();
    arities(t, &mut seq);
    let mut total = 0;
    for start in 0..seq.len() {
        let mut open = 1usize;
        let mut end = start;
        while open > 0 {
            open = open - 1 + seq[end];
            end += 1;
        }
        total += end - start;
    }
    total
}

pub fn pareto_bruteforce(points: &[(f64, f64)]) -> Vec<bool> {
    points
        .iter()
        .map(|p| {
            !points
                .iter()
                .any(|q| q.0 <= p.0 && q.1 <= p.1 && (q.0 < p.0 || q.1 < p.1))
        })
        .collect()
}

/// Interpreter for the C subset emitted by the snippet exporter.
pub mod c {
    #[derive(Debug, Clone, PartialEq)]
    enum Tok {
        Num(f64),
        Ident(String),
        Op(&'static str),
    }

    fn lex(src: &str) -> Vec<Tok> {
        const OPS: [&str; 16] = [
            "||", "==", "<=", ">=", "!", "<", ">", "+", "-", "*", "/", "?", ":", "(", ")", ",",
        ];
        let b = src.as_bytes();
        let mut i = 0;
        let mut out = Vec::new();
        while i < b.len() {
            let c = b[i] as char;
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() || (c == '.' && i + 1 < b.len() && (b[i + 1] as char).is_ascii_digit()) {
                let start = i;
                while i < b.len() {
                    let d = b[i] as char;
                    let exp_sign = (d == '-' || d == '+') && matches!(b[i - 1] as char, 'e' | 'E');
                    if d.is_ascii_digit() || d == '.' || d == 'e' || d == 'E' || exp_sign {
                        i += 1;
                    } else {
                        break;
                    }
                }
                out.push(Tok::Num(src[start..i].parse().expect("numeric literal")));
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < b.len() && ((b[i] as char).is_ascii_alphanumeric() || b[i] == b'_') {
                    i += 1;
                }
                out.push(Tok::Ident(src[start..i].to_string()));
            } else {
                let op = OPS
                    .iter()
                    .find(|op| src[i..].starts_with(**op))
                    .unwrap_or_else(|| panic!("unexpected character '{c}'"));
                out.push(Tok::Op(op));
                i += op.len();
            }
        }
        out
    }

    #[derive(Debug)]
    pub enum Node {
        Num(f64),
        Var(usize),
        Neg(Box<Node>),
        Not(Box<Node>),
        Bin(&'static str, Box<Node>, Box<Node>),
        Cond(Box<Node>, Box<Node>, Box<Node>),
        Call(String, Vec<Node>),
    }

    struct Parser {
        toks: Vec<Tok>,
        pos: usize,
    }

    impl Parser {
        fn peek_op(&self) -> Option<&'static str> {
            match self.toks.get(self.pos) {
                Some(Tok::Op(o)) => Some(o),
                _ => None,
            }
        }
        fn expect(&mut self, op: &str) {
            assert!(self.peek_op() == Some(op), "expected {op} at token {}", self.pos);
            self.pos += 1;
        }
        fn ternary(&mut self) -> Node {
            let c = self.or();
            if self.peek_op() == Some("?") {
                self.pos += 1;
                let a = self.ternary();
                self.expect(":");
                let b = self.ternary();
                return Node::Cond(Box::new(c), Box::new(a), Box::new(b));
            }
            c
        }
        fn or(&mut self) -> Node {
            let mut l = self.cmp();
            while self.peek_op() == Some("||") {
                self.pos += 1;
                let r = self.cmp();
                l = Node::Bin("||", Box::new(l), Box::new(r));
            }
            l
        }
        fn cmp(&mut self) -> Node {
            let mut l = self.add();
            while let Some(op @ ("<" | ">" | "<=" | ">=" | "==")) = self.peek_op() {
                self.pos += 1;
                let r = self.add();
                l = Node::Bin(op, Box::new(l), Box::new(r));
            }
            l
        }
        fn add(&mut self) -> Node {
            let mut l = self.mul();
            while let Some(op @ ("+" | "-")) = self.peek_op() {
                self.pos += 1;
                let r = self.mul();
                l = Node::Bin(op, Box::new(l), Box::new(r));
            }
            l
        }
        fn mul(&mut self) -> Node {
            let mut l = self.unary();
            while let Some(op @ ("*" | "/")) = self.peek_op() {
                self.pos += 1;
                let r = self.unary();
                l = Node::Bin(op, Box::new(l), Box::new(r));
            }
            l
        }
        fn unary(&mut self) -> Node {
            match self.peek_op() {
                Some("-") => {
                    self.pos += 1;
                    Node::Neg(Box::new(self.unary()))
                }
                Some("!") => {
                    self.pos += 1;
                    Node::Not(Box::new(self.unary()))
                }
                _ => self.primary(),
            }
        }
        fn primary(&mut self) -> Node {
            let tok = self.toks[self.pos].clone();
            self.pos += 1;
            match tok {
                Tok::Num(v) => Node::Num(v),
                Tok::Op("(") => {
                    let e = self.ternary();
                    self.expect(")");
                    e
                }
                Tok::Ident(name) => {
                    if self.peek_op() == Some("(") {
                        self.pos += 1;
                        let mut args = vec![self.ternary()];
                        while self.peek_op() == Some(",") {
                            self.pos += 1;
                            args.push(self.ternary());
                        }
                        self.expect(")");
                        Node::Call(name, args)
                    } else {
                        let idx: usize = name
                            .strip_prefix('x')
                            .and_then(|s| s.parse().ok())
                            .unwrap_or_else(|| panic!("unknown identifier {name}"));
                        Node::Var(idx - 1)
                    }
                }
                other => panic!("unexpected token {other:?}"),
            }
        }
    }

    /// Parses the expression after `return` in a generated function.
    pub fn parse_snippet(src: &str) -> Node {
        let start = src.find("return").expect("return statement") + "return".len();
        let end = start + src[start..].find(';').expect("semicolon");
        let mut p = Parser {
            toks: lex(&src[start..end]),
            pos: 0,
        };
        let node = p.ternary();
        assert_eq!(p.pos, p.toks.len(), "trailing tokens");
        node
    }

    fn truth(v: f64) -> bool {
        v != 0.0
    }

    pub fn eval(n: &Node, x: &[f64]) -> f64 {
        match n {
            Node::Num(v) => *v,
            Node::Var(i) => x[*i],
            Node::Neg(a) => -eval(a, x),
            Node::Not(a) => (!truth(eval(a, x))) as u8 as f64,
            Node::Cond(c, a, b) => {
                if truth(eval(c, x)) {
                    eval(a, x)
                } else {
                    eval(b, x)
                }
            }
            Node::Bin("||", a, b) => (truth(eval(a, x)) || truth(eval(b, x))) as u8 as f64,
            Node::Bin(op, a, b) => {
                let (l, r) = (eval(a, x), eval(b, x));
                match *op {
                    "+" => l + r,
                    "-" => l - r,
                    "*" => l * r,
                    "/" => l / r,
                    "<" => (l < r) as u8 as f64,
                    ">" => (l > r) as u8 as f64,
                    "<=" => (l <= r) as u8 as f64,
                    ">=" => (l >= r) as u8 as f64,
                    "==" => (l == r) as u8 as f64,
                    other => panic!("operator {other}"),
                }
            }
            Node::Call(f, args) => {
                let a: Vec<f64> = args.iter().map(|e| eval(e, x)).collect();
                match f.as_str() {
                    "sin" => a[0].sin(),
                    "cos" => a[0].cos(),
                    "tanh" => a[0].tanh(),
                    "exp" => a[0].exp(),
                    "log10" => a[0].log10(),
                    "sqrt" => a[0].sqrt(),
                    "fabs" => a[0].abs(),
                    "pow" => a[0].powf(a[1]),
                    "isfinite" => a[0].is_finite() as u8 as f64,
                    other => panic!("unknown function {other}"),
                }
            }
        }
    }
}
