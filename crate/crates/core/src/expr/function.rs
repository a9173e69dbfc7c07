use serde::{Deserialize, Serialize};

/// Denominators with magnitude below this are treated as zero by protected division.
pub const PROTECTED_DIV_EPS: f64 = 1e-12;

/// A building block available to tree generation.
///
/// Every function is an elementwise map over equally long input vectors.
/// The protected variants (`pdivide`, `plog10`, `psqrt`) return finite values
/// for all finite arguments; the rest follow IEEE semantics and can produce
/// infinities or NaN, which the regression layer treats as an invalid model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Function {
    Plus,
    Minus,
    Times,
    PDivide,
    Divide,
    Add3,
    Mult3,
    Tanh,
    Cos,
    Sin,
    Exp,
    PLog10,
    Square,
    Power,
    Abs,
    Cube,
    PSqrt,
    NegExp,
    Negate,
    IfThenElse,
    Gt,
    Lt,
    Gauss,
    Thresh,
    Step,
}

impl Function {
    pub const ALL: [Function; 25] = [
        Function::Plus,
        Function::Minus,
        Function::Times,
        Function::PDivide,
        Function::Divide,
        Function::Add3,
        Function::Mult3,
        Function::Tanh,
        Function::Cos,
        Function::Sin,
        Function::Exp,
        Function::PLog10,
        Function::Square,
        Function::Power,
        Function::Abs,
        Function::Cube,
        Function::PSqrt,
        Function::NegExp,
        Function::Negate,
        Function::IfThenElse,
        Function::Gt,
        Function::Lt,
        Function::Gauss,
        Function::Thresh,
        Function::Step,
    ];

    /// The default palette: plus, minus, times, pdivide, tanh, cos, sin, square.
    pub const DEFAULT: [Function; 8] = [
        Function::Plus,
        Function::Minus,
        Function::Times,
        Function::PDivide,
        Function::Tanh,
        Function::Cos,
        Function::Sin,
        Function::Square,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Function::Plus => "plus",
            Function::Minus => "minus",
            Function::Times => "times",
            Function::PDivide => "pdivide",
            Function::Divide => "divide",
            Function::Add3 => "add3",
            Function::Mult3 => "mult3",
            Function::Tanh => "tanh",
            Function::Cos => "cos",
            Function::Sin => "sin",
            Function::Exp => "exp",
            Function::PLog10 => "plog10",
            Function::Square => "square",
            Function::Power => "power",
            Function::Abs => "abs",
            Function::Cube => "cube",
            Function::PSqrt => "psqrt",
            Function::NegExp => "negexp",
            Function::Negate => "negate",
            Function::IfThenElse => "ifte",
            Function::Gt => "gt",
            Function::Lt => "lt",
            Function::Gauss => "gauss",
            Function::Thresh => "thresh",
            Function::Step => "step",
        }
    }

    pub fn from_name(name: &str) -> Option<Function> {
        Function::ALL.iter().copied().find(|f| f.name() == name)
    }

    pub fn arity(self) -> usize {
        use Function::*;
        match self {
            Tanh | Cos | Sin | Exp | PLog10 | Square | Abs | Cube | PSqrt | NegExp | Negate
            | Gauss | Step => 1,
            Plus | Minus | Times | PDivide | Divide | Power | Gt | Lt | Thresh => 2,
            Add3 | Mult3 | IfThenElse => 3,
        }
    }

    pub fn is_protected(self) -> bool {
        matches!(self, Function::PDivide | Function::PLog10 | Function::PSqrt)
    }

    /// Scalar semantics. `args.len()` must equal `self.arity()`.
    #[inline]
    pub fn apply(self, args: &[f64]) -> f64 {
        use Function::*;
        match self {
            Plus => args[0] + args[1],
            Minus => args[0] - args[1],
            Times => args[0] * args[1],
            PDivide => protected_div(args[0], args[1]),
            Divide => args[0] / args[1],
            Add3 => args[0] + args[1] + args[2],
            Mult3 => args[0] * args[1] * args[2],
            Tanh => args[0].tanh(),
            Cos => args[0].cos(),
            Sin => args[0].sin(),
            Exp => args[0].exp(),
            PLog10 => protected_log10(args[0]),
            Square => args[0] * args[0],
            Power => args[0].powf(args[1]),
            Abs => args[0].abs(),
            Cube => args[0] * args[0] * args[0],
            PSqrt => args[0].abs().sqrt(),
            NegExp => (-args[0]).exp(),
            Negate => -args[0],
            IfThenElse => {
                if args[0] > 0.0 {
                    args[1]
                } else {
                    args[2]
                }
            }
            Gt => indicator(args[0] > args[1]),
            Lt => indicator(args[0] < args[1]),
            Gauss => (-(args[0] * args[0])).exp(),
            Thresh => indicator(args[0] >= args[1]),
            Step => indicator(args[0] >= 0.0),
        }
    }

    /// Vectorized semantics: all argument slices share one length.
    pub fn apply_columns(self, args: &[Vec<f64>]) -> Vec<f64> {
        debug_assert_eq!(args.len(), self.arity());
        let n = args[0].len();
        match self.arity() {
            1 => args[0].iter().map(|&a| self.apply(&[a])).collect(),
            2 => args[0]
                .iter()
                .zip(&args[1])
                .map(|(&a, &b)| self.apply(&[a, b]))
                .collect(),
            _ => (0..n)
                .map(|i| self.apply(&[args[0][i], args[1][i], args[2][i]]))
                .collect(),
        }
    }
}

#[inline]
fn indicator(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// `a / b`, or 0 when `|b|` is below [`PROTECTED_DIV_EPS`] or the quotient overflows.
#[inline]
pub fn protected_div(a: f64, b: f64) -> f64 {
    if b.abs() < PROTECTED_DIV_EPS {
        return 0.0;
    }
    let q = a / b;
    if q.is_finite() {
        q
    } else {
        0.0
    }
}

#[inline]
pub fn protected_log10(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.abs().log10()
    }
}

impl std::fmt::Display for Function {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn names_round_trip_and_are_unique() {
        let mut names: Vec<_> = Function::ALL.iter().map(|f| f.name()).collect();
        for f in Function::ALL {
            assert_eq!(Function::from_name(f.name()), Some(f));
        }
        names.sort();
        names.dedup();
        assert_eq!(names.len(), Function::ALL.len());
    }

    #[test]
    fn protected_division_convention() {
        assert_eq!(protected_div(3.0, 0.0), 0.0);
        assert_eq!(protected_div(3.0, 5e-13), 0.0);
        assert_eq!(protected_div(3.0, -5e-13), 0.0);
        assert_eq!(protected_div(3.0, 2.0), 1.5);
        assert_eq!(protected_div(1e300, 1e-11), 0.0);
    }

    #[test]
    fn protected_log_and_sqrt() {
        assert_eq!(Function::PLog10.apply(&[0.0]), 0.0);
        assert_eq!(Function::PLog10.apply(&[-100.0]), 2.0);
        assert_eq!(Function::PSqrt.apply(&[-16.0]), 4.0);
    }

    #[test]
    fn gauss_is_bounded_bell() {
        assert_eq!(Function::Gauss.apply(&[0.0]), 1.0);
        assert!((Function::Gauss.apply(&[2.0]) - (-4.0f64).exp()).abs() < 1e-15);
        assert!(Function::Gauss.apply(&[1e10]) == 0.0);
    }

    #[test]
    fn protected_functions_are_total_on_finite_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let specials = [0.0, -0.0, 1e-300, -1e-300, 1e-13, 1e300, -1e300, f64::MAX, f64::MIN];
        for i in 0..100_000 {
            let draw = |rng: &mut ChaCha8Rng| -> f64 {
                match rng.random_range(0..4) {
                    0 => specials[rng.random_range(0..specials.len())],
                    1 => rng.random_range(-1e3..1e3),
                    2 => rng.random_range(-1.0..1.0) * 10f64.powi(rng.random_range(-300..300)),
                    _ => rng.random_range(-1e-12..1e-12),
                }
            };
            let a = draw(&mut rng);
            let b = draw(&mut rng);
            for f in [Function::PDivide, Function::PLog10, Function::PSqrt] {
                let v = f.apply(&[a, b][..f.arity()]);
                assert!(v.is_finite(), "{f}({a}, {b}) = {v} at draw {i}");
            }
        }
    }
}
