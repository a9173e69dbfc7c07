//! Human-readable renderings of canonical expressions.
//!
//! Coefficients are printed with three significant digits. Terms follow the
//! canonical operand order, with the constant term last.

use super::canon::Sym;
use crate::expr::Function;

pub const DISPLAY_DIGITS: usize = 3;

/// Formats `v` with `digits` significant digits, trimming trailing zeros.
pub fn format_significant(v: f64, digits: usize) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let rounded: f64 = format!("{:.*e}", digits.saturating_sub(1), v).parse().unwrap_or(v);
    let exp = rounded.abs().log10().floor() as i32;
    if (-4..6).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{rounded:.decimals$}"))
    } else {
        let s = format!("{:.*e}", digits.saturating_sub(1), rounded);
        let (mantissa, e) = s.split_once('e').expect("scientific form");
        format!("{}e{e}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

trait Style {
    fn var(&self, i: usize) -> String;
    fn num(&self, v: f64) -> String;
    fn times(&self) -> &'static str;
    fn group(&self, s: &str) -> String;
    fn frac(&self, numer: &str, denom: &str, denom_is_atom: bool) -> String;
    fn pow(&self, base: &str, n: i32) -> String;
    fn call(&self, f: Function, args: &[String]) -> String;
}

struct Infix<'a> {
    names: Option<&'a [String]>,
}

impl Style for Infix<'_> {
    fn var(&self, i: usize) -> String {
        match self.names.and_then(|n| n.get(i)) {
            Some(n) => n.clone(),
            None => format!("x{}", i + 1),
        }
    }
    fn num(&self, v: f64) -> String {
        format_significant(v, DISPLAY_DIGITS)
    }
    fn times(&self) -> &'static str {
        "*"
    }
    fn group(&self, s: &str) -> String {
        format!("({s})")
    }
    fn frac(&self, numer: &str, denom: &str, denom_is_atom: bool) -> String {
        if denom_is_atom {
            format!("{numer}/{denom}")
        } else {
            format!("{numer}/({denom})")
        }
    }
    fn pow(&self, base: &str, n: i32) -> String {
        format!("{base}^{n}")
    }
    fn call(&self, f: Function, args: &[String]) -> String {
        format!("{}({})", f.name(), args.join(", "))
    }
}

struct Latex;

impl Style for Latex {
    fn var(&self, i: usize) -> String {
        format!("x_{{{}}}", i + 1)
    }
    fn num(&self, v: f64) -> String {
        let s = format_significant(v, DISPLAY_DIGITS);
        match s.split_once('e') {
            Some((m, e)) => {
                let e: i32 = e.parse().expect("exponent");
                format!("{m} \\times 10^{{{e}}}")
            }
            None => s,
        }
    }
    fn times(&self) -> &'static str {
        "\\,"
    }
    fn group(&self, s: &str) -> String {
        format!("\\left({s}\\right)")
    }
    fn frac(&self, numer: &str, denom: &str, _: bool) -> String {
        format!("\\frac{{{numer}}}{{{denom}}}")
    }
    fn pow(&self, base: &str, n: i32) -> String {
        format!("{base}^{{{n}}}")
    }
    fn call(&self, f: Function, args: &[String]) -> String {
        let a = args.join(", ");
        match f {
            Function::Sin => format!("\\sin\\left({a}\\right)"),
            Function::Cos => format!("\\cos\\left({a}\\right)"),
            Function::Tanh => format!("\\tanh\\left({a}\\right)"),
            Function::Exp => format!("\\exp\\left({a}\\right)"),
            Function::Abs => format!("\\left|{a}\\right|"),
            Function::PSqrt => format!("\\sqrt{{\\left|{a}\\right|}}"),
            Function::PLog10 => format!("\\log_{{10}}\\left|{a}\\right|"),
            other => format!("\\operatorname{{{}}}\\left({a}\\right)", other.name()),
        }
    }
}

fn render(s: &Sym, st: &dyn Style) -> String {
    match s {
        Sym::Add(terms) => {
            let mut out = String::new();
            for (i, t) in terms.iter().enumerate() {
                let (coef, mono) = t.split_coefficient();
                let body = term_body(coef.abs(), mono.as_ref(), st);
                match (i, coef < 0.0) {
                    (0, true) => out.push('-'),
                    (0, false) => {}
                    (_, true) => out.push_str(" - "),
                    (_, false) => out.push_str(" + "),
                }
                out.push_str(&body);
            }
            out
        }
        other => {
            let (coef, mono) = other.split_coefficient();
            let body = term_body(coef.abs(), mono.as_ref(), st);
            if coef < 0.0 {
                format!("-{body}")
            } else {
                body
            }
        }
    }
}

fn term_body(coef: f64, mono: Option<&Sym>, st: &dyn Style) -> String {
    let Some(m) = mono else {
        return st.num(coef);
    };
    let prod = product(m, st);
    if coef == 1.0 {
        prod
    } else {
        format!("{}{}{}", st.num(coef), st.times(), prod)
    }
}

fn product(m: &Sym, st: &dyn Style) -> String {
    let factors: Vec<&Sym> = match m {
        Sym::Mul(f) => f.iter().collect(),
        other => vec![other],
    };
    let mut numer = Vec::new();
    let mut denom = Vec::new();
    for f in factors {
        match f {
            Sym::Pow(b, n) if *n < 0 => denom.push(power(b, -n, st)),
            other => numer.push(factor(other, st)),
        }
    }
    let numer = if numer.is_empty() { "1".to_string() } else { numer.join(st.times()) };
    if denom.is_empty() {
        numer
    } else {
        let atom = denom.len() == 1;
        st.frac(&numer, &denom.join(st.times()), atom)
    }
}

fn power(base: &Sym, n: i32, st: &dyn Style) -> String {
    let b = factor(base, st);
    if n == 1 {
        b
    } else {
        st.pow(&b, n)
    }
}

fn factor(s: &Sym, st: &dyn Style) -> String {
    match s {
        Sym::Var(i) => st.var(*i),
        Sym::Num(v) if *v >= 0.0 => st.num(*v),
        Sym::Call(f, args) => {
            let args: Vec<String> = args.iter().map(|a| render(a, st)).collect();
            st.call(*f, &args)
        }
        Sym::Pow(b, n) if *n > 0 => power(b, *n, st),
        other => st.group(&render(other, st)),
    }
}

/// Plain infix text using `x1..xM`.
pub fn to_infix(s: &Sym) -> String {
    render(s, &Infix { names: None })
}

/// Plain infix text using the supplied variable names.
pub fn to_infix_named(s: &Sym, names: &[String]) -> String {
    render(s, &Infix { names: Some(names) })
}

pub fn to_latex(s: &Sym) -> String {
    render(s, &Latex)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_prefix;
    use crate::simplify::simplify;

    fn infix(text: &str) -> String {
        to_infix(&simplify(&parse_prefix(text).unwrap()).expr)
    }

    #[test]
    fn significant_digits() {
        assert_eq!(format_significant(8.8612, 3), "8.86");
        assert_eq!(format_significant(0.0033612, 3), "0.00336");
        assert_eq!(format_significant(-3.2901, 3), "-3.29");
        assert_eq!(format_significant(9.996, 3), "10");
        assert_eq!(format_significant(1234567.0, 3), "1.23e6");
        assert_eq!(format_significant(2.0, 3), "2");
    }

    #[test]
    fn infix_shapes() {
        assert_eq!(infix("(plus x1 0.0)"), "x1");
        assert_eq!(infix("(minus x2 (times 2.5 x1))"), "-2.5*x1 + x2");
        assert_eq!(infix("(divide x1 (plus x2 1.0))"), "x1/(x2 + 1)");
        assert_eq!(infix("(times (square x1) (sin x2))"), "x1^2*sin(x2)");
        assert_eq!(infix("(negate (cos x1))"), "-cos(x1)");
    }

    #[test]
    fn latex_template() {
        let e = simplify(&parse_prefix("(plus (sin x1) (sin x1))").unwrap());
        assert_eq!(to_latex(&e.expr), "2\\,\\sin\\left(x_{1}\\right)");
        let e = simplify(&parse_prefix("(divide x1 x2)").unwrap());
        assert_eq!(to_latex(&e.expr), "\\frac{x_{1}}{x_{2}}");
    }
}
