//! Whole-model simplification and portable exports.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::canon::{canonicalize, CanonicalExpr, Sym};
use super::format::{to_infix, to_latex};
use crate::data::SplitKind;
use crate::error::{Error, Result};
use crate::expr::{parse_prefix, ComplexityMeasure, ExprTree, Function, Palette, PROTECTED_DIV_EPS};
use crate::regress::{self, FittedModel};

/// Weights with smaller magnitude drop their gene from the printed form.
pub const NEGLIGIBLE_WEIGHT: f64 = 1e-12;

pub const MODEL_DOCUMENT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct SimplifiedModel {
    pub canonical: CanonicalExpr,
    /// Zero-based gene indices whose weight was negligible.
    pub dropped: Vec<usize>,
}

/// Merges `b0 + Σ bi·gene_i` into one canonical expression.
pub fn simplify_genes(genes: &[ExprTree], weights: &DVector<f64>) -> SimplifiedModel {
    let mut terms = vec![Sym::Num(weights[0])];
    let mut dropped = Vec::new();
    for (i, g) in genes.iter().enumerate() {
        let b = weights[i + 1];
        if b.abs() < NEGLIGIBLE_WEIGHT {
            dropped.push(i);
            continue;
        }
        terms.push(Sym::Mul(vec![Sym::Num(b), Sym::from_tree(g)]));
    }
    SimplifiedModel {
        canonical: canonicalize(Sym::Add(terms)),
        dropped,
    }
}

pub fn simplify_model(m: &FittedModel) -> SimplifiedModel {
    simplify_genes(&m.genes, &m.weights)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Infix,
    Latex,
    C,
    Json,
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<ExportFormat> {
        match s.to_ascii_lowercase().as_str() {
            "infix" | "text" | "txt" => Ok(ExportFormat::Infix),
            "latex" | "tex" => Ok(ExportFormat::Latex),
            "c" | "ccode" => Ok(ExportFormat::C),
            "json" => Ok(ExportFormat::Json),
            _ => Err(Error::UnknownFormat(s.to_string())),
        }
    }
}

impl ExportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ExportFormat::Infix => "txt",
            ExportFormat::Latex => "tex",
            ExportFormat::C => "c",
            ExportFormat::Json => "json",
        }
    }
}

pub fn export(m: &FittedModel, palette: &Palette, measure: ComplexityMeasure, format: ExportFormat) -> Result<String> {
    Ok(match format {
        ExportFormat::Infix => to_infix(&simplify_model(m).canonical.expr),
        ExportFormat::Latex => to_latex(&simplify_model(m).canonical.expr),
        ExportFormat::C => c_snippet(&m.genes, &m.weights, palette.num_inputs, "model"),
        ExportFormat::Json => {
            let doc = ModelDocument::from_model(m, palette, measure);
            serde_json::to_string_pretty(&doc).map_err(|e| Error::Invalid(e.to_string()))?
        }
    })
}

/// A C function reproducing the engine's predictions bit for bit.
///
/// The weighted sum is accumulated in the engine's order. Only exact
/// identities are elided: a zero bias and unit weights.
pub fn c_snippet(genes: &[ExprTree], weights: &DVector<f64>, num_inputs: usize, name: &str) -> String {
    let params: Vec<String> = (1..=num_inputs).map(|i| format!("double x{i}")).collect();
    let mut body = String::new();
    let b0 = weights[0];
    let mut first = true;
    if b0 != 0.0 {
        body.push_str(&c_literal(b0));
        first = false;
    }
    for (i, g) in genes.iter().enumerate() {
        let w = weights[i + 1];
        let gene = c_expr(g);
        let term = if w.abs() == 1.0 { gene } else { format!("{} * {gene}", c_literal(w.abs())) };
        match (first, w.is_sign_negative()) {
            (true, false) => body.push_str(&term),
            (true, true) => {
                let _ = write!(body, "-({term})");
            }
            (false, false) => {
                let _ = write!(body, " + {term}");
            }
            (false, true) => {
                let _ = write!(body, " - {term}");
            }
        }
        first = false;
    }
    if first {
        body.push_str("0.0");
    }
    format!(
        "#include <math.h>\n\ndouble {name}({}) {{\n    return {body};\n}}\n",
        params.join(", ")
    )
}

fn c_literal(v: f64) -> String {
    let s = format!("{v:?}");
    if v < 0.0 {
        format!("({s})")
    } else {
        s
    }
}

fn c_expr(t: &ExprTree) -> String {
    use Function::*;
    match t {
        ExprTree::Var(i) => format!("x{}", i + 1),
        ExprTree::Const(c) => c_literal(*c),
        ExprTree::Func(f, c) => {
            let a: Vec<String> = c.iter().map(c_expr).collect();
            let eps = format!("{PROTECTED_DIV_EPS:?}");
            match f {
                Plus => format!("({} + {})", a[0], a[1]),
                Minus => format!("({} - {})", a[0], a[1]),
                Times => format!("({} * {})", a[0], a[1]),
                Divide => format!("({} / {})", a[0], a[1]),
                Add3 => format!("({} + {} + {})", a[0], a[1], a[2]),
                Mult3 => format!("({} * {} * {})", a[0], a[1], a[2]),
                PDivide => format!(
                    "((fabs({1}) < {eps} || !isfinite({0} / {1})) ? 0.0 : {0} / {1})",
                    a[0], a[1]
                ),
                Tanh => format!("tanh({})", a[0]),
                Cos => format!("cos({})", a[0]),
                Sin => format!("sin({})", a[0]),
                Exp => format!("exp({})", a[0]),
                PLog10 => format!("({0} == 0.0 ? 0.0 : log10(fabs({0})))", a[0]),
                Square => format!("({0} * {0})", a[0]),
                Cube => format!("({0} * {0} * {0})", a[0]),
                Power => format!("pow({}, {})", a[0], a[1]),
                Abs => format!("fabs({})", a[0]),
                PSqrt => format!("sqrt(fabs({}))", a[0]),
                NegExp => format!("exp(-{})", a[0]),
                Negate => format!("(-{})", a[0]),
                IfThenElse => format!("({} > 0.0 ? {} : {})", a[0], a[1], a[2]),
                Gt => format!("({} > {} ? 1.0 : 0.0)", a[0], a[1]),
                Lt => format!("({} < {} ? 1.0 : 0.0)", a[0], a[1]),
                Gauss => format!("exp(-({0} * {0}))", a[0]),
                Thresh => format!("({} >= {} ? 1.0 : 0.0)", a[0], a[1]),
                Step => format!("({} >= 0.0 ? 1.0 : 0.0)", a[0]),
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatSummary {
    pub rmse: f64,
    pub r2: f64,
}

/// Portable JSON model description; numbers keep full precision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub version: u32,
    pub genes: Vec<String>,
    pub weights: Vec<f64>,
    pub stats: BTreeMap<SplitKind, StatSummary>,
    pub complexity: usize,
    pub complexity_measure: ComplexityMeasure,
    pub palette: Palette,
    pub equation: String,
}

impl ModelDocument {
    pub fn from_model(m: &FittedModel, palette: &Palette, measure: ComplexityMeasure) -> ModelDocument {
        ModelDocument {
            version: MODEL_DOCUMENT_VERSION,
            genes: m.genes.iter().map(|g| g.to_string()).collect(),
            weights: m.weights.iter().copied().collect(),
            stats: m
                .stats
                .iter()
                .map(|(k, s)| (*k, StatSummary { rmse: s.rmse, r2: s.r2 }))
                .collect(),
            complexity: m.complexity,
            complexity_measure: measure,
            palette: palette.clone(),
            equation: to_infix(&simplify_model(m).canonical.expr),
        }
    }

    pub fn from_json(text: &str) -> Result<ModelDocument> {
        let doc: ModelDocument =
            serde_json::from_str(text).map_err(|e| Error::Invalid(format!("model document: {e}")))?;
        if doc.version > MODEL_DOCUMENT_VERSION {
            return Err(Error::Invalid(format!("unsupported model document version {}", doc.version)));
        }
        if doc.weights.len() != doc.genes.len() + 1 {
            return Err(Error::Invalid("weight count must be gene count plus one".into()));
        }
        Ok(doc)
    }

    /// Parsed genes and weights, ready for prediction.
    pub fn model(&self) -> Result<(Vec<ExprTree>, DVector<f64>)> {
        let genes = self.genes.iter().map(|g| parse_prefix(g)).collect::<Result<Vec<_>>>()?;
        for g in &genes {
            g.validate(self.palette.num_inputs)?;
        }
        Ok((genes, DVector::from_vec(self.weights.clone())))
    }

    pub fn predict(&self, x: &nalgebra::DMatrix<f64>) -> Result<Vec<f64>> {
        let (genes, weights) = self.model()?;
        regress::predict(&genes, &weights, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: usize) -> ExprTree {
        ExprTree::Var(i - 1)
    }

    #[test]
    fn weighted_genes_merge() {
        let w = DVector::from_vec(vec![-3.29, 8.86, 0.372]);
        let s = simplify_genes(&[v(2), v(3)], &w);
        assert_eq!(to_infix(&s.canonical.expr), "8.86*x2 + 0.372*x3 - 3.29");
        let s = simplify_genes(&[v(1)], &DVector::from_vec(vec![0.0, 1.0]));
        assert_eq!(to_infix(&s.canonical.expr), "x1");
    }

    #[test]
    fn duplicate_genes_collect() {
        let t = ExprTree::unary(Function::Sin, v(1));
        let s = simplify_genes(&[t.clone(), t], &DVector::from_vec(vec![0.0, 1.5, 2.0]));
        assert_eq!(to_infix(&s.canonical.expr), "3.5*sin(x1)");
    }

    #[test]
    fn negligible_weights_are_dropped() {
        let s = simplify_genes(&[v(1), v(2)], &DVector::from_vec(vec![1.0, 1e-13, 2.0]));
        assert_eq!(s.dropped, vec![0]);
        assert_eq!(s.canonical.variables(), vec![1]);
    }

    #[test]
    fn c_identity_body() {
        let c = c_snippet(&[v(1)], &DVector::from_vec(vec![0.0, 1.0]), 2, "model");
        assert!(c.contains("return x1;"), "{c}");
        assert!(c.contains("double model(double x1, double x2)"));
    }

    #[test]
    fn format_names() {
        assert_eq!("latex".parse::<ExportFormat>().unwrap(), ExportFormat::Latex);
        assert!(matches!("mfile".parse::<ExportFormat>(), Err(Error::UnknownFormat(_))));
    }
}
