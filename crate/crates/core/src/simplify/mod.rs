//! Algebraic simplification of genes and models, and model export.

mod canon;
mod export;
mod format;

pub use canon::{canonicalize, simplify, CanonicalExpr, Caveat, Sym};
pub use export::{
    c_snippet, export, simplify_genes, simplify_model, ExportFormat, ModelDocument, SimplifiedModel, StatSummary,
    MODEL_DOCUMENT_VERSION, NEGLIGIBLE_WEIGHT,
};
pub use format::{format_significant, to_infix, to_infix_named, to_latex, DISPLAY_DIGITS};
