//! Expression trees: representation, evaluation, random generation and
//! structural metrics.

mod function;
mod generate;
mod palette;
mod parse;
mod tree;

pub use function::{protected_div, protected_log10, Function, PROTECTED_DIV_EPS};
pub use generate::{random_erc, random_leaf, random_tree, ramped_tree, Method};
pub use palette::Palette;
pub use parse::parse_prefix;
pub use tree::{CanonicalKey, ExprTree};

/// Which tree-size measure drives selection and reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComplexityMeasure {
    NodeCount,
    #[default]
    Expressional,
}

impl ComplexityMeasure {
    pub fn of(self, tree: &ExprTree) -> usize {
        match self {
            ComplexityMeasure::NodeCount => tree.node_count(),
            ComplexityMeasure::Expressional => tree.expressional_complexity(),
        }
    }

    /// Model complexity is the plain sum over genes.
    pub fn of_genes(self, genes: &[ExprTree]) -> usize {
        genes.iter().map(|g| self.of(g)).sum()
    }
}
