use crate::expr::{CanonicalKey, ComplexityMeasure, ExprTree};

/// A multigene individual. Gene order carries no meaning.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub genes: Vec<ExprTree>,
    /// Training RMSE; `+∞` marks an invalid model. `None` until evaluated.
    pub fitness: Option<f64>,
    pub complexity: Option<usize>,
    /// Index of the run that produced this individual (for merged populations).
    pub run: usize,
}

impl Individual {
    pub fn new(genes: Vec<ExprTree>) -> Individual {
        Individual {
            genes,
            fitness: None,
            complexity: None,
            run: 0,
        }
    }

    /// An unevaluated copy carrying new genes.
    pub fn offspring(&self, genes: Vec<ExprTree>) -> Individual {
        Individual {
            genes,
            fitness: None,
            complexity: None,
            run: self.run,
        }
    }

    pub fn gene_count(&self) -> usize {
        self.genes.len()
    }

    pub fn fitness_or_worst(&self) -> f64 {
        self.fitness.unwrap_or(f64::INFINITY)
    }

    pub fn complexity_with(&self, measure: ComplexityMeasure) -> usize {
        self.complexity.unwrap_or_else(|| measure.of_genes(&self.genes))
    }

    /// Order-insensitive multiset of gene keys.
    pub fn cache_key(&self) -> CacheKey {
        let mut keys: Vec<CanonicalKey> = self.genes.iter().map(ExprTree::canonical_key).collect();
        keys.sort_unstable();
        CacheKey(keys)
    }

    pub fn has_duplicate_genes(&self) -> bool {
        let key = self.cache_key();
        key.0.windows(2).any(|w| w[0] == w[1])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CacheKey(pub Vec<CanonicalKey>);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cache_key_ignores_gene_order() {
        let a = Individual::new(vec![ExprTree::Var(0), ExprTree::Const(1.0)]);
        let b = Individual::new(vec![ExprTree::Const(1.0), ExprTree::Var(0)]);
        assert_eq!(a.cache_key(), b.cache_key());
        assert!(!a.has_duplicate_genes());
        assert!(Individual::new(vec![ExprTree::Var(0), ExprTree::Var(0)]).has_duplicate_genes());
    }
}
