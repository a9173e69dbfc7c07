//! Multigene individuals as linear-in-the-parameters regression models.
//!
//! A model predicts `y ≈ b0 + b1·t1 + … + bG·tG` where `ti` is the output
//! vector of gene `i`. The weights are the minimum-norm least-squares
//! solution obtained from an SVD pseudo-inverse of the gene response matrix
//! `[1 t1 … tG]`, so duplicated or collinear genes never break the fit.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use crate::data::{Dataset, Split, SplitKind};
use crate::error::{Error, Result};
use crate::expr::{ComplexityMeasure, ExprTree};

/// Signals a model whose gene outputs are not all finite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("model produces non-finite gene outputs")]
pub struct InvalidModel;

/// The `N × (G+1)` matrix `[1 t1 … tG]` over one partition's rows.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneResponseMatrix {
    matrix: DMatrix<f64>,
}

impl GeneResponseMatrix {
    pub fn new(genes: &[ExprTree], x: &DMatrix<f64>) -> Result<GeneResponseMatrix> {
        if x.nrows() == 0 {
            return Err(Error::Data("gene response matrix needs at least one row".into()));
        }
        for g in genes {
            g.validate(x.ncols())?;
        }
        let n = x.nrows();
        let mut matrix = DMatrix::from_element(n, genes.len() + 1, 1.0);
        for (j, g) in genes.iter().enumerate() {
            let t = g.eval_unchecked(x);
            matrix.column_mut(j + 1).copy_from_slice(&t);
        }
        Ok(GeneResponseMatrix { matrix })
    }

    /// Wraps a raw matrix. The first column must be all ones.
    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<GeneResponseMatrix> {
        if matrix.ncols() == 0 || matrix.column(0).iter().any(|&v| v != 1.0) {
            return Err(Error::Invalid("first column of a gene response matrix must be all ones".into()));
        }
        Ok(GeneResponseMatrix { matrix })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn nrows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn gene_count(&self) -> usize {
        self.matrix.ncols() - 1
    }

    pub fn is_finite(&self) -> bool {
        self.matrix.iter().all(|v| v.is_finite())
    }

    /// Same matrix with gene column `gene` (zero-based) removed.
    pub fn without_gene(&self, gene: usize) -> GeneResponseMatrix {
        GeneResponseMatrix {
            matrix: self.matrix.clone().remove_column(gene + 1),
        }
    }

    /// Same matrix with `t` appended as a new gene column.
    pub fn with_column(&self, t: &[f64]) -> GeneResponseMatrix {
        let n = self.matrix.ncols();
        let mut m = self.matrix.clone().insert_column(n, 0.0);
        m.column_mut(n).copy_from_slice(t);
        GeneResponseMatrix { matrix: m }
    }

    /// `b0 + Σ bj·tj`, accumulated left to right.
    pub fn predict(&self, weights: &DVector<f64>) -> Vec<f64> {
        let (n, k) = self.matrix.shape();
        let mut out = vec![weights[0]; n];
        for j in 1..k {
            let w = weights[j];
            for (o, t) in out.iter_mut().zip(self.matrix.column(j).iter()) {
                *o += w * t;
            }
        }
        out
    }
}

/// Relative singular-value cutoff: `max(N, G+1) · σmax · ε`.
pub fn rank_tolerance(rows: usize, cols: usize, sigma_max: f64) -> f64 {
    rows.max(cols) as f64 * sigma_max * f64::EPSILON
}

/// Truncated-SVD solve of `(A·D⁻¹)·x ≈ y`, returning `b = D⁻¹·x` and the retained rank.
fn truncated_solve(a: &DMatrix<f64>, d: &[f64], y: &DVector<f64>) -> Result<(DVector<f64>, usize), InvalidModel> {
    let (n, k) = a.shape();
    let mut scaled = a.clone();
    for (mut col, &dj) in scaled.column_iter_mut().zip(d) {
        col /= dj;
    }
    // Tall systems are reduced to their k×k triangular factor first: same
    // singular values and right vectors, and Qᵀy carries the projections.
    let (core, rhs) = if n > k {
        let qr = scaled.qr();
        let mut qty = y.clone();
        qr.q_tr_mul(&mut qty);
        (qr.r(), qty.rows(0, k).into_owned())
    } else {
        (scaled, y.clone())
    };
    let m = core.nrows();
    let s = faer::Mat::<f64>::from_fn(m, k, |r, c| core[(r, c)]);
    let svd = if m >= k { s.thin_svd() } else { s.svd() }.map_err(|_| InvalidModel)?;
    let (u, v) = (svd.U(), svd.V());
    let sigma = svd.S().column_vector();
    let sigma_max = if sigma.nrows() > 0 { sigma[0] } else { 0.0 };
    if !sigma_max.is_finite() {
        return Err(InvalidModel);
    }
    let tol = rank_tolerance(n, k, sigma_max);
    let rank = (0..sigma.nrows()).take_while(|&j| sigma[j] > tol).count();
    let mut b = DVector::<f64>::zeros(k);
    for j in 0..rank {
        let c = (0..m).map(|r| u[(r, j)] * rhs[r]).sum::<f64>() / sigma[j];
        for i in 0..k {
            b[i] += v[(i, j)] * c;
        }
    }
    for i in 0..k {
        b[i] /= d[i];
    }
    Ok((b, rank))
}

fn sse(gm: &GeneResponseMatrix, b: &DVector<f64>, y: &DVector<f64>) -> f64 {
    gm.predict(b).iter().zip(y.iter()).map(|(p, t)| (t - p) * (t - p)).sum()
}

/// Minimum-norm least-squares weights `pinv(G)·y` via SVD.
///
/// When the cutoff drops a direction, a second solve decides rank on
/// max-magnitude equilibrated columns. It replaces the first only if it
/// lowers the residual by more than `1e-12·‖y‖²`, which happens when gene
/// magnitudes differ by more than `1/ε`.
pub fn fit_weights(gm: &GeneResponseMatrix, y: &DVector<f64>) -> Result<DVector<f64>, InvalidModel> {
    assert_eq!(gm.nrows(), y.len(), "gene response matrix and response differ in length");
    if !gm.is_finite() {
        return Err(InvalidModel);
    }
    let k = gm.matrix.ncols();
    let (mut b, rank) = truncated_solve(&gm.matrix, &vec![1.0; k], y)?;
    if rank < k {
        let d: Vec<f64> = gm
            .matrix
            .column_iter()
            .map(|c| match c.amax() {
                m if m > 0.0 => m,
                _ => 1.0,
            })
            .collect();
        if let Ok((eq, _)) = truncated_solve(&gm.matrix, &d, y) {
            let margin = 1e-12 * y.norm_squared();
            if eq.iter().all(|v| v.is_finite()) && sse(gm, &eq, y) < sse(gm, &b, y) - margin {
                b = eq;
            }
        }
    }
    if b.iter().all(|v| v.is_finite()) {
        Ok(b)
    } else {
        Err(InvalidModel)
    }
}

pub fn rmse(y: &DVector<f64>, predictions: &[f64]) -> f64 {
    let sse: f64 = y.iter().zip(predictions).map(|(a, p)| (a - p).powi(2)).sum();
    (sse / y.len() as f64).sqrt()
}

/// `1 − SSE/SST` with SST about `y`'s own mean. A constant response gives 0.
pub fn r_squared(y: &DVector<f64>, predictions: &[f64]) -> f64 {
    let mean = y.mean();
    let sst: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let sse: f64 = y.iter().zip(predictions).map(|(a, p)| (a - p).powi(2)).sum();
    if sst > 0.0 {
        1.0 - sse / sst
    } else if sse == 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Fits weights on `split` and returns them together with the training RMSE.
pub fn fit_genes(genes: &[ExprTree], split: &Split) -> Result<(DVector<f64>, f64), InvalidModel> {
    let gm = GeneResponseMatrix::new(genes, &split.x).map_err(|_| InvalidModel)?;
    let b = fit_weights(&gm, &split.y)?;
    let pred = gm.predict(&b);
    let e = rmse(&split.y, &pred);
    if e.is_finite() {
        Ok((b, e))
    } else {
        Err(InvalidModel)
    }
}

/// Training RMSE, or `+∞` for invalid models.
pub fn fitness(genes: &[ExprTree], train: &Split) -> f64 {
    fit_genes(genes, train).map_or(f64::INFINITY, |(_, e)| e)
}

/// Predictions of a weighted gene set on arbitrary inputs.
pub fn predict(genes: &[ExprTree], weights: &DVector<f64>, x: &DMatrix<f64>) -> Result<Vec<f64>> {
    if weights.len() != genes.len() + 1 {
        return Err(Error::Invalid(format!(
            "{} weights supplied for {} genes",
            weights.len(),
            genes.len()
        )));
    }
    Ok(GeneResponseMatrix::new(genes, x)?.predict(weights))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitStats {
    pub rmse: f64,
    pub r2: f64,
    pub predictions: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FittedModel {
    pub genes: Vec<ExprTree>,
    /// Bias first, then one weight per gene.
    pub weights: DVector<f64>,
    pub stats: BTreeMap<SplitKind, SplitStats>,
    pub complexity: usize,
}

impl FittedModel {
    /// Assembles a model from known weights, computing stats on every split.
    pub fn with_weights(
        genes: Vec<ExprTree>,
        weights: DVector<f64>,
        dataset: &Dataset,
        measure: ComplexityMeasure,
    ) -> Result<FittedModel> {
        let mut stats = BTreeMap::new();
        for (kind, split) in dataset.splits() {
            let predictions = predict(&genes, &weights, &split.x)?;
            stats.insert(
                kind,
                SplitStats {
                    rmse: rmse(&split.y, &predictions),
                    r2: r_squared(&split.y, &predictions),
                    predictions,
                },
            );
        }
        let complexity = measure.of_genes(&genes);
        Ok(FittedModel {
            genes,
            weights,
            stats,
            complexity,
        })
    }

    pub fn stat(&self, split: SplitKind) -> Option<&SplitStats> {
        self.stats.get(&split)
    }

    pub fn train(&self) -> &SplitStats {
        &self.stats[&SplitKind::Train]
    }

    pub fn predict(&self, x: &DMatrix<f64>) -> Result<Vec<f64>> {
        predict(&self.genes, &self.weights, x)
    }
}

/// Fits on the training split and reports every available split.
pub fn evaluate_model(genes: &[ExprTree], dataset: &Dataset, measure: ComplexityMeasure) -> Result<FittedModel> {
    if genes.is_empty() {
        return Err(Error::Invalid("a model needs at least one gene".into()));
    }
    for g in genes {
        g.validate(dataset.num_inputs())?;
    }
    let (weights, _) =
        fit_genes(genes, &dataset.train).map_err(|e| Error::Invalid(e.to_string()))?;
    FittedModel::with_weights(genes.to_vec(), weights, dataset, measure)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Function::*;

    fn x(i: usize) -> ExprTree {
        ExprTree::Var(i - 1)
    }

    #[test]
    fn response_matrix_layout() {
        let xs = DMatrix::from_column_slice(2, 1, &[2.0, 3.0]);
        let gm = GeneResponseMatrix::new(&[x(1)], &xs).unwrap();
        assert_eq!(gm.matrix(), &DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 1.0, 3.0]));
    }

    #[test]
    fn constant_gene_is_collinear_with_bias_but_fits() {
        let xs = DMatrix::from_column_slice(3, 1, &[1.0, 2.0, 3.0]);
        let gm = GeneResponseMatrix::new(&[ExprTree::Const(5.0)], &xs).unwrap();
        assert_eq!(gm.matrix().column(1).as_slice(), &[5.0, 5.0, 5.0]);
        let y = DVector::from_vec(vec![1.0, 2.0, 6.0]);
        let b = fit_weights(&gm, &y).unwrap();
        let pred = gm.predict(&b);
        for p in pred {
            assert!((p - 3.0).abs() < 1e-12);
        }
        // Minimum norm splits the constant between the two collinear columns
        // in proportion to their scale: b0 + 5 b1 = 3 with b = t·(1, 5).
        assert!((b[1] - 5.0 * b[0]).abs() < 1e-12);
    }

    #[test]
    fn exact_interpolation() {
        let gm = GeneResponseMatrix::from_matrix(DMatrix::from_row_slice(
            3,
            2,
            &[1.0, 0.0, 1.0, 1.0, 1.0, 2.0],
        ))
        .unwrap();
        let b = fit_weights(&gm, &DVector::from_vec(vec![1.0, 2.0, 3.0])).unwrap();
        assert!((b[0] - 1.0).abs() < 1e-12 && (b[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_finite_columns_signal_invalid() {
        let xs = DMatrix::from_column_slice(3, 1, &[1.0, 0.0, 2.0]);
        let gene = ExprTree::binary(Divide, ExprTree::Const(1.0), x(1));
        let split = Split::new(xs, DVector::from_vec(vec![1.0, 2.0, 3.0])).unwrap();
        assert_eq!(fitness(&[gene], &split), f64::INFINITY);
    }

    #[test]
    fn bias_only_rmse_is_population_std() {
        let y = [3.0, 7.0, 1.0, 9.0, 5.0];
        let xs = DMatrix::from_column_slice(5, 1, &[0.0; 5]);
        let split = Split::new(xs, DVector::from_row_slice(&y)).unwrap();
        let mean = y.iter().sum::<f64>() / 5.0;
        let sd = (y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 5.0).sqrt();
        let f = fitness(&[ExprTree::Const(2.0)], &split);
        assert!((f - sd).abs() < 1e-12, "{f} vs {sd}");
    }

    #[test]
    fn perfect_fit() {
        let xs = DMatrix::from_fn(20, 2, |r, c| (r as f64 * 0.37 + c as f64).sin() * 3.0);
        let genes = vec![ExprTree::unary(Sin, x(1)), ExprTree::binary(Times, x(1), x(2))];
        let y = GeneResponseMatrix::new(&genes, &xs)
            .unwrap()
            .predict(&DVector::from_vec(vec![0.5, -2.0, 1.25]));
        let split = Split::new(xs, DVector::from_vec(y)).unwrap();
        assert!(fitness(&genes, &split) <= 1e-10);
    }

    #[test]
    fn stats_absent_for_missing_splits_and_r2_zero_at_mean() {
        let xs = DMatrix::from_column_slice(4, 1, &[1.0, 2.0, 3.0, 4.0]);
        let y = DVector::from_vec(vec![2.0, 4.0, 6.0, 8.5]);
        let ds = Dataset::train_only(xs, y).unwrap();
        let m = evaluate_model(&[ExprTree::Const(1.0)], &ds, ComplexityMeasure::NodeCount).unwrap();
        assert!(m.stat(SplitKind::Test).is_none() && m.stat(SplitKind::Validation).is_none());
        assert!(m.train().r2.abs() < 1e-12);
        assert_eq!(m.weights.len(), 2);
    }
}
