use nalgebra::DVector;

use crate::data::SplitKind;
use crate::regress::FittedModel;

/// Regression error characteristic: the share of points with absolute error
/// at most `ε`, sampled exactly at every distinct error magnitude.
#[derive(Debug, Clone, PartialEq)]
pub struct RecCurve {
    /// `(ε, proportion)` with strictly increasing `ε`, starting at 0.
    pub points: Vec<(f64, f64)>,
}

impl RecCurve {
    pub fn proportion_at(&self, eps: f64) -> f64 {
        let i = self.points.partition_point(|&(e, _)| e <= eps);
        if i == 0 {
            0.0
        } else {
            self.points[i - 1].1
        }
    }

    pub fn max_error(&self) -> f64 {
        self.points.last().map_or(0.0, |p| p.0)
    }
}

pub fn rec_curve(y: &DVector<f64>, predictions: &[f64]) -> RecCurve {
    let mut errors: Vec<f64> = y.iter().zip(predictions).map(|(a, p)| (a - p).abs()).collect();
    errors.sort_by(f64::total_cmp);
    let n = errors.len() as f64;
    let mut points: Vec<(f64, f64)> = Vec::with_capacity(errors.len() + 1);
    if errors.first().is_none_or(|&e| e > 0.0) {
        points.push((0.0, 0.0));
    }
    let mut i = 0;
    while i < errors.len() {
        let e = errors[i];
        while i < errors.len() && errors[i] == e {
            i += 1;
        }
        points.push((e, i as f64 / n));
    }
    RecCurve { points }
}

/// One curve per model on `split`; models lacking the split give `None`.
pub fn rec_curves(models: &[&FittedModel], y: &DVector<f64>, split: SplitKind) -> Vec<Option<RecCurve>> {
    models
        .iter()
        .map(|m| m.stat(split).map(|s| rec_curve(y, &s.predictions)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_model_jumps_at_zero() {
        let y = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let c = rec_curve(&y, &[1.0, 2.0, 3.0]);
        assert_eq!(c.points, vec![(0.0, 1.0)]);
        assert_eq!(c.proportion_at(0.0), 1.0);
    }

    #[test]
    fn step_function_shape() {
        let y = DVector::from_vec(vec![0.0; 4]);
        let c = rec_curve(&y, &[0.5, -0.5, 1.0, 2.0]);
        assert_eq!(c.points, vec![(0.0, 0.0), (0.5, 0.5), (1.0, 0.75), (2.0, 1.0)]);
        assert_eq!(c.proportion_at(0.49), 0.0);
        assert_eq!(c.proportion_at(1.5), 0.75);
        assert_eq!(c.proportion_at(-1.0), 0.0);
        assert_eq!(c.max_error(), 2.0);
    }
}
