//! Tabular data split into training, validation and test partitions.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitKind {
    Train,
    #[serde(alias = "val")]
    Validation,
    Test,
}

impl SplitKind {
    pub const ALL: [SplitKind; 3] = [SplitKind::Train, SplitKind::Validation, SplitKind::Test];

    pub fn name(self) -> &'static str {
        match self {
            SplitKind::Train => "train",
            SplitKind::Validation => "validation",
            SplitKind::Test => "test",
        }
    }

    pub fn parse(s: &str) -> Option<SplitKind> {
        match s.trim().to_ascii_lowercase().as_str() {
            "train" | "training" => Some(SplitKind::Train),
            "val" | "valid" | "validation" => Some(SplitKind::Validation),
            "test" | "testing" => Some(SplitKind::Test),
            _ => None,
        }
    }
}

impl std::fmt::Display for SplitKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Rows belonging to one partition.
#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub x: DMatrix<f64>,
    pub y: DVector<f64>,
}

impl Split {
    pub fn new(x: DMatrix<f64>, y: DVector<f64>) -> Result<Split> {
        if x.nrows() != y.len() {
            return Err(Error::Data(format!(
                "{} input rows but {} response values",
                x.nrows(),
                y.len()
            )));
        }
        if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Data("data contains non-finite values".into()));
        }
        Ok(Split { x, y })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// Sum of squares about this split's own mean.
    pub fn sst(&self) -> f64 {
        let mean = self.y.mean();
        self.y.iter().map(|v| (v - mean).powi(2)).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub train: Split,
    pub validation: Option<Split>,
    pub test: Option<Split>,
    pub var_names: Vec<String>,
}

impl Dataset {
    /// Builds a dataset from row-major inputs, responses and per-row split labels.
    pub fn from_rows(
        rows: &[Vec<f64>],
        y: &[f64],
        labels: &[SplitKind],
        var_names: Vec<String>,
    ) -> Result<Dataset> {
        if rows.len() != y.len() || rows.len() != labels.len() {
            return Err(Error::Data(format!(
                "row count mismatch: {} input rows, {} responses, {} split labels",
                rows.len(),
                y.len(),
                labels.len()
            )));
        }
        let m = var_names.len();
        if m == 0 {
            return Err(Error::Data("at least one input column is required".into()));
        }
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != m) {
            return Err(Error::Data(format!("row {} has {} values, expected {m}", i + 1, r.len())));
        }
        let part = |kind: SplitKind| -> Result<Option<Split>> {
            let idx: Vec<usize> = (0..rows.len()).filter(|&i| labels[i] == kind).collect();
            if idx.is_empty() {
                return Ok(None);
            }
            let x = DMatrix::from_fn(idx.len(), m, |r, c| rows[idx[r]][c]);
            let yv = DVector::from_iterator(idx.len(), idx.iter().map(|&i| y[i]));
            Split::new(x, yv).map(Some)
        };
        let train = part(SplitKind::Train)?
            .ok_or_else(|| Error::Data("the training split is empty".into()))?;
        let ds = Dataset {
            train,
            validation: part(SplitKind::Validation)?,
            test: part(SplitKind::Test)?,
            var_names,
        };
        ds.validate()?;
        Ok(ds)
    }

    pub fn train_only(x: DMatrix<f64>, y: DVector<f64>) -> Result<Dataset> {
        let var_names = (1..=x.ncols()).map(|i| format!("x{i}")).collect();
        let ds = Dataset {
            train: Split::new(x, y)?,
            validation: None,
            test: None,
            var_names,
        };
        ds.validate()?;
        Ok(ds)
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.num_inputs();
        if m == 0 {
            return Err(Error::Data("at least one input column is required".into()));
        }
        if self.train.len() < 2 {
            return Err(Error::Data("at least two training rows are required".into()));
        }
        for (kind, s) in self.splits() {
            if s.x.ncols() != m {
                return Err(Error::Data(format!("{kind} split has {} columns, expected {m}", s.x.ncols())));
            }
        }
        if self.var_names.len() != m {
            return Err(Error::Data("variable name count does not match column count".into()));
        }
        Ok(())
    }

    pub fn num_inputs(&self) -> usize {
        self.train.x.ncols()
    }

    pub fn split(&self, kind: SplitKind) -> Option<&Split> {
        match kind {
            SplitKind::Train => Some(&self.train),
            SplitKind::Validation => self.validation.as_ref(),
            SplitKind::Test => self.test.as_ref(),
        }
    }

    /// Present splits in train, validation, test order.
    pub fn splits(&self) -> impl Iterator<Item = (SplitKind, &Split)> {
        SplitKind::ALL.into_iter().filter_map(|k| self.split(k).map(|s| (k, s)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_rows_partitions_by_label() {
        let rows = vec![vec![1.0], vec![2.0], vec![3.0], vec![4.0]];
        let y = [10.0, 20.0, 30.0, 40.0];
        let labels = [SplitKind::Train, SplitKind::Test, SplitKind::Train, SplitKind::Train];
        let ds = Dataset::from_rows(&rows, &y, &labels, vec!["a".into()]).unwrap();
        assert_eq!(ds.train.y.as_slice(), &[10.0, 30.0, 40.0]);
        assert_eq!(ds.test.as_ref().unwrap().x[(0, 0)], 2.0);
        assert!(ds.validation.is_none());
    }

    #[test]
    fn rejects_non_finite_and_tiny_training() {
        let rows = vec![vec![1.0], vec![f64::NAN]];
        let labels = [SplitKind::Train; 2];
        assert!(Dataset::from_rows(&rows, &[1.0, 2.0], &labels, vec!["a".into()]).is_err());
        let rows = vec![vec![1.0], vec![2.0]];
        let labels = [SplitKind::Train, SplitKind::Test];
        assert!(Dataset::from_rows(&rows, &[1.0, 2.0], &labels, vec!["a".into()]).is_err());
    }
}
