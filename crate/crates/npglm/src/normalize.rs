//! Z-score normalization fitted on a training split and stored with the
//! model so inference-time features go through the identical transform.

use serde::{Deserialize, Serialize};

use crate::survival::Dataset;

/// Per-column mean and population standard deviation. Columns with zero
/// variance are mapped to 0 so a constant feature carries no signal while the
/// dimension stays stable across folds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZScore {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl ZScore {
    /// Fits per-column statistics over the rows. Population (not sample)
    /// standard deviation, so fold pipelines are reproducible exactly.
    pub fn fit<'a, I>(rows: I, dim: usize) -> ZScore
    where
        I: Iterator<Item = &'a [f64]> + Clone,
    {
        let n = rows.clone().count().max(1) as f64;
        let mut mean = vec![0.0; dim];
        for row in rows.clone() {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        for m in mean.iter_mut() {
            *m /= n;
        }
        let mut var = vec![0.0; dim];
        for row in rows {
            for ((s, v), m) in var.iter_mut().zip(row).zip(&mean) {
                let d = v - m;
                *s += d * d;
            }
        }
        let std = var.iter().map(|s| (s / n).sqrt()).collect();
        ZScore { mean, std }
    }

    pub fn fit_dataset(dataset: &Dataset) -> ZScore {
        ZScore::fit(dataset.samples().iter().map(|s| s.x.as_slice()), dataset.dim())
    }

    /// Identity transform of a given dimension.
    pub fn identity(dim: usize) -> ZScore {
        ZScore {
            mean: vec![0.0; dim],
            std: vec![1.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Indices of zero-variance columns (these transform to 0).
    pub fn degenerate_columns(&self) -> Vec<usize> {
        self.std
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == 0.0)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.mean.len());
        x.iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(v, (m, s))| if *s == 0.0 { 0.0 } else { (v - m) / s })
            .collect()
    }

    /// Applies the transform to every sample of a dataset.
    pub fn apply_dataset(&self, dataset: &Dataset) -> Dataset {
        let samples = dataset
            .samples()
            .iter()
            .map(|s| crate::survival::Sample {
                x: self.apply(&s.x),
                observed: s.observed,
                time: s.time,
            })
            .collect();
        Dataset::new(samples).expect("normalizing preserves dataset validity")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn two_point_column_normalizes_to_unit_pair() {
        let rows = [vec![1.0], vec![3.0]];
        let z = ZScore::fit(rows.iter().map(|r| r.as_slice()), 1);
        assert_relative_eq!(z.apply(&[1.0])[0], -1.0, max_relative = 1e-12);
        assert_relative_eq!(z.apply(&[3.0])[0], 1.0, max_relative = 1e-12);
    }

    #[test]
    fn constant_column_maps_to_zero() {
        let rows = [vec![5.0, 1.0], vec![5.0, 2.0]];
        let z = ZScore::fit(rows.iter().map(|r| r.as_slice()), 2);
        assert_eq!(z.degenerate_columns(), vec![0]);
        assert_eq!(z.apply(&[5.0, 1.5]), vec![0.0, 0.0]);
    }

    #[test]
    fn normalized_columns_have_zero_mean_unit_variance() {
        let rows: Vec<Vec<f64>> = (0..50).map(|i| vec![i as f64, (i * i) as f64]).collect();
        let z = ZScore::fit(rows.iter().map(|r| r.as_slice()), 2);
        let transformed: Vec<Vec<f64>> = rows.iter().map(|r| z.apply(r)).collect();
        for col in 0..2 {
            let n = transformed.len() as f64;
            let mean: f64 = transformed.iter().map(|r| r[col]).sum::<f64>() / n;
            let var: f64 = transformed.iter().map(|r| (r[col] - mean).powi(2)).sum::<f64>() / n;
            assert!(mean.abs() < 1e-10);
            assert!((var - 1.0).abs() < 1e-10);
        }
    }
}
