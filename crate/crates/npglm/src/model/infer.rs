//! Inference queries on a fitted model: the probability of an event inside a
//! time range, and the time by which the event occurs with a given
//! probability. Both reduce to the stored cumulative-hazard table.

use thiserror::Error;

use crate::survival::{survival_from_h, SurvivalError};

use super::NpglmModel;

#[derive(Debug, Error, PartialEq)]
pub enum InferError {
    #[error("invalid range: t_alpha {t_alpha} exceeds t_beta {t_beta}")]
    InvalidRange { t_alpha: f64, t_beta: f64 },
    #[error("probability {0} must lie in [0, 1)")]
    InvalidProbability(f64),
    #[error("quantile target {target} exceeds the cumulative hazard {max} at the window end")]
    QuantileBeyondWindow { target: f64, max: f64 },
    #[error("feature vector has length {got}, model expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Survival(#[from] SurvivalError),
}

impl NpglmModel {
    /// Rate multiplier g(w'x) for a raw feature vector, applying the stored
    /// normalization and appending the intercept.
    pub fn rate(&self, x: &[f64]) -> Result<f64, InferError> {
        let expected = self.coefficients().len() - 1;
        if x.len() != expected {
            return Err(InferError::DimensionMismatch {
                expected,
                got: x.len(),
            });
        }
        let transformed;
        let features: &[f64] = match self.normalization() {
            Some(z) => {
                transformed = z.apply(x);
                &transformed
            }
            None => x,
        };
        let z: f64 = features
            .iter()
            .zip(self.coefficients())
            .map(|(xj, wj)| xj * wj)
            .sum::<f64>()
            + self.intercept();
        Ok(self.link().rate(z))
    }

    /// P(t_alpha <= T <= t_beta | x): the survival drop across the range.
    pub fn ranged_probability(
        &self,
        x: &[f64],
        t_alpha: f64,
        t_beta: f64,
    ) -> Result<f64, InferError> {
        if !(0.0..=t_beta).contains(&t_alpha) {
            return Err(InferError::InvalidRange { t_alpha, t_beta });
        }
        let g = self.rate(x)?;
        let h_alpha = self.table().interpolate(t_alpha)?;
        let h_beta = self.table().interpolate(t_beta)?;
        Ok(survival_from_h(g, h_alpha) - survival_from_h(g, h_beta))
    }

    /// The time by which the event occurs with probability `alpha`;
    /// `alpha = 0.5` is the median used for point prediction.
    pub fn quantile(&self, x: &[f64], alpha: f64) -> Result<f64, InferError> {
        if !(0.0..1.0).contains(&alpha) {
            return Err(InferError::InvalidProbability(alpha));
        }
        let g = self.rate(x)?;
        let target = -(1.0 - alpha).ln() / g;
        let max = self.table().max_value();
        if target > max {
            return Err(InferError::QuantileBeyondWindow { target, max });
        }
        Ok(self.table().invert(target)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{FitReport, NpglmModel};
    use crate::survival::{CumulativeHazardTable, LinkFunction};
    use approx::assert_relative_eq;

    /// Intercept-only model with g = 1 over the two-knot example table.
    fn unit_rate_model() -> NpglmModel {
        NpglmModel::from_parts(
            vec![0.0],
            CumulativeHazardTable::new(vec![1.0, 2.0], vec![0.5, 1.5]).unwrap(),
            LinkFunction::Exp,
            None,
            FitReport {
                iterations: 0,
                converged: true,
                avg_log_likelihood: vec![],
            },
        )
    }

    #[test]
    fn ranged_probability_matches_hand_evaluation() {
        let m = unit_rate_model();
        assert_relative_eq!(
            m.ranged_probability(&[], 1.0, 2.0).unwrap(),
            0.3834004995642036,
            max_relative = 1e-12
        );
    }

    #[test]
    fn empty_interval_has_zero_probability() {
        let m = unit_rate_model();
        assert_eq!(m.ranged_probability(&[], 1.3, 1.3).unwrap(), 0.0);
    }

    #[test]
    fn interval_from_origin_is_one_minus_survival() {
        let m = unit_rate_model();
        let p = m.ranged_probability(&[], 0.0, 2.0).unwrap();
        assert_relative_eq!(p, 1.0 - (-1.5f64).exp(), max_relative = 1e-12);
    }

    #[test]
    fn reversed_range_is_rejected() {
        let m = unit_rate_model();
        assert_eq!(
            m.ranged_probability(&[], 3.0, 2.0),
            Err(InferError::InvalidRange {
                t_alpha: 3.0,
                t_beta: 2.0
            })
        );
    }

    #[test]
    fn median_matches_hand_inversion() {
        let m = unit_rate_model();
        assert_relative_eq!(
            m.quantile(&[], 0.5).unwrap(),
            1.1931471805599454,
            max_relative = 1e-12
        );
        assert_eq!(m.quantile(&[], 0.0).unwrap(), 0.0);
    }

    #[test]
    fn quantile_beyond_window_is_reported() {
        let m = unit_rate_model();
        // target = -ln(1 - 0.9) ~= 2.303 > 1.5
        assert!(matches!(
            m.quantile(&[], 0.9),
            Err(InferError::QuantileBeyondWindow { .. })
        ));
    }

    #[test]
    fn quantile_and_ranged_probability_round_trip() {
        let m = unit_rate_model();
        for alpha in [0.1, 0.25, 0.5, 0.7] {
            let t = m.quantile(&[], alpha).unwrap();
            let p = m.ranged_probability(&[], 0.0, t).unwrap();
            assert_relative_eq!(p, alpha, epsilon = 1e-9);
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let m = unit_rate_model();
        assert_eq!(
            m.quantile(&[1.0], 0.5),
            Err(InferError::DimensionMismatch {
                expected: 0,
                got: 1
            })
        );
    }
}
