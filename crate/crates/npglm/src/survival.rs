//! Shared survival-analysis domain types: censored samples, sorted datasets,
//! link functions, and the piecewise-linear cumulative-hazard table that the
//! non-parametric model and all inference queries are built on.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Linear predictors are clamped to this magnitude before exponentiation.
/// Features are expected z-scored or standard normal, so an active clamp at a
/// fitted solution signals an unusable scale rather than a valid optimum.
pub const LINEAR_PREDICTOR_CLAMP: f64 = 50.0;

#[derive(Debug, Error, PartialEq)]
pub enum SurvivalError {
    #[error("query time {t_query} lies beyond the observation window end {window_end}")]
    QueryBeyondWindow { t_query: f64, window_end: f64 },
    #[error("cumulative-hazard target {target} exceeds the table maximum {max}")]
    TargetBeyondWindow { target: f64, max: f64 },
    #[error("query time {0} is negative")]
    NegativeQuery(f64),
    #[error("hazard table must contain at least one knot")]
    EmptyTable,
    #[error("hazard table knots must be finite, positive and ascending (knot {index})")]
    InvalidKnot { index: usize },
    #[error("hazard table values must be finite, non-negative and non-decreasing (knot {index})")]
    InvalidValue { index: usize },
    #[error("hazard table has {knots} knots but {values} values")]
    LengthMismatch { knots: usize, values: usize },
}

#[derive(Debug, Error, PartialEq)]
pub enum DataError {
    #[error("dataset must contain at least one sample")]
    EmptyDataset,
    #[error("sample {index} has dimension {got}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("sample {index} has a negative or non-finite time")]
    InvalidTime { index: usize },
    #[error("sample {index} has a non-finite feature value")]
    NonFiniteFeature { index: usize },
}

/// One unit of training or evaluation data: a feature vector, an observation
/// flag (`observed = true` means the exact event time was recorded, `false`
/// means the event is right-censored at `time`), and the recorded time.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub x: Vec<f64>,
    pub observed: bool,
    pub time: f64,
}

impl Sample {
    pub fn observed(x: Vec<f64>, time: f64) -> Self {
        Sample {
            x,
            observed: true,
            time,
        }
    }

    pub fn censored(x: Vec<f64>, time: f64) -> Self {
        Sample {
            x,
            observed: false,
            time,
        }
    }
}

/// A collection of samples with a fixed feature dimension, kept ascending in
/// time. At equal times observed samples precede censored ones, which keeps
/// risk-set sums and knot merging well defined under ties.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    samples: Vec<Sample>,
    dim: usize,
}

impl Dataset {
    /// Validates and sorts the samples. The sort is stable so equal keys keep
    /// their input order.
    pub fn new(samples: Vec<Sample>) -> Result<Self, DataError> {
        if samples.is_empty() {
            return Err(DataError::EmptyDataset);
        }
        let dim = samples[0].x.len();
        for (index, s) in samples.iter().enumerate() {
            if s.x.len() != dim {
                return Err(DataError::DimensionMismatch {
                    index,
                    expected: dim,
                    got: s.x.len(),
                });
            }
            if !s.time.is_finite() || s.time < 0.0 {
                return Err(DataError::InvalidTime { index });
            }
            if s.x.iter().any(|v| !v.is_finite()) {
                return Err(DataError::NonFiniteFeature { index });
            }
        }
        let mut samples = samples;
        samples.sort_by(|a, b| {
            a.time
                .partial_cmp(&b.time)
                .expect("times validated finite")
                .then_with(|| b.observed.cmp(&a.observed))
        });
        Ok(Dataset { samples, dim })
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_observed(&self) -> usize {
        self.samples.iter().filter(|s| s.observed).count()
    }

    pub fn n_censored(&self) -> usize {
        self.len() - self.n_observed()
    }
}

/// Maps the linear predictor `z = w'x` to a positive rate multiplier.
/// Only the exponential link is implemented; it keeps the censored
/// log-likelihood convex in `w` for a fixed baseline hazard.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum LinkFunction {
    #[default]
    #[serde(rename = "exp")]
    Exp,
}

impl LinkFunction {
    /// g(z), with the linear predictor clamped to `LINEAR_PREDICTOR_CLAMP`.
    #[inline]
    pub fn rate(self, z: f64) -> f64 {
        match self {
            LinkFunction::Exp => z.clamp(-LINEAR_PREDICTOR_CLAMP, LINEAR_PREDICTOR_CLAMP).exp(),
        }
    }

    /// dg/dz evaluated like `rate` (for the exponential link they coincide).
    #[inline]
    pub fn rate_derivative(self, z: f64) -> f64 {
        match self {
            LinkFunction::Exp => self.rate(z),
        }
    }

    #[inline]
    pub fn clamps(self, z: f64) -> bool {
        z.abs() > LINEAR_PREDICTOR_CLAMP
    }
}

/// Survival probability S = exp(-g * H) for a rate multiplier `g_value > 0`
/// and cumulative hazard `H_at_t >= 0`.
#[inline]
pub fn survival_from_h(g_value: f64, h_at_t: f64) -> f64 {
    debug_assert!(g_value > 0.0 && h_at_t >= 0.0);
    (-g_value * h_at_t).exp()
}

/// Estimated cumulative hazard on a grid of knot times, linearly interpolated
/// between knots (piecewise-constant hazard). An implicit origin knot (0, 0)
/// anchors queries below the first knot; queries past the last knot are
/// errors because the non-parametric estimate carries no information there.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulativeHazardTable {
    knots: Vec<f64>,
    values: Vec<f64>,
}

impl CumulativeHazardTable {
    /// Builds a table from ascending knot times and non-decreasing values.
    /// Duplicate knot times are merged into one knot keeping the largest
    /// value, so tables derived from tied sample times stay well formed.
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<Self, SurvivalError> {
        if knots.len() != values.len() {
            return Err(SurvivalError::LengthMismatch {
                knots: knots.len(),
                values: values.len(),
            });
        }
        if knots.is_empty() {
            return Err(SurvivalError::EmptyTable);
        }
        let mut merged_knots: Vec<f64> = Vec::with_capacity(knots.len());
        let mut merged_values: Vec<f64> = Vec::with_capacity(values.len());
        for (index, (&t, &v)) in knots.iter().zip(values.iter()).enumerate() {
            if !t.is_finite() || t <= 0.0 {
                return Err(SurvivalError::InvalidKnot { index });
            }
            if !v.is_finite() || v < 0.0 {
                return Err(SurvivalError::InvalidValue { index });
            }
            match merged_knots.last() {
                Some(&prev_t) if t < prev_t => return Err(SurvivalError::InvalidKnot { index }),
                Some(&prev_t) if t == prev_t => {
                    let last = merged_values.last_mut().expect("same length");
                    if v < *last {
                        return Err(SurvivalError::InvalidValue { index });
                    }
                    *last = v;
                }
                _ => {
                    if let Some(&prev_v) = merged_values.last() {
                        if v < prev_v {
                            return Err(SurvivalError::InvalidValue { index });
                        }
                    }
                    merged_knots.push(t);
                    merged_values.push(v);
                }
            }
        }
        Ok(CumulativeHazardTable {
            knots: merged_knots,
            values: merged_values,
        })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Last knot time: the end of the observation window.
    pub fn window_end(&self) -> f64 {
        *self.knots.last().expect("table is non-empty")
    }

    /// Total cumulative hazard at the window end.
    pub fn max_value(&self) -> f64 {
        *self.values.last().expect("table is non-empty")
    }

    /// H(t) for 0 <= t <= window end, by binary search over the knots and
    /// linear interpolation within the bracketing segment. Exact knot hits
    /// return the stored value.
    pub fn interpolate(&self, t_query: f64) -> Result<f64, SurvivalError> {
        if !t_query.is_finite() || t_query < 0.0 {
            return Err(SurvivalError::NegativeQuery(t_query));
        }
        let end = self.window_end();
        if t_query > end {
            return Err(SurvivalError::QueryBeyondWindow {
                t_query,
                window_end: end,
            });
        }
        match self
            .knots
            .binary_search_by(|probe| probe.partial_cmp(&t_query).expect("knots finite"))
        {
            Ok(k) => Ok(self.values[k]),
            Err(k) => {
                // Segment (t_{k-1}, t_k) with the origin (0, 0) before the first knot.
                let (t_lo, v_lo) = if k == 0 {
                    (0.0, 0.0)
                } else {
                    (self.knots[k - 1], self.values[k - 1])
                };
                let (t_hi, v_hi) = (self.knots[k], self.values[k]);
                Ok(v_lo + (t_query - t_lo) * (v_hi - v_lo) / (t_hi - t_lo))
            }
        }
    }

    /// Inverse of `interpolate`: the time at which the cumulative hazard
    /// reaches `target`. Flat stretches (censored-only spans where H does not
    /// grow) resolve to their left endpoint.
    pub fn invert(&self, target: f64) -> Result<f64, SurvivalError> {
        if !target.is_finite() || target < 0.0 {
            return Err(SurvivalError::NegativeQuery(target));
        }
        let max = self.max_value();
        if target > max {
            return Err(SurvivalError::TargetBeyondWindow { target, max });
        }
        if target == 0.0 {
            return Ok(0.0);
        }
        // First knot whose value reaches the target; equality resolves to the
        // leftmost achiever, which is the flat-segment convention.
        let k = self.values.partition_point(|&v| v < target);
        debug_assert!(k < self.values.len());
        if self.values[k] == target {
            return Ok(self.knots[k]);
        }
        let (t_lo, v_lo) = if k == 0 {
            (0.0, 0.0)
        } else {
            (self.knots[k - 1], self.values[k - 1])
        };
        let (t_hi, v_hi) = (self.knots[k], self.values[k]);
        Ok(t_lo + (t_hi - t_lo) * (target - v_lo) / (v_hi - v_lo))
    }
}
