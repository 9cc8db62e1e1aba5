//! Parametric censored-MLE GLM baselines. Each family fixes the baseline
//! hazard in closed form, so only the coefficients (and the power-law shape)
//! are estimated; quantiles invert the closed-form cumulative hazard.

use ndarray::Array1;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{FitError, InferError};
use crate::normalize::ZScore;
use crate::survival::{survival_from_h, Dataset, LinkFunction};

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error("no observed events: every sample is censored")]
    NoObservedEvents,
    #[error("power-law hazard is undefined at t = 0 for shape < 1")]
    UndefinedAtZero,
    #[error("an observed event at time zero has no finite power-law likelihood")]
    EventAtTimeZero,
    #[error("inner solve failed: {0}")]
    Fit(#[from] FitError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Exponential,
    Rayleigh,
    PowerLaw,
    Gompertz,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Exponential => "exponential",
            Family::Rayleigh => "rayleigh",
            Family::PowerLaw => "power_law",
            Family::Gompertz => "gompertz",
        }
    }

    pub fn has_shape(self) -> bool {
        matches!(self, Family::PowerLaw)
    }
}

/// Baseline hazard h(t) for a family; `shape` is only read by the power law.
pub fn baseline_hazard(family: Family, shape: Option<f64>, t: f64) -> Result<f64, BaselineError> {
    debug_assert!(t >= 0.0);
    match family {
        Family::Exponential => Ok(1.0),
        Family::Rayleigh => Ok(t),
        Family::Gompertz => Ok(t.exp()),
        Family::PowerLaw => {
            let gamma = shape.unwrap_or(1.0);
            if t == 0.0 && gamma < 1.0 {
                return Err(BaselineError::UndefinedAtZero);
            }
            Ok(gamma * t.powf(gamma - 1.0))
        }
    }
}

/// Baseline cumulative hazard H(t) = integral of `baseline_hazard`.
pub fn baseline_cumulative_hazard(family: Family, shape: Option<f64>, t: f64) -> f64 {
    debug_assert!(t >= 0.0);
    match family {
        Family::Exponential => t,
        Family::Rayleigh => 0.5 * t * t,
        Family::Gompertz => t.exp_m1(),
        Family::PowerLaw => t.powf(shape.unwrap_or(1.0)),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParametricModel {
    family: Family,
    w: Vec<f64>,
    shape: Option<f64>,
    normalization: Option<ZScore>,
    link: LinkFunction,
}

impl ParametricModel {
    pub fn from_parts(
        family: Family,
        w: Vec<f64>,
        shape: Option<f64>,
        normalization: Option<ZScore>,
    ) -> ParametricModel {
        ParametricModel {
            family,
            w,
            shape,
            normalization,
            link: LinkFunction::Exp,
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.w
    }

    pub fn feature_coefficients(&self) -> &[f64] {
        &self.w[..self.w.len() - 1]
    }

    pub fn intercept(&self) -> f64 {
        *self.w.last().expect("coefficients include an intercept")
    }

    pub fn shape(&self) -> Option<f64> {
        self.shape
    }

    pub fn normalization(&self) -> Option<&ZScore> {
        self.normalization.as_ref()
    }

    pub fn with_normalization(mut self, normalization: ZScore) -> ParametricModel {
        self.normalization = Some(normalization);
        self
    }

    pub fn rate(&self, x: &[f64]) -> Result<f64, InferError> {
        let expected = self.w.len() - 1;
        if x.len() != expected {
            return Err(InferError::DimensionMismatch {
                expected,
                got: x.len(),
            });
        }
        let transformed;
        let features: &[f64] = match &self.normalization {
            Some(z) => {
                transformed = z.apply(x);
                &transformed
            }
            None => x,
        };
        let z: f64 = features
            .iter()
            .zip(&self.w)
            .map(|(xj, wj)| xj * wj)
            .sum::<f64>()
            + self.intercept();
        Ok(self.link.rate(z))
    }

    /// Closed-form quantile: solves H(t) = -ln(1 - alpha) / g(w'x).
    pub fn quantile(&self, x: &[f64], alpha: f64) -> Result<f64, InferError> {
        if !(0.0..1.0).contains(&alpha) {
            return Err(InferError::InvalidProbability(alpha));
        }
        let g = self.rate(x)?;
        let target = -(1.0 - alpha).ln() / g;
        Ok(match self.family {
            Family::Exponential => target,
            Family::Rayleigh => (2.0 * target).sqrt(),
            Family::Gompertz => target.ln_1p(),
            Family::PowerLaw => target.powf(1.0 / self.shape.unwrap_or(1.0)),
        })
    }

    pub fn ranged_probability(&self, x: &[f64], t_alpha: f64, t_beta: f64) -> Result<f64, InferError> {
        if !(0.0..=t_beta).contains(&t_alpha) {
            return Err(InferError::InvalidRange { t_alpha, t_beta });
        }
        let g = self.rate(x)?;
        let h_alpha = baseline_cumulative_hazard(self.family, self.shape, t_alpha);
        let h_beta = baseline_cumulative_hazard(self.family, self.shape, t_beta);
        Ok(survival_from_h(g, h_alpha) - survival_from_h(g, h_beta))
    }
}

/// Maximizes the censored log-likelihood
/// `sum_i y_i [log g(w'x_i) + log h(t_i)] - g(w'x_i) H(t_i)`.
/// For a fixed shape this is the same convex solve as the non-parametric
/// inner step with closed-form exposures; the power-law shape is found by a
/// golden-section search over log(shape) around that solve.
pub fn fit_parametric(
    dataset: &Dataset,
    family: Family,
    options: &crate::model::FitOptions,
) -> Result<ParametricModel, BaselineError> {
    if dataset.n_observed() == 0 {
        return Err(BaselineError::NoObservedEvents);
    }
    if family == Family::PowerLaw
        && dataset
            .samples()
            .iter()
            .any(|s| s.observed && s.time == 0.0)
    {
        return Err(BaselineError::EventAtTimeZero);
    }
    let design = crate::model::design_from_dataset(dataset);
    match family {
        Family::PowerLaw => {
            // Profile likelihood over log(shape), unimodal in practice for
            // Weibull-form hazards; bounds cover shapes from ~0.05 to ~20.
            let (lo, hi) = (-3.0f64, 3.0f64);
            let phi = (5f64.sqrt() - 1.0) / 2.0;
            let mut a = lo;
            let mut b = hi;
            let mut c = b - phi * (b - a);
            let mut d = a + phi * (b - a);
            let mut fc = profile_log_likelihood(&design, dataset, c.exp(), options)?;
            let mut fd = profile_log_likelihood(&design, dataset, d.exp(), options)?;
            while (b - a).abs() > 1e-6 {
                if fc.0 > fd.0 {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - phi * (b - a);
                    fc = profile_log_likelihood(&design, dataset, c.exp(), options)?;
                } else {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + phi * (b - a);
                    fd = profile_log_likelihood(&design, dataset, d.exp(), options)?;
                }
            }
            let shape = (0.5 * (a + b)).exp();
            let (_, w) = profile_log_likelihood(&design, dataset, shape, options)?;
            Ok(ParametricModel {
                family,
                w: w.to_vec(),
                shape: Some(shape),
                normalization: None,
                link: LinkFunction::Exp,
            })
        }
        _ => {
            let exposures: Vec<f64> = dataset
                .samples()
                .iter()
                .map(|s| baseline_cumulative_hazard(family, None, s.time))
                .collect();
            let w = crate::model::solve_weights(&design, &exposures, options)?;
            Ok(ParametricModel {
                family,
                w: w.to_vec(),
                shape: None,
                normalization: None,
                link: LinkFunction::Exp,
            })
        }
    }
}

/// Log-likelihood of the power-law family at a fixed shape with the
/// coefficients solved out, plus those coefficients.
fn profile_log_likelihood(
    design: &crate::model::Design,
    dataset: &Dataset,
    shape: f64,
    options: &crate::model::FitOptions,
) -> Result<(f64, Array1<f64>), BaselineError> {
    let exposures: Vec<f64> = dataset
        .samples()
        .iter()
        .map(|s| baseline_cumulative_hazard(Family::PowerLaw, Some(shape), s.time))
        .collect();
    let w = crate::model::solve_weights(design, &exposures, options)?;
    let link = LinkFunction::Exp;
    let mut total = 0.0;
    for (i, s) in dataset.samples().iter().enumerate() {
        let z: f64 = s.x.iter().zip(w.iter()).map(|(x, wj)| x * wj).sum::<f64>()
            + w[w.len() - 1];
        let g = link.rate(z);
        total -= g * exposures[i];
        if s.observed {
            total += z + shape.ln() + (shape - 1.0) * s.time.ln();
        }
    }
    Ok((total, w))
}
