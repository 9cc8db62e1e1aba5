//! Closed-form non-parametric cumulative-hazard update: each observed sample
//! contributes a jump of `1 / (risk-set rate sum)` at its time; censored
//! samples contribute nothing but stay in the risk sets of earlier times.

use ndarray::Array1;

use crate::survival::{CumulativeHazardTable, Dataset, LinkFunction};

use super::objective::Design;
use super::FitError;

/// Per-sample cumulative-hazard values `H(t_i) = sum_{j<=i} y_j / R_j`
/// where `R_j = sum_{k>=j} g(w'x_k)`, in dataset order. One reverse
/// cumulative sum of the rates, so O(N) after the dataset's sort.
pub(crate) fn per_sample_h(
    design: &Design,
    w: &Array1<f64>,
    link: LinkFunction,
) -> Result<Vec<f64>, FitError> {
    let n = design.n();
    let z = design.linear_predictors(w);
    let mut risk = vec![0.0; n];
    let mut acc = 0.0;
    for j in (0..n).rev() {
        acc += link.rate(z[j]);
        risk[j] = acc;
    }
    let mut h = Vec::with_capacity(n);
    let mut cum = 0.0;
    for j in 0..n {
        if design.observed[j] > 0.0 {
            if risk[j] <= 0.0 {
                return Err(FitError::DegenerateRiskSet { index: j });
            }
            cum += 1.0 / risk[j];
        }
        h.push(cum);
    }
    Ok(h)
}

pub(crate) fn table_from_h(design: &Design, h: &[f64]) -> Result<CumulativeHazardTable, FitError> {
    let mut knots = Vec::with_capacity(design.n());
    let mut values = Vec::with_capacity(design.n());
    for i in 0..design.n() {
        if design.times[i] == 0.0 {
            if design.observed[i] > 0.0 {
                return Err(FitError::EventAtTimeZero);
            }
            // A censored sample at the origin coincides with the implicit
            // (0, 0) knot and adds nothing to the table.
            continue;
        }
        knots.push(design.times[i]);
        values.push(h[i]);
    }
    CumulativeHazardTable::new(knots, values).map_err(FitError::Table)
}

/// The estimated cumulative-hazard table for a coefficient vector `w`
/// (intercept last). Duplicate sample times merge into single knots.
pub fn breslow_h(
    dataset: &Dataset,
    w: &[f64],
    link: LinkFunction,
) -> Result<CumulativeHazardTable, FitError> {
    if w.len() != dataset.dim() + 1 {
        return Err(FitError::CoefficientLength {
            expected: dataset.dim() + 1,
            got: w.len(),
        });
    }
    let design = Design::from_dataset(dataset);
    let w = Array1::from(w.to_vec());
    let h = per_sample_h(&design, &w, link)?;
    table_from_h(&design, &h)
}

/// Per-sample cumulative-hazard values in dataset order; the exposures fed
/// into the negative log-likelihood.
pub fn breslow_h_values(
    dataset: &Dataset,
    w: &[f64],
    link: LinkFunction,
) -> Result<Vec<f64>, FitError> {
    if w.len() != dataset.dim() + 1 {
        return Err(FitError::CoefficientLength {
            expected: dataset.dim() + 1,
            got: w.len(),
        });
    }
    let design = Design::from_dataset(dataset);
    let w = Array1::from(w.to_vec());
    per_sample_h(&design, &w, link)
}
