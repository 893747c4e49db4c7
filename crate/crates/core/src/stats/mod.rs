//! Regression statistics: correlations, OLS fits with inference, variance
//! inflation factors and Bland-Altman agreement.

mod tdist;

pub use tdist::{p_value_two_sided, P_VALUE_FLOOR};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{DesignMatrix, EquilibratedQr};

/// `R_j^2` at or above `1 - COLLINEARITY_TOL` is treated as exact collinearity.
pub const COLLINEARITY_TOL: f64 = 1e-12;

/// Relative spread below which a column counts as constant.
pub const CONSTANT_TOL: f64 = 1e-12;

pub(crate) fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Sample mean and standard deviation (`n - 1` denominator).
pub fn mean_sd(x: &[f64]) -> (f64, f64) {
    let m = mean(x);
    if x.len() < 2 {
        return (m, 0.0);
    }
    let ss: f64 = x.iter().map(|v| (v - m) * (v - m)).sum();
    (m, (ss / (x.len() - 1) as f64).sqrt())
}

/// `sd <= 1e-12 * |mean| + 1e-300`.
pub fn is_effectively_constant(x: &[f64]) -> bool {
    let (m, sd) = mean_sd(x);
    !(sd > CONSTANT_TOL * m.abs() + 1e-300)
}

/// Centered, unit-norm copy of `x`, or `None` for constant input.
pub(crate) fn standardize(x: &[f64]) -> Option<Vec<f64>> {
    if is_effectively_constant(x) {
        return None;
    }
    let m = mean(x);
    let mut c: Vec<f64> = x.iter().map(|v| v - m).collect();
    let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(norm > 0.0) || !norm.is_finite() {
        return None;
    }
    for v in &mut c {
        *v /= norm;
    }
    Some(c)
}

/// Correlation of two standardized vectors.
pub(crate) fn standardized_dot(a: &[f64], b: &[f64]) -> f64 {
    let d: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    d.clamp(-1.0, 1.0)
}

pub fn pearson_correlation(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    if a.len() < 2 {
        return Err(Error::InsufficientData {
            n: a.len(),
            params: 2,
        });
    }
    for (col, v) in [a, b].iter().enumerate() {
        if let Some(row) = v.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { row, col });
        }
    }
    let sa = standardize(a).ok_or(Error::ZeroVariance)?;
    let sb = standardize(b).ok_or(Error::ZeroVariance)?;
    Ok(standardized_dot(&sa, &sb))
}

/// Least-squares fit with coefficient inference. Index 0 of the coefficient
/// vectors is the intercept; `vifs` covers predictors only.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelFit {
    pub term_labels: Vec<String>,
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub t_stats: Vec<f64>,
    pub p_values: Vec<f64>,
    pub fitted: Vec<f64>,
    pub residuals: Vec<f64>,
    pub r_squared: f64,
    pub r_squared_adj: f64,
    /// Residual standard error, `sqrt(RSS / (N - k - 1))`.
    pub rmse: f64,
    pub vifs: Vec<f64>,
    pub n_obs: usize,
    pub df_resid: u64,
}

impl ModelFit {
    pub fn num_predictors(&self) -> usize {
        self.vifs.len()
    }

    pub fn residual_sum_squares(&self) -> f64 {
        self.residuals.iter().map(|r| r * r).sum()
    }
}

/// `1 - (1 - R^2) (N - 1) / (N - k - 1)`.
pub fn adjusted_r_squared(r_squared: f64, n: usize, k: usize) -> f64 {
    1.0 - (1.0 - r_squared) * (n as f64 - 1.0) / (n as f64 - k as f64 - 1.0)
}

/// Ordinary least squares on a design whose first column is the intercept.
///
/// The predictors are centered before factorization, so the intercept is
/// recovered from the means and the scaled inverse Gram diagonal doubles as
/// the VIF vector.
pub fn ols_fit(x: &DesignMatrix, y: &[f64]) -> Result<ModelFit> {
    if !x.has_intercept() {
        return Err(Error::InvalidInput(
            "ols_fit expects a design with an intercept column".into(),
        ));
    }
    let n = x.nrows();
    let k = x.num_predictors();
    if k == 0 {
        return Err(Error::EmptyMatrix);
    }
    if y.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: y.len(),
        });
    }
    if let Some(row) = y.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            row,
            col: x.ncols(),
        });
    }
    if n < k + 2 {
        return Err(Error::InsufficientData { n, params: k + 1 });
    }

    let y_mean = mean(y);
    let yc: Vec<f64> = y.iter().map(|v| v - y_mean).collect();
    let tss: f64 = yc.iter().map(|v| v * v).sum();
    if tss == 0.0 {
        return Err(Error::ZeroVariance);
    }

    // A constant predictor duplicates the intercept.
    if x.predictors().any(is_effectively_constant) {
        return Err(Error::RankDeficient {
            rank: k,
            cols: k + 1,
        });
    }

    let means: Vec<f64> = x.predictors().map(mean).collect();
    let mut centered = Vec::with_capacity(n * k);
    for (col, m) in x.predictors().zip(&means) {
        centered.extend(col.iter().map(|v| v - m));
    }
    let eq = EquilibratedQr::new(n, k, centered);
    if !eq.is_full_rank() {
        return Err(Error::RankDeficient {
            rank: eq.rank() + 1,
            cols: k + 1,
        });
    }
    let slopes = eq.solve(&yc)?;
    let intercept = y_mean - slopes.iter().zip(&means).map(|(b, m)| b * m).sum::<f64>();

    let mut fitted = vec![intercept; n];
    for (col, b) in x.predictors().zip(&slopes) {
        for (f, v) in fitted.iter_mut().zip(col) {
            *f += b * v;
        }
    }
    let residuals: Vec<f64> = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
    let rss: f64 = residuals.iter().map(|r| r * r).sum();

    let r_squared = (1.0 - rss / tss).clamp(0.0, 1.0);
    let r_squared_adj = adjusted_r_squared(r_squared, n, k);
    let df_resid = (n - k - 1) as u64;
    let sigma2 = rss / df_resid as f64;

    let cov = eq.inverse_gram()?;
    let mut std_errors = Vec::with_capacity(k + 1);
    let mut quad = 0.0;
    for i in 0..k {
        for j in 0..k {
            quad += means[i] * cov[(i, j)] * means[j];
        }
    }
    std_errors.push((sigma2 * (1.0 / n as f64 + quad)).max(0.0).sqrt());
    std_errors.extend((0..k).map(|j| (sigma2 * cov[(j, j)]).max(0.0).sqrt()));

    let mut coefficients = Vec::with_capacity(k + 1);
    coefficients.push(intercept);
    coefficients.extend_from_slice(&slopes);

    let t_stats: Vec<f64> = coefficients
        .iter()
        .zip(&std_errors)
        .map(|(&b, &se)| if b == 0.0 { 0.0 } else { b / se })
        .collect();
    let p_values = t_stats
        .iter()
        .map(|&t| p_value_two_sided(t, df_resid))
        .collect::<Result<Vec<_>>>()?;

    let vifs = if k == 1 {
        vec![1.0]
    } else {
        eq.scaled_inverse_gram_diagonal()?
    };

    Ok(ModelFit {
        term_labels: x.labels().to_vec(),
        coefficients,
        std_errors,
        t_stats,
        p_values,
        fitted,
        residuals,
        r_squared,
        r_squared_adj,
        rmse: sigma2.sqrt(),
        vifs,
        n_obs: n,
        df_resid,
    })
}

/// Variance inflation factors `1 / (1 - R_j^2)`, each `R_j^2` from regressing
/// column `j` on the others with an intercept. A single column gets 1.
///
/// Computed as the diagonal of the inverse correlation matrix, taken from one
/// QR factorization of the centered, unit-norm columns.
pub fn vif<C: AsRef<[f64]>>(columns: &[C]) -> Result<Vec<f64>> {
    let k = columns.len();
    if k == 0 {
        return Err(Error::EmptyMatrix);
    }
    let n = columns[0].as_ref().len();
    let mut data = Vec::with_capacity(n * k);
    for (j, c) in columns.iter().enumerate() {
        let c = c.as_ref();
        if c.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: c.len(),
            });
        }
        if let Some(row) = c.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row, col: j });
        }
        data.extend(standardize(c).ok_or(Error::ZeroVariance)?);
    }
    if k == 1 {
        return Ok(vec![1.0]);
    }
    let eq = EquilibratedQr::new(n, k, data);
    if !eq.is_full_rank() {
        let column = eq.qr().permutation()[eq.rank()];
        return Err(Error::PerfectCollinearity { column });
    }
    let vifs = eq.scaled_inverse_gram_diagonal()?;
    if let Some(column) = vifs.iter().position(|&v| !(v < 1.0 / COLLINEARITY_TOL)) {
        return Err(Error::PerfectCollinearity { column });
    }
    Ok(vifs)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlandAltmanPoint {
    pub mean: f64,
    pub difference: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlandAltmanSummary {
    pub mean_diff: f64,
    pub sd_diff: f64,
    pub limits_of_agreement: (f64, f64),
    pub pairs: Vec<BlandAltmanPoint>,
}

/// Differences are `fitted - observed`; limits are `mean +/- 1.96 sd`.
pub fn bland_altman(observed: &[f64], fitted: &[f64]) -> Result<BlandAltmanSummary> {
    if observed.len() != fitted.len() {
        return Err(Error::LengthMismatch {
            expected: observed.len(),
            actual: fitted.len(),
        });
    }
    if observed.len() < 2 {
        return Err(Error::InsufficientData {
            n: observed.len(),
            params: 2,
        });
    }
    let pairs: Vec<BlandAltmanPoint> = observed
        .iter()
        .zip(fitted)
        .map(|(&o, &f)| BlandAltmanPoint {
            mean: 0.5 * (o + f),
            difference: f - o,
        })
        .collect();
    let diffs: Vec<f64> = pairs.iter().map(|p| p.difference).collect();
    let (mean_diff, sd_diff) = mean_sd(&diffs);
    Ok(BlandAltmanSummary {
        mean_diff,
        sd_diff,
        limits_of_agreement: (mean_diff - 1.96 * sd_diff, mean_diff + 1.96 * sd_diff),
        pairs,
    })
}
