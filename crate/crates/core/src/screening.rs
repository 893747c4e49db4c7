//! Importance and redundancy screening of dictionary columns.

use serde::{Deserialize, Serialize};

use crate::dictionary::Dictionary;
use crate::error::{Error, Result};
use crate::stats::{standardize, standardized_dot};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImportanceMode {
    Absolute,
    /// Threshold is `value * max_j |corr(z_j, y)|`.
    Relative,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImportanceRule {
    pub mode: ImportanceMode,
    pub value: f64,
}

impl ImportanceRule {
    pub fn absolute(value: f64) -> Self {
        Self {
            mode: ImportanceMode::Absolute,
            value,
        }
    }

    pub fn relative(value: f64) -> Self {
        Self {
            mode: ImportanceMode::Relative,
            value,
        }
    }
}

impl Default for ImportanceRule {
    fn default() -> Self {
        Self::relative(0.5)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnimportantTerm {
    pub key: String,
    pub term: String,
    /// `None` when the correlation is undefined (constant column).
    pub abs_corr: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RedundantTerm {
    pub key: String,
    pub term: String,
    pub winner_key: String,
    pub winner: String,
    pub abs_corr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreeningReport {
    pub importance_threshold: f64,
    pub max_abs_corr: f64,
    pub varsigma: f64,
    pub input_terms: usize,
    /// Labels of the surviving terms, in dictionary order.
    pub kept: Vec<String>,
    pub kept_keys: Vec<String>,
    pub dropped_unimportant: Vec<UnimportantTerm>,
    pub dropped_redundant: Vec<RedundantTerm>,
}

struct Standardized {
    columns: Vec<Option<Vec<f64>>>,
    abs_corr: Vec<Option<f64>>,
}

fn standardize_all(z: &Dictionary, y: &[f64]) -> Result<Standardized> {
    if y.len() != z.n_obs() {
        return Err(Error::LengthMismatch {
            expected: z.n_obs(),
            actual: y.len(),
        });
    }
    let ys = standardize(y).ok_or(Error::ZeroVariance)?;
    let columns: Vec<Option<Vec<f64>>> = z.columns().iter().map(|c| standardize(c)).collect();
    let abs_corr = columns
        .iter()
        .map(|c| {
            c.as_ref()
                .map(|c| standardized_dot(c, &ys).abs())
                .filter(|v| v.is_finite())
        })
        .collect();
    Ok(Standardized { columns, abs_corr })
}

/// Output of the importance filter.
#[derive(Debug, Clone)]
pub struct ImportanceOutcome {
    pub kept: Dictionary,
    pub threshold: f64,
    pub max_abs_corr: f64,
    pub dropped: Vec<UnimportantTerm>,
}

/// Keeps columns with `|corr(z_j, y)| >= threshold`, in dictionary order.
pub fn importance_filter(
    z: &Dictionary,
    y: &[f64],
    rule: ImportanceRule,
) -> Result<ImportanceOutcome> {
    if z.is_empty() {
        return Err(Error::InvalidInput("dictionary is empty".into()));
    }
    let s = standardize_all(z, y)?;
    let max_abs_corr = s.abs_corr.iter().flatten().fold(0.0f64, |m, &c| m.max(c));
    let threshold = match rule.mode {
        ImportanceMode::Absolute => rule.value,
        ImportanceMode::Relative => rule.value * max_abs_corr,
    };
    let mut keep = Vec::new();
    let mut dropped = Vec::new();
    for (i, c) in s.abs_corr.iter().enumerate() {
        match c {
            Some(c) if *c >= threshold => keep.push(i),
            _ => dropped.push(UnimportantTerm {
                key: z.keys()[i].clone(),
                term: z.label(i),
                abs_corr: *c,
            }),
        }
    }
    if keep.is_empty() {
        return Err(Error::AllColumnsDropped { max_abs_corr });
    }
    Ok(ImportanceOutcome {
        kept: z.select(&keep),
        threshold,
        max_abs_corr,
        dropped,
    })
}

#[derive(Debug, Clone)]
pub struct RedundancyOutcome {
    pub kept: Dictionary,
    pub dropped: Vec<RedundantTerm>,
}

/// Correlations this close to the head of a run count as tied.
pub const CORR_TIE_TOL: f64 = 1e-12;

/// Visiting order for the redundancy sweep: decreasing `|corr(z, y)|`, with
/// runs of tied correlations ordered by number of variables, then canonical
/// key. Exact ties are common (e.g. `x1/x2` is affine in `1/x2` when `x1` is
/// a multiple of `x2 - 0.1`), and rounding alone would otherwise decide which
/// one is kept.
fn sweep_order(z: &Dictionary, abs_corr: &[Option<f64>]) -> Vec<usize> {
    let c = |i: usize| abs_corr[i].unwrap();
    let mut order: Vec<usize> = (0..z.len()).filter(|&i| abs_corr[i].is_some()).collect();
    order.sort_by(|&a, &b| {
        c(b).total_cmp(&c(a))
            .then_with(|| z.keys()[a].cmp(&z.keys()[b]))
    });
    let simpler = |a: &usize, b: &usize| {
        z.terms()[*a]
            .mixture()
            .cmp(&z.terms()[*b].mixture())
            .then_with(|| z.keys()[*a].cmp(&z.keys()[*b]))
    };
    let mut start = 0;
    while start < order.len() {
        let head = c(order[start]);
        let run = order[start..]
            .iter()
            .take_while(|&&i| head - c(i) <= CORR_TIE_TOL)
            .count();
        order[start..start + run].sort_by(simpler);
        start += run;
    }
    order
}

/// Greedy sweep in order of decreasing `|corr(z, y)|`: a column survives iff
/// its `|corr|` with every survivor so far is at most `varsigma`. Ties within
/// [`CORR_TIE_TOL`] are visited simplest term first (fewest variables, then
/// canonical key). Survivors are returned in dictionary order; each dropped
/// column names the first survivor that exceeded the limit.
pub fn redundancy_filter(z: &Dictionary, y: &[f64], varsigma: f64) -> Result<RedundancyOutcome> {
    if z.is_empty() {
        return Err(Error::InvalidInput("dictionary is empty".into()));
    }
    let s = standardize_all(z, y)?;
    let order = sweep_order(z, &s.abs_corr);

    let mut kept: Vec<usize> = Vec::new();
    let mut dropped = Vec::new();
    for &i in &order {
        let ci = s.columns[i].as_deref().unwrap();
        let conflict = kept.iter().find_map(|&j| {
            let r = standardized_dot(ci, s.columns[j].as_deref().unwrap()).abs();
            (r > varsigma).then_some((j, r))
        });
        match conflict {
            None => kept.push(i),
            Some((j, r)) => dropped.push(RedundantTerm {
                key: z.keys()[i].clone(),
                term: z.label(i),
                winner_key: z.keys()[j].clone(),
                winner: z.label(j),
                abs_corr: r,
            }),
        }
    }
    kept.sort_unstable();
    Ok(RedundancyOutcome {
        kept: z.select(&kept),
        dropped,
    })
}

/// Importance filter followed by redundancy filter.
pub fn screen(
    z: &Dictionary,
    y: &[f64],
    rule: ImportanceRule,
    varsigma: f64,
) -> Result<(Dictionary, ScreeningReport)> {
    let imp = importance_filter(z, y, rule)?;
    let red = redundancy_filter(&imp.kept, y, varsigma)?;
    let report = ScreeningReport {
        importance_threshold: imp.threshold,
        max_abs_corr: imp.max_abs_corr,
        varsigma,
        input_terms: z.len(),
        kept: (0..red.kept.len()).map(|i| red.kept.label(i)).collect(),
        kept_keys: red.kept.keys().to_vec(),
        dropped_unimportant: imp.dropped,
        dropped_redundant: red.dropped,
    };
    Ok((red.kept, report))
}
