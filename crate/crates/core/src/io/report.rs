//! The JSON run report. The layout is versioned by [`REPORT_SCHEMA`].

use serde::{Deserialize, Serialize};

use crate::dictionary::DictionaryCensus;
use crate::screening::ScreeningReport;
use crate::selection::{SearchMode, SelectedModel, SelectionConfig, SizeBest};
use crate::stats::{BlandAltmanSummary, P_VALUE_FLOOR};

pub const REPORT_SCHEMA: &str = "parseal.run-report/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: String,
    pub tool_version: String,
    pub config: SelectionConfig,
    pub baseline_requested: bool,
    pub dataset: DatasetSummary,
    pub dictionary: DictionaryCensus,
    pub screening: ScreeningReport,
    pub selected: ModelReport,
    pub baseline: Option<ModelReport>,
    /// Absent in stable output.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

impl RunReport {
    pub fn to_json(&self) -> serde_json::Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub n_obs: usize,
    pub variables: Vec<String>,
    pub response: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub dictionary_ms: f64,
    pub screening_ms: f64,
    pub selection_ms: f64,
    pub baseline_ms: f64,
    pub total_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub term: String,
    pub estimate: f64,
    pub std_error: f64,
    /// `None` when the statistic is infinite (zero standard error).
    pub t_stat: Option<f64>,
    pub p_value: f64,
    pub p_value_text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlandAltmanStats {
    pub mean_diff: f64,
    pub sd_diff: f64,
    pub lower_limit: f64,
    pub upper_limit: f64,
}

impl From<&BlandAltmanSummary> for BlandAltmanStats {
    fn from(s: &BlandAltmanSummary) -> Self {
        Self {
            mean_diff: s.mean_diff,
            sd_diff: s.sd_diff,
            lower_limit: s.limits_of_agreement.0,
            upper_limit: s.limits_of_agreement.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSummary {
    pub mode: SearchMode,
    pub approximate: bool,
    pub candidates_evaluated: u64,
    pub feasible_candidates: u64,
    pub best_per_size: Vec<SizeBest>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelReport {
    pub terms: Vec<String>,
    pub keys: Vec<String>,
    pub coefficients: Vec<Coefficient>,
    pub vifs: Vec<f64>,
    pub r_squared: f64,
    pub r_squared_adj: f64,
    pub rmse: f64,
    pub n_obs: usize,
    pub df_resid: u64,
    pub bland_altman: BlandAltmanStats,
    pub search: SearchSummary,
}

fn p_value_text(p: f64) -> String {
    if p < P_VALUE_FLOOR {
        format!("<{P_VALUE_FLOOR:e}")
    } else {
        format!("{p:.3e}")
    }
}

impl ModelReport {
    pub fn new(model: &SelectedModel, agreement: &BlandAltmanSummary) -> Self {
        let fit = &model.fit;
        let names = std::iter::once("(intercept)".to_owned()).chain(model.labels.iter().cloned());
        let coefficients = names
            .enumerate()
            .map(|(i, term)| Coefficient {
                term,
                estimate: fit.coefficients[i],
                std_error: fit.std_errors[i],
                t_stat: Some(fit.t_stats[i]).filter(|t| t.is_finite()),
                p_value: fit.p_values[i],
                p_value_text: p_value_text(fit.p_values[i]),
            })
            .collect();
        Self {
            terms: model.labels.clone(),
            keys: model.keys.clone(),
            coefficients,
            vifs: fit.vifs.clone(),
            r_squared: fit.r_squared,
            r_squared_adj: fit.r_squared_adj,
            rmse: fit.rmse,
            n_obs: fit.n_obs,
            df_resid: fit.df_resid,
            bland_altman: agreement.into(),
            search: SearchSummary {
                mode: model.mode,
                approximate: model.approximate,
                candidates_evaluated: model.candidates_evaluated,
                feasible_candidates: model.feasible_candidates,
                best_per_size: model.best_per_size.clone(),
            },
        }
    }
}
