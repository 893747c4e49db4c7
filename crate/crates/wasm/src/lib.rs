//! Browser bindings for the demo page in `www/`.
//!
//! Each exported function returns a JSON string; the `*_json` twins hold the
//! actual logic and are what the native tests exercise.

use parseal::io::{parse_csv, run_pipeline, synth_example1, synth_example2, Dataset, RunReport};
use parseal::{p_value_two_sided, ImportanceRule, SearchMode, SelectionConfig};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Knobs exposed on the page. Everything else keeps its library default.
#[derive(Debug, Clone, Copy)]
pub struct DemoSettings {
    pub alpha: u32,
    pub mixture: usize,
    pub delta: f64,
    pub varsigma: f64,
    pub greedy: bool,
}

impl DemoSettings {
    fn config(self) -> SelectionConfig {
        SelectionConfig {
            alpha: self.alpha,
            mixture_m: self.mixture,
            importance: ImportanceRule::relative(self.delta),
            varsigma: self.varsigma,
            search_mode: if self.greedy {
                SearchMode::GreedyForward
            } else {
                SearchMode::Exhaustive
            },
            ..Default::default()
        }
    }
}

#[derive(Serialize)]
struct FitView {
    report: RunReport,
    observed: Vec<f64>,
    fitted: Vec<f64>,
    baseline_fitted: Option<Vec<f64>>,
}

fn fit_view(data: &Dataset, settings: DemoSettings) -> Result<String, String> {
    let out = run_pipeline(data, &settings.config(), true).map_err(|e| error_chain(&e))?;
    let view = FitView {
        fitted: out.selected.fit.fitted.clone(),
        baseline_fitted: out.baseline.as_ref().map(|(m, _)| m.fit.fitted.clone()),
        observed: out.observed,
        report: out.report,
    };
    serde_json::to_string(&view).map_err(|e| e.to_string())
}

fn error_chain(e: &dyn std::error::Error) -> String {
    let mut msg = e.to_string();
    let mut src = e.source();
    while let Some(s) = src {
        msg.push_str(": ");
        msg.push_str(&s.to_string());
        src = s.source();
    }
    msg
}

pub fn run_example_json(
    example: u8,
    n: usize,
    seed: u64,
    settings: DemoSettings,
) -> Result<String, String> {
    let data = match example {
        1 => synth_example1(n, seed),
        2 => synth_example2(n, seed),
        _ => return Err(format!("unknown example {example}")),
    }
    .map_err(|e| e.to_string())?;
    fit_view(&data, settings)
}

pub fn fit_csv_json(text: &str, response: &str, settings: DemoSettings) -> Result<String, String> {
    let data = parse_csv(text, response).map_err(|e| error_chain(&e))?;
    fit_view(&data, settings)
}

/// `[[t, p], ...]` for `t` evenly spaced on `[0, t_max]`.
pub fn p_value_curve_json(df: u64, t_max: f64, steps: usize) -> Result<String, String> {
    if steps < 2 || !(t_max > 0.0) {
        return Err("need steps >= 2 and t_max > 0".into());
    }
    let points = (0..steps)
        .map(|i| {
            let t = t_max * i as f64 / (steps - 1) as f64;
            p_value_two_sided(t, df).map(|p| [t, p])
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    serde_json::to_string(&points).map_err(|e| e.to_string())
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn run_example(
    example: u8,
    n: usize,
    seed: u64,
    alpha: u32,
    mixture: usize,
    delta: f64,
    varsigma: f64,
    greedy: bool,
) -> Result<String, JsError> {
    let s = DemoSettings {
        alpha,
        mixture,
        delta,
        varsigma,
        greedy,
    };
    run_example_json(example, n, seed, s).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn fit_csv(
    text: &str,
    response: &str,
    alpha: u32,
    mixture: usize,
    delta: f64,
    varsigma: f64,
    greedy: bool,
) -> Result<String, JsError> {
    let s = DemoSettings {
        alpha,
        mixture,
        delta,
        varsigma,
        greedy,
    };
    fit_csv_json(text, response, s).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn p_value_curve(df: u64, t_max: f64, steps: usize) -> Result<String, JsError> {
    p_value_curve_json(df, t_max, steps).map_err(|e| JsError::new(&e))
}
