//! Dictionary -> screening -> subset selection, plus optional baseline.

use std::fs;
use std::path::Path;

use crate::dictionary::{build_dictionary_with_budget, Dictionary};
use crate::error::Result;
use crate::screening::screen;
use crate::selection::{baseline_best_subset, select_model, SelectedModel, SelectionConfig};
use crate::stats::{bland_altman, BlandAltmanSummary};

use super::dataset::{format_number, Dataset};
use super::report::{DatasetSummary, ModelReport, RunReport, Timing, REPORT_SCHEMA};

/// Everything a run produced. `report` is what gets serialized.
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub report: RunReport,
    /// The screened dictionary the search ran over.
    pub reduced: Dictionary,
    pub selected: SelectedModel,
    pub selected_agreement: BlandAltmanSummary,
    pub baseline: Option<(SelectedModel, BlandAltmanSummary)>,
    pub observed: Vec<f64>,
}

#[cfg(not(target_arch = "wasm32"))]
struct Clock(std::time::Instant);

#[cfg(not(target_arch = "wasm32"))]
impl Clock {
    fn start() -> Self {
        Self(std::time::Instant::now())
    }
    fn lap(&mut self) -> f64 {
        let now = std::time::Instant::now();
        let ms = (now - self.0).as_secs_f64() * 1e3;
        self.0 = now;
        ms
    }
}

// No monotonic clock without JS glue; report zeros.
#[cfg(target_arch = "wasm32")]
struct Clock;

#[cfg(target_arch = "wasm32")]
impl Clock {
    fn start() -> Self {
        Self
    }
    fn lap(&mut self) -> f64 {
        0.0
    }
}

pub fn run_pipeline(
    data: &Dataset,
    cfg: &SelectionConfig,
    with_baseline: bool,
) -> Result<PipelineOutput> {
    cfg.validate(data.n_obs())?;
    let y = data.response();
    let mut clock = Clock::start();

    let z = build_dictionary_with_budget(data, cfg.alpha, cfg.mixture_m, cfg.dictionary_budget)
        .map_err(|e| e.at_stage("dictionary"))?;
    let dictionary_ms = clock.lap();

    let (reduced, screening) =
        screen(&z, y, cfg.importance, cfg.varsigma).map_err(|e| e.at_stage("screening"))?;
    let screening_ms = clock.lap();

    let selected = select_model(&reduced, y, cfg).map_err(|e| e.at_stage("selection"))?;
    let selected_agreement = bland_altman(y, &selected.fit.fitted)?;
    let selection_ms = clock.lap();

    let baseline = if with_baseline {
        let b = baseline_best_subset(data, y, cfg).map_err(|e| e.at_stage("baseline"))?;
        let a = bland_altman(y, &b.fit.fitted)?;
        Some((b, a))
    } else {
        None
    };
    let baseline_ms = clock.lap();

    let report = RunReport {
        schema: REPORT_SCHEMA.to_owned(),
        tool_version: env!("CARGO_PKG_VERSION").to_owned(),
        config: cfg.clone(),
        baseline_requested: with_baseline,
        dataset: DatasetSummary {
            n_obs: data.n_obs(),
            variables: data.variable_names().to_vec(),
            response: data.response_name().to_owned(),
        },
        dictionary: z.census().clone(),
        screening,
        selected: ModelReport::new(&selected, &selected_agreement),
        baseline: baseline.as_ref().map(|(m, a)| ModelReport::new(m, a)),
        timing: Some(Timing {
            dictionary_ms,
            screening_ms,
            selection_ms,
            baseline_ms,
            total_ms: dictionary_ms + screening_ms + selection_ms + baseline_ms,
        }),
    };
    Ok(PipelineOutput {
        report,
        reduced,
        selected,
        selected_agreement,
        baseline,
        observed: y.to_vec(),
    })
}

fn write_rows(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|v| format_number(*v)))?;
    }
    w.flush()?;
    Ok(())
}

fn write_model(
    dir: &Path,
    prefix: &str,
    observed: &[f64],
    m: &SelectedModel,
    a: &BlandAltmanSummary,
) -> Result<()> {
    write_rows(
        &dir.join(format!("{prefix}_residuals.csv")),
        &["observed", "fitted", "residual"],
        observed
            .iter()
            .zip(&m.fit.fitted)
            .zip(&m.fit.residuals)
            .map(|((&o, &f), &r)| vec![o, f, r]),
    )?;
    write_rows(
        &dir.join(format!("{prefix}_bland_altman.csv")),
        &["mean", "difference"],
        a.pairs.iter().map(|p| vec![p.mean, p.difference]),
    )
}

/// Writes `report.json` and per-model residual / Bland-Altman tables into
/// `dir`. With `stable`, timing is omitted so that the bytes depend only on
/// inputs and settings.
pub fn write_artifacts(out: &PipelineOutput, dir: impl AsRef<Path>, stable: bool) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let mut report = out.report.clone();
    if stable {
        report.timing = None;
    }
    fs::write(dir.join("report.json"), report.to_json()?)?;
    write_model(
        dir,
        "selected",
        &out.observed,
        &out.selected,
        &out.selected_agreement,
    )?;
    if let Some((m, a)) = &out.baseline {
        write_model(dir, "baseline", &out.observed, m, a)?;
    }
    Ok(())
}
