//! Datasets, synthetic generators, configuration files, run reports and the
//! end-to-end pipeline.

mod config;
mod dataset;
mod pipeline;
mod report;
mod synth;

pub use config::FitSettings;
pub use dataset::{format_number, load_csv, parse_csv, write_csv, Dataset};
pub use pipeline::{run_pipeline, write_artifacts, PipelineOutput};
pub use report::{
    BlandAltmanStats, Coefficient, DatasetSummary, ModelReport, RunReport, SearchSummary, Timing,
    REPORT_SCHEMA,
};
pub use synth::{synth_example1, synth_example2, uniform_stream, DEFAULT_SEED};
