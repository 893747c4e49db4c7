//! Sparse regression over a dictionary of power, root and log transforms:
//! build every admissible product term, screen the columns by importance and
//! redundancy, then search for the best VIF-capped subset by adjusted R^2.
//!
//! ```
//! use parseal::io::{run_pipeline, synth_example1};
//! use parseal::SelectionConfig;
//!
//! let data = synth_example1(200, 1).unwrap();
//! let cfg = SelectionConfig { varsigma: 0.5, ..Default::default() };
//! let out = run_pipeline(&data, &cfg, false).unwrap();
//! assert_eq!(out.selected.labels, ["x1*x3"]);
//! ```

pub mod dictionary;
pub mod error;
pub mod io;
pub mod linalg;
pub mod screening;
pub mod selection;
pub mod stats;

pub use dictionary::{build_dictionary, format_term, Dictionary, DictionaryCensus, TermExpr};
pub use error::{Error, Result};
pub use linalg::{solve_least_squares, DesignMatrix, LstSqSolution};
pub use screening::{screen, ImportanceMode, ImportanceRule, ScreeningReport};
pub use selection::{select_model, SearchMode, SelectedModel, SelectionConfig};
pub use stats::{bland_altman, ols_fit, p_value_two_sided, vif, ModelFit};
