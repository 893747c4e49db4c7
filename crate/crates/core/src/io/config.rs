//! Flat `key = value` configuration files. Keys mirror the `fit` flags.

use crate::error::{Error, Result};
use crate::screening::ImportanceMode;
use crate::selection::{SearchMode, SelectionConfig};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FitSettings {
    pub selection: SelectionConfig,
    pub baseline: bool,
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("bad value for {key}: {value:?}")))
}

impl FitSettings {
    /// Applies one setting. Unknown keys are errors.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let cfg = &mut self.selection;
        match key {
            "alpha" => cfg.alpha = parse(key, value)?,
            "mixture" => cfg.mixture_m = parse(key, value)?,
            "delta" => cfg.importance.value = parse(key, value)?,
            "delta-mode" => {
                cfg.importance.mode = match value {
                    "absolute" => ImportanceMode::Absolute,
                    "relative" => ImportanceMode::Relative,
                    _ => return Err(Error::InvalidConfig(format!("bad delta-mode {value:?}"))),
                }
            }
            "varsigma" => cfg.varsigma = parse(key, value)?,
            "vif-cap" => cfg.vif_cap = parse(key, value)?,
            "max-terms" => cfg.max_subset_size = parse(key, value)?,
            "search" => {
                cfg.search_mode = match value {
                    "exhaustive" => SearchMode::Exhaustive,
                    "greedy" | "greedy_forward" | "greedy-forward" => SearchMode::GreedyForward,
                    _ => return Err(Error::InvalidConfig(format!("bad search mode {value:?}"))),
                }
            }
            "search-budget" => cfg.search_budget = parse(key, value)?,
            "dictionary-budget" => cfg.dictionary_budget = parse(key, value)?,
            "seed" => cfg.seed = parse(key, value)?,
            "baseline" => self.baseline = parse(key, value)?,
            _ => return Err(Error::InvalidConfig(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Applies every `key = value` line of `text`. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::InvalidConfig(format!("line {}: expected key = value", i + 1))
            })?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut s = Self::default();
        s.apply_text(text)?;
        Ok(s)
    }
}
