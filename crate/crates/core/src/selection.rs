//! Best-subset selection by adjusted R^2 under a VIF cap, a greedy forward
//! fallback, and the raw-variable baseline.
//!
//! Candidate scoring runs on a compressed problem: the centered, unit-norm
//! columns of `Z^r` and the response are reduced once to the triangular
//! factor `R` of `[Z_s | y_s]`. Any column subset of `R` has the same Gram
//! matrix as the matching subset of the data, so each candidate's R^2, rank
//! and VIFs come from a pivoted QR of an `(m+1) x k` block instead of an
//! `N x k` one. The winning subset is refitted from the raw columns.

use serde::{Deserialize, Serialize};

use crate::dictionary::{combinations, Dictionary, TermExpr, DEFAULT_DICTIONARY_BUDGET};
use crate::error::{Error, Result};
use crate::linalg::{triangular_factor, DesignMatrix, EquilibratedQr};
use crate::screening::ImportanceRule;
use crate::stats::{adjusted_r_squared, is_effectively_constant, ols_fit, standardize, ModelFit};

/// Objectives within this distance of the best count as tied.
pub const OBJECTIVE_TIE_TOL: f64 = 1e-12;

pub const DEFAULT_SEARCH_BUDGET: u64 = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    Exhaustive,
    GreedyForward,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionConfig {
    pub alpha: u32,
    pub mixture_m: usize,
    pub importance: ImportanceRule,
    pub varsigma: f64,
    pub vif_cap: f64,
    pub max_subset_size: usize,
    pub search_budget: u64,
    pub search_mode: SearchMode,
    pub seed: u64,
    pub dictionary_budget: usize,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self {
            alpha: 2,
            mixture_m: 2,
            importance: ImportanceRule::default(),
            varsigma: 0.8,
            vif_cap: 10.0,
            max_subset_size: 8,
            search_budget: DEFAULT_SEARCH_BUDGET,
            search_mode: SearchMode::Exhaustive,
            seed: crate::io::DEFAULT_SEED,
            dictionary_budget: DEFAULT_DICTIONARY_BUDGET,
        }
    }
}

impl SelectionConfig {
    pub fn validate(&self, n_obs: usize) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.alpha == 0 {
            return bad("alpha must be at least 1".into());
        }
        if self.mixture_m == 0 {
            return bad("mixture must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.importance.value) {
            return bad(format!(
                "delta must lie in [0, 1], got {}",
                self.importance.value
            ));
        }
        if !(self.varsigma > 0.0 && self.varsigma <= 1.0) {
            return bad(format!(
                "varsigma must lie in (0, 1], got {}",
                self.varsigma
            ));
        }
        if !(self.vif_cap > 1.0) {
            return bad(format!("vif cap must exceed 1, got {}", self.vif_cap));
        }
        if self.max_subset_size == 0 || self.max_subset_size + 2 > n_obs {
            return bad(format!(
                "max subset size must lie in [1, N - 2] = [1, {}], got {}",
                n_obs.saturating_sub(2),
                self.max_subset_size
            ));
        }
        if self.search_budget == 0 {
            return bad("search budget must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Feasibility {
    pub feasible: bool,
    pub full_rank: bool,
    /// Empty when the design is rank deficient.
    pub vifs: Vec<f64>,
}

/// Full rank and every VIF below the cap. Single-predictor designs are
/// always VIF-feasible.
pub fn subset_feasible(design: &DesignMatrix, vif_cap: f64) -> Feasibility {
    let n = design.nrows();
    let k = design.num_predictors();
    let infeasible = Feasibility {
        feasible: false,
        full_rank: false,
        vifs: Vec::new(),
    };
    if k == 0 || design.predictors().any(is_effectively_constant) {
        return infeasible;
    }
    let mut data = Vec::with_capacity(n * k);
    for c in design.predictors() {
        data.extend(standardize(c).expect("checked non-constant"));
    }
    let eq = EquilibratedQr::new(n, k, data);
    if !eq.is_full_rank() || n < k + 2 {
        return infeasible;
    }
    let vifs = if k == 1 {
        vec![1.0]
    } else {
        match eq.scaled_inverse_gram_diagonal() {
            Ok(v) => v,
            Err(_) => return infeasible,
        }
    };
    Feasibility {
        feasible: vifs.iter().all(|&v| v < vif_cap),
        full_rank: true,
        vifs,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeBest {
    pub size: usize,
    pub evaluated: u64,
    pub feasible: u64,
    pub best_objective: Option<f64>,
    pub best_terms: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectedModel {
    pub terms: Vec<TermExpr>,
    pub keys: Vec<String>,
    pub labels: Vec<String>,
    pub fit: ModelFit,
    /// Adjusted R^2 of the refitted model.
    pub objective: f64,
    pub candidates_evaluated: u64,
    pub feasible_candidates: u64,
    pub mode: SearchMode,
    /// True for greedy results, which need not be the global optimum.
    pub approximate: bool,
    pub best_per_size: Vec<SizeBest>,
}

impl SelectedModel {
    /// Column values of the selected terms, for a dictionary holding them.
    pub fn design(&self, zr: &Dictionary) -> Result<DesignMatrix> {
        let cols: Vec<&[f64]> = self
            .keys
            .iter()
            .map(|k| {
                zr.index_of_key(k)
                    .map(|i| zr.column(i))
                    .ok_or_else(|| Error::InvalidInput(format!("term {k} not in dictionary")))
            })
            .collect::<Result<_>>()?;
        DesignMatrix::from_columns(&cols, true)?.with_labels(self.labels.clone())
    }
}

/// Score of one candidate subset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CandidateScore {
    pub feasible: bool,
    pub r_squared: f64,
    pub objective: f64,
}

/// `Z^r` and `y` reduced to the triangular factor of their standardized
/// columns.
pub struct CompressedProblem {
    r: Vec<f64>,
    rows: usize,
    m: usize,
    n_obs: usize,
    usable: Vec<bool>,
    vif_cap: f64,
}

impl CompressedProblem {
    pub fn new(zr: &Dictionary, y: &[f64], vif_cap: f64) -> Result<Self> {
        let n = zr.n_obs();
        if y.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: y.len(),
            });
        }
        let m = zr.len();
        let ys = standardize(y).ok_or(Error::ZeroVariance)?;
        let mut data = Vec::with_capacity(n * (m + 1));
        let mut usable = Vec::with_capacity(m);
        for c in zr.columns() {
            match standardize(c) {
                Some(s) => {
                    data.extend(s);
                    usable.push(true);
                }
                None => {
                    data.extend(std::iter::repeat_n(0.0, n));
                    usable.push(false);
                }
            }
        }
        data.extend(ys);
        let rows = n.min(m + 1);
        Ok(Self {
            r: triangular_factor(n, m + 1, data),
            rows,
            m,
            n_obs: n,
            usable,
            vif_cap,
        })
    }

    fn col(&self, j: usize) -> &[f64] {
        &self.r[j * self.rows..(j + 1) * self.rows]
    }

    pub fn score(&self, subset: &[usize]) -> CandidateScore {
        let k = subset.len();
        let infeasible = CandidateScore {
            feasible: false,
            r_squared: f64::NAN,
            objective: f64::NEG_INFINITY,
        };
        if k == 0 || self.n_obs < k + 2 || subset.iter().any(|&j| !self.usable[j]) {
            return infeasible;
        }
        let mut a = Vec::with_capacity(self.rows * k);
        for &j in subset {
            a.extend_from_slice(self.col(j));
        }
        let eq = EquilibratedQr::new(self.rows, k, a);
        if !eq.is_full_rank() {
            return infeasible;
        }
        let b = self.col(self.m);
        let tss: f64 = b.iter().map(|v| v * v).sum();
        let mut qtb = b.to_vec();
        eq.qr().apply_qt(&mut qtb);
        let rss: f64 = qtb[k..].iter().map(|v| v * v).sum();
        let r_squared = (1.0 - rss / tss).clamp(0.0, 1.0);
        let feasible = k == 1
            || eq
                .scaled_inverse_gram_diagonal()
                .map(|v| v.iter().all(|&x| x < self.vif_cap))
                .unwrap_or(false);
        CandidateScore {
            feasible,
            r_squared,
            objective: adjusted_r_squared(r_squared, self.n_obs, k),
        }
    }
}

/// Candidates that could still win for some acceptance threshold: no other
/// stored candidate has both an objective at least as high and a smaller
/// key tuple.
#[derive(Debug, Clone, Default)]
struct Frontier {
    items: Vec<(f64, Vec<u32>, Vec<usize>)>,
}

impl Frontier {
    fn insert(&mut self, obj: f64, lex: Vec<u32>, subset: Vec<usize>) {
        if self.items.iter().any(|(o, l, _)| *o >= obj && *l <= lex) {
            return;
        }
        self.items.retain(|(o, l, _)| !(obj >= *o && lex <= *l));
        self.items.push((obj, lex, subset));
    }

    fn merge(&mut self, other: Frontier) {
        for (o, l, s) in other.items {
            self.insert(o, l, s);
        }
    }

    fn max_objective(&self) -> Option<f64> {
        self.items.iter().map(|i| i.0).reduce(f64::max)
    }

    /// Smallest key tuple among entries with objective `>= floor`.
    fn pick(&self, floor: f64) -> Option<&(f64, Vec<u32>, Vec<usize>)> {
        self.items
            .iter()
            .filter(|i| i.0 >= floor)
            .min_by(|a, b| a.1.cmp(&b.1))
    }
}

#[derive(Debug, Clone, Default)]
struct SizeTally {
    evaluated: u64,
    feasible: u64,
    frontier: Frontier,
}

impl SizeTally {
    fn merge(mut self, other: SizeTally) -> SizeTally {
        self.evaluated += other.evaluated;
        self.feasible += other.feasible;
        self.frontier.merge(other.frontier);
        self
    }
}

/// Rank of each term's canonical key within `zr`.
fn key_ranks(zr: &Dictionary) -> Vec<u32> {
    let mut order: Vec<usize> = (0..zr.len()).collect();
    order.sort_by(|&a, &b| zr.keys()[a].cmp(&zr.keys()[b]));
    let mut ranks = vec![0u32; zr.len()];
    for (r, &i) in order.iter().enumerate() {
        ranks[i] = r as u32;
    }
    ranks
}

fn lex_tuple(subset: &[usize], ranks: &[u32]) -> Vec<u32> {
    let mut t: Vec<u32> = subset.iter().map(|&i| ranks[i]).collect();
    t.sort_unstable();
    t
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Number of subsets of size `1..=max_size` drawn from `m` terms.
pub fn exhaustive_candidate_count(m: usize, max_size: usize) -> u128 {
    (1..=max_size.min(m))
        .map(|k| binomial(m as u128, k as u128))
        .fold(0u128, u128::saturating_add)
}

const BATCH: usize = 1 << 14;

fn tally_batch(problem: &CompressedProblem, ranks: &[u32], flat: &[usize], k: usize) -> SizeTally {
    let score_chunk = |chunk: &[usize]| {
        let mut t = SizeTally::default();
        for subset in chunk.chunks(k) {
            t.evaluated += 1;
            let s = problem.score(subset);
            if s.feasible {
                t.feasible += 1;
                t.frontier
                    .insert(s.objective, lex_tuple(subset, ranks), subset.to_vec());
            }
        }
        t
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        flat.par_chunks(k * 256)
            .map(score_chunk)
            .reduce(SizeTally::default, SizeTally::merge)
    }
    #[cfg(not(feature = "parallel"))]
    {
        flat.chunks(k * 256)
            .map(score_chunk)
            .fold(SizeTally::default(), SizeTally::merge)
    }
}

/// Exhaustive search over all subsets of `zr` of size `1..=max_subset_size`
/// for the feasible subset with the largest adjusted R^2. Objectives within
/// [`OBJECTIVE_TIE_TOL`] of the best tie; ties go to the smaller subset, then
/// to the lexicographically smaller tuple of canonical keys.
pub fn best_subset_search(
    zr: &Dictionary,
    y: &[f64],
    cfg: &SelectionConfig,
) -> Result<SelectedModel> {
    if zr.is_empty() {
        return Err(Error::InvalidInput("no candidate terms".into()));
    }
    let n = zr.n_obs();
    let max_size = cfg.max_subset_size.min(zr.len()).min(n.saturating_sub(2));
    let required = exhaustive_candidate_count(zr.len(), max_size);
    if required > u128::from(cfg.search_budget) {
        return Err(Error::BudgetExceeded {
            required,
            budget: cfg.search_budget,
        });
    }
    let problem = CompressedProblem::new(zr, y, cfg.vif_cap)?;
    let ranks = key_ranks(zr);

    let mut tallies = Vec::with_capacity(max_size);
    for k in 1..=max_size {
        let mut tally = SizeTally::default();
        let mut combos = combinations(zr.len(), k).peekable();
        while combos.peek().is_some() {
            let flat: Vec<usize> = combos.by_ref().take(BATCH).flatten().collect();
            tally = tally.merge(tally_batch(&problem, &ranks, &flat, k));
        }
        tallies.push(tally);
    }

    let global = tallies
        .iter()
        .filter_map(|t| t.frontier.max_objective())
        .reduce(f64::max)
        .ok_or(Error::NoFeasibleSubset)?;
    let floor = global - OBJECTIVE_TIE_TOL;
    let winner = tallies
        .iter()
        .find_map(|t| t.frontier.pick(floor))
        .map(|w| w.2.clone())
        .ok_or(Error::NoFeasibleSubset)?;

    let best_per_size = tallies
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let best = t.frontier.max_objective();
            let terms = best
                .and_then(|b| t.frontier.pick(b - OBJECTIVE_TIE_TOL))
                .map(|w| w.2.iter().map(|&j| zr.label(j)).collect())
                .unwrap_or_default();
            SizeBest {
                size: i + 1,
                evaluated: t.evaluated,
                feasible: t.feasible,
                best_objective: best,
                best_terms: terms,
            }
        })
        .collect();

    finish(
        zr,
        y,
        winner,
        tallies.iter().map(|t| t.evaluated).sum(),
        tallies.iter().map(|t| t.feasible).sum(),
        SearchMode::Exhaustive,
        best_per_size,
    )
}

/// Adds one term at a time, each time the feasible term with the largest
/// adjusted R^2 (near-ties to the smaller canonical key), until nothing
/// improves the objective by more than [`OBJECTIVE_TIE_TOL`] or the size cap
/// is reached.
pub fn greedy_forward_search(
    zr: &Dictionary,
    y: &[f64],
    cfg: &SelectionConfig,
) -> Result<SelectedModel> {
    if zr.is_empty() {
        return Err(Error::InvalidInput("no candidate terms".into()));
    }
    let n = zr.n_obs();
    let max_size = cfg.max_subset_size.min(zr.len()).min(n.saturating_sub(2));
    let problem = CompressedProblem::new(zr, y, cfg.vif_cap)?;
    let ranks = key_ranks(zr);

    let mut current: Vec<usize> = Vec::new();
    let mut current_obj = f64::NEG_INFINITY;
    let mut evaluated = 0u64;
    let mut feasible = 0u64;
    let mut best_per_size = Vec::new();

    while current.len() < max_size {
        let mut scored = Vec::new();
        let mut step_eval = 0u64;
        let mut step_feasible = 0u64;
        for j in (0..zr.len()).filter(|j| !current.contains(j)) {
            let mut cand = current.clone();
            cand.push(j);
            cand.sort_unstable();
            step_eval += 1;
            let s = problem.score(&cand);
            if s.feasible {
                step_feasible += 1;
                scored.push((s.objective, ranks[j], cand));
            }
        }
        evaluated += step_eval;
        feasible += step_feasible;
        let Some(best_obj) = scored.iter().map(|s| s.0).reduce(f64::max) else {
            break;
        };
        let (obj, _, cand) = scored
            .into_iter()
            .filter(|s| s.0 >= best_obj - OBJECTIVE_TIE_TOL)
            .min_by_key(|s| s.1)
            .expect("at least the maximum passes");
        if !(obj > current_obj + OBJECTIVE_TIE_TOL) {
            break;
        }
        best_per_size.push(SizeBest {
            size: cand.len(),
            evaluated: step_eval,
            feasible: step_feasible,
            best_objective: Some(obj),
            best_terms: cand.iter().map(|&j| zr.label(j)).collect(),
        });
        current = cand;
        current_obj = obj;
    }
    if current.is_empty() {
        return Err(Error::NoFeasibleSubset);
    }
    finish(
        zr,
        y,
        current,
        evaluated,
        feasible,
        SearchMode::GreedyForward,
        best_per_size,
    )
}

/// Dispatches on `cfg.search_mode`.
pub fn select_model(zr: &Dictionary, y: &[f64], cfg: &SelectionConfig) -> Result<SelectedModel> {
    match cfg.search_mode {
        SearchMode::Exhaustive => best_subset_search(zr, y, cfg),
        SearchMode::GreedyForward => greedy_forward_search(zr, y, cfg),
    }
}

/// Exhaustive VIF-capped best subset over the raw input columns only.
pub fn baseline_best_subset(
    data: &crate::io::Dataset,
    y: &[f64],
    cfg: &SelectionConfig,
) -> Result<SelectedModel> {
    best_subset_search(&Dictionary::raw(data), y, cfg)
}

fn finish(
    zr: &Dictionary,
    y: &[f64],
    mut subset: Vec<usize>,
    candidates_evaluated: u64,
    feasible_candidates: u64,
    mode: SearchMode,
    best_per_size: Vec<SizeBest>,
) -> Result<SelectedModel> {
    subset.sort_by(|&a, &b| zr.keys()[a].cmp(&zr.keys()[b]));
    let labels: Vec<String> = subset.iter().map(|&j| zr.label(j)).collect();
    let cols: Vec<&[f64]> = subset.iter().map(|&j| zr.column(j)).collect();
    let design = DesignMatrix::from_columns(&cols, true)?.with_labels(labels.clone())?;
    let fit = ols_fit(&design, y)?;
    Ok(SelectedModel {
        terms: subset.iter().map(|&j| zr.terms()[j].clone()).collect(),
        keys: subset.iter().map(|&j| zr.keys()[j].clone()).collect(),
        labels,
        objective: fit.r_squared_adj,
        fit,
        candidates_evaluated,
        feasible_candidates,
        mode,
        approximate: mode == SearchMode::GreedyForward,
        best_per_size,
    })
}
