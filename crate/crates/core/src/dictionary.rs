//! The transformation dictionary: logs, square roots, signed integer powers
//! and cross-variable products of the raw inputs.
//!
//! A term is a product of per-variable factors. Square roots are not a
//! separate transform; they are half-integer exponents on the identity, so
//! `(sqrt x)^2` and `x` have the same representation. Log factors carry
//! their own integer exponents.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::Dataset;
use crate::stats::is_effectively_constant;

/// Entries with magnitude at or below this count as zero.
pub const ZERO_TOL: f64 = 1e-12;

pub const DEFAULT_DICTIONARY_BUDGET: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transform {
    Identity,
    Log,
}

/// A rational exponent with denominator 1 or 2, stored in half units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Exponent(i32);

impl Exponent {
    pub const fn integer(n: i32) -> Self {
        Self(2 * n)
    }

    /// `halves / 2`.
    pub const fn from_halves(halves: i32) -> Self {
        Self(halves)
    }

    pub const fn halves(self) -> i32 {
        self.0
    }

    pub const fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub const fn is_negative(self) -> bool {
        self.0 < 0
    }

    pub const fn abs(self) -> Self {
        Self(self.0.abs())
    }

    /// Numerator and denominator in lowest terms.
    pub const fn ratio(self) -> (i32, i32) {
        if self.is_integer() {
            (self.0 / 2, 1)
        } else {
            (self.0, 2)
        }
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.0) / 2.0
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (n, d) = self.ratio();
        write!(f, "{n}/{d}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Factor {
    pub variable: usize,
    pub transform: Transform,
    pub exponent: Exponent,
}

impl Factor {
    pub const fn power(variable: usize, n: i32) -> Self {
        Self {
            variable,
            transform: Transform::Identity,
            exponent: Exponent::integer(n),
        }
    }

    /// `(sqrt x)^k`.
    pub const fn sqrt_power(variable: usize, k: i32) -> Self {
        Self {
            variable,
            transform: Transform::Identity,
            exponent: Exponent::from_halves(k),
        }
    }

    /// `(log x)^n`.
    pub const fn log_power(variable: usize, n: i32) -> Self {
        Self {
            variable,
            transform: Transform::Log,
            exponent: Exponent::integer(n),
        }
    }

    fn key(&self) -> String {
        match self.transform {
            Transform::Identity => format!("v{}^{}", self.variable, self.exponent),
            Transform::Log => format!("log(v{})^{}", self.variable, self.exponent.ratio().0),
        }
    }

    /// Value of the factor at `x`; no domain checks.
    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        let h = self.exponent.halves();
        match self.transform {
            Transform::Identity if h % 2 == 0 => x.powi(h / 2),
            Transform::Identity => x.sqrt().powi(h),
            Transform::Log => x.ln().powi(h / 2),
        }
    }

    /// Whether the factor is defined and finite-valued at `x`.
    pub fn admits(&self, x: f64) -> bool {
        let e = self.exponent;
        match self.transform {
            Transform::Identity => {
                (e.is_integer() || x > 0.0) && (!e.is_negative() || x.abs() > ZERO_TOL)
            }
            Transform::Log => x > 0.0 && (!e.is_negative() || x.ln().abs() > ZERO_TOL),
        }
    }
}

/// A product of factors over distinct variables, sorted by variable index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermExpr {
    factors: Vec<Factor>,
}

impl TermExpr {
    /// Canonicalizes a factor list: sorts by variable, merges repeated
    /// `(variable, transform)` factors by adding exponents and drops identity
    /// factors whose exponent folds to zero.
    pub fn new(factors: impl IntoIterator<Item = Factor>) -> Result<Self> {
        let mut merged: BTreeMap<usize, (Transform, i32)> = BTreeMap::new();
        for f in factors {
            if f.transform == Transform::Log && !f.exponent.is_integer() {
                return Err(Error::InvalidInput(format!(
                    "log factor on v{} needs an integer exponent",
                    f.variable
                )));
            }
            match merged.get_mut(&f.variable) {
                None => {
                    merged.insert(f.variable, (f.transform, f.exponent.halves()));
                }
                Some((t, h)) if *t == f.transform => *h += f.exponent.halves(),
                Some(_) => {
                    return Err(Error::InvalidInput(format!(
                        "v{} appears under two transforms",
                        f.variable
                    )))
                }
            }
        }
        let factors: Vec<Factor> = merged
            .into_iter()
            .filter(|(_, (_, h))| *h != 0)
            .map(|(variable, (transform, h))| Factor {
                variable,
                transform,
                exponent: Exponent::from_halves(h),
            })
            .collect();
        if factors.is_empty() {
            return Err(Error::InvalidInput("term folds to a constant".into()));
        }
        Ok(Self { factors })
    }

    pub fn single(f: Factor) -> Self {
        Self { factors: vec![f] }
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    /// Number of distinct variables in the term.
    pub fn mixture(&self) -> usize {
        self.factors.len()
    }

    /// The term raised to an integer power, refolded.
    pub fn powi(&self, k: i32) -> Result<Self> {
        Self::new(self.factors.iter().map(|f| Factor {
            exponent: Exponent::from_halves(f.exponent.halves() * k),
            ..*f
        }))
    }

    pub fn canonical_key(&self) -> String {
        canonical_key(self)
    }
}

/// Stable text key: factors joined by `*`, each `v<idx>^<num>/<den>` or
/// `log(v<idx>)^<int>`.
pub fn canonical_key(t: &TermExpr) -> String {
    t.factors
        .iter()
        .map(Factor::key)
        .collect::<Vec<_>>()
        .join("*")
}

fn render_factor(f: &Factor, names: &[String]) -> String {
    let name = names
        .get(f.variable)
        .cloned()
        .unwrap_or_else(|| format!("v{}", f.variable));
    let e = f.exponent.abs();
    match f.transform {
        Transform::Identity => match e.ratio() {
            (1, 1) => name,
            (n, 1) => format!("{name}^{n}"),
            (1, 2) => format!("sqrt({name})"),
            (n, d) => format!("{name}^({n}/{d})"),
        },
        Transform::Log => match e.ratio().0 {
            1 => format!("log({name})"),
            n => format!("(log({name}))^{n}"),
        },
    }
}

/// Human-readable form such as `D*A`, `A^2/sqrt(D)` or `(log(BMI))^2/A`.
pub fn format_term(t: &TermExpr, names: &[String]) -> String {
    let (den, num): (Vec<&Factor>, Vec<&Factor>) =
        t.factors.iter().partition(|f| f.exponent.is_negative());
    let join = |fs: &[&Factor]| {
        fs.iter()
            .map(|f| render_factor(f, names))
            .collect::<Vec<_>>()
            .join("*")
    };
    let numerator = if num.is_empty() {
        "1".to_owned()
    } else {
        join(&num)
    };
    match den.len() {
        0 => numerator,
        1 => format!("{numerator}/{}", join(&den)),
        _ => format!("{numerator}/({})", join(&den)),
    }
}

/// Values of the term on every row of the dataset.
pub fn evaluate_term(t: &TermExpr, data: &Dataset) -> Result<Vec<f64>> {
    for f in &t.factors {
        if f.variable >= data.n_vars() {
            return Err(Error::InvalidInput(format!(
                "term references v{} but the dataset has {} variables",
                f.variable,
                data.n_vars()
            )));
        }
        if let Some(row) = data.column(f.variable).iter().position(|&x| !f.admits(x)) {
            return Err(Error::DomainViolation {
                row,
                factor: f.key(),
            });
        }
    }
    Ok(evaluate_unchecked(t, |v| data.column(v)))
}

fn evaluate_unchecked<'a>(t: &TermExpr, column: impl Fn(usize) -> &'a [f64]) -> Vec<f64> {
    let mut factors = t.factors.iter();
    let first = factors.next().expect("terms are non-empty");
    let mut out: Vec<f64> = column(first.variable)
        .iter()
        .map(|&x| first.apply(x))
        .collect();
    for f in factors {
        for (o, &x) in out.iter_mut().zip(column(f.variable)) {
            *o *= f.apply(x);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exclusion {
    pub factor: String,
    pub reason: String,
}

/// Per-variable factor choices after data-driven restrictions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissibleFactors {
    pub factors: Vec<(Transform, Exponent)>,
    pub excluded: Vec<Exclusion>,
}

/// Factor shapes allowed for a column:
///
/// * positive integer powers `1..=alpha` always;
/// * negative powers only if no entry is zero (`|x| <= ZERO_TOL`);
/// * half-integer powers `k/2` (odd `k <= alpha`) and logs only if every
///   entry is positive;
/// * negative log powers only if no entry has `|log x| <= ZERO_TOL`.
pub fn admissible_factors(column: &[f64], alpha: u32) -> AdmissibleFactors {
    let alpha = alpha as i32;
    let positive = column.iter().all(|&x| x > 0.0);
    let nonzero = column.iter().all(|&x| x.abs() > ZERO_TOL);
    let log_nonzero = positive && column.iter().all(|&x| x.ln().abs() > ZERO_TOL);

    let mut factors = Vec::new();
    let mut excluded = Vec::new();
    let mut consider = |t: Transform, e: Exponent, ok: bool, reason: &str| {
        if ok {
            factors.push((t, e));
        } else {
            let f = Factor {
                variable: 0,
                transform: t,
                exponent: e,
            };
            excluded.push(Exclusion {
                factor: f.key().replace("v0", "x"),
                reason: reason.to_owned(),
            });
        }
    };

    for n in 1..=alpha {
        consider(Transform::Identity, Exponent::integer(n), true, "");
        consider(
            Transform::Identity,
            Exponent::integer(-n),
            nonzero,
            "column contains zero",
        );
    }
    for k in (1..=alpha).step_by(2) {
        consider(
            Transform::Identity,
            Exponent::from_halves(k),
            positive,
            "column not strictly positive",
        );
        consider(
            Transform::Identity,
            Exponent::from_halves(-k),
            positive && nonzero,
            if positive {
                "column contains zero"
            } else {
                "column not strictly positive"
            },
        );
    }
    for n in 1..=alpha {
        consider(
            Transform::Log,
            Exponent::integer(n),
            positive,
            "column not strictly positive",
        );
        consider(
            Transform::Log,
            Exponent::integer(-n),
            log_nonzero,
            if positive {
                "log of column passes through zero"
            } else {
                "column not strictly positive"
            },
        );
    }
    AdmissibleFactors { factors, excluded }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableCensus {
    pub name: String,
    pub admissible: usize,
    pub excluded: Vec<Exclusion>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MixtureCount {
    pub mixture: usize,
    pub enumerated: usize,
    pub kept: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrunedTerm {
    pub key: String,
    pub term: String,
    pub reason: String,
}

/// What went into a dictionary and what was thrown out.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DictionaryCensus {
    pub alpha: u32,
    pub mixture: usize,
    pub n_obs: usize,
    pub variables: Vec<VariableCensus>,
    pub by_mixture: Vec<MixtureCount>,
    pub enumerated: usize,
    pub kept: usize,
    pub pruned: Vec<PrunedTerm>,
}

/// Ordered terms with their evaluated columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Dictionary {
    terms: Vec<TermExpr>,
    keys: Vec<String>,
    columns: Vec<Vec<f64>>,
    source_labels: Vec<String>,
    census: DictionaryCensus,
}

/// `sum_{m=1..M} e_m(f_1, ..., f_p)`: terms built from at most `M` distinct
/// variables with `f_i` factor choices for variable `i`.
pub fn term_count(factor_counts: &[usize], mixture: usize) -> u128 {
    // e[m] holds the elementary symmetric polynomial of degree m.
    let mut e = vec![0u128; mixture + 1];
    e[0] = 1;
    for &f in factor_counts {
        for m in (1..=mixture).rev() {
            e[m] = e[m].saturating_add(e[m - 1].saturating_mul(f as u128));
        }
    }
    e[1..].iter().fold(0u128, |a, &b| a.saturating_add(b))
}

/// Every canonical term over at most `mixture` distinct variables with one
/// admissible factor per variable, sorted by canonical key. Constant and
/// non-finite columns are pruned and listed in the census.
pub fn build_dictionary(data: &Dataset, alpha: u32, mixture: usize) -> Result<Dictionary> {
    build_dictionary_with_budget(data, alpha, mixture, DEFAULT_DICTIONARY_BUDGET)
}

pub fn build_dictionary_with_budget(
    data: &Dataset,
    alpha: u32,
    mixture: usize,
    budget: usize,
) -> Result<Dictionary> {
    if alpha == 0 {
        return Err(Error::InvalidConfig("alpha must be at least 1".into()));
    }
    if mixture == 0 {
        return Err(Error::InvalidConfig(
            "mixture number must be at least 1".into(),
        ));
    }
    let p = data.n_vars();
    let mixture = mixture.min(p);

    let admissible: Vec<AdmissibleFactors> = data
        .columns()
        .iter()
        .map(|c| admissible_factors(c, alpha))
        .collect();
    let counts: Vec<usize> = admissible.iter().map(|a| a.factors.len()).collect();
    let total = term_count(&counts, mixture);
    if total > budget as u128 {
        return Err(Error::DictionaryTooLarge {
            count: total,
            budget,
        });
    }

    let mut terms = Vec::with_capacity(total as usize);
    for m in 1..=mixture {
        for vars in combinations(p, m) {
            let mut choice = vec![0usize; m];
            'product: loop {
                let factors = vars
                    .iter()
                    .zip(&choice)
                    .map(|(&v, &c)| {
                        let (transform, exponent) = admissible[v].factors[c];
                        Factor {
                            variable: v,
                            transform,
                            exponent,
                        }
                    })
                    .collect();
                terms.push(TermExpr { factors });
                // Odometer over the per-variable choices.
                for pos in (0..m).rev() {
                    choice[pos] += 1;
                    if choice[pos] < counts[vars[pos]] {
                        continue 'product;
                    }
                    choice[pos] = 0;
                }
                break;
            }
        }
    }

    let mut keyed: Vec<(String, TermExpr)> =
        terms.into_iter().map(|t| (canonical_key(&t), t)).collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    keyed.dedup_by(|a, b| a.0 == b.0);

    let cache = FactorCache::new(data, &admissible);
    let columns: Vec<Vec<f64>> = map_maybe_parallel(&keyed, |(_, t)| cache.evaluate(t));

    let names = data.variable_names();
    let mut by_mixture: Vec<MixtureCount> = (1..=mixture)
        .map(|m| MixtureCount {
            mixture: m,
            enumerated: 0,
            kept: 0,
        })
        .collect();
    let mut kept_terms = Vec::new();
    let mut kept_keys = Vec::new();
    let mut kept_columns = Vec::new();
    let mut pruned = Vec::new();
    for ((key, term), col) in keyed.into_iter().zip(columns) {
        let slot = &mut by_mixture[term.mixture() - 1];
        slot.enumerated += 1;
        let reason = if col.iter().any(|v| !v.is_finite()) {
            Some("non-finite values")
        } else if is_effectively_constant(&col) {
            Some("constant column")
        } else {
            None
        };
        match reason {
            Some(reason) => pruned.push(PrunedTerm {
                term: format_term(&term, names),
                key,
                reason: reason.to_owned(),
            }),
            None => {
                slot.kept += 1;
                kept_terms.push(term);
                kept_keys.push(key);
                kept_columns.push(col);
            }
        }
    }

    let census = DictionaryCensus {
        alpha,
        mixture,
        n_obs: data.n_obs(),
        variables: names
            .iter()
            .zip(&admissible)
            .map(|(name, a)| VariableCensus {
                name: name.clone(),
                admissible: a.factors.len(),
                excluded: a.excluded.clone(),
            })
            .collect(),
        enumerated: by_mixture.iter().map(|m| m.enumerated).sum(),
        kept: kept_terms.len(),
        by_mixture,
        pruned,
    };

    Ok(Dictionary {
        terms: kept_terms,
        keys: kept_keys,
        columns: kept_columns,
        source_labels: names.to_vec(),
        census,
    })
}

struct FactorCache<'a> {
    data: &'a Dataset,
    values: BTreeMap<Factor, Vec<f64>>,
}

impl<'a> FactorCache<'a> {
    fn new(data: &'a Dataset, admissible: &[AdmissibleFactors]) -> Self {
        let mut values = BTreeMap::new();
        for (v, a) in admissible.iter().enumerate() {
            for &(transform, exponent) in &a.factors {
                let f = Factor {
                    variable: v,
                    transform,
                    exponent,
                };
                values.insert(f, data.column(v).iter().map(|&x| f.apply(x)).collect());
            }
        }
        Self { data, values }
    }

    fn evaluate(&self, t: &TermExpr) -> Vec<f64> {
        let mut factors = t.factors.iter();
        let first = factors.next().expect("terms are non-empty");
        let mut out = match self.values.get(first) {
            Some(v) => v.clone(),
            None => return evaluate_unchecked(t, |v| self.data.column(v)),
        };
        for f in factors {
            match self.values.get(f) {
                Some(v) => out.iter_mut().zip(v).for_each(|(o, x)| *o *= x),
                None => return evaluate_unchecked(t, |v| self.data.column(v)),
            }
        }
        out
    }
}

#[cfg(feature = "parallel")]
fn map_maybe_parallel<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_maybe_parallel<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    items.iter().map(f).collect()
}

/// Index combinations of `0..n` of size `k`, in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut current: Option<Vec<usize>> = if k <= n { Some((0..k).collect()) } else { None };
    std::iter::from_fn(move || {
        let out = current.clone()?;
        let c = current.as_mut().unwrap();
        let mut i = k;
        loop {
            if i == 0 {
                current = None;
                break;
            }
            i -= 1;
            if c[i] < n - k + i {
                c[i] += 1;
                for j in i + 1..k {
                    c[j] = c[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    })
}

impl Dictionary {
    /// One identity term per raw input column, in input order. Constant
    /// inputs are pruned.
    pub fn raw(data: &Dataset) -> Self {
        let mut terms = Vec::new();
        let mut keys = Vec::new();
        let mut columns = Vec::new();
        let mut pruned = Vec::new();
        for (v, col) in data.columns().iter().enumerate() {
            let t = TermExpr::single(Factor::power(v, 1));
            if is_effectively_constant(col) {
                pruned.push(PrunedTerm {
                    key: canonical_key(&t),
                    term: format_term(&t, data.variable_names()),
                    reason: "constant column".into(),
                });
                continue;
            }
            keys.push(canonical_key(&t));
            terms.push(t);
            columns.push(col.clone());
        }
        let p = data.n_vars();
        let census = DictionaryCensus {
            alpha: 1,
            mixture: 1,
            n_obs: data.n_obs(),
            variables: data
                .variable_names()
                .iter()
                .map(|name| VariableCensus {
                    name: name.clone(),
                    admissible: 1,
                    excluded: Vec::new(),
                })
                .collect(),
            by_mixture: vec![MixtureCount {
                mixture: 1,
                enumerated: p,
                kept: terms.len(),
            }],
            enumerated: p,
            kept: terms.len(),
            pruned,
        };
        Self {
            terms,
            keys,
            columns,
            source_labels: data.variable_names().to_vec(),
            census,
        }
    }

    /// Subset in the given index order; the census is carried over.
    pub fn select(&self, indices: &[usize]) -> Self {
        Self {
            terms: indices.iter().map(|&i| self.terms[i].clone()).collect(),
            keys: indices.iter().map(|&i| self.keys[i].clone()).collect(),
            columns: indices.iter().map(|&i| self.columns[i].clone()).collect(),
            source_labels: self.source_labels.clone(),
            census: self.census.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_obs(&self) -> usize {
        self.census.n_obs
    }

    pub fn terms(&self) -> &[TermExpr] {
        &self.terms
    }

    pub fn keys(&self) -> &[String] {
        &self.keys
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn column(&self, i: usize) -> &[f64] {
        &self.columns[i]
    }

    pub fn source_labels(&self) -> &[String] {
        &self.source_labels
    }

    pub fn census(&self) -> &DictionaryCensus {
        &self.census
    }

    pub fn label(&self, i: usize) -> String {
        format_term(&self.terms[i], &self.source_labels)
    }

    pub fn index_of_key(&self, key: &str) -> Option<usize> {
        self.keys.iter().position(|k| k == key)
    }
}
