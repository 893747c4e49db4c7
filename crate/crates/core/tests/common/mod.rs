//! Independent reference implementations used as test oracles. None of these
//! call into the library's numerical code.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use parseal::io::Dataset;
use parseal::Dictionary;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn normal_vec(r: &mut StdRng, n: usize) -> Vec<f64> {
    (0..n).map(|_| r.sample(StandardNormal)).collect()
}

pub fn uniform_vec(r: &mut StdRng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| lo + (hi - lo) * r.random::<f64>()).collect()
}

pub fn dataset(cols: Vec<Vec<f64>>, y: Vec<f64>) -> Dataset {
    let names = (0..cols.len()).map(|i| format!("z{i}")).collect();
    Dataset::new(names, cols, "y", y).unwrap()
}

pub fn raw_dictionary(cols: Vec<Vec<f64>>, y: &[f64]) -> Dictionary {
    Dictionary::raw(&dataset(cols, y.to_vec()))
}

fn design(cols: &[&[f64]], intercept: bool) -> DMatrix<f64> {
    let n = cols[0].len();
    let k = cols.len() + usize::from(intercept);
    DMatrix::from_fn(n, k, |i, j| {
        if intercept && j == 0 {
            1.0
        } else {
            cols[j - usize::from(intercept)][i]
        }
    })
}

/// `(X^T X)^{-1} X^T y`.
pub fn normal_equations(cols: &[&[f64]], y: &[f64], intercept: bool) -> Vec<f64> {
    let x = design(cols, intercept);
    let xtx = x.transpose() * &x;
    let xty = x.transpose() * DVector::from_column_slice(y);
    (xtx.try_inverse().expect("singular normal equations") * xty)
        .iter()
        .copied()
        .collect()
}

/// Least squares by SVD; returns (coefficients, rank).
pub fn svd_least_squares(cols: &[&[f64]], y: &[f64]) -> (Vec<f64>, usize) {
    let x = design(cols, true);
    let svd = x.svd(true, true);
    let smax = svd.singular_values.max();
    let rank = svd
        .singular_values
        .iter()
        .filter(|&&s| s > 1e-10 * smax)
        .count();
    let b = svd
        .solve(&DVector::from_column_slice(y), 1e-10 * smax)
        .unwrap();
    (b.iter().copied().collect(), rank)
}

pub fn r_squared_of(cols: &[&[f64]], y: &[f64], beta: &[f64]) -> f64 {
    let n = y.len();
    let my = y.iter().sum::<f64>() / n as f64;
    let mut rss = 0.0;
    let mut tss = 0.0;
    for i in 0..n {
        let f = beta[0]
            + cols
                .iter()
                .zip(&beta[1..])
                .map(|(c, b)| c[i] * b)
                .sum::<f64>();
        rss += (y[i] - f).powi(2);
        tss += (y[i] - my).powi(2);
    }
    1.0 - rss / tss
}

/// VIF_j = 1 / (1 - R_j^2), R_j^2 from regressing column j on the others
/// with an intercept.
pub fn auxiliary_vif(cols: &[&[f64]]) -> Vec<f64> {
    if cols.len() == 1 {
        return vec![1.0];
    }
    (0..cols.len())
        .map(|j| {
            let others: Vec<&[f64]> = (0..cols.len())
                .filter(|&i| i != j)
                .map(|i| cols[i])
                .collect();
            let (b, _) = svd_least_squares(&others, cols[j]);
            1.0 / (1.0 - r_squared_of(&others, cols[j], &b))
        })
        .collect()
}

pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (sa, sb) = (a.iter().sum::<f64>(), b.iter().sum::<f64>());
    let sab: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let saa: f64 = a.iter().map(|x| x * x).sum();
    let sbb: f64 = b.iter().map(|x| x * x).sum();
    (n * sab - sa * sb) / ((n * saa - sa * sa).sqrt() * (n * sbb - sb * sb).sqrt())
}

#[derive(Debug, Clone)]
pub struct OracleBest {
    pub keys: Vec<String>,
    pub objective: f64,
    pub feasible_count: u64,
}

/// Enumerates every subset by bitmask and fits each one from scratch.
pub fn brute_force_best(
    zr: &Dictionary,
    y: &[f64],
    vif_cap: f64,
    max_size: usize,
) -> Option<OracleBest> {
    let m = zr.len();
    let n = y.len();
    let mut scored: Vec<(f64, Vec<String>)> = Vec::new();
    for mask in 1u32..(1 << m) {
        let idx: Vec<usize> = (0..m).filter(|j| mask & (1 << j) != 0).collect();
        let k = idx.len();
        if k > max_size || k + 2 > n {
            continue;
        }
        let cols: Vec<&[f64]> = idx.iter().map(|&j| zr.column(j)).collect();
        let (beta, rank) = svd_least_squares(&cols, y);
        if rank < k + 1 {
            continue;
        }
        if auxiliary_vif(&cols)
            .iter()
            .any(|&v| !(v < vif_cap) || v < 0.0)
        {
            continue;
        }
        let r2 = r_squared_of(&cols, y, &beta);
        let adj = 1.0 - (1.0 - r2) * (n - 1) as f64 / (n - k - 1) as f64;
        let mut keys: Vec<String> = idx.iter().map(|&j| zr.keys()[j].clone()).collect();
        keys.sort();
        scored.push((adj, keys));
    }
    let best = scored.iter().map(|s| s.0).fold(f64::NEG_INFINITY, f64::max);
    let feasible_count = scored.len() as u64;
    scored
        .into_iter()
        .filter(|s| s.0 >= best - 1e-12)
        .min_by(|a, b| a.1.len().cmp(&b.1.len()).then_with(|| a.1.cmp(&b.1)))
        .map(|(objective, keys)| OracleBest {
            keys,
            objective,
            feasible_count,
        })
}
