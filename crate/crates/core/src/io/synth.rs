//! Seeded generators for the two noiseless synthetic benchmarks.
//!
//! Uniform draws come from ChaCha20 (`rand_chacha`), seeded with
//! `seed_from_u64(seed)`, one stream per input column selected with
//! `set_stream(column)`. Each draw is `(next_u64() >> 11) * 2^-53`, a
//! uniform value on `[0, 1)`.

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

use super::Dataset;
use crate::error::{Error, Result};

pub const DEFAULT_SEED: u64 = 20_190_424;

/// `n` uniform `[0, 1)` draws from stream `stream` of `seed`.
pub fn uniform_stream(seed: u64, stream: u64, n: usize) -> Vec<f64> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    (0..n)
        .map(|_| (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64))
        .collect()
}

fn check_n(n: usize) -> Result<()> {
    if n < 10 {
        return Err(Error::InvalidInput(format!(
            "synthetic examples need at least 10 rows, got {n}"
        )));
    }
    Ok(())
}

fn names() -> Vec<String> {
    vec!["x1".into(), "x2".into(), "x3".into()]
}

/// `x1, x2, x3 ~ U[0, 100]` independently, `y = 120 + 80 x1 x3`.
pub fn synth_example1(n: usize, seed: u64) -> Result<Dataset> {
    check_n(n)?;
    let cols: Vec<Vec<f64>> = (0..3)
        .map(|s| {
            uniform_stream(seed, s, n)
                .into_iter()
                .map(|u| 100.0 * u)
                .collect()
        })
        .collect();
    let y = (0..n)
        .map(|i| 120.0 + 80.0 * cols[0][i] * cols[2][i])
        .collect();
    Dataset::new(names(), cols, "y", y)
}

/// One `chi ~ U[0, 1]` per row: `x1 = x3 = 100 chi`, `x2 = chi + 0.1`,
/// `y = 120 + 1000 / x2`.
pub fn synth_example2(n: usize, seed: u64) -> Result<Dataset> {
    check_n(n)?;
    let chi = uniform_stream(seed, 0, n);
    let x1: Vec<f64> = chi.iter().map(|c| 100.0 * c).collect();
    let x2: Vec<f64> = chi.iter().map(|c| c + 0.1).collect();
    let x3 = x1.clone();
    let y = x2.iter().map(|v| 120.0 + 1000.0 / v).collect();
    Dataset::new(names(), vec![x1, x2, x3], "y", y)
}
