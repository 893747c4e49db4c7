//! Dense least squares by Householder QR with column pivoting.
//!
//! Every fit in the pipeline goes through [`EquilibratedQr`]: columns are
//! scaled to unit Euclidean norm, factorized with pivoting, and the rank is
//! read off the diagonal of `R`. Scaling first makes the rank decision
//! independent of the units of each column.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Diagonal entries of `R` at or below `RANK_TOL * |R[0,0]|` count as zero.
pub const RANK_TOL: f64 = 1e-10;

/// An `N x k` design. When `has_intercept` is set the first column is all ones.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    values: DMatrix<f64>,
    has_intercept: bool,
    labels: Vec<String>,
}

impl DesignMatrix {
    pub fn new(values: DMatrix<f64>, has_intercept: bool) -> Result<Self> {
        if values.nrows() == 0 || values.ncols() == 0 {
            return Err(Error::EmptyMatrix);
        }
        check_finite(&values)?;
        if has_intercept && values.column(0).iter().any(|&v| v != 1.0) {
            return Err(Error::InvalidInput(
                "intercept column must be all ones".into(),
            ));
        }
        let first = usize::from(has_intercept);
        let labels = (first..values.ncols()).map(|j| format!("x{j}")).collect();
        Ok(Self {
            values,
            has_intercept,
            labels,
        })
    }

    /// Builds a design from predictor columns, prepending a ones column when
    /// `intercept` is true.
    pub fn from_columns<C: AsRef<[f64]>>(columns: &[C], intercept: bool) -> Result<Self> {
        let k = columns.len();
        if k == 0 {
            return Err(Error::EmptyMatrix);
        }
        let n = columns[0].as_ref().len();
        for c in columns {
            if c.as_ref().len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    actual: c.as_ref().len(),
                });
            }
        }
        let offset = usize::from(intercept);
        let mut data = Vec::with_capacity(n * (k + offset));
        if intercept {
            data.extend(std::iter::repeat_n(1.0, n));
        }
        for c in columns {
            data.extend_from_slice(c.as_ref());
        }
        Self::new(DMatrix::from_vec(n, k + offset, data), intercept)
    }

    /// Names for the predictor columns (intercept excluded).
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.num_predictors() {
            return Err(Error::LengthMismatch {
                expected: self.num_predictors(),
                actual: labels.len(),
            });
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn has_intercept(&self) -> bool {
        self.has_intercept
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn nrows(&self) -> usize {
        self.values.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.values.ncols()
    }

    pub fn num_predictors(&self) -> usize {
        self.ncols() - usize::from(self.has_intercept)
    }

    pub fn column(&self, j: usize) -> &[f64] {
        let n = self.nrows();
        &self.values.as_slice()[j * n..(j + 1) * n]
    }

    /// Predictor columns, intercept excluded.
    pub fn predictors(&self) -> impl Iterator<Item = &[f64]> + '_ {
        (usize::from(self.has_intercept)..self.ncols()).map(move |j| self.column(j))
    }
}

fn check_finite(m: &DMatrix<f64>) -> Result<()> {
    for (j, col) in m.column_iter().enumerate() {
        if let Some(i) = col.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: i, col: j });
        }
    }
    Ok(())
}

/// Solution of `min ||y - X b||`.
#[derive(Debug, Clone, PartialEq)]
pub struct LstSqSolution {
    pub coefficients: Vec<f64>,
    pub rank: usize,
    pub residual_sum_squares: f64,
}

/// Householder QR with column pivoting, `X P = Q R`, stored in packed form.
///
/// The strict upper triangle of `packed` holds `R`, the diagonal of `R` lives
/// in `rdiag`, and column `j` from row `j` down holds the Householder vector
/// of step `j`.
#[derive(Debug, Clone)]
pub struct QrFactorization {
    nrows: usize,
    ncols: usize,
    packed: Vec<f64>,
    vnorm2: Vec<f64>,
    rdiag: Vec<f64>,
    perm: Vec<usize>,
    rank: usize,
}

impl QrFactorization {
    /// Factorizes a column-major `nrows x ncols` buffer.
    pub fn from_column_major(nrows: usize, ncols: usize, mut a: Vec<f64>) -> Self {
        debug_assert_eq!(a.len(), nrows * ncols);
        let steps = nrows.min(ncols);
        let mut perm: Vec<usize> = (0..ncols).collect();
        let mut rdiag = vec![0.0; steps];
        let mut vnorm2 = vec![0.0; steps];

        for j in 0..steps {
            // Pivot on the largest remaining column norm; the first maximum wins.
            let mut best = j;
            let mut best_norm = -1.0;
            for c in j..ncols {
                let col = &a[c * nrows + j..(c + 1) * nrows];
                let s: f64 = col.iter().map(|v| v * v).sum();
                if s > best_norm {
                    best_norm = s;
                    best = c;
                }
            }
            if best != j {
                for i in 0..nrows {
                    a.swap(j * nrows + i, best * nrows + i);
                }
                perm.swap(j, best);
            }

            let col = &mut a[j * nrows + j..(j + 1) * nrows];
            let norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 {
                rdiag[j] = 0.0;
                vnorm2[j] = 0.0;
                continue;
            }
            let alpha = if col[0] >= 0.0 { -norm } else { norm };
            col[0] -= alpha;
            let vv: f64 = col.iter().map(|v| v * v).sum();
            rdiag[j] = alpha;
            vnorm2[j] = vv;

            let (head, tail) = a.split_at_mut((j + 1) * nrows);
            let v = &head[j * nrows + j..(j + 1) * nrows];
            for c in 0..ncols - j - 1 {
                let target = &mut tail[c * nrows + j..(c + 1) * nrows];
                let dot: f64 = v.iter().zip(target.iter()).map(|(a, b)| a * b).sum();
                let s = 2.0 * dot / vv;
                for (t, vi) in target.iter_mut().zip(v) {
                    *t -= s * vi;
                }
            }
        }

        let lead = rdiag.first().map_or(0.0, |d| d.abs());
        let rank = if lead == 0.0 {
            0
        } else {
            rdiag
                .iter()
                .take_while(|d| d.abs() > RANK_TOL * lead)
                .count()
        };

        Self {
            nrows,
            ncols,
            packed: a,
            vnorm2,
            rdiag,
            perm,
            rank,
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank == self.ncols
    }

    /// Column permutation: column `i` of `X P` is column `perm[i]` of `X`.
    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    pub fn r_diagonal(&self) -> &[f64] {
        &self.rdiag
    }

    fn steps(&self) -> usize {
        self.rdiag.len()
    }

    fn r_entry(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.rdiag[i]
        } else if i < j {
            self.packed[j * self.nrows + i]
        } else {
            0.0
        }
    }

    /// The `min(N, k) x k` upper-triangular factor.
    pub fn r(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.steps(), self.ncols, |i, j| self.r_entry(i, j))
    }

    /// The thin `N x min(N, k)` orthonormal factor.
    pub fn q(&self) -> DMatrix<f64> {
        let s = self.steps();
        let mut q = DMatrix::zeros(self.nrows, s);
        for c in 0..s {
            let mut e = vec![0.0; self.nrows];
            e[c] = 1.0;
            for j in (0..s).rev() {
                self.reflect(j, &mut e);
            }
            q.column_mut(c).copy_from_slice(&e);
        }
        q
    }

    fn reflect(&self, j: usize, y: &mut [f64]) {
        let vv = self.vnorm2[j];
        if vv == 0.0 {
            return;
        }
        let v = &self.packed[j * self.nrows + j..(j + 1) * self.nrows];
        let seg = &mut y[j..];
        let dot: f64 = v.iter().zip(seg.iter()).map(|(a, b)| a * b).sum();
        let s = 2.0 * dot / vv;
        for (t, vi) in seg.iter_mut().zip(v) {
            *t -= s * vi;
        }
    }

    /// Overwrites `y` with `Q^T y`.
    pub fn apply_qt(&self, y: &mut [f64]) {
        for j in 0..self.steps() {
            self.reflect(j, y);
        }
    }

    /// Least-squares coefficients in the original column order.
    pub fn solve(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.nrows {
            return Err(Error::LengthMismatch {
                expected: self.nrows,
                actual: y.len(),
            });
        }
        if !self.is_full_rank() {
            return Err(Error::RankDeficient {
                rank: self.rank,
                cols: self.ncols,
            });
        }
        let mut qty = y.to_vec();
        self.apply_qt(&mut qty);
        let k = self.ncols;
        let mut z = vec![0.0; k];
        for i in (0..k).rev() {
            let mut s = qty[i];
            for j in i + 1..k {
                s -= self.r_entry(i, j) * z[j];
            }
            z[i] = s / self.rdiag[i];
        }
        let mut beta = vec![0.0; k];
        for (i, &p) in self.perm.iter().enumerate() {
            beta[p] = z[i];
        }
        Ok(beta)
    }

    /// `(X^T X)^{-1}` in the original column order.
    pub fn inverse_gram(&self) -> Result<DMatrix<f64>> {
        if !self.is_full_rank() {
            return Err(Error::RankDeficient {
                rank: self.rank,
                cols: self.ncols,
            });
        }
        let k = self.ncols;
        // R^{-1}, upper triangular, by column back-substitution.
        let mut rinv = DMatrix::<f64>::zeros(k, k);
        for c in 0..k {
            rinv[(c, c)] = 1.0 / self.rdiag[c];
            for i in (0..c).rev() {
                let mut s = 0.0;
                for j in i + 1..=c {
                    s += self.r_entry(i, j) * rinv[(j, c)];
                }
                rinv[(i, c)] = -s / self.rdiag[i];
            }
        }
        let mut out = DMatrix::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                let start = i.max(j);
                let s: f64 = (start..k).map(|m| rinv[(i, m)] * rinv[(j, m)]).sum();
                out[(self.perm[i], self.perm[j])] = s;
            }
        }
        Ok(out)
    }
}

/// Upper-triangular factor of an unpivoted Householder QR of a column-major
/// `nrows x ncols` buffer, returned column-major with `min(nrows, ncols)` rows.
///
/// For any column subset `S`, `R[:, S]` has the same Gram matrix as `X[:, S]`,
/// so least-squares problems over column subsets can be solved on `R` alone.
pub fn triangular_factor(nrows: usize, ncols: usize, mut a: Vec<f64>) -> Vec<f64> {
    debug_assert_eq!(a.len(), nrows * ncols);
    let steps = nrows.min(ncols);
    let mut diag = vec![0.0; steps];
    for j in 0..steps {
        let col = &mut a[j * nrows + j..(j + 1) * nrows];
        let norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if col[0] >= 0.0 { -norm } else { norm };
        col[0] -= alpha;
        let vv: f64 = col.iter().map(|v| v * v).sum();
        diag[j] = alpha;
        let (head, tail) = a.split_at_mut((j + 1) * nrows);
        let v = &head[j * nrows + j..(j + 1) * nrows];
        for c in 0..ncols - j - 1 {
            let target = &mut tail[c * nrows + j..(c + 1) * nrows];
            let dot: f64 = v.iter().zip(target.iter()).map(|(a, b)| a * b).sum();
            let s = 2.0 * dot / vv;
            for (t, vi) in target.iter_mut().zip(v) {
                *t -= s * vi;
            }
        }
    }
    let mut r = vec![0.0; steps * ncols];
    for c in 0..ncols {
        for i in 0..steps.min(c + 1) {
            r[c * steps + i] = if i == c { diag[i] } else { a[c * nrows + i] };
        }
    }
    r
}

/// Pivoted QR of `X`, exactly as given.
pub fn qr_factorize(x: &DesignMatrix) -> Result<QrFactorization> {
    if x.nrows() < x.ncols() {
        return Err(Error::InsufficientData {
            n: x.nrows(),
            params: x.ncols(),
        });
    }
    Ok(QrFactorization::from_column_major(
        x.nrows(),
        x.ncols(),
        x.values().as_slice().to_vec(),
    ))
}

/// QR of the column-normalized matrix `X D^{-1}`, where `D` holds the column
/// norms. All-zero columns keep a unit scale and surface as rank loss.
#[derive(Debug, Clone)]
pub struct EquilibratedQr {
    qr: QrFactorization,
    scales: Vec<f64>,
}

impl EquilibratedQr {
    pub fn new(nrows: usize, ncols: usize, mut data: Vec<f64>) -> Self {
        let mut scales = Vec::with_capacity(ncols);
        for col in data.chunks_mut(nrows) {
            let norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
            let s = if norm > 0.0 { norm } else { 1.0 };
            for v in col.iter_mut() {
                *v /= s;
            }
            scales.push(s);
        }
        Self {
            qr: QrFactorization::from_column_major(nrows, ncols, data),
            scales,
        }
    }

    pub fn qr(&self) -> &QrFactorization {
        &self.qr
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn rank(&self) -> usize {
        self.qr.rank()
    }

    pub fn is_full_rank(&self) -> bool {
        self.qr.is_full_rank()
    }

    pub fn solve(&self, y: &[f64]) -> Result<Vec<f64>> {
        let mut b = self.qr.solve(y)?;
        for (bj, s) in b.iter_mut().zip(&self.scales) {
            *bj /= s;
        }
        Ok(b)
    }

    /// `(X^T X)^{-1}` of the unscaled matrix.
    pub fn inverse_gram(&self) -> Result<DMatrix<f64>> {
        let mut c = self.qr.inverse_gram()?;
        let k = c.ncols();
        for i in 0..k {
            for j in 0..k {
                c[(i, j)] /= self.scales[i] * self.scales[j];
            }
        }
        Ok(c)
    }

    /// Diagonal of `(X_s^T X_s)^{-1}` for the unit-norm columns `X_s`. For
    /// centered columns these are the variance inflation factors.
    pub fn scaled_inverse_gram_diagonal(&self) -> Result<Vec<f64>> {
        let c = self.qr.inverse_gram()?;
        Ok((0..c.ncols()).map(|j| c[(j, j)]).collect())
    }
}

/// Minimizes `||y - X b||^2`. Requires `N > k` and full column rank.
pub fn solve_least_squares(x: &DesignMatrix, y: &[f64]) -> Result<LstSqSolution> {
    let (n, k) = (x.nrows(), x.ncols());
    if y.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: y.len(),
        });
    }
    if let Some(i) = y.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { row: i, col: k });
    }
    if n <= k {
        return Err(Error::InsufficientData { n, params: k });
    }
    let eq = EquilibratedQr::new(n, k, x.values().as_slice().to_vec());
    let coefficients = eq.solve(y)?;
    let fitted = x.values() * nalgebra::DVector::from_column_slice(&coefficients);
    let residual_sum_squares = y
        .iter()
        .zip(fitted.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(LstSqSolution {
        coefficients,
        rank: eq.rank(),
        residual_sum_squares,
    })
}
