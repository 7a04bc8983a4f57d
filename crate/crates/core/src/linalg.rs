//! Small dense helpers shared across modules: numerical rank, symmetric
//! vectorization, null vectors, least squares and combination ranking.

use nalgebra::{DMatrix, DVector};

/// Safety factor applied to `max(rows, cols) * eps` in the rank threshold.
const RANK_SAFETY: f64 = 100.0;

/// Singular values above `σ_max · max(rows, cols) · ε · 100` are counted.
pub fn numerical_rank(m: &DMatrix<f64>) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.singular_values();
    let smax = sv.max();
    if smax == 0.0 {
        return 0;
    }
    let thr = smax * m.nrows().max(m.ncols()) as f64 * f64::EPSILON * RANK_SAFETY;
    sv.iter().filter(|&&s| s > thr).count()
}

/// Length of the vectorized upper triangle of an `n × n` symmetric matrix.
pub fn svec_len(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Upper triangle, row by row, off-diagonals scaled by √2 so that the
/// Euclidean inner product equals the Hilbert–Schmidt one.
pub fn svec(sym: &DMatrix<f64>) -> Vec<f64> {
    let n = sym.nrows();
    let mut out = Vec::with_capacity(svec_len(n));
    for i in 0..n {
        out.push(sym[(i, i)]);
        for j in i + 1..n {
            out.push(std::f64::consts::SQRT_2 * sym[(i, j)]);
        }
    }
    out
}

/// `svec(x xᵀ)` without forming the matrix.
pub fn outer_svec(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut out = Vec::with_capacity(svec_len(n));
    for i in 0..n {
        out.push(x[i] * x[i]);
        for j in i + 1..n {
            out.push(std::f64::consts::SQRT_2 * x[i] * x[j]);
        }
    }
    out
}

/// Builds a matrix whose columns are the given vectors (all of length `rows`).
pub fn from_columns(rows: usize, cols: &[Vec<f64>]) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols.len(), |i, j| cols[j][i])
}

/// Right singular vector for the smallest singular value of `a`, together
/// with that singular value. Wide matrices are padded with zero rows so the
/// full right basis is available.
pub fn null_vector(a: &DMatrix<f64>) -> Option<(DVector<f64>, f64)> {
    let cols = a.ncols();
    if cols == 0 {
        return None;
    }
    let rows = a.nrows().max(cols);
    let mut padded = DMatrix::zeros(rows, cols);
    padded.view_mut((0, 0), (a.nrows(), cols)).copy_from(a);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t?;
    let (idx, &smin) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))?;
    Some((v_t.row(idx).transpose(), smin))
}

/// Minimum-norm least-squares solution of `a x = b`.
pub fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let eps = smax * a.nrows().max(a.ncols()) as f64 * f64::EPSILON * RANK_SAFETY;
    svd.solve(b, eps).ok()
}

/// Binomial coefficient, saturating at `u64::MAX`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// The `rank`-th `k`-subset of `0..n` in lexicographic order.
pub fn unrank_combination(mut rank: u64, n: usize, k: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut next = 0;
    for remaining in (1..=k).rev() {
        let mut c = next;
        loop {
            let count = binomial(n - c - 1, remaining - 1);
            if rank < count {
                break;
            }
            rank -= count;
            c += 1;
        }
        out.push(c);
        next = c + 1;
    }
    out
}

/// Frobenius norm of `a - λ·I`.
pub fn distance_to_scaled_identity(a: &DMatrix<f64>, lambda: f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            let target = if i == j { lambda } else { 0.0 };
            let diff = a[(i, j)] - target;
            acc += diff * diff;
        }
    }
    acc.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_rank_one_outer_product() {
        let x = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        assert_eq!(numerical_rank(&(&x * x.transpose())), 1);
        assert_eq!(numerical_rank(&DMatrix::<f64>::zeros(3, 2)), 0);
    }

    #[test]
    fn svec_preserves_hilbert_schmidt_products() {
        let a = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 5.0, 3.0, 5.0, 6.0]);
        let b = DMatrix::from_row_slice(3, 3, &[0.5, -1.0, 0.0, -1.0, 2.0, 1.5, 0.0, 1.5, -3.0]);
        let hs = (&a * &b).trace();
        let dot: f64 = svec(&a).iter().zip(svec(&b)).map(|(x, y)| x * y).sum();
        assert!((hs - dot).abs() < 1e-12);
        let x = [1.0, -2.0, 0.5];
        let xx = DMatrix::from_fn(3, 3, |i, j| x[i] * x[j]);
        assert_eq!(svec(&xx), outer_svec(&x));
    }

    #[test]
    fn combination_unranking_is_lexicographic() {
        let all: Vec<_> = (0..binomial(5, 3))
            .map(|r| unrank_combination(r, 5, 3))
            .collect();
        assert_eq!(all.len(), 10);
        assert_eq!(all[0], vec![0, 1, 2]);
        assert_eq!(all[1], vec![0, 1, 3]);
        assert_eq!(all[9], vec![2, 3, 4]);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(binomial(60, 30), 118264581564861424);
    }

    #[test]
    fn null_vector_of_wide_matrix() {
        let a = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
        let (v, s) = null_vector(&a).unwrap();
        assert!(s < 1e-14);
        assert!((v[0] + v[1]).abs() < 1e-14);
    }
}
