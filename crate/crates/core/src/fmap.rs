//! The quadratic map `F: R^N -> R^d`, `d = (N-1)(N+2)/2`.
//!
//! `F(x)` stacks `F₀(x) = (x₁²-x₂², …, x₁²-x_N²)` followed by the blocks
//! `F_k(x) = (x_k x_{k+1}, …, x_k x_N)` for `k = 1, …, N-1`. A nonnegative
//! `u` solves `F(Φ)u = 0` exactly when `Φ diag(u) Φᵀ` is a multiple of the
//! identity. The dual side pairs `F(x)` with trace-zero quadratic forms:
//! `⟨F(x), a⟩ = ⟨Q_a x, x⟩`.

use nalgebra::DMatrix;

use crate::error::{FrameError, Result};
use crate::frame::Frame;
use crate::linalg::{from_columns, numerical_rank, outer_svec, svec_len};

/// Target dimension `(N-1)(N+2)/2`.
pub fn image_dim(n: usize) -> usize {
    (n - 1) * (n + 2) / 2
}

/// 0-based position in `F(x)` of the product `x_k x_l` (0-based `k < l`).
///
/// Mirrors the 1-based layout `k(N - (k+1)/2) + l - 1` written as
/// `k(2N - k - 1)/2 + l - 1`, which is always an integer.
pub fn product_index(n: usize, k: usize, l: usize) -> usize {
    debug_assert!(k < l && l < n);
    let (k1, l1) = (k + 1, l + 1);
    k1 * (2 * n - k1 - 1) / 2 + l1 - 1 - 1
}

/// Evaluates `F(x)`.
pub fn f_vector(x: &[f64]) -> Result<Vec<f64>> {
    let n = x.len();
    if n < 2 {
        return Err(FrameError::DimensionTooSmall(n));
    }
    let mut out = Vec::with_capacity(image_dim(n));
    let x1 = x[0] * x[0];
    out.extend(x[1..].iter().map(|&xl| x1 - xl * xl));
    for k in 0..n - 1 {
        out.extend(x[k + 1..].iter().map(|&xl| x[k] * xl));
    }
    Ok(out)
}

/// The `d × M` matrix `F(Φ)` whose `k`-th column is `F(φ_k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FImage {
    n: usize,
    matrix: DMatrix<f64>,
}

impl FImage {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn len(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn column(&self, k: usize) -> Vec<f64> {
        self.matrix.column(k).iter().copied().collect()
    }

    /// Columns for `subset`, as plain vectors.
    pub fn columns(&self, subset: &[usize]) -> Result<Vec<Vec<f64>>> {
        subset
            .iter()
            .map(|&k| {
                if k >= self.len() {
                    Err(FrameError::IndexOutOfRange {
                        index: k,
                        len: self.len(),
                    })
                } else {
                    Ok(self.column(k))
                }
            })
            .collect()
    }

    pub fn is_zero_column(&self, k: usize) -> bool {
        self.matrix.column(k).iter().all(|&x| x == 0.0)
    }
}

pub fn f_image(frame: &Frame) -> Result<FImage> {
    let n = frame.dim();
    if n < 2 {
        return Err(FrameError::DimensionTooSmall(n));
    }
    let cols = frame
        .vectors()
        .iter()
        .map(|v| f_vector(v))
        .collect::<Result<Vec<_>>>()?;
    Ok(FImage {
        n,
        matrix: from_columns(image_dim(n), &cols),
    })
}

/// The rank-one outer products `φ_k φ_kᵀ` with the dimensions of their
/// linear and affine hulls.
#[derive(Clone, Debug)]
pub struct OuterProductSet {
    pub projections: Vec<DMatrix<f64>>,
    pub linear_dim: usize,
    pub affine_dim: usize,
}

/// `M × N(N+1)/2` matrix with `svec(φ_k φ_kᵀ)` as row `k`.
pub fn outer_svec_rows(vectors: &[Vec<f64>], n: usize) -> DMatrix<f64> {
    let rows: Vec<Vec<f64>> = vectors.iter().map(|v| outer_svec(v)).collect();
    DMatrix::from_fn(rows.len(), svec_len(n), |i, j| rows[i][j])
}

/// Linear dimension of `span{x xᵀ : x ∈ vectors}`.
pub fn outer_span_dim(vectors: &[Vec<f64>], n: usize) -> usize {
    numerical_rank(&outer_svec_rows(vectors, n))
}

pub fn outer_dims(frame: &Frame) -> OuterProductSet {
    let n = frame.dim();
    let vectors = frame.vectors();
    let projections = vectors
        .iter()
        .map(|v| DMatrix::from_fn(n, n, |i, j| v[i] * v[j]))
        .collect();
    let rows = outer_svec_rows(&vectors, n);
    let linear_dim = numerical_rank(&rows);
    let affine_dim = if rows.nrows() <= 1 {
        0
    } else {
        let base = rows.row(0).clone_owned();
        let diffs = DMatrix::from_fn(rows.nrows() - 1, rows.ncols(), |i, j| {
            rows[(i + 1, j)] - base[j]
        });
        numerical_rank(&diffs)
    };
    OuterProductSet {
        projections,
        linear_dim,
        affine_dim,
    }
}

/// A trace-zero quadratic form `p(x) = ⟨Q x, x⟩` with coefficient vector `a ∈ R^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadForm {
    pub coeffs: Vec<f64>,
    pub matrix: DMatrix<f64>,
}

impl QuadForm {
    pub fn eval(&self, x: &[f64]) -> f64 {
        let n = self.matrix.nrows();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += self.matrix[(i, j)] * x[i] * x[j];
            }
        }
        acc
    }

    /// Trace accumulated as the lower diagonal first, then `Q(1,1)`. Since
    /// `Q(1,1)` is the negation of that same sum, the result is exactly zero.
    pub fn trace(&self) -> f64 {
        let n = self.matrix.nrows();
        let rest: f64 = (1..n).map(|l| self.matrix[(l, l)]).sum();
        rest + self.matrix[(0, 0)]
    }

    /// Spectral norm of `Q`.
    pub fn operator_norm(&self) -> f64 {
        nalgebra::SymmetricEigen::new(self.matrix.clone())
            .eigenvalues
            .iter()
            .fold(0.0f64, |a, &l| a.max(l.abs()))
    }
}

/// Builds the symmetric trace-zero matrix `Q_a` for `a ∈ R^d`:
/// `Q(1,1) = Σ_{k<N} a_k`, `Q(l,l) = -a_{l-1}` for `l >= 2`, and
/// `Q(k,l) = a_idx / 2` at the product positions.
pub fn q_matrix(n: usize, a: &[f64]) -> Result<QuadForm> {
    if n < 2 {
        return Err(FrameError::DimensionTooSmall(n));
    }
    let d = image_dim(n);
    if a.len() != d {
        return Err(FrameError::DimensionMismatch {
            expected: d,
            found: a.len(),
        });
    }
    let mut q = DMatrix::zeros(n, n);
    q[(0, 0)] = a[..n - 1].iter().sum();
    for l in 1..n {
        q[(l, l)] = -a[l - 1];
    }
    for k in 0..n - 1 {
        for l in k + 1..n {
            let v = 0.5 * a[product_index(n, k, l)];
            q[(k, l)] = v;
            q[(l, k)] = v;
        }
    }
    Ok(QuadForm {
        coeffs: a.to_vec(),
        matrix: q,
    })
}

/// Rank of `F(Φ)` in `R^d` and whether its columns span `R^d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FRank {
    pub rank: usize,
    pub d: usize,
    pub is_frame_for_rd: bool,
}

pub fn f_frame_rank(frame: &Frame) -> Result<FRank> {
    let fi = f_image(frame)?;
    Ok(f_rank_of(&fi))
}

pub fn f_rank_of(fi: &FImage) -> FRank {
    let rank = numerical_rank(fi.matrix());
    FRank {
        rank,
        d: fi.d(),
        is_frame_for_rd: rank == fi.d(),
    }
}
