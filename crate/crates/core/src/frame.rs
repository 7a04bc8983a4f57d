//! Frames as `N × M` synthesis matrices, their bounds, tightness and
//! scaling weights.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{FrameError, Result};
use crate::linalg::{distance_to_scaled_identity, numerical_rank};

/// Tolerance on `|TᵀT - I|_F` accepted by [`Frame::apply_orthogonal`].
const ORTHOGONAL_TOL: f64 = 1e-9;

/// A finite frame for `R^N`. Column `k` of the matrix is the frame vector `φ_k`.
///
/// Frames are immutable; every transform returns a new value. Column order is
/// significant.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    matrix: DMatrix<f64>,
    rank: usize,
    degenerate: bool,
}

/// Optimal lower and upper frame bounds: the extreme eigenvalues of `ΦΦᵀ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
}

impl FrameBounds {
    /// Condition number of the analysis operator `Φᵀ`, i.e. `sqrt(B/A)`.
    pub fn condition_number(&self) -> f64 {
        (self.upper / self.lower).sqrt()
    }
}

/// Outcome of a tightness check. `residual` is `|ΦΦᵀ - αI|_F` with
/// `α = Tr(ΦΦᵀ)/N`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tightness {
    pub tight: bool,
    pub residual: f64,
    pub constant: f64,
}

impl Frame {
    /// Builds a frame from `vectors`, each of length `n`.
    pub fn new(n: usize, vectors: &[Vec<f64>]) -> Result<Self> {
        if n == 0 {
            return Err(FrameError::InvalidInput(
                "dimension must be at least 1".into(),
            ));
        }
        for v in vectors {
            if v.len() != n {
                return Err(FrameError::DimensionMismatch {
                    expected: n,
                    found: v.len(),
                });
            }
        }
        if vectors.iter().flatten().any(|x| !x.is_finite()) {
            return Err(FrameError::InvalidInput(
                "frame entries must be finite".into(),
            ));
        }
        Self::from_matrix(DMatrix::from_fn(n, vectors.len(), |i, j| vectors[j][i]))
    }

    /// Wraps an `N × M` synthesis matrix.
    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        let n = matrix.nrows();
        if n == 0 {
            return Err(FrameError::InvalidInput(
                "dimension must be at least 1".into(),
            ));
        }
        let rank = numerical_rank(&matrix);
        if rank < n {
            return Err(FrameError::NotAFrame { rank, n });
        }
        let degenerate = matrix.column_iter().any(|c| c.iter().all(|&x| x == 0.0));
        Ok(Self {
            matrix,
            rank,
            degenerate,
        })
    }

    /// Dimension `N` of the ambient space.
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Number `M` of frame vectors.
    pub fn len(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// True iff some frame vector is the zero vector.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn column(&self, k: usize) -> Vec<f64> {
        self.matrix.column(k).iter().copied().collect()
    }

    pub fn vectors(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|k| self.column(k)).collect()
    }

    pub fn is_zero_column(&self, k: usize) -> bool {
        self.matrix.column(k).iter().all(|&x| x == 0.0)
    }

    pub fn norm_squared(&self, k: usize) -> f64 {
        self.matrix.column(k).norm_squared()
    }

    /// The frame operator `ΦΦᵀ`.
    pub fn frame_operator(&self) -> DMatrix<f64> {
        &self.matrix * self.matrix.transpose()
    }

    /// `Φ diag(u) Φᵀ`.
    pub fn weighted_operator(&self, u: &[f64]) -> DMatrix<f64> {
        let scaled = DMatrix::from_fn(self.dim(), self.len(), |i, j| self.matrix[(i, j)] * u[j]);
        scaled * self.matrix.transpose()
    }

    pub fn bounds(&self) -> FrameBounds {
        let eig = SymmetricEigen::new(self.frame_operator());
        FrameBounds {
            lower: eig.eigenvalues.min(),
            upper: eig.eigenvalues.max(),
        }
    }

    /// Checks `|ΦΦᵀ - αI|_F <= tol·α` with `α = Tr(ΦΦᵀ)/N`.
    pub fn tightness(&self, tol: f64) -> Tightness {
        let op = self.frame_operator();
        let constant = op.trace() / self.dim() as f64;
        let residual = distance_to_scaled_identity(&op, constant);
        Tightness {
            tight: residual <= tol * constant,
            residual,
            constant,
        }
    }

    pub fn is_tight(&self, tol: f64) -> bool {
        self.tightness(tol).tight
    }

    /// Returns the frame `{T φ_k}` for an orthogonal `T`.
    pub fn apply_orthogonal(&self, t: &DMatrix<f64>) -> Result<Frame> {
        let n = self.dim();
        if t.nrows() != n || t.ncols() != n {
            return Err(FrameError::DimensionMismatch {
                expected: n,
                found: t.nrows(),
            });
        }
        let deviation = distance_to_scaled_identity(&(t.transpose() * t), 1.0);
        if deviation > ORTHOGONAL_TOL {
            return Err(FrameError::NotOrthogonal { deviation });
        }
        Frame::from_matrix(t * &self.matrix)
    }

    /// Returns `{c_k φ_k}`. Fails when the scaled system no longer spans.
    pub fn scaled(&self, c: &[f64]) -> Result<Frame> {
        if c.len() != self.len() {
            return Err(FrameError::DimensionMismatch {
                expected: self.len(),
                found: c.len(),
            });
        }
        Frame::from_matrix(DMatrix::from_fn(self.dim(), self.len(), |i, j| {
            self.matrix[(i, j)] * c[j]
        }))
    }

    /// Columns selected by `subset`, in the given order, as a raw matrix.
    pub fn select(&self, subset: &[usize]) -> Result<DMatrix<f64>> {
        for &k in subset {
            if k >= self.len() {
                return Err(FrameError::IndexOutOfRange {
                    index: k,
                    len: self.len(),
                });
            }
        }
        Ok(self.matrix.select_columns(subset))
    }

    /// Returns the frame with column `k` replaced by `v`.
    pub fn with_column(&self, k: usize, v: &DVector<f64>) -> Result<Frame> {
        let mut m = self.matrix.clone();
        m.set_column(k, v);
        Frame::from_matrix(m)
    }

    /// Reference unit-norm frames used throughout tests and the CLI fixtures.
    pub fn mercedes_benz() -> Frame {
        let s = 3f64.sqrt() / 2.0;
        Frame::new(2, &[vec![0.0, 1.0], vec![-s, -0.5], vec![s, -0.5]])
            .expect("Mercedes-Benz frame spans R^2")
    }
}

/// Nonnegative weights `u_k = c_k²` normalized to the unit simplex with
/// `Φ diag(u) Φᵀ = α·I`.
///
/// Values of this type have been checked against their frame: constructing
/// one through [`ScalingWeights::new`] verifies the tightness residual.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingWeights {
    pub u: Vec<f64>,
    pub tight_constant: f64,
    pub support: Vec<usize>,
    pub residual: f64,
}

impl ScalingWeights {
    /// Normalizes `raw` to sum one and verifies it against `frame` at
    /// relative tolerance `tol`. Entries in `[-1e-12·max, 0)` are clamped.
    pub fn new(frame: &Frame, raw: &[f64], tol: f64) -> Result<Self> {
        if raw.len() != frame.len() {
            return Err(FrameError::DimensionMismatch {
                expected: frame.len(),
                found: raw.len(),
            });
        }
        let scale = raw.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
        if scale == 0.0 || !scale.is_finite() {
            return Err(FrameError::WeightsDoNotVerify("weights vanish".into()));
        }
        let mut u = Vec::with_capacity(raw.len());
        for &x in raw {
            if x < -1e-12 * scale {
                return Err(FrameError::WeightsDoNotVerify(format!(
                    "negative weight {x:e}"
                )));
            }
            u.push(x.max(0.0));
        }
        let total: f64 = u.iter().sum();
        u.iter_mut().for_each(|x| *x /= total);
        let tight_constant = u
            .iter()
            .enumerate()
            .map(|(k, &w)| w * frame.norm_squared(k))
            .sum::<f64>()
            / frame.dim() as f64;
        if tight_constant <= 0.0 {
            return Err(FrameError::WeightsDoNotVerify(
                "weights live on zero vectors".into(),
            ));
        }
        let residual = distance_to_scaled_identity(&frame.weighted_operator(&u), tight_constant);
        if residual > tol * tight_constant {
            return Err(FrameError::WeightsDoNotVerify(format!(
                "residual {residual:e} exceeds {:e}",
                tol * tight_constant
            )));
        }
        let support = (0..u.len()).filter(|&k| u[k] > 0.0).collect();
        Ok(Self {
            u,
            tight_constant,
            support,
            residual,
        })
    }

    /// Scaling coefficients `c_k = sqrt(u_k)`, or `sqrt(u_k/α)` for a Parseval result.
    pub fn coefficients(&self, parseval: bool) -> Vec<f64> {
        let div = if parseval { self.tight_constant } else { 1.0 };
        self.u.iter().map(|&w| (w / div).sqrt()).collect()
    }

    /// Minimum weight over all indices (zero unless every weight is positive).
    pub fn min_weight(&self) -> f64 {
        self.u.iter().copied().fold(f64::INFINITY, f64::min)
    }
}
