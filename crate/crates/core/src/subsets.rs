//! m-scalability over subsets, Carathéodory support reduction, the
//! scalability index and orthogonal-subbasis detection.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{FrameError, Result};
use crate::feasibility::{decide, decide_all, sign_quick_reject, DecideOptions};
use crate::fmap::outer_svec_rows;
use crate::frame::{Frame, ScalingWeights};
use crate::linalg::{binomial, lstsq, null_vector, numerical_rank, svec, unrank_combination};
use crate::{ORTHOGONALITY_TOL, SUBSET_BUDGET};

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub decide: DecideOptions,
    /// Maximum number of subsets enumerated per query.
    pub budget: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            decide: DecideOptions::default(),
            budget: SUBSET_BUDGET,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum MScalability {
    /// `subset` has exactly `m` indices and `weights` verify on it.
    Scalable {
        subset: Vec<usize>,
        weights: ScalingWeights,
    },
    NotScalable,
    /// The enumeration budget ran out before any rule settled the query.
    Unknown {
        subsets: u64,
        budget: u64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubsetVerdict {
    pub m: usize,
    pub strict: bool,
    pub outcome: MScalability,
}

impl SubsetVerdict {
    pub fn is_scalable(&self) -> Option<bool> {
        match self.outcome {
            MScalability::Scalable { .. } => Some(true),
            MScalability::NotScalable => Some(false),
            MScalability::Unknown { .. } => None,
        }
    }
}

fn nearly_orthogonal(frame: &Frame, i: usize, j: usize) -> bool {
    let m = frame.matrix();
    let ip = m.column(i).dot(&m.column(j));
    ip.abs() <= ORTHOGONALITY_TOL * m.column(i).norm() * m.column(j).norm()
}

/// Finds `N` distinct, nonzero, pairwise orthogonal columns (lexicographically
/// first such index set).
pub fn orthogonal_subbasis(frame: &Frame) -> Option<Vec<usize>> {
    let n = frame.dim();
    let cand: Vec<usize> = (0..frame.len())
        .filter(|&k| !frame.is_zero_column(k))
        .collect();

    fn extend(frame: &Frame, cand: &[usize], start: usize, n: usize, acc: &mut Vec<usize>) -> bool {
        if acc.len() == n {
            return true;
        }
        for pos in start..cand.len() {
            if cand.len() - pos < n - acc.len() {
                break;
            }
            let k = cand[pos];
            if acc.iter().all(|&j| nearly_orthogonal(frame, j, k)) {
                acc.push(k);
                if extend(frame, cand, pos + 1, n, acc) {
                    return true;
                }
                acc.pop();
            }
        }
        false
    }

    let mut acc = Vec::with_capacity(n);
    extend(frame, &cand, 0, n, &mut acc).then_some(acc)
}

/// Weights `1/|φ_k|²` on an orthogonal subbasis.
fn orthogonal_weights(frame: &Frame, basis: &[usize], tol: f64) -> Result<ScalingWeights> {
    let mut u = vec![0.0; frame.len()];
    for &k in basis {
        if !frame.is_zero_column(k) {
            u[k] = 1.0 / frame.norm_squared(k);
        }
    }
    ScalingWeights::new(frame, &u, tol)
}

/// Pads `support` with the smallest unused indices up to size `m`.
fn pad_subset(support: &[usize], m: usize, len: usize) -> Vec<usize> {
    let mut out = support.to_vec();
    for k in 0..len {
        if out.len() >= m {
            break;
        }
        if !out.contains(&k) {
            out.push(k);
        }
    }
    out.sort_unstable();
    out
}

/// Verified weights when `Φ_subset` is scalable.
fn scalable_weights(
    frame: &Frame,
    subset: &[usize],
    opts: &DecideOptions,
) -> Result<Option<ScalingWeights>> {
    match decide(frame, subset, opts) {
        Ok(v) => Ok(v.weights().filter(|_| v.scalable).cloned()),
        Err(FrameError::EmptySubset) => Ok(None),
        Err(e) => Err(e),
    }
}

/// First `m`-subset of `pool` (lexicographic) that passes `accept`.
fn search<T: Send>(
    pool: &[usize],
    m: usize,
    accept: impl Fn(&[usize]) -> Result<Option<T>> + Sync,
) -> Result<Option<(Vec<usize>, T)>> {
    let count = binomial(pool.len(), m);
    let found = (0..count).into_par_iter().find_map_first(|rank| {
        let subset: Vec<usize> = unrank_combination(rank, pool.len(), m)
            .into_iter()
            .map(|i| pool[i])
            .collect();
        match accept(&subset) {
            Ok(Some(v)) => Some(Ok((subset, v))),
            Ok(None) => None,
            Err(e) => Some(Err(e)),
        }
    });
    found.transpose()
}

/// Is some `m`-subset of the frame scalable (strictly scalable when `strict`)?
pub fn is_m_scalable(
    frame: &Frame,
    m: usize,
    strict: bool,
    opts: &SearchOptions,
) -> Result<SubsetVerdict> {
    let (n, len) = (frame.dim(), frame.len());
    if m < n || m > len {
        return Err(FrameError::InvalidInput(format!(
            "need N <= m <= M, got m = {m}"
        )));
    }
    let verdict = |outcome| Ok(SubsetVerdict { m, strict, outcome });
    let tol = opts.decide.tol_tight;

    if m == n {
        return match orthogonal_subbasis(frame) {
            Some(basis) => {
                let weights = orthogonal_weights(frame, &basis, tol)?;
                verdict(MScalability::Scalable {
                    subset: basis,
                    weights,
                })
            }
            None => verdict(MScalability::NotScalable),
        };
    }
    if n == 1 {
        // In R^1 every set of nonzero vectors is tight after weighting by 1/φ².
        let pool: Vec<usize> = (0..len).filter(|&k| !frame.is_zero_column(k)).collect();
        let subset = if strict {
            if pool.len() < m {
                return verdict(MScalability::NotScalable);
            }
            pool[..m].to_vec()
        } else {
            pad_subset(&pool[..1], m, len)
        };
        let weights = orthogonal_weights(frame, &subset, tol)?;
        return verdict(MScalability::Scalable { subset, weights });
    }
    if sign_quick_reject(frame)?.is_some() {
        return verdict(MScalability::NotScalable);
    }
    let full = decide_all(frame, &opts.decide)?;
    if !full.scalable {
        return verdict(MScalability::NotScalable);
    }

    if !strict {
        let w = full.weights().expect("scalable verdict carries weights");
        let reduced = caratheodory_reduce(frame, w, tol)?;
        if reduced.support.len() <= m {
            let subset = pad_subset(&reduced.support, m, len);
            return verdict(MScalability::Scalable {
                subset,
                weights: reduced,
            });
        }
        let pool: Vec<usize> = (0..len).collect();
        let count = binomial(len, m);
        if count > opts.budget {
            return verdict(MScalability::Unknown {
                subsets: count,
                budget: opts.budget,
            });
        }
        let found = search(&pool, m, |s| scalable_weights(frame, s, &opts.decide))?;
        return verdict(match found {
            Some((subset, weights)) => MScalability::Scalable { subset, weights },
            None => MScalability::NotScalable,
        });
    }

    let pool: Vec<usize> = (0..len).filter(|&k| !frame.is_zero_column(k)).collect();
    if pool.len() < m {
        return verdict(MScalability::NotScalable);
    }
    let count = binomial(pool.len(), m);
    if count > opts.budget {
        return verdict(MScalability::Unknown {
            subsets: count,
            budget: opts.budget,
        });
    }
    let dopts = DecideOptions {
        prefer_balanced: true,
        ..opts.decide.clone()
    };
    let found = search(&pool, m, |s| {
        let v = decide(frame, s, &dopts)?;
        if !(v.scalable && v.strict) {
            return Ok(None);
        }
        Ok(v.weights().filter(|w| w.support.len() == s.len()).cloned())
    })?;
    verdict(match found {
        Some((subset, weights)) => MScalability::Scalable { subset, weights },
        None => MScalability::NotScalable,
    })
}

/// Shrinks the support of verified weights to at most `dim span X_Φ` vectors.
///
/// While the outer products on the support are linearly dependent,
/// `Σ λ_k φ_kφ_kᵀ = 0`, the weights move along `-λ` until one of them hits
/// zero. The weighted frame operator is unchanged at every step.
pub fn caratheodory_reduce(frame: &Frame, w: &ScalingWeights, tol: f64) -> Result<ScalingWeights> {
    let checked = ScalingWeights::new(frame, &w.u, tol)?;
    let n = frame.dim();
    let mut u = checked.u.clone();
    loop {
        let support: Vec<usize> = (0..u.len()).filter(|&k| u[k] > 0.0).collect();
        let vectors: Vec<Vec<f64>> = support.iter().map(|&k| frame.column(k)).collect();
        let a = outer_svec_rows(&vectors, n).transpose();
        let rank = numerical_rank(&a);
        if support.len() <= rank {
            break;
        }
        let (mut lambda, _) = null_vector(&a).ok_or(FrameError::NumericalStall(support.len()))?;
        if lambda.max() <= 0.0 {
            lambda = -lambda;
        }
        let (pos, theta) = support
            .iter()
            .enumerate()
            .filter(|(j, _)| lambda[*j] > 0.0)
            .map(|(j, &k)| (j, u[k] / lambda[j]))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .ok_or(FrameError::NumericalStall(support.len()))?;
        let scale = support.iter().map(|&k| u[k]).fold(0.0, f64::max);
        for (j, &k) in support.iter().enumerate() {
            let v = u[k] - theta * lambda[j];
            u[k] = if j == pos || v <= 1e-15 * scale {
                0.0
            } else {
                v
            };
        }
    }
    let u = polish_outer(frame, &u).unwrap_or(u);
    let reduced = ScalingWeights::new(frame, &u, tol)
        .map_err(|_| FrameError::NumericalStall(checked.support.len()))?;
    if reduced.support.len() > checked.support.len() {
        return Err(FrameError::NumericalStall(reduced.support.len()));
    }
    Ok(reduced)
}

/// Re-solves `Σ u_k svec(φ_kφ_kᵀ) = svec(I)` on the current support.
fn polish_outer(frame: &Frame, u: &[f64]) -> Option<Vec<f64>> {
    let n = frame.dim();
    let support: Vec<usize> = (0..u.len()).filter(|&k| u[k] > 0.0).collect();
    let vectors: Vec<Vec<f64>> = support.iter().map(|&k| frame.column(k)).collect();
    let a = outer_svec_rows(&vectors, n).transpose();
    let target = nalgebra::DVector::from_vec(svec(&nalgebra::DMatrix::identity(n, n)));
    let x = lstsq(&a, &target)?;
    if x.iter().any(|&v| v <= 0.0) {
        return None;
    }
    let mut out = vec![0.0; u.len()];
    for (&k, &v) in support.iter().zip(x.iter()) {
        out[k] = v;
    }
    Some(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ScalabilityIndex {
    NotScalable,
    /// The smallest `m` for which the frame is `m`-scalable.
    Exact {
        index: usize,
        subset: Vec<usize>,
        weights: ScalingWeights,
    },
    /// A verified upper bound; sizes `unknown_from..bound` were not settled.
    UpperBound {
        bound: usize,
        unknown_from: usize,
        subset: Vec<usize>,
        weights: ScalingWeights,
    },
}

impl ScalabilityIndex {
    pub fn value(&self) -> Option<usize> {
        match self {
            ScalabilityIndex::NotScalable => None,
            ScalabilityIndex::Exact { index, .. } => Some(*index),
            ScalabilityIndex::UpperBound { bound, .. } => Some(*bound),
        }
    }
}

/// Smallest `m` such that some `m` frame vectors are scalable.
pub fn scalability_index(frame: &Frame, opts: &SearchOptions) -> Result<ScalabilityIndex> {
    let n = frame.dim();
    let tol = opts.decide.tol_tight;
    if n >= 2 && sign_quick_reject(frame)?.is_some() {
        return Ok(ScalabilityIndex::NotScalable);
    }
    if let Some(basis) = orthogonal_subbasis(frame) {
        let weights = orthogonal_weights(frame, &basis, tol)?;
        return Ok(ScalabilityIndex::Exact {
            index: n,
            subset: basis,
            weights,
        });
    }
    let full = decide_all(frame, &opts.decide)?;
    if !full.scalable {
        return Ok(ScalabilityIndex::NotScalable);
    }
    let reduced = caratheodory_reduce(frame, full.weights().expect("weights"), tol)?;
    let bound = reduced.support.len();
    let pool: Vec<usize> = (0..frame.len())
        .filter(|&k| !frame.is_zero_column(k))
        .collect();
    for m in n + 1..bound {
        if binomial(pool.len(), m) > opts.budget {
            return Ok(ScalabilityIndex::UpperBound {
                bound,
                unknown_from: m,
                subset: reduced.support.clone(),
                weights: reduced,
            });
        }
        let found = search(&pool, m, |s| scalable_weights(frame, s, &opts.decide))?;
        if let Some((subset, weights)) = found {
            return Ok(ScalabilityIndex::Exact {
                index: m,
                subset,
                weights,
            });
        }
    }
    Ok(ScalabilityIndex::Exact {
        index: bound,
        subset: reduced.support.clone(),
        weights: reduced,
    })
}
