//! Random frames and probes of the set of scalable frames: generic dimension
//! of the outer-product span, explicit non-scalable perturbations of scalable
//! frames, and a stability radius around non-scalable ones.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{FrameError, Hypothesis, Result};
use crate::feasibility::{decide_all, DecideOptions, Mode};
use crate::fmap::{f_vector, outer_dims, outer_svec_rows, q_matrix};
use crate::frame::Frame;
use crate::linalg::{numerical_rank, svec, svec_len};
use crate::EXACT_BUDGET;

/// Attempts at drawing a direction outside the outer-product span.
const DIRECTION_ATTEMPTS: usize = 100;
/// Halvings of `δ` before giving up.
const MAX_HALVINGS: usize = 60;

fn gaussian_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Independent child seed for trial `i` of a probe seeded with `seed`.
fn trial_seed(seed: u64, i: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i as u64);
    rng.random()
}

/// `n × m` frame with i.i.d. standard normal entries, redrawn until it spans.
pub fn random_frame(n: usize, m: usize, seed: u64) -> Result<Frame> {
    if n == 0 {
        return Err(FrameError::InvalidInput(
            "dimension must be at least 1".into(),
        ));
    }
    if m < n {
        return Err(FrameError::NotAFrame { rank: m, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        match Frame::from_matrix(gaussian_matrix(n, m, &mut rng)) {
            Ok(f) => return Ok(f),
            Err(FrameError::NotAFrame { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
}

/// Uniformly distributed unit vector in `R^n`.
pub fn random_unit_vector(n: usize, rng: &mut ChaCha8Rng) -> DVector<f64> {
    loop {
        let v = DVector::<f64>::from_fn(n, |_, _| rng.sample(StandardNormal));
        let norm = v.norm();
        if norm > 1e-8 {
            return v / norm;
        }
    }
}

/// Haar-distributed orthogonal `n × n` matrix (QR of a Gaussian matrix with
/// the sign of `R`'s diagonal folded into `Q`).
pub fn random_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    loop {
        let qr = gaussian_matrix(n, n, rng).qr();
        let r = qr.r();
        if (0..n).any(|i| r[(i, i)].abs() < 1e-10) {
            continue;
        }
        let mut q = qr.q();
        for j in 0..n {
            if r[(j, j)] < 0.0 {
                q.column_mut(j).neg_mut();
            }
        }
        return q;
    }
}

/// Outcome of [`generic_dimension_probe`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionProbe {
    pub n: usize,
    pub m: usize,
    pub trials: usize,
    /// `min(m, n(n+1)/2)`.
    pub target: usize,
    pub fraction: f64,
    /// Seeds of the trials that fell short of `target`.
    pub failures: Vec<u64>,
}

/// Samples `trials` random frames and reports how often `dim span X_Φ`
/// reaches its maximum `min(m, n(n+1)/2)`.
pub fn generic_dimension_probe(
    n: usize,
    m: usize,
    trials: usize,
    seed: u64,
) -> Result<DimensionProbe> {
    if trials == 0 {
        return Err(FrameError::InvalidInput("trials must be at least 1".into()));
    }
    if m < n {
        return Err(FrameError::NotAFrame { rank: m, n });
    }
    let target = m.min(svec_len(n));
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|i| {
            let s = trial_seed(seed, i);
            let f = random_frame(n, m, s)?;
            Ok((s, outer_dims(&f).linear_dim == target))
        })
        .collect::<Result<Vec<_>>>()?;
    let failures: Vec<u64> = outcomes
        .iter()
        .filter(|(_, ok)| !ok)
        .map(|(s, _)| *s)
        .collect();
    Ok(DimensionProbe {
        n,
        m,
        trials,
        target,
        fraction: (trials - failures.len()) as f64 / trials as f64,
        failures,
    })
}

/// A non-scalable frame within `ε` of a scalable one, obtained by moving a
/// single positively weighted vector `φ_j` to `φ_j + δφ₀`.
#[derive(Clone, Debug)]
pub struct PerturbationWitness {
    pub base: Frame,
    /// Index `j` of the perturbed column.
    pub column: usize,
    /// Unit vector `φ₀` with `φ₀φ₀ᵀ ∉ span X_Φ`.
    pub direction: DVector<f64>,
    pub delta: f64,
    pub perturbed: Frame,
    /// `S_δ = δ(φ_jφ₀ᵀ + φ₀φ_jᵀ) + δ²φ₀φ₀ᵀ`, the change in `φ_jφ_jᵀ`.
    pub s_matrix: DMatrix<f64>,
    /// `‖perturbed − base‖_F`.
    pub distance: f64,
    /// Separator margin certifying that `perturbed` is not scalable.
    pub margin: f64,
    pub separator: Vec<f64>,
}

/// True iff appending `extra` to the rows of `x` raises the rank.
fn leaves_span(x: &DMatrix<f64>, base_rank: usize, extra: &[f64]) -> bool {
    let mut stacked = x.clone().insert_row(x.nrows(), 0.0);
    for (j, &v) in extra.iter().enumerate() {
        stacked[(x.nrows(), j)] = v;
    }
    numerical_rank(&stacked) > base_rank
}

/// Builds a [`PerturbationWitness`] for a scalable frame with `M < N(N+1)/2`
/// and linearly independent outer products.
pub fn nonscalable_witness(
    f: &Frame,
    epsilon: f64,
    seed: u64,
    opts: &DecideOptions,
) -> Result<PerturbationWitness> {
    let (n, m) = (f.dim(), f.len());
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(FrameError::InvalidInput(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    if n < 2 {
        return Err(FrameError::HypothesisViolated(Hypothesis::Dimension));
    }
    if m >= svec_len(n) {
        return Err(FrameError::HypothesisViolated(Hypothesis::Redundancy));
    }
    let dopts = DecideOptions {
        prefer_balanced: true,
        ..opts.clone()
    };
    let verdict = decide_all(f, &dopts)?;
    let weights = match verdict.weights() {
        Some(w) if verdict.scalable => w,
        _ => return Err(FrameError::HypothesisViolated(Hypothesis::Scalable)),
    };
    let x = outer_svec_rows(&f.vectors(), n);
    let base_rank = numerical_rank(&x);
    if base_rank != m {
        return Err(FrameError::HypothesisViolated(
            Hypothesis::IndependentOuterProducts,
        ));
    }
    let j = weights
        .u
        .iter()
        .position(|&w| w > opts.strict_threshold)
        .ok_or(FrameError::HypothesisViolated(Hypothesis::Scalable))?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let direction = (0..DIRECTION_ATTEMPTS)
        .map(|_| random_unit_vector(n, &mut rng))
        .find(|phi0| leaves_span(&x, base_rank, &svec(&(phi0 * phi0.transpose()))))
        .ok_or_else(|| {
            FrameError::WitnessVerificationFailed(format!(
                "no direction outside the outer-product span in {DIRECTION_ATTEMPTS} draws"
            ))
        })?;

    let phi_j = f.matrix().column(j).clone_owned();
    let s_of = |delta: f64| {
        let cross = &phi_j * direction.transpose();
        (&cross + cross.transpose()) * delta + &direction * direction.transpose() * (delta * delta)
    };
    let mut delta = epsilon / (2.0 * direction.norm());
    let mut halvings = 0;
    while !leaves_span(&x, base_rank, &svec(&s_of(delta))) {
        halvings += 1;
        if halvings > MAX_HALVINGS {
            return Err(FrameError::WitnessVerificationFailed(
                "perturbation stays inside the outer-product span".into(),
            ));
        }
        delta /= 2.0;
    }

    let perturbed = f.with_column(j, &(&phi_j + &direction * delta))?;
    let distance = (perturbed.matrix() - f.matrix()).norm();
    let mut check = decide_all(&perturbed, opts)?;
    if check.scalable && opts.mode == Mode::Float && m <= EXACT_BUDGET {
        check = decide_all(
            &perturbed,
            &DecideOptions {
                mode: Mode::Exact,
                ..opts.clone()
            },
        )?;
    }
    let sep = match check.separator() {
        Some(s) if !check.scalable => s.clone(),
        _ => {
            return Err(FrameError::WitnessVerificationFailed(
                "perturbed frame reported scalable".into(),
            ))
        }
    };
    Ok(PerturbationWitness {
        base: f.clone(),
        column: j,
        s_matrix: s_of(delta),
        direction,
        delta,
        perturbed,
        distance,
        margin: sep.margin,
        separator: sep.h,
    })
}

/// Radius `r` such that moving every vector of `frame` by at most `r` keeps
/// `⟨F(ψ_k), h⟩ > 0` for all `k`, so the perturbed frame stays non-scalable.
///
/// With `Q = Q_h`, `⟨F(φ+e), h⟩ ≥ ⟨F(φ), h⟩ − ‖Q‖(2‖φ‖r + r²)`. Returns `0`
/// when `h` does not strictly separate every nonzero vector.
pub fn closedness_radius(frame: &Frame, h: &[f64]) -> Result<f64> {
    let q = q_matrix(frame.dim(), h)?;
    let qn = q.operator_norm();
    if qn == 0.0 {
        return Ok(0.0);
    }
    let mut radius = f64::INFINITY;
    for k in 0..frame.len() {
        let v = frame.column(k);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let t: f64 = f_vector(&v)?.iter().zip(h).map(|(a, b)| a * b).sum();
        if t <= 0.0 {
            return Ok(0.0);
        }
        radius = radius.min(-norm + (norm * norm + t / qn).sqrt());
    }
    Ok(radius)
}

/// Outcome of [`closedness_probe`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosednessProbe {
    pub radius: f64,
    pub samples: usize,
    pub non_scalable: usize,
}

/// Decides `samples` frames whose vectors are each moved by exactly `r/2`,
/// where `r` is the [`closedness_radius`] of a non-scalable `frame`.
pub fn closedness_probe(
    frame: &Frame,
    samples: usize,
    seed: u64,
    opts: &DecideOptions,
) -> Result<ClosednessProbe> {
    let verdict = decide_all(frame, opts)?;
    let sep = match verdict.separator() {
        Some(s) if !verdict.scalable => s.clone(),
        _ => return Err(FrameError::InvalidInput("frame is scalable".into())),
    };
    let radius = closedness_radius(frame, &sep.h)?;
    let (n, m) = (frame.dim(), frame.len());
    let outcomes = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, i));
            let mut mat = frame.matrix().clone();
            for k in 0..m {
                let e = random_unit_vector(n, &mut rng) * (radius / 2.0);
                let mut col = mat.column_mut(k);
                col += e;
            }
            match Frame::from_matrix(mat) {
                Ok(p) => Ok(!decide_all(&p, opts)?.scalable),
                Err(FrameError::NotAFrame { .. }) => Ok(true),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<bool>>>()?;
    Ok(ClosednessProbe {
        radius,
        samples,
        non_scalable: outcomes.iter().filter(|&&b| b).count(),
    })
}
