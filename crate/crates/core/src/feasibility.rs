//! The decision core.
//!
//! A subset `S` of a frame is scalable iff `0 ∈ co{F(φ_k) : k ∈ S}`. The
//! decision program is the separator LP
//!
//! ```text
//! maximize t  s.t.  ⟨F(φ_k), h⟩ >= t  (k ∈ S),  |h|∞ <= 1,  t >= 0
//! ```
//!
//! which is always feasible (`h = 0`). Its optimum `t*` equals
//! `min { |F u|₁ : u >= 0, Σu = 1 }`, so `t* > 0` certifies non-scalability
//! through `h`, and `t* = 0` hands over to the weight programs, which return
//! a basic feasible solution of `{F u = 0, Σu = 1, u >= 0}` and the max-min
//! weight `s*` that decides strictness.

use nalgebra::{DMatrix, DVector};
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{FrameError, Result};
use crate::exact::{exact_oracle, format_rational, to_f64, ExactVerdict, RationalFrame};
use crate::fmap::{f_image, image_dim, FImage};
use crate::frame::{Frame, ScalingWeights};
use crate::linalg::{from_columns, lstsq, numerical_rank, outer_svec, svec_len};
use crate::lp::{solve, LpOutcome, LpScalar, LpSolution, StandardLp};
use crate::{BOUNDARY_BAND, EXACT_BUDGET, STRICT_THRESHOLD, TOL_TIGHT};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Float,
    Exact,
}

#[derive(Clone, Debug)]
pub struct DecideOptions {
    pub mode: Mode,
    /// Relative tolerance for the weight certificate residual.
    pub tol_tight: f64,
    /// Half-width of the band around the decision boundary.
    pub band: f64,
    /// Minimum max-min weight that counts as strict.
    pub strict_threshold: f64,
    /// Re-decide boundary-band verdicts with the exact oracle when the subset fits.
    pub exact_fallback: bool,
    /// Return the max-min-weight solution instead of the basic one when strict.
    pub prefer_balanced: bool,
}

impl Default for DecideOptions {
    fn default() -> Self {
        Self {
            mode: Mode::Float,
            tol_tight: TOL_TIGHT,
            band: BOUNDARY_BAND,
            strict_threshold: STRICT_THRESHOLD,
            exact_fallback: true,
            prefer_balanced: false,
        }
    }
}

/// A vector `h` with `⟨F(φ_k), h⟩ >= margin · |h|∞ > 0` on the tested subset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Separator {
    pub h: Vec<f64>,
    pub margin: f64,
}

impl Separator {
    /// Recomputes the margin of `h` against the columns of `fi` in `subset`.
    pub fn margin_of(fi: &FImage, subset: &[usize], h: &[f64]) -> f64 {
        let scale = h.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        subset
            .iter()
            .map(|&k| {
                fi.matrix()
                    .column(k)
                    .iter()
                    .zip(h)
                    .map(|(a, b)| a * b)
                    .sum::<f64>()
            })
            .fold(f64::INFINITY, f64::min)
            / scale
    }

    /// Accepts `h` only when its recomputed margin is positive.
    pub fn verify(fi: &FImage, subset: &[usize], h: Vec<f64>) -> Result<Self> {
        let margin = Self::margin_of(fi, subset, &h);
        if margin > 0.0 {
            Ok(Self { h, margin })
        } else {
            Err(FrameError::SeparatorDoesNotVerify(margin))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Certificate {
    Weights(ScalingWeights),
    Separator(Separator),
}

/// Rational certificate data, serialized as `p/q` strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactCertificate {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub weights: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub separator: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub margin: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub min_weight: Option<String>,
}

impl ExactCertificate {
    fn from_verdict(ev: &ExactVerdict) -> Self {
        let fmt = |v: &[BigRational]| v.iter().map(format_rational).collect::<Vec<_>>();
        Self {
            weights: ev.weights.as_deref().map(fmt),
            separator: ev.separator.as_ref().map(|s| fmt(&s.h)),
            margin: ev.separator.as_ref().map(|s| format_rational(&s.margin)),
            min_weight: ev.min_weight.as_ref().map(format_rational),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    /// Nonzero columns of the requested subset; the programs run on these.
    pub subset: Vec<usize>,
    pub scalable: bool,
    pub strict: bool,
    /// The subset spans `R^N`.
    pub spans: bool,
    pub certificate: Certificate,
    /// Optimal separator margin `t*`.
    pub separator_value: f64,
    /// Max-min weight `s*` (scalable verdicts only).
    pub min_weight: Option<f64>,
    /// Rank of `F(Φ_subset)`.
    pub f_rank: usize,
    pub boundary_flag: bool,
    pub resolved_exactly: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub exact: Option<ExactCertificate>,
}

impl Verdict {
    pub fn weights(&self) -> Option<&ScalingWeights> {
        match &self.certificate {
            Certificate::Weights(w) => Some(w),
            Certificate::Separator(_) => None,
        }
    }

    pub fn separator(&self) -> Option<&Separator> {
        match &self.certificate {
            Certificate::Separator(s) => Some(s),
            Certificate::Weights(_) => None,
        }
    }

    /// Re-checks the certificate against `frame`.
    pub fn verify(&self, frame: &Frame, tol: f64) -> Result<()> {
        match &self.certificate {
            Certificate::Weights(w) => {
                if !self.scalable {
                    return Err(FrameError::WeightsDoNotVerify(
                        "verdict says not scalable".into(),
                    ));
                }
                ScalingWeights::new(frame, &w.u, tol).map(|_| ())
            }
            Certificate::Separator(s) => {
                if self.scalable {
                    return Err(FrameError::SeparatorDoesNotVerify(s.margin));
                }
                let fi = f_image(frame)?;
                let margin = Separator::margin_of(&fi, &self.subset, &s.h);
                if margin > 0.0 {
                    return Ok(());
                }
                // Float evaluation may lose a tiny exact margin.
                match self.exact.as_ref().and_then(|e| e.separator.as_ref()) {
                    Some(h) => verify_exact_separator(frame, &self.subset, h),
                    None => Err(FrameError::SeparatorDoesNotVerify(margin)),
                }
            }
        }
    }
}

fn verify_exact_separator(frame: &Frame, subset: &[usize], h: &[String]) -> Result<()> {
    let h: Vec<BigRational> = h
        .iter()
        .map(|s| crate::exact::parse_rational(s))
        .collect::<Result<_>>()?;
    let rf = RationalFrame::from_frame(frame);
    for &k in subset {
        let fx = crate::exact::f_vector_exact(rf.column(k))?;
        let ip: BigRational = fx.iter().zip(&h).map(|(a, b)| a * b).sum();
        if ip <= BigRational::zero() {
            return Err(FrameError::SeparatorDoesNotVerify(to_f64(&ip)));
        }
    }
    Ok(())
}

// ---- LP formulations shared by the float and rational paths ----

fn constant<T: LpScalar>(v: usize) -> T {
    T::from_usize(v)
}

/// Separator program in standard form over columns `F(φ_k)`.
///
/// Variables: `g = h + 1 ∈ [0, 2]^d`, slacks `r`, the margin `t >= 0` and
/// surplus `s_k`.
pub fn separator_lp<T: LpScalar>(cols: &[Vec<T>]) -> StandardLp<T> {
    let k = cols.len();
    let d = cols[0].len();
    let nv = 2 * d + 1 + k;
    let mut a = Vec::with_capacity(d + k);
    let mut b = Vec::with_capacity(d + k);
    for i in 0..d {
        let mut row = vec![T::zero(); nv];
        row[i] = T::one();
        row[d + i] = T::one();
        a.push(row);
        b.push(constant(2));
    }
    for (j, col) in cols.iter().enumerate() {
        let mut row = vec![T::zero(); nv];
        row[..d].clone_from_slice(col);
        row[2 * d] = -T::one();
        row[2 * d + 1 + j] = -T::one();
        a.push(row);
        b.push(col.iter().cloned().fold(T::zero(), |acc, v| acc + v));
    }
    let mut c = vec![T::zero(); nv];
    c[2 * d] = -T::one();
    StandardLp { a, b, c }
}

/// `(h, t*)` from an optimal separator solution.
pub fn separator_from_solution<T: LpScalar>(sol: &LpSolution<T>, d: usize) -> (Vec<T>, T) {
    let h = sol.x[..d].iter().map(|g| g.clone() - T::one()).collect();
    (h, sol.x[2 * d].clone())
}

/// Max-min-weight program: `u = v + s·1`, `F u = 0`, `Σu = 1`, maximize `s >= 0`.
pub fn strict_lp<T: LpScalar>(cols: &[Vec<T>]) -> StandardLp<T> {
    let k = cols.len();
    let d = cols[0].len();
    let mut a = Vec::with_capacity(d + 1);
    for i in 0..d {
        let mut row: Vec<T> = cols.iter().map(|c| c[i].clone()).collect();
        row.push(cols.iter().fold(T::zero(), |acc, c| acc + c[i].clone()));
        a.push(row);
    }
    let mut last = vec![T::one(); k];
    last.push(constant(k));
    a.push(last);
    let mut b = vec![T::zero(); d];
    b.push(T::one());
    let mut c = vec![T::zero(); k + 1];
    c[k] = -T::one();
    StandardLp { a, b, c }
}

/// `(u, s*)` from an optimal max-min-weight solution.
pub fn strict_from_solution<T: LpScalar>(sol: &LpSolution<T>, k: usize) -> (Vec<T>, T) {
    let s = sol.x[k].clone();
    (
        sol.x[..k].iter().map(|v| v.clone() + s.clone()).collect(),
        s,
    )
}

/// Feasibility of `{F u = 0, Σu = 1, u >= 0}`.
pub fn weights_lp<T: LpScalar>(cols: &[Vec<T>]) -> StandardLp<T> {
    let k = cols.len();
    let d = cols[0].len();
    let mut a: Vec<Vec<T>> = (0..d)
        .map(|i| cols.iter().map(|c| c[i].clone()).collect())
        .collect();
    a.push(vec![T::one(); k]);
    let mut b = vec![T::zero(); d];
    b.push(T::one());
    StandardLp {
        a,
        b,
        c: vec![T::zero(); k],
    }
}

// ---- float operations ----

fn effective_subset(frame: &Frame, subset: &[usize]) -> Result<Vec<usize>> {
    if let Some(&index) = subset.iter().find(|&&k| k >= frame.len()) {
        return Err(FrameError::IndexOutOfRange {
            index,
            len: frame.len(),
        });
    }
    let eff: Vec<usize> = subset
        .iter()
        .copied()
        .filter(|&k| !frame.is_zero_column(k))
        .collect();
    if eff.is_empty() {
        return Err(FrameError::EmptySubset);
    }
    Ok(eff)
}

/// Solves the separator program on `subset`; returns `(t*, h)`.
pub fn separator_search(fi: &FImage, subset: &[usize]) -> Result<(f64, Vec<f64>)> {
    if subset.is_empty() {
        return Err(FrameError::EmptySubset);
    }
    let cols = fi.columns(subset)?;
    match solve(&separator_lp(&cols))? {
        LpOutcome::Optimal(sol) => {
            let (h, t) = separator_from_solution(&sol, fi.d());
            Ok((t.max(0.0), h))
        }
        other => Err(FrameError::LpNumericalFailure(format!(
            "separator program is always feasible and bounded, got {other:?}"
        ))),
    }
}

/// Moves `u` (over the columns of `a`) onto `{a u = e}` with a least-squares
/// correction restricted to its support, then clamps round-off negatives.
fn polish(cols: &[Vec<f64>], u: &[f64]) -> Vec<f64> {
    let support: Vec<usize> = (0..u.len()).filter(|&j| u[j] > 0.0).collect();
    if support.is_empty() {
        return u.to_vec();
    }
    let d = cols[0].len();
    let a = DMatrix::from_fn(d + 1, support.len(), |i, j| {
        if i < d {
            cols[support[j]][i]
        } else {
            1.0
        }
    });
    let us = DVector::from_iterator(support.len(), support.iter().map(|&j| u[j]));
    let mut target = DVector::zeros(d + 1);
    target[d] = 1.0;
    let Some(corr) = lstsq(&a, &(target - &a * &us)) else {
        return u.to_vec();
    };
    let fixed = us + corr;
    if fixed.iter().any(|&x| x < -1e-12) {
        return u.to_vec();
    }
    let mut out = vec![0.0; u.len()];
    for (&j, &v) in support.iter().zip(fixed.iter()) {
        out[j] = v.max(0.0);
    }
    out
}

fn spread(frame_len: usize, subset: &[usize], u: &[f64]) -> Vec<f64> {
    let mut full = vec![0.0; frame_len];
    for (&k, &v) in subset.iter().zip(u) {
        full[k] = v;
    }
    full
}

/// Max-min weights on `subset`: `Ok(None)` when `{F u = 0, Σu = 1, u >= 0}` is empty.
fn balanced_weights(cols: &[Vec<f64>]) -> Result<Option<(Vec<f64>, f64)>> {
    match solve(&strict_lp(cols))? {
        LpOutcome::Optimal(sol) => {
            let (u, s) = strict_from_solution(&sol, cols.len());
            Ok(Some((polish(cols, &u), s)))
        }
        LpOutcome::Infeasible { .. } => Ok(None),
        LpOutcome::Unbounded => Err(FrameError::LpNumericalFailure(
            "max-min weight unbounded".into(),
        )),
    }
}

/// Recovers scaling weights on `subset`.
///
/// Non-strict: a basic feasible solution of `{F u = 0, Σu = 1, u >= 0}`.
/// Strict: the max-min-weight solution, provided `s*` exceeds the strictness
/// threshold.
pub fn weight_recovery(
    fi: &FImage,
    frame: &Frame,
    subset: &[usize],
    strict: bool,
    opts: &DecideOptions,
) -> Result<ScalingWeights> {
    if subset.is_empty() {
        return Err(FrameError::EmptySubset);
    }
    let cols = fi.columns(subset)?;
    let u = if strict {
        match balanced_weights(&cols)? {
            None => return Err(FrameError::Infeasible),
            Some((_, s)) if s <= opts.strict_threshold => {
                return Err(FrameError::NotStrictlyScalable { s_star: s })
            }
            Some((u, _)) => u,
        }
    } else {
        match solve(&weights_lp(&cols))? {
            LpOutcome::Optimal(sol) => polish(&cols, &sol.x),
            LpOutcome::Infeasible { .. } => return Err(FrameError::Infeasible),
            LpOutcome::Unbounded => {
                return Err(FrameError::LpNumericalFailure(
                    "feasibility program unbounded".into(),
                ))
            }
        }
    };
    ScalingWeights::new(frame, &spread(frame.len(), subset, &u), opts.tol_tight)
}

/// Decides scalability of `Φ_subset`, returning a verified certificate.
pub fn decide(frame: &Frame, subset: &[usize], opts: &DecideOptions) -> Result<Verdict> {
    if frame.dim() < 2 {
        return Err(FrameError::DimensionTooSmall(frame.dim()));
    }
    match opts.mode {
        Mode::Exact => decide_exact(frame, &RationalFrame::from_frame(frame), subset, opts),
        Mode::Float => decide_float(frame, subset, opts),
    }
}

/// Convenience wrapper for the whole frame.
pub fn decide_all(frame: &Frame, opts: &DecideOptions) -> Result<Verdict> {
    let all: Vec<usize> = (0..frame.len()).collect();
    decide(frame, &all, opts)
}

fn subset_spans(frame: &Frame, subset: &[usize]) -> Result<bool> {
    Ok(numerical_rank(&frame.select(subset)?) == frame.dim())
}

fn decide_float(frame: &Frame, subset: &[usize], opts: &DecideOptions) -> Result<Verdict> {
    let eff = effective_subset(frame, subset)?;
    let fi = f_image(frame)?;
    let d = fi.d();
    let cols = fi.columns(&eff)?;
    let f_rank = numerical_rank(&from_columns(d, &cols));
    let spans = subset_spans(frame, &eff)?;
    let (t_star, h) = separator_search(&fi, &eff)?;

    let mut verdict = Verdict {
        subset: eff.clone(),
        scalable: false,
        strict: false,
        spans,
        certificate: Certificate::Separator(Separator {
            h: h.clone(),
            margin: t_star,
        }),
        separator_value: t_star,
        min_weight: None,
        f_rank,
        boundary_flag: false,
        resolved_exactly: false,
        exact: None,
    };

    let mut certified = false;
    if t_star > opts.band {
        match Separator::verify(&fi, &eff, h.clone()) {
            Ok(sep) => {
                verdict.certificate = Certificate::Separator(sep);
                certified = true;
            }
            Err(_) => verdict.boundary_flag = true,
        }
    } else {
        verdict.boundary_flag = true;
        if let Ok(w) = weight_recovery(&fi, frame, &eff, false, opts) {
            let balanced = balanced_weights(&cols)?;
            let s_star = balanced.as_ref().map_or(0.0, |(_, s)| *s);
            verdict.scalable = true;
            verdict.strict = s_star > opts.strict_threshold;
            verdict.min_weight = Some(s_star);
            verdict.boundary_flag = s_star <= opts.band || f_rank < d;
            verdict.certificate = Certificate::Weights(w);
            if opts.prefer_balanced && verdict.strict {
                if let Some((u, _)) = balanced {
                    if let Ok(bw) =
                        ScalingWeights::new(frame, &spread(frame.len(), &eff, &u), opts.tol_tight)
                    {
                        verdict.certificate = Certificate::Weights(bw);
                    }
                }
            }
            certified = true;
        } else if let Ok(sep) = Separator::verify(&fi, &eff, h) {
            verdict.certificate = Certificate::Separator(sep);
            certified = true;
        }
    }

    if verdict.boundary_flag && opts.exact_fallback && eff.len() <= EXACT_BUDGET {
        let rf = RationalFrame::from_frame(frame);
        let ev = exact_oracle(&rf, &eff)?;
        merge_exact(frame, &fi, &mut verdict, &ev, certified, opts)?;
        return Ok(verdict);
    }
    if !certified {
        return Err(FrameError::LpNumericalFailure(format!(
            "no certificate verifies (t* = {t_star:e}) and the exact fallback is unavailable"
        )));
    }
    Ok(verdict)
}

/// Certificate built from an exact verdict, verified in floating point where possible.
fn certificate_from_exact(
    frame: &Frame,
    fi: &FImage,
    ev: &ExactVerdict,
    opts: &DecideOptions,
) -> Result<Certificate> {
    if ev.scalable {
        let w: Vec<f64> = ev
            .weights
            .as_ref()
            .expect("scalable exact verdict has weights")
            .iter()
            .map(to_f64)
            .collect();
        Ok(Certificate::Weights(ScalingWeights::new(
            frame,
            &w,
            opts.tol_tight,
        )?))
    } else {
        let sep = ev
            .separator
            .as_ref()
            .expect("non-scalable exact verdict has a separator");
        let h: Vec<f64> = sep.h.iter().map(to_f64).collect();
        let margin = Separator::margin_of(fi, &ev.subset, &h);
        let margin = if margin > 0.0 {
            margin
        } else {
            to_f64(&sep.margin)
        };
        Ok(Certificate::Separator(Separator { h, margin }))
    }
}

fn merge_exact(
    frame: &Frame,
    fi: &FImage,
    verdict: &mut Verdict,
    ev: &ExactVerdict,
    certified: bool,
    opts: &DecideOptions,
) -> Result<()> {
    let float_scalable = verdict.scalable;
    if certified && float_scalable && !ev.scalable {
        // Weights verify at tolerance; the dyadic image of the data sits just
        // off the scalable set. The exact separator is kept for inspection.
        verdict.exact = Some(ExactCertificate::from_verdict(ev));
        return Ok(());
    }
    if certified && !float_scalable && ev.scalable {
        match certificate_from_exact(frame, fi, ev, opts) {
            Ok(cert) => verdict.certificate = cert,
            Err(_) => {
                verdict.exact = Some(ExactCertificate::from_verdict(ev));
                return Ok(());
            }
        }
    }
    verdict.scalable = ev.scalable;
    verdict.strict = ev.strict;
    verdict.resolved_exactly = true;
    verdict.exact = Some(ExactCertificate::from_verdict(ev));
    verdict.separator_value = to_f64(&ev.margin());
    verdict.min_weight = ev.min_weight.as_ref().map(to_f64);
    let partial_support = matches!(
        &verdict.certificate,
        Certificate::Weights(w) if w.support.len() < ev.subset.len()
    );
    let want_balanced = ev.strict && opts.prefer_balanced && partial_support;
    if !certified || float_scalable != ev.scalable || want_balanced {
        verdict.certificate = certificate_from_exact(frame, fi, ev, opts)?;
    }
    Ok(())
}

/// Exact-mode decision on a rational frame; `frame` is its floating image.
pub fn decide_exact(
    frame: &Frame,
    rf: &RationalFrame,
    subset: &[usize],
    opts: &DecideOptions,
) -> Result<Verdict> {
    if frame.dim() < 2 {
        return Err(FrameError::DimensionTooSmall(frame.dim()));
    }
    let ev = exact_oracle(rf, subset)?;
    let fi = f_image(frame)?;
    let d = image_dim(frame.dim());
    let f_rank = numerical_rank(&from_columns(d, &fi.columns(&ev.subset)?));
    let t_star = to_f64(&ev.margin());
    let s_star = ev.min_weight.as_ref().map(to_f64);
    let boundary_flag = if ev.scalable {
        s_star.unwrap_or(0.0) <= opts.band || f_rank < d
    } else {
        t_star <= opts.band
    };
    Ok(Verdict {
        subset: ev.subset.clone(),
        scalable: ev.scalable,
        strict: ev.strict,
        spans: subset_spans(frame, &ev.subset)?,
        certificate: certificate_from_exact(frame, &fi, &ev, opts)?,
        separator_value: t_star,
        min_weight: s_star,
        f_rank,
        boundary_flag,
        resolved_exactly: true,
        exact: Some(ExactCertificate::from_verdict(&ev)),
    })
}

// ---- auxiliary tests ----

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Positive,
    Negative,
}

/// Coordinates `(i, j)` (0-based, `i < j`) with `φ_k(i) φ_k(j)` of one strict sign for all `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignWitness {
    pub i: usize,
    pub j: usize,
    pub sign: Sign,
}

/// Looks for a coordinate pair on which every frame vector has a product of
/// the same strict sign. Such a pair rules out scalability: `h = ±e_idx`
/// (the coordinate of `x_i x_j` in `F`) separates. `None` proves nothing.
pub fn sign_quick_reject(frame: &Frame) -> Result<Option<SignWitness>> {
    let n = frame.dim();
    if n < 2 {
        return Err(FrameError::DimensionTooSmall(n));
    }
    let m = frame.matrix();
    for i in 0..n {
        for j in i + 1..n {
            let products = || (0..frame.len()).map(|k| m[(i, k)] * m[(j, k)]);
            if products().all(|p| p > 0.0) {
                return Ok(Some(SignWitness {
                    i,
                    j,
                    sign: Sign::Positive,
                }));
            }
            if products().all(|p| p < 0.0) {
                return Ok(Some(SignWitness {
                    i,
                    j,
                    sign: Sign::Negative,
                }));
            }
        }
    }
    Ok(None)
}

/// Pointedness of the cone generated by `F(Φ_subset)` and emptiness of the
/// interior of its polar.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeStatus {
    pub pointed: bool,
    pub polar_interior_empty: bool,
    pub separator_value: f64,
}

pub fn cone_pointed(fi: &FImage, subset: &[usize], band: f64) -> Result<ConeStatus> {
    if subset.is_empty() {
        return Err(FrameError::EmptySubset);
    }
    for &k in subset {
        if k >= fi.len() {
            return Err(FrameError::IndexOutOfRange {
                index: k,
                len: fi.len(),
            });
        }
        if fi.is_zero_column(k) {
            return Err(FrameError::ZeroColumn(k));
        }
    }
    let cols = fi.columns(subset)?;
    // F(x) != 0 for x != 0, so a nonnegative kernel vector makes the cone contain a line.
    let pointed = match solve(&weights_lp(&cols))? {
        LpOutcome::Optimal(_) => false,
        LpOutcome::Infeasible { .. } => true,
        LpOutcome::Unbounded => {
            return Err(FrameError::LpNumericalFailure(
                "feasibility program unbounded".into(),
            ))
        }
    };
    let (t, _) = separator_search(fi, subset)?;
    Ok(ConeStatus {
        pointed,
        polar_interior_empty: t <= band,
        separator_value: t,
    })
}

/// Scalability through the outer-product hull: is `α·I ∈ co{φ_kφ_kᵀ}` for
/// some `α >= 0`? Works on vectorized symmetric matrices and never touches `F`.
pub fn hull_lp_decide(frame: &Frame, subset: &[usize]) -> Result<bool> {
    let eff = effective_subset(frame, subset)?;
    let n = frame.dim();
    let p = svec_len(n);
    let mut cols: Vec<Vec<f64>> = eff.iter().map(|&k| outer_svec(&frame.column(k))).collect();
    let id: Vec<f64> = outer_svec_identity(n).into_iter().map(|v| -v).collect();
    let k = cols.len();
    cols.push(id);
    let mut a: Vec<Vec<f64>> = (0..p)
        .map(|i| cols.iter().map(|c| c[i]).collect())
        .collect();
    let mut last = vec![1.0; k];
    last.push(0.0);
    a.push(last);
    let mut b = vec![0.0; p];
    b.push(1.0);
    let lp = StandardLp {
        a,
        b,
        c: vec![0.0; k + 1],
    };
    match solve(&lp)? {
        LpOutcome::Optimal(_) => Ok(true),
        LpOutcome::Infeasible { .. } => Ok(false),
        LpOutcome::Unbounded => Err(FrameError::LpNumericalFailure(
            "hull program unbounded".into(),
        )),
    }
}

fn outer_svec_identity(n: usize) -> Vec<f64> {
    crate::linalg::svec(&DMatrix::identity(n, n))
}
