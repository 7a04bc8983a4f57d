//! Scalability analysis for finite frames in `R^N`.
//!
//! A frame is *scalable* when nonnegative weights on its vectors turn it into a
//! tight frame. This crate decides scalability through the quadratic map
//! `F: R^N -> R^d`, `d = (N-1)(N+2)/2`, under which the tightness equations
//! become the homogeneous system `F(Φ)u = 0`, `u >= 0`. Every verdict carries a
//! checkable certificate: scaling weights on one side, a Farkas separator on
//! the other.
//!
//! Module map:
//! - [`frame`]: frames, frame bounds, tightness, scaling weights.
//! - [`fmap`]: the map `F`, outer-product dimensions, quadratic forms.
//! - [`lp`]: a dense two-phase simplex generic over the scalar field.
//! - [`exact`]: rational arithmetic back-end and the exact decider.
//! - [`feasibility`]: the decision core with two-sided certificates.
//! - [`subsets`]: m-scalability, support reduction, scalability index.
//! - [`topology`]: random frames, generic dimension probes, perturbation witnesses.
//! - [`report`] and [`cli`]: aggregate reports and the command-line surface.

pub mod cli;
pub mod error;
pub mod exact;
pub mod feasibility;
pub mod fmap;
pub mod frame;
pub mod linalg;
pub mod lp;
pub mod report;
pub mod subsets;
pub mod topology;

pub use error::{FrameError, Result};
pub use feasibility::{decide, Certificate, DecideOptions, Mode, Separator, Verdict};
pub use fmap::{f_image, f_vector, q_matrix, FImage, OuterProductSet, QuadForm};
pub use frame::{Frame, FrameBounds, ScalingWeights, Tightness};

/// Default relative tolerance for tightness residuals.
pub const TOL_TIGHT: f64 = 1e-9;
/// Default half-width of the band around the decision boundary.
pub const BOUNDARY_BAND: f64 = 1e-9;
/// Minimum weight (after normalizing to the unit simplex) that counts as positive.
pub const STRICT_THRESHOLD: f64 = 1e-10;
/// Relative tolerance for pairwise orthogonality of frame vectors.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;
/// Default cap on the number of subsets enumerated by subset searches.
pub const SUBSET_BUDGET: u64 = 1_000_000;
/// Largest subset handled by the exact vertex enumeration.
pub const EXACT_BUDGET: usize = 12;
