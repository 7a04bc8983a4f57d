//! Aggregate analysis reports and their serialized form.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{FrameError, Result};
use crate::exact::RationalFrame;
use crate::feasibility::{decide, decide_exact, Certificate, DecideOptions, Mode, Verdict};
use crate::fmap::outer_dims;
use crate::frame::{Frame, FrameBounds, ScalingWeights};
use crate::subsets::{scalability_index, ScalabilityIndex, SearchOptions};

pub const SCHEMA: u32 = 1;

/// Serialized frame: `vectors[k]` is the frame vector `φ_k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameData {
    pub n: usize,
    pub vectors: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub labels: Option<Vec<String>>,
}

impl FrameData {
    pub fn from_frame(frame: &Frame, labels: Option<Vec<String>>) -> Self {
        Self {
            n: frame.dim(),
            vectors: frame.vectors(),
            labels,
        }
    }

    pub fn to_frame(&self) -> Result<Frame> {
        Frame::new(self.n, &self.vectors)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexSummary {
    /// Scalability index, or a verified upper bound when `exact` is false.
    pub value: usize,
    pub exact: bool,
    /// First subset size left unsettled by the enumeration budget.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub unknown_from: Option<usize>,
    pub subset: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub scalable: bool,
    pub strict: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub index: Option<IndexSummary>,
    /// `dim span {φ_kφ_kᵀ}`.
    pub m_phi: usize,
    pub bounds: FrameBounds,
    /// Condition number of `Φᵀ` before scaling.
    pub condition_before: f64,
    /// Condition number of the scaled analysis operator, when scalable.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub condition_after: Option<f64>,
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub decide_ms: f64,
    pub index_ms: f64,
    pub total_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema: u32,
    pub tool_version: String,
    /// SHA-256 of the raw input bytes, hex encoded.
    pub input_digest: String,
    pub mode: Mode,
    pub frame: FrameData,
    pub summary: Summary,
    pub verdict: Verdict,
    pub boundary_flag: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timings: Option<Timings>,
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn elapsed_ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// On the line every spanning frame is tight; weight the nonzero vectors equally.
fn decide_line(frame: &Frame, tol: f64) -> Result<Verdict> {
    let subset: Vec<usize> = (0..frame.len())
        .filter(|&k| !frame.is_zero_column(k))
        .collect();
    let raw: Vec<f64> = (0..frame.len())
        .map(|k| if frame.is_zero_column(k) { 0.0 } else { 1.0 })
        .collect();
    let w = ScalingWeights::new(frame, &raw, tol)?;
    let strict = subset.len() == frame.len();
    Ok(Verdict {
        min_weight: Some(w.min_weight()),
        subset,
        scalable: true,
        strict,
        spans: true,
        certificate: Certificate::Weights(w),
        separator_value: 0.0,
        f_rank: 0,
        boundary_flag: false,
        resolved_exactly: false,
        exact: None,
    })
}

/// Runs the full analysis of a frame. `rational` carries exact entries for
/// exact mode; without it the floating entries are read as exact dyadics.
pub fn analyze(
    frame: &Frame,
    rational: Option<&RationalFrame>,
    input: &[u8],
    labels: Option<Vec<String>>,
    opts: &SearchOptions,
) -> Result<ReportDocument> {
    let start = Instant::now();
    let dopts = DecideOptions {
        prefer_balanced: true,
        ..opts.decide.clone()
    };
    let all: Vec<usize> = (0..frame.len()).collect();
    let verdict = if frame.dim() == 1 {
        decide_line(frame, dopts.tol_tight)?
    } else {
        match (dopts.mode, rational) {
            (Mode::Exact, Some(rf)) => decide_exact(frame, rf, &all, &dopts)?,
            _ => decide(frame, &all, &dopts)?,
        }
    };
    verdict.verify(frame, dopts.tol_tight)?;
    let decide_ms = elapsed_ms(start);

    let t_index = Instant::now();
    let index = if verdict.scalable {
        match scalability_index(frame, opts)? {
            ScalabilityIndex::NotScalable => None,
            ScalabilityIndex::Exact { index, subset, .. } => Some(IndexSummary {
                value: index,
                exact: true,
                unknown_from: None,
                subset,
            }),
            ScalabilityIndex::UpperBound {
                bound,
                unknown_from,
                subset,
                ..
            } => Some(IndexSummary {
                value: bound,
                exact: false,
                unknown_from: Some(unknown_from),
                subset,
            }),
        }
    } else {
        None
    };
    let index_ms = elapsed_ms(t_index);

    let bounds = frame.bounds();
    let condition_after = match verdict.weights() {
        Some(w) if verdict.scalable => {
            let scaled = frame.scaled(&w.coefficients(true))?;
            Some(scaled.bounds().condition_number())
        }
        _ => None,
    };
    let summary = Summary {
        scalable: verdict.scalable,
        strict: verdict.strict,
        index,
        m_phi: outer_dims(frame).linear_dim,
        bounds,
        condition_before: bounds.condition_number(),
        condition_after,
        degenerate: frame.is_degenerate(),
    };
    Ok(ReportDocument {
        schema: SCHEMA,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        input_digest: digest(input),
        mode: dopts.mode,
        frame: FrameData::from_frame(frame, labels),
        summary,
        boundary_flag: verdict.boundary_flag,
        verdict,
        timings: Some(Timings {
            decide_ms,
            index_ms,
            total_ms: elapsed_ms(start),
        }),
    })
}

impl ReportDocument {
    /// The report without timings; stable across runs.
    pub fn canonical(&self) -> Self {
        Self {
            timings: None,
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| FrameError::InvalidInput(e.to_string()))
    }

    /// Parses a report and re-verifies its certificate against the embedded frame.
    pub fn from_json(s: &str, tol: f64) -> Result<Self> {
        let doc: Self =
            serde_json::from_str(s).map_err(|e| FrameError::InvalidInput(e.to_string()))?;
        if doc.schema != SCHEMA {
            return Err(FrameError::InvalidInput(format!(
                "unsupported schema {}",
                doc.schema
            )));
        }
        let frame = doc.frame.to_frame()?;
        doc.verdict.verify(&frame, tol)?;
        if doc.verdict.scalable != doc.summary.scalable {
            return Err(FrameError::InvalidInput(
                "summary disagrees with verdict".into(),
            ));
        }
        Ok(doc)
    }
}
