//! Command-line interface: frame file ingestion, subcommands and exit codes.
//!
//! Exit codes: 0 success, 1 other failure (including `scale` on a
//! non-scalable frame), 2 parse or format error, 3 not a frame,
//! 4 witness hypothesis violated, 5 budget exceeded or undecided.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::FrameError;
use crate::exact::{parse_rational, rational_from_f64, to_f64, RationalFrame};
use crate::feasibility::{
    decide_all, decide_exact, Certificate, DecideOptions, ExactCertificate, Mode, Verdict,
};
use crate::fmap::{f_image, image_dim};
use crate::frame::Frame;
use crate::report::{analyze, FrameData};
use crate::subsets::{is_m_scalable, MScalability, SearchOptions};
use crate::topology::{nonscalable_witness, random_frame};
use crate::{BOUNDARY_BAND, STRICT_THRESHOLD, SUBSET_BUDGET, TOL_TIGHT};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{location}: {message}")]
    Parse { location: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error("{0}")]
    Undecided(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Io { .. } => 2,
            CliError::Undecided(_) => 5,
            CliError::Failed(_) => 1,
            CliError::Frame(e) => match e {
                FrameError::NotAFrame { .. } => 3,
                FrameError::HypothesisViolated(_) => 4,
                FrameError::TooLarge { .. } => 5,
                FrameError::InvalidInput(_)
                | FrameError::DimensionMismatch { .. }
                | FrameError::DimensionTooSmall(_) => 2,
                _ => 1,
            },
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(
    name = "framescale",
    version,
    about = "Scalability analysis for finite frames"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Float,
    Exact,
}

#[derive(Args, Debug)]
struct Common {
    /// Decision back-end.
    #[arg(long, value_enum, default_value = "float")]
    mode: ModeArg,
    /// Relative tolerance for tightness residuals.
    #[arg(long, default_value_t = TOL_TIGHT)]
    tol: f64,
    /// Half-width of the boundary band.
    #[arg(long, default_value_t = BOUNDARY_BAND)]
    band: f64,
    /// Maximum number of subsets enumerated per query.
    #[arg(long, default_value_t = SUBSET_BUDGET)]
    budget: u64,
    /// Write output to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Full scalability report.
    Analyze {
        input: PathBuf,
        /// Include wall-clock timings; the report is then no longer reproducible.
        #[arg(long)]
        timings: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Certificate only: scaling weights or a separator.
    Certify {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Emit the scaled frame.
    Scale {
        input: PathBuf,
        /// Normalize the scaled frame to frame bound 1.
        #[arg(long)]
        parseval: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Emit the images F(φ_k).
    Fmap {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Is some m-subset scalable?
    Subsets {
        input: PathBuf,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        strict: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Non-scalable frame within eps of a scalable one.
    Witness {
        input: PathBuf,
        #[arg(long, default_value_t = 1e-2)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Write a seeded Gaussian frame file.
    Random {
        n: usize,
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

impl Common {
    fn decide_options(&self) -> DecideOptions {
        DecideOptions {
            mode: match self.mode {
                ModeArg::Float => Mode::Float,
                ModeArg::Exact => Mode::Exact,
            },
            tol_tight: self.tol,
            band: self.band,
            strict_threshold: STRICT_THRESHOLD,
            exact_fallback: true,
            prefer_balanced: true,
        }
    }

    fn search_options(&self) -> SearchOptions {
        SearchOptions {
            decide: self.decide_options(),
            budget: self.budget,
        }
    }
}

/// A parsed frame file.
#[derive(Clone, Debug)]
pub struct FrameInput {
    pub frame: Frame,
    /// Exact entries, present when some entry is not exactly a double.
    pub rational: Option<RationalFrame>,
    pub labels: Option<Vec<String>>,
    pub bytes: Vec<u8>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Entry {
    Number(f64),
    Text(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FrameFile {
    n: Option<usize>,
    vectors: Vec<Vec<Entry>>,
    labels: Option<Vec<String>>,
}

fn parse_error(location: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::Parse {
        location: location.into(),
        message: message.into(),
    }
}

fn parse_text_entry(s: &str, location: &str) -> CliResult<(f64, BigRational)> {
    let r = parse_rational(s).map_err(|_| parse_error(location, format!("not a number: {s:?}")))?;
    Ok((to_f64(&r), r))
}

fn assemble(
    n: usize,
    rows: Vec<Vec<(f64, BigRational)>>,
    labels: Option<Vec<String>>,
    bytes: Vec<u8>,
) -> CliResult<FrameInput> {
    let floats: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| r.iter().map(|e| e.0).collect())
        .collect();
    if let Some((i, j)) = floats
        .iter()
        .enumerate()
        .find_map(|(i, r)| r.iter().position(|x| !x.is_finite()).map(|j| (i, j)))
    {
        return Err(parse_error(
            format!("vectors[{i}][{j}]"),
            "entry is not finite",
        ));
    }
    let inexact = rows
        .iter()
        .flatten()
        .any(|(x, r)| rational_from_f64(*x) != *r);
    let frame = Frame::new(n, &floats)?;
    let rational = if inexact {
        Some(RationalFrame::new(
            n,
            rows.into_iter()
                .map(|r| r.into_iter().map(|e| e.1).collect())
                .collect(),
        )?)
    } else {
        None
    };
    Ok(FrameInput {
        frame,
        rational,
        labels,
        bytes,
    })
}

/// Parses a JSON frame file: `{"n": 2, "vectors": [[1, 0], [0, 1]]}`.
/// Entries may be numbers or strings holding `p/q` or long decimals.
pub fn parse_json(bytes: &[u8]) -> CliResult<FrameInput> {
    let file: FrameFile = serde_json::from_slice(bytes).map_err(|e| {
        parse_error(
            format!("line {} column {}", e.line(), e.column()),
            e.to_string(),
        )
    })?;
    let n = match file.n.or_else(|| file.vectors.first().map(Vec::len)) {
        Some(n) if n > 0 => n,
        _ => return Err(parse_error("n", "dimension must be at least 1")),
    };
    if let Some(labels) = &file.labels {
        if labels.len() != file.vectors.len() {
            return Err(parse_error(
                "labels",
                format!("{} labels for {} vectors", labels.len(), file.vectors.len()),
            ));
        }
    }
    let mut rows = Vec::with_capacity(file.vectors.len());
    for (i, v) in file.vectors.iter().enumerate() {
        if v.len() != n {
            return Err(parse_error(
                format!("vectors[{i}]"),
                format!("expected {n} entries, found {}", v.len()),
            ));
        }
        let row = v
            .iter()
            .enumerate()
            .map(|(j, e)| match e {
                Entry::Number(x) => Ok((*x, rational_from_f64(*x))),
                Entry::Text(s) => parse_text_entry(s, &format!("vectors[{i}][{j}]")),
            })
            .collect::<CliResult<Vec<_>>>()?;
        rows.push(row);
    }
    assemble(n, rows, file.labels, bytes.to_vec())
}

/// Parses CSV with one frame vector per row. Blank lines and `#` comments are skipped.
pub fn parse_csv(bytes: &[u8]) -> CliResult<FrameInput> {
    let text = std::str::from_utf8(bytes).map_err(|e| parse_error("input", e.to_string()))?;
    let mut rows: Vec<Vec<(f64, BigRational)>> = Vec::new();
    let mut n = None;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let loc = |col: usize| format!("line {} field {}", lineno + 1, col + 1);
        let row = line
            .split(',')
            .enumerate()
            .map(|(j, s)| parse_text_entry(s.trim(), &loc(j)))
            .collect::<CliResult<Vec<_>>>()?;
        match n {
            None => n = Some(row.len()),
            Some(k) if k != row.len() => {
                return Err(parse_error(
                    format!("line {}", lineno + 1),
                    format!("expected {k} entries, found {}", row.len()),
                ))
            }
            _ => {}
        }
        rows.push(row);
    }
    let n = n.ok_or_else(|| parse_error("input", "no frame vectors"))?;
    assemble(n, rows, None, bytes.to_vec())
}

/// Reads a frame file; `.csv` files are CSV, everything else is JSON.
/// The path `-` reads standard input as JSON.
pub fn read_frame(path: &Path) -> CliResult<FrameInput> {
    let bytes = if path == Path::new("-") {
        let mut buf = Vec::new();
        std::io::Read::read_to_end(&mut std::io::stdin(), &mut buf).map_err(|source| {
            CliError::Io {
                path: "-".into(),
                source,
            }
        })?;
        buf
    } else {
        std::fs::read(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?
    };
    let is_csv = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        parse_csv(&bytes)
    } else {
        parse_json(&bytes)
    }
}

fn decide_input(input: &FrameInput, opts: &DecideOptions) -> CliResult<Verdict> {
    let v = match (opts.mode, &input.rational) {
        (Mode::Exact, Some(rf)) => {
            let all: Vec<usize> = (0..input.frame.len()).collect();
            decide_exact(&input.frame, rf, &all, opts)?
        }
        _ => decide_all(&input.frame, opts)?,
    };
    Ok(v)
}

#[derive(Serialize)]
struct CertificateDoc<'a> {
    scalable: bool,
    strict: bool,
    boundary_flag: bool,
    certificate: &'a Certificate,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact: Option<&'a ExactCertificate>,
}

#[derive(Serialize)]
struct FMapDoc {
    n: usize,
    d: usize,
    columns: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct WitnessDoc {
    column: usize,
    direction: Vec<f64>,
    delta: f64,
    distance: f64,
    margin: f64,
    separator: Vec<f64>,
    s_matrix: Vec<Vec<f64>>,
    base: FrameData,
    perturbed: FrameData,
}

fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    serde_json::to_string_pretty(value).map_err(|e| CliError::Failed(e.to_string()))
}

fn emit(text: &str, out_path: Option<&Path>, out: &mut dyn Write) -> CliResult<()> {
    match out_path {
        Some(p) => std::fs::write(p, format!("{text}\n")).map_err(|source| CliError::Io {
            path: p.display().to_string(),
            source,
        }),
        None => writeln!(out, "{text}").map_err(|source| CliError::Io {
            path: "stdout".into(),
            source,
        }),
    }
}

fn execute(cli: Cli, out: &mut dyn Write) -> CliResult<()> {
    match cli.command {
        Command::Analyze {
            input,
            timings,
            common,
        } => {
            let inp = read_frame(&input)?;
            let doc = analyze(
                &inp.frame,
                inp.rational.as_ref(),
                &inp.bytes,
                inp.labels.clone(),
                &common.search_options(),
            )?;
            let doc = if timings { doc } else { doc.canonical() };
            emit(&to_json(&doc)?, common.out.as_deref(), out)
        }
        Command::Certify { input, common } => {
            let inp = read_frame(&input)?;
            let v = decide_input(&inp, &common.decide_options())?;
            v.verify(&inp.frame, common.tol)?;
            let doc = CertificateDoc {
                scalable: v.scalable,
                strict: v.strict,
                boundary_flag: v.boundary_flag,
                certificate: &v.certificate,
                exact: v.exact.as_ref(),
            };
            emit(&to_json(&doc)?, common.out.as_deref(), out)
        }
        Command::Scale {
            input,
            parseval,
            common,
        } => {
            let inp = read_frame(&input)?;
            let v = decide_input(&inp, &common.decide_options())?;
            let w = match v.weights() {
                Some(w) if v.scalable => w,
                _ => return Err(CliError::Failed("frame is not scalable".into())),
            };
            let scaled = inp.frame.scaled(&w.coefficients(parseval))?;
            let t = scaled.tightness(common.tol);
            if !t.tight {
                return Err(CliError::Failed(format!(
                    "scaled frame misses tightness: residual {:e}",
                    t.residual
                )));
            }
            emit(
                &to_json(&FrameData::from_frame(&scaled, inp.labels))?,
                common.out.as_deref(),
                out,
            )
        }
        Command::Fmap { input, common } => {
            let inp = read_frame(&input)?;
            let fi = f_image(&inp.frame)?;
            let doc = FMapDoc {
                n: inp.frame.dim(),
                d: image_dim(inp.frame.dim()),
                columns: (0..fi.len()).map(|k| fi.column(k)).collect(),
            };
            emit(&to_json(&doc)?, common.out.as_deref(), out)
        }
        Command::Subsets {
            input,
            m,
            strict,
            common,
        } => {
            let inp = read_frame(&input)?;
            let v = is_m_scalable(&inp.frame, m, strict, &common.search_options())?;
            emit(&to_json(&v)?, common.out.as_deref(), out)?;
            if let MScalability::Unknown { subsets, budget } = v.outcome {
                return Err(CliError::Undecided(format!(
                    "{subsets} subsets exceed the budget of {budget}"
                )));
            }
            Ok(())
        }
        Command::Witness {
            input,
            eps,
            seed,
            common,
        } => {
            let inp = read_frame(&input)?;
            let w = nonscalable_witness(&inp.frame, eps, seed, &common.decide_options())?;
            let doc = WitnessDoc {
                column: w.column,
                direction: w.direction.iter().copied().collect(),
                delta: w.delta,
                distance: w.distance,
                margin: w.margin,
                separator: w.separator.clone(),
                s_matrix: w
                    .s_matrix
                    .row_iter()
                    .map(|r| r.iter().copied().collect())
                    .collect(),
                base: FrameData::from_frame(&w.base, inp.labels.clone()),
                perturbed: FrameData::from_frame(&w.perturbed, inp.labels),
            };
            emit(&to_json(&doc)?, common.out.as_deref(), out)
        }
        Command::Random {
            n,
            m,
            seed,
            out: path,
        } => {
            let f = random_frame(n, m, seed)?;
            emit(
                &to_json(&FrameData::from_frame(&f, None))?,
                path.as_deref(),
                out,
            )
        }
    }
}

/// Runs the command line `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match execute(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
