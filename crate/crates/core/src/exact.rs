//! Rational-arithmetic back-end: exact `F`, fraction-free elimination,
//! enumeration of basic solutions of `{F u = 0, Σu = 1, u >= 0}` and the exact
//! scalability decider built on them.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{FrameError, Result};
use crate::feasibility::{separator_from_solution, separator_lp, strict_from_solution, strict_lp};
use crate::frame::Frame;
use crate::linalg::{binomial, unrank_combination};
use crate::lp::{solve, LpOutcome};
use crate::EXACT_BUDGET;

/// A frame with rational entries.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalFrame {
    n: usize,
    columns: Vec<Vec<BigRational>>,
}

impl RationalFrame {
    pub fn new(n: usize, columns: Vec<Vec<BigRational>>) -> Result<Self> {
        if n == 0 {
            return Err(FrameError::InvalidInput(
                "dimension must be at least 1".into(),
            ));
        }
        if let Some(c) = columns.iter().find(|c| c.len() != n) {
            return Err(FrameError::DimensionMismatch {
                expected: n,
                found: c.len(),
            });
        }
        Ok(Self { n, columns })
    }

    /// Exact rational image of a floating frame (every finite `f64` is dyadic).
    pub fn from_frame(frame: &Frame) -> Self {
        let columns = frame
            .vectors()
            .into_iter()
            .map(|v| v.into_iter().map(rational_from_f64).collect())
            .collect();
        Self {
            n: frame.dim(),
            columns,
        }
    }

    /// Nearest floating frame.
    pub fn to_frame(&self) -> Result<Frame> {
        let cols: Vec<Vec<f64>> = self
            .columns
            .iter()
            .map(|c| c.iter().map(to_f64).collect())
            .collect();
        Frame::new(self.n, &cols)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn column(&self, k: usize) -> &[BigRational] {
        &self.columns[k]
    }

    pub fn is_zero_column(&self, k: usize) -> bool {
        self.columns[k].iter().all(Zero::is_zero)
    }
}

pub fn rational_from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite frame entry")
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Parses `p/q`, an integer, or a decimal with optional exponent
/// (`-0.8660254037844386467637231707529361834714026269051903`, `1.5e-3`).
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || FrameError::InvalidInput(format!("not a rational number: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part
            .chars()
            .chain(frac_part.chars())
            .all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut num: BigInt = if all.is_empty() {
        BigInt::zero()
    } else {
        all.parse().map_err(|_| bad())?
    };
    if neg {
        num = -num;
    }
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let r = if scale >= 0 {
        BigRational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(r)
}

/// `p/q` (or `p` for integers).
pub fn format_rational(x: &BigRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Exact `F(x)`.
pub fn f_vector_exact(x: &[BigRational]) -> Result<Vec<BigRational>> {
    let n = x.len();
    if n < 2 {
        return Err(FrameError::DimensionTooSmall(n));
    }
    let x1 = &x[0] * &x[0];
    let mut out: Vec<BigRational> = x[1..].iter().map(|xl| &x1 - xl * xl).collect();
    for k in 0..n - 1 {
        out.extend(x[k + 1..].iter().map(|xl| &x[k] * xl));
    }
    Ok(out)
}

/// Row echelon form computed by Bareiss fraction-free elimination.
#[derive(Clone, Debug)]
pub struct Echelon {
    /// Nonzero rows of the echelon form, integer entries.
    pub rows: Vec<Vec<BigInt>>,
    /// Pivot column of each row.
    pub pivots: Vec<usize>,
    pub cols: usize,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Basis of the null space, as primitive integer vectors.
    pub fn kernel(&self) -> Vec<Vec<BigInt>> {
        let free: Vec<usize> = (0..self.cols)
            .filter(|c| !self.pivots.contains(c))
            .collect();
        free.iter()
            .map(|&f| {
                let mut x = vec![BigRational::zero(); self.cols];
                x[f] = BigRational::one();
                for (r, &p) in self.rows.iter().zip(&self.pivots).rev() {
                    let mut acc = BigRational::zero();
                    for c in p + 1..self.cols {
                        if !r[c].is_zero() {
                            acc += BigRational::from_integer(r[c].clone()) * &x[c];
                        }
                    }
                    x[p] = -acc / BigRational::from_integer(r[p].clone());
                }
                primitive(&x)
            })
            .collect()
    }
}

/// Clears denominators and divides by the content.
fn primitive(x: &[BigRational]) -> Vec<BigInt> {
    let lcm = x.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let ints: Vec<BigInt> = x.iter().map(|v| v.numer() * (&lcm / v.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    if g.is_zero() || g.is_one() {
        ints
    } else {
        ints.into_iter().map(|v| v / &g).collect()
    }
}

/// Bareiss elimination on `rows` after scaling each to integers.
pub fn bareiss(rows: &[Vec<BigRational>]) -> Echelon {
    let cols = rows.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<BigInt>> = rows.iter().map(|r| primitive(r)).collect();
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..m.len() {
            for j in c + 1..cols {
                let (v, rem) = (&m[r][c] * &m[i][j] - &m[i][c] * &m[r][j]).div_rem(&prev);
                debug_assert!(rem.is_zero(), "Bareiss division must be exact");
                m[i][j] = v;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    Echelon {
        rows: m,
        pivots,
        cols,
    }
}

/// Solves a square system by Gaussian elimination; `None` when singular.
pub fn solve_square(a: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let n = b.len();
    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            let mut row = r.clone();
            row.push(bi.clone());
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero())?;
        m.swap(c, p);
        let pv = m[c][c].clone();
        for v in m[c].iter_mut() {
            *v = &*v / &pv;
        }
        for i in 0..n {
            if i != c && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let pivot_row = m[c].clone();
                for (v, pr) in m[i].iter_mut().zip(pivot_row) {
                    *v -= &f * pr;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n].clone()).collect())
}

/// All basic feasible solutions of `A u = b`, `u >= 0` (rows of `A` given).
pub fn enumerate_vertices(a: &[Vec<BigRational>], b: &[BigRational]) -> Vec<Vec<BigRational>> {
    let k = a.first().map_or(0, Vec::len);
    let aug: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            let mut row = r.clone();
            row.push(bi.clone());
            row
        })
        .collect();
    let ech = bareiss(&aug);
    if ech.pivots.last() == Some(&k) {
        return Vec::new();
    }
    let r = ech.rank();
    let a_red: Vec<Vec<BigRational>> = ech
        .rows
        .iter()
        .map(|row| {
            row[..k]
                .iter()
                .map(|v| BigRational::from_integer(v.clone()))
                .collect()
        })
        .collect();
    let b_red: Vec<BigRational> = ech
        .rows
        .iter()
        .map(|row| BigRational::from_integer(row[k].clone()))
        .collect();
    let mut out: Vec<Vec<BigRational>> = Vec::new();
    if r == 0 {
        return out;
    }
    for rank in 0..binomial(k, r) {
        let cols = unrank_combination(rank, k, r);
        let sq: Vec<Vec<BigRational>> = a_red
            .iter()
            .map(|row| cols.iter().map(|&c| row[c].clone()).collect())
            .collect();
        let Some(x) = solve_square(&sq, &b_red) else {
            continue;
        };
        if x.iter().any(Signed::is_negative) {
            continue;
        }
        let mut u = vec![BigRational::zero(); k];
        for (&c, v) in cols.iter().zip(x) {
            u[c] = v;
        }
        if !out.contains(&u) {
            out.push(u);
        }
    }
    out
}

/// Exact separator `h` with `min_k ⟨F(φ_k), h⟩ = margin > 0` and `|h|∞ <= 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactSeparator {
    pub h: Vec<BigRational>,
    pub margin: BigRational,
}

/// Exact decision for a subset of a rational frame.
#[derive(Clone, Debug)]
pub struct ExactVerdict {
    /// Nonzero columns of the requested subset, in order.
    pub subset: Vec<usize>,
    pub scalable: bool,
    /// Some kernel vector is positive on every index of `subset`.
    pub strict: bool,
    /// Dimension of `ker F(Φ_subset)`.
    pub kernel_dim: usize,
    /// Vertices of `{F u = 0, Σu = 1, u >= 0}`, indexed like `subset`.
    pub vertices: Vec<Vec<BigRational>>,
    /// Weights over all frame indices: the vertex barycenter (positive on the
    /// union of vertex supports), normalized to sum one.
    pub weights: Option<Vec<BigRational>>,
    /// Optimal value of the max-min-weight program.
    pub min_weight: Option<BigRational>,
    pub separator: Option<ExactSeparator>,
}

impl ExactVerdict {
    /// Optimal separator margin `t*` (zero when scalable).
    pub fn margin(&self) -> BigRational {
        self.separator
            .as_ref()
            .map_or_else(BigRational::zero, |s| s.margin.clone())
    }
}

fn check_subset(len: usize, subset: &[usize]) -> Result<()> {
    match subset.iter().find(|&&k| k >= len) {
        Some(&index) => Err(FrameError::IndexOutOfRange { index, len }),
        None => Ok(()),
    }
}

/// Decides scalability of `Φ_subset` exactly.
///
/// Zero columns are dropped from the subset. Scalability is read off the
/// vertex set; the separator and the max-min weight come from the rational
/// simplex and must agree with it.
pub fn exact_oracle(frame: &RationalFrame, subset: &[usize]) -> Result<ExactVerdict> {
    check_subset(frame.len(), subset)?;
    if frame.dim() < 2 {
        return Err(FrameError::DimensionTooSmall(frame.dim()));
    }
    let eff: Vec<usize> = subset
        .iter()
        .copied()
        .filter(|&k| !frame.is_zero_column(k))
        .collect();
    if eff.is_empty() {
        return Err(FrameError::EmptySubset);
    }
    if eff.len() > EXACT_BUDGET {
        return Err(FrameError::TooLarge {
            size: eff.len(),
            limit: EXACT_BUDGET,
        });
    }
    let cols: Vec<Vec<BigRational>> = eff
        .iter()
        .map(|&k| f_vector_exact(frame.column(k)))
        .collect::<Result<_>>()?;
    let d = cols[0].len();
    let k = eff.len();
    let f_rows: Vec<Vec<BigRational>> = (0..d)
        .map(|i| cols.iter().map(|c| c[i].clone()).collect())
        .collect();
    let kernel_dim = k - bareiss(&f_rows).rank();

    let mut a = f_rows.clone();
    a.push(vec![BigRational::one(); k]);
    let mut b = vec![BigRational::zero(); d];
    b.push(BigRational::one());
    let vertices = enumerate_vertices(&a, &b);
    let scalable = !vertices.is_empty();

    let mut verdict = ExactVerdict {
        subset: eff.clone(),
        scalable,
        strict: false,
        kernel_dim,
        vertices,
        weights: None,
        min_weight: None,
        separator: None,
    };

    if scalable {
        verdict.strict = (0..k).all(|j| verdict.vertices.iter().any(|v| v[j].is_positive()));
        let count = BigRational::from_integer(verdict.vertices.len().into());
        let mut w = vec![BigRational::zero(); frame.len()];
        for v in &verdict.vertices {
            for (j, &idx) in eff.iter().enumerate() {
                w[idx] += &v[j] / &count;
            }
        }
        verdict.weights = Some(w);
        let s_star = match solve(&strict_lp(&cols))? {
            LpOutcome::Optimal(sol) => strict_from_solution(&sol, k).1,
            _ => {
                return Err(FrameError::ExactInconsistency(
                    "vertices exist but the max-min-weight program failed".into(),
                ))
            }
        };
        if s_star.is_positive() != verdict.strict {
            return Err(FrameError::ExactInconsistency(
                "vertex supports and max-min weight disagree on strictness".into(),
            ));
        }
        verdict.min_weight = Some(s_star);
    } else {
        let LpOutcome::Optimal(sol) = solve(&separator_lp(&cols))? else {
            return Err(FrameError::ExactInconsistency(
                "separator program not optimal".into(),
            ));
        };
        let (h, margin) = separator_from_solution(&sol, d);
        if !margin.is_positive() {
            return Err(FrameError::ExactInconsistency(
                "no vertices but the separator margin is zero".into(),
            ));
        }
        verdict.separator = Some(ExactSeparator { h, margin });
    }
    Ok(verdict)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn rf(n: usize, cols: &[&[i64]]) -> RationalFrame {
        RationalFrame::new(
            n,
            cols.iter()
                .map(|c| c.iter().map(|&v| q(v, 1)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn parse_rationals() {
        assert_eq!(parse_rational("3/4").unwrap(), q(3, 4));
        assert_eq!(parse_rational("-2").unwrap(), q(-2, 1));
        assert_eq!(parse_rational("0.125").unwrap(), q(1, 8));
        assert_eq!(parse_rational("-1.5e-2").unwrap(), q(-3, 200));
        assert_eq!(parse_rational("2E3").unwrap(), q(2000, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational(".").is_err());
        assert_eq!(format_rational(&q(6, -4)), "-3/2");
        assert_eq!(format_rational(&q(4, 2)), "2");
    }

    #[test]
    fn bareiss_kernel() {
        let rows = vec![
            vec![q(1, 1), q(2, 1), q(3, 1)],
            vec![q(2, 1), q(4, 1), q(6, 1)],
        ];
        let e = bareiss(&rows);
        assert_eq!(e.rank(), 1);
        let ker = e.kernel();
        assert_eq!(ker.len(), 2);
        for v in ker {
            let dot: BigInt = v
                .iter()
                .zip([1, 2, 3])
                .map(|(x, c)| x * BigInt::from(c))
                .sum();
            assert!(dot.is_zero());
        }
    }

    #[test]
    fn onb_has_unique_vertex() {
        let v = exact_oracle(&rf(2, &[&[1, 0], &[0, 1]]), &[0, 1]).unwrap();
        assert!(v.scalable && v.strict);
        assert_eq!(v.vertices, vec![vec![q(1, 2), q(1, 2)]]);
        assert_eq!(v.kernel_dim, 1);
    }

    #[test]
    fn quadrant_frame_has_exact_separator() {
        let v = exact_oracle(&rf(2, &[&[1, 1], &[2, 1], &[1, 2]]), &[0, 1, 2]).unwrap();
        assert!(!v.scalable);
        let sep = v.separator.unwrap();
        assert!(sep.margin.is_positive());
        for x in [[1, 1], [2, 1], [1, 2]] {
            let fx = f_vector_exact(&[q(x[0], 1), q(x[1], 1)]).unwrap();
            let ip: BigRational = fx.iter().zip(&sep.h).map(|(a, b)| a * b).sum();
            assert!(ip >= sep.margin);
        }
    }

    #[test]
    fn onb_plus_diagonal_forces_zero_weight() {
        // {e1, e2, e3, (1,1,1)}: the off-diagonal equations force the last weight to zero.
        let v = exact_oracle(
            &rf(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, 1]]),
            &[0, 1, 2, 3],
        )
        .unwrap();
        assert!(v.scalable && !v.strict);
        assert!(v.vertices.iter().all(|u| u[3].is_zero()));
        assert_eq!(v.min_weight, Some(BigRational::zero()));
    }

    #[test]
    fn zero_columns_are_skipped() {
        let v = exact_oracle(&rf(2, &[&[1, 0], &[0, 0], &[0, 1]]), &[0, 1, 2]).unwrap();
        assert_eq!(v.subset, vec![0, 2]);
        assert!(v.scalable);
        assert!(matches!(
            exact_oracle(&rf(2, &[&[1, 0], &[0, 0], &[0, 1]]), &[1]),
            Err(FrameError::EmptySubset)
        ));
    }
}
