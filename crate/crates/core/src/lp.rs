//! Dense two-phase simplex with Bland's rule, generic over the scalar field.
//!
//! The same code runs on `f64` (signs decided with an absolute tolerance) and
//! on `BigRational` (signs decided exactly). Problems are given in standard
//! form: minimize `cᵀx` subject to `Ax = b`, `x >= 0`.

use std::cmp::Ordering;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{FrameError, Result};

/// Absolute tolerance used for sign decisions on `f64`.
pub const F64_EPS: f64 = 1e-11;

/// Phase-one residual below which an `f64` program counts as feasible.
pub const F64_FEASIBILITY: f64 = 1e-9;

const MAX_PIVOTS: usize = 50_000;

/// Field operations plus a sign test. `f64` treats `|x| <= F64_EPS` as zero.
pub trait LpScalar:
    Clone
    + Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn sign(&self) -> Ordering;

    fn is_pos(&self) -> bool {
        self.sign() == Ordering::Greater
    }

    fn is_neg(&self) -> bool {
        self.sign() == Ordering::Less
    }

    fn is_nonzero(&self) -> bool {
        self.sign() != Ordering::Equal
    }

    fn from_usize(v: usize) -> Self;

    /// Whether a phase-one optimum this large proves infeasibility.
    fn proves_infeasible(&self) -> bool {
        self.is_pos()
    }
}

impl LpScalar for f64 {
    fn sign(&self) -> Ordering {
        if *self > F64_EPS {
            Ordering::Greater
        } else if *self < -F64_EPS {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }

    fn from_usize(v: usize) -> Self {
        v as f64
    }

    fn proves_infeasible(&self) -> bool {
        *self > F64_FEASIBILITY
    }
}

impl LpScalar for BigRational {
    fn sign(&self) -> Ordering {
        if self.is_positive() {
            Ordering::Greater
        } else if self.is_negative() {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }

    fn from_usize(v: usize) -> Self {
        BigRational::from_integer(v.into())
    }
}

/// `min cᵀx` s.t. `Ax = b`, `x >= 0`, with `A` stored by rows.
#[derive(Clone, Debug)]
pub struct StandardLp<T> {
    pub a: Vec<Vec<T>>,
    pub b: Vec<T>,
    pub c: Vec<T>,
}

#[derive(Clone, Debug)]
pub struct LpSolution<T> {
    pub x: Vec<T>,
    pub objective: T,
    /// Basic variable of each surviving row (redundant rows removed).
    pub basis: Vec<usize>,
}

#[derive(Clone, Debug)]
pub enum LpOutcome<T> {
    Optimal(LpSolution<T>),
    /// Phase one ended with a positive sum of artificial variables.
    Infeasible {
        phase_one: T,
    },
    Unbounded,
}

struct Tableau<T> {
    rows: Vec<Vec<T>>,
    rhs: Vec<T>,
    basis: Vec<usize>,
    /// Reduced costs and the negated objective value.
    cost: Vec<T>,
    value: T,
}

impl<T: LpScalar> Tableau<T> {
    fn pivot(&mut self, r: usize, col: usize) {
        let p = self.rows[r][col].clone();
        for v in self.rows[r].iter_mut() {
            *v = v.clone() / p.clone();
        }
        self.rhs[r] = self.rhs[r].clone() / p;
        let prow = self.rows[r].clone();
        let prhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][col].clone();
            if f.is_zero() {
                continue;
            }
            for (v, pv) in self.rows[i].iter_mut().zip(&prow) {
                *v = v.clone() - f.clone() * pv.clone();
            }
            self.rhs[i] = self.rhs[i].clone() - f * prhs.clone();
        }
        let f = self.cost[col].clone();
        if !f.is_zero() {
            for (v, pv) in self.cost.iter_mut().zip(&prow) {
                *v = v.clone() - f.clone() * pv.clone();
            }
            self.value = self.value.clone() - f * prhs;
        }
        self.basis[r] = col;
    }

    fn set_costs(&mut self, c: &[T]) {
        self.cost = c.to_vec();
        self.value = T::zero();
        for (i, &bv) in self.basis.iter().enumerate() {
            let cb = c[bv].clone();
            if cb.is_zero() {
                continue;
            }
            for (v, a) in self.cost.iter_mut().zip(&self.rows[i]) {
                *v = v.clone() - cb.clone() * a.clone();
            }
            self.value = self.value.clone() - cb * self.rhs[i].clone();
        }
    }

    /// Runs Bland's rule over columns `< allowed`. Returns false on unboundedness.
    fn optimize(&mut self, allowed: usize) -> Result<bool> {
        for _ in 0..MAX_PIVOTS {
            let Some(col) = (0..allowed).find(|&j| self.cost[j].is_neg()) else {
                return Ok(true);
            };
            let mut best: Option<(usize, T)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][col];
                if !a.is_pos() {
                    continue;
                }
                let ratio = self.rhs[i].clone() / a.clone();
                best = match best {
                    None => Some((i, ratio)),
                    Some((bi, br)) => match (ratio.clone() - br.clone()).sign() {
                        Ordering::Less => Some((i, ratio)),
                        Ordering::Equal if self.basis[i] < self.basis[bi] => Some((i, ratio)),
                        _ => Some((bi, br)),
                    },
                };
            }
            match best {
                None => return Ok(false),
                Some((r, _)) => self.pivot(r, col),
            }
        }
        Err(FrameError::LpNumericalFailure(format!(
            "no convergence after {MAX_PIVOTS} pivots"
        )))
    }
}

/// Solves a standard-form LP.
pub fn solve<T: LpScalar>(lp: &StandardLp<T>) -> Result<LpOutcome<T>> {
    let m = lp.a.len();
    let n = lp.c.len();
    if lp.b.len() != m || lp.a.iter().any(|r| r.len() != n) {
        return Err(FrameError::LpNumericalFailure(
            "inconsistent LP dimensions".into(),
        ));
    }
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for (i, (row, bi)) in lp.a.iter().zip(&lp.b).enumerate() {
        let flip = bi.is_neg();
        let mut r: Vec<T> = row
            .iter()
            .map(|v| if flip { -v.clone() } else { v.clone() })
            .collect();
        r.extend((0..m).map(|k| if k == i { T::one() } else { T::zero() }));
        rows.push(r);
        rhs.push(if flip { -bi.clone() } else { bi.clone() });
    }
    let mut t = Tableau {
        rows,
        rhs,
        basis: (n..n + m).collect(),
        cost: Vec::new(),
        value: T::zero(),
    };

    // Phase one: minimize the sum of artificials.
    let mut c1 = vec![T::zero(); n + m];
    c1[n..].iter_mut().for_each(|v| *v = T::one());
    t.set_costs(&c1);
    t.optimize(n)?;
    let phase_one = -t.value.clone();
    if phase_one.proves_infeasible() {
        return Ok(LpOutcome::Infeasible { phase_one });
    }

    // Drive artificials out of the basis; drop rows that are redundant.
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= n {
            match (0..n).find(|&j| t.rows[i][j].is_nonzero()) {
                Some(j) => t.pivot(i, j),
                None => {
                    t.rows.remove(i);
                    t.rhs.remove(i);
                    t.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }

    let mut c2 = lp.c.clone();
    c2.extend((0..m).map(|_| T::zero()));
    t.set_costs(&c2);
    if !t.optimize(n)? {
        return Ok(LpOutcome::Unbounded);
    }
    let mut x = vec![T::zero(); n];
    for (i, &bv) in t.basis.iter().enumerate() {
        x[bv] = t.rhs[i].clone();
    }
    Ok(LpOutcome::Optimal(LpSolution {
        x,
        objective: -t.value,
        basis: t.basis,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn small_lp_float() {
        // max x + y s.t. x + 2y + s1 = 4, 3x + y + s2 = 6.
        let lp = StandardLp {
            a: vec![vec![1.0, 2.0, 1.0, 0.0], vec![3.0, 1.0, 0.0, 1.0]],
            b: vec![4.0, 6.0],
            c: vec![-1.0, -1.0, 0.0, 0.0],
        };
        let LpOutcome::Optimal(sol) = solve(&lp).unwrap() else {
            panic!()
        };
        assert!((sol.objective + 2.8).abs() < 1e-12);
        assert!((sol.x[0] - 1.6).abs() < 1e-12 && (sol.x[1] - 1.2).abs() < 1e-12);
    }

    #[test]
    fn small_lp_exact() {
        let lp = StandardLp {
            a: vec![
                vec![q(1, 1), q(2, 1), q(1, 1), q(0, 1)],
                vec![q(3, 1), q(1, 1), q(0, 1), q(1, 1)],
            ],
            b: vec![q(4, 1), q(6, 1)],
            c: vec![q(-1, 1), q(-1, 1), q(0, 1), q(0, 1)],
        };
        let LpOutcome::Optimal(sol) = solve(&lp).unwrap() else {
            panic!()
        };
        assert_eq!(sol.objective, q(-14, 5));
        assert_eq!(sol.x[0], q(8, 5));
    }

    #[test]
    fn infeasible_and_unbounded() {
        let lp = StandardLp {
            a: vec![vec![1.0, 1.0]],
            b: vec![-1.0],
            c: vec![0.0, 0.0],
        };
        assert!(matches!(solve(&lp).unwrap(), LpOutcome::Infeasible { .. }));
        let lp = StandardLp {
            a: vec![vec![1.0, -1.0]],
            b: vec![0.0],
            c: vec![-1.0, 0.0],
        };
        assert!(matches!(solve(&lp).unwrap(), LpOutcome::Unbounded));
    }

    #[test]
    fn redundant_rows_are_dropped() {
        let lp = StandardLp {
            a: vec![vec![1.0, 1.0], vec![2.0, 2.0]],
            b: vec![1.0, 2.0],
            c: vec![1.0, 2.0],
        };
        let LpOutcome::Optimal(sol) = solve(&lp).unwrap() else {
            panic!()
        };
        assert_eq!(sol.basis.len(), 1);
        assert!((sol.objective - 1.0).abs() < 1e-12);
    }
}
