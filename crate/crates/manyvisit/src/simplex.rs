//! Dense two-phase tableau simplex, generic over the scalar field.
//!
//! The same code runs in `f64` (fast, tolerance-based pivoting) and in
//! `BigRational` (exact, used as a fallback and by the independent
//! reference solver in tests). Problems are given in the form
//! `min c.x  s.t.  A x {<=,=,>=} b, x >= 0`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Scalar field the solver works over.
pub trait Scalar:
    Clone
    + PartialOrd
    + std::fmt::Debug
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Div<Output = Self>
    + std::ops::Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    /// Pivoting tolerance; exact fields return zero.
    fn eps() -> Self;
    fn abs_val(&self) -> Self;
    fn from_f64_approx(x: f64) -> Self;
    fn to_f64_approx(&self) -> f64;
}

impl Scalar for f64 {
    fn zero() -> f64 {
        0.0
    }
    fn one() -> f64 {
        1.0
    }
    fn eps() -> f64 {
        1e-9
    }
    fn abs_val(&self) -> f64 {
        self.abs()
    }
    fn from_f64_approx(x: f64) -> f64 {
        x
    }
    fn to_f64_approx(&self) -> f64 {
        *self
    }
}

impl Scalar for BigRational {
    fn zero() -> BigRational {
        <BigRational as Zero>::zero()
    }
    fn one() -> BigRational {
        <BigRational as One>::one()
    }
    fn eps() -> BigRational {
        <BigRational as Zero>::zero()
    }
    fn abs_val(&self) -> BigRational {
        Signed::abs(self)
    }
    fn from_f64_approx(x: f64) -> BigRational {
        BigRational::from_float(x).unwrap_or_else(|| BigRational::from(BigInt::from(0)))
    }
    fn to_f64_approx(&self) -> f64 {
        let n = self.numer();
        let d = self.denom();
        // Good enough for reporting; exact users keep the rational.
        let nf = n.to_string().parse::<f64>().unwrap_or(f64::NAN);
        let df = d.to_string().parse::<f64>().unwrap_or(f64::NAN);
        nf / df
    }
}

/// Row comparison operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Eq,
    Ge,
}

/// `min c.x  s.t.  rows, x >= 0`.
#[derive(Debug, Clone)]
pub struct LinearProgram<S> {
    pub num_vars: usize,
    pub objective: Vec<S>,
    pub rows: Vec<(Vec<S>, Cmp, S)>,
}

/// Result of a solve. `basis[i]` is the column (structural variable
/// `0..num_vars`, or slack `num_vars + j` where `j` counts the inequality
/// rows in order) that is basic in row `i`; `usize::MAX` marks a
/// redundant row whose artificial stayed basic at zero.
#[derive(Debug, Clone)]
pub enum LpOutcome<S> {
    Optimal {
        objective: S,
        x: Vec<S>,
        basis: Vec<usize>,
    },
    Infeasible,
    Unbounded,
}

const ITER_DANTZIG: usize = 20_000;
const ITER_MAX: usize = 200_000;

struct Tableau<S> {
    /// rows x (cols + 1); the last column is the rhs.
    t: Vec<Vec<S>>,
    rows: usize,
    cols: usize,
    basis: Vec<usize>,
}

impl<S: Scalar> Tableau<S> {
    fn rhs(&self, r: usize) -> &S {
        &self.t[r][self.cols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.t[r][c].clone();
        for j in 0..=self.cols {
            self.t[r][j] = self.t[r][j].clone() / piv.clone();
        }
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.t[i][c].clone();
            if f.abs_val() > S::zero() {
                for j in 0..=self.cols {
                    self.t[i][j] = self.t[i][j].clone() - f.clone() * self.t[r][j].clone();
                }
            }
        }
        self.basis[r] = c;
    }

    /// One simplex phase on the given cost row (dense reduced costs are
    /// recomputed from scratch each iteration for numerical robustness).
    /// `allowed` masks columns that may enter.
    fn run_phase(&mut self, cost: &[S], allowed: &[bool], iter_budget: &mut usize) -> Result<bool> {
        loop {
            if *iter_budget == 0 {
                return Err(Error::SolverStall("simplex iteration budget exhausted".into()));
            }
            *iter_budget -= 1;

            // Reduced costs: c_j - c_B . B^-1 A_j. The tableau already
            // stores B^-1 A, so accumulate the basic-cost combination.
            let mut best: Option<(usize, S)> = None;
            let bland = *iter_budget < ITER_MAX - ITER_DANTZIG;
            for j in 0..self.cols {
                if !allowed[j] {
                    continue;
                }
                let mut red = cost[j].clone();
                for i in 0..self.rows {
                    let cb = cost[self.basis[i]].clone();
                    if cb.abs_val() > S::zero() {
                        red = red - cb * self.t[i][j].clone();
                    }
                }
                let neg_enough = red < S::zero() - S::eps();
                if neg_enough {
                    if bland {
                        best = Some((j, red));
                        break;
                    }
                    match &best {
                        Some((_, r)) if red >= r.clone() => {}
                        _ => best = Some((j, red)),
                    }
                }
            }
            let Some((enter, _)) = best else {
                return Ok(true);
            };

            // Ratio test; smallest ratio, ties broken by smallest basis
            // column for anti-cycling.
            let mut leave: Option<(usize, S)> = None;
            for i in 0..self.rows {
                let a = self.t[i][enter].clone();
                if a > S::eps() {
                    let ratio = self.rhs(i).clone() / a;
                    match &leave {
                        None => leave = Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr.clone() - S::eps()
                                || (ratio.clone() - lr.clone()).abs_val() <= S::eps()
                                    && self.basis[i] < self.basis[*li]
                            {
                                leave = Some((i, ratio));
                            }
                        }
                    }
                }
            }
            let Some((leave_row, _)) = leave else {
                return Ok(false); // unbounded in this phase
            };
            self.pivot(leave_row, enter);
        }
    }
}

/// Solve the program. Deterministic for a fixed input.
pub fn solve_lp<S: Scalar>(lp: &LinearProgram<S>) -> Result<LpOutcome<S>> {
    let m = lp.rows.len();
    let nv = lp.num_vars;
    for (a, _, _) in &lp.rows {
        if a.len() != nv {
            return Err(Error::Internal("row length mismatch".into()));
        }
    }
    if lp.objective.len() != nv {
        return Err(Error::Internal("objective length mismatch".into()));
    }

    // Normalize to b >= 0 and count slacks.
    let mut norm: Vec<(Vec<S>, Cmp, S)> = Vec::with_capacity(m);
    for (a, cmp, b) in &lp.rows {
        if *b < S::zero() {
            let flipped = match cmp {
                Cmp::Le => Cmp::Ge,
                Cmp::Ge => Cmp::Le,
                Cmp::Eq => Cmp::Eq,
            };
            norm.push((
                a.iter().map(|v| -v.clone()).collect(),
                flipped,
                -b.clone(),
            ));
        } else {
            norm.push((a.clone(), *cmp, b.clone()));
        }
    }
    // Slack layout must match the ORIGINAL row order of inequality rows,
    // so assign slack ids before normalization reordering (there is no
    // reordering, only per-row sign flips, so ids follow `norm`).
    let mut slack_of_row: Vec<Option<usize>> = vec![None; m];
    let mut num_slacks = 0;
    for (i, (_, cmp, _)) in lp.rows.iter().enumerate() {
        if matches!(cmp, Cmp::Le | Cmp::Ge) {
            slack_of_row[i] = Some(num_slacks);
            num_slacks += 1;
        }
    }

    let cols = nv + num_slacks + m; // artificials appended per row
    let mut t: Vec<Vec<S>> = Vec::with_capacity(m);
    let mut basis = vec![0usize; m];
    for (i, (a, cmp, b)) in norm.iter().enumerate() {
        let mut row: Vec<S> = Vec::with_capacity(cols + 1);
        row.extend(a.iter().cloned());
        for _ in 0..num_slacks {
            row.push(S::zero());
        }
        for _ in 0..m {
            row.push(S::zero());
        }
        row.push(b.clone());
        if let Some(s) = slack_of_row[i] {
            // After normalization the slack sign may have flipped.
            let sign = match cmp {
                Cmp::Le => S::one(),
                Cmp::Ge => -S::one(),
                Cmp::Eq => unreachable!(),
            };
            row[nv + s] = sign;
        }
        row[nv + num_slacks + i] = S::one();
        basis[i] = nv + num_slacks + i;
        t.push(row);
    }
    let mut tab = Tableau {
        t,
        rows: m,
        cols,
        basis,
    };

    let mut iter_budget = ITER_MAX;

    // Phase 1: minimize the sum of artificials.
    let mut phase1_cost = vec![S::zero(); cols];
    for i in 0..m {
        phase1_cost[nv + num_slacks + i] = S::one();
    }
    let allowed1 = vec![true; cols];
    let done = tab.run_phase(&phase1_cost, &allowed1, &mut iter_budget)?;
    if !done {
        return Err(Error::Internal("phase 1 cannot be unbounded".into()));
    }
    let mut p1: S = S::zero();
    for i in 0..m {
        if tab.basis[i] >= nv + num_slacks {
            p1 = p1 + tab.rhs(i).clone();
        }
    }
    if p1 > S::eps() + S::eps() {
        return Ok(LpOutcome::Infeasible);
    }

    // Drive lingering artificials out of the basis where possible.
    for i in 0..m {
        if tab.basis[i] >= nv + num_slacks {
            let mut entered = false;
            for j in 0..nv + num_slacks {
                if tab.t[i][j].abs_val() > S::eps() {
                    tab.pivot(i, j);
                    entered = true;
                    break;
                }
            }
            if !entered {
                // Redundant row; keep the artificial pinned at zero.
            }
        }
    }

    // Phase 2: original objective; artificials may not re-enter.
    let mut phase2_cost = vec![S::zero(); cols];
    phase2_cost[..nv].clone_from_slice(&lp.objective);
    let mut allowed2 = vec![true; cols];
    for a in allowed2.iter_mut().skip(nv + num_slacks) {
        *a = false;
    }
    let done = tab.run_phase(&phase2_cost, &allowed2, &mut iter_budget)?;
    if !done {
        return Ok(LpOutcome::Unbounded);
    }

    let mut x = vec![S::zero(); nv];
    for i in 0..m {
        if tab.basis[i] < nv {
            x[tab.basis[i]] = tab.rhs(i).clone();
        }
    }
    let mut objective = S::zero();
    for j in 0..nv {
        objective = objective + lp.objective[j].clone() * x[j].clone();
    }
    let basis = tab
        .basis
        .iter()
        .map(|&b| if b < nv + num_slacks { b } else { usize::MAX })
        .collect();
    Ok(LpOutcome::Optimal {
        objective,
        x,
        basis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn tiny_f64_problem() {
        // min x + y s.t. x + 2y >= 4, 3x + y >= 6.
        let lp = LinearProgram {
            num_vars: 2,
            objective: vec![1.0, 1.0],
            rows: vec![
                (vec![1.0, 2.0], Cmp::Ge, 4.0),
                (vec![3.0, 1.0], Cmp::Ge, 6.0),
            ],
        };
        match solve_lp(&lp).unwrap() {
            LpOutcome::Optimal { objective, x, .. } => {
                assert!((x[0] - 1.6).abs() < 1e-7);
                assert!((x[1] - 1.2).abs() < 1e-7);
                assert!((objective - 2.8).abs() < 1e-7);
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn same_problem_exact() {
        let lp = LinearProgram {
            num_vars: 2,
            objective: vec![rat(1, 1), rat(1, 1)],
            rows: vec![
                (vec![rat(1, 1), rat(2, 1)], Cmp::Ge, rat(4, 1)),
                (vec![rat(3, 1), rat(1, 1)], Cmp::Ge, rat(6, 1)),
            ],
        };
        match solve_lp(&lp).unwrap() {
            LpOutcome::Optimal { objective, x, .. } => {
                assert_eq!(x[0], rat(8, 5));
                assert_eq!(x[1], rat(6, 5));
                assert_eq!(objective, rat(14, 5));
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn equalities_and_upper_bounds() {
        // min -x - 2y s.t. x + y = 3, y <= 2.
        let lp = LinearProgram {
            num_vars: 2,
            objective: vec![-1.0, -2.0],
            rows: vec![
                (vec![1.0, 1.0], Cmp::Eq, 3.0),
                (vec![0.0, 1.0], Cmp::Le, 2.0),
            ],
        };
        match solve_lp(&lp).unwrap() {
            LpOutcome::Optimal { objective, x, .. } => {
                assert!((x[0] - 1.0).abs() < 1e-7);
                assert!((x[1] - 2.0).abs() < 1e-7);
                assert!((objective + 5.0).abs() < 1e-7);
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn infeasible_detected() {
        let lp = LinearProgram {
            num_vars: 1,
            objective: vec![1.0],
            rows: vec![
                (vec![1.0], Cmp::Ge, 3.0),
                (vec![1.0], Cmp::Le, 2.0),
            ],
        };
        assert!(matches!(solve_lp(&lp).unwrap(), LpOutcome::Infeasible));
    }

    #[test]
    fn unbounded_detected() {
        let lp = LinearProgram {
            num_vars: 2,
            objective: vec![-1.0, 0.0],
            rows: vec![(vec![0.0, 1.0], Cmp::Le, 1.0)],
        };
        assert!(matches!(solve_lp(&lp).unwrap(), LpOutcome::Unbounded));
    }

    #[test]
    fn negative_rhs_normalization() {
        // min x s.t. -x <= -5  (i.e. x >= 5).
        let lp = LinearProgram {
            num_vars: 1,
            objective: vec![1.0],
            rows: vec![(vec![-1.0], Cmp::Le, -5.0)],
        };
        match solve_lp(&lp).unwrap() {
            LpOutcome::Optimal { x, .. } => assert!((x[0] - 5.0).abs() < 1e-7),
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn redundant_rows_are_tolerated() {
        // x + y = 2 stated twice plus the objective pulling both down.
        let lp = LinearProgram {
            num_vars: 2,
            objective: vec![1.0, 2.0],
            rows: vec![
                (vec![1.0, 1.0], Cmp::Eq, 2.0),
                (vec![1.0, 1.0], Cmp::Eq, 2.0),
            ],
        };
        match solve_lp(&lp).unwrap() {
            LpOutcome::Optimal { objective, basis, .. } => {
                assert!((objective - 2.0).abs() < 1e-7);
                // One row keeps its artificial (marked redundant).
                assert!(basis.contains(&usize::MAX));
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn degenerate_cycling_guard() {
        // A classic degenerate problem; Bland fallback must terminate.
        let lp = LinearProgram {
            num_vars: 4,
            objective: vec![-0.75, 150.0, -0.02, 6.0],
            rows: vec![
                (vec![0.25, -60.0, -0.04, 9.0], Cmp::Le, 0.0),
                (vec![0.5, -90.0, -0.02, 3.0], Cmp::Le, 0.0),
                (vec![0.0, 0.0, 1.0, 0.0], Cmp::Le, 1.0),
            ],
        };
        match solve_lp(&lp).unwrap() {
            LpOutcome::Optimal { objective, .. } => {
                assert!((objective + 0.05).abs() < 1e-7);
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }
}
