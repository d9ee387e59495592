//! Dense two-phase simplex for the small linear programs embedded in the
//! polytope-uncertainty solver:
//!
//! ```text
//! minimize    costᵀ y
//! subject to  G y ≥ h,  y ≥ 0
//! ```
//!
//! Bland's rule guards against cycling; optimal dual multipliers are read off
//! the surplus columns, so strong duality and complementary slackness can be
//! verified by the caller.

use ndarray::{Array1, Array2};

use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Primal/dual pair at an optimum.
#[derive(Debug, Clone)]
pub struct LpOptimal<S> {
    pub y: Array1<S>,
    /// Multipliers of `G y ≥ h`; nonnegative at an optimum.
    pub dual: Array1<S>,
    pub objective: S,
}

#[derive(Debug, Clone)]
pub enum LpOutcome<S> {
    Optimal(LpOptimal<S>),
    Infeasible,
    Unbounded,
}

impl<S> LpOutcome<S> {
    pub fn status(&self) -> LpStatus {
        match self {
            LpOutcome::Optimal(_) => LpStatus::Optimal,
            LpOutcome::Infeasible => LpStatus::Infeasible,
            LpOutcome::Unbounded => LpStatus::Unbounded,
        }
    }

    pub fn optimal(&self) -> Option<&LpOptimal<S>> {
        match self {
            LpOutcome::Optimal(o) => Some(o),
            _ => None,
        }
    }
}

struct Tableau<S> {
    /// `rows x (ncols + 1)`; the last column is the right-hand side.
    t: Array2<S>,
    basis: Vec<usize>,
    ncols: usize,
}

impl<S: Scalar> Tableau<S> {
    fn rhs(&self, row: usize) -> S {
        self.t[[row, self.ncols]]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let piv = self.t[[row, col]];
        for j in 0..=self.ncols {
            self.t[[row, j]] /= piv;
        }
        for r in 0..self.t.nrows() {
            if r == row {
                continue;
            }
            let f = self.t[[r, col]];
            if f == S::zero() {
                continue;
            }
            for j in 0..=self.ncols {
                let v = self.t[[row, j]];
                self.t[[r, j]] -= f * v;
            }
        }
        self.basis[row] = col;
    }

    /// Minimize `cost` over the current feasible basis. `allowed` filters the
    /// columns that may enter. Returns false if unbounded.
    fn run(&mut self, cost: &[S], allowed: &dyn Fn(usize) -> bool, eps: S) -> bool {
        let rows = self.basis.len();
        loop {
            // reduced costs from scratch each round: z_j = c_j - c_Bᵀ t_j.
            // Desk-scale tableaus make this affordable and drift-free.
            let mut entering = None;
            for j in 0..self.ncols {
                if !allowed(j) || self.basis.contains(&j) {
                    continue;
                }
                let mut red = cost[j];
                for (i, &bi) in self.basis.iter().enumerate() {
                    red -= cost[bi] * self.t[[i, j]];
                }
                if red < -eps {
                    entering = Some(j); // Bland: first (smallest) index
                    break;
                }
            }
            let Some(col) = entering else { return true };
            let mut leaving: Option<(usize, S)> = None;
            for i in 0..rows {
                let a = self.t[[i, col]];
                if a > eps {
                    let ratio = self.rhs(i) / a;
                    let better = match leaving {
                        None => true,
                        Some((li, lr)) => {
                            ratio < lr - eps
                                || (ratio <= lr + eps && self.basis[i] < self.basis[li])
                        }
                    };
                    if better {
                        leaving = Some((i, ratio));
                    }
                }
            }
            let Some((row, _)) = leaving else {
                return false;
            };
            self.pivot(row, col);
        }
    }
}

/// Solve `min costᵀy  s.t.  G y ≥ h, y ≥ 0` by the two-phase simplex method.
pub fn lp_solve<S: Scalar>(cost: &Array1<S>, g: &Array2<S>, h: &Array1<S>) -> Result<LpOutcome<S>> {
    let n = cost.len();
    let k = g.nrows();
    if g.ncols() != n || h.len() != k {
        return Err(Error::DimensionMismatch(format!(
            "lp_solve: cost {}, G {}x{}, h {}",
            n,
            g.nrows(),
            g.ncols(),
            k
        )));
    }
    let eps = S::lit(1e-9);
    if k == 0 {
        if cost.iter().any(|&c| c < -eps) {
            return Ok(LpOutcome::Unbounded);
        }
        return Ok(LpOutcome::Optimal(LpOptimal {
            y: Array1::zeros(n),
            dual: Array1::zeros(0),
            objective: S::zero(),
        }));
    }

    // standard form: (D G) y - D s = D h with D flipping rows so the rhs is
    // nonnegative, plus one artificial per row.
    let ncols = n + 2 * k;
    let mut t = Array2::zeros((k, ncols + 1));
    let mut flip = vec![false; k];
    for i in 0..k {
        let d = if h[i] < S::zero() {
            flip[i] = true;
            -S::one()
        } else {
            S::one()
        };
        for j in 0..n {
            t[[i, j]] = d * g[[i, j]];
        }
        t[[i, n + i]] = -d; // surplus
        t[[i, n + k + i]] = S::one(); // artificial
        t[[i, ncols]] = d * h[i];
    }
    let mut tab = Tableau {
        t,
        basis: (n + k..n + 2 * k).collect(),
        ncols,
    };

    // phase 1: drive the artificials to zero
    let mut phase1 = vec![S::zero(); ncols];
    for slot in phase1.iter_mut().skip(n + k) {
        *slot = S::one();
    }
    if !tab.run(&phase1, &|_| true, eps) {
        // min of a sum of nonnegative variables cannot be unbounded
        return Err(Error::InvalidInput(
            "phase-1 simplex reported unbounded".into(),
        ));
    }
    let infeas: S = tab
        .basis
        .iter()
        .enumerate()
        .filter(|(_, &b)| b >= n + k)
        .map(|(i, _)| tab.rhs(i))
        .fold(S::zero(), |a, b| a + b);
    let scale = S::one() + h.iter().fold(S::zero(), |a, &b| a + b.abs());
    if infeas > S::lit(1e-7) * scale {
        return Ok(LpOutcome::Infeasible);
    }
    // pivot lingering zero-level artificials out of the basis where possible
    for row in 0..k {
        if tab.basis[row] >= n + k {
            if let Some(col) = (0..n + k).find(|&j| tab.t[[row, j]].abs() > eps) {
                tab.pivot(row, col);
            }
        }
    }

    // phase 2 on the real cost; artificials may not re-enter
    let mut phase2 = vec![S::zero(); ncols];
    for j in 0..n {
        phase2[j] = cost[j];
    }
    if !tab.run(&phase2, &|j| j < n + k, eps) {
        return Ok(LpOutcome::Unbounded);
    }

    let mut y = Array1::zeros(n);
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < n {
            y[b] = tab.rhs(i);
        }
    }
    // dual multiplier of row i = reduced cost of its surplus column
    let mut dual = Array1::zeros(k);
    for i in 0..k {
        let j = n + i;
        let mut red = S::zero();
        for (r, &bi) in tab.basis.iter().enumerate() {
            red -= phase2[bi] * tab.t[[r, j]];
        }
        dual[i] = red.max(S::zero());
    }
    let objective = cost.dot(&y);
    Ok(LpOutcome::Optimal(LpOptimal { y, dual, objective }))
}
