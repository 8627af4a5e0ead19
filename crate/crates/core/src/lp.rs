//! Dense two-phase primal simplex for small equality-form linear programs.
//!
//! Solves `min c'x  s.t.  Ax = b, x >= 0` and returns optimal duals so
//! callers can certify solutions through the duality gap. Sizes here are
//! desk scale (a few hundred rows, a few thousand columns), so a dense
//! tableau is the simplest correct choice.

use crate::error::{Result, W2Error};

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub cost: f64,
    /// One dual multiplier per (surviving) constraint row, in input order.
    /// Redundant rows removed during phase 1 carry dual 0.
    pub duals: Vec<f64>,
    /// Primal cost minus dual objective b'y.
    pub duality_gap: f64,
}

const PIVOT_TOL: f64 = 1e-9;
const FEAS_TOL: f64 = 1e-7;

struct Tableau {
    rows: usize,
    cols: usize, // structural + artificial
    n_struct: usize,
    data: Vec<f64>, // rows x (cols + 1), last column rhs
    basis: Vec<usize>,
    red: Vec<f64>, // reduced-cost row, len cols + 1 (last = -objective)
}

impl Tableau {
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * (self.cols + 1) + c]
    }

    fn at_mut(&mut self, r: usize, c: usize) -> &mut f64 {
        &mut self.data[r * (self.cols + 1) + c]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.cols)
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.cols + 1;
        let piv = self.at(pr, pc);
        let inv = 1.0 / piv;
        for c in 0..w {
            self.data[pr * w + c] *= inv;
        }
        for r in 0..self.rows {
            if r == pr {
                continue;
            }
            let f = self.at(r, pc);
            if f != 0.0 {
                for c in 0..w {
                    self.data[r * w + c] -= f * self.data[pr * w + c];
                }
                *self.at_mut(r, pc) = 0.0;
            }
        }
        let f = self.red[pc];
        if f != 0.0 {
            for c in 0..w {
                self.red[c] -= f * self.data[pr * w + c];
            }
            self.red[pc] = 0.0;
        }
        self.basis[pr] = pc;
    }

    /// Runs simplex on the current reduced-cost row. `allowed` filters
    /// entering columns. Dantzig rule with a Bland fallback for
    /// anti-cycling after a pivot budget.
    fn optimize(&mut self, allowed: impl Fn(usize) -> bool) -> Result<()> {
        let max_iter = 200 * (self.rows + self.cols);
        let bland_after = 50 * (self.rows + self.cols);
        for iter in 0..max_iter {
            let bland = iter > bland_after;
            let mut enter = None;
            if bland {
                for c in 0..self.cols {
                    if allowed(c) && self.red[c] < -PIVOT_TOL {
                        enter = Some(c);
                        break;
                    }
                }
            } else {
                let mut best = -PIVOT_TOL;
                for c in 0..self.cols {
                    if allowed(c) && self.red[c] < best {
                        best = self.red[c];
                        enter = Some(c);
                    }
                }
            }
            let Some(pc) = enter else { return Ok(()) };
            // ratio test, smallest row index on ties
            let mut pr = None;
            let mut best_ratio = f64::INFINITY;
            for r in 0..self.rows {
                let a = self.at(r, pc);
                if a > PIVOT_TOL {
                    let ratio = self.rhs(r) / a;
                    if ratio < best_ratio - 1e-12 {
                        best_ratio = ratio;
                        pr = Some(r);
                    }
                }
            }
            let Some(pr) = pr else { return Err(W2Error::Unbounded) };
            self.pivot(pr, pc);
        }
        Err(W2Error::Other("simplex iteration limit exceeded".into()))
    }
}

/// Solves `min c'x  s.t.  Ax = b, x >= 0`. `a` holds the constraint rows.
pub fn solve_lp(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> Result<LpSolution> {
    let rows = a.len();
    let n = c.len();
    assert_eq!(b.len(), rows);
    for row in a {
        assert_eq!(row.len(), n);
    }
    let cols = n + rows;
    let w = cols + 1;
    let mut data = vec![0.0; rows * w];
    for (r, row) in a.iter().enumerate() {
        let sign = if b[r] < 0.0 { -1.0 } else { 1.0 };
        for (cidx, &v) in row.iter().enumerate() {
            data[r * w + cidx] = sign * v;
        }
        data[r * w + n + r] = 1.0;
        data[r * w + cols] = sign * b[r];
    }
    let mut t = Tableau {
        rows,
        cols,
        n_struct: n,
        data,
        basis: (n..n + rows).collect(),
        red: vec![0.0; w],
    };

    // Phase 1: minimize the sum of artificials.
    for cidx in 0..n {
        let mut s = 0.0;
        for r in 0..rows {
            s -= t.at(r, cidx);
        }
        t.red[cidx] = s;
    }
    let mut s = 0.0;
    for r in 0..rows {
        s -= t.rhs(r);
    }
    t.red[cols] = s;
    t.optimize(|c| c < n)?;
    let phase1 = -t.red[cols];
    if phase1 > FEAS_TOL {
        return Err(W2Error::Infeasible(phase1));
    }

    // Drive artificials at zero level out of the basis where possible;
    // rows where that fails are redundant and get zeroed.
    let mut dead_rows = vec![false; rows];
    for r in 0..rows {
        if t.basis[r] >= n {
            let mut found = None;
            for cidx in 0..n {
                if t.at(r, cidx).abs() > 1e-7 {
                    found = Some(cidx);
                    break;
                }
            }
            match found {
                Some(cidx) => t.pivot(r, cidx),
                None => dead_rows[r] = true,
            }
        }
    }

    // Phase 2 objective.
    t.red = vec![0.0; w];
    for cidx in 0..n {
        t.red[cidx] = c[cidx];
    }
    for r in 0..rows {
        let bc = t.basis[r];
        let f = if bc < n { c[bc] } else { 0.0 };
        if f != 0.0 {
            for cc in 0..w {
                t.red[cc] -= f * t.data[r * w + cc];
            }
        }
    }
    for r in 0..rows {
        t.red[t.basis[r]] = 0.0;
    }
    let n_struct = t.n_struct;
    t.optimize(move |cidx| cidx < n_struct)?;

    let mut x = vec![0.0; n];
    for r in 0..rows {
        if t.basis[r] < n {
            x[t.basis[r]] = t.rhs(r).max(0.0);
        }
    }
    let cost: f64 = x.iter().zip(c).map(|(xi, ci)| xi * ci).sum();
    // Duals from the artificial columns: the phase-2 reduced cost of
    // artificial i is -y_i (its cost is zero), modulo the row-sign flip
    // applied when b_i was negative.
    let mut duals = vec![0.0; rows];
    for r in 0..rows {
        if dead_rows[r] {
            continue;
        }
        let sign = if b[r] < 0.0 { -1.0 } else { 1.0 };
        duals[r] = sign * -t.red[n + r];
    }
    let dual_obj: f64 = duals.iter().zip(b).map(|(y, bi)| y * bi).sum();
    Ok(LpSolution { x, cost, duals, duality_gap: cost - dual_obj })
}
