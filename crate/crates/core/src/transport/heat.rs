//! Explicit heat flow on a periodic grid, and the level-stopped flow.
//!
//! The grid is treated as a torus so mass is conserved without boundary
//! modeling; this is a surrogate for the heat flow on R^n, adequate for
//! the entropy-monotonicity and non-expansiveness checks.

use crate::error::{Result, W2Error};
use crate::measures::{energy, EnergyFunctional, GridMeasure};

/// Largest stable explicit step for the grid: min cell width squared
/// divided by 4n.
pub fn stability_bound(mu: &GridMeasure) -> f64 {
    let min_w = mu.cell_widths().into_iter().fold(f64::INFINITY, f64::min);
    min_w * min_w / (4.0 * mu.dim() as f64)
}

/// Runs the periodic heat flow for the given duration with an
/// automatically chosen stable step.
pub fn heat_flow(mu: &GridMeasure, time: f64) -> Result<GridMeasure> {
    let dt = 0.9 * stability_bound(mu);
    heat_flow_with_dt(mu, time, dt)
}

/// Runs the periodic heat flow for the given duration using step `dt`.
pub fn heat_flow_with_dt(mu: &GridMeasure, time: f64, dt: f64) -> Result<GridMeasure> {
    let bound = stability_bound(mu);
    if dt > bound {
        return Err(W2Error::UnstableStep { dt, bound });
    }
    if time <= 0.0 {
        return Ok(mu.clone());
    }
    let steps = (time / dt).ceil() as usize;
    let last = time - dt * (steps - 1) as f64;
    let mut state = mu.cell_mass().to_vec();
    for s in 0..steps {
        let step_dt = if s + 1 == steps { last } else { dt };
        state = heat_step(mu, &state, step_dt);
    }
    let total: f64 = state.iter().sum();
    for m in &mut state {
        *m /= total;
    }
    mu.with_cell_mass(state)
}

/// One explicit step in flux form: every pair of axis-adjacent cells
/// exchanges coef * (difference), so the total is conserved up to
/// rounding.
fn heat_step(grid: &GridMeasure, mass: &[f64], dt: f64) -> Vec<f64> {
    let widths = grid.cell_widths();
    let mut next = mass.to_vec();
    let cells = mass.len();
    for axis in 0..grid.dim() {
        let coef = dt / (widths[axis] * widths[axis]);
        let res = grid.resolution()[axis];
        for c in 0..cells {
            let idx = grid.unravel(c);
            let mut nb = idx.clone();
            nb[axis] = (idx[axis] + 1) % res;
            let d = grid.ravel(&nb);
            if d == c {
                continue; // resolution 1 along this axis
            }
            let flux = coef * (mass[d] - mass[c]);
            next[c] += flux;
            next[d] -= flux;
        }
    }
    next
}

/// Result of running the stopped flow.
#[derive(Debug, Clone)]
pub struct StoppedFlow {
    pub state: GridMeasure,
    pub steps: usize,
    /// True when the energy level was reached (or already satisfied).
    pub reached: bool,
    pub energy_trace: Vec<f64>,
}

/// Heat steps until `energy(state, f) <= level`, returning the first state
/// at or below the level. States already at or below the level are fixed
/// points and are returned unchanged.
pub fn stopped_flow(
    mu: &GridMeasure,
    f: &EnergyFunctional,
    level: f64,
    dt: f64,
    max_steps: usize,
) -> Result<StoppedFlow> {
    let bound = stability_bound(mu);
    if dt > bound {
        return Err(W2Error::UnstableStep { dt, bound });
    }
    let mut state = mu.cell_mass().to_vec();
    let mut trace = vec![energy(mu, f)?];
    if trace[0] <= level {
        return Ok(StoppedFlow { state: mu.clone(), steps: 0, reached: true, energy_trace: trace });
    }
    for step in 1..=max_steps {
        state = heat_step(mu, &state, dt);
        let total: f64 = state.iter().sum();
        for m in &mut state {
            *m /= total;
        }
        let g = mu.with_cell_mass(state.clone())?;
        let e = energy(&g, f)?;
        trace.push(e);
        if e <= level {
            return Ok(StoppedFlow { state: g, steps: step, reached: true, energy_trace: trace });
        }
    }
    let g = mu.with_cell_mass(state)?;
    Ok(StoppedFlow { state: g, steps: max_steps, reached: false, energy_trace: trace })
}
