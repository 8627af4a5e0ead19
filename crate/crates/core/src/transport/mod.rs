//! Two-marginal optimal transport: exact network-simplex solver, entropic
//! Sinkhorn solver, W2 distance, displacement interpolation, barycentric
//! projection maps, and the stopped heat flow.

mod exact;
mod heat;
mod sinkhorn;

pub use heat::{heat_flow, heat_flow_with_dt, stability_bound, stopped_flow, StoppedFlow};
pub use sinkhorn::solve_sinkhorn;

use crate::error::{Result, W2Error};
use crate::measures::DiscreteMeasure;

/// Ground cost between two discrete supports.
#[derive(Debug, Clone)]
pub enum CostSpec {
    /// c(x, y) = |x - y|^2, the quadratic Wasserstein ground cost.
    SquaredEuclidean,
    /// Explicit source x target cost matrix (row-major).
    ExplicitMatrix(Vec<Vec<f64>>),
}

/// Coupling between two discrete measures together with Kantorovich duals.
#[derive(Debug, Clone)]
pub struct TransportPlan {
    pub source: DiscreteMeasure,
    pub target: DiscreteMeasure,
    /// Row-major source-support x target-support mass matrix.
    pub mass: Vec<f64>,
    pub dual_u: Vec<f64>,
    pub dual_v: Vec<f64>,
    pub cost_value: f64,
    /// False for regularized plans that stopped on the iteration cap.
    pub converged: bool,
}

impl TransportPlan {
    pub fn mass_at(&self, i: usize, j: usize) -> f64 {
        self.mass[i * self.target.len() + j]
    }

    /// Primal cost minus dual objective, normalized by the cost magnitude.
    pub fn duality_gap(&self) -> f64 {
        let dual: f64 = self
            .dual_u
            .iter()
            .zip(self.source.weights())
            .map(|(u, w)| u * w)
            .sum::<f64>()
            + self
                .dual_v
                .iter()
                .zip(self.target.weights())
                .map(|(v, w)| v * w)
                .sum::<f64>();
        self.cost_value - dual
    }

    /// Largest violation of the marginal constraints in L1.
    pub fn marginal_violation(&self) -> f64 {
        let (m, n) = (self.source.len(), self.target.len());
        let mut row_err = 0.0;
        for i in 0..m {
            let s: f64 = (0..n).map(|j| self.mass_at(i, j)).sum();
            row_err += (s - self.source.weights()[i]).abs();
        }
        let mut col_err = 0.0;
        for j in 0..n {
            let s: f64 = (0..m).map(|i| self.mass_at(i, j)).sum();
            col_err += (s - self.target.weights()[j]).abs();
        }
        row_err.max(col_err)
    }
}

pub(crate) fn squared_distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

fn cost_fn<'a>(
    mu: &'a DiscreteMeasure,
    nu: &'a DiscreteMeasure,
    cost: &'a CostSpec,
) -> Result<Box<dyn Fn(usize, usize) -> f64 + 'a>> {
    match cost {
        CostSpec::SquaredEuclidean => {
            if mu.dim() != nu.dim() {
                return Err(W2Error::DimensionMismatch(mu.dim(), nu.dim()));
            }
            Ok(Box::new(move |i, j| squared_distance(mu.point(i), nu.point(j))))
        }
        CostSpec::ExplicitMatrix(c) => {
            if c.len() != mu.len() || c.iter().any(|row| row.len() != nu.len()) {
                return Err(W2Error::DimensionMismatch(c.len(), mu.len()));
            }
            if c.iter().flatten().any(|v| !v.is_finite()) {
                return Err(W2Error::Other("non-finite cost entry".into()));
            }
            Ok(Box::new(move |i, j| c[i][j]))
        }
    }
}

pub(crate) fn cost_fn_matrix(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    cost: &CostSpec,
) -> Result<Vec<f64>> {
    let c = cost_fn(mu, nu, cost)?;
    let (m, n) = (mu.len(), nu.len());
    let mut out = vec![0.0; m * n];
    for i in 0..m {
        for j in 0..n {
            out[i * n + j] = c(i, j);
        }
    }
    Ok(out)
}

/// Exact minimizer of the Kantorovich problem on the discrete supports,
/// with optimal duals. Deterministic for fixed input.
pub fn solve_ot_exact(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    cost: &CostSpec,
) -> Result<TransportPlan> {
    let c = cost_fn(mu, nu, cost)?;
    let out = exact::transport_simplex(mu.weights(), nu.weights(), &c);
    Ok(TransportPlan {
        source: mu.clone(),
        target: nu.clone(),
        mass: out.flow,
        dual_u: out.dual_u,
        dual_v: out.dual_v,
        cost_value: out.cost,
        converged: true,
    })
}

/// Quadratic Wasserstein distance between two discrete measures.
pub fn w2(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<f64> {
    let plan = solve_ot_exact(mu, nu, &CostSpec::SquaredEuclidean)?;
    Ok(plan.cost_value.max(0.0).sqrt())
}

/// McCann interpolation at parameter `t` along an optimal plan for the
/// squared-Euclidean cost. Coincident points are merged at 1e-12.
pub fn displacement_interpolate(plan: &TransportPlan, t: f64) -> Result<DiscreteMeasure> {
    if !(0.0..=1.0).contains(&t) {
        return Err(W2Error::Other(format!("interpolation parameter {t} outside [0,1]")));
    }
    let (m, n) = (plan.source.len(), plan.target.len());
    let dim = plan.source.dim();
    let mut points = Vec::new();
    let mut weights = Vec::new();
    for i in 0..m {
        for j in 0..n {
            let w = plan.mass_at(i, j);
            if w > 0.0 {
                let p: Vec<f64> = (0..dim)
                    .map(|a| (1.0 - t) * plan.source.point(i)[a] + t * plan.target.point(j)[a])
                    .collect();
                points.push(p);
                weights.push(w);
            }
        }
    }
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    Ok(DiscreteMeasure::new(dim, points, weights)?.merged(1e-12))
}

/// Barycentric projection of the plan: source point i maps to the
/// mass-weighted average of its targets.
pub fn barycentric_map(plan: &TransportPlan) -> Vec<Vec<f64>> {
    let (m, n) = (plan.source.len(), plan.target.len());
    let dim = plan.source.dim();
    (0..m)
        .map(|i| {
            let row_sum: f64 = (0..n).map(|j| plan.mass_at(i, j)).sum();
            let mut img = vec![0.0; dim];
            if row_sum > 0.0 {
                for j in 0..n {
                    let w = plan.mass_at(i, j) / row_sum;
                    if w > 0.0 {
                        for (a, y) in img.iter_mut().zip(plan.target.point(j)) {
                            *a += w * y;
                        }
                    }
                }
            } else {
                img.copy_from_slice(plan.source.point(i));
            }
            img
        })
        .collect()
}
