//! Log-domain Sinkhorn iterations for entropically regularized transport.

use super::{cost_fn_matrix, CostSpec, TransportPlan};
use crate::error::{Result, W2Error};
use crate::measures::DiscreteMeasure;

/// Entropically regularized plan at temperature `epsilon`. Stops when the
/// L1 marginal violation drops below `tol`; if `max_iter` is exhausted the
/// best iterate is returned with `converged = false`.
pub fn solve_sinkhorn(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    cost: &CostSpec,
    epsilon: f64,
    max_iter: usize,
    tol: f64,
) -> Result<TransportPlan> {
    if !(epsilon > 0.0) {
        return Err(W2Error::Other(format!("epsilon {epsilon} must be positive")));
    }
    let (m, n) = (mu.len(), nu.len());
    let c = cost_fn_matrix(mu, nu, cost)?;
    let log_a: Vec<f64> = mu.weights().iter().map(|&w| w.max(1e-300).ln()).collect();
    let log_b: Vec<f64> = nu.weights().iter().map(|&w| w.max(1e-300).ln()).collect();

    // Potentials in value units: pi_ij = exp((f_i + g_j - c_ij) / eps).
    let mut f = vec![0.0; m];
    let mut g = vec![0.0; n];
    let mut converged = false;
    for _ in 0..max_iter {
        // f-update makes row marginals exact.
        for i in 0..m {
            let lse = logsumexp((0..n).map(|j| (g[j] - c[i * n + j]) / epsilon));
            f[i] = epsilon * (log_a[i] - lse);
        }
        for j in 0..n {
            let lse = logsumexp((0..m).map(|i| (f[i] - c[i * n + j]) / epsilon));
            g[j] = epsilon * (log_b[j] - lse);
        }
        // After the g-update, columns are exact; check rows.
        let mut row_err = 0.0;
        for i in 0..m {
            let s: f64 = (0..n)
                .map(|j| ((f[i] + g[j] - c[i * n + j]) / epsilon).exp())
                .sum();
            row_err += (s - mu.weights()[i]).abs();
        }
        if row_err <= tol {
            converged = true;
            break;
        }
    }

    let mut mass = vec![0.0; m * n];
    let mut cost_value = 0.0;
    for i in 0..m {
        for j in 0..n {
            let p = ((f[i] + g[j] - c[i * n + j]) / epsilon).exp();
            mass[i * n + j] = p;
            cost_value += p * c[i * n + j];
        }
    }
    Ok(TransportPlan {
        source: mu.clone(),
        target: nu.clone(),
        mass,
        dual_u: f,
        dual_v: g,
        cost_value,
        converged,
    })
}

fn logsumexp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let mx = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if mx == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    mx + values.map(|v| (v - mx).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transport::{solve_ot_exact, CostSpec};

    #[test]
    fn point_masses_single_entry() {
        let a = DiscreteMeasure::dirac(vec![0.0]);
        let b = DiscreteMeasure::dirac(vec![2.0]);
        let plan =
            solve_sinkhorn(&a, &b, &CostSpec::SquaredEuclidean, 0.5, 1000, 1e-10).unwrap();
        assert!((plan.mass_at(0, 0) - 1.0).abs() < 1e-9);
        assert!((plan.cost_value - 4.0).abs() < 1e-8);
    }

    #[test]
    fn identical_measures_small_epsilon() {
        let mu = DiscreteMeasure::new(
            1,
            vec![vec![0.0], vec![0.3], vec![0.9]],
            vec![0.3, 0.4, 0.3],
        )
        .unwrap();
        let plan =
            solve_sinkhorn(&mu, &mu, &CostSpec::SquaredEuclidean, 1e-3, 5000, 1e-9).unwrap();
        assert!(plan.cost_value <= 1e-2);
        assert!(plan.marginal_violation() <= 1e-8);
    }

    #[test]
    fn regularized_cost_decreases_toward_lp_value() {
        // fixed small instance; epsilon sweep approaches the exact cost
        let mu = DiscreteMeasure::new(
            2,
            vec![vec![0.0, 0.0], vec![1.0, 0.2], vec![0.4, 0.9], vec![0.7, 0.5]],
            vec![0.25; 4],
        )
        .unwrap();
        let nu = DiscreteMeasure::new(
            2,
            vec![vec![0.1, 0.8], vec![0.9, 0.1], vec![0.5, 0.4], vec![0.2, 0.3]],
            vec![0.1, 0.3, 0.4, 0.2],
        )
        .unwrap();
        let exact = solve_ot_exact(&mu, &nu, &CostSpec::SquaredEuclidean).unwrap().cost_value;
        let costs: Vec<f64> = [1e-1, 1e-2, 1e-3]
            .iter()
            .map(|&eps| {
                solve_sinkhorn(&mu, &nu, &CostSpec::SquaredEuclidean, eps, 20000, 1e-10)
                    .unwrap()
                    .cost_value
            })
            .collect();
        assert!(costs[0] >= costs[1] && costs[1] >= costs[2]);
        assert!(costs[2] >= exact - 1e-9);
        assert!((costs[2] - exact).abs() < 1e-2);
    }
}
