//! Multi-marginal Kantorovich oracle for the star cost
//! c(x_1,...,x_l) = sum_i sigma_i |x_i - xbar|^2, and weighted Wasserstein
//! barycenters (fixed-support LP and free-support fixed-point iteration)
//! minimizing Psi(mu) = sum_i sigma_i W2^2(mu_i, mu).

use crate::error::{Result, W2Error};
use crate::lp::solve_lp;
use crate::measures::DiscreteMeasure;
use crate::transport::{barycentric_map, solve_ot_exact, squared_distance, CostSpec};

/// Default cap on the product support size of the multi-marginal LP.
pub const DEFAULT_PRODUCT_CAP: usize = 1_000_000;

/// Positive weights sigma_1..sigma_l attached to the legs of a star.
#[derive(Debug, Clone)]
pub struct StarWeights {
    sigmas: Vec<f64>,
}

impl StarWeights {
    pub fn new(sigmas: Vec<f64>) -> Result<Self> {
        if sigmas.len() < 2 {
            return Err(W2Error::Other("star weights need at least two legs".into()));
        }
        if sigmas.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
            return Err(W2Error::Other("star weights must be positive and finite".into()));
        }
        Ok(Self { sigmas })
    }

    pub fn uniform(l: usize) -> Result<Self> {
        Self::new(vec![1.0; l])
    }

    pub fn sigmas(&self) -> &[f64] {
        &self.sigmas
    }

    pub fn len(&self) -> usize {
        self.sigmas.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn total(&self) -> f64 {
        self.sigmas.iter().sum()
    }

    /// Rescaled copy with sigmas summing to 1/2, the normalization used by
    /// the L-infinity barycenter bounds.
    pub fn normalized_half(&self) -> Self {
        let t = self.total();
        Self { sigmas: self.sigmas.iter().map(|s| 0.5 * s / t).collect() }
    }
}

/// Sparse coupling over the product of the marginal supports.
#[derive(Debug, Clone)]
pub struct MultiPlan {
    pub marginals: Vec<DiscreteMeasure>,
    /// (index tuple, mass) pairs; tuples index the marginal supports.
    pub atoms: Vec<(Vec<usize>, f64)>,
    pub cost_value: f64,
    pub duality_gap: f64,
}

impl MultiPlan {
    /// Largest L1 deviation of a coordinate pushforward from its marginal.
    pub fn marginal_violation(&self) -> f64 {
        let mut worst = 0.0_f64;
        for (i, mu) in self.marginals.iter().enumerate() {
            let mut push = vec![0.0; mu.len()];
            for (idx, mass) in &self.atoms {
                push[idx[i]] += mass;
            }
            let err: f64 = push
                .iter()
                .zip(mu.weights())
                .map(|(p, w)| (p - w).abs())
                .sum();
            worst = worst.max(err);
        }
        worst
    }
}

/// Weighted Euclidean mean xbar = sum sigma_i x_i / sum sigma_i.
pub fn barycenter_point(xs: &[&[f64]], w: &StarWeights) -> Result<Vec<f64>> {
    if xs.len() != w.len() {
        return Err(W2Error::DimensionMismatch(xs.len(), w.len()));
    }
    let dim = xs[0].len();
    if xs.iter().any(|x| x.len() != dim) {
        return Err(W2Error::DimensionMismatch(dim, 0));
    }
    let total = w.total();
    let mut out = vec![0.0; dim];
    for (x, &s) in xs.iter().zip(w.sigmas()) {
        for (o, &xi) in out.iter_mut().zip(x.iter()) {
            *o += s * xi / total;
        }
    }
    Ok(out)
}

/// Star cost sum_i sigma_i |x_i - xbar|^2.
pub fn star_cost(xs: &[&[f64]], w: &StarWeights) -> Result<f64> {
    let xbar = barycenter_point(xs, w)?;
    Ok(xs
        .iter()
        .zip(w.sigmas())
        .map(|(x, &s)| s * squared_distance(x, &xbar))
        .sum())
}

/// Exact LP minimizer of the star-cost multi-marginal problem over the
/// full product support. An oracle for desk-scale instances, capped at
/// `cap` product atoms.
pub fn solve_multimarginal(
    mus: &[DiscreteMeasure],
    w: &StarWeights,
    cap: usize,
) -> Result<MultiPlan> {
    if mus.len() != w.len() {
        return Err(W2Error::DimensionMismatch(mus.len(), w.len()));
    }
    let dim = mus[0].dim();
    if mus.iter().any(|m| m.dim() != dim) {
        return Err(W2Error::DimensionMismatch(dim, 0));
    }
    let sizes: Vec<usize> = mus.iter().map(|m| m.len()).collect();
    let product: usize = sizes.iter().try_fold(1usize, |acc, &s| acc.checked_mul(s)).unwrap_or(usize::MAX);
    if product > cap {
        return Err(W2Error::InstanceTooLarge { size: product, cap });
    }

    // Objective per product tuple, tuples in mixed-radix order.
    let l = mus.len();
    let mut costs = Vec::with_capacity(product);
    let mut tuples = Vec::with_capacity(product);
    let mut idx = vec![0usize; l];
    loop {
        let points: Vec<&[f64]> = mus.iter().zip(&idx).map(|(m, &j)| m.point(j)).collect();
        costs.push(star_cost(&points, w)?);
        tuples.push(idx.clone());
        let mut carry = l;
        while carry > 0 {
            idx[carry - 1] += 1;
            if idx[carry - 1] < sizes[carry - 1] {
                break;
            }
            idx[carry - 1] = 0;
            carry -= 1;
        }
        if carry == 0 {
            break;
        }
    }

    // One constraint row per marginal support point.
    let rows: usize = sizes.iter().sum();
    let mut a = vec![vec![0.0; product]; rows];
    let mut b = vec![0.0; rows];
    let mut offset = 0;
    for (i, mu) in mus.iter().enumerate() {
        for j in 0..mu.len() {
            b[offset + j] = mu.weights()[j];
        }
        for (t, tup) in tuples.iter().enumerate() {
            a[offset + tup[i]][t] = 1.0;
        }
        offset += mu.len();
    }
    let sol = solve_lp(&a, &b, &costs)?;
    let atoms: Vec<(Vec<usize>, f64)> = tuples
        .into_iter()
        .zip(sol.x.iter())
        .filter(|(_, &x)| x > 1e-14)
        .map(|(t, &x)| (t, x))
        .collect();
    Ok(MultiPlan {
        marginals: mus.to_vec(),
        atoms,
        cost_value: sol.cost,
        duality_gap: sol.duality_gap,
    })
}

/// Image measure of the plan under the tuple-barycenter map: each atom
/// contributes its mass at the weighted mean of its tuple.
pub fn pushforward_barycenter(plan: &MultiPlan, w: &StarWeights) -> Result<DiscreteMeasure> {
    let dim = plan.marginals[0].dim();
    let mut points = Vec::with_capacity(plan.atoms.len());
    let mut weights = Vec::with_capacity(plan.atoms.len());
    let mut total = 0.0;
    for (idx, mass) in &plan.atoms {
        let xs: Vec<&[f64]> = plan
            .marginals
            .iter()
            .zip(idx)
            .map(|(m, &j)| m.point(j))
            .collect();
        points.push(barycenter_point(&xs, w)?);
        weights.push(*mass);
        total += mass;
    }
    for wt in &mut weights {
        *wt /= total;
    }
    Ok(DiscreteMeasure::new(dim, points, weights)?.merged(1e-12))
}

/// Psi(mu) = sum_i sigma_i W2^2(mu_i, mu).
pub fn psi(mus: &[DiscreteMeasure], w: &StarWeights, mu: &DiscreteMeasure) -> Result<f64> {
    let mut total = 0.0;
    for (m, &s) in mus.iter().zip(w.sigmas()) {
        let plan = solve_ot_exact(m, mu, &CostSpec::SquaredEuclidean)?;
        total += s * plan.cost_value;
    }
    Ok(total)
}

/// Optimal weights on a fixed candidate support minimizing Psi, as a
/// single joint LP over the l couplings and the common target weights.
/// Returns the optimizer and the Psi value; the LP duality gap certifies
/// optimality.
pub fn fixed_support_barycenter(
    mus: &[DiscreteMeasure],
    w: &StarWeights,
    support: &[Vec<f64>],
) -> Result<(DiscreteMeasure, f64)> {
    if support.is_empty() {
        return Err(W2Error::Other("empty candidate support".into()));
    }
    if mus.len() != w.len() {
        return Err(W2Error::DimensionMismatch(mus.len(), w.len()));
    }
    let dim = mus[0].dim();
    if support.iter().any(|p| p.len() != dim) {
        return Err(W2Error::DimensionMismatch(support[0].len(), dim));
    }
    let l = mus.len();
    let k = support.len();
    let sizes: Vec<usize> = mus.iter().map(|m| m.len()).collect();
    let n_pi: usize = sizes.iter().map(|&m| m * k).sum();
    let n = n_pi + k; // plus the free target weights
    let cap = DEFAULT_PRODUCT_CAP;
    if n > cap {
        return Err(W2Error::InstanceTooLarge { size: n, cap });
    }

    let block_offset: Vec<usize> = sizes
        .iter()
        .scan(0usize, |acc, &m| {
            let o = *acc;
            *acc += m * k;
            Some(o)
        })
        .collect();
    let var = |i: usize, j: usize, kk: usize| block_offset[i] + j * k + kk;

    let rows = sizes.iter().sum::<usize>() + l * k;
    let mut a = vec![vec![0.0; n]; rows];
    let mut b = vec![0.0; rows];
    let mut c = vec![0.0; n];
    let mut row = 0;
    for (i, mu) in mus.iter().enumerate() {
        for j in 0..mu.len() {
            for kk in 0..k {
                a[row][var(i, j, kk)] = 1.0;
                c[var(i, j, kk)] = w.sigmas()[i] * squared_distance(mu.point(j), &support[kk]);
            }
            b[row] = mu.weights()[j];
            row += 1;
        }
    }
    for i in 0..l {
        for kk in 0..k {
            for j in 0..sizes[i] {
                a[row][var(i, j, kk)] = 1.0;
            }
            a[row][n_pi + kk] = -1.0;
            b[row] = 0.0;
            row += 1;
        }
    }
    let sol = solve_lp(&a, &b, &c)?;
    if sol.duality_gap.abs() > 1e-8 * (1.0 + sol.cost.abs()) {
        return Err(W2Error::Other(format!(
            "barycenter LP gap {} too large",
            sol.duality_gap
        )));
    }
    let mut weights: Vec<f64> = sol.x[n_pi..].to_vec();
    let total: f64 = weights.iter().sum();
    for wt in &mut weights {
        *wt = (*wt).max(0.0) / total;
    }
    let measure = DiscreteMeasure::new(dim, support.to_vec(), weights)?.pruned(0.0);
    Ok((measure, sol.cost))
}

/// Outcome of the free-support fixed-point iteration.
#[derive(Debug, Clone)]
pub struct FreeSupportBarycenter {
    pub measure: DiscreteMeasure,
    pub psi: f64,
    pub iterations: usize,
    pub converged: bool,
    pub psi_trace: Vec<f64>,
}

/// Fixed-point iteration for the free-support barycenter: solve pairwise
/// transport to the current iterate and move each support point to the
/// sigma-weighted mean of its barycentric-map images. Psi is
/// non-increasing across iterations.
pub fn free_support_barycenter(
    mus: &[DiscreteMeasure],
    w: &StarWeights,
    init: &DiscreteMeasure,
    max_iter: usize,
    tol: f64,
) -> Result<FreeSupportBarycenter> {
    if mus.len() != w.len() {
        return Err(W2Error::DimensionMismatch(mus.len(), w.len()));
    }
    let dim = init.dim();
    let total = w.total();
    let mut current = init.clone();
    let mut current_psi = psi(mus, w, &current)?;
    let mut trace = vec![current_psi];
    let mut converged = false;
    let mut iterations = 0;
    for _ in 0..max_iter {
        iterations += 1;
        // sigma-weighted average of the barycentric images of each point
        let mut images = vec![vec![0.0; dim]; current.len()];
        for (mu, &s) in mus.iter().zip(w.sigmas()) {
            let plan = solve_ot_exact(&current, mu, &CostSpec::SquaredEuclidean)?;
            let map = barycentric_map(&plan);
            for (img, t) in images.iter_mut().zip(&map) {
                for (a, ti) in img.iter_mut().zip(t) {
                    *a += s * ti / total;
                }
            }
        }
        let next = DiscreteMeasure::new(dim, images, current.weights().to_vec())?;
        let next_psi = psi(mus, w, &next)?;
        let decrease = current_psi - next_psi;
        current = next;
        current_psi = next_psi;
        trace.push(current_psi);
        if decrease.abs() < tol {
            converged = true;
            break;
        }
    }
    Ok(FreeSupportBarycenter {
        measure: current.merged(1e-12),
        psi: current_psi,
        iterations,
        converged,
        psi_trace: trace,
    })
}
