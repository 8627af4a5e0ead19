//! Differential machinery for uniqueness of the star-cost multi-marginal
//! problem: closed-form first and second derivatives of the star cost,
//! the twistedness / non-degeneracy checks, the S/H/T tensor over the
//! middle marginals, and the H-shaped network generalization with its
//! critical a/b thresholds.

use crate::error::{Result, W2Error};
use crate::multimarginal::StarWeights;
use nalgebra::DMatrix;

/// Gradient of the star cost in the i-th point (0-based):
/// D_{x_i} c = 2(sigma_i - sigma_i^2/S) x_i - sum_{j != i} (2 sigma_i sigma_j / S) x_j,
/// which equals 2 sigma_i (x_i - xbar).
pub fn cost_gradient(i: usize, xs: &[&[f64]], w: &StarWeights) -> Result<Vec<f64>> {
    let l = w.len();
    if xs.len() != l || i >= l {
        return Err(W2Error::DimensionMismatch(xs.len(), l));
    }
    let n = xs[0].len();
    let total = w.total();
    let si = w.sigmas()[i];
    let mut g = vec![0.0; n];
    for a in 0..n {
        g[a] = 2.0 * (si - si * si / total) * xs[i][a];
        for (j, (&sj, x)) in w.sigmas().iter().zip(xs).enumerate() {
            if j != i {
                g[a] -= 2.0 * si * sj / total * x[a];
            }
        }
    }
    Ok(g)
}

/// Second-derivative block D^2_{x_i x_j} of the star cost (constant in x):
/// diagonal blocks 2(sigma_i - sigma_i^2/S) I, off-diagonal
/// -2 sigma_i sigma_j / S I.
pub fn cost_hessian_block(i: usize, j: usize, w: &StarWeights, n: usize) -> Result<DMatrix<f64>> {
    let l = w.len();
    if i >= l || j >= l || n == 0 {
        return Err(W2Error::DimensionMismatch(i.max(j), l));
    }
    let total = w.total();
    let s = w.sigmas();
    let coef = if i == j {
        2.0 * (s[i] - s[i] * s[i] / total)
    } else {
        -2.0 * s[i] * s[j] / total
    };
    Ok(DMatrix::identity(n, n) * coef)
}

/// Twistedness and non-degeneracy of the star cost both reduce to
/// invertibility of the mixed block D^2_{x_1 x_l} c = -2 sigma_1 sigma_l / S I;
/// verified numerically via its determinant rather than asserted.
pub fn check_pass_conditions(w: &StarWeights, n: usize) -> Result<(bool, bool)> {
    let block = cost_hessian_block(0, w.len() - 1, w, n)?;
    let invertible = block.determinant().abs() > 1e-300;
    Ok((invertible, invertible))
}

/// Assembled S, H and T = S + H over the middle marginals, with spectrum
/// and condition flags.
#[derive(Debug, Clone)]
pub struct TTensorReport {
    pub l: usize,
    pub n: usize,
    pub sigma: StarWeights,
    /// l x l grid of n x n second-derivative blocks.
    pub hessian_blocks: Vec<Vec<DMatrix<f64>>>,
    pub s_matrix: DMatrix<f64>,
    pub h_matrix: DMatrix<f64>,
    pub t_matrix: DMatrix<f64>,
    pub eigenvalues: Vec<f64>,
    pub twisted: bool,
    pub nondegenerate: bool,
    pub t_negative: bool,
}

const NEG_EIG_TOL: f64 = 1e-12;

fn assemble_report(
    l: usize,
    n: usize,
    sigma: StarWeights,
    blocks: Vec<Vec<DMatrix<f64>>>,
    twisted: bool,
    nondegenerate: bool,
) -> Result<TTensorReport> {
    let mid = l - 2;
    let first = 0;
    let last = l - 1;
    let inv_first_last = blocks[first][last]
        .clone()
        .try_inverse()
        .ok_or(W2Error::SingularInnerSolve)?;
    let mut s = DMatrix::zeros(mid * n, mid * n);
    for bi in 0..mid {
        let i = bi + 1;
        for bj in 0..mid {
            let j = bj + 1;
            let mut block = &blocks[i][last] * &inv_first_last * &blocks[first][j];
            if i != j {
                block -= &blocks[i][j];
            }
            s.view_mut((bi * n, bj * n), (n, n)).copy_from(&block);
        }
    }
    // symmetrize; the assembly is symmetric up to rounding
    let s = (&s + s.transpose()) * 0.5;
    let h = DMatrix::zeros(mid * n, mid * n); // quadratic cost: Hessians are constant
    let t = &s + &h;
    let eig = t.clone().symmetric_eigen();
    let mut eigenvalues: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let t_negative = *eigenvalues.last().unwrap() < -NEG_EIG_TOL;
    Ok(TTensorReport {
        l,
        n,
        sigma,
        hessian_blocks: blocks,
        s_matrix: s,
        h_matrix: h,
        t_matrix: t,
        eigenvalues,
        twisted,
        nondegenerate,
        t_negative,
    })
}

/// T tensor for the star cost: assembled from the closed-form second
/// derivative blocks, checked against the diagonal closed form
/// T = diag_i(-2 sigma_i^2 / S) over the middle indices.
pub fn compute_t_star(w: &StarWeights, n: usize) -> Result<TTensorReport> {
    let l = w.len();
    if l < 3 {
        return Err(W2Error::Other("T tensor needs at least three marginals".into()));
    }
    let blocks: Vec<Vec<DMatrix<f64>>> = (0..l)
        .map(|i| (0..l).map(|j| cost_hessian_block(i, j, w, n).unwrap()).collect())
        .collect();
    let (twisted, nondegenerate) = check_pass_conditions(w, n)?;
    let report = assemble_report(l, n, w.clone(), blocks, twisted, nondegenerate)?;
    // cross-check the assembly against the closed form
    let total = w.total();
    for bi in 0..(l - 2) {
        let expect = -2.0 * w.sigmas()[bi + 1].powi(2) / total;
        for bj in 0..(l - 2) {
            for a in 0..n {
                for c in 0..n {
                    let got = report.t_matrix[(bi * n + a, bj * n + c)];
                    let want = if bi == bj && a == c { expect } else { 0.0 };
                    if (got - want).abs() > 1e-10 {
                        return Err(W2Error::Other(format!(
                            "assembled T entry {got} differs from closed form {want}"
                        )));
                    }
                }
            }
        }
    }
    Ok(report)
}

/// Which boundary measure sits at which arm of the H-shaped network.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Labeling {
    /// Marginals 1,2 share the left interior point; 3,4 the right.
    Standard,
    /// Marginals 2 and 4 exchanged: 1,4 left and 2,3 right.
    Swapped,
}

/// H-shaped network: four boundary arms of length `a` joined pairwise at
/// two interior points connected by a bridge of length `b`.
#[derive(Debug, Clone)]
pub struct HGraphSpec {
    pub a: f64,
    pub b: f64,
    pub labeling: Labeling,
    pub dim: usize,
}

impl HGraphSpec {
    pub fn new(a: f64, b: f64, labeling: Labeling, dim: usize) -> Result<Self> {
        if !(a > 0.0) || !(b > 0.0) || dim == 0 {
            return Err(W2Error::Other("H graph needs positive lengths and dimension".into()));
        }
        Ok(Self { a, b, labeling, dim })
    }

    /// Interior point (0 = left, 1 = right) attached to each boundary slot.
    fn pairs(&self) -> [usize; 4] {
        match self.labeling {
            Labeling::Standard => [0, 0, 1, 1],
            Labeling::Swapped => [0, 1, 1, 0],
        }
    }
}

/// Second-derivative blocks of the reduced H-graph cost
/// c(x_1..x_4) = min_{y_1,y_2} sum_s (1/a)|x_s - y_{p(s)}|^2 + (1/b)|y_1 - y_2|^2,
/// obtained as the Schur complement of the interior linear solve. Blocks
/// are multiples of the identity; returned as the 4 x 4 per-coordinate
/// coefficient matrix.
fn hgraph_reduced_coefficients(spec: &HGraphSpec) -> Result<DMatrix<f64>> {
    let al = 1.0 / spec.a;
    let be = 1.0 / spec.b;
    let pairs = spec.pairs();
    let a_block = DMatrix::identity(4, 4) * (2.0 * al);
    let mut b_block = DMatrix::zeros(4, 2);
    let mut c_block = DMatrix::from_row_slice(2, 2, &[2.0 * be, -2.0 * be, -2.0 * be, 2.0 * be]);
    for (s, &p) in pairs.iter().enumerate() {
        b_block[(s, p)] = -2.0 * al;
        c_block[(p, p)] += 2.0 * al;
    }
    let c_inv = c_block.try_inverse().ok_or(W2Error::SingularInnerSolve)?;
    Ok(a_block - &b_block * &c_inv * b_block.transpose())
}

/// T tensor for the H-graph reduced cost under the given labeling, with
/// middle indices {2, 3} (x_1 first, x_4 last).
pub fn compute_t_hgraph(spec: &HGraphSpec) -> Result<TTensorReport> {
    let coef = hgraph_reduced_coefficients(spec)?;
    let n = spec.dim;
    let blocks: Vec<Vec<DMatrix<f64>>> = (0..4)
        .map(|i| (0..4).map(|j| DMatrix::identity(n, n) * coef[(i, j)]).collect())
        .collect();
    let twisted = coef[(0, 3)].abs() > 1e-300;
    let sigma = StarWeights::new(vec![1.0 / spec.a; 4])?;
    assemble_report(4, n, sigma, blocks, twisted, twisted)
}

/// Critical ratio a/b at which the maximum eigenvalue of the H-graph T
/// changes sign, located by bisection to 1e-6. The maximum eigenvalue is
/// strictly decreasing in a/b on a valid bracket.
pub fn hgraph_threshold(labeling: Labeling, b: f64, bracket: (f64, f64)) -> Result<f64> {
    let max_eig = |ratio: f64| -> Result<f64> {
        let spec = HGraphSpec::new(ratio * b, b, labeling, 1)?;
        let report = compute_t_hgraph(&spec)?;
        Ok(*report.eigenvalues.last().unwrap())
    };
    let (mut lo, mut hi) = bracket;
    if !(hi > lo) || !(lo > 0.0) {
        return Err(W2Error::Other(format!("bad bracket ({lo}, {hi})")));
    }
    let f_lo = max_eig(lo)?;
    let f_hi = max_eig(hi)?;
    if f_lo <= 0.0 || f_hi >= 0.0 {
        return Err(W2Error::Other(format!(
            "no sign change on bracket: f({lo}) = {f_lo}, f({hi}) = {f_hi}"
        )));
    }
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if max_eig(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multimarginal::star_cost;

    fn fd_gradient(i: usize, xs: &[&[f64]], w: &StarWeights) -> Vec<f64> {
        let n = xs[0].len();
        let h = 1e-6;
        (0..n)
            .map(|a| {
                let mut plus: Vec<Vec<f64>> = xs.iter().map(|x| x.to_vec()).collect();
                let mut minus = plus.clone();
                plus[i][a] += h;
                minus[i][a] -= h;
                let rp: Vec<&[f64]> = plus.iter().map(|x| x.as_slice()).collect();
                let rm: Vec<&[f64]> = minus.iter().map(|x| x.as_slice()).collect();
                (star_cost(&rp, w).unwrap() - star_cost(&rm, w).unwrap()) / (2.0 * h)
            })
            .collect()
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let w = StarWeights::new(vec![0.7, 1.3, 2.1]).unwrap();
        let xs: [&[f64]; 3] = [&[0.1, -2.0], &[1.5, 0.5], &[-0.7, 3.0]];
        for i in 0..3 {
            let g = cost_gradient(i, &xs, &w).unwrap();
            let fd = fd_gradient(i, &xs, &w);
            for (a, b) in g.iter().zip(&fd) {
                assert!((a - b).abs() < 1e-6, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn gradient_zero_at_coincident_points() {
        let w = StarWeights::uniform(3).unwrap();
        let xs: [&[f64]; 3] = [&[1.0, 2.0], &[1.0, 2.0], &[1.0, 2.0]];
        for i in 0..3 {
            let g = cost_gradient(i, &xs, &w).unwrap();
            assert!(g.iter().all(|v| v.abs() < 1e-14));
        }
    }

    #[test]
    fn gradient_two_point_example() {
        // sigma = (1,1), 1D points (0, 2): first gradient is -2
        let w = StarWeights::uniform(2).unwrap();
        let g = cost_gradient(0, &[&[0.0], &[2.0]], &w).unwrap();
        assert!((g[0] + 2.0).abs() < 1e-12);
    }

    #[test]
    fn gradients_sum_to_zero() {
        // translation invariance: gradients over i sum to zero
        let w = StarWeights::new(vec![0.4, 2.2, 0.9, 1.1]).unwrap();
        let xs: [&[f64]; 4] = [&[0.3], &[-1.1], &[2.2], &[0.0]];
        let mut sum = 0.0;
        for i in 0..4 {
            sum += cost_gradient(i, &xs, &w).unwrap()[0];
        }
        assert!(sum.abs() < 1e-12);
    }

    #[test]
    fn hessian_blocks_match_finite_differences() {
        let w = StarWeights::new(vec![0.6, 1.4, 0.8]).unwrap();
        let n = 2;
        let base: Vec<Vec<f64>> = vec![vec![0.2, -0.5], vec![1.0, 0.3], vec![-0.4, 0.9]];
        let h = 1e-4;
        for i in 0..3 {
            for j in 0..3 {
                let block = cost_hessian_block(i, j, &w, n).unwrap();
                for a in 0..n {
                    for c in 0..n {
                        let mut pp = base.clone();
                        let mut pm = base.clone();
                        let mut mp = base.clone();
                        let mut mm = base.clone();
                        pp[i][a] += h;
                        pp[j][c] += h;
                        pm[i][a] += h;
                        pm[j][c] -= h;
                        mp[i][a] -= h;
                        mp[j][c] += h;
                        mm[i][a] -= h;
                        mm[j][c] -= h;
                        let eval = |v: &Vec<Vec<f64>>| {
                            let r: Vec<&[f64]> = v.iter().map(|x| x.as_slice()).collect();
                            star_cost(&r, &w).unwrap()
                        };
                        let fd =
                            (eval(&pp) - eval(&pm) - eval(&mp) + eval(&mm)) / (4.0 * h * h);
                        assert!((block[(a, c)] - fd).abs() < 1e-5);
                    }
                }
            }
        }
    }

    #[test]
    fn full_hessian_psd_with_translation_kernel() {
        let w = StarWeights::new(vec![1.0, 2.0, 0.5]).unwrap();
        let (l, n) = (3, 2);
        let mut full = DMatrix::zeros(l * n, l * n);
        for i in 0..l {
            for j in 0..l {
                let b = cost_hessian_block(i, j, &w, n).unwrap();
                full.view_mut((i * n, j * n), (n, n)).copy_from(&b);
            }
        }
        let mut eigs: Vec<f64> = full.symmetric_eigen().eigenvalues.iter().copied().collect();
        eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // n zero eigenvalues (uniform translations), rest positive
        assert!(eigs[0].abs() < 1e-12 && eigs[1].abs() < 1e-12);
        assert!(eigs[2] > 1e-9);
    }

    #[test]
    fn pass_conditions_hold_for_positive_weights() {
        for sig in [vec![1.0, 1.0, 1.0], vec![1e-6, 1.0, 1.0], vec![3.0, 0.1, 0.1, 2.0]] {
            let w = StarWeights::new(sig).unwrap();
            let (t, nd) = check_pass_conditions(&w, 2).unwrap();
            assert!(t && nd);
        }
    }

    #[test]
    fn t_star_examples() {
        let r = compute_t_star(&StarWeights::uniform(3).unwrap(), 1).unwrap();
        assert!((r.t_matrix[(0, 0)] + 2.0 / 3.0).abs() < 1e-12);
        assert!(r.t_negative && r.twisted && r.nondegenerate);

        let r = compute_t_star(&StarWeights::uniform(4).unwrap(), 1).unwrap();
        assert!((r.t_matrix[(0, 0)] + 0.5).abs() < 1e-12);
        assert!((r.t_matrix[(1, 1)] + 0.5).abs() < 1e-12);
        assert!(r.t_matrix[(0, 1)].abs() < 1e-12);

        let r = compute_t_star(&StarWeights::new(vec![1.0, 2.0, 3.0]).unwrap(), 1).unwrap();
        assert!((r.t_matrix[(0, 0)] + 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn t_star_negative_on_random_weights() {
        // deterministic pseudo-random sweep over l and n
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for trial in 0..40 {
            let l = 3 + trial % 4;
            let n = 1 + trial % 3;
            let sig: Vec<f64> = (0..l).map(|_| 0.05 + next() * 3.0).collect();
            let w = StarWeights::new(sig).unwrap();
            let r = compute_t_star(&w, n).unwrap();
            assert!(r.t_negative);
        }
    }

    #[test]
    fn hgraph_reduced_matches_finite_differences() {
        let spec = HGraphSpec::new(1.7, 0.9, Labeling::Standard, 1).unwrap();
        let coef = hgraph_reduced_coefficients(&spec).unwrap();
        // direct reduced cost via the interior solve
        let cost = |x: &[f64; 4]| -> f64 {
            let (al, be) = (1.0 / spec.a, 1.0 / spec.b);
            let pairs = spec.pairs();
            let mut c = DMatrix::from_row_slice(2, 2, &[2.0 * be, -2.0 * be, -2.0 * be, 2.0 * be]);
            let mut rhs = nalgebra::DVector::zeros(2);
            for (s, &p) in pairs.iter().enumerate() {
                c[(p, p)] += 2.0 * al;
                rhs[p] += 2.0 * al * x[s];
            }
            let y = c.lu().solve(&rhs).unwrap();
            let mut v = be * (y[0] - y[1]).powi(2);
            for (s, &p) in pairs.iter().enumerate() {
                v += al * (x[s] - y[p]).powi(2);
            }
            v
        };
        let x0 = [0.3, -1.2, 0.8, 2.1];
        let h = 1e-4;
        for i in 0..4 {
            for j in 0..4 {
                let mut pp = x0;
                let mut pm = x0;
                let mut mp = x0;
                let mut mm = x0;
                pp[i] += h;
                pp[j] += h;
                pm[i] += h;
                pm[j] -= h;
                mp[i] -= h;
                mp[j] += h;
                mm[i] -= h;
                mm[j] -= h;
                let fd = (cost(&pp) - cost(&pm) - cost(&mp) + cost(&mm)) / (4.0 * h * h);
                assert!((coef[(i, j)] - fd).abs() < 1e-5, "({i},{j})");
            }
        }
    }

    #[test]
    fn standard_threshold_is_sqrt_two() {
        let th = hgraph_threshold(Labeling::Standard, 1.0, (1.01, 3.0)).unwrap();
        assert!((th - 2.0_f64.sqrt()).abs() < 1e-5, "threshold {th}");
        // independent of b
        let th2 = hgraph_threshold(Labeling::Standard, 0.37, (1.01, 3.0)).unwrap();
        assert!((th - th2).abs() < 1e-5);
    }

    #[test]
    fn swapped_threshold_brackets_a_sign_change() {
        let th = hgraph_threshold(Labeling::Swapped, 1.0, (1.01, 20.0)).unwrap();
        let eig_at = |r: f64| {
            let spec = HGraphSpec::new(r, 1.0, Labeling::Swapped, 1).unwrap();
            *compute_t_hgraph(&spec).unwrap().eigenvalues.last().unwrap()
        };
        assert!(eig_at(th - 1e-3) > 0.0 && eig_at(th + 1e-3) < 0.0);
    }

    #[test]
    fn large_ratio_negative_either_labeling() {
        for labeling in [Labeling::Standard, Labeling::Swapped] {
            let spec = HGraphSpec::new(10.0, 1.0, labeling, 2).unwrap();
            assert!(compute_t_hgraph(&spec).unwrap().t_negative);
        }
    }

    #[test]
    fn max_eigenvalue_decreasing_through_sign_change() {
        // strict decrease on the bisection bracket: from ratio 1 through
        // the zero crossing (past it the eigenvalue levels off, negative)
        for labeling in [Labeling::Standard, Labeling::Swapped] {
            let mut prev = f64::INFINITY;
            let mut r = 1.05;
            loop {
                let spec = HGraphSpec::new(r, 1.0, labeling, 1).unwrap();
                let e = *compute_t_hgraph(&spec).unwrap().eigenvalues.last().unwrap();
                assert!(e < prev, "{labeling:?} at ratio {r}: {e} !< {prev}");
                if e < 0.0 {
                    break;
                }
                prev = e;
                r += 0.25;
            }
        }
    }
}
