//! Transportation-problem network simplex on the dense bipartite support
//! graph, with Kantorovich duals read off the final basis tree.

pub(crate) struct SimplexOutcome {
    /// Dense row-major m x n flow matrix.
    pub flow: Vec<f64>,
    pub dual_u: Vec<f64>,
    pub dual_v: Vec<f64>,
    pub cost: f64,
}

/// Solves min sum flow[i][j] * cost(i, j) over the transportation polytope
/// with the given (balanced, positive-total) supplies and demands.
///
/// Entering arcs use Dantzig's rule with lexicographic tie-breaking and a
/// Bland fallback for anti-cycling; the leaving arc is the
/// lexicographically smallest among the ratio-test minimizers, so reruns
/// are deterministic.
pub(crate) fn transport_simplex(
    supply: &[f64],
    demand: &[f64],
    cost: impl Fn(usize, usize) -> f64,
) -> SimplexOutcome {
    let m = supply.len();
    let n = demand.len();
    assert!(m > 0 && n > 0);

    // Balance the totals exactly (inputs each sum to 1 within 1e-12).
    let s_total: f64 = supply.iter().sum();
    let d_total: f64 = demand.iter().sum();
    let scale = s_total / d_total;
    let a: Vec<f64> = supply.to_vec();
    let b: Vec<f64> = demand.iter().map(|&d| d * scale).collect();

    let mut flow = vec![0.0; m * n];
    let mut basic = vec![false; m * n];

    // Northwest-corner start: always m + n - 1 basic cells.
    {
        let mut ar = a.clone();
        let mut br = b.clone();
        let (mut i, mut j) = (0usize, 0usize);
        loop {
            let q = ar[i].min(br[j]);
            flow[i * n + j] = q;
            basic[i * n + j] = true;
            ar[i] -= q;
            br[j] -= q;
            if i == m - 1 && j == n - 1 {
                break;
            }
            if ar[i] <= br[j] && i < m - 1 {
                i += 1;
            } else {
                j += 1;
            }
        }
    }

    let cost_scale = {
        let mut mx: f64 = 1.0;
        for i in 0..m {
            for j in 0..n {
                mx = mx.max(cost(i, j).abs());
            }
        }
        mx
    };
    let rc_tol = 1e-12 * cost_scale.max(1.0);

    let mut u = vec![0.0; m];
    let mut v = vec![0.0; n];
    let max_iter = 200 * (m * n).max(64);
    let bland_after = 20 * (m * n).max(64);

    for iter in 0..max_iter {
        compute_duals(m, n, &basic, &cost, &mut u, &mut v);

        // Entering arc.
        let mut enter: Option<(usize, usize)> = None;
        if iter > bland_after {
            'scan: for i in 0..m {
                for j in 0..n {
                    if !basic[i * n + j] && cost(i, j) - u[i] - v[j] < -rc_tol {
                        enter = Some((i, j));
                        break 'scan;
                    }
                }
            }
        } else {
            let mut best = -rc_tol;
            for i in 0..m {
                for j in 0..n {
                    if !basic[i * n + j] {
                        let rc = cost(i, j) - u[i] - v[j];
                        if rc < best {
                            best = rc;
                            enter = Some((i, j));
                        }
                    }
                }
            }
        }
        let Some((ei, ej)) = enter else { break };

        // Tree path from source ei to sink ej over basic arcs.
        let path = tree_path(m, n, &basic, ei, m + ej);
        // Arcs along the path alternate -theta, +theta starting at -theta.
        let mut minus_arcs: Vec<(usize, usize)> = Vec::new();
        for (k, w) in path.windows(2).enumerate() {
            let (x, y) = (w[0], w[1]);
            let (i, j) = if x < m { (x, y - m) } else { (y, x - m) };
            if k % 2 == 0 {
                minus_arcs.push((i, j));
            }
        }
        let theta = minus_arcs
            .iter()
            .map(|&(i, j)| flow[i * n + j])
            .fold(f64::INFINITY, f64::min);
        let leave = minus_arcs
            .iter()
            .copied()
            .filter(|&(i, j)| flow[i * n + j] <= theta + 1e-15)
            .min()
            .unwrap();
        // Apply the cycle.
        flow[ei * n + ej] += theta;
        basic[ei * n + ej] = true;
        for (k, w) in path.windows(2).enumerate() {
            let (x, y) = (w[0], w[1]);
            let (i, j) = if x < m { (x, y - m) } else { (y, x - m) };
            if k % 2 == 0 {
                flow[i * n + j] -= theta;
            } else {
                flow[i * n + j] += theta;
            }
        }
        flow[leave.0 * n + leave.1] = 0.0;
        basic[leave.0 * n + leave.1] = false;
    }

    compute_duals(m, n, &basic, &cost, &mut u, &mut v);
    let mut total = 0.0;
    for i in 0..m {
        for j in 0..n {
            if flow[i * n + j] != 0.0 {
                total += flow[i * n + j] * cost(i, j);
            }
        }
    }
    SimplexOutcome { flow, dual_u: u, dual_v: v, cost: total }
}

/// Duals satisfying u_i + v_j = c_ij on every basic arc, rooted at u_0 = 0.
fn compute_duals(
    m: usize,
    n: usize,
    basic: &[bool],
    cost: &impl Fn(usize, usize) -> f64,
    u: &mut [f64],
    v: &mut [f64],
) {
    let adj = adjacency(m, n, basic);
    let mut seen = vec![false; m + n];
    let mut stack = vec![0usize];
    seen[0] = true;
    u[0] = 0.0;
    while let Some(x) = stack.pop() {
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                if x < m {
                    v[y - m] = cost(x, y - m) - u[x];
                } else {
                    u[y] = cost(y, x - m) - v[x - m];
                }
                stack.push(y);
            }
        }
    }
}

fn adjacency(m: usize, n: usize, basic: &[bool]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); m + n];
    for i in 0..m {
        for j in 0..n {
            if basic[i * n + j] {
                adj[i].push(m + j);
                adj[m + j].push(i);
            }
        }
    }
    adj
}

/// Unique path between two nodes of the basis tree, as a node sequence.
fn tree_path(m: usize, n: usize, basic: &[bool], from: usize, to: usize) -> Vec<usize> {
    let adj = adjacency(m, n, basic);
    let mut parent = vec![usize::MAX; m + n];
    let mut seen = vec![false; m + n];
    let mut queue = std::collections::VecDeque::new();
    queue.push_back(from);
    seen[from] = true;
    while let Some(x) = queue.pop_front() {
        if x == to {
            break;
        }
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                parent[y] = x;
                queue.push_back(y);
            }
        }
    }
    let mut path = vec![to];
    let mut cur = to;
    while cur != from {
        cur = parent[cur];
        path.push(cur);
    }
    path.reverse();
    path
}
