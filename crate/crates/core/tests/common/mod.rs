//! Helpers shared by the integration suites, chiefly an exhaustive
//! optimal-transport oracle that is independent of the production solver.

/// Exact Kantorovich cost by exhaustive enumeration of transportation-
/// polytope vertices.
///
/// Every vertex of the polytope is the unique balanced flow on some
/// spanning tree of the complete bipartite support graph, so the optimum
/// is the minimum cost over feasible (nonnegative) tree flows. Spanning
/// trees are enumerated through parent functions: each column picks a row
/// parent and each non-root row picks a column parent, which yields every
/// spanning tree at least once (candidates with cycles are discarded).
/// Intended for desk-scale instances (≤ 6 x 6 or so).
pub fn exhaustive_ot_cost(supply: &[f64], demand: &[f64], cost: &[Vec<f64>]) -> f64 {
    let m = supply.len();
    let n = demand.len();
    assert!(m >= 1 && n >= 1, "empty marginal");
    let total = m + n;

    // Mixed-radix counter over parent choices: cols 0..n pick a row
    // (radix m), rows 1..m pick a col (radix n). Vertex ids: rows 0..m,
    // cols m..m+n, root is row 0.
    let radix: Vec<usize> =
        (0..n).map(|_| m).chain((1..m).map(|_| n)).collect();
    let mut choice = vec![0usize; radix.len()];

    let mut parent = vec![usize::MAX; total];
    let mut depth = vec![f64::INFINITY; total];
    let mut path = Vec::with_capacity(total);
    let mut order: Vec<usize> = (0..total).collect();
    let mut balance = vec![0.0; total];

    let mut best = f64::INFINITY;
    loop {
        for v in &mut parent {
            *v = usize::MAX;
        }
        for c in 0..n {
            parent[m + c] = choice[c];
        }
        for r in 1..m {
            parent[r] = m + choice[n + r - 1];
        }

        if let Some(c) = tree_flow_cost(
            &parent, supply, demand, cost, m, &mut depth, &mut path, &mut order, &mut balance,
        ) {
            if c < best {
                best = c;
            }
        }

        // advance the counter; done once it wraps
        let mut i = 0;
        loop {
            if i == choice.len() {
                assert!(best.is_finite(), "no feasible tree flow found");
                return best;
            }
            choice[i] += 1;
            if choice[i] < radix[i] {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// Cost of the balanced flow on the candidate tree, or None if the parent
/// pointers contain a cycle or the flow takes a negative value.
#[allow(clippy::too_many_arguments)]
fn tree_flow_cost(
    parent: &[usize],
    supply: &[f64],
    demand: &[f64],
    cost: &[Vec<f64>],
    m: usize,
    depth: &mut [f64],
    path: &mut Vec<usize>,
    order: &mut [usize],
    balance: &mut [f64],
) -> Option<f64> {
    let total = parent.len();
    for d in depth.iter_mut() {
        *d = f64::INFINITY;
    }
    depth[0] = 0.0;
    for v in 0..total {
        path.clear();
        let mut u = v;
        while depth[u].is_infinite() {
            path.push(u);
            if path.len() > total {
                return None; // cycle disconnected from the root
            }
            u = parent[u];
        }
        let mut d = depth[u];
        for &w in path.iter().rev() {
            d += 1.0;
            depth[w] = d;
        }
    }

    // Leaf-up accumulation: each edge to the parent carries the subtree's
    // supply/demand imbalance.
    for (v, o) in order.iter_mut().enumerate() {
        *o = v;
    }
    order.sort_unstable_by(|&a, &b| depth[b].partial_cmp(&depth[a]).unwrap());
    for v in 0..total {
        balance[v] = if v < m { supply[v] } else { -demand[v - m] };
    }
    let mut c_total = 0.0;
    for &v in order.iter() {
        if v == 0 {
            continue;
        }
        let p = parent[v];
        // x_ij >= 0 ships row -> col on the edge between row i and col j
        let (i, j, x) =
            if v < m { (v, p - m, balance[v]) } else { (p, v - m, -balance[v]) };
        if x < -1e-9 {
            return None;
        }
        c_total += x.max(0.0) * cost[i][j];
        balance[p] += balance[v];
    }
    Some(c_total)
}

/// Squared Euclidean distance between two points.
pub fn sqdist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}
