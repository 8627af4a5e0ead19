//! Minimal networks (Steiner trees) spanning discrete measures in the
//! quadratic Wasserstein metric: topology enumeration, an alternating
//! descent solver with 1/W2 reweighting, the minimum spanning tree of the
//! distance graph, and the Steiner-ratio estimator.

use crate::error::{Result, W2Error};
use crate::measures::DiscreteMeasure;
use crate::multimarginal::{free_support_barycenter, StarWeights};
use crate::transport::{
    displacement_interpolate, solve_ot_exact, w2, CostSpec, TransportPlan,
};

/// Tree topology over terminal and free vertices. Terminals carry fixed
/// boundary measures; free vertices are optimized.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    vertices: usize,
    edges: Vec<(usize, usize)>,
    terminals: Vec<usize>,
}

impl Topology {
    pub fn new(vertices: usize, edges: Vec<(usize, usize)>, terminals: Vec<usize>) -> Result<Self> {
        if vertices == 0 || edges.len() + 1 != vertices {
            return Err(W2Error::Other(format!(
                "tree needs {} edges for {} vertices, got {}",
                vertices.saturating_sub(1),
                vertices,
                edges.len()
            )));
        }
        let edges: Vec<(usize, usize)> = edges
            .into_iter()
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        for &(a, b) in &edges {
            if a == b || b >= vertices {
                return Err(W2Error::Other(format!("bad edge ({a}, {b})")));
            }
        }
        // connectivity
        let mut seen = vec![false; vertices];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(a, b) in &edges {
                let other = if a == v { b } else if b == v { a } else { continue };
                if !seen[other] {
                    seen[other] = true;
                    stack.push(other);
                }
            }
        }
        if seen.iter().any(|&s| !s) {
            return Err(W2Error::Other("topology is not connected".into()));
        }
        let mut sorted_terms = terminals.clone();
        sorted_terms.sort_unstable();
        sorted_terms.dedup();
        if sorted_terms.len() != terminals.len() || terminals.iter().any(|&t| t >= vertices) {
            return Err(W2Error::Other("terminal indices must be distinct and in range".into()));
        }
        let t = Self { vertices, edges, terminals };
        for f in t.free_indices() {
            if t.degree(f) < 3 {
                return Err(W2Error::Other(format!("free vertex {f} has degree < 3")));
            }
        }
        Ok(t)
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn terminals(&self) -> &[usize] {
        &self.terminals
    }

    pub fn free_indices(&self) -> Vec<usize> {
        (0..self.vertices).filter(|v| !self.terminals.contains(v)).collect()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Contracts edge `(a, b)` by merging the higher-priority-to-remove
    /// endpoint into the other. At least one endpoint must be free.
    /// Vertices above the removed one shift down by one.
    pub fn contracted(&self, a: usize, b: usize) -> Result<Self> {
        let free = self.free_indices();
        // remove a free endpoint; prefer the larger index when both free
        let (keep, drop) = if free.contains(&a) && free.contains(&b) {
            (a.min(b), a.max(b))
        } else if free.contains(&b) {
            (a, b)
        } else if free.contains(&a) {
            (b, a)
        } else {
            return Err(W2Error::Other("cannot contract a terminal-terminal edge".into()));
        };
        let relabel = |v: usize| -> usize {
            let v = if v == drop { keep } else { v };
            if v > drop {
                v - 1
            } else {
                v
            }
        };
        let mut edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .filter(|&&(x, y)| !(x.min(y) == a.min(b) && x.max(y) == a.max(b)))
            .map(|&(x, y)| {
                let (x, y) = (relabel(x), relabel(y));
                (x.min(y), x.max(y))
            })
            .collect();
        edges.sort_unstable();
        let terminals: Vec<usize> = self.terminals.iter().map(|&t| relabel(t)).collect();
        Self::new(self.vertices - 1, edges, terminals)
    }

    /// Canonical signature invariant under relabeling of free vertices,
    /// used to deduplicate enumerated topologies.
    fn signature(&self) -> Vec<(usize, usize)> {
        let free = self.free_indices();
        let mut best: Option<Vec<(usize, usize)>> = None;
        let mut perm: Vec<usize> = (0..free.len()).collect();
        loop {
            let map = |v: usize| -> usize {
                match free.iter().position(|&f| f == v) {
                    Some(i) => free[perm[i]],
                    None => v,
                }
            };
            let mut edges: Vec<(usize, usize)> = self
                .edges
                .iter()
                .map(|&(a, b)| {
                    let (a, b) = (map(a), map(b));
                    (a.min(b), a.max(b))
                })
                .collect();
            edges.sort_unstable();
            if best.as_ref().map_or(true, |b| edges < *b) {
                best = Some(edges);
            }
            if !next_permutation(&mut perm) {
                break;
            }
        }
        best.unwrap()
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// All full Steiner topologies on `k` terminals (free vertices of degree
/// exactly three, k-2 of them; (2k-5)!! trees), with terminals at indices
/// 0..k and free vertices above. When `allow_degenerate` is set, every
/// distinct tree reachable by contracting free-incident edges is appended.
pub fn enumerate_topologies(k: usize, allow_degenerate: bool) -> Result<Vec<Topology>> {
    if !(2..=6).contains(&k) {
        return Err(W2Error::KTooLarge(k));
    }
    // grow by subdividing an edge with a fresh free vertex and attaching
    // the next terminal to it
    let mut partial: Vec<Vec<(usize, usize)>> = vec![vec![(0, 1)]];
    for t in 2..k {
        let f = k + (t - 2);
        let mut next = Vec::new();
        for edges in &partial {
            for (ei, &(a, b)) in edges.iter().enumerate() {
                let mut e = edges.clone();
                e.remove(ei);
                e.push((a.min(f), a.max(f)));
                e.push((b.min(f), b.max(f)));
                e.push((t, f));
                next.push(e);
            }
        }
        partial = next;
    }
    let terminals: Vec<usize> = (0..k).collect();
    let vertices = if k == 2 { 2 } else { 2 * k - 2 };
    let mut out: Vec<Topology> = partial
        .into_iter()
        .map(|mut e| {
            e.sort_unstable();
            Topology::new(vertices, e, terminals.clone())
        })
        .collect::<Result<_>>()?;
    if allow_degenerate {
        let mut seen: Vec<(usize, Vec<(usize, usize)>)> =
            out.iter().map(|t| (t.vertices, t.signature())).collect();
        let mut frontier: Vec<Topology> = out.clone();
        while let Some(t) = frontier.pop() {
            for &(a, b) in t.edges().to_vec().iter() {
                let Ok(c) = t.contracted(a, b) else { continue };
                let sig = (c.vertices, c.signature());
                if !seen.contains(&sig) {
                    seen.push(sig);
                    out.push(c.clone());
                    frontier.push(c);
                }
            }
        }
    }
    Ok(out)
}

/// Solver knobs for `optimize_network`.
#[derive(Debug, Clone)]
pub struct NetworkParams {
    pub outer_iter: usize,
    /// Relative total-length decrease below which the outer loop stops.
    pub tol: f64,
    /// W2 distance under which a free vertex is merged onto a neighbor.
    pub delta_collapse: f64,
    pub inner_iter: usize,
    pub inner_tol: f64,
}

impl Default for NetworkParams {
    fn default() -> Self {
        Self {
            outer_iter: 200,
            tol: 1e-9,
            delta_collapse: 1e-6,
            inner_iter: 30,
            inner_tol: 1e-11,
        }
    }
}

/// Converged network: per-vertex measures, per-edge optimal plans and
/// lengths.
#[derive(Debug, Clone)]
pub struct NetworkSolution {
    pub topology: Topology,
    pub assignment: Vec<DiscreteMeasure>,
    pub edge_plans: Vec<TransportPlan>,
    pub edge_lengths: Vec<f64>,
    pub total_length: f64,
    pub converged: bool,
    pub iterations: usize,
}

pub fn network_length(solution: &NetworkSolution) -> f64 {
    solution.total_length
}

/// Displacement interpolations along one edge geodesic at the requested
/// parameters, using the stored optimal plan.
pub fn sample_edge(
    solution: &NetworkSolution,
    edge: usize,
    ts: &[f64],
) -> Result<Vec<DiscreteMeasure>> {
    let plan = &solution.edge_plans[edge];
    ts.iter().map(|&t| displacement_interpolate(plan, t)).collect()
}

/// Alternating descent: cyclic sweeps over the free vertices, each updated
/// to the sigma-weighted barycenter of its neighbors with sigma = 1/W2
/// (clamped at 1/delta_collapse). Total length is non-increasing across
/// sweeps. A free vertex within `delta_collapse` of a neighbor triggers
/// contraction of that edge and a restart on the contracted tree.
pub fn optimize_network(
    topology: &Topology,
    boundary: &[DiscreteMeasure],
    params: &NetworkParams,
) -> Result<NetworkSolution> {
    if boundary.len() != topology.terminals().len() {
        return Err(W2Error::DimensionMismatch(boundary.len(), topology.terminals().len()));
    }
    let dim = boundary[0].dim();
    if boundary.iter().any(|m| m.dim() != dim) {
        return Err(W2Error::DimensionMismatch(dim, 0));
    }
    let mut assignment = initial_assignment(topology, boundary, params)?;
    optimize_from(topology.clone(), boundary, &mut assignment, params, 0)
}

fn optimize_from(
    topology: Topology,
    boundary: &[DiscreteMeasure],
    assignment: &mut Vec<DiscreteMeasure>,
    params: &NetworkParams,
    iterations_so_far: usize,
) -> Result<NetworkSolution> {
    let free = topology.free_indices();
    let sigma_max = 1.0 / params.delta_collapse;
    let mut total = total_length(&topology, assignment)?;
    let mut converged = free.is_empty();
    let mut iterations = iterations_so_far;
    'outer: for _ in 0..params.outer_iter {
        if free.is_empty() {
            break;
        }
        iterations += 1;
        for &v in &free {
            let nbs = topology.neighbors(v);
            let mut sigmas = Vec::with_capacity(nbs.len());
            for &nb in &nbs {
                let d = w2(&assignment[v], &assignment[nb])?;
                if d < params.delta_collapse {
                    // degenerate: merge v onto nb and restart
                    let contracted = topology.contracted(v, nb)?;
                    let mut reduced = collapse_assignment(&topology, assignment, v, nb);
                    return optimize_from(contracted, boundary, &mut reduced, params, iterations);
                }
                sigmas.push((1.0 / d).min(sigma_max));
            }
            let neighbor_measures: Vec<DiscreteMeasure> =
                nbs.iter().map(|&nb| assignment[nb].clone()).collect();
            let w = StarWeights::new(sigmas)?;
            let out = free_support_barycenter(
                &neighbor_measures,
                &w,
                &assignment[v],
                params.inner_iter,
                params.inner_tol,
            )?;
            assignment[v] = out.measure;
        }
        let new_total = total_length(&topology, assignment)?;
        let decrease = total - new_total;
        total = new_total;
        if decrease.abs() <= params.tol * (1.0 + total) {
            converged = true;
            break 'outer;
        }
    }
    let mut edge_plans = Vec::with_capacity(topology.edges().len());
    let mut edge_lengths = Vec::with_capacity(topology.edges().len());
    for &(a, b) in topology.edges() {
        let plan = solve_ot_exact(&assignment[a], &assignment[b], &CostSpec::SquaredEuclidean)?;
        edge_lengths.push(plan.cost_value.max(0.0).sqrt());
        edge_plans.push(plan);
    }
    let total_length: f64 = edge_lengths.iter().sum();
    Ok(NetworkSolution {
        topology,
        assignment: assignment.clone(),
        edge_plans,
        edge_lengths,
        total_length,
        converged,
        iterations,
    })
}

/// Terminals take the boundary measures; free vertices are filled in BFS
/// order from the terminals as uniform-weight barycenters of their
/// already-assigned neighbors.
fn initial_assignment(
    topology: &Topology,
    boundary: &[DiscreteMeasure],
    params: &NetworkParams,
) -> Result<Vec<DiscreteMeasure>> {
    let mut slots: Vec<Option<DiscreteMeasure>> = vec![None; topology.vertices()];
    for (&t, m) in topology.terminals().iter().zip(boundary) {
        slots[t] = Some(m.clone());
    }
    let mut remaining: Vec<usize> = topology.free_indices();
    while !remaining.is_empty() {
        // pick the unassigned free vertex with the most assigned neighbors
        // (ties by index) so every pick has at least one anchor
        let (pos, &v) = remaining
            .iter()
            .enumerate()
            .max_by_key(|&(_, &v)| {
                let count = topology
                    .neighbors(v)
                    .iter()
                    .filter(|&&nb| slots[nb].is_some())
                    .count();
                (count, usize::MAX - v)
            })
            .unwrap();
        let anchors: Vec<DiscreteMeasure> = topology
            .neighbors(v)
            .iter()
            .filter_map(|&nb| slots[nb].clone())
            .collect();
        if anchors.is_empty() {
            return Err(W2Error::Other("free vertex with no assigned neighbor".into()));
        }
        let m = if anchors.len() == 1 {
            anchors[0].clone()
        } else {
            let w = StarWeights::uniform(anchors.len())?;
            free_support_barycenter(&anchors, &w, &anchors[0], params.inner_iter, params.inner_tol)?
                .measure
        };
        slots[v] = Some(m);
        remaining.remove(pos);
    }
    Ok(slots.into_iter().map(Option::unwrap).collect())
}

fn collapse_assignment(
    topology: &Topology,
    assignment: &[DiscreteMeasure],
    v: usize,
    nb: usize,
) -> Vec<DiscreteMeasure> {
    // mirror Topology::contracted's relabeling: the dropped vertex is the
    // free one (larger index when both free)
    let free = topology.free_indices();
    let drop = if free.contains(&v) && free.contains(&nb) {
        v.max(nb)
    } else if free.contains(&v) {
        v
    } else {
        nb
    };
    assignment
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != drop)
        .map(|(_, m)| m.clone())
        .collect()
}

fn total_length(topology: &Topology, assignment: &[DiscreteMeasure]) -> Result<f64> {
    let mut total = 0.0;
    for &(a, b) in topology.edges() {
        total += w2(&assignment[a], &assignment[b])?;
    }
    Ok(total)
}

/// Minimum spanning tree of the complete W2 graph (Prim, deterministic
/// index-order tie-break). Returns the edge list and total length.
pub fn minimum_spanning_tree(measures: &[DiscreteMeasure]) -> Result<(Vec<(usize, usize)>, f64)> {
    let n = measures.len();
    if n < 2 {
        return Err(W2Error::Other("spanning tree needs at least two measures".into()));
    }
    let mut dist = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = w2(&measures[i], &measures[j])?;
            dist[i][j] = d;
            dist[j][i] = d;
        }
    }
    let mut in_tree = vec![false; n];
    in_tree[0] = true;
    let mut edges = Vec::with_capacity(n - 1);
    let mut total = 0.0;
    for _ in 1..n {
        let mut best: Option<(f64, usize, usize)> = None;
        for i in 0..n {
            if !in_tree[i] {
                continue;
            }
            for j in 0..n {
                if in_tree[j] {
                    continue;
                }
                let cand = (dist[i][j], i, j);
                if best.map_or(true, |b| cand.0 < b.0 || (cand.0 == b.0 && (cand.1, cand.2) < (b.1, b.2))) {
                    best = Some(cand);
                }
            }
        }
        let (d, i, j) = best.unwrap();
        in_tree[j] = true;
        edges.push((i.min(j), i.max(j)));
        total += d;
    }
    Ok((edges, total))
}

/// Steiner-ratio estimate for one terminal set: best network length over
/// all enumerated topologies (capped by the spanning tree, itself a
/// feasible network) divided by the spanning-tree length.
#[derive(Debug, Clone)]
pub struct SteinerRatio {
    pub steiner_length: f64,
    pub mst_length: f64,
    pub ratio: f64,
}

pub fn steiner_ratio_estimate(
    boundary: &[DiscreteMeasure],
    params: &NetworkParams,
) -> Result<SteinerRatio> {
    let k = boundary.len();
    let (_, mst_length) = minimum_spanning_tree(boundary)?;
    let mut best = mst_length;
    for topology in enumerate_topologies(k, true)? {
        let sol = optimize_network(&topology, boundary, params)?;
        if sol.total_length < best {
            best = sol.total_length;
        }
    }
    Ok(SteinerRatio {
        steiner_length: best,
        mst_length,
        ratio: if mst_length > 0.0 { best / mst_length } else { 1.0 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diracs(pts: &[&[f64]]) -> Vec<DiscreteMeasure> {
        pts.iter().map(|p| DiscreteMeasure::dirac(p.to_vec())).collect()
    }

    #[test]
    fn topology_counts() {
        assert_eq!(enumerate_topologies(2, false).unwrap().len(), 1);
        assert_eq!(enumerate_topologies(3, false).unwrap().len(), 1);
        assert_eq!(enumerate_topologies(4, false).unwrap().len(), 3);
        assert_eq!(enumerate_topologies(5, false).unwrap().len(), 15);
        assert_eq!(enumerate_topologies(6, false).unwrap().len(), 105);
        assert!(matches!(enumerate_topologies(7, false), Err(W2Error::KTooLarge(7))));
        assert!(matches!(enumerate_topologies(1, false), Err(W2Error::KTooLarge(1))));
    }

    #[test]
    fn degenerate_enumeration_includes_stars() {
        // k = 3 with contraction: the full star plus three trees where the
        // free vertex merged onto a terminal (paths), deduplicated
        let tops = enumerate_topologies(3, true).unwrap();
        assert!(tops.len() > 1);
        assert!(tops.iter().any(|t| t.free_indices().is_empty()));
    }

    #[test]
    fn topology_invariants_enforced() {
        // degree-2 free vertex rejected
        assert!(Topology::new(3, vec![(0, 2), (1, 2)], vec![0, 1]).is_err());
        // disconnected rejected
        assert!(Topology::new(4, vec![(0, 1), (2, 3), (0, 1)], vec![0, 1, 2, 3]).is_err());
        // path through a terminal is fine
        assert!(Topology::new(3, vec![(0, 2), (1, 2)], vec![0, 1, 2]).is_ok());
    }

    #[test]
    fn two_terminal_network_is_the_distance() {
        let b = diracs(&[&[0.0, 0.0], &[3.0, 4.0]]);
        let t = enumerate_topologies(2, false).unwrap().remove(0);
        let sol = optimize_network(&t, &b, &NetworkParams::default()).unwrap();
        assert!((sol.total_length - 5.0).abs() < 1e-9);
        assert!(sol.converged);
    }

    #[test]
    fn equilateral_triangle_fermat_point() {
        let h = 3.0_f64.sqrt() / 2.0;
        let b = diracs(&[&[0.0, 0.0], &[1.0, 0.0], &[0.5, h]]);
        let t = enumerate_topologies(3, false).unwrap().remove(0);
        let sol = optimize_network(&t, &b, &NetworkParams::default()).unwrap();
        assert!((sol.total_length - 3.0_f64.sqrt()).abs() < 1e-3);
        // free vertex at the centroid
        let free = sol.topology.free_indices()[0];
        let m = &sol.assignment[free];
        assert_eq!(m.len(), 1);
        assert!((m.point(0)[0] - 0.5).abs() < 1e-3);
        assert!((m.point(0)[1] - h / 3.0).abs() < 1e-3);
    }

    #[test]
    fn collinear_terminals_collapse() {
        let b = diracs(&[&[0.0], &[1.0], &[2.0]]);
        let t = enumerate_topologies(3, false).unwrap().remove(0);
        let sol = optimize_network(&t, &b, &NetworkParams::default()).unwrap();
        assert!((sol.total_length - 2.0).abs() < 1e-6);
        // the free vertex merged away
        assert!(sol.topology.free_indices().is_empty());
    }

    #[test]
    fn sample_edge_endpoints() {
        let b = diracs(&[&[0.0], &[2.0]]);
        let t = enumerate_topologies(2, false).unwrap().remove(0);
        let sol = optimize_network(&t, &b, &NetworkParams::default()).unwrap();
        let samples = sample_edge(&sol, 0, &[0.0, 0.5, 1.0]).unwrap();
        assert!(w2(&samples[0], &b[0]).unwrap() < 1e-9);
        assert!((samples[1].point(0)[0] - 1.0).abs() < 1e-9);
        assert!(w2(&samples[2], &b[1]).unwrap() < 1e-9);
    }

    #[test]
    fn mst_matches_brute_force_on_five() {
        // pseudo-random fixed points
        let pts: Vec<Vec<f64>> = vec![
            vec![0.1, 0.7],
            vec![0.9, 0.2],
            vec![0.4, 0.4],
            vec![0.8, 0.9],
            vec![0.05, 0.05],
        ];
        let ms: Vec<DiscreteMeasure> =
            pts.iter().map(|p| DiscreteMeasure::dirac(p.clone())).collect();
        let (_, got) = minimum_spanning_tree(&ms).unwrap();
        // brute force over all 5^3 = 125 labeled spanning trees (Prüfer)
        let n = 5;
        let mut dist = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                dist[i][j] = w2(&ms[i], &ms[j]).unwrap();
            }
        }
        let mut best = f64::INFINITY;
        for code in 0..125 {
            let prufer = [code % 5, (code / 5) % 5, (code / 25) % 5];
            let mut degree = vec![1usize; n];
            for &p in &prufer {
                degree[p] += 1;
            }
            let mut length = 0.0;
            let mut deg = degree.clone();
            let mut used = vec![false; n];
            for &p in &prufer {
                let leaf = (0..n).find(|&v| deg[v] == 1 && !used[v]).unwrap();
                length += dist[leaf][p];
                used[leaf] = true;
                deg[p] -= 1;
            }
            let rest: Vec<usize> = (0..n).filter(|&v| !used[v]).collect();
            length += dist[rest[0]][rest[1]];
            best = best.min(length);
        }
        assert!((got - best).abs() < 1e-9);
    }

    #[test]
    fn mst_of_triangle_is_two_sides() {
        let h = 3.0_f64.sqrt() / 2.0;
        let b = diracs(&[&[0.0, 0.0], &[1.0, 0.0], &[0.5, h]]);
        let (_, len) = minimum_spanning_tree(&b).unwrap();
        assert!((len - 2.0).abs() < 1e-9);
    }

    #[test]
    fn equilateral_steiner_ratio() {
        let h = 3.0_f64.sqrt() / 2.0;
        let b = diracs(&[&[0.0, 0.0], &[1.0, 0.0], &[0.5, h]]);
        let r = steiner_ratio_estimate(&b, &NetworkParams::default()).unwrap();
        assert!((r.ratio - 3.0_f64.sqrt() / 2.0).abs() < 1e-3);
        assert!(r.steiner_length <= r.mst_length + 1e-12);
    }

    #[test]
    fn two_terminal_ratio_is_one() {
        let b = diracs(&[&[0.0], &[1.0]]);
        let r = steiner_ratio_estimate(&b, &NetworkParams::default()).unwrap();
        assert!((r.ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fermat_first_order_condition() {
        // converged non-degenerate free vertex: unit directions to the
        // three point-mass neighbors sum to (nearly) zero
        let b = diracs(&[&[0.0, 0.0], &[2.0, 0.1], &[0.9, 1.7]]);
        let t = enumerate_topologies(3, false).unwrap().remove(0);
        let sol = optimize_network(&t, &b, &NetworkParams::default()).unwrap();
        let free = sol.topology.free_indices();
        assert_eq!(free.len(), 1);
        let p = sol.assignment[free[0]].point(0).to_vec();
        let mut sum = [0.0, 0.0];
        for m in &b {
            let q = m.point(0);
            let d = ((q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2)).sqrt();
            sum[0] += (q[0] - p[0]) / d;
            sum[1] += (q[1] - p[1]) / d;
        }
        assert!((sum[0] * sum[0] + sum[1] * sum[1]).sqrt() < 1e-3);
    }
}
