//! JSON schemas for measures, plans, instances and results, plus the CSV
//! emitters consumed by plotting scripts.

use crate::error::{Result, W2Error};
use crate::measures::{grid_to_discrete, DiscreteMeasure, GridMeasure};
use crate::multimarginal::{MultiPlan, StarWeights};
use crate::network::{NetworkSolution, Topology};
use crate::transport::TransportPlan;
use serde::{Deserialize, Serialize};

/// On-disk measure: point cloud or grid density.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum MeasureJson {
    #[serde(rename = "points")]
    Points {
        dim: usize,
        points: Vec<Vec<f64>>,
        weights: Vec<f64>,
    },
    #[serde(rename = "grid")]
    Grid {
        dim: usize,
        #[serde(rename = "box")]
        bounds: Vec<[f64; 2]>,
        resolution: Vec<usize>,
        cell_mass: Vec<f64>,
    },
}

/// In-memory counterpart of `MeasureJson`.
#[derive(Debug, Clone)]
pub enum AnyMeasure {
    Discrete(DiscreteMeasure),
    Grid(GridMeasure),
}

impl AnyMeasure {
    /// Discrete view: grid measures become mass at cell centers.
    pub fn as_discrete(&self) -> DiscreteMeasure {
        match self {
            AnyMeasure::Discrete(m) => m.clone(),
            AnyMeasure::Grid(g) => grid_to_discrete(g),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            AnyMeasure::Discrete(m) => m.dim(),
            AnyMeasure::Grid(g) => g.dim(),
        }
    }
}

pub fn measure_from_json(j: &MeasureJson) -> Result<AnyMeasure> {
    match j {
        MeasureJson::Points { dim, points, weights } => Ok(AnyMeasure::Discrete(
            DiscreteMeasure::new(*dim, points.clone(), weights.clone())?,
        )),
        MeasureJson::Grid { dim, bounds, resolution, cell_mass } => {
            if bounds.len() != *dim {
                return Err(W2Error::InvalidMeasure(format!(
                    "box has {} axes but dim is {dim}",
                    bounds.len()
                )));
            }
            Ok(AnyMeasure::Grid(GridMeasure::new(
                bounds.iter().map(|b| (b[0], b[1])).collect(),
                resolution.clone(),
                cell_mass.clone(),
            )?))
        }
    }
}

pub fn measure_to_json(m: &AnyMeasure) -> MeasureJson {
    match m {
        AnyMeasure::Discrete(d) => MeasureJson::Points {
            dim: d.dim(),
            points: d.points().to_vec(),
            weights: d.weights().to_vec(),
        },
        AnyMeasure::Grid(g) => MeasureJson::Grid {
            dim: g.dim(),
            bounds: g.bounds().iter().map(|&(lo, hi)| [lo, hi]).collect(),
            resolution: g.resolution().to_vec(),
            cell_mass: g.cell_mass().to_vec(),
        },
    }
}

/// Two-marginal plan export.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlanJson {
    pub mass: Vec<Vec<f64>>,
    pub dual_u: Vec<f64>,
    pub dual_v: Vec<f64>,
    pub cost: f64,
}

pub fn plan_to_json(plan: &TransportPlan) -> PlanJson {
    let n = plan.target.len();
    PlanJson {
        mass: plan.mass.chunks(n).map(|r| r.to_vec()).collect(),
        dual_u: plan.dual_u.clone(),
        dual_v: plan.dual_v.clone(),
        cost: plan.cost_value,
    }
}

/// Multi-marginal plan export.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MultiPlanJson {
    pub atoms: Vec<MultiAtomJson>,
    pub cost: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MultiAtomJson {
    pub idx: Vec<usize>,
    pub mass: f64,
}

pub fn multiplan_to_json(plan: &MultiPlan) -> MultiPlanJson {
    MultiPlanJson {
        atoms: plan
            .atoms
            .iter()
            .map(|(idx, mass)| MultiAtomJson { idx: idx.clone(), mass: *mass })
            .collect(),
        cost: plan.cost_value,
    }
}

/// Barycenter problem input: marginals plus weights.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BarycenterInstanceJson {
    pub marginals: Vec<MeasureJson>,
    pub sigmas: Vec<f64>,
}

pub fn barycenter_instance(
    j: &BarycenterInstanceJson,
) -> Result<(Vec<DiscreteMeasure>, StarWeights)> {
    let mus: Vec<DiscreteMeasure> = j
        .marginals
        .iter()
        .map(|m| Ok(measure_from_json(m)?.as_discrete()))
        .collect::<Result<_>>()?;
    Ok((mus, StarWeights::new(j.sigmas.clone())?))
}

/// Network instance: boundary measures plus an explicit topology or
/// `"auto"` (best over all enumerated topologies).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkInstanceJson {
    pub dim: usize,
    pub boundary: Vec<MeasureJson>,
    pub topology: TopologySpecJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TopologySpecJson {
    Auto(String),
    Explicit {
        vertices: usize,
        edges: Vec<[usize; 2]>,
        terminals: Vec<usize>,
    },
}

impl TopologySpecJson {
    pub fn resolve(&self) -> Result<Option<Topology>> {
        match self {
            TopologySpecJson::Auto(s) if s == "auto" => Ok(None),
            TopologySpecJson::Auto(s) => {
                Err(W2Error::Other(format!("unknown topology mode {s:?}, expected \"auto\"")))
            }
            TopologySpecJson::Explicit { vertices, edges, terminals } => Ok(Some(Topology::new(
                *vertices,
                edges.iter().map(|e| (e[0], e[1])).collect(),
                terminals.clone(),
            )?)),
        }
    }
}

/// Network solution export.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolutionJson {
    pub vertices: usize,
    pub edges: Vec<[usize; 2]>,
    pub terminals: Vec<usize>,
    pub assignment: Vec<MeasureJson>,
    pub edge_lengths: Vec<f64>,
    pub total_length: f64,
    pub converged: bool,
    pub iterations: usize,
}

pub fn solution_to_json(sol: &NetworkSolution) -> SolutionJson {
    SolutionJson {
        vertices: sol.topology.vertices(),
        edges: sol.topology.edges().iter().map(|&(a, b)| [a, b]).collect(),
        terminals: sol.topology.terminals().to_vec(),
        assignment: sol
            .assignment
            .iter()
            .map(|m| measure_to_json(&AnyMeasure::Discrete(m.clone())))
            .collect(),
        edge_lengths: sol.edge_lengths.clone(),
        total_length: sol.total_length,
        converged: sol.converged,
        iterations: sol.iterations,
    }
}

/// Deserializes with a JSON-pointer-style path in the error message.
pub fn parse_json<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de)
        .map_err(|e| W2Error::Other(format!("at /{}: {}", e.path(), e.inner())))
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

/// CSV of per-edge energy profiles: `edge_id,t,energy`.
pub fn energy_profiles_csv(profiles: &[Vec<(f64, f64)>]) -> String {
    let mut out = String::from("edge_id,t,energy\n");
    for (e, profile) in profiles.iter().enumerate() {
        for &(t, v) in profile {
            out.push_str(&format!("{e},{t},{v}\n"));
        }
    }
    out
}

/// CSV of an H-graph eigenvalue sweep: `ratio,max_eig,negative`.
pub fn hgraph_sweep_csv(rows: &[(f64, f64, bool)]) -> String {
    let mut out = String::from("ratio,max_eig,negative\n");
    for &(ratio, max_eig, negative) in rows {
        out.push_str(&format!("{ratio},{max_eig},{negative}\n"));
    }
    out
}
