//! Measure representations on R^n and the energy functionals evaluated on them.
//!
//! Two concrete representations are used everywhere:
//! `DiscreteMeasure` (finitely supported, the currency of the transport
//! solvers) and `GridMeasure` (piecewise-constant density on a regular box
//! grid, which carries entropy, power energy and L-infinity norms).

use crate::error::{Result, W2Error};

const MASS_TOL: f64 = 1e-12;

/// Finitely supported probability measure: points with nonnegative weights
/// summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    dim: usize,
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(dim: usize, points: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(W2Error::InvalidMeasure("dimension must be positive".into()));
        }
        if points.is_empty() || points.len() != weights.len() {
            return Err(W2Error::InvalidMeasure(format!(
                "points/weights length mismatch: {} vs {}",
                points.len(),
                weights.len()
            )));
        }
        for p in &points {
            if p.len() != dim {
                return Err(W2Error::DimensionMismatch(p.len(), dim));
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(W2Error::InvalidMeasure("non-finite coordinate".into()));
            }
        }
        if weights.iter().any(|&w| w < 0.0 || !w.is_finite()) {
            return Err(W2Error::InvalidMeasure("negative or non-finite weight".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(W2Error::InvalidMeasure(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        Ok(Self { dim, points, weights })
    }

    /// Point mass at `p`.
    pub fn dirac(p: Vec<f64>) -> Self {
        let dim = p.len();
        Self { dim, points: vec![p], weights: vec![1.0] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false // at least one point by construction
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    /// Weighted mean of the support.
    pub fn mean(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.dim];
        for (p, &w) in self.points.iter().zip(&self.weights) {
            for (mi, &pi) in m.iter_mut().zip(p) {
                *mi += w * pi;
            }
        }
        m
    }

    /// Second moment about the origin.
    pub fn second_moment(&self) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, &w)| w * p.iter().map(|x| x * x).sum::<f64>())
            .sum()
    }

    pub fn translate(&self, v: &[f64]) -> Self {
        let points = self
            .points
            .iter()
            .map(|p| p.iter().zip(v).map(|(a, b)| a + b).collect())
            .collect();
        Self { dim: self.dim, points, weights: self.weights.clone() }
    }

    /// Applies `f` to every support point, keeping weights.
    pub fn map_points(&self, mut f: impl FnMut(&[f64]) -> Vec<f64>) -> Self {
        let points = self.points.iter().map(|p| f(p)).collect();
        Self { dim: self.dim, points, weights: self.weights.clone() }
    }

    /// Merges support points whose coordinates coincide within `tol`,
    /// summing weights. Kept order is first occurrence.
    pub fn merged(&self, tol: f64) -> Self {
        let mut points: Vec<Vec<f64>> = Vec::new();
        let mut weights: Vec<f64> = Vec::new();
        'outer: for (p, &w) in self.points.iter().zip(&self.weights) {
            for (q, wq) in points.iter().zip(weights.iter_mut()) {
                if p.iter().zip(q).all(|(a, b)| (a - b).abs() <= tol) {
                    *wq += w;
                    continue 'outer;
                }
            }
            points.push(p.clone());
            weights.push(w);
        }
        Self { dim: self.dim, points, weights }
    }

    /// Drops support points of zero weight (keeps at least one point).
    pub fn pruned(&self, tol: f64) -> Self {
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (p, &w) in self.points.iter().zip(&self.weights) {
            if w > tol {
                points.push(p.clone());
                weights.push(w);
            }
        }
        if points.is_empty() {
            return self.clone();
        }
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        Self { dim: self.dim, points, weights }
    }
}

/// Entropy assigned to any discrete (hence singular) measure.
pub const DISCRETE_ENTROPY: f64 = f64::NEG_INFINITY;

/// Probability measure with piecewise-constant density on a regular grid
/// over an axis-aligned box. Cells are closed on the left, open on the
/// right; `cell_mass` is row-major with axis 0 slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMeasure {
    dim: usize,
    bounds: Vec<(f64, f64)>,
    resolution: Vec<usize>,
    cell_mass: Vec<f64>,
}

impl GridMeasure {
    pub fn new(
        bounds: Vec<(f64, f64)>,
        resolution: Vec<usize>,
        cell_mass: Vec<f64>,
    ) -> Result<Self> {
        let dim = bounds.len();
        if dim == 0 || resolution.len() != dim {
            return Err(W2Error::InvalidMeasure("bounds/resolution mismatch".into()));
        }
        if bounds.iter().any(|&(lo, hi)| !(hi > lo) || !lo.is_finite() || !hi.is_finite()) {
            return Err(W2Error::InvalidMeasure("degenerate box bounds".into()));
        }
        if resolution.iter().any(|&r| r == 0) {
            return Err(W2Error::InvalidMeasure("zero resolution".into()));
        }
        let cells: usize = resolution.iter().product();
        if cell_mass.len() != cells {
            return Err(W2Error::InvalidMeasure(format!(
                "cell_mass length {} but grid has {} cells",
                cell_mass.len(),
                cells
            )));
        }
        if cell_mass.iter().any(|&m| m < 0.0 || !m.is_finite()) {
            return Err(W2Error::InvalidMeasure("negative cell mass".into()));
        }
        let total: f64 = cell_mass.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(W2Error::InvalidMeasure(format!(
                "cell masses sum to {total}, expected 1"
            )));
        }
        Ok(Self { dim, bounds, resolution, cell_mass })
    }

    /// Uniform measure on the whole box.
    pub fn uniform(bounds: Vec<(f64, f64)>, resolution: Vec<usize>) -> Result<Self> {
        let cells: usize = resolution.iter().product();
        Self::new(bounds, resolution, vec![1.0 / cells as f64; cells])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn resolution(&self) -> &[usize] {
        &self.resolution
    }

    pub fn cell_mass(&self) -> &[f64] {
        &self.cell_mass
    }

    pub fn num_cells(&self) -> usize {
        self.cell_mass.len()
    }

    /// Per-axis cell widths.
    pub fn cell_widths(&self) -> Vec<f64> {
        self.bounds
            .iter()
            .zip(&self.resolution)
            .map(|(&(lo, hi), &r)| (hi - lo) / r as f64)
            .collect()
    }

    /// Volume of a single cell (all cells are congruent).
    pub fn cell_volume(&self) -> f64 {
        self.cell_widths().iter().product()
    }

    /// Euclidean diameter of a cell.
    pub fn cell_diameter(&self) -> f64 {
        self.cell_widths().iter().map(|w| w * w).sum::<f64>().sqrt()
    }

    /// Multi-index of a flat cell index (axis 0 slowest).
    pub fn unravel(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim];
        for a in (0..self.dim).rev() {
            idx[a] = flat % self.resolution[a];
            flat /= self.resolution[a];
        }
        idx
    }

    pub fn ravel(&self, idx: &[usize]) -> usize {
        let mut flat = 0;
        for a in 0..self.dim {
            flat = flat * self.resolution[a] + idx[a];
        }
        flat
    }

    pub fn cell_center(&self, flat: usize) -> Vec<f64> {
        let idx = self.unravel(flat);
        let w = self.cell_widths();
        idx.iter()
            .enumerate()
            .map(|(a, &i)| self.bounds[a].0 + (i as f64 + 0.5) * w[a])
            .collect()
    }

    /// Maximum cell density (grid L-infinity norm).
    pub fn linfty_norm(&self) -> f64 {
        let vol = self.cell_volume();
        self.cell_mass.iter().cloned().fold(0.0, f64::max) / vol
    }

    /// True when the two grids share box and resolution exactly.
    pub fn same_geometry(&self, other: &Self) -> bool {
        self.bounds == other.bounds && self.resolution == other.resolution
    }

    pub fn with_cell_mass(&self, cell_mass: Vec<f64>) -> Result<Self> {
        Self::new(self.bounds.clone(), self.resolution.clone(), cell_mass)
    }

    /// Center of mass.
    pub fn mean(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.dim];
        for (c, &mass) in (0..self.num_cells()).map(|i| self.cell_center(i)).zip(&self.cell_mass) {
            for (mi, ci) in m.iter_mut().zip(&c) {
                *mi += mass * ci;
            }
        }
        m
    }
}

/// Convex energies evaluated on grid measures.
#[derive(Debug, Clone)]
pub enum EnergyFunctional {
    /// Negative differential entropy, -h(mu).
    NegEntropy,
    /// Integral of density^m for an exponent m > 1.
    Power(f64),
    /// Entropy relative to a strictly positive reference density on the
    /// same grid geometry.
    RelativeEntropy(GridMeasure),
}

impl EnergyFunctional {
    pub fn power(m: f64) -> Result<Self> {
        if !(m > 1.0) {
            return Err(W2Error::InvalidMeasure(format!("power exponent {m} must exceed 1")));
        }
        Ok(Self::Power(m))
    }

    pub fn relative_entropy(reference: GridMeasure) -> Result<Self> {
        if reference.cell_mass().iter().any(|&m| m <= 0.0) {
            return Err(W2Error::InvalidMeasure(
                "relative-entropy reference must be positive on every cell".into(),
            ));
        }
        Ok(Self::RelativeEntropy(reference))
    }
}

/// Entropy of the piecewise-constant density carried by the grid:
/// -sum_c mass_c log(mass_c / vol_c), with 0 log 0 = 0.
///
/// This is the entropy of the grid-level density, which converges to the
/// continuum differential entropy only as the resolution grows.
pub fn entropy(mu: &GridMeasure) -> f64 {
    let vol = mu.cell_volume();
    -mu.cell_mass()
        .iter()
        .filter(|&&m| m > 0.0)
        .map(|&m| m * (m / vol).ln())
        .sum::<f64>()
}

/// Evaluates the functional on a grid measure. Returns +infinity only for
/// relative entropy against an incompatible reference (reported as an
/// error instead).
pub fn energy(mu: &GridMeasure, f: &EnergyFunctional) -> Result<f64> {
    match f {
        EnergyFunctional::NegEntropy => Ok(-entropy(mu)),
        EnergyFunctional::Power(m) => {
            let vol = mu.cell_volume();
            Ok(mu
                .cell_mass()
                .iter()
                .map(|&mass| vol * (mass / vol).powf(*m))
                .sum())
        }
        EnergyFunctional::RelativeEntropy(reference) => {
            if !mu.same_geometry(reference) {
                return Err(W2Error::GeometryMismatch(
                    "relative-entropy reference grid differs from measure grid".into(),
                ));
            }
            let vol = mu.cell_volume();
            Ok(mu
                .cell_mass()
                .iter()
                .zip(reference.cell_mass())
                .filter(|(&m, _)| m > 0.0)
                .map(|(&m, &r)| m * ((m / vol) / (r / vol)).ln())
                .sum())
        }
    }
}

/// Mass at cell centers, weights equal to cell masses. Total mass is
/// preserved exactly; zero-mass cells are dropped.
pub fn grid_to_discrete(mu: &GridMeasure) -> DiscreteMeasure {
    let mut points = Vec::new();
    let mut weights = Vec::new();
    for (c, &m) in mu.cell_mass().iter().enumerate() {
        if m > 0.0 {
            points.push(mu.cell_center(c));
            weights.push(m);
        }
    }
    if points.is_empty() {
        points.push(mu.cell_center(0));
        weights.push(1.0);
    }
    DiscreteMeasure { dim: mu.dim(), points, weights }
}

/// Mass-preserving binning of a discrete measure onto a grid geometry.
/// Cells are closed-left/open-right; points outside the box are clamped to
/// the nearest boundary cell.
pub fn rasterize(mu: &DiscreteMeasure, grid: &GridMeasure) -> Result<GridMeasure> {
    if mu.dim() != grid.dim() {
        return Err(W2Error::DimensionMismatch(mu.dim(), grid.dim()));
    }
    let widths = grid.cell_widths();
    let mut cell_mass = vec![0.0; grid.num_cells()];
    for (p, &w) in mu.points().iter().zip(mu.weights()) {
        let mut idx = vec![0usize; grid.dim()];
        for a in 0..grid.dim() {
            let rel = (p[a] - grid.bounds()[a].0) / widths[a];
            let i = rel.floor() as isize;
            idx[a] = i.clamp(0, grid.resolution()[a] as isize - 1) as usize;
        }
        cell_mass[grid.ravel(&idx)] += w;
    }
    grid.with_cell_mass(cell_mass)
}
