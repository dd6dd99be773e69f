//! Meshfree finite-difference stencils.
//!
//! A stencil at point `x_i` approximates a linear differential operator as
//! `a_ii u_i + sum_j a_ij u_j`. The neighbor weights satisfy polynomial
//! reproduction constraints `V a = b` (monomials of the relative coordinates)
//! and minimize `sum_j a_ij^2 / w_ij` with `w_ij = |x_j - x_i|^-beta`. For
//! differential operators the diagonal closes the row, `a_ii = -sum_j a_ij`.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pointcloud::{Neighborhood, PointCloud, SpatialGrid, RADIUS_GROWTH};
use crate::Vec2;

/// Distance exponent of the stencil weight function.
pub const DEFAULT_BETA: f64 = 2.0;

/// Safety factor between the constraint count and the neighbor count.
pub const NEIGHBOR_SAFETY: f64 = 2.5;

/// Number of radius enlargements tried before a row is declared failed.
pub const MAX_RETRIES: usize = 5;

const CONDITION_LIMIT: f64 = 1e12;
const RESIDUAL_LIMIT: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Operator {
    Laplacian,
    Dx,
    Dy,
    /// Point evaluation (interpolation); rows carry no diagonal.
    Identity,
}

impl Operator {
    /// Order of the highest derivative.
    pub fn differential_order(self) -> usize {
        match self {
            Operator::Laplacian => 2,
            Operator::Dx | Operator::Dy => 1,
            Operator::Identity => 0,
        }
    }

    /// The operator applied to `x^p y^q` at the origin.
    pub fn apply_to_monomial(self, p: u32, q: u32) -> f64 {
        match (self, p, q) {
            (Operator::Laplacian, 2, 0) | (Operator::Laplacian, 0, 2) => 2.0,
            (Operator::Dx, 1, 0) | (Operator::Dy, 0, 1) | (Operator::Identity, 0, 0) => 1.0,
            _ => 0.0,
        }
    }
}

/// An operator together with its consistency order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct OperatorSpec {
    pub operator: Operator,
    pub order: usize,
}

impl OperatorSpec {
    pub fn new(operator: Operator, order: usize) -> Self {
        assert!((1..=4).contains(&order), "consistency order must be 1..=4");
        OperatorSpec { operator, order }
    }

    pub fn laplacian(order: usize) -> Self {
        Self::new(Operator::Laplacian, order)
    }

    pub fn dx(order: usize) -> Self {
        Self::new(Operator::Dx, order)
    }

    pub fn dy(order: usize) -> Self {
        Self::new(Operator::Dy, order)
    }

    pub fn identity(order: usize) -> Self {
        Self::new(Operator::Identity, order)
    }

    /// Highest monomial degree that is reproduced exactly.
    ///
    /// Differential operators of order `d` use `k + d - 1`; point evaluation
    /// reproduces degree `k`.
    pub fn constraint_degree(&self) -> usize {
        match self.operator {
            Operator::Identity => self.order,
            op => self.order + op.differential_order() - 1,
        }
    }

    /// Only point evaluation constrains the constant monomial; differential
    /// rows annihilate constants through the diagonal.
    pub fn includes_constant(&self) -> bool {
        self.operator == Operator::Identity
    }

    pub fn constraint_count(&self) -> usize {
        let deg = self.constraint_degree();
        let full = (deg + 1) * (deg + 2) / 2;
        if self.includes_constant() {
            full
        } else {
            full - 1
        }
    }

    /// Neighbor count requested from the neighborhood search.
    pub fn required_neighbors(&self) -> usize {
        (NEIGHBOR_SAFETY * self.constraint_count() as f64).ceil() as usize
    }

    fn exponents(&self) -> Vec<(u32, u32)> {
        monomial_exponents(self.constraint_degree(), self.includes_constant())
    }
}

/// Exponents `(p, q)` of `x^p y^q` in graded lexicographic order:
/// `x, y, x^2, xy, y^2, x^3, ...`.
pub fn monomial_exponents(degree: usize, include_constant: bool) -> Vec<(u32, u32)> {
    let start = if include_constant { 0 } else { 1 };
    let mut out = Vec::new();
    for d in start..=degree as u32 {
        for q in 0..=d {
            out.push((d - q, q));
        }
    }
    out
}

/// Builds the reproduction constraints `V a = b` for the neighbors of `center`.
pub fn constraint_system(
    center: Vec2,
    neighbor_coords: &[Vec2],
    spec: OperatorSpec,
) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let exps = spec.exponents();
    if neighbor_coords.len() < exps.len() {
        return Err(Error::InsufficientNeighbors {
            required: exps.len(),
            found: neighbor_coords.len(),
        });
    }
    let v = DMatrix::from_fn(exps.len(), neighbor_coords.len(), |r, j| {
        let d = neighbor_coords[j] - center;
        let (p, q) = exps[r];
        d.x.powi(p as i32) * d.y.powi(q as i32)
    });
    let b = DVector::from_iterator(
        exps.len(),
        exps.iter().map(|&(p, q)| spec.operator.apply_to_monomial(p, q)),
    );
    Ok((v, b))
}

/// Factorization of a weighted constraint system, reusable for several
/// right-hand sides over the same neighbors.
struct WlsqFactor {
    /// Constraint matrix with equilibrated rows.
    v: DMatrix<f64>,
    row_scale: Vec<f64>,
    sqrt_w: Vec<f64>,
    q: DMatrix<f64>,
    r: DMatrix<f64>,
}

impl WlsqFactor {
    fn new(v: &DMatrix<f64>, distances: &[f64], beta: f64) -> Result<Self> {
        let (c, m) = v.shape();
        if m < c {
            return Err(Error::InsufficientNeighbors { required: c, found: m });
        }
        if distances.len() != m {
            return Err(Error::SizeMismatch { expected: m, found: distances.len() });
        }
        let sqrt_w: Vec<f64> = distances.iter().map(|d| d.powf(-0.5 * beta)).collect();
        let mut row_scale = Vec::with_capacity(c);
        for r in 0..c {
            let norm = v.row(r).norm();
            if norm == 0.0 || !norm.is_finite() {
                return Err(Error::SingularConstraints { condition: f64::INFINITY });
            }
            row_scale.push(1.0 / norm);
        }
        let v = DMatrix::from_fn(c, m, |r, j| v[(r, j)] * row_scale[r]);
        // B = W^{1/2} V^T; the minimum-norm z with B^T z = b gives a = W^{1/2} z.
        let bmat = DMatrix::from_fn(m, c, |j, r| sqrt_w[j] * v[(r, j)]);
        let qr = bmat.qr();
        let q = qr.q();
        let r = qr.r();
        let diag: Vec<f64> = (0..c).map(|i| r[(i, i)].abs()).collect();
        let max = diag.iter().cloned().fold(0.0, f64::max);
        let min = diag.iter().cloned().fold(f64::INFINITY, f64::min);
        let condition = if min > 0.0 { (max / min).powi(2) } else { f64::INFINITY };
        if !(condition <= CONDITION_LIMIT) {
            return Err(Error::SingularConstraints { condition });
        }
        Ok(WlsqFactor { v, row_scale, sqrt_w, q, r })
    }

    fn min_norm(&self, rhs: &DVector<f64>) -> DVector<f64> {
        let y = self
            .r
            .transpose()
            .solve_lower_triangular(rhs)
            .expect("triangular factor has a nonzero diagonal");
        let z = &self.q * y;
        DVector::from_iterator(z.len(), z.iter().zip(&self.sqrt_w).map(|(z, s)| z * s))
    }

    fn solve(&self, b: &DVector<f64>) -> Result<DVector<f64>> {
        let bt = DVector::from_iterator(
            b.len(),
            b.iter().zip(&self.row_scale).map(|(b, s)| b * s),
        );
        let mut a = self.min_norm(&bt);
        let resid = &bt - &self.v * &a;
        a += self.min_norm(&resid);
        let resid = &bt - &self.v * &a;
        let scale = bt.amax();
        if resid.amax() > RESIDUAL_LIMIT * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::SingularConstraints { condition: f64::INFINITY });
        }
        Ok(a)
    }
}

/// Minimum weighted-norm weights satisfying `V a = b`, with
/// `w_j = distances[j]^-beta`. One step of iterative refinement is applied.
pub fn wlsq_weights(
    v: &DMatrix<f64>,
    b: &DVector<f64>,
    distances: &[f64],
    beta: f64,
) -> Result<Vec<f64>> {
    let factor = WlsqFactor::new(v, distances, beta)?;
    Ok(factor.solve(b)?.iter().copied().collect())
}

/// Weights of one operator at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct StencilRow {
    pub center: usize,
    pub neighbors: Vec<usize>,
    pub weights: Vec<f64>,
    pub diag: f64,
}

impl StencilRow {
    pub fn apply(&self, field: &[f64]) -> f64 {
        self.neighbors
            .iter()
            .zip(&self.weights)
            .fold(self.diag * field[self.center], |acc, (&j, &a)| acc + a * field[j])
    }

    /// The row applied to the x components of a vector field.
    pub fn apply_x(&self, u: &[Vec2]) -> f64 {
        self.neighbors
            .iter()
            .zip(&self.weights)
            .fold(self.diag * u[self.center].x, |acc, (&j, &a)| acc + a * u[j].x)
    }

    /// The row applied to the y components of a vector field.
    pub fn apply_y(&self, u: &[Vec2]) -> f64 {
        self.neighbors
            .iter()
            .zip(&self.weights)
            .fold(self.diag * u[self.center].y, |acc, (&j, &a)| acc + a * u[j].y)
    }

    /// Sum of weight magnitudes, diagonal included.
    pub fn abs_sum(&self) -> f64 {
        self.weights.iter().fold(self.diag.abs(), |s, a| s + a.abs())
    }

    /// Largest weight magnitude, diagonal included.
    pub fn max_weight(&self) -> f64 {
        self.weights.iter().fold(self.diag.abs(), |m, a| m.max(a.abs()))
    }
}

impl fmt::Display for StencilRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.center)?;
        for (j, a) in self.neighbors.iter().zip(&self.weights) {
            write!(f, " ({j},{a:e})")?;
        }
        write!(f, " {:e}", self.diag)
    }
}

/// One stencil row per target point.
#[derive(Clone, Debug)]
pub struct StencilSet {
    spec: OperatorSpec,
    n_points: usize,
    rows: Vec<StencilRow>,
}

impl StencilSet {
    pub fn spec(&self) -> OperatorSpec {
        self.spec
    }

    pub fn rows(&self) -> &[StencilRow] {
        &self.rows
    }

    pub fn row(&self, k: usize) -> &StencilRow {
        &self.rows[k]
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Size of the cloud the set was built on.
    pub fn n_points(&self) -> usize {
        self.n_points
    }

    /// Evaluates the operator at every target point.
    pub fn apply(&self, field: &[f64]) -> Result<Vec<f64>> {
        if field.len() != self.n_points {
            return Err(Error::SizeMismatch { expected: self.n_points, found: field.len() });
        }
        Ok(self.rows.iter().map(|r| r.apply(field)).collect())
    }
}

/// Which cloud points may serve as stencil neighbors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NeighborFilter {
    All,
    InteriorOnly,
}

impl NeighborFilter {
    fn admits(self, cloud: &PointCloud, j: usize) -> bool {
        match self {
            NeighborFilter::All => true,
            NeighborFilter::InteriorOnly => !cloud.is_boundary(j),
        }
    }
}

/// Computes weights of every operator in `ops` at `center` (all share a
/// constraint degree), relative to the given neighbors.
fn row_weights(
    pts: &[Vec2],
    center: Vec2,
    neighbors: &[usize],
    specs: &[OperatorSpec],
    beta: f64,
) -> Result<Vec<Vec<f64>>> {
    let deg = specs[0].constraint_degree();
    debug_assert!(specs
        .iter()
        .all(|s| s.constraint_degree() == deg && s.includes_constant() == specs[0].includes_constant()));
    let distances: Vec<f64> = neighbors.iter().map(|&j| (pts[j] - center).norm()).collect();
    let scale = distances.iter().cloned().fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(Error::SingularConstraints { condition: f64::INFINITY });
    }
    // Work in coordinates scaled by the stencil radius; weights of an operator
    // of differential order d scale back with scale^-d.
    let scaled: Vec<Vec2> = neighbors.iter().map(|&j| (pts[j] - center) / scale).collect();
    let scaled_dist: Vec<f64> = distances.iter().map(|d| d / scale).collect();
    let (v, _) = constraint_system(Vec2::zeros(), &scaled, specs[0])?;
    let factor = WlsqFactor::new(&v, &scaled_dist, beta)?;
    specs
        .iter()
        .map(|spec| {
            let (_, b) = constraint_system(Vec2::zeros(), &scaled, *spec)?;
            let a = factor.solve(&b)?;
            let s = scale.powi(-(spec.operator.differential_order() as i32));
            Ok(a.iter().map(|a| a * s).collect())
        })
        .collect()
}

fn collect_neighbors(
    cloud: &PointCloud,
    grid: &SpatialGrid,
    center: Vec2,
    radius: f64,
    exclude: Option<usize>,
    filter: NeighborFilter,
) -> Vec<usize> {
    let mut list = grid.within(cloud.points(), center, radius, exclude);
    list.retain(|&j| filter.admits(cloud, j));
    list
}

/// Builds rows for several operators sharing one neighbor set per point.
///
/// Each row first uses the point's neighborhood; if that has too few admitted
/// neighbors or the constraints are singular, the radius grows by 1.2x, up to
/// five times.
pub fn operator_weights_multi(
    cloud: &PointCloud,
    neighborhood: &Neighborhood,
    specs: &[OperatorSpec],
    targets: &[usize],
    filter: NeighborFilter,
) -> Result<Vec<StencilSet>> {
    assert!(!specs.is_empty());
    let pts = cloud.points();
    let grid_cell = 2.5 * cloud.h();
    let grid = std::sync::OnceLock::new();
    let needed = specs[0].constraint_count();
    let rows: Vec<Result<Vec<StencilRow>>> = targets
        .par_iter()
        .map(|&i| {
            let center = pts[i];
            let mut neighbors: Vec<usize> = neighborhood
                .neighbors(i)
                .iter()
                .copied()
                .filter(|&j| filter.admits(cloud, j))
                .collect();
            let mut radius = neighborhood.radius(i);
            for attempt in 0..=MAX_RETRIES {
                if neighbors.len() >= needed {
                    if let Ok(ws) = row_weights(pts, center, &neighbors, specs, DEFAULT_BETA) {
                        return Ok(ws
                            .into_iter()
                            .zip(specs)
                            .map(|(weights, spec)| {
                                let diag = if spec.includes_constant() {
                                    0.0
                                } else {
                                    -weights.iter().sum::<f64>()
                                };
                                StencilRow { center: i, neighbors: neighbors.clone(), weights, diag }
                            })
                            .collect());
                    }
                }
                if attempt == MAX_RETRIES {
                    break;
                }
                radius *= RADIUS_GROWTH;
                let g: &SpatialGrid = grid.get_or_init(|| cloud.grid(grid_cell));
                neighbors = collect_neighbors(cloud, g, center, radius, Some(i), filter);
            }
            Err(Error::StencilFailure { index: i })
        })
        .collect();
    let mut sets: Vec<StencilSet> = specs
        .iter()
        .map(|&spec| StencilSet { spec, n_points: cloud.len(), rows: Vec::with_capacity(targets.len()) })
        .collect();
    for r in rows {
        for (set, row) in sets.iter_mut().zip(r?) {
            set.rows.push(row);
        }
    }
    Ok(sets)
}

/// Builds one operator at the target points.
pub fn operator_weights(
    cloud: &PointCloud,
    neighborhood: &Neighborhood,
    spec: OperatorSpec,
    targets: &[usize],
) -> Result<StencilSet> {
    Ok(operator_weights_multi(cloud, neighborhood, &[spec], targets, NeighborFilter::All)?
        .pop()
        .expect("one set per spec"))
}

/// Builds `d/dx` and `d/dy` at the target points from shared neighbors.
pub fn gradient_weights(
    cloud: &PointCloud,
    neighborhood: &Neighborhood,
    order: usize,
    targets: &[usize],
) -> Result<(StencilSet, StencilSet)> {
    let mut sets = operator_weights_multi(
        cloud,
        neighborhood,
        &[OperatorSpec::dx(order), OperatorSpec::dy(order)],
        targets,
        NeighborFilter::All,
    )?;
    let dy = sets.pop().unwrap();
    let dx = sets.pop().unwrap();
    Ok((dx, dy))
}

/// Point-evaluation weights at an arbitrary location.
#[derive(Clone, Debug, PartialEq)]
pub struct EvaluationStencil {
    pub location: Vec2,
    pub neighbors: Vec<usize>,
    pub weights: Vec<f64>,
}

impl EvaluationStencil {
    pub fn apply(&self, field: &[f64]) -> f64 {
        self.neighbors.iter().zip(&self.weights).map(|(&j, &a)| a * field[j]).sum()
    }
}

/// Moving least-squares evaluation at `location`: the weighted least-squares
/// polynomial of degree `degree` fitted to admitted cloud points within
/// `radius` (inverse-square distance weights), evaluated at `location`.
pub fn evaluation_stencil(
    cloud: &PointCloud,
    grid: &SpatialGrid,
    location: Vec2,
    degree: usize,
    radius: f64,
    filter: NeighborFilter,
) -> Result<EvaluationStencil> {
    let spec = OperatorSpec::identity(degree);
    let needed = spec.constraint_count();
    let mut radius = radius;
    let pts = cloud.points();
    for attempt in 0..=MAX_RETRIES {
        let neighbors = collect_neighbors(cloud, grid, location, radius, None, filter);
        if let Some(&hit) = neighbors
            .iter()
            .find(|&&j| (pts[j] - location).norm() <= 1e-14 * cloud.h())
        {
            return Ok(EvaluationStencil { location, neighbors: vec![hit], weights: vec![1.0] });
        }
        if neighbors.len() >= needed {
            if let Ok(mut ws) = row_weights(pts, location, &neighbors, &[spec], DEFAULT_BETA) {
                return Ok(EvaluationStencil { location, neighbors, weights: ws.pop().unwrap() });
            }
        }
        if attempt < MAX_RETRIES {
            radius *= RADIUS_GROWTH;
        }
    }
    Err(Error::SingularConstraints { condition: f64::INFINITY })
}

/// Initial radius of the boundary extrapolation fit, in units of h.
pub const MLS_RADIUS: f64 = 3.5;

/// Minimum number of interior points in an extrapolation fit.
pub const MLS_MIN_NEIGHBORS: usize = 6;

/// Degree-2 moving least-squares extrapolation from interior points to
/// boundary points. The weights depend only on the cloud, so they are built
/// once and applied to any number of fields.
#[derive(Clone, Debug)]
pub struct MlsExtrapolation {
    n_interior: usize,
    targets: Vec<usize>,
    stencils: Vec<EvaluationStencil>,
}

impl MlsExtrapolation {
    pub fn new(cloud: &PointCloud, boundary_targets: &[usize]) -> Result<Self> {
        let grid = cloud.grid(MLS_RADIUS * cloud.h());
        let stencils: Vec<Result<EvaluationStencil>> = boundary_targets
            .par_iter()
            .map(|&i| {
                evaluation_stencil(
                    cloud,
                    &grid,
                    cloud.point(i),
                    2,
                    MLS_RADIUS * cloud.h(),
                    NeighborFilter::InteriorOnly,
                )
                .map_err(|_| Error::ExtrapolationFailure { index: i })
            })
            .collect();
        let stencils = stencils.into_iter().collect::<Result<Vec<_>>>()?;
        debug_assert!(stencils.iter().all(|s| s.neighbors.len() >= MLS_MIN_NEIGHBORS));
        Ok(MlsExtrapolation { n_interior: cloud.n_interior(), targets: boundary_targets.to_vec(), stencils })
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn stencils(&self) -> &[EvaluationStencil] {
        &self.stencils
    }

    /// Extrapolated values at the targets from a field over interior points.
    pub fn apply(&self, interior_field: &[f64]) -> Result<Vec<f64>> {
        if interior_field.len() != self.n_interior {
            return Err(Error::SizeMismatch { expected: self.n_interior, found: interior_field.len() });
        }
        Ok(self.stencils.iter().map(|s| s.apply(interior_field)).collect())
    }
}

/// One-shot boundary extrapolation of an interior field.
pub fn mls_extrapolate(
    cloud: &PointCloud,
    interior_field: &[f64],
    boundary_targets: &[usize],
) -> Result<Vec<f64>> {
    MlsExtrapolation::new(cloud, boundary_targets)?.apply(interior_field)
}

/// Stencils for one cloud and one consistency order: the Laplacian at
/// interior points, `d/dx` and `d/dy` at every point, and the boundary
/// extrapolation.
#[derive(Clone, Debug)]
pub struct Discretization {
    cloud: PointCloud,
    order: usize,
    neighborhood: Neighborhood,
    laplacian: StencilSet,
    dx: StencilSet,
    dy: StencilSet,
    mls: MlsExtrapolation,
}

impl Discretization {
    pub fn new(cloud: PointCloud, order: usize) -> Result<Self> {
        let lap_spec = OperatorSpec::laplacian(order);
        let grad_spec = OperatorSpec::dx(order);
        let n_interior = cloud.n_interior();
        let neighborhood = crate::pointcloud::neighbors(&cloud, crate::pointcloud::DEFAULT_RADIUS_FACTOR, |i| {
            if i < n_interior {
                lap_spec.required_neighbors().max(grad_spec.required_neighbors())
            } else {
                grad_spec.required_neighbors()
            }
        })?;
        let interior: Vec<usize> = cloud.interior_indices().collect();
        let all: Vec<usize> = (0..cloud.len()).collect();
        let boundary: Vec<usize> = cloud.boundary_indices().collect();
        let laplacian = operator_weights(&cloud, &neighborhood, lap_spec, &interior)?;
        let (dx, dy) = gradient_weights(&cloud, &neighborhood, order, &all)?;
        let mls = MlsExtrapolation::new(&cloud, &boundary)?;
        Ok(Discretization { cloud, order, neighborhood, laplacian, dx, dy, mls })
    }

    pub fn cloud(&self) -> &PointCloud {
        &self.cloud
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn neighborhood(&self) -> &Neighborhood {
        &self.neighborhood
    }

    /// Laplacian rows, one per interior point in index order.
    pub fn laplacian(&self) -> &StencilSet {
        &self.laplacian
    }

    /// `d/dx` rows for every cloud point.
    pub fn dx(&self) -> &StencilSet {
        &self.dx
    }

    /// `d/dy` rows for every cloud point.
    pub fn dy(&self) -> &StencilSet {
        &self.dy
    }

    /// Extrapolation onto boundary points, in boundary order.
    pub fn mls(&self) -> &MlsExtrapolation {
        &self.mls
    }

    /// Laplacian of each component at interior points.
    pub fn laplacian_vec(&self, u: &[Vec2]) -> Vec<Vec2> {
        self.laplacian
            .rows()
            .iter()
            .map(|r| {
                let mut acc = r.diag * u[r.center];
                for (&j, &a) in r.neighbors.iter().zip(&r.weights) {
                    acc += a * u[j];
                }
                acc
            })
            .collect()
    }

    /// Gradient of a scalar field at every point.
    pub fn gradient(&self, p: &[f64]) -> Vec<Vec2> {
        self.dx
            .rows()
            .iter()
            .zip(self.dy.rows())
            .map(|(rx, ry)| Vec2::new(rx.apply(p), ry.apply(p)))
            .collect()
    }

    /// Divergence of a vector field at every point.
    pub fn divergence(&self, u: &[Vec2]) -> Vec<f64> {
        self.dx
            .rows()
            .iter()
            .zip(self.dy.rows())
            .map(|(rx, ry)| rx.apply_x(u) + ry.apply_y(u))
            .collect()
    }

    /// Jacobian rows `(du/dx, du/dy, dv/dx, dv/dy)` at every point.
    pub fn jacobian(&self, u: &[Vec2]) -> Vec<[f64; 4]> {
        self.dx
            .rows()
            .iter()
            .zip(self.dy.rows())
            .map(|(rx, ry)| [rx.apply_x(u), ry.apply_x(u), rx.apply_y(u), ry.apply_y(u)])
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laplacian_first_order_system() {
        let h = 0.1;
        let nbrs = [Vec2::new(h, 0.0), Vec2::new(-h, 0.0), Vec2::new(0.0, h), Vec2::new(0.0, -h)];
        let spec = OperatorSpec::laplacian(1);
        let err = constraint_system(Vec2::zeros(), &nbrs, spec).unwrap_err();
        assert!(matches!(err, Error::InsufficientNeighbors { required: 5, found: 4 }));
        let nbrs5 = [nbrs[0], nbrs[1], nbrs[2], nbrs[3], Vec2::new(h, h)];
        let (v, b) = constraint_system(Vec2::zeros(), &nbrs5, spec).unwrap();
        assert_eq!(v.shape(), (5, 5));
        assert_eq!(b.as_slice(), &[0.0, 0.0, 2.0, 0.0, 2.0]);
        assert_eq!(v.column(0).as_slice(), &[h, 0.0, h * h, 0.0, 0.0]);
        assert_eq!(v.column(4).as_slice(), &[h, h, h * h, h * h, h * h]);
    }

    #[test]
    fn gradient_systems() {
        let nbrs: Vec<Vec2> = (0..6).map(|k| Vec2::new((k as f64).cos(), (k as f64).sin())).collect();
        let (v, b) = constraint_system(Vec2::zeros(), &nbrs, OperatorSpec::dx(1)).unwrap();
        assert_eq!(v.nrows(), 2);
        assert_eq!(b.as_slice(), &[1.0, 0.0]);
        let (v, b) = constraint_system(Vec2::zeros(), &nbrs, OperatorSpec::dx(2)).unwrap();
        assert_eq!(v.nrows(), 5);
        assert_eq!(b.as_slice(), &[1.0, 0.0, 0.0, 0.0, 0.0]);
        let (v, b) = constraint_system(Vec2::zeros(), &nbrs, OperatorSpec::identity(2)).unwrap();
        assert_eq!(v.nrows(), 6);
        assert_eq!(b.as_slice(), &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(OperatorSpec::dx(4).constraint_count(), 14);
        assert_eq!(OperatorSpec::laplacian(1).constraint_count(), 5);
        assert_eq!(OperatorSpec::laplacian(3).constraint_count(), 14);
    }

    #[test]
    fn five_point_laplacian() {
        let h = 0.1;
        let nbrs = [Vec2::new(h, 0.0), Vec2::new(-h, 0.0), Vec2::new(0.0, h), Vec2::new(0.0, -h)];
        // four neighbors cannot satisfy five constraints, but the symmetric
        // configuration does: xy row is identically zero, so drop it.
        let (v, b) = constraint_system(
            Vec2::zeros(),
            &[nbrs[0], nbrs[1], nbrs[2], nbrs[3], Vec2::new(2.0 * h, 2.0 * h)],
            OperatorSpec::laplacian(1),
        )
        .unwrap();
        let v4 = v.columns(0, 4).into_owned().remove_row(3);
        let b4 = b.remove_row(3);
        let a = wlsq_weights(&v4, &b4, &[h; 4], 2.0).unwrap();
        for w in &a {
            assert!((w - 100.0).abs() < 1e-9);
        }
        assert!((-a.iter().sum::<f64>() + 400.0).abs() < 1e-9);
    }

    #[test]
    fn central_difference_from_three_points() {
        // Oracle: two constraints, Lagrange multipliers by hand. With equal
        // weights the minimum-norm solution of [h 0 -h; 0 h 0] a = (1, 0)
        // is a = (1/2h, 0, -1/2h).
        let h = 0.5;
        let nbrs = [Vec2::new(h, 0.0), Vec2::new(0.0, h), Vec2::new(-h, 0.0)];
        let (v, b) = constraint_system(Vec2::zeros(), &nbrs, OperatorSpec::dx(1)).unwrap();
        let a = wlsq_weights(&v, &b, &[h; 3], 2.0).unwrap();
        assert!((a[0] - 1.0).abs() < 1e-12);
        assert!(a[1].abs() < 1e-12);
        assert!((a[2] + 1.0).abs() < 1e-12);
        assert!(a.iter().sum::<f64>().abs() < 1e-12);
    }

    #[test]
    fn zero_rhs_gives_zero_weights() {
        let nbrs: Vec<Vec2> = (0..8).map(|k| 0.1 * Vec2::new((k as f64).cos(), (k as f64 * 1.3).sin())).collect();
        let (v, _) = constraint_system(Vec2::zeros(), &nbrs, OperatorSpec::laplacian(1)).unwrap();
        let b = DVector::zeros(v.nrows());
        let d: Vec<f64> = nbrs.iter().map(|p| p.norm()).collect();
        let a = wlsq_weights(&v, &b, &d, 2.0).unwrap();
        assert!(a.iter().all(|&w| w == 0.0));
    }

    #[test]
    fn collinear_neighbors_are_singular() {
        let nbrs: Vec<Vec2> = (1..10).map(|k| Vec2::new(0.1 * k as f64, 0.0)).collect();
        let (v, b) = constraint_system(Vec2::zeros(), &nbrs, OperatorSpec::laplacian(1)).unwrap();
        let d: Vec<f64> = nbrs.iter().map(|p| p.norm()).collect();
        assert!(matches!(wlsq_weights(&v, &b, &d, 2.0), Err(Error::SingularConstraints { .. })));
    }

    #[test]
    fn row_display() {
        let row = StencilRow { center: 3, neighbors: vec![1, 2], weights: vec![1.0, -1.0], diag: 0.0 };
        assert_eq!(row.to_string(), "3: (1,1e0) (2,-1e0) 0e0");
    }
}
