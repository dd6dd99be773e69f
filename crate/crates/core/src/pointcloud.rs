//! Point clouds on level-set domains.
//!
//! Clouds are produced by relaxing randomly seeded points under pairwise
//! repulsion. Boundary points are kept on the zero level set by projection
//! and interior points that drift into a thin band next to the boundary are
//! moved onto it. Indices are ordered interior-first.

use std::io::{BufRead, Write};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::LevelSetDomain;
use crate::Vec2;

/// Averaged hexagonal-packing resolution of a cloud with `n_interior`
/// interior and `n_boundary` boundary points covering `area`.
pub fn resolution_h(area: f64, n_interior: usize, n_boundary: usize) -> f64 {
    let weight = (2 * n_interior + n_boundary) as f64;
    (4.0 * area / (3f64.sqrt() * weight)).sqrt()
}

/// 64-bit linear congruential generator (Knuth's MMIX constants).
///
/// `state <- state * 6364136223846793005 + 1442695040888963407 (mod 2^64)`;
/// a uniform double in `[0,1)` is the top 53 bits of the new state times
/// `2^-53`. The seed is used as the initial state.
#[derive(Clone, Debug)]
pub struct Lcg64 {
    state: u64,
}

impl Lcg64 {
    pub fn new(seed: u64) -> Self {
        Lcg64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self
            .state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        self.state
    }

    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Uniform bucket grid for exact fixed-radius queries.
#[derive(Clone, Debug)]
pub struct SpatialGrid {
    origin: Vec2,
    cell: f64,
    nx: usize,
    ny: usize,
    starts: Vec<usize>,
    entries: Vec<usize>,
}

impl SpatialGrid {
    pub fn new(points: &[Vec2], cell: f64) -> Self {
        assert!(cell > 0.0, "grid cell size must be positive");
        let mut min = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut max = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in points {
            min = min.inf(p);
            max = max.sup(p);
        }
        if points.is_empty() {
            min = Vec2::zeros();
            max = Vec2::zeros();
        }
        let nx = ((max.x - min.x) / cell).floor() as usize + 1;
        let ny = ((max.y - min.y) / cell).floor() as usize + 1;
        let mut grid = SpatialGrid {
            origin: min,
            cell,
            nx,
            ny,
            starts: vec![0; nx * ny + 1],
            entries: vec![0; points.len()],
        };
        let cells: Vec<usize> = points.iter().map(|p| grid.cell_of(*p)).collect();
        for &c in &cells {
            grid.starts[c + 1] += 1;
        }
        for c in 0..nx * ny {
            grid.starts[c + 1] += grid.starts[c];
        }
        let mut fill = grid.starts.clone();
        for (i, &c) in cells.iter().enumerate() {
            grid.entries[fill[c]] = i;
            fill[c] += 1;
        }
        grid
    }

    fn coords(&self, p: Vec2) -> (i64, i64) {
        (
            ((p.x - self.origin.x) / self.cell).floor() as i64,
            ((p.y - self.origin.y) / self.cell).floor() as i64,
        )
    }

    fn cell_of(&self, p: Vec2) -> usize {
        let (cx, cy) = self.coords(p);
        let cx = cx.clamp(0, self.nx as i64 - 1) as usize;
        let cy = cy.clamp(0, self.ny as i64 - 1) as usize;
        cy * self.nx + cx
    }

    /// Calls `visit(j)` for every point with `|x_j - center| <= radius`.
    pub fn for_each_within(
        &self,
        points: &[Vec2],
        center: Vec2,
        radius: f64,
        mut visit: impl FnMut(usize),
    ) {
        let (lx, ly) = self.coords(center - Vec2::new(radius, radius));
        let (hx, hy) = self.coords(center + Vec2::new(radius, radius));
        let lx = lx.max(0);
        let ly = ly.max(0);
        let hx = hx.min(self.nx as i64 - 1);
        let hy = hy.min(self.ny as i64 - 1);
        for cy in ly..=hy {
            for cx in lx..=hx {
                let c = cy as usize * self.nx + cx as usize;
                for &j in &self.entries[self.starts[c]..self.starts[c + 1]] {
                    if (points[j] - center).norm() <= radius {
                        visit(j);
                    }
                }
            }
        }
    }

    /// Sorted indices within `radius` of `center`, excluding `exclude`.
    pub fn within(
        &self,
        points: &[Vec2],
        center: Vec2,
        radius: f64,
        exclude: Option<usize>,
    ) -> Vec<usize> {
        let mut out = Vec::new();
        self.for_each_within(points, center, radius, |j| {
            if Some(j) != exclude {
                out.push(j)
            }
        });
        out.sort_unstable();
        out
    }
}

/// Interior or boundary classification of a cloud point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointKind {
    Interior,
    Boundary,
}

/// Interior-first point cloud with boundary normals.
#[derive(Clone, Debug)]
pub struct PointCloud {
    domain: LevelSetDomain,
    points: Vec<Vec2>,
    n_interior: usize,
    normals: Vec<Vec2>,
    h: f64,
}

impl PointCloud {
    /// Builds a cloud from already classified points. Boundary normals are
    /// taken from the domain.
    pub fn from_parts(
        domain: LevelSetDomain,
        interior: Vec<Vec2>,
        boundary: Vec<Vec2>,
    ) -> Result<Self> {
        let normals = boundary
            .iter()
            .map(|&x| domain.normal(x))
            .collect::<Result<Vec<_>>>()?;
        Self::with_normals(domain, interior, boundary, normals)
    }

    /// Builds a cloud with explicitly supplied boundary normals.
    pub fn with_normals(
        domain: LevelSetDomain,
        interior: Vec<Vec2>,
        boundary: Vec<Vec2>,
        normals: Vec<Vec2>,
    ) -> Result<Self> {
        if normals.len() != boundary.len() {
            return Err(Error::SizeMismatch { expected: boundary.len(), found: normals.len() });
        }
        let n_interior = interior.len();
        let n_boundary = boundary.len();
        if n_interior + n_boundary == 0 {
            return Err(Error::InvalidInput("empty point cloud".into()));
        }
        let h = resolution_h(domain.area(), n_interior, n_boundary);
        let mut points = interior;
        points.extend(boundary);
        Ok(PointCloud { domain, points, n_interior, normals, h })
    }

    pub fn domain(&self) -> &LevelSetDomain {
        &self.domain
    }

    pub fn points(&self) -> &[Vec2] {
        &self.points
    }

    pub fn point(&self, i: usize) -> Vec2 {
        self.points[i]
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn n_interior(&self) -> usize {
        self.n_interior
    }

    pub fn n_boundary(&self) -> usize {
        self.points.len() - self.n_interior
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn kind(&self, i: usize) -> PointKind {
        if i < self.n_interior {
            PointKind::Interior
        } else {
            PointKind::Boundary
        }
    }

    pub fn is_boundary(&self, i: usize) -> bool {
        i >= self.n_interior
    }

    pub fn kinds(&self) -> Vec<PointKind> {
        (0..self.len()).map(|i| self.kind(i)).collect()
    }

    pub fn interior_indices(&self) -> std::ops::Range<usize> {
        0..self.n_interior
    }

    pub fn boundary_indices(&self) -> std::ops::Range<usize> {
        self.n_interior..self.points.len()
    }

    /// Outward normal of the boundary point with global index `i`.
    pub fn normal(&self, i: usize) -> Vec2 {
        self.normals[i - self.n_interior]
    }

    pub fn normals(&self) -> &[Vec2] {
        &self.normals
    }

    pub fn grid(&self, cell: f64) -> SpatialGrid {
        SpatialGrid::new(&self.points, cell)
    }

    /// Writes the text cloud format: a header `N N_i N_b`, then one line
    /// `x y k [nx ny]` per point, interior points first.
    pub fn write_to(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "{} {} {}", self.len(), self.n_interior, self.n_boundary())?;
        for (i, p) in self.points.iter().enumerate() {
            if self.is_boundary(i) {
                let n = self.normal(i);
                writeln!(out, "{:.16e} {:.16e} 1 {:.16e} {:.16e}", p.x, p.y, n.x, n.y)?;
            } else {
                writeln!(out, "{:.16e} {:.16e} 0", p.x, p.y)?;
            }
        }
        Ok(())
    }

    /// Reads the text cloud format. Files whose boundary lines precede
    /// interior lines, or whose counts disagree with the header, are rejected.
    pub fn read_from(domain: LevelSetDomain, input: impl BufRead) -> Result<Self> {
        let mut lines = input.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::CloudFormat("empty file".into()))??;
        let counts: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::CloudFormat(format!("bad header `{header}`: {e}")))?;
        let [n, n_i, n_b] = counts[..] else {
            return Err(Error::CloudFormat(format!("bad header `{header}`")));
        };
        if n != n_i + n_b {
            return Err(Error::CloudFormat(format!("header counts {n} != {n_i} + {n_b}")));
        }
        let mut interior = Vec::with_capacity(n_i);
        let mut boundary = Vec::with_capacity(n_b);
        let mut normals = Vec::with_capacity(n_b);
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::CloudFormat(format!("line {}: {e}", lineno + 2)))?;
            match fields[..] {
                [x, y, k] if k == 0.0 => {
                    if !boundary.is_empty() {
                        return Err(Error::CloudFormat(format!(
                            "line {}: interior point after boundary points",
                            lineno + 2
                        )));
                    }
                    interior.push(Vec2::new(x, y));
                }
                [x, y, k, nx, ny] if k == 1.0 => {
                    boundary.push(Vec2::new(x, y));
                    normals.push(Vec2::new(nx, ny));
                }
                _ => {
                    return Err(Error::CloudFormat(format!(
                        "line {}: expected `x y 0` or `x y 1 nx ny`",
                        lineno + 2
                    )))
                }
            }
        }
        if interior.len() != n_i || boundary.len() != n_b {
            return Err(Error::CloudFormat(format!(
                "found {} interior and {} boundary points, header says {n_i} and {n_b}",
                interior.len(),
                boundary.len()
            )));
        }
        Self::with_normals(domain, interior, boundary, normals)
    }
}

/// Knobs for the repulsion relaxation.
#[derive(Clone, Debug)]
pub struct GenerationParams {
    pub max_iterations: usize,
    /// Convergence threshold on the largest per-iteration displacement, in units of h.
    pub tolerance: f64,
    /// Interior points closer than `band * h` to the boundary are moved onto it.
    pub band: f64,
    /// Repulsion neighborhood radius in units of h.
    pub repulsion_radius: f64,
    /// Pseudo-time step in units of h^3.
    pub step: f64,
    /// Largest displacement per iteration in units of h.
    pub max_step: f64,
    /// Repulsion cap in units of h^-2.
    pub v_max: f64,
}

impl Default for GenerationParams {
    fn default() -> Self {
        GenerationParams {
            max_iterations: 2000,
            tolerance: 1e-3,
            band: 0.4,
            repulsion_radius: 1.6,
            step: 0.04,
            max_step: 0.3,
            v_max: 10.0,
        }
    }
}

/// Generates a relaxed point cloud with `n` points.
pub fn generate(
    domain: &LevelSetDomain,
    n: usize,
    seed: u64,
    params: &GenerationParams,
) -> Result<PointCloud> {
    if n < 20 {
        return Err(Error::InvalidInput(format!("point cloud needs at least 20 points, got {n}")));
    }
    let bbox = domain.bounding_box();
    let mut rng = Lcg64::new(seed);

    let mut points: Vec<Vec2> = Vec::with_capacity(n);
    let mut boundary: Vec<bool> = Vec::with_capacity(n);
    let mut fixed: Vec<bool> = Vec::with_capacity(n);
    for corner in domain.corners() {
        points.push(corner.point);
        boundary.push(true);
        fixed.push(true);
    }
    while points.len() < n {
        let x = Vec2::new(
            bbox.min.x + (bbox.max.x - bbox.min.x) * rng.next_f64(),
            bbox.min.y + (bbox.max.y - bbox.min.y) * rng.next_f64(),
        );
        if domain.phi(x) < 0.0 {
            points.push(x);
            boundary.push(false);
            fixed.push(false);
        }
    }

    let current_h = |boundary: &[bool]| {
        let n_b = boundary.iter().filter(|&&b| b).count();
        resolution_h(domain.area(), n - n_b, n_b)
    };

    let mut converged = false;
    let mut last_displacement = f64::INFINITY;
    for _ in 0..params.max_iterations {
        let h = current_h(&boundary);
        let radius = params.repulsion_radius * h;
        let v_max = params.v_max / (h * h);
        // shifting by the value at the cutoff keeps the force continuous in d
        let cutoff = 1.0 / (radius * radius);
        let grid = SpatialGrid::new(&points, radius);
        let snapshot = &points;
        let forces: Vec<Vec2> = (0..n)
            .into_par_iter()
            .map(|i| {
                if fixed[i] {
                    return Vec2::zeros();
                }
                let xi = snapshot[i];
                let mut force = Vec2::zeros();
                grid.for_each_within(snapshot, xi, radius, |j| {
                    if j == i {
                        return;
                    }
                    let d = xi - snapshot[j];
                    let dist = d.norm();
                    if dist > 0.0 {
                        let mag = (1.0 / (dist * dist)).min(v_max) - cutoff;
                        if mag > 0.0 {
                            force += mag * d / dist;
                        }
                    } else {
                        // coincident points: separate along a fixed direction by index order
                        let sign = if i < j { 1.0 } else { -1.0 };
                        force += v_max * Vec2::new(sign, 0.0);
                    }
                });
                force
            })
            .collect();
        let max_force = forces.iter().map(|f| f.norm()).fold(0.0, f64::max);
        if max_force == 0.0 {
            converged = true;
            last_displacement = 0.0;
            break;
        }
        let tau = (params.step * h * h * h).min(params.max_step * h / max_force);

        let mut max_move: f64 = 0.0;
        for i in 0..n {
            if fixed[i] {
                continue;
            }
            let old = points[i];
            let mut x = old + tau * forces[i];
            if boundary[i] || domain.phi(x) >= -params.band * h {
                x = domain.project_to_boundary(x)?;
                boundary[i] = true;
            }
            max_move = max_move.max((x - old).norm());
            points[i] = x;
        }
        last_displacement = max_move;
        if max_move < params.tolerance * h {
            converged = true;
            break;
        }
    }
    if !converged && last_displacement > 10.0 * params.tolerance * current_h(&boundary) {
        return Err(Error::GenerationStalled {
            iterations: params.max_iterations,
            displacement: last_displacement,
        });
    }

    // Moving points onto the boundary raises h, which widens the band.
    loop {
        let h = current_h(&boundary);
        let mut moved = false;
        for i in 0..n {
            if !boundary[i] && domain.phi(points[i]) >= -params.band * h {
                points[i] = domain.project_to_boundary(points[i])?;
                boundary[i] = true;
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }

    let interior: Vec<Vec2> = (0..n).filter(|&i| !boundary[i]).map(|i| points[i]).collect();
    let bnd: Vec<Vec2> = (0..n).filter(|&i| boundary[i]).map(|i| points[i]).collect();
    PointCloud::from_parts(domain.clone(), interior, bnd)
}

/// Circular neighborhoods `B_i` (excluding `i`) with per-point radii.
#[derive(Clone, Debug)]
pub struct Neighborhood {
    lists: Vec<Vec<usize>>,
    radii: Vec<f64>,
}

impl Neighborhood {
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.lists[i]
    }

    pub fn radius(&self, i: usize) -> f64 {
        self.radii[i]
    }

    pub fn count(&self, i: usize) -> usize {
        self.lists[i].len()
    }

    pub fn len(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }
}

/// Radius growth factor between neighborhood attempts.
pub const RADIUS_GROWTH: f64 = 1.2;

/// Default neighborhood radius in units of h.
pub const DEFAULT_RADIUS_FACTOR: f64 = 2.5;

/// Grows each point's radius from `base_radius_factor * h` by 1.2x until it
/// holds at least `required_count(i)` neighbors.
pub fn neighbors(
    cloud: &PointCloud,
    base_radius_factor: f64,
    required_count: impl Fn(usize) -> usize + Sync,
) -> Result<Neighborhood> {
    let base = base_radius_factor * cloud.h();
    let limit = cloud.domain().diameter();
    let grid = cloud.grid(base);
    let pts = cloud.points();
    let results: Vec<Result<(Vec<usize>, f64)>> = (0..cloud.len())
        .into_par_iter()
        .map(|i| {
            let required = required_count(i).max(1);
            let mut r = base;
            loop {
                let list = grid.within(pts, pts[i], r, Some(i));
                if list.len() >= required {
                    return Ok((list, r));
                }
                if r > limit {
                    return Err(Error::NeighborhoodExhausted {
                        index: i,
                        radius: r,
                        found: list.len(),
                        required,
                    });
                }
                r *= RADIUS_GROWTH;
            }
        })
        .collect();
    let mut lists = Vec::with_capacity(cloud.len());
    let mut radii = Vec::with_capacity(cloud.len());
    for res in results {
        let (l, r) = res?;
        lists.push(l);
        radii.push(r);
    }
    Ok(Neighborhood { lists, radii })
}

/// Cloud diagnostics; flags are set when an invariant is violated.
#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub min_spacing: f64,
    pub min_spacing_over_h: f64,
    pub min_neighbors: usize,
    pub max_neighbors: usize,
    pub band_violations: usize,
    pub max_boundary_phi: f64,
    pub duplicate_points: bool,
    pub band_violation: bool,
    pub boundary_off_surface: bool,
    pub interior_outside: bool,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        !(self.duplicate_points
            || self.band_violation
            || self.boundary_off_surface
            || self.interior_outside)
    }
}

/// Band width used by [`validate`], in units of h.
pub const BOUNDARY_BAND: f64 = 0.4;

pub fn validate(cloud: &PointCloud, neighborhood: &Neighborhood) -> ValidationReport {
    let h = cloud.h();
    let domain = cloud.domain();
    let pts = cloud.points();
    let grid = cloud.grid(h);
    let mut min_spacing = f64::INFINITY;
    for (i, &p) in pts.iter().enumerate() {
        let mut r = h;
        loop {
            let mut best = f64::INFINITY;
            grid.for_each_within(pts, p, r, |j| {
                if j != i {
                    best = best.min((pts[j] - p).norm());
                }
            });
            if best.is_finite() || r > domain.diameter() {
                min_spacing = min_spacing.min(best);
                break;
            }
            r *= 2.0;
        }
    }
    let mut band_violations = 0;
    let mut interior_outside = false;
    for i in cloud.interior_indices() {
        let phi = domain.phi(pts[i]);
        if phi >= 0.0 {
            interior_outside = true;
        }
        if -phi < BOUNDARY_BAND * h {
            band_violations += 1;
        }
    }
    let max_boundary_phi = cloud
        .boundary_indices()
        .map(|i| domain.phi(pts[i]).abs())
        .fold(0.0, f64::max);
    let counts = (0..neighborhood.len()).map(|i| neighborhood.count(i));
    ValidationReport {
        min_spacing,
        min_spacing_over_h: min_spacing / h,
        min_neighbors: counts.clone().min().unwrap_or(0),
        max_neighbors: counts.max().unwrap_or(0),
        band_violations,
        max_boundary_phi,
        duplicate_points: min_spacing <= 0.0,
        band_violation: band_violations > 0,
        boundary_off_surface: max_boundary_phi > 1e-10 * domain.diameter(),
        interior_outside,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolution_formula() {
        assert!((resolution_h(1.0, 100, 31) - 0.099988).abs() < 1e-6);
        assert!((resolution_h(3f64.sqrt() / 4.0, 48, 4) - 0.1).abs() < 1e-15);
        assert!((resolution_h(1.0, 0, 4) - (4.0 / (4.0 * 3f64.sqrt())).sqrt()).abs() < 1e-15);
    }

    fn line_cloud(h: f64) -> PointCloud {
        let domain = LevelSetDomain::square();
        PointCloud::with_normals(
            domain,
            vec![Vec2::new(0.5 - h, 0.5), Vec2::new(0.5, 0.5), Vec2::new(0.5 + h, 0.5)],
            vec![],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn collinear_neighbors() {
        let cloud = line_cloud(0.1);
        let spacing = 0.1;
        let nb = neighbors(&cloud, 2.5 * spacing / cloud.h(), |_| 2).unwrap();
        assert_eq!(nb.neighbors(1), &[0, 2]);
    }

    #[test]
    fn grid_neighbors_at_one_and_a_half_h() {
        let domain = LevelSetDomain::square();
        let s = 0.1;
        let mut pts = Vec::new();
        for j in 0..5 {
            for i in 0..5 {
                pts.push(Vec2::new(0.3 + i as f64 * s, 0.3 + j as f64 * s));
            }
        }
        let cloud = PointCloud::with_normals(domain, pts, vec![], vec![]).unwrap();
        let nb = neighbors(&cloud, 1.5 * s / cloud.h(), |_| 5).unwrap();
        let center = 12;
        assert_eq!(nb.neighbors(center), &[6, 7, 8, 11, 13, 16, 17, 18]);
        assert!((nb.radius(center) - 1.5 * s).abs() < 1e-15);
    }

    #[test]
    fn neighborhoods_are_symmetric_for_equal_radii() {
        let cloud = generate(&LevelSetDomain::paper(), 300, 3, &GenerationParams::default()).unwrap();
        let nb = neighbors(&cloud, 2.5, |_| 1).unwrap();
        for i in 0..cloud.len() {
            for &j in nb.neighbors(i) {
                if nb.radius(i) == nb.radius(j) {
                    assert!(nb.neighbors(j).contains(&i));
                }
            }
        }
    }

    #[test]
    fn too_few_points_rejected() {
        let err = generate(&LevelSetDomain::square(), 19, 7, &GenerationParams::default());
        assert!(matches!(err, Err(Error::InvalidInput(_))));
    }

    #[test]
    fn duplicate_point_is_flagged() {
        let domain = LevelSetDomain::square();
        let pts = vec![Vec2::new(0.5, 0.5), Vec2::new(0.5, 0.5), Vec2::new(0.3, 0.3)];
        let cloud = PointCloud::with_normals(domain, pts, vec![], vec![]).unwrap();
        let nb = neighbors(&cloud, 2.5, |_| 1).unwrap();
        let report = validate(&cloud, &nb);
        assert!(report.duplicate_points);
        assert_eq!(report.min_spacing, 0.0);
    }

    #[test]
    fn band_violation_is_flagged() {
        let domain = LevelSetDomain::square();
        let cloud = generate(&domain, 400, 11, &GenerationParams::default()).unwrap();
        let h = cloud.h();
        let mut interior: Vec<Vec2> = cloud.interior_indices().map(|i| cloud.point(i)).collect();
        interior.push(Vec2::new(0.5, 0.1 * h));
        let boundary: Vec<Vec2> = cloud.boundary_indices().map(|i| cloud.point(i)).collect();
        let normals = cloud.normals().to_vec();
        let bad = PointCloud::with_normals(domain, interior, boundary, normals).unwrap();
        let nb = neighbors(&bad, 2.5, |_| 1).unwrap();
        let report = validate(&bad, &nb);
        assert!(report.band_violation);
        assert!(report.band_violations >= 1);
    }

    #[test]
    fn file_rejects_misordered_points() {
        let text = "3 2 1\n0.5 0.5 0\n0.5 0 1 0 -1\n0.4 0.4 0\n";
        let err = PointCloud::read_from(LevelSetDomain::square(), text.as_bytes());
        assert!(matches!(err, Err(Error::CloudFormat(_))));
    }

    #[test]
    fn lcg_is_reproducible() {
        let mut a = Lcg64::new(7);
        let mut b = Lcg64::new(7);
        for _ in 0..10 {
            let x = a.next_f64();
            assert_eq!(x, b.next_f64());
            assert!((0.0..1.0).contains(&x));
        }
        assert_eq!(Lcg64::new(0).next_u64(), 1442695040888963407);
    }
}
