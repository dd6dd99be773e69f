//! Level-set domains used by the solvers.
//!
//! Every built-in domain carries an exact signed distance function (negative
//! inside), its analytic gradient, and a list of corner points where the
//! boundary is not smooth. Corners carry the normalized mean of the adjacent
//! side normals.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::Vec2;

const PROJECTION_MAX_ITERATIONS: usize = 20;
const PROJECTION_TOLERANCE: f64 = 1e-10;
const BOUNDARY_QUERY_TOLERANCE: f64 = 1e-8;
const CORNER_MATCH_TOLERANCE: f64 = 1e-12;

/// The domains the solvers know how to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DomainKind {
    /// Unit square `(0,1)^2`, used for the lid-driven cavity.
    Square,
    /// Half disk of radius 1/2 centered at `(1/2,1/2)` on top of `(0,1)x(0,1/2)`.
    Paper,
    /// Unit disk centered at the origin.
    Disk,
}

impl DomainKind {
    pub fn name(self) -> &'static str {
        match self {
            DomainKind::Square => "square",
            DomainKind::Paper => "paper",
            DomainKind::Disk => "disk",
        }
    }
}

impl fmt::Display for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DomainKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "square" => Ok(DomainKind::Square),
            "paper" => Ok(DomainKind::Paper),
            "disk" => Ok(DomainKind::Disk),
            other => Err(Error::UnknownDomain(other.to_string())),
        }
    }
}

/// A non-smooth boundary point with its prescribed outward normal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Corner {
    pub point: Vec2,
    pub normal: Vec2,
}

/// Axis-aligned rectangle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundingBox {
    pub min: Vec2,
    pub max: Vec2,
}

impl BoundingBox {
    pub fn diameter(&self) -> f64 {
        (self.max - self.min).norm()
    }

    pub fn contains(&self, x: Vec2) -> bool {
        x.x >= self.min.x && x.x <= self.max.x && x.y >= self.min.y && x.y <= self.max.y
    }
}

/// Implicit domain `{x : phi(x) < 0}`.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelSetDomain {
    kind: DomainKind,
    area: f64,
    perimeter: f64,
    bounding_box: BoundingBox,
    corners: Vec<Corner>,
}

impl LevelSetDomain {
    pub fn new(kind: DomainKind) -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        match kind {
            DomainKind::Square => LevelSetDomain {
                kind,
                area: 1.0,
                perimeter: 4.0,
                bounding_box: BoundingBox {
                    min: Vec2::new(0.0, 0.0),
                    max: Vec2::new(1.0, 1.0),
                },
                corners: vec![
                    Corner { point: Vec2::new(0.0, 0.0), normal: Vec2::new(-s, -s) },
                    Corner { point: Vec2::new(1.0, 0.0), normal: Vec2::new(s, -s) },
                    Corner { point: Vec2::new(1.0, 1.0), normal: Vec2::new(s, s) },
                    Corner { point: Vec2::new(0.0, 1.0), normal: Vec2::new(-s, s) },
                ],
            },
            DomainKind::Paper => LevelSetDomain {
                kind,
                area: 0.5 + PI * 0.25 / 2.0,
                perimeter: 2.0 + PI * 0.5,
                bounding_box: BoundingBox {
                    min: Vec2::new(0.0, 0.0),
                    max: Vec2::new(1.0, 1.0),
                },
                corners: vec![
                    Corner { point: Vec2::new(0.0, 0.0), normal: Vec2::new(-s, -s) },
                    Corner { point: Vec2::new(1.0, 0.0), normal: Vec2::new(s, -s) },
                ],
            },
            DomainKind::Disk => LevelSetDomain {
                kind,
                area: PI,
                perimeter: 2.0 * PI,
                bounding_box: BoundingBox {
                    min: Vec2::new(-1.0, -1.0),
                    max: Vec2::new(1.0, 1.0),
                },
                corners: Vec::new(),
            },
        }
    }

    pub fn square() -> Self {
        Self::new(DomainKind::Square)
    }

    pub fn paper() -> Self {
        Self::new(DomainKind::Paper)
    }

    pub fn disk() -> Self {
        Self::new(DomainKind::Disk)
    }

    /// Looks a domain up by its configuration name.
    pub fn by_name(name: &str) -> Result<Self> {
        name.parse::<DomainKind>().map(Self::new)
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    /// Domain measure.
    pub fn area(&self) -> f64 {
        self.area
    }

    /// Boundary length.
    pub fn perimeter(&self) -> f64 {
        self.perimeter
    }

    pub fn bounding_box(&self) -> BoundingBox {
        self.bounding_box
    }

    pub fn diameter(&self) -> f64 {
        self.bounding_box.diameter()
    }

    pub fn corners(&self) -> &[Corner] {
        &self.corners
    }

    /// Signed distance to the boundary, negative inside.
    pub fn phi(&self, x: Vec2) -> f64 {
        self.phi_and_gradient(x).0
    }

    /// Unit gradient of `phi`. Defined everywhere; equidistant interior points
    /// resolve to the first nearest side in the order bottom, right, top, left.
    pub fn gradient(&self, x: Vec2) -> Vec2 {
        self.phi_and_gradient(x).1
    }

    pub fn contains(&self, x: Vec2) -> bool {
        self.phi(x) < 0.0
    }

    /// Outward unit normal at a boundary point.
    pub fn normal(&self, x: Vec2) -> Result<Vec2> {
        if let Some(corner) = self.corner_at(x) {
            return Ok(corner.normal);
        }
        let (phi, grad) = self.phi_and_gradient(x);
        if phi.abs() > BOUNDARY_QUERY_TOLERANCE * self.diameter() {
            return Err(Error::QueryNotOnBoundary { x: x.x, y: x.y, phi });
        }
        Ok(grad)
    }

    /// Corner registered at `x`, if any.
    pub fn corner_at(&self, x: Vec2) -> Option<&Corner> {
        let tol = CORNER_MATCH_TOLERANCE * self.diameter();
        self.corners.iter().find(|c| (c.point - x).norm() <= tol)
    }

    /// Closest-point projection onto the boundary.
    pub fn project_to_boundary(&self, x: Vec2) -> Result<Vec2> {
        let tol = PROJECTION_TOLERANCE * self.diameter();
        let mut y = x;
        for _ in 0..PROJECTION_MAX_ITERATIONS {
            let (phi, grad) = self.phi_and_gradient(y);
            if phi.abs() <= tol {
                return Ok(y);
            }
            y -= phi * grad;
        }
        if self.phi(y).abs() <= tol {
            Ok(y)
        } else {
            Err(Error::ProjectionDiverged { x: x.x, y: x.y })
        }
    }

    fn phi_and_gradient(&self, x: Vec2) -> (f64, Vec2) {
        match self.kind {
            DomainKind::Square => box_sdf(x, 0.0, 1.0, 0.0, Some(1.0)),
            DomainKind::Paper => {
                if x.y >= 0.5 {
                    circle_sdf(x, Vec2::new(0.5, 0.5), 0.5)
                } else {
                    box_sdf(x, 0.0, 1.0, 0.0, None)
                }
            }
            DomainKind::Disk => circle_sdf(x, Vec2::zeros(), 1.0),
        }
    }
}

fn circle_sdf(x: Vec2, center: Vec2, radius: f64) -> (f64, Vec2) {
    let d = x - center;
    let r = d.norm();
    if r == 0.0 {
        (-radius, Vec2::new(0.0, -1.0))
    } else {
        (r - radius, d / r)
    }
}

/// Signed distance to `[x0,x1] x [y0,y1]`; an open top (`y1 = None`) is used
/// for the rectangular part of the paper domain, whose top edge is interior.
fn box_sdf(p: Vec2, x0: f64, x1: f64, y0: f64, y1: Option<f64>) -> (f64, Vec2) {
    let top = y1.unwrap_or(f64::INFINITY);
    let dx = if p.x < x0 {
        p.x - x0
    } else if p.x > x1 {
        p.x - x1
    } else {
        0.0
    };
    let dy = if p.y < y0 {
        p.y - y0
    } else if p.y > top {
        p.y - top
    } else {
        0.0
    };
    if dx != 0.0 || dy != 0.0 {
        let d = (dx * dx + dy * dy).sqrt();
        return (d, Vec2::new(dx / d, dy / d));
    }
    // bottom, right, top, left
    let sides = [
        (p.y - y0, Vec2::new(0.0, -1.0)),
        (x1 - p.x, Vec2::new(1.0, 0.0)),
        (top - p.y, Vec2::new(0.0, 1.0)),
        (p.x - x0, Vec2::new(-1.0, 0.0)),
    ];
    let mut best = sides[0];
    for side in &sides[1..] {
        if side.0 < best.0 {
            best = *side;
        }
    }
    (-best.0, best.1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Vec2, b: Vec2, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn phi_values() {
        let sq = LevelSetDomain::square();
        assert!((sq.phi(Vec2::new(0.5, 0.5)) + 0.5).abs() < 1e-15);
        assert!((sq.phi(Vec2::new(1.2, 0.5)) - 0.2).abs() < 1e-15);
        let paper = LevelSetDomain::paper();
        assert!(paper.phi(Vec2::new(0.5, 1.0)).abs() < 1e-15);
        assert!(paper.phi(Vec2::new(0.5, 0.25)) < 0.0);
        assert!(paper.phi(Vec2::new(0.05, 0.95)) > 0.0);
    }

    #[test]
    fn normals() {
        let sq = LevelSetDomain::square();
        assert!(close(sq.normal(Vec2::new(0.5, 0.0)).unwrap(), Vec2::new(0.0, -1.0), 1e-15));
        let s = 0.5f64.sqrt();
        assert!(close(sq.normal(Vec2::new(0.0, 0.0)).unwrap(), Vec2::new(-s, -s), 1e-15));
        let paper = LevelSetDomain::paper();
        assert!(close(paper.normal(Vec2::new(0.5, 1.0)).unwrap(), Vec2::new(0.0, 1.0), 1e-15));
        assert!(matches!(
            sq.normal(Vec2::new(0.5, 0.5)),
            Err(Error::QueryNotOnBoundary { .. })
        ));
    }

    #[test]
    fn projection() {
        let sq = LevelSetDomain::square();
        assert!(close(sq.project_to_boundary(Vec2::new(0.5, -0.1)).unwrap(), Vec2::new(0.5, 0.0), 1e-15));
        // equidistant center resolves to the bottom side
        assert!(close(sq.project_to_boundary(Vec2::new(0.5, 0.5)).unwrap(), Vec2::new(0.5, 0.0), 1e-15));
        let paper = LevelSetDomain::paper();
        assert!(close(paper.project_to_boundary(Vec2::new(0.5, 1.1)).unwrap(), Vec2::new(0.5, 1.0), 1e-14));
    }

    #[test]
    fn areas() {
        assert_eq!(LevelSetDomain::square().area(), 1.0);
        assert!((LevelSetDomain::paper().area() - 0.8926990817).abs() < 1e-9);
        assert!((LevelSetDomain::disk().area() - PI).abs() < 1e-15);
    }

    #[test]
    fn normals_are_orthogonal_to_tangents() {
        let paper = LevelSetDomain::paper();
        for k in 0..=50 {
            let theta = PI * k as f64 / 50.0;
            let y = Vec2::new(0.5 + 0.5 * theta.cos(), 0.5 + 0.5 * theta.sin());
            let t = Vec2::new(-theta.sin(), theta.cos());
            let n = paper.normal(y).unwrap();
            assert!(n.dot(&t).abs() < 1e-10);
            assert!((n.norm() - 1.0).abs() < 1e-12);
        }
        for k in 1..50 {
            let s = k as f64 / 50.0;
            let n = paper.normal(Vec2::new(s, 0.0)).unwrap();
            assert!(n.dot(&Vec2::new(1.0, 0.0)).abs() < 1e-10);
            let n = paper.normal(Vec2::new(0.0, 0.5 * s)).unwrap();
            assert!(n.dot(&Vec2::new(0.0, 1.0)).abs() < 1e-10);
        }
    }

    #[test]
    fn parse_names() {
        assert_eq!("paper".parse::<DomainKind>().unwrap(), DomainKind::Paper);
        assert!(LevelSetDomain::by_name("torus").is_err());
    }
}
