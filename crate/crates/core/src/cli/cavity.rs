//! Lid-driven cavity and centerline reference data.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::pointcloud::{self, GenerationParams, PointCloud, DEFAULT_RADIUS_FACTOR};
use crate::solvers::{FieldState, ProblemData, StepStats, Stepper};
use crate::verify::EvolutionParams;
use crate::stencil::{evaluation_stencil, Discretization, NeighborFilter};
use crate::geometry::LevelSetDomain;
use crate::Vec2;

/// Centerline velocity tables: `u` along the vertical line `x = 1/2` as
/// `(y, u)` and `v` along the horizontal line `y = 1/2` as `(x, v)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GhiaReference {
    pub u_vertical: Vec<(f64, f64)>,
    pub v_horizontal: Vec<(f64, f64)>,
}

impl GhiaReference {
    /// Parses sections `[u_vertical]` and `[v_horizontal]` of two-column
    /// rows; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut u = Vec::new();
        let mut v = Vec::new();
        let mut section: Option<&mut Vec<(f64, f64)>> = None;
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            match line {
                "[u_vertical]" => section = Some(&mut u),
                "[v_horizontal]" => section = Some(&mut v),
                _ => {
                    let bad = || Error::ReferenceFormat(format!("line {}: `{raw}`", k + 1));
                    let rows = section.as_deref_mut().ok_or_else(bad)?;
                    let cols: Vec<f64> = line
                        .split_whitespace()
                        .map(|s| s.parse::<f64>().map_err(|_| bad()))
                        .collect::<Result<_>>()?;
                    if cols.len() != 2 {
                        return Err(bad());
                    }
                    rows.push((cols[0], cols[1]));
                }
            }
        }
        for (name, rows) in [("u_vertical", &u), ("v_horizontal", &v)] {
            if rows.is_empty() {
                return Err(Error::ReferenceFormat(format!("section {name} is missing or empty")));
            }
            if rows.iter().any(|&(c, val)| !(0.0..=1.0).contains(&c) || !val.is_finite()) {
                return Err(Error::ReferenceFormat(format!("section {name}: coordinate outside [0, 1]")));
            }
            if rows.windows(2).any(|w| w[1].0 <= w[0].0) {
                return Err(Error::ReferenceFormat(format!("section {name}: coordinates not strictly increasing")));
            }
        }
        Ok(GhiaReference { u_vertical: u, v_horizontal: v })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::ReferenceFormat(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

/// Lid velocity: `(1, 0)` on the top side without its corners, zero elsewhere.
pub fn lid_velocity(x: Vec2) -> Vec2 {
    let tol = 1e-9;
    if (x.y - 1.0).abs() < tol && x.x > tol && x.x < 1.0 - tol {
        Vec2::new(1.0, 0.0)
    } else {
        Vec2::zeros()
    }
}

pub fn cavity_problem(nu: f64, lambda: f64) -> Result<ProblemData> {
    ProblemData::new(
        Box::new(|_, _| Vec2::zeros()),
        Box::new(|x, _| lid_velocity(x)),
        Box::new(|_, _| Vec2::zeros()),
        nu,
        lambda,
    )
}

/// One centerline sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CenterlineSample {
    /// `"u(x=0.5)"` or `"v(y=0.5)"`.
    pub profile: &'static str,
    pub coord: f64,
    pub numerical: f64,
    pub reference: f64,
}

impl CenterlineSample {
    pub fn diff(&self) -> f64 {
        self.numerical - self.reference
    }
}

/// Evaluates `u` along `x = 1/2` and `v` along `y = 1/2` at the reference
/// ordinates with degree-2 moving least squares.
pub fn sample_centerlines(cloud: &PointCloud, u: &[Vec2], reference: &GhiaReference) -> Result<Vec<CenterlineSample>> {
    let radius = DEFAULT_RADIUS_FACTOR * cloud.h();
    let grid = cloud.grid(radius);
    let ux: Vec<f64> = u.iter().map(|v| v.x).collect();
    let uy: Vec<f64> = u.iter().map(|v| v.y).collect();
    let mut out = Vec::new();
    for &(y, r) in &reference.u_vertical {
        let s = evaluation_stencil(cloud, &grid, Vec2::new(0.5, y), 2, radius, NeighborFilter::All)?;
        out.push(CenterlineSample { profile: "u(x=0.5)", coord: y, numerical: s.apply(&ux), reference: r });
    }
    for &(x, r) in &reference.v_horizontal {
        let s = evaluation_stencil(cloud, &grid, Vec2::new(x, 0.5), 2, radius, NeighborFilter::All)?;
        out.push(CenterlineSample { profile: "v(y=0.5)", coord: x, numerical: s.apply(&uy), reference: r });
    }
    Ok(out)
}

/// Cavity run settings.
#[derive(Clone, Debug)]
pub struct CavityParams {
    pub n: usize,
    pub seed: u64,
    pub order: usize,
    pub evolution: EvolutionParams,
}

#[derive(Debug)]
pub struct CavityOutcome {
    pub disc: Discretization,
    pub state: FieldState,
    pub stats: StepStats,
    pub samples: Vec<CenterlineSample>,
    /// `max |n . u|` over boundary points.
    pub max_normal_flow: f64,
}

impl CavityOutcome {
    pub fn max_deviation(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, s| m.max(s.diff().abs()))
    }

    /// Writes `x,y,u,v,p` per point.
    pub fn write_fields(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "x,y,u,v,p")?;
        for (i, x) in self.disc.cloud().points().iter().enumerate() {
            let (u, p) = (self.state.u[i], self.state.p[i]);
            writeln!(out, "{:e},{:e},{:e},{:e},{:e}", x.x, x.y, u.x, u.y, p)?;
        }
        Ok(())
    }

    /// Writes `profile,coord,value_num,value_ref,diff` per reference ordinate.
    pub fn write_comparison(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "profile,coord,value_num,value_ref,diff")?;
        for s in &self.samples {
            writeln!(out, "{},{:e},{:e},{:e},{:e}", s.profile, s.coord, s.numerical, s.reference, s.diff())?;
        }
        Ok(())
    }
}

/// Runs the cavity from the lid-only initial field to `t_end`.
pub fn run_cavity(params: &CavityParams, reference: &GhiaReference) -> Result<CavityOutcome> {
    let domain = LevelSetDomain::square();
    let cloud = pointcloud::generate(&domain, params.n, params.seed, &GenerationParams::default())?;
    let disc = Discretization::new(cloud, params.order)?;
    let ev = &params.evolution;
    let data = cavity_problem(ev.nu, ev.lambda)?;
    let (_, spec) = ev.scheme_spec(disc.cloud().h());
    let mut stepper = Stepper::navier_stokes(&disc, ev.nu, spec)?;
    let u0: Vec<Vec2> = disc.cloud().points().iter().map(|&x| lid_velocity(x)).collect();
    let state = stepper.initial_state(u0, 0.0, &data)?;
    let state = stepper.run(state, &data, ev.t_end, |_| true)?;
    let stats = stepper.stats().clone();
    let cloud = disc.cloud();
    let max_normal_flow = cloud
        .boundary_indices()
        .fold(0.0f64, |m, i| m.max(cloud.normal(i).dot(&state.u[i]).abs()));
    let samples = sample_centerlines(cloud, &state.u, reference)?;
    Ok(CavityOutcome { disc, state, stats, samples, max_normal_flow })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_parses_and_validates() {
        let r = GhiaReference::parse("[u_vertical]\n0 0\n1 1 # lid\n[v_horizontal]\n0 0\n0.5 0.05\n").unwrap();
        assert_eq!(r.u_vertical, vec![(0.0, 0.0), (1.0, 1.0)]);
        assert_eq!(r.v_horizontal.len(), 2);
        assert!(GhiaReference::parse("[u_vertical]\n0 0\n").is_err());
        assert!(GhiaReference::parse("[u_vertical]\n0.5 0\n0.2 0\n[v_horizontal]\n0 0\n").is_err());
        assert!(GhiaReference::parse("[u_vertical]\n1.5 0\n[v_horizontal]\n0 0\n").is_err());
        assert!(GhiaReference::parse("0 0\n").is_err());
    }

    #[test]
    fn bundled_reference_is_valid() {
        let r = GhiaReference::from_file(&super::super::config::default_reference()).unwrap();
        assert_eq!(r.u_vertical.len(), 17);
        assert_eq!(r.v_horizontal.len(), 17);
    }

    #[test]
    fn lid_excludes_corners() {
        assert_eq!(lid_velocity(Vec2::new(0.5, 1.0)), Vec2::new(1.0, 0.0));
        assert_eq!(lid_velocity(Vec2::new(0.0, 1.0)), Vec2::zeros());
        assert_eq!(lid_velocity(Vec2::new(1.0, 1.0)), Vec2::zeros());
        assert_eq!(lid_velocity(Vec2::new(0.5, 0.0)), Vec2::zeros());
    }
}
