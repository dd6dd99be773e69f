//! Manufactured solutions, max-norm error measurement and convergence fits.

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::LevelSetDomain;
use crate::pointcloud::{self, GenerationParams, PointCloud};
use crate::solvers::{self, FieldState, ProblemData, SchemeSpec, Stepper};
use crate::stencil::{gradient_weights, Discretization, OperatorSpec, StencilSet};
use crate::Vec2;

/// Divergence-free field `(pi sin 2piy sin^2 pix, -pi sin 2pix sin^2 piy)`.
pub fn base_velocity(x: Vec2) -> Vec2 {
    let (sx, sy) = ((PI * x.x).sin(), (PI * x.y).sin());
    Vec2::new(
        PI * (2.0 * PI * x.y).sin() * sx * sx,
        -PI * (2.0 * PI * x.x).sin() * sy * sy,
    )
}

/// Jacobian `(du/dx, du/dy, dv/dx, dv/dy)` of [`base_velocity`].
pub fn base_jacobian(x: Vec2) -> [f64; 4] {
    let (sx, sy) = ((PI * x.x).sin(), (PI * x.y).sin());
    let (s2x, s2y) = ((2.0 * PI * x.x).sin(), (2.0 * PI * x.y).sin());
    let (c2x, c2y) = ((2.0 * PI * x.x).cos(), (2.0 * PI * x.y).cos());
    let pi2 = PI * PI;
    [pi2 * s2x * s2y, 2.0 * pi2 * c2y * sx * sx, -2.0 * pi2 * c2x * sy * sy, -pi2 * s2x * s2y]
}

/// Laplacian of [`base_velocity`].
pub fn base_laplacian(x: Vec2) -> Vec2 {
    let pi3 = PI * PI * PI;
    let (s2x, s2y) = ((2.0 * PI * x.x).sin(), (2.0 * PI * x.y).sin());
    let (c2x, c2y) = ((2.0 * PI * x.x).cos(), (2.0 * PI * x.y).cos());
    Vec2::new(2.0 * pi3 * s2y * (2.0 * c2x - 1.0), -2.0 * pi3 * s2x * (2.0 * c2y - 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VpeSample {
    pub u: Vec2,
    pub f: Vec2,
    pub g: Vec2,
}

/// Steady manufactured solution with `f = -Laplacian u` and `g = u`.
pub fn manufactured_vpe(x: Vec2) -> VpeSample {
    let u = base_velocity(x);
    VpeSample { u, f: -base_laplacian(x), g: u }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NseSample {
    pub u: Vec2,
    pub p: f64,
    pub f: Vec2,
    pub g: Vec2,
    pub dg_dt: Vec2,
}

/// Pressure `-cos t cos pix sin piy`.
pub fn nse_pressure(x: Vec2, t: f64) -> f64 {
    -t.cos() * (PI * x.x).cos() * (PI * x.y).sin()
}

pub fn nse_pressure_gradient(x: Vec2, t: f64) -> Vec2 {
    let c = PI * t.cos();
    Vec2::new(c * (PI * x.x).sin() * (PI * x.y).sin(), -c * (PI * x.x).cos() * (PI * x.y).cos())
}

/// Unsteady manufactured Navier-Stokes solution: `u = cos t` times the base
/// field, the pressure of [`nse_pressure`] and the forcing
/// `f = u_t + (u . grad) u + grad p - nu Laplacian u`.
pub fn manufactured_nse(x: Vec2, t: f64, nu: f64) -> NseSample {
    let (c, s) = (t.cos(), t.sin());
    let u0 = base_velocity(x);
    let j = base_jacobian(x);
    let adv = Vec2::new(u0.x * j[0] + u0.y * j[1], u0.x * j[2] + u0.y * j[3]);
    let f = -s * u0 + c * c * adv + nse_pressure_gradient(x, t) - nu * c * base_laplacian(x);
    NseSample { u: c * u0, p: nse_pressure(x, t), f, g: c * u0, dg_dt: -s * u0 }
}

/// Unsteady heat-equation forcing for `u = cos t` times the base field:
/// `f = u_t - nu Laplacian u`.
pub fn manufactured_heat_forcing(x: Vec2, t: f64, nu: f64) -> Vec2 {
    -t.sin() * base_velocity(x) - nu * t.cos() * base_laplacian(x)
}

/// Exact fields to measure errors against.
pub trait ExactSolution: Sync {
    fn velocity(&self, x: Vec2, t: f64) -> Vec2;
    /// `(du/dx, du/dy, dv/dx, dv/dy)`.
    fn velocity_gradient(&self, x: Vec2, t: f64) -> [f64; 4];
    fn pressure(&self, _x: Vec2, _t: f64) -> Option<f64> {
        None
    }
    fn pressure_gradient(&self, _x: Vec2, _t: f64) -> Option<Vec2> {
        None
    }
}

/// The base field, independent of time.
#[derive(Clone, Copy, Debug, Default)]
pub struct SteadySolution;

impl ExactSolution for SteadySolution {
    fn velocity(&self, x: Vec2, _t: f64) -> Vec2 {
        base_velocity(x)
    }

    fn velocity_gradient(&self, x: Vec2, _t: f64) -> [f64; 4] {
        base_jacobian(x)
    }
}

/// The base field scaled by `cos t`, with the Navier-Stokes pressure when
/// `with_pressure` is set.
#[derive(Clone, Copy, Debug, Default)]
pub struct UnsteadySolution {
    pub with_pressure: bool,
}

impl ExactSolution for UnsteadySolution {
    fn velocity(&self, x: Vec2, t: f64) -> Vec2 {
        t.cos() * base_velocity(x)
    }

    fn velocity_gradient(&self, x: Vec2, t: f64) -> [f64; 4] {
        base_jacobian(x).map(|v| t.cos() * v)
    }

    fn pressure(&self, x: Vec2, t: f64) -> Option<f64> {
        self.with_pressure.then(|| nse_pressure(x, t))
    }

    fn pressure_gradient(&self, x: Vec2, t: f64) -> Option<Vec2> {
        self.with_pressure.then(|| nse_pressure_gradient(x, t))
    }
}

/// Heat-equation data for the unsteady manufactured solution.
pub fn heat_problem(nu: f64) -> Result<ProblemData> {
    ProblemData::new(
        Box::new(move |x, t| manufactured_heat_forcing(x, t, nu)),
        Box::new(|x, t| t.cos() * base_velocity(x)),
        Box::new(|x, t| -t.sin() * base_velocity(x)),
        nu,
        0.0,
    )
}

/// Navier-Stokes data for the unsteady manufactured solution.
pub fn nse_problem(nu: f64, lambda: f64) -> Result<ProblemData> {
    ProblemData::new(
        Box::new(move |x, t| manufactured_nse(x, t, nu).f),
        Box::new(|x, t| t.cos() * base_velocity(x)),
        Box::new(|x, t| -t.sin() * base_velocity(x)),
        nu,
        lambda,
    )
}

/// Consistency order of the derivative stencils used for error measurement.
pub const POSTPROCESS_ORDER: usize = 4;

/// Neighbor count of the post-processing stencils relative to their
/// constraint count.
pub const POSTPROCESS_SAFETY: f64 = 2.0;

/// Fourth-order gradient stencils at every point of a cloud.
#[derive(Clone, Debug)]
pub struct PostProcessor {
    dx: StencilSet,
    dy: StencilSet,
}

impl PostProcessor {
    pub fn new(cloud: &PointCloud) -> Result<Self> {
        let spec = OperatorSpec::dx(POSTPROCESS_ORDER);
        let cnt = (POSTPROCESS_SAFETY * spec.constraint_count() as f64).ceil() as usize;
        let nbhd = pointcloud::neighbors(cloud, pointcloud::DEFAULT_RADIUS_FACTOR, |_| cnt)?;
        let all: Vec<usize> = (0..cloud.len()).collect();
        let (dx, dy) = gradient_weights(cloud, &nbhd, POSTPROCESS_ORDER, &all)?;
        Ok(PostProcessor { dx, dy })
    }

    fn gradient(&self, f: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        Ok((self.dx.apply(f)?, self.dy.apply(f)?))
    }

    /// Jacobian rows `(du/dx, du/dy, dv/dx, dv/dy)` at every point.
    pub fn jacobian(&self, u: &[Vec2]) -> Result<Vec<[f64; 4]>> {
        let ux: Vec<f64> = u.iter().map(|v| v.x).collect();
        let uy: Vec<f64> = u.iter().map(|v| v.y).collect();
        let (a, b) = self.gradient(&ux)?;
        let (c, d) = self.gradient(&uy)?;
        Ok((0..u.len()).map(|i| [a[i], b[i], c[i], d[i]]).collect())
    }

    /// `max |div u|` over all points.
    pub fn divergence_norm(&self, u: &[Vec2]) -> Result<f64> {
        Ok(self.jacobian(u)?.iter().fold(0.0, |m, j| m.max((j[0] + j[3]).abs())))
    }
}

/// Max-norm errors on one cloud.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorReport {
    pub h: f64,
    pub err_u: f64,
    pub err_grad_u: f64,
    pub err_div_u: f64,
    pub err_p: Option<f64>,
    pub err_grad_p: Option<f64>,
    /// Free-form run description (order, scheme, step rule).
    pub label: String,
}

impl ErrorReport {
    /// Named error values, pressure entries only when present.
    pub fn quantities(&self) -> Vec<(&'static str, f64)> {
        let mut q = vec![("u", self.err_u), ("grad_u", self.err_grad_u), ("div_u", self.err_div_u)];
        if let Some(e) = self.err_p {
            q.push(("p", e));
        }
        if let Some(e) = self.err_grad_p {
            q.push(("grad_p", e));
        }
        q
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Max-norm errors of `u` (and `p`, when given and known exactly) against
/// `exact` at time `t`. Derivatives of the numerical fields come from the
/// fourth-order stencils; both pressures are shifted to zero mean first.
pub fn error_report(
    post: &PostProcessor,
    cloud: &PointCloud,
    u: &[Vec2],
    p: Option<&[f64]>,
    exact: &dyn ExactSolution,
    t: f64,
) -> Result<ErrorReport> {
    let n = cloud.len();
    if u.len() != n {
        return Err(Error::SizeMismatch { expected: n, found: u.len() });
    }
    let pts = cloud.points();
    let err_u = pts.iter().zip(u).fold(0.0f64, |m, (&x, v)| {
        let d = v - exact.velocity(x, t);
        m.max(d.x.abs()).max(d.y.abs())
    });
    let jac = post.jacobian(u)?;
    let mut err_grad_u: f64 = 0.0;
    let mut err_div_u: f64 = 0.0;
    for (x, j) in pts.iter().zip(&jac) {
        let e = exact.velocity_gradient(*x, t);
        for k in 0..4 {
            err_grad_u = err_grad_u.max((j[k] - e[k]).abs());
        }
        err_div_u = err_div_u.max((j[0] + j[3]).abs());
    }
    let (mut err_p, mut err_grad_p) = (None, None);
    if let Some(p) = p {
        if p.len() != n {
            return Err(Error::SizeMismatch { expected: n, found: p.len() });
        }
        let exact_p: Option<Vec<f64>> = pts.iter().map(|&x| exact.pressure(x, t)).collect();
        if let Some(pe) = exact_p {
            let (mn, me) = (mean(p), mean(&pe));
            err_p = Some(p.iter().zip(&pe).fold(0.0f64, |m, (a, b)| m.max(((a - mn) - (b - me)).abs())));
            let (gx, gy) = post.gradient(p)?;
            let mut e: f64 = 0.0;
            for (i, &x) in pts.iter().enumerate() {
                if let Some(g) = exact.pressure_gradient(x, t) {
                    e = e.max((gx[i] - g.x).abs()).max((gy[i] - g.y).abs());
                }
            }
            err_grad_p = Some(e);
        }
    }
    Ok(ErrorReport { h: cloud.h(), err_u, err_grad_u, err_div_u, err_p, err_grad_p, label: String::new() })
}

/// Least-squares slope of `log err` against `log h`.
pub fn convergence_fit(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::DegenerateFit(format!("need at least 2 points, got {}", points.len())));
    }
    if let Some(&(h, e)) = points.iter().find(|&&(h, e)| !(h > 0.0 && e > 0.0)) {
        return Err(Error::DegenerateFit(format!("non-positive entry (h = {h:e}, err = {e:e})")));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx <= 1e-24 * (1.0 + mx * mx) {
        return Err(Error::DegenerateFit("all h are equal".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}

/// Error reports over a refinement ladder with fitted slopes.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub levels: Vec<ErrorReport>,
}

impl ConvergenceReport {
    /// Sorts levels by decreasing `h`.
    pub fn new(mut levels: Vec<ErrorReport>) -> Self {
        levels.sort_by(|a, b| b.h.total_cmp(&a.h));
        ConvergenceReport { levels }
    }

    pub fn has_pressure(&self) -> bool {
        self.levels.iter().all(|l| l.err_p.is_some() && l.err_grad_p.is_some())
    }

    /// Fitted slope per quantity.
    pub fn slopes(&self) -> Result<Vec<(&'static str, f64)>> {
        let first = self.levels.first().ok_or_else(|| Error::DegenerateFit("empty ladder".into()))?;
        first
            .quantities()
            .iter()
            .enumerate()
            .map(|(k, &(name, _))| {
                let pts: Vec<(f64, f64)> = self.levels.iter().map(|l| (l.h, l.quantities()[k].1)).collect();
                Ok((name, convergence_fit(&pts)?))
            })
            .collect()
    }

    /// CSV with header `h,err_u,err_grad_u,err_div_u[,err_p,err_grad_p]`.
    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        let pressure = self.has_pressure();
        if pressure {
            writeln!(out, "h,err_u,err_grad_u,err_div_u,err_p,err_grad_p")?;
        } else {
            writeln!(out, "h,err_u,err_grad_u,err_div_u")?;
        }
        for l in &self.levels {
            write!(out, "{:e},{:e},{:e},{:e}", l.h, l.err_u, l.err_grad_u, l.err_div_u)?;
            if pressure {
                write!(out, ",{:e},{:e}", l.err_p.unwrap(), l.err_grad_p.unwrap())?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Default refinement ladder.
pub const LADDER: [usize; 5] = [500, 1000, 2000, 4000, 8000];

/// Time-step rule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DtRule {
    /// `c h^2 / nu`.
    Diffusive(f64),
    /// `c h`.
    Linear(f64),
    Absolute(f64),
}

impl DtRule {
    pub fn dt(&self, h: f64, nu: f64) -> f64 {
        match *self {
            DtRule::Diffusive(c) => c * h * h / nu,
            DtRule::Linear(c) => c * h,
            DtRule::Absolute(dt) => dt,
        }
    }
}

impl fmt::Display for DtRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DtRule::Diffusive(c) => write!(f, "{c}*h^2/nu"),
            DtRule::Linear(c) => write!(f, "{c}*h"),
            DtRule::Absolute(dt) => write!(f, "{dt}"),
        }
    }
}

impl FromStr for DtRule {
    type Err = Error;

    /// Accepts `0.2h^2`, `0.2*h^2/nu`, `100h`, `h`, `0.2*h` or a plain number.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("invalid time-step rule `{s}`"));
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let coeff = |c: &str| -> Result<f64> {
            let c = c.trim_end_matches('*');
            let v = if c.is_empty() { 1.0 } else { c.parse::<f64>().map_err(|_| bad())? };
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(bad())
            }
        };
        if let Some(c) = t.strip_suffix("h^2/nu").or_else(|| t.strip_suffix("h^2")) {
            return Ok(DtRule::Diffusive(coeff(c)?));
        }
        if let Some(c) = t.strip_suffix('h') {
            return Ok(DtRule::Linear(coeff(c)?));
        }
        let v: f64 = t.parse().map_err(|_| bad())?;
        if v > 0.0 && v.is_finite() {
            Ok(DtRule::Absolute(v))
        } else {
            Err(bad())
        }
    }
}

/// One level of a ladder: a fresh cloud and its discretization.
pub fn level_discretization(domain: &LevelSetDomain, n: usize, seed: u64, order: usize) -> Result<Discretization> {
    let cloud = pointcloud::generate(domain, n, seed, &GenerationParams::default())?;
    Discretization::new(cloud, order)
}

/// Manufactured vector Poisson errors on `disc`.
pub fn vpe_errors(disc: &Discretization) -> Result<ErrorReport> {
    let u = solvers::solve_vpe(disc, |x| manufactured_vpe(x).f, |x| manufactured_vpe(x).g)?;
    let post = PostProcessor::new(disc.cloud())?;
    let mut r = error_report(&post, disc.cloud(), &u, None, &SteadySolution, 0.0)?;
    r.label = format!("vpe order={}", disc.order());
    Ok(r)
}

/// Evolution run parameters for a ladder level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolutionParams {
    pub scheme: solvers::Scheme,
    /// Implicit viscosity switch of `Imex1`.
    pub theta: f64,
    pub dt: DtRule,
    pub nu: f64,
    pub lambda: f64,
    pub t_end: f64,
}

impl EvolutionParams {
    /// Step settings for a cloud of resolution `h`, with the step shortened
    /// to land on `t_end`.
    pub fn scheme_spec(&self, h: f64) -> (usize, SchemeSpec) {
        let (steps, dt) = solvers::uniform_steps(self.t_end, self.dt.dt(h, self.nu));
        let spec = match self.scheme {
            solvers::Scheme::Imex1 => SchemeSpec::imex1(self.theta, dt),
            s => SchemeSpec::new(s, dt),
        };
        (steps, spec)
    }
}

/// Result of an evolution run with worst-case step diagnostics.
#[derive(Clone, Debug)]
pub struct EvolutionOutcome {
    pub report: ErrorReport,
    pub stats: solvers::StepStats,
    pub steps: usize,
}

fn exact_velocity(disc: &Discretization, t: f64) -> Vec<Vec2> {
    disc.cloud().points().iter().map(|&x| t.cos() * base_velocity(x)).collect()
}

/// Manufactured heat-equation errors at `t_end`.
pub fn vhe_errors(disc: &Discretization, params: &EvolutionParams) -> Result<EvolutionOutcome> {
    let data = heat_problem(params.nu)?;
    let (steps, spec) = params.scheme_spec(disc.cloud().h());
    let mut stepper = Stepper::heat(disc, params.nu, spec)?;
    let state = stepper.initial_state(exact_velocity(disc, 0.0), 0.0, &data)?;
    let end = stepper.run(state, &data, params.t_end, |_| true)?;
    let post = PostProcessor::new(disc.cloud())?;
    let mut report = error_report(&post, disc.cloud(), &end.u, None, &UnsteadySolution::default(), end.t)?;
    report.label = format!("vhe order={} scheme={} dt={} T={}", disc.order(), params.scheme, params.dt, params.t_end);
    Ok(EvolutionOutcome { report, stats: stepper.stats().clone(), steps })
}

/// Manufactured Navier-Stokes errors at `t_end`.
pub fn nse_errors(disc: &Discretization, params: &EvolutionParams) -> Result<EvolutionOutcome> {
    let data = nse_problem(params.nu, params.lambda)?;
    let (steps, spec) = params.scheme_spec(disc.cloud().h());
    let mut stepper = Stepper::navier_stokes(disc, params.nu, spec)?;
    let state = stepper.initial_state(exact_velocity(disc, 0.0), 0.0, &data)?;
    let end = stepper.run(state, &data, params.t_end, |_| true)?;
    let post = PostProcessor::new(disc.cloud())?;
    let exact = UnsteadySolution { with_pressure: true };
    let mut report = error_report(&post, disc.cloud(), &end.u, Some(&end.p), &exact, end.t)?;
    report.label = format!(
        "nse order={} scheme={} dt={} T={} lambda={}",
        disc.order(),
        params.scheme,
        params.dt,
        params.t_end,
        params.lambda
    );
    Ok(EvolutionOutcome { report, stats: stepper.stats().clone(), steps })
}

/// Runs `level` for every ladder entry on a pool of `workers` threads
/// (0 uses the global pool) and collects the results in ladder order.
pub fn run_ladder<T: Send>(
    ladder: &[usize],
    workers: usize,
    level: impl Fn(usize) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    let run = || ladder.par_iter().map(|&n| level(n)).collect::<Result<Vec<T>>>();
    if workers == 0 {
        run()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?
            .install(run)
    }
}

/// The initial field for divergence-decay runs: the exact field plus
/// `amplitude * (sin pix sin piy, 0)`, which has nonzero divergence.
pub fn perturbed_initial(disc: &Discretization, amplitude: f64) -> Vec<Vec2> {
    disc.cloud()
        .points()
        .iter()
        .map(|&x| base_velocity(x) + amplitude * Vec2::new((PI * x.x).sin() * (PI * x.y).sin(), 0.0))
        .collect()
}

/// `(t, max |div u|)` after every step of a manufactured heat run from the
/// perturbed initial field, starting with the initial value at `t = 0`.
pub fn divergence_decay_run(
    disc: &Discretization,
    data: &ProblemData,
    scheme: SchemeSpec,
    amplitude: f64,
    t_end: f64,
) -> Result<Vec<(f64, f64)>> {
    let post = PostProcessor::new(disc.cloud())?;
    let mut stepper = Stepper::heat(disc, data.nu, scheme)?;
    let mut state = FieldState { u: perturbed_initial(disc, amplitude), p: Vec::new(), t: 0.0 };
    let mut series = vec![(0.0, post.divergence_norm(&state.u)?)];
    let steps = ((t_end / scheme.dt) - 1e-9).ceil().max(0.0) as usize;
    for _ in 0..steps {
        state = stepper.step(&state, data)?;
        series.push((state.t, post.divergence_norm(&state.u)?));
    }
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spot_values() {
        let u = base_velocity(Vec2::new(0.5, 0.25));
        assert!((u.x - PI).abs() < 1e-14 && u.y.abs() < 1e-14);
        let u = base_velocity(Vec2::new(0.25, 0.25));
        assert!((u.x - PI / 2.0).abs() < 1e-14 && (u.y + PI / 2.0).abs() < 1e-14);
        assert!((nse_pressure(Vec2::new(0.0, 0.5), 0.0) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn fits() {
        assert!((convergence_fit(&[(0.1, 1e-2), (0.05, 2.5e-3), (0.025, 6.25e-4)]).unwrap() - 2.0).abs() < 1e-12);
        assert!((convergence_fit(&[(0.1, 1e-1), (0.05, 5e-2)]).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(convergence_fit(&[(0.1, 3.0), (0.05, 3.0), (0.02, 3.0)]).unwrap(), 0.0);
        assert!(matches!(convergence_fit(&[(0.1, 1.0), (0.1, 2.0)]), Err(Error::DegenerateFit(_))));
    }

    #[test]
    fn dt_rules_parse() {
        assert_eq!("0.2h^2".parse::<DtRule>().unwrap(), DtRule::Diffusive(0.2));
        assert_eq!("0.2*h^2/nu".parse::<DtRule>().unwrap(), DtRule::Diffusive(0.2));
        assert_eq!("100h".parse::<DtRule>().unwrap(), DtRule::Linear(100.0));
        assert_eq!("h".parse::<DtRule>().unwrap(), DtRule::Linear(1.0));
        assert_eq!("0.001".parse::<DtRule>().unwrap(), DtRule::Absolute(0.001));
        assert!("-1h".parse::<DtRule>().is_err());
        assert!("fast".parse::<DtRule>().is_err());
        assert!((DtRule::Diffusive(0.2).dt(0.1, 2.0) - 0.001).abs() < 1e-18);
    }

    #[test]
    fn csv_header_and_rows() {
        let r = ErrorReport {
            h: 0.1,
            err_u: 1.0,
            err_grad_u: 2.0,
            err_div_u: 3.0,
            err_p: None,
            err_grad_p: None,
            label: String::new(),
        };
        let mut out = Vec::new();
        ConvergenceReport::new(vec![r]).write_csv(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "h,err_u,err_grad_u,err_div_u\n1e-1,1e0,2e0,3e0\n");
    }
}
