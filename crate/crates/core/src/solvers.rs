//! Steady and time-dependent drivers on a fixed discretization.
//!
//! Interior velocities are advanced by the chosen scheme; boundary velocities
//! always come from the divergence and tangential rows, so the electric
//! boundary conditions hold after every step (and after every stage of the
//! two-stage scheme).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linsys::{
    assemble_vpe, ebc_matrix, ebc_rhs, layout_of, pressure_matrix, BorderedSolution, BorderedSolver,
    BoundarySolver, SparseLu,
};
use crate::stencil::Discretization;
use crate::Vec2;

/// Space-time vector callback.
pub type VectorFn = Box<dyn Fn(Vec2, f64) -> Vec2 + Send + Sync>;

/// Velocity, pressure and time at one instant.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldState {
    pub u: Vec<Vec2>,
    /// Empty for the heat equation.
    pub p: Vec<f64>,
    pub t: f64,
}

/// Forcing, boundary data and coefficients of an evolution problem.
pub struct ProblemData {
    pub f: VectorFn,
    pub g: VectorFn,
    /// Time derivative of `g`, used by the pressure boundary condition.
    pub dg_dt: VectorFn,
    pub nu: f64,
    /// Relaxation rate of the normal velocity in the pressure condition.
    pub lambda: f64,
}

impl fmt::Debug for ProblemData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemData").field("nu", &self.nu).field("lambda", &self.lambda).finish_non_exhaustive()
    }
}

impl ProblemData {
    pub fn new(f: VectorFn, g: VectorFn, dg_dt: VectorFn, nu: f64, lambda: f64) -> Result<Self> {
        if !(nu > 0.0) {
            return Err(Error::InvalidInput(format!("viscosity must be positive, got {nu}")));
        }
        if !(lambda >= 0.0) {
            return Err(Error::InvalidInput(format!("lambda must be non-negative, got {lambda}")));
        }
        Ok(ProblemData { f, g, dg_dt, nu, lambda })
    }

    /// No forcing and homogeneous boundary data.
    pub fn homogeneous(nu: f64, lambda: f64) -> Result<Self> {
        Self::new(
            Box::new(|_, _| Vec2::zeros()),
            Box::new(|_, _| Vec2::zeros()),
            Box::new(|_, _| Vec2::zeros()),
            nu,
            lambda,
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    ForwardEuler,
    BackwardEuler,
    /// One-step scheme with explicit (`theta = 0`) or implicit (`theta = 1`)
    /// viscosity; everything else explicit.
    Imex1,
    /// Two-stage second-order implicit-explicit Runge-Kutta scheme.
    Imex2,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::ForwardEuler => "forward-euler",
            Scheme::BackwardEuler => "backward-euler",
            Scheme::Imex1 => "imex1",
            Scheme::Imex2 => "imex2",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "forward-euler" | "fe" => Ok(Scheme::ForwardEuler),
            "backward-euler" | "be" => Ok(Scheme::BackwardEuler),
            "imex1" => Ok(Scheme::Imex1),
            "imex2" => Ok(Scheme::Imex2),
            _ => Err(Error::InvalidInput(format!(
                "unknown scheme `{s}` (expected forward-euler, backward-euler, imex1 or imex2)"
            ))),
        }
    }
}

/// `1 - sqrt(2)/2`.
pub const IMEX2_GAMMA: f64 = 1.0 - std::f64::consts::FRAC_1_SQRT_2;
/// `1 - 1/(2 gamma)`.
pub const IMEX2_DELTA: f64 = 1.0 - 1.0 / (2.0 * IMEX2_GAMMA);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchemeSpec {
    pub scheme: Scheme,
    /// Viscosity switch of `Imex1`.
    pub theta: f64,
    pub dt: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl SchemeSpec {
    pub fn new(scheme: Scheme, dt: f64) -> Self {
        let theta = match scheme {
            Scheme::ForwardEuler => 0.0,
            _ => 1.0,
        };
        SchemeSpec { scheme, theta, dt, gamma: IMEX2_GAMMA, delta: IMEX2_DELTA }
    }

    pub fn imex1(theta: f64, dt: f64) -> Self {
        assert!(theta == 0.0 || theta == 1.0, "theta must be 0 or 1");
        SchemeSpec { theta, ..Self::new(Scheme::Imex1, dt) }
    }

    fn implicit_viscosity(&self) -> bool {
        match self.scheme {
            Scheme::ForwardEuler => false,
            Scheme::BackwardEuler | Scheme::Imex2 => true,
            Scheme::Imex1 => self.theta == 1.0,
        }
    }

    /// Diagonal shift of the implicit matrix.
    fn shift(&self) -> f64 {
        match self.scheme {
            Scheme::Imex2 => 1.0 / (self.gamma * self.dt),
            _ => 1.0 / self.dt,
        }
    }
}

/// Steady vector Poisson problem `-Laplacian u = f` with `n x u = n x g` and
/// `div u = 0` on the boundary.
pub fn solve_vpe(
    disc: &Discretization,
    f: impl Fn(Vec2) -> Vec2,
    g: impl Fn(Vec2) -> Vec2,
) -> Result<Vec<Vec2>> {
    let cloud = disc.cloud();
    let fi: Vec<Vec2> = cloud.interior_indices().map(|i| f(cloud.point(i))).collect();
    let gt = tangential(disc, |x| g(x));
    let system = assemble_vpe(disc, 1.0, None, &fi, &gt)?;
    Ok(system.layout.unpack(&system.solve()?))
}

fn tangential(disc: &Discretization, g: impl Fn(Vec2) -> Vec2) -> Vec<f64> {
    crate::linsys::tangential_data(disc, g)
}

/// Largest scaled residual of the boundary rows: the discrete divergence
/// and `n x u - n x g` at every boundary point. Each residual is divided by
/// the row's absolute weight sum times `max |u|` plus the row's data.
pub fn boundary_residual(disc: &Discretization, u: &[Vec2], g: impl Fn(Vec2) -> Vec2) -> f64 {
    let cloud = disc.cloud();
    let umax = u.iter().fold(0.0f64, |m, v| m.max(v.x.abs()).max(v.y.abs()));
    let mut worst: f64 = 0.0;
    let mut account = |r: f64, s: f64| {
        if s > 0.0 {
            worst = worst.max(r.abs() / s);
        } else if r != 0.0 {
            worst = f64::INFINITY;
        }
    };
    for i in cloud.boundary_indices() {
        let (rx, ry) = (disc.dx().row(i), disc.dy().row(i));
        let div = rx.apply_x(u) + ry.apply_y(u);
        let wsum = rx.abs_sum() + ry.abs_sum();
        account(div, wsum * umax);
        let n = cloud.normal(i);
        let gv = g(cloud.point(i));
        let gt = n.x * gv.y - n.y * gv.x;
        let tan = n.x * u[i].y - n.y * u[i].x - gt;
        account(tan, (n.x.abs() + n.y.abs()) * umax + gt.abs());
    }
    worst
}

/// Worst-case diagnostics collected over all steps of a [`Stepper`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct StepStats {
    pub steps: usize,
    /// Largest [`boundary_residual`] after any step or stage.
    pub max_boundary_residual: f64,
    /// Pressure solves performed.
    pub pressure_solves: usize,
    /// Whether every pressure solve met the bordered-system contract.
    pub pressure_contract_held: bool,
    /// Largest `|A p - (r - alpha e)| / |r|` over pressure solves.
    pub max_pressure_residual: f64,
    /// Projection coefficient of the latest pressure solve.
    pub last_alpha: f64,
}

/// Pressure Poisson solver: Laplacian rows in the interior, Neumann rows at
/// the boundary, closed by the bordered system.
#[derive(Debug)]
pub struct PressureSolver {
    bordered: BorderedSolver,
}

impl PressureSolver {
    pub fn new(disc: &Discretization) -> Result<Self> {
        Ok(PressureSolver { bordered: BorderedSolver::new(&pressure_matrix(disc))? })
    }

    /// Pressure of the velocity field `u` at time `t`.
    ///
    /// `laplacian_boundary` holds the Laplacian of `u` at boundary points in
    /// boundary order, normally from [`boundary_laplacian`].
    pub fn solve(
        &self,
        disc: &Discretization,
        u: &[Vec2],
        data: &ProblemData,
        t: f64,
        laplacian_boundary: &[Vec2],
    ) -> Result<BorderedSolution> {
        let cloud = disc.cloud();
        if laplacian_boundary.len() != cloud.n_boundary() {
            return Err(Error::SizeMismatch { expected: cloud.n_boundary(), found: laplacian_boundary.len() });
        }
        let adv = advection(disc, u);
        let pts = cloud.points();
        let forcing: Vec<Vec2> = pts.iter().zip(&adv).map(|(&x, a)| (data.f)(x, t) - a).collect();
        let div = disc.divergence(&forcing);
        let mut r = vec![0.0; cloud.len()];
        r[..cloud.n_interior()].copy_from_slice(&div[..cloud.n_interior()]);
        for (b, i) in cloud.boundary_indices().enumerate() {
            let x = pts[i];
            let n = cloud.normal(i);
            let g = (data.g)(x, t);
            let v = forcing[i] - (data.dg_dt)(x, t) + data.nu * laplacian_boundary[b];
            r[i] = (n.dot(&v) + data.lambda * n.dot(&(u[i] - g))) * crate::linsys::neumann_row_scale(cloud);
        }
        self.bordered.solve(&r)
    }
}

/// Advection `(u . grad) u` at every point.
pub fn advection(disc: &Discretization, u: &[Vec2]) -> Vec<Vec2> {
    disc.jacobian(u)
        .iter()
        .zip(u)
        .map(|(j, v)| Vec2::new(v.x * j[0] + v.y * j[1], v.x * j[2] + v.y * j[3]))
        .collect()
}

/// Interior Laplacian extrapolated to the boundary points.
pub fn boundary_laplacian(disc: &Discretization, interior_laplacian: &[Vec2]) -> Result<Vec<Vec2>> {
    let lx: Vec<f64> = interior_laplacian.iter().map(|v| v.x).collect();
    let ly: Vec<f64> = interior_laplacian.iter().map(|v| v.y).collect();
    let bx = disc.mls().apply(&lx)?;
    let by = disc.mls().apply(&ly)?;
    Ok(bx.into_iter().zip(by).map(|(x, y)| Vec2::new(x, y)).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Problem {
    Heat,
    NavierStokes,
}

/// Time stepper with factorizations cached for one discretization, scheme
/// and viscosity.
#[derive(Debug)]
pub struct Stepper<'a> {
    disc: &'a Discretization,
    problem: Problem,
    scheme: SchemeSpec,
    nu: f64,
    boundary: Option<BoundarySolver>,
    implicit: Option<SparseLu>,
    pressure: Option<PressureSolver>,
    stats: StepStats,
}

impl<'a> Stepper<'a> {
    /// Vector heat equation `u_t = nu Laplacian u + f`.
    pub fn heat(disc: &'a Discretization, nu: f64, scheme: SchemeSpec) -> Result<Self> {
        Self::build(disc, Problem::Heat, nu, scheme)
    }

    /// Navier-Stokes equations in pressure Poisson form.
    pub fn navier_stokes(disc: &'a Discretization, nu: f64, scheme: SchemeSpec) -> Result<Self> {
        Self::build(disc, Problem::NavierStokes, nu, scheme)
    }

    fn build(disc: &'a Discretization, problem: Problem, nu: f64, scheme: SchemeSpec) -> Result<Self> {
        if !(scheme.dt > 0.0) {
            return Err(Error::InvalidInput(format!("time step must be positive, got {}", scheme.dt)));
        }
        let (boundary, implicit) = if scheme.implicit_viscosity() {
            (None, Some(SparseLu::factor(&ebc_matrix(disc, nu, Some(scheme.shift())))?))
        } else {
            (Some(BoundarySolver::new(disc)?), None)
        };
        let pressure = match problem {
            Problem::NavierStokes => Some(PressureSolver::new(disc)?),
            Problem::Heat => None,
        };
        let stats = StepStats { pressure_contract_held: true, ..StepStats::default() };
        Ok(Stepper { disc, problem, scheme, nu, boundary, implicit, pressure, stats })
    }

    pub fn scheme(&self) -> SchemeSpec {
        self.scheme
    }

    pub fn stats(&self) -> &StepStats {
        &self.stats
    }

    /// State at time `t` from velocity `u`, with the pressure filled in for
    /// Navier-Stokes.
    pub fn initial_state(&mut self, u: Vec<Vec2>, t: f64, data: &ProblemData) -> Result<FieldState> {
        if u.len() != self.disc.cloud().len() {
            return Err(Error::SizeMismatch { expected: self.disc.cloud().len(), found: u.len() });
        }
        let p = match self.problem {
            Problem::Heat => Vec::new(),
            Problem::NavierStokes => self.pressure_of(&u, t, data)?.p,
        };
        Ok(FieldState { u, p, t })
    }

    fn pressure_of(&mut self, u: &[Vec2], t: f64, data: &ProblemData) -> Result<BorderedSolution> {
        let lap = self.disc.laplacian_vec(u);
        let lap_b = boundary_laplacian(self.disc, &lap)?;
        let sol = self
            .pressure
            .as_ref()
            .expect("pressure solver present for Navier-Stokes")
            .solve(self.disc, u, data, t, &lap_b)?;
        self.stats.pressure_solves += 1;
        self.stats.pressure_contract_held &= sol.satisfies_contract();
        if sol.rhs_norm > 0.0 {
            self.stats.max_pressure_residual = self.stats.max_pressure_residual.max(sol.residual / sol.rhs_norm);
        }
        self.stats.last_alpha = sol.alpha;
        Ok(sol)
    }

    /// Explicit terms at interior points: forcing for the heat equation,
    /// `f - (u . grad) u - grad p` for Navier-Stokes.
    fn explicit_terms(&self, u: &[Vec2], p: &[f64], t: f64, data: &ProblemData) -> Vec<Vec2> {
        let cloud = self.disc.cloud();
        let ni = cloud.n_interior();
        let pts = cloud.points();
        match self.problem {
            Problem::Heat => (0..ni).map(|i| (data.f)(pts[i], t)).collect(),
            Problem::NavierStokes => {
                let adv = advection(self.disc, u);
                let gp = self.disc.gradient(p);
                (0..ni).map(|i| (data.f)(pts[i], t) - adv[i] - gp[i]).collect()
            }
        }
    }

    fn record_boundary(&mut self, u: &[Vec2], t: f64, data: &ProblemData) {
        let r = boundary_residual(self.disc, u, |x| (data.g)(x, t));
        self.stats.max_boundary_residual = self.stats.max_boundary_residual.max(r);
    }

    /// Explicit interior update followed by the boundary solve at time `t`.
    fn explicit_update(&mut self, interior: Vec<Vec2>, t: f64, data: &ProblemData) -> Result<Vec<Vec2>> {
        let gt = tangential(self.disc, |x| (data.g)(x, t));
        let solver = self.boundary.as_ref().expect("boundary solver for explicit viscosity");
        let ub = solver.solve(self.disc, &interior, &gt)?;
        let mut u = interior;
        u.extend(ub);
        self.record_boundary(&u, t, data);
        Ok(u)
    }

    /// Solves `(shift - nu Laplacian) u = rhs` with boundary data at time `t`.
    fn implicit_solve(&mut self, rhs: &[Vec2], t: f64, data: &ProblemData) -> Result<Vec<Vec2>> {
        let layout = layout_of(self.disc);
        let gt = tangential(self.disc, |x| (data.g)(x, t));
        let b = ebc_rhs(&layout, rhs, &gt)?;
        let x = self.implicit.as_ref().expect("implicit factorization").solve(&b)?;
        let u = layout.unpack(&x);
        self.record_boundary(&u, t, data);
        Ok(u)
    }

    /// Advances `state` by one time step.
    pub fn step(&mut self, state: &FieldState, data: &ProblemData) -> Result<FieldState> {
        let n = self.disc.cloud().len();
        if state.u.len() != n {
            return Err(Error::SizeMismatch { expected: n, found: state.u.len() });
        }
        if self.problem == Problem::NavierStokes && state.p.len() != n {
            return Err(Error::SizeMismatch { expected: n, found: state.p.len() });
        }
        let SchemeSpec { dt, gamma, delta, .. } = self.scheme;
        let t = state.t;
        let nu = self.nu;
        let ni = self.disc.cloud().n_interior();
        let u0 = &state.u;
        let u_new = match (self.scheme.scheme, self.scheme.implicit_viscosity()) {
            (Scheme::Imex2, _) => {
                let q0 = self.explicit_terms(u0, &state.p, t, data);
                let s = 1.0 / (gamma * dt);
                let rhs1: Vec<Vec2> = (0..ni).map(|i| s * u0[i] + q0[i]).collect();
                let t1 = t + gamma * dt;
                let u1 = self.implicit_solve(&rhs1, t1, data)?;
                let p1 = match self.problem {
                    Problem::Heat => Vec::new(),
                    Problem::NavierStokes => self.pressure_of(&u1, t1, data)?.p,
                };
                let q1 = self.explicit_terms(&u1, &p1, t1, data);
                let r1 = self.disc.laplacian_vec(&u1);
                let rhs2: Vec<Vec2> = (0..ni)
                    .map(|i| s * u0[i] + ((1.0 - gamma) * nu * r1[i] + delta * q0[i] + (1.0 - delta) * q1[i]) / gamma)
                    .collect();
                self.implicit_solve(&rhs2, t + dt, data)?
            }
            (_, false) => {
                let q = self.explicit_terms(u0, &state.p, t, data);
                let lap = self.disc.laplacian_vec(u0);
                let interior: Vec<Vec2> = (0..ni).map(|i| u0[i] + dt * (nu * lap[i] + q[i])).collect();
                self.explicit_update(interior, t + dt, data)?
            }
            (scheme, true) => {
                // the heat equation's backward Euler treats the forcing implicitly too
                let tq = if scheme == Scheme::BackwardEuler && self.problem == Problem::Heat { t + dt } else { t };
                let q = self.explicit_terms(u0, &state.p, tq, data);
                let rhs: Vec<Vec2> = (0..ni).map(|i| u0[i] / dt + q[i]).collect();
                self.implicit_solve(&rhs, t + dt, data)?
            }
        };
        let p = match self.problem {
            Problem::Heat => Vec::new(),
            Problem::NavierStokes => self.pressure_of(&u_new, t + dt, data)?.p,
        };
        self.stats.steps += 1;
        Ok(FieldState { u: u_new, p, t: t + dt })
    }

    /// Takes `ceil((t_end - t) / dt)` steps; pick `dt` with [`uniform_steps`]
    /// to land on `t_end` exactly. `observe` sees every accepted state and may stop the run by
    /// returning `false`.
    pub fn run(
        &mut self,
        mut state: FieldState,
        data: &ProblemData,
        t_end: f64,
        mut observe: impl FnMut(&FieldState) -> bool,
    ) -> Result<FieldState> {
        let dt = self.scheme.dt;
        let steps = ((t_end - state.t) / dt - 1e-9).ceil().max(0.0) as usize;
        for _ in 0..steps {
            state = self.step(&state, data)?;
            if !observe(&state) {
                break;
            }
        }
        Ok(state)
    }
}

/// Number of equal steps of at most `dt` that cover `[0, t_end]`, and the
/// resulting step.
pub fn uniform_steps(t_end: f64, dt: f64) -> (usize, f64) {
    let n = (t_end / dt - 1e-9).ceil().max(1.0) as usize;
    (n, t_end / n as f64)
}

/// One heat-equation step (builds the factorizations on every call; use a
/// [`Stepper`] for runs).
pub fn step_vhe(
    state: &FieldState,
    data: &ProblemData,
    scheme: SchemeSpec,
    disc: &Discretization,
) -> Result<FieldState> {
    Stepper::heat(disc, data.nu, scheme)?.step(state, data)
}

/// One Navier-Stokes step (builds the factorizations on every call; use a
/// [`Stepper`] for runs). `state.p` must be the pressure of `state.u`.
pub fn nse_step(
    state: &FieldState,
    data: &ProblemData,
    scheme: SchemeSpec,
    disc: &Discretization,
) -> Result<FieldState> {
    Stepper::navier_stokes(disc, data.nu, scheme)?.step(state, data)
}

/// Time horizon of the stability probe.
pub const STABILITY_HORIZON: f64 = 1.0;
/// Growth factor of `max |u|` that counts as unstable.
pub const STABILITY_GROWTH: f64 = 10.0;

/// Whether forward Euler with step `dt` keeps `max |u|` below 10 times its
/// initial value up to the stability horizon.
pub fn forward_euler_is_stable(disc: &Discretization, data: &ProblemData, u0: &[Vec2], dt: f64) -> Result<bool> {
    let mut stepper = Stepper::heat(disc, data.nu, SchemeSpec::new(Scheme::ForwardEuler, dt))?;
    let max0 = max_norm(u0);
    let limit = STABILITY_GROWTH * max0;
    let mut stable = true;
    let state = FieldState { u: u0.to_vec(), p: Vec::new(), t: 0.0 };
    stepper.run(state, data, STABILITY_HORIZON, |s| {
        let m = max_norm(&s.u);
        stable = m.is_finite() && m <= limit;
        stable
    })?;
    Ok(stable)
}

fn max_norm(u: &[Vec2]) -> f64 {
    u.iter().fold(0.0, |m, v| m.max(v.x.abs()).max(v.y.abs()))
}

/// Largest stable forward-Euler constant `C = dt nu / h^2`, found by
/// bisection on `dt` between `C = 0.01` and `C = 1`, to an absolute
/// accuracy of `tol` in `C`.
pub fn measure_stability_constant(
    disc: &Discretization,
    data: &ProblemData,
    u0: &[Vec2],
    tol: f64,
) -> Result<f64> {
    let h = disc.cloud().h();
    let to_dt = |c: f64| c * h * h / data.nu;
    let (mut lo, mut hi) = (0.01, 1.0);
    if forward_euler_is_stable(disc, data, u0, to_dt(hi))? {
        return Ok(hi);
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if forward_euler_is_stable(disc, data, u0, to_dt(mid))? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn imex2_constants() {
        assert!((IMEX2_GAMMA - 0.2928932188134524).abs() < 1e-15);
        assert!((IMEX2_DELTA + 0.7071067811865475).abs() < 1e-14);
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in [Scheme::ForwardEuler, Scheme::BackwardEuler, Scheme::Imex1, Scheme::Imex2] {
            assert_eq!(s.name().parse::<Scheme>().unwrap(), s);
        }
        assert!("rk4".parse::<Scheme>().is_err());
    }

    #[test]
    fn uniform_steps_cover_horizon() {
        assert_eq!(uniform_steps(1.0, 0.25), (4, 0.25));
        let (n, dt) = uniform_steps(1.0, 0.3);
        assert_eq!(n, 4);
        assert!((dt - 0.25).abs() < 1e-15);
    }

    #[test]
    fn problem_data_rejects_bad_coefficients() {
        assert!(ProblemData::homogeneous(0.0, 1.0).is_err());
        assert!(ProblemData::homogeneous(1.0, -1.0).is_err());
    }
}
