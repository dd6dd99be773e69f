use meshfree_ebc::cli::{random_field, stability_constant};
use meshfree_ebc::geometry::LevelSetDomain;
use meshfree_ebc::solvers::{forward_euler_is_stable, FieldState, ProblemData, Scheme, SchemeSpec, Stepper};
use meshfree_ebc::stencil::Discretization;
use meshfree_ebc::verify::{base_velocity, divergence_decay_run, heat_problem, level_discretization, nse_problem};
use meshfree_ebc::Vec2;
use std::sync::OnceLock;

fn disc() -> &'static Discretization {
    static D: OnceLock<Discretization> = OnceLock::new();
    D.get_or_init(|| level_discretization(&LevelSetDomain::by_name("paper").unwrap(), 500, 7, 2).unwrap())
}

fn exact(d: &Discretization, t: f64) -> Vec<Vec2> {
    d.cloud().points().iter().map(|&x| t.cos() * base_velocity(x)).collect()
}

fn max_diff(a: &[Vec2], b: &[Vec2]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).norm()))
}

fn run(d: &Discretization, data: &ProblemData, spec: SchemeSpec, nse: bool, steps: usize) -> (FieldState, f64) {
    let mut s = if nse { Stepper::navier_stokes(d, data.nu, spec) } else { Stepper::heat(d, data.nu, spec) }.unwrap();
    let mut state = s.initial_state(exact(d, 0.0), 0.0, data).unwrap();
    for _ in 0..steps {
        state = s.step(&state, data).unwrap();
    }
    let r = s.stats().max_boundary_residual;
    (state, r)
}

#[test]
fn imex1_reduces_to_euler() {
    let d = disc();
    let h = d.cloud().h();
    let data = nse_problem(1.0, 30.0).unwrap();
    let dt = 0.1 * h * h;
    let (fe, _) = run(d, &data, SchemeSpec::new(Scheme::ForwardEuler, dt), true, 5);
    let (i0, _) = run(d, &data, SchemeSpec::imex1(0.0, dt), true, 5);
    assert_eq!(fe.u, i0.u);
    assert_eq!(fe.p, i0.p);

    let dt = 0.5 * h;
    let (be, _) = run(d, &data, SchemeSpec::new(Scheme::BackwardEuler, dt), true, 3);
    let (i1, _) = run(d, &data, SchemeSpec::imex1(1.0, dt), true, 3);
    assert!(max_diff(&be.u, &i1.u) < 1e-12);
}

#[test]
fn imex2_is_second_order_in_time() {
    // Self-convergence on a fixed cloud against a fine-step reference.
    let d = disc();
    let data = heat_problem(1.0).unwrap();
    let t_end = 0.4;
    let at = |steps: usize| run(d, &data, SchemeSpec::new(Scheme::Imex2, t_end / steps as f64), false, steps).0.u;
    let reference = at(256);
    let e1 = max_diff(&at(8), &reference);
    let e2 = max_diff(&at(16), &reference);
    let e3 = max_diff(&at(32), &reference);
    let r1 = (e1 / e2).log2();
    let r2 = (e2 / e3).log2();
    assert!(r1 > 1.7 && r2 > 1.7, "rates {r1} {r2}");

    let first = |scheme| {
        let at = |steps: usize| run(d, &data, SchemeSpec::new(scheme, t_end / steps as f64), false, steps).0.u;
        (max_diff(&at(8), &reference) / max_diff(&at(16), &reference)).log2()
    };
    let r = first(Scheme::BackwardEuler);
    assert!((0.7..1.4).contains(&r), "backward Euler rate {r}");
}

#[test]
fn boundary_rows_hold_after_every_step() {
    let d = disc();
    let h = d.cloud().h();
    for (scheme, dt) in [
        (Scheme::ForwardEuler, 0.2 * h * h),
        (Scheme::BackwardEuler, 2.0 * h),
        (Scheme::Imex2, h),
    ] {
        let (_, r) = run(d, &heat_problem(1.0).unwrap(), SchemeSpec::new(scheme, dt), false, 10);
        assert!(r <= 1e-8, "heat {scheme}: {r}");
        let (_, r) = run(d, &nse_problem(1.0, 30.0).unwrap(), SchemeSpec::new(scheme, dt), true, 10);
        assert!(r <= 1e-8, "nse {scheme}: {r}");
    }
}

#[test]
fn pressure_solves_meet_contract_during_run() {
    let d = disc();
    let data = nse_problem(1.0, 30.0).unwrap();
    let mut s = Stepper::navier_stokes(d, 1.0, SchemeSpec::new(Scheme::Imex2, 0.2 * d.cloud().h())).unwrap();
    let state = s.initial_state(exact(d, 0.0), 0.0, &data).unwrap();
    s.run(state, &data, 0.2, |_| true).unwrap();
    assert!(s.stats().pressure_contract_held);
    assert!(s.stats().max_pressure_residual <= 1e-8);
    assert_eq!(s.stats().pressure_solves, 1 + 2 * s.stats().steps);
}

#[test]
fn stability_constant_does_not_depend_on_viscosity() {
    let d = disc();
    let c1 = stability_constant(d, 1.0, 3).unwrap();
    let c2 = stability_constant(d, 0.5, 3).unwrap();
    assert!((c1 - c2).abs() <= 0.01, "{c1} vs {c2}");
}

#[test]
fn small_diffusive_step_is_stable() {
    let d = disc();
    let h = d.cloud().h();
    for nu in [1.0, 0.01] {
        let data = ProblemData::homogeneous(nu, 0.0).unwrap();
        let u0 = random_field(d.cloud().len(), 5);
        assert!(forward_euler_is_stable(d, &data, &u0, 0.01 * h * h / nu).unwrap());
    }
}

#[test]
fn explicit_step_far_beyond_limit_blows_up() {
    let d = disc();
    let h = d.cloud().h();
    let data = ProblemData::homogeneous(1.0, 0.0).unwrap();
    let u0 = random_field(d.cloud().len(), 5);
    assert!(!forward_euler_is_stable(d, &data, &u0, 5.0 * h * h).unwrap());
}

#[test]
fn perturbed_divergence_decays() {
    let d = disc();
    let h = d.cloud().h();
    let data = heat_problem(1.0).unwrap();
    for (scheme, dt) in [(Scheme::Imex2, h), (Scheme::BackwardEuler, h)] {
        let spec = SchemeSpec::new(scheme, dt);
        let perturbed = divergence_decay_run(d, &data, spec, 0.1, 1.0).unwrap();
        let clean = divergence_decay_run(d, &data, spec, 0.0, 1.0).unwrap();
        // excess over the unperturbed run
        let excess: Vec<f64> = perturbed.iter().zip(&clean).map(|(p, c)| (p.1 - c.1).abs()).collect();
        assert!(excess[0] > 0.1);
        assert!(excess[1..=3].iter().any(|&e| e < 0.5 * excess[0]), "{scheme}: no early decay {excess:?}");
        let (end, floor) = (perturbed.last().unwrap().1, clean.last().unwrap().1);
        assert!(end <= 10.0 * floor, "{scheme}: {end} vs floor {floor}");
    }
}
