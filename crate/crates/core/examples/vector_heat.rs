//! Vector heat equation: the manufactured solution advanced with forward
//! Euler, backward Euler and the two-stage ImEx scheme on one cloud.

use meshfree_ebc::geometry::LevelSetDomain;
use meshfree_ebc::solvers::Scheme;
use meshfree_ebc::verify::{level_discretization, vhe_errors, DtRule, EvolutionParams};

fn main() -> meshfree_ebc::Result<()> {
    let disc = level_discretization(&LevelSetDomain::paper(), 1000, 7, 2)?;
    let runs = [
        (Scheme::ForwardEuler, DtRule::Diffusive(0.2)),
        (Scheme::BackwardEuler, DtRule::Linear(1.0)),
        (Scheme::Imex2, DtRule::Linear(1.0)),
    ];
    for (scheme, dt) in runs {
        let params = EvolutionParams { scheme, theta: 1.0, dt, nu: 1.0, lambda: 0.0, t_end: 1.0 };
        let out = vhe_errors(&disc, &params)?;
        println!(
            "{:15} {:14} steps={:5}  |u|={:.3e}  |grad u|={:.3e}  boundary residual {:.1e}",
            scheme.to_string(),
            format!("dt={dt}"),
            out.steps,
            out.report.err_u,
            out.report.err_grad_u,
            out.stats.max_boundary_residual
        );
    }
    Ok(())
}
