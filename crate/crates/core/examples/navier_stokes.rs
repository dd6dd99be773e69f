//! Pressure-Poisson Navier-Stokes with electric boundary conditions: the
//! manufactured flow with explicit or implicit viscosity.

use meshfree_ebc::geometry::LevelSetDomain;
use meshfree_ebc::solvers::Scheme;
use meshfree_ebc::verify::{level_discretization, nse_errors, DtRule, EvolutionParams};

fn main() -> meshfree_ebc::Result<()> {
    let disc = level_discretization(&LevelSetDomain::paper(), 1000, 7, 2)?;
    let runs = [
        (Scheme::ForwardEuler, DtRule::Diffusive(0.2), 0.1),
        (Scheme::Imex2, DtRule::Linear(0.2), 1.0),
    ];
    for (scheme, dt, t_end) in runs {
        let params = EvolutionParams { scheme, theta: 1.0, dt, nu: 1.0, lambda: 30.0, t_end };
        let out = nse_errors(&disc, &params)?;
        println!("{scheme} dt={dt} T={t_end}: {} steps", out.steps);
        for (name, err) in out.report.quantities() {
            println!("  {name:7} {err:.3e}");
        }
        println!(
            "  pressure solves {} (contract held: {}), last alpha {:.2e}",
            out.stats.pressure_solves, out.stats.pressure_contract_held, out.stats.last_alpha
        );
    }
    Ok(())
}
