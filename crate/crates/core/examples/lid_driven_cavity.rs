//! Lid-driven cavity at Re=100 compared with the bundled centerline tables.
//!
//! cargo run --release --example lid_driven_cavity -- 4000 20

use meshfree_ebc::cli::cavity::{run_cavity, CavityParams, GhiaReference};
use meshfree_ebc::cli::config::default_reference;
use meshfree_ebc::solvers::Scheme;
use meshfree_ebc::verify::{DtRule, EvolutionParams};

fn main() -> meshfree_ebc::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(1000);
    let t_end: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(5.0);
    let reference = GhiaReference::from_file(&default_reference())?;
    let params = CavityParams {
        n,
        seed: 7,
        order: 2,
        evolution: EvolutionParams {
            scheme: Scheme::ForwardEuler,
            theta: 0.0,
            dt: DtRule::Diffusive(0.2),
            nu: 0.01,
            lambda: 100.0,
            t_end,
        },
    };
    let out = run_cavity(&params, &reference)?;
    for s in &out.samples {
        println!("{} {:.4}: {:+.4} (reference {:+.4})", s.profile, s.coord, s.numerical, s.reference);
    }
    println!("max deviation {:.3}, max boundary normal flow {:.2e}", out.max_deviation(), out.max_normal_flow);
    Ok(())
}
