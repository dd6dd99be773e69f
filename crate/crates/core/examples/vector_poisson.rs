//! Vector Poisson problem with electric boundary conditions on the
//! half-disk-over-rectangle domain, solved on a short refinement ladder.
//!
//! cargo run --release --example vector_poisson -- 2

use meshfree_ebc::geometry::LevelSetDomain;
use meshfree_ebc::verify::{level_discretization, vpe_errors, ConvergenceReport};

fn main() -> meshfree_ebc::Result<()> {
    let order: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2);
    let domain = LevelSetDomain::paper();
    let mut levels = Vec::new();
    for n in [500, 1000, 2000, 4000] {
        let disc = level_discretization(&domain, n, 7, order)?;
        let r = vpe_errors(&disc)?;
        println!("N={n:5} h={:.4}  |u|={:.3e}  |grad u|={:.3e}  |div u|={:.3e}", r.h, r.err_u, r.err_grad_u, r.err_div_u);
        levels.push(r);
    }
    for (name, slope) in ConvergenceReport::new(levels).slopes()? {
        println!("slope {name:7} {slope:.2}");
    }
    Ok(())
}
