//! The pure-Neumann pressure matrix is singular; the bordered system picks
//! the zero-mean solution and reports how far the right-hand side was from
//! compatible.

use meshfree_ebc::geometry::LevelSetDomain;
use meshfree_ebc::linsys::{pressure_matrix, BorderedSolver};
use meshfree_ebc::verify::level_discretization;

fn main() -> meshfree_ebc::Result<()> {
    let disc = level_discretization(&LevelSetDomain::disk(), 1000, 7, 2)?;
    let a = pressure_matrix(&disc);
    let solver = BorderedSolver::new(&a)?;

    let sums = a.row_sums();
    println!("{}x{} matrix, {} nonzeros, max |row sum| {:.1e}", a.nrows(), a.ncols(), a.nnz(), sums.iter().fold(0.0f64, |m, s| m.max(s.abs())));

    // Interior source with homogeneous Neumann data: incompatible unless
    // the source integrates to zero.
    let cloud = disc.cloud();
    let r: Vec<f64> = (0..cloud.len())
        .map(|i| if cloud.is_boundary(i) { 0.0 } else { 1.0 + cloud.point(i).x })
        .collect();
    let s = solver.solve(&r)?;
    println!("alpha = {:.6}", s.alpha);
    println!("e^T p = {:.1e}, residual = {:.1e}", s.gauge, s.residual);
    println!("contract holds: {}", s.satisfies_contract());
    Ok(())
}
