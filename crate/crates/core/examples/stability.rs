//! Largest stable forward-Euler step `dt = C h^2 / nu` for the vector heat
//! equation on clouds of increasing size.

use meshfree_ebc::geometry::LevelSetDomain;
use meshfree_ebc::pointcloud::Lcg64;
use meshfree_ebc::solvers::{measure_stability_constant, ProblemData};
use meshfree_ebc::verify::level_discretization;
use meshfree_ebc::Vec2;

fn main() -> meshfree_ebc::Result<()> {
    let nu = 1.0;
    let data = ProblemData::homogeneous(nu, 0.0)?;
    for n in [500, 1000, 2000] {
        let disc = level_discretization(&LevelSetDomain::paper(), n, 7, 2)?;
        let mut rng = Lcg64::new(1);
        let u0: Vec<Vec2> = (0..disc.cloud().len())
            .map(|_| Vec2::new(2.0 * rng.next_f64() - 1.0, 2.0 * rng.next_f64() - 1.0))
            .collect();
        let c = measure_stability_constant(&disc, &data, &u0, 0.01)?;
        println!("N={n:5} h={:.4} C={c:.3}", disc.cloud().h());
    }
    Ok(())
}
