//! Weighted least-squares stencil weights on a scattered neighborhood,
//! checked against polynomials the stencil must reproduce exactly.

use meshfree_ebc::stencil::{constraint_system, wlsq_weights, Operator, OperatorSpec, DEFAULT_BETA};
use meshfree_ebc::Vec2;

fn main() -> meshfree_ebc::Result<()> {
    let center = Vec2::new(0.3, 0.4);
    let h = 0.05;
    let mut rng = meshfree_ebc::pointcloud::Lcg64::new(3);
    let neighbors: Vec<Vec2> = (0..24)
        .map(|k| {
            let angle = k as f64 * 0.7 + rng.next_f64();
            let r = h * (0.6 + 1.8 * rng.next_f64());
            center + r * Vec2::new(angle.cos(), angle.sin())
        })
        .collect();

    for order in 1..=3 {
        let spec = OperatorSpec::new(Operator::Laplacian, order);
        let (v, b) = constraint_system(center, &neighbors, spec)?;
        let dist: Vec<f64> = neighbors.iter().map(|x| (x - center).norm()).collect();
        let w = wlsq_weights(&v, &b, &dist, DEFAULT_BETA)?;
        let diag = -w.iter().sum::<f64>();

        // x^2 y + y^3 has Laplacian 2y + 6y = 8y.
        let f = |x: Vec2| x.x * x.x * x.y + x.y.powi(3);
        let approx = diag * f(center) + w.iter().zip(&neighbors).map(|(a, &x)| a * f(x)).sum::<f64>();
        println!(
            "order {order}: {} constraints, laplacian of x^2y+y^3 = {approx:.10} (exact {:.10})",
            b.len(),
            8.0 * center.y
        );
    }
    Ok(())
}
