//! Generates a relaxed point cloud on the half-disk-over-rectangle domain
//! and prints its quality diagnostics.
//!
//! cargo run --release --example point_cloud -- 2000

use meshfree_ebc::geometry::LevelSetDomain;
use meshfree_ebc::pointcloud::{self, GenerationParams, DEFAULT_RADIUS_FACTOR};

fn main() -> meshfree_ebc::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2000);
    let domain = LevelSetDomain::paper();
    let cloud = pointcloud::generate(&domain, n, 7, &GenerationParams::default())?;
    let h = cloud.h();
    let hood = pointcloud::neighbors(&cloud, DEFAULT_RADIUS_FACTOR, |_| 12)?;
    let report = pointcloud::validate(&cloud, &hood);

    println!("domain area {:.4}, perimeter {:.4}", domain.area(), domain.perimeter());
    println!("{} interior + {} boundary points, h = {:.5}", cloud.n_interior(), cloud.n_boundary(), h);
    println!("min spacing {:.3} h", report.min_spacing_over_h);
    println!("neighbors per point {}..{}", report.min_neighbors, report.max_neighbors);
    println!("valid: {}", report.is_valid());
    for c in domain.corners() {
        println!("corner {:?} normal {:?}", c.point.as_slice(), c.normal.as_slice());
    }
    Ok(())
}
