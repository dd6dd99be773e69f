mod common;

use common::{
    central_difference_error, exactness_violation, five_point_error, scaling_error, scattered, stencil, OPERATORS,
};
use meshfree_ebc::stencil::{Operator, OperatorSpec};
use meshfree_ebc::Vec2;
use proptest::prelude::*;

#[test]
fn five_point_laplacian() {
    let e = five_point_error(Vec2::new(0.4, -0.2), 0.03);
    assert!(e <= 1e-12, "{e}");
}

#[test]
fn nine_point_laplacian_on_full_grid_cell() {
    // With w = d^-2 the diagonals weigh half the axis points; minimising
    // sum a^2 / w under sum a x^2 = 2 gives equal weights 1/(3h^2).
    let h = 0.05;
    let c = Vec2::new(0.1, 0.7);
    let mut nbrs = Vec::new();
    for i in -1..=1 {
        for j in -1..=1 {
            if (i, j) != (0, 0) {
                nbrs.push(c + h * Vec2::new(i as f64, j as f64));
            }
        }
    }
    let (w, diag) = stencil(c, &nbrs, OperatorSpec::laplacian(1));
    let expect = 1.0 / (3.0 * h * h);
    for a in &w {
        assert!((a - expect).abs() <= 1e-12 * expect);
    }
    assert!((diag + 8.0 * expect).abs() <= 1e-12 * 8.0 * expect);
}

#[test]
fn central_differences() {
    let e = central_difference_error(Vec2::new(-0.3, 0.9), 0.02);
    assert!(e <= 1e-12, "{e}");
}

fn check_exactness(seed: u64, center: Vec2, h: f64, op: Operator, order: usize) -> Result<(), TestCaseError> {
    match exactness_violation(seed, center, h, op, order) {
        Some(msg) => Err(TestCaseError::fail(msg)),
        None => Ok(()),
    }
}

#[test]
fn polynomial_exactness_every_operator_and_order() {
    for op in OPERATORS {
        for order in 1..=4 {
            check_exactness(11 + order as u64, Vec2::new(0.35, 0.6), 0.04, op, order).unwrap();
        }
    }
}

#[test]
fn degree_beyond_consistency_is_not_reproduced() {
    let c = Vec2::new(0.2, 0.2);
    let nbrs = scattered(5, c, 0.05, 20);
    let (w, diag) = stencil(c, &nbrs, OperatorSpec::laplacian(1));
    let approx = diag * c.x.powi(4) + w.iter().zip(&nbrs).map(|(a, x)| a * x.x.powi(4)).sum::<f64>();
    assert!((approx - 12.0 * c.x * c.x).abs() > 1e-6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exactness_on_random_neighborhoods(
        seed in 0u64..10_000,
        cx in -1.0f64..1.0,
        cy in -1.0f64..1.0,
        h in 0.005f64..0.2,
        op in 0usize..4,
        order in 1usize..=3,
    ) {
        check_exactness(seed, Vec2::new(cx, cy), h, OPERATORS[op], order)?;
    }

    #[test]
    fn weights_scale_with_spacing(
        seed in 0u64..10_000,
        s in 0.1f64..10.0,
        op in 0usize..4,
        order in 1usize..=3,
    ) {
        let e = scaling_error(seed, s, OPERATORS[op], order);
        prop_assert!(e <= 1e-9, "{e}");
    }

    #[test]
    fn differential_rows_annihilate_constants(seed in 0u64..10_000, op in 0usize..3, order in 1usize..=3) {
        let spec = OperatorSpec::new(OPERATORS[op], order);
        let c = Vec2::new(0.1, 0.9);
        let nbrs = scattered(seed, c, 0.02, (2.5 * spec.constraint_count() as f64) as usize);
        let (w, diag) = stencil(c, &nbrs, spec);
        let total: f64 = w.iter().sum::<f64>() + diag;
        let wmax = w.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        prop_assert!(total.abs() <= 1e-12 * wmax * w.len() as f64);
    }
}
