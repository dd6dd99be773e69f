//! Stencil oracles shared by the stencil tests and the acceptance run.
#![allow(dead_code)]

use meshfree_ebc::pointcloud::Lcg64;
use meshfree_ebc::stencil::{constraint_system, monomial_exponents, wlsq_weights, Operator, OperatorSpec, DEFAULT_BETA};
use meshfree_ebc::Vec2;

pub const OPERATORS: [Operator; 4] = [Operator::Laplacian, Operator::Dx, Operator::Dy, Operator::Identity];

/// Weights and diagonal of `spec` at `center`.
pub fn stencil(center: Vec2, nbrs: &[Vec2], spec: OperatorSpec) -> (Vec<f64>, f64) {
    let (v, b) = constraint_system(center, nbrs, spec).unwrap();
    let d: Vec<f64> = nbrs.iter().map(|x| (x - center).norm()).collect();
    let w = wlsq_weights(&v, &b, &d, DEFAULT_BETA).unwrap();
    let diag = if spec.includes_constant() { 0.0 } else { -w.iter().sum::<f64>() };
    (w, diag)
}

pub fn monomial(x: Vec2, p: u32, q: u32) -> f64 {
    x.x.powi(p as i32) * x.y.powi(q as i32)
}

/// The operator applied to `x^p y^q` at `c`, by hand.
pub fn exact(op: Operator, c: Vec2, p: u32, q: u32) -> f64 {
    let m = |p: i32, q: i32| if p < 0 || q < 0 { 0.0 } else { c.x.powi(p) * c.y.powi(q) };
    let (p, q) = (p as i32, q as i32);
    let (pf, qf) = (p as f64, q as f64);
    match op {
        Operator::Identity => m(p, q),
        Operator::Dx => pf * m(p - 1, q),
        Operator::Dy => qf * m(p, q - 1),
        Operator::Laplacian => pf * (pf - 1.0) * m(p - 2, q) + qf * (qf - 1.0) * m(p, q - 2),
    }
}

pub fn scattered(seed: u64, center: Vec2, h: f64, count: usize) -> Vec<Vec2> {
    let mut rng = Lcg64::new(seed);
    (0..count)
        .map(|_| {
            let a = 2.0 * std::f64::consts::PI * rng.next_f64();
            let r = h * (0.3 + 2.2 * rng.next_f64());
            center + r * Vec2::new(a.cos(), a.sin())
        })
        .collect()
}

/// First monomial the stencil of `op` at `order` fails to reproduce on a
/// scattered neighborhood, to 1e-9 relative to the summed magnitudes.
pub fn exactness_violation(seed: u64, center: Vec2, h: f64, op: Operator, order: usize) -> Option<String> {
    let spec = OperatorSpec::new(op, order);
    let nbrs = scattered(seed, center, h, (2.5 * spec.constraint_count() as f64) as usize);
    let (w, diag) = stencil(center, &nbrs, spec);
    for (p, q) in monomial_exponents(spec.constraint_degree(), true) {
        let approx = diag * monomial(center, p, q) + w.iter().zip(&nbrs).map(|(a, &x)| a * monomial(x, p, q)).sum::<f64>();
        let truth = exact(op, center, p, q);
        let scale = diag.abs() * monomial(center, p, q).abs()
            + w.iter().zip(&nbrs).map(|(a, &x)| (a * monomial(x, p, q)).abs()).sum::<f64>()
            + truth.abs();
        if (approx - truth).abs() > 1e-9 * scale {
            return Some(format!("{op:?} order {order} x^{p}y^{q}: {approx} vs {truth}"));
        }
    }
    None
}

/// Largest relative deviation of the order-1 Laplacian on the 5-point cross
/// from `1/h^2` and `-4/h^2`. The xy row vanishes on the cross, so it is
/// dropped from a system padded with one corner point.
pub fn five_point_error(c: Vec2, h: f64) -> f64 {
    let nbrs = [c + Vec2::new(h, 0.0), c - Vec2::new(h, 0.0), c + Vec2::new(0.0, h), c - Vec2::new(0.0, h)];
    let pad = [nbrs[0], nbrs[1], nbrs[2], nbrs[3], c + Vec2::new(h, h)];
    let (v, b) = constraint_system(c, &pad, OperatorSpec::laplacian(1)).unwrap();
    let xy = monomial_exponents(2, false).iter().position(|&e| e == (1, 1)).unwrap();
    let v = v.columns(0, 4).into_owned().remove_row(xy);
    let b = b.remove_row(xy);
    let w = wlsq_weights(&v, &b, &[h; 4], DEFAULT_BETA).unwrap();
    let expect = 1.0 / (h * h);
    let diag = -w.iter().sum::<f64>();
    w.iter()
        .map(|a| (a - expect).abs() / expect)
        .fold((diag + 4.0 * expect).abs() / (4.0 * expect), f64::max)
}

/// Largest deviation of the order-1 x and y derivatives on the cross from
/// central differences, relative to `1/(2h)`.
pub fn central_difference_error(c: Vec2, h: f64) -> f64 {
    let nbrs = [c + Vec2::new(h, 0.0), c + Vec2::new(0.0, h), c - Vec2::new(h, 0.0), c - Vec2::new(0.0, h)];
    let s = 1.0 / (2.0 * h);
    let (wx, dx) = stencil(c, &nbrs, OperatorSpec::dx(1));
    let (wy, dy) = stencil(c, &nbrs, OperatorSpec::dy(1));
    let ex = [s, 0.0, -s, 0.0, 0.0];
    let ey = [0.0, s, 0.0, -s, 0.0];
    let gx = wx.iter().chain([&dx]).zip(&ex).map(|(a, b)| (a - b).abs());
    let gy = wy.iter().chain([&dy]).zip(&ey).map(|(a, b)| (a - b).abs());
    gx.chain(gy).fold(0.0, f64::max) / s
}

/// Largest deviation between the weights on a neighborhood and `s^d` times
/// the weights on the neighborhood scaled by `s`, relative to the largest weight.
pub fn scaling_error(seed: u64, s: f64, op: Operator, order: usize) -> f64 {
    let spec = OperatorSpec::new(op, order);
    let c = Vec2::new(0.5, 0.5);
    let nbrs = scattered(seed, c, 0.05, (2.5 * spec.constraint_count() as f64) as usize);
    let scaled: Vec<Vec2> = nbrs.iter().map(|x| c + s * (x - c)).collect();
    let (w1, d1) = stencil(c, &nbrs, spec);
    let (w2, d2) = stencil(c, &scaled, spec);
    let k = s.powi(op.differential_order() as i32);
    let wmax = w1.iter().fold(d1.abs(), |m, a| m.max(a.abs()));
    w1.iter().zip(&w2).map(|(a, b)| (a - k * b).abs()).fold((d1 - k * d2).abs(), f64::max) / wmax
}
