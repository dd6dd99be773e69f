//! The manufactured data against forward-mode hyper-dual differentiation of
//! the closed-form velocity and pressure written out independently here.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use meshfree_ebc::pointcloud::Lcg64;
use meshfree_ebc::verify::{
    base_jacobian, base_laplacian, base_velocity, manufactured_heat_forcing, manufactured_nse, manufactured_vpe,
    nse_pressure, nse_pressure_gradient,
};
use meshfree_ebc::Vec2;

/// `a + b e1 + c e2 + d e1 e2` with `e1^2 = e2^2 = 0`.
#[derive(Clone, Copy, Debug)]
struct Hd {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl Hd {
    fn con(a: f64) -> Self {
        Hd { a, b: 0.0, c: 0.0, d: 0.0 }
    }

    fn sin(self) -> Self {
        let (s, c) = self.a.sin_cos();
        Hd { a: s, b: c * self.b, c: c * self.c, d: c * self.d - s * self.b * self.c }
    }

    fn cos(self) -> Self {
        let (s, c) = self.a.sin_cos();
        Hd { a: c, b: -s * self.b, c: -s * self.c, d: -s * self.d - c * self.b * self.c }
    }
}

impl Add for Hd {
    type Output = Hd;
    fn add(self, o: Hd) -> Hd {
        Hd { a: self.a + o.a, b: self.b + o.b, c: self.c + o.c, d: self.d + o.d }
    }
}

impl Sub for Hd {
    type Output = Hd;
    fn sub(self, o: Hd) -> Hd {
        self + (-o)
    }
}

impl Neg for Hd {
    type Output = Hd;
    fn neg(self) -> Hd {
        Hd { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
    }
}

impl Mul for Hd {
    type Output = Hd;
    fn mul(self, o: Hd) -> Hd {
        Hd {
            a: self.a * o.a,
            b: self.a * o.b + self.b * o.a,
            c: self.a * o.c + self.c * o.a,
            d: self.a * o.d + self.b * o.c + self.c * o.b + self.d * o.a,
        }
    }
}

impl Mul<Hd> for f64 {
    type Output = Hd;
    fn mul(self, o: Hd) -> Hd {
        Hd::con(self) * o
    }
}

/// u = cos t (pi sin(2 pi y) sin^2(pi x), -pi sin(2 pi x) sin^2(pi y)).
fn velocity(x: Hd, y: Hd, t: Hd) -> (Hd, Hd) {
    let sx = (PI * x).sin();
    let sy = (PI * y).sin();
    let ct = t.cos();
    (ct * (PI * ((2.0 * PI * y).sin() * sx * sx)), ct * (-PI * ((2.0 * PI * x).sin() * sy * sy)))
}

/// p = -cos t cos(pi x) sin(pi y).
fn pressure(x: Hd, y: Hd, t: Hd) -> Hd {
    -(t.cos() * (PI * x).cos() * (PI * y).sin())
}

/// Seeds: `dir` selects the e1 and e2 directions among (x, y, t).
fn seeded(p: Vec2, t: f64, e1: usize, e2: usize) -> (Hd, Hd, Hd) {
    let mut v = [Hd::con(p.x), Hd::con(p.y), Hd::con(t)];
    v[e1].b = 1.0;
    v[e2].c = 1.0;
    (v[0], v[1], v[2])
}

struct Derivs {
    u: Vec2,
    /// `(du/dx, du/dy, dv/dx, dv/dy)`
    jac: [f64; 4],
    lap: Vec2,
    dt: Vec2,
    p: f64,
    grad_p: Vec2,
}

fn derivs(p: Vec2, t: f64) -> Derivs {
    let (x, y, tt) = seeded(p, t, 0, 0);
    let (uxx, vxx) = velocity(x, y, tt);
    let (x, y, tt) = seeded(p, t, 1, 1);
    let (uyy, vyy) = velocity(x, y, tt);
    let (x, y, tt) = seeded(p, t, 0, 2);
    let (ux_t, vx_t) = velocity(x, y, tt);
    let px = pressure(x, y, tt);
    let (x, y, tt) = seeded(p, t, 1, 2);
    let (uy_t, vy_t) = velocity(x, y, tt);
    let py = pressure(x, y, tt);
    Derivs {
        u: Vec2::new(uxx.a, vxx.a),
        jac: [ux_t.b, uy_t.b, vx_t.b, vy_t.b],
        lap: Vec2::new(uxx.d + uyy.d, vxx.d + vyy.d),
        dt: Vec2::new(ux_t.c, vx_t.c),
        p: px.a,
        grad_p: Vec2::new(px.b, py.b),
    }
}

fn samples() -> Vec<(Vec2, f64)> {
    let mut rng = Lcg64::new(2024);
    (0..20)
        .map(|_| (Vec2::new(rng.next_f64(), rng.next_f64()), 3.0 * rng.next_f64()))
        .collect()
}

fn close(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= 1e-11 * (1.0 + scale)
}

#[test]
fn base_field_and_derivatives() {
    for (p, _) in samples() {
        let d = derivs(p, 0.0);
        let u = base_velocity(p);
        assert!(close(u.x, d.u.x, 1.0) && close(u.y, d.u.y, 1.0));
        let j = base_jacobian(p);
        for k in 0..4 {
            assert!(close(j[k], d.jac[k], 20.0), "jacobian {k} at {p:?}");
        }
        assert!((j[0] + j[3]).abs() < 1e-12, "base field must be divergence free");
        let l = base_laplacian(p);
        assert!(close(l.x, d.lap.x, 200.0) && close(l.y, d.lap.y, 200.0));
        let vpe = manufactured_vpe(p);
        assert!(close(vpe.f.x, -d.lap.x, 200.0) && close(vpe.f.y, -d.lap.y, 200.0));
    }
}

#[test]
fn navier_stokes_forcing_at_random_points() {
    for nu in [1.0, 0.01] {
        for (p, t) in samples() {
            let d = derivs(p, t);
            let adv = Vec2::new(d.u.x * d.jac[0] + d.u.y * d.jac[1], d.u.x * d.jac[2] + d.u.y * d.jac[3]);
            let f = d.dt + adv + d.grad_p - nu * d.lap;
            let s = manufactured_nse(p, t, nu);
            let scale = d.dt.norm() + adv.norm() + d.grad_p.norm() + nu * d.lap.norm();
            assert!(close(s.f.x, f.x, scale) && close(s.f.y, f.y, scale), "f at {p:?}, t={t}");
            assert!(close(s.u.x, d.u.x, 1.0) && close(s.g.y, d.u.y, 1.0));
            assert!(close(s.dg_dt.x, d.dt.x, 1.0) && close(s.dg_dt.y, d.dt.y, 1.0));
            assert!(close(s.p, d.p, 1.0) && close(nse_pressure(p, t), d.p, 1.0));
            let gp = nse_pressure_gradient(p, t);
            assert!(close(gp.x, d.grad_p.x, 4.0) && close(gp.y, d.grad_p.y, 4.0));
        }
    }
}

#[test]
fn heat_forcing_at_random_points() {
    for (p, t) in samples() {
        let d = derivs(p, t);
        let f = d.dt - 0.5 * d.lap;
        let m = manufactured_heat_forcing(p, t, 0.5);
        assert!(close(m.x, f.x, 200.0) && close(m.y, f.y, 200.0));
    }
}
