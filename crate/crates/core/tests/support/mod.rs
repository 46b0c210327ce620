//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use anisovortex::energy::{energy_e, energy_gradient};
use anisovortex::field::uniform_radii;
use anisovortex::{PolarField, Sign, SymmetryClass, Vec2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Shoots `η'' + η'/r - m²η/r² + (1-η²)η = 0` from the origin with the series
/// start `a r^m (1 - r²/(4(m+1)))`, bisecting on `a` until the trajectory
/// neither overshoots 1 nor turns back down before `r_decide`. Returns the
/// profile sampled every `h_out` up to `r_out`.
pub fn shoot_radial(m: u32, r_out: f64, h_out: f64) -> Vec<(f64, f64)> {
    let mf = m as f64;
    let h = 1e-3;
    let r0: f64 = 1e-3;
    let rhs = |r: f64, y: [f64; 2]| -> [f64; 2] {
        [y[1], -y[1] / r + mf * mf * y[0] / (r * r) - (1.0 - y[0] * y[0]) * y[0]]
    };
    let start = |a: f64| -> [f64; 2] {
        let c = 1.0 / (4.0 * (mf + 1.0));
        [
            a * r0.powi(m as i32) * (1.0 - c * r0 * r0),
            a * (mf * r0.powi(m as i32 - 1) - c * (mf + 2.0) * r0.powi(m as i32 + 1)),
        ]
    };
    let step = |r: f64, y: [f64; 2]| -> [f64; 2] {
        let k1 = rhs(r, y);
        let k2 = rhs(r + h / 2.0, [y[0] + h / 2.0 * k1[0], y[1] + h / 2.0 * k1[1]]);
        let k3 = rhs(r + h / 2.0, [y[0] + h / 2.0 * k2[0], y[1] + h / 2.0 * k2[1]]);
        let k4 = rhs(r + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
        [
            y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ]
    };
    // +1: too large, -1: too small, 0: undecided by r_decide
    let classify = |a: f64| -> i32 {
        let mut y = start(a);
        let mut r = r0;
        while r < 30.0 {
            y = step(r, y);
            r += h;
            if y[0] > 1.0 {
                return 1;
            }
            if y[1] < 0.0 {
                return -1;
            }
        }
        0
    };
    let (mut lo, mut hi) = (0.0f64, 10.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        match classify(mid) {
            1 => hi = mid,
            -1 => lo = mid,
            _ => {
                lo = mid;
                hi = mid;
            }
        }
    }
    let a = 0.5 * (lo + hi);
    let mut y = start(a);
    let mut r = r0;
    let mut out = vec![(0.0, 0.0)];
    let mut next = h_out;
    let mut k = 0usize;
    while next <= r_out + 1e-12 {
        while r + h <= next + 1e-12 {
            y = step(r, y);
            k += 1;
            r = r0 + k as f64 * h;
        }
        // final partial step to land on the sample
        let dh = next - r;
        let mut yy = y;
        if dh > 1e-15 {
            let k1 = rhs(r, yy);
            let k2 = rhs(r + dh / 2.0, [yy[0] + dh / 2.0 * k1[0], yy[1] + dh / 2.0 * k1[1]]);
            let k3 = rhs(r + dh / 2.0, [yy[0] + dh / 2.0 * k2[0], yy[1] + dh / 2.0 * k2[1]]);
            let k4 = rhs(r + dh, [yy[0] + dh * k3[0], yy[1] + dh * k3[1]]);
            yy = [
                yy[0] + dh / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
                yy[1] + dh / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
            ];
        }
        out.push((next, yy[0]));
        next += h_out;
    }
    out
}

/// Least-squares slope of `y` against `x`.
pub fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Equivariant vortex-like sector field on the unit disk, 8 free rings by 8
/// columns, plus uniform noise of size 0.2 on the free rings.
pub fn random_sector(seed: u64, d: i64) -> PolarField {
    let class = SymmetryClass::new(d, Sign::Plus).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // a vortex-like equivariant base plus independent nodal noise
    let mut u = PolarField::sector(class, uniform_radii(1.0, 9), 8, |r, t| {
        Vec2::from_polar(r / (1.0 + r * r).sqrt(), d as f64 * t)
    });
    for i in 1..u.nrings() - 1 {
        for j in 0..u.ntheta() {
            let noise = Vec2::new(rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2));
            let v = u.node(i, j) + noise;
            u.set(i, j, v);
        }
    }
    u
}

/// Largest relative gap between the analytic gradient and central
/// differences with step `h`, relative to `max(|g|, 1e-3)`.
pub fn max_relative_error(u: &PolarField, delta: f64, h: f64) -> f64 {
    let g = energy_gradient(u, delta).unwrap();
    let x = u.free_dofs();
    let mut worst = 0.0f64;
    for k in 0..x.len() {
        let mut v = u.clone();
        let mut xp = x.clone();
        xp[k] += h;
        v.set_free_dofs(&xp);
        let ep = energy_e(&v, delta).unwrap().total;
        xp[k] -= 2.0 * h;
        v.set_free_dofs(&xp);
        let em = energy_e(&v, delta).unwrap().total;
        let fd = (ep - em) / (2.0 * h);
        worst = worst.max((fd - g[k]).abs() / g[k].abs().max(1e-3));
    }
    worst
}

