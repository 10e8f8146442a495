//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use glnematic::fields::{GridSpec, VectorField2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `Ai(z)` and `Ai'(z)` for large positive `z` from the asymptotic series.
pub fn airy_large(z: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * z.powf(1.5);
    let pre = (-zeta).exp() / (2.0 * std::f64::consts::PI.sqrt());
    let (mut u, mut su, mut sv) = (1.0, 1.0, 1.0);
    for k in 1..20 {
        let kf = k as f64;
        u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
        let v = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let zk = zeta.powi(k);
        su += sign * u / zk;
        sv += sign * v / zk;
        if u / zk < 1e-18 {
            break;
        }
    }
    (pre / z.powf(0.25) * su, -pre * z.powf(0.25) * sv)
}

/// Dormand-Prince 5(4) with step control, integrating `y' = f(t, y)` from
/// `t0` to `t1` (either direction).
pub fn dopri5(
    f: impl Fn(f64, [f64; 2]) -> [f64; 2],
    t0: f64,
    y0: [f64; 2],
    t1: f64,
    tol: f64,
) -> [f64; 2] {
    const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
    const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];
    let dir = (t1 - t0).signum();
    let mut t = t0;
    let mut y = y0;
    let mut h = 1e-3 * dir;
    while (t1 - t) * dir > 0.0 {
        if (t + h - t1) * dir > 0.0 {
            h = t1 - t;
        }
        let mut k = [[0.0; 2]; 7];
        for s in 0..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                for c in 0..2 {
                    ys[c] += h * A[s][j] * kj[c];
                }
            }
            k[s] = f(t + C[s] * h, ys);
        }
        let mut y5 = y;
        let mut err = 0.0_f64;
        for c in 0..2 {
            let (mut d5, mut d4) = (0.0, 0.0);
            for s in 0..7 {
                d5 += B5[s] * k[s][c];
                d4 += B4[s] * k[s][c];
            }
            y5[c] += h * d5;
            err = err.max((h * (d5 - d4)).abs() / (tol * (1.0 + y5[c].abs())));
        }
        if err <= 1.0 {
            t += h;
            y = y5;
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
    }
    y
}

/// `y(0)` of the Hastings-McLeod-type solution of `y'' = s y + 2 y^3`
/// with Airy decay, by backward shooting from `s = 8`.
pub fn p2_shooting_y0() -> f64 {
    let (ai, aip) = airy_large(8.0);
    let y = dopri5(|s, y| [y[1], s * y[0] + 2.0 * y[0].powi(3)], 8.0, [ai, aip], 0.0, 1e-13);
    y[0]
}

/// Smooth random field vanishing on the boundary: a sum of Gaussian bumps
/// with random centers, widths and vector amplitudes.
pub fn random_smooth_field(grid: GridSpec, rng: &mut ChaCha8Rng, bumps: usize) -> VectorField2 {
    let l = grid.half_width;
    let spec: Vec<([f64; 2], f64, [f64; 2])> = (0..bumps)
        .map(|_| {
            (
                [rng.gen_range(-0.6 * l..0.6 * l), rng.gen_range(-0.6 * l..0.6 * l)],
                rng.gen_range(0.1 * l..0.3 * l),
                [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)],
            )
        })
        .collect();
    VectorField2::from_fn(grid, |x| {
        let mut v = [0.0; 2];
        for (c, w, a) in &spec {
            let d2 = ((x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2)) / (w * w);
            let g = (-d2).exp();
            v[0] += a[0] * g;
            v[1] += a[1] * g;
        }
        v
    })
}

/// Field with iid uniform values in `[-amp, amp]` and zero boundary.
pub fn random_rough_field(grid: GridSpec, rng: &mut ChaCha8Rng, amp: f64) -> VectorField2 {
    let mut f = VectorField2::zeros(grid);
    for j in 1..grid.n - 1 {
        for i in 1..grid.n - 1 {
            let k = j * grid.n + i;
            f.u1[k] = rng.gen_range(-amp..amp);
            f.u2[k] = rng.gen_range(-amp..amp);
        }
    }
    f
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
