//! Shared descent engine for grid energies of the form
//!
//! `E(u) = sum_edges |du|^2/2 + sum_interior [A |u|^2/2 + B |u|^4/4 + F.u]`
//!
//! with Dirichlet data on the boundary ring. Both the Ginzburg-Landau energy
//! and the Painleve strip functional have this shape. Along any line the
//! energy is a quartic polynomial in the step, which gives exact line
//! searches and cancellation-free energy decrements.

use rayon::prelude::*;

use crate::fields::ordered_row_sum;
use crate::precond::ShiftedLaplacian;

pub(crate) struct QuarticFunctional {
    pub nx: usize,
    pub ny: usize,
    /// `A` per node.
    pub quad: Vec<f64>,
    /// `B`, uniform.
    pub quartic: f64,
    /// `F` per node and component.
    pub lin: [Vec<f64>; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepRule {
    /// Preconditioned gradient flow with a fixed step, halved whenever a step
    /// would raise the energy.
    Fixed,
    /// Barzilai-Borwein step with Armijo backtracking.
    AdaptiveBacktracking,
    /// Polak-Ribiere+ conjugate gradient with exact quartic line search.
    NonlinearCg,
}

pub(crate) struct DescentSettings {
    pub max_iters: usize,
    pub tol: f64,
    /// Converts the raw gradient to the reported residual.
    pub residual_scale: f64,
    pub step_rule: StepRule,
    pub fixed_step: f64,
    pub precond_shift: f64,
    /// Component clamp bound and period, if any.
    pub truncation: Option<(f64, usize)>,
}

pub(crate) struct DescentOutcome {
    pub energy_trace: Vec<f64>,
    pub residual_sup: f64,
    pub iters: usize,
    pub converged: bool,
}

impl QuarticFunctional {
    pub fn energy(&self, u: &[Vec<f64>; 2]) -> f64 {
        let (nx, ny) = (self.nx, self.ny);
        let [s] = ordered_row_sum(0..ny, |j| {
            let row = j * nx;
            let mut grad = 0.0;
            for c in u {
                for i in 0..nx - 1 {
                    let d = c[row + i + 1] - c[row + i];
                    grad += d * d;
                }
                if j + 1 < ny {
                    for i in 0..nx {
                        let d = c[row + i + nx] - c[row + i];
                        grad += d * d;
                    }
                }
            }
            let mut s = 0.5 * grad;
            if j > 0 && j + 1 < ny {
                for i in 1..nx - 1 {
                    let k = row + i;
                    let m2 = u[0][k] * u[0][k] + u[1][k] * u[1][k];
                    s += 0.5 * self.quad[k] * m2
                        + 0.25 * self.quartic * m2 * m2
                        + self.lin[0][k] * u[0][k]
                        + self.lin[1][k] * u[1][k];
                }
            }
            [s]
        });
        s
    }

    /// Gradient at interior nodes; boundary entries are zero.
    pub fn gradient(&self, u: &[Vec<f64>; 2], g: &mut [Vec<f64>; 2]) {
        let nx = self.nx;
        let ny = self.ny;
        let [g1, g2] = g;
        g1.par_chunks_mut(nx)
            .zip(g2.par_chunks_mut(nx))
            .enumerate()
            .for_each(|(j, (r1, r2))| {
                if j == 0 || j + 1 == ny {
                    r1.iter_mut().for_each(|v| *v = 0.0);
                    r2.iter_mut().for_each(|v| *v = 0.0);
                    return;
                }
                r1[0] = 0.0;
                r2[0] = 0.0;
                r1[nx - 1] = 0.0;
                r2[nx - 1] = 0.0;
                let (a, b) = (&u[0], &u[1]);
                for i in 1..nx - 1 {
                    let k = j * nx + i;
                    let lap1 = a[k - 1] + a[k + 1] + a[k - nx] + a[k + nx] - 4.0 * a[k];
                    let lap2 = b[k - 1] + b[k + 1] + b[k - nx] + b[k + nx] - 4.0 * b[k];
                    let m2 = a[k] * a[k] + b[k] * b[k];
                    let w = self.quad[k] + self.quartic * m2;
                    r1[i] = -lap1 + w * a[k] + self.lin[0][k];
                    r2[i] = -lap2 + w * b[k] + self.lin[1][k];
                }
            });
    }

    /// Coefficients `[c1, c2, c3, c4]` with `E(u + t d) - E(u) = sum c_k t^k`.
    /// `d` must vanish on the boundary ring.
    pub fn line_poly(&self, u: &[Vec<f64>; 2], d: &[Vec<f64>; 2]) -> [f64; 4] {
        let (nx, ny) = (self.nx, self.ny);
        ordered_row_sum(0..ny, |j| {
            let row = j * nx;
            let mut c = [0.0; 4];
            for (uc, dc) in u.iter().zip(d) {
                for i in 0..nx - 1 {
                    let k = row + i;
                    let du = uc[k + 1] - uc[k];
                    let dd = dc[k + 1] - dc[k];
                    c[0] += du * dd;
                    c[1] += 0.5 * dd * dd;
                }
                if j + 1 < ny {
                    for i in 0..nx {
                        let k = row + i;
                        let du = uc[k + nx] - uc[k];
                        let dd = dc[k + nx] - dc[k];
                        c[0] += du * dd;
                        c[1] += 0.5 * dd * dd;
                    }
                }
            }
            if j > 0 && j + 1 < ny {
                let b = self.quartic;
                for i in 1..nx - 1 {
                    let k = row + i;
                    let (u1, u2, d1, d2) = (u[0][k], u[1][k], d[0][k], d[1][k]);
                    let p = u1 * d1 + u2 * d2;
                    let q = d1 * d1 + d2 * d2;
                    let s = u1 * u1 + u2 * u2;
                    let a = self.quad[k];
                    c[0] += a * p + b * s * p + self.lin[0][k] * d1 + self.lin[1][k] * d2;
                    c[1] += 0.5 * a * q + b * (0.5 * s * q + p * p);
                    c[2] += b * p * q;
                    c[3] += 0.25 * b * q * q;
                }
            }
            c
        })
    }

    /// Exact energy change from clamping components to `[-m, m]`; returns
    /// the change and whether any node moved.
    pub fn truncate(&self, u: &mut [Vec<f64>; 2], m: f64) -> (f64, bool) {
        let nx = self.nx;
        let mut clamped = vec![false; u[0].len()];
        let old = [u[0].clone(), u[1].clone()];
        let mut any = false;
        for c in u.iter_mut() {
            for (k, v) in c.iter_mut().enumerate() {
                let w = v.clamp(-m, m);
                if w != *v {
                    *v = w;
                    clamped[k] = true;
                    any = true;
                }
            }
        }
        if !any {
            return (0.0, false);
        }
        let mut delta = 0.0;
        let edge = |k: usize, l: usize, delta: &mut f64| {
            if clamped[k] || clamped[l] {
                for c in 0..2 {
                    let new = u[c][l] - u[c][k];
                    let prev = old[c][l] - old[c][k];
                    *delta += 0.5 * (new - prev) * (new + prev);
                }
            }
        };
        for j in 0..self.ny {
            for i in 0..nx {
                let k = j * nx + i;
                if i + 1 < nx {
                    edge(k, k + 1, &mut delta);
                }
                if j + 1 < self.ny {
                    edge(k, k + nx, &mut delta);
                }
                let interior = i > 0 && j > 0 && i + 1 < nx && j + 1 < self.ny;
                if clamped[k] && interior {
                    let pot = |a: f64, b: f64| {
                        let m2 = a * a + b * b;
                        0.5 * self.quad[k] * m2
                            + 0.25 * self.quartic * m2 * m2
                            + self.lin[0][k] * a
                            + self.lin[1][k] * b
                    };
                    delta += pot(u[0][k], u[1][k]) - pot(old[0][k], old[1][k]);
                }
            }
        }
        (delta, true)
    }

    fn sup_modulus(&self, g: &[Vec<f64>; 2]) -> f64 {
        g[0].iter()
            .zip(&g[1])
            .map(|(a, b)| a.hypot(*b))
            .fold(0.0, f64::max)
    }

    /// Minimizes from `u` in place. The recorded energy trace is built from
    /// exact per-step decrements and is nonincreasing.
    pub fn descend(&self, u: &mut [Vec<f64>; 2], set: &DescentSettings) -> DescentOutcome {
        let len = self.nx * self.ny;
        let pre = ShiftedLaplacian::new(self.nx, self.ny, set.precond_shift);
        let mut g = [vec![0.0; len], vec![0.0; len]];
        let mut z = [vec![0.0; len], vec![0.0; len]];
        let mut d = [vec![0.0; len], vec![0.0; len]];
        let mut g_prev = [vec![0.0; len], vec![0.0; len]];
        let mut zg_prev = 0.0;
        let mut have_prev = false;
        let mut step_prev = 0.0;
        let mut fixed_step = set.fixed_step;

        let mut energy = self.energy(u);
        let mut trace = vec![energy];
        let mut iters = 0;
        let mut stalls = 0;

        loop {
            self.gradient(u, &mut g);
            let residual = self.sup_modulus(&g) * set.residual_scale;
            if residual <= set.tol {
                return DescentOutcome {
                    energy_trace: trace,
                    residual_sup: residual,
                    iters,
                    converged: true,
                };
            }
            if iters >= set.max_iters || stalls >= 5 {
                return DescentOutcome {
                    energy_trace: trace,
                    residual_sup: residual,
                    iters,
                    converged: false,
                };
            }
            pre.solve(&g[0], &mut z[0]);
            pre.solve(&g[1], &mut z[1]);
            let zg = dot(&z, &g);

            // preconditioned BB1 step from the previous direction, s = t d
            let bb = if set.step_rule == StepRule::AdaptiveBacktracking && have_prev {
                let dy = dot(&d, &g) - dot(&d, &g_prev);
                (dy > 0.0).then(|| step_prev * zg_prev / dy)
            } else {
                None
            };

            // search direction
            let mut restart = true;
            if set.step_rule == StepRule::NonlinearCg && have_prev {
                let zy = dot(&z, &g) - dot(&z, &g_prev);
                let beta = (zy / zg_prev).max(0.0);
                if beta.is_finite() {
                    for c in 0..2 {
                        for k in 0..len {
                            d[c][k] = -z[c][k] + beta * d[c][k];
                        }
                    }
                    restart = dot(&d, &g) >= 0.0;
                }
            }
            if restart {
                for c in 0..2 {
                    for k in 0..len {
                        d[c][k] = -z[c][k];
                    }
                }
            }

            let poly = self.line_poly(u, &d);
            if poly[0] >= 0.0 {
                // gradient below roundoff in the preconditioned metric
                stalls += 1;
                have_prev = false;
                continue;
            }
            let step = match set.step_rule {
                StepRule::NonlinearCg => quartic_argmin(&poly),
                StepRule::AdaptiveBacktracking => {
                    let mut t = match bb {
                        Some(t) if t.is_finite() && t > 0.0 => t,
                        _ => quartic_argmin(&poly).unwrap_or(1.0),
                    };
                    let mut accepted = None;
                    for _ in 0..40 {
                        if eval_poly(&poly, t) <= 1e-4 * t * poly[0] {
                            accepted = Some(t);
                            break;
                        }
                        t *= 0.5;
                    }
                    accepted
                }
                StepRule::Fixed => {
                    let mut t = fixed_step;
                    let mut accepted = None;
                    for _ in 0..40 {
                        if eval_poly(&poly, t) <= 0.0 {
                            accepted = Some(t);
                            break;
                        }
                        t *= 0.5;
                        fixed_step = t;
                    }
                    accepted
                }
            };
            let Some(t) = step else {
                stalls += 1;
                have_prev = false;
                continue;
            };
            let de = eval_poly(&poly, t);
            if !(de <= 0.0) || t <= 0.0 {
                stalls += 1;
                have_prev = false;
                continue;
            }
            stalls = 0;
            for c in 0..2 {
                u[c].par_iter_mut().zip(&d[c]).for_each(|(v, dv)| *v += t * dv);
            }
            energy += de;
            trace.push(energy);
            iters += 1;
            std::mem::swap(&mut g_prev, &mut g);
            zg_prev = zg;
            step_prev = t;
            have_prev = true;

            if let Some((m, every)) = set.truncation {
                if every > 0 && iters % every == 0 {
                    let (delta, moved) = self.truncate(u, m);
                    if moved {
                        energy += delta;
                        trace.push(energy);
                        have_prev = false;
                    }
                }
            }
        }
    }
}

pub(crate) fn dot(a: &[Vec<f64>; 2], b: &[Vec<f64>; 2]) -> f64 {
    let mut s = 0.0;
    for c in 0..2 {
        s += a[c]
            .par_chunks(4096)
            .zip(b[c].par_chunks(4096))
            .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>())
            .collect::<Vec<f64>>()
            .into_iter()
            .sum::<f64>();
    }
    s
}

pub(crate) fn eval_poly(c: &[f64; 4], t: f64) -> f64 {
    t * (c[0] + t * (c[1] + t * (c[2] + t * c[3])))
}

/// Global minimizer over `t > 0` of `c1 t + c2 t^2 + c3 t^3 + c4 t^4`
/// for `c1 < 0`; `None` when the polynomial is unbounded below.
pub(crate) fn quartic_argmin(c: &[f64; 4]) -> Option<f64> {
    let [c1, c2, c3, c4] = *c;
    let deriv = |t: f64| c1 + t * (2.0 * c2 + t * (3.0 * c3 + t * 4.0 * c4));
    if c4 <= 0.0 {
        if c3 == 0.0 && c4 == 0.0 && c2 > 0.0 {
            return Some(-c1 / (2.0 * c2));
        }
        return None;
    }
    // the derivative is monotone between the roots of its own derivative
    let mut knots = vec![0.0];
    let (qa, qb, qc) = (12.0 * c4, 6.0 * c3, 2.0 * c2);
    let disc = qb * qb - 4.0 * qa * qc;
    if disc >= 0.0 {
        let sq = disc.sqrt();
        let q = -0.5 * (qb + qb.signum() * sq);
        let mut roots = vec![];
        if q != 0.0 {
            roots.push(q / qa);
            roots.push(qc / q);
        } else {
            roots.push(0.0);
        }
        roots.retain(|r| r.is_finite() && *r > 0.0);
        roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        knots.extend(roots);
    }
    let bound = 1.0 + (c1.abs().max(c2.abs()).max(c3.abs()) / c4) * 2.0;
    let mut hi = bound;
    while deriv(hi) <= 0.0 {
        hi *= 2.0;
    }
    knots.push(hi);
    let mut best: Option<(f64, f64)> = None;
    for w in knots.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        let (fa, fb) = (deriv(a), deriv(b));
        if !(fa < 0.0 && fb >= 0.0) {
            continue;
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if deriv(m) < 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        let t = 0.5 * (a + b);
        let v = eval_poly(c, t);
        if best.map_or(true, |(_, bv)| v < bv) {
            best = Some((t, v));
        }
    }
    best.map(|(t, _)| t)
}
