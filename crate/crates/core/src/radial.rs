//! One-dimensional reductions: the scalar radial profile, the equivariant
//! degree-one profile, and the standard Ginzburg-Landau vortex.
//!
//! All three are instances of
//! `c (y'' + y'/r) + p(r) y - y^3 + q(r) = 0`
//! on a uniform grid, discretized by central differences with a ghost node
//! at the axis and solved by damped Newton iteration.

use crate::error::{Error, Result};
use crate::fields::{GridSpec, ModelParams, VectorField2};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialGrid {
    /// Zero for radial problems; `-S` for Painleve profiles.
    pub r_min: f64,
    pub r_max: f64,
    pub m: usize,
}

impl RadialGrid {
    pub fn new(r_max: f64, m: usize) -> Result<Self> {
        Self::interval(0.0, r_max, m)
    }

    pub fn interval(r_min: f64, r_max: f64, m: usize) -> Result<Self> {
        if m < 8 {
            return Err(Error::InvalidParams(format!("radial grid needs m >= 8, got {m}")));
        }
        if !(r_max > r_min) || !r_max.is_finite() || !r_min.is_finite() {
            return Err(Error::InvalidParams(format!("bad interval [{r_min}, {r_max}]")));
        }
        Ok(Self { r_min, r_max, m })
    }

    /// Grid reaching the corners of `grid` (and at least `rho + 3`), fine
    /// enough that interpolation onto the 2D nodes is far below the 2D
    /// discretization error.
    pub fn covering(params: &ModelParams, grid: &GridSpec) -> Result<Self> {
        let r_max = (params.rho + 3.0).max(std::f64::consts::SQRT_2 * grid.half_width + 0.05);
        let dr = grid.h().min(params.epsilon) / 8.0;
        Self::new(r_max, (r_max / dr).ceil() as usize + 1)
    }

    pub fn dr(&self) -> f64 {
        (self.r_max - self.r_min) / (self.m - 1) as f64
    }

    pub fn r(&self, k: usize) -> f64 {
        if k + 1 == self.m {
            self.r_max
        } else {
            self.r_min + k as f64 * self.dr()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileKind {
    Scalar,
    Equivariant,
    GlVortex,
    Painleve,
}

impl ProfileKind {
    pub fn name(&self) -> &'static str {
        match self {
            ProfileKind::Scalar => "scalar",
            ProfileKind::Equivariant => "equivariant",
            ProfileKind::GlVortex => "gl_vortex",
            ProfileKind::Painleve => "painleve",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RadialProfile {
    pub grid: RadialGrid,
    pub values: Vec<f64>,
    pub kind: ProfileKind,
    /// Value imposed at `r_min` (`None` for the symmetric axis condition).
    pub left_bc: Option<f64>,
    pub right_bc: f64,
    /// Sup norm of the discrete residual after each Newton step.
    pub newton_trace: Vec<f64>,
}

impl RadialProfile {
    pub fn residual(&self) -> f64 {
        self.newton_trace.last().copied().unwrap_or(f64::NAN)
    }

    /// Linear interpolation; `None` outside the grid.
    pub fn value_at(&self, r: f64) -> Option<f64> {
        let g = &self.grid;
        if !(r >= g.r_min && r <= g.r_max) {
            return None;
        }
        let t = (r - g.r_min) / g.dr();
        let k = (t.floor() as usize).min(g.m - 2);
        let w = t - k as f64;
        Some((1.0 - w) * self.values[k] + w * self.values[k + 1])
    }

    /// `y'(r_min)` for an odd profile, from `y = c1 r + c3 r^3 + ...`.
    pub fn slope_at_origin(&self) -> f64 {
        let dr = self.grid.dr();
        (8.0 * self.values[1] - self.values[2]) / (6.0 * dr)
    }

    fn value_or_outer(&self, r: f64) -> f64 {
        self.value_at(r).unwrap_or(self.right_bc)
    }

    /// `(y(|x|), 0)` on the 2D grid, boundary ring zero.
    pub fn inject_scalar(&self, grid: GridSpec) -> VectorField2 {
        VectorField2::from_fn(grid, |x| [self.value_or_outer(x[0].hypot(x[1])), 0.0])
    }

    /// `y(|x|) x/|x|` on the 2D grid, boundary ring zero.
    pub fn inject_equivariant(&self, grid: GridSpec) -> VectorField2 {
        VectorField2::from_fn(grid, |x| {
            let r = x[0].hypot(x[1]);
            if r == 0.0 {
                return [0.0, 0.0];
            }
            let y = self.value_or_outer(r);
            [y * x[0] / r, y * x[1] / r]
        })
    }
}

/// Solves `a x = d` for tridiagonal `a` with sub-diagonal `lo`, diagonal
/// `di`, super-diagonal `up` (`lo[0]` and `up[n-1]` unused).
pub(crate) fn solve_tridiagonal(lo: &[f64], di: &[f64], up: &[f64], d: &[f64]) -> Vec<f64> {
    let n = di.len();
    let mut c = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut beta = di[0];
    x[0] = d[0] / beta;
    for k in 1..n {
        c[k] = up[k - 1] / beta;
        beta = di[k] - lo[k] * c[k];
        x[k] = (d[k] - lo[k] * x[k - 1]) / beta;
    }
    for k in (0..n - 1).rev() {
        x[k] -= c[k + 1] * x[k + 1];
    }
    x
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Axis {
    Even,
    Odd,
}

struct RadialProblem {
    c: f64,
    p: Vec<f64>,
    q: Vec<f64>,
    axis: Axis,
    dr: f64,
    r: Vec<f64>,
}

impl RadialProblem {
    fn first(&self) -> usize {
        match self.axis {
            Axis::Even => 0,
            Axis::Odd => 1,
        }
    }

    /// Residual at the unknown nodes `first..m-1`.
    fn residual(&self, y: &[f64]) -> Vec<f64> {
        let m = y.len();
        let inv = 1.0 / (self.dr * self.dr);
        (self.first()..m - 1)
            .map(|k| {
                let lap = if k == 0 {
                    4.0 * (y[1] - y[0]) * inv
                } else {
                    (y[k + 1] - 2.0 * y[k] + y[k - 1]) * inv
                        + (y[k + 1] - y[k - 1]) / (2.0 * self.dr * self.r[k])
                };
                self.c * lap + self.p[k] * y[k] - y[k].powi(3) + self.q[k]
            })
            .collect()
    }

    fn newton(&self, y: &mut [f64], tol: f64) -> Result<Vec<f64>> {
        let m = y.len();
        let first = self.first();
        let inv = 1.0 / (self.dr * self.dr);
        let sup = |v: &[f64]| v.iter().fold(0.0_f64, |a, b| a.max(b.abs()));
        let mut f = self.residual(y);
        let mut trace = vec![sup(&f)];
        // rounding floor of the second difference on fine grids
        let floor = 16.0 * f64::EPSILON * self.c * inv * sup(y).max(1.0);
        let tol = tol.max(floor);
        for _ in 0..200 {
            if *trace.last().unwrap() <= tol {
                return Ok(trace);
            }
            let nu = m - 1 - first;
            let (mut lo, mut di, mut up) = (vec![0.0; nu], vec![0.0; nu], vec![0.0; nu]);
            for idx in 0..nu {
                let k = idx + first;
                di[idx] = self.p[k] - 3.0 * y[k] * y[k];
                if k == 0 {
                    di[idx] -= 4.0 * self.c * inv;
                    up[idx] = 4.0 * self.c * inv;
                } else {
                    let adv = 1.0 / (2.0 * self.dr * self.r[k]);
                    di[idx] -= 2.0 * self.c * inv;
                    lo[idx] = self.c * (inv - adv);
                    up[idx] = self.c * (inv + adv);
                }
            }
            let rhs: Vec<f64> = f.iter().map(|v| -v).collect();
            let step = solve_tridiagonal(&lo, &di, &up, &rhs);
            let current = *trace.last().unwrap();
            let mut t = 1.0;
            let mut accepted = false;
            for _ in 0..=30 {
                let mut trial = y.to_vec();
                for (idx, s) in step.iter().enumerate() {
                    trial[idx + first] += t * s;
                }
                let ft = self.residual(&trial);
                let rt = sup(&ft);
                if rt.is_finite() && rt < current {
                    y.copy_from_slice(&trial);
                    f = ft;
                    trace.push(rt);
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if !accepted {
                return Err(Error::NewtonDivergence {
                    reason: "no damped step reduced the residual".into(),
                    trace,
                });
            }
        }
        Err(Error::NewtonDivergence {
            reason: "iteration limit reached".into(),
            trace,
        })
    }
}

const NEWTON_TOL: f64 = 1e-10;

/// Positive root of `y^3 - mu y - g = 0` for `g >= 0` (zero when `g = 0`
/// and `mu <= 0`): the pointwise balance without the Laplacian.
fn pointwise_root(mu: f64, g: f64) -> f64 {
    if g <= 0.0 {
        return mu.max(0.0).sqrt();
    }
    let mut y = (mu.max(0.0).sqrt()).max(g.cbrt()).max(g / mu.abs().max(1e-300)).min(1e3);
    if mu < 0.0 {
        y = y.min(g / -mu).max(1e-300);
    }
    for _ in 0..100 {
        let f = y * y * y - mu * y - g;
        let d = 3.0 * y * y - mu;
        let next = y - f / d;
        if !(next > 0.0) {
            y *= 0.5;
            continue;
        }
        if (next - y).abs() <= 1e-15 * y {
            return next;
        }
        y = next;
    }
    y
}

fn check_model_grid(params: &ModelParams, grid: &RadialGrid) -> Result<()> {
    if grid.r_min != 0.0 || grid.r_max < params.rho + 3.0 {
        return Err(Error::InvalidParams(format!(
            "model profiles need r in [0, r_max] with r_max >= rho + 3 = {}",
            params.rho + 3.0
        )));
    }
    Ok(())
}

fn profile(
    grid: RadialGrid,
    values: Vec<f64>,
    kind: ProfileKind,
    left_bc: Option<f64>,
    trace: Vec<f64>,
) -> RadialProfile {
    let right_bc = *values.last().unwrap();
    RadialProfile {
        grid,
        values,
        kind,
        left_bc,
        right_bc,
        newton_trace: trace,
    }
}

/// Positive solution of `eps^2 (y'' + y'/r) + mu_rad y - y^3 = 0`,
/// `y'(0) = 0`, `y(r_max) = 0`. The forcing strength is ignored.
pub fn solve_scalar_radial(params: &ModelParams, grid: &RadialGrid) -> Result<RadialProfile> {
    check_model_grid(params, grid)?;
    let m = grid.m;
    let r: Vec<f64> = (0..m).map(|k| grid.r(k)).collect();
    let eps = params.epsilon;
    let prob = RadialProblem {
        c: eps * eps,
        p: r.iter().map(|&r| params.mu_rad(r)).collect(),
        q: vec![0.0; m],
        axis: Axis::Even,
        dr: grid.dr(),
        r: r.clone(),
    };
    // Thomas-Fermi guess with an exponential tail past the interface
    let tail = eps.cbrt() * (-params.mu1).sqrt();
    let mut y: Vec<f64> = r
        .iter()
        .map(|&r| {
            let tf = params.mu_rad(r).max(0.0).sqrt();
            tf.max(0.5 * tail * (-(r - params.rho).max(0.0) / eps.powf(2.0 / 3.0)).exp())
        })
        .collect();
    y[m - 1] = 0.0;
    let trace = prob.newton(&mut y, NEWTON_TOL)?;
    Ok(profile(*grid, y, ProfileKind::Scalar, None, trace))
}

/// Degree-one profile: `eps^2 (y'' + y'/r - y/r^2) + mu_rad y - y^3
/// + eps a f_rad = 0`, `y(0) = 0`, `y(r_max) = -eps a f_rad/mu_rad`.
pub fn solve_equivariant_radial(params: &ModelParams, grid: &RadialGrid) -> Result<RadialProfile> {
    check_model_grid(params, grid)?;
    let m = grid.m;
    let r: Vec<f64> = (0..m).map(|k| grid.r(k)).collect();
    let eps = params.epsilon;
    let force = |r: f64| eps * params.a * params.f_rad(r);
    let prob = RadialProblem {
        c: eps * eps,
        p: r
            .iter()
            .map(|&r| if r > 0.0 { params.mu_rad(r) - eps * eps / (r * r) } else { 0.0 })
            .collect(),
        q: r.iter().map(|&r| force(r)).collect(),
        axis: Axis::Odd,
        dr: grid.dr(),
        r: r.clone(),
    };
    let tail = eps.cbrt() * (-params.mu1).sqrt();
    let mut y: Vec<f64> = r
        .iter()
        .map(|&r| {
            let core = r / (r * r + 2.0 * eps * eps).sqrt();
            let base = pointwise_root(params.mu_rad(r), force(r));
            let t = 0.5 * tail * (-(r - params.rho).max(0.0) / eps.powf(2.0 / 3.0)).exp();
            core * base.max(t)
        })
        .collect();
    y[0] = 0.0;
    y[m - 1] = -force(grid.r_max) / params.mu_rad(grid.r_max);
    let trace = prob.newton(&mut y, NEWTON_TOL)?;
    Ok(profile(*grid, y, ProfileKind::Equivariant, Some(0.0), trace))
}

/// Standard vortex `eta'' + eta'/r - eta/r^2 + (1 - eta^2) eta = 0`,
/// `eta(0) = 0`, `eta(r_max) = 1 - 1/(2 r_max^2) - 9/(8 r_max^4)`.
pub fn solve_gl_vortex(grid: &RadialGrid) -> Result<RadialProfile> {
    if grid.r_min != 0.0 || grid.r_max < 20.0 {
        return Err(Error::InvalidParams("vortex profile needs r in [0, r_max], r_max >= 20".into()));
    }
    let m = grid.m;
    let r: Vec<f64> = (0..m).map(|k| grid.r(k)).collect();
    let prob = RadialProblem {
        c: 1.0,
        p: r.iter().map(|&r| if r > 0.0 { 1.0 - 1.0 / (r * r) } else { 0.0 }).collect(),
        q: vec![0.0; m],
        axis: Axis::Odd,
        dr: grid.dr(),
        r: r.clone(),
    };
    let mut y: Vec<f64> = r.iter().map(|&r| r / (r * r + 2.0).sqrt()).collect();
    let rm = grid.r_max;
    y[m - 1] = 1.0 - 1.0 / (2.0 * rm * rm) - 9.0 / (8.0 * rm.powi(4));
    let trace = prob.newton(&mut y, NEWTON_TOL)?;
    Ok(profile(*grid, y, ProfileKind::GlVortex, Some(0.0), trace))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiagonal_solver_matches_dense_product() {
        let n = 9;
        let lo: Vec<f64> = (0..n).map(|k| 0.3 + k as f64 * 0.1).collect();
        let up: Vec<f64> = (0..n).map(|k| -0.2 + k as f64 * 0.05).collect();
        let di: Vec<f64> = (0..n).map(|k| 3.0 + k as f64).collect();
        let x: Vec<f64> = (0..n).map(|k| (k as f64).sin()).collect();
        let d: Vec<f64> = (0..n)
            .map(|k| {
                let mut s = di[k] * x[k];
                if k > 0 {
                    s += lo[k] * x[k - 1];
                }
                if k + 1 < n {
                    s += up[k] * x[k + 1];
                }
                s
            })
            .collect();
        let back = solve_tridiagonal(&lo, &di, &up, &d);
        for (a, b) in x.iter().zip(&back) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn pointwise_root_solves_cubic() {
        for (mu, g) in [(0.5, 0.0), (-0.3, 0.0), (0.4, 0.01), (-0.4, 0.02), (0.0, 1e-3)] {
            let y = pointwise_root(mu, g);
            assert!(y >= 0.0);
            assert!((y * y * y - mu * y - g).abs() < 1e-14, "{mu} {g} {y}");
        }
    }

    #[test]
    fn scalar_profile_positive_and_decreasing_outside() {
        let p = ModelParams::new(0.05, 0.0, 0.5).unwrap();
        let g = RadialGrid::new(p.rho + 3.0, 4001).unwrap();
        let prof = solve_scalar_radial(&p, &g).unwrap();
        assert!(prof.residual() <= 1e-10);
        let y0 = prof.values[0];
        assert!(y0 >= 0.9 * 0.5f64.sqrt() && y0 <= 0.5f64.sqrt());
        for k in 0..g.m - 1 {
            assert!(prof.values[k] > 0.0);
            if g.r(k) >= p.rho {
                assert!(prof.values[k + 1] < prof.values[k]);
            }
        }
    }

    #[test]
    fn equivariant_outer_value() {
        let p = ModelParams::new(0.1, 1.0, 0.5).unwrap();
        let g = RadialGrid::new(p.rho + 3.0, 4001).unwrap();
        let prof = solve_equivariant_radial(&p, &g).unwrap();
        assert!(prof.residual() <= 1e-10);
        assert_eq!(prof.values[0], 0.0);
        assert!(prof.values[1..].iter().all(|&v| v > 0.0));
        let rm = g.r_max;
        let expect = -p.a * p.f_rad(rm) / p.mu_rad(rm);
        assert!((prof.values[g.m - 1] / p.epsilon - expect).abs() < 1e-12);
    }

    #[test]
    fn gl_vortex_monotone() {
        let g = RadialGrid::new(25.0, 5001).unwrap();
        let eta = solve_gl_vortex(&g).unwrap();
        assert_eq!(eta.values[0], 0.0);
        assert!(eta.values.windows(2).all(|w| w[1] > w[0]));
        assert!((eta.values[g.m - 1] - (1.0 - 0.5 / 625.0)).abs() < 1e-3);
        assert!(eta.slope_at_origin() > 0.5 && eta.slope_at_origin() < 0.7);
    }

    #[test]
    fn grids_are_validated() {
        let p = ModelParams::new(0.05, 0.0, 0.5).unwrap();
        assert!(solve_scalar_radial(&p, &RadialGrid::new(2.0, 100).unwrap()).is_err());
        assert!(solve_gl_vortex(&RadialGrid::new(10.0, 100).unwrap()).is_err());
        assert!(RadialGrid::new(1.0, 3).is_err());
    }
}
