//! Painleve-II boundary layers: the 1D branches `y''- s y - 2 y^3 - alpha = 0`,
//! the 2D generalization on a strip, and rescaled windows of 2D minimizers
//! around a point of the interface circle.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fields::{ModelParams, Point, VectorField2};
use crate::functional::{DescentSettings, QuarticFunctional, StepRule};
use crate::radial::{solve_tridiagonal, ProfileKind, RadialGrid, RadialProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// Grows like `+sqrt(|s|/2)` at `-infinity`.
    Plus,
    /// Grows like `-sqrt(|s|/2)` at `-infinity`.
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum P2Scheme {
    /// Fourth-order compact scheme.
    Numerov,
    /// Three-point second-order scheme, matching the 2D five-point stencil.
    Central,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PainleveSpec {
    pub alpha: f64,
    pub branch: Branch,
    /// Half-length `S` of the interval `[-S, S]`.
    pub s_half: f64,
    pub m: usize,
    pub scheme: P2Scheme,
}

impl PainleveSpec {
    pub fn new(alpha: f64, branch: Branch, s_half: f64, m: usize) -> Result<Self> {
        if !(s_half >= 8.0) {
            return Err(Error::InvalidParams(format!("S must be at least 8, got {s_half}")));
        }
        if m < 400 {
            return Err(Error::InvalidParams(format!("need m >= 400 nodes, got {m}")));
        }
        if !alpha.is_finite() {
            return Err(Error::InvalidParams("alpha must be finite".into()));
        }
        Ok(Self {
            alpha,
            branch,
            s_half,
            m,
            scheme: P2Scheme::Numerov,
        })
    }
}

/// Real root of `2 y^3 + s y + alpha = 0` nearest to `guess`.
fn outer_root(s: f64, alpha: f64, guess: f64) -> f64 {
    let mut y = guess;
    for _ in 0..100 {
        let f = 2.0 * y * y * y + s * y + alpha;
        let d = 6.0 * y * y + s;
        if d == 0.0 {
            break;
        }
        let next = y - f / d;
        if (next - y).abs() <= 1e-16 * (1.0 + y.abs()) {
            return next;
        }
        y = next;
    }
    y
}

/// Boundary values `(y(-S), y(S))`: the outer balances `-s y - 2 y^3 = alpha`.
pub fn p2_boundary_values(alpha: f64, branch: Branch, s_half: f64) -> (f64, f64) {
    let sign = match branch {
        Branch::Plus => 1.0,
        Branch::Minus => -1.0,
    };
    let left = outer_root(-s_half, alpha, sign * (s_half / 2.0).sqrt());
    // y^3 + S y/2 + alpha/2 is increasing, so its real root is unique
    let right = outer_root(s_half, alpha, -alpha / s_half);
    (left, right)
}

fn g(s: f64, y: f64, alpha: f64) -> f64 {
    s * y + 2.0 * y * y * y + alpha
}

fn dg(s: f64, y: f64) -> f64 {
    s + 6.0 * y * y
}

/// Residual (already divided by `h^2`) at interior nodes.
fn p2_residual(s: &[f64], y: &[f64], alpha: f64, h: f64, scheme: P2Scheme) -> Vec<f64> {
    let m = y.len();
    let inv = 1.0 / (h * h);
    (1..m - 1)
        .map(|k| {
            let d2 = (y[k + 1] - 2.0 * y[k] + y[k - 1]) * inv;
            match scheme {
                P2Scheme::Numerov => {
                    d2 - (g(s[k + 1], y[k + 1], alpha)
                        + 10.0 * g(s[k], y[k], alpha)
                        + g(s[k - 1], y[k - 1], alpha))
                        / 12.0
                }
                P2Scheme::Central => d2 - g(s[k], y[k], alpha),
            }
        })
        .collect()
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |a, b| a.max(b.abs()))
}

/// Damped Newton for the Dirichlet problem; `y` holds the guess and the
/// boundary values on entry.
fn p2_newton(s: &[f64], y: &mut [f64], alpha: f64, h: f64, scheme: P2Scheme, tol: f64) -> Result<Vec<f64>> {
    let m = y.len();
    let inv = 1.0 / (h * h);
    let mut f = p2_residual(s, y, alpha, h, scheme);
    let mut trace = vec![sup(&f)];
    for _ in 0..200 {
        let current = *trace.last().unwrap();
        if current <= tol {
            return Ok(trace);
        }
        let nu = m - 2;
        let (mut lo, mut di, mut up) = (vec![0.0; nu], vec![0.0; nu], vec![0.0; nu]);
        for idx in 0..nu {
            let k = idx + 1;
            match scheme {
                P2Scheme::Numerov => {
                    lo[idx] = inv - dg(s[k - 1], y[k - 1]) / 12.0;
                    di[idx] = -2.0 * inv - 10.0 * dg(s[k], y[k]) / 12.0;
                    up[idx] = inv - dg(s[k + 1], y[k + 1]) / 12.0;
                }
                P2Scheme::Central => {
                    lo[idx] = inv;
                    di[idx] = -2.0 * inv - dg(s[k], y[k]);
                    up[idx] = inv;
                }
            }
        }
        let rhs: Vec<f64> = f.iter().map(|v| -v).collect();
        let step = solve_tridiagonal(&lo, &di, &up, &rhs);
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..=30 {
            let mut trial = y.to_vec();
            for (idx, d) in step.iter().enumerate() {
                trial[idx + 1] += t * d;
            }
            let ft = p2_residual(s, &trial, alpha, h, scheme);
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

const P2_TOL: f64 = 1e-10;

/// Solves on the nodes `s` with Dirichlet values `left`, `right`, starting
/// from the plus/minus branch at `alpha = 0` and continuing in `alpha`.
fn solve_dirichlet(
    s: &[f64],
    alpha: f64,
    branch: Branch,
    boundary: impl Fn(f64) -> (f64, f64),
    scheme: P2Scheme,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let m = s.len();
    let h = (s[m - 1] - s[0]) / (m - 1) as f64;
    let sign = match branch {
        Branch::Plus => 1.0,
        Branch::Minus => -1.0,
    };
    // smooth guess with the right growth at -infinity and decay at +infinity
    let mut y: Vec<f64> = s
        .iter()
        .map(|&s| sign * (((s * s + 1.0).sqrt() - s) / 4.0).sqrt())
        .collect();
    let steps = if alpha == 0.0 {
        1
    } else {
        (alpha.abs() / 0.05).ceil().max(1.0) as usize + 1
    };
    let mut trace = vec![];
    for k in 0..steps {
        let a = if steps == 1 { alpha } else { alpha * k as f64 / (steps - 1) as f64 };
        let (l, r) = boundary(a);
        y[0] = l;
        y[m - 1] = r;
        trace = p2_newton(s, &mut y, a, h, scheme, P2_TOL)?;
    }
    Ok((y, trace))
}

/// Branch `y+` or `y-` on `[-S, S]`. The residual reported in the trace is
/// the scheme's equation divided by `h^2`.
pub fn solve_p2(spec: &PainleveSpec) -> Result<RadialProfile> {
    let grid = RadialGrid::interval(-spec.s_half, spec.s_half, spec.m)?;
    let s: Vec<f64> = (0..spec.m).map(|k| grid.r(k)).collect();
    let (y, trace) = solve_dirichlet(
        &s,
        spec.alpha,
        spec.branch,
        |a| p2_boundary_values(a, spec.branch, spec.s_half),
        spec.scheme,
    )?;
    Ok(RadialProfile {
        left_bc: Some(y[0]),
        right_bc: y[spec.m - 1],
        grid,
        values: y,
        kind: ProfileKind::Painleve,
        newton_trace: trace,
    })
}

/// Which part of the window to sample and at what resolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowSpec {
    pub s1_range: (f64, f64),
    pub s2_range: (f64, f64),
    pub n1: usize,
    pub n2: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerWindow {
    pub theta: f64,
    pub s1_range: (f64, f64),
    pub s2_range: (f64, f64),
    pub n1: usize,
    pub n2: usize,
    /// `w(s)` in the frame `(e^{i theta}, i e^{i theta})`, `s1` fastest.
    pub samples: Vec<[f64; 2]>,
}

impl LayerWindow {
    pub fn s1(&self, i: usize) -> f64 {
        lerp(self.s1_range, i, self.n1)
    }

    pub fn s2(&self, j: usize) -> f64 {
        lerp(self.s2_range, j, self.n2)
    }

    pub fn at(&self, i: usize, j: usize) -> [f64; 2] {
        self.samples[j * self.n1 + i]
    }
}

fn lerp(range: (f64, f64), i: usize, n: usize) -> f64 {
    if n == 1 {
        return range.0;
    }
    range.0 + (range.1 - range.0) * i as f64 / (n - 1) as f64
}

/// Physical point for the layer coordinate `s` at the interface angle `theta`.
pub fn layer_point(params: &ModelParams, theta: f64, s: [f64; 2]) -> Point {
    let len = params.epsilon.powf(2.0 / 3.0) / (-params.mu1).cbrt();
    let (c, sn) = (theta.cos(), theta.sin());
    [
        params.rho * c + len * (s[0] * c - s[1] * sn),
        params.rho * sn + len * (s[0] * sn + s[1] * c),
    ]
}

/// `w(s) = 2^{-1/2} (-mu1 eps)^{-1/3} v(xi + eps^{2/3} s / (-mu1)^{1/3})`
/// with `xi = rho e^{i theta}`, components in the rotated frame.
pub fn extract_layer(
    u: &VectorField2,
    params: &ModelParams,
    theta: f64,
    window: &WindowSpec,
) -> Result<LayerWindow> {
    let corners = [
        [window.s1_range.0, window.s2_range.0],
        [window.s1_range.1, window.s2_range.0],
        [window.s1_range.0, window.s2_range.1],
        [window.s1_range.1, window.s2_range.1],
    ];
    for c in corners {
        if u.sample(layer_point(params, theta, c)).is_none() {
            return Err(Error::WindowOutsideGrid(c));
        }
    }
    let scale = 1.0 / (2.0_f64.sqrt() * (-params.mu1 * params.epsilon).cbrt());
    let (c, sn) = (theta.cos(), theta.sin());
    let mut samples = Vec::with_capacity(window.n1 * window.n2);
    for j in 0..window.n2 {
        for i in 0..window.n1 {
            let s = [lerp(window.s1_range, i, window.n1), lerp(window.s2_range, j, window.n2)];
            let v = u
                .sample(layer_point(params, theta, s))
                .ok_or(Error::WindowOutsideGrid(s))?;
            samples.push([scale * (v[0] * c + v[1] * sn), scale * (-v[0] * sn + v[1] * c)]);
        }
    }
    Ok(LayerWindow {
        theta,
        s1_range: window.s1_range,
        s2_range: window.s2_range,
        n1: window.n1,
        n2: window.n2,
        samples,
    })
}

/// `alpha = a f_rad(rho) / (sqrt(2) mu1)` along the first frame component.
pub fn layer_alpha(params: &ModelParams) -> f64 {
    params.a * params.f_rad(params.rho) / (2.0_f64.sqrt() * params.mu1)
}

/// Uniform strip grid with spacing `h`, `n1 x n2` nodes, `s1` fastest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripRect {
    pub s1_min: f64,
    pub s2_min: f64,
    pub h: f64,
    pub n1: usize,
    pub n2: usize,
}

impl StripRect {
    pub fn new(s1_min: f64, s2_min: f64, h: f64, n1: usize, n2: usize) -> Result<Self> {
        if !(h > 0.0) || n1 < 3 || n2 < 3 {
            return Err(Error::InvalidParams("strip needs h > 0 and at least 3x3 nodes".into()));
        }
        Ok(Self { s1_min, s2_min, h, n1, n2 })
    }

    pub fn s1(&self, i: usize) -> f64 {
        self.s1_min + i as f64 * self.h
    }

    pub fn s2(&self, j: usize) -> f64 {
        self.s2_min + j as f64 * self.h
    }

    pub fn s1_max(&self) -> f64 {
        self.s1(self.n1 - 1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StripField {
    pub rect: StripRect,
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
}

impl StripField {
    pub fn from_fn(rect: StripRect, f: impl Fn([f64; 2]) -> [f64; 2]) -> Self {
        let mut u1 = Vec::with_capacity(rect.n1 * rect.n2);
        let mut u2 = Vec::with_capacity(rect.n1 * rect.n2);
        for j in 0..rect.n2 {
            for i in 0..rect.n1 {
                let v = f([rect.s1(i), rect.s2(j)]);
                u1.push(v[0]);
                u2.push(v[1]);
            }
        }
        Self { rect, u1, u2 }
    }

    pub fn at(&self, i: usize, j: usize) -> [f64; 2] {
        let k = j * self.rect.n1 + i;
        [self.u1[k], self.u2[k]]
    }

    /// Square strips as a 2D field on `[-L, L]^2` (the offset of the center
    /// is not stored).
    pub fn to_square_field(&self) -> Result<VectorField2> {
        let r = &self.rect;
        if r.n1 != r.n2 {
            return Err(Error::GridMismatch("only square strips map to a square field".into()));
        }
        let grid = crate::fields::GridSpec::new(0.5 * r.h * (r.n1 - 1) as f64, r.n1)?;
        Ok(VectorField2 {
            grid,
            u1: self.u1.clone(),
            u2: self.u2.clone(),
        })
    }

    pub fn center(&self) -> [f64; 2] {
        let r = &self.rect;
        [
            r.s1_min + 0.5 * r.h * (r.n1 - 1) as f64,
            r.s2_min + 0.5 * r.h * (r.n2 - 1) as f64,
        ]
    }
}

/// Dirichlet data for the strip problem.
#[derive(Clone)]
pub enum StripBc {
    /// The 1D branch extended constantly in `s2`.
    From1d(Branch),
    /// Arbitrary boundary values; the seed interior uses the same function.
    Custom(Arc<dyn Fn([f64; 2]) -> [f64; 2] + Send + Sync>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StripOptions {
    pub max_iters: usize,
    pub residual_tol: f64,
    pub precond_shift: f64,
    pub step_rule: StepRule,
}

impl Default for StripOptions {
    fn default() -> Self {
        Self {
            max_iters: 20_000,
            residual_tol: 1e-8,
            precond_shift: 1.0,
            step_rule: StepRule::NonlinearCg,
        }
    }
}

#[derive(Debug, Clone)]
pub struct StripResult {
    pub field: StripField,
    pub energy: f64,
    pub residual_sup: f64,
    pub iters: usize,
    pub energy_trace: Vec<f64>,
}

fn strip_functional(rect: &StripRect, alpha: f64) -> QuarticFunctional {
    let h2 = rect.h * rect.h;
    let len = rect.n1 * rect.n2;
    let mut quad = vec![0.0; len];
    for j in 0..rect.n2 {
        for i in 0..rect.n1 {
            quad[j * rect.n1 + i] = rect.s1(i) * h2;
        }
    }
    QuarticFunctional {
        nx: rect.n1,
        ny: rect.n2,
        quad,
        quartic: 2.0 * h2,
        lin: [vec![alpha * h2; len], vec![0.0; len]],
    }
}

/// Discrete `E_PII = sum_edges |du|^2/2 + h^2 sum_interior [s1 |u|^2/2
/// + |u|^4/2 + alpha u1]`, `alpha` acting on the first component.
pub fn strip_energy(u: &StripField, alpha: f64) -> f64 {
    strip_functional(&u.rect, alpha).energy(&[u.u1.clone(), u.u2.clone()])
}

/// `Lap_h y - s1 y - 2|y|^2 y - alpha` at interior nodes, zero on the ring.
pub fn strip_residual(u: &StripField, alpha: f64) -> StripField {
    let f = strip_functional(&u.rect, alpha);
    let len = u.u1.len();
    let mut g = [vec![0.0; len], vec![0.0; len]];
    f.gradient(&[u.u1.clone(), u.u2.clone()], &mut g);
    let s = -1.0 / (u.rect.h * u.rect.h);
    let [g1, g2] = g;
    StripField {
        rect: u.rect,
        u1: g1.into_iter().map(|v| v * s).collect(),
        u2: g2.into_iter().map(|v| v * s).collect(),
    }
}

/// Central-scheme 1D branch on the strip's `s1` nodes with end values taken
/// from a fine Numerov solution; its constant extension in `s2` is an exact
/// discrete critical point of the strip energy.
pub fn strip_profile_1d(alpha: f64, branch: Branch, rect: &StripRect) -> Result<Vec<f64>> {
    let s_half = rect.s1_min.abs().max(rect.s1_max().abs()).max(8.0) + 1.0;
    let m = ((2.0 * s_half / rect.h.min(0.01)).ceil() as usize + 1).max(400);
    let mut spec = PainleveSpec::new(alpha, branch, s_half, m)?;
    spec.scheme = P2Scheme::Numerov;
    let fine = solve_p2(&spec)?;
    let s: Vec<f64> = (0..rect.n1).map(|i| rect.s1(i)).collect();
    let mut y = s
        .iter()
        .map(|&x| fine.value_at(x).ok_or(Error::OutsideGrid([x, 0.0])))
        .collect::<Result<Vec<f64>>>()?;
    p2_newton(&s, &mut y, alpha, rect.h, P2Scheme::Central, P2_TOL)?;
    Ok(y)
}

/// Seed field for the strip problem: boundary data on the ring and the same
/// data as the interior guess.
pub fn strip_seed(alpha: f64, rect: &StripRect, bc: &StripBc) -> Result<StripField> {
    match bc {
        StripBc::From1d(branch) => {
            let y = strip_profile_1d(alpha, *branch, rect)?;
            Ok(StripField::from_fn(*rect, |s| {
                let i = ((s[0] - rect.s1_min) / rect.h).round() as usize;
                [y[i.min(rect.n1 - 1)], 0.0]
            }))
        }
        StripBc::Custom(f) => Ok(StripField::from_fn(*rect, |s| f(s))),
    }
}

/// Minimizes the strip energy with the boundary ring of `seed` held fixed.
pub fn minimize_p2_strip_from(seed: &StripField, alpha: f64, opts: &StripOptions) -> Result<StripResult> {
    let rect = seed.rect;
    let func = strip_functional(&rect, alpha);
    let mut u = [seed.u1.clone(), seed.u2.clone()];
    if u.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteField);
    }
    let h2 = rect.h * rect.h;
    let settings = DescentSettings {
        max_iters: opts.max_iters,
        tol: opts.residual_tol,
        residual_scale: 1.0 / h2,
        step_rule: opts.step_rule,
        fixed_step: 1.0,
        precond_shift: opts.precond_shift * h2,
        truncation: None,
    };
    let out = func.descend(&mut u, &settings);
    if !out.converged {
        return Err(Error::NotConverged {
            residual: out.residual_sup,
            iters: out.iters,
        });
    }
    let [u1, u2] = u;
    let field = StripField { rect, u1, u2 };
    Ok(StripResult {
        energy: strip_energy(&field, alpha),
        field,
        residual_sup: out.residual_sup,
        iters: out.iters,
        energy_trace: out.energy_trace,
    })
}

/// Minimizes the discretized `E_PII` on `rect` under the given Dirichlet data.
pub fn minimize_p2_strip(
    alpha: f64,
    rect: &StripRect,
    bc: &StripBc,
    opts: &StripOptions,
) -> Result<StripResult> {
    let seed = strip_seed(alpha, rect, bc)?;
    minimize_p2_strip_from(&seed, alpha, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_values_solve_outer_balance() {
        let (l, r) = p2_boundary_values(0.0, Branch::Plus, 10.0);
        assert!((l - 5f64.sqrt()).abs() < 1e-15);
        assert_eq!(r, 0.0);
        let (l, r) = p2_boundary_values(-0.3, Branch::Minus, 10.0);
        assert!((2.0 * l * l * l - 10.0 * l - 0.3).abs() < 1e-12 && l < 0.0);
        assert!((r * r * r + 5.0 * r - 0.15).abs() < 1e-14 && r > 0.0);
    }

    #[test]
    fn minus_branch_at_zero_alpha_is_reflected_plus() {
        let plus = solve_p2(&PainleveSpec::new(0.0, Branch::Plus, 10.0, 2001).unwrap()).unwrap();
        let minus = solve_p2(&PainleveSpec::new(0.0, Branch::Minus, 10.0, 2001).unwrap()).unwrap();
        for (a, b) in plus.values.iter().zip(&minus.values) {
            assert!((a + b).abs() < 1e-10);
        }
    }

    #[test]
    fn newton_converges_quadratically() {
        let p = solve_p2(&PainleveSpec::new(0.0, Branch::Plus, 10.0, 2001).unwrap()).unwrap();
        let t = &p.newton_trace;
        assert!(*t.last().unwrap() <= 1e-10);
        // the last contraction factor is far below linear convergence
        let n = t.len();
        assert!(n >= 3);
        assert!(t[n - 1] / t[n - 2] < 1e-2 || t[n - 1] < 1e-12);
    }

    #[test]
    fn spec_validation() {
        assert!(PainleveSpec::new(0.0, Branch::Plus, 5.0, 1000).is_err());
        assert!(PainleveSpec::new(0.0, Branch::Plus, 10.0, 100).is_err());
    }

    #[test]
    fn constant_field_window_is_constant() {
        let p = ModelParams::new(0.05, 0.0, 0.5).unwrap();
        let g = crate::fields::GridSpec::new(p.rho + 1.5, 65).unwrap();
        let u = VectorField2::from_fn_everywhere(g, |_| [0.3, -0.2]);
        let th = 0.7;
        let w = extract_layer(
            &u,
            &p,
            th,
            &WindowSpec { s1_range: (-2.0, 2.0), s2_range: (-1.0, 1.0), n1: 9, n2: 5 },
        )
        .unwrap();
        let scale = 1.0 / (2f64.sqrt() * (-p.mu1 * p.epsilon).cbrt());
        let expect = [
            scale * (0.3 * th.cos() - 0.2 * th.sin()),
            scale * (-0.3 * th.sin() - 0.2 * th.cos()),
        ];
        for v in &w.samples {
            assert!((v[0] - expect[0]).abs() < 1e-13 && (v[1] - expect[1]).abs() < 1e-13);
        }
        let far = WindowSpec { s1_range: (-2.0, 200.0), s2_range: (-1.0, 1.0), n1: 3, n2: 3 };
        assert!(matches!(extract_layer(&u, &p, th, &far), Err(Error::WindowOutsideGrid(_))));
    }

    #[test]
    fn zero_is_strip_critical_point_for_zero_alpha() {
        let rect = StripRect::new(1.0, -2.0, 0.1, 31, 41).unwrap();
        let bc = StripBc::Custom(Arc::new(|_| [0.0, 0.0]));
        let r = minimize_p2_strip(0.0, &rect, &bc, &StripOptions::default()).unwrap();
        assert_eq!(r.iters, 0);
        assert_eq!(r.energy, 0.0);
    }

    #[test]
    fn one_dimensional_extension_is_strip_critical_point() {
        let rect = StripRect::new(-4.0, -2.0, 0.05, 161, 81).unwrap();
        let seed = strip_seed(0.0, &rect, &StripBc::From1d(Branch::Plus)).unwrap();
        let res = strip_residual(&seed, 0.0);
        let sup = res.u1.iter().chain(&res.u2).fold(0.0_f64, |a, b| a.max(b.abs()));
        assert!(sup <= 1e-8, "{sup}");
    }
}
