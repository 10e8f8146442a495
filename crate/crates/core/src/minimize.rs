//! Seeded descent toward minimizers of the discrete energy.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fields::{
    energy, f_eval, mu_eval, ordered_row_sum, phase_gauge, GridSpec, ModelParams, Point,
    VectorField2,
};
use crate::functional::{DescentSettings, QuarticFunctional, StepRule};
use crate::radial::{solve_scalar_radial, RadialGrid};

#[derive(Debug, Clone, PartialEq)]
pub struct MinimizeOptions {
    pub max_iters: usize,
    /// Target for the sup norm of the residual `R`.
    pub residual_tol: f64,
    pub step_rule: StepRule,
    /// Component clamp bound; `None` picks [`default_truncation_bound`].
    pub truncation_bound: Option<f64>,
    pub truncation_every: usize,
    /// Shift of the Laplacian preconditioner in units of `1/eps^2`.
    pub precond_shift: f64,
    /// Initial step for [`StepRule::Fixed`].
    pub fixed_step: f64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            max_iters: 20_000,
            residual_tol: 1e-8,
            step_rule: StepRule::NonlinearCg,
            truncation_bound: None,
            truncation_every: 50,
            precond_shift: 1.0,
            fixed_step: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SeedKind {
    /// `(sqrt(mu^+), 0)`.
    ThomasFermi,
    /// The scalar radial profile placed along the first component.
    RadialScalar,
    /// `sqrt(mu^+) (cos d theta, sin d theta)` around `center`, `d = +-1`.
    Vortex { center: Point, degree: i32 },
    /// Thomas-Fermi amplitude with a random global phase and local noise.
    Random { rng_seed: u64 },
    File(PathBuf),
    /// An explicit field, e.g. a warm start.
    Field(Box<VectorField2>),
}

impl fmt::Display for SeedKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeedKind::ThomasFermi => write!(f, "thomas_fermi"),
            SeedKind::RadialScalar => write!(f, "radial_scalar"),
            SeedKind::Vortex { center, degree } => {
                write!(f, "vortex({},{},{:+})", center[0], center[1], degree)
            }
            SeedKind::Random { rng_seed } => write!(f, "random({rng_seed})"),
            SeedKind::File(p) => write!(f, "file({})", p.display()),
            SeedKind::Field(_) => write!(f, "field"),
        }
    }
}

/// Parses the labels produced by `Display`, e.g. `vortex(0,0,+1)`.
/// `Field` has no textual form.
impl FromStr for SeedKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParams(format!("unrecognized seed {s:?}"));
        let s = s.trim();
        match s {
            "thomas_fermi" => return Ok(SeedKind::ThomasFermi),
            "radial_scalar" => return Ok(SeedKind::RadialScalar),
            _ => {}
        }
        let (name, rest) = s.split_once('(').ok_or_else(bad)?;
        let arg = rest.strip_suffix(')').ok_or_else(bad)?;
        match name {
            "random" => Ok(SeedKind::Random {
                rng_seed: arg.trim().parse().map_err(|_| bad())?,
            }),
            "file" => Ok(SeedKind::File(PathBuf::from(arg))),
            "vortex" => {
                let parts: Vec<&str> = arg.split(',').map(str::trim).collect();
                let [x, y, d] = parts[..] else { return Err(bad()) };
                let num = |v: &str| v.parse::<f64>().map_err(|_| bad());
                Ok(SeedKind::Vortex {
                    center: [num(x)?, num(y)?],
                    degree: d.parse().map_err(|_| bad())?,
                })
            }
            _ => Err(bad()),
        }
    }
}

impl SeedKind {
    /// The standard multistart list: Thomas-Fermi, both vortices, the scalar
    /// radial profile, and three random seeds.
    pub fn standard_set() -> Vec<SeedKind> {
        vec![
            SeedKind::ThomasFermi,
            SeedKind::Vortex { center: [0.0, 0.0], degree: 1 },
            SeedKind::Vortex { center: [0.0, 0.0], degree: -1 },
            SeedKind::RadialScalar,
            SeedKind::Random { rng_seed: 1 },
            SeedKind::Random { rng_seed: 2 },
            SeedKind::Random { rng_seed: 3 },
        ]
    }
}

#[derive(Debug, Clone)]
pub struct MinimizeResult {
    pub field: VectorField2,
    pub energy: f64,
    pub residual_sup: f64,
    pub iters: usize,
    pub converged: bool,
    /// Energy after every accepted step, nonincreasing.
    pub energy_trace: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SeedOutcome {
    pub seed: String,
    pub energy: f64,
    pub residual_sup: f64,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct MultistartResult {
    pub best: MinimizeResult,
    /// Index into `outcomes` of the winner.
    pub best_index: usize,
    pub outcomes: Vec<SeedOutcome>,
}

fn sqrt_mu_plus(params: &ModelParams, x: Point) -> f64 {
    mu_eval(params, x).max(0.0).sqrt()
}

pub fn seed_field(kind: &SeedKind, params: &ModelParams, grid: GridSpec) -> Result<VectorField2> {
    let field = match kind {
        SeedKind::ThomasFermi => VectorField2::from_fn(grid, |x| [sqrt_mu_plus(params, x), 0.0]),
        SeedKind::RadialScalar => {
            let prof = solve_scalar_radial(params, &RadialGrid::covering(params, &grid)?)?;
            prof.inject_scalar(grid)
        }
        SeedKind::Vortex { center, degree } => {
            if degree.abs() != 1 {
                return Err(Error::InvalidParams(format!(
                    "vortex degree must be +1 or -1, got {degree}"
                )));
            }
            let d = *degree as f64;
            VectorField2::from_fn(grid, |x| {
                let (dx, dy) = (x[0] - center[0], x[1] - center[1]);
                if dx == 0.0 && dy == 0.0 {
                    return [0.0, 0.0];
                }
                let th = d * dy.atan2(dx);
                let r = sqrt_mu_plus(params, x);
                [r * th.cos(), r * th.sin()]
            })
        }
        SeedKind::Random { rng_seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*rng_seed);
            let theta0 = rng.gen_range(0.0..std::f64::consts::TAU);
            let mut f = VectorField2::zeros(grid);
            let n = grid.n;
            for j in 0..n {
                for i in 0..n {
                    let dphi: f64 = rng.gen_range(-0.5..0.5);
                    let xi: f64 = rng.gen_range(-1.0..1.0);
                    if grid.is_boundary(i, j) {
                        continue;
                    }
                    let r = sqrt_mu_plus(params, grid.point(i, j)) * (1.0 + 0.2 * xi);
                    let k = j * n + i;
                    f.u1[k] = r * (theta0 + dphi).cos();
                    f.u2[k] = r * (theta0 + dphi).sin();
                }
            }
            f
        }
        SeedKind::File(path) => {
            let f = crate::io::read_vector_field(path)?;
            check_grid(&f, &grid)?;
            f
        }
        SeedKind::Field(f) => {
            check_grid(f, &grid)?;
            (**f).clone()
        }
    };
    Ok(field)
}

fn check_grid(f: &VectorField2, grid: &GridSpec) -> Result<()> {
    if !f.grid.matches(grid) {
        return Err(Error::GridMismatch(format!(
            "seed grid (L={}, n={}) differs from requested (L={}, n={})",
            f.grid.half_width, f.grid.n, grid.half_width, grid.n
        )));
    }
    Ok(())
}

/// Smallest `M` above which the pointwise potential increases along every
/// component direction, enlarged to the default `1.5 sup sqrt(mu^+) + 1`.
pub fn default_truncation_bound(params: &ModelParams) -> f64 {
    let mu_max = 1.0 - params.chi;
    let forcing = params.epsilon * params.a * params.f_max();
    // largest real root of M^3 - mu_max M - forcing
    let mut m = (mu_max.sqrt() + forcing.cbrt()).max(1.0);
    for _ in 0..60 {
        let g = m * m * m - mu_max * m - forcing;
        let dg = 3.0 * m * m - mu_max;
        m -= g / dg;
    }
    (1.5 * params.sqrt_mu_max() + 1.0).max(m)
}

/// Clamps each component to `[-m, m]` at interior nodes.
pub fn truncate(u: &VectorField2, m: f64) -> VectorField2 {
    let mut out = u.clone();
    out.u1.iter_mut().chain(out.u2.iter_mut()).for_each(|v| *v = v.clamp(-m, m));
    out
}

pub(crate) fn gl_functional(params: &ModelParams, grid: &GridSpec) -> QuarticFunctional {
    let n = grid.n;
    let h2 = grid.h() * grid.h();
    let eps = params.epsilon;
    let mut quad = vec![0.0; n * n];
    let mut lin = [vec![0.0; n * n], vec![0.0; n * n]];
    for j in 0..n {
        for i in 0..n {
            let k = j * n + i;
            let x = grid.point(i, j);
            quad[k] = -mu_eval(params, x) * h2 / (eps * eps);
            let f = f_eval(params, x);
            lin[0][k] = -params.a / eps * f[0] * h2;
            lin[1][k] = -params.a / eps * f[1] * h2;
        }
    }
    QuarticFunctional {
        nx: n,
        ny: n,
        quad,
        quartic: h2 / (eps * eps),
        lin,
    }
}

/// Descends from `u0`. At `a = 0` the result is reported in the phase gauge.
pub fn minimize(
    u0: &VectorField2,
    params: &ModelParams,
    opts: &MinimizeOptions,
) -> Result<MinimizeResult> {
    if !(opts.residual_tol > 0.0) {
        return Err(Error::InvalidParams("residual_tol must be positive".into()));
    }
    if !u0.is_finite() {
        return Err(Error::NonFiniteField);
    }
    let grid = u0.grid;
    grid.check_fits(params)?;
    let bound = opts.truncation_bound.unwrap_or_else(|| default_truncation_bound(params));
    if bound < params.sqrt_mu_max() {
        return Err(Error::InvalidParams(format!(
            "truncation bound {bound} below sup sqrt(mu^+) = {}",
            params.sqrt_mu_max()
        )));
    }
    let h2 = grid.h() * grid.h();
    let eps2 = params.epsilon * params.epsilon;
    let func = gl_functional(params, &grid);
    let mut u = [u0.u1.clone(), u0.u2.clone()];
    for c in u.iter_mut() {
        for j in 0..grid.n {
            for i in 0..grid.n {
                if grid.is_boundary(i, j) {
                    c[j * grid.n + i] = 0.0;
                }
            }
        }
    }
    let settings = DescentSettings {
        max_iters: opts.max_iters,
        tol: opts.residual_tol,
        residual_scale: eps2 / h2,
        step_rule: opts.step_rule,
        fixed_step: opts.fixed_step,
        precond_shift: opts.precond_shift * h2 / eps2,
        truncation: Some((bound, opts.truncation_every)),
    };
    let out = func.descend(&mut u, &settings);
    let [u1, u2] = u;
    let mut field = VectorField2 { grid, u1, u2 };
    if params.a == 0.0 {
        field = phase_gauge(&field);
    }
    let e = energy(&field, params)?;
    Ok(MinimizeResult {
        field,
        energy: e,
        residual_sup: out.residual_sup,
        iters: out.iters,
        converged: out.converged,
        energy_trace: out.energy_trace,
    })
}

/// Minimizes from every seed and keeps the lowest-energy converged result.
pub fn multistart_global(
    params: &ModelParams,
    grid: GridSpec,
    opts: &MinimizeOptions,
    seeds: &[SeedKind],
) -> Result<MultistartResult> {
    if seeds.is_empty() {
        return Err(Error::InvalidParams("empty seed list".into()));
    }
    let runs: Vec<Result<MinimizeResult>> = seeds
        .par_iter()
        .map(|s| {
            let u0 = seed_field(s, params, grid)?;
            minimize(&u0, params, opts)
        })
        .collect();
    let mut outcomes = Vec::with_capacity(seeds.len());
    let mut best: Option<(usize, MinimizeResult)> = None;
    for (k, (seed, run)) in seeds.iter().zip(runs).enumerate() {
        match run {
            Ok(r) => {
                outcomes.push(SeedOutcome {
                    seed: seed.to_string(),
                    energy: r.energy,
                    residual_sup: r.residual_sup,
                    converged: r.converged,
                });
                let better = best.as_ref().map_or(true, |(_, b)| r.energy < b.energy);
                if r.converged && better {
                    best = Some((k, r));
                }
            }
            Err(_) => outcomes.push(SeedOutcome {
                seed: seed.to_string(),
                energy: f64::NAN,
                residual_sup: f64::NAN,
                converged: false,
            }),
        }
    }
    match best {
        Some((best_index, best)) => Ok(MultistartResult {
            best,
            best_index,
            outcomes,
        }),
        None => Err(Error::NoSeedConverged(
            outcomes.into_iter().map(|o| (o.seed, o.residual_sup)).collect(),
        )),
    }
}

/// Returns `(E(u + psi) - E(u), predicted)` where `predicted` is the
/// quadrature of `|grad psi|^2/2 + (|u|^2 - mu)|psi|^2/(2 eps^2)
/// + (|psi|^2 + 2 u.psi)^2/(4 eps^2)`.
pub fn energy_difference_check(
    u: &VectorField2,
    psi: &VectorField2,
    params: &ModelParams,
) -> Result<(f64, f64)> {
    if !u.grid.matches(&psi.grid) {
        return Err(Error::GridMismatch("u and psi live on different grids".into()));
    }
    let actual = energy(&u.add_scaled(1.0, psi), params)? - energy(u, params)?;
    let grid = u.grid;
    let n = grid.n;
    let h2 = grid.h() * grid.h();
    let inv = 1.0 / (params.epsilon * params.epsilon);
    let [predicted] = ordered_row_sum(0..n, |j| {
        let mut s = 0.0;
        for i in 0..n {
            let k = j * n + i;
            if i + 1 < n {
                let (a, b) = (psi.u1[k + 1] - psi.u1[k], psi.u2[k + 1] - psi.u2[k]);
                s += 0.5 * (a * a + b * b);
            }
            if j + 1 < n {
                let (a, b) = (psi.u1[k + n] - psi.u1[k], psi.u2[k + n] - psi.u2[k]);
                s += 0.5 * (a * a + b * b);
            }
            if grid.is_boundary(i, j) {
                continue;
            }
            let mu = mu_eval(params, grid.point(i, j));
            let uu = u.u1[k] * u.u1[k] + u.u2[k] * u.u2[k];
            let pp = psi.u1[k] * psi.u1[k] + psi.u2[k] * psi.u2[k];
            let up = u.u1[k] * psi.u1[k] + u.u2[k] * psi.u2[k];
            let t = pp + 2.0 * up;
            s += h2 * inv * (0.5 * (uu - mu) * pp + 0.25 * t * t);
        }
        [s]
    });
    Ok((actual, predicted))
}
