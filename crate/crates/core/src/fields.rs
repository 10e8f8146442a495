//! Model data, grids, and the discrete energy.
//!
//! The energy is discretized so that its exact gradient is the five-point
//! Euler-Lagrange residual: gradient energy lives on cell edges (forward
//! differences), while potential and forcing terms use nodal quadrature with
//! weight `h^2`. Boundary nodes carry homogeneous Dirichlet data.

use rayon::prelude::*;

use crate::error::{Error, Result};

pub type Point = [f64; 2];

/// Physical parameters plus the derived interface data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub epsilon: f64,
    pub a: f64,
    pub chi: f64,
    /// Zero of `mu_rad`.
    pub rho: f64,
    /// `mu_rad'(rho)`, always negative.
    pub mu1: f64,
}

impl ModelParams {
    pub fn new(epsilon: f64, a: f64, chi: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidParams(format!("epsilon must be positive, got {epsilon}")));
        }
        if !(a >= 0.0 && a.is_finite()) {
            return Err(Error::InvalidParams(format!("a must be nonnegative, got {a}")));
        }
        if !(chi > 0.0 && chi < 1.0) {
            return Err(Error::InvalidParams(format!("chi must lie in (0,1), got {chi}")));
        }
        let rho = (1.0 / chi).ln().sqrt();
        Ok(Self {
            epsilon,
            a,
            chi,
            rho,
            mu1: -2.0 * rho * chi,
        })
    }

    /// Same model with a different forcing strength.
    pub fn with_a(&self, a: f64) -> Result<Self> {
        Self::new(self.epsilon, a, self.chi)
    }

    pub fn mu_rad(&self, r: f64) -> f64 {
        (-r * r).exp() - self.chi
    }

    pub fn f_rad(&self, r: f64) -> f64 {
        r * (-r * r).exp()
    }

    /// `sup sqrt(mu^+)`, attained at the origin.
    pub fn sqrt_mu_max(&self) -> f64 {
        (1.0 - self.chi).sqrt()
    }

    /// `sup |f|`, attained at `|x| = 1/sqrt(2)`.
    pub fn f_max(&self) -> f64 {
        self.f_rad(std::f64::consts::FRAC_1_SQRT_2)
    }
}

pub fn mu_eval(params: &ModelParams, x: Point) -> f64 {
    (-(x[0] * x[0] + x[1] * x[1])).exp() - params.chi
}

/// `f = -grad(mu)/2 = x exp(-|x|^2)`.
pub fn f_eval(_params: &ModelParams, x: Point) -> Point {
    let g = (-(x[0] * x[0] + x[1] * x[1])).exp();
    [x[0] * g, x[1] * g]
}

/// Uniform square grid on `[-L, L]^2` with `n` points per side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub half_width: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn new(half_width: f64, n: usize) -> Result<Self> {
        if n < 16 {
            return Err(Error::InvalidParams(format!("grid needs n >= 16, got {n}")));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidParams(format!("half width must be positive, got {half_width}")));
        }
        Ok(Self { half_width, n })
    }

    /// Grid whose half width is `rho + margin`; the interface circle must fit
    /// with at least one unit to spare.
    pub fn around_interface(params: &ModelParams, margin: f64, n: usize) -> Result<Self> {
        let grid = Self::new(params.rho + margin, n)?;
        grid.check_fits(params)?;
        Ok(grid)
    }

    pub fn check_fits(&self, params: &ModelParams) -> Result<()> {
        if self.half_width <= params.rho + 1.0 {
            return Err(Error::InvalidParams(format!(
                "half width {} must exceed rho + 1 = {}",
                self.half_width,
                params.rho + 1.0
            )));
        }
        Ok(())
    }

    pub fn h(&self) -> f64 {
        2.0 * self.half_width / (self.n - 1) as f64
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.h()
    }

    pub fn point(&self, i: usize, j: usize) -> Point {
        [self.coord(i), self.coord(j)]
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i + 1 == self.n || j + 1 == self.n
    }

    /// Fractional node coordinates of a point; `None` outside the grid.
    pub fn locate(&self, x: Point) -> Option<(usize, usize, f64, f64)> {
        let h = self.h();
        let fx = (x[0] + self.half_width) / h;
        let fy = (x[1] + self.half_width) / h;
        let top = (self.n - 1) as f64;
        if !(fx >= 0.0 && fy >= 0.0 && fx <= top && fy <= top) {
            return None;
        }
        let i = (fx.floor() as usize).min(self.n - 2);
        let j = (fy.floor() as usize).min(self.n - 2);
        Some((i, j, fx - i as f64, fy - j as f64))
    }

    /// Same spacing and extent up to roundoff.
    pub fn matches(&self, other: &GridSpec) -> bool {
        self.n == other.n && (self.half_width - other.half_width).abs() <= 1e-12 * self.half_width
    }
}

/// Real samples on a [`GridSpec`], row-major with `x` varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn from_fn(grid: GridSpec, f: impl Fn(Point) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for j in 0..grid.n {
            for i in 0..grid.n {
                values.push(f(grid.point(i, j)));
            }
        }
        Self { grid, values }
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.grid.n + i]
    }
}

/// Two-component field `u = (u1, u2)` on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField2 {
    pub grid: GridSpec,
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
}

impl VectorField2 {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            u1: vec![0.0; grid.len()],
            u2: vec![0.0; grid.len()],
        }
    }

    /// Samples `f` at interior nodes; the boundary ring is zero.
    pub fn from_fn(grid: GridSpec, f: impl Fn(Point) -> Point) -> Self {
        let mut out = Self::zeros(grid);
        for j in 1..grid.n - 1 {
            for i in 1..grid.n - 1 {
                let v = f(grid.point(i, j));
                let k = j * grid.n + i;
                out.u1[k] = v[0];
                out.u2[k] = v[1];
            }
        }
        out
    }

    /// Samples `f` at every node, boundary included.
    pub fn from_fn_everywhere(grid: GridSpec, f: impl Fn(Point) -> Point) -> Self {
        let mut out = Self::zeros(grid);
        for j in 0..grid.n {
            for i in 0..grid.n {
                let v = f(grid.point(i, j));
                let k = j * grid.n + i;
                out.u1[k] = v[0];
                out.u2[k] = v[1];
            }
        }
        out
    }

    pub fn at(&self, i: usize, j: usize) -> Point {
        let k = j * self.grid.n + i;
        [self.u1[k], self.u2[k]]
    }

    pub fn is_finite(&self) -> bool {
        self.u1.iter().chain(self.u2.iter()).all(|v| v.is_finite())
    }

    pub fn boundary_is_zero(&self) -> bool {
        let n = self.grid.n;
        (0..n).all(|t| {
            [(t, 0), (t, n - 1), (0, t), (n - 1, t)]
                .iter()
                .all(|&(i, j)| self.at(i, j) == [0.0, 0.0])
        })
    }

    pub fn zero_boundary(&mut self) {
        let n = self.grid.n;
        for t in 0..n {
            for (i, j) in [(t, 0), (t, n - 1), (0, t), (n - 1, t)] {
                let k = j * n + i;
                self.u1[k] = 0.0;
                self.u2[k] = 0.0;
            }
        }
    }

    pub fn modulus(&self) -> ScalarField {
        ScalarField {
            grid: self.grid,
            values: self
                .u1
                .iter()
                .zip(&self.u2)
                .map(|(a, b)| a.hypot(*b))
                .collect(),
        }
    }

    /// Bilinear interpolation; `None` outside the grid.
    pub fn sample(&self, x: Point) -> Option<Point> {
        let (i, j, tx, ty) = self.grid.locate(x)?;
        let n = self.grid.n;
        let k = j * n + i;
        let w = [(1.0 - tx) * (1.0 - ty), tx * (1.0 - ty), (1.0 - tx) * ty, tx * ty];
        let idx = [k, k + 1, k + n, k + n + 1];
        let mut out = [0.0; 2];
        for (wk, &kk) in w.iter().zip(&idx) {
            out[0] += wk * self.u1[kk];
            out[1] += wk * self.u2[kk];
        }
        Some(out)
    }

    /// Applies the rotation by `angle` to every value (the domain is untouched).
    pub fn rotate_values(&self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        let mut out = self.clone();
        for k in 0..self.u1.len() {
            let (a, b) = (self.u1[k], self.u2[k]);
            out.u1[k] = c * a - s * b;
            out.u2[k] = s * a + c * b;
        }
        out
    }

    /// `x -> g^{-1} u(g x)` for `g` the rotation by a quarter turn. Exact on the grid.
    pub fn quarter_turn_conjugate(&self) -> Self {
        let n = self.grid.n;
        let mut out = Self::zeros(self.grid);
        for j in 0..n {
            for i in 0..n {
                // g(x, y) = (-y, x)
                let (gi, gj) = (n - 1 - j, i);
                let v = self.at(gi, gj);
                // g^{-1}(a, b) = (b, -a)
                let k = j * n + i;
                out.u1[k] = v[1];
                out.u2[k] = -v[0];
            }
        }
        out
    }

    pub fn add_scaled(&self, t: f64, other: &VectorField2) -> Self {
        let mut out = self.clone();
        for k in 0..out.u1.len() {
            out.u1[k] += t * other.u1[k];
            out.u2[k] += t * other.u2[k];
        }
        out
    }

    /// `h^2`-weighted L2 norm.
    pub fn l2_norm(&self) -> f64 {
        let h = self.grid.h();
        let s: f64 = self.u1.iter().zip(&self.u2).map(|(a, b)| a * a + b * b).sum();
        (s * h * h).sqrt()
    }

    /// `h^2`-weighted L1 norm of the modulus.
    pub fn l1_norm(&self) -> f64 {
        let h = self.grid.h();
        let s: f64 = self.u1.iter().zip(&self.u2).map(|(a, b)| a.hypot(*b)).sum();
        s * h * h
    }

    pub fn sup_norm(&self) -> f64 {
        self.u1
            .iter()
            .zip(&self.u2)
            .map(|(a, b)| a.hypot(*b))
            .fold(0.0, f64::max)
    }
}

/// Per-row partial results combined in row order, so the value does not
/// depend on how rows are scheduled across threads.
pub(crate) fn ordered_row_sum<const K: usize>(
    rows: std::ops::Range<usize>,
    f: impl Fn(usize) -> [f64; K] + Sync + Send,
) -> [f64; K] {
    let partial: Vec<[f64; K]> = rows.into_par_iter().map(f).collect();
    let mut acc = [0.0; K];
    for p in partial {
        for (a, v) in acc.iter_mut().zip(p) {
            *a += v;
        }
    }
    acc
}

fn gradient_energy_row(u: &VectorField2, j: usize) -> f64 {
    let n = u.grid.n;
    let mut s = 0.0;
    let row = j * n;
    for i in 0..n - 1 {
        let k = row + i;
        let (d1, d2) = (u.u1[k + 1] - u.u1[k], u.u2[k + 1] - u.u2[k]);
        s += d1 * d1 + d2 * d2;
    }
    if j + 1 < n {
        for i in 0..n {
            let k = row + i;
            let (d1, d2) = (u.u1[k + n] - u.u1[k], u.u2[k + n] - u.u2[k]);
            s += d1 * d1 + d2 * d2;
        }
    }
    0.5 * s
}

/// Discrete energy
/// `sum_edges |du|^2/2 + h^2 sum_nodes [-mu|u|^2/(2 eps^2) + |u|^4/(4 eps^2) - (a/eps) f.u]`.
pub fn energy(u: &VectorField2, params: &ModelParams) -> Result<f64> {
    if !u.is_finite() {
        return Err(Error::NonFiniteField);
    }
    let grid = u.grid;
    let n = grid.n;
    let h2 = grid.h() * grid.h();
    let eps = params.epsilon;
    let inv_eps2 = 1.0 / (eps * eps);
    let [total] = ordered_row_sum(0..n, |j| {
        let mut s = gradient_energy_row(u, j);
        if j == 0 || j + 1 == n {
            return [s];
        }
        let mut pot = 0.0;
        for i in 1..n - 1 {
            let x = grid.point(i, j);
            let v = u.at(i, j);
            let m2 = v[0] * v[0] + v[1] * v[1];
            let f = f_eval(params, x);
            pot += inv_eps2 * (-0.5 * mu_eval(params, x) * m2 + 0.25 * m2 * m2)
                - params.a / eps * (f[0] * v[0] + f[1] * v[1]);
        }
        s += h2 * pot;
        [s]
    });
    Ok(total)
}

/// `R(u) = eps^2 Lap_h u + mu u - |u|^2 u + eps a f` at interior nodes, zero
/// on the boundary ring. Equals `-eps^2/h^2` times the gradient of [`energy`].
pub fn el_residual(u: &VectorField2, params: &ModelParams) -> VectorField2 {
    let grid = u.grid;
    let n = grid.n;
    let h = grid.h();
    let eps = params.epsilon;
    let c = eps * eps / (h * h);
    let mut out = VectorField2::zeros(grid);
    out.u1
        .par_chunks_mut(n)
        .zip(out.u2.par_chunks_mut(n))
        .enumerate()
        .for_each(|(j, (r1, r2))| {
            if j == 0 || j + 1 == n {
                return;
            }
            for i in 1..n - 1 {
                let k = j * n + i;
                let x = grid.point(i, j);
                let mu = mu_eval(params, x);
                let f = f_eval(params, x);
                let (a1, a2) = (u.u1[k], u.u2[k]);
                let lap1 = u.u1[k - 1] + u.u1[k + 1] + u.u1[k - n] + u.u1[k + n] - 4.0 * a1;
                let lap2 = u.u2[k - 1] + u.u2[k + 1] + u.u2[k - n] + u.u2[k + n] - 4.0 * a2;
                let m2 = a1 * a1 + a2 * a2;
                r1[i] = c * lap1 + (mu - m2) * a1 + eps * params.a * f[0];
                r2[i] = c * lap2 + (mu - m2) * a2 + eps * params.a * f[1];
            }
        });
    out
}

/// Nodal quadrature of `mu^2/(4 eps^2)` over `{|x| < rho}`.
pub fn renormalization_offset(grid: &GridSpec, params: &ModelParams) -> f64 {
    let n = grid.n;
    let h2 = grid.h() * grid.h();
    let inv = 0.25 / (params.epsilon * params.epsilon);
    let [s] = ordered_row_sum(1..n - 1, |j| {
        let mut s = 0.0;
        for i in 1..n - 1 {
            let m = mu_eval(params, grid.point(i, j));
            if m > 0.0 {
                s += m * m;
            }
        }
        [s]
    });
    s * h2 * inv
}

/// Energy plus the quadrature of `mu^2/(4 eps^2)` on the disc `|x| < rho`.
/// Pointwise the integrand is continuous across the interface circle.
pub fn renormalized_energy(u: &VectorField2, params: &ModelParams) -> Result<f64> {
    Ok(energy(u, params)? + renormalization_offset(&u.grid, params))
}

/// Gauge for the `a = 0` symmetry: rotate values so that the `|u|`-weighted
/// mean direction `sum |u| u` points along `(1, 0)`.
pub fn phase_gauge(u: &VectorField2) -> VectorField2 {
    let mut m = [0.0; 2];
    for k in 0..u.u1.len() {
        let r = u.u1[k].hypot(u.u2[k]);
        m[0] += r * u.u1[k];
        m[1] += r * u.u2[k];
    }
    if m[0] == 0.0 && m[1] == 0.0 {
        return u.clone();
    }
    u.rotate_values(-m[1].atan2(m[0]))
}
