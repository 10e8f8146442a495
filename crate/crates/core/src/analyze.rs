//! Diagnostics of computed fields: zeros and their degrees, alignment with
//! the radial direction, Thomas-Fermi deviation, a priori bound constants,
//! outer asymptotics, vortex-core matching, and phase classification.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::fields::{f_eval, mu_eval, ModelParams, Point, VectorField2};
use crate::radial::{solve_gl_vortex, RadialGrid, RadialProfile};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Zero {
    pub location: Point,
    pub winding: i32,
    /// Minimum of `|u|` over nodes within `3h` of the location.
    pub core_dip: f64,
}

impl Zero {
    pub fn radius(&self) -> f64 {
        self.location[0].hypot(self.location[1])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PhaseLabel {
    NoZero,
    ShadowVortex,
    StandardVortexOffCenter,
    StandardVortexCenter,
    /// Zeros are present but no rule of the decision table fires.
    Unresolved,
}

impl PhaseLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            PhaseLabel::NoZero => "NoZero",
            PhaseLabel::ShadowVortex => "ShadowVortex",
            PhaseLabel::StandardVortexOffCenter => "StandardVortexOffCenter",
            PhaseLabel::StandardVortexCenter => "StandardVortexCenter",
            PhaseLabel::Unresolved => "Unresolved",
        }
    }
}

impl fmt::Display for PhaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PhaseLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            PhaseLabel::NoZero,
            PhaseLabel::ShadowVortex,
            PhaseLabel::StandardVortexOffCenter,
            PhaseLabel::StandardVortexCenter,
            PhaseLabel::Unresolved,
        ]
        .into_iter()
        .find(|l| l.as_str().eq_ignore_ascii_case(s))
        .ok_or_else(|| Error::InvalidParams(format!("unknown phase label {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Phase {
    pub label: PhaseLabel,
    /// More than one rule fired; `label` is the highest-precedence one.
    pub ambiguous: bool,
    pub evidence: Vec<(String, f64)>,
}

/// Radii and budgets of the decision table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyThresholds {
    /// Center zeros satisfy `|x| <= center_frac * rho`.
    pub center_frac: f64,
    /// Interface band half-width: shadow zeros satisfy `|x| >= rho - band`.
    pub band: f64,
    /// Core-profile misfit budget for standard vortices.
    pub match_budget: f64,
    /// Shadow core amplitude budget as a fraction of `sqrt(mu(0))`.
    pub shadow_amp_frac: f64,
}

impl Default for ClassifyThresholds {
    fn default() -> Self {
        Self {
            center_frac: 0.2,
            band: 0.15,
            match_budget: 0.2,
            shadow_amp_frac: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzeOptions {
    /// `None` selects `0.3 eps^{1/3} sqrt(-mu1)`.
    pub amp_tol: Option<f64>,
    pub tf_r_frac: f64,
    /// Annulus for the alignment diagnostic; `None` selects
    /// `[rho + 2 eps^{2/3}, rho + 0.4]`.
    pub align_annulus: Option<(f64, f64)>,
    /// Radius of the outer check; `None` selects `rho + 0.5`.
    pub outer_r0: Option<f64>,
    pub thresholds: ClassifyThresholds,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        Self {
            amp_tol: None,
            tf_r_frac: 0.8,
            align_annulus: None,
            outer_r0: None,
            thresholds: ClassifyThresholds::default(),
        }
    }
}

pub fn default_amp_tol(params: &ModelParams) -> f64 {
    0.3 * params.epsilon.cbrt() * (-params.mu1).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisReport {
    pub zeros: Vec<Zero>,
    pub tf_sup_dev: f64,
    /// `None` when a zero of the field lies on the annulus.
    pub alignment_min: Option<f64>,
    pub bound_k: f64,
    /// `None` at `a = 0` or when the circle leaves the grid.
    pub outer_dev: Option<f64>,
    /// Degree on the circle `|x| = rho + 0.3`, if well defined.
    pub total_winding: Option<i32>,
    pub phase: Phase,
}

fn opt_str(v: Option<f64>) -> String {
    v.map_or_else(|| "undefined".to_string(), crate::io::fmt_f64)
}

impl AnalysisReport {
    pub fn key_values(&self) -> Vec<(String, String)> {
        let f = crate::io::fmt_f64;
        let mut kv = vec![
            ("phase".to_string(), self.phase.label.to_string()),
            ("phase_ambiguous".to_string(), self.phase.ambiguous.to_string()),
            ("zero_count".to_string(), self.zeros.len().to_string()),
            ("tf_sup_dev".to_string(), f(self.tf_sup_dev)),
            ("alignment_min".to_string(), opt_str(self.alignment_min)),
            ("bound_k".to_string(), f(self.bound_k)),
            ("outer_dev".to_string(), opt_str(self.outer_dev)),
            (
                "total_winding".to_string(),
                self.total_winding.map_or("undefined".to_string(), |w| w.to_string()),
            ),
        ];
        for (k, z) in self.zeros.iter().enumerate() {
            kv.push((
                format!("zero{k}"),
                format!(
                    "{} {} winding={} dip={}",
                    f(z.location[0]),
                    f(z.location[1]),
                    z.winding,
                    f(z.core_dip)
                ),
            ));
        }
        for (name, v) in &self.phase.evidence {
            kv.push((format!("evidence.{name}"), f(*v)));
        }
        kv
    }

    pub fn csv_header() -> &'static str {
        "phase,zero_count,zero_radii,tf_sup_dev,alignment_min,bound_k,outer_dev"
    }

    pub fn csv_row(&self) -> String {
        let radii: Vec<String> = self.zeros.iter().map(|z| crate::io::fmt_f64(z.radius())).collect();
        format!(
            "{},{},{},{},{},{},{}",
            self.phase.label,
            self.zeros.len(),
            radii.join(";"),
            crate::io::fmt_f64(self.tf_sup_dev),
            opt_str(self.alignment_min),
            crate::io::fmt_f64(self.bound_k),
            opt_str(self.outer_dev)
        )
    }
}

const AMP_FLOOR: f64 = 1e-10;

/// Degree of `u` on the circle of the given center and radius, from the
/// wrapped angle increments over at least 256 bilinear samples.
pub fn winding_number(u: &VectorField2, center: Point, radius: f64) -> Result<i32> {
    if !(radius > 0.0) {
        return Err(Error::InvalidParams(format!("loop radius must be positive, got {radius}")));
    }
    let h = u.grid.h();
    let samples = ((TAU * radius / (0.25 * h)).ceil() as usize).max(256);
    let mut angles = Vec::with_capacity(samples);
    for k in 0..samples {
        let t = TAU * k as f64 / samples as f64;
        let x = [center[0] + radius * t.cos(), center[1] + radius * t.sin()];
        let v = u.sample(x).ok_or(Error::OutsideGrid(x))?;
        if v[0].hypot(v[1]) < AMP_FLOOR {
            return Err(Error::LoopThroughZero(x));
        }
        angles.push(v[1].atan2(v[0]));
    }
    let mut total = 0.0;
    let mut largest = 0.0_f64;
    for k in 0..samples {
        let mut d = angles[(k + 1) % samples] - angles[k];
        d -= TAU * (d / TAU).round();
        largest = largest.max(d.abs());
        total += d;
    }
    let turns = total / TAU;
    let defect = (turns - turns.round()).abs();
    if defect > 0.05 {
        return Err(Error::IllConditionedLoop(defect));
    }
    // an increment near half a turn means the loop is undersampled
    if largest > 0.5 * PI {
        return Err(Error::IllConditionedLoop(largest / TAU));
    }
    Ok(turns.round() as i32)
}

/// Root of the bilinear interpolant in the unit cell, if it lies inside.
fn bilinear_root(c: [[f64; 2]; 4]) -> Option<(f64, f64)> {
    let [v00, v10, v01, v11] = c;
    let eval = |s: f64, t: f64| -> [f64; 2] {
        let mut out = [0.0; 2];
        for k in 0..2 {
            out[k] = v00[k] * (1.0 - s) * (1.0 - t)
                + v10[k] * s * (1.0 - t)
                + v01[k] * (1.0 - s) * t
                + v11[k] * s * t;
        }
        out
    };
    let scale = c.iter().map(|v| v[0].hypot(v[1])).fold(0.0, f64::max);
    if scale == 0.0 {
        return Some((0.5, 0.5));
    }
    let (mut s, mut t) = (0.5, 0.5);
    for _ in 0..60 {
        let f = eval(s, t);
        let mut j = [[0.0; 2]; 2];
        for k in 0..2 {
            j[k][0] = (v10[k] - v00[k]) * (1.0 - t) + (v11[k] - v01[k]) * t;
            j[k][1] = (v01[k] - v00[k]) * (1.0 - s) + (v11[k] - v10[k]) * s;
        }
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let ds = (f[0] * j[1][1] - f[1] * j[0][1]) / det;
        let dt = (j[0][0] * f[1] - j[1][0] * f[0]) / det;
        s -= ds;
        t -= dt;
        if !(s.is_finite() && t.is_finite()) || s.abs() > 10.0 || t.abs() > 10.0 {
            return None;
        }
        if ds.abs() + dt.abs() < 1e-14 {
            break;
        }
    }
    let f = eval(s, t);
    let inside = (-1e-9..=1.0 + 1e-9).contains(&s) && (-1e-9..=1.0 + 1e-9).contains(&t);
    (inside && f[0].hypot(f[1]) <= 1e-9 * scale).then_some((s.clamp(0.0, 1.0), t.clamp(0.0, 1.0)))
}

fn straddles(a: &[f64; 4]) -> bool {
    let lo = a.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = a.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    lo <= 0.0 && hi >= 0.0 && hi > lo
}

/// Zeros with nonzero degree. Candidates are cells where both components
/// change sign (refined by the bilinear root) and nodes where `|u|` is a
/// local minimum below `amp_tol`; each gets its degree from a loop of radius
/// `4h` (falling back to `8h`), and candidates whose loops fail or whose
/// degree is zero are dropped.
pub fn find_zeros(u: &VectorField2, amp_tol: f64) -> Vec<Zero> {
    let grid = u.grid;
    let n = grid.n;
    let h = grid.h();
    let amp = |i: usize, j: usize| {
        let v = u.at(i, j);
        v[0].hypot(v[1])
    };
    let mut cands: Vec<(Point, f64)> = vec![];
    for j in 0..n - 1 {
        for i in 0..n - 1 {
            let c = [u.at(i, j), u.at(i + 1, j), u.at(i, j + 1), u.at(i + 1, j + 1)];
            if !straddles(&c.map(|v| v[0])) || !straddles(&c.map(|v| v[1])) {
                continue;
            }
            if let Some((s, t)) = bilinear_root(c) {
                let x = [grid.coord(i) + s * h, grid.coord(j) + t * h];
                cands.push((x, 0.0));
            }
        }
    }
    for j in 1..n - 1 {
        for i in 1..n - 1 {
            let a = amp(i, j);
            if a >= amp_tol {
                continue;
            }
            let is_min = (-1i64..=1).all(|dj| {
                (-1i64..=1).all(|di| {
                    (di == 0 && dj == 0) || a <= amp((i as i64 + di) as usize, (j as i64 + dj) as usize)
                })
            });
            if is_min {
                cands.push((grid.point(i, j), a));
            }
        }
    }
    let margin = 8.0 * h + h;
    let lim = grid.half_width - margin;
    let mut zeros: Vec<Zero> = vec![];
    for (x, _) in cands {
        if x[0].abs() > lim || x[1].abs() > lim {
            continue;
        }
        if zeros.iter().any(|z| (z.location[0] - x[0]).hypot(z.location[1] - x[1]) < 3.0 * h) {
            continue;
        }
        let w = winding_number(u, x, 4.0 * h).or_else(|_| winding_number(u, x, 8.0 * h));
        let Ok(w) = w else { continue };
        if w == 0 {
            continue;
        }
        zeros.push(Zero {
            location: x,
            winding: w,
            core_dip: core_dip(u, x),
        });
    }
    zeros
}

fn core_dip(u: &VectorField2, x: Point) -> f64 {
    let mut m = f64::INFINITY;
    nodes_within(u, x, 3.0 * u.grid.h(), |i, j| {
        let v = u.at(i, j);
        m = m.min(v[0].hypot(v[1]));
    });
    m
}

/// Calls `f(i, j)` for every node within distance `r` of `x`.
fn nodes_within(u: &VectorField2, x: Point, r: f64, mut f: impl FnMut(usize, usize)) {
    let g = u.grid;
    let h = g.h();
    let n = g.n as i64;
    let lo = |c: f64| (((c - r + g.half_width) / h).floor() as i64).clamp(0, n - 1) as usize;
    let hi = |c: f64| (((c + r + g.half_width) / h).ceil() as i64).clamp(0, n - 1) as usize;
    for j in lo(x[1])..=hi(x[1]) {
        for i in lo(x[0])..=hi(x[0]) {
            let p = g.point(i, j);
            if (p[0] - x[0]).hypot(p[1] - x[1]) <= r {
                f(i, j);
            }
        }
    }
}

/// Minimum of `u.x/(|u||x|)` over nodes with `r_in <= |x| <= r_out`.
pub fn alignment(u: &VectorField2, r_in: f64, r_out: f64) -> Result<f64> {
    if !(r_in < r_out) {
        return Err(Error::InvalidParams(format!("need r_in < r_out, got {r_in} >= {r_out}")));
    }
    let mut m = f64::INFINITY;
    let mut bad = vec![];
    for j in 0..u.grid.n {
        for i in 0..u.grid.n {
            let x = u.grid.point(i, j);
            let r = x[0].hypot(x[1]);
            if r < r_in || r > r_out {
                continue;
            }
            let v = u.at(i, j);
            let a = v[0].hypot(v[1]);
            if a < AMP_FLOOR {
                bad.push(x);
                continue;
            }
            m = m.min((v[0] * x[0] + v[1] * x[1]) / (a * r));
        }
    }
    if !bad.is_empty() {
        return Err(Error::ZeroAmplitude(bad));
    }
    if m == f64::INFINITY {
        return Err(Error::InvalidParams("annulus contains no grid nodes".into()));
    }
    Ok(m.clamp(-1.0, 1.0))
}

/// `sup | |u| - sqrt(mu) |` over nodes with `|x| <= r_frac rho`.
pub fn tf_deviation(u: &VectorField2, params: &ModelParams, r_frac: f64) -> f64 {
    let r_max = r_frac * params.rho;
    let mut m = 0.0_f64;
    for j in 0..u.grid.n {
        for i in 0..u.grid.n {
            let x = u.grid.point(i, j);
            if x[0].hypot(x[1]) > r_max {
                continue;
            }
            let v = u.at(i, j);
            let tf = mu_eval(params, x).max(0.0).sqrt();
            m = m.max((v[0].hypot(v[1]) - tf).abs());
        }
    }
    m
}

/// `sup |u| / (sqrt(mu^+) + eps^{1/3})`.
pub fn bound_constant(u: &VectorField2, params: &ModelParams) -> f64 {
    let e3 = params.epsilon.cbrt();
    let mut k = 0.0_f64;
    for j in 0..u.grid.n {
        for i in 0..u.grid.n {
            let x = u.grid.point(i, j);
            let v = u.at(i, j);
            k = k.max(v[0].hypot(v[1]) / (mu_eval(params, x).max(0.0).sqrt() + e3));
        }
    }
    k
}

/// Relative deviation of `u/eps` from `-(a/mu_rad(r0)) f` on the circle
/// `|x| = r0`; `None` at `a = 0` where the normalizer vanishes.
pub fn outer_check(u: &VectorField2, params: &ModelParams, r0: f64) -> Result<Option<f64>> {
    if !(r0 > params.rho + 0.2) {
        return Err(Error::InvalidParams(format!("r0 must exceed rho + 0.2, got {r0}")));
    }
    if params.a == 0.0 {
        return Ok(None);
    }
    let mu = params.mu_rad(r0);
    let norm = params.a * params.f_rad(r0) / mu.abs();
    let samples = 720;
    let mut dev = 0.0_f64;
    for k in 0..samples {
        let t = TAU * k as f64 / samples as f64;
        let x = [r0 * t.cos(), r0 * t.sin()];
        let v = u.sample(x).ok_or(Error::OutsideGrid(x))?;
        let f = f_eval(params, x);
        let d = [
            v[0] / params.epsilon + params.a / mu * f[0],
            v[1] / params.epsilon + params.a / mu * f[1],
        ];
        dev = dev.max(d[0].hypot(d[1]) / norm);
    }
    Ok(Some(dev))
}

/// Standard vortex profile on `[0, 25]`, computed once.
pub fn standard_vortex_profile() -> &'static RadialProfile {
    static ETA: OnceLock<RadialProfile> = OnceLock::new();
    ETA.get_or_init(|| {
        solve_gl_vortex(&RadialGrid::new(25.0, 10_001).expect("valid grid"))
            .expect("standard vortex solve converges")
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoreMatch {
    /// `||u - g m|| / ||m||` over the sampled nodes.
    pub misfit: f64,
    /// The best `g` includes a reflection.
    pub reflected: bool,
    /// Rotation angle of `g`.
    pub angle: f64,
}

/// Compares `u` near a zero with `sqrt(mu(l)) eta(sqrt(mu(l)) s)`,
/// `x = l + eps s`, over the grid nodes with `|s| <= 5`, after the best fit
/// of `g` in `O(2)` acting on values.
pub fn core_profile_match(u: &VectorField2, zero: &Zero, params: &ModelParams) -> Result<CoreMatch> {
    core_profile_match_with(u, zero, params, standard_vortex_profile())
}

pub fn core_profile_match_with(
    u: &VectorField2,
    zero: &Zero,
    params: &ModelParams,
    eta: &RadialProfile,
) -> Result<CoreMatch> {
    if zero.winding.abs() != 1 {
        return Err(Error::InvalidParams(format!(
            "core matching needs degree +-1, got {}",
            zero.winding
        )));
    }
    let l = zero.location;
    let mu_l = mu_eval(params, l);
    if mu_l <= 0.1 {
        return Err(Error::CoreOutsideValidity(mu_l));
    }
    let a = mu_l.sqrt();
    let eps = params.epsilon;
    let mut pairs: Vec<([f64; 2], [f64; 2])> = vec![];
    let mut outside = None;
    nodes_within(u, l, 5.0 * eps, |i, j| {
        let x = u.grid.point(i, j);
        let s = [(x[0] - l[0]) / eps, (x[1] - l[1]) / eps];
        let r = s[0].hypot(s[1]);
        let model = if r == 0.0 {
            [0.0, 0.0]
        } else {
            match eta.value_at(a * r) {
                Some(e) => [a * e * s[0] / r, a * e * s[1] / r],
                None => {
                    outside = Some(x);
                    [0.0, 0.0]
                }
            }
        };
        pairs.push((u.at(i, j), model));
    });
    if let Some(x) = outside {
        return Err(Error::OutsideGrid(x));
    }
    // Procrustes fit over rotations, with and without a conjugation
    let fit = |conj: bool| {
        let (mut c, mut s) = (0.0, 0.0);
        for (v, m) in &pairs {
            let m = if conj { [m[0], -m[1]] } else { *m };
            c += v[0] * m[0] + v[1] * m[1];
            s += m[0] * v[1] - m[1] * v[0];
        }
        let angle = s.atan2(c);
        let (ca, sa) = (angle.cos(), angle.sin());
        let (mut res, mut mm) = (0.0, 0.0);
        for (v, m) in &pairs {
            let m = if conj { [m[0], -m[1]] } else { *m };
            let g = [ca * m[0] - sa * m[1], sa * m[0] + ca * m[1]];
            res += (v[0] - g[0]).powi(2) + (v[1] - g[1]).powi(2);
            mm += m[0] * m[0] + m[1] * m[1];
        }
        ((res / mm).sqrt(), angle)
    };
    let (m0, a0) = fit(false);
    let (m1, a1) = fit(true);
    Ok(if m1 < m0 {
        CoreMatch { misfit: m1, reflected: true, angle: a1 }
    } else {
        CoreMatch { misfit: m0, reflected: false, angle: a0 }
    })
}

/// Maximum of `|u|` over nodes within `r` of `x`.
fn max_amplitude_near(u: &VectorField2, x: Point, r: f64) -> f64 {
    let mut m = 0.0_f64;
    nodes_within(u, x, r, |i, j| {
        let v = u.at(i, j);
        m = m.max(v[0].hypot(v[1]));
    });
    m
}

/// Applies the decision table with precedence
/// Center > OffCenter > Shadow > NoZero.
pub fn classify(
    u: &VectorField2,
    zeros: &[Zero],
    params: &ModelParams,
    th: &ClassifyThresholds,
) -> Phase {
    let mut evidence = vec![("zero_count".to_string(), zeros.len() as f64)];
    if zeros.is_empty() {
        return Phase {
            label: PhaseLabel::NoZero,
            ambiguous: false,
            evidence,
        };
    }
    let rho = params.rho;
    let sqrt_mu0 = (1.0 - params.chi).sqrt();
    let mut shadow = true;
    let mut center = false;
    let mut off_center = false;
    for (k, z) in zeros.iter().enumerate() {
        let r = z.radius();
        let core_amp = max_amplitude_near(u, z.location, 3.0 * params.epsilon);
        evidence.push((format!("zero{k}.radius"), r));
        evidence.push((format!("zero{k}.core_amp"), core_amp));
        if !(r >= rho - th.band && core_amp <= th.shadow_amp_frac * sqrt_mu0) {
            shadow = false;
        }
        if z.winding.abs() == 1 {
            if let Ok(m) = core_profile_match(u, z, params) {
                evidence.push((format!("zero{k}.core_misfit"), m.misfit));
                if m.misfit <= th.match_budget {
                    if r <= th.center_frac * rho {
                        center = true;
                    } else if r < rho - th.band {
                        off_center = true;
                    }
                }
            }
        }
    }
    let fired = [center, off_center, shadow];
    let count = fired.iter().filter(|f| **f).count();
    let label = if center {
        PhaseLabel::StandardVortexCenter
    } else if off_center {
        PhaseLabel::StandardVortexOffCenter
    } else if shadow {
        PhaseLabel::ShadowVortex
    } else {
        PhaseLabel::Unresolved
    };
    Phase {
        label,
        ambiguous: count > 1,
        evidence,
    }
}

/// All diagnostics with the given options.
pub fn analyze(u: &VectorField2, params: &ModelParams, opts: &AnalyzeOptions) -> Result<AnalysisReport> {
    if !u.is_finite() {
        return Err(Error::NonFiniteField);
    }
    let amp_tol = opts.amp_tol.unwrap_or_else(|| default_amp_tol(params));
    let zeros = find_zeros(u, amp_tol);
    let (r_in, r_out) = opts
        .align_annulus
        .unwrap_or((params.rho + 2.0 * params.epsilon.powf(2.0 / 3.0), params.rho + 0.4));
    let alignment_min = alignment(u, r_in, r_out).ok();
    let r0 = opts.outer_r0.unwrap_or(params.rho + 0.5);
    let outer_dev = outer_check(u, params, r0).ok().flatten();
    let total_winding = winding_number(u, [0.0, 0.0], params.rho + 0.3).ok();
    let phase = classify(u, &zeros, params, &opts.thresholds);
    Ok(AnalysisReport {
        tf_sup_dev: tf_deviation(u, params, opts.tf_r_frac),
        bound_k: bound_constant(u, params),
        zeros,
        alignment_min,
        outer_dev,
        total_winding,
        phase,
    })
}
