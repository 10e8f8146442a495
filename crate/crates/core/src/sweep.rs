//! Phase-plane sweeps over `(eps, a)` along the critical scalings
//! `a = b eps |ln eps|` and `a = b eps |ln eps|^2`.

use std::path::Path;

use rayon::prelude::*;

use crate::analyze::{analyze, AnalysisReport, AnalyzeOptions, PhaseLabel};
use crate::error::{Error, Result};
use crate::fields::{energy, GridSpec, ModelParams, VectorField2};
use crate::io::{fmt_f64, key_values, write_text, write_vector_field};
use crate::minimize::{multistart_global, MinimizeOptions, SeedKind};
use crate::radial::{solve_equivariant_radial, solve_scalar_radial, RadialGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scaling {
    /// `a = b eps |ln eps|`.
    LinearLog,
    /// `a = b eps |ln eps|^2`.
    SquareLog,
    /// `a = b`.
    Raw,
}

impl Scaling {
    pub fn a(&self, eps: f64, b: f64) -> f64 {
        let l = eps.ln().abs();
        match self {
            Scaling::LinearLog => b * eps * l,
            Scaling::SquareLog => b * eps * l * l,
            Scaling::Raw => b,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Scaling::LinearLog => "linear_log",
            Scaling::SquareLog => "square_log",
            Scaling::Raw => "raw",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "linear_log" => Ok(Scaling::LinearLog),
            "square_log" => Ok(Scaling::SquareLog),
            "raw" => Ok(Scaling::Raw),
            _ => Err(Error::InvalidParams(format!(
                "unknown scaling {s:?} (expected linear_log, square_log or raw)"
            ))),
        }
    }
}

/// How the grid is chosen for each `eps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPolicy {
    /// Half width is `rho + margin`.
    pub margin: f64,
    /// Points per side; `None` picks the smallest `2^k + 1` with `h <= eps/3`.
    pub n: Option<usize>,
}

impl Default for GridPolicy {
    fn default() -> Self {
        Self { margin: 3.0, n: None }
    }
}

impl GridPolicy {
    pub fn grid(&self, params: &ModelParams) -> Result<GridSpec> {
        let n = match self.n {
            Some(n) => n,
            None => {
                let l = params.rho + self.margin;
                let mut n = 129;
                while 2.0 * l / (n - 1) as f64 > params.epsilon / 3.0 && n < 4097 {
                    n = 2 * n - 1;
                }
                n
            }
        };
        GridSpec::around_interface(params, self.margin, n)
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub epsilons: Vec<f64>,
    pub scaling: Scaling,
    /// `b` values, or `a` values for [`Scaling::Raw`].
    pub b_values: Vec<f64>,
    pub seeds: Vec<SeedKind>,
    /// Also seed each point from the previous `b`'s minimizer.
    pub continuation: bool,
    pub chi: f64,
    pub grid: GridPolicy,
    pub minimize: MinimizeOptions,
    pub analyze: AnalyzeOptions,
    /// Keep the minimizers in the rows (needed to write field files).
    pub keep_fields: bool,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.epsilons.is_empty() || self.b_values.is_empty() || self.seeds.is_empty() {
            return Err(Error::InvalidParams("sweep lists must be nonempty".into()));
        }
        if let Some(e) = self.epsilons.iter().find(|e| !(**e > 0.0 && **e < 1.0)) {
            return Err(Error::InvalidParams(format!("sweep epsilons must lie in (0,1), got {e}")));
        }
        if let Some(b) = self.b_values.iter().find(|b| !(**b >= 0.0 && b.is_finite())) {
            return Err(Error::InvalidParams(format!("b values must be nonnegative, got {b}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub epsilon: f64,
    pub a: f64,
    pub b: f64,
    pub energy_2d: f64,
    pub energy_equivariant: f64,
    pub symmetry_gap: f64,
    pub phase: Option<PhaseLabel>,
    pub report: Option<AnalysisReport>,
    pub best_seed: String,
    /// Energy reached from the continuation seed, when used.
    pub warm_energy: Option<f64>,
    /// `"ok"` or the error that stopped this point.
    pub status: String,
    pub field: Option<VectorField2>,
}

impl SweepRow {
    fn failed(epsilon: f64, a: f64, b: f64, err: &Error) -> Self {
        Self {
            epsilon,
            a,
            b,
            energy_2d: f64::NAN,
            energy_equivariant: f64::NAN,
            symmetry_gap: f64::NAN,
            phase: None,
            report: None,
            best_seed: String::new(),
            warm_energy: None,
            status: format!("error: {err}"),
            field: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub scaling: Scaling,
    pub rows: Vec<SweepRow>,
}

/// Energy of the best radially structured competitor on the 2D grid: the
/// injected equivariant profile, and at `a = 0` also the scalar profile.
pub fn radial_reference_energy(params: &ModelParams, grid: &GridSpec) -> Result<f64> {
    let rg = RadialGrid::covering(params, grid)?;
    let eq = solve_equivariant_radial(params, &rg)?;
    let mut e = energy(&eq.inject_equivariant(*grid), params)?;
    if params.a == 0.0 {
        let sc = solve_scalar_radial(params, &rg)?;
        e = e.min(energy(&sc.inject_scalar(*grid), params)?);
    }
    Ok(e)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryGap {
    pub energy_2d: f64,
    pub energy_radial: f64,
    /// `energy_radial - energy_2d`.
    pub gap: f64,
    /// `gap > 1e-5 |energy_2d|`.
    pub broken: bool,
}

pub const GAP_REL_TOL: f64 = 1e-5;

pub fn symmetry_gap(
    params: &ModelParams,
    grid: GridSpec,
    opts: &MinimizeOptions,
    seeds: &[SeedKind],
) -> Result<SymmetryGap> {
    let best = multistart_global(params, grid, opts, seeds)?.best;
    let energy_radial = radial_reference_energy(params, &grid)?;
    let gap = energy_radial - best.energy;
    Ok(SymmetryGap {
        energy_2d: best.energy,
        energy_radial,
        gap,
        broken: gap > GAP_REL_TOL * best.energy.abs(),
    })
}

fn run_point(
    spec: &SweepSpec,
    eps: f64,
    b: f64,
    warm: Option<&VectorField2>,
) -> (SweepRow, Option<VectorField2>) {
    let a = spec.scaling.a(eps, b);
    let attempt = || -> Result<(SweepRow, VectorField2)> {
        let params = ModelParams::new(eps, a, spec.chi)?;
        let grid = spec.grid.grid(&params)?;
        let mut seeds = spec.seeds.clone();
        if let Some(w) = warm {
            seeds.push(SeedKind::Field(Box::new(w.clone())));
        }
        let ms = multistart_global(&params, grid, &spec.minimize, &seeds)?;
        let warm_energy = warm.map(|_| ms.outcomes.last().unwrap().energy);
        let e_rad = radial_reference_energy(&params, &grid)?;
        let report = analyze(&ms.best.field, &params, &spec.analyze)?;
        let field = ms.best.field;
        Ok((
            SweepRow {
                epsilon: eps,
                a,
                b,
                energy_2d: ms.best.energy,
                energy_equivariant: e_rad,
                symmetry_gap: e_rad - ms.best.energy,
                phase: Some(report.phase.label),
                report: Some(report),
                best_seed: ms.outcomes[ms.best_index].seed.clone(),
                warm_energy,
                status: "ok".into(),
                field: spec.keep_fields.then(|| field.clone()),
            },
            field,
        ))
    };
    match attempt() {
        Ok((row, f)) => (row, Some(f)),
        Err(e) => (SweepRow::failed(eps, a, b, &e), None),
    }
}

/// Runs every `(eps, b)` point. Columns of fixed `eps` are independent jobs;
/// with continuation each column is walked in increasing `b`. Rows come out
/// sorted by `(eps, b)` whatever the worker count.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let mut bs = spec.b_values.clone();
    bs.sort_by(f64::total_cmp);
    let mut rows: Vec<SweepRow> = if spec.continuation {
        spec.epsilons
            .par_iter()
            .map(|&eps| {
                let mut warm: Option<VectorField2> = None;
                let mut out = vec![];
                for &b in &bs {
                    let (row, f) = run_point(spec, eps, b, warm.as_ref());
                    if f.is_some() {
                        warm = f;
                    }
                    out.push(row);
                }
                out
            })
            .flatten()
            .collect()
    } else {
        let points: Vec<(f64, f64)> = spec
            .epsilons
            .iter()
            .flat_map(|&e| bs.iter().map(move |&b| (e, b)))
            .collect();
        points.par_iter().map(|&(e, b)| run_point(spec, e, b, None).0).collect()
    };
    rows.sort_by(|x, y| x.epsilon.total_cmp(&y.epsilon).then(x.b.total_cmp(&y.b)));
    Ok(SweepResult {
        scaling: spec.scaling,
        rows,
    })
}

pub const CSV_COLUMNS: &str = "epsilon,a,b,energy_2d,energy_equivariant,symmetry_gap,phase,zero_radii,tf_sup_dev,alignment_min,bound_k,outer_dev,best_seed,warm_energy,status";

impl SweepResult {
    pub fn to_csv(&self) -> String {
        let mut s = format!("# scaling = {}\n{CSV_COLUMNS}\n", self.scaling.name());
        for r in &self.rows {
            let (radii, tf, al, k, out) = match &r.report {
                Some(rep) => {
                    let radii: Vec<String> = rep.zeros.iter().map(|z| fmt_f64(z.radius())).collect();
                    (
                        radii.join(";"),
                        fmt_f64(rep.tf_sup_dev),
                        rep.alignment_min.map_or("undefined".into(), fmt_f64),
                        fmt_f64(rep.bound_k),
                        rep.outer_dev.map_or("undefined".into(), fmt_f64),
                    )
                }
                None => Default::default(),
            };
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                fmt_f64(r.epsilon),
                fmt_f64(r.a),
                fmt_f64(r.b),
                fmt_f64(r.energy_2d),
                fmt_f64(r.energy_equivariant),
                fmt_f64(r.symmetry_gap),
                r.phase.map_or("", |p| p.as_str()),
                radii,
                tf,
                al,
                k,
                out,
                r.best_seed.replace(',', ";"),
                r.warm_energy.map_or(String::new(), fmt_f64),
                r.status.replace(',', ";"),
            ));
        }
        s
    }

    /// Gnuplot script drawing the phase labels in the `(eps, b)` plane from
    /// the CSV written next to it.
    pub fn gnuplot_script(&self, csv_name: &str) -> String {
        format!(
            "# phase diagram from {csv_name}\n\
             set datafile separator ','\n\
             set xlabel 'epsilon'\n\
             set ylabel 'b ({scaling})'\n\
             set logscale x\n\
             set key outside\n\
             code(s) = s eq 'NoZero' ? 0 : s eq 'ShadowVortex' ? 1 : s eq 'StandardVortexOffCenter' ? 2 : s eq 'StandardVortexCenter' ? 3 : 4\n\
             set cbrange [0:4]\n\
             set cbtics ('NoZero' 0, 'Shadow' 1, 'OffCenter' 2, 'Center' 3, 'Unresolved' 4)\n\
             plot '{csv_name}' using 1:3:(code(strcol(7))) with points pt 7 ps 2 palette notitle\n\
             pause mouse close\n",
            scaling = self.scaling.name()
        )
    }

    /// Writes `sweep.csv`, `phase.gp`, and per-point field and report files
    /// under `dir/fields`.
    pub fn write_outputs(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir.join("fields")).map_err(|e| Error::io(dir, e))?;
        write_text(dir.join("sweep.csv"), &self.to_csv())?;
        write_text(dir.join("phase.gp"), &self.gnuplot_script("sweep.csv"))?;
        for r in &self.rows {
            let stem = format!("eps{}_b{}", r.epsilon, r.b);
            if let Some(f) = &r.field {
                write_vector_field(dir.join("fields").join(format!("{stem}.glnf")), f)?;
            }
            let mut kv = vec![
                ("epsilon".to_string(), fmt_f64(r.epsilon)),
                ("a".to_string(), fmt_f64(r.a)),
                ("b".to_string(), fmt_f64(r.b)),
                ("energy_2d".to_string(), fmt_f64(r.energy_2d)),
                ("energy_equivariant".to_string(), fmt_f64(r.energy_equivariant)),
                ("symmetry_gap".to_string(), fmt_f64(r.symmetry_gap)),
                ("best_seed".to_string(), r.best_seed.clone()),
                ("status".to_string(), r.status.clone()),
            ];
            if let Some(rep) = &r.report {
                kv.extend(rep.key_values());
            }
            write_text(dir.join("fields").join(format!("{stem}.report")), &key_values(&kv))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionEstimate {
    pub epsilon: f64,
    /// Midpoint of the last `from` value before the first `to` value.
    pub b: f64,
    /// `from` reappears after the crossing.
    pub non_monotone: bool,
}

/// First `from -> to` crossing along `b` in the column of `epsilon`.
pub fn transition_estimate_at(
    result: &SweepResult,
    epsilon: f64,
    from: PhaseLabel,
    to: PhaseLabel,
) -> Result<TransitionEstimate> {
    let mut col: Vec<&SweepRow> = result.rows.iter().filter(|r| r.epsilon == epsilon).collect();
    col.sort_by(|x, y| x.b.total_cmp(&y.b));
    let mut last_from = None;
    for (k, r) in col.iter().enumerate() {
        if r.phase == Some(from) {
            last_from = Some(r.b);
        } else if r.phase == Some(to) {
            if let Some(bf) = last_from {
                let non_monotone = col[k + 1..].iter().any(|r| r.phase == Some(from));
                return Ok(TransitionEstimate {
                    epsilon,
                    b: 0.5 * (bf + r.b),
                    non_monotone,
                });
            }
        }
    }
    Err(Error::NoTransition)
}

/// [`transition_estimate_at`] for every `eps` in the result.
pub fn transition_estimate(
    result: &SweepResult,
    from: PhaseLabel,
    to: PhaseLabel,
) -> Vec<(f64, Result<TransitionEstimate>)> {
    let mut eps: Vec<f64> = result.rows.iter().map(|r| r.epsilon).collect();
    eps.sort_by(f64::total_cmp);
    eps.dedup();
    eps.into_iter()
        .map(|e| (e, transition_estimate_at(result, e, from, to)))
        .collect()
}
