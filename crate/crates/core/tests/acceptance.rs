//! Acceptance checks. Prints one line per criterion and exits nonzero if any
//! criterion fails. Run with `cargo test --test acceptance`.

mod common;

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use glnematic::analyze::{self, AnalysisReport, AnalyzeOptions, PhaseLabel};
use glnematic::fields::{el_residual, energy, renormalized_energy, GridSpec, ModelParams, VectorField2};
use glnematic::minimize::{multistart_global, MinimizeOptions, MultistartResult, SeedKind};
use glnematic::painleve::{extract_layer, solve_p2, Branch, PainleveSpec, WindowSpec};
use glnematic::radial::{solve_scalar_radial, RadialGrid};
use glnematic::sweep::{radial_reference_energy, run_sweep, GridPolicy, Scaling, SweepSpec};
use glnematic::Result;
use rand::Rng;

const CHI: f64 = 0.5;

struct Run {
    params: ModelParams,
    ms: MultistartResult,
    report: AnalysisReport,
}

fn run(eps: f64, a: f64, margin: f64, n: usize, seeds: &[SeedKind]) -> Result<Run> {
    let t = Instant::now();
    let params = ModelParams::new(eps, a, CHI)?;
    let grid = GridSpec::around_interface(&params, margin, n)?;
    let ms = multistart_global(&params, grid, &MinimizeOptions::default(), seeds)?;
    let report = analyze::analyze(&ms.best.field, &params, &AnalyzeOptions::default())?;
    eprintln!(
        "  minimized eps={eps} a={a:.5} n={n}: E={:.10} best={} ({:.1}s)",
        ms.best.energy,
        ms.outcomes[ms.best_index].seed,
        t.elapsed().as_secs_f64()
    );
    Ok(Run { params, ms, report })
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn gradient_consistency() -> Result<Outcome> {
    let params = ModelParams::new(0.1, 0.5, CHI)?;
    let grid = GridSpec::around_interface(&params, 1.5, 65)?;
    let h2 = grid.h() * grid.h();
    let scale = h2 / (params.epsilon * params.epsilon);
    let t = 1e-5;
    let mut worst = 0.0_f64;
    let mut rng = common::rng(11);
    for _ in 0..10 {
        let u = common::random_smooth_field(grid, &mut rng, 6);
        let psi = common::random_smooth_field(grid, &mut rng, 6);
        let r = el_residual(&u, &params);
        let analytic: f64 = -scale
            * (0..grid.len())
                .map(|k| r.u1[k] * psi.u1[k] + r.u2[k] * psi.u2[k])
                .sum::<f64>();
        let fd = (energy(&u.add_scaled(t, &psi), &params)? - energy(&u.add_scaled(-t, &psi), &params)?)
            / (2.0 * t);
        worst = worst.max((analytic - fd).abs() / analytic.abs().max(fd.abs()));
    }
    outcome(worst <= 1e-6, format!("max relative mismatch {worst:.2e}"))
}

fn identity_test(r: &Run) -> Result<Outcome> {
    let u = &r.ms.best.field;
    let mut rng = common::rng(22);
    let mut worst = 0.0_f64;
    for _ in 0..10 {
        let raw = common::random_smooth_field(u.grid, &mut rng, 5);
        let psi = VectorField2::zeros(u.grid).add_scaled(1.0 / raw.l2_norm(), &raw);
        let (actual, predicted) = glnematic::minimize::energy_difference_check(u, &psi, &r.params)?;
        worst = worst.max((actual - predicted).abs() / (1.0 + actual.abs()));
    }
    outcome(
        worst <= 1e-6,
        format!("max |dE - predicted|/(1+|dE|) = {worst:.2e}, residual {:.1e}", r.ms.best.residual_sup),
    )
}

fn a0_structure(r: &Run) -> Result<Outcome> {
    let u = &r.ms.best.field;
    let g = u.grid;
    let profile = solve_scalar_radial(&r.params, &RadialGrid::covering(&r.params, &g)?)?;
    let j = (g.n - 1) / 2;
    let mut sup = 0.0_f64;
    for i in 0..g.n {
        let x = g.point(i, j);
        let y = profile.value_at(x[0].abs()).unwrap_or(0.0);
        let v = u.at(i, j);
        sup = sup.max((v[0] - y).hypot(v[1]));
    }
    let e_tf = r.ms.outcomes[0].energy;
    let e_rand = r.ms.outcomes.iter().find(|o| o.seed == "random(1)").map_or(f64::NAN, |o| o.energy);
    let rel = (e_tf - e_rand).abs() / e_tf.abs();
    let zeros = r.report.zeros.len();
    outcome(
        zeros == 0 && sup <= 1e-3 && rel <= 1e-6,
        format!("zeros {zeros}, section sup error {sup:.2e}, seed energy gap {rel:.2e}"),
    )
}

fn thomas_fermi(runs: &[Run]) -> Result<Outcome> {
    let d: Vec<f64> = runs.iter().map(|r| r.report.tf_sup_dev).collect();
    let decreasing = d.windows(2).all(|w| w[1] < w[0]);
    outcome(
        decreasing && d[2] <= 0.05,
        format!("tf deviation {:.4} > {:.4} > {:.4}", d[0], d[1], d[2]),
    )
}

fn uniform_bound(runs: &[Run]) -> Result<Outcome> {
    let k: Vec<f64> = runs.iter().map(|r| r.report.bound_k).collect();
    outcome(
        k.iter().all(|v| *v <= 1.5),
        format!("K = {:.4}, {:.4}, {:.4}", k[0], k[1], k[2]),
    )
}

fn renormalized_bound(runs: &[Run]) -> Result<Outcome> {
    let mut d = vec![];
    for r in runs {
        let p = &r.params;
        let lead = PI * p.mu1.abs() * p.rho / 6.0 * p.epsilon.ln().abs();
        d.push(renormalized_energy(&r.ms.best.field, p)? - lead);
    }
    let c = d[0];
    outcome(
        d[1] <= c + 0.5 && d[2] <= c + 0.5,
        format!("C = {:.4}, others {:.4}, {:.4}", c, d[1], d[2]),
    )
}

fn shadow(r: &Run) -> Result<Outcome> {
    let rho = r.params.rho;
    let rep = &r.report;
    let near = rep.zeros.iter().filter(|z| (z.radius() - rho).abs() <= 0.1).count();
    let inner = rep.zeros.iter().filter(|z| z.radius() < rho / 2.0).count();
    let radii: Vec<String> = rep.zeros.iter().map(|z| format!("{:.3}", z.radius())).collect();
    let align = rep.alignment_min.unwrap_or(f64::NAN);
    let pass = near >= 1
        && rep.total_winding == Some(1)
        && inner == 0
        && align >= 0.9
        && rep.phase.label == PhaseLabel::ShadowVortex;
    outcome(
        pass,
        format!(
            "zero radii [{}] (rho {:.3}), winding {:?}, alignment {:.3}, label {}",
            radii.join(", "),
            rho,
            rep.total_winding,
            align,
            rep.phase.label
        ),
    )
}

fn center(r: &Run) -> Result<Outcome> {
    let rho = r.params.rho;
    let u = &r.ms.best.field;
    let z = r.report.zeros.iter().find(|z| z.radius() <= 0.2 * rho);
    let misfit = match z {
        Some(z) => analyze::core_profile_match(u, z, &r.params)?.misfit,
        None => f64::NAN,
    };
    outcome(
        z.is_some() && misfit <= 0.1 && r.report.phase.label == PhaseLabel::StandardVortexCenter,
        format!(
            "zero radius {:?}, core misfit {misfit:.4}, label {}",
            z.map(|z| z.radius()),
            r.report.phase.label
        ),
    )
}

fn symmetry(r: &Run) -> Result<Outcome> {
    let u = &r.ms.best.field;
    let e2 = r.ms.best.energy;
    let gap = radial_reference_energy(&r.params, &u.grid)? - e2;
    let q = u.quarter_turn_conjugate();
    let defect = q.add_scaled(-1.0, u).sup_norm() / u.sup_norm();
    outcome(
        gap <= 1e-5 * e2.abs() && defect <= 1e-3,
        format!("gap/|E| {:.2e}, equivariance defect {defect:.2e}", gap / e2.abs()),
    )
}

fn outer(r: &Run) -> Result<Outcome> {
    let dev = r.report.outer_dev.unwrap_or(f64::NAN);
    outcome(dev <= 0.1, format!("relative deviation {dev:.4}"))
}

fn painleve_branches() -> Result<Outcome> {
    let plus = solve_p2(&PainleveSpec::new(0.0, Branch::Plus, 10.0, 2001)?)?;
    let m = plus.values.len();
    let positive = plus.values[..m - 1].iter().all(|v| *v > 0.0);
    let res = plus.residual();
    let y0 = plus.value_at(0.0).unwrap();
    let oracle = common::p2_shooting_y0();
    let left = plus.values[0].powi(2) - 5.0;
    let minus = solve_p2(&PainleveSpec::new(-0.1, Branch::Minus, 10.0, 2001)?)?;
    let changes = minus.values.windows(2).filter(|w| w[0] * w[1] < 0.0).count();
    outcome(
        positive && res <= 1e-10 && (y0 - oracle).abs() <= 1e-6 && left.abs() <= 0.3 && changes == 1,
        format!(
            "residual {res:.1e}, y(0) {y0:.8} vs {oracle:.8}, y(-10)^2-5 = {left:.3}, minus sign changes {changes}"
        ),
    )
}

fn boundary_layer(r: &Run) -> Result<Outcome> {
    let win = extract_layer(
        &r.ms.best.field,
        &r.params,
        0.0,
        &WindowSpec { s1_range: (-2.0, 2.0), s2_range: (-0.1, 0.1), n1: 81, n2: 3 },
    )?;
    let y = solve_p2(&PainleveSpec::new(0.0, Branch::Plus, 10.0, 2001)?)?;
    let (mut err, mut ymax) = (0.0_f64, 0.0_f64);
    for i in 0..win.n1 {
        let w = win.at(i, 1);
        let yi = y.value_at(win.s1(i)).unwrap();
        err = err.max((w[0] - yi).hypot(w[1]));
        ymax = ymax.max(yi.abs());
    }
    outcome(err / ymax <= 0.05, format!("sup relative error {:.4}", err / ymax))
}

fn degree_oracles() -> Result<Outcome> {
    let grid = GridSpec::new(3.0, 193)?;
    let mut rng = common::rng(33);
    let mut wrong = 0;
    for k in 0..50 {
        let c = [rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)];
        let phi: f64 = rng.gen_range(0.0..2.0 * PI);
        let beta: f64 = rng.gen_range(0.0..PI);
        let (kind, mut degree) = (k % 4, [1, -1, -1, 0][k % 4]);
        let u = VectorField2::from_fn_everywhere(grid, |x| {
            let mut d = [x[0] - c[0], x[1] - c[1]];
            if kind == 2 {
                // reflect the domain across the line at angle beta
                let (s, co) = (2.0 * beta).sin_cos();
                d = [co * d[0] + s * d[1], s * d[0] - co * d[1]];
            }
            let r = d[0].hypot(d[1]).max(1e-12);
            let (s, co) = phi.sin_cos();
            let mut v = [(co * d[0] - s * d[1]) / r, (s * d[0] + co * d[1]) / r];
            if kind == 1 {
                v[1] = -v[1];
            }
            if kind == 3 {
                v = [co, s];
            }
            v
        });
        let rad = rng.gen_range(0.4..0.9);
        let enclose = rng.gen_bool(0.7);
        let off = if enclose { rng.gen_range(0.0..rad - 0.2) } else { rng.gen_range(rad + 0.2..rad + 0.5) };
        let ang: f64 = rng.gen_range(0.0..2.0 * PI);
        let center = [c[0] + off * ang.cos(), c[1] + off * ang.sin()];
        if !enclose {
            degree = 0;
        }
        let got = analyze::winding_number(&u, center, rad);
        if !matches!(got, Ok(w) if w == degree) {
            eprintln!("  field {k}: kind {kind}, expected {degree}, got {got:?}");
            wrong += 1;
        }
    }
    outcome(wrong == 0, format!("{wrong} of 50 mismatched"))
}

fn determinism() -> Result<Outcome> {
    let spec = SweepSpec {
        epsilons: vec![0.1, 0.08],
        scaling: Scaling::Raw,
        b_values: vec![0.0, 0.5, 2.0],
        seeds: vec![
            SeedKind::ThomasFermi,
            SeedKind::Vortex { center: [0.0, 0.0], degree: 1 },
            SeedKind::Random { rng_seed: 7 },
        ],
        continuation: true,
        chi: CHI,
        grid: GridPolicy { margin: 1.5, n: Some(129) },
        minimize: MinimizeOptions::default(),
        analyze: AnalyzeOptions::default(),
        keep_fields: false,
    };
    let csv = |threads: usize| -> Result<String> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        Ok(pool.install(|| run_sweep(&spec))?.to_csv())
    };
    let one = csv(1)?;
    let four = csv(4)?;
    let again = csv(4)?;
    outcome(
        one == four && four == again,
        format!("{} bytes, 1 vs 4 threads identical: {}", one.len(), one == four),
    )
}

fn main() -> ExitCode {
    // optional criterion numbers on the command line restrict the run
    let only: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let want = |ids: &[u32]| only.is_empty() || ids.iter().any(|i| only.contains(i));
    let started = Instant::now();
    let mut results: Vec<(u32, &str, Result<Outcome>)> = vec![];
    let mut record = |id: u32, name: &'static str, r: Result<Outcome>| {
        let line = match &r {
            Ok(o) => format!("[{}] {id:02} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail),
            Err(e) => format!("[FAIL] {id:02} {name}: error: {e}"),
        };
        println!("{line}");
        results.push((id, name, r));
    };

    if want(&[1]) {
        record(1, "gradient consistency", gradient_consistency());
    }
    if want(&[11]) {
        record(11, "painleve branches", painleve_branches());
    }
    if want(&[13]) {
        record(13, "degree oracles", degree_oracles());
    }
    if want(&[14]) {
        record(14, "determinism across thread counts", determinism());
    }

    if want(&[2, 3, 4, 5, 10]) {
        let a0: Result<Vec<Run>> = [(0.1, 1.5, 257), (0.05, 1.5, 513), (0.025, 1.25, 577)]
            .into_iter()
            .map(|(eps, margin, n)| run(eps, 0.0, margin, n, &SeedKind::standard_set()))
            .collect();
        match &a0 {
            Ok(runs) => {
                record(2, "identity at a critical point", identity_test(&runs[1]));
                record(3, "a=0 structure", a0_structure(&runs[1]));
                record(4, "thomas-fermi convergence", thomas_fermi(runs));
                record(5, "uniform bound", uniform_bound(runs));
                record(10, "renormalized energy bound", renormalized_bound(runs));
            }
            Err(e) => {
                for (id, name) in [
                    (2, "identity at a critical point"),
                    (3, "a=0 structure"),
                    (4, "thomas-fermi convergence"),
                    (5, "uniform bound"),
                    (10, "renormalized energy bound"),
                ] {
                    record(id, name, outcome(false, format!("error: {e}")));
                }
            }
        }
    }

    let eps = 0.02_f64;
    let le = eps.ln().abs();
    if want(&[6]) {
        record(
            6,
            "shadow vortex regime",
            run(eps, 0.2 * eps * le, 1.05, 577, &SeedKind::standard_set()).and_then(|r| shadow(&r)),
        );
    }
    if want(&[7]) {
        record(
            7,
            "standard center vortex",
            run(eps, 5.0 * eps * le * le, 1.05, 577, &SeedKind::standard_set()).and_then(|r| center(&r)),
        );
    }
    if want(&[8]) {
        record(
            8,
            "symmetry restoration",
            run(0.1, 10.0, 3.0, 257, &SeedKind::standard_set()).and_then(|r| symmetry(&r)),
        );
    }
    if want(&[9]) {
        record(
            9,
            "outer asymptotics",
            run(0.01, 1.0, 1.01, 1153, &SeedKind::standard_set()).and_then(|r| outer(&r)),
        );
    }
    if want(&[12]) {
        record(
            12,
            "boundary-layer match",
            run(0.01, 0.0, 1.01, 1153, &[SeedKind::ThomasFermi, SeedKind::RadialScalar])
                .and_then(|r| boundary_layer(&r)),
        );
    }

    let failed = results.iter().filter(|(_, _, r)| !matches!(r, Ok(o) if o.pass)).count();
    println!(
        "acceptance: {} passed, {failed} failed ({:.0}s)",
        results.len() - failed,
        started.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
