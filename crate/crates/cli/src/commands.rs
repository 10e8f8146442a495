use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use glnematic::analyze::{self, AnalysisReport};
use glnematic::fields::{GridSpec, ModelParams, VectorField2};
use glnematic::io::{self, fmt_f64};
use glnematic::minimize::{minimize, seed_field, MinimizeResult};
use glnematic::painleve::{self, Branch, P2Scheme, PainleveSpec, WindowSpec};
use glnematic::radial::{self, RadialGrid};
use glnematic::sweep::{self, Scaling, SweepSpec};
use glnematic::Error;
use rayon::prelude::*;

use crate::config::RunConfig;

pub enum Status {
    Done,
    NotConverged(String),
}

pub fn run(name: &str, cfg: &RunConfig) -> Result<Status> {
    let out = PathBuf::from(cfg.str("out_dir"));
    fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    let status = match name {
        "minimize" => minimize_cmd(cfg, &out),
        "radial" => radial_cmd(cfg, &out),
        "painleve" => painleve_cmd(cfg, &out),
        "analyze" => analyze_cmd(cfg, &out),
        "sweep" => sweep_cmd(cfg, &out),
        "compare" => compare_cmd(cfg, &out),
        _ => bail!("unknown subcommand {name}"),
    };
    match status {
        Err(e) => match e.downcast_ref::<Error>() {
            Some(
                Error::NotConverged { .. } | Error::NoSeedConverged(_) | Error::NewtonDivergence { .. },
            ) => Ok(Status::NotConverged(e.to_string())),
            _ => Err(e),
        },
        ok => ok,
    }
}

fn write_config(cfg: &RunConfig, out: &Path) -> Result<()> {
    io::write_text(out.join("config.txt"), &io::key_values(&cfg.pairs()))?;
    Ok(())
}

fn write_report(out: &Path, u: &VectorField2, report: &AnalysisReport) -> Result<()> {
    io::write_text(out.join("report.txt"), &io::key_values(&report.key_values()))?;
    let markers: Vec<_> = report.zeros.iter().map(|z| z.location).collect();
    io::write_ppm(out.join("modulus.ppm"), &u.modulus(), &markers)?;
    Ok(())
}

fn minimize_cmd(cfg: &RunConfig, out: &Path) -> Result<Status> {
    let params = cfg.params()?;
    let grid = cfg.grid_policy(&params)?.grid(&params)?;
    let opts = cfg.minimize_options()?;
    let seeds = cfg.seeds()?;
    write_config(cfg, out)?;
    let runs: Vec<Result<MinimizeResult, Error>> = seeds
        .par_iter()
        .map(|s| minimize(&seed_field(s, &params, grid)?, &params, &opts))
        .collect();
    let mut meta = vec![
        ("epsilon".to_string(), fmt_f64(params.epsilon)),
        ("a".to_string(), fmt_f64(params.a)),
        ("chi".to_string(), fmt_f64(params.chi)),
        ("half_width".to_string(), fmt_f64(grid.half_width)),
        ("n".to_string(), grid.n.to_string()),
    ];
    // lowest energy among converged runs, else among all finished runs
    let mut best: Option<(usize, &MinimizeResult)> = None;
    for (k, (seed, run)) in seeds.iter().zip(&runs).enumerate() {
        match run {
            Ok(r) => {
                meta.push((
                    format!("seed.{k}"),
                    format!(
                        "{seed} energy={} residual={} iters={} converged={}",
                        fmt_f64(r.energy),
                        fmt_f64(r.residual_sup),
                        r.iters,
                        r.converged
                    ),
                ));
                let better = match best {
                    None => true,
                    Some((_, b)) => (r.converged, -r.energy) > (b.converged, -b.energy),
                };
                if better {
                    best = Some((k, r));
                }
            }
            Err(e) => meta.push((format!("seed.{k}"), format!("{seed} failed: {e}"))),
        }
    }
    let Some((k, best)) = best else {
        io::write_text(out.join("field.meta"), &io::key_values(&meta))?;
        bail!("every seed failed; see {}", out.join("field.meta").display());
    };
    meta.extend([
        ("best_seed".to_string(), seeds[k].to_string()),
        ("energy".to_string(), fmt_f64(best.energy)),
        ("residual_sup".to_string(), fmt_f64(best.residual_sup)),
        ("iters".to_string(), best.iters.to_string()),
        ("converged".to_string(), best.converged.to_string()),
    ]);
    io::write_vector_field(out.join("field.glnf"), &best.field)?;
    io::write_text(out.join("field.meta"), &io::key_values(&meta))?;
    let trace: String = std::iter::once("iter,energy\n".to_string())
        .chain(best.energy_trace.iter().enumerate().map(|(i, e)| format!("{i},{}\n", fmt_f64(*e))))
        .collect();
    io::write_text(out.join("energy.csv"), &trace)?;
    let report = analyze::analyze(&best.field, &params, &cfg.analyze_options()?)?;
    write_report(out, &best.field, &report)?;
    println!(
        "best {} energy {} residual {:.3e} iters {} phase {}",
        seeds[k],
        fmt_f64(best.energy),
        best.residual_sup,
        best.iters,
        report.phase.label
    );
    if best.converged {
        Ok(Status::Done)
    } else {
        Ok(Status::NotConverged(format!(
            "best residual {:.3e} after {} iterations; best iterate written",
            best.residual_sup, best.iters
        )))
    }
}

fn radial_cmd(cfg: &RunConfig, out: &Path) -> Result<Status> {
    let params = cfg.params()?;
    let kind = cfg.str("kind");
    let (r_max, m) = match kind {
        "vortex" => (25.0, 10001),
        "scalar" | "equivariant" => (params.rho + 3.0, 4001),
        _ => bail!("kind: expected scalar, equivariant or vortex, got {kind:?}"),
    };
    let grid = RadialGrid::new(cfg.opt_f64("r_max")?.unwrap_or(r_max), cfg.opt_usize("m")?.unwrap_or(m))?;
    let p = match kind {
        "scalar" => radial::solve_scalar_radial(&params, &grid)?,
        "equivariant" => radial::solve_equivariant_radial(&params, &grid)?,
        _ => radial::solve_gl_vortex(&grid)?,
    };
    write_config(cfg, out)?;
    let comments = vec![format!("newton residual {}", fmt_f64(p.residual()))];
    io::write_text(out.join("profile.csv"), &io::profile_csv(&p, &comments))?;
    print!("kind {} residual {:.3e}", p.kind.name(), p.residual());
    if kind != "scalar" {
        print!(" slope_at_origin {}", fmt_f64(p.slope_at_origin()));
    }
    println!();
    Ok(Status::Done)
}

fn branch(s: &str) -> Result<Branch> {
    match s {
        "plus" => Ok(Branch::Plus),
        "minus" => Ok(Branch::Minus),
        _ => bail!("branch: expected plus or minus, got {s:?}"),
    }
}

fn painleve_cmd(cfg: &RunConfig, out: &Path) -> Result<Status> {
    let mut spec = PainleveSpec::new(
        cfg.f64("alpha")?,
        branch(cfg.str("branch"))?,
        cfg.f64("s_half")?,
        cfg.usize("m")?,
    )?;
    spec.scheme = match cfg.str("scheme") {
        "numerov" => P2Scheme::Numerov,
        "central" => P2Scheme::Central,
        v => bail!("scheme: expected numerov or central, got {v:?}"),
    };
    let p = painleve::solve_p2(&spec)?;
    write_config(cfg, out)?;
    let comments = vec![
        format!("alpha {}", fmt_f64(spec.alpha)),
        format!("newton residual {}", fmt_f64(p.residual())),
    ];
    io::write_text(out.join("painleve.csv"), &io::profile_csv(&p, &comments))?;
    println!(
        "y(0) {} residual {:.3e}",
        fmt_f64(p.value_at(0.0).unwrap_or(f64::NAN)),
        p.residual()
    );
    Ok(Status::Done)
}

fn read_input(cfg: &RunConfig) -> Result<VectorField2> {
    let path = cfg.path("input")?;
    Ok(io::read_vector_field(&path)?)
}

fn analyze_cmd(cfg: &RunConfig, out: &Path) -> Result<Status> {
    let params = cfg.params()?;
    let u = read_input(cfg)?;
    let report = analyze::analyze(&u, &params, &cfg.analyze_options()?)?;
    write_config(cfg, out)?;
    write_report(out, &u, &report)?;
    let zeros: String = std::iter::once("x,y,winding,core_dip\n".to_string())
        .chain(report.zeros.iter().map(|z| {
            format!(
                "{},{},{},{}\n",
                fmt_f64(z.location[0]),
                fmt_f64(z.location[1]),
                z.winding,
                fmt_f64(z.core_dip)
            )
        }))
        .collect();
    io::write_text(out.join("zeros.csv"), &zeros)?;
    print!("{}", io::key_values(&report.key_values()));
    Ok(Status::Done)
}

fn sweep_cmd(cfg: &RunConfig, out: &Path) -> Result<Status> {
    let chi = cfg.f64("chi")?;
    let epsilons = cfg.f64_list("epsilons")?;
    // margin may come from half_width, which depends on rho only
    let probe = ModelParams::new(epsilons.first().copied().unwrap_or(0.1), 0.0, chi)?;
    let spec = SweepSpec {
        epsilons,
        scaling: Scaling::parse(cfg.str("scaling"))?,
        b_values: cfg.f64_list("b_values")?,
        seeds: cfg.seeds()?,
        continuation: cfg.bool("continuation")?,
        chi,
        grid: cfg.grid_policy(&probe)?,
        minimize: cfg.minimize_options()?,
        analyze: cfg.analyze_options()?,
        keep_fields: cfg.bool("keep_fields")?,
    };
    spec.validate()?;
    write_config(cfg, out)?;
    let result = sweep::run_sweep(&spec)?;
    result.write_outputs(out)?;
    let failed = result.rows.iter().filter(|r| r.status != "ok").count();
    println!("{} points, {failed} failed", result.rows.len());
    if failed > 0 {
        return Ok(Status::NotConverged(format!("{failed} sweep points failed; see sweep.csv")));
    }
    Ok(Status::Done)
}

fn compare_cmd(cfg: &RunConfig, out: &Path) -> Result<Status> {
    let params = cfg.params()?;
    let u = read_input(cfg)?;
    GridSpec::new(u.grid.half_width, u.grid.n)?.check_fits(&params)?;
    let window = WindowSpec {
        s1_range: (cfg.f64("s1_min")?, cfg.f64("s1_max")?),
        s2_range: (cfg.f64("s2_min")?, cfg.f64("s2_max")?),
        n1: cfg.usize("n1")?,
        n2: cfg.usize("n2")?,
    };
    if window.n1 < 2 || window.n2 < 2 {
        bail!("n1, n2: need at least 2 samples each");
    }
    let alpha = painleve::layer_alpha(&params);
    let layer = painleve::extract_layer(&u, &params, cfg.f64("theta")?, &window)?;
    let y = painleve::solve_p2(&PainleveSpec::new(alpha, Branch::Plus, cfg.f64("s_half")?, cfg.usize("m")?)?)?;
    let mut csv = String::from("s1,s2,w1,w2,y\n");
    let (mut err, mut ymax) = (0.0_f64, 0.0_f64);
    // the row nearest to s2 = 0 carries the 1D comparison
    let j0 = (0..layer.n2)
        .min_by(|a, b| layer.s2(*a).abs().total_cmp(&layer.s2(*b).abs()))
        .unwrap();
    for j in 0..layer.n2 {
        for i in 0..layer.n1 {
            let w = layer.at(i, j);
            let yi = y.value_at(layer.s1(i)).unwrap_or(f64::NAN);
            if j == j0 {
                err = err.max((w[0] - yi).hypot(w[1]));
                ymax = ymax.max(yi.abs());
            }
            csv.push_str(&format!(
                "{},{},{},{},{}\n",
                fmt_f64(layer.s1(i)),
                fmt_f64(layer.s2(j)),
                fmt_f64(w[0]),
                fmt_f64(w[1]),
                fmt_f64(yi)
            ));
        }
    }
    let mut kv = vec![
        ("alpha".to_string(), fmt_f64(alpha)),
        ("layer_s2".to_string(), fmt_f64(layer.s2(j0))),
        ("layer_sup_rel_error".to_string(), fmt_f64(err / ymax)),
    ];
    let zeros = analyze::find_zeros(&u, analyze::default_amp_tol(&params));
    for (k, z) in zeros.iter().enumerate() {
        let v = match analyze::core_profile_match(&u, z, &params) {
            Ok(m) => format!(
                "x={} y={} winding={} misfit={} reflected={} angle={}",
                fmt_f64(z.location[0]),
                fmt_f64(z.location[1]),
                z.winding,
                fmt_f64(m.misfit),
                m.reflected,
                fmt_f64(m.angle)
            ),
            Err(e) => format!(
                "x={} y={} winding={} no match: {e}",
                fmt_f64(z.location[0]),
                fmt_f64(z.location[1]),
                z.winding
            ),
        };
        kv.push((format!("core{k}"), v));
    }
    write_config(cfg, out)?;
    io::write_text(out.join("layer.csv"), &csv)?;
    io::write_text(out.join("compare.txt"), &io::key_values(&kv))?;
    print!("{}", io::key_values(&kv));
    Ok(Status::Done)
}
