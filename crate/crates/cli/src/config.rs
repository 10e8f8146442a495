//! Flat `key = value` run configuration.
//!
//! Values are resolved in order: built-in default, config file, command-line
//! flag. Every key a subcommand accepts is listed in [`keys_for`].

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use glnematic::analyze::{AnalyzeOptions, ClassifyThresholds};
use glnematic::fields::ModelParams;
use glnematic::minimize::{MinimizeOptions, SeedKind};
use glnematic::sweep::GridPolicy;
use glnematic::StepRule;

pub struct Key {
    pub name: &'static str,
    pub default: &'static str,
    pub help: &'static str,
}

const fn key(name: &'static str, default: &'static str, help: &'static str) -> Key {
    Key { name, default, help }
}

const PARAMS: &[Key] = &[
    key("epsilon", "0.05", "length scale eps"),
    key("a", "0", "forcing amplitude"),
    key("chi", "0.5", "pump offset, 0 < chi < 1"),
];

const GRID: &[Key] = &[
    key("margin", "3", "half width is rho + margin"),
    key("half_width", "auto", "explicit half width L (overrides margin)"),
    key("n", "auto", "points per side; auto picks 129*2^k+1 with h <= eps/3"),
];

const MINIMIZE: &[Key] = &[
    key("max_iters", "20000", "iteration cap per seed"),
    key("residual_tol", "1e-8", "sup-norm tolerance on the Euler-Lagrange residual"),
    key("step_rule", "ncg", "ncg, bb or fixed"),
    key("fixed_step", "1", "step length for step_rule = fixed"),
    key("precond_shift", "1", "preconditioner shift in units of 1/eps^2"),
    key("truncation_bound", "auto", "modulus bound M for truncation"),
    key("truncation_every", "50", "iterations between truncations"),
    key(
        "seeds",
        "standard",
        "space-separated seeds: thomas_fermi radial_scalar vortex(x,y,+-1) random(k) file(path), or standard",
    ),
];

const ANALYZE: &[Key] = &[
    key("amp_tol", "auto", "amplitude below which minima are zero candidates"),
    key("tf_r_frac", "0.8", "Thomas-Fermi check on |x| <= tf_r_frac * rho"),
    key("align_r_in", "auto", "inner alignment radius, auto = rho + 2 eps^(2/3)"),
    key("align_r_out", "auto", "outer alignment radius, auto = rho + 0.4"),
    key("outer_r0", "auto", "outer check radius, auto = rho + 0.5"),
    key("center_frac", "0.2", "center vortex if |zero| <= center_frac * rho"),
    key("band", "0.15", "interface band half width"),
    key("match_budget", "0.2", "core profile misfit budget"),
    key("shadow_amp_frac", "0.5", "shadow core amplitude budget relative to sup sqrt(mu)"),
];

const OUT: &[Key] = &[key("out_dir", "out", "output directory")];

const INPUT: &[Key] = &[key("input", "", "field file to read (GLNF1)")];

const RADIAL: &[Key] = &[
    key("kind", "scalar", "scalar, equivariant or vortex"),
    key("r_max", "auto", "outer radius; auto = rho + 3 (25 for vortex)"),
    key("m", "auto", "grid points; auto = 4001 (10001 for vortex)"),
];

const PAINLEVE: &[Key] = &[
    key("alpha", "0", "forcing constant alpha"),
    key("branch", "plus", "plus or minus"),
    key("s_half", "10", "half length S of the interval [-S, S]"),
    key("m", "2001", "grid points"),
    key("scheme", "numerov", "numerov or central"),
];

const SWEEP: &[Key] = &[
    key("epsilons", "0.1,0.05", "comma-separated eps values"),
    key("scaling", "linear_log", "linear_log, square_log or raw"),
    key("b_values", "0,0.5,1,2,5", "comma-separated scaled amplitudes b"),
    key("continuation", "true", "warm-start each b from the previous one"),
    key("keep_fields", "false", "write every minimizer to out_dir/fields"),
];

const COMPARE: &[Key] = &[
    key("theta", "0", "interface angle of the layer window"),
    key("s1_min", "-3", "window range in s1"),
    key("s1_max", "3", ""),
    key("s2_min", "-1", "window range in s2"),
    key("s2_max", "1", ""),
    key("n1", "61", "window samples in s1"),
    key("n2", "21", "window samples in s2"),
    key("s_half", "10", "Painleve interval half length"),
    key("m", "2001", "Painleve grid points"),
];

pub fn keys_for(cmd: &str) -> Vec<&'static Key> {
    let groups: &[&[Key]] = match cmd {
        "minimize" => &[PARAMS, GRID, MINIMIZE, ANALYZE, OUT],
        "radial" => &[PARAMS, RADIAL, OUT],
        "painleve" => &[PAINLEVE, OUT],
        "analyze" => &[INPUT, PARAMS, ANALYZE, OUT],
        "sweep" => &[SWEEP, &PARAMS[2..], GRID, MINIMIZE, ANALYZE, OUT],
        "compare" => &[INPUT, PARAMS, COMPARE, OUT],
        _ => &[],
    };
    groups.iter().flat_map(|g| g.iter()).collect()
}

/// Resolved values for one subcommand.
#[derive(Debug, Clone)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn new(
        cmd: &str,
        file: Option<&Path>,
        overrides: &[(String, String)],
    ) -> Result<Self> {
        let keys = keys_for(cmd);
        let mut values: BTreeMap<String, String> =
            keys.iter().map(|k| (k.name.to_string(), k.default.to_string())).collect();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            let pairs = glnematic::io::parse_key_values(&text)
                .map_err(|e| anyhow!("{}: {e}", path.display()))?;
            for (k, v) in pairs {
                if !values.contains_key(&k) {
                    bail!("{}: unknown key {k:?} for {cmd}", path.display());
                }
                values.insert(k, v);
            }
        }
        for (k, v) in overrides {
            values.insert(k.clone(), v.clone());
        }
        Ok(Self { values })
    }

    pub fn pairs(&self) -> Vec<(String, String)> {
        self.values.iter().map(|(k, v)| (k.clone(), v.clone())).collect()
    }

    pub fn str(&self, k: &str) -> &str {
        self.values.get(k).map(String::as_str).unwrap_or("")
    }

    pub fn f64(&self, k: &str) -> Result<f64> {
        let v = self.str(k);
        v.parse().map_err(|_| anyhow!("{k}: expected a number, got {v:?}"))
    }

    pub fn usize(&self, k: &str) -> Result<usize> {
        let v = self.str(k);
        v.parse().map_err(|_| anyhow!("{k}: expected a non-negative integer, got {v:?}"))
    }

    pub fn bool(&self, k: &str) -> Result<bool> {
        match self.str(k) {
            "true" | "yes" | "1" => Ok(true),
            "false" | "no" | "0" => Ok(false),
            v => bail!("{k}: expected true or false, got {v:?}"),
        }
    }

    /// `auto` maps to `None`.
    pub fn opt_f64(&self, k: &str) -> Result<Option<f64>> {
        if self.str(k) == "auto" {
            return Ok(None);
        }
        self.f64(k).map(Some)
    }

    pub fn opt_usize(&self, k: &str) -> Result<Option<usize>> {
        if self.str(k) == "auto" {
            return Ok(None);
        }
        self.usize(k).map(Some)
    }

    pub fn f64_list(&self, k: &str) -> Result<Vec<f64>> {
        self.str(k)
            .split(',')
            .map(|s| s.trim().parse().map_err(|_| anyhow!("{k}: bad number {s:?}")))
            .collect()
    }

    pub fn path(&self, k: &str) -> Result<PathBuf> {
        match self.str(k) {
            "" => bail!("{k}: a path is required"),
            v => Ok(PathBuf::from(v)),
        }
    }

    pub fn params(&self) -> Result<ModelParams> {
        Ok(ModelParams::new(self.f64("epsilon")?, self.f64("a")?, self.f64("chi")?)?)
    }

    pub fn grid_policy(&self, params: &ModelParams) -> Result<GridPolicy> {
        let margin = match self.opt_f64("half_width")? {
            Some(l) => l - params.rho,
            None => self.f64("margin")?,
        };
        Ok(GridPolicy { margin, n: self.opt_usize("n")? })
    }

    pub fn minimize_options(&self) -> Result<MinimizeOptions> {
        let step_rule = match self.str("step_rule") {
            "ncg" => StepRule::NonlinearCg,
            "bb" => StepRule::AdaptiveBacktracking,
            "fixed" => StepRule::Fixed,
            v => bail!("step_rule: expected ncg, bb or fixed, got {v:?}"),
        };
        Ok(MinimizeOptions {
            max_iters: self.usize("max_iters")?,
            residual_tol: self.f64("residual_tol")?,
            step_rule,
            truncation_bound: self.opt_f64("truncation_bound")?,
            truncation_every: self.usize("truncation_every")?,
            precond_shift: self.f64("precond_shift")?,
            fixed_step: self.f64("fixed_step")?,
        })
    }

    pub fn seeds(&self) -> Result<Vec<SeedKind>> {
        let v = self.str("seeds");
        if v.trim() == "standard" {
            return Ok(SeedKind::standard_set());
        }
        let seeds: Vec<SeedKind> = v
            .split_whitespace()
            .map(|s| s.parse().map_err(|e| anyhow!("seeds: {e}")))
            .collect::<Result<_>>()?;
        if seeds.is_empty() {
            bail!("seeds: empty list");
        }
        Ok(seeds)
    }

    pub fn analyze_options(&self) -> Result<AnalyzeOptions> {
        let align_annulus = match (self.opt_f64("align_r_in")?, self.opt_f64("align_r_out")?) {
            (None, None) => None,
            (Some(a), Some(b)) => Some((a, b)),
            _ => bail!("align_r_in, align_r_out: set both or neither"),
        };
        Ok(AnalyzeOptions {
            amp_tol: self.opt_f64("amp_tol")?,
            tf_r_frac: self.f64("tf_r_frac")?,
            align_annulus,
            outer_r0: self.opt_f64("outer_r0")?,
            thresholds: ClassifyThresholds {
                center_frac: self.f64("center_frac")?,
                band: self.f64("band")?,
                match_budget: self.f64("match_budget")?,
                shadow_amp_frac: self.f64("shadow_amp_frac")?,
            },
        })
    }
}
