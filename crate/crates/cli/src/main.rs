mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Arg, ArgAction, ArgMatches, Command};

use config::{keys_for, RunConfig};

const SUBCOMMANDS: &[(&str, &str)] = &[
    ("minimize", "Multistart minimization of the 2D energy"),
    ("radial", "Solve a 1D radial reduction"),
    ("painleve", "Solve the Painleve II boundary value problem"),
    ("analyze", "Diagnostics and phase label for a stored field"),
    ("sweep", "Phase diagram sweep over (eps, b)"),
    ("compare", "Compare a stored field with the layer and core models"),
];

fn cli() -> Command {
    let mut cmd = Command::new("glnematic")
        .about("Ginzburg-Landau minimizers and diagnostics for the nematic light-matter model")
        .subcommand_required(true)
        .arg_required_else_help(true)
        .arg(
            Arg::new("threads")
                .long("threads")
                .global(true)
                .value_parser(clap::value_parser!(usize))
                .help("worker threads (falls back to GLNEMATIC_THREADS, then all cores)"),
        );
    for (name, about) in SUBCOMMANDS {
        let mut sub = Command::new(*name).about(*about).arg(
            Arg::new("config")
                .long("config")
                .short('c')
                .value_parser(clap::value_parser!(PathBuf))
                .help("key = value config file; flags override its values"),
        );
        for k in keys_for(name) {
            let help = if k.help.is_empty() {
                format!("[default: {}]", display_default(k.default))
            } else {
                format!("{} [default: {}]", k.help, display_default(k.default))
            };
            sub = sub.arg(
                Arg::new(k.name)
                    .long(k.name)
                    .value_name("VALUE")
                    .action(ArgAction::Set)
                    .allow_negative_numbers(true)
                    .help(help),
            );
        }
        cmd = cmd.subcommand(sub);
    }
    cmd
}

fn display_default(d: &str) -> &str {
    if d.is_empty() {
        "none"
    } else {
        d
    }
}

fn threads(m: &ArgMatches) -> anyhow::Result<Option<usize>> {
    if let Some(t) = m.get_one::<usize>("threads") {
        return Ok(Some(*t));
    }
    match std::env::var("GLNEMATIC_THREADS") {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| anyhow::anyhow!("GLNEMATIC_THREADS: expected an integer, got {v:?}")),
        _ => Ok(None),
    }
}

fn main() -> ExitCode {
    let matches = match cli().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    let setup = || -> anyhow::Result<RunConfig> {
        if let Some(n) = threads(&matches)? {
            rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
        }
        let overrides: Vec<(String, String)> = keys_for(name)
            .iter()
            .filter_map(|k| sub.get_one::<String>(k.name).map(|v| (k.name.to_string(), v.clone())))
            .collect();
        RunConfig::new(name, sub.get_one::<PathBuf>("config").map(PathBuf::as_path), &overrides)
    };
    let cfg = match setup() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    match commands::run(name, &cfg) {
        Ok(commands::Status::Done) => ExitCode::SUCCESS,
        Ok(commands::Status::NotConverged(msg)) => {
            eprintln!("not converged: {msg}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
