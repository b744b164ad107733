//! Command-line front end: `gm`, `sweep`, `optimize` and `bounds`.
//!
//! Exit codes: 0 on success, 1 on validation or I/O errors, 2 when a sweep
//! finished with some rows marked as errors.

pub mod config;
pub mod svg;
pub mod sweep;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::json;

pub use config::{GridScale, GridSpec, Outputs, SweepConfig, Tolerances};
pub use sweep::{evaluate_row, run_sweep, write_csv, SweepRow};

use crate::coherence::{bound_gm, coherence_gm};
use crate::optimizer::{optimize_gm_exact, random_search_lower_bound, verify_state_bound};
use crate::zoo::{build_state, StateSpec};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_PARTIAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "multiphoton", version, about = "Multi-photon absorption statistics of single-mode light")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate G^(m) of a single state
    Gm {
        /// State spec as JSON, e.g. '{"kind":"thermal","params":{"n_av":10}}'
        #[arg(long)]
        state: String,
        #[arg(long)]
        m: u32,
        #[arg(long = "n-max", default_value_t = 500)]
        n_max: usize,
    },
    /// Run a sweep config and write CSV (and optionally SVG)
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long = "out-csv")]
        out_csv: Option<PathBuf>,
        #[arg(long = "out-svg")]
        out_svg: Option<PathBuf>,
    },
    /// Maximize G^(m) at fixed n_av inside H_{N_max}
    Optimize {
        #[arg(long)]
        m: u32,
        #[arg(long = "n-av")]
        n_av: f64,
        #[arg(long = "n-max")]
        n_max: usize,
        /// Random-search trials used as an independent lower bound (0 skips it)
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check a state against the H_{N_max} bound
    Bounds {
        #[arg(long)]
        state: String,
        #[arg(long)]
        m: u32,
        #[arg(long = "n-max", default_value_t = 500)]
        n_max: usize,
    },
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INVALID
        }
    }
}

fn print_json(out: &mut dyn Write, value: &serde_json::Value) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string(value)?)?;
    Ok(())
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Gm { state, m, n_max } => {
            print_json(out, &cmd_gm(&StateSpec::from_json(&state)?, m, n_max)?)?;
            Ok(EXIT_OK)
        }
        Command::Sweep {
            config,
            out_csv,
            out_svg,
        } => {
            let mut config = SweepConfig::load(&config)?;
            if out_csv.is_some() {
                config.outputs.csv_path = out_csv;
            }
            if out_svg.is_some() {
                config.outputs.svg_path = out_svg;
            }
            cmd_sweep(&config, out, err)
        }
        Command::Optimize {
            m,
            n_av,
            n_max,
            trials,
            seed,
        } => {
            print_json(out, &cmd_optimize(m, n_av, n_max, trials, seed)?)?;
            Ok(EXIT_OK)
        }
        Command::Bounds { state, m, n_max } => {
            print_json(out, &cmd_bounds(&StateSpec::from_json(&state)?, m, n_max)?)?;
            Ok(EXIT_OK)
        }
    }
}

/// Result record for `gm`.
pub fn cmd_gm(spec: &StateSpec, m: u32, n_max: usize) -> Result<serde_json::Value> {
    let built = build_state(spec, n_max)?;
    let gm = coherence_gm(&built.distribution, m)?;
    Ok(json!({
        "state": built.label,
        "m": m,
        "n_av": gm.n_av,
        "G_m": gm.value,
        "ratio": gm.ratio,
        "tail_mass": built.tail_beyond_n_max,
        "in_space": built.is_in_space(),
    }))
}

/// Writes the CSV (to the configured path, or `out` when none is set) and
/// the optional SVG. Returns [`EXIT_PARTIAL`] if any row failed.
pub fn cmd_sweep(config: &SweepConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    config.validate()?;
    let rows = run_sweep(config);
    match &config.outputs.csv_path {
        Some(path) => {
            let file = std::fs::File::create(path).map_err(|e| {
                Error::Config(format!("cannot write {}: {e}", path.display()))
            })?;
            write_csv(&rows, std::io::BufWriter::new(file))?;
        }
        None => write_csv(&rows, &mut *out)?,
    }
    if let Some(path) = &config.outputs.svg_path {
        std::fs::write(path, svg::render_svg(&rows, config.m))
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
    }
    let mut failed = 0;
    for row in &rows {
        if let Err(msg) = &row.outcome {
            failed += 1;
            writeln!(err, "n_av = {}, {}: {msg}", row.n_av, row.state_label)?;
        }
    }
    if failed > 0 {
        writeln!(err, "{failed} of {} rows failed", rows.len())?;
        Ok(EXIT_PARTIAL)
    } else {
        Ok(EXIT_OK)
    }
}

/// Result record for `optimize`, compared against the closed-form bound.
pub fn cmd_optimize(
    m: u32,
    n_av: f64,
    n_max: usize,
    trials: usize,
    seed: u64,
) -> Result<serde_json::Value> {
    let result = optimize_gm_exact(m, n_av, n_max)?;
    let bound = bound_gm(m, n_av, n_max as u64).ok();
    let relative_gap = bound
        .filter(|b| *b > 0.0)
        .map(|b| (result.optimal_value - b) / b);
    let random = if trials > 0 {
        let best = random_search_lower_bound(m, n_av, n_max, trials, seed)?;
        json!({ "trials": trials, "seed": seed, "best": best })
    } else {
        serde_json::Value::Null
    };
    Ok(json!({
        "m": m,
        "n_av": n_av,
        "n_max": n_max,
        "method": result.method,
        "optimal_value": result.optimal_value,
        "support": result.support,
        "weights": result.weights(),
        "bound": bound,
        "relative_gap": relative_gap,
        "random_search": random,
    }))
}

/// Result record for `bounds`.
pub fn cmd_bounds(spec: &StateSpec, m: u32, n_max: usize) -> Result<serde_json::Value> {
    let built = build_state(spec, n_max)?;
    let report = verify_state_bound(&built.distribution, m, n_max)?;
    let mut value = serde_json::to_value(report)?;
    value["state"] = json!(built.label);
    value["n_max"] = json!(n_max);
    Ok(value)
}
