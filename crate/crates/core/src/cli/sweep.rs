use std::io::Write;

use rayon::prelude::*;

use super::config::SweepConfig;
use crate::coherence::coherence_gm;
use crate::zoo::{build_state, StateSpec};
use crate::Result;

pub const CSV_HEADER: [&str; 7] = ["n_av", "state", "m", "G_m", "ratio", "tail_mass", "in_space"];

/// Marker written into the `G_m` column when a state cannot be built.
pub const ERROR_MARKER: &str = "error";

#[derive(Debug, Clone, PartialEq)]
pub struct RowValues {
    pub g_m: f64,
    pub ratio: Option<f64>,
    pub tail_mass: f64,
    pub in_space: bool,
}

/// One `(n_av, state)` evaluation of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub n_av: f64,
    pub state_label: String,
    pub m: u32,
    pub outcome: std::result::Result<RowValues, String>,
}

impl SweepRow {
    pub fn values(&self) -> Option<&RowValues> {
        self.outcome.as_ref().ok()
    }
}

/// Evaluates a single state at grid value `n_av`.
pub fn evaluate_row(
    spec: &StateSpec,
    n_av: f64,
    m: u32,
    n_max: usize,
    tail_tolerance: f64,
) -> SweepRow {
    let outcome = (|| -> Result<RowValues> {
        let built = build_state(&spec.resolved(Some(n_av), n_max), n_max)?;
        let gm = coherence_gm(&built.distribution, m)?;
        Ok(RowValues {
            g_m: gm.value,
            ratio: gm.ratio,
            tail_mass: built.tail_beyond_n_max,
            in_space: built.in_space(tail_tolerance),
        })
    })();
    SweepRow {
        n_av,
        state_label: spec.label().to_owned(),
        m,
        outcome: outcome.map_err(|e| e.to_string()),
    }
}

/// All rows of a sweep, ordered by `n_av` and then by state order in the
/// config. Grid points are evaluated in parallel.
pub fn run_sweep(config: &SweepConfig) -> Vec<SweepRow> {
    let grid = config.n_av_grid.values();
    grid.par_iter()
        .map(|&n_av| {
            config
                .states
                .iter()
                .map(|spec| {
                    evaluate_row(spec, n_av, config.m, config.n_max, config.tolerances.tail)
                })
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// Shortest representation that parses back to the same `f64`; exponent
/// notation outside `[1e-4, 1e16)`.
pub fn format_real(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e16).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    writer.write_record(CSV_HEADER)?;
    for row in rows {
        let n_av = format_real(row.n_av);
        let m = row.m.to_string();
        let record: [String; 7] = match &row.outcome {
            Ok(v) => [
                n_av,
                row.state_label.clone(),
                m,
                format_real(v.g_m),
                v.ratio.map(format_real).unwrap_or_default(),
                format_real(v.tail_mass),
                v.in_space.to_string(),
            ],
            Err(_) => [
                n_av,
                row.state_label.clone(),
                m,
                ERROR_MARKER.to_owned(),
                String::new(),
                String::new(),
                String::new(),
            ],
        };
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn csv_string(rows: &[SweepRow]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}
