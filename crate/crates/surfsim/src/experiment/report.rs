//! CSV emission for sweep results and break-even maps. Floats are written
//! with 17 significant digits so re-parsing reproduces the in-memory
//! values exactly.

use super::breakeven::BreakEvenMap;
use super::{ExperimentConfig, RunResult};
use crate::noise::NoiseModel;

/// Shortest decimal that round-trips any f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub const SWEEP_HEADER: &str =
    "layout,backend,model,preset,t1_ns,t2_ns,p,species,r,m,R,p_r,stderr,seed,wall_ms";

/// One CSV row: configuration echo plus the estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub layout: String,
    pub backend: String,
    pub model: String,
    pub preset: String,
    pub t1_ns: f64,
    pub t2_ns: f64,
    pub p: f64,
    pub species: char,
    pub r: usize,
    pub m: u64,
    pub windows: u64,
    pub p_r: f64,
    pub stderr: f64,
    pub seed: u64,
    pub wall_ms: u64,
}

impl SweepRow {
    pub fn from_run(config: &ExperimentConfig, result: &RunResult) -> Self {
        let (preset, t1_ns, t2_ns, p) = match &config.model {
            NoiseModel::SymmetricDepolarizing { p } => ("none".to_string(), 0.0, 0.0, *p),
            NoiseModel::AsymmetricDepolarizing { p_x, p_y, p_z } => {
                ("none".to_string(), 0.0, 0.0, p_x + p_y + p_z)
            }
            NoiseModel::PauliTwirl { t1_ns, preset }
            | NoiseModel::AmplitudePhaseDamping { t1_ns, preset } => {
                (preset.name.clone(), *t1_ns, preset.t2_ns(*t1_ns), 0.0)
            }
        };
        Self {
            layout: config.layout.name().to_string(),
            backend: config.backend.name().to_string(),
            model: config.model.name().to_string(),
            preset,
            t1_ns,
            t2_ns,
            p,
            species: config.species(),
            r: config.window,
            m: result.m,
            windows: result.windows,
            p_r: result.p_r,
            stderr: result.stderr,
            seed: result.seed,
            wall_ms: result.wall_ms,
        }
    }

    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.layout,
            self.backend,
            self.model,
            self.preset,
            fmt_f64(self.t1_ns),
            fmt_f64(self.t2_ns),
            fmt_f64(self.p),
            self.species,
            self.r,
            self.m,
            self.windows,
            fmt_f64(self.p_r),
            fmt_f64(self.stderr),
            self.seed,
            self.wall_ms
        )
    }

    pub fn parse_csv_line(line: &str) -> Result<Self, String> {
        let f: Vec<&str> = line.trim().split(',').collect();
        if f.len() != 15 {
            return Err(format!("expected 15 fields, got {}", f.len()));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|e| format!("bad float {s:?}: {e}"));
        let int = |s: &str| s.parse::<u64>().map_err(|e| format!("bad int {s:?}: {e}"));
        Ok(Self {
            layout: f[0].to_string(),
            backend: f[1].to_string(),
            model: f[2].to_string(),
            preset: f[3].to_string(),
            t1_ns: num(f[4])?,
            t2_ns: num(f[5])?,
            p: num(f[6])?,
            species: f[7].chars().next().ok_or("empty species")?,
            r: int(f[8])? as usize,
            m: int(f[9])?,
            windows: int(f[10])?,
            p_r: num(f[11])?,
            stderr: num(f[12])?,
            seed: int(f[13])?,
            wall_ms: int(f[14])?,
        })
    }
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_csv_line());
        out.push('\n');
    }
    out
}

pub fn parse_sweep_csv(text: &str) -> Result<Vec<SweepRow>, String> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 {
            if line.trim() != SWEEP_HEADER {
                return Err("unexpected header".into());
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        rows.push(SweepRow::parse_csv_line(line).map_err(|e| format!("line {}: {e}", i + 1))?);
    }
    Ok(rows)
}

pub const BREAK_EVEN_HEADER: &str = "preset,model,species,t1_ns,t2_ns,window_ns,duration_ns,\
encoded_p,encoded_stderr,unencoded_p,classification,m,R,seed";

/// Long-form grid: one line per (T1, duration) cell.
pub fn break_even_csv(map: &BreakEvenMap) -> String {
    let mut out = String::from(BREAK_EVEN_HEADER);
    out.push('\n');
    for row in &map.rows {
        for cell in &row.cells {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                map.preset,
                map.model,
                map.species,
                fmt_f64(row.t1_ns),
                fmt_f64(row.t2_ns),
                fmt_f64(row.window_ns),
                fmt_f64(cell.duration_ns),
                fmt_f64(row.encoded.quotable_rate()),
                fmt_f64(row.encoded.stderr),
                fmt_f64(cell.unencoded_p),
                cell.class.name(),
                row.encoded.m,
                row.encoded.windows,
                row.encoded.seed,
            ));
        }
    }
    out
}
