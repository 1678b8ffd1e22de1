//! Run artifacts and the manifest that lists them.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::{RunConfig, KINK_SEARCH_RANGE};
use super::table::{fmt_f64, CsvTable};
use crate::error::{NdsgError, Result};
use crate::evolution::{core_deviation, run, FieldState, RunOutput};
use crate::exec::Execution;
use crate::model::ModelParams;
use crate::traveling_wave::{assemble_kink, find_velocity_spectrum, KinkOptions, ScanOptions, ShootControls};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    /// Path relative to the output directory.
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

pub fn digest_file(dir: &Path, name: &str) -> Result<FileDigest> {
    let data = std::fs::read(dir.join(name))?;
    Ok(FileDigest { path: name.to_string(), bytes: data.len() as u64, sha256: hex::encode(Sha256::digest(&data)) })
}

/// Where the run ended up relative to the traveling-wave spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Relaxation {
    pub terminal_velocity: f64,
    pub terminal_std: f64,
    /// Branch whose velocity is nearest to the terminal velocity.
    pub nearest_branch: Option<usize>,
    pub nearest_velocity: Option<f64>,
    /// Max |phi - phi_n| over the core `|xi| < CORE_HALF_WIDTH` of the final state.
    pub core_deviation: Option<f64>,
}

pub const CORE_HALF_WIDTH: f64 = 5.0;
/// Share of the run over which the terminal velocity is averaged.
pub const TERMINAL_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub complete: bool,
    pub error: Option<String>,
    pub exit_code: i32,
    pub tau_reached: f64,
    pub front_records: usize,
    pub initial_energy: Option<f64>,
    pub final_energy: Option<f64>,
    pub relaxation: Option<Relaxation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub config_hash: String,
    /// Wall-clock start and end, seconds since the Unix epoch.
    pub started: f64,
    pub finished: f64,
    pub files: Vec<FileDigest>,
    pub summary: RunSummary,
}

impl RunManifest {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| NdsgError::Io(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| NdsgError::Io(e.to_string()))
    }

    /// Recompute every listed digest under `dir`; returns the mismatching paths.
    pub fn verify(&self, dir: &Path) -> Result<Vec<String>> {
        let mut bad = Vec::new();
        for f in &self.files {
            if digest_file(dir, &f.path)? != *f {
                bad.push(f.path.clone());
            }
        }
        Ok(bad)
    }
}

fn now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

pub fn state_table(phi: &[f64], phi_dot: &[f64], state: &FieldState) -> Result<CsvTable> {
    CsvTable::from_columns(&["zeta", "phi", "phi_dot"], &[&state.grid.nodes(), phi, phi_dot])
}

/// Write front, energy, snapshot and final-state CSVs; returns their names.
pub fn write_run_artifacts(dir: &Path, out: &RunOutput) -> Result<Vec<String>> {
    std::fs::create_dir_all(dir)?;
    let mut names = Vec::new();
    let f = &out.front;
    let front = CsvTable::from_columns(&["tau", "zeta_front", "v_raw", "v_smooth"], &[&f.tau, &f.position, &f.v_raw, &f.v_smooth])?;
    front.write(&dir.join("front.csv"))?;
    names.push("front.csv".to_string());

    let col = |g: fn(&crate::evolution::EnergySample) -> f64| out.energy.iter().map(g).collect::<Vec<f64>>();
    let (t, w, p, k, nl) = (col(|e| e.tau), col(|e| e.report.total), col(|e| e.report.potential), col(|e| e.report.kinetic), col(|e| e.report.nonlocal));
    CsvTable::from_columns(&["tau", "W_total", "W_pot", "W_kin", "W_nonlocal"], &[&t, &w, &p, &k, &nl])?.write(&dir.join("energy.csv"))?;
    names.push("energy.csv".to_string());

    for s in &out.snapshots {
        let name = format!("snapshot_t{}.csv", fmt_f64(s.tau));
        state_table(&s.phi, &s.phi_dot, &out.final_state)?.write(&dir.join(&name))?;
        names.push(name);
    }
    state_table(&out.final_state.phi, &out.final_state.phi_dot, &out.final_state)?.write(&dir.join("final_state.csv"))?;
    names.push("final_state.csv".to_string());
    Ok(names)
}

/// Terminal velocity of the run and, when the spectrum can be computed, the
/// nearest kink branch with the final core deviation from it.
pub fn diagnose_relaxation(out: &RunOutput, params: &ModelParams, exec: Execution) -> Option<Relaxation> {
    let (mean, std) = out.front.terminal_velocity(TERMINAL_FRACTION)?;
    let mut rel = Relaxation { terminal_velocity: mean, terminal_std: std, nearest_branch: None, nearest_velocity: None, core_deviation: None };
    let opts = ScanOptions { exec, ..Default::default() };
    let Ok(spec) = find_velocity_spectrum(params, KINK_SEARCH_RANGE, 10, &ShootControls::default(), &opts) else {
        return Some(rel);
    };
    let Some(nearest) = spec.entries.iter().min_by(|a, b| (a.value - mean).abs().total_cmp(&(b.value - mean).abs())) else {
        return Some(rel);
    };
    rel.nearest_branch = Some(nearest.n);
    rel.nearest_velocity = Some(nearest.value);
    if let (Ok(kink), Some(&front)) = (assemble_kink(params, nearest.value, &KinkOptions::default()), out.front.position.last()) {
        rel.core_deviation = Some(core_deviation(&out.final_state, front, &kink, CORE_HALF_WIDTH));
    }
    Some(rel)
}

/// Everything `evolve` produced.
#[derive(Debug)]
pub struct EvolveReport {
    pub manifest: RunManifest,
    pub output: RunOutput,
    pub dir: PathBuf,
}

/// Prepare, run, and write all artifacts plus `manifest.json` to `dir`.
///
/// Validation and preparation failures return `Err` before anything is
/// written. A run that aborts midway still writes its partial artifacts; the
/// error is then recorded in the manifest summary and in `output.error`.
pub fn execute(config: &RunConfig, dir: &Path, exec: Execution) -> Result<EvolveReport> {
    let started = now();
    let prepared = config.prepare(exec)?;
    let output = run(prepared.state, &prepared.params, &prepared.settings, prepared.front_start)?;

    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("config.toml"), config.to_toml()?)?;
    let mut names = vec!["config.toml".to_string()];
    names.extend(write_run_artifacts(dir, &output)?);
    let relaxation = if output.is_complete() { diagnose_relaxation(&output, &prepared.params, exec) } else { None };
    let summary = RunSummary {
        complete: output.is_complete(),
        error: output.error.as_ref().map(|e| e.to_string()),
        exit_code: output.error.as_ref().map_or(0, |e| e.exit_code()),
        tau_reached: output.final_state.tau,
        front_records: output.front.len(),
        initial_energy: output.energy.first().map(|e| e.report.total),
        final_energy: output.energy.last().map(|e| e.report.total),
        relaxation,
    };
    let files = names.iter().map(|n| digest_file(dir, n)).collect::<Result<Vec<_>>>()?;
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config_hash: config.hash()?,
        started,
        finished: now(),
        files,
        summary,
    };
    std::fs::write(dir.join("manifest.json"), manifest.to_json()?)?;
    Ok(EvolveReport { manifest, output, dir: dir.to_path_buf() })
}
