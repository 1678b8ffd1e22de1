//! Files in and out: run configs, canonical CSV tables, run manifests and
//! the bundled experiment recipes.

pub mod config;
pub mod manifest;
pub mod table;

pub use config::{CommandKind, GridConfig, InitialConfig, OutputConfig, PreparedRun, RunConfig};
pub use manifest::{execute, write_run_artifacts, EvolveReport, FileDigest, Relaxation, RunManifest, RunSummary};
pub use table::{fmt_f64, Cell, CsvTable};

use crate::asymptotics::AsymptoticTable;
use crate::error::{NdsgError, Result};
use crate::traveling_wave::{BranchSweep, KinkProfile, VelocitySpectrum};

/// Bundled recipes: `(name, TOML source)`.
pub const RECIPES: [(&str, &str); 4] = [
    ("fig3a", include_str!("../../../../recipes/fig3a.toml")),
    ("fig3b", include_str!("../../../../recipes/fig3b.toml")),
    ("fig5", include_str!("../../../../recipes/fig5.toml")),
    ("fig6", include_str!("../../../../recipes/fig6.toml")),
];

pub fn recipe(name: &str) -> Result<RunConfig> {
    let (_, src) = RECIPES
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| NdsgError::Config(format!("unknown recipe {name:?}; available: fig3a, fig3b, fig5, fig6")))?;
    RunConfig::from_toml(src)
}

/// `n, value, mismatch, bracket_lo, bracket_hi, seeding_defect`.
pub fn spectrum_table(s: &VelocitySpectrum) -> CsvTable {
    let mut t = CsvTable::new(&["n", "value", "mismatch", "bracket_lo", "bracket_hi", "seeding_defect"]);
    for e in &s.entries {
        t.push(vec![e.n.into(), e.value.into(), e.mismatch.into(), e.bracket.0.into(), e.bracket.1.into(), e.seeding_defect.into()]);
    }
    t
}

/// `lambda, v1, v2, ...`; unresolved entries are left empty.
pub fn sweep_table(s: &BranchSweep) -> CsvTable {
    let mut header = vec!["lambda".to_string()];
    header.extend((1..=s.branches.len()).map(|n| format!("v{n}")));
    let mut t = CsvTable::new(&header);
    for (i, &l) in s.lambdas.iter().enumerate() {
        let mut row = vec![Cell::Num(l)];
        row.extend(s.branches.iter().map(|b| Cell::from(b[i])));
        t.push(row);
    }
    t
}

/// `xi, phi, dphi, q, dq`.
pub fn kink_table(k: &KinkProfile) -> Result<CsvTable> {
    CsvTable::from_columns(&["xi", "phi", "dphi", "q", "dq"], &[&k.xi, &k.phi, &k.dphi, &k.q, &k.dq])
}

/// `n, asymptotic, computed, abs_deviation, rel_deviation`.
pub fn asymptotic_table(t: &AsymptoticTable) -> CsvTable {
    let mut out = CsvTable::new(&["n", "asymptotic", "computed", "abs_deviation", "rel_deviation"]);
    for r in &t.rows {
        out.push(vec![r.n.into(), r.asymptotic.into(), r.computed.into(), r.abs_deviation.into(), r.rel_deviation.into()]);
    }
    out
}
