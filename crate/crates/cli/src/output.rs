//! Deterministic artifact emission: CSV with fixed 17-significant-digit
//! formatting for bitwise reproducibility, JSON for metadata, and the run
//! manifest listing every file written.

use chrono::{DateTime, Utc};
use nsp_core::diagnostics::EnergyReport;
use nsp_core::sim::SimState;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

/// 17 significant decimal digits round-trip any f64 exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Serialize)]
pub struct ManifestCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Provenance record for one job: config digest, tool version, wall-clock
/// bounds, every artifact written and the declared checks.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool_version: &'static str,
    pub config_hash: String,
    pub started: DateTime<Utc>,
    pub finished: Option<DateTime<Utc>>,
    pub outputs: Vec<String>,
    pub checks: Vec<ManifestCheck>,
    /// materialized job configuration, defaults included
    pub config: serde_json::Value,
}

impl RunManifest {
    pub fn new(config: &impl Serialize) -> Self {
        let value = serde_json::to_value(config).expect("config serializes");
        let canonical = serde_json::to_string(&value).expect("canonical json");
        let mut hasher = Sha256::new();
        hasher.update(canonical.as_bytes());
        let digest = hasher.finalize();
        let config_hash = digest.iter().map(|b| format!("{b:02x}")).collect();
        Self {
            tool_version: env!("CARGO_PKG_VERSION"),
            config_hash,
            started: Utc::now(),
            finished: None,
            outputs: Vec::new(),
            checks: Vec::new(),
            config: value,
        }
    }

    pub fn record(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(ManifestCheck { name: name.to_string(), passed, detail });
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn finish(mut self, out_dir: &Path) -> std::io::Result<PathBuf> {
        self.finished = Some(Utc::now());
        let path = out_dir.join("manifest.json");
        self.outputs.push(path.display().to_string());
        let json = serde_json::to_string_pretty(&self).expect("manifest serializes");
        fs::write(&path, json)?;
        Ok(path)
    }
}

pub fn write_csv(
    path: &Path,
    header: &str,
    rows: impl Iterator<Item = Vec<f64>>,
) -> std::io::Result<()> {
    let file = fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(file);
    writeln!(w, "{header}")?;
    for row in rows {
        let line: Vec<String> = row.iter().map(|v| fmt_f64(*v)).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    w.flush()
}

pub fn write_state_dump(
    dir: &Path,
    label: &str,
    state: &SimState,
    config_hash: &str,
    steps: usize,
) -> std::io::Result<Vec<PathBuf>> {
    let csv_path = dir.join(format!("state_{label}.csv"));
    match state {
        SimState::One(s) => {
            let grid = s.n.grid();
            write_csv(
                &csv_path,
                "x,n,u,phi",
                (0..grid.n_cells).map(|i| {
                    vec![grid.node(i), s.n.values()[i], s.u.values()[i], s.phi.values()[i]]
                }),
            )?;
        }
        SimState::Two(s) => {
            let grid = s.n_ion.grid();
            write_csv(
                &csv_path,
                "x,n_i,u_i,n_e,u_e,phi",
                (0..grid.n_cells).map(|i| {
                    vec![
                        grid.node(i),
                        s.n_ion.values()[i],
                        s.u_ion.values()[i],
                        s.n_electron.values()[i],
                        s.u_electron.values()[i],
                        s.phi.values()[i],
                    ]
                }),
            )?;
        }
    }
    let sidecar = dir.join(format!("state_{label}.json"));
    let meta = serde_json::json!({
        "time": state.time(),
        "config_hash": config_hash,
        "step_count": steps,
    });
    fs::write(&sidecar, serde_json::to_string_pretty(&meta).expect("sidecar"))?;
    Ok(vec![csv_path, sidecar])
}

pub fn write_energy_csv(path: &Path, reports: &[EnergyReport]) -> std::io::Result<()> {
    write_csv(
        path,
        "t,E_zero,E_first,D_wave,D_flat,sup_n,sup_u,sup_phi",
        reports.iter().map(|r| {
            vec![r.time, r.e_zero, r.e_first, r.d_wave, r.d_flat, r.sup_n, r.sup_u, r.sup_phi]
        }),
    )
}

/// Stable label for a time used in file names: `t12.5` -> `t12p5`.
pub fn time_label(t: f64) -> String {
    let s = format!("{t}");
    format!("t{}", s.replace('.', "p").replace('-', "m"))
}
