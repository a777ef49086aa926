//! Run manifests: every output file is accompanied by a JSON record of the
//! command, the resolved configuration, the seed, code version, timestamps,
//! grid descriptors, and the certified error caps of the run.

use serde::Serialize;
use serde_json::Value;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

#[derive(Clone, Debug, Serialize)]
pub struct GridDescriptor {
    pub k: u32,
    pub n_points: usize,
    pub rank: usize,
    pub n_dim: usize,
    pub density: f64,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ErrorCaps {
    pub kernel_eps: f64,
    pub factor_tol: f64,
    pub quadrature_error: Option<f64>,
    pub sup_bias_cap: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Value,
    pub seed: u64,
    pub code_version: String,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub grids: Vec<GridDescriptor>,
    pub error_caps: ErrorCaps,
}

fn now_unix() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

pub struct ManifestBuilder {
    manifest: RunManifest,
}

impl ManifestBuilder {
    pub fn start(command: String, config: Value, seed: u64) -> Self {
        ManifestBuilder {
            manifest: RunManifest {
                command,
                config,
                seed,
                code_version: env!("CARGO_PKG_VERSION").to_string(),
                started_unix: now_unix(),
                finished_unix: 0.0,
                grids: Vec::new(),
                error_caps: ErrorCaps::default(),
            },
        }
    }

    pub fn grid(&mut self, g: GridDescriptor) -> &mut Self {
        self.manifest.grids.push(g);
        self
    }

    pub fn caps(&mut self, caps: ErrorCaps) -> &mut Self {
        self.manifest.error_caps = caps;
        self
    }

    pub fn finish(mut self, out_path: &Path) -> std::io::Result<()> {
        self.manifest.finished_unix = now_unix();
        let path = manifest_path(out_path);
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                std::fs::create_dir_all(dir)?;
            }
        }
        let f = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(f, &self.manifest).map_err(std::io::Error::other)
    }
}

/// sup.csv -> sup.manifest.json
pub fn manifest_path(out: &Path) -> PathBuf {
    let stem = out.with_extension("");
    let mut s = stem.into_os_string();
    s.push(".manifest.json");
    PathBuf::from(s)
}

/// sup.csv -> sup.json (the lossless JSON mirror of the table).
pub fn json_mirror_path(out: &Path) -> PathBuf {
    out.with_extension("json")
}
