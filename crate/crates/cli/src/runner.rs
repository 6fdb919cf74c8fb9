//! Dispatch of a validated config and the single end-of-run write.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Result;

use crate::config::{ExperimentConfig, Kind};
use crate::manifest::{Check, Comparison, OutputFile, Real, RunManifest};
use crate::sections::{self, Section};

type SectionFn = fn(&ExperimentConfig) -> Result<Section>;

/// Manifest plus the result files it describes, not yet on disk.
#[derive(Debug)]
pub struct RunOutput {
    pub manifest: RunManifest,
    pub files: Vec<OutputFile>,
}

impl RunOutput {
    pub fn passed(&self) -> bool {
        self.manifest.passed
    }
}

/// Sections executed for `kind`, in order.
pub fn plan(kind: Kind) -> Vec<(&'static str, SectionFn)> {
    match kind {
        Kind::Spectrum => vec![("spectrum", sections::spectrum)],
        Kind::HeatTrace => vec![("heat-trace", sections::heat_trace)],
        Kind::VolumeInvariance => vec![("volume-invariance", sections::volume_invariance)],
        Kind::Dixmier => vec![("dixmier", sections::dixmier)],
        Kind::Flow => vec![("flow", sections::flow)],
        Kind::Moments => vec![("moments", sections::moments)],
        Kind::Euclidean => vec![("euclidean", sections::euclidean)],
        Kind::CurvatureForm => vec![("curvature-form", sections::curvature_form)],
        Kind::FullReport => vec![
            ("algebra", sections::algebra),
            ("eigen-formula", sections::eigen_formula),
            ("splitting", sections::splitting),
            ("heat-trace", sections::heat_trace_flat),
            ("volume-invariance", sections::volume_invariance),
            ("volume-invariance-y", sections::volume_invariance_y),
            ("dirac", sections::dirac),
            ("dixmier", sections::dixmier),
            ("curvature-form", sections::curvature_form),
            ("flow", sections::flow),
            ("moments", sections::moments),
            ("euclidean", sections::euclidean),
        ],
    }
}

/// Executes every section of the configured kind. Section errors become
/// failed `<section>.completed` checks; nothing is written here.
pub fn run(cfg: &ExperimentConfig) -> RunOutput {
    let start = Instant::now();
    let hash = cfg.hash();
    let short = &hash[..12];
    let mut checks = Vec::new();
    let mut values = BTreeMap::new();
    let mut notes = Vec::new();
    let mut files = Vec::new();
    for (name, f) in plan(cfg.kind) {
        match f(cfg) {
            Ok(s) => {
                checks.extend(s.checks);
                values.extend(s.values.into_iter().map(|(k, v)| (k, Real(v))));
                notes.extend(s.notes);
                files.extend(
                    s.tables
                        .into_iter()
                        .map(|(table, contents)| OutputFile { name: format!("{table}-{short}.csv"), contents }),
                );
            }
            Err(e) => {
                checks.push(Check::new(format!("{name}.completed"), f64::NAN, Comparison::AtMost, 0.0));
                notes.push(format!("{name} failed: {e:#}"));
            }
        }
    }
    let passed = checks.iter().all(|c| c.passed);
    let manifest = RunManifest {
        tool: "nctorus".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        kind: cfg.kind.name().into(),
        config_hash: hash.clone(),
        config: serde_json::to_value(cfg).expect("config serializes"),
        wall_time: cfg.record_wall_time.then(|| Real(start.elapsed().as_secs_f64())),
        outputs: files.iter().map(OutputFile::record).collect(),
        checks,
        values,
        notes,
        passed,
    };
    RunOutput { manifest, files }
}

/// Writes the result files and then `manifest.json` into `dir`.
pub fn write_outputs(dir: &Path, out: &RunOutput) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for f in &out.files {
        let p = dir.join(&f.name);
        fs::write(&p, &f.contents)?;
        written.push(p);
    }
    let p = dir.join("manifest.json");
    fs::write(&p, out.manifest.to_json())?;
    written.push(p);
    Ok(written)
}
