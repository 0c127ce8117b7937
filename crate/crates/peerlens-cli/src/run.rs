//! Run manifests: every subcommand records its fully resolved
//! configuration and a sha256 per artifact it wrote.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use peerlens::error::{Error, Result};
use peerlens::fsio::{sha256_hex, write_atomic};
use serde::Serialize;

pub const RUN_FORMAT: &str = "peerlens/run/v1";

/// File names whose bytes legitimately differ between identical runs
/// (wall-clock timings); they are written but never hashed, so rerunning
/// an invocation reproduces run.json byte for byte.
const UNHASHED: [&str; 1] = ["timings.csv"];

#[derive(Serialize)]
struct RunManifest<'a> {
    format: &'static str,
    command: &'a str,
    config: &'a serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<&'a serde_json::Value>,
    outputs: BTreeMap<String, String>,
}

/// Writes `run.json` into `out`: the resolved config, an optional report
/// of facts observed during the run, and the hash of every artifact under
/// `out` (timing files and run.json itself excluded).
pub fn write_run_manifest(
    out: &Path,
    command: &str,
    config: &serde_json::Value,
    report: Option<&serde_json::Value>,
) -> Result<()> {
    let mut outputs = BTreeMap::new();
    let mut stack = vec![out.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).map_err(|e| Error::io(&dir, e))? {
            let path = entry.map_err(|e| Error::io(&dir, e))?.path();
            if path.is_dir() {
                stack.push(path);
                continue;
            }
            let name = path.file_name().unwrap_or_default().to_string_lossy();
            if name == "run.json" || UNHASHED.contains(&name.as_ref()) {
                continue;
            }
            let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
            let rel = path
                .strip_prefix(out)
                .expect("walked path is under out")
                .to_string_lossy()
                .replace('\\', "/");
            outputs.insert(rel, sha256_hex(&bytes));
        }
    }
    let manifest = RunManifest { format: RUN_FORMAT, command, config, report, outputs };
    let mut bytes = serde_json::to_vec_pretty(&manifest)?;
    bytes.push(b'\n');
    write_atomic(out.join("run.json"), &bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_hashes_artifacts_but_not_timings() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path();
        fs::write(out.join("a.csv"), "x").unwrap();
        fs::create_dir(out.join("sub")).unwrap();
        fs::write(out.join("sub/b.json"), "y").unwrap();
        fs::write(out.join("timings.csv"), "1.5s").unwrap();
        let config = serde_json::json!({"k": 1});
        write_run_manifest(out, "test", &config, None).unwrap();

        let text = fs::read_to_string(out.join("run.json")).unwrap();
        let manifest: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(manifest["format"], RUN_FORMAT);
        assert_eq!(manifest["config"]["k"], 1);
        let outputs = manifest["outputs"].as_object().unwrap();
        assert_eq!(
            outputs.keys().collect::<Vec<_>>(),
            ["a.csv", "sub/b.json"],
            "timings and run.json stay unhashed"
        );
        assert_eq!(outputs["a.csv"], sha256_hex(b"x"));

        // Rerunning over identical artifacts reproduces run.json exactly,
        // even though timings.csv changed.
        fs::write(out.join("timings.csv"), "2.0s").unwrap();
        write_run_manifest(out, "test", &config, None).unwrap();
        assert_eq!(fs::read_to_string(out.join("run.json")).unwrap(), text);
    }
}
