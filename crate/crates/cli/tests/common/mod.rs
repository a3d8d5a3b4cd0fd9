#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use silsamp_cli::RunConfig;

pub fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

/// A mock-categorical run over the bundled 2020 wave, writing into `out`.
/// `extra` is appended to the top-level table (before any sub-table).
pub fn mock_config_text(out: &Path, extra: &str) -> String {
    let data = data_dir();
    format!(
        r#"codebook = "{codebook}"
output_dir = "{out}"
seed = 11
population_size = 400
{extra}

[[waves]]
label = "anes2020"
path = "{wave}"

[backend]
kind = "mock-categorical"
max_in_flight = 4

[bootstrap]
replicates = 200
"#,
        codebook = data.join("codebook.toml").display(),
        wave = data.join("anes2020_synthetic.csv").display(),
        out = out.display(),
    )
}

pub fn mock_config(out: &Path, extra: &str) -> RunConfig {
    let config = RunConfig::from_toml_str(&mock_config_text(out, extra)).unwrap();
    config.validate().unwrap();
    config
}

/// Every file under `root` except the manifest, keyed by relative path.
pub fn tree(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<PathBuf, Vec<u8>>) {
        for entry in fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(root, &path, out);
            } else if path.file_name().unwrap() != "manifest.json" {
                out.insert(path.strip_prefix(root).unwrap().to_path_buf(), fs::read(&path).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}

/// Paths whose contents differ between two trees, plus paths present in only one.
pub fn tree_diff(a: &BTreeMap<PathBuf, Vec<u8>>, b: &BTreeMap<PathBuf, Vec<u8>>) -> Vec<PathBuf> {
    let mut diff: Vec<PathBuf> = a.iter().filter(|(k, v)| b.get(*k) != Some(v)).map(|(k, _)| k.clone()).collect();
    diff.extend(b.keys().filter(|k| !a.contains_key(*k)).cloned());
    diff
}
