//! Deterministic report emission: a versioned JSON envelope carrying the
//! resolved configuration, written atomically (temp file + rename) or to
//! stdout.

use std::path::Path;

use serde::Serialize;

use crate::config::RunConfig;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize)]
pub struct Envelope<'a, T: Serialize> {
    pub format_version: u32,
    pub command: &'a str,
    pub config: &'a RunConfig,
    pub result: T,
}

pub fn emit<T: Serialize>(
    command: &str,
    config: &RunConfig,
    result: T,
    output: Option<&Path>,
) -> anyhow::Result<()> {
    let envelope = Envelope {
        format_version: FORMAT_VERSION,
        command,
        config,
        result,
    };
    let mut json = serde_json::to_string_pretty(&envelope)?;
    json.push('\n');
    match output {
        Some(path) => write_atomic(path, json.as_bytes()),
        None => {
            print!("{json}");
            Ok(())
        }
    }
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let tmp = path.with_extension("tmp-write");
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Write rows of plot data as CSV with a header line.
pub fn write_csv(path: &Path, header: &str, rows: &[Vec<f64>]) -> anyhow::Result<()> {
    let mut text = String::from(header);
    text.push('\n');
    for row in rows {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        text.push_str(&line.join(","));
        text.push('\n');
    }
    write_atomic(path, text.as_bytes())
}
