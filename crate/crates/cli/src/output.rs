//! JSON and CSV writers.

use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Value};

use crate::Cli;

/// Serializes `result`, adds the meta block unless `--no-meta`, and writes
/// it to `--out` or stdout.
pub fn emit<T: Serialize>(cli: &Cli, result: &T) -> Result<()> {
    let mut value = serde_json::to_value(result)?;
    if !cli.no_meta {
        if let Value::Object(map) = &mut value {
            let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
            map.insert(
                "meta".into(),
                json!({
                    "tool": "pqmix",
                    "version": env!("CARGO_PKG_VERSION"),
                    "timestamp_unix": secs,
                    "threads": rayon::current_num_threads(),
                }),
            );
        }
    }
    let mut text = serde_json::to_string_pretty(&value)?;
    text.push('\n');
    match &cli.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Writes `rows` under `header` when `--emit-csv` was given.
pub fn csv_table<R, I>(cli: &Cli, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let Some(path) = &cli.emit_csv else {
        return Ok(());
    };
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}
