//! `--config file.toml` support.
//!
//! Every key of the file becomes a `--key value` flag inserted right after
//! the subcommand, so flags given on the command line still win.

use anyhow::{bail, Context, Result};
use std::ffi::OsString;

/// Returns `args` with the config file's flags spliced in.
pub fn expand(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading config {path}"))?;
    let table: toml::Table = text.parse().with_context(|| format!("parsing config {path}"))?;
    let mut flags = Vec::new();
    for (key, value) in &table {
        let flag = format!("--{}", key.replace('_', "-"));
        match value {
            toml::Value::Boolean(true) => flags.push(flag.into()),
            toml::Value::Boolean(false) => {}
            toml::Value::Array(items) => {
                for item in items {
                    flags.push(flag.clone().into());
                    flags.push(scalar(key, item)?.into());
                }
            }
            other => {
                flags.push(flag.into());
                flags.push(scalar(key, other)?.into());
            }
        }
    }
    let at = subcommand_index(&args).map_or(args.len(), |i| i + 1);
    let mut out = args[..at].to_vec();
    out.extend(flags);
    out.extend_from_slice(&args[at..]);
    Ok(out)
}

fn scalar(key: &str, value: &toml::Value) -> Result<String> {
    Ok(match value {
        toml::Value::String(s) => s.clone(),
        toml::Value::Integer(i) => i.to_string(),
        toml::Value::Float(f) => f.to_string(),
        toml::Value::Boolean(b) => b.to_string(),
        _ => bail!("config key {key}: unsupported value {value}"),
    })
}

fn config_path(args: &[OsString]) -> Option<String> {
    let mut it = args.iter().map(|a| a.to_string_lossy());
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().map(|s| s.into_owned());
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

const SUBCOMMANDS: [&str; 7] = ["eval", "measure", "quermass", "check-ineq", "solve", "round-trip", "fixtures"];

fn subcommand_index(args: &[OsString]) -> Option<usize> {
    args.iter().position(|a| SUBCOMMANDS.contains(&a.to_string_lossy().as_ref()))
}
