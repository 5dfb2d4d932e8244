//! `key = value` config files, merged into the argument list so that flags
//! given on the command line win.

use std::fs;
use std::path::Path;

use super::CliError;

pub(crate) const SUBCOMMANDS: [&str; 6] = ["simulate", "distances", "fit", "batch", "roi-sweep", "correlate"];

/// Global flags that take a value, so the token after them is not a
/// subcommand.
const GLOBAL_VALUE_FLAGS: [&str; 5] = ["--seed", "--format", "--out", "--jobs", "--config"];

/// Parses config text into `(key, value)` pairs. Blank lines and `#`
/// comments are ignored; keys may be written with or without `--`.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value, got `{raw}`", i + 1)))?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        if key.is_empty() || key == "config" {
            return Err(CliError::Usage(format!("config line {}: invalid key", i + 1)));
        }
        pairs.push((key, value.trim().trim_matches('"').to_string()));
    }
    Ok(pairs)
}

fn config_path(args: &[String]) -> Option<String> {
    let mut iter = args.iter();
    while let Some(a) = iter.next() {
        if a == "--config" {
            return iter.next().cloned();
        }
        if let Some(v) = a.strip_prefix("--config=") {
            return Some(v.to_string());
        }
    }
    None
}

fn has_flag(args: &[String], key: &str) -> bool {
    let flag = format!("--{key}");
    args.iter()
        .any(|a| *a == flag || a.strip_prefix(&flag).is_some_and(|rest| rest.starts_with('=')))
}

fn subcommand_index(args: &[String]) -> Option<usize> {
    let mut i = 1;
    while i < args.len() {
        let a = args[i].as_str();
        if SUBCOMMANDS.contains(&a) {
            return Some(i);
        }
        if GLOBAL_VALUE_FLAGS.contains(&a) {
            i += 1;
        }
        i += 1;
    }
    None
}

/// Expands `--config <file>` into explicit flags inserted after the
/// subcommand. Keys already present on the command line are left alone.
/// A value of `true` becomes a bare switch and `false` drops it.
pub fn merge_config(args: Vec<String>) -> Result<Vec<String>, CliError> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = fs::read_to_string(Path::new(&path))
        .map_err(|e| CliError::Usage(format!("cannot read config file {path}: {e}")))?;
    let pairs = parse_config(&text)?;
    let Some(at) = subcommand_index(&args) else {
        return Ok(args);
    };
    let mut injected = Vec::new();
    for (key, value) in pairs {
        if has_flag(&args, &key) {
            continue;
        }
        match value.as_str() {
            "true" => injected.push(format!("--{key}")),
            "false" => {}
            _ => injected.push(format!("--{key}={value}")),
        }
    }
    let mut merged = args;
    merged.splice(at + 1..at + 1, injected);
    Ok(merged)
}
