//! `key=value` config files merged under command-line flags.

use std::fs;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("config line {line}: expected key=value, got {text:?}")]
    Syntax { line: usize, text: String },
    #[error("--config needs a path")]
    MissingPath,
}

/// Parses `key=value` lines; blank lines and `#` comments are skipped.
pub fn parse(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line: i + 1,
            text: raw.to_owned(),
        })?;
        let key = k.trim().trim_start_matches("--");
        if key.is_empty() {
            return Err(ConfigError::Syntax { line: i + 1, text: raw.to_owned() });
        }
        out.push((key.to_owned(), v.trim().to_owned()));
    }
    Ok(out)
}

fn config_path(argv: &[String]) -> Result<Option<String>, ConfigError> {
    for (i, a) in argv.iter().enumerate() {
        if a == "--config" {
            return argv.get(i + 1).cloned().map(Some).ok_or(ConfigError::MissingPath);
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Ok(Some(p.to_owned()));
        }
    }
    Ok(None)
}

fn has_flag(argv: &[String], key: &str) -> bool {
    let long = format!("--{key}");
    let eq = format!("--{key}=");
    argv.iter().any(|a| *a == long || a.starts_with(&eq))
}

/// Inserts config entries missing from `argv` right after the subcommand,
/// so explicit flags always win.
pub fn merge(argv: Vec<String>, subcommands: &[&str]) -> Result<Vec<String>, ConfigError> {
    let Some(path) = config_path(&argv)? else {
        return Ok(argv);
    };
    let text = fs::read_to_string(Path::new(&path)).map_err(|source| ConfigError::Read {
        path: path.clone(),
        source,
    })?;
    let entries = parse(&text)?;
    let at = argv
        .iter()
        .position(|a| subcommands.contains(&a.as_str()))
        .map_or(argv.len(), |i| i + 1);
    let extra: Vec<String> = entries
        .into_iter()
        .filter(|(k, _)| k != "config" && !has_flag(&argv, k))
        .map(|(k, v)| if v.is_empty() { format!("--{k}") } else { format!("--{k}={v}") })
        .collect();
    let mut out = argv;
    out.splice(at..at, extra);
    Ok(out)
}
