//! Flat `key = value` configuration files.
//!
//! One key per line, `#` starts a comment. Keys are the long CLI flag names
//! (`trials = 50` is `--trials 50`); `true` turns a switch on and `false`
//! leaves it off.

use crate::error::{Error, Result};

pub fn parse_config_file(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs: Vec<(String, String)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", idx + 1)))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim().to_string();
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '-') {
            return Err(Error::Config(format!("line {}: bad key {key:?}", idx + 1)));
        }
        if value.is_empty() {
            return Err(Error::Config(format!("line {}: empty value for {key}", idx + 1)));
        }
        if pairs.iter().any(|(k, _)| *k == key) {
            return Err(Error::Config(format!("line {}: duplicate key {key}", idx + 1)));
        }
        pairs.push((key, value));
    }
    Ok(pairs)
}

/// Turns config pairs into long-flag arguments.
pub fn config_to_args(pairs: &[(String, String)]) -> Vec<String> {
    let mut args = Vec::new();
    for (k, v) in pairs {
        match v.as_str() {
            "true" => args.push(format!("--{k}")),
            "false" => {}
            _ => {
                args.push(format!("--{k}"));
                args.push(v.clone());
            }
        }
    }
    args
}
