//! Flat `key = value` experiment configs.
//!
//! ```text
//! # comment
//! include base.cfg
//! preset = maxdpg-1024
//! seeds = 1..4
//! ```
//!
//! Later keys override earlier ones; `include` and `preset` splice their
//! keys in at that point.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{file}:{line}: {msg}")]
    Syntax { file: String, line: usize, msg: String },
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("include cycle through {0}")]
    Cycle(String),
    #[error("unknown preset {0:?} (known: {1})")]
    UnknownPreset(String, String),
    #[error("config is empty")]
    Empty,
    #[error("missing key {0:?}")]
    Missing(&'static str),
    #[error("key {key:?}: {msg}")]
    Value { key: String, msg: String },
    #[error("unknown key {0:?}")]
    UnknownKey(String),
}

pub const PRESETS: &[(&str, &str)] = &[
    (
        "maxdpg-1024",
        "name = maxdpg-1024
protocol = max
seed_graph = gen:complete:2
n = 1024
seeds = 1..4
checks = maxdpg,density
slack = 6
a = 1.5
warmup = 64
",
    ),
    (
        "sf-gamma2.5",
        "name = sf-gamma2.5
protocol = sf:2.5:1
seed_graph = gen:complete:4
n = 5000
seeds = 1..4
checks = powerlaw
gamma = 2.5
certainty = 1
",
    ),
    (
        "linear-0.75",
        "name = linear-0.75
protocol = linear:0.75
seed_graph = gen:complete:100
n = 400
seeds = 1..4
checks = linear
",
    ),
    (
        "regular-4",
        "name = regular-4
protocol = regular:4
seed_graph = gen:complete:5
n = 500
seeds = 1
checks = regularity
",
    ),
];

pub fn preset(name: &str) -> Result<&'static str, ConfigError> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
        .ok_or_else(|| {
            let known: Vec<&str> = PRESETS.iter().map(|(n, _)| *n).collect();
            ConfigError::UnknownPreset(name.into(), known.join(", "))
        })
}

/// Resolved keys plus every file read along the way.
#[derive(Clone, Debug, Default)]
pub struct RawConfig {
    pub keys: BTreeMap<String, String>,
    pub files: Vec<PathBuf>,
}

pub fn load(path: &Path) -> Result<RawConfig, ConfigError> {
    let mut raw = RawConfig::default();
    load_file(path, &mut raw, &mut Vec::new())?;
    Ok(raw)
}

pub fn parse_str(text: &str, base: &Path) -> Result<RawConfig, ConfigError> {
    let mut raw = RawConfig::default();
    apply(text, "<string>", base, &mut raw, &mut Vec::new())?;
    Ok(raw)
}

fn load_file(path: &Path, raw: &mut RawConfig, stack: &mut Vec<PathBuf>) -> Result<(), ConfigError> {
    let canon = path.canonicalize().unwrap_or_else(|_| path.to_path_buf());
    if stack.contains(&canon) {
        return Err(ConfigError::Cycle(path.display().to_string()));
    }
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    raw.files.push(path.to_path_buf());
    stack.push(canon);
    let base = path.parent().unwrap_or(Path::new("."));
    apply(&text, &path.display().to_string(), base, raw, stack)?;
    stack.pop();
    Ok(())
}

fn apply(text: &str, file: &str, base: &Path, raw: &mut RawConfig, stack: &mut Vec<PathBuf>) -> Result<(), ConfigError> {
    for (i, line) in text.lines().enumerate() {
        let l = line.split('#').next().unwrap_or("").trim();
        if l.is_empty() {
            continue;
        }
        let syntax = |msg: String| ConfigError::Syntax {
            file: file.into(),
            line: i + 1,
            msg,
        };
        if let Some(rest) = l.strip_prefix("include ") {
            load_file(&base.join(rest.trim()), raw, stack)?;
            continue;
        }
        let (k, v) = l
            .split_once('=')
            .ok_or_else(|| syntax(format!("expected `key = value`, got {l:?}")))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(syntax("empty key".into()));
        }
        match k {
            "include" => load_file(&base.join(v), raw, stack)?,
            "preset" => apply(preset(v)?, &format!("preset {v}"), base, raw, stack)?,
            _ => {
                raw.keys.insert(k.into(), v.into());
            }
        }
    }
    Ok(())
}

/// `a..b` (inclusive) or a comma list.
pub fn parse_seeds(s: &str) -> Result<Vec<u64>, String> {
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
        let b: u64 = b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
        if a > b {
            return Err(format!("empty range {s}"));
        }
        return Ok((a..=b).collect());
    }
    s.split(',')
        .map(|t| t.trim().parse().map_err(|e| format!("{t:?}: {e}")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn later_keys_win() {
        let raw = parse_str("preset = maxdpg-1024\nn = 128\n", Path::new(".")).unwrap();
        assert_eq!(raw.keys["n"], "128");
        assert_eq!(raw.keys["protocol"], "max");
    }

    #[test]
    fn syntax_errors_have_lines() {
        let e = parse_str("n = 3\n\nbogus\n", Path::new(".")).unwrap_err();
        assert_eq!(e.to_string(), "<string>:3: expected `key = value`, got \"bogus\"");
        assert!(matches!(parse_str("preset = nope", Path::new(".")), Err(ConfigError::UnknownPreset(..))));
    }

    #[test]
    fn seed_lists() {
        assert_eq!(parse_seeds("3..5").unwrap(), vec![3, 4, 5]);
        assert_eq!(parse_seeds("7, 1").unwrap(), vec![7, 1]);
        assert!(parse_seeds("5..3").is_err());
    }
}
