//! Setting resolution: command-line flag, then config file, then default.
//!
//! The config file is flat `key = value` text. Keys are the long flag names
//! without the leading dashes; `#` starts a comment line.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::error::{CliError, Result};

/// Parses `key = value` lines. Later duplicates are an error.
pub fn parse_config(text: &str) -> std::result::Result<BTreeMap<String, String>, (usize, String)> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| (i + 1, format!("expected `key = value`, found {line:?}")))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err((i + 1, "empty key".into()));
        }
        if out.insert(k.to_string(), v.to_string()).is_some() {
            return Err((i + 1, format!("duplicate key {k:?}")));
        }
    }
    Ok(out)
}

/// Resolves each setting once and records the outcome for the output
/// metadata.
#[derive(Debug, Default)]
pub struct Settings {
    file: BTreeMap<String, String>,
    resolved: BTreeMap<String, String>,
}

impl Settings {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let file = match path {
            None => BTreeMap::new(),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
                parse_config(&text).map_err(|(line, message)| CliError::Parse {
                    path: p.to_path_buf(),
                    line,
                    message,
                })?
            }
        };
        Ok(Settings {
            file,
            resolved: BTreeMap::new(),
        })
    }

    pub fn from_map(file: BTreeMap<String, String>) -> Self {
        Settings {
            file,
            resolved: BTreeMap::new(),
        }
    }

    /// `flag`, else the config file entry, else `default`.
    pub fn value<T>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let v = self.optional(key, flag)?.unwrap_or(default);
        self.resolved.insert(key.to_string(), v.to_string());
        Ok(v)
    }

    /// Like [`Settings::value`] without a default; unset settings are not
    /// recorded.
    pub fn optional<T>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let from_file = self.file.remove(key);
        let v = match (flag, from_file) {
            (Some(v), _) => Some(v),
            (None, Some(s)) => Some(
                s.parse::<T>()
                    .map_err(|e| CliError::usage(format!("config key {key:?}: invalid value {s:?}: {e}")))?,
            ),
            (None, None) => None,
        };
        if let Some(v) = &v {
            self.resolved.insert(key.to_string(), v.to_string());
        }
        Ok(v)
    }

    /// Records a value that is not user-configurable (e.g. the input path).
    pub fn record(&mut self, key: &str, value: impl Display) {
        self.resolved.insert(key.to_string(), value.to_string());
    }

    /// Drops a setting from the record.
    pub fn forget(&mut self, key: &str) {
        self.resolved.remove(key);
    }

    /// Fails on config-file keys that no setting consumed, and returns the
    /// resolved settings.
    pub fn finish(self) -> Result<BTreeMap<String, String>> {
        if let Some(k) = self.file.keys().next() {
            return Err(CliError::usage(format!("unknown key {k:?} in config file for this command")));
        }
        Ok(self.resolved)
    }
}

/// Rounds away the representation noise of `a + i·step`.
fn tidy(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

/// `"a:step:b"` (inclusive) or a comma-separated list.
pub fn parse_real_grid(s: &str) -> Result<Vec<f64>> {
    let bad = |why: &str| CliError::usage(format!("invalid grid {s:?}: {why}"));
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|_| bad("not a number")).and_then(|x| {
        if x.is_finite() {
            Ok(x)
        } else {
            Err(bad("not finite"))
        }
    });
    let out = match parts.as_slice() {
        [a, step, b] => {
            let (a, step, b) = (num(a)?, num(step)?, num(b)?);
            if step <= 0.0 || b < a {
                return Err(bad("need step > 0 and start <= end"));
            }
            let count = ((b - a) / step + 1e-9).floor() as usize + 1;
            (0..count).map(|i| tidy(a + i as f64 * step)).collect()
        }
        [_] => s.split(',').map(|t| num(t.trim())).collect::<Result<Vec<_>>>()?,
        _ => return Err(bad("expected start:step:end or a comma list")),
    };
    if out.is_empty() {
        return Err(bad("empty"));
    }
    Ok(out)
}

/// `"a:b"`, `"a:step:b"` or a comma-separated list of positive integers.
pub fn parse_dim_grid(s: &str) -> Result<Vec<usize>> {
    let bad = |why: &str| CliError::usage(format!("invalid dimension grid {s:?}: {why}"));
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad("not a positive integer"));
    let parts: Vec<&str> = s.split(':').collect();
    let out: Vec<usize> = match parts.as_slice() {
        [a, b] => (num(a)?..=num(b)?).collect(),
        [a, step, b] => {
            let step = num(step)?;
            if step == 0 {
                return Err(bad("step must be positive"));
            }
            (num(a)?..=num(b)?).step_by(step).collect()
        }
        [_] => s.split(',').map(num).collect::<Result<Vec<_>>>()?,
        _ => return Err(bad("expected start:end, start:step:end or a comma list")),
    };
    if out.is_empty() || out.contains(&0) {
        return Err(bad("dimensions must be a non-empty set of values >= 1"));
    }
    Ok(out)
}
