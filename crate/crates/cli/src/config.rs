//! Flat key-value run configuration.
//!
//! Configs are TOML documents restricted to top-level scalars. Physical
//! quantities carry their unit in the key (`duration_ns`, `k_pump_per_ns`).
//! Every command reads the keys it knows; anything left over is reported as
//! an unknown key before the command starts working.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug)]
pub struct RunConfig {
    /// Directory that relative paths in the config are resolved against.
    dir: PathBuf,
    pub sha256: String,
    values: BTreeMap<String, toml::Value>,
    read: RefCell<BTreeSet<String>>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let bytes =
            std::fs::read(path).map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_bytes(&bytes, dir).map_err(|e| CliError::config(format!("{}: {}", path.display(), e.message)))
    }

    pub fn from_bytes(bytes: &[u8], dir: PathBuf) -> Result<Self, CliError> {
        let text = std::str::from_utf8(bytes).map_err(|e| CliError::config(format!("config is not UTF-8: {e}")))?;
        let table: toml::Table = toml::from_str(text).map_err(|e| CliError::config(e.to_string()))?;
        for (key, value) in &table {
            if matches!(value, toml::Value::Table(_) | toml::Value::Array(_)) {
                return Err(CliError::config(format!(
                    "key '{key}': config must be flat, nested values are not allowed"
                )));
            }
        }
        Ok(RunConfig {
            dir,
            sha256: hex::encode(Sha256::digest(bytes)),
            values: table.into_iter().collect(),
            read: RefCell::new(BTreeSet::new()),
        })
    }

    fn get(&self, key: &str) -> Option<&toml::Value> {
        self.read.borrow_mut().insert(key.to_string());
        self.values.get(key)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn opt_f64(&self, key: &str) -> Result<Option<f64>, CliError> {
        match self.get(key) {
            None => Ok(None),
            Some(toml::Value::Float(v)) => Ok(Some(*v)),
            Some(toml::Value::Integer(v)) => Ok(Some(*v as f64)),
            Some(other) => Err(wrong_type(key, "a number", other)),
        }
    }

    pub fn f64(&self, key: &str) -> Result<f64, CliError> {
        self.opt_f64(key)?.ok_or_else(|| missing(key))
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        Ok(self.opt_f64(key)?.unwrap_or(default))
    }

    pub fn opt_u64(&self, key: &str) -> Result<Option<u64>, CliError> {
        match self.get(key) {
            None => Ok(None),
            Some(toml::Value::Integer(v)) if *v >= 0 => Ok(Some(*v as u64)),
            Some(other) => Err(wrong_type(key, "a non-negative integer", other)),
        }
    }

    pub fn u64_or(&self, key: &str, default: u64) -> Result<u64, CliError> {
        Ok(self.opt_u64(key)?.unwrap_or(default))
    }

    pub fn opt_str(&self, key: &str) -> Result<Option<String>, CliError> {
        match self.get(key) {
            None => Ok(None),
            Some(toml::Value::String(s)) => Ok(Some(s.clone())),
            Some(other) => Err(wrong_type(key, "a string", other)),
        }
    }

    pub fn str(&self, key: &str) -> Result<String, CliError> {
        self.opt_str(key)?.ok_or_else(|| missing(key))
    }

    pub fn bool_or(&self, key: &str, default: bool) -> Result<bool, CliError> {
        match self.get(key) {
            None => Ok(default),
            Some(toml::Value::Boolean(b)) => Ok(*b),
            Some(other) => Err(wrong_type(key, "true or false", other)),
        }
    }

    /// Path relative to the config file's directory.
    pub fn opt_path(&self, key: &str) -> Result<Option<PathBuf>, CliError> {
        Ok(self.opt_str(key)?.map(|p| self.dir.join(p)))
    }

    pub fn path(&self, key: &str) -> Result<PathBuf, CliError> {
        self.opt_path(key)?.ok_or_else(|| missing(key))
    }

    /// Keys with the given prefix, in sorted order.
    pub fn keys_with_prefix(&self, prefix: &str) -> Vec<String> {
        self.values.keys().filter(|k| k.starts_with(prefix)).cloned().collect()
    }

    /// Fails on the first key that no getter asked for.
    pub fn finish(&self) -> Result<(), CliError> {
        let read = self.read.borrow();
        let Some(key) = self.values.keys().find(|k| !read.contains(*k)) else {
            return Ok(());
        };
        let hint = read
            .iter()
            .find(|known| known.starts_with(&format!("{key}_")))
            .map(|known| format!(" (did you mean '{known}'? keys carry their unit)"))
            .unwrap_or_default();
        Err(CliError::config(format!("unknown key '{key}'{hint}")))
    }
}

fn missing(key: &str) -> CliError {
    CliError::config(format!("missing required key '{key}'"))
}

fn wrong_type(key: &str, want: &str, got: &toml::Value) -> CliError {
    CliError::config(format!("key '{key}' must be {want}, got {got}"))
}

/// Range checks that name the key.
pub fn positive(key: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::config(format!("key '{key}' must be positive, got {v}")))
    }
}

pub fn non_negative(key: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(CliError::config(format!("key '{key}' must be non-negative, got {v}")))
    }
}

pub fn unit_interval(key: &str, v: f64) -> Result<f64, CliError> {
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(CliError::config(format!("key '{key}' must lie in [0, 1], got {v}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> RunConfig {
        RunConfig::from_bytes(text.as_bytes(), PathBuf::from("/cfg")).unwrap()
    }

    #[test]
    fn typed_getters() {
        let c = cfg("a_ns = 2\nb = 1.5\nname = \"x\"\nflag = true\ninput = \"d/t.csv\"\n");
        assert_eq!(c.f64("a_ns").unwrap(), 2.0);
        assert_eq!(c.f64_or("b", 0.0).unwrap(), 1.5);
        assert_eq!(c.str("name").unwrap(), "x");
        assert!(c.bool_or("flag", false).unwrap());
        assert_eq!(c.path("input").unwrap(), PathBuf::from("/cfg/d/t.csv"));
        assert!(c.finish().is_ok());
    }

    #[test]
    fn errors_name_the_key() {
        let c = cfg("duration_ns = \"long\"\n");
        assert!(c.f64("duration_ns").unwrap_err().message.contains("'duration_ns'"));
        assert!(c.f64("seed_x").unwrap_err().message.contains("missing required key 'seed_x'"));
        assert!(c.opt_u64("duration_ns").unwrap_err().message.contains("'duration_ns'"));
    }

    #[test]
    fn unknown_key_suggests_unit_suffix() {
        let c = cfg("tau_off = 6.0\n");
        let _ = c.opt_f64("tau_off_ns");
        let msg = c.finish().unwrap_err().message;
        assert!(msg.contains("unknown key 'tau_off'") && msg.contains("tau_off_ns"), "{msg}");
    }

    #[test]
    fn nested_values_rejected() {
        let err = RunConfig::from_bytes(b"[sim]\nx = 1\n", PathBuf::new()).unwrap_err();
        assert!(err.message.contains("'sim'"));
    }

    #[test]
    fn hash_is_of_the_bytes() {
        let a = cfg("x = 1\n");
        let b = cfg("x = 1 \n");
        assert_eq!(a.sha256.len(), 64);
        assert_ne!(a.sha256, b.sha256);
    }
}
