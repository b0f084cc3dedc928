//! Provenance headers and output destinations.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::error::CliError;

pub const TOOL: &str = "cavqed";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone)]
pub struct Provenance {
    pub command: &'static str,
    pub config_sha256: String,
    pub seed: Option<u64>,
}

impl Provenance {
    /// Header lines without the `#` prefix.
    pub fn header(&self) -> Vec<String> {
        vec![
            format!("tool: {TOOL} {VERSION}"),
            format!("command: {}", self.command),
            format!("config_sha256: {}", self.config_sha256),
            format!("seed: {}", self.seed.map_or("none".to_string(), |s| s.to_string())),
        ]
    }

    pub fn json(&self) -> Value {
        json!({
            "tool": TOOL,
            "version": VERSION,
            "command": self.command,
            "config_sha256": self.config_sha256,
            "seed": self.seed,
        })
    }
}

/// A file path, or standard output when none was given.
pub struct Destination(pub Option<PathBuf>);

impl Destination {
    pub fn write_with<F>(&self, f: F) -> Result<(), CliError>
    where
        F: FnOnce(&mut dyn Write) -> Result<(), CliError>,
    {
        match &self.0 {
            Some(path) => {
                let mut file = create(path)?;
                f(&mut file)?;
                file.flush().map_err(|e| write_error(path, e))
            }
            None => {
                let stdout = std::io::stdout();
                let mut lock = stdout.lock();
                f(&mut lock)?;
                lock.flush()?;
                Ok(())
            }
        }
    }

    pub fn write_json(&self, value: &Value) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(value).map_err(|e| CliError::data(e.to_string()))?;
        self.write_with(|w| Ok(writeln!(w, "{text}")?))
    }
}

pub fn create(path: &Path) -> Result<std::io::BufWriter<std::fs::File>, CliError> {
    std::fs::File::create(path).map(std::io::BufWriter::new).map_err(|e| write_error(path, e))
}

fn write_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::data(format!("cannot write {}: {e}", path.display()))
}
