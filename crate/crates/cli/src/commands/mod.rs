pub mod correlate;
pub mod detune;
pub mod fit;
pub mod lifetime;
pub mod qe_bound;
pub mod simulate;

use std::path::{Path, PathBuf};

use cavqed_core::io::read_tag_file;
use cavqed_core::sim::TimeTagStream;
use cavqed_core::Error;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{Destination, Provenance};
use crate::Format;

pub struct Ctx {
    pub command: &'static str,
    pub cfg: RunConfig,
    /// `--seed`, else the config's `seed` key.
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl Ctx {
    pub fn provenance(&self) -> Provenance {
        Provenance { command: self.command, config_sha256: self.cfg.sha256.clone(), seed: self.seed }
    }

    pub fn destination(&self) -> Destination {
        Destination(self.out.clone())
    }
}

/// One stream of a tag file. The channel selects among several streams and
/// is required when the file holds more than one.
pub struct StreamSpec {
    path: PathBuf,
    channel: Option<u64>,
    channel_key: &'static str,
}

impl StreamSpec {
    pub fn from_cfg(cfg: &RunConfig, path_key: &str, channel_key: &'static str) -> Result<Self, CliError> {
        Ok(StreamSpec { path: cfg.path(path_key)?, channel: cfg.opt_u64(channel_key)?, channel_key })
    }

    pub fn load(&self) -> Result<TimeTagStream, CliError> {
        let path = self.path.display();
        let mut streams = read_tag_file(&self.path).map_err(|e| with_path(&self.path, e))?;
        match self.channel {
            Some(c) => {
                let i = streams.iter().position(|s| u64::from(s.channel) == c).ok_or_else(|| {
                    CliError::data(format!("{path}: no tags on channel {c} (key '{}')", self.channel_key))
                })?;
                Ok(streams.swap_remove(i))
            }
            None if streams.len() == 1 => Ok(streams.pop().unwrap()),
            None if streams.is_empty() => Err(CliError::data(format!("{path}: file holds no tags"))),
            None => Err(CliError::config(format!(
                "{path} holds {} channels; set '{}' to pick one",
                streams.len(),
                self.channel_key
            ))),
        }
    }
}

/// Attaches the path to I/O errors, which the core reports without one.
pub fn with_path(path: &Path, e: Error) -> CliError {
    match e {
        Error::Io(io) => CliError::data(format!("{}: {io}", path.display())),
        other => other.into(),
    }
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    String::from_utf8(bytes).map_err(|e| {
        CliError::data(format!("{}: not UTF-8 at byte offset {}", path.display(), e.utf8_error().valid_up_to()))
    })
}
