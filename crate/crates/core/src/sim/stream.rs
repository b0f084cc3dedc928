use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Photon arrival times (ps) recorded on one detector channel.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TimeTagStream {
    pub channel: u8,
    tags: Vec<u64>,
}

impl TimeTagStream {
    pub fn empty(channel: u8) -> Self {
        TimeTagStream { channel, tags: Vec::new() }
    }

    /// Wraps tags that must already be strictly increasing.
    pub fn new(channel: u8, tags: Vec<u64>) -> Result<Self> {
        if let Some(i) = first_unsorted(&tags) {
            return Err(Error::Data(format!(
                "channel {channel}: tag {i} ({}) does not follow tag {} ({})",
                tags[i],
                i - 1,
                tags[i - 1]
            )));
        }
        Ok(TimeTagStream { channel, tags })
    }

    pub fn tags(&self) -> &[u64] {
        &self.tags
    }

    pub fn into_tags(self) -> Vec<u64> {
        self.tags
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    /// Mean count rate in 1/ns over a record of the given length.
    pub fn rate_per_ns(&self, duration_ns: f64) -> f64 {
        self.tags.len() as f64 / duration_ns
    }
}

/// Index of the first tag that is not strictly greater than its predecessor.
pub(crate) fn first_unsorted(tags: &[u64]) -> Option<usize> {
    tags.windows(2).position(|w| w[1] <= w[0]).map(|i| i + 1)
}
