use rand::Rng;
use rand_distr::{Distribution, Exp1, Normal};
use serde::{Deserialize, Serialize};

use super::kinetics::{simulate_emission, DecayKind, EmissionEvent, Excitation, SimConfig};
use super::{ns_to_ps, stream_rng, Purpose, TimeTagStream};
use crate::error::{Error, Result};

pub const CHANNEL_A: u8 = 0;
pub const CHANNEL_B: u8 = 1;
pub const CHANNEL_SYNC: u8 = 2;

/// Beam splitter followed by two single-photon detectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorChain {
    /// Probability that a photon is routed to channel A.
    pub splitter_ratio: f64,
    pub efficiency: [f64; 2],
    /// Gaussian timing jitter (ps, one sigma).
    pub jitter_sigma_ps: f64,
    /// Minimum separation of accepted tags on one channel (ps).
    pub dead_time_ps: u64,
    /// Dark count rate per channel (1/ns).
    pub dark_rate_per_ns: [f64; 2],
}

impl Default for DetectorChain {
    fn default() -> Self {
        DetectorChain {
            splitter_ratio: 0.5,
            efficiency: [1.0, 1.0],
            jitter_sigma_ps: 0.0,
            dead_time_ps: 0,
            dark_rate_per_ns: [0.0, 0.0],
        }
    }
}

impl DetectorChain {
    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must lie in [0, 1], got {v}")))
            }
        };
        unit("splitter_ratio", self.splitter_ratio)?;
        unit("efficiency_a", self.efficiency[0])?;
        unit("efficiency_b", self.efficiency[1])?;
        if !(self.jitter_sigma_ps.is_finite() && self.jitter_sigma_ps >= 0.0) {
            return Err(Error::Config(format!("jitter must be non-negative, got {}", self.jitter_sigma_ps)));
        }
        for r in self.dark_rate_per_ns {
            if !(r.is_finite() && r >= 0.0) {
                return Err(Error::Config(format!("dark rate must be non-negative, got {r}")));
            }
        }
        Ok(())
    }
}

/// Routes ZPL photons through the splitter and detectors.
///
/// Each photon picks a channel with `splitter_ratio`, survives with that
/// channel's efficiency and receives Gaussian jitter. Dark counts are added
/// as a Poisson process, then tags closer than the dead time to the previous
/// accepted tag on the same channel are dropped. Tags jittered outside
/// `[0, duration]` are discarded.
pub fn apply_detection(
    events: &[EmissionEvent],
    chain: &DetectorChain,
    duration_ns: f64,
    seed: u64,
) -> Result<[TimeTagStream; 2]> {
    chain.validate()?;
    if let Some(i) = events.windows(2).position(|w| w[1].time_ps < w[0].time_ps) {
        return Err(Error::Data(format!("emission events out of order at index {}", i + 1)));
    }
    let duration_ps = ns_to_ps(duration_ns);
    let mut routing = stream_rng(seed, Purpose::Routing, 0);
    let mut jitter_rng = stream_rng(seed, Purpose::Jitter, 0);
    let jitter = if chain.jitter_sigma_ps > 0.0 {
        Some(Normal::new(0.0, chain.jitter_sigma_ps).map_err(|e| Error::Config(e.to_string()))?)
    } else {
        None
    };

    let mut raw: [Vec<u64>; 2] = [Vec::new(), Vec::new()];
    for ev in events.iter().filter(|ev| ev.kind == DecayKind::Zpl) {
        let ch = if routing.random::<f64>() < chain.splitter_ratio { 0 } else { 1 };
        if routing.random::<f64>() >= chain.efficiency[ch] {
            continue;
        }
        let t = match &jitter {
            Some(normal) => {
                let shifted = ev.time_ps as f64 + normal.sample(&mut jitter_rng).round();
                if shifted < 0.0 || shifted > duration_ps as f64 {
                    continue;
                }
                shifted as u64
            }
            None => ev.time_ps,
        };
        if t <= duration_ps {
            raw[ch].push(t);
        }
    }

    for (ch, tags) in raw.iter_mut().enumerate() {
        let rate = chain.dark_rate_per_ns[ch];
        if rate > 0.0 {
            let mut rng = stream_rng(seed, Purpose::Darks, ch as u64);
            let mut t = 0.0;
            loop {
                let gap: f64 = rng.sample(Exp1);
                t += gap / rate;
                if t > duration_ns {
                    break;
                }
                tags.push(ns_to_ps(t).min(duration_ps));
            }
        }
        tags.sort_unstable();
    }

    let [a, b] = raw;
    Ok([
        TimeTagStream::new(CHANNEL_A, dead_time_filter(a, chain.dead_time_ps))?,
        TimeTagStream::new(CHANNEL_B, dead_time_filter(b, chain.dead_time_ps))?,
    ])
}

/// Keeps tags strictly after, and at least `dead_time` beyond, the previous
/// accepted tag.
fn dead_time_filter(sorted: Vec<u64>, dead_time: u64) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::with_capacity(sorted.len());
    for t in sorted {
        match out.last() {
            Some(&prev) if t <= prev || t - prev < dead_time => {}
            _ => out.push(t),
        }
    }
    out
}

/// Laser sync and photon stream of a pulsed lifetime measurement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PulsedRecord {
    pub sync: TimeTagStream,
    pub photons: TimeTagStream,
}

/// Pulsed run with one sync tag per complete period. All photons are sent to
/// a single detector (channel A) regardless of the splitter setting.
pub fn simulate_pulsed_with_sync(config: &SimConfig, chain: &DetectorChain, seed: u64) -> Result<PulsedRecord> {
    let Excitation::Pulsed { period_ns, .. } = config.excitation else {
        return Err(Error::Config("sync output requires pulsed excitation".into()));
    };
    let period_ps = ns_to_ps(period_ns);
    let sync_tags: Vec<u64> = (0..config.pulse_count()).map(|k| k * period_ps).collect();
    let events = simulate_emission(config)?;
    let single = DetectorChain { splitter_ratio: 1.0, ..*chain };
    let [photons, _] = apply_detection(&events, &single, config.duration_ns, seed)?;
    Ok(PulsedRecord { sync: TimeTagStream::new(CHANNEL_SYNC, sync_tags)?, photons })
}
