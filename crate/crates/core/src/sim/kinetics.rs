use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ns_to_ps, stream_rng, Purpose, PS_PER_NS};
use crate::error::{Error, Result};
use crate::photophysics::{steady_state, EmitterModel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Excitation {
    /// Continuous pumping from the ground state at `k_pump` (1/ns).
    Cw { k_pump: f64 },
    /// Instantaneous excitation at every pulse edge with probability
    /// `excite_prob`, if the emitter is in the ground state at that moment.
    Pulsed { period_ns: f64, excite_prob: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Emitter rates. Its `k_pump` is ignored; pumping comes from `excitation`.
    pub emitter: EmitterModel,
    pub f_p: f64,
    pub excitation: Excitation,
    pub duration_ns: f64,
    pub seed: u64,
    /// Length of the independently seeded trajectory segments.
    pub segment_ns: f64,
}

impl SimConfig {
    pub const DEFAULT_SEGMENT_NS: f64 = 1.0e6;

    pub fn new(emitter: EmitterModel, f_p: f64, excitation: Excitation, duration_ns: f64, seed: u64) -> Self {
        SimConfig { emitter, f_p, excitation, duration_ns, seed, segment_ns: Self::DEFAULT_SEGMENT_NS }
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |msg: String| Err(Error::Config(msg));
        if !(self.duration_ns.is_finite() && self.duration_ns > 0.0) {
            return cfg(format!("duration_ns must be positive, got {}", self.duration_ns));
        }
        if !(self.segment_ns.is_finite() && self.segment_ns > 0.0) {
            return cfg(format!("segment_ns must be positive, got {}", self.segment_ns));
        }
        if !(self.f_p.is_finite() && self.f_p >= 0.0) {
            return cfg(format!("purcell factor must be non-negative, got {}", self.f_p));
        }
        self.emitter.validate().map_err(|e| Error::Config(e.to_string()))?;
        match self.excitation {
            Excitation::Cw { k_pump } => {
                if !(k_pump.is_finite() && k_pump >= 0.0) {
                    return cfg(format!("k_pump must be non-negative, got {k_pump}"));
                }
            }
            Excitation::Pulsed { period_ns, excite_prob } => {
                if !(period_ns.is_finite() && period_ns * PS_PER_NS >= 1.0) {
                    return cfg(format!("pulse period must be at least 1 ps, got {period_ns} ns"));
                }
                if !(0.0..=1.0).contains(&excite_prob) {
                    return cfg(format!("excite_prob must lie in [0, 1], got {excite_prob}"));
                }
            }
        }
        if self.emitter.excited_exit_rate(self.f_p) <= 0.0 {
            return cfg("excited state has no decay channel (gamma_r, gamma_0 and k_isc are all zero)".into());
        }
        Ok(())
    }

    /// Emitter with the pump rate of the excitation applied (zero when pulsed).
    pub fn pumped_emitter(&self) -> EmitterModel {
        let k_pump = match self.excitation {
            Excitation::Cw { k_pump } => k_pump,
            Excitation::Pulsed { .. } => 0.0,
        };
        EmitterModel { k_pump, ..self.emitter }
    }

    pub(crate) fn period_ps(&self) -> Option<u64> {
        match self.excitation {
            Excitation::Pulsed { period_ns, .. } => Some(ns_to_ps(period_ns)),
            Excitation::Cw { .. } => None,
        }
    }

    pub(crate) fn duration_ps(&self) -> u64 {
        ns_to_ps(self.duration_ns)
    }

    /// Number of complete pulse periods inside the record.
    pub fn pulse_count(&self) -> u64 {
        self.period_ps().map_or(0, |p| self.duration_ps() / p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecayKind {
    /// Photon on the spectrally filtered zero-phonon line.
    Zpl,
    /// Any other return to the ground state from the excited singlet.
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmissionEvent {
    pub time_ps: u64,
    pub kind: DecayKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Level {
    Ground,
    Excited,
    Triplet,
}

/// Exit rates of the excited singlet, partitioned by channel.
struct Channels {
    zpl: f64,
    other: f64,
    exit: f64,
    k_t: f64,
}

impl Channels {
    fn new(emitter: &EmitterModel, f_p: f64) -> Self {
        let zpl = emitter.zpl_rate(f_p);
        Channels { zpl, other: emitter.gamma_0, exit: zpl + emitter.gamma_0 + emitter.k_isc, k_t: emitter.k_t }
    }

    /// Picks the decay channel out of the excited singlet.
    fn decay(&self, rng: &mut ChaCha8Rng) -> (Level, Option<DecayKind>) {
        let u = rng.random::<f64>() * self.exit;
        if u < self.zpl {
            (Level::Ground, Some(DecayKind::Zpl))
        } else if u < self.zpl + self.other {
            (Level::Ground, Some(DecayKind::Other))
        } else {
            (Level::Triplet, None)
        }
    }
}

fn waiting_time(rng: &mut ChaCha8Rng, rate: f64) -> f64 {
    let e: f64 = rng.sample(Exp1);
    e / rate
}

/// Generates the decay events of one emitter over the configured duration.
///
/// The record is cut into segments of `segment_ns` that are simulated
/// independently (in parallel) from their own random streams. CW segments
/// start from a draw of the stationary populations; pulsed segments start in
/// the ground state and hold a whole number of periods.
pub fn simulate_emission(config: &SimConfig) -> Result<Vec<EmissionEvent>> {
    config.validate()?;
    let chunks: Vec<Vec<EmissionEvent>> = match config.excitation {
        Excitation::Cw { k_pump } => {
            let duration_ps = config.duration_ps();
            let segment_ps = ns_to_ps(config.segment_ns).max(1);
            let n_segments = duration_ps.div_ceil(segment_ps);
            (0..n_segments)
                .into_par_iter()
                .map(|i| {
                    let start = i * segment_ps;
                    let end = (start + segment_ps).min(duration_ps);
                    cw_segment(config, k_pump, i, start, end)
                })
                .collect::<Result<_>>()?
        }
        Excitation::Pulsed { excite_prob, .. } => {
            // period_ps() is Some for pulsed excitation
            let period_ps = config.period_ps().unwrap_or(1);
            let n_pulses = config.pulse_count();
            let per_segment = ((config.segment_ns * PS_PER_NS) / period_ps as f64).round().max(1.0) as u64;
            let n_segments = n_pulses.div_ceil(per_segment);
            (0..n_segments)
                .into_par_iter()
                .map(|i| {
                    let first = i * per_segment;
                    let last = (first + per_segment).min(n_pulses);
                    pulsed_segment(config, excite_prob, period_ps, i, first, last)
                })
                .collect()
        }
    };
    Ok(chunks.into_iter().flatten().collect())
}

fn cw_segment(config: &SimConfig, k_pump: f64, index: u64, start_ps: u64, end_ps: u64) -> Result<Vec<EmissionEvent>> {
    let emitter = config.pumped_emitter();
    let ch = Channels::new(&emitter, config.f_p);
    let mut rng = stream_rng(config.seed, Purpose::Kinetics, index);
    let pops = steady_state(&emitter, config.f_p)?;
    let u: f64 = rng.random();
    let mut level = if u < pops.p1 {
        Level::Ground
    } else if u < pops.p1 + pops.p2 {
        Level::Excited
    } else {
        Level::Triplet
    };
    let span_ns = (end_ps - start_ps) as f64 / PS_PER_NS;
    let mut t = 0.0;
    let mut events = Vec::new();
    loop {
        let rate = match level {
            Level::Ground => k_pump,
            Level::Excited => ch.exit,
            Level::Triplet => ch.k_t,
        };
        if rate <= 0.0 {
            break;
        }
        t += waiting_time(&mut rng, rate);
        if t >= span_ns {
            break;
        }
        level = match level {
            Level::Ground => Level::Excited,
            Level::Triplet => Level::Ground,
            Level::Excited => {
                let (next, kind) = ch.decay(&mut rng);
                if let Some(kind) = kind {
                    events.push(EmissionEvent { time_ps: (start_ps + ns_to_ps(t)).min(end_ps), kind });
                }
                next
            }
        };
    }
    Ok(events)
}

fn pulsed_segment(
    config: &SimConfig,
    excite_prob: f64,
    period_ps: u64,
    index: u64,
    first_pulse: u64,
    end_pulse: u64,
) -> Vec<EmissionEvent> {
    let ch = Channels::new(&config.emitter, config.f_p);
    let mut rng = stream_rng(config.seed, Purpose::Kinetics, index);
    let period_ns = period_ps as f64 / PS_PER_NS;
    let mut level = Level::Ground;
    let mut events = Vec::new();
    for pulse in first_pulse..end_pulse {
        let pulse_ps = pulse * period_ps;
        if level == Level::Ground && excite_prob > 0.0 && rng.random::<f64>() < excite_prob {
            level = Level::Excited;
        }
        // decays are memoryless, so waiting times restart at each pulse edge
        let mut t = 0.0;
        loop {
            let rate = match level {
                Level::Ground => break,
                Level::Excited => ch.exit,
                Level::Triplet => ch.k_t,
            };
            if rate <= 0.0 {
                break;
            }
            t += waiting_time(&mut rng, rate);
            if t >= period_ns {
                break;
            }
            level = match level {
                Level::Triplet => Level::Ground,
                _ => {
                    let (next, kind) = ch.decay(&mut rng);
                    if let Some(kind) = kind {
                        events
                            .push(EmissionEvent { time_ps: (pulse_ps + ns_to_ps(t)).min(pulse_ps + period_ps), kind });
                    }
                    next
                }
            };
        }
    }
    events
}
