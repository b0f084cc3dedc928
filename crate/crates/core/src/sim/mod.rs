//! Kinetic Monte Carlo of the three-level emitter and the detector chain that
//! turns emitted photons into time-tag streams.
//!
//! Every random draw comes from a ChaCha stream keyed by the master seed and
//! selected by `(purpose, index)`, so the output is a pure function of the
//! configuration no matter how work is scheduled across threads.

mod detect;
mod kinetics;
mod stream;

pub use detect::{apply_detection, simulate_pulsed_with_sync, DetectorChain, PulsedRecord};
pub use kinetics::{simulate_emission, DecayKind, EmissionEvent, Excitation, SimConfig};
pub(crate) use stream::first_unsorted as first_unsorted_index;
pub use stream::TimeTagStream;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Picoseconds per nanosecond.
pub const PS_PER_NS: f64 = 1000.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
enum Purpose {
    Kinetics = 1,
    Routing = 2,
    Jitter = 3,
    Darks = 4,
}

fn stream_rng(seed: u64, purpose: Purpose, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((purpose as u64) << 48) | (index & 0xFFFF_FFFF_FFFF));
    rng
}

pub(crate) fn ns_to_ps(t_ns: f64) -> u64 {
    (t_ns * PS_PER_NS).round() as u64
}
