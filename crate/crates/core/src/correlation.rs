//! Coincidence histograms between time-tag streams.
//!
//! Delay bins are half-open `[lo, hi)` and bin 0 spans
//! `[-bin_width/2, bin_width - bin_width/2)` (integer halving), so zero delay
//! sits in the middle of a bin. A histogram with `max_delay = K·bin_width`
//! has `2K + 1` bins.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::TimeTagStream;
use crate::sim::PS_PER_NS;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Histogram {
    pub bin_width_ps: u64,
    /// Lower edge of the first bin (ps).
    pub t_min_ps: i64,
    /// Upper edge of the last bin (ps).
    pub t_max_ps: i64,
    pub counts: Vec<u64>,
}

impl Histogram {
    fn zeros(bin_width_ps: u64, t_min_ps: i64, n_bins: usize) -> Self {
        Histogram {
            bin_width_ps,
            t_min_ps,
            t_max_ps: t_min_ps + (n_bins as u64 * bin_width_ps) as i64,
            counts: vec![0; n_bins],
        }
    }

    pub fn n_bins(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Centre of bin `i` (ps).
    pub fn bin_center_ps(&self, i: usize) -> f64 {
        self.t_min_ps as f64 + (i as f64 + 0.5) * self.bin_width_ps as f64
    }

    pub fn bin_centers_ps(&self) -> Vec<f64> {
        (0..self.n_bins()).map(|i| self.bin_center_ps(i)).collect()
    }

    /// Bin holding a given delay, if inside the histogram range.
    pub fn bin_of(&self, delay_ps: i64) -> Option<usize> {
        if delay_ps < self.t_min_ps || delay_ps >= self.t_max_ps {
            None
        } else {
            Some(((delay_ps - self.t_min_ps) as u64 / self.bin_width_ps) as usize)
        }
    }

    fn add(&mut self, other: &Histogram) {
        for (c, o) in self.counts.iter_mut().zip(&other.counts) {
            *c += o;
        }
    }
}

/// Delay window `[t_min, t_max)` and bin count for a symmetric correlation.
fn delay_layout(bin_width_ps: u64, max_delay_ps: u64) -> Result<(i64, usize)> {
    if bin_width_ps == 0 {
        return Err(Error::Domain("bin width must be positive".into()));
    }
    if !max_delay_ps.is_multiple_of(bin_width_ps) {
        return Err(Error::Domain(format!(
            "max delay {max_delay_ps} ps is not a multiple of the bin width {bin_width_ps} ps"
        )));
    }
    let k = (max_delay_ps / bin_width_ps) as i64;
    let half = (bin_width_ps / 2) as i64;
    Ok((-k * bin_width_ps as i64 - half, (2 * k + 1) as usize))
}

fn check_sorted(tags: &[u64], name: &str) -> Result<()> {
    match crate::sim::first_unsorted_index(tags) {
        Some(i) => Err(Error::Data(format!(
            "stream {name} is not strictly increasing at tag {i} ({} after {})",
            tags[i],
            tags[i - 1]
        ))),
        None => Ok(()),
    }
}

/// Full cross-correlation: every pair with `t_b − t_a` inside the window is
/// counted. Runs a sliding window over `b`, so the cost is linear in the
/// number of tags plus the number of pairs found.
pub fn cross_correlate(
    a: &TimeTagStream,
    b: &TimeTagStream,
    bin_width_ps: u64,
    max_delay_ps: u64,
) -> Result<Histogram> {
    cross_correlate_tags(a.tags(), b.tags(), bin_width_ps, max_delay_ps)
}

pub fn cross_correlate_tags(a: &[u64], b: &[u64], bin_width_ps: u64, max_delay_ps: u64) -> Result<Histogram> {
    let (t_min, n_bins) = delay_layout(bin_width_ps, max_delay_ps)?;
    check_sorted(a, "a")?;
    check_sorted(b, "b")?;
    let mut hist = Histogram::zeros(bin_width_ps, t_min, n_bins);
    accumulate(a, b, &mut hist, 0);
    Ok(hist)
}

/// Same result as [`cross_correlate`], computed over `chunks` slices of `a`
/// in parallel. Each chunk locates its own window start in `b` by binary
/// search; partial histograms are summed.
pub fn cross_correlate_chunked(
    a: &TimeTagStream,
    b: &TimeTagStream,
    bin_width_ps: u64,
    max_delay_ps: u64,
    chunks: usize,
) -> Result<Histogram> {
    let (t_min, n_bins) = delay_layout(bin_width_ps, max_delay_ps)?;
    let a = a.tags();
    let b = b.tags();
    let chunk_len = a.len().div_ceil(chunks.max(1)).max(1);
    let empty = Histogram::zeros(bin_width_ps, t_min, n_bins);
    let hist = a
        .par_chunks(chunk_len)
        .map(|part| {
            let mut h = empty.clone();
            let lo = part[0] as i64 + t_min;
            let start = b.partition_point(|&t| (t as i64) < lo);
            accumulate(part, b, &mut h, start);
            h
        })
        .reduce(
            || empty.clone(),
            |mut x, y| {
                x.add(&y);
                x
            },
        );
    Ok(hist)
}

fn accumulate(a: &[u64], b: &[u64], hist: &mut Histogram, mut start: usize) {
    let width = hist.bin_width_ps;
    for &ta in a {
        let ta = ta as i64;
        let lo = ta + hist.t_min_ps;
        let hi = ta + hist.t_max_ps;
        while start < b.len() && (b[start] as i64) < lo {
            start += 1;
        }
        for &tb in &b[start..] {
            let tb = tb as i64;
            if tb >= hi {
                break;
            }
            hist.counts[((tb - lo) as u64 / width) as usize] += 1;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Normalization {
    /// Expected counts per bin for independent streams, r_a·r_b·T·Δt.
    Analytic,
    /// Mean counts over bins with |delay| above the threshold.
    TailAverage { min_abs_delay_ns: f64 },
}

impl Normalization {
    pub fn label(&self) -> String {
        match self {
            Normalization::Analytic => "analytic".to_string(),
            Normalization::TailAverage { min_abs_delay_ns } => {
                format!("tail_average(|delay|>{min_abs_delay_ns}ns)")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct G2Curve {
    pub delays_ns: Vec<f64>,
    pub values: Vec<f64>,
    /// Counts per bin that correspond to g² = 1.
    pub normalization: f64,
    pub mode: Normalization,
}

/// Normalizes a coincidence histogram by the uncorrelated expectation
/// `rate_a·rate_b·duration·bin_width` (rates in 1/ns, duration in ns).
pub fn normalize_g2(h: &Histogram, rate_a: f64, rate_b: f64, duration_ns: f64) -> Result<G2Curve> {
    let positive = |x: f64| x.is_finite() && x > 0.0;
    if !(positive(rate_a) && positive(rate_b)) {
        return Err(Error::Domain(format!("count rates must be positive, got {rate_a} and {rate_b}")));
    }
    if !positive(duration_ns) {
        return Err(Error::Domain(format!("duration must be positive, got {duration_ns}")));
    }
    let norm = rate_a * rate_b * duration_ns * h.bin_width_ps as f64 / PS_PER_NS;
    Ok(scale(h, norm, Normalization::Analytic))
}

/// Normalizes by the mean of the histogram tails.
pub fn normalize_g2_tail(h: &Histogram, min_abs_delay_ns: f64) -> Result<G2Curve> {
    let tail: Vec<u64> = (0..h.n_bins())
        .filter(|&i| (h.bin_center_ps(i) / PS_PER_NS).abs() > min_abs_delay_ns)
        .map(|i| h.counts[i])
        .collect();
    if tail.is_empty() {
        return Err(Error::Domain(format!("no bins beyond |delay| > {min_abs_delay_ns} ns within the histogram")));
    }
    let norm = tail.iter().sum::<u64>() as f64 / tail.len() as f64;
    if norm <= 0.0 {
        return Err(Error::Domain("histogram tail is empty".into()));
    }
    Ok(scale(h, norm, Normalization::TailAverage { min_abs_delay_ns }))
}

fn scale(h: &Histogram, norm: f64, mode: Normalization) -> G2Curve {
    G2Curve {
        delays_ns: h.bin_centers_ps().into_iter().map(|t| t / PS_PER_NS).collect(),
        values: h.counts.iter().map(|&c| c as f64 / norm).collect(),
        normalization: norm,
        mode,
    }
}

/// Start-stop arrival histogram of photons relative to the laser sync.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LifetimeHistogram {
    pub histogram: Histogram,
    pub period_ps: u64,
    /// Photons with no preceding sync tag, or beyond one period after the last.
    pub skipped: u64,
}

impl LifetimeHistogram {
    /// Bins that span a full bin width inside the period. When the period is
    /// not a multiple of the bin width the last bin is partial and should be
    /// left out of decay fits.
    pub fn complete_bins(&self) -> usize {
        (self.period_ps / self.histogram.bin_width_ps) as usize
    }

    /// Bin centres (ns) and counts of the complete bins.
    pub fn decay_curve(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.complete_bins();
        let x = (0..n).map(|i| self.histogram.bin_center_ps(i) / PS_PER_NS).collect();
        let y = self.histogram.counts[..n].iter().map(|&c| c as f64).collect();
        (x, y)
    }
}

/// Histogram of `photon − most recent sync` over `[0, period)`. The period
/// is the median spacing of the sync stream, which needs at least two tags.
pub fn lifetime_histogram(
    sync: &TimeTagStream,
    photons: &TimeTagStream,
    bin_width_ps: u64,
) -> Result<LifetimeHistogram> {
    let tags = sync.tags();
    if tags.len() < 2 {
        return Err(Error::Data("sync stream needs at least two tags to infer the period".into()));
    }
    let mut gaps: Vec<u64> = tags.windows(2).map(|w| w[1] - w[0]).collect();
    let mid = gaps.len() / 2;
    let period = *gaps.select_nth_unstable(mid).1;
    lifetime_histogram_with_period(sync, photons, bin_width_ps, period)
}

pub fn lifetime_histogram_with_period(
    sync: &TimeTagStream,
    photons: &TimeTagStream,
    bin_width_ps: u64,
    period_ps: u64,
) -> Result<LifetimeHistogram> {
    if bin_width_ps == 0 || period_ps == 0 {
        return Err(Error::Domain("bin width and period must be positive".into()));
    }
    let sync = sync.tags();
    if sync.is_empty() {
        return Err(Error::Data("sync stream is empty".into()));
    }
    let n_bins = period_ps.div_ceil(bin_width_ps) as usize;
    let mut hist = Histogram::zeros(bin_width_ps, 0, n_bins);
    let mut skipped = 0;
    let mut next = 0usize;
    for &t in photons.tags() {
        while next < sync.len() && sync[next] <= t {
            next += 1;
        }
        if next == 0 {
            skipped += 1;
            continue;
        }
        let delay = t - sync[next - 1];
        if delay >= period_ps {
            skipped += 1;
            continue;
        }
        hist.counts[(delay / bin_width_ps) as usize] += 1;
    }
    Ok(LifetimeHistogram { histogram: hist, period_ps, skipped })
}
