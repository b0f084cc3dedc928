use cavqed_core::correlation::{lifetime_histogram, lifetime_histogram_with_period, Histogram};
use cavqed_core::io::write_histogram_csv;

use super::{Ctx, StreamSpec};
use crate::error::CliError;

const DEFAULT_BIN_WIDTH_PS: u64 = 100;

pub fn run(ctx: &Ctx) -> Result<(), CliError> {
    let cfg = &ctx.cfg;
    let sync = StreamSpec::from_cfg(cfg, "sync_input", "sync_channel")?;
    let photons = StreamSpec::from_cfg(cfg, "photon_input", "photon_channel")?;
    let bin_width_ps = cfg.u64_or("bin_width_ps", DEFAULT_BIN_WIDTH_PS)?;
    let period_ps = cfg.opt_u64("period_ps")?;
    for (key, v) in [("bin_width_ps", Some(bin_width_ps)), ("period_ps", period_ps)] {
        if v == Some(0) {
            return Err(CliError::config(format!("key '{key}' must be positive, got 0")));
        }
    }
    cfg.finish()?;

    let (sync, photons) = (sync.load()?, photons.load()?);
    let lt = match period_ps {
        Some(p) => lifetime_histogram_with_period(&sync, &photons, bin_width_ps, p)?,
        None => lifetime_histogram(&sync, &photons, bin_width_ps)?,
    };
    // a trailing partial bin would bias decay fits, so only complete bins are written
    let n = lt.complete_bins();
    let h = Histogram {
        bin_width_ps,
        t_min_ps: 0,
        t_max_ps: (n as u64 * bin_width_ps) as i64,
        counts: lt.histogram.counts[..n].to_vec(),
    };
    let mut header = ctx.provenance().header();
    header.push(format!("bin_width_ps: {bin_width_ps}"));
    header.push(format!("period_ps: {}", lt.period_ps));
    header.push(format!("sync_tags: {}", sync.len()));
    header.push(format!("photons_binned: {}", h.total()));
    header.push(format!("photons_skipped: {}", lt.skipped));
    header.push(format!("partial_bin_dropped: {}", lt.histogram.n_bins() > n));
    ctx.destination().write_with(|w| Ok(write_histogram_csv(w, &h, &header)?))
}
