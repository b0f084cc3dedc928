use cavqed_core::correlation::{cross_correlate_chunked, normalize_g2, normalize_g2_tail};
use cavqed_core::io::write_histogram_csv;
use cavqed_core::sim::PS_PER_NS;

use super::{Ctx, StreamSpec};
use crate::config::positive;
use crate::error::CliError;

const DEFAULT_BIN_WIDTH_PS: u64 = 200;
const DEFAULT_MAX_DELAY_PS: u64 = 100_000;
const CHUNKS: usize = 64;

enum Mode {
    Analytic { duration_ns: Option<f64> },
    Tail { min_abs_delay_ns: f64 },
    None,
}

pub fn run(ctx: &Ctx) -> Result<(), CliError> {
    let cfg = &ctx.cfg;
    let a = StreamSpec::from_cfg(cfg, "input_a", "channel_a")?;
    let b = StreamSpec::from_cfg(cfg, "input_b", "channel_b")?;
    let bin_width_ps = cfg.u64_or("bin_width_ps", DEFAULT_BIN_WIDTH_PS)?;
    if bin_width_ps == 0 {
        return Err(CliError::config("key 'bin_width_ps' must be positive, got 0"));
    }
    let max_delay_ps = cfg.u64_or("max_delay_ps", DEFAULT_MAX_DELAY_PS)?;
    if !max_delay_ps.is_multiple_of(bin_width_ps) {
        return Err(CliError::config(format!(
            "key 'max_delay_ps' ({max_delay_ps}) must be a multiple of 'bin_width_ps' ({bin_width_ps})"
        )));
    }
    let mode = match cfg.opt_str("normalization")?.as_deref().unwrap_or("analytic") {
        "analytic" => {
            Mode::Analytic { duration_ns: cfg.opt_f64("duration_ns")?.map(|d| positive("duration_ns", d)).transpose()? }
        }
        "tail" => {
            Mode::Tail { min_abs_delay_ns: positive("tail_min_abs_delay_ns", cfg.f64("tail_min_abs_delay_ns")?)? }
        }
        "none" => Mode::None,
        other => {
            return Err(CliError::config(format!(
                "key 'normalization' must be \"analytic\", \"tail\" or \"none\", got \"{other}\""
            )))
        }
    };
    cfg.finish()?;

    let (sa, sb) = (a.load()?, b.load()?);
    let h = cross_correlate_chunked(&sa, &sb, bin_width_ps, max_delay_ps, CHUNKS)?;

    let mut header = ctx.provenance().header();
    header.push(format!("bin_width_ps: {bin_width_ps}"));
    header.push(format!("max_delay_ps: {max_delay_ps}"));
    header.push(format!("tags_a: {}", sa.len()));
    header.push(format!("tags_b: {}", sb.len()));
    match mode {
        Mode::Analytic { duration_ns } => {
            // streams start at zero, so the last tag bounds the record length
            let last = sa.tags().last().max(sb.tags().last()).copied().unwrap_or(0);
            let duration_ns = duration_ns.unwrap_or(last as f64 / PS_PER_NS);
            let g2 = normalize_g2(&h, sa.rate_per_ns(duration_ns), sb.rate_per_ns(duration_ns), duration_ns)
                .map_err(|e| CliError::data(e.to_string()))?;
            header.push(format!("normalization: {}", g2.mode.label()));
            header.push(format!("duration_ns: {duration_ns}"));
            header.push(format!("g2_unity_counts: {}", g2.normalization));
        }
        Mode::Tail { min_abs_delay_ns } => {
            let g2 = normalize_g2_tail(&h, min_abs_delay_ns).map_err(|e| CliError::data(e.to_string()))?;
            header.push(format!("normalization: {}", g2.mode.label()));
            header.push(format!("g2_unity_counts: {}", g2.normalization));
        }
        Mode::None => header.push("normalization: none".to_string()),
    }
    ctx.destination().write_with(|w| Ok(write_histogram_csv(w, &h, &header)?))
}
