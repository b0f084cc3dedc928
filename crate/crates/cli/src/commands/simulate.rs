use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use cavqed_core::io::{write_comments, write_tags_csv, write_ttag};
use cavqed_core::photophysics::EmitterModel;
use cavqed_core::sim::{
    apply_detection, simulate_emission, simulate_pulsed_with_sync, DetectorChain, Excitation, SimConfig, TimeTagStream,
};

use super::Ctx;
use crate::config::{non_negative, positive, unit_interval, RunConfig};
use crate::error::CliError;
use crate::output::create;
use crate::Format;

// Neither enters the kinetics; they only complete the emitter description.
const PLACEHOLDER_ZPL_NM: f64 = 1279.0;
const PLACEHOLDER_F_DW: f64 = 1.0;

const CW_ONLY: [&str; 1] = ["k_pump_per_ns"];
const PULSED_ONLY: [&str; 3] = ["period_ns", "excite_prob", "pulses"];

fn reject(cfg: &RunConfig, keys: &[&str], mode: &str) -> Result<(), CliError> {
    match keys.iter().find(|k| cfg.contains(k)) {
        Some(k) => Err(CliError::config(format!("key '{k}' does not apply to {mode} excitation"))),
        None => Ok(()),
    }
}

fn excitation_and_duration(cfg: &RunConfig) -> Result<(Excitation, f64), CliError> {
    let mode = cfg.str("excitation")?;
    let duration = |cfg: &RunConfig| -> Result<Option<f64>, CliError> {
        cfg.opt_f64("duration_ns")?.map(|d| positive("duration_ns", d)).transpose()
    };
    match mode.as_str() {
        "cw" => {
            reject(cfg, &PULSED_ONLY, "cw")?;
            let k_pump = non_negative("k_pump_per_ns", cfg.f64("k_pump_per_ns")?)?;
            let d = duration(cfg)?.ok_or_else(|| CliError::config("missing required key 'duration_ns'"))?;
            Ok((Excitation::Cw { k_pump }, d))
        }
        "pulsed" => {
            reject(cfg, &CW_ONLY, "pulsed")?;
            let period_ns = positive("period_ns", cfg.f64("period_ns")?)?;
            let excite_prob = unit_interval("excite_prob", cfg.f64_or("excite_prob", 1.0)?)?;
            let d = match (duration(cfg)?, cfg.opt_u64("pulses")?) {
                (Some(_), Some(_)) => return Err(CliError::config("set either 'duration_ns' or 'pulses', not both")),
                (Some(d), None) => d,
                // whole periods on the picosecond grid, so the count comes out exact
                (None, Some(n)) if n > 0 => (period_ns * 1e3).round() * n as f64 / 1e3,
                (None, Some(_)) => return Err(CliError::config("key 'pulses' must be positive, got 0")),
                (None, None) => return Err(CliError::config("missing required key 'duration_ns' (or 'pulses')")),
            };
            Ok((Excitation::Pulsed { period_ns, excite_prob }, d))
        }
        other => Err(CliError::config(format!("key 'excitation' must be \"cw\" or \"pulsed\", got \"{other}\""))),
    }
}

fn read_emitter(cfg: &RunConfig) -> Result<EmitterModel, CliError> {
    let rate = |key: &str, default: Option<f64>| -> Result<f64, CliError> {
        let v = match default {
            Some(d) => cfg.f64_or(key, d)?,
            None => cfg.f64(key)?,
        };
        non_negative(key, v)
    };
    Ok(EmitterModel {
        lambda_zpl: PLACEHOLDER_ZPL_NM,
        gamma_r: rate("gamma_r_per_ns", None)?,
        gamma_0: rate("gamma_0_per_ns", None)?,
        f_dw: PLACEHOLDER_F_DW,
        k_isc: rate("k_isc_per_ns", Some(0.0))?,
        k_t: rate("k_t_per_ns", Some(0.0))?,
        k_pump: 0.0,
    })
}

fn read_chain(cfg: &RunConfig) -> Result<DetectorChain, CliError> {
    let d = DetectorChain::default();
    let unit = |key: &str, default: f64| unit_interval(key, cfg.f64_or(key, default)?);
    let rate = |key: &str| non_negative(key, cfg.f64_or(key, 0.0)?);
    Ok(DetectorChain {
        splitter_ratio: unit("splitter_ratio", d.splitter_ratio)?,
        efficiency: [unit("efficiency_a", d.efficiency[0])?, unit("efficiency_b", d.efficiency[1])?],
        jitter_sigma_ps: rate("jitter_sigma_ps")?,
        dead_time_ps: cfg.u64_or("dead_time_ps", d.dead_time_ps)?,
        dark_rate_per_ns: [rate("dark_rate_a_per_ns")?, rate("dark_rate_b_per_ns")?],
    })
}

fn channel_path(prefix: &Path, channel: u8, ext: &str) -> PathBuf {
    let mut s = OsString::from(prefix.as_os_str());
    s.push(format!(".ch{channel}.{ext}"));
    PathBuf::from(s)
}

pub fn run(ctx: &Ctx) -> Result<(), CliError> {
    let cfg = &ctx.cfg;
    let (excitation, duration_ns) = excitation_and_duration(cfg)?;
    let emitter = read_emitter(cfg)?;
    let f_p = non_negative("purcell_factor", cfg.f64_or("purcell_factor", 0.0)?)?;
    let segment_ns = positive("segment_ns", cfg.f64_or("segment_ns", SimConfig::DEFAULT_SEGMENT_NS)?)?;
    let chain = read_chain(cfg)?;
    cfg.finish()?;
    let seed = ctx.seed.ok_or_else(|| CliError::config("missing required key 'seed' (or pass --seed)"))?;
    let prefix = ctx.out.clone().ok_or_else(|| CliError::config("no output prefix: set key 'out' or pass --out"))?;

    let mut config = SimConfig::new(emitter, f_p, excitation, duration_ns, seed);
    config.segment_ns = segment_ns;
    config.validate()?;
    chain.validate()?;

    let streams: Vec<TimeTagStream> = match excitation {
        Excitation::Cw { .. } => {
            let events = simulate_emission(&config)?;
            apply_detection(&events, &chain, duration_ns, seed)?.into()
        }
        Excitation::Pulsed { .. } => {
            let record = simulate_pulsed_with_sync(&config, &chain, seed)?;
            vec![record.photons, record.sync]
        }
    };

    let mut header = ctx.provenance().header();
    let mode = match excitation {
        Excitation::Cw { .. } => "cw",
        Excitation::Pulsed { .. } => "pulsed",
    };
    header.push(format!("excitation: {mode}"));
    header.push(format!("duration_ns: {duration_ns}"));

    let mut summary = Vec::new();
    for s in &streams {
        let path = match ctx.format {
            Format::Bin => {
                let path = channel_path(&prefix, s.channel, "ttag");
                let mut file = create(&path)?;
                write_ttag(&mut file, s)?;
                file.flush()?;
                let mut meta = create(&meta_path(&path))?;
                let mut lines = header.clone();
                lines.extend([
                    "format: TTAG v1".to_string(),
                    format!("channel: {}", s.channel),
                    format!("tags: {}", s.len()),
                ]);
                write_comments(&mut meta, &lines)?;
                meta.flush()?;
                path
            }
            Format::Csv => {
                let path = channel_path(&prefix, s.channel, "csv");
                let mut file = create(&path)?;
                write_tags_csv(&mut file, &[s], &header)?;
                file.flush()?;
                path
            }
        };
        summary.push(format!("channel {}: {} tags -> {}", s.channel, s.len(), path.display()));
    }
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    write_comments(&mut lock, &header)?;
    for line in &summary {
        writeln!(lock, "{line}")?;
    }
    Ok(())
}

fn meta_path(path: &Path) -> PathBuf {
    let mut s = OsString::from(path.as_os_str());
    s.push(".meta");
    PathBuf::from(s)
}
