use cavqed_core::extraction::{detuning, detuning_monte_carlo, enhancement_report, TuningRecord};
use cavqed_core::io::parse_tuning_csv;
use serde_json::{json, Value};

use super::{read_text, with_path, Ctx};
use crate::error::CliError;

fn find<'a>(records: &'a [TuningRecord], label: &str, key: &str) -> Result<&'a TuningRecord, CliError> {
    records
        .iter()
        .find(|r| r.label == label)
        .ok_or_else(|| CliError::config(format!("key '{key}': no record labelled '{label}'")))
}

pub fn run(ctx: &Ctx) -> Result<(), CliError> {
    let cfg = &ctx.cfg;
    let input = cfg.path("input")?;
    let on = cfg.opt_str("on_label")?;
    let off = cfg.opt_str("off_label")?;
    let mc_samples = cfg.u64_or("mc_samples", 0)? as usize;
    cfg.finish()?;
    if on.is_some() != off.is_some() {
        return Err(CliError::config("keys 'on_label' and 'off_label' must be given together"));
    }
    let mc_seed = match (mc_samples, ctx.seed) {
        (0, _) => None,
        (_, Some(s)) => Some(s),
        (_, None) => return Err(CliError::config("key 'mc_samples' needs a 'seed' (or --seed)")),
    };

    let text = read_text(&input)?;
    let records = parse_tuning_csv(&text).map_err(|e| with_path(&input, e))?;
    let mut rows = Vec::with_capacity(records.len());
    for r in &records {
        let d = detuning(r)?;
        let mut row = json!({
            "label": r.label,
            "lambda_cav_nm": r.lambda_cav,
            "lambda_zpl_nm": r.lambda_zpl,
            "q_factor": r.q_factor,
            "pl_flux": r.pl_flux,
            "detuning_nm": d,
        });
        if let Some(seed) = mc_seed {
            row["detuning_mc_nm"] = json!(detuning_monte_carlo(r, mc_samples, seed)?);
        }
        rows.push(row);
    }
    let enhancement = match (&on, &off) {
        (Some(on), Some(off)) => {
            json!(enhancement_report(find(&records, on, "on_label")?, find(&records, off, "off_label")?)?)
        }
        _ => Value::Null,
    };
    let report = json!({
        "provenance": ctx.provenance().json(),
        "records": rows,
        "enhancement": enhancement,
    });
    ctx.destination().write_json(&report)
}
