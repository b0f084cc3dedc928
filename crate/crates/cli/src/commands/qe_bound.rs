use cavqed_core::extraction::{qe_upper_bound, Measured, QeBoundInput};
use serde_json::json;

use super::Ctx;
use crate::config::non_negative;
use crate::error::CliError;

pub fn run(ctx: &Ctx) -> Result<(), CliError> {
    let cfg = &ctx.cfg;
    let tau_off =
        Measured::new(cfg.f64("tau_off_ns")?, non_negative("sigma_tau_off_ns", cfg.f64("sigma_tau_off_ns")?)?);
    let flux_ratio =
        Measured::new(cfg.f64("flux_ratio")?, non_negative("sigma_flux_ratio", cfg.f64_or("sigma_flux_ratio", 0.0)?)?);
    let f_dw = cfg.f64("f_dw")?;
    let sigma_multiplier =
        non_negative("sigma_multiplier", cfg.f64_or("sigma_multiplier", QeBoundInput::DEFAULT_SIGMA_MULTIPLIER)?)?;
    cfg.finish()?;

    let input = QeBoundInput { tau_off, flux_ratio, f_dw, sigma_multiplier };
    let b = qe_upper_bound(&input)?;
    let report = json!({
        "provenance": ctx.provenance().json(),
        "inputs": {
            "tau_off_ns": tau_off.value,
            "sigma_tau_off_ns": tau_off.sigma,
            "flux_ratio": flux_ratio.value,
            "sigma_flux_ratio": flux_ratio.sigma,
            "f_dw": f_dw,
            "sigma_multiplier": sigma_multiplier,
        },
        "tau_off_th_ns": b.tau_off_th,
        "f_p": b.f_p.value,
        "sigma_f_p": b.f_p.sigma,
        "qe_bound": b.bound,
        "sigma_qe_bound": b.sigma,
    });
    ctx.destination().write_json(&report)
}
