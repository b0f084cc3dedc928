use cavqed_core::fitting::{fit, fit_counts, initial_guess, CurveData, FitOptions, LmOptions, ModelKind};
use cavqed_core::io::{curve_from_table, parse_numeric_csv};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use super::{read_text, with_path, Ctx};
use crate::error::CliError;

const INIT_PREFIX: &str = "init_";
/// Relative spread of sample spacings tolerated when bin averaging.
const SPACING_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Weights {
    /// The sigma column when present, otherwise uniform.
    Auto,
    Column,
    Uniform,
    /// Raw counts, fitted with Poisson reweighting.
    Poisson,
}

impl Weights {
    fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "auto" => Ok(Weights::Auto),
            "column" => Ok(Weights::Column),
            "uniform" => Ok(Weights::Uniform),
            "poisson" => Ok(Weights::Poisson),
            other => Err(CliError::config(format!(
                "key 'weights' must be \"auto\", \"column\", \"uniform\" or \"poisson\", got \"{other}\""
            ))),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Weights::Auto => "auto",
            Weights::Column => "column",
            Weights::Uniform => "uniform",
            Weights::Poisson => "poisson",
        }
    }
}

fn parse_model(name: &str) -> Result<ModelKind, CliError> {
    name.parse().map_err(|_| {
        let known: Vec<&str> = ModelKind::ALL.iter().map(|k| k.name()).collect();
        CliError::config(format!("key 'model': unknown model '{name}' (expected one of {})", known.join(", ")))
    })
}

/// Uniform sample spacing, the bin width of histogram data.
fn uniform_spacing(x: &[f64]) -> Result<f64, CliError> {
    if x.len() < 2 {
        return Err(CliError::data("bin averaging needs at least two samples"));
    }
    let step = (x[x.len() - 1] - x[0]) / (x.len() - 1) as f64;
    if let Some(i) = x.windows(2).position(|w| ((w[1] - w[0]) - step).abs() > SPACING_TOL * step.abs()) {
        return Err(CliError::data(format!("bin averaging needs uniform x spacing; row {} breaks it", i + 2)));
    }
    Ok(step)
}

pub fn run(ctx: &Ctx) -> Result<(), CliError> {
    let cfg = &ctx.cfg;
    let input = cfg.path("input")?;
    let kind = parse_model(&cfg.str("model")?)?;
    let weights = Weights::parse(cfg.opt_str("weights")?.as_deref().unwrap_or("auto"))?;
    let x_min = cfg.f64_or("x_min", f64::NEG_INFINITY)?;
    let x_max = cfg.f64_or("x_max", f64::INFINITY)?;
    let bin_average = cfg.bool_or("bin_average", false)?;
    let fixed = cfg
        .opt_str("fix")?
        .map(|s| s.split(',').map(str::trim).filter(|p| !p.is_empty()).map(String::from).collect::<Vec<_>>());
    let max_iter = cfg.u64_or("max_iter", LmOptions::default().max_iter as u64)? as usize;
    let mut inits = Vec::new();
    for key in cfg.keys_with_prefix(INIT_PREFIX) {
        inits.push((key[INIT_PREFIX.len()..].to_string(), cfg.f64(&key)?, key));
    }
    cfg.finish()?;

    let text = read_text(&input)?;
    let table = parse_numeric_csv(&text).map_err(|e| with_path(&input, e))?;
    let data = curve_from_table(&table).map_err(|e| with_path(&input, e))?.restrict(x_min, x_max);
    if data.is_empty() {
        return Err(CliError::data(format!("no samples inside [{x_min}, {x_max}]")));
    }
    let data = match weights {
        Weights::Column if data.sigma_y.is_none() => {
            return Err(CliError::config("key 'weights' is \"column\" but the input has no sigma column"))
        }
        Weights::Uniform => CurveData { sigma_y: None, ..data },
        _ => data,
    };
    let bin_width = if bin_average { Some(uniform_spacing(&data.x)?) } else { None };

    let guess = initial_guess(kind, &data)?;
    let names = guess.param_names();
    let mut start = guess.params();
    for (name, value, key) in &inits {
        let i = names.iter().position(|n| n == name).ok_or_else(|| {
            CliError::config(format!(
                "key '{key}': model {} has no parameter '{name}' (has {})",
                kind.name(),
                names.join(", ")
            ))
        })?;
        start[i] = *value;
    }
    let init = guess.with_params(&start);
    init.validate().map_err(|e| CliError::config(format!("initial parameters: {e}")))?;

    let opts = FitOptions { fixed, bin_width, lm: LmOptions { max_iter, ..LmOptions::default() } };
    let result = match weights {
        Weights::Poisson => fit_counts(&init, &data, &opts)?,
        _ => fit(&init, &data, &opts)?,
    };

    let named = |values: &[f64]| -> Value {
        Value::Object(result.names.iter().cloned().zip(values.iter().map(|&v| json!(v))).collect::<Map<_, _>>())
    };
    let report = json!({
        "provenance": ctx.provenance().json(),
        "input_sha256": hex::encode(Sha256::digest(text.as_bytes())),
        "model": kind.name(),
        "params": named(&result.params),
        "sigmas": result.sigma.as_deref().map_or(Value::Null, named),
        "chi2_reduced": result.chi2_reduced,
        "converged": result.converged,
        "n_iter": result.n_iter,
        "termination": result.termination,
        "fixed": result.fixed,
        "n_points": data.len(),
        "weights": weights.name(),
        "bin_width": bin_width,
    });
    ctx.destination().write_json(&report)?;
    if result.converged {
        Ok(())
    } else {
        Err(CliError::non_convergence(format!(
            "{} fit did not converge after {} iterations ({:?})",
            kind.name(),
            result.n_iter,
            result.termination
        )))
    }
}
