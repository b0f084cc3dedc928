//! Nonlinear least-squares fitting of the spectral, lifetime, g² and
//! saturation models.
//!
//! Bounded parameters are fitted through smooth transforms (log for positive
//! quantities, logistic for reflectivities) so the Levenberg-Marquardt step
//! itself is unconstrained. Uncertainties come from the covariance of the
//! problem linearized in the physical parameters.

mod guess;
pub mod lm;
mod models;

pub use guess::initial_guess;
pub use lm::{levenberg_marquardt, LmOptions, LmReport, Termination};
pub use models::{
    eval_model, wavelength_to_ghz, Airy, AiryLorentzian, Domain, Lorentzian, Mirrors, ModelKind, ModelSpec, MonoExp,
    BIN_NODES, C_NM_GHZ,
};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Samples to fit. `sigma_y`, when present, holds absolute 1σ errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveData {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub sigma_y: Option<Vec<f64>>,
}

impl CurveData {
    pub fn new(x: Vec<f64>, y: Vec<f64>, sigma_y: Option<Vec<f64>>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::Data(format!("x has {} samples but y has {}", x.len(), y.len())));
        }
        if let Some(s) = &sigma_y {
            if s.len() != x.len() {
                return Err(Error::Data(format!("sigma_y has {} samples, expected {}", s.len(), x.len())));
            }
            if let Some(bad) = s.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
                return Err(Error::Data(format!("sigma_y entries must be positive, found {bad}")));
            }
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::Data("samples must be finite".into()));
        }
        Ok(CurveData { x, y, sigma_y })
    }

    /// Poisson weights √max(y, 1) for count data.
    pub fn with_poisson_sigma(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let sigma = y.iter().map(|v| v.max(1.0).sqrt()).collect();
        CurveData::new(x, y, Some(sigma))
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Samples with `lo ≤ x ≤ hi`.
    pub fn restrict(&self, lo: f64, hi: f64) -> CurveData {
        let keep: Vec<usize> = (0..self.len()).filter(|&i| self.x[i] >= lo && self.x[i] <= hi).collect();
        CurveData {
            x: keep.iter().map(|&i| self.x[i]).collect(),
            y: keep.iter().map(|&i| self.y[i]).collect(),
            sigma_y: self.sigma_y.as_ref().map(|s| keep.iter().map(|&i| s[i]).collect()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JacobianSource {
    Analytic,
    FiniteDifference,
}

/// ∂model/∂params at each abscissa (rows follow `x`, columns follow
/// [`ModelSpec::params`]).
#[derive(Debug, Clone, PartialEq)]
pub struct Jacobian {
    pub values: DMatrix<f64>,
    pub source: JacobianSource,
}

/// Analytic Jacobian, falling back to central differences when the analytic
/// form yields non-finite entries.
pub fn jacobian(m: &ModelSpec, x: &[f64]) -> Result<Jacobian> {
    m.validate()?;
    let n = m.n_params();
    let mut values = DMatrix::zeros(x.len(), n);
    let mut row = vec![0.0; n];
    for (i, &xi) in x.iter().enumerate() {
        m.gradient(xi, &mut row);
        for j in 0..n {
            values[(i, j)] = row[j];
        }
    }
    if values.iter().all(|v| v.is_finite()) {
        Ok(Jacobian { values, source: JacobianSource::Analytic })
    } else {
        Ok(Jacobian { values: jacobian_fd(m, x, 1e-6), source: JacobianSource::FiniteDifference })
    }
}

/// Central differences with step `rel_step·scale` per parameter.
pub fn jacobian_fd(m: &ModelSpec, x: &[f64], rel_step: f64) -> DMatrix<f64> {
    let p = m.params();
    let scales = m.scales();
    let mut out = DMatrix::zeros(x.len(), p.len());
    for j in 0..p.len() {
        let h = rel_step * scales[j];
        let mut up = p.clone();
        let mut down = p.clone();
        up[j] += h;
        down[j] -= h;
        let (mu, md) = (m.with_params(&up), m.with_params(&down));
        let width = up[j] - down[j];
        for (i, &xi) in x.iter().enumerate() {
            out[(i, j)] = (mu.value(xi) - md.value(xi)) / width;
        }
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// Names of parameters held at their initial value. `None` uses the
    /// model's defaults (see [`ModelSpec::default_fixed`]).
    pub fixed: Option<Vec<String>>,
    /// When set, each sample is a histogram bin of this width centred on its
    /// x value, and the model is compared through its average over the bin.
    pub bin_width: Option<f64>,
    pub lm: LmOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: ModelSpec,
    pub names: Vec<String>,
    pub params: Vec<f64>,
    /// 1σ uncertainties, only present for converged fits. Fixed parameters get 0.
    pub sigma: Option<Vec<f64>>,
    pub chi2_reduced: f64,
    pub n_iter: usize,
    pub converged: bool,
    pub termination: Termination,
    pub fixed: Vec<String>,
    pub jacobian: JacobianSource,
}

impl FitResult {
    pub fn param(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|i| self.params[i])
    }

    pub fn sigma_of(&self, name: &str) -> Option<f64> {
        let i = self.names.iter().position(|n| n == name)?;
        self.sigma.as_ref().map(|s| s[i])
    }
}

fn to_internal(p: f64, d: Domain) -> f64 {
    match d {
        Domain::Free => p,
        Domain::Positive => p.ln(),
        Domain::UnitInterval => (p / (1.0 - p)).ln(),
    }
}

/// Physical value and dp/du for an internal coordinate.
fn to_physical(u: f64, d: Domain) -> (f64, f64) {
    match d {
        Domain::Free => (u, 1.0),
        Domain::Positive => {
            let p = u.exp();
            (p, p)
        }
        Domain::UnitInterval => {
            let p = 1.0 / (1.0 + (-u).exp());
            (p, p * (1.0 - p))
        }
    }
}

/// Relative singular-value floor below which the normal equations are
/// treated as singular.
const RANK_TOL: f64 = 1e-10;

fn check_rank(j: &DMatrix<f64>, names: &[&str]) -> Result<()> {
    let mut scaled = j.clone();
    for (c, name) in names.iter().enumerate() {
        let norm = scaled.column(c).norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::RankDeficient(format!("parameter '{name}' has no influence on the model")));
        }
        scaled.column_mut(c).scale_mut(1.0 / norm);
    }
    let sv = scaled.singular_values();
    let max = sv.max();
    let min = sv.min();
    if min <= RANK_TOL * max {
        return Err(Error::RankDeficient(format!(
            "free parameters {names:?} are not jointly identifiable (condition {:.3e})",
            max / min
        )));
    }
    Ok(())
}

/// Least-squares fit of `init` to `data`.
pub fn fit(init: &ModelSpec, data: &CurveData, opts: &FitOptions) -> Result<FitResult> {
    init.validate()?;
    let names = init.param_names();
    let fixed: Vec<String> = match &opts.fixed {
        Some(f) => f.clone(),
        None => init.default_fixed().iter().map(|s| s.to_string()).collect(),
    };
    if let Some(unknown) = fixed.iter().find(|f| !names.contains(&f.as_str())) {
        return Err(Error::Config(format!("cannot fix unknown parameter '{unknown}' of {}", init.kind().name())));
    }
    let free: Vec<usize> = (0..names.len()).filter(|&i| !fixed.iter().any(|f| f == names[i])).collect();
    let free_names: Vec<&str> = free.iter().map(|&i| names[i]).collect();
    if data.len() < free.len() + 1 {
        return Err(Error::Data(format!("{} samples cannot constrain {} free parameters", data.len(), free.len())));
    }

    if let Some(w) = opts.bin_width {
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::Config(format!("bin width must be positive, got {w}")));
        }
    }
    let domains = init.domains();
    let base = init.params();
    let weights: Vec<f64> = match &data.sigma_y {
        Some(s) => s.iter().map(|v| 1.0 / v).collect(),
        None => vec![1.0; data.len()],
    };

    // residuals and Jacobian in physical parameters, free columns only
    let physical = |p: &[f64]| -> (DVector<f64>, DMatrix<f64>) {
        let model = init.with_params(p);
        let mut grad = vec![0.0; p.len()];
        let mut r = DVector::zeros(data.len());
        let mut j = DMatrix::zeros(data.len(), free.len());
        for i in 0..data.len() {
            let w = weights[i];
            let value = match opts.bin_width {
                Some(width) => model.bin_average(data.x[i], width, &mut grad),
                None => {
                    model.gradient(data.x[i], &mut grad);
                    model.value(data.x[i])
                }
            };
            r[i] = (value - data.y[i]) * w;
            for (c, &k) in free.iter().enumerate() {
                j[(i, c)] = grad[k] * w;
            }
        }
        (r, j)
    };
    let unpack = |u: &DVector<f64>| -> (Vec<f64>, Vec<f64>) {
        let mut p = base.clone();
        let mut dp = vec![1.0; free.len()];
        for (c, &k) in free.iter().enumerate() {
            let (v, d) = to_physical(u[c], domains[k]);
            p[k] = v;
            dp[c] = d;
        }
        (p, dp)
    };

    let (_, j0) = physical(&base);
    check_rank(&j0, &free_names)?;

    let u0 = DVector::from_iterator(free.len(), free.iter().map(|&k| to_internal(base[k], domains[k])));
    let report = levenberg_marquardt(
        u0,
        |u| {
            let (p, dp) = unpack(u);
            let (r, mut j) = physical(&p);
            for (c, d) in dp.iter().enumerate() {
                j.column_mut(c).scale_mut(*d);
            }
            (r, j)
        },
        &opts.lm,
    );

    let (params, _) = unpack(&report.params);
    let model = init.with_params(&params);
    let dof = (data.len() - free.len()) as f64;
    let chi2_reduced = 2.0 * report.cost / dof;
    let converged = report.converged() && model.validate().is_ok();

    let sigma = if converged {
        let (_, j) = physical(&params);
        check_rank(&j, &free_names)?;
        let cov = covariance(&j)?;
        let factor = if data.sigma_y.is_some() { 1.0 } else { chi2_reduced };
        let mut sigma = vec![0.0; names.len()];
        for (c, &k) in free.iter().enumerate() {
            sigma[k] = (cov[(c, c)] * factor).max(0.0).sqrt();
        }
        Some(sigma)
    } else {
        None
    };

    Ok(FitResult {
        model,
        names: names.iter().map(|s| s.to_string()).collect(),
        params,
        sigma,
        chi2_reduced,
        n_iter: report.n_iter,
        converged,
        termination: report.termination,
        fixed,
        jacobian: JacobianSource::Analytic,
    })
}

/// Reweighting passes used by [`fit_counts`].
pub const COUNT_REWEIGHT_PASSES: usize = 3;

/// Fit to raw Poisson counts (`data.sigma_y` is ignored). The first pass
/// weights by √max(y, 1); later passes take σ from the fitted model, which
/// removes the low bias that observed-count weights give in sparse bins.
pub fn fit_counts(init: &ModelSpec, data: &CurveData, opts: &FitOptions) -> Result<FitResult> {
    let mut current = CurveData::with_poisson_sigma(data.x.clone(), data.y.clone())?;
    let mut result = fit(init, &current, opts)?;
    for _ in 0..COUNT_REWEIGHT_PASSES {
        if !result.converged {
            break;
        }
        let model = &result.model;
        current.sigma_y = Some(data.x.iter().map(|&x| model.value(x).max(1.0).sqrt()).collect());
        result = fit(&result.model, &current, opts)?;
    }
    Ok(result)
}

/// (JᵀJ)⁻¹ via SVD of the column-equilibrated Jacobian.
fn covariance(j: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let norms: Vec<f64> = (0..j.ncols()).map(|c| j.column(c).norm()).collect();
    let mut scaled = j.clone();
    for (c, n) in norms.iter().enumerate() {
        scaled.column_mut(c).scale_mut(1.0 / n);
    }
    let svd = scaled.svd(false, true);
    let v_t = svd.v_t.ok_or_else(|| Error::RankDeficient("SVD failed".into()))?;
    let n = j.ncols();
    let mut cov = DMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            let mut acc = 0.0;
            for k in 0..n {
                acc += v_t[(k, a)] * v_t[(k, b)] / (svd.singular_values[k] * svd.singular_values[k]);
            }
            cov[(a, b)] = acc / (norms[a] * norms[b]);
        }
    }
    Ok(cov)
}
