//! Physical quantities extracted from measured spectra, fluxes and lifetimes.
//!
//! Uncertainties are propagated to first order in quadrature; a Monte Carlo
//! propagator is provided to cross-check the linear estimates.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::photophysics::{purcell_peak, CavityMode};

/// Value with a symmetric 1σ uncertainty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measured {
    pub value: f64,
    pub sigma: f64,
}

impl Measured {
    pub fn new(value: f64, sigma: f64) -> Self {
        Measured { value, sigma }
    }

    pub fn exact(value: f64) -> Self {
        Measured { value, sigma: 0.0 }
    }

    pub fn relative(&self) -> f64 {
        self.sigma / self.value.abs()
    }

    /// Difference of independent quantities.
    pub fn minus(&self, other: &Measured) -> Measured {
        Measured::new(self.value - other.value, self.sigma.hypot(other.sigma))
    }

    /// Ratio of independent quantities, relative errors added in quadrature.
    pub fn ratio(&self, other: &Measured) -> Measured {
        let value = self.value / other.value;
        Measured::new(value, value.abs() * self.relative().hypot(other.relative()))
    }
}

impl std::fmt::Display for Measured {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} ± {}", self.value, self.sigma)
    }
}

/// Cavity and ZPL measurement at one tuning state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningRecord {
    pub label: String,
    pub lambda_cav: Measured,
    pub lambda_zpl: Measured,
    pub q_factor: Measured,
    pub pl_flux: Measured,
}

impl TuningRecord {
    pub fn validate(&self) -> Result<()> {
        let all = [self.lambda_cav, self.lambda_zpl, self.q_factor, self.pl_flux];
        ensure(all.iter().all(|m| m.sigma >= 0.0 && m.value.is_finite() && m.sigma.is_finite()), || {
            format!("record '{}' has negative or non-finite uncertainties", self.label)
        })?;
        ensure(self.lambda_cav.value > 0.0 && self.lambda_zpl.value > 0.0, || {
            format!("record '{}' has non-positive wavelengths", self.label)
        })
    }
}

/// δ = λ_cav − λ_ZPL.
pub fn detuning(r: &TuningRecord) -> Result<Measured> {
    r.validate()?;
    Ok(r.lambda_cav.minus(&r.lambda_zpl))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PurcellEstimate {
    pub f_p: Measured,
    /// False when the flux ratio shows no enhancement (ratio ≤ 1).
    pub enhanced: bool,
}

/// F_P = φ_on/φ_off − 1; the uncertainty carries over unchanged.
pub fn purcell_from_flux(flux_ratio: Measured) -> Result<PurcellEstimate> {
    ensure(flux_ratio.value > 0.0, || format!("flux ratio must be positive, got {}", flux_ratio.value))?;
    Ok(PurcellEstimate {
        f_p: Measured::new(flux_ratio.value - 1.0, flux_ratio.sigma),
        enhanced: flux_ratio.value > 1.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QeBoundInput {
    /// Off-resonance lifetime (ns) and its standard deviation.
    pub tau_off: Measured,
    pub flux_ratio: Measured,
    pub f_dw: f64,
    /// Number of standard deviations below τ_off taken as the shortest
    /// lifetime that would go unnoticed.
    pub sigma_multiplier: f64,
}

impl QeBoundInput {
    pub const DEFAULT_SIGMA_MULTIPLIER: f64 = 3.0;

    pub fn new(tau_off: Measured, flux_ratio: Measured, f_dw: f64) -> Self {
        QeBoundInput { tau_off, flux_ratio, f_dw, sigma_multiplier: Self::DEFAULT_SIGMA_MULTIPLIER }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QeBound {
    /// Upper bound on the quantum efficiency.
    pub bound: f64,
    /// 1σ of the bound from the flux-ratio uncertainty.
    pub sigma: f64,
    /// τ_off − k·σ_off (ns).
    pub tau_off_th: f64,
    pub f_p: Measured,
}

/// QE < (τ_off/τ_th − 1)/(F_P·F_DW) with τ_th = τ_off − k·σ_off and
/// F_P from the flux ratio.
pub fn qe_upper_bound(input: &QeBoundInput) -> Result<QeBound> {
    let QeBoundInput { tau_off, flux_ratio, f_dw, sigma_multiplier } = *input;
    ensure(sigma_multiplier.is_finite() && sigma_multiplier >= 0.0, || {
        format!("sigma multiplier must be non-negative, got {sigma_multiplier}")
    })?;
    ensure(tau_off.sigma >= 0.0, || format!("lifetime uncertainty must be non-negative, got {}", tau_off.sigma))?;
    let tau_off_th = tau_off.value - sigma_multiplier * tau_off.sigma;
    ensure(tau_off_th > 0.0, || {
        format!(
            "tau_off = {} ns does not exceed {sigma_multiplier} sigma = {} ns",
            tau_off.value,
            sigma_multiplier * tau_off.sigma
        )
    })?;
    ensure(flux_ratio.value > 1.0, || format!("flux ratio must exceed 1, got {}", flux_ratio.value))?;
    ensure(f_dw > 0.0 && f_dw <= 1.0, || format!("Debye-Waller factor must lie in (0, 1], got {f_dw}"))?;
    let f_p = purcell_from_flux(flux_ratio)?.f_p;
    let bound = (tau_off.value / tau_off_th - 1.0) / (f_p.value * f_dw);
    Ok(QeBound { bound, sigma: bound * flux_ratio.sigma / f_p.value, tau_off_th, f_p })
}

pub const DEFAULT_N_EFF: f64 = 2.5;

/// First-order redshift Δλ = λ_c·overlap·(n_gas − 1)/n_eff from a cladding
/// layer of index `n_gas` filling a fraction `overlap` of the mode.
pub fn gas_shift_estimate(n_gas: f64, overlap: f64, lambda_c: f64, n_eff: f64) -> Result<f64> {
    ensure(n_gas >= 1.0, || format!("cladding index must be at least 1, got {n_gas}"))?;
    ensure((0.0..=1.0).contains(&overlap), || format!("overlap must lie in [0, 1], got {overlap}"))?;
    ensure(lambda_c > 0.0 && n_eff > 0.0, || "wavelength and effective index must be positive".to_string())?;
    Ok(lambda_c * overlap * (n_gas - 1.0) / n_eff)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnhancementReport {
    pub on_label: String,
    pub off_label: String,
    pub flux_ratio: Measured,
    /// Purcell factor from the flux ratio.
    pub f_p: Measured,
    pub enhanced: bool,
    pub delta_on: Measured,
    pub delta_off: Measured,
    /// 3Q/(4π²) from the on-resonance Q with a unit mode volume, for
    /// comparison with the flux-based value. Not reconciled with `f_p`.
    pub f_p_ideal_unit_volume: Option<f64>,
}

pub fn enhancement_report(on: &TuningRecord, off: &TuningRecord) -> Result<EnhancementReport> {
    on.validate()?;
    off.validate()?;
    if off.pl_flux.value <= 0.0 {
        return Err(Error::Domain(format!("off-resonance flux of '{}' must be positive", off.label)));
    }
    let flux_ratio = on.pl_flux.ratio(&off.pl_flux);
    let estimate = purcell_from_flux(flux_ratio)?;
    let f_p_ideal_unit_volume =
        CavityMode::new(on.lambda_cav.value, on.q_factor.value, 1.0, 1.0).and_then(|c| purcell_peak(&c)).ok();
    Ok(EnhancementReport {
        on_label: on.label.clone(),
        off_label: off.label.clone(),
        flux_ratio,
        f_p: estimate.f_p,
        enhanced: estimate.enhanced,
        delta_on: detuning(on)?,
        delta_off: detuning(off)?,
        f_p_ideal_unit_volume,
    })
}

/// Monte Carlo propagation through `f` with independent Gaussian inputs.
/// Returns the sample mean and standard deviation.
pub fn propagate_monte_carlo<F>(inputs: &[Measured], f: F, samples: usize, seed: u64) -> Measured
where
    F: Fn(&[f64]) -> f64,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = vec![0.0; inputs.len()];
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for k in 0..samples {
        for (d, m) in draw.iter_mut().zip(inputs) {
            let z: f64 = StandardNormal.sample(&mut rng);
            *d = m.value + m.sigma * z;
        }
        let v = f(&draw);
        let delta = v - mean;
        mean += delta / (k + 1) as f64;
        m2 += delta * (v - mean);
    }
    let var = if samples > 1 { m2 / (samples - 1) as f64 } else { 0.0 };
    Measured::new(mean, var.sqrt())
}

/// Monte Carlo counterpart of [`detuning`].
pub fn detuning_monte_carlo(r: &TuningRecord, samples: usize, seed: u64) -> Result<Measured> {
    r.validate()?;
    Ok(propagate_monte_carlo(&[r.lambda_cav, r.lambda_zpl], |v| v[0] - v[1], samples, seed))
}
