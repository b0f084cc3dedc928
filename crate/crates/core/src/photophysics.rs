//! Closed-form photophysics of a cavity-coupled three-level emitter.
//!
//! Units are fixed across the crate: rates in 1/ns, times in ns and
//! wavelengths in nm.
//!
//! The emitter has a ground singlet (1), an excited singlet (2) whose
//! zero-phonon line (ZPL) couples to the cavity, and a metastable triplet (3)
//! reached by intersystem crossing from (2).

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{ensure, Result};

/// Single cavity resonance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityMode {
    /// Resonance wavelength (nm).
    pub lambda_c: f64,
    pub q_factor: f64,
    /// Mode volume in units of (λ/n)³.
    pub v_norm: f64,
    /// Collection efficiency into the target mode.
    pub eta: f64,
}

impl CavityMode {
    pub fn new(lambda_c: f64, q_factor: f64, v_norm: f64, eta: f64) -> Result<Self> {
        let mode = CavityMode { lambda_c, q_factor, v_norm, eta };
        mode.validate()?;
        Ok(mode)
    }

    pub fn validate(&self) -> Result<()> {
        ensure(positive(self.lambda_c), || format!("cavity wavelength must be positive, got {}", self.lambda_c))?;
        ensure(positive(self.q_factor), || format!("Q factor must be positive, got {}", self.q_factor))?;
        ensure(positive(self.v_norm), || format!("mode volume must be positive, got {}", self.v_norm))?;
        ensure((0.0..=1.0).contains(&self.eta), || {
            format!("collection efficiency must lie in [0, 1], got {}", self.eta)
        })
    }

    /// Full width at half maximum of the resonance (nm).
    pub fn linewidth(&self) -> f64 {
        self.lambda_c / self.q_factor
    }
}

/// Rates of the three-level emitter, all in 1/ns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmitterModel {
    /// ZPL wavelength (nm).
    pub lambda_zpl: f64,
    /// Free-space radiative rate of the ZPL transition.
    pub gamma_r: f64,
    /// All other radiative and non-radiative decay back to the ground state.
    pub gamma_0: f64,
    /// Debye-Waller factor, the fraction of emission in the ZPL.
    pub f_dw: f64,
    /// Excited singlet to triplet.
    pub k_isc: f64,
    /// Triplet to ground.
    pub k_t: f64,
    /// Ground to excited singlet.
    pub k_pump: f64,
}

impl EmitterModel {
    pub fn validate(&self) -> Result<()> {
        ensure(positive(self.lambda_zpl), || format!("ZPL wavelength must be positive, got {}", self.lambda_zpl))?;
        for (name, v) in [
            ("gamma_r", self.gamma_r),
            ("gamma_0", self.gamma_0),
            ("k_isc", self.k_isc),
            ("k_t", self.k_t),
            ("k_pump", self.k_pump),
        ] {
            ensure(v.is_finite() && v >= 0.0, || format!("rate {name} must be finite and non-negative, got {v}"))?;
        }
        ensure(self.f_dw > 0.0 && self.f_dw <= 1.0, || {
            format!("Debye-Waller factor must lie in (0, 1], got {}", self.f_dw)
        })
    }

    /// ZPL rate into the cavity-enhanced mode, γ_R(1 + F_P).
    pub fn zpl_rate(&self, f_p: f64) -> f64 {
        self.gamma_r * (1.0 + f_p)
    }

    /// Decay rate of the excited singlet back to the ground state (excludes ISC).
    pub fn relaxation_rate(&self, f_p: f64) -> f64 {
        self.zpl_rate(f_p) + self.gamma_0
    }

    /// Total exit rate of the excited singlet, including intersystem crossing.
    pub fn excited_exit_rate(&self, f_p: f64) -> f64 {
        self.relaxation_rate(f_p) + self.k_isc
    }

    /// Excited-state lifetime 1/(γ_R(1+F_P) + γ_0 + k_isc), as seen in a
    /// pulsed lifetime measurement.
    pub fn excited_lifetime(&self, f_p: f64) -> Result<f64> {
        let rate = self.excited_exit_rate(f_p);
        ensure(rate > 0.0, || "excited state has no exit channel".to_string())?;
        Ok(1.0 / rate)
    }
}

/// Peak Purcell factor together with the cavity-emitter detuning.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingState {
    pub f_p: f64,
    /// λ_cav − λ_ZPL (nm).
    pub delta: f64,
}

/// Parameters of the three-level antibunching curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct G2Params {
    pub a: f64,
    /// g²(0) relative to the amplitude `a`.
    pub b: f64,
    /// Bunching amplitude.
    pub c: f64,
    /// Delay offset (ns).
    pub t_shift: f64,
    /// Antibunching timescale (ns).
    pub tau1: f64,
    /// Bunching timescale (ns).
    pub tau2: f64,
}

impl G2Params {
    pub fn validate(&self) -> Result<()> {
        ensure(positive(self.a), || format!("g2 amplitude a must be positive, got {}", self.a))?;
        ensure(positive(self.tau1), || format!("tau1 must be positive, got {}", self.tau1))?;
        ensure(positive(self.tau2), || format!("tau2 must be positive, got {}", self.tau2))?;
        ensure(self.b.is_finite() && self.c.is_finite() && self.t_shift.is_finite(), || {
            "g2 parameters must be finite".to_string()
        })
    }
}

/// Two-level saturation curve parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaturationParams {
    /// Saturated intensity (counts per unit time, typically kcounts/min).
    pub i_inf: f64,
    /// Saturation power (µW).
    pub p_sat: f64,
}

impl SaturationParams {
    pub fn validate(&self) -> Result<()> {
        ensure(positive(self.i_inf), || format!("I_inf must be positive, got {}", self.i_inf))?;
        ensure(positive(self.p_sat), || format!("P_sat must be positive, got {}", self.p_sat))
    }
}

/// Lifetimes and collected fluxes with the cavity on and off resonance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OnOffRates {
    pub tau_on: f64,
    pub tau_off: f64,
    pub flux_on: f64,
    pub flux_off: f64,
}

/// Steady-state occupation of ground, excited and triplet states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Populations {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
}

impl Populations {
    /// Emitted ZPL photon rate p2·γ_R(1+F_P) in 1/ns.
    pub fn zpl_photon_rate(&self, emitter: &EmitterModel, f_p: f64) -> f64 {
        self.p2 * emitter.zpl_rate(f_p)
    }
}

fn positive(x: f64) -> bool {
    x.is_finite() && x > 0.0
}

/// Purcell factor for perfect spatial and spectral overlap, 3Q/(4π²V) with
/// V in units of (λ/n)³ so the wavelength cancels.
pub fn purcell_peak(cavity: &CavityMode) -> Result<f64> {
    ensure(positive(cavity.q_factor), || format!("Q factor must be finite and positive, got {}", cavity.q_factor))?;
    ensure(positive(cavity.v_norm), || format!("mode volume must be finite and positive, got {}", cavity.v_norm))?;
    Ok(3.0 * cavity.q_factor / (4.0 * PI * PI * cavity.v_norm))
}

/// Purcell factor reduced by the Lorentzian overlap of a spectrally narrow
/// emitter with the cavity line.
pub fn purcell_detuned(coupling: &CouplingState, cavity: &CavityMode) -> Result<f64> {
    cavity.validate()?;
    ensure(coupling.f_p >= 0.0, || format!("Purcell factor must be non-negative, got {}", coupling.f_p))?;
    let x = 2.0 * cavity.q_factor * coupling.delta / cavity.lambda_c;
    Ok(coupling.f_p / (1.0 + x * x))
}

/// Fraction of decay into the cavity-enhanced ZPL channel.
pub fn beta_fraction(f_p: f64, gamma_r: f64, gamma_0: f64) -> Result<f64> {
    ensure(f_p >= 0.0 && gamma_r >= 0.0 && gamma_0 >= 0.0, || {
        format!("beta needs non-negative inputs, got f_p={f_p}, gamma_r={gamma_r}, gamma_0={gamma_0}")
    })?;
    let enhanced = (1.0 + f_p) * gamma_r;
    let total = enhanced + gamma_0;
    ensure(total > 0.0, || "gamma_r and gamma_0 are both zero".to_string())?;
    Ok(enhanced / total)
}

pub fn rates_on_off(emitter: &EmitterModel, f_p: f64, eta: f64) -> Result<OnOffRates> {
    let off = emitter.gamma_r + emitter.gamma_0;
    ensure(off > 0.0, || "gamma_r + gamma_0 must be positive".to_string())?;
    let on = emitter.gamma_r * (1.0 + f_p) + emitter.gamma_0;
    Ok(OnOffRates {
        tau_on: 1.0 / on,
        tau_off: 1.0 / off,
        flux_on: eta * emitter.gamma_r * (1.0 + f_p),
        flux_off: eta * emitter.gamma_r,
    })
}

/// γ_R/(γ_R+γ_0)/F_DW. Values above one are returned unclamped; they mean
/// the rates and Debye-Waller factor are mutually inconsistent.
pub fn quantum_efficiency(emitter: &EmitterModel) -> Result<f64> {
    let total = emitter.gamma_r + emitter.gamma_0;
    ensure(total > 0.0, || "gamma_r + gamma_0 must be positive".to_string())?;
    ensure(emitter.f_dw > 0.0, || format!("Debye-Waller factor must be positive, got {}", emitter.f_dw))?;
    Ok(emitter.gamma_r / total / emitter.f_dw)
}

/// τ_off/τ_on expressed through the quantum efficiency.
pub fn tau_ratio(f_p: f64, f_dw: f64, qe: f64) -> f64 {
    1.0 + f_p * f_dw * qe
}

pub fn saturation_intensity(p: f64, params: &SaturationParams) -> f64 {
    params.i_inf * p / (p + params.p_sat)
}

pub fn g2_analytic(t: f64, params: &G2Params) -> f64 {
    let dt = (t - params.t_shift).abs();
    // a[b + (1-b)(1 - h)] with 1 - h written via expm1, so t = t_shift gives a·b exactly
    let fast = (-dt / params.tau1).exp_m1();
    let slow = (-dt / params.tau2).exp_m1();
    let recovered = -fast - params.c * (fast - slow);
    params.a * (params.b + (1.0 - params.b) * recovered)
}

/// Stationary solution of the three-level rate equations.
pub fn steady_state(emitter: &EmitterModel, f_p: f64) -> Result<Populations> {
    let relax = emitter.relaxation_rate(f_p);
    let exit = relax + emitter.k_isc;
    let k_p = emitter.k_pump;
    if k_p == 0.0 {
        return Ok(Populations { p1: 1.0, p2: 0.0, p3: 0.0 });
    }
    if emitter.k_isc == 0.0 {
        let norm = k_p + relax;
        ensure(norm > 0.0, || "all rates are zero".to_string())?;
        return Ok(Populations { p1: relax / norm, p2: k_p / norm, p3: 0.0 });
    }
    if emitter.k_t == 0.0 {
        // a permanently shelved triplet absorbs all population
        return Ok(Populations { p1: 0.0, p2: 0.0, p3: 1.0 });
    }
    let w1 = exit * emitter.k_t;
    let w2 = k_p * emitter.k_t;
    let w3 = k_p * emitter.k_isc;
    let norm = w1 + w2 + w3;
    ensure(norm > 0.0 && norm.is_finite(), || "degenerate rate balance".to_string())?;
    Ok(Populations { p1: w1 / norm, p2: w2 / norm, p3: w3 / norm })
}

/// g² parameters implied by the rate equations for CW pumping at
/// `emitter.k_pump`. The excited-state population after a detection, relaxed
/// from the ground state, is a sum of two exponentials whose rates are the
/// non-zero eigenvalues of the rate matrix; `tau1` is the faster of the two.
/// Returns `a = 1`, `b = 0` and `t_shift = 0`.
pub fn g2_params_from_rates(emitter: &EmitterModel, f_p: f64) -> Result<G2Params> {
    emitter.validate()?;
    let k_p = emitter.k_pump;
    let exit = emitter.excited_exit_rate(f_p);
    let k_t = emitter.k_t;
    ensure(k_p > 0.0, || "g2 needs a non-zero pump rate".to_string())?;
    let trace = k_p + exit + k_t;
    let det = k_p * emitter.k_isc + k_p * k_t + exit * k_t;
    let disc = trace * trace - 4.0 * det;
    ensure(det > 0.0, || "rate matrix has a degenerate null space".to_string())?;
    ensure(disc > 0.0, || {
        "rate matrix has complex or repeated eigenvalues; the two-exponential form does not apply".to_string()
    })?;
    let root = disc.sqrt();
    let fast = 0.5 * (trace + root);
    let slow = det / fast;
    let p2 = k_p * k_t / det;
    // initial slope of g² is k_pump/p2
    let c = (k_p / p2 - fast) / (fast - slow);
    Ok(G2Params { a: 1.0, b: 0.0, c, t_shift: 0.0, tau1: 1.0 / fast, tau2: 1.0 / slow })
}
