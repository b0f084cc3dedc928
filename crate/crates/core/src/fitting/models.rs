//! Fit models and their analytic parameter gradients.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::photophysics::{g2_analytic, saturation_intensity, G2Params, SaturationParams};

/// Midpoint nodes per bin in [`ModelSpec::bin_average`].
pub const BIN_NODES: usize = 32;
const MAX_PARAMS: usize = 8;

/// Speed of light in nm·GHz, so ν[GHz] = C_NM_GHZ / λ[nm].
pub const C_NM_GHZ: f64 = 299_792_458.0;

/// Optical frequency (GHz) of a vacuum wavelength (nm).
pub fn wavelength_to_ghz(lambda_nm: f64) -> f64 {
    C_NM_GHZ / lambda_nm
}

/// Cavity line `B / ((λ−λ0)² + (Γ/2)²) + C`, Γ being the FWHM.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lorentzian {
    pub b: f64,
    pub c: f64,
    pub lambda0: f64,
    pub gamma: f64,
}

impl Lorentzian {
    pub fn q_factor(&self) -> f64 {
        self.lambda0 / self.gamma
    }

    fn eval(&self, x: f64) -> f64 {
        let d = x - self.lambda0;
        self.b / (d * d + 0.25 * self.gamma * self.gamma) + self.c
    }

    fn grad(&self, x: f64, out: &mut [f64]) {
        let d = x - self.lambda0;
        let den = d * d + 0.25 * self.gamma * self.gamma;
        out[0] = 1.0 / den;
        out[1] = 1.0;
        out[2] = 2.0 * self.b * d / (den * den);
        out[3] = -0.5 * self.b * self.gamma / (den * den);
    }
}

/// Mirror reflectivities of the parasitic Fabry-Pérot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Mirrors {
    /// Only the product R1·R2 is free; both mirrors take √(R1·R2).
    Product {
        r_prod: f64,
    },
    Split {
        r1: f64,
        r2: f64,
    },
}

impl Mirrors {
    fn count(&self) -> usize {
        match self {
            Mirrors::Product { .. } => 1,
            Mirrors::Split { .. } => 2,
        }
    }
}

/// Airy transmission `A(1−R1)²R2 / ((1−√(R1R2))² + 4√(R1R2) sin²φ)` with
/// φ = π(ν−ν0)/ν_FSR and ν = c/λ taken exactly from the wavelength axis (nm).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Airy {
    pub a: f64,
    pub mirrors: Mirrors,
    pub nu0_ghz: f64,
    pub fsr_ghz: f64,
}

impl Airy {
    pub fn phase(&self, lambda_nm: f64) -> f64 {
        PI * (wavelength_to_ghz(lambda_nm) - self.nu0_ghz) / self.fsr_ghz
    }

    fn parts(&self) -> (f64, f64) {
        match self.mirrors {
            Mirrors::Product { r_prod } => {
                let g = r_prod.sqrt();
                ((1.0 - g) * (1.0 - g) * g, g)
            }
            Mirrors::Split { r1, r2 } => ((1.0 - r1) * (1.0 - r1) * r2, (r1 * r2).sqrt()),
        }
    }

    fn eval(&self, x: f64) -> f64 {
        let (num, g) = self.parts();
        let s = self.phase(x).sin();
        self.a * num / ((1.0 - g) * (1.0 - g) + 4.0 * g * s * s)
    }

    /// Gradient with respect to the free parameters in order
    /// `[a?, reflectivities.., nu0, fsr]`.
    fn grad(&self, x: f64, with_amplitude: bool, out: &mut [f64]) {
        let phi = self.phase(x);
        let sin2 = phi.sin().powi(2);
        let (num, g) = self.parts();
        let den = (1.0 - g) * (1.0 - g) + 4.0 * g * sin2;
        let f = self.a * num / den;
        let mut k = 0;
        if with_amplitude {
            out[k] = num / den;
            k += 1;
        }
        let dden_dg = -2.0 * (1.0 - g) + 4.0 * sin2;
        match self.mirrors {
            Mirrors::Product { r_prod } => {
                let dnum_dg = (1.0 - g) * (1.0 - 3.0 * g);
                let df_dg = self.a * (dnum_dg * den - num * dden_dg) / (den * den);
                out[k] = df_dg * 0.5 / r_prod.sqrt();
                k += 1;
            }
            Mirrors::Split { r1, r2 } => {
                let dnum_dr1 = -2.0 * (1.0 - r1) * r2;
                let dnum_dr2 = (1.0 - r1) * (1.0 - r1);
                let dg_dr1 = r2 / (2.0 * g);
                let dg_dr2 = r1 / (2.0 * g);
                out[k] = self.a * dnum_dr1 / den - f * dden_dg * dg_dr1 / den;
                out[k + 1] = self.a * dnum_dr2 / den - f * dden_dg * dg_dr2 / den;
                k += 2;
            }
        }
        let df_dphi = -f * 4.0 * g * (2.0 * phi).sin() / den;
        out[k] = -df_dphi * PI / self.fsr_ghz;
        out[k + 1] = -df_dphi * phi / self.fsr_ghz;
    }
}

/// Product of a Fabry-Pérot envelope and the cavity Lorentzian. The Airy
/// amplitude is held at its stored value (normally 1) because only its
/// products with B and C are identifiable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AiryLorentzian {
    pub airy: Airy,
    pub lorentz: Lorentzian,
}

/// Lifetime decay `x·exp(−(t−y)/τ) + z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonoExp {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub tau: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Lorentzian,
    Airy,
    AiryLorentzian,
    #[serde(rename = "monoexp")]
    MonoExp,
    #[serde(rename = "g2")]
    G2ThreeLevel,
    Saturation,
}

impl ModelKind {
    pub const ALL: [ModelKind; 6] = [
        ModelKind::Lorentzian,
        ModelKind::Airy,
        ModelKind::AiryLorentzian,
        ModelKind::MonoExp,
        ModelKind::G2ThreeLevel,
        ModelKind::Saturation,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Lorentzian => "lorentzian",
            ModelKind::Airy => "airy",
            ModelKind::AiryLorentzian => "airy_lorentzian",
            ModelKind::MonoExp => "monoexp",
            ModelKind::G2ThreeLevel => "g2",
            ModelKind::Saturation => "saturation",
        }
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| Error::Config(format!("unknown model '{s}'")))
    }
}

/// How a parameter is mapped to an unconstrained coordinate during fitting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Free,
    /// p = exp(u)
    Positive,
    /// p = 1/(1 + exp(−u))
    UnitInterval,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ModelSpec {
    Lorentzian(Lorentzian),
    Airy(Airy),
    AiryLorentzian(AiryLorentzian),
    MonoExp(MonoExp),
    G2ThreeLevel(G2Params),
    Saturation(SaturationParams),
}

impl ModelSpec {
    pub fn kind(&self) -> ModelKind {
        match self {
            ModelSpec::Lorentzian(_) => ModelKind::Lorentzian,
            ModelSpec::Airy(_) => ModelKind::Airy,
            ModelSpec::AiryLorentzian(_) => ModelKind::AiryLorentzian,
            ModelSpec::MonoExp(_) => ModelKind::MonoExp,
            ModelSpec::G2ThreeLevel(_) => ModelKind::G2ThreeLevel,
            ModelSpec::Saturation(_) => ModelKind::Saturation,
        }
    }

    pub fn param_names(&self) -> Vec<&'static str> {
        let mirrors = |m: &Mirrors| match m {
            Mirrors::Product { .. } => vec!["r_prod"],
            Mirrors::Split { .. } => vec!["r1", "r2"],
        };
        match self {
            ModelSpec::Lorentzian(_) => vec!["b", "c", "lambda0", "gamma"],
            ModelSpec::Airy(a) => [vec!["a"], mirrors(&a.mirrors), vec!["nu0", "fsr"]].concat(),
            ModelSpec::AiryLorentzian(m) => {
                [mirrors(&m.airy.mirrors), vec!["nu0", "fsr", "b", "c", "lambda0", "gamma"]].concat()
            }
            ModelSpec::MonoExp(_) => vec!["x", "y", "z", "tau"],
            ModelSpec::G2ThreeLevel(_) => vec!["a", "b", "c", "t_shift", "tau1", "tau2"],
            ModelSpec::Saturation(_) => vec!["i_inf", "p_sat"],
        }
    }

    pub fn n_params(&self) -> usize {
        self.param_names().len()
    }

    pub fn params(&self) -> Vec<f64> {
        let mirrors = |m: &Mirrors| match *m {
            Mirrors::Product { r_prod } => vec![r_prod],
            Mirrors::Split { r1, r2 } => vec![r1, r2],
        };
        match self {
            ModelSpec::Lorentzian(l) => vec![l.b, l.c, l.lambda0, l.gamma],
            ModelSpec::Airy(a) => [vec![a.a], mirrors(&a.mirrors), vec![a.nu0_ghz, a.fsr_ghz]].concat(),
            ModelSpec::AiryLorentzian(m) => {
                let l = &m.lorentz;
                [mirrors(&m.airy.mirrors), vec![m.airy.nu0_ghz, m.airy.fsr_ghz, l.b, l.c, l.lambda0, l.gamma]].concat()
            }
            ModelSpec::MonoExp(m) => vec![m.x, m.y, m.z, m.tau],
            ModelSpec::G2ThreeLevel(g) => vec![g.a, g.b, g.c, g.t_shift, g.tau1, g.tau2],
            ModelSpec::Saturation(s) => vec![s.i_inf, s.p_sat],
        }
    }

    /// Copy with the parameter vector replaced (same layout as [`params`](Self::params)).
    pub fn with_params(&self, p: &[f64]) -> ModelSpec {
        assert_eq!(p.len(), self.n_params(), "parameter vector length");
        let mirrors = |m: &Mirrors, p: &[f64]| match m {
            Mirrors::Product { .. } => Mirrors::Product { r_prod: p[0] },
            Mirrors::Split { .. } => Mirrors::Split { r1: p[0], r2: p[1] },
        };
        match self {
            ModelSpec::Lorentzian(_) => {
                ModelSpec::Lorentzian(Lorentzian { b: p[0], c: p[1], lambda0: p[2], gamma: p[3] })
            }
            ModelSpec::Airy(a) => {
                let k = a.mirrors.count();
                ModelSpec::Airy(Airy {
                    a: p[0],
                    mirrors: mirrors(&a.mirrors, &p[1..]),
                    nu0_ghz: p[1 + k],
                    fsr_ghz: p[2 + k],
                })
            }
            ModelSpec::AiryLorentzian(m) => {
                let k = m.airy.mirrors.count();
                ModelSpec::AiryLorentzian(AiryLorentzian {
                    airy: Airy { a: m.airy.a, mirrors: mirrors(&m.airy.mirrors, p), nu0_ghz: p[k], fsr_ghz: p[k + 1] },
                    lorentz: Lorentzian { b: p[k + 2], c: p[k + 3], lambda0: p[k + 4], gamma: p[k + 5] },
                })
            }
            ModelSpec::MonoExp(_) => ModelSpec::MonoExp(MonoExp { x: p[0], y: p[1], z: p[2], tau: p[3] }),
            ModelSpec::G2ThreeLevel(_) => {
                ModelSpec::G2ThreeLevel(G2Params { a: p[0], b: p[1], c: p[2], t_shift: p[3], tau1: p[4], tau2: p[5] })
            }
            ModelSpec::Saturation(_) => ModelSpec::Saturation(SaturationParams { i_inf: p[0], p_sat: p[1] }),
        }
    }

    pub fn domains(&self) -> Vec<Domain> {
        use Domain::*;
        let mirrors = |m: &Mirrors| vec![UnitInterval; m.count()];
        match self {
            ModelSpec::Lorentzian(_) => vec![Free, Free, Free, Positive],
            ModelSpec::Airy(a) => [vec![Free], mirrors(&a.mirrors), vec![Free, Positive]].concat(),
            ModelSpec::AiryLorentzian(m) => {
                [mirrors(&m.airy.mirrors), vec![Free, Positive, Free, Free, Free, Positive]].concat()
            }
            ModelSpec::MonoExp(_) => vec![Free, Free, Free, Positive],
            ModelSpec::G2ThreeLevel(_) => vec![Positive, Free, Free, Free, Positive, Positive],
            ModelSpec::Saturation(_) => vec![Positive, Positive],
        }
    }

    /// Parameters held fixed unless the caller says otherwise. The decay
    /// offset `y` of the mono-exponential is degenerate with its amplitude.
    pub fn default_fixed(&self) -> &'static [&'static str] {
        match self {
            ModelSpec::MonoExp(_) => &["y"],
            _ => &[],
        }
    }

    /// Characteristic size of each parameter, used to size finite-difference
    /// steps. Location parameters use the width of the feature they locate.
    pub fn scales(&self) -> Vec<f64> {
        let p = self.params();
        let abs_or = |v: f64, floor: f64| v.abs().max(floor);
        match self {
            ModelSpec::Lorentzian(l) => {
                vec![abs_or(l.b, 1e-300), abs_or(l.c, l.b.abs() / (l.gamma * l.gamma)), l.gamma, l.gamma]
            }
            ModelSpec::Airy(a) => {
                let mut s: Vec<f64> = p.iter().map(|v| v.abs()).collect();
                let n = s.len();
                s[n - 2] = a.fsr_ghz;
                s
            }
            ModelSpec::AiryLorentzian(m) => {
                let k = m.airy.mirrors.count();
                let mut s: Vec<f64> = p.iter().map(|v| v.abs()).collect();
                s[k] = m.airy.fsr_ghz;
                let l = &m.lorentz;
                s[k + 3] = abs_or(l.c, l.b.abs() / (l.gamma * l.gamma));
                s[k + 4] = l.gamma;
                s
            }
            ModelSpec::MonoExp(m) => vec![abs_or(m.x, 1e-300), m.tau, abs_or(m.z, m.x.abs()), m.tau],
            ModelSpec::G2ThreeLevel(g) => vec![g.a, abs_or(g.b, 1e-3), abs_or(g.c, 1e-3), g.tau1, g.tau1, g.tau2],
            ModelSpec::Saturation(s) => vec![s.i_inf, s.p_sat],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let domain = |msg: String| Err(Error::Domain(msg));
        let finite = self.params().iter().all(|v| v.is_finite());
        if !finite {
            return domain(format!("{} parameters must be finite", self.kind().name()));
        }
        let check_airy = |a: &Airy| -> Result<()> {
            let unit = |r: f64| r > 0.0 && r < 1.0;
            let ok = match a.mirrors {
                Mirrors::Product { r_prod } => unit(r_prod),
                Mirrors::Split { r1, r2 } => unit(r1) && unit(r2),
            };
            if !ok {
                return domain("mirror reflectivities must lie in (0, 1)".into());
            }
            if a.fsr_ghz <= 0.0 {
                return domain(format!("free spectral range must be positive, got {}", a.fsr_ghz));
            }
            Ok(())
        };
        let check_lorentz = |l: &Lorentzian| {
            if l.gamma > 0.0 {
                Ok(())
            } else {
                domain(format!("Lorentzian width must be positive, got {}", l.gamma))
            }
        };
        match self {
            ModelSpec::Lorentzian(l) => check_lorentz(l),
            ModelSpec::Airy(a) => check_airy(a),
            ModelSpec::AiryLorentzian(m) => {
                check_airy(&m.airy)?;
                check_lorentz(&m.lorentz)
            }
            ModelSpec::MonoExp(m) => {
                if m.tau > 0.0 {
                    Ok(())
                } else {
                    domain(format!("decay time must be positive, got {}", m.tau))
                }
            }
            ModelSpec::G2ThreeLevel(g) => g.validate(),
            ModelSpec::Saturation(s) => s.validate(),
        }
    }

    /// Average of the model over `[x − w/2, x + w/2]` by the composite
    /// midpoint rule, with the averaged gradient written to `grad`.
    pub fn bin_average(&self, x: f64, width: f64, grad: &mut [f64]) -> f64 {
        let n = grad.len();
        let mut acc = [0.0; MAX_PARAMS];
        let mut node = [0.0; MAX_PARAMS];
        let mut value = 0.0;
        let h = width / BIN_NODES as f64;
        for k in 0..BIN_NODES {
            let t = x - 0.5 * width + (k as f64 + 0.5) * h;
            value += self.value(t);
            self.gradient(t, &mut node[..n]);
            acc[..n].iter_mut().zip(&node[..n]).for_each(|(a, g)| *a += g);
        }
        let scale = 1.0 / BIN_NODES as f64;
        grad.iter_mut().zip(&acc[..n]).for_each(|(g, a)| *g = a * scale);
        value * scale
    }

    /// Model value at one abscissa; no validation.
    pub fn value(&self, x: f64) -> f64 {
        match self {
            ModelSpec::Lorentzian(l) => l.eval(x),
            ModelSpec::Airy(a) => a.eval(x),
            ModelSpec::AiryLorentzian(m) => m.airy.eval(x) * m.lorentz.eval(x),
            ModelSpec::MonoExp(m) => m.x * (-(x - m.y) / m.tau).exp() + m.z,
            ModelSpec::G2ThreeLevel(g) => g2_analytic(x, g),
            ModelSpec::Saturation(s) => saturation_intensity(x, s),
        }
    }

    /// Analytic gradient with respect to [`params`](Self::params) at one abscissa.
    pub fn gradient(&self, x: f64, out: &mut [f64]) {
        match self {
            ModelSpec::Lorentzian(l) => l.grad(x, out),
            ModelSpec::Airy(a) => a.grad(x, true, out),
            ModelSpec::AiryLorentzian(m) => {
                let k = m.airy.mirrors.count() + 2;
                let fp = m.airy.eval(x);
                let lz = m.lorentz.eval(x);
                m.airy.grad(x, false, &mut out[..k]);
                m.lorentz.grad(x, &mut out[k..]);
                out[..k].iter_mut().for_each(|v| *v *= lz);
                out[k..].iter_mut().for_each(|v| *v *= fp);
            }
            ModelSpec::MonoExp(m) => {
                let e = (-(x - m.y) / m.tau).exp();
                out[0] = e;
                out[1] = m.x * e / m.tau;
                out[2] = 1.0;
                out[3] = m.x * e * (x - m.y) / (m.tau * m.tau);
            }
            ModelSpec::G2ThreeLevel(g) => {
                let signed = x - g.t_shift;
                let d = signed.abs();
                let e1 = (-d / g.tau1).exp();
                let e2 = (-d / g.tau2).exp();
                let f1 = (-d / g.tau1).exp_m1();
                let f2 = (-d / g.tau2).exp_m1();
                let recovered = -f1 - g.c * (f1 - f2);
                let scale = g.a * (1.0 - g.b);
                let drec_dd = (1.0 + g.c) * e1 / g.tau1 - g.c * e2 / g.tau2;
                out[0] = g.b + (1.0 - g.b) * recovered;
                out[1] = g.a * (1.0 - recovered);
                out[2] = scale * (e2 - e1);
                // the cusp at t = t_shift has no derivative; use the symmetric value 0
                out[3] = if signed == 0.0 { 0.0 } else { -scale * drec_dd * signed.signum() };
                out[4] = -scale * (1.0 + g.c) * e1 * d / (g.tau1 * g.tau1);
                out[5] = scale * g.c * e2 * d / (g.tau2 * g.tau2);
            }
            ModelSpec::Saturation(s) => {
                let den = x + s.p_sat;
                out[0] = x / den;
                out[1] = -s.i_inf * x / (den * den);
            }
        }
    }
}

/// Pointwise evaluation after checking the parameter invariants.
pub fn eval_model(m: &ModelSpec, x: &[f64]) -> Result<Vec<f64>> {
    m.validate()?;
    Ok(x.iter().map(|&xi| m.value(xi)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lorentzian_peak() {
        let l = ModelSpec::Lorentzian(Lorentzian { b: 2.0, c: 0.3, lambda0: 1279.0, gamma: 0.4 });
        assert!((l.value(1279.0) - (2.0 / 0.04 + 0.3)).abs() < 1e-12);
    }

    #[test]
    fn airy_on_resonance() {
        let lambda = 1279.354;
        let airy = Airy {
            a: 1.7,
            mirrors: Mirrors::Split { r1: 0.3, r2: 0.5 },
            nu0_ghz: wavelength_to_ghz(lambda),
            fsr_ghz: 86.0,
        };
        let g = (0.3f64 * 0.5).sqrt();
        let expected = 1.7 * 0.7 * 0.7 * 0.5 / ((1.0 - g) * (1.0 - g));
        assert!((ModelSpec::Airy(airy).value(lambda) - expected).abs() < 1e-12 * expected);
        // one free spectral range away the phase is π
        let next = C_NM_GHZ / (airy.nu0_ghz + airy.fsr_ghz);
        assert!((airy.phase(next) - PI).abs() < 1e-9);
    }

    #[test]
    fn monoexp_at_offset() {
        let m = ModelSpec::MonoExp(MonoExp { x: 120.0, y: 3.5, z: 4.0, tau: 5.55 });
        assert_eq!(m.value(3.5), 124.0);
        let mut g = [0.0; 4];
        for t in [0.0, 3.5, 20.0] {
            m.gradient(t, &mut g);
            assert_eq!(g[2], 1.0);
        }
    }

    #[test]
    fn saturation_gradient_at_half_point() {
        let m = ModelSpec::Saturation(SaturationParams { i_inf: 93.0, p_sat: 28.0 });
        let mut g = [0.0; 2];
        m.gradient(28.0, &mut g);
        assert_eq!(g[0], 0.5);
    }

    #[test]
    fn invariants_enforced() {
        let bad = [
            ModelSpec::Lorentzian(Lorentzian { b: 1.0, c: 0.0, lambda0: 1.0, gamma: 0.0 }),
            ModelSpec::Airy(Airy { a: 1.0, mirrors: Mirrors::Product { r_prod: 1.0 }, nu0_ghz: 1.0, fsr_ghz: 1.0 }),
            ModelSpec::Airy(Airy { a: 1.0, mirrors: Mirrors::Product { r_prod: 0.5 }, nu0_ghz: 1.0, fsr_ghz: -1.0 }),
            ModelSpec::MonoExp(MonoExp { x: 1.0, y: 0.0, z: 0.0, tau: -2.0 }),
            ModelSpec::G2ThreeLevel(G2Params { a: 1.0, b: 0.0, c: 0.1, t_shift: 0.0, tau1: 0.0, tau2: 1.0 }),
            ModelSpec::Saturation(SaturationParams { i_inf: 1.0, p_sat: 0.0 }),
        ];
        for m in bad {
            assert!(matches!(eval_model(&m, &[1.0]), Err(Error::Domain(_))), "{m:?}");
        }
    }

    #[test]
    fn param_roundtrip() {
        let m = ModelSpec::AiryLorentzian(AiryLorentzian {
            airy: Airy { a: 1.0, mirrors: Mirrors::Product { r_prod: 0.01 }, nu0_ghz: 234_000.0, fsr_ghz: 86.0 },
            lorentz: Lorentzian { b: 1.0, c: 0.1, lambda0: 1279.4, gamma: 0.6 },
        });
        assert_eq!(m.with_params(&m.params()), m);
        assert_eq!(m.param_names().len(), m.params().len());
        assert_eq!(m.domains().len(), m.params().len());
        assert_eq!(m.scales().len(), m.params().len());
    }

    #[test]
    fn model_names_parse() {
        for k in ModelKind::ALL {
            assert_eq!(k.name().parse::<ModelKind>().unwrap(), k);
        }
        assert!("gaussian".parse::<ModelKind>().is_err());
    }
}
