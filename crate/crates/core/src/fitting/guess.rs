//! Heuristic starting points for each model.

use super::models::{wavelength_to_ghz, Airy, AiryLorentzian, Lorentzian, Mirrors, ModelKind, ModelSpec, MonoExp};
use super::{fit, CurveData, FitOptions};
use crate::error::{Error, Result};
use crate::photophysics::{G2Params, SaturationParams};

/// Builds a starting point for `kind` from the data alone.
pub fn initial_guess(kind: ModelKind, data: &CurveData) -> Result<ModelSpec> {
    if data.len() < 3 {
        return Err(Error::Guess(format!("{} samples are too few", data.len())));
    }
    let (x, y) = sorted(data);
    let (lo, hi) = min_max(&y);
    if !(hi > lo) {
        return Err(Error::Guess("data are flat".into()));
    }
    match kind {
        ModelKind::Lorentzian => Ok(ModelSpec::Lorentzian(lorentzian(&x, &y)?)),
        ModelKind::Airy => Ok(ModelSpec::Airy(airy(&x, &y)?)),
        ModelKind::AiryLorentzian => airy_lorentzian(data, &x, &y),
        ModelKind::MonoExp => monoexp(&x, &y),
        ModelKind::G2ThreeLevel => g2(&x, &y),
        ModelKind::Saturation => saturation(&x, &y),
    }
}

fn sorted(data: &CurveData) -> (Vec<f64>, Vec<f64>) {
    let mut idx: Vec<usize> = (0..data.len()).collect();
    idx.sort_by(|&a, &b| data.x[a].total_cmp(&data.x[b]));
    (idx.iter().map(|&i| data.x[i]).collect(), idx.iter().map(|&i| data.y[i]).collect())
}

fn min_max(v: &[f64]) -> (f64, f64) {
    v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

fn argmax(v: &[f64]) -> usize {
    (0..v.len()).max_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap_or(0)
}

fn argmin(v: &[f64]) -> usize {
    (0..v.len()).min_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap_or(0)
}

/// Median of the outer tenth on each side.
fn edge_median(y: &[f64]) -> f64 {
    let k = (y.len() / 10).max(1);
    let edges: Vec<f64> = y[..k].iter().chain(&y[y.len() - k..]).copied().collect();
    median(&edges)
}

fn moving_average(y: &[f64], half: usize) -> Vec<f64> {
    (0..y.len())
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(y.len());
            y[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
        })
        .collect()
}

/// Abscissa where `level(i)` first drops below `threshold` walking away from
/// `start` in direction `step`, linearly interpolated.
fn crossing(x: &[f64], level: &[f64], start: usize, threshold: f64, forward: bool) -> Option<f64> {
    let mut i = start;
    loop {
        let next = if forward {
            if i + 1 >= x.len() {
                return None;
            }
            i + 1
        } else {
            if i == 0 {
                return None;
            }
            i - 1
        };
        if level[next] < threshold {
            let frac = (level[i] - threshold) / (level[i] - level[next]);
            return Some(x[i] + frac * (x[next] - x[i]));
        }
        i = next;
    }
}

fn lorentzian(x: &[f64], y: &[f64]) -> Result<Lorentzian> {
    let c = edge_median(y);
    let (lo, hi) = min_max(y);
    let peak = if hi - c >= c - lo { argmax(y) } else { argmin(y) };
    let height = y[peak] - c;
    if height == 0.0 {
        return Err(Error::Guess("no peak above the baseline".into()));
    }
    let level: Vec<f64> = y.iter().map(|v| (v - c) / height).collect();
    let left = crossing(x, &level, peak, 0.5, false);
    let right = crossing(x, &level, peak, 0.5, true);
    let center = x[peak];
    let width = match (left, right) {
        (Some(l), Some(r)) => r - l,
        (Some(l), None) => 2.0 * (center - l),
        (None, Some(r)) => 2.0 * (r - center),
        (None, None) => 0.5 * (x[x.len() - 1] - x[0]),
    };
    if !(width > 0.0) {
        return Err(Error::Guess("cannot estimate the line width".into()));
    }
    Ok(Lorentzian { b: height * 0.25 * width * width, c, lambda0: center, gamma: width })
}

/// Free spectral range from the first autocorrelation maximum of the
/// oscillation, resampled on a uniform frequency grid.
fn oscillation_period(nu: &[f64], y: &[f64]) -> Option<f64> {
    let n = nu.len();
    let (lo, hi) = min_max(nu);
    let step = (hi - lo) / (n - 1) as f64;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| nu[a].total_cmp(&nu[b]));
    let nus: Vec<f64> = order.iter().map(|&i| nu[i]).collect();
    let ys: Vec<f64> = order.iter().map(|&i| y[i]).collect();
    let mut uniform = Vec::with_capacity(n);
    let mut k = 0;
    for i in 0..n {
        let f = lo + step * i as f64;
        while k + 2 < n && nus[k + 1] < f {
            k += 1;
        }
        let t = ((f - nus[k]) / (nus[k + 1] - nus[k])).clamp(0.0, 1.0);
        uniform.push(ys[k] + t * (ys[k + 1] - ys[k]));
    }
    // remove a linear trend
    let mean_i = (n - 1) as f64 / 2.0;
    let mean_y = uniform.iter().sum::<f64>() / n as f64;
    let sxx: f64 = (0..n).map(|i| (i as f64 - mean_i).powi(2)).sum();
    let sxy: f64 = (0..n).map(|i| (i as f64 - mean_i) * (uniform[i] - mean_y)).sum();
    let slope = sxy / sxx;
    let res: Vec<f64> = (0..n).map(|i| uniform[i] - mean_y - slope * (i as f64 - mean_i)).collect();

    let acf: Vec<f64> =
        (0..n / 2).map(|lag| (0..n - lag).map(|i| res[i] * res[i + lag]).sum::<f64>() / (n - lag) as f64).collect();
    let first_negative = acf.iter().position(|&v| v < 0.0)?;
    let lag = (first_negative..acf.len().saturating_sub(1)).find(|&l| acf[l] >= acf[l - 1] && acf[l] >= acf[l + 1])?;
    // parabolic refinement of the peak position
    let (a, b, c) = (acf[lag - 1], acf[lag], acf[lag + 1]);
    let den = a - 2.0 * b + c;
    let shift = if den != 0.0 { 0.5 * (a - c) / den } else { 0.0 };
    Some((lag as f64 + shift) * step)
}

fn airy(x: &[f64], y: &[f64]) -> Result<Airy> {
    let nu: Vec<f64> = x.iter().map(|&l| wavelength_to_ghz(l)).collect();
    let fsr = oscillation_period(&nu, y).ok_or_else(|| Error::Guess("no periodic oscillation found".into()))?;
    let (lo, hi) = min_max(y);
    if !(lo > 0.0) {
        return Err(Error::Guess("Airy guess needs positive data".into()));
    }
    let contrast = (hi / lo).sqrt();
    let g = ((contrast - 1.0) / (contrast + 1.0)).clamp(1e-3, 0.95);
    Ok(Airy { a: hi / g, mirrors: Mirrors::Product { r_prod: g * g }, nu0_ghz: nu[argmax(y)], fsr_ghz: fsr })
}

fn airy_lorentzian(data: &CurveData, x: &[f64], y: &[f64]) -> Result<ModelSpec> {
    let rough = lorentzian(x, y)?;
    let lorentz = match fit(&ModelSpec::Lorentzian(rough), data, &FitOptions::default()) {
        Ok(r) if r.converged => match r.model {
            ModelSpec::Lorentzian(l) => l,
            _ => rough,
        },
        _ => rough,
    };
    let envelope: Vec<f64> = x.iter().map(|&v| ModelSpec::Lorentzian(lorentz).value(v)).collect();
    if envelope.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::Guess("Lorentzian envelope must stay positive".into()));
    }
    let ratio: Vec<f64> = y.iter().zip(&envelope).map(|(v, e)| v / e).collect();
    let fp = airy(x, &ratio)?;
    let airy = Airy { a: 1.0, ..fp };
    Ok(ModelSpec::AiryLorentzian(AiryLorentzian {
        airy,
        lorentz: Lorentzian { b: lorentz.b * fp.a, c: lorentz.c * fp.a, ..lorentz },
    }))
}

fn monoexp(x: &[f64], y: &[f64]) -> Result<ModelSpec> {
    let peak = argmax(y);
    let k = (y.len() / 10).max(1);
    let z = median(&y[y.len() - k..]);
    let amp = y[peak] - z;
    if !(amp > 0.0) {
        return Err(Error::Guess("decay does not rise above its tail".into()));
    }
    // log-linear regression over the first decade of the decay
    let pts: Vec<(f64, f64)> = (peak..y.len())
        .map(|i| (x[i], y[i] - z))
        .take_while(|&(_, v)| v >= 0.1 * amp)
        .map(|(t, v)| (t, v.ln()))
        .collect();
    let tau = if pts.len() >= 2 {
        let n = pts.len() as f64;
        let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let ml = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let stt: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
        let stl: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - ml)).sum();
        -stt / stl
    } else {
        f64::NAN
    };
    let tau = if tau.is_finite() && tau > 0.0 { tau } else { (x[x.len() - 1] - x[peak]) / 5.0 };
    if !(tau > 0.0) {
        return Err(Error::Guess("cannot estimate the decay time".into()));
    }
    Ok(ModelSpec::MonoExp(MonoExp { x: amp, y: x[peak], z, tau }))
}

fn g2(x: &[f64], y: &[f64]) -> Result<ModelSpec> {
    let smooth = moving_average(y, 2);
    let dip = argmin(&smooth);
    let t_shift = x[dip];
    let reach = (x[x.len() - 1] - t_shift).abs().max((t_shift - x[0]).abs());
    let tail: Vec<f64> = (0..x.len()).filter(|&i| (x[i] - t_shift).abs() >= 0.8 * reach).map(|i| y[i]).collect();
    let a = if tail.is_empty() { edge_median(y) } else { median(&tail) };
    if !(a > 0.0) {
        return Err(Error::Guess("g2 baseline must be positive".into()));
    }
    let b = (smooth[dip] / a).clamp(0.0, 0.9);
    let half = 0.5 * (1.0 + b);
    // level(i) drops below zero once the curve recovers past the half level
    let level: Vec<f64> = smooth.iter().map(|v| half - v / a).collect();
    let mut widths = Vec::new();
    if let Some(r) = crossing(x, &level, dip, 0.0, true) {
        widths.push(r - t_shift);
    }
    if let Some(l) = crossing(x, &level, dip, 0.0, false) {
        widths.push(t_shift - l);
    }
    let width = if widths.is_empty() { 0.05 * reach } else { widths.iter().sum::<f64>() / widths.len() as f64 };
    let tau1 = (width / std::f64::consts::LN_2).max(1e-6);
    let bunching = (smooth.iter().cloned().fold(f64::NEG_INFINITY, f64::max) / a - 1.0).max(0.0);
    Ok(ModelSpec::G2ThreeLevel(G2Params { a, b, c: 0.05 + 2.0 * bunching, t_shift, tau1, tau2: 3.0 * tau1 }))
}

fn saturation(x: &[f64], y: &[f64]) -> Result<ModelSpec> {
    let peak = argmax(y);
    let i_inf = y[peak];
    if !(i_inf > 0.0) {
        return Err(Error::Guess("saturation curve must be positive".into()));
    }
    let half = 0.5 * i_inf;
    let p_sat = match (0..x.len()).find(|&i| y[i] >= half) {
        Some(0) | None => x[0].max(x[x.len() - 1] * 1e-3),
        Some(i) => {
            let frac = (half - y[i - 1]) / (y[i] - y[i - 1]);
            x[i - 1] + frac * (x[i] - x[i - 1])
        }
    };
    if !(p_sat > 0.0) {
        return Err(Error::Guess("cannot locate the half-saturation power".into()));
    }
    Ok(ModelSpec::Saturation(SaturationParams { i_inf, p_sat }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    }

    fn synth(m: &ModelSpec, x: Vec<f64>) -> CurveData {
        let y = x.iter().map(|&v| m.value(v)).collect();
        CurveData::new(x, y, None).unwrap()
    }

    #[test]
    fn lorentzian_center_within_one_sample() {
        let truth = Lorentzian { b: 0.05, c: 0.1, lambda0: 1279.7531, gamma: 0.34 };
        let x = grid(1278.0, 1281.5, 351);
        let dx = x[1] - x[0];
        let ModelSpec::Lorentzian(g) =
            initial_guess(ModelKind::Lorentzian, &synth(&ModelSpec::Lorentzian(truth), x)).unwrap()
        else {
            panic!()
        };
        assert!((g.lambda0 - truth.lambda0).abs() <= dx);
        assert!((g.gamma / truth.gamma - 1.0).abs() < 0.1);
    }

    #[test]
    fn monoexp_tau_within_ten_percent() {
        let truth = MonoExp { x: 1000.0, y: 2.0, z: 5.0, tau: 5.55 };
        let ModelSpec::MonoExp(g) =
            initial_guess(ModelKind::MonoExp, &synth(&ModelSpec::MonoExp(truth), grid(2.0, 25.0, 300))).unwrap()
        else {
            panic!()
        };
        assert!((g.tau / truth.tau - 1.0).abs() < 0.1, "{}", g.tau);
    }

    #[test]
    fn constant_data_rejected() {
        let data = CurveData::new(grid(0.0, 1.0, 20), vec![3.0; 20], None).unwrap();
        for kind in ModelKind::ALL {
            assert!(matches!(initial_guess(kind, &data), Err(Error::Guess(_))), "{kind:?}");
        }
    }

    #[test]
    fn airy_period_from_autocorrelation() {
        let truth = Airy { a: 2.0, mirrors: Mirrors::Product { r_prod: 0.04 }, nu0_ghz: 234_330.0, fsr_ghz: 86.0 };
        let g = airy(&grid(1277.0, 1281.0, 800), &synth(&ModelSpec::Airy(truth), grid(1277.0, 1281.0, 800)).y).unwrap();
        assert!((g.fsr_ghz / truth.fsr_ghz - 1.0).abs() < 0.03, "{}", g.fsr_ghz);
    }

    #[test]
    fn saturation_half_point() {
        let truth = SaturationParams { i_inf: 93.0, p_sat: 28.0 };
        let ModelSpec::Saturation(g) =
            initial_guess(ModelKind::Saturation, &synth(&ModelSpec::Saturation(truth), grid(0.0, 300.0, 40))).unwrap()
        else {
            panic!()
        };
        assert!(g.i_inf > 0.8 * truth.i_inf && g.p_sat > 0.0);
    }
}
