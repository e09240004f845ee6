use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::ScanResult;
use crate::error::{Error, Result};

/// Basis frequency `None` means fitted (free-frequency mode).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FitModel {
    /// c0 + c1 cos(f x - phi1)
    SingleCos { f: Option<f64> },
    /// c0 + c1 cos(f1 x - phi1) + c2 cos(2 f1 x - phi2)
    DualCos { f1: Option<f64> },
}

impl FitModel {
    fn name(self) -> &'static str {
        match self {
            FitModel::SingleCos { .. } => "single_cos",
            FitModel::DualCos { .. } => "dual_cos",
        }
    }

    fn harmonics(self) -> usize {
        match self {
            FitModel::SingleCos { .. } => 1,
            FitModel::DualCos { .. } => 2,
        }
    }

    fn frequency(self) -> Option<f64> {
        match self {
            FitModel::SingleCos { f } => f,
            FitModel::DualCos { f1 } => f1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CosineFit {
    pub model: FitModel,
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    /// Angular frequencies in units of the scan variable (rad per unit x).
    pub f1: f64,
    pub f2: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub residual_rms: f64,
    pub points: usize,
}

impl CosineFit {
    pub fn ratio_c2_c1(&self) -> f64 {
        self.c2 / self.c1
    }

    /// Flat `key = value` report.
    pub fn to_report(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "model = {}", self.model.name());
        let _ = writeln!(
            out,
            "frequency_mode = {}",
            if self.model.frequency().is_some() { "fixed" } else { "fitted" }
        );
        for (k, v) in [
            ("c0", self.c0),
            ("c1", self.c1),
            ("c2", self.c2),
            ("c2_over_c1", self.ratio_c2_c1()),
            ("f1", self.f1),
            ("f2", self.f2),
            ("phi1", self.phi1),
            ("phi2", self.phi2),
            ("residual_rms", self.residual_rms),
        ] {
            let _ = writeln!(out, "{k} = {v:e}");
        }
        let _ = writeln!(out, "points = {}", self.points);
        out
    }
}

struct Linear {
    coeffs: Vec<f64>,
    residual_rms: f64,
}

fn linear_fit(x: &[f64], y: &[f64], f: f64, harmonics: usize) -> Result<Linear> {
    let n = x.len();
    let p = 1 + 2 * harmonics;
    let a = DMatrix::from_fn(n, p, |i, j| match j {
        0 => 1.0,
        _ => {
            let h = ((j + 1) / 2) as f64;
            if j % 2 == 1 { (h * f * x[i]).cos() } else { (h * f * x[i]).sin() }
        }
    });
    // Column scaling keeps the conditioning test meaningful.
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > 1e-9 * smax) {
        return Err(Error::SingularFit(format!(
            "basis at f = {f:e} is degenerate on this grid (singular values {smin:e} / {smax:e})"
        )));
    }
    let b = DVector::from_column_slice(y);
    let coeffs = svd
        .solve(&b, 0.0)
        .map_err(|e| Error::SingularFit(e.to_string()))?;
    let r = &a * &coeffs - &b;
    Ok(Linear {
        coeffs: coeffs.iter().copied().collect(),
        residual_rms: (r.norm_squared() / n as f64).sqrt(),
    })
}

/// Best basis frequency by a dense scan of the residual then golden-section
/// refinement. Searches between half a cycle over the span and the grid's
/// Nyquist frequency (divided by the number of harmonics).
fn fit_frequency(x: &[f64], y: &[f64], harmonics: usize) -> Result<f64> {
    let span = x[x.len() - 1] - x[0];
    let step = span / (x.len() - 1) as f64;
    let lo = std::f64::consts::PI / span;
    let hi = 0.95 * std::f64::consts::PI / step / harmonics as f64;
    let cost = |f: f64| linear_fit(x, y, f, harmonics).map(|l| l.residual_rms).unwrap_or(f64::INFINITY);
    let samples = 8 * x.len().max(64);
    let df = (hi - lo) / samples as f64;
    let (mut best, mut best_cost) = (lo, f64::INFINITY);
    for i in 0..=samples {
        let f = lo + df * i as f64;
        let c = cost(f);
        if c < best_cost {
            best = f;
            best_cost = c;
        }
    }
    if !best_cost.is_finite() {
        return Err(Error::SingularFit("no usable frequency in the search range".into()));
    }
    let (mut a, mut b) = ((best - df).max(lo), (best + df).min(hi));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut c, mut d) = (b - g * (b - a), a + g * (b - a));
    let (mut fc, mut fd) = (cost(c), cost(d));
    for _ in 0..100 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = cost(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = cost(d);
        }
        if b - a < 1e-13 * b.abs() {
            break;
        }
    }
    Ok(0.5 * (a + b))
}

/// Linear least squares on {1, cos(f x), sin(f x)[, cos(2 f x), sin(2 f x)]}.
pub fn fit_fringe_model(result: &ScanResult, model: FitModel) -> Result<CosineFit> {
    let h = model.harmonics();
    let params = 1 + 2 * h + usize::from(model.frequency().is_none());
    if result.len() < params + 3 {
        return Err(Error::InvalidParameter(format!(
            "{} fit needs >= {} points, got {}",
            model.name(),
            params + 3,
            result.len()
        )));
    }
    let (x, y) = (&result.x, &result.mean);
    let f = match model.frequency() {
        Some(f) if f.is_finite() && f > 0.0 => f,
        Some(f) => return Err(Error::InvalidParameter(format!("fit frequency must be > 0, got {f}"))),
        None => fit_frequency(x, y, h)?,
    };
    let lin = linear_fit(x, y, f, h)?;
    let amp = |j: usize| lin.coeffs[j].hypot(lin.coeffs[j + 1]);
    let phase = |j: usize| lin.coeffs[j + 1].atan2(lin.coeffs[j]);
    Ok(CosineFit {
        model,
        c0: lin.coeffs[0],
        c1: amp(1),
        phi1: phase(1),
        c2: if h == 2 { amp(3) } else { 0.0 },
        phi2: if h == 2 { phase(3) } else { 0.0 },
        f1: f,
        f2: if h == 2 { 2.0 * f } else { 0.0 },
        residual_rms: lin.residual_rms,
        points: result.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticPhaseFit {
    /// Curvature of phi(T) = k T^2 + b T + c, rad/s^2.
    pub k: f64,
    pub b: f64,
    pub c: f64,
    pub residual_rms: f64,
    /// residual_rms / rms(phi).
    pub relative_residual: f64,
}

/// Least-squares phi(T) = k T^2 + b T + c; the linear and constant terms
/// absorb finite-pulse-duration corrections.
pub fn fit_quadratic_phase(t: &[f64], phi: &[f64]) -> Result<QuadraticPhaseFit> {
    if t.len() != phi.len() || t.len() < 6 {
        return Err(Error::InvalidParameter("quadratic phase fit needs >= 6 matched points".into()));
    }
    let scale = t.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let a = DMatrix::from_fn(t.len(), 3, |i, j| (t[i] / scale).powi(2 - j as i32));
    let b = DVector::from_column_slice(phi);
    let svd = a.clone().svd(true, true);
    if !(svd.singular_values.min() > 1e-12 * svd.singular_values.max()) {
        return Err(Error::SingularFit("degenerate T grid".into()));
    }
    let coef = svd.solve(&b, 0.0).map_err(|e| Error::SingularFit(e.to_string()))?;
    let r = &a * &coef - &b;
    let residual_rms = (r.norm_squared() / t.len() as f64).sqrt();
    let rms = (b.norm_squared() / t.len() as f64).sqrt();
    Ok(QuadraticPhaseFit {
        k: coef[0] / (scale * scale),
        b: coef[1] / scale,
        c: coef[2],
        residual_rms,
        relative_residual: residual_rms / rms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::ScanVariable;

    fn synthetic(f1: f64, n: usize, g: impl Fn(f64) -> f64) -> ScanResult {
        let x: Vec<f64> = (0..n).map(|i| 20e-6 + 350e-6 * i as f64 / (n - 1) as f64).collect();
        let y = x.iter().map(|&v| g(v)).collect();
        let _ = f1;
        ScanResult::new(ScanVariable::T0, x, y, vec![0.0; n])
    }

    const F1: f64 = 63_120.0;

    #[test]
    fn recovers_dual_cosine() {
        let r = synthetic(F1, 141, |x| 0.5 + 0.2 * (F1 * x).cos() + 0.088 * (2.0 * F1 * x).cos());
        let fit = fit_fringe_model(&r, FitModel::DualCos { f1: Some(F1) }).unwrap();
        assert!((fit.ratio_c2_c1() - 0.44).abs() < 1e-6);
        assert!((fit.c0 - 0.5).abs() < 1e-12);
        assert!(fit.residual_rms < 1e-12);
        assert_eq!(fit.f2, 2.0 * fit.f1);
    }

    #[test]
    fn free_frequency_finds_f1() {
        let r = synthetic(F1, 141, |x| 0.5 + 0.2 * (F1 * x - 0.3).cos() + 0.088 * (2.0 * F1 * x + 1.0).cos());
        let fit = fit_fringe_model(&r, FitModel::DualCos { f1: None }).unwrap();
        assert!((fit.f1 / F1 - 1.0).abs() < 1e-6, "{}", fit.f1);
        assert!((fit.phi1 - 0.3).abs() < 1e-5);
    }

    #[test]
    fn constant_input() {
        let r = synthetic(F1, 50, |_| 0.37);
        let fit = fit_fringe_model(&r, FitModel::DualCos { f1: Some(F1) }).unwrap();
        assert!((fit.c0 - 0.37).abs() < 1e-12);
        assert!(fit.c1 < 1e-12 && fit.c2 < 1e-12);
    }

    #[test]
    fn aliased_grid_is_singular() {
        let period = 10e-6;
        let x: Vec<f64> = (0..30).map(|i| i as f64 * period).collect();
        let r = ScanResult::new(ScanVariable::T0, x, vec![0.5; 30], vec![0.0; 30]);
        let f = std::f64::consts::TAU / period;
        assert!(matches!(
            fit_fringe_model(&r, FitModel::SingleCos { f: Some(f) }),
            Err(Error::SingularFit(_))
        ));
    }

    #[test]
    fn noise_scales_as_inverse_sqrt_points() {
        // Mean absolute c1 error over seeds, for two grid sizes.
        let err = |n: usize| {
            let clean = synthetic(F1, n, |x| 0.5 + 0.2 * (F1 * x).cos());
            let mut acc = 0.0;
            for seed in 0..100 {
                let noisy = clean.with_noise(0.01, seed).unwrap();
                let fit = fit_fringe_model(&noisy, FitModel::DualCos { f1: Some(F1) }).unwrap();
                acc += (fit.c0 - 0.5).powi(2);
            }
            (acc / 100.0).sqrt()
        };
        let (e1, e4) = (err(100), err(400));
        // Expected sigma / sqrt(n) each, ratio 2.
        assert!((e1 / (0.01 / 10.0) - 1.0).abs() < 0.25, "{e1}");
        assert!((e1 / e4 - 2.0).abs() < 0.5, "{e1} {e4}");
    }

    #[test]
    fn scale_invariance_of_ratio() {
        let r = synthetic(F1, 80, |x| 0.4 + 0.1 * (F1 * x).cos() + 0.03 * (2.0 * F1 * x + 0.5).cos());
        let a = fit_fringe_model(&r, FitModel::DualCos { f1: Some(F1) }).unwrap();
        let b = fit_fringe_model(&r.scaled(2.5), FitModel::DualCos { f1: Some(F1) }).unwrap();
        assert!((a.ratio_c2_c1() - b.ratio_c2_c1()).abs() < 1e-12);
    }

    #[test]
    fn quadratic_phase() {
        let t: Vec<f64> = (0..200).map(|i| 1e-4 + 9e-4 * i as f64 / 199.0).collect();
        let k = 1.578e8;
        let phi: Vec<f64> = t.iter().map(|x| k * x * x + 3e3 * x - 0.2).collect();
        let fit = fit_quadratic_phase(&t, &phi).unwrap();
        assert!((fit.k / k - 1.0).abs() < 1e-10);
        assert!(fit.relative_residual < 1e-12);
    }
}
