use serde::{Deserialize, Serialize};

use super::ScanResult;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    /// Sub-grid centre from a parabola through the maximum and its neighbours.
    pub center: f64,
    pub height: f64,
    pub prominence: f64,
    /// Full width at half prominence, by linear interpolation.
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakSet {
    pub peaks: Vec<Peak>,
}

impl PeakSet {
    pub fn len(&self) -> usize {
        self.peaks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.peaks.is_empty()
    }

    /// Peak whose centre is closest to `x`.
    pub fn nearest(&self, x: f64) -> Option<&Peak> {
        self.peaks
            .iter()
            .min_by(|a, b| (a.center - x).abs().total_cmp(&(b.center - x).abs()))
    }
}

/// Local maxima of `result.mean` whose topographic prominence is at least
/// `min_prominence`, sorted by centre.
pub fn find_peaks(result: &ScanResult, min_prominence: f64) -> Result<PeakSet> {
    let (x, y) = (&result.x, &result.mean);
    let n = y.len();
    if n < 5 {
        return Err(Error::InvalidParameter(format!("peak search needs >= 5 points, got {n}")));
    }
    let mut peaks = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if y[i] <= y[i - 1] {
            i += 1;
            continue;
        }
        // Walk over a plateau.
        let mut j = i;
        while j + 1 < n && y[j + 1] == y[i] {
            j += 1;
        }
        if j + 1 < n && y[j + 1] < y[i] {
            let top = (i + j) / 2;
            let prominence = prominence_at(y, top);
            if prominence >= min_prominence {
                peaks.push(describe(x, y, top, prominence));
            }
        }
        i = j + 1;
    }
    if peaks.is_empty() {
        return Err(Error::NoPeaks(min_prominence));
    }
    Ok(PeakSet { peaks })
}

fn prominence_at(y: &[f64], top: usize) -> f64 {
    let h = y[top];
    let mut left_min = h;
    for k in (0..top).rev() {
        if y[k] > h {
            break;
        }
        left_min = left_min.min(y[k]);
    }
    let mut right_min = h;
    for &v in &y[top + 1..] {
        if v > h {
            break;
        }
        right_min = right_min.min(v);
    }
    h - left_min.max(right_min)
}

fn describe(x: &[f64], y: &[f64], top: usize, prominence: f64) -> Peak {
    let mut center = x[top];
    let mut height = y[top];
    if top > 0 && top + 1 < y.len() {
        let (a, b, c) = (y[top - 1], y[top], y[top + 1]);
        let denom = a - 2.0 * b + c;
        if denom < 0.0 {
            let step = 0.5 * (x[top + 1] - x[top - 1]);
            let shift = 0.5 * (a - c) / denom;
            center = x[top] + shift * step;
            height = b - 0.25 * (a - c) * shift;
        }
    }
    let level = y[top] - 0.5 * prominence;
    let mut left = x[0];
    for k in (0..top).rev() {
        if y[k] <= level {
            left = x[k] + (level - y[k]) / (y[k + 1] - y[k]) * (x[k + 1] - x[k]);
            break;
        }
    }
    let mut right = x[x.len() - 1];
    for k in top + 1..y.len() {
        if y[k] <= level {
            right = x[k - 1] + (y[k - 1] - level) / (y[k - 1] - y[k]) * (x[k] - x[k - 1]);
            break;
        }
    }
    Peak {
        center,
        height,
        prominence,
        width: right - left,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::ScanVariable;

    fn result(x: Vec<f64>, y: Vec<f64>) -> ScanResult {
        let n = x.len();
        ScanResult::new(ScanVariable::T, x, y, vec![0.0; n])
    }

    #[test]
    fn single_gaussian() {
        let x: Vec<f64> = (0..101).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = x.iter().map(|v| (-(v - 4.23_f64).powi(2) / 2.0).exp()).collect();
        let p = find_peaks(&result(x, y), 0.1).unwrap();
        assert_eq!(p.len(), 1);
        assert!((p.peaks[0].center - 4.23).abs() < 0.05);
        let fwhm = 2.0 * (2.0 * 2.0_f64.ln()).sqrt();
        assert!((p.peaks[0].width - fwhm).abs() < 0.01);
    }

    #[test]
    fn flat_has_no_peaks() {
        let x: Vec<f64> = (0..20).map(f64::from).collect();
        assert!(matches!(find_peaks(&result(x, vec![0.3; 20]), 0.01), Err(Error::NoPeaks(_))));
    }

    #[test]
    fn small_bumps_are_filtered() {
        let x: Vec<f64> = (0..200).map(|i| i as f64 * 0.05).collect();
        let y: Vec<f64> = x
            .iter()
            .map(|v| (-(v - 3.0_f64).powi(2) * 4.0).exp() + 0.5 * (-(v - 7.0_f64).powi(2)).exp() + 0.001 * (20.0 * v).sin())
            .collect();
        let p = find_peaks(&result(x, y), 0.05).unwrap();
        assert_eq!(p.len(), 2);
        assert!(p.peaks[0].width < p.peaks[1].width);
    }

    #[test]
    fn scaling_keeps_centres() {
        let x: Vec<f64> = (0..60).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|v| (v / 7.0).sin().powi(2)).collect();
        let r = result(x, y);
        let a = find_peaks(&r, 0.1).unwrap();
        let b = find_peaks(&r.scaled(3.7), 0.37).unwrap();
        assert_eq!(a.len(), b.len());
        for (p, q) in a.peaks.iter().zip(&b.peaks) {
            assert!((p.center - q.center).abs() < 1e-12);
        }
    }
}
