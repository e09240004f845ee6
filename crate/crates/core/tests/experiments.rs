use std::f64::consts::TAU;

use raman_lmt::ensemble::{PulseEngine, Sampling};
use raman_lmt::experiments::{
    find_peaks, fit_fringe_model, lmt_scan_t0, raman_spectrum, FitModel, ScanResult, ScanSpec, ScanVariable, Scenario,
};
use raman_lmt::Channel;

fn spectrum_scan() -> ScanSpec {
    ScanSpec::new(ScanVariable::OmegaModOffset, -TAU * 800e3, TAU * 800e3, 161).unwrap()
}

#[test]
fn copropagating_channel_makes_the_central_peak() {
    let mut scn = Scenario::paper_default();
    scn.ensemble.sampling = Sampling::GaussHermite { order: 20 };
    let full = raman_spectrum(&scn, &spectrum_scan()).unwrap();
    assert_eq!(find_peaks(&full, 0.2).unwrap().len(), 3);

    scn.pulse.channels = scn.pulse.channels.with_enabled(Channel::Co, false).unwrap();
    let sides = raman_spectrum(&scn, &spectrum_scan()).unwrap();
    let peaks = find_peaks(&sides, 0.2).unwrap();
    assert_eq!(peaks.len(), 2);
    assert!(peaks.nearest(0.0).unwrap().center.abs() > TAU * 400e3);
}

#[test]
fn scan_csv_round_trips() {
    let mut scn = Scenario::paper_default();
    scn.ensemble.sampling = Sampling::GaussHermite { order: 10 };
    let r = raman_spectrum(&scn, &ScanSpec::new(ScanVariable::OmegaModOffset, 0.0, TAU * 600e3, 7).unwrap()).unwrap();
    assert_eq!(ScanResult::from_csv(&r.to_csv()).unwrap(), r);
}

#[test]
fn ideal_lmt_has_only_the_second_harmonic() {
    let mut scn = Scenario::paper_default();
    scn.engine = PulseEngine::IdealBeamSplitter;
    scn.ensemble.temperature = 0.0;
    let r = lmt_scan_t0(&scn, &ScanSpec::new(ScanVariable::T0, 20e-6, 370e-6, 36).unwrap()).unwrap();
    let f1 = scn.species.k_eff * scn.ensemble.g * scn.half_duration;
    let fit = fit_fringe_model(&r, FitModel::DualCos { f1: Some(f1) }).unwrap();
    assert!(fit.c1 < 1e-9 * fit.c2);
    assert!((fit.c2 - 0.5).abs() < 1e-9);
}

#[test]
fn lmt_scan_rejects_order_zero() {
    let mut scn = Scenario::paper_default();
    scn.lmt_order = 0;
    assert!(lmt_scan_t0(&scn, &ScanSpec::new(ScanVariable::T0, 20e-6, 40e-6, 3).unwrap()).is_err());
}
