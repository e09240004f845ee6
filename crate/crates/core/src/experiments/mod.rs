//! Scan drivers for the three experiments (Raman spectrum, fringe versus T,
//! LMT T0 scan), with peak finding and the cosine-model fit.

mod fit;
mod peaks;
mod result;

pub use fit::{fit_fringe_model, fit_quadratic_phase, CosineFit, FitModel, QuadraticPhaseFit};
pub use peaks::{find_peaks, Peak, PeakSet};
pub use result::{ScanResult, ScanVariable};

use serde::{Deserialize, Serialize};

use crate::ensemble::{run_ensemble_with, EnsembleResult, EnsembleSpec, PulseEngine, RunOptions, Sampling};
use crate::error::{Error, Result};
use crate::physics::{AtomSpecies, Channel, KinematicState};
use crate::propagator::PulseSpec;
use crate::schedule::FrequencySchedule;
use crate::sequencer::{make_lmt_sequence, make_mzi_sequence, ChirpSpec, Element, PulseParams, Sequence};

/// Every physical and numerical parameter of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub species: AtomSpecies,
    pub pulse: PulseParams,
    pub ensemble: EnsembleSpec,
    /// T, s.
    pub half_duration: f64,
    /// T0, s.
    pub lmt_interval: f64,
    pub lmt_order: usize,
    pub chirp: ChirpSpec,
    pub engine: PulseEngine,
    /// Ladder half-width override.
    pub half_width: Option<usize>,
}

impl Scenario {
    /// Rb-85 after a 20 ms fall, 14 uK cloud, 10 us pi pulses, T = 400 us,
    /// first-order LMT with T0 = 100 us.
    pub fn paper_default() -> Self {
        let pulse = PulseParams::with_pi_duration(10e-6).expect("positive duration");
        Self {
            species: AtomSpecies::rb85(),
            pulse,
            ensemble: EnsembleSpec::from_fall_time(14e-6, 9.81, 20e-3, Sampling::Auto).expect("valid defaults"),
            half_duration: 400e-6,
            lmt_interval: 100e-6,
            lmt_order: 1,
            chirp: ChirpSpec::NONE,
            engine: PulseEngine::default(),
            half_width: None,
        }
    }

    pub fn kinematics(&self) -> KinematicState {
        KinematicState::new(self.ensemble.v0_bias, self.ensemble.g)
    }

    pub fn run_options(&self) -> RunOptions {
        RunOptions {
            engine: self.engine,
            half_width: self.half_width,
            ..RunOptions::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.species.validate()?;
        self.pulse.validate()?;
        self.ensemble.validate()
    }

    pub fn mzi_sequence(&self, half_duration: f64, chirp: &ChirpSpec) -> Result<Sequence> {
        make_mzi_sequence(&self.species, &self.kinematics(), &self.pulse, half_duration, chirp)
    }

    pub fn lmt_sequence(&self, lmt_interval: f64) -> Result<Sequence> {
        make_lmt_sequence(
            &self.species,
            &self.kinematics(),
            &self.pulse,
            self.half_duration,
            lmt_interval,
            self.lmt_order,
            &self.chirp,
        )
    }

    /// Single pi pulse, all configured channels, at a fixed modulation offset.
    pub fn probe_sequence(&self, offset: f64) -> Result<Sequence> {
        let pulse = PulseSpec {
            duration: self.pulse.pi_duration,
            omega_mod_start: offset,
            chirp_rate: 0.0,
            channels: self.pulse.channels,
            target: Channel::Co,
            phase: 0.0,
            substeps: self.pulse.substeps,
            label: "probe pi".into(),
        };
        pulse.validate()?;
        Ok(Sequence {
            elements: vec![Element::Pulse(pulse)],
            schedule: FrequencySchedule::constant(offset, 0.0),
            half_duration: 0.0,
            lmt_interval: 0.0,
            lmt_order: 0,
            kinematics: self.kinematics(),
        })
    }

    pub fn run(&self, seq: &Sequence) -> Result<EnsembleResult> {
        run_ensemble_with(seq, &self.ensemble, &self.species, &self.run_options())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanSpec {
    pub variable: ScanVariable,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl ScanSpec {
    pub fn new(variable: ScanVariable, start: f64, stop: f64, points: usize) -> Result<Self> {
        let s = Self {
            variable,
            start,
            stop,
            points,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points < 2 {
            return Err(Error::InvalidParameter(format!("scan needs >= 2 points, got {}", self.points)));
        }
        if !(self.start.is_finite() && self.stop.is_finite() && self.start < self.stop) {
            return Err(Error::InvalidParameter(format!(
                "scan range must satisfy start < stop, got [{}, {}]",
                self.start, self.stop
            )));
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        let step = (self.stop - self.start) / (self.points - 1) as f64;
        (0..self.points)
            .map(|i| if i + 1 == self.points { self.stop } else { self.start + step * i as f64 })
            .collect()
    }

    fn expect(&self, variable: ScanVariable) -> Result<()> {
        self.validate()?;
        if self.variable != variable {
            return Err(Error::InvalidParameter(format!(
                "expected a {variable} scan, got {}",
                self.variable
            )));
        }
        Ok(())
    }
}

fn run_scan(
    scenario: &Scenario,
    scan: &ScanSpec,
    make: impl Fn(f64) -> Result<Sequence>,
) -> Result<ScanResult> {
    scenario.validate()?;
    let x = scan.grid();
    let mut mean = Vec::with_capacity(x.len());
    let mut stderr = Vec::with_capacity(x.len());
    for &xi in &x {
        let r = scenario.run(&make(xi)?)?;
        mean.push(r.mean_population_f3);
        stderr.push(r.stderr);
    }
    Ok(ScanResult::new(scan.variable, x, mean, stderr))
}

/// P_F3 after one pi pulse versus modulation-frequency offset (rad/s).
pub fn raman_spectrum(scenario: &Scenario, scan: &ScanSpec) -> Result<ScanResult> {
    scan.expect(ScanVariable::OmegaModOffset)?;
    run_scan(scenario, scan, |x| scenario.probe_sequence(x))
}

/// Mach-Zehnder signal versus T.
pub fn fringe_scan_t(scenario: &Scenario, scan: &ScanSpec, chirp: &ChirpSpec) -> Result<ScanResult> {
    scan.expect(ScanVariable::T)?;
    run_scan(scenario, scan, |t| scenario.mzi_sequence(t, chirp))
}

/// LMT signal versus T0 at the scenario's T.
pub fn lmt_scan_t0(scenario: &Scenario, scan: &ScanSpec) -> Result<ScanResult> {
    scan.expect(ScanVariable::T0)?;
    if scenario.lmt_order == 0 {
        return Err(Error::InvalidParameter("T0 scan needs LMT order >= 1".into()));
    }
    run_scan(scenario, scan, |t0| scenario.lmt_sequence(t0))
}

/// Interferometer phase at each T of a fringe scan, unwrapped along the
/// grid. Each phase comes from four runs with the last pulse's laser phase
/// stepped by pi/2: with P_k = A - B cos(phi + k pi/2),
/// phi = atan2(P_1 - P_3, P_2 - P_0).
pub fn fringe_phase_scan(scenario: &Scenario, scan: &ScanSpec, chirp: &ChirpSpec) -> Result<Vec<f64>> {
    scan.expect(ScanVariable::T)?;
    scenario.validate()?;
    let mut phases = Vec::with_capacity(scan.points);
    for t in scan.grid() {
        let seq = scenario.mzi_sequence(t, chirp)?;
        let last = seq.pulse_count() - 1;
        let mut p = [0.0; 4];
        for (k, pk) in p.iter_mut().enumerate() {
            let shifted = seq.with_pulse_phase(last, k as f64 * std::f64::consts::FRAC_PI_2)?;
            *pk = scenario.run(&shifted)?.mean_population_f3;
        }
        phases.push((p[1] - p[3]).atan2(p[2] - p[0]));
    }
    Ok(unwrap_phase(&phases))
}

pub fn unwrap_phase(phases: &[f64]) -> Vec<f64> {
    let tau = std::f64::consts::TAU;
    let mut out = Vec::with_capacity(phases.len());
    let mut offset = 0.0;
    for (i, &p) in phases.iter().enumerate() {
        if i > 0 {
            let d = p - phases[i - 1];
            offset -= tau * (d / tau).round();
        }
        out.push(p + offset);
    }
    out
}
