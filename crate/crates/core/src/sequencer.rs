//! Pulse-sequence generation: the bare pi/2 - pi - pi/2 Mach-Zehnder
//! interferometer and its n-order large-momentum-transfer extension.
//!
//! Time origin is the start of the first pulse. Base pulses A0, B0, C0 are
//! centred T apart. In each half of an n-order sequence, n "kick" pi pulses
//! follow the base pulse, then n "return" pulses undo them after the LMT
//! interval T0, so the arm separation is enlarged by 2n hbar k_eff for a time
//! T0 in each half. Kicks alternate between the -1 and +1 channels, starting
//! with -1; for first order every LMT pulse is on the -1 channel.
//!
//! Each pulse's modulation frequency follows the chirp law of its channel
//! `s`: offset(t) = s (k_eff v0 + w_rec) + s alpha t, where v0 is the
//! velocity at sequence start. With alpha = 0 each channel keeps a fixed
//! frequency; with alpha = k_eff g the schedule tracks the fall exactly.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::physics::{doppler_shift, recoil_frequency, AtomSpecies, Channel, ChannelSet, KinematicState};
use crate::propagator::{GapSpec, PulseSpec};
pub use crate::schedule::{FrequencySchedule, ScheduleSegment};

/// Pulse parameters shared by every pulse of a sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseParams {
    pub channels: ChannelSet,
    /// Duration of a pi pulse, s. pi/2 pulses last half as long.
    pub pi_duration: f64,
    pub substeps: usize,
    /// Centre-to-centre delay between a base pulse and the first LMT pulse after it, s.
    pub lmt_offset: f64,
    /// Centre-to-centre spacing between consecutive kick (or return) pulses
    /// for orders n >= 2, s.
    pub lmt_spacing: f64,
    /// Modulation-frequency offsets (rad/s, at pulse midpoint) replacing the
    /// chirp law for individual pulses, by pulse index.
    pub frequency_overrides: Vec<(usize, f64)>,
}

impl PulseParams {
    /// Pi pulse of `pi_duration` on the counterpropagating channels; every
    /// channel is given the same Rabi frequency pi / pi_duration.
    pub fn with_pi_duration(pi_duration: f64) -> Result<Self> {
        let rabi = std::f64::consts::PI / pi_duration;
        Ok(Self {
            channels: ChannelSet::uniform(rabi)?,
            pi_duration,
            substeps: 16,
            lmt_offset: pi_duration,
            lmt_spacing: 1.5 * pi_duration,
            frequency_overrides: Vec::new(),
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.pi_duration.is_finite() && self.pi_duration > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "pi duration must be > 0, got {}",
                self.pi_duration
            )));
        }
        if self.substeps < 1 {
            return Err(Error::InvalidParameter("substeps must be >= 1".into()));
        }
        if !(self.lmt_offset.is_finite() && self.lmt_offset > 0.0)
            || !(self.lmt_spacing.is_finite() && self.lmt_spacing > 0.0)
        {
            return Err(Error::InvalidParameter("LMT pulse offsets must be > 0".into()));
        }
        self.channels.validate()
    }

    fn override_for(&self, index: usize) -> Option<f64> {
        self.frequency_overrides
            .iter()
            .rev()
            .find(|(i, _)| *i == index)
            .map(|&(_, w)| w)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ChirpMode {
    None,
    /// alpha = f k_eff g.
    CancelFraction(f64),
    /// Explicit alpha, rad/s^2.
    Rate(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChirpSpec {
    pub mode: ChirpMode,
}

impl ChirpSpec {
    pub const NONE: ChirpSpec = ChirpSpec { mode: ChirpMode::None };

    pub fn cancel_fraction(f: f64) -> Result<Self> {
        if !(0.0..=1.5).contains(&f) {
            return Err(Error::InvalidParameter(format!("cancel fraction must lie in [0, 1.5], got {f}")));
        }
        Ok(Self {
            mode: ChirpMode::CancelFraction(f),
        })
    }

    pub fn rate(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::InvalidParameter("chirp rate must be finite".into()));
        }
        Ok(Self { mode: ChirpMode::Rate(alpha) })
    }

    /// Chirp rate alpha in rad/s^2.
    pub fn alpha(&self, species: &AtomSpecies, kin: &KinematicState) -> f64 {
        match self.mode {
            ChirpMode::None => 0.0,
            ChirpMode::CancelFraction(f) => f * species.k_eff * kin.g,
            ChirpMode::Rate(a) => a,
        }
    }
}

impl Default for ChirpSpec {
    fn default() -> Self {
        Self::NONE
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Element {
    Pulse(PulseSpec),
    Gap(GapSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sequence {
    pub elements: Vec<Element>,
    pub schedule: FrequencySchedule,
    /// Half duration T (centre of A0 to centre of B0), s.
    pub half_duration: f64,
    /// LMT interval T0, s (0 for a bare interferometer).
    pub lmt_interval: f64,
    pub lmt_order: usize,
    /// Kinematics the frequencies were computed for.
    pub kinematics: KinematicState,
}

/// A pulse with its start time inside a [`Sequence`].
#[derive(Debug, Clone, Copy)]
pub struct TimedPulse<'a> {
    pub index: usize,
    pub start: f64,
    pub pulse: &'a PulseSpec,
}

impl TimedPulse<'_> {
    pub fn midpoint(&self) -> f64 {
        self.start + 0.5 * self.pulse.duration
    }
}

impl Sequence {
    pub fn pulses(&self) -> Vec<TimedPulse<'_>> {
        let mut t = 0.0;
        let mut out = Vec::new();
        for e in &self.elements {
            match e {
                Element::Pulse(p) => {
                    out.push(TimedPulse {
                        index: out.len(),
                        start: t,
                        pulse: p,
                    });
                    t += p.duration;
                }
                Element::Gap(g) => t += g.duration,
            }
        }
        out
    }

    pub fn pulse_count(&self) -> usize {
        self.elements.iter().filter(|e| matches!(e, Element::Pulse(_))).count()
    }

    pub fn total_duration(&self) -> f64 {
        self.elements
            .iter()
            .map(|e| match e {
                Element::Pulse(p) => p.duration,
                Element::Gap(g) => g.duration,
            })
            .sum()
    }

    /// Default ladder half-width 2n + 6.
    pub fn default_half_width(&self) -> usize {
        2 * self.lmt_order + 6
    }

    /// Copy with the laser phase of pulse `index` shifted by `phase` (rad).
    pub fn with_pulse_phase(&self, index: usize, phase: f64) -> Result<Self> {
        let mut out = self.clone();
        let p = out
            .elements
            .iter_mut()
            .filter_map(|e| match e {
                Element::Pulse(p) => Some(p),
                Element::Gap(_) => None,
            })
            .nth(index)
            .ok_or_else(|| Error::InvalidParameter(format!("no pulse with index {index}")))?;
        p.phase += phase;
        Ok(out)
    }

    /// Deterministic line-oriented table of the sequence.
    pub fn export_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# T_s = {:.9e}\n# T0_s = {:.9e}\n# lmt_order = {}\n# v0_m_per_s = {:.9e}\n# g_m_per_s2 = {:.9e}",
            self.half_duration, self.lmt_interval, self.lmt_order, self.kinematics.v0, self.kinematics.g
        );
        let _ = writeln!(
            out,
            "index\tkind\tstart_s\tduration_s\tchannel\tomega_mod_offset_hz\tchirp_hz_per_s\tlabel"
        );
        let mut t = 0.0;
        for (i, e) in self.elements.iter().enumerate() {
            match e {
                Element::Pulse(p) => {
                    let _ = writeln!(
                        out,
                        "{i}\tpulse\t{t:.9e}\t{:.9e}\t{}\t{:.9e}\t{:.9e}\t{}",
                        p.duration,
                        p.target,
                        p.omega_mod_start / std::f64::consts::TAU,
                        p.chirp_rate / std::f64::consts::TAU,
                        p.label
                    );
                    t += p.duration;
                }
                Element::Gap(g) => {
                    let _ = writeln!(out, "{i}\tgap\t{t:.9e}\t{:.9e}\t-\t-\t-\t-", g.duration);
                    t += g.duration;
                }
            }
        }
        out
    }
}

struct Planned {
    center: f64,
    duration: f64,
    channel: Channel,
    label: String,
}

/// Frequency-law offset for `channel` at time `t` (paper formula: both
/// counterpropagating channels sit at +-(k v0 + w_rec)).
fn law_offset(species: &AtomSpecies, kin: &KinematicState, channel: Channel, alpha: f64, t: f64) -> f64 {
    let s = f64::from(channel.sign());
    s * (doppler_shift(species, kin.v0) + recoil_frequency(species)) + s * alpha * t
}

fn build(
    species: &AtomSpecies,
    kin: &KinematicState,
    params: &PulseParams,
    chirp: &ChirpSpec,
    mut plan: Vec<Planned>,
    half_duration: f64,
    lmt_interval: f64,
    lmt_order: usize,
) -> Result<Sequence> {
    params.validate()?;
    plan.sort_by(|a, b| a.center.total_cmp(&b.center));
    let alpha = chirp.alpha(species, kin);
    let origin = plan[0].center - 0.5 * plan[0].duration;
    let mut elements = Vec::with_capacity(2 * plan.len());
    let mut segments = Vec::with_capacity(plan.len());
    let mut t = 0.0;
    for (i, p) in plan.iter().enumerate() {
        let start = p.center - 0.5 * p.duration - origin;
        if i > 0 {
            let gap = start - t;
            // Tolerate rounding from centre arithmetic.
            if gap < -1e-15 {
                return Err(Error::InvalidTiming(format!(
                    "pulse {i} ({}) starts {:.3e} s before the previous pulse ends",
                    p.label, -gap
                )));
            }
            elements.push(Element::Gap(GapSpec { duration: gap.max(0.0) }));
        }
        let s = f64::from(p.channel.sign());
        // + 0.0 turns -0 into 0 for the minus channel.
        let chirp_rate = s * alpha + 0.0;
        let mid = start + 0.5 * p.duration;
        let mid_offset = params
            .override_for(i)
            .unwrap_or_else(|| law_offset(species, kin, p.channel, alpha, mid));
        let omega_mod_start = mid_offset - chirp_rate * 0.5 * p.duration;
        segments.push(ScheduleSegment {
            t_start: start,
            offset: omega_mod_start,
            chirp_rate,
        });
        elements.push(Element::Pulse(PulseSpec {
            duration: p.duration,
            omega_mod_start,
            chirp_rate,
            channels: params.channels,
            target: p.channel,
            phase: 0.0,
            substeps: params.substeps,
            label: p.label.clone(),
        }));
        t = start + p.duration;
    }
    Ok(Sequence {
        elements,
        schedule: FrequencySchedule::new(segments)?,
        half_duration,
        lmt_interval,
        lmt_order,
        kinematics: *kin,
    })
}

fn base_plan(params: &PulseParams, half_duration: f64) -> Vec<Planned> {
    let half = 0.5 * params.pi_duration;
    let c0 = 0.5 * half;
    vec![
        Planned {
            center: c0,
            duration: half,
            channel: Channel::Plus,
            label: "A0 pi/2".into(),
        },
        Planned {
            center: c0 + half_duration,
            duration: params.pi_duration,
            channel: Channel::Plus,
            label: "B0 pi".into(),
        },
        Planned {
            center: c0 + 2.0 * half_duration,
            duration: half,
            channel: Channel::Plus,
            label: "C0 pi/2".into(),
        },
    ]
}

fn check_half_duration(params: &PulseParams, half_duration: f64) -> Result<()> {
    if !(half_duration.is_finite() && half_duration > 0.75 * params.pi_duration) {
        return Err(Error::InvalidTiming(format!(
            "T = {half_duration:.3e} s leaves no gap between pulses of {:.3e} s",
            params.pi_duration
        )));
    }
    Ok(())
}

/// pi/2 - T - pi - T - pi/2 on channel +1.
pub fn make_mzi_sequence(
    species: &AtomSpecies,
    kin: &KinematicState,
    params: &PulseParams,
    half_duration: f64,
    chirp: &ChirpSpec,
) -> Result<Sequence> {
    check_half_duration(params, half_duration)?;
    build(species, kin, params, chirp, base_plan(params, half_duration), half_duration, 0.0, 0)
}

/// n-order LMT sequence: the Mach-Zehnder base plus 4n pi pulses.
pub fn make_lmt_sequence(
    species: &AtomSpecies,
    kin: &KinematicState,
    params: &PulseParams,
    half_duration: f64,
    lmt_interval: f64,
    order: usize,
    chirp: &ChirpSpec,
) -> Result<Sequence> {
    if order == 0 {
        return make_mzi_sequence(species, kin, params, half_duration, chirp);
    }
    check_half_duration(params, half_duration)?;
    if !(lmt_interval.is_finite() && lmt_interval > 0.0) {
        return Err(Error::InvalidTiming(format!("T0 must be > 0, got {lmt_interval}")));
    }
    let mut plan = base_plan(params, half_duration);
    let starts = [plan[0].center, plan[1].center];
    let last_base = [plan[1].center, plan[2].center];
    let half_pulses = [0.5 * plan[1].duration, 0.5 * plan[2].duration];
    for (h, &base) in starts.iter().enumerate() {
        let first = base + params.lmt_offset;
        let last_kick = first + (order - 1) as f64 * params.lmt_spacing;
        let mut lmt = Vec::with_capacity(2 * order);
        for j in 0..order {
            let channel = if j % 2 == 0 { Channel::Minus } else { Channel::Plus };
            lmt.push(Planned {
                center: first + j as f64 * params.lmt_spacing,
                duration: params.pi_duration,
                channel,
                label: format!("L{}k{} pi", h + 1, j + 1),
            });
            lmt.push(Planned {
                center: last_kick + lmt_interval + (order - 1 - j) as f64 * params.lmt_spacing,
                duration: params.pi_duration,
                channel,
                label: format!("L{}r{} pi", h + 1, j + 1),
            });
        }
        let latest_end = lmt
            .iter()
            .map(|p| p.center + 0.5 * p.duration)
            .fold(f64::NEG_INFINITY, f64::max);
        if latest_end > last_base[h] - half_pulses[h] + 1e-15 {
            return Err(Error::InvalidTiming(format!(
                "LMT pulses of half {} end at {latest_end:.3e} s, after the next base pulse starts; \
                 need T > n (T0 + spacing)",
                h + 1
            )));
        }
        plan.extend(lmt);
    }
    build(species, kin, params, chirp, plan, half_duration, lmt_interval, order)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Diagnostic {
    InvalidTiming { element: usize, detail: String },
    ChannelOverlap { pulse: usize, separation: f64, spectral_width: f64 },
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Diagnostic::InvalidTiming { element, detail } => {
                write!(f, "InvalidTiming: element {element}: {detail}")
            }
            Diagnostic::ChannelOverlap {
                pulse,
                separation,
                spectral_width,
            } => write!(
                f,
                "ChannelOverlap: pulse {pulse}: resonance separation 2 k_eff v = 2pi x {:.1} Hz \
                 does not exceed spectral width 2pi x {:.1} Hz",
                separation / std::f64::consts::TAU,
                spectral_width / std::f64::consts::TAU
            ),
        }
    }
}

/// Timing and channel-separation diagnostics; empty means the sequence is usable.
pub fn validate_sequence(seq: &Sequence, species: &AtomSpecies, spectral_width: f64) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut expect_pulse = true;
    for (i, e) in seq.elements.iter().enumerate() {
        match e {
            Element::Pulse(p) => {
                if !expect_pulse {
                    out.push(Diagnostic::InvalidTiming {
                        element: i,
                        detail: "two pulses without a gap between them".into(),
                    });
                }
                if let Err(err) = p.validate() {
                    out.push(Diagnostic::InvalidTiming {
                        element: i,
                        detail: err.to_string(),
                    });
                }
                expect_pulse = false;
            }
            Element::Gap(g) => {
                if expect_pulse {
                    out.push(Diagnostic::InvalidTiming {
                        element: i,
                        detail: "gap not preceded by a pulse".into(),
                    });
                }
                if !(g.duration.is_finite() && g.duration >= 0.0) {
                    out.push(Diagnostic::InvalidTiming {
                        element: i,
                        detail: format!("negative gap {:.3e} s", g.duration),
                    });
                }
                expect_pulse = true;
            }
        }
    }
    let expected = 3 + 4 * seq.lmt_order;
    if seq.pulse_count() != expected {
        out.push(Diagnostic::InvalidTiming {
            element: seq.elements.len(),
            detail: format!(
                "{} pulses for LMT order {}, expected {expected}",
                seq.pulse_count(),
                seq.lmt_order
            ),
        });
    }
    if let Some((pulse, separation)) = seq
        .pulses()
        .iter()
        .map(|p| (p.index, 2.0 * species.k_eff * seq.kinematics.velocity_at(p.midpoint()).abs()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
    {
        if separation <= spectral_width {
            out.push(Diagnostic::ChannelOverlap {
                pulse,
                separation,
                spectral_width,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::hz_to_rad;

    fn setup() -> (AtomSpecies, KinematicState, PulseParams) {
        (
            AtomSpecies::rb85(),
            KinematicState::new(0.196, 9.81),
            PulseParams::with_pi_duration(10e-6).unwrap(),
        )
    }

    #[test]
    fn mzi_has_three_pulses_on_plus() {
        let (rb, kin, pp) = setup();
        let seq = make_mzi_sequence(&rb, &kin, &pp, 400e-6, &ChirpSpec::NONE).unwrap();
        let pulses = seq.pulses();
        assert_eq!(pulses.len(), 3);
        assert!(pulses.iter().all(|p| p.pulse.target == Channel::Plus));
        assert_eq!(pulses[1].pulse.duration, 2.0 * pulses[0].pulse.duration);
        assert!((pulses[1].midpoint() - pulses[0].midpoint() - 400e-6).abs() < 1e-15);
        assert!((pulses[2].midpoint() - pulses[1].midpoint() - 400e-6).abs() < 1e-15);
    }

    #[test]
    fn chirp_slopes() {
        let (rb, kin, pp) = setup();
        for (f, want) in [(1.0, rb.k_eff * 9.81), (0.8, 0.8 * rb.k_eff * 9.81)] {
            let seq = make_mzi_sequence(&rb, &kin, &pp, 400e-6, &ChirpSpec::cancel_fraction(f).unwrap()).unwrap();
            for seg in seq.schedule.segments() {
                assert!((seg.chirp_rate - want).abs() < 1e-6 * want);
            }
        }
        assert!(ChirpSpec::cancel_fraction(1.6).is_err());
    }

    #[test]
    fn pulse_counts() {
        let (rb, kin, pp) = setup();
        for (n, t) in [(1, 400e-6), (3, 600e-6)] {
            let seq = make_lmt_sequence(&rb, &kin, &pp, t, 60e-6, n, &ChirpSpec::NONE).unwrap();
            assert_eq!(seq.pulse_count(), 3 + 4 * n);
        }
    }

    #[test]
    fn first_order_frequencies_at_start() {
        let (rb, kin, pp) = setup();
        let seq = make_lmt_sequence(&rb, &kin, &pp, 400e-6, 100e-6, 1, &ChirpSpec::NONE).unwrap();
        let wr = recoil_frequency(&rb);
        let kv = doppler_shift(&rb, 0.196);
        for p in seq.pulses() {
            let want = match p.pulse.target {
                Channel::Plus => kv + wr,
                Channel::Minus => -(kv + wr),
                Channel::Co => unreachable!(),
            };
            assert_eq!(seq.schedule.offset_at(p.midpoint()), want);
            assert!(((want.abs() - hz_to_rad(521.4e3)) / want).abs() < 0.02);
        }
        let minus = seq.pulses().iter().filter(|p| p.pulse.target == Channel::Minus).count();
        assert_eq!(minus, 4);
    }

    #[test]
    fn lmt_timing_layout() {
        let (rb, kin, pp) = setup();
        let t0 = 120e-6;
        let seq = make_lmt_sequence(&rb, &kin, &pp, 400e-6, t0, 1, &ChirpSpec::NONE).unwrap();
        let mids: Vec<f64> = seq.pulses().iter().map(|p| p.midpoint()).collect();
        // A0, L1, L2, B0, L3, L4, C0
        assert!((mids[2] - mids[1] - t0).abs() < 1e-15);
        assert!((mids[5] - mids[4] - t0).abs() < 1e-15);
        assert!((mids[4] - mids[1] - 400e-6).abs() < 1e-15);
        assert!((mids[1] - mids[0] - pp.lmt_offset).abs() < 1e-15);
    }

    #[test]
    fn order_zero_degenerates_to_mzi() {
        let (rb, kin, pp) = setup();
        let chirp = ChirpSpec::cancel_fraction(0.3).unwrap();
        let a = make_lmt_sequence(&rb, &kin, &pp, 300e-6, 50e-6, 0, &chirp).unwrap();
        let b = make_mzi_sequence(&rb, &kin, &pp, 300e-6, &chirp).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn impossible_timing_is_rejected() {
        let (rb, kin, pp) = setup();
        assert!(matches!(
            make_lmt_sequence(&rb, &kin, &pp, 100e-6, 95e-6, 1, &ChirpSpec::NONE),
            Err(Error::InvalidTiming(_))
        ));
        assert!(matches!(
            make_mzi_sequence(&rb, &kin, &pp, 5e-6, &ChirpSpec::NONE),
            Err(Error::InvalidTiming(_))
        ));
        assert!(make_lmt_sequence(&rb, &kin, &pp, 400e-6, 5e-6, 1, &ChirpSpec::NONE).is_err());
    }

    #[test]
    fn validation_diagnostics() {
        let (rb, kin, pp) = setup();
        let seq = make_lmt_sequence(&rb, &kin, &pp, 400e-6, 100e-6, 1, &ChirpSpec::NONE).unwrap();
        assert!(validate_sequence(&seq, &rb, hz_to_rad(400e3)).is_empty());

        let still = KinematicState::new(0.0, 0.0);
        let seq0 = make_lmt_sequence(&rb, &still, &pp, 400e-6, 100e-6, 1, &ChirpSpec::NONE).unwrap();
        let d = validate_sequence(&seq0, &rb, hz_to_rad(400e3));
        assert!(matches!(d.as_slice(), [Diagnostic::ChannelOverlap { .. }]));

        let mut broken = seq.clone();
        broken.elements[1] = Element::Gap(GapSpec { duration: -1e-6 });
        let d = validate_sequence(&broken, &rb, hz_to_rad(400e3));
        assert!(d.iter().any(|x| matches!(x, Diagnostic::InvalidTiming { .. })));
    }

    #[test]
    fn overrides_replace_the_law() {
        let (rb, kin, mut pp) = setup();
        pp.frequency_overrides = vec![(1, -123.0)];
        let seq = make_lmt_sequence(&rb, &kin, &pp, 400e-6, 100e-6, 1, &ChirpSpec::NONE).unwrap();
        let p = seq.pulses()[1];
        assert_eq!(seq.schedule.offset_at(p.midpoint()), -123.0);
    }

    #[test]
    fn export_is_stable() {
        let (rb, kin, pp) = setup();
        let seq = make_lmt_sequence(&rb, &kin, &pp, 400e-6, 100e-6, 1, &ChirpSpec::NONE).unwrap();
        let a = seq.export_table();
        assert_eq!(a, seq.clone().export_table());
        assert_eq!(a.lines().filter(|l| l.contains("\tpulse\t")).count(), 7);
        assert_eq!(a.lines().filter(|l| l.contains("\tgap\t")).count(), 6);
    }
}
