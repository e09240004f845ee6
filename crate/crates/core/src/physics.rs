//! Species parameters, kinematics, Raman channels and the scalar
//! frequency-shift formulas.
//!
//! Everything is SI with angular frequencies in rad/s. The positive axis points
//! along gravity, so a falling atom has `v > 0`, and channel [`Channel::Plus`]
//! is the counterpropagating pair whose resonance moves up with `v`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::constants::{ATOMIC_MASS, HBAR, K_B};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomSpecies {
    /// Atomic mass, kg.
    pub mass: f64,
    /// Ground-state hyperfine splitting, rad/s.
    pub omega_hfs: f64,
    /// Effective wavenumber of a counterpropagating pair, rad/m.
    pub k_eff: f64,
    pub label: String,
}

impl AtomSpecies {
    pub fn new(label: impl Into<String>, mass: f64, omega_hfs: f64, k_eff: f64) -> Result<Self> {
        let s = Self {
            mass,
            omega_hfs,
            k_eff,
            label: label.into(),
        };
        s.validate()?;
        Ok(s)
    }

    /// 85Rb: m = 85 u, hyperfine splitting 2pi x 3.0357 GHz, k_eff = 2pi x 2.56e6 1/m.
    pub fn rb85() -> Self {
        Self {
            mass: 85.0 * ATOMIC_MASS,
            omega_hfs: TAU * 3.0357e9,
            k_eff: TAU * 2.56e6,
            label: "85Rb".to_string(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if !ok(self.mass) {
            return Err(Error::InvalidParameter(format!("mass must be > 0, got {}", self.mass)));
        }
        if !ok(self.k_eff) {
            return Err(Error::InvalidParameter(format!("k_eff must be > 0, got {}", self.k_eff)));
        }
        if !ok(self.omega_hfs) {
            return Err(Error::InvalidParameter(format!(
                "omega_hfs must be > 0, got {}",
                self.omega_hfs
            )));
        }
        Ok(())
    }

    /// Two-photon recoil frequency hbar k_eff^2 / 2m.
    pub fn recoil_frequency(&self) -> f64 {
        recoil_frequency(self)
    }
}

impl Default for AtomSpecies {
    fn default() -> Self {
        Self::rb85()
    }
}

/// Classical motion of the atom along the beam axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KinematicState {
    /// Velocity at sequence start (t = 0), m/s.
    pub v0: f64,
    /// Acceleration along the beam axis, m/s^2.
    pub g: f64,
}

impl KinematicState {
    pub fn new(v0: f64, g: f64) -> Self {
        Self { v0, g }
    }

    #[inline]
    pub fn velocity_at(&self, t: f64) -> f64 {
        self.v0 + self.g * t
    }
}

/// One of the three Raman beam pairs present in the retroreflected geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Channel {
    /// Counterpropagating pair with effective direction along +z (momentum kick +1).
    Plus,
    /// Counterpropagating pair with effective direction along -z (momentum kick -1).
    Minus,
    /// Copropagating pair (no momentum kick).
    Co,
}

impl Channel {
    pub const ALL: [Channel; 3] = [Channel::Plus, Channel::Minus, Channel::Co];

    /// Momentum kick in units of hbar k_eff.
    #[inline]
    pub fn sign(self) -> i32 {
        match self {
            Channel::Plus => 1,
            Channel::Minus => -1,
            Channel::Co => 0,
        }
    }

    pub fn from_sign(s: i32) -> Option<Self> {
        match s {
            1 => Some(Channel::Plus),
            -1 => Some(Channel::Minus),
            0 => Some(Channel::Co),
            _ => None,
        }
    }

    fn index(self) -> usize {
        match self {
            Channel::Plus => 0,
            Channel::Minus => 1,
            Channel::Co => 2,
        }
    }
}

impl std::fmt::Display for Channel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:+}", self.sign())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelDrive {
    /// Angular Rabi frequency, rad/s.
    pub rabi: f64,
    pub enabled: bool,
}

/// Rabi frequency and on/off flag for each of the three channels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelSet {
    drives: [ChannelDrive; 3],
}

impl ChannelSet {
    /// All three channels on, each with its own Rabi frequency.
    pub fn new(plus: f64, minus: f64, co: f64) -> Result<Self> {
        let set = Self {
            drives: [
                ChannelDrive { rabi: plus, enabled: true },
                ChannelDrive { rabi: minus, enabled: true },
                ChannelDrive { rabi: co, enabled: true },
            ],
        };
        set.validate()?;
        Ok(set)
    }

    /// Every channel driven with the same Rabi frequency.
    pub fn uniform(rabi: f64) -> Result<Self> {
        Self::new(rabi, rabi, rabi)
    }

    /// Only `channel` enabled.
    pub fn only(channel: Channel, rabi: f64) -> Result<Self> {
        let mut set = Self::uniform(rabi)?;
        for c in Channel::ALL {
            set.drives[c.index()].enabled = c == channel;
        }
        Ok(set)
    }

    pub fn with_enabled(mut self, channel: Channel, enabled: bool) -> Result<Self> {
        self.drives[channel.index()].enabled = enabled;
        self.validate()?;
        Ok(self)
    }

    pub fn with_rabi(mut self, channel: Channel, rabi: f64) -> Result<Self> {
        self.drives[channel.index()].rabi = rabi;
        self.validate()?;
        Ok(self)
    }

    pub fn drive(&self, channel: Channel) -> ChannelDrive {
        self.drives[channel.index()]
    }

    /// Effective Rabi frequency: zero when the channel is disabled.
    #[inline]
    pub fn rabi(&self, channel: Channel) -> f64 {
        let d = self.drives[channel.index()];
        if d.enabled {
            d.rabi
        } else {
            0.0
        }
    }

    pub fn enabled(&self) -> impl Iterator<Item = Channel> + '_ {
        Channel::ALL.into_iter().filter(|c| self.drives[c.index()].enabled)
    }

    pub fn validate(&self) -> Result<()> {
        for c in Channel::ALL {
            let r = self.drives[c.index()].rabi;
            if !(r.is_finite() && r >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "Rabi frequency of channel {c} must be >= 0, got {r}"
                )));
            }
        }
        if !self.drives.iter().any(|d| d.enabled) {
            return Err(Error::InvalidParameter("at least one channel must be enabled".into()));
        }
        Ok(())
    }
}

/// First-order Doppler shift k_eff v, rad/s.
#[inline]
pub fn doppler_shift(species: &AtomSpecies, v: f64) -> f64 {
    species.k_eff * v
}

/// Recoil frequency hbar k_eff^2 / (2m), rad/s.
#[inline]
pub fn recoil_frequency(species: &AtomSpecies) -> f64 {
    HBAR * species.k_eff * species.k_eff / (2.0 * species.mass)
}

/// Offset from the hyperfine splitting of the modulation frequency that makes
/// |2, 0> -> |3, s> resonant at time `t`.
pub fn resonant_offset(species: &AtomSpecies, kin: &KinematicState, channel: Channel, t: f64) -> f64 {
    let s = f64::from(channel.sign());
    s * doppler_shift(species, kin.velocity_at(t)) + s.abs() * recoil_frequency(species)
}

/// Modulation frequency (absolute, rad/s) resonant with |2, 0> -> |3, s> at time `t`.
pub fn resonant_modulation_frequency(
    species: &AtomSpecies,
    kin: &KinematicState,
    channel: Channel,
    t: f64,
) -> f64 {
    species.omega_hfs + resonant_offset(species, kin, channel, t)
}

/// One-dimensional rms thermal velocity sqrt(k_B T / m), m/s.
pub fn thermal_sigma_v(species: &AtomSpecies, temperature: f64) -> f64 {
    (K_B * temperature.max(0.0) / species.mass).sqrt()
}

/// True when the two counterpropagating resonances are further apart than `spectral_width`.
#[inline]
pub fn channels_separated(species: &AtomSpecies, v: f64, spectral_width: f64) -> bool {
    2.0 * species.k_eff * v.abs() > spectral_width
}
