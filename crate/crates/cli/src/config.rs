//! Flat TOML run configuration.
//!
//! Every key is top level. Frequencies are given in Hz and converted to rad/s
//! here; times are in seconds, temperatures in kelvin.

use std::f64::consts::TAU;

use raman_lmt::ensemble::{EnsembleSpec, PulseEngine, Sampling};
use raman_lmt::experiments::{ScanSpec, ScanVariable, Scenario};
use raman_lmt::sequencer::{ChirpSpec, PulseParams, Sequence};
use raman_lmt::{AtomSpecies, Channel, ChannelSet};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingKind {
    Auto,
    GaussHermite,
    MonteCarlo,
    Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EngineKind {
    Physical,
    Ideal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceKind {
    Mzi,
    Lmt,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Species preset; only "rb85" is built in.
    pub species: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mass_amu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hfs_hz: Option<f64>,
    /// k_eff / 2pi, 1/m.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wavenumber_per_m: Option<f64>,

    pub g: f64,
    pub t_fall_s: f64,
    /// Overrides `t_fall_s` when set.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v0_m_per_s: Option<f64>,
    pub temperature_k: f64,

    pub pi_duration_s: f64,
    pub rabi_plus_hz: f64,
    pub rabi_minus_hz: f64,
    pub rabi_co_hz: f64,
    pub enable_plus: bool,
    pub enable_minus: bool,
    pub enable_co: bool,
    pub substeps: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lmt_offset_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lmt_spacing_s: Option<f64>,

    pub half_duration_s: f64,
    pub lmt_interval_s: f64,
    pub lmt_order: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chirp_fraction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chirp_rate_hz_per_s: Option<f64>,

    pub sampling: SamplingKind,
    pub gh_order: usize,
    pub mc_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_points: Option<usize>,
    pub seed: u64,
    pub engine: EngineKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub half_width: Option<usize>,

    /// Sequence used by `sequence-export` and `validate`.
    pub sequence: SequenceKind,
    pub spectral_width_hz: f64,

    pub spectrum_start_hz: f64,
    pub spectrum_stop_hz: f64,
    pub spectrum_points: usize,
    pub peak_prominence: f64,
    pub fringe_start_s: f64,
    pub fringe_stop_s: f64,
    pub fringe_points: usize,
    pub lmt_start_s: f64,
    pub lmt_stop_s: f64,
    pub lmt_points: usize,

    pub out_dir: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            species: "rb85".into(),
            mass_amu: None,
            hfs_hz: None,
            wavenumber_per_m: None,
            g: 9.81,
            t_fall_s: 20e-3,
            v0_m_per_s: None,
            temperature_k: 14e-6,
            pi_duration_s: 10e-6,
            rabi_plus_hz: 50e3,
            rabi_minus_hz: 50e3,
            rabi_co_hz: 50e3,
            enable_plus: true,
            enable_minus: true,
            enable_co: true,
            substeps: 16,
            lmt_offset_s: None,
            lmt_spacing_s: None,
            half_duration_s: 400e-6,
            lmt_interval_s: 100e-6,
            lmt_order: 1,
            chirp_fraction: None,
            chirp_rate_hz_per_s: None,
            sampling: SamplingKind::Auto,
            gh_order: 40,
            mc_count: 100_000,
            grid_points: None,
            seed: 1,
            engine: EngineKind::Physical,
            half_width: None,
            sequence: SequenceKind::Lmt,
            spectral_width_hz: 400e3,
            spectrum_start_hz: -800e3,
            spectrum_stop_hz: 800e3,
            spectrum_points: 400,
            peak_prominence: 0.2,
            fringe_start_s: 100e-6,
            fringe_stop_s: 1e-3,
            fringe_points: 200,
            lmt_start_s: 20e-6,
            lmt_stop_s: 370e-6,
            lmt_points: 36,
            out_dir: "out".into(),
        }
    }
}

fn parse_table(text: &str) -> Result<toml::Table, CliError> {
    text.parse::<toml::Table>().map_err(|e| CliError::Config(e.to_string()))
}

/// `key=value` with a TOML value; bare words are taken as strings.
fn parse_override(item: &str) -> Result<(String, toml::Value), CliError> {
    let (key, value) = item
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override {item:?} is not key=value")))?;
    let key = key.trim();
    let value = value.trim();
    let parsed = parse_table(&format!("v = {value}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(value.to_string()));
    Ok((key.to_string(), parsed))
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        Self::from_table(parse_table(text)?)
    }

    fn from_table(table: toml::Table) -> Result<Self, CliError> {
        toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Config(e.to_string()))
    }

    /// Config file (or defaults when `text` is None) with `key=value` overrides applied.
    pub fn load(text: Option<&str>, overrides: &[String]) -> Result<Self, CliError> {
        let mut table = match text {
            Some(t) => parse_table(t)?,
            None => toml::Table::new(),
        };
        for item in overrides {
            let (k, v) = parse_override(item)?;
            table.insert(k, v);
        }
        Self::from_table(table)
    }

    /// Resolved configuration as TOML; parses back to an identical value.
    pub fn echo(&self) -> String {
        toml::to_string(self).expect("flat config always serializes")
    }

    /// `config.`-prefixed metadata entries, one per echoed key.
    pub fn metadata(&self) -> Vec<(String, String)> {
        self.echo()
            .lines()
            .filter_map(|l| l.split_once(" = "))
            .map(|(k, v)| (format!("config.{k}"), v.to_string()))
            .collect()
    }

    /// Inverse of [`RunConfig::metadata`] given a CSV written by this tool.
    pub fn from_csv_header(csv: &str) -> Result<Self, CliError> {
        let mut text = String::new();
        for line in csv.lines() {
            if let Some(rest) = line.strip_prefix("# config.") {
                text.push_str(rest);
                text.push('\n');
            }
        }
        Self::from_toml(&text)
    }

    pub fn species(&self) -> Result<AtomSpecies, CliError> {
        if self.species != "rb85" {
            return Err(CliError::Config(format!("unknown species preset {:?}", self.species)));
        }
        let mut s = AtomSpecies::rb85();
        if let Some(m) = self.mass_amu {
            s.mass = m * raman_lmt::constants::ATOMIC_MASS;
        }
        if let Some(f) = self.hfs_hz {
            s.omega_hfs = TAU * f;
        }
        if let Some(k) = self.wavenumber_per_m {
            s.k_eff = TAU * k;
        }
        s.validate()?;
        Ok(s)
    }

    pub fn pulse_params(&self) -> Result<PulseParams, CliError> {
        let mut p = PulseParams::with_pi_duration(self.pi_duration_s)?;
        p.channels = ChannelSet::new(TAU * self.rabi_plus_hz, TAU * self.rabi_minus_hz, TAU * self.rabi_co_hz)?
            .with_enabled(Channel::Plus, self.enable_plus)?
            .with_enabled(Channel::Minus, self.enable_minus)?
            .with_enabled(Channel::Co, self.enable_co)?;
        p.substeps = self.substeps;
        if let Some(d) = self.lmt_offset_s {
            p.lmt_offset = d;
        }
        if let Some(d) = self.lmt_spacing_s {
            p.lmt_spacing = d;
        }
        p.validate()?;
        Ok(p)
    }

    pub fn chirp(&self) -> Result<ChirpSpec, CliError> {
        match (self.chirp_fraction, self.chirp_rate_hz_per_s) {
            (Some(_), Some(_)) => Err(CliError::Config(
                "set at most one of chirp_fraction and chirp_rate_hz_per_s".into(),
            )),
            (Some(f), None) => Ok(ChirpSpec::cancel_fraction(f)?),
            (None, Some(a)) => Ok(ChirpSpec::rate(TAU * a)?),
            (None, None) => Ok(ChirpSpec::NONE),
        }
    }

    pub fn sampling(&self) -> Sampling {
        match self.sampling {
            SamplingKind::Auto => Sampling::Auto,
            SamplingKind::GaussHermite => Sampling::GaussHermite { order: self.gh_order },
            SamplingKind::MonteCarlo => Sampling::MonteCarlo {
                count: self.mc_count,
                seed: self.seed,
            },
            SamplingKind::Grid => Sampling::VelocityGrid {
                points: self.grid_points.unwrap_or(4001),
            },
        }
    }

    pub fn scenario(&self) -> Result<Scenario, CliError> {
        let ensemble = match self.v0_m_per_s {
            Some(v0) => EnsembleSpec::new(self.temperature_k, v0, self.g, self.sampling())?,
            None => EnsembleSpec::from_fall_time(self.temperature_k, self.g, self.t_fall_s, self.sampling())?,
        };
        let scn = Scenario {
            species: self.species()?,
            pulse: self.pulse_params()?,
            ensemble,
            half_duration: self.half_duration_s,
            lmt_interval: self.lmt_interval_s,
            lmt_order: self.lmt_order,
            chirp: self.chirp()?,
            engine: match self.engine {
                EngineKind::Physical => PulseEngine::default(),
                EngineKind::Ideal => PulseEngine::IdealBeamSplitter,
            },
            half_width: self.half_width,
        };
        scn.validate()?;
        Ok(scn)
    }

    /// The `sequence` kind built at the configured T and T0.
    pub fn sequence(&self, scn: &Scenario) -> Result<Sequence, CliError> {
        Ok(match self.sequence {
            SequenceKind::Mzi => scn.mzi_sequence(self.half_duration_s, &scn.chirp)?,
            SequenceKind::Lmt => scn.lmt_sequence(self.lmt_interval_s)?,
        })
    }

    pub fn spectrum_scan(&self) -> Result<ScanSpec, CliError> {
        Ok(ScanSpec::new(
            ScanVariable::OmegaModOffset,
            TAU * self.spectrum_start_hz,
            TAU * self.spectrum_stop_hz,
            self.spectrum_points,
        )?)
    }

    pub fn fringe_scan(&self) -> Result<ScanSpec, CliError> {
        Ok(ScanSpec::new(ScanVariable::T, self.fringe_start_s, self.fringe_stop_s, self.fringe_points)?)
    }

    pub fn lmt_scan(&self) -> Result<ScanSpec, CliError> {
        Ok(ScanSpec::new(ScanVariable::T0, self.lmt_start_s, self.lmt_stop_s, self.lmt_points)?)
    }
}
