//! Command-line front end: config loading, the five subcommands and their
//! output files.

pub mod config;

use std::fmt::Write as _;
use std::f64::consts::TAU;
use std::fs;
use std::path::{Path, PathBuf};

use raman_lmt::experiments::{
    find_peaks, fit_fringe_model, fringe_scan_t, lmt_scan_t0, raman_spectrum, FitModel, ScanResult,
};
use raman_lmt::sequencer::validate_sequence;

pub use config::RunConfig;

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or malformed configuration (exit 1).
    Config(String),
    /// Parameters or sequence rejected (exit 2).
    Validation(String),
    /// Simulation or analysis failure (exit 3).
    Runtime(raman_lmt::Error),
    Io(PathBuf, std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(..) => 1,
            CliError::Validation(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Validation(m) => write!(f, "validation failed: {m}"),
            CliError::Runtime(e) => write!(f, "{e}"),
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
        }
    }
}

impl std::error::Error for CliError {}

impl From<raman_lmt::Error> for CliError {
    fn from(e: raman_lmt::Error) -> Self {
        use raman_lmt::Error as E;
        match e {
            E::InvalidParameter(_) | E::InvalidTiming(_) => CliError::Validation(e.to_string()),
            other => CliError::Runtime(other),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Spectrum,
    Fringe,
    Lmt,
    SequenceExport,
    Validate,
}

/// Files written by a command, in order.
pub type Written = Vec<PathBuf>;

fn write(path: PathBuf, text: &str) -> Result<PathBuf, CliError> {
    fs::write(&path, text).map_err(|e| CliError::Io(path.clone(), e))?;
    Ok(path)
}

fn with_config(result: ScanResult, cfg: &RunConfig) -> ScanResult {
    cfg.metadata().into_iter().fold(result, |r, (k, v)| r.with_metadata(k, v))
}

fn spectrum_report(result: &ScanResult, cfg: &RunConfig) -> String {
    let mut out = String::new();
    match find_peaks(result, cfg.peak_prominence) {
        Ok(peaks) => {
            let _ = writeln!(out, "peaks = {}", peaks.len());
            for (i, p) in peaks.peaks.iter().enumerate() {
                let _ = writeln!(out, "peak{i}.center_hz = {:e}", p.center / TAU);
                let _ = writeln!(out, "peak{i}.height = {:e}", p.height);
                let _ = writeln!(out, "peak{i}.prominence = {:e}", p.prominence);
                let _ = writeln!(out, "peak{i}.width_hz = {:e}", p.width / TAU);
            }
            if peaks.len() >= 2 {
                let span = peaks.peaks[peaks.len() - 1].center - peaks.peaks[0].center;
                let _ = writeln!(out, "outer_separation_hz = {:e}", span / TAU);
            }
        }
        Err(_) => {
            let _ = writeln!(out, "peaks = 0");
        }
    }
    out
}

/// Fringes versus T follow cos((k g - alpha) T^2), so the cosine fit runs on T^2.
fn fringe_report(result: &ScanResult, rate: f64) -> Result<String, CliError> {
    let (lo, hi) = result
        .mean
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &m| (a.min(m), b.max(m)));
    let mut out = format!("effective_rate = {rate:e}\npeak_to_peak = {:e}\n", hi - lo);
    if rate.abs() > 0.0 {
        let mut squared = result.clone();
        squared.x = result.x.iter().map(|t| t * t).collect();
        let fit = fit_fringe_model(&squared, FitModel::SingleCos { f: Some(rate.abs()) })?;
        out.push_str(&fit.to_report());
    }
    Ok(out)
}

fn lmt_report(result: &ScanResult, f1: f64) -> Result<String, CliError> {
    let fixed = fit_fringe_model(result, FitModel::DualCos { f1: Some(f1) })?;
    let mut out = fixed.to_report();
    match fit_fringe_model(result, FitModel::DualCos { f1: None }) {
        Ok(free) => {
            for line in free.to_report().lines() {
                let _ = writeln!(out, "free.{line}");
            }
        }
        Err(e) => {
            let _ = writeln!(out, "free.error = {e}");
        }
    }
    Ok(out)
}

/// Runs `command` and returns the files it wrote. `validate` writes nothing
/// and fails with [`CliError::Validation`] when diagnostics are found.
pub fn run(command: Command, cfg: &RunConfig, out_dir: &Path) -> Result<Written, CliError> {
    let scn = cfg.scenario()?;
    if command == Command::Validate {
        let seq = cfg.sequence(&scn)?;
        let diags = validate_sequence(&seq, &scn.species, TAU * cfg.spectral_width_hz);
        if diags.is_empty() {
            println!("ok: {} pulses, no diagnostics", seq.pulse_count());
            return Ok(Vec::new());
        }
        for d in &diags {
            println!("{d}");
        }
        return Err(CliError::Validation(format!("{} diagnostic(s)", diags.len())));
    }
    fs::create_dir_all(out_dir).map_err(|e| CliError::Io(out_dir.to_path_buf(), e))?;
    let mut written = Vec::new();
    match command {
        Command::Spectrum => {
            let r = with_config(raman_spectrum(&scn, &cfg.spectrum_scan()?)?, cfg);
            written.push(write(out_dir.join("spectrum.csv"), &r.to_csv())?);
            written.push(write(out_dir.join("spectrum_report.txt"), &spectrum_report(&r, cfg))?);
        }
        Command::Fringe => {
            let r = with_config(fringe_scan_t(&scn, &cfg.fringe_scan()?, &scn.chirp)?, cfg);
            let kin = scn.kinematics();
            let rate = scn.species.k_eff * kin.g - scn.chirp.alpha(&scn.species, &kin);
            written.push(write(out_dir.join("fringe.csv"), &r.to_csv())?);
            written.push(write(out_dir.join("fringe_report.txt"), &fringe_report(&r, rate)?)?);
        }
        Command::Lmt => {
            let r = with_config(lmt_scan_t0(&scn, &cfg.lmt_scan()?)?, cfg);
            let f1 = scn.species.k_eff * scn.ensemble.g * scn.half_duration;
            written.push(write(out_dir.join("lmt.csv"), &r.to_csv())?);
            written.push(write(out_dir.join("lmt_report.txt"), &lmt_report(&r, f1)?)?);
        }
        Command::SequenceExport => {
            let seq = cfg.sequence(&scn)?;
            let diags = validate_sequence(&seq, &scn.species, TAU * cfg.spectral_width_hz);
            for d in &diags {
                eprintln!("warning: {d}");
            }
            written.push(write(out_dir.join("sequence.txt"), &seq.export_table())?);
        }
        Command::Validate => unreachable!(),
    }
    Ok(written)
}
