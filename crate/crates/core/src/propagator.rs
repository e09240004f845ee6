//! Single-atom evolution over the internal-state x momentum-ladder basis.
//!
//! Basis states are |F, n> with F in {2, 3} and physical momentum
//! m v(t) + n hbar k_eff. The Hamiltonian is written in the frame rotating at
//! the instantaneous modulation frequency, with the classical fall removed:
//!
//! ```text
//! D(2, n) = n k_eff v(t) + n^2 w_rec
//! D(3, n) = D(2, n) - delta(t)          delta = w_mod - w_hfs
//! <3, n+s| H |2, n> = Omega_s / 2 * exp(i phi)
//! ```
//!
//! Pulses are evolved with piecewise-constant H (exact exponential per slice,
//! H taken at the slice midpoint). Gaps are diagonal and integrated in closed
//! form against the sequence's frequency schedule, so the rotating frame is
//! the same everywhere and laser phase is never reset.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::physics::{recoil_frequency, AtomSpecies, Channel, ChannelSet, KinematicState};
use crate::schedule::FrequencySchedule;

/// Default edge-rung probability that triggers [`Error::LadderOverflow`].
pub const DEFAULT_OVERFLOW_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Level {
    F2,
    F3,
}

impl Level {
    fn offset(self) -> usize {
        match self {
            Level::F2 => 0,
            Level::F3 => 1,
        }
    }
}

/// Complex amplitudes over {F = 2, 3} x {-N, ..., N}.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderState {
    amplitudes: Vec<Complex64>,
    half_width: usize,
    /// Current time, s.
    pub t: f64,
    /// Accumulated laser phase relative to the hyperfine carrier, i.e. the
    /// integral of (w_mod - w_hfs) dt, rad.
    pub phase_accumulator: f64,
    overflow_threshold: f64,
}

impl LadderState {
    /// Atom in |F = 2, n = 0> at t = 0.
    pub fn ground(half_width: usize) -> Result<Self> {
        if half_width < 1 {
            return Err(Error::InvalidParameter("ladder half-width must be >= 1".into()));
        }
        let dim = 2 * (2 * half_width + 1);
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[half_width] = Complex64::new(1.0, 0.0);
        Ok(Self {
            amplitudes,
            half_width,
            t: 0.0,
            phase_accumulator: 0.0,
            overflow_threshold: DEFAULT_OVERFLOW_THRESHOLD,
        })
    }

    /// Build from explicit amplitudes; must be normalized.
    pub fn from_amplitudes(half_width: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        let mut s = Self::ground(half_width)?;
        if amplitudes.len() != s.dim() {
            return Err(Error::InvalidParameter(format!(
                "expected {} amplitudes, got {}",
                s.dim(),
                amplitudes.len()
            )));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!("state not normalized: |psi|^2 = {norm}")));
        }
        s.amplitudes = amplitudes;
        Ok(s)
    }

    pub fn with_overflow_threshold(mut self, threshold: f64) -> Self {
        self.overflow_threshold = threshold;
        self
    }

    pub fn overflow_threshold(&self) -> f64 {
        self.overflow_threshold
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn dim(&self) -> usize {
        2 * self.rungs()
    }

    fn rungs(&self) -> usize {
        2 * self.half_width + 1
    }

    pub fn index(&self, level: Level, n: i32) -> Option<usize> {
        let nmax = self.half_width as i32;
        (n.abs() <= nmax).then(|| level.offset() * self.rungs() + (n + nmax) as usize)
    }

    /// Level and momentum index of basis slot `i`.
    pub fn label(&self, i: usize) -> (Level, i32) {
        let r = self.rungs();
        let level = if i < r { Level::F2 } else { Level::F3 };
        (level, (i % r) as i32 - self.half_width as i32)
    }

    pub fn amplitude(&self, level: Level, n: i32) -> Complex64 {
        self.index(level, n)
            .map(|i| self.amplitudes[i])
            .unwrap_or_default()
    }

    pub fn population(&self, level: Level, n: i32) -> f64 {
        self.amplitude(level, n).norm_sqr()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Mutable amplitudes; normalization is the caller's responsibility.
    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Total population on the outermost rungs |n| = N.
    pub fn edge_population(&self) -> f64 {
        let n = self.half_width as i32;
        [Level::F2, Level::F3]
            .iter()
            .map(|&l| self.population(l, n) + self.population(l, -n))
            .sum()
    }

    fn check_overflow(&self) -> Result<()> {
        let edge = self.edge_population();
        if edge > self.overflow_threshold {
            return Err(Error::LadderOverflow {
                edge_population: edge,
                threshold: self.overflow_threshold,
                half_width: self.half_width,
                velocity: None,
            });
        }
        Ok(())
    }
}

/// One rectangular Raman pulse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseSpec {
    /// Duration, s.
    pub duration: f64,
    /// Modulation-frequency offset from omega_hfs at pulse start, rad/s.
    pub omega_mod_start: f64,
    /// Linear chirp of the modulation frequency during the pulse, rad/s^2.
    pub chirp_rate: f64,
    pub channels: ChannelSet,
    /// Channel the frequency was tuned to. Used for labelling and by the
    /// ideal beam-splitter model.
    pub target: Channel,
    /// Laser phase offset applied to every channel, rad.
    pub phase: f64,
    /// Number of piecewise-constant slices.
    pub substeps: usize,
    pub label: String,
}

impl PulseSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "pulse duration must be > 0, got {}",
                self.duration
            )));
        }
        if self.substeps < 1 {
            return Err(Error::InvalidParameter("pulse substeps must be >= 1".into()));
        }
        if !(self.omega_mod_start.is_finite() && self.chirp_rate.is_finite() && self.phase.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite pulse frequency or phase in {}", self.label)));
        }
        self.channels.validate()
    }

    #[inline]
    pub fn offset_at(&self, dt_from_start: f64) -> f64 {
        self.omega_mod_start + self.chirp_rate * dt_from_start
    }

    /// Pulse area Omega tau on the target channel.
    pub fn area(&self) -> f64 {
        self.channels.rabi(self.target) * self.duration
    }
}

/// Free evolution interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapSpec {
    pub duration: f64,
}

impl GapSpec {
    pub fn new(duration: f64) -> Result<Self> {
        if !(duration.is_finite() && duration >= 0.0) {
            return Err(Error::InvalidTiming(format!("gap duration must be >= 0, got {duration}")));
        }
        Ok(Self { duration })
    }
}

/// Diagonal kinetic term D(2, n) = n k_eff v(t) + n^2 w_rec.
#[inline]
fn kinetic(n: f64, kv: f64, w_rec: f64) -> f64 {
    n * kv + n * n * w_rec
}

/// Hermitian rotating-frame Hamiltonian in sparse form: the real diagonal
/// plus one entry per coupled (F = 2, F = 3) pair.
#[derive(Debug, Clone)]
struct SparseHamiltonian {
    diag: Vec<f64>,
    /// (F = 2 slot, F = 3 slot, element <F=3|H|F=2>).
    couplings: Vec<(usize, usize, Complex64)>,
}

impl SparseHamiltonian {
    /// H at time `t`. With `step > 0` the couplings carry the fourth-order
    /// Magnus correction for a slice of that length centred on `t`: the
    /// diagonal is linear in time with slope b, so the commutator term
    /// (i step^2 / 12) [H, b] only rescales each coupling by
    /// 1 + i step^2 (b_2 - b_3) / 12, where b_2 - b_3 = chirp - s k_eff g.
    fn assemble(
        half_width: usize,
        species: &AtomSpecies,
        kin: &KinematicState,
        channels: &ChannelSet,
        offset: f64,
        chirp_rate: f64,
        t: f64,
        step: f64,
    ) -> Self {
        let rungs = 2 * half_width + 1;
        let nmax = half_width as i32;
        let kv = species.k_eff * kin.velocity_at(t);
        let w_rec = recoil_frequency(species);
        let mut diag = vec![0.0; 2 * rungs];
        for n in -nmax..=nmax {
            let i2 = (n + nmax) as usize;
            let d = kinetic(f64::from(n), kv, w_rec);
            diag[i2] = d;
            diag[rungs + i2] = d - offset;
        }
        let mut couplings = Vec::with_capacity(3 * rungs);
        for ch in Channel::ALL {
            let half_rabi = 0.5 * channels.rabi(ch);
            if half_rabi == 0.0 {
                continue;
            }
            let s = ch.sign();
            let slope = chirp_rate - f64::from(s) * species.k_eff * kin.g;
            let value = Complex64::new(half_rabi, half_rabi * step * step * slope / 12.0);
            for n in -nmax..=nmax {
                let m = n + s;
                if m.abs() > nmax {
                    continue;
                }
                couplings.push(((n + nmax) as usize, rungs + (m + nmax) as usize, value));
            }
        }
        Self { diag, couplings }
    }

    fn dense(&self) -> DMatrix<Complex64> {
        let dim = self.diag.len();
        let mut h = DMatrix::<Complex64>::from_diagonal(&DVector::from_iterator(
            dim,
            self.diag.iter().map(|&d| Complex64::new(d, 0.0)),
        ));
        for &(i2, i3, x) in &self.couplings {
            h[(i3, i2)] += x;
            h[(i2, i3)] += x.conj();
        }
        debug_assert_eq!(h.nrows(), dim);
        h
    }

    /// Gershgorin bounds on the spectrum.
    fn spectral_bounds(&self) -> (f64, f64) {
        let mut radius = vec![0.0; self.diag.len()];
        for &(i2, i3, x) in &self.couplings {
            radius[i2] += x.norm();
            radius[i3] += x.norm();
        }
        let lo = self.diag.iter().zip(&radius).map(|(d, r)| d - r).fold(f64::INFINITY, f64::min);
        let hi = self.diag.iter().zip(&radius).map(|(d, r)| d + r).fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }
}

/// Rotating-frame Hamiltonian (rad/s) at time `t` within `pulse`, whose
/// modulation frequency is evaluated at `t - pulse_start`.
pub fn build_hamiltonian(
    half_width: usize,
    species: &AtomSpecies,
    kin: &KinematicState,
    pulse: &PulseSpec,
    pulse_start: f64,
    t: f64,
) -> DMatrix<Complex64> {
    let offset = pulse.offset_at(t - pulse_start);
    let real =
        SparseHamiltonian::assemble(half_width, species, kin, &pulse.channels, offset, pulse.chirp_rate, t, 0.0)
            .dense();
    let rungs = 2 * half_width + 1;
    let up = Complex64::from_polar(1.0, pulse.phase);
    let h = DMatrix::from_fn(real.nrows(), real.ncols(), |r, c| {
        let x = real[(r, c)];
        match (r >= rungs, c >= rungs) {
            (true, false) => x * up,
            (false, true) => x * up.conj(),
            _ => x,
        }
    });
    debug_assert!(is_hermitian(&h, 1e-9), "Hamiltonian assembly is not Hermitian");
    h
}

fn is_hermitian(h: &DMatrix<Complex64>, tol: f64) -> bool {
    let scale = h.iter().map(|z| z.norm()).fold(1.0, f64::max);
    (0..h.nrows()).all(|r| (0..h.ncols()).all(|c| (h[(r, c)] - h[(c, r)].conj()).norm() <= tol * scale))
}

/// Matrix-exponential kernel used for each piecewise-constant slice.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExpKernel {
    /// Chebyshev expansion of exp(-i H dt) applied to the state vector,
    /// truncated below double precision.
    #[default]
    Chebyshev,
    /// Full eigendecomposition of H.
    Eigen,
}

/// psi <- exp(-i H dt) psi via eigendecomposition.
fn apply_exp_eigen(h: &SparseHamiltonian, dt: f64, psi: &mut [Complex64]) {
    let dim = psi.len();
    let eig = SymmetricEigen::new(h.dense());
    let v = &eig.eigenvectors;
    let mut c = v.ad_mul(&DVector::from_column_slice(psi));
    for k in 0..dim {
        c[k] *= Complex64::from_polar(1.0, -eig.eigenvalues[k] * dt);
    }
    let out = v * c;
    psi.copy_from_slice(out.as_slice());
}

/// Bessel functions J_0..J_m of real argument x >= 0 by Miller's backward
/// recurrence, normalized with J_0 + 2 sum J_2k = 1.
fn bessel_j_sequence(x: f64, m: usize) -> Vec<f64> {
    let mut out = vec![0.0; m + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let start = m.max(x as usize) + 32 + (x.sqrt() as usize) * 4;
    let start = start + (start & 1);
    let (mut jp1, mut j) = (0.0_f64, 1e-300_f64);
    let mut norm = 0.0;
    for k in (0..=start).rev() {
        if k <= m {
            out[k] = j;
        }
        if k % 2 == 0 {
            norm += if k == 0 { j } else { 2.0 * j };
        }
        if k == 0 {
            break;
        }
        let jm1 = 2.0 * k as f64 / x * j - jp1;
        jp1 = j;
        j = jm1;
        if j.abs() > 1e250 {
            // Rescale to keep the recurrence finite.
            j *= 1e-250;
            jp1 *= 1e-250;
            norm *= 1e-250;
            for o in out.iter_mut() {
                *o *= 1e-250;
            }
        }
    }
    for o in out.iter_mut() {
        *o /= norm;
    }
    out
}

/// Expansion length: |J_k(rho)| < 1e-17 for all k >= this, rho in [0.5, 256].
fn chebyshev_terms(rho: f64) -> usize {
    (rho + 11.0 * rho.cbrt() + 6.0).ceil() as usize
}

/// psi <- exp(-i H dt) psi via Chebyshev expansion.
fn apply_exp_chebyshev(h: &SparseHamiltonian, dt: f64, psi: &mut [Complex64]) {
    let (lo, hi) = h.spectral_bounds();
    let center = 0.5 * (hi + lo);
    let half = (0.5 * (hi - lo)).max(1e-300);
    let rho = half * dt;
    let terms = chebyshev_terms(rho);
    let bessel = bessel_j_sequence(rho, terms);

    // Operator scaled to spectrum [-1, 1].
    let diag: Vec<f64> = h.diag.iter().map(|d| (d - center) / half).collect();
    let couplings: Vec<(usize, usize, Complex64)> =
        h.couplings.iter().map(|&(i2, i3, v)| (i2, i3, v / half)).collect();
    let apply = |x: &[Complex64], out: &mut [Complex64]| {
        for ((o, xi), d) in out.iter_mut().zip(x).zip(&diag) {
            *o = xi * d;
        }
        for &(i2, i3, v) in &couplings {
            out[i3] += x[i2] * v;
            out[i2] += x[i3] * v.conj();
        }
    };

    let dim = psi.len();
    let mut prev = psi.to_vec();
    let mut cur = vec![Complex64::default(); dim];
    let mut next = vec![Complex64::default(); dim];
    apply(&prev, &mut cur);

    // (-i)^k cycles through 1, -i, -1, i.
    let phases = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, -1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, 1.0),
    ];
    let c1 = phases[1] * (2.0 * bessel[1]);
    let mut acc: Vec<Complex64> = prev.iter().zip(&cur).map(|(p, c)| p * bessel[0] + c * c1).collect();
    for k in 2..=terms {
        apply(&cur, &mut next);
        let coeff = phases[k % 4] * (2.0 * bessel[k]);
        for ((n, p), a) in next.iter_mut().zip(&prev).zip(acc.iter_mut()) {
            *n = *n * 2.0 - p;
            *a += *n * coeff;
        }
        std::mem::swap(&mut prev, &mut cur);
        std::mem::swap(&mut cur, &mut next);
    }
    let global = Complex64::from_polar(1.0, -center * dt);
    for (z, a) in psi.iter_mut().zip(acc) {
        *z = a * global;
    }
}

/// Rotate the F = 3 amplitudes by exp(i angle).
fn rotate_upper(state: &mut LadderState, angle: f64) {
    if angle == 0.0 {
        return;
    }
    let r = state.rungs();
    let f = Complex64::from_polar(1.0, angle);
    for a in &mut state.amplitudes[r..] {
        *a *= f;
    }
}

/// Evolve through one rectangular pulse starting at `state.t`.
pub fn evolve_pulse(
    state: &LadderState,
    species: &AtomSpecies,
    kin: &KinematicState,
    pulse: &PulseSpec,
) -> Result<LadderState> {
    evolve_pulse_with(state, species, kin, pulse, ExpKernel::default())
}

/// [`evolve_pulse`] with an explicit exponential kernel.
pub fn evolve_pulse_with(
    state: &LadderState,
    species: &AtomSpecies,
    kin: &KinematicState,
    pulse: &PulseSpec,
    kernel: ExpKernel,
) -> Result<LadderState> {
    pulse.validate()?;
    let mut out = state.clone();
    let t0 = state.t;
    let dt = pulse.duration / pulse.substeps as f64;
    // H = G H_0 G^dagger with G = diag(1, exp(i phase)) on (F=2, F=3).
    rotate_upper(&mut out, -pulse.phase);
    for k in 0..pulse.substeps {
        let rel = (k as f64 + 0.5) * dt;
        let h = SparseHamiltonian::assemble(
            state.half_width,
            species,
            kin,
            &pulse.channels,
            pulse.offset_at(rel),
            pulse.chirp_rate,
            t0 + rel,
            dt,
        );
        match kernel {
            ExpKernel::Chebyshev => apply_exp_chebyshev(&h, dt, &mut out.amplitudes),
            ExpKernel::Eigen => apply_exp_eigen(&h, dt, &mut out.amplitudes),
        }
    }
    rotate_upper(&mut out, pulse.phase);
    out.t = t0 + pulse.duration;
    out.phase_accumulator +=
        pulse.omega_mod_start * pulse.duration + 0.5 * pulse.chirp_rate * pulse.duration * pulse.duration;
    out.check_overflow()?;
    Ok(out)
}

/// Exact free evolution over `gap`, laser frame given by `schedule`.
pub fn evolve_free(
    state: &LadderState,
    species: &AtomSpecies,
    kin: &KinematicState,
    gap: &GapSpec,
    schedule: &FrequencySchedule,
) -> LadderState {
    let mut out = state.clone();
    if gap.duration == 0.0 {
        return out;
    }
    let (t1, t2) = (state.t, state.t + gap.duration);
    let laser_phase = schedule.phase_between(t1, t2);
    free_phases(&mut out, species, kin, t1, t2, laser_phase);
    out.t = t2;
    out.phase_accumulator += laser_phase;
    out
}

fn free_phases(
    state: &mut LadderState,
    species: &AtomSpecies,
    kin: &KinematicState,
    t1: f64,
    t2: f64,
    laser_phase: f64,
) {
    // Integral of k v(t) dt and of w_rec dt over the interval.
    let tau = t2 - t1;
    let doppler = species.k_eff * (kin.v0 * tau + 0.5 * kin.g * (t2 * t2 - t1 * t1));
    let recoil = recoil_frequency(species) * tau;
    let r = state.rungs();
    for i in 0..state.dim() {
        let (level, n) = state.label(i);
        let n = f64::from(n);
        let mut theta = n * doppler + n * n * recoil;
        if level == Level::F3 {
            theta -= laser_phase;
        }
        debug_assert_eq!(i >= r, level == Level::F3);
        state.amplitudes[i] *= Complex64::from_polar(1.0, -theta);
    }
}

/// Idealized pulse: perfect rotation by the pulse area on every
/// (|2, n>, |3, n + s>) pair of the target channel, applied at the pulse
/// midpoint with free evolution on either side. Detuning, Doppler spread and
/// the other channels are ignored. Only meant for analytic cross-checks.
pub fn apply_ideal_pulse(
    state: &LadderState,
    species: &AtomSpecies,
    kin: &KinematicState,
    pulse: &PulseSpec,
    schedule: &FrequencySchedule,
) -> Result<LadderState> {
    pulse.validate()?;
    let half = GapSpec { duration: 0.5 * pulse.duration };
    let mut out = evolve_free(state, species, kin, &half, schedule);
    let theta = 0.5 * pulse.area();
    let (c, s) = (theta.cos(), theta.sin());
    let nmax = state.half_width as i32;
    let shift = pulse.target.sign();
    let coupling = Complex64::new(0.0, -s) * Complex64::from_polar(1.0, pulse.phase);
    for n in -nmax..=nmax {
        let (Some(i2), Some(i3)) = (out.index(Level::F2, n), out.index(Level::F3, n + shift)) else {
            continue;
        };
        let (a2, a3) = (out.amplitudes[i2], out.amplitudes[i3]);
        out.amplitudes[i2] = a2 * c + coupling.conj() * a3 * -1.0;
        out.amplitudes[i3] = coupling * a2 + a3 * c;
    }
    let out = evolve_free(&out, species, kin, &half, schedule);
    out.check_overflow()?;
    Ok(out)
}

/// Total F = 3 population.
pub fn detect_population_f3(state: &LadderState) -> f64 {
    let r = state.rungs();
    state.amplitudes[r..].iter().map(|a| a.norm_sqr()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const OMEGA: f64 = 2.0 * PI * 50e3;

    fn single(channel: Channel, offset: f64, duration: f64) -> PulseSpec {
        PulseSpec {
            duration,
            omega_mod_start: offset,
            chirp_rate: 0.0,
            channels: ChannelSet::only(channel, OMEGA).unwrap(),
            target: channel,
            phase: 0.0,
            substeps: 4,
            label: "test".into(),
        }
    }

    fn rabi_formula(omega: f64, delta: f64, tau: f64) -> f64 {
        let r2 = omega * omega + delta * delta;
        omega * omega / r2 * (0.5 * r2.sqrt() * tau).sin().powi(2)
    }

    fn still() -> KinematicState {
        KinematicState::new(0.196, 0.0)
    }

    #[test]
    fn hamiltonian_is_diagonal_without_drive() {
        let rb = AtomSpecies::rb85();
        let mut p = single(Channel::Plus, 0.0, 1e-5);
        p.channels = ChannelSet::uniform(0.0).unwrap();
        let h = build_hamiltonian(2, &rb, &still(), &p, 0.0, 0.0);
        for r in 0..h.nrows() {
            for c in 0..h.ncols() {
                if r != c {
                    assert_eq!(h[(r, c)], Complex64::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn resonance_condition_on_plus_channel() {
        let rb = AtomSpecies::rb85();
        let kin = still();
        let res = crate::physics::resonant_offset(&rb, &kin, Channel::Plus, 0.0);
        let p = single(Channel::Plus, res, 1e-5);
        let h = build_hamiltonian(2, &rb, &kin, &p, 0.0, 0.0);
        let s = LadderState::ground(2).unwrap();
        let i20 = s.index(Level::F2, 0).unwrap();
        let i31 = s.index(Level::F3, 1).unwrap();
        assert!((h[(i31, i31)] - h[(i20, i20)]).norm() < 1e-6);
        assert!((h[(i31, i20)].re - OMEGA / 2.0).abs() < 1e-9);
    }

    #[test]
    fn detuning_of_side_block_at_hfs() {
        // n = 0, g = 0, w_mod = w_hfs: D(3, s) - D(2, 0) = s k v0 + w_rec.
        let rb = AtomSpecies::rb85();
        let kin = still();
        let p = single(Channel::Plus, 0.0, 1e-5);
        let h = build_hamiltonian(2, &rb, &kin, &p, 0.0, 0.0);
        let s = LadderState::ground(2).unwrap();
        let wr = recoil_frequency(&rb);
        let kv = rb.k_eff * kin.v0;
        for sign in [1, -1] {
            let d = h[(s.index(Level::F3, sign).unwrap(), s.index(Level::F3, sign).unwrap())].re
                - h[(s.index(Level::F2, 0).unwrap(), s.index(Level::F2, 0).unwrap())].re;
            assert!((d - (f64::from(sign) * kv + wr)).abs() < 1e-6);
        }
    }

    #[test]
    fn hamiltonian_with_phase_is_hermitian() {
        let rb = AtomSpecies::rb85();
        let mut p = single(Channel::Plus, 1e5, 1e-5);
        p.channels = ChannelSet::new(OMEGA, 0.7 * OMEGA, 1.3 * OMEGA).unwrap();
        p.phase = 0.83;
        let h = build_hamiltonian(3, &rb, &KinematicState::new(0.1, 9.81), &p, 0.0, 4e-6);
        assert!(is_hermitian(&h, 1e-14));
    }

    #[test]
    fn perfect_pi_and_two_pi_pulses() {
        let rb = AtomSpecies::rb85();
        let kin = still();
        for ch in [Channel::Plus, Channel::Minus, Channel::Co] {
            let res = crate::physics::resonant_offset(&rb, &kin, ch, 0.0);
            let s0 = LadderState::ground(2).unwrap();
            let pi = evolve_pulse(&s0, &rb, &kin, &single(ch, res, PI / OMEGA)).unwrap();
            assert!((pi.population(Level::F3, ch.sign()) - 1.0).abs() < 1e-6);
            assert!((detect_population_f3(&pi) - 1.0).abs() < 1e-6);
            let two_pi = evolve_pulse(&s0, &rb, &kin, &single(ch, res, 2.0 * PI / OMEGA)).unwrap();
            assert!((two_pi.population(Level::F2, 0) - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn half_pi_pulse_splits_evenly() {
        let rb = AtomSpecies::rb85();
        let kin = still();
        let res = crate::physics::resonant_offset(&rb, &kin, Channel::Plus, 0.0);
        let s0 = LadderState::ground(1).unwrap().with_overflow_threshold(1.0);
        let s = evolve_pulse(&s0, &rb, &kin, &single(Channel::Plus, res, 0.5 * PI / OMEGA)).unwrap();
        assert!((detect_population_f3(&s) - 0.5).abs() < 1e-6);
        assert_eq!(detect_population_f3(&LadderState::ground(1).unwrap()), 0.0);
    }

    #[test]
    fn detuned_pulse_matches_rabi_formula() {
        let rb = AtomSpecies::rb85();
        let kin = still();
        let res = crate::physics::resonant_offset(&rb, &kin, Channel::Plus, 0.0);
        for &(delta, tau) in &[(2.0 * PI * 20e3, 7e-6), (-2.0 * PI * 80e3, 13e-6), (2.0 * PI * 5e3, 31e-6)] {
            let s = evolve_pulse(
                &LadderState::ground(1).unwrap().with_overflow_threshold(1.0),
                &rb,
                &kin,
                &single(Channel::Plus, res + delta, tau),
            )
            .unwrap();
            // Laser above resonance by delta: detuning sign does not enter the formula.
            assert!((detect_population_f3(&s) - rabi_formula(OMEGA, delta, tau)).abs() < 1e-6);
        }
    }

    #[test]
    fn free_evolution_phases() {
        let rb = AtomSpecies::rb85();
        let kin = still();
        let tau = 37e-6;
        let sched = FrequencySchedule::constant(1.234e5, 0.0);
        let mut amps = vec![Complex64::new(0.0, 0.0); 6];
        let probe = LadderState::ground(1).unwrap();
        let i20 = probe.index(Level::F2, 0).unwrap();
        let i21 = probe.index(Level::F2, 1).unwrap();
        amps[i20] = Complex64::new(0.6, 0.0);
        amps[i21] = Complex64::new(0.8, 0.0);
        let s = LadderState::from_amplitudes(1, amps).unwrap();
        let out = evolve_free(&s, &rb, &kin, &GapSpec::new(tau).unwrap(), &sched);
        assert_eq!(out.amplitude(Level::F2, 0), Complex64::new(0.6, 0.0));
        let expect = -(rb.k_eff * kin.v0 + recoil_frequency(&rb)) * tau;
        let got = (out.amplitude(Level::F2, 1) / 0.8).arg();
        let diff = (got - expect).rem_euclid(2.0 * PI);
        assert!(diff < 1e-9 || (2.0 * PI - diff) < 1e-9, "{got} vs {expect}");
        for i in 0..s.dim() {
            assert!((out.amplitudes()[i].norm() - s.amplitudes()[i].norm()).abs() < 1e-15);
        }
        assert!((out.phase_accumulator - 1.234e5 * tau).abs() < 1e-9);
    }

    #[test]
    fn overflow_is_reported() {
        let rb = AtomSpecies::rb85();
        let kin = still();
        let res = crate::physics::resonant_offset(&rb, &kin, Channel::Plus, 0.0);
        let s = LadderState::ground(1).unwrap();
        // pi pulse on the plus channel puts everything on n = 1 = N.
        let err = evolve_pulse(&s, &rb, &kin, &single(Channel::Plus, res, PI / OMEGA)).unwrap_err();
        assert!(matches!(err, Error::LadderOverflow { half_width: 1, .. }));
        let lenient = s.with_overflow_threshold(1.1);
        assert!(evolve_pulse(&lenient, &rb, &kin, &single(Channel::Plus, res, PI / OMEGA)).is_ok());
    }

    #[test]
    fn phase_offset_matches_complex_exponential() {
        // Gauge trick vs direct exponential of the complex Hamiltonian.
        let rb = AtomSpecies::rb85();
        let kin = KinematicState::new(0.05, 0.0);
        let mut p = single(Channel::Plus, 3e5, 9e-6);
        p.channels = ChannelSet::new(OMEGA, 0.8 * OMEGA, 0.5 * OMEGA).unwrap();
        p.phase = 1.1;
        p.substeps = 1;
        let s0 = LadderState::ground(3).unwrap().with_overflow_threshold(1.0);
        let got = evolve_pulse(&s0, &rb, &kin, &p).unwrap();

        let h = build_hamiltonian(3, &rb, &kin, &p, 0.0, 0.5 * p.duration);
        let eig = h.symmetric_eigen();
        let v = &eig.eigenvectors;
        let psi0 = nalgebra::DVector::from_vec(s0.amplitudes().to_vec());
        let c = v.adjoint() * psi0;
        let c = nalgebra::DVector::from_iterator(
            c.len(),
            c.iter()
                .zip(eig.eigenvalues.iter())
                .map(|(a, &e)| a * Complex64::from_polar(1.0, -e * p.duration)),
        );
        let psi = v * c;
        for (a, b) in got.amplitudes().iter().zip(psi.iter()) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn bessel_values() {
        // scipy.special.jv
        let j = bessel_j_sequence(2.5, 4);
        let want = [-0.048_383_776_468_197_92, 0.497_094_102_464_274_1, 0.446_059_058_439_617_24, 0.216_600_391_039_113_58, 0.073_781_880_054_255_23];
        for (a, b) in j.iter().zip(want) {
            assert!((a - b).abs() < 1e-14, "{a} {b}");
        }
        let j = bessel_j_sequence(60.0, 80);
        assert!((j[0] + 0.091_471_804_089_061_89).abs() < 1e-13);
        assert!((j[70] - 0.001_436_386_052_336_112).abs() < 1e-13, "{}", j[70]);
    }

    #[test]
    fn chebyshev_truncation_is_below_double_precision() {
        for rho in [0.5, 1.0, 3.0, 10.0, 16.0, 40.0, 100.0, 256.0] {
            let k = chebyshev_terms(rho);
            let j = bessel_j_sequence(rho, k + 20);
            assert!(j[k..].iter().all(|x| x.abs() < 1e-16), "rho {rho}");
        }
    }

    #[test]
    fn chebyshev_kernel_matches_eigendecomposition() {
        let rb = AtomSpecies::rb85();
        let kin = KinematicState::new(0.196, 9.81);
        for (offset, tau, sub) in [(3.1e6, 1e-5, 1), (-3.3e6, 2.2e-5, 3), (0.0, 5e-6, 8), (1e5, 4e-4, 2)] {
            let p = PulseSpec {
                duration: tau,
                omega_mod_start: offset,
                chirp_rate: 2e8,
                channels: ChannelSet::new(OMEGA, 1.2 * OMEGA, 0.9 * OMEGA).unwrap(),
                target: Channel::Plus,
                phase: 0.4,
                substeps: sub,
                label: "k".into(),
            };
            let mut s0 = LadderState::ground(5).unwrap().with_overflow_threshold(1.0);
            s0.t = 3e-4;
            let a = evolve_pulse_with(&s0, &rb, &kin, &p, ExpKernel::Chebyshev).unwrap();
            let b = evolve_pulse_with(&s0, &rb, &kin, &p, ExpKernel::Eigen).unwrap();
            for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
                assert!((x - y).norm() < 1e-11, "{x} vs {y}");
            }
            assert!((a.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ideal_pulse_transfers_every_rung() {
        let rb = AtomSpecies::rb85();
        let kin = KinematicState::new(0.196, 9.81);
        let sched = FrequencySchedule::constant(0.0, 0.0);
        let mut p = single(Channel::Plus, 0.0, PI / OMEGA);
        p.channels = ChannelSet::uniform(OMEGA).unwrap();
        let s = apply_ideal_pulse(&LadderState::ground(3).unwrap(), &rb, &kin, &p, &sched).unwrap();
        assert!((s.population(Level::F3, 1) - 1.0).abs() < 1e-12);
        p.target = Channel::Minus;
        let s = apply_ideal_pulse(&s, &rb, &kin, &p, &sched).unwrap();
        assert!((s.population(Level::F2, 2) - 1.0).abs() < 1e-12);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn pulses_are_unitary(
                offset in -2e6f64..2e6, tau in 1e-6f64..4e-5, phase in -3.0f64..3.0,
                v0 in -0.3f64..0.3, chirp in -1e9f64..1e9
            ) {
                let rb = AtomSpecies::rb85();
                let kin = KinematicState::new(v0, 9.81);
                let p = PulseSpec {
                    duration: tau,
                    omega_mod_start: offset,
                    chirp_rate: chirp,
                    channels: ChannelSet::uniform(OMEGA).unwrap(),
                    target: Channel::Plus,
                    phase,
                    substeps: 3,
                    label: "p".into(),
                };
                let s = LadderState::ground(4).unwrap().with_overflow_threshold(1.0);
                let out = evolve_pulse(&s, &rb, &kin, &p).unwrap();
                prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
                let f3 = detect_population_f3(&out);
                prop_assert!((-1e-12..=1.0 + 1e-12).contains(&f3));
            }
        }
    }
}
