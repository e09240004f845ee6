//! Thermal-cloud averaging over the 1-D velocity distribution along the
//! beam axis. Transverse motion and position spread are ignored: neither
//! enters the detuning for plane-wave beams of uniform intensity.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::physics::{thermal_sigma_v, AtomSpecies, KinematicState};
use crate::propagator::{
    apply_ideal_pulse, detect_population_f3, evolve_free, evolve_pulse_with, ExpKernel, LadderState,
    DEFAULT_OVERFLOW_THRESHOLD,
};
use crate::sequencer::{Element, Sequence};
use crate::summation::neumaier_sum;

pub const DEFAULT_GH_ORDER: usize = 40;
pub const GRID_SPAN_SIGMAS: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sampling {
    /// Gauss-Hermite of the default order for single-pulse sequences, a
    /// velocity grid from [`recommended_grid_points`] otherwise.
    Auto,
    MonteCarlo { count: usize, seed: u64 },
    GaussHermite { order: usize },
    /// Trapezoid rule on `points` equally spaced velocities over
    /// +-GRID_SPAN_SIGMAS standard deviations, Gaussian weights.
    VelocityGrid { points: usize },
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling::Auto
    }
}

impl Sampling {
    /// Concrete strategy for `seq`.
    pub fn resolve(self, seq: &Sequence, species: &AtomSpecies, temperature: f64) -> Sampling {
        match self {
            Sampling::Auto if seq.pulse_count() <= 1 => Sampling::GaussHermite { order: DEFAULT_GH_ORDER },
            Sampling::Auto => Sampling::VelocityGrid {
                points: recommended_grid_points(seq, species, temperature),
            },
            other => other,
        }
    }
}

/// Velocity-grid size that resolves the slowest-averaging open paths of `seq`.
///
/// After free evolution a pair of paths whose momenta differed by dn hbar k
/// for a total time t carries a factor exp(i k v dn t). Across the Gaussian
/// these average to nearly zero, but a grid of step h aliases frequency
/// k dn t onto 2 pi / h. The step is chosen so that every dn <= 2n + 3 over
/// the whole sequence stays below the first alias by 8 Doppler widths.
pub fn recommended_grid_points(seq: &Sequence, species: &AtomSpecies, temperature: f64) -> usize {
    let sigma = thermal_sigma_v(species, temperature);
    if sigma == 0.0 {
        return 3;
    }
    let dn = (2 * seq.lmt_order + 3) as f64;
    let h = std::f64::consts::TAU / (species.k_eff * dn * seq.total_duration() + 8.0 / sigma);
    2 * (GRID_SPAN_SIGMAS * sigma / h).ceil() as usize + 1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    /// Cloud temperature, K.
    pub temperature: f64,
    /// Mean velocity along the beam axis at sequence start, m/s.
    pub v0_bias: f64,
    /// Acceleration along the beam axis, m/s^2.
    pub g: f64,
    /// Fall time before the sequence, s, when `v0_bias` was derived from it.
    pub t_fall: Option<f64>,
    pub sampling: Sampling,
}

impl EnsembleSpec {
    pub fn new(temperature: f64, v0_bias: f64, g: f64, sampling: Sampling) -> Result<Self> {
        let spec = Self {
            temperature,
            v0_bias,
            g,
            t_fall: None,
            sampling,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Cloud released `t_fall` before the sequence: v0_bias = g t_fall.
    pub fn from_fall_time(temperature: f64, g: f64, t_fall: f64, sampling: Sampling) -> Result<Self> {
        if !(t_fall.is_finite() && t_fall >= 0.0) {
            return Err(Error::InvalidParameter(format!("fall time must be >= 0, got {t_fall}")));
        }
        let mut spec = Self::new(temperature, g * t_fall, g, sampling)?;
        spec.t_fall = Some(t_fall);
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.temperature.is_finite() && self.temperature >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "temperature must be >= 0, got {}",
                self.temperature
            )));
        }
        if !self.v0_bias.is_finite() || !self.g.is_finite() {
            return Err(Error::InvalidParameter("v0_bias and g must be finite".into()));
        }
        match self.sampling {
            Sampling::MonteCarlo { count: 0, .. } => {
                Err(Error::InvalidParameter("Monte Carlo count must be >= 1".into()))
            }
            Sampling::GaussHermite { order: 0 } => {
                Err(Error::InvalidParameter("Gauss-Hermite order must be >= 1".into()))
            }
            Sampling::VelocityGrid { points } if points < 2 || points % 2 == 0 => Err(
                Error::InvalidParameter(format!("velocity grid needs an odd point count >= 3, got {points}")),
            ),
            _ => Ok(()),
        }?;
        if let Some(t) = self.t_fall {
            if (self.v0_bias - self.g * t).abs() > 1e-12 * self.v0_bias.abs().max(1.0) {
                return Err(Error::InvalidParameter("v0_bias must equal g * t_fall".into()));
            }
        }
        Ok(())
    }
}

/// Nodes and weights of `order`-point Gauss-Hermite quadrature for the
/// weight exp(-x^2), ascending. Golub-Welsch start, Newton polish on the
/// orthonormal recurrence, weights from the Christoffel function.
pub fn gauss_hermite(order: usize) -> Vec<(f64, f64)> {
    assert!(order >= 1);
    let n = order;
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = (k as f64 / 2.0).sqrt();
        jacobi[(k, k - 1)] = b;
        jacobi[(k - 1, k)] = b;
    }
    let mut nodes: Vec<f64> = SymmetricEigen::new(jacobi).eigenvalues.iter().copied().collect();
    nodes.sort_by(f64::total_cmp);

    // Orthonormal Hermite polynomials p_0..p_n at x; returns (p_n, p_{n-1}, sum_{k<n} p_k^2).
    let eval = |x: f64| {
        let mut prev = 0.0;
        let mut cur = std::f64::consts::PI.powf(-0.25);
        let mut sum = 0.0;
        for k in 0..n {
            sum += cur * cur;
            let next = (2.0 / (k as f64 + 1.0)).sqrt() * x * cur - (k as f64 / (k as f64 + 1.0)).sqrt() * prev;
            prev = cur;
            cur = next;
        }
        (cur, prev, sum)
    };
    let mut out = Vec::with_capacity(n);
    for mut x in nodes {
        for _ in 0..3 {
            let (pn, pn1, _) = eval(x);
            let d = (2.0 * n as f64).sqrt() * pn1;
            if d == 0.0 {
                break;
            }
            x -= pn / d;
        }
        let (_, _, sum) = eval(x);
        out.push((x, 1.0 / sum));
    }
    // Symmetrize so the mean is exact.
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let x = 0.5 * (out[j].0 - out[i].0);
        let w = 0.5 * (out[i].1 + out[j].1);
        out[i] = (-x, w);
        out[j] = (x, w);
    }
    if n % 2 == 1 {
        out[n / 2].0 = 0.0;
    }
    out
}

/// Velocity samples (v, weight) for the spec; weights sum to 1.
///
/// Without a sequence `Auto` falls back to Gauss-Hermite; use
/// [`Sampling::resolve`] first when a sequence is at hand.
pub fn sample_velocities(spec: &EnsembleSpec, species: &AtomSpecies) -> Vec<(f64, f64)> {
    let sigma = thermal_sigma_v(species, spec.temperature);
    match spec.sampling {
        Sampling::Auto => sample_velocities(
            &EnsembleSpec {
                sampling: Sampling::GaussHermite { order: DEFAULT_GH_ORDER },
                ..spec.clone()
            },
            species,
        ),
        Sampling::MonteCarlo { count, seed } => {
            let w = 1.0 / count as f64;
            if sigma == 0.0 {
                return vec![(spec.v0_bias, w); count];
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let normal = Normal::new(spec.v0_bias, sigma).expect("sigma is finite and positive");
            (0..count).map(|_| (normal.sample(&mut rng), w)).collect()
        }
        Sampling::GaussHermite { order } => {
            let rule = gauss_hermite(order);
            let total = neumaier_sum(rule.iter().map(|&(_, w)| w));
            rule.into_iter()
                .map(|(x, w)| (spec.v0_bias + std::f64::consts::SQRT_2 * sigma * x, w / total))
                .collect()
        }
        Sampling::VelocityGrid { points } => {
            let half = (points / 2) as f64;
            let step = GRID_SPAN_SIGMAS / half;
            let raw: Vec<(f64, f64)> = (0..points)
                .map(|i| {
                    let z = (i as f64 - half) * step;
                    (spec.v0_bias + sigma * z, (-0.5 * z * z).exp())
                })
                .collect();
            let total = neumaier_sum(raw.iter().map(|&(_, w)| w));
            raw.into_iter().map(|(v, w)| (v, w / total)).collect()
        }
    }
}

/// How pulses are applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PulseEngine {
    /// Full ladder evolution with the given exponential kernel.
    Physical(ExpKernel),
    /// Perfect rotations on the target channel; for analytic cross-checks only.
    IdealBeamSplitter,
}

impl Default for PulseEngine {
    fn default() -> Self {
        PulseEngine::Physical(ExpKernel::default())
    }
}

impl PulseEngine {
    fn kernel(self) -> Option<ExpKernel> {
        match self {
            PulseEngine::Physical(k) => Some(k),
            PulseEngine::IdealBeamSplitter => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunOptions {
    pub engine: PulseEngine,
    /// Ladder half-width; `None` uses the sequence default 2n + 6.
    pub half_width: Option<usize>,
    /// Override the substep count of every pulse.
    pub substeps: Option<usize>,
    /// Edge-population threshold for the heaviest sample; lighter samples
    /// get it scaled by w_max / w. `None` uses the propagator default.
    pub overflow_threshold: Option<f64>,
    pub keep_samples: bool,
}

/// Run one atom with the given kinematics through the sequence from |2, 0>.
pub fn simulate_atom(
    seq: &Sequence,
    species: &AtomSpecies,
    kin: &KinematicState,
    options: &RunOptions,
) -> Result<LadderState> {
    let half_width = options.half_width.unwrap_or_else(|| seq.default_half_width());
    let mut state = LadderState::ground(half_width)?;
    if let Some(thr) = options.overflow_threshold {
        state = state.with_overflow_threshold(thr);
    }
    for e in &seq.elements {
        state = match e {
            Element::Gap(g) => evolve_free(&state, species, kin, g, &seq.schedule),
            Element::Pulse(p) => match (options.engine.kernel(), options.substeps) {
                (None, _) => apply_ideal_pulse(&state, species, kin, p, &seq.schedule)?,
                (Some(k), None) => evolve_pulse_with(&state, species, kin, p, k)?,
                (Some(k), Some(sub)) => {
                    let mut p = p.clone();
                    p.substeps = sub;
                    evolve_pulse_with(&state, species, kin, &p, k)?
                }
            },
        };
    }
    Ok(state)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub velocity: f64,
    pub weight: f64,
    pub population_f3: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult {
    pub mean_population_f3: f64,
    /// Standard error of the mean; 0 for quadrature.
    pub stderr: f64,
    pub samples: Option<Vec<SampleRecord>>,
}

pub fn run_ensemble(seq: &Sequence, spec: &EnsembleSpec, species: &AtomSpecies) -> Result<EnsembleResult> {
    run_ensemble_with(seq, spec, species, &RunOptions::default())
}

pub fn run_ensemble_with(
    seq: &Sequence,
    spec: &EnsembleSpec,
    species: &AtomSpecies,
    options: &RunOptions,
) -> Result<EnsembleResult> {
    spec.validate()?;
    let spec = &EnsembleSpec {
        sampling: spec.sampling.resolve(seq, species, spec.temperature),
        ..spec.clone()
    };
    let samples = sample_velocities(spec, species);
    let base_threshold = options
        .overflow_threshold
        .unwrap_or(DEFAULT_OVERFLOW_THRESHOLD);
    let w_max = samples.iter().map(|s| s.1).fold(0.0, f64::max);
    let run = |v: f64, w: f64| -> Result<f64> {
        let kin = KinematicState::new(v, spec.g);
        let opts = RunOptions {
            overflow_threshold: Some(base_threshold * w_max / w),
            ..*options
        };
        simulate_atom(seq, species, &kin, &opts)
            .map(|s| detect_population_f3(&s))
            .map_err(|e| e.with_velocity(v))
    };

    if spec.temperature == 0.0 {
        // Every sample sits at v0_bias.
        let p = run(spec.v0_bias, w_max)?;
        return Ok(EnsembleResult {
            mean_population_f3: p,
            stderr: 0.0,
            samples: options.keep_samples.then(|| {
                samples
                    .iter()
                    .map(|&(v, w)| SampleRecord {
                        velocity: v,
                        weight: w,
                        population_f3: p,
                    })
                    .collect()
            }),
        });
    }

    // Ordered collection; the first failure in sample order is reported.
    let pops: Vec<Result<f64>> = samples.par_iter().map(|&(v, w)| run(v, w)).collect();
    let pops: Vec<f64> = pops.into_iter().collect::<Result<_>>()?;

    let mean = neumaier_sum(samples.iter().zip(&pops).map(|(&(_, w), &p)| w * p)).clamp(0.0, 1.0);
    let stderr = match spec.sampling {
        Sampling::MonteCarlo { count, .. } if count > 1 => {
            let ss = neumaier_sum(pops.iter().map(|p| (p - mean) * (p - mean)));
            (ss / ((count * (count - 1)) as f64)).sqrt()
        }
        _ => 0.0,
    };
    Ok(EnsembleResult {
        mean_population_f3: mean,
        stderr,
        samples: options.keep_samples.then(|| {
            samples
                .iter()
                .zip(&pops)
                .map(|(&(v, w), &p)| SampleRecord {
                    velocity: v,
                    weight: w,
                    population_f3: p,
                })
                .collect()
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_hermite_moments() {
        let pi_sqrt = std::f64::consts::PI.sqrt();
        for n in [1, 2, 5, 20, 40, 80] {
            let rule = gauss_hermite(n);
            let m0: f64 = rule.iter().map(|r| r.1).sum();
            let m2: f64 = rule.iter().map(|r| r.1 * r.0 * r.0).sum();
            assert!((m0 - pi_sqrt).abs() < 1e-12 * pi_sqrt, "n={n}");
            if n >= 2 {
                assert!((m2 - 0.5 * pi_sqrt).abs() < 1e-12, "n={n}");
            }
            if n >= 3 {
                let m4: f64 = rule.iter().map(|r| r.1 * r.0.powi(4)).sum();
                assert!((m4 - 0.75 * pi_sqrt).abs() < 1e-11, "n={n}");
            }
        }
    }

    #[test]
    fn gauss_hermite_known_nodes() {
        // Order 3: 0, +-sqrt(3/2); weights 2 sqrt(pi)/3, sqrt(pi)/6.
        let r = gauss_hermite(3);
        let s = std::f64::consts::PI.sqrt();
        assert!((r[2].0 - 1.5f64.sqrt()).abs() < 1e-15);
        assert!((r[1].1 - 2.0 * s / 3.0).abs() < 1e-15);
        assert!((r[0].1 - s / 6.0).abs() < 1e-15);
        // Largest node of order 40.
        assert!((gauss_hermite(40)[39].0 - 8.098_761_139_250_85).abs() < 1e-12);
    }

    #[test]
    fn gauss_hermite_integrates_cosine() {
        // int exp(-x^2) cos(a x) dx = sqrt(pi) exp(-a^2/4)
        let a = 3.0_f64;
        let v: f64 = gauss_hermite(40).iter().map(|(x, w)| w * (a * x).cos()).sum();
        assert!((v - std::f64::consts::PI.sqrt() * (-a * a / 4.0).exp()).abs() < 1e-13);
    }
}
