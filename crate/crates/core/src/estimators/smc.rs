//! Sequential Monte Carlo inference of an occupation from one-bit probes.
//!
//! The unknown density `θ ∈ [0, 1]` enters the probe outcome distribution
//! linearly: `P(d|θ; τ) = δ_{d,0} + (-1)^d (cos τ - 1) θ / 2`. A weighted
//! particle cloud represents the posterior; each observed bit reweights the
//! cloud, and a Liu–West kernel-shrinkage resample restores diversity when
//! the effective sample size drops below half the particle count.
//!
//! Probe angles are chosen adaptively by minimizing the Bayes risk (the
//! expected posterior variance) over a fixed candidate grid. Because the
//! likelihood is linear in `θ`, the risk of a candidate angle depends on the
//! cloud only through its first three moments, making the search cheap and
//! deterministic.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::estimators::{DensityEstimate, Method, BOUNDARY_FLAG_WIDTH};

/// Liu–West shrinkage factor `a`; the kernel width is `√(1-a²)` times the
/// posterior standard deviation.
pub const LIU_WEST_SHRINKAGE: f64 = 0.98;

/// Number of candidate probe angles on `(0, 2π]`.
pub const PROBE_GRID_POINTS: usize = 64;

/// Resampling triggers when the effective sample size falls below this
/// fraction of the particle count.
pub const RESAMPLE_FRACTION: f64 = 0.5;

/// A cloud of weighted particles over `θ ∈ [0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleCloud {
    positions: Vec<f64>,
    weights: Vec<f64>,
}

impl ParticleCloud {
    /// A uniform prior: positions drawn uniformly from `[0, 1]`, equal
    /// weights.
    pub fn uniform_prior<R: Rng>(n_particles: usize, rng: &mut R) -> Result<ParticleCloud> {
        if n_particles < 2 {
            return Err(Error::InvalidParameter(format!(
                "need at least 2 particles, got {n_particles}"
            )));
        }
        let positions = (0..n_particles).map(|_| rng.gen_range(0.0..=1.0)).collect();
        let weights = vec![1.0 / n_particles as f64; n_particles];
        Ok(ParticleCloud { positions, weights })
    }

    /// Wrap explicit positions and weights; weights are normalized and must
    /// be nonnegative with a positive sum, positions must lie in `[0, 1]`.
    pub fn from_parts(positions: Vec<f64>, weights: Vec<f64>) -> Result<ParticleCloud> {
        if positions.len() != weights.len() || positions.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "cloud needs matching position/weight lists of length >= 2, got {} and {}",
                positions.len(),
                weights.len()
            )));
        }
        if positions.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
            return Err(Error::InvalidParameter(
                "particle positions must lie in [0, 1]".into(),
            ));
        }
        if weights.iter().any(|&w| !w.is_finite() || w < 0.0) {
            return Err(Error::InvalidParameter(
                "particle weights must be finite and nonnegative".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::DegeneratePosterior);
        }
        let weights = weights.iter().map(|w| w / total).collect();
        Ok(ParticleCloud { positions, weights })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// First three raw moments `E[θ], E[θ²], E[θ³]` under the weights.
    pub fn moments(&self) -> (f64, f64, f64) {
        let mut m = (0.0, 0.0, 0.0);
        for (&p, &w) in self.positions.iter().zip(&self.weights) {
            let wp = w * p;
            m.0 += wp;
            m.1 += wp * p;
            m.2 += wp * p * p;
        }
        m
    }

    pub fn mean(&self) -> f64 {
        self.moments().0
    }

    pub fn variance(&self) -> f64 {
        let (m1, m2, _) = self.moments();
        (m2 - m1 * m1).max(0.0)
    }

    pub fn std_dev(&self) -> f64 {
        self.variance().sqrt()
    }

    /// Effective sample size `1 / Σ w²`.
    pub fn effective_sample_size(&self) -> f64 {
        let sum_sq: f64 = self.weights.iter().map(|w| w * w).sum();
        1.0 / sum_sq
    }
}

/// Outcome probability of one probe: `P(d|θ; τ)` with
/// `b = (cos τ - 1)/2 ∈ [-1, 0]`, giving `1 + bθ` for `d = 0` and `-bθ`
/// for `d = 1`. The two sum to one for every `θ` and `τ`.
pub fn smc_likelihood(d: bool, theta: f64, tau: f64) -> f64 {
    let b = (tau.cos() - 1.0) / 2.0;
    if d {
        -b * theta
    } else {
        1.0 + b * theta
    }
}

/// Bayes update for one observed bit, resampling if the effective sample
/// size drops below [`RESAMPLE_FRACTION`] of the particle count.
pub fn smc_update<R: Rng>(cloud: &mut ParticleCloud, d: bool, tau: f64, rng: &mut R) -> Result<()> {
    let mut total = 0.0;
    for (w, &p) in cloud.weights.iter_mut().zip(&cloud.positions) {
        *w *= smc_likelihood(d, p, tau);
        total += *w;
    }
    if !(total.is_finite() && total > 0.0) {
        return Err(Error::DegeneratePosterior);
    }
    for w in &mut cloud.weights {
        *w /= total;
    }
    if cloud.effective_sample_size() < RESAMPLE_FRACTION * cloud.len() as f64 {
        liu_west_resample(cloud, rng);
    }
    Ok(())
}

/// Liu–West resample: systematic ancestor selection followed by
/// mean-preserving kernel shrinkage `θ' = aθ + (1-a)μ + √(1-a²) σ ξ`,
/// with draws reflected back into `[0, 1]` so boundary mass spreads inward
/// instead of piling up as an atom.
fn liu_west_resample<R: Rng>(cloud: &mut ParticleCloud, rng: &mut R) {
    let n = cloud.len();
    let a = LIU_WEST_SHRINKAGE;
    let mu = cloud.mean();
    let kernel_sd = (1.0 - a * a).sqrt() * cloud.std_dev();

    // Systematic selection: one uniform offset, n evenly spaced targets.
    let mut ancestors = Vec::with_capacity(n);
    let start: f64 = rng.gen::<f64>() / n as f64;
    let mut cumulative = cloud.weights[0];
    let mut idx = 0usize;
    for j in 0..n {
        let target = start + j as f64 / n as f64;
        while cumulative < target && idx + 1 < n {
            idx += 1;
            cumulative += cloud.weights[idx];
        }
        ancestors.push(cloud.positions[idx]);
    }

    for (slot, anc) in cloud.positions.iter_mut().zip(ancestors) {
        let noise: f64 = rng.sample(StandardNormal);
        let mut theta = a * anc + (1.0 - a) * mu + kernel_sd * noise;
        for _ in 0..64 {
            if theta < 0.0 {
                theta = -theta;
            } else if theta > 1.0 {
                theta = 2.0 - theta;
            } else {
                break;
            }
        }
        *slot = theta.clamp(0.0, 1.0);
    }
    for w in &mut cloud.weights {
        *w = 1.0 / n as f64;
    }
}

/// A chosen probe angle and its expected posterior variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentDesign {
    pub tau: f64,
    pub expected_risk: f64,
}

/// The default candidate angles: `PROBE_GRID_POINTS` points on `(0, 2π]`.
pub fn default_probe_grid() -> Vec<f64> {
    (1..=PROBE_GRID_POINTS)
        .map(|j| j as f64 * 2.0 * std::f64::consts::PI / PROBE_GRID_POINTS as f64)
        .collect()
}

/// Pick the candidate angle minimizing the Bayes risk
/// `Σ_d P(d) Var(θ|d)`, deterministically (first minimum wins).
///
/// Linearity of the likelihood in `θ` lets the risk be written with the
/// cloud moments alone: with `b = (cos τ - 1)/2`,
/// `risk(τ) = m₂ - Σ_d (Σ w θ L(d|θ))² / P(d)`.
pub fn design_experiment_on_grid(cloud: &ParticleCloud, grid: &[f64]) -> Result<ExperimentDesign> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter(
            "candidate angle grid is empty".into(),
        ));
    }
    let (m1, m2, m3) = cloud.moments();
    let mut best: Option<ExperimentDesign> = None;
    for &tau in grid {
        let b = (tau.cos() - 1.0) / 2.0;
        // Per outcome: P(d), Σ w θ L, Σ w θ² L.
        let branches = [
            (1.0 + b * m1, m1 + b * m2, m2 + b * m3),
            (-b * m1, -b * m2, -b * m3),
        ];
        let mut risk = 0.0;
        for (p_d, num1, num2) in branches {
            if p_d > 1e-12 {
                risk += num2 - num1 * num1 / p_d;
            }
        }
        if best.is_none_or(|b| risk < b.expected_risk) {
            best = Some(ExperimentDesign {
                tau,
                expected_risk: risk,
            });
        }
    }
    Ok(best.expect("grid is nonempty"))
}

/// [`design_experiment_on_grid`] over the default candidate grid.
pub fn design_experiment(cloud: &ParticleCloud) -> Result<ExperimentDesign> {
    design_experiment_on_grid(cloud, &default_probe_grid())
}

/// Run the full adaptive inference loop.
///
/// * `sampler` performs one probe at the requested angle and returns the
///   observed bit (`false` = ancilla outcome 0).
/// * `n_experiments` bits are collected, each at the angle minimizing the
///   current Bayes risk.
/// * `seed` controls the prior draw and all resampling noise.
///
/// The estimate is the posterior mean with the posterior standard
/// deviation as its error scale. Besides the usual boundary rule, the
/// estimate is flagged when the three-sigma posterior interval leaves
/// `[0, 1]` — the regime where boundary reflection distorts the posterior
/// and the mean is systematically pulled inward.
pub fn smc_estimate<F>(
    mut sampler: F,
    n_particles: usize,
    n_experiments: u64,
    seed: u64,
) -> Result<DensityEstimate>
where
    F: FnMut(f64) -> Result<bool>,
{
    if n_experiments == 0 {
        return Err(Error::InvalidParameter(
            "need at least one experiment".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cloud = ParticleCloud::uniform_prior(n_particles, &mut rng)?;
    let grid = default_probe_grid();
    for _ in 0..n_experiments {
        let design = design_experiment_on_grid(&cloud, &grid)?;
        let d = sampler(design.tau)?;
        smc_update(&mut cloud, d, design.tau, &mut rng)?;
    }
    let mean = cloud.mean();
    let sd = cloud.std_dev();
    let mut est = DensityEstimate::new(mean, sd, n_experiments, Method::Bayesian);
    if est.value + 3.0 * sd >= 1.0 - BOUNDARY_FLAG_WIDTH
        || est.value - 3.0 * sd <= BOUNDARY_FLAG_WIDTH
    {
        est.flagged = true;
    }
    Ok(est)
}
