//! Simulated measurement: outcome probabilities, readout error, and shots.
//!
//! Two measurement primitives feed the estimators. Direct readout measures
//! qubit `p` in the computational basis, giving outcome 1 with probability
//! `⟨n_p⟩`. The phase-kickback probe interferes the state with
//! `exp(-i n_p τ)` through an ancilla; the ancilla reads 0 with probability
//! `P(0|τ) = Σ_k |c_k|² cos²(λ_k τ/2)` over eigenpairs of the probed
//! observable, which for an occupation (eigenvalues 0 and 1) collapses to
//! `P(0|τ) = 1 - ⟨n_p⟩ (1 - cos τ)/2`.
//!
//! Classical readout error flips each recorded bit independently with
//! probability `ε`, sending a true outcome probability `p` to
//! `p(1-ε) + (1-p)ε`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::fermion::number_operator;
use crate::statevector::StateVector;

/// Slack allowed when validating probabilities that come out of floating
/// point expressions before clamping them into `[0, 1]`.
const PROBABILITY_SLACK: f64 = 1e-9;

/// Symmetric classical bit-flip readout error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    flip_probability: f64,
}

impl NoiseModel {
    /// A channel flipping each readout with probability `epsilon`;
    /// `epsilon` must lie in `[0, 0.5)` — at one half the readout carries
    /// no information at all.
    pub fn new(epsilon: f64) -> Result<NoiseModel> {
        if !epsilon.is_finite() || !(0.0..0.5).contains(&epsilon) {
            return Err(Error::InvalidParameter(format!(
                "readout flip probability must be in [0, 0.5), got {epsilon}"
            )));
        }
        Ok(NoiseModel {
            flip_probability: epsilon,
        })
    }

    /// The error-free channel.
    pub fn noiseless() -> NoiseModel {
        NoiseModel {
            flip_probability: 0.0,
        }
    }

    pub fn flip_probability(&self) -> f64 {
        self.flip_probability
    }

    /// Outcome probability after the flip channel:
    /// `p ↦ p(1-ε) + (1-p)ε`. Affine, order-preserving, and it contracts
    /// `[0, 1]` to `[ε, 1-ε]`.
    pub fn apply(&self, p_true: f64) -> f64 {
        let e = self.flip_probability;
        p_true * (1.0 - e) + (1.0 - p_true) * e
    }

    /// Exact inverse of [`NoiseModel::apply`]: `p ↦ (p - ε)/(1 - 2ε)`.
    ///
    /// Applied to a noisy *estimate* rather than an exact probability the
    /// result can leave `[0, 1]`; callers clamp where a probability is
    /// required.
    pub fn invert(&self, p_observed: f64) -> f64 {
        let e = self.flip_probability;
        (p_observed - e) / (1.0 - 2.0 * e)
    }

    /// Factor by which the flip channel shrinks any probability *gap*
    /// (and hence any amplitude riding on the signal): `1 - 2ε`.
    pub fn contrast(&self) -> f64 {
        1.0 - 2.0 * self.flip_probability
    }
}

/// Result of repeating one Bernoulli measurement.
///
/// `successes` counts how often the event whose probability was sampled
/// occurred (outcome 1 for direct readout, ancilla outcome 0 for the
/// phase-kickback probe).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShotRecord {
    pub shots: u64,
    pub successes: u64,
    pub seed: u64,
}

impl ShotRecord {
    /// Observed frequency `successes / shots`.
    pub fn frequency(&self) -> f64 {
        self.successes as f64 / self.shots as f64
    }
}

fn validate_probability(p: f64) -> Result<f64> {
    if !p.is_finite() || !(-PROBABILITY_SLACK..=1.0 + PROBABILITY_SLACK).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    Ok(p.clamp(0.0, 1.0))
}

/// Probability of reading 1 when qubit `p` is measured directly: `⟨n_p⟩`.
pub fn z_read_probability(state: &StateVector, p: usize) -> Result<f64> {
    state.density_expectation(p)
}

/// Ancilla-outcome-0 probability of the phase-kickback probe at angle
/// `tau`, via the closed form `1 - ⟨n_p⟩ (1 - cos τ)/2`.
pub fn hadamard_test_probability(state: &StateVector, p: usize, tau: f64) -> Result<f64> {
    let density = state.density_expectation(p)?;
    Ok(1.0 - density * (1.0 - tau.cos()) / 2.0)
}

/// Same probability computed by simulating the interference circuit:
/// `P(0) = ¼ ‖(I + U)|ψ⟩‖²` with `U = exp(-i n_p τ)`.
///
/// This is an independent route kept for cross-validation; production code
/// uses the closed form above.
pub fn hadamard_test_probability_via_circuit(
    state: &StateVector,
    p: usize,
    tau: f64,
) -> Result<f64> {
    let n_op = number_operator(p, state.n_qubits())?;
    // The two encoded terms commute (identity and a single Z), so applying
    // them in sequence is exactly exp(-i n_p τ).
    let mut evolved = state.clone();
    for term in n_op.terms() {
        evolved = evolved.apply_pauli_exponential(term, tau)?;
    }
    let sum_sq: f64 = state
        .amplitudes()
        .iter()
        .zip(evolved.amplitudes())
        .map(|(a, b)| (a + b).norm_sqr())
        .sum();
    Ok(0.25 * sum_sq)
}

/// Draw `shots` Bernoulli outcomes with success probability `p` using a
/// dedicated deterministic stream.
pub fn sample_shots(p: f64, shots: u64, seed: u64) -> Result<ShotRecord> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    let p = validate_probability(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let distribution = Binomial::new(shots, p).map_err(|_| Error::InvalidProbability(p))?;
    let successes = distribution.sample(&mut rng);
    Ok(ShotRecord {
        shots,
        successes,
        seed,
    })
}

/// Draw one Bernoulli outcome with success probability `p` from a caller
/// supplied stream. Used where measurements are chosen adaptively and a
/// single stream must cover the whole sequence.
pub fn sample_bit<R: Rng>(p: f64, rng: &mut R) -> Result<bool> {
    let p = validate_probability(p)?;
    Ok(rng.gen::<f64>() < p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;
    use proptest::prelude::*;
    use rand::SeedableRng;

    fn superposition_state() -> StateVector {
        // (|01⟩ + |10⟩ + |11⟩)/√3 on two modes; ⟨n_0⟩ = 2/3, ⟨n_1⟩ = 2/3.
        let a = Complex64::new(1.0 / 3f64.sqrt(), 0.0);
        StateVector::from_amplitudes(vec![Complex64::new(0.0, 0.0), a, a, a]).unwrap()
    }

    #[test]
    fn probe_probability_is_one_at_zero_angle() {
        let s = superposition_state();
        assert_abs_diff_eq!(
            hadamard_test_probability(&s, 0, 0.0).unwrap(),
            1.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn probe_probability_at_pi_reveals_density() {
        let s = superposition_state();
        let p0 = hadamard_test_probability(&s, 0, std::f64::consts::PI).unwrap();
        assert_abs_diff_eq!(p0, 1.0 - 2.0 / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn closed_form_matches_circuit_simulation() {
        use rand::Rng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for _ in 0..30 {
            let dim = 8;
            let mut amps: Vec<Complex64> = (0..dim)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            for a in &mut amps {
                *a /= norm;
            }
            let s = StateVector::from_amplitudes(amps).unwrap();
            let p = rng.gen_range(0..3);
            let tau: f64 = rng.gen_range(-7.0..7.0);
            let fast = hadamard_test_probability(&s, p, tau).unwrap();
            let slow = hadamard_test_probability_via_circuit(&s, p, tau).unwrap();
            assert_abs_diff_eq!(fast, slow, epsilon = 1e-12);
        }
    }

    #[test]
    fn direct_read_probability_is_the_density() {
        let s = superposition_state();
        assert_abs_diff_eq!(
            z_read_probability(&s, 0).unwrap(),
            2.0 / 3.0,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            z_read_probability(&s, 1).unwrap(),
            2.0 / 3.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn noise_model_validates_range() {
        assert!(NoiseModel::new(0.0).is_ok());
        assert!(NoiseModel::new(0.49).is_ok());
        assert!(NoiseModel::new(0.5).is_err());
        assert!(NoiseModel::new(-0.01).is_err());
        assert!(NoiseModel::new(f64::NAN).is_err());
    }

    #[test]
    fn flip_channel_mixes_toward_one_half() {
        let noise = NoiseModel::new(0.01).unwrap();
        assert_abs_diff_eq!(noise.apply(1.0), 0.99, epsilon = 1e-15);
        assert_abs_diff_eq!(noise.apply(0.0), 0.01, epsilon = 1e-15);
        assert_abs_diff_eq!(noise.apply(0.5), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let a = sample_shots(0.37, 5000, 99).unwrap();
        let b = sample_shots(0.37, 5000, 99).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sampling_tracks_the_probability() {
        let shots = 200_000u64;
        let p = 0.3;
        let rec = sample_shots(p, shots, 7).unwrap();
        let sigma = (p * (1.0 - p) / shots as f64).sqrt();
        assert!(
            (rec.frequency() - p).abs() < 6.0 * sigma,
            "frequency {} too far from {}",
            rec.frequency(),
            p
        );
    }

    #[test]
    fn zero_shots_and_bad_probabilities_are_rejected() {
        assert!(matches!(sample_shots(0.5, 0, 1), Err(Error::ZeroShots)));
        assert!(matches!(
            sample_shots(1.5, 10, 1),
            Err(Error::InvalidProbability(_))
        ));
        assert!(matches!(
            sample_shots(-0.2, 10, 1),
            Err(Error::InvalidProbability(_))
        ));
    }

    #[test]
    fn degenerate_probabilities_sample_exactly() {
        assert_eq!(sample_shots(1.0, 100, 3).unwrap().successes, 100);
        assert_eq!(sample_shots(0.0, 100, 3).unwrap().successes, 0);
    }

    proptest! {
        /// The flip channel is affine and keeps probabilities inside
        /// `[ε, 1-ε]`, preserving order.
        #[test]
        fn flip_channel_properties(
            e in 0.0..0.49f64,
            p in 0.0..=1.0f64,
            q in 0.0..=1.0f64,
        ) {
            let noise = NoiseModel::new(e).unwrap();
            let fp = noise.apply(p);
            let fq = noise.apply(q);
            prop_assert!(fp >= e - 1e-12 && fp <= 1.0 - e + 1e-12);
            if p < q {
                prop_assert!(fp <= fq);
            }
            // Affine: midpoint maps to midpoint.
            let mid = noise.apply(0.5 * (p + q));
            prop_assert!((mid - 0.5 * (fp + fq)).abs() < 1e-12);
        }

        /// The probe probability stays in [1 - n, 1] for every angle.
        #[test]
        fn probe_probability_bounds(tau in -20.0..20.0f64) {
            let s = superposition_state();
            let p0 = hadamard_test_probability(&s, 0, tau).unwrap();
            prop_assert!(p0 <= 1.0 + 1e-12);
            prop_assert!(p0 >= 1.0 - 2.0 / 3.0 - 1e-12);
        }
    }
}
