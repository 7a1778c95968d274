//! Dense statevector simulation of qubit dynamics.
//!
//! States live on `2^M` complex amplitudes with qubit 0 in the least
//! significant bit of the index. Evolution comes in two flavors: a
//! product-formula route applying `exp(-i c_k P_k dt)` factors term by term
//! (the simulated quantum computation), and an eigendecomposition route
//! `exp(-i H t)` used as the numerically exact reference.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{Axis, PauliTerm, QubitHamiltonian};

/// Largest amplitude count for which the exact (dense) propagator is built.
pub const DENSE_EVOLVE_LIMIT: usize = 1 << 12;

/// Tolerance on the norm of externally supplied amplitude vectors.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// A pure state on a qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// The computational basis state with the given occupation pattern;
    /// `occupations[p]` sets bit `p` of the basis index.
    pub fn basis_state(occupations: &[bool]) -> StateVector {
        let n_qubits = occupations.len();
        let mut index = 0usize;
        for (p, &occ) in occupations.iter().enumerate() {
            if occ {
                index |= 1 << p;
            }
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        StateVector {
            n_qubits,
            amplitudes,
        }
    }

    /// Wrap an amplitude vector, which must have power-of-two length and
    /// unit norm within [`NORM_TOLERANCE`].
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<StateVector> {
        let len = amplitudes.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::BadAmplitudeCount(len));
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(StateVector {
            n_qubits: len.trailing_zeros() as usize,
            amplitudes,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Apply `exp(-i * angle * c * P)` for a weighted Pauli word `c · P`.
    ///
    /// Uses the closed form `cos(θ) I - i sin(θ) P` with `θ = angle * c`,
    /// which is exact and unitary, so the norm is preserved to rounding.
    pub fn apply_pauli_exponential(&self, term: &PauliTerm, angle: f64) -> Result<StateVector> {
        if term.n_qubits() != self.n_qubits {
            return Err(Error::QubitMismatch {
                operator: term.n_qubits(),
                state: self.n_qubits,
            });
        }

        // Decompose the word into bit masks: X and Y flip the addressed bit,
        // Z and Y contribute a (-1)^bit sign, and each Y adds a factor i.
        let mut flip_mask = 0usize;
        let mut sign_mask = 0usize;
        let mut y_count = 0u32;
        for (q, &axis) in term.axes.iter().enumerate() {
            match axis {
                Axis::I => {}
                Axis::X => flip_mask |= 1 << q,
                Axis::Y => {
                    flip_mask |= 1 << q;
                    sign_mask |= 1 << q;
                    y_count += 1;
                }
                Axis::Z => sign_mask |= 1 << q,
            }
        }
        let global = match y_count % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };

        let theta = angle * term.coefficient;
        let (cos, sin) = (theta.cos(), theta.sin());
        let minus_i_sin = Complex64::new(0.0, -sin);

        let mut out = vec![Complex64::new(0.0, 0.0); self.amplitudes.len()];
        for (k, &amp) in self.amplitudes.iter().enumerate() {
            let sign = if (k & sign_mask).count_ones().is_multiple_of(2) {
                1.0
            } else {
                -1.0
            };
            let p_amp = global * sign * amp;
            out[k ^ flip_mask] += minus_i_sin * p_amp;
            out[k] += cos * amp;
        }
        Ok(StateVector {
            n_qubits: self.n_qubits,
            amplitudes: out,
        })
    }

    /// First-order product-formula evolution under `h` for the plan's total
    /// time: `(∏_k exp(-i c_k P_k t/N))^N` with terms visited in the plan's
    /// order.
    pub fn trotter_evolve(&self, h: &QubitHamiltonian, plan: &TrotterPlan) -> Result<StateVector> {
        if h.n_qubits() != self.n_qubits {
            return Err(Error::QubitMismatch {
                operator: h.n_qubits(),
                state: self.n_qubits,
            });
        }
        if plan.term_order.len() != h.n_terms() {
            return Err(Error::InvalidParameter(format!(
                "plan orders {} terms but the operator has {}",
                plan.term_order.len(),
                h.n_terms()
            )));
        }
        let dt = plan.total_time / plan.n_steps as f64;
        let mut state = self.clone();
        for _ in 0..plan.n_steps {
            for &idx in &plan.term_order {
                state = state.apply_pauli_exponential(&h.terms()[idx], dt)?;
            }
        }
        Ok(state)
    }

    /// Numerically exact evolution `exp(-i H t)` via eigendecomposition of
    /// the dense Hamiltonian. Refused beyond [`DENSE_EVOLVE_LIMIT`]
    /// amplitudes.
    pub fn exact_evolve(&self, h: &QubitHamiltonian, t: f64) -> Result<StateVector> {
        if h.n_qubits() != self.n_qubits {
            return Err(Error::QubitMismatch {
                operator: h.n_qubits(),
                state: self.n_qubits,
            });
        }
        let dim = self.amplitudes.len();
        if dim > DENSE_EVOLVE_LIMIT {
            return Err(Error::DenseLimit {
                n_qubits: self.n_qubits,
                limit: DENSE_EVOLVE_LIMIT,
            });
        }
        let dense = h.to_dense();
        let eigen = nalgebra::SymmetricEigen::try_new(dense, f64::EPSILON, 100_000)
            .ok_or(Error::Decomposition)?;
        let v = DVector::from_column_slice(&self.amplitudes);
        let mut coords = eigen.eigenvectors.adjoint() * v;
        for (k, coord) in coords.iter_mut().enumerate() {
            let energy = eigen.eigenvalues[k];
            *coord *= Complex64::from_polar(1.0, -energy * t);
        }
        let out = eigen.eigenvectors * coords;
        Ok(StateVector {
            n_qubits: self.n_qubits,
            amplitudes: out.iter().copied().collect(),
        })
    }

    /// Expectation of the occupation of mode `p`: the probability that bit
    /// `p` of the measured basis index is 1.
    pub fn density_expectation(&self, p: usize) -> Result<f64> {
        if p >= self.n_qubits {
            return Err(Error::ModeIndex {
                index: p,
                n_modes: self.n_qubits,
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(k, _)| k & (1 << p) != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }
}

/// Parameters of a first-order product-formula evolution.
#[derive(Debug, Clone, PartialEq)]
pub struct TrotterPlan {
    total_time: f64,
    n_steps: usize,
    term_order: Vec<usize>,
}

impl TrotterPlan {
    /// A plan over `n_steps` equal steps visiting terms in storage order.
    pub fn new(total_time: f64, n_steps: usize, n_terms: usize) -> Result<TrotterPlan> {
        if n_steps == 0 {
            return Err(Error::InvalidParameter(
                "a product formula needs at least one step".into(),
            ));
        }
        if !total_time.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "evolution time {total_time} is not finite"
            )));
        }
        Ok(TrotterPlan {
            total_time,
            n_steps,
            term_order: (0..n_terms).collect(),
        })
    }

    /// Replace the term visiting order; must be a permutation of `0..n`.
    pub fn with_term_order(mut self, order: Vec<usize>) -> Result<TrotterPlan> {
        let mut sorted = order.clone();
        sorted.sort_unstable();
        if sorted != (0..self.term_order.len()).collect::<Vec<_>>() {
            return Err(Error::InvalidParameter(format!(
                "term order {order:?} is not a permutation of 0..{}",
                self.term_order.len()
            )));
        }
        self.term_order = order;
        Ok(self)
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn term_order(&self) -> &[usize] {
        &self.term_order
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermion::{jordan_wigner, FermionHamiltonian};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_state(n_qubits: usize, rng: &mut ChaCha8Rng) -> StateVector {
        let dim = 1usize << n_qubits;
        let mut amps: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut amps {
            *a /= norm;
        }
        StateVector::from_amplitudes(amps).unwrap()
    }

    #[test]
    fn basis_state_places_mode_zero_in_lowest_bit() {
        // Modes 0 and 1 occupied out of 4 → basis index 0b0011 = 3.
        let s = StateVector::basis_state(&[true, true, false, false]);
        assert_eq!(s.n_qubits(), 4);
        for (k, amp) in s.amplitudes().iter().enumerate() {
            let expected = if k == 3 { 1.0 } else { 0.0 };
            assert_abs_diff_eq!(amp.re, expected, epsilon = 1e-15);
            assert_abs_diff_eq!(amp.im, 0.0, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(s.density_expectation(0).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.density_expectation(2).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn from_amplitudes_validates_shape_and_norm() {
        let err = StateVector::from_amplitudes(vec![Complex64::new(1.0, 0.0); 3]).unwrap_err();
        assert!(matches!(err, Error::BadAmplitudeCount(3)));

        let err =
            StateVector::from_amplitudes(vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)])
                .unwrap_err();
        assert!(matches!(err, Error::NotNormalized(_)));
    }

    #[test]
    fn x_half_pi_rotation_sends_zero_to_minus_i_one() {
        let s = StateVector::basis_state(&[false]);
        let x = PauliTerm::with_letters(1.0, 1, &[(0, Axis::X)]).unwrap();
        let out = s
            .apply_pauli_exponential(&x, std::f64::consts::FRAC_PI_2)
            .unwrap();
        assert_abs_diff_eq!(out.amplitudes()[0].norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(out.amplitudes()[1].re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(out.amplitudes()[1].im, -1.0, epsilon = 1e-15);
    }

    #[test]
    fn identity_word_applies_a_global_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let s = random_state(2, &mut rng);
        let id = PauliTerm::with_letters(0.7, 2, &[]).unwrap();
        let out = s.apply_pauli_exponential(&id, 0.9).unwrap();
        let phase = Complex64::from_polar(1.0, -0.7 * 0.9);
        for (a, b) in s.amplitudes().iter().zip(out.amplitudes()) {
            let expected = a * phase;
            assert_abs_diff_eq!(b.re, expected.re, epsilon = 1e-14);
            assert_abs_diff_eq!(b.im, expected.im, epsilon = 1e-14);
        }
    }

    /// Closed-form Pauli exponentials must match the dense matrix
    /// exponential computed by eigendecomposition.
    #[test]
    fn pauli_exponential_matches_dense_exponential() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let axes = [Axis::I, Axis::X, Axis::Y, Axis::Z];
        for _ in 0..20 {
            let n = 3;
            let letters: Vec<(usize, Axis)> =
                (0..n).map(|q| (q, axes[rng.gen_range(0..4)])).collect();
            let coeff = rng.gen_range(-2.0..2.0);
            let angle = rng.gen_range(-2.0..2.0);
            let term = PauliTerm::with_letters(coeff, n, &letters).unwrap();

            let s = random_state(n, &mut rng);
            let fast = s.apply_pauli_exponential(&term, angle).unwrap();

            // Independent route: diagonalize the dense term and exponentiate.
            let h = QubitHamiltonian::from_terms(n, vec![term.clone()]).unwrap();
            let slow = s.exact_evolve(&h, angle).unwrap();

            for (a, b) in fast.amplitudes().iter().zip(slow.amplitudes()) {
                assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-12);
                assert_abs_diff_eq!(a.im, b.im, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn pauli_exponential_preserves_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let s = random_state(3, &mut rng);
            let letters = [
                (0, [Axis::I, Axis::X, Axis::Y, Axis::Z][rng.gen_range(0..4)]),
                (1, [Axis::I, Axis::X, Axis::Y, Axis::Z][rng.gen_range(0..4)]),
                (2, [Axis::I, Axis::X, Axis::Y, Axis::Z][rng.gen_range(0..4)]),
            ];
            let term = PauliTerm::with_letters(rng.gen_range(-3.0..3.0), 3, &letters).unwrap();
            let out = s
                .apply_pauli_exponential(&term, rng.gen_range(-3.0..3.0))
                .unwrap();
            assert_abs_diff_eq!(out.norm(), 1.0, epsilon = 1e-12);
        }
    }

    /// Two-mode hopping with unit amplitude gives Rabi oscillation of the
    /// density: `n_0(t) = cos²(t)` starting from mode 0 occupied.
    #[test]
    fn exact_evolution_reproduces_two_mode_rabi_oscillation() {
        let mut h = FermionHamiltonian::new(2).unwrap();
        h.add_one_body(0, 1, 1.0).unwrap();
        let encoded = jordan_wigner(&h);
        let s0 = StateVector::basis_state(&[true, false]);
        for &t in &[0.0, 0.3, 1.0, 2.2] {
            let st = s0.exact_evolve(&encoded, t).unwrap();
            assert_abs_diff_eq!(
                st.density_expectation(0).unwrap(),
                t.cos().powi(2),
                epsilon = 1e-12
            );
            assert_abs_diff_eq!(
                st.density_expectation(1).unwrap(),
                t.sin().powi(2),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn single_term_operator_needs_no_splitting() {
        let term = PauliTerm::with_letters(0.7, 2, &[(0, Axis::X), (1, Axis::X)]).unwrap();
        let h = QubitHamiltonian::from_terms(2, vec![term]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = random_state(2, &mut rng);
        let plan = TrotterPlan::new(1.4, 1, h.n_terms()).unwrap();
        let split = s.trotter_evolve(&h, &plan).unwrap();
        let exact = s.exact_evolve(&h, 1.4).unwrap();
        for (a, b) in split.amplitudes().iter().zip(exact.amplitudes()) {
            assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-12);
            assert_abs_diff_eq!(a.im, b.im, epsilon = 1e-12);
        }
    }

    #[test]
    fn commuting_terms_split_exactly() {
        let terms = vec![
            PauliTerm::with_letters(0.5, 2, &[(0, Axis::Z)]).unwrap(),
            PauliTerm::with_letters(-0.8, 2, &[(1, Axis::Z)]).unwrap(),
            PauliTerm::with_letters(0.3, 2, &[(0, Axis::Z), (1, Axis::Z)]).unwrap(),
        ];
        let h = QubitHamiltonian::from_terms(2, terms).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s = random_state(2, &mut rng);
        let plan = TrotterPlan::new(2.1, 1, h.n_terms()).unwrap();
        let split = s.trotter_evolve(&h, &plan).unwrap();
        let exact = s.exact_evolve(&h, 2.1).unwrap();
        for (a, b) in split.amplitudes().iter().zip(exact.amplitudes()) {
            assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-11);
            assert_abs_diff_eq!(a.im, b.im, epsilon = 1e-11);
        }
    }

    #[test]
    fn splitting_error_shrinks_with_step_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let fh = FermionHamiltonian::random(3, &mut rng).unwrap();
        let h = jordan_wigner(&fh);
        let s0 = StateVector::basis_state(&[true, false, true]);
        let t = 2.0;
        let exact = s0.exact_evolve(&h, t).unwrap();
        let err = |n_steps: usize| -> f64 {
            let plan = TrotterPlan::new(t, n_steps, h.n_terms()).unwrap();
            let approx_state = s0.trotter_evolve(&h, &plan).unwrap();
            approx_state
                .amplitudes()
                .iter()
                .zip(exact.amplitudes())
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt()
        };
        let coarse = err(5);
        let fine = err(40);
        assert!(fine < coarse / 4.0, "coarse {coarse}, fine {fine}");
    }

    #[test]
    fn exact_evolution_conserves_particle_number_expectation() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let fh = FermionHamiltonian::random(3, &mut rng).unwrap();
        let h = jordan_wigner(&fh);
        let s0 = StateVector::basis_state(&[true, true, false]);
        let total =
            |s: &StateVector| -> f64 { (0..3).map(|p| s.density_expectation(p).unwrap()).sum() };
        let before = total(&s0);
        let after = total(&s0.exact_evolve(&h, 1.7).unwrap());
        assert_abs_diff_eq!(before, after, epsilon = 1e-10);
    }

    #[test]
    fn register_mismatch_is_rejected() {
        let h = QubitHamiltonian::zero(3);
        let s = StateVector::basis_state(&[false, false]);
        let plan = TrotterPlan::new(1.0, 1, 0).unwrap();
        let err = s.trotter_evolve(&h, &plan).unwrap_err();
        assert!(matches!(
            err,
            Error::QubitMismatch {
                operator: 3,
                state: 2
            }
        ));
    }

    #[test]
    fn plan_validates_steps_and_order() {
        assert!(TrotterPlan::new(1.0, 0, 4).is_err());
        let plan = TrotterPlan::new(1.0, 2, 3).unwrap();
        assert!(plan.clone().with_term_order(vec![2, 0, 1]).is_ok());
        assert!(plan.clone().with_term_order(vec![0, 0, 1]).is_err());
        assert!(plan.with_term_order(vec![0, 1]).is_err());
    }

    #[test]
    fn dense_limit_is_enforced() {
        let n = 13;
        let h = QubitHamiltonian::zero(n);
        let occ = vec![false; n];
        let s = StateVector::basis_state(&occ);
        let err = s.exact_evolve(&h, 1.0).unwrap_err();
        assert!(matches!(err, Error::DenseLimit { .. }));
    }
}
