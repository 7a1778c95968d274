//! Dense Fock-space operators built directly from occupation numbers.
//!
//! This module is the brute-force reference route: it constructs ladder
//! operators as explicit `2^M x 2^M` matrices straight from their action on
//! occupation-number basis states, without going through the Pauli encoding
//! in [`crate::fermion`]. Tests compare the two routes; production code uses
//! the encoded form.
//!
//! Basis convention: basis index `k` encodes the occupation of mode `p` in
//! bit `p` (mode 0 is the least significant bit). Annihilating mode `p` of
//! `|k⟩` yields `(-1)^s |k - 2^p⟩` where `s` counts occupied modes below
//! `p`, matching the usual ordering `a_{M-1}^† … a_0^† |vac⟩` of creation
//! operators applied highest mode first.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fermion::FermionHamiltonian;

fn check_mode(p: usize, n_modes: usize) -> Result<()> {
    if p >= n_modes {
        return Err(Error::ModeIndex { index: p, n_modes });
    }
    Ok(())
}

/// Dense annihilation operator `a_p` on `n_modes` modes.
pub fn annihilation(p: usize, n_modes: usize) -> Result<DMatrix<Complex64>> {
    check_mode(p, n_modes)?;
    let dim = 1usize << n_modes;
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for k in 0..dim {
        if k & (1 << p) != 0 {
            let below = (k & ((1usize << p) - 1)).count_ones();
            let sign = if below.is_multiple_of(2) { 1.0 } else { -1.0 };
            m[(k & !(1 << p), k)] = Complex64::new(sign, 0.0);
        }
    }
    Ok(m)
}

/// Dense creation operator `a_p^†` on `n_modes` modes.
pub fn creation(p: usize, n_modes: usize) -> Result<DMatrix<Complex64>> {
    Ok(annihilation(p, n_modes)?.adjoint())
}

/// Dense number operator `n_p = a_p^† a_p`.
pub fn number(p: usize, n_modes: usize) -> Result<DMatrix<Complex64>> {
    let a = annihilation(p, n_modes)?;
    Ok(a.adjoint() * a)
}

/// Dense total-number operator `N = Σ_p n_p`.
pub fn total_number(n_modes: usize) -> Result<DMatrix<Complex64>> {
    let dim = 1usize << n_modes;
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for p in 0..n_modes {
        m += number(p, n_modes)?;
    }
    Ok(m)
}

/// Dense matrix of a second-quantized Hamiltonian
/// `H = Σ h_pq a_p^† a_q + ½ Σ h_pqrs a_p^† a_q^† a_r a_s`,
/// assembled by explicit matrix products.
pub fn dense_hamiltonian(h: &FermionHamiltonian) -> Result<DMatrix<Complex64>> {
    let m = h.n_modes();
    let dim = 1usize << m;
    let mut out = DMatrix::<Complex64>::zeros(dim, dim);
    for (&(p, q), &v) in h.one_body() {
        out += (creation(p, m)? * annihilation(q, m)?) * Complex64::new(v, 0.0);
    }
    for (&(p, q, r, s), &v) in h.two_body() {
        let prod = creation(p, m)? * creation(q, m)? * annihilation(r, m)? * annihilation(s, m)?;
        out += prod * Complex64::new(0.5 * v, 0.0);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// `{a_p, a_q^†} = δ_pq` and `{a_p, a_q} = 0` for all mode pairs.
    #[test]
    fn ladder_operators_anticommute() {
        let m = 3;
        for p in 0..m {
            for q in 0..m {
                let ap = annihilation(p, m).unwrap();
                let aq = annihilation(q, m).unwrap();
                let aqd = creation(q, m).unwrap();

                let anti_mixed = &ap * &aqd + &aqd * &ap;
                let anti_same = &ap * &aq + &aq * &ap;
                let expected = if p == q { 1.0 } else { 0.0 };
                for k in 0..anti_mixed.nrows() {
                    for l in 0..anti_mixed.ncols() {
                        let want = if k == l { expected } else { 0.0 };
                        assert_abs_diff_eq!(anti_mixed[(k, l)].re, want, epsilon = 1e-14);
                        assert_abs_diff_eq!(anti_mixed[(k, l)].im, 0.0, epsilon = 1e-14);
                        assert_abs_diff_eq!(anti_same[(k, l)].norm(), 0.0, epsilon = 1e-14);
                    }
                }
            }
        }
    }

    /// The number operator must read off bit `p` of the basis index.
    #[test]
    fn number_operator_is_diagonal_bit_readout() {
        let m = 3;
        for p in 0..m {
            let n = number(p, m).unwrap();
            for k in 0..(1usize << m) {
                let expected = ((k >> p) & 1) as f64;
                assert_abs_diff_eq!(n[(k, k)].re, expected, epsilon = 1e-14);
            }
            assert_abs_diff_eq!((&n - &n.adjoint()).norm(), 0.0, epsilon = 1e-14);
        }
    }

    /// Sign bookkeeping: `a_0` on `|011⟩` (modes 0 and 1 occupied) has sign
    /// `+1`, while `a_1` on the same state crosses mode 0 and picks up `-1`.
    #[test]
    fn annihilation_sign_counts_occupied_modes_below() {
        let m = 3;
        let a0 = annihilation(0, m).unwrap();
        let a1 = annihilation(1, m).unwrap();
        // |011⟩ is basis index 3.
        assert_abs_diff_eq!(a0[(2, 3)].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(a1[(1, 3)].re, -1.0, epsilon = 1e-15);
    }

    #[test]
    fn total_number_counts_set_bits() {
        let m = 4;
        let n = total_number(m).unwrap();
        for k in 0..(1usize << m) {
            assert_abs_diff_eq!(n[(k, k)].re, k.count_ones() as f64, epsilon = 1e-13);
        }
    }

    #[test]
    fn mode_out_of_range_is_rejected() {
        let err = annihilation(4, 4).unwrap_err();
        assert!(matches!(
            err,
            crate::error::Error::ModeIndex {
                index: 4,
                n_modes: 4
            }
        ));
    }
}
