//! Pauli words and real-weighted sums of them.
//!
//! A qubit operator is stored as a list of terms `c · P_{M-1} ⊗ … ⊗ P_0`
//! where each `P` is one of `I, X, Y, Z` and `c` is real (the operators this
//! crate builds are Hermitian). Qubit `p` is the `p`-th bit of the basis
//! index, with qubit 0 the least significant bit.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Coefficients with magnitude below this are dropped when operators are
/// assembled from products of ladder operators.
pub const DEFAULT_DROP_TOLERANCE: f64 = 1e-12;

/// A single-qubit Pauli letter.
///
/// The derived order (`I < X < Y < Z`) gives Pauli words a total
/// lexicographic order, which keeps term lists deterministic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axis {
    I,
    X,
    Y,
    Z,
}

impl Axis {
    /// The 2x2 matrix of this letter.
    pub fn matrix(self) -> DMatrix<Complex64> {
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let zero = Complex64::new(0.0, 0.0);
        let entries = match self {
            Axis::I => [one, zero, zero, one],
            Axis::X => [zero, one, one, zero],
            Axis::Y => [zero, -i, i, zero],
            Axis::Z => [one, zero, zero, -one],
        };
        DMatrix::from_row_slice(2, 2, &entries)
    }

    fn letter(self) -> char {
        match self {
            Axis::I => 'I',
            Axis::X => 'X',
            Axis::Y => 'Y',
            Axis::Z => 'Z',
        }
    }
}

/// Product of two Pauli letters: `a · b = phase · result`.
///
/// The phase is one of `{1, -1, i, -i}`; it is `±i` exactly when `a` and `b`
/// are distinct non-identity letters.
pub fn axis_product(a: Axis, b: Axis) -> (Axis, Complex64) {
    use Axis::{I, X, Y, Z};
    let one = Complex64::new(1.0, 0.0);
    let pos_i = Complex64::new(0.0, 1.0);
    match (a, b) {
        (I, other) => (other, one),
        (other, I) => (other, one),
        (X, X) | (Y, Y) | (Z, Z) => (I, one),
        (X, Y) => (Z, pos_i),
        (Y, X) => (Z, -pos_i),
        (Y, Z) => (X, pos_i),
        (Z, Y) => (X, -pos_i),
        (Z, X) => (Y, pos_i),
        (X, Z) => (Y, -pos_i),
    }
}

/// A real multiple of a Pauli word on a fixed register.
///
/// `axes[p]` is the letter acting on qubit `p`. The all-identity word is a
/// valid term (a multiple of the identity operator).
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    pub coefficient: f64,
    pub axes: Vec<Axis>,
}

impl PauliTerm {
    /// A term acting on `n_qubits` qubits with the given letters placed at
    /// the given qubit positions and identity elsewhere.
    pub fn with_letters(
        coefficient: f64,
        n_qubits: usize,
        letters: &[(usize, Axis)],
    ) -> Result<Self> {
        let mut axes = vec![Axis::I; n_qubits];
        for &(q, axis) in letters {
            if q >= n_qubits {
                return Err(Error::ModeIndex {
                    index: q,
                    n_modes: n_qubits,
                });
            }
            axes[q] = axis;
        }
        Ok(PauliTerm { coefficient, axes })
    }

    /// Number of qubits this term acts on.
    pub fn n_qubits(&self) -> usize {
        self.axes.len()
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> usize {
        self.axes.iter().filter(|&&a| a != Axis::I).count()
    }

    /// Dense `2^M x 2^M` matrix of this term, coefficient included.
    ///
    /// Qubit 0 indexes the least significant bit, so the Kronecker product
    /// runs from the highest qubit down.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut acc = DMatrix::from_element(1, 1, Complex64::new(self.coefficient, 0.0));
        for &axis in self.axes.iter().rev() {
            acc = acc.kronecker(&axis.matrix());
        }
        acc
    }

    /// The word as a string, qubit 0 first (e.g. `XYI` is `X` on qubit 0).
    pub fn word(&self) -> String {
        self.axes.iter().map(|a| a.letter()).collect()
    }
}

/// A Hermitian qubit operator: a real-weighted sum of Pauli words on a
/// common register.
///
/// Invariants: every term has `axes.len() == n_qubits` and no two terms
/// share the same word. Term order is deterministic (lexicographic in the
/// word with `I < X < Y < Z`).
#[derive(Debug, Clone, PartialEq)]
pub struct QubitHamiltonian {
    n_qubits: usize,
    terms: Vec<PauliTerm>,
}

impl QubitHamiltonian {
    /// Build from a term list, merging duplicate words and dropping terms
    /// with magnitude below `DEFAULT_DROP_TOLERANCE`.
    pub fn from_terms(n_qubits: usize, terms: Vec<PauliTerm>) -> Result<Self> {
        let mut merged = std::collections::BTreeMap::<Vec<Axis>, f64>::new();
        for term in terms {
            if term.axes.len() != n_qubits {
                return Err(Error::QubitMismatch {
                    operator: term.axes.len(),
                    state: n_qubits,
                });
            }
            *merged.entry(term.axes).or_insert(0.0) += term.coefficient;
        }
        let terms = merged
            .into_iter()
            .filter(|&(_, c)| c.abs() >= DEFAULT_DROP_TOLERANCE)
            .map(|(axes, coefficient)| PauliTerm { coefficient, axes })
            .collect();
        Ok(QubitHamiltonian { n_qubits, terms })
    }

    /// An operator with no terms (the zero operator) on `n_qubits` qubits.
    pub fn zero(n_qubits: usize) -> Self {
        QubitHamiltonian {
            n_qubits,
            terms: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    /// Sum of dense term matrices.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.n_qubits;
        let mut acc = DMatrix::<Complex64>::zeros(dim, dim);
        for term in &self.terms {
            acc += term.to_dense();
        }
        acc
    }
}
