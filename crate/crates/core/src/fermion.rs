//! Second-quantized fermionic Hamiltonians and their qubit encoding.
//!
//! A model is `H = Σ_pq h_pq a_p^† a_q + ½ Σ_pqrs h_pqrs a_p^† a_q^† a_r a_s`
//! with real coefficients. Storage enforces Hermiticity by symmetrization:
//! writing `h_pq` also writes `h_qp`, and writing `h_pqrs` also writes
//! `h_srqp`; conflicting values beyond [`HERMITICITY_TOLERANCE`] are
//! rejected.
//!
//! The qubit encoding maps mode `p` to qubit `p` via
//! `a_p = ½ (X_p + i Y_p) · Z_{p-1} … Z_0`, so the occupation of mode `p` is
//! read from bit `p` of the basis index and the number operator becomes
//! `n_p = ½ (I - Z_p)`.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::pauli::{axis_product, Axis, PauliTerm, QubitHamiltonian, DEFAULT_DROP_TOLERANCE};

/// Largest tolerated disagreement between entries tied by Hermiticity.
pub const HERMITICITY_TOLERANCE: f64 = 1e-10;

/// Hard cap on the mode count; anything larger cannot be simulated densely
/// by this crate anyway.
pub const MAX_MODES: usize = 24;

/// A second-quantized Hamiltonian with real one- and two-body coefficients.
///
/// Both coefficient tables are kept fully symmetrized (see module docs), so
/// iteration yields each Hermitian partner explicitly. Ordered maps keep
/// iteration — and thus every derived operator — deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct FermionHamiltonian {
    n_modes: usize,
    one_body: BTreeMap<(usize, usize), f64>,
    two_body: BTreeMap<(usize, usize, usize, usize), f64>,
}

impl FermionHamiltonian {
    /// An empty Hamiltonian on `n_modes` modes.
    pub fn new(n_modes: usize) -> Result<Self> {
        if n_modes == 0 || n_modes > MAX_MODES {
            return Err(Error::InvalidParameter(format!(
                "mode count must be in 1..={MAX_MODES}, got {n_modes}"
            )));
        }
        Ok(FermionHamiltonian {
            n_modes,
            one_body: BTreeMap::new(),
            two_body: BTreeMap::new(),
        })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    /// Symmetrized one-body coefficients `h_pq`.
    pub fn one_body(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.one_body
    }

    /// Symmetrized two-body coefficients `h_pqrs`.
    pub fn two_body(&self) -> &BTreeMap<(usize, usize, usize, usize), f64> {
        &self.two_body
    }

    fn check_mode(&self, p: usize) -> Result<()> {
        if p >= self.n_modes {
            return Err(Error::ModeIndex {
                index: p,
                n_modes: self.n_modes,
            });
        }
        Ok(())
    }

    fn store(
        table: &mut BTreeMap<(usize, usize), f64>,
        key: (usize, usize),
        value: f64,
        entry: &str,
    ) -> Result<()> {
        match table.get(&key) {
            Some(&existing) if (existing - value).abs() > HERMITICITY_TOLERANCE => {
                Err(Error::Hermiticity {
                    entry: entry.to_string(),
                    a: existing,
                    b: value,
                    tolerance: HERMITICITY_TOLERANCE,
                })
            }
            Some(&existing) => {
                table.insert(key, 0.5 * (existing + value));
                Ok(())
            }
            None => {
                table.insert(key, value);
                Ok(())
            }
        }
    }

    fn store4(
        table: &mut BTreeMap<(usize, usize, usize, usize), f64>,
        key: (usize, usize, usize, usize),
        value: f64,
        entry: &str,
    ) -> Result<()> {
        match table.get(&key) {
            Some(&existing) if (existing - value).abs() > HERMITICITY_TOLERANCE => {
                Err(Error::Hermiticity {
                    entry: entry.to_string(),
                    a: existing,
                    b: value,
                    tolerance: HERMITICITY_TOLERANCE,
                })
            }
            Some(&existing) => {
                table.insert(key, 0.5 * (existing + value));
                Ok(())
            }
            None => {
                table.insert(key, value);
                Ok(())
            }
        }
    }

    /// Set `h_pq` (and `h_qp`, by Hermiticity).
    pub fn add_one_body(&mut self, p: usize, q: usize, value: f64) -> Result<()> {
        self.check_mode(p)?;
        self.check_mode(q)?;
        let entry = format!("h[{p},{q}]");
        Self::store(&mut self.one_body, (p, q), value, &entry)?;
        if p != q {
            Self::store(&mut self.one_body, (q, p), value, &entry)?;
        }
        Ok(())
    }

    /// Set `h_pqrs` (and `h_srqp`, by Hermiticity).
    pub fn add_two_body(
        &mut self,
        p: usize,
        q: usize,
        r: usize,
        s: usize,
        value: f64,
    ) -> Result<()> {
        for idx in [p, q, r, s] {
            self.check_mode(idx)?;
        }
        let entry = format!("h[{p},{q},{r},{s}]");
        Self::store4(&mut self.two_body, (p, q, r, s), value, &entry)?;
        if (s, r, q, p) != (p, q, r, s) {
            Self::store4(&mut self.two_body, (s, r, q, p), value, &entry)?;
        }
        Ok(())
    }

    /// A random particle-number-conserving Hamiltonian, useful for
    /// randomized cross-checks against the dense reference route.
    ///
    /// All one-body pairs receive a coefficient drawn uniformly from
    /// `[-1, 1]`; `2 * n_modes` random two-body index tuples (skipping
    /// collisions with already-placed Hermitian partners) do the same.
    pub fn random<R: Rng>(n_modes: usize, rng: &mut R) -> Result<Self> {
        let mut h = FermionHamiltonian::new(n_modes)?;
        for p in 0..n_modes {
            for q in p..n_modes {
                h.add_one_body(p, q, rng.gen_range(-1.0..1.0))?;
            }
        }
        let mut placed: HashSet<(usize, usize, usize, usize)> = HashSet::new();
        let mut remaining = 2 * n_modes;
        let mut attempts = 0;
        while remaining > 0 && attempts < 1000 {
            attempts += 1;
            let p = rng.gen_range(0..n_modes);
            let q = rng.gen_range(0..n_modes);
            let r = rng.gen_range(0..n_modes);
            let s = rng.gen_range(0..n_modes);
            if placed.contains(&(p, q, r, s)) || placed.contains(&(s, r, q, p)) {
                continue;
            }
            placed.insert((p, q, r, s));
            placed.insert((s, r, q, p));
            h.add_two_body(p, q, r, s, rng.gen_range(-1.0..1.0))?;
            remaining -= 1;
        }
        Ok(h)
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::ModelParse {
        line,
        message: message.into(),
    }
}

fn parse_index(token: &str, line: usize) -> Result<usize> {
    token
        .parse::<usize>()
        .map_err(|_| parse_err(line, format!("expected a mode index, got `{token}`")))
}

fn parse_value(token: &str, line: usize) -> Result<f64> {
    let value: f64 = token
        .parse()
        .map_err(|_| parse_err(line, format!("expected a real coefficient, got `{token}`")))?;
    if !value.is_finite() {
        return Err(parse_err(
            line,
            format!("coefficient `{token}` is not finite"),
        ));
    }
    Ok(value)
}

/// Parse a model from its text form.
///
/// The format is line-oriented: a `modes M` directive, then `1body p q v`
/// and `2body p q r s v` entries. Blank lines are skipped and `#` starts a
/// comment (whole-line or trailing). Every malformed line is rejected with
/// its line number; listing the same index tuple twice is an error, while
/// listing a Hermitian partner with a consistent value is allowed.
pub fn parse_model(source: &str) -> Result<FermionHamiltonian> {
    let mut model: Option<FermionHamiltonian> = None;
    let mut seen_one: HashSet<(usize, usize)> = HashSet::new();
    let mut seen_two: HashSet<(usize, usize, usize, usize)> = HashSet::new();

    for (idx, raw) in source.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        match tokens[0] {
            "modes" => {
                if model.is_some() {
                    return Err(parse_err(line, "duplicate `modes` directive"));
                }
                if tokens.len() != 2 {
                    return Err(parse_err(line, "expected `modes M`"));
                }
                let m = parse_index(tokens[1], line)?;
                model = Some(FermionHamiltonian::new(m).map_err(|e| match e {
                    Error::InvalidParameter(msg) => parse_err(line, msg),
                    other => other,
                })?);
            }
            "1body" => {
                let model = model
                    .as_mut()
                    .ok_or_else(|| parse_err(line, "entry before `modes` directive"))?;
                if tokens.len() != 4 {
                    return Err(parse_err(line, "expected `1body p q value`"));
                }
                let p = parse_index(tokens[1], line)?;
                let q = parse_index(tokens[2], line)?;
                let v = parse_value(tokens[3], line)?;
                if !seen_one.insert((p, q)) {
                    return Err(parse_err(
                        line,
                        format!("duplicate entry for 1body {p} {q}"),
                    ));
                }
                model.add_one_body(p, q, v)?;
            }
            "2body" => {
                let model = model
                    .as_mut()
                    .ok_or_else(|| parse_err(line, "entry before `modes` directive"))?;
                if tokens.len() != 6 {
                    return Err(parse_err(line, "expected `2body p q r s value`"));
                }
                let p = parse_index(tokens[1], line)?;
                let q = parse_index(tokens[2], line)?;
                let r = parse_index(tokens[3], line)?;
                let s = parse_index(tokens[4], line)?;
                let v = parse_value(tokens[5], line)?;
                if !seen_two.insert((p, q, r, s)) {
                    return Err(parse_err(
                        line,
                        format!("duplicate entry for 2body {p} {q} {r} {s}"),
                    ));
                }
                model.add_two_body(p, q, r, s, v)?;
            }
            other => {
                return Err(parse_err(line, format!("unknown directive `{other}`")));
            }
        }
    }

    model.ok_or_else(|| parse_err(1, "no `modes` directive found"))
}

/// Read and parse a model file.
pub fn load_model(path: &Path) -> Result<FermionHamiltonian> {
    let source = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_model(&source)
}

/// One ladder operator in a product: which mode it acts on and whether it
/// creates (`a_p^†`) or annihilates (`a_p`).
#[derive(Clone, Copy)]
struct Ladder {
    mode: usize,
    creation: bool,
}

/// Multiply the accumulated Pauli expansion by one ladder operator.
///
/// Each ladder operator expands to two Pauli words sharing a `Z` chain on
/// qubits below the mode: `½ X_p Z_chain` plus `∓ i/2 · Y_p Z_chain` (minus
/// for creation, plus for annihilation). Letters on distinct qubits commute,
/// so the product of two words multiplies letter-by-letter with a tracked
/// phase.
fn apply_ladder(
    acc: BTreeMap<Vec<Axis>, Complex64>,
    op: Ladder,
    n_qubits: usize,
) -> BTreeMap<Vec<Axis>, Complex64> {
    let y_coeff = if op.creation {
        Complex64::new(0.0, -0.5)
    } else {
        Complex64::new(0.0, 0.5)
    };
    let mut branches = Vec::with_capacity(2);
    for (letter, coeff) in [(Axis::X, Complex64::new(0.5, 0.0)), (Axis::Y, y_coeff)] {
        let mut word = vec![Axis::I; n_qubits];
        for q in word.iter_mut().take(op.mode) {
            *q = Axis::Z;
        }
        word[op.mode] = letter;
        branches.push((word, coeff));
    }

    let mut out: BTreeMap<Vec<Axis>, Complex64> = BTreeMap::new();
    for (word, coeff) in &acc {
        for (branch_word, branch_coeff) in &branches {
            let mut product = vec![Axis::I; n_qubits];
            let mut phase = Complex64::new(1.0, 0.0);
            for q in 0..n_qubits {
                let (axis, ph) = axis_product(word[q], branch_word[q]);
                product[q] = axis;
                phase *= ph;
            }
            let entry = out
                .entry(product)
                .or_insert_with(|| Complex64::new(0.0, 0.0));
            *entry += coeff * branch_coeff * phase;
        }
    }
    out
}

fn expand_ladder_product(
    ops: &[Ladder],
    coefficient: f64,
    n_qubits: usize,
    total: &mut BTreeMap<Vec<Axis>, Complex64>,
) {
    let identity = vec![Axis::I; n_qubits];
    let mut acc = BTreeMap::new();
    acc.insert(identity, Complex64::new(coefficient, 0.0));
    for &op in ops {
        acc = apply_ladder(acc, op, n_qubits);
    }
    for (word, coeff) in acc {
        let entry = total
            .entry(word)
            .or_insert_with(|| Complex64::new(0.0, 0.0));
        *entry += coeff;
    }
}

/// Encode a fermionic Hamiltonian as a qubit operator, dropping Pauli terms
/// with coefficient magnitude below `drop_tolerance`.
///
/// Because the coefficient tables are symmetrized, every Hermitian pair of
/// ladder products is present and all imaginary parts cancel; a residual
/// imaginary part above `1e-12` would indicate a bug and panics.
pub fn jordan_wigner_with_tolerance(
    h: &FermionHamiltonian,
    drop_tolerance: f64,
) -> QubitHamiltonian {
    let n = h.n_modes();
    let mut total: BTreeMap<Vec<Axis>, Complex64> = BTreeMap::new();

    for (&(p, q), &v) in h.one_body() {
        let ops = [
            Ladder {
                mode: p,
                creation: true,
            },
            Ladder {
                mode: q,
                creation: false,
            },
        ];
        expand_ladder_product(&ops, v, n, &mut total);
    }
    for (&(p, q, r, s), &v) in h.two_body() {
        let ops = [
            Ladder {
                mode: p,
                creation: true,
            },
            Ladder {
                mode: q,
                creation: true,
            },
            Ladder {
                mode: r,
                creation: false,
            },
            Ladder {
                mode: s,
                creation: false,
            },
        ];
        expand_ladder_product(&ops, 0.5 * v, n, &mut total);
    }

    let mut terms = Vec::new();
    for (axes, coeff) in total {
        assert!(
            coeff.im.abs() < 1e-12,
            "imaginary residual {} on Pauli word after Hermitian combination",
            coeff.im
        );
        if coeff.re.abs() >= drop_tolerance {
            terms.push(PauliTerm {
                coefficient: coeff.re,
                axes,
            });
        }
    }
    QubitHamiltonian::from_terms(n, terms)
        .expect("encoded terms share the register size by construction")
}

/// Encode with the default drop tolerance.
pub fn jordan_wigner(h: &FermionHamiltonian) -> QubitHamiltonian {
    jordan_wigner_with_tolerance(h, DEFAULT_DROP_TOLERANCE)
}

/// The occupation-number observable of mode `p` as a qubit operator:
/// `n_p = ½ I - ½ Z_p`.
pub fn number_operator(p: usize, n_modes: usize) -> Result<QubitHamiltonian> {
    if p >= n_modes {
        return Err(Error::ModeIndex { index: p, n_modes });
    }
    let identity = PauliTerm::with_letters(0.5, n_modes, &[])?;
    let z = PauliTerm::with_letters(-0.5, n_modes, &[(p, Axis::Z)])?;
    QubitHamiltonian::from_terms(n_modes, vec![identity, z])
}
