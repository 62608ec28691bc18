//! Dense complex-matrix representations for small qubit counts.
//!
//! Nothing here uses the symplectic shortcuts of [`crate::pauli`]: Paulis are
//! explicit `2^n × 2^n` matrices built from Kronecker products, with qubit 0 as
//! the leftmost (most significant) factor. This makes the module usable as an
//! independent oracle for the bit-level code.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::generators::Gate;
use crate::pauli::PauliOperator;

pub type CMatrix = DMatrix<Complex64>;

/// Largest qubit count accepted by [`DenseChi`].
pub const DENSE_CHI_MAX_QUBITS: usize = 2;

/// Largest qubit count for which explicit Pauli and gate matrices are built.
pub const DENSE_MAX_QUBITS: usize = 4;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

fn letter_matrix(c: char) -> CMatrix {
    match c {
        'I' => CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ONE]),
        'X' => CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        'Y' => CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]),
        'Z' => CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
        _ => unreachable!("letters come from PauliOperator::letter"),
    }
}

fn check_dense(n: usize, cap: usize) -> Result<()> {
    if n == 0 || n > cap {
        return Err(Error::CapExceeded {
            what: "dense representation (qubits)",
            cap,
            reached: n,
        });
    }
    Ok(())
}

/// Explicit matrix of a signed Pauli.
pub fn pauli_matrix(p: &PauliOperator) -> Result<CMatrix> {
    check_dense(p.n_qubits(), DENSE_MAX_QUBITS)?;
    let mut m = CMatrix::from_element(1, 1, ONE);
    for q in 0..p.n_qubits() {
        m = m.kronecker(&letter_matrix(p.letter(q)));
    }
    if p.is_negative() {
        m = -m;
    }
    Ok(m)
}

fn embed_single(u: &CMatrix, qubit: usize, n: usize) -> CMatrix {
    let id = CMatrix::identity(2, 2);
    let mut m = CMatrix::from_element(1, 1, ONE);
    for q in 0..n {
        m = m.kronecker(if q == qubit { u } else { &id });
    }
    m
}

/// Explicit unitary of a generator gate on `n` qubits.
pub fn gate_unitary(gate: Gate, n: usize) -> Result<CMatrix> {
    check_dense(n, DENSE_MAX_QUBITS)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let single = |c: char, q: usize| -> Result<CMatrix> {
        if q >= n {
            return Err(Error::InvalidTableau(format!("qubit {q} out of range")));
        }
        Ok(embed_single(&letter_matrix(c), q, n))
    };
    match gate {
        Gate::X(q) => single('X', q),
        Gate::Y(q) => single('Y', q),
        Gate::Z(q) => single('Z', q),
        Gate::H(q) => {
            let m = CMatrix::from_row_slice(
                2,
                2,
                &[ONE * h, ONE * h, ONE * h, -ONE * h],
            );
            Ok(embed_single(&m, q, n))
        }
        Gate::S(q) => Ok(embed_single(
            &CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, I]),
            q,
            n,
        )),
        Gate::Cnot { control, target } => {
            if control >= n || target >= n || control == target {
                return Err(Error::InvalidTableau("bad CNOT qubits".into()));
            }
            let dim = 1usize << n;
            let mut m = CMatrix::zeros(dim, dim);
            // basis index bit for qubit q is (n - 1 - q) since qubit 0 is most significant
            let cbit = 1 << (n - 1 - control);
            let tbit = 1 << (n - 1 - target);
            for col in 0..dim {
                let row = if col & cbit != 0 { col ^ tbit } else { col };
                m[(row, col)] = ONE;
            }
            Ok(m)
        }
    }
}

/// Coefficients `c_μ = tr(P_μ M) / 2^n` over the canonical Pauli order.
pub fn pauli_coefficients(m: &CMatrix, n: usize) -> Result<Vec<Complex64>> {
    check_dense(n, DENSE_MAX_QUBITS)?;
    let dim = 1usize << n;
    if m.nrows() != dim || m.ncols() != dim {
        return Err(Error::InvalidChannel(format!(
            "matrix is {}x{}, expected {dim}x{dim}",
            m.nrows(),
            m.ncols()
        )));
    }
    (0..dim * dim)
        .map(|i| {
            let p = PauliOperator::from_index(n, i)?;
            Ok((pauli_matrix(&p)? * m).trace() / dim as f64)
        })
        .collect()
}

/// Process matrix `x_{μν}` of a channel `ρ ↦ Σ x_{μν} P_μ ρ P_ν` over the canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseChi {
    n_qubits: usize,
    chi: CMatrix,
}

impl DenseChi {
    pub fn new(n_qubits: usize, chi: CMatrix) -> Result<Self> {
        check_dense(n_qubits, DENSE_CHI_MAX_QUBITS)?;
        let dim = 1usize << (2 * n_qubits);
        if chi.nrows() != dim || chi.ncols() != dim {
            return Err(Error::InvalidChannel(format!("chi must be {dim}x{dim}")));
        }
        let herm_err = (&chi - chi.adjoint()).iter().map(|c| c.norm()).fold(0.0, f64::max);
        if herm_err > 1e-12 {
            return Err(Error::InvalidChannel(format!(
                "chi is not Hermitian (deviation {herm_err:e})"
            )));
        }
        let trace = chi.trace();
        if (trace.re - 1.0).abs() > 1e-12 || trace.im.abs() > 1e-12 {
            return Err(Error::InvalidChannel(format!("chi diagonal sums to {trace}, not 1")));
        }
        Ok(Self { n_qubits, chi })
    }

    /// Diagonal chi from a weight vector over the canonical order.
    pub fn from_diagonal(n_qubits: usize, weights: &[f64]) -> Result<Self> {
        let dim = 1usize << (2 * n_qubits);
        if weights.len() != dim {
            return Err(Error::InvalidChannel(format!("expected {dim} weights")));
        }
        let mut chi = CMatrix::zeros(dim, dim);
        for (i, w) in weights.iter().enumerate() {
            chi[(i, i)] = Complex64::new(*w, 0.0);
        }
        Self::new(n_qubits, chi)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.chi
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.chi.nrows()).map(|i| self.chi[(i, i)].re).collect()
    }

    /// Largest modulus among the off-diagonal entries.
    pub fn max_off_diagonal(&self) -> f64 {
        let mut m: f64 = 0.0;
        for r in 0..self.chi.nrows() {
            for c in 0..self.chi.ncols() {
                if r != c {
                    m = m.max(self.chi[(r, c)].norm());
                }
            }
        }
        m
    }

    /// Applies the channel to a `2^n × 2^n` operator.
    pub fn apply(&self, rho: &CMatrix) -> Result<CMatrix> {
        let n = self.n_qubits;
        let paulis: Vec<CMatrix> = (0..self.chi.nrows())
            .map(|i| pauli_matrix(&PauliOperator::from_index(n, i)?))
            .collect::<Result<_>>()?;
        let dim = 1usize << n;
        let mut out = CMatrix::zeros(dim, dim);
        for (mu, pm) in paulis.iter().enumerate() {
            let left = pm * rho;
            for (nu, pn) in paulis.iter().enumerate() {
                let x = self.chi[(mu, nu)];
                if x != ZERO {
                    out += &left * pn * x;
                }
            }
        }
        Ok(out)
    }
}

/// Averages a chi matrix over conjugation by every Pauli.
///
/// Conjugating by `Q` maps `x_{μν}` to `s_μ(Q) s_ν(Q) x_{μν}` where
/// `Q P_μ Q = s_μ(Q) P_μ`; the signs are read off explicit matrix products.
pub fn dense_pauli_twirl(chi: &DenseChi) -> Result<DenseChi> {
    let n = chi.n_qubits;
    let dim = chi.chi.nrows();
    let paulis: Vec<CMatrix> = (0..dim)
        .map(|i| pauli_matrix(&PauliOperator::from_index(n, i)?))
        .collect::<Result<_>>()?;
    let scale = (1usize << n) as f64;
    // signs[q][mu] = tr(P_mu Q P_mu Q) / 2^n
    let signs: Vec<Vec<f64>> = paulis
        .iter()
        .map(|q| {
            paulis
                .iter()
                .map(|pm| (pm * q * pm * q).trace().re / scale)
                .collect()
        })
        .collect();
    let mut out = CMatrix::zeros(dim, dim);
    for s in &signs {
        for mu in 0..dim {
            for nu in 0..dim {
                out[(mu, nu)] += chi.chi[(mu, nu)] * (s[mu] * s[nu]);
            }
        }
    }
    out /= Complex64::new(dim as f64, 0.0);
    DenseChi::new(n, out)
}
