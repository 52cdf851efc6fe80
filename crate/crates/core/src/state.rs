//! Quantum states and Hamiltonians of the working medium.
//!
//! States are dense complex density matrices validated at construction
//! (Hermitian, unit trace, positive up to a small numerical floor). The
//! single-qubit Hamiltonian is `eps * sigma_z / 2` with `|0>` the ground
//! state at energy `-eps/2`; the joint Hamiltonian adds an ancilla qubit
//! and an excitation-exchange coupling. Joint indices are ordered
//! system-major: basis index = 2*s + a for system level `s` and ancilla
//! level `a`.

use crate::error::{Error, Result};
use crate::linalg;
use crate::C64;
use ndarray::{Array1, Array2};

/// Hermiticity / trace validation tolerance.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// States may carry eigenvalues down to this floor (integration noise).
pub const PSD_FLOOR: f64 = -1e-10;

/// Validated density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    elements: Array2<C64>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity (up to [`PSD_FLOOR`]).
    pub fn new(elements: Array2<C64>) -> Result<Self> {
        let (n, m) = elements.dim();
        if n != m {
            return Err(Error::DimensionMismatch { expected: n, got: m });
        }
        let mut herm_dev = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                herm_dev = herm_dev.max((elements[[i, j]] - elements[[j, i]].conj()).norm());
            }
        }
        if herm_dev > HERMITICITY_TOL {
            return Err(Error::NotHermitian(herm_dev));
        }
        let tr = linalg::trace(&elements);
        let tr_dev = (tr - C64::new(1.0, 0.0)).norm();
        if tr_dev > HERMITICITY_TOL {
            return Err(Error::InvalidTrace(tr_dev));
        }
        let (w, _) = linalg::eigh(&elements)?;
        if let Some(&min) = w.iter().min_by(|a, b| a.total_cmp(b)) {
            if min < PSD_FLOOR {
                return Err(Error::NotPsd(min));
            }
        }
        Ok(Self { elements })
    }

    pub fn elements(&self) -> &Array2<C64> {
        &self.elements
    }

    /// Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.elements.nrows()
    }

    /// Diagonal qubit with the given ground population.
    pub fn from_ground_population(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("population {p} outside [0,1]")));
        }
        let mut m = Array2::zeros((2, 2));
        m[[0, 0]] = C64::new(p, 0.0);
        m[[1, 1]] = C64::new(1.0 - p, 0.0);
        Ok(Self { elements: m })
    }

    /// Projector onto a normalized ket.
    pub fn pure(ket: &Array1<C64>) -> Result<Self> {
        let norm2: f64 = ket.iter().map(|z| z.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > 1e-10 {
            return Err(Error::Domain(format!("ket norm^2 = {norm2}, expected 1")));
        }
        let n = ket.len();
        let m = Array2::from_shape_fn((n, n), |(i, j)| ket[i] * ket[j].conj());
        Self::new(m)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let m = Array2::from_diag_elem(dim, C64::new(1.0 / dim as f64, 0.0));
        Self { elements: m }
    }

    /// Tensor product `self (x) other` (system-major index ordering).
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix {
            elements: linalg::kron(&self.elements, &other.elements),
        }
    }

    /// Real part of a diagonal element.
    pub fn population(&self, i: usize) -> f64 {
        self.elements[[i, i]].re
    }
}

/// Which subsystem `partial_trace` keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keep {
    System,
    Ancilla,
}

/// Hamiltonian of the working medium, possibly extended by an ancilla.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HamiltonianSpec {
    /// `gap * sigma_z / 2`; `|0>` is the ground state.
    SingleQubit { gap: f64 },
    /// System and ancilla qubits plus the excitation-exchange coupling
    /// `coupling * (sigma_plus (x) sigma_minus + h.c.)`.
    JointExchange { gap: f64, ancilla_gap: f64, coupling: f64 },
}

impl HamiltonianSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            Self::SingleQubit { gap } => *gap >= 0.0,
            Self::JointExchange { gap, ancilla_gap, .. } => *gap >= 0.0 && *ancilla_gap >= 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain("negative energy gap".into()))
        }
    }

    /// Dense matrix representation.
    pub fn matrix(&self) -> Array2<C64> {
        match self {
            Self::SingleQubit { gap } => {
                let mut h = Array2::zeros((2, 2));
                h[[0, 0]] = C64::new(-gap / 2.0, 0.0);
                h[[1, 1]] = C64::new(gap / 2.0, 0.0);
                h
            }
            Self::JointExchange { gap, ancilla_gap, coupling } => {
                let hs = Self::SingleQubit { gap: *gap }.matrix();
                let ha = Self::SingleQubit { gap: *ancilla_gap }.matrix();
                let id = linalg::identity(2);
                let mut h = linalg::kron(&hs, &id) + linalg::kron(&id, &ha);
                // sigma_plus (x) sigma_minus couples |0,1> <-> |1,0>:
                // indices 2s + a, so matrix element (2, 1) and its adjoint.
                h[[2, 1]] += C64::new(*coupling, 0.0);
                h[[1, 2]] += C64::new(*coupling, 0.0);
                h
            }
        }
    }
}

/// Thermal qubit state: ground population `p = 1/(1 + e^{-beta*eps})`.
pub fn gibbs_qubit(beta: f64, eps: f64) -> Result<DensityMatrix> {
    if beta < 0.0 || eps < 0.0 {
        return Err(Error::Domain(format!(
            "gibbs_qubit requires beta >= 0 and eps >= 0, got beta={beta}, eps={eps}"
        )));
    }
    let p = ground_population(beta, eps);
    DensityMatrix::from_ground_population(p)
}

/// Gibbs ground population `1/(1 + e^{-beta*eps})`.
pub fn ground_population(beta: f64, eps: f64) -> f64 {
    1.0 / (1.0 + (-beta * eps).exp())
}

fn clamped_spectrum(rho: &DensityMatrix) -> Result<Vec<f64>> {
    let (w, _) = linalg::eigh(rho.elements())?;
    Ok(w.iter().map(|&x| x.clamp(0.0, 1.0)).collect())
}

/// Von Neumann entropy `-sum lambda ln lambda` (eigenvalues clamped to [0,1]).
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let w = clamped_spectrum(rho)?;
    Ok(w.iter().map(|&x| if x > 0.0 { -x * x.ln() } else { 0.0 }).sum())
}

/// Relative entropy `S(rho1 || rho2)`; `+inf` when rho1 has support outside rho2.
pub fn relative_entropy(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64> {
    if rho1.dim() != rho2.dim() {
        return Err(Error::DimensionMismatch { expected: rho1.dim(), got: rho2.dim() });
    }
    let neg_s1 = -von_neumann_entropy(rho1)?;
    // Tr[rho1 ln rho2] in rho2's eigenbasis.
    let (w2, u2) = linalg::eigh(rho2.elements())?;
    let b = linalg::dagger(&u2).dot(rho1.elements()).dot(&u2);
    let mut cross = 0.0f64;
    for (j, &mu) in w2.iter().enumerate() {
        let occ = b[[j, j]].re;
        if mu < 1e-14 {
            if occ > 1e-12 {
                return Ok(f64::INFINITY);
            }
        } else {
            cross += occ * mu.ln();
        }
    }
    Ok(neg_s1 - cross)
}

/// Free energy `Tr[rho H] - S(rho)/beta`.
pub fn free_energy(rho: &DensityMatrix, h: &Array2<C64>, beta: f64) -> Result<f64> {
    if beta <= 0.0 {
        return Err(Error::Domain(format!("free_energy requires beta > 0, got {beta}")));
    }
    let energy = linalg::trace(&h.dot(rho.elements())).re;
    Ok(energy - von_neumann_entropy(rho)? / beta)
}

/// Reduced state of a two-qubit density matrix (system-major indexing).
pub fn partial_trace(joint: &DensityMatrix, keep: Keep) -> Result<DensityMatrix> {
    if joint.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, got: joint.dim() });
    }
    let r = joint.elements();
    let mut out = Array2::zeros((2, 2));
    for i in 0..2 {
        for j in 0..2 {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..2 {
                let (row, col) = match keep {
                    Keep::System => (2 * i + k, 2 * j + k),
                    Keep::Ancilla => (2 * k + i, 2 * k + j),
                };
                acc += r[[row, col]];
            }
            out[[i, j]] = acc;
        }
    }
    DensityMatrix::new(out)
}

/// Mutual information `S(rho_S) + S(rho_A) - S(R)`.
pub fn mutual_information(joint: &DensityMatrix) -> Result<f64> {
    let s_sys = von_neumann_entropy(&partial_trace(joint, Keep::System)?)?;
    let s_anc = von_neumann_entropy(&partial_trace(joint, Keep::Ancilla)?)?;
    let s_joint = von_neumann_entropy(joint)?;
    Ok(s_sys + s_anc - s_joint)
}

/// Trace distance `|| rho1 - rho2 ||_1 / 2`.
pub fn trace_distance(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64> {
    if rho1.dim() != rho2.dim() {
        return Err(Error::DimensionMismatch { expected: rho1.dim(), got: rho2.dim() });
    }
    let diff = rho1.elements() - rho2.elements();
    let (w, _) = linalg::eigh(&diff)?;
    Ok(0.5 * w.iter().map(|x| x.abs()).sum::<f64>())
}
