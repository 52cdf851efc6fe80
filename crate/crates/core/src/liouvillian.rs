//! Superoperator representation of Markovian generators.
//!
//! Density matrices are flattened column-by-column, so `vec(A rho B) =
//! (B^T (x) A) vec(rho)` and the diagonal element `(i,i)` sits at flat
//! index `i*d + i`. Generators are dense `d^2 x d^2` complex matrices;
//! steady states are computed by a rank-one trace deflation instead of a
//! least-squares null-space search, which keeps the solve deterministic.

use crate::error::{Error, Result};
use crate::linalg;
use crate::state::DensityMatrix;
use crate::C64;
use ndarray::{Array1, Array2};

/// Default number of fixed RK4 steps for driven propagation.
pub const DEFAULT_DRIVEN_STEPS: usize = 2000;
/// Maximum tolerated trace drift per driven propagation before renormalization.
pub const TRACE_DRIFT_LIMIT: f64 = 1e-9;

/// Flatten column-by-column: `v[j*d + i] = m[i, j]`.
pub fn vectorize(m: &Array2<C64>) -> Array1<C64> {
    let d = m.nrows();
    Array1::from_shape_fn(d * d, |k| m[[k % d, k / d]])
}

/// Inverse of [`vectorize`]; fails unless the length is a perfect square.
pub fn devectorize(v: &Array1<C64>) -> Result<Array2<C64>> {
    let n = v.len();
    let d = (n as f64).sqrt().round() as usize;
    if d * d != n {
        return Err(Error::DimensionMismatch { expected: d * d, got: n });
    }
    Ok(Array2::from_shape_fn((d, d), |(i, j)| v[j * d + i]))
}

/// Trace functional as a row vector on flattened matrices.
pub fn trace_row(d: usize) -> Array1<C64> {
    let mut t = Array1::zeros(d * d);
    for i in 0..d {
        t[i * d + i] = C64::new(1.0, 0.0);
    }
    t
}

/// Superoperator for rho -> -i [H, rho].
pub fn commutator_superop(h: &Array2<C64>) -> Array2<C64> {
    let d = h.nrows();
    let id = linalg::identity(d);
    let left = linalg::kron(&id, h);
    let right = linalg::kron(&h.t().to_owned(), &id);
    (left - right).mapv(|z| z * C64::new(0.0, -1.0))
}

/// Superoperator for the GKSL dissipator built from one jump operator:
/// `rho -> L rho L^dag - (L^dag L rho + rho L^dag L)/2`.
pub fn lindblad_dissipator(l: &Array2<C64>) -> Array2<C64> {
    let d = l.nrows();
    let id = linalg::identity(d);
    let ldl = linalg::dagger(l).dot(l);
    let jump = linalg::kron(&l.mapv(|z| z.conj()), l);
    let anti = linalg::kron(&id, &ldl) + linalg::kron(&ldl.t().to_owned(), &id);
    jump - anti.mapv(|z| z * C64::new(0.5, 0.0))
}

/// Dense Markovian generator acting on flattened density matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct Liouvillian {
    matrix: Array2<C64>,
}

impl Liouvillian {
    /// Wraps a `d^2 x d^2` matrix.
    pub fn new(matrix: Array2<C64>) -> Result<Self> {
        let (n, m) = matrix.dim();
        if n != m {
            return Err(Error::DimensionMismatch { expected: n, got: m });
        }
        let d = (n as f64).sqrt().round() as usize;
        if d * d != n {
            return Err(Error::DimensionMismatch { expected: d * d, got: n });
        }
        Ok(Self { matrix })
    }

    /// Purely coherent generator `-i [H, .]`.
    pub fn from_hamiltonian(h: &Array2<C64>) -> Self {
        Self { matrix: commutator_superop(h) }
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    /// Hilbert-space dimension `d`.
    pub fn dim(&self) -> usize {
        (self.matrix.nrows() as f64).sqrt().round() as usize
    }

    /// Adds another generator of the same dimension.
    pub fn add(&self, other: &Liouvillian) -> Result<Liouvillian> {
        if self.matrix.nrows() != other.matrix.nrows() {
            return Err(Error::DimensionMismatch {
                expected: self.matrix.nrows(),
                got: other.matrix.nrows(),
            });
        }
        Ok(Liouvillian { matrix: &self.matrix + &other.matrix })
    }

    /// Action on a density matrix, returned in matrix form.
    pub fn apply(&self, rho: &Array2<C64>) -> Result<Array2<C64>> {
        if rho.nrows() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: rho.nrows() });
        }
        devectorize(&self.matrix.dot(&vectorize(rho)))
    }

    /// Full eigenvalue spectrum of the generator.
    pub fn spectrum(&self) -> Result<Array1<C64>> {
        let (w, _) = linalg::eig(&self.matrix)?;
        Ok(w)
    }

    /// Trace-one fixed point, assuming a unique zero mode.
    ///
    /// Solves `(L + z t^T) v = z` with `z = vec(I/d)` and `t` the trace row;
    /// for a trace-preserving generator with simple zero eigenvalue the
    /// deflated matrix is invertible and `v` is the steady state.
    pub fn fixed_point(&self) -> Result<DensityMatrix> {
        let v = self.fixed_point_vector()?;
        DensityMatrix::new(devectorize(&v)?)
    }

    /// Flattened trace-one null vector of the generator.
    pub fn fixed_point_vector(&self) -> Result<Array1<C64>> {
        let d = self.dim();
        let t = trace_row(d);
        let z = vectorize(&Array2::from_diag_elem(d, C64::new(1.0 / d as f64, 0.0)));
        let mut deflated = self.matrix.clone();
        for i in 0..d * d {
            for j in 0..d * d {
                deflated[[i, j]] += z[i] * t[j];
            }
        }
        let v = linalg::solve(&deflated, &z).map_err(|_| Error::DegenerateGenerator)?;
        let residual: f64 = self.matrix.dot(&v).iter().map(|x| x.norm()).sum();
        let scale: f64 = linalg::norm_max(&self.matrix).max(1.0);
        if residual > 1e-8 * scale {
            return Err(Error::DegenerateGenerator);
        }
        Ok(v)
    }

    /// Solves `L x = b` restricted to the traceless sector.
    ///
    /// Requires `b` traceless (it must lie in the image of `L`). The
    /// rank-one update `L + w t^T`, with `w` the steady-state vector, is
    /// invertible exactly when the zero mode is simple, and the solution
    /// automatically satisfies `t^T x = 0`.
    pub fn deflated_solve(&self, b: &Array1<C64>) -> Result<Array1<C64>> {
        let d = self.dim();
        if b.len() != d * d {
            return Err(Error::DimensionMismatch { expected: d * d, got: b.len() });
        }
        let t = trace_row(d);
        let b_trace: C64 = (0..d).map(|i| b[i * d + i]).sum();
        if b_trace.norm() > 1e-9 {
            return Err(Error::Domain(format!(
                "deflated_solve needs a traceless right-hand side, trace = {b_trace}"
            )));
        }
        let w = self.fixed_point_vector()?;
        let mut deflated = self.matrix.clone();
        for i in 0..d * d {
            for j in 0..d * d {
                deflated[[i, j]] += w[i] * t[j];
            }
        }
        let mut x = linalg::solve(&deflated, b).map_err(|_| Error::DegenerateGenerator)?;
        // remove the residual trace component picked up by roundoff
        let x_trace: C64 = (0..d).map(|i| x[i * d + i]).sum();
        for i in 0..d * d {
            x[i] -= w[i] * x_trace;
        }
        Ok(x)
    }

    /// Evolves a state for time `t` under the constant generator via `expm`.
    pub fn propagate_const(&self, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
        if rho0.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: rho0.dim() });
        }
        if t < 0.0 {
            return Err(Error::Domain(format!("propagation time must be >= 0, got {t}")));
        }
        let propagator = linalg::expm(&self.matrix.mapv(|z| z * t))?;
        let v = propagator.dot(&vectorize(rho0.elements()));
        DensityMatrix::new(hermitize(&devectorize(&v)?))
    }
}

/// Symmetrizes away the anti-Hermitian roundoff of a propagated state.
fn hermitize(m: &Array2<C64>) -> Array2<C64> {
    let d = m.nrows();
    Array2::from_shape_fn((d, d), |(i, j)| (m[[i, j]] + m[[j, i]].conj()) * 0.5)
}

/// Fixed-step RK4 integration of `v' = L(t) v` with per-step trace control.
///
/// Returns the sampled trajectory `(t_k, rho(t_k))` at all `steps + 1` mesh
/// points. The trace is renormalized each step; if the drift before
/// renormalization ever exceeds [`TRACE_DRIFT_LIMIT`] the integration is
/// rejected as inaccurate.
pub fn propagate_driven_trajectory(
    generator: impl Fn(f64) -> Result<Liouvillian>,
    rho0: &DensityMatrix,
    tau: f64,
    steps: usize,
) -> Result<Vec<(f64, DensityMatrix)>> {
    if tau <= 0.0 || steps == 0 {
        return Err(Error::Domain(format!(
            "driven propagation needs tau > 0 and steps > 0, got tau={tau}, steps={steps}"
        )));
    }
    let d = rho0.dim();
    let h = tau / steps as f64;
    let mut v = vectorize(rho0.elements());
    let mut out = Vec::with_capacity(steps + 1);
    out.push((0.0, rho0.clone()));
    for n in 0..steps {
        let t0 = n as f64 * h;
        let l0 = generator(t0)?;
        let lm = generator(t0 + 0.5 * h)?;
        let l1 = generator(t0 + h)?;
        if l0.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: l0.dim() });
        }
        let k1 = l0.matrix.dot(&v);
        let k2 = lm.matrix.dot(&(&v + &k1.mapv(|z| z * (0.5 * h))));
        let k3 = lm.matrix.dot(&(&v + &k2.mapv(|z| z * (0.5 * h))));
        let k4 = l1.matrix.dot(&(&v + &k3.mapv(|z| z * h)));
        for i in 0..v.len() {
            v[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
        }
        let tr: C64 = (0..d).map(|i| v[i * d + i]).sum();
        let drift = (tr - C64::new(1.0, 0.0)).norm();
        if drift > TRACE_DRIFT_LIMIT {
            return Err(Error::Accuracy(format!(
                "trace drift {drift:.3e} at step {n} exceeds {TRACE_DRIFT_LIMIT:.1e}; \
                 increase the step count"
            )));
        }
        for x in v.iter_mut() {
            *x /= tr;
        }
        out.push(((n + 1) as f64 * h, DensityMatrix::new(hermitize(&devectorize(&v)?))?));
    }
    Ok(out)
}

/// Final state of [`propagate_driven_trajectory`].
pub fn propagate_driven(
    generator: impl Fn(f64) -> Result<Liouvillian>,
    rho0: &DensityMatrix,
    tau: f64,
    steps: usize,
) -> Result<DensityMatrix> {
    let traj = propagate_driven_trajectory(generator, rho0, tau, steps)?;
    Ok(traj.into_iter().last().expect("trajectory is never empty").1)
}
