//! Ancilla-mediated baths with tunable memory.
//!
//! Each bath couples to the working qubit through a resonant ancilla qubit:
//! both the system and the ancilla are reset toward their local Gibbs states
//! at rates `Gamma_S` and `Gamma_A`, while an excitation-exchange coupling
//! `gamma` lets energy flow coherently between them. The reduced system
//! dynamics is non-Markovian for `gamma > 0` and collapses to the plain
//! reset model at `gamma = 0`.
//!
//! The joint dynamics closes on a six-component subspace — the four
//! populations in the coupled energy basis plus the single exchange
//! coherence — which is the computational workhorse here. The full 16-dim
//! superoperator is kept as a verification oracle. Coherence components use
//! the lab frame, where the detuning rotates `k = rho[2,1]` at `eps - E`;
//! the interaction-picture convention differs only by the sign of the real
//! part.

use crate::error::{Error, Result};
use crate::linalg;
use crate::liouvillian::{commutator_superop, vectorize, Liouvillian};
use crate::optimize;
use crate::otto::{self, OttoSpec};
use crate::state::{gibbs_qubit, ground_population, DensityMatrix, HamiltonianSpec, Keep};
use crate::C64;
use ndarray::{Array1, Array2};

const DIM_JOINT: usize = 4;
const DIM_REDUCED: usize = 6;
/// Couplings whose strong-coupling amplitude beats the memoryless value.
pub fn strong_coupling_threshold() -> f64 {
    2.0_f64.sqrt() - 1.0
}

/// One thermal bath realized as reset dissipators on a qubit + ancilla pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AncillaBathSpec {
    pub temperature: f64,
    /// System reset rate `Gamma_S`.
    pub gamma_s: f64,
    /// Ancilla reset rate `Gamma_A`.
    pub gamma_a: f64,
    /// Exchange coupling `gamma`.
    pub coupling: f64,
    /// Ancilla gap `E`.
    pub ancilla_gap: f64,
}

impl AncillaBathSpec {
    pub fn new(
        temperature: f64,
        gamma_s: f64,
        gamma_a: f64,
        coupling: f64,
        ancilla_gap: f64,
    ) -> Result<Self> {
        if temperature <= 0.0 || gamma_s <= 0.0 || gamma_a <= 0.0 || ancilla_gap <= 0.0 {
            return Err(Error::Domain(
                "temperature, reset rates and ancilla gap must be positive".into(),
            ));
        }
        if coupling < 0.0 {
            return Err(Error::Domain(format!(
                "exchange coupling must be nonnegative, got {coupling}"
            )));
        }
        Ok(Self { temperature, gamma_s, gamma_a, coupling, ancilla_gap })
    }

    /// Rate ratio `c = Gamma_A / Gamma_S`.
    pub fn c(&self) -> f64 {
        self.gamma_a / self.gamma_s
    }

    /// Dimensionless coupling `y = gamma / Gamma_S`.
    pub fn y(&self) -> f64 {
        self.coupling / self.gamma_s
    }

    pub fn beta(&self) -> f64 {
        1.0 / self.temperature
    }

    pub fn ancilla_ground_population(&self) -> f64 {
        ground_population(self.beta(), self.ancilla_gap)
    }
}

/// The closed six-component subset of the joint state: populations `q_ab`
/// (`a` = ancilla level, `b` = system level) and the exchange coherence
/// `k = rho[2,1]` split into imaginary and real parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedJointVector {
    pub q00: f64,
    pub q01: f64,
    pub q10: f64,
    pub q11: f64,
    pub im_k: f64,
    pub re_k: f64,
}

impl ReducedJointVector {
    pub fn new(q00: f64, q01: f64, q10: f64, q11: f64, im_k: f64, re_k: f64) -> Result<Self> {
        let v = Self { q00, q01, q10, q11, im_k, re_k };
        v.validate()?;
        Ok(v)
    }

    fn validate(&self) -> Result<()> {
        let pops = [self.q00, self.q01, self.q10, self.q11];
        if pops.iter().any(|p| *p < -1e-10) {
            return Err(Error::NotPsd(*pops.iter().min_by(|a, b| a.total_cmp(b)).unwrap()));
        }
        let trace: f64 = pops.iter().sum();
        if (trace - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidTrace(trace));
        }
        Ok(())
    }

    /// Product of two diagonal qubit states: ancilla ground weight `p_a`,
    /// system ground weight `p_s`.
    pub fn thermal_product(p_a: f64, p_s: f64) -> Result<Self> {
        Self::new(
            p_a * p_s,
            p_a * (1.0 - p_s),
            (1.0 - p_a) * p_s,
            (1.0 - p_a) * (1.0 - p_s),
            0.0,
            0.0,
        )
    }

    /// Reads the six tracked components off a joint density matrix.
    pub fn from_density(rho: &DensityMatrix) -> Result<Self> {
        if rho.dim() != DIM_JOINT {
            return Err(Error::DimensionMismatch { expected: DIM_JOINT, got: rho.dim() });
        }
        let m = rho.elements();
        Self::new(
            m[[0, 0]].re,
            m[[2, 2]].re,
            m[[1, 1]].re,
            m[[3, 3]].re,
            m[[2, 1]].im,
            m[[2, 1]].re,
        )
    }

    pub fn to_array(&self) -> [f64; DIM_REDUCED] {
        [self.q00, self.q01, self.q10, self.q11, self.im_k, self.re_k]
    }

    pub fn from_array(v: &[f64; DIM_REDUCED]) -> Result<Self> {
        Self::new(v[0], v[1], v[2], v[3], v[4], v[5])
    }

    /// Ground population of the system qubit, `q00 + q10`.
    pub fn system_ground_population(&self) -> f64 {
        self.q00 + self.q10
    }
}

/// Places a reduced vector into the corresponding Hermitian 4x4 matrix.
fn embed(v: &[f64; DIM_REDUCED]) -> Array2<C64> {
    let mut m = Array2::zeros((DIM_JOINT, DIM_JOINT));
    m[[0, 0]] = C64::new(v[0], 0.0);
    m[[2, 2]] = C64::new(v[1], 0.0);
    m[[1, 1]] = C64::new(v[2], 0.0);
    m[[3, 3]] = C64::new(v[3], 0.0);
    m[[2, 1]] = C64::new(v[5], v[4]);
    m[[1, 2]] = C64::new(v[5], -v[4]);
    m
}

/// Reads the six tracked components off a (not necessarily normalized)
/// Hermitian matrix.
fn project(m: &Array2<C64>) -> [f64; DIM_REDUCED] {
    [
        m[[0, 0]].re,
        m[[2, 2]].re,
        m[[1, 1]].re,
        m[[3, 3]].re,
        m[[2, 1]].im,
        m[[2, 1]].re,
    ]
}

fn partial_trace_raw(m: &Array2<C64>, keep: Keep) -> Array2<C64> {
    let mut out = Array2::zeros((2, 2));
    for i in 0..2 {
        for j in 0..2 {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..2 {
                let (row, col) = match keep {
                    Keep::System => (2 * i + k, 2 * j + k),
                    Keep::Ancilla => (2 * k + i, 2 * k + j),
                };
                acc += m[[row, col]];
            }
            out[[i, j]] = acc;
        }
    }
    out
}

/// Superoperator of `rate * (reset one factor to omega - identity)`,
/// acting on the joint space; the other factor's marginal is untouched.
fn reset_factor_superop(rate: f64, omega: &Array2<C64>, reset: Keep) -> Array2<C64> {
    let d2 = DIM_JOINT * DIM_JOINT;
    let mut sup = Array2::zeros((d2, d2));
    for k in 0..d2 {
        let mut basis = Array2::zeros((DIM_JOINT, DIM_JOINT));
        basis[[k % DIM_JOINT, k / DIM_JOINT]] = C64::new(1.0, 0.0);
        let image = match reset {
            // resetting the system keeps the ancilla marginal
            Keep::System => linalg::kron(omega, &partial_trace_raw(&basis, Keep::Ancilla)),
            Keep::Ancilla => linalg::kron(&partial_trace_raw(&basis, Keep::System), omega),
        };
        let col = vectorize(&(&image - &basis));
        for (i, val) in col.iter().enumerate() {
            sup[[i, k]] = rate * val;
        }
    }
    sup
}

/// Joint system-ancilla generator in both representations.
#[derive(Debug, Clone)]
pub struct JointModel {
    /// Full 16-dim superoperator (verification oracle).
    pub full: Liouvillian,
    /// Real generator of the closed six-component subset.
    pub reduced: Array2<f64>,
    beta: f64,
}

/// Builds the joint generator at system gap `eps`: exchange Hamiltonian
/// plus independent reset dissipators for the system and the ancilla.
pub fn build_joint_liouvillian(spec: &AncillaBathSpec, eps: f64) -> Result<JointModel> {
    if eps <= 0.0 {
        return Err(Error::Domain(format!("system gap must be positive, got {eps}")));
    }
    let beta = spec.beta();
    let h = HamiltonianSpec::JointExchange {
        gap: eps,
        ancilla_gap: spec.ancilla_gap,
        coupling: spec.coupling,
    }
    .matrix();
    let omega_s = gibbs_qubit(beta, eps)?;
    let omega_a = gibbs_qubit(beta, spec.ancilla_gap)?;
    let mut matrix = commutator_superop(&h);
    matrix = matrix + reset_factor_superop(spec.gamma_s, omega_s.elements(), Keep::System);
    matrix = matrix + reset_factor_superop(spec.gamma_a, omega_a.elements(), Keep::Ancilla);
    let full = Liouvillian::new(matrix)?;

    // contract onto the tracked subset and confirm it is invariant
    let mut reduced = Array2::zeros((DIM_REDUCED, DIM_REDUCED));
    let scale = spec.gamma_s + spec.gamma_a + spec.coupling + eps + spec.ancilla_gap;
    for j in 0..DIM_REDUCED {
        let mut unit = [0.0; DIM_REDUCED];
        unit[j] = 1.0;
        let image = full.apply(&embed(&unit))?;
        let contracted = project(&image);
        let leak = linalg::norm_max(&(&image - &embed(&contracted)));
        if leak > 1e-10 * scale.max(1.0) {
            return Err(Error::Accuracy(format!(
                "tracked subset is not invariant (leak {leak:.2e})"
            )));
        }
        for i in 0..DIM_REDUCED {
            reduced[[i, j]] = contracted[i];
        }
    }
    Ok(JointModel { full, reduced, beta })
}

impl JointModel {
    fn reduced_complex(&self) -> Array2<C64> {
        self.reduced.map(|x| C64::new(*x, 0.0))
    }

    /// Stationary reduced state via a rank-one trace deflation.
    pub fn reduced_fixed_point(&self) -> Result<ReducedJointVector> {
        let mut a = self.reduced_complex();
        let z = [0.25, 0.25, 0.25, 0.25, 0.0, 0.0];
        for i in 0..DIM_REDUCED {
            for j in 0..4 {
                a[[i, j]] += C64::new(z[i], 0.0);
            }
        }
        let rhs = Array1::from_iter(z.iter().map(|x| C64::new(*x, 0.0)));
        let sol = linalg::solve(&a, &rhs)?;
        let mut v = [0.0; DIM_REDUCED];
        for (i, value) in sol.iter().enumerate() {
            if value.im.abs() > 1e-11 {
                return Err(Error::Accuracy(format!(
                    "stationary reduced state has imaginary leakage {:.2e}",
                    value.im
                )));
            }
            v[i] = value.re;
        }
        let residual = residual_max(&self.reduced, &v, &[0.0; DIM_REDUCED]);
        if residual > 1e-8 * matrix_scale(&self.reduced) {
            return Err(Error::DegenerateGenerator);
        }
        ReducedJointVector::from_array(&v)
    }

    /// Solves `G x = b` on the traceless subspace (`b` must be traceless);
    /// the population components of `x` sum to zero.
    pub fn reduced_deflated_solve(&self, b: &[f64; DIM_REDUCED]) -> Result<[f64; DIM_REDUCED]> {
        let b_trace: f64 = b[..4].iter().sum();
        if b_trace.abs() > 1e-9 * b.iter().map(|x| x.abs()).fold(1.0, f64::max) {
            return Err(Error::Domain(format!(
                "right-hand side carries trace {b_trace:.2e}; the generator cannot produce it"
            )));
        }
        let fixed = self.reduced_fixed_point()?.to_array();
        let mut a = self.reduced_complex();
        for i in 0..DIM_REDUCED {
            for j in 0..4 {
                a[[i, j]] += C64::new(fixed[i], 0.0);
            }
        }
        let rhs = Array1::from_iter(b.iter().map(|x| C64::new(*x, 0.0)));
        let sol = linalg::solve(&a, &rhs)?;
        let mut x = [0.0; DIM_REDUCED];
        for (i, value) in sol.iter().enumerate() {
            x[i] = value.re;
        }
        let x_trace: f64 = x[..4].iter().sum();
        for i in 0..DIM_REDUCED {
            x[i] -= fixed[i] * x_trace;
        }
        let residual = residual_max(&self.reduced, &x, b);
        let scale = b.iter().map(|v| v.abs()).fold(1.0, f64::max);
        if residual > 1e-8 * scale * matrix_scale(&self.reduced).max(1.0) {
            return Err(Error::Accuracy(format!(
                "deflated reduced solve residual {residual:.2e}"
            )));
        }
        Ok(x)
    }

    /// Evolves a reduced vector for time `t` with the matrix exponential.
    pub fn propagate_reduced(&self, v0: &ReducedJointVector, t: f64) -> Result<ReducedJointVector> {
        if t < 0.0 {
            return Err(Error::Domain(format!("negative evolution time {t}")));
        }
        let propagator = linalg::expm(&self.reduced_complex().map(|x| x * t))?;
        let v = Array1::from_iter(v0.to_array().iter().map(|x| C64::new(*x, 0.0)));
        let out = propagator.dot(&v);
        let mut result = [0.0; DIM_REDUCED];
        for (i, value) in out.iter().enumerate() {
            result[i] = value.re;
        }
        ReducedJointVector::from_array(&result)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

fn matrix_scale(g: &Array2<f64>) -> f64 {
    g.iter().fold(0.0_f64, |acc, x| acc.max(x.abs())).max(1.0)
}

fn residual_max(g: &Array2<f64>, x: &[f64; DIM_REDUCED], b: &[f64; DIM_REDUCED]) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..DIM_REDUCED {
        let mut acc = 0.0;
        for j in 0..DIM_REDUCED {
            acc += g[[i, j]] * x[j];
        }
        worst = worst.max((acc - b[i]).abs());
    }
    worst
}

/// Eigen-decomposition of the resonant equal-rates generator restricted to
/// the five components that couple (the real coherence part decays
/// independently at `-2 Gamma`). Rates in units of `Gamma`, ancilla and
/// system thermal ground population `p0`.
pub fn resonant_eigensystem(p0: f64, y: f64) -> Result<(Array1<C64>, Array2<C64>)> {
    if !(0.5..1.0).contains(&p0) {
        return Err(Error::Domain(format!(
            "thermal ground population must lie in [0.5, 1), got {p0}"
        )));
    }
    if y < 0.0 {
        return Err(Error::Domain(format!("coupling ratio must be nonnegative, got {y}")));
    }
    let gap = 1.0;
    let temperature = gap / (p0 / (1.0 - p0)).ln();
    let spec = AncillaBathSpec::new(temperature, 1.0, 1.0, y, gap)?;
    let model = build_joint_liouvillian(&spec, gap)?;
    // the R row and column must vanish at resonance
    for i in 0..DIM_REDUCED - 1 {
        if model.reduced[[i, 5]].abs() > 1e-12 || model.reduced[[5, i]].abs() > 1e-12 {
            return Err(Error::Accuracy(
                "real coherence failed to decouple at resonance".into(),
            ));
        }
    }
    let mut block = Array2::zeros((5, 5));
    for i in 0..5 {
        for j in 0..5 {
            block[[i, j]] = C64::new(model.reduced[[i, j]], 0.0);
        }
    }
    let (mut w, mut vectors) = linalg::eig(&block)?;
    // sort by descending real part, then ascending imaginary part
    let mut order: Vec<usize> = (0..5).collect();
    order.sort_by(|&a, &b| {
        w[b].re.total_cmp(&w[a].re).then(w[a].im.total_cmp(&w[b].im))
    });
    let w_sorted = Array1::from_iter(order.iter().map(|&i| w[i]));
    let mut v_sorted = Array2::zeros((5, 5));
    for (col, &i) in order.iter().enumerate() {
        for row in 0..5 {
            v_sorted[[row, col]] = vectors[[row, i]];
        }
    }
    w = w_sorted;
    vectors = v_sorted;
    Ok((w, vectors))
}

/// Ground-population relaxation factor `f(t, kappa)` of the resonant
/// equal-rates model: the deviation from equilibrium after time `t` is
/// `f(t)` times the initial one. Time in units of `1/Gamma`;
/// `kappa^2 = 1 - 16 y^2` continues to the oscillatory branch for
/// `y > 1/4`. Panics on negative arguments.
pub fn relaxation_profile(t: f64, y: f64) -> f64 {
    assert!(t >= 0.0 && y >= 0.0, "relaxation_profile needs t >= 0 and y >= 0");
    let k2 = 1.0 - 16.0 * y * y;
    if k2.abs() < 1e-9 {
        // degenerate kappa -> 0 limit
        return 0.5 * (-t).exp() + (-1.5 * t).exp() * (0.5 + 0.25 * t);
    }
    if k2 > 0.0 {
        let kappa = k2.sqrt();
        0.5 * (-t).exp()
            + (1.0 + kappa) / (4.0 * kappa) * ((-1.5 + 0.5 * kappa) * t).exp()
            - (1.0 - kappa) / (4.0 * kappa) * ((-1.5 - 0.5 * kappa) * t).exp()
    } else {
        let mu = (-k2).sqrt();
        0.5 * (-t).exp()
            + (-1.5 * t).exp() * (0.5 * (0.5 * mu * t).cos() + (0.5 * mu * t).sin() / (2.0 * mu))
    }
}

/// Slow-driving dissipation amplitude of the resonant ancilla bath,
/// closed form in `c = Gamma_A/Gamma_S` and `y = gamma/Gamma_S`.
pub fn sd_amplitude_resonant(c: f64, y: f64, gamma_s: f64) -> Result<f64> {
    if c <= 0.0 || gamma_s <= 0.0 {
        return Err(Error::Domain(
            "rate ratio and system rate must be positive".into(),
        ));
    }
    if y < 0.0 {
        return Err(Error::Domain(format!("coupling ratio must be nonnegative, got {y}")));
    }
    let den = c + 2.0 * y * y;
    let bracket = 2.0 + c * (c - 2.0) / den
        + (c * c * (c + 1.0) * (c + 1.0) - c * c * c) / (den * den);
    Ok(bracket / (gamma_s * (c + 1.0) * (c + 1.0)))
}

/// Equal-rates specialization `(4 + 6y^2 + 8y^4) / (4 Gamma (1 + 2y^2)^2)`.
pub fn sd_amplitude_equal_rates(y: f64, gamma: f64) -> Result<f64> {
    if gamma <= 0.0 {
        return Err(Error::Domain(format!("rate must be positive, got {gamma}")));
    }
    if y < 0.0 {
        return Err(Error::Domain(format!("coupling ratio must be nonnegative, got {y}")));
    }
    let y2 = y * y;
    let den = 1.0 + 2.0 * y2;
    Ok((4.0 + 6.0 * y2 + 8.0 * y2 * y2) / (4.0 * gamma * den * den))
}

/// Strong-coupling limit `2 / (Gamma (c+1)^2)` of the amplitude.
pub fn sd_amplitude_strong(c: f64, gamma_s: f64) -> Result<f64> {
    if c <= 0.0 || gamma_s <= 0.0 {
        return Err(Error::Domain(
            "rate ratio and system rate must be positive".into(),
        ));
    }
    Ok(2.0 / (gamma_s * (c + 1.0) * (c + 1.0)))
}

/// Numeric slow-driving amplitude from the reduced generator alone:
/// finite-difference derivative of the stationary state in the gap,
/// deflated solve, and readout of the system-ground component. Exists to
/// validate [`sd_amplitude_resonant`] and to cover small detunings.
pub fn sd_amplitude_numeric(spec: &AncillaBathSpec, eps: f64) -> Result<f64> {
    let h = 1e-6 * eps.abs().max(1.0);
    let plus = build_joint_liouvillian(spec, eps + h)?.reduced_fixed_point()?.to_array();
    let minus = build_joint_liouvillian(spec, eps - h)?.reduced_fixed_point()?.to_array();
    let mut slope = [0.0; DIM_REDUCED];
    for i in 0..DIM_REDUCED {
        slope[i] = (plus[i] - minus[i]) / (2.0 * h);
    }
    let model = build_joint_liouvillian(spec, eps)?;
    let x = model.reduced_deflated_solve(&slope)?;
    let beta = spec.beta();
    let p = ground_population(beta, eps);
    Ok(-(x[0] + x[2]) / (beta * p * (1.0 - p)))
}

/// Where the amplitude's coupling dependence puts its optimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OptimalCoupling {
    /// Finite minimizing `y`.
    Finite(f64),
    /// The amplitude decreases monotonically; no finite optimum.
    Unbounded,
}

/// Coupling that minimizes the resonant amplitude: finite for `c < 2`,
/// unbounded otherwise.
pub fn optimal_coupling(c: f64) -> Result<OptimalCoupling> {
    if c <= 0.0 {
        return Err(Error::Domain(format!("rate ratio must be positive, got {c}")));
    }
    if c >= 2.0 {
        return Ok(OptimalCoupling::Unbounded);
    }
    Ok(OptimalCoupling::Finite(
        (c * c * (2.0 * c + 3.0) / (2.0 * (2.0 - c))).sqrt(),
    ))
}

/// Qualitative shape of the power ratio `1/(A Gamma)` as a function of `y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingRegime {
    /// Finite peak, but the strong-coupling tail drops below the
    /// memoryless value.
    PeakThenBelowMarkovian,
    /// Finite peak and a strong-coupling tail that stays above it.
    PeakAboveMarkovian,
    /// No finite peak; the ratio grows monotonically to `(c+1)^2/2`.
    MonotoneGrowth,
}

pub fn coupling_regime(c: f64) -> CouplingRegime {
    if c <= strong_coupling_threshold() {
        CouplingRegime::PeakThenBelowMarkovian
    } else if c < 2.0 {
        CouplingRegime::PeakAboveMarkovian
    } else {
        CouplingRegime::MonotoneGrowth
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CarnotSweepRow {
    pub c: f64,
    pub y: f64,
    /// `P_max / P_markov = 1 / (A Gamma)`.
    pub power_ratio: f64,
    pub regime: CouplingRegime,
}

/// Maximum Carnot power against coupling, normalized to the memoryless
/// bath; rows sorted by `c` then `y`.
pub fn carnot_power_sweep(c_list: &[f64], y_grid: &[f64]) -> Result<Vec<CarnotSweepRow>> {
    let mut cs = c_list.to_vec();
    let mut ys = y_grid.to_vec();
    cs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let mut rows = Vec::with_capacity(cs.len() * ys.len());
    for &c in &cs {
        let regime = coupling_regime(c);
        for &y in &ys {
            let ratio = 1.0 / sd_amplitude_resonant(c, y, 1.0)?;
            rows.push(CarnotSweepRow { c, y, power_ratio: ratio, regime });
        }
    }
    Ok(rows)
}

/// Otto power with ancilla-mediated isochores sharing coupling `y` and a
/// common duration `tau` (units of `1/Gamma`).
pub fn otto_power_nonmarkov(spec: &OttoSpec, y: f64, tau: f64) -> Result<f64> {
    if tau <= 0.0 {
        return Err(Error::Domain(format!("duration must be positive, got {tau}")));
    }
    if y < 0.0 {
        return Err(Error::Domain(format!("coupling ratio must be nonnegative, got {y}")));
    }
    let symmetric = OttoSpec { tau_c: tau, tau_h: tau, ..*spec };
    otto::exact_power(
        &symmetric,
        |t| relaxation_profile(t, y),
        |t| relaxation_profile(t, y),
    )
}

#[derive(Debug, Clone, Copy)]
pub struct OttoSweepRow {
    pub y: f64,
    /// Optimal common duration; 0 flags a supremum at vanishing duration.
    pub tau_star: f64,
    /// `P_max` normalized to the memoryless optimum `K Gamma / 4`.
    pub power_ratio: f64,
}

/// Maximizes the non-Markovian Otto power over the duration for each
/// coupling; rows sorted by `y`.
pub fn otto_max_sweep(spec: &OttoSpec, y_grid: &[f64]) -> Result<Vec<OttoSweepRow>> {
    let mut ys = y_grid.to_vec();
    ys.sort_by(f64::total_cmp);
    let markov_max = spec.itt_work() / 4.0;
    if markov_max <= 0.0 {
        return Err(Error::Domain(
            "cycle produces no work at full thermalization; ratio undefined".into(),
        ));
    }
    let mut rows = Vec::with_capacity(ys.len());
    for &y in &ys {
        let (tau_star, p_max) =
            otto::symmetric_optimum(|t| relaxation_profile(t, y), spec, 1.0)?;
        rows.push(OttoSweepRow { y, tau_star, power_ratio: p_max / markov_max });
    }
    Ok(rows)
}

/// Brute-force check value: maximizes the two-duration Otto power on a
/// rectangle by nested golden-section search. Returns
/// `(tau_c, tau_h, power)`.
pub fn otto_two_duration_optimum(
    spec: &OttoSpec,
    y: f64,
    bracket: (f64, f64),
) -> Result<(f64, f64, f64)> {
    let power = |tc: f64, th: f64| -> Result<f64> {
        let pair = OttoSpec { tau_c: tc, tau_h: th, ..*spec };
        otto::exact_power(
            &pair,
            |t| relaxation_profile(t, y),
            |t| relaxation_profile(t, y),
        )
    };
    let inner = |th: f64| -> f64 {
        optimize::maximize(
            |tc| power(tc, th).unwrap_or(f64::NEG_INFINITY),
            bracket.0,
            bracket.1,
            1e-9,
        )
        .map(|(_, p)| p)
        .unwrap_or(f64::NEG_INFINITY)
    };
    let (th_star, _) = optimize::maximize(inner, bracket.0, bracket.1, 1e-9)?;
    let (tc_star, p_star) = optimize::maximize(
        |tc| power(tc, th_star).unwrap_or(f64::NEG_INFINITY),
        bracket.0,
        bracket.1,
        1e-9,
    )?;
    Ok((tc_star, th_star, p_star))
}
