//! Slow-driving expansion: first-order corrections, amplitudes, dissipation.
//!
//! A slowly driven stroke is expanded around the instantaneous fixed point:
//! `rho(t) = rho0(t) + rho1(t) + ...` with `rho1` obtained by inverting the
//! generator on the traceless subspace, `L[rho1] = d rho0/dt`. The
//! ground-population correction defines the amplitude `A = -rho1_00 / p_dot`,
//! the single number that sets the dissipation cost of driving. Control is
//! expressed through the ground population `q(x)`; the corresponding gap is
//! `eps = T ln(q/(1-q))`.

use crate::dissipators::{dissipator, BathSpec};
use crate::error::{Error, Result};
use crate::linalg;
use crate::liouvillian::{
    devectorize, propagate_driven_trajectory, vectorize, Liouvillian, DEFAULT_DRIVEN_STEPS,
};
use crate::optimize::simpson;
use crate::protocol::ControlProtocol;
use crate::state::{DensityMatrix, HamiltonianSpec};
use crate::C64;
use ndarray::Array2;

/// Control velocities below this floor are treated as stationary points.
pub const P_DOT_FLOOR: f64 = 1e-14;
/// Minimum rate-duration product for the dissipation report.
pub const SD_VALIDITY_GAMMA_TAU: f64 = 20.0;

/// First-order slow-driving data along one stroke.
#[derive(Debug, Clone)]
pub struct SDExpansion {
    /// Stroke times of the mesh points.
    pub times: Vec<f64>,
    /// Instantaneous equilibrium states.
    pub zeroth: Vec<DensityMatrix>,
    /// Traceless first-order corrections.
    pub first: Vec<Array2<C64>>,
    /// `(t, A)` samples where the control velocity is resolvable.
    pub amplitude_samples: Vec<(f64, f64)>,
}

/// Entropy-production summary of a driven stroke.
#[derive(Debug, Clone, Copy)]
pub struct DissipationReport {
    /// Irreversible entropy produced over the stroke.
    pub delta_s_irr: f64,
    /// Low-dissipation coefficient `delta_s_irr * tau`.
    pub sigma: f64,
    /// First-order (dissipated) work.
    pub dw1: f64,
}

/// Gap that makes `q` the equilibrium ground population at temperature `T`.
pub fn gap_for_population(q: f64, temperature: f64) -> f64 {
    temperature * (q / (1.0 - q)).ln()
}

/// First-order correction: solves `L[x] = rho0_dot` on the traceless subspace.
pub fn sd_first_order(l: &Liouvillian, rho0_dot: &Array2<C64>) -> Result<Array2<C64>> {
    let tr = linalg::trace(rho0_dot);
    if tr.norm() > 1e-12 {
        return Err(Error::Domain(format!(
            "equilibrium derivative must be traceless, trace = {tr}"
        )));
    }
    devectorize(&l.deflated_solve(&vectorize(rho0_dot))?)
}

/// Slow-driving amplitude `A = -rho1_00 / p_dot`.
pub fn extract_amplitude(rho1_00: f64, p_dot: f64) -> Result<f64> {
    if p_dot.abs() <= P_DOT_FLOOR {
        return Err(Error::Domain(format!(
            "amplitude undefined at a stationary control point (p_dot = {p_dot:e})"
        )));
    }
    Ok(-rho1_00 / p_dot)
}

/// Full generator (coherent + dissipative) at rescaled time `x` of a stroke.
fn stroke_generator(protocol: &ControlProtocol, bath: &BathSpec, x: f64) -> Result<Liouvillian> {
    let q = protocol.value(x);
    let eps = gap_for_population(q, bath.temperature);
    let h = HamiltonianSpec::SingleQubit { gap: eps }.matrix();
    Liouvillian::from_hamiltonian(&h).add(&dissipator(bath, eps)?)
}

/// Step count keeping the RK4 step well inside the stability region.
fn driven_steps(bath: &BathSpec, tau: f64) -> usize {
    DEFAULT_DRIVEN_STEPS.max((20.0 * bath.rate * tau).ceil() as usize)
}

/// Samples the slow-driving expansion of a stroke on `n` uniform mesh points.
pub fn sd_expansion(
    protocol: &ControlProtocol,
    bath: &BathSpec,
    n: usize,
) -> Result<SDExpansion> {
    if n < 3 {
        return Err(Error::Domain(format!("expansion mesh needs >= 3 points, got {n}")));
    }
    let tau = protocol.tau();
    let max_slope = (0..n)
        .map(|i| protocol.derivative(i as f64 / (n - 1) as f64).abs())
        .fold(0.0f64, f64::max);
    let mut times = Vec::with_capacity(n);
    let mut zeroth = Vec::with_capacity(n);
    let mut first = Vec::with_capacity(n);
    let mut amplitude_samples = Vec::new();
    for i in 0..n {
        let x = i as f64 / (n - 1) as f64;
        let q = protocol.value(x);
        let p_dot = protocol.derivative(x) / tau;
        let rho0 = DensityMatrix::from_ground_population(q)?;
        let mut rho0_dot = Array2::<C64>::zeros((2, 2));
        rho0_dot[[0, 0]] = C64::new(p_dot, 0.0);
        rho0_dot[[1, 1]] = C64::new(-p_dot, 0.0);
        let l = stroke_generator(protocol, bath, x)?;
        let rho1 = sd_first_order(&l, &rho0_dot)?;
        if p_dot.abs() > 1e-8 * (max_slope / tau).max(P_DOT_FLOOR) {
            amplitude_samples.push((x * tau, extract_amplitude(rho1[[0, 0]].re, p_dot)?));
        }
        times.push(x * tau);
        zeroth.push(rho0);
        first.push(rho1);
    }
    Ok(SDExpansion { times, zeroth, first, amplitude_samples })
}

/// Max-norm residual between the exact driven trajectory and the first-order
/// expansion, for each requested duration. Returns `(tau, residual)` rows.
pub fn sd_accuracy_scan(
    protocol: &ControlProtocol,
    bath: &BathSpec,
    durations: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let mut rows = Vec::with_capacity(durations.len());
    for &tau in durations {
        if tau * bath.rate < 1.0 {
            return Err(Error::Domain(format!(
                "duration {tau} is below the bath relaxation time 1/rate"
            )));
        }
        let p = protocol.with_tau(tau)?;
        let steps = driven_steps(bath, tau);
        let rho0 = DensityMatrix::from_ground_population(p.value(0.0))?;
        let traj = propagate_driven_trajectory(
            |t| stroke_generator(&p, bath, t / tau),
            &rho0,
            tau,
            steps,
        )?;
        // compare on a thinned mesh; the expansion solve is per-point work
        let stride = (steps / 200).max(1);
        let mut residual = 0.0f64;
        for (t, rho_exact) in traj.iter().step_by(stride) {
            let x = t / tau;
            let q = p.value(x);
            let p_dot = p.derivative(x) / tau;
            let mut rho0_dot = Array2::<C64>::zeros((2, 2));
            rho0_dot[[0, 0]] = C64::new(p_dot, 0.0);
            rho0_dot[[1, 1]] = C64::new(-p_dot, 0.0);
            let l = stroke_generator(&p, bath, x)?;
            let rho1 = sd_first_order(&l, &rho0_dot)?;
            let mut predicted = rho1;
            predicted[[0, 0]] += C64::new(q, 0.0);
            predicted[[1, 1]] += C64::new(1.0 - q, 0.0);
            let dev = linalg::norm_max(&(rho_exact.elements() - &predicted));
            residual = residual.max(dev);
        }
        rows.push((tau, residual));
    }
    Ok(rows)
}

/// Dissipated work and entropy production of one stroke at duration `tau`.
///
/// The dissipated work rate is `Tr[(rho_exact - rho0) dH/dt]`, evaluated on
/// the exact trajectory; `delta_s_irr = beta * dW1` and `sigma =
/// delta_s_irr * tau` (constant in the low-dissipation regime).
pub fn dissipation_report(
    protocol: &ControlProtocol,
    bath: &BathSpec,
    tau: f64,
) -> Result<DissipationReport> {
    if tau * bath.rate < SD_VALIDITY_GAMMA_TAU {
        return Err(Error::Domain(format!(
            "dissipation report needs rate*tau >= {SD_VALIDITY_GAMMA_TAU}, got {}",
            tau * bath.rate
        )));
    }
    let p = protocol.with_tau(tau)?;
    let steps = driven_steps(bath, tau);
    let rho0 = DensityMatrix::from_ground_population(p.value(0.0))?;
    let traj = propagate_driven_trajectory(
        |t| stroke_generator(&p, bath, t / tau),
        &rho0,
        tau,
        steps,
    )?;
    let beta = bath.beta();
    // dW1 = -int (rho_exact - rho0)_00 * eps_dot dt, with
    // eps_dot = q_dot / (beta q (1-q))
    let integrand: Vec<f64> = traj
        .iter()
        .map(|(t, rho)| {
            let x = t / tau;
            let q = p.value(x);
            let q_dot = p.derivative(x) / tau;
            let eps_dot = q_dot / (beta * q * (1.0 - q));
            -(rho.population(0) - q) * eps_dot
        })
        .collect();
    let h = tau / steps as f64;
    let dw1 = simpson(|t| integrand[(t / h).round() as usize], 0.0, tau, steps);
    let delta_s_irr = beta * dw1;
    if delta_s_irr < -1e-9 {
        return Err(Error::Accuracy(format!(
            "negative entropy production {delta_s_irr:e} signals a broken expansion"
        )));
    }
    Ok(DissipationReport { delta_s_irr, sigma: delta_s_irr * tau, dw1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dissipators::BathKind;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn reset_bath(t: f64, rate: f64) -> BathSpec {
        BathSpec::new(t, rate, BathKind::Reset).unwrap()
    }

    #[test]
    fn gap_inverts_gibbs_population() {
        let q = 0.9168273035060777;
        let t = 1.0 / 2.4;
        assert_relative_eq!(gap_for_population(q, t), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn first_order_vanishes_for_static_drive() {
        let bath = reset_bath(0.5, 1.0);
        let l = dissipator(&bath, 1.0).unwrap();
        let zero = Array2::<C64>::zeros((2, 2));
        let rho1 = sd_first_order(&l, &zero).unwrap();
        assert!(rho1.iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn reset_bath_correction_is_minus_derivative_over_rate() {
        let rate = 1.7;
        let bath = reset_bath(0.5, rate);
        let l = dissipator(&bath, 1.0).unwrap();
        let mut rho0_dot = Array2::<C64>::zeros((2, 2));
        rho0_dot[[0, 0]] = C64::new(0.01, 0.0);
        rho0_dot[[1, 1]] = C64::new(-0.01, 0.0);
        let rho1 = sd_first_order(&l, &rho0_dot).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let expected = rho0_dot[[i, j]] / (-rate);
                assert!((rho1[[i, j]] - expected).norm() < 1e-13);
            }
        }
        // the defining residual equation
        let residual = &l.apply(&rho1).unwrap() - &rho0_dot;
        assert!(residual.iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn extract_amplitude_signs_and_guard() {
        assert_relative_eq!(extract_amplitude(-0.02, 0.01).unwrap(), 2.0, epsilon = 1e-14);
        assert!(extract_amplitude(0.0, 0.0).is_err());
    }

    #[test]
    fn fermionic_amplitude_is_inverse_rate() {
        let rate = 1.3;
        let bath = BathSpec::new(0.7, rate, BathKind::Fermionic).unwrap();
        for p in [0.55, 0.7, 0.9] {
            let eps = gap_for_population(p, bath.temperature);
            let l = dissipator(&bath, eps).unwrap();
            let p_dot = 0.003;
            let mut rho0_dot = Array2::<C64>::zeros((2, 2));
            rho0_dot[[0, 0]] = C64::new(p_dot, 0.0);
            rho0_dot[[1, 1]] = C64::new(-p_dot, 0.0);
            let rho1 = sd_first_order(&l, &rho0_dot).unwrap();
            let a = extract_amplitude(rho1[[0, 0]].re, p_dot).unwrap();
            assert_relative_eq!(a, 1.0 / rate, epsilon = 1e-12);
        }
    }

    #[test]
    fn bosonic_amplitude_tracks_population() {
        let rate = 0.9;
        let bath = BathSpec::new(1.0, rate, BathKind::Bosonic).unwrap();
        for p in [0.6, 0.9] {
            let eps = gap_for_population(p, bath.temperature);
            let l = dissipator(&bath, eps).unwrap();
            let p_dot = -0.004;
            let mut rho0_dot = Array2::<C64>::zeros((2, 2));
            rho0_dot[[0, 0]] = C64::new(p_dot, 0.0);
            rho0_dot[[1, 1]] = C64::new(-p_dot, 0.0);
            let rho1 = sd_first_order(&l, &rho0_dot).unwrap();
            let a = extract_amplitude(rho1[[0, 0]].re, p_dot).unwrap();
            assert_relative_eq!(a, (2.0 * p - 1.0) / rate, epsilon = 1e-12);
        }
    }

    #[test]
    fn expansion_invariants_hold() {
        let bath = reset_bath(1.0 / 2.4, 1.0);
        let protocol = ControlProtocol::smoothstep(0.6, 0.92, 40.0).unwrap();
        let exp = sd_expansion(&protocol, &bath, 101).unwrap();
        assert_eq!(exp.times.len(), 101);
        for (i, rho1) in exp.first.iter().enumerate() {
            let tr = linalg::trace(rho1);
            assert!(tr.norm() < 1e-12, "trace leak at mesh point {i}");
        }
        for (i, rho0) in exp.zeroth.iter().enumerate() {
            let x = i as f64 / 100.0;
            assert_abs_diff_eq!(rho0.population(0), protocol.value(x), epsilon = 1e-14);
        }
        // reset bath: every resolvable sample gives A = 1/rate
        assert!(!exp.amplitude_samples.is_empty());
        for &(_, a) in &exp.amplitude_samples {
            assert_relative_eq!(a, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn residual_falls_quadratically_with_duration() {
        let bath = reset_bath(1.0 / 2.4, 1.0);
        let protocol = ControlProtocol::smoothstep(0.6, 0.92, 1.0).unwrap();
        let rows = sd_accuracy_scan(&protocol, &bath, &[25.0, 50.0]).unwrap();
        let ratio = rows[0].1 / rows[1].1;
        assert!(
            (ratio - 4.0).abs() < 1.0,
            "expected ~4x residual drop on doubling, got {ratio}"
        );
    }

    #[test]
    fn quasi_static_limit_has_tiny_residual() {
        let bath = reset_bath(1.0 / 2.4, 1.0);
        let protocol = ControlProtocol::smoothstep(0.6, 0.92, 1.0).unwrap();
        let rows = sd_accuracy_scan(&protocol, &bath, &[1e4]).unwrap();
        assert!(rows[0].1 < 1e-6, "residual {} at tau=1e4", rows[0].1);
    }

    #[test]
    fn dissipation_static_protocol_is_free() {
        let bath = reset_bath(0.5, 1.0);
        let protocol = ControlProtocol::smoothstep(0.7, 0.7, 30.0).unwrap();
        let rep = dissipation_report(&protocol, &bath, 30.0).unwrap();
        assert_abs_diff_eq!(rep.delta_s_irr, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rep.dw1, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn sigma_is_duration_invariant() {
        let bath = reset_bath(1.0 / 2.4, 1.0);
        let protocol = ControlProtocol::smoothstep(0.6, 0.92, 1.0).unwrap();
        let r40 = dissipation_report(&protocol, &bath, 40.0).unwrap();
        let r80 = dissipation_report(&protocol, &bath, 80.0).unwrap();
        assert!(r40.delta_s_irr > 0.0);
        assert_relative_eq!(r40.sigma, r80.sigma, max_relative = 0.01);
    }

    #[test]
    fn entropy_production_matches_quadrature_identity() {
        // beta * dW1 should equal A * int q_dot^2/(q(1-q)) dt for slow strokes
        let bath = reset_bath(1.0 / 2.4, 1.0);
        let tau = 80.0;
        let protocol = ControlProtocol::smoothstep(0.6, 0.92, tau).unwrap();
        let rep = dissipation_report(&protocol, &bath, tau).unwrap();
        let a = 1.0; // reset amplitude 1/rate
        let quad = simpson(
            |x| {
                let q = protocol.value(x);
                let qp = protocol.derivative(x);
                qp * qp / (q * (1.0 - q))
            },
            0.0,
            1.0,
            2000,
        ) * a
            / tau;
        assert_relative_eq!(rep.delta_s_irr, quad, max_relative = 0.03);
    }

    #[test]
    fn report_rejects_fast_strokes() {
        let bath = reset_bath(0.5, 1.0);
        let protocol = ControlProtocol::smoothstep(0.6, 0.9, 5.0).unwrap();
        assert!(dissipation_report(&protocol, &bath, 5.0).is_err());
    }
}
