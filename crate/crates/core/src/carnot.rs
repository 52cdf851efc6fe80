//! Finite-time Carnot cycle: heats, efficiency, power, and protocol shape
//! optimization in the slow-driving regime.
//!
//! The cycle alternates two driven isotherms (cold and hot) joined by
//! instantaneous quenches that carry work but no heat. To lowest order each
//! isothermal heat is `T ΔS` of the endpoint Gibbs states; the first-order
//! correction is `-(A/β) ∫ q̇²/(q(1-q)) dt`, always dissipative. Efficiency
//! and power follow from the ratios `α_j = ΔQ_j⁽¹⁾/ΔQ_j⁽⁰⁾`, and speeding
//! up or slowing down the strokes (`τ_j → λ_j τ_j`) trades efficiency
//! against power with a closed-form optimum.

use crate::dissipators::BathSpec;
use crate::error::{Error, Result};
use crate::optimize::{maximize, simpson_converged};
use crate::protocol::{ControlProtocol, ProtocolShape};
use crate::slow_driving::gap_for_population;

/// Smoothing parameters of the optimal-shape family.
pub const DEFAULT_SMOOTHING_KS: [usize; 5] = [10, 20, 40, 80, 160];

/// Binary Shannon entropy of a ground population.
fn binary_entropy(p: f64) -> f64 {
    -p * p.ln() - (1.0 - p) * (1.0 - p).ln()
}

/// Log-odds `ln(q/(1-q))`, the dimensionless gap of the population `q`.
fn ln_odds(q: f64) -> f64 {
    (q / (1.0 - q)).ln()
}

fn check_open_interval(p: f64, what: &str) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} = {p} must lie strictly inside (0,1)")))
    }
}

/// Reversible isothermal heat `(S(p_fin) - S(p_in)) / β` absorbed from the
/// bath while the equilibrium ground population moves `p_in → p_fin`.
pub fn zeroth_order_heat(beta: f64, p_in: f64, p_fin: f64) -> Result<f64> {
    if beta <= 0.0 {
        return Err(Error::Domain(format!("beta must be > 0, got {beta}")));
    }
    check_open_interval(p_in, "initial population")?;
    check_open_interval(p_fin, "final population")?;
    Ok((binary_entropy(p_fin) - binary_entropy(p_in)) / beta)
}

/// Integration breakpoints: the capped cosine is only piecewise smooth.
fn breakpoints(protocol: &ControlProtocol) -> Vec<f64> {
    match protocol.shape() {
        ProtocolShape::SmoothedCosine { k } => {
            let h = 1.0 / *k as f64;
            vec![0.0, h, 1.0 - h, 1.0]
        }
        _ => vec![0.0, 1.0],
    }
}

/// `∫₀¹ q'(x)²/(q(1-q)) dx` — the dissipation integral in rescaled time.
pub fn velocity_integral(protocol: &ControlProtocol) -> Result<f64> {
    if let ProtocolShape::Mesh(samples) = protocol.shape() {
        // user meshes integrate on their own grid (trapezoid, FD slopes)
        let n = samples.len() - 1;
        let h = 1.0 / n as f64;
        let f = |i: usize| {
            let x = i as f64 * h;
            let q = protocol.value(x);
            let d = protocol.derivative(x);
            d * d / (q * (1.0 - q))
        };
        let mut acc = 0.5 * (f(0) + f(n));
        for i in 1..n {
            acc += f(i);
        }
        return Ok(acc * h);
    }
    let integrand = |x: f64| {
        let q = protocol.value(x);
        let d = protocol.derivative(x);
        d * d / (q * (1.0 - q))
    };
    piecewise_simpson(protocol, integrand)
}

/// Integrates over the smooth segments of the protocol, taking one-sided
/// limits at segment boundaries (derivatives may jump across cap seams).
fn piecewise_simpson(
    protocol: &ControlProtocol,
    integrand: impl Fn(f64) -> f64,
) -> Result<f64> {
    let mut total = 0.0;
    for pair in breakpoints(protocol).windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let nudge = (b - a) * 1e-12;
        let f = |x: f64| integrand(x.clamp(a + nudge, b - nudge));
        total += simpson_converged(f, a, b, 1e-9, 64, 14)?;
    }
    Ok(total)
}

/// Curvature form `∫₀¹ ln(q/(1-q)) q̈ dx` (no absolute value applied).
fn curvature_integral(protocol: &ControlProtocol) -> Result<f64> {
    if let ProtocolShape::Mesh(samples) = protocol.shape() {
        let n = samples.len() - 1;
        let h = 1.0 / n as f64;
        let f = |i: usize| {
            let x = i as f64 * h;
            ln_odds(protocol.value(x)) * protocol.second_derivative(x)
        };
        let mut acc = 0.5 * (f(0) + f(n));
        for i in 1..n {
            acc += f(i);
        }
        return Ok(acc * h);
    }
    let integrand =
        |x: f64| ln_odds(protocol.value(x)) * protocol.second_derivative(x);
    piecewise_simpson(protocol, integrand)
}

/// Dissipation shape functional `F = |∫ ln(q/(1-q)) q̈ dx|`.
///
/// For admissible protocols (flat endpoints) integration by parts makes this
/// equal to [`velocity_integral`].
pub fn shape_functional(protocol: &ControlProtocol) -> Result<f64> {
    Ok(curvature_integral(protocol)?.abs())
}

/// First-order (dissipated) heat `-(A/β) ∫ q̇²/(q(1-q)) dt ≤ 0`.
pub fn first_order_heat(a: f64, beta: f64, protocol: &ControlProtocol) -> Result<f64> {
    if a < 0.0 || beta <= 0.0 {
        return Err(Error::Domain(format!(
            "first_order_heat needs amplitude >= 0 and beta > 0, got A={a}, beta={beta}"
        )));
    }
    protocol.validate_admissible()?;
    Ok(-(a / (beta * protocol.tau())) * velocity_integral(protocol)?)
}

/// Heats, ratios, efficiency and power of one engine cycle.
#[derive(Debug, Clone, Copy)]
pub struct CycleReport {
    pub q0_h: f64,
    pub q0_c: f64,
    pub q1_h: f64,
    pub q1_c: f64,
    pub alpha_h: f64,
    pub alpha_c: f64,
    pub eta: f64,
    pub eta_carnot: f64,
    pub power: f64,
    pub tau_h: f64,
    pub tau_c: f64,
}

/// Builds the cycle report from the two isothermal protocols.
///
/// The hot stroke must retrace the cold endpoint populations in reverse
/// (this is the continuity condition fixing the quench gaps), and the hot
/// bath must be the hotter one with the hot stroke absorbing heat.
pub fn cycle_report(
    cold: &ControlProtocol,
    hot: &ControlProtocol,
    cold_bath: &BathSpec,
    hot_bath: &BathSpec,
    a_c: f64,
    a_h: f64,
) -> Result<CycleReport> {
    let (beta_c, beta_h) = (cold_bath.beta(), hot_bath.beta());
    if beta_h >= beta_c {
        return Err(Error::CycleConstruction(format!(
            "hot bath must be hotter: T_H = {} <= T_C = {}",
            hot_bath.temperature, cold_bath.temperature
        )));
    }
    let (c0, c1) = cold.endpoints();
    let (h0, h1) = hot.endpoints();
    if (h0 - c1).abs() > 1e-9 || (h1 - c0).abs() > 1e-9 {
        return Err(Error::CycleConstruction(format!(
            "hot stroke must reverse the cold populations: cold {c0}→{c1}, hot {h0}→{h1}"
        )));
    }
    let q0_c = zeroth_order_heat(beta_c, c0, c1)?;
    let q0_h = zeroth_order_heat(beta_h, h0, h1)?;
    if q0_h <= 0.0 {
        return Err(Error::CycleConstruction(
            "hot stroke must absorb heat; run the protocols in the other direction".into(),
        ));
    }
    // zeroth-order consistency is an identity of the endpoint construction
    let deltag = q0_h + (beta_c / beta_h) * q0_c;
    if deltag.abs() > 1e-12 * q0_h.abs() {
        return Err(Error::Accuracy(format!(
            "zeroth-order heats violate the isothermal continuity identity by {deltag:e}"
        )));
    }
    let q1_c = first_order_heat(a_c, beta_c, cold)?;
    let q1_h = first_order_heat(a_h, beta_h, hot)?;
    let alpha_c = q1_c / q0_c;
    let alpha_h = q1_h / q0_h;
    let eta_carnot = 1.0 - beta_h / beta_c;
    let heat_in = q0_h + q1_h;
    if heat_in <= 0.0 {
        return Err(Error::CycleConstruction(
            "dissipation exceeds the absorbed heat; the cycle is not an engine at this speed"
                .into(),
        ));
    }
    let work = q0_h + q1_h + q0_c + q1_c;
    let eta = work / heat_in;
    let power = work / (cold.tau() + hot.tau());
    Ok(CycleReport {
        q0_h,
        q0_c,
        q1_h,
        q1_c,
        alpha_h,
        alpha_c,
        eta,
        eta_carnot,
        power,
        tau_h: hot.tau(),
        tau_c: cold.tau(),
    })
}

/// Efficiency after rescaling the stroke durations by `(λ_C, λ_H)`.
pub fn rescaled_efficiency(
    alpha_c: f64,
    alpha_h: f64,
    lambda_c: f64,
    lambda_h: f64,
    eta_carnot: f64,
) -> f64 {
    1.0 - (1.0 - eta_carnot) * (1.0 + alpha_c / lambda_c) / (1.0 + alpha_h / lambda_h)
}

/// Power per unit absorbed zeroth-order heat after rescaling by `(λ_C, λ_H)`.
pub fn rescaled_power(
    alpha_c: f64,
    alpha_h: f64,
    tau_c: f64,
    tau_h: f64,
    beta_c: f64,
    beta_h: f64,
    lambda_c: f64,
    lambda_h: f64,
) -> f64 {
    let eta_carnot = 1.0 - beta_h / beta_c;
    (eta_carnot + alpha_h / lambda_h - (beta_h / beta_c) * (alpha_c / lambda_c))
        / (lambda_c * tau_c + lambda_h * tau_h)
}

/// Duration rescaling `(λ_C, λ_H)` that maximizes the cycle power.
pub fn optimal_rescaling(
    alpha_c: f64,
    alpha_h: f64,
    tau_c: f64,
    tau_h: f64,
    beta_c: f64,
    beta_h: f64,
) -> Result<(f64, f64)> {
    let eta_carnot = 1.0 - beta_h / beta_c;
    if eta_carnot <= 0.0 {
        return Err(Error::Domain(format!(
            "power optimum needs eta_carnot > 0, got {eta_carnot}"
        )));
    }
    if alpha_c <= 0.0 || alpha_h >= 0.0 || tau_c <= 0.0 || tau_h <= 0.0 {
        return Err(Error::Domain(format!(
            "need alpha_C > 0 > alpha_H and positive durations, got \
             alpha_C={alpha_c}, alpha_H={alpha_h}, tau_C={tau_c}, tau_H={tau_h}"
        )));
    }
    let b = alpha_h.abs();
    let lambda_c = (2.0 * alpha_c * beta_h / (eta_carnot * beta_c))
        * (1.0 + (b * beta_c * tau_h / (alpha_c * beta_h * tau_c)).sqrt());
    let lambda_h =
        lambda_c * (tau_c / tau_h).sqrt() * (b * beta_c / (alpha_c * beta_h)).sqrt();
    Ok((lambda_c, lambda_h))
}

/// The optimal protocol branch and its smoothed admissible family.
#[derive(Debug, Clone)]
pub struct OptimalShape {
    /// Bare variational branch `q(x) = (1 + cos θ(x))/2`.
    pub cosine: ControlProtocol,
    /// Admissible capped versions, paired with their smoothing parameter.
    pub smoothed: Vec<(usize, ControlProtocol)>,
    /// Angular span `|θ₁ - θ₀|` of the branch.
    pub omega: f64,
    /// Infimum of the shape functional: `F[q̄] + boundary correction = ω²`.
    pub f_min: f64,
    /// Curvature-form value of the bare branch (before the correction).
    pub f_curvature: f64,
    /// Boundary correction restoring the flat-endpoint limit.
    pub boundary_correction: f64,
}

impl OptimalShape {
    /// Smoothing parameters whose caps curve harder than `10 · Γτ`,
    /// signaling that the slow-driving expansion is at risk there.
    pub fn flagged_k(&self, gamma_tau: f64) -> Vec<usize> {
        let mut out = Vec::new();
        for (k, p) in &self.smoothed {
            let h = 1.0 / *k as f64;
            let max_curv = (0..=50)
                .map(|i| {
                    let x = h * i as f64 / 50.0;
                    p.second_derivative(x).abs().max(p.second_derivative(1.0 - x).abs())
                })
                .fold(0.0f64, f64::max);
            if max_curv > 10.0 * gamma_tau {
                out.push(*k);
            }
        }
        out
    }
}

/// Minimizer of the shape functional between fixed endpoint populations.
///
/// The variational optimum is the cosine branch through both endpoints;
/// its infimum value is exactly `ω²`. Admissible protocols approach it via
/// Hermite-capped versions `q_k` with `F[q_k] ↓ ω²` as `k → ∞`.
pub fn optimal_shape(q0: f64, q1: f64) -> Result<OptimalShape> {
    if (q0 - q1).abs() < 1e-12 {
        return Err(Error::InvalidProtocol(
            "optimal shape needs distinct endpoint populations".into(),
        ));
    }
    let cosine = ControlProtocol::cosine(q0, q1, 1.0)?;
    let theta0 = (2.0f64 * q0 - 1.0).clamp(-1.0, 1.0).acos();
    let theta1 = (2.0f64 * q1 - 1.0).clamp(-1.0, 1.0).acos();
    let omega = (theta1 - theta0).abs();
    let f_curvature = curvature_integral(&cosine)?.abs();
    // boundary term of the integration by parts (non-zero endpoint slopes)
    let boundary_correction = cosine.derivative(1.0) * ln_odds(q1)
        - cosine.derivative(0.0) * ln_odds(q0);
    let f_min = f_curvature + boundary_correction;
    if (f_min - omega * omega).abs() > 1e-9 * omega.mul_add(omega, 1.0) {
        return Err(Error::Accuracy(format!(
            "shape-functional infimum {f_min} deviates from omega^2 = {}",
            omega * omega
        )));
    }
    let mut smoothed = Vec::new();
    for &k in &DEFAULT_SMOOTHING_KS {
        smoothed.push((k, ControlProtocol::smoothed_cosine(q0, q1, 1.0, k)?));
    }
    Ok(OptimalShape { cosine, smoothed, omega, f_min, f_curvature, boundary_correction })
}

/// Constants of the coalescing-endpoint (quasi-Otto) power optimum:
/// returns `(ξ, q*)` where `ξ = max_q [ln(q/(1-q))]² q(1-q)/4` at `q = q*`.
pub fn quasi_otto_constants() -> (f64, f64) {
    let g = |q: f64| {
        let l = ln_odds(q);
        l * l * q * (1.0 - q) / 4.0
    };
    // the objective is symmetric under q -> 1-q; take the upper branch
    let (q_star, xi) = maximize(g, 0.5, 1.0 - 1e-9, 1e-12)
        .expect("objective is finite and unimodal on the bracket");
    (xi, q_star)
}

/// Maximum cycle power for a given protocol shape:
/// `(ΔS⁽⁰⁾)² (√T_C - √T_H)² / (4 A F)`.
pub fn max_power(delta_s0: f64, t_c: f64, t_h: f64, a: f64, f_value: f64) -> Result<f64> {
    if a <= 0.0 || f_value <= 0.0 || t_c <= 0.0 || t_h <= 0.0 {
        return Err(Error::Domain(format!(
            "max_power needs positive A, F and temperatures, got \
             A={a}, F={f_value}, T_C={t_c}, T_H={t_h}"
        )));
    }
    let root_gap = t_c.sqrt() - t_h.sqrt();
    Ok(delta_s0 * delta_s0 * root_gap * root_gap / (4.0 * a * f_value))
}

/// Gap trajectory endpoint helper: the quench gaps that keep the populations
/// continuous across stroke boundaries (`ε₃/ε₂ = ε₄/ε₁ = β_C/β_H`).
pub fn quench_gaps(
    cold: &ControlProtocol,
    beta_c: f64,
    beta_h: f64,
) -> Result<(f64, f64, f64, f64)> {
    if beta_c <= 0.0 || beta_h <= 0.0 {
        return Err(Error::Domain("inverse temperatures must be positive".into()));
    }
    let (c0, c1) = cold.endpoints();
    let eps1 = gap_for_population(c0, 1.0 / beta_c);
    let eps2 = gap_for_population(c1, 1.0 / beta_c);
    let eps3 = gap_for_population(c1, 1.0 / beta_h);
    let eps4 = gap_for_population(c0, 1.0 / beta_h);
    Ok((eps1, eps2, eps3, eps4))
}
