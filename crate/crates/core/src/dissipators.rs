//! Thermal bath models for a driven qubit.
//!
//! Three GKSL families share the same Gibbs fixed point: a reset bath that
//! replaces the state at rate `Γ`, and excitation/decay baths whose rates
//! derive from Fermi or Bose occupations and obey detailed balance
//! `Γ₊/Γ₋ = e^{-βε}`.

use crate::error::{Error, Result};
use crate::liouvillian::{lindblad_dissipator, trace_row, vectorize, Liouvillian};
use crate::state::gibbs_qubit;
use crate::C64;
use ndarray::Array2;

/// Bath attachment: temperature, overall relaxation rate, and model family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathSpec {
    pub temperature: f64,
    pub rate: f64,
    pub kind: BathKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BathKind {
    Reset,
    Fermionic,
    Bosonic,
}

impl BathKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Reset => "reset",
            Self::Fermionic => "fermionic",
            Self::Bosonic => "bosonic",
        }
    }
}

impl BathSpec {
    pub fn new(temperature: f64, rate: f64, kind: BathKind) -> Result<Self> {
        if temperature <= 0.0 || rate <= 0.0 {
            return Err(Error::Domain(format!(
                "bath needs T > 0 and rate > 0, got T={temperature}, rate={rate}"
            )));
        }
        Ok(Self { temperature, rate, kind })
    }

    pub fn beta(&self) -> f64 {
        1.0 / self.temperature
    }
}

/// Fermi (`1/(e^x + 1)`) or Bose (`1/(e^x - 1)`) occupation at `x = βε`.
///
/// The Bose occupation diverges at `x = 0` and is refused for `x <= 0`.
pub fn occupation(kind: BathKind, x: f64) -> Result<f64> {
    match kind {
        BathKind::Fermionic => Ok(1.0 / (x.exp() + 1.0)),
        BathKind::Bosonic => {
            if x <= 0.0 {
                return Err(Error::Singularity(format!(
                    "Bose occupation diverges as beta*eps -> 0; got beta*eps = {x}"
                )));
            }
            Ok(1.0 / (x.exp() - 1.0))
        }
        BathKind::Reset => Err(Error::Domain(
            "occupation is defined for fermionic and bosonic baths only".into(),
        )),
    }
}

/// Excitation and decay rates `(Γ₊, Γ₋)` of a two-level bath.
///
/// Fermionic: `Γ₊ = N_F Γ`, `Γ₋ = (1 - N_F) Γ` (so `Γ₊ + Γ₋ = Γ`).
/// Bosonic:   `Γ₊ = N_B Γ`, `Γ₋ = (1 + N_B) Γ`.
/// Both satisfy detailed balance `Γ₊/Γ₋ = e^{-βε}`.
pub fn thermal_rates(bath: &BathSpec, eps: f64) -> Result<(f64, f64)> {
    let x = bath.beta() * eps;
    match bath.kind {
        BathKind::Fermionic => {
            let n = occupation(BathKind::Fermionic, x)?;
            Ok((n * bath.rate, (1.0 - n) * bath.rate))
        }
        BathKind::Bosonic => {
            let n = occupation(BathKind::Bosonic, x)?;
            Ok((n * bath.rate, (1.0 + n) * bath.rate))
        }
        BathKind::Reset => Err(Error::Domain(
            "thermal_rates applies to fermionic and bosonic baths only".into(),
        )),
    }
}

/// Reset bath `D[ρ] = Γ (Ω_{β,ε} - ρ)` on a qubit with gap `eps`.
///
/// As a superoperator this is `Γ (vec(Ω) · t^T - I)`: eigenvalue 0 on the
/// Gibbs direction and `-Γ` on the rest of state space.
pub fn reset_dissipator(bath: &BathSpec, eps: f64) -> Result<Liouvillian> {
    if bath.kind != BathKind::Reset {
        return Err(Error::Domain(format!(
            "reset_dissipator got a {} bath",
            bath.kind.name()
        )));
    }
    let omega = gibbs_qubit(bath.beta(), eps)?;
    let z = vectorize(omega.elements());
    let t = trace_row(2);
    let mut m = Array2::from_shape_fn((4, 4), |(i, j)| z[i] * t[j]);
    for i in 0..4 {
        m[[i, i]] -= C64::new(1.0, 0.0);
    }
    Liouvillian::new(m.mapv(|v| v * bath.rate))
}

/// Two-level thermal bath `Γ₊ D[σ₊] + Γ₋ D[σ₋]` on a qubit with gap `eps`.
pub fn two_level_dissipator(bath: &BathSpec, eps: f64) -> Result<Liouvillian> {
    let (up, down) = thermal_rates(bath, eps)?;
    let mut raise = Array2::zeros((2, 2));
    raise[[1, 0]] = C64::new(1.0, 0.0);
    let lower = raise.t().to_owned();
    let m = lindblad_dissipator(&raise).mapv(|z| z * up)
        + lindblad_dissipator(&lower).mapv(|z| z * down);
    Liouvillian::new(m)
}

/// Any of the three families, dispatched on the bath kind.
pub fn dissipator(bath: &BathSpec, eps: f64) -> Result<Liouvillian> {
    match bath.kind {
        BathKind::Reset => reset_dissipator(bath, eps),
        BathKind::Fermionic | BathKind::Bosonic => two_level_dissipator(bath, eps),
    }
}
