//! Finite-time quantum thermal machines on a driven qubit.
//!
//! The crate models a two-level working medium coupled to thermal baths
//! through three GKSL dissipator families (reset, fermionic, bosonic) and,
//! for non-Markovian environments, through an explicitly tracked ancilla
//! qubit that exchanges energy with the medium. On top of the dynamical
//! layer it implements:
//!
//! - the slow-driving expansion `rho = rho0 + rho1 + ...` with the
//!   first-order correction obtained by inverting the generator on the
//!   traceless subspace ([`slow_driving`]),
//! - finite-time Carnot cycle accounting, speed rescaling, optimal protocol
//!   shapes and the quasi-Otto power limit ([`carnot`]),
//! - Otto cycle accounting with exact partial-thermalization power and
//!   limit-cycle analysis ([`otto`]),
//! - the ancilla-mediated bath model with its closed-form relaxation
//!   profile, slow-driving amplitude and optimal coupling ([`nonmarkov`]),
//! - information-flow diagnostics: trace-distance backflow and the
//!   free-energy decomposition between system, ancilla and correlations
//!   ([`infoflow`]).
//!
//! Units: `hbar = k_B = 1`. Rates and times are reciprocal; energies and
//! temperatures share one scale.

pub mod carnot;
pub mod dissipators;
pub mod error;
pub mod infoflow;
pub mod linalg;
pub mod liouvillian;
pub mod nonmarkov;
pub mod optimize;
pub mod otto;
pub mod protocol;
pub mod slow_driving;
pub mod state;

pub use error::{Error, Result};
pub use liouvillian::Liouvillian;
pub use protocol::{ControlProtocol, ProtocolShape};
pub use state::{DensityMatrix, HamiltonianSpec};

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;
