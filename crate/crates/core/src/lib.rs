//! Selective Raman interaction of a three-level atom with a cavity mode.
//!
//! The crate simulates conditional preparation of large Fock states and
//! reconstruction of the cavity Wigner function from photon statistics
//! measured with a photon-number selective pi pulse. The effective
//! two-level model is cross-checked against direct integration of the full
//! three-level Hamiltonian.
//!
//! Modules, bottom up:
//!
//! * [`hilbert`]: truncated Fock space, states, ladder and displacement operators.
//! * [`raman`]: couplings, Hamiltonians, block detunings and dressed states.
//! * [`dynamics`]: closed-form and numeric propagation.
//! * [`postselect`]: conditioning on the atomic level, `b_n` amplitudes, fidelity.
//! * [`protocols`]: Fock-state preparation, photon statistics, Wigner reconstruction.
//! * [`cli`]: the `raman-cqed` command-line front end.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod hilbert;
pub mod linalg;
pub mod postselect;
pub mod protocols;
pub mod raman;

pub use error::{Error, Result};
pub use hilbert::{AtomLevel, FieldState, JointState, Operator, TruncatedFockSpace};
pub use raman::{RamanParams, SelectionTarget};
