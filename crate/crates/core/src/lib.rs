//! Numerics for the electromagnetic and gravitational which-path gedankenexperiment.
//!
//! A charge (or mass) held in a spatial superposition is recombined over a
//! time `T_A`; the difference between the two branch histories radiates
//! entangling quanta that decohere the superposition. A distant party at
//! distance `D` tries to learn the path within a time `T_B`. This crate
//! computes
//!
//! * the branch-difference multipole history ([`worldline`]),
//! * its radiated coherent-state amplitudes on a truncated positive-frequency
//!   mode basis and the expected number of entangling quanta ([`radiation`]),
//! * coherent-state overlaps and passive Gaussian unitaries ([`gaussian`]),
//! * the decoherence functionals `1 - |<.|.>|` for both parties
//!   ([`decoherence`]),
//! * a randomized audit of the bound `|<B1|B2>| >= |<Psi1|Psi2>|` over Gaussian
//!   measurements ([`audit`]),
//! * parameter sweeps and power-law fits ([`sweep`]).
//!
//! Everything is in Planck units (`G = c = hbar = 1`). The crate is `no_std`
//! and only needs `alloc`; file formats, the CLI and thread pools live in the
//! `whichpath` crate.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod audit;
pub mod decoherence;
pub mod error;
pub mod gaussian;
pub mod linalg;
mod quadrature;
pub mod radiation;
pub mod scenario;
pub mod sweep;
pub mod worldline;

pub use error::{Error, Result};
