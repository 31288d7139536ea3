//! Numerical toolkit for the quantum counting argument.
//!
//! The crate covers four layers:
//!
//! * [`qis`]: the qubit-string Hilbert space, density operators, trace
//!   distance, von Neumann and relative entropy, base length.
//! * [`channels`]: CPTP maps in Kraus form, Choi certificates and the
//!   pinching channel that sends each target projector to a basis state.
//! * [`counting`]: the dimension bound on δ-approximate orthonormal outputs,
//!   Holevo χ, the Fannes continuity bound, a Frank-Wolfe reachability search
//!   and a replay of the full proof chain on concrete witnesses.
//! * [`machine`] and [`enumeration`]: toy quantum/classical machines, ε-nets
//!   over qubit strings, output catalogs and the two index programs.
//!
//! [`experiments`] wires everything into the batch commands exposed by the
//! `qcount` binary.

pub mod channels;
pub mod counting;
pub mod enumeration;
mod error;
pub mod experiments;
pub mod machine;
pub mod parallel;
pub mod qis;
pub mod random;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<C64>;

/// Version string embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
