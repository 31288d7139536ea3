//! Qubit-string Hilbert space and the basic state calculus on it.

mod basis;
mod json;
pub mod linalg;
mod measures;
mod state;

pub use basis::{BitString, StringBasis, MAX_BASIS_N};
pub use json::{MatrixJson, VectorJson};
pub use measures::{
    base_length, relative_entropy, trace_distance, trace_distance_to_pure, von_neumann_entropy,
    DEFAULT_TOL_OVERLAP, SUPPORT_TOL,
};
pub use state::{DensityOperator, PureState, Space, TOL_HERM, TOL_NORM, TOL_PSD, TOL_TRACE};
