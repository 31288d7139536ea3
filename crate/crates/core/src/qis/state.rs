use std::fmt;

use serde::{Deserialize, Serialize};

use super::basis::{BitString, StringBasis};
use super::linalg::{self, HermitianEigen};
use crate::{CMatrix, CVector, Error, Result, C64};

pub const TOL_HERM: f64 = 1e-8;
pub const TOL_PSD: f64 = 1e-8;
pub const TOL_TRACE: f64 = 1e-8;
pub const TOL_NORM: f64 = 1e-8;

/// The Hilbert space an operator acts on.
///
/// Qubit strings live on a [`StringBasis`]; auxiliary spaces (the `N+1`
/// outputs of a pinching channel, the `d`-dimensional spaces of random
/// channel campaigns) carry only a dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Space {
    Strings(StringBasis),
    Plain(usize),
}

impl Space {
    pub fn strings(n: usize) -> Result<Self> {
        StringBasis::new(n).map(Space::Strings)
    }

    pub fn dim(&self) -> usize {
        match self {
            Space::Strings(b) => b.dim(),
            Space::Plain(d) => *d,
        }
    }

    pub fn string_basis(&self) -> Option<StringBasis> {
        match self {
            Space::Strings(b) => Some(*b),
            Space::Plain(_) => None,
        }
    }

    pub(crate) fn ensure_same(&self, other: &Space) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::SpaceMismatch {
                left: self.to_string(),
                right: other.to_string(),
            })
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Space::Strings(b) => write!(f, "strings(n={}, dim={})", b.n(), b.dim()),
            Space::Plain(d) => write!(f, "plain(dim={d})"),
        }
    }
}

/// Positive semidefinite, unit-trace operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    space: Space,
    matrix: CMatrix,
}

impl DensityOperator {
    /// Validates `matrix` as a state on `space`.
    ///
    /// Hermiticity, positivity and trace are checked against `1e-8`;
    /// eigenvalues in `[-1e-8, 0)` are clipped to zero and the result is
    /// renormalized.
    pub fn new(matrix: CMatrix, space: Space) -> Result<Self> {
        let dim = space.dim();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::Shape {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
                expected: dim,
            });
        }
        let deviation = linalg::hermitian_deviation(&matrix);
        if deviation > TOL_HERM {
            return Err(Error::NotHermitian { deviation });
        }
        let herm = linalg::hermitian_part(&matrix);
        let eig = HermitianEigen::new(&herm);
        let min_eigenvalue = eig.values.first().copied().unwrap_or(0.0);
        if min_eigenvalue < -TOL_PSD {
            return Err(Error::NotPsd { min_eigenvalue });
        }
        let trace = linalg::trace_re(&herm);
        if (trace - 1.0).abs() > TOL_TRACE {
            return Err(Error::TraceNotOne { trace });
        }
        let matrix = if min_eigenvalue < 0.0 {
            let clipped_sum: f64 = eig.values.iter().map(|&l| l.clamp(0.0, 1.0)).sum();
            eig.map(|l| l.clamp(0.0, 1.0) / clipped_sum)
        } else {
            herm
        };
        Ok(DensityOperator { space, matrix })
    }

    /// Convenience constructor over a string basis.
    pub fn on_strings(matrix: CMatrix, basis: StringBasis) -> Result<Self> {
        Self::new(matrix, Space::Strings(basis))
    }

    /// Wraps a matrix already known to be a state up to rounding (channel
    /// outputs, convex combinations of states). Only the Hermitian part is kept.
    pub(crate) fn from_state_matrix(matrix: CMatrix, space: Space) -> Self {
        debug_assert_eq!(matrix.nrows(), space.dim());
        DensityOperator {
            space,
            matrix: linalg::hermitian_part(&matrix),
        }
    }

    pub fn maximally_mixed(space: Space) -> Self {
        let d = space.dim();
        DensityOperator {
            space,
            matrix: CMatrix::identity(d, d) * C64::new(1.0 / d as f64, 0.0),
        }
    }

    /// `|s⟩⟨s|` for a classical string.
    pub fn basis_state(basis: StringBasis, s: &BitString) -> Result<Self> {
        Ok(PureState::basis(basis, s)?.to_density())
    }

    /// `|k⟩⟨k|` for a basis index.
    pub fn basis_index(space: Space, k: usize) -> Result<Self> {
        let dim = space.dim();
        if k >= dim {
            return Err(Error::IndexOutOfRange { index: k, dim });
        }
        let mut m = CMatrix::zeros(dim, dim);
        m[(k, k)] = C64::new(1.0, 0.0);
        Ok(DensityOperator { space, matrix: m })
    }

    /// Diagonal state with the given probabilities.
    pub fn diagonal(space: Space, probs: &[f64]) -> Result<Self> {
        let dim = space.dim();
        if probs.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: probs.len(),
            });
        }
        let m = CMatrix::from_diagonal(&CVector::from_iterator(
            dim,
            probs.iter().map(|&p| C64::new(p, 0.0)),
        ));
        Self::new(m, space)
    }

    /// `Σ w_i ρ_i`. Weights must be a probability vector (within `1e-10`).
    pub fn mixture(weights: &[f64], states: &[DensityOperator]) -> Result<Self> {
        let first = states.first().ok_or_else(|| Error::InvalidParameter("empty mixture".into()))?;
        if weights.len() != states.len() {
            return Err(Error::DimensionMismatch {
                expected: states.len(),
                found: weights.len(),
            });
        }
        let total: f64 = weights.iter().sum();
        if weights.iter().any(|&w| w < 0.0) || (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidParameter(format!(
                "mixture weights must be a probability vector (sum {total})"
            )));
        }
        let dim = first.dim();
        let mut m = CMatrix::zeros(dim, dim);
        for (w, s) in weights.iter().zip(states) {
            first.space.ensure_same(&s.space)?;
            m += &s.matrix * C64::new(*w, 0.0);
        }
        Ok(Self::from_state_matrix(m, first.space))
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        linalg::trace_re(&self.matrix)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::eigenvalues(&self.matrix)
    }

    pub fn eigen(&self) -> HermitianEigen {
        HermitianEigen::new(&self.matrix)
    }

    /// Same matrix, relabelled onto another space of equal dimension.
    pub fn relabel(&self, space: Space) -> Result<Self> {
        if space.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: space.dim(),
            });
        }
        Ok(DensityOperator {
            space,
            matrix: self.matrix.clone(),
        })
    }
}

/// Unit vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    space: Space,
    vector: CVector,
}

impl PureState {
    /// Rejects vectors whose norm differs from 1 by more than `1e-8`.
    pub fn new(vector: CVector, space: Space) -> Result<Self> {
        if vector.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: vector.len(),
            });
        }
        let norm = vector.norm();
        if (norm - 1.0).abs() > TOL_NORM {
            return Err(Error::NotNormalized { norm });
        }
        Ok(PureState { space, vector })
    }

    /// Normalizes `vector` first; fails only on the zero vector.
    pub fn normalized(vector: CVector, space: Space) -> Result<Self> {
        let norm = vector.norm();
        if norm == 0.0 {
            return Err(Error::NotNormalized { norm });
        }
        Self::new(vector.unscale(norm), space)
    }

    pub fn basis(basis: StringBasis, s: &BitString) -> Result<Self> {
        let k = basis.index_of(s)?;
        Ok(PureState {
            space: Space::Strings(basis),
            vector: linalg::basis_vector(basis.dim(), k),
        })
    }

    pub fn basis_index(space: Space, k: usize) -> Result<Self> {
        let dim = space.dim();
        if k >= dim {
            return Err(Error::IndexOutOfRange { index: k, dim });
        }
        Ok(PureState {
            space,
            vector: linalg::basis_vector(dim, k),
        })
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.vector.len()
    }

    pub fn vector(&self) -> &CVector {
        &self.vector
    }

    pub fn inner(&self, other: &PureState) -> C64 {
        self.vector.dotc(&other.vector)
    }

    pub fn to_density(&self) -> DensityOperator {
        DensityOperator {
            space: self.space,
            matrix: linalg::projector(&self.vector),
        }
    }
}
