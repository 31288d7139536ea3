//! Small dense helpers over `nalgebra` used by every module.
//!
//! Spectral decompositions go through `faer`: nalgebra's symmetric
//! eigensolver returns NaN on some highly degenerate sparse inputs, among
//! them the Choi matrix of the identity channel on eight dimensions.

use faer::Side;

use crate::{CMatrix, CVector, C64};

/// Spectral decomposition of a Hermitian matrix: eigenvalues ascending and
/// the matching eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

fn to_faer(m: &CMatrix) -> faer::Mat<C64> {
    let h = hermitian_part(m);
    faer::Mat::from_fn(h.nrows(), h.ncols(), |i, j| h[(i, j)])
}

impl HermitianEigen {
    pub fn new(m: &CMatrix) -> Self {
        let eig = to_faer(m).self_adjoint_eigen(Side::Lower).expect("Hermitian eigendecomposition converges");
        let s = eig.S().column_vector();
        let u = eig.U();
        HermitianEigen {
            values: (0..m.nrows()).map(|k| s[k].re).collect(),
            vectors: CMatrix::from_fn(m.nrows(), m.nrows(), |i, j| u[(i, j)]),
        }
    }

    pub fn vector(&self, k: usize) -> CVector {
        self.vectors.column(k).into_owned()
    }

    /// `Σ f(λ_k) |v_k⟩⟨v_k|`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let d = self.vectors.nrows();
        let mut out = CMatrix::zeros(d, d);
        for (k, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            if w != 0.0 {
                let v = self.vectors.column(k);
                out += v * v.adjoint() * C64::new(w, 0.0);
            }
        }
        out
    }
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut v = to_faer(m)
        .self_adjoint_eigenvalues(Side::Lower)
        .expect("Hermitian eigenvalues converge");
    v.sort_by(f64::total_cmp);
    v
}

/// `(M + M†)/2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// `max |M_ij − conj(M_ji)|`.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn trace_re(m: &CMatrix) -> f64 {
    m.diagonal().iter().map(|z| z.re).sum()
}

/// Sum of absolute eigenvalues (trace norm) of a Hermitian matrix.
pub fn trace_norm(m: &CMatrix) -> f64 {
    eigenvalues(m).iter().map(|x| x.abs()).sum()
}

pub fn projector(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

pub fn basis_vector(dim: usize, k: usize) -> CVector {
    let mut v = CVector::zeros(dim);
    v[k] = C64::new(1.0, 0.0);
    v
}

pub fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}
