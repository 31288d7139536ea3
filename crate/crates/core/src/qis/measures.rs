use super::linalg::{self, HermitianEigen};
use super::state::DensityOperator;
use crate::{CMatrix, Error, Result, C64};

/// Default threshold for "non-zero overlap" in [`base_length`].
pub const DEFAULT_TOL_OVERLAP: f64 = 1e-12;

/// Eigenvalues (and overlaps) at or below this are treated as zero when
/// deciding support inclusion for relative entropy.
pub const SUPPORT_TOL: f64 = 1e-12;

/// `½ Tr|ρ − σ|`, clamped to `[0, 1]`.
pub fn trace_distance(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    rho.space().ensure_same(&sigma.space())?;
    Ok((0.5 * linalg::trace_norm(&(rho.matrix() - sigma.matrix()))).clamp(0.0, 1.0))
}

/// `½ Tr|ρ − |k⟩⟨k||` for a state matrix and a basis index.
pub fn trace_distance_to_pure(rho: &CMatrix, k: usize) -> f64 {
    let mut diff = rho.clone();
    diff[(k, k)] -= C64::new(1.0, 0.0);
    (0.5 * linalg::trace_norm(&diff)).clamp(0.0, 1.0)
}

fn entropy_term(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.log2()
    } else {
        0.0
    }
}

/// `−Σ λ log₂ λ` in bits, with `0 log 0 = 0`.
pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    rho.eigenvalues().into_iter().map(entropy_term).sum()
}

/// `Tr ρ (log₂ ρ − log₂ σ)` in bits; `+∞` when `supp ρ ⊄ supp σ`.
pub fn relative_entropy(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    rho.space().ensure_same(&sigma.space())?;
    let neg_entropy: f64 = -von_neumann_entropy(rho);
    let eig = HermitianEigen::new(sigma.matrix());
    let mut cross = 0.0;
    for (k, &q) in eig.values.iter().enumerate() {
        let v = eig.vectors.column(k);
        let weight = (v.adjoint() * rho.matrix() * v)[(0, 0)].re;
        if weight <= SUPPORT_TOL {
            continue;
        }
        if q <= SUPPORT_TOL {
            return Ok(f64::INFINITY);
        }
        cross += weight * q.log2();
    }
    Ok(neg_entropy - cross)
}

/// Largest length of a basis string `s` with `⟨s|ρ|s⟩ > tol_overlap`.
pub fn base_length(rho: &DensityOperator, tol_overlap: f64) -> Result<usize> {
    let basis = rho.space().string_basis().ok_or(Error::NotStringSpace)?;
    (0..basis.dim())
        .rev()
        .find(|&k| rho.matrix()[(k, k)].re > tol_overlap)
        .map(|k| basis.length_at(k))
        .ok_or(Error::DegenerateOperator { tol: tol_overlap })
}
