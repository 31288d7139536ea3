//! Oracles shared by the integration suites. They take numerically
//! different routes from the library so agreement is evidence.
#![allow(dead_code)]

use nalgebra::DMatrix;
use qcount::qis::DensityOperator;
use qcount::CMatrix;

/// `½‖A − B‖₁` from singular values.
pub fn trace_distance_svd(a: &CMatrix, b: &CMatrix) -> f64 {
    0.5 * (a - b).singular_values().iter().sum::<f64>()
}

/// Spectrum of a Hermitian matrix through its real symmetric embedding
/// `[[Re, −Im], [Im, Re]]`, whose eigenvalues are those of the input,
/// each twice.
pub fn spectrum_real_embedding(m: &CMatrix) -> Vec<f64> {
    let d = m.nrows();
    let big = DMatrix::<f64>::from_fn(2 * d, 2 * d, |i, j| {
        let (a, b) = (i % d, j % d);
        match (i < d, j < d) {
            (true, true) | (false, false) => m[(a, b)].re,
            (true, false) => -m[(a, b)].im,
            (false, true) => m[(a, b)].im,
        }
    });
    let mut v: Vec<f64> = big.symmetric_eigen().eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect()
}

pub fn entropy_oracle(rho: &DensityOperator) -> f64 {
    spectrum_real_embedding(rho.matrix())
        .iter()
        .filter(|&&l| l > 1e-15)
        .map(|&l| -l * l.log2())
        .sum()
}

pub fn binary_entropy(x: f64) -> f64 {
    let h = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.log2() };
    h(x) + h(1.0 - x)
}
