//! Finite ε-nets over density operators of base length ≤ `n`.
//!
//! Every net starts with the computational basis states in string order,
//! followed by the maximally mixed state. The rest depends on the scheme:
//!
//! * `n = 0`: the state space is a single point.
//! * [`NetScheme::E8`] (`dim = 3`): the traceless part of a 3×3 state lives
//!   in an 8-dimensional real space, which the E8 lattice covers with
//!   radius 1. Scaling it by `s = ε√1.5` and using
//!   `‖A‖_Tr ≤ ‖A‖_F / √1.5` for traceless 3×3 `A` gives trace-distance
//!   radius `ε`. Lattice points within Frobenius distance `s` of the state
//!   space are kept and projected onto it (projection is non-expansive, so
//!   the radius survives).
//! * [`NetScheme::Grid`]: pure states with squared magnitudes on a simplex
//!   grid of `magnitude_steps` and relative phases on `phase_steps`, mixed
//!   with `I/D` at weights on a grid of step `ε/2`.

use std::collections::HashMap;
use std::sync::OnceLock;
use std::f64::consts::PI;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::qis::linalg::{self, real, HermitianEigen};
use crate::qis::{DensityOperator, Space, StringBasis};
use crate::random::{random_density, stream_rng};
use crate::{parallel, CMatrix, CVector, Error, Result, C64};

/// Samples used by the covering certificate.
pub const CERTIFICATE_SAMPLES: usize = 10_000;
/// The certificate stops after this many confirmed violations.
const MAX_REPORTED_VIOLATIONS: usize = 8;

/// Default covering radius for `n ≤ 3`.
pub fn default_epsilon(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 0.2,
        2 => 0.25,
        _ => 0.3,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum NetScheme {
    Point,
    E8,
    Grid {
        magnitude_steps: usize,
        phase_steps: usize,
        weight_step: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NetConfig {
    pub n: usize,
    pub epsilon: f64,
    pub scheme: NetScheme,
    /// Seed of the covering certificate's samples.
    pub seed: u64,
}

impl NetConfig {
    /// Default scheme and resolution for `(n, ε)`.
    pub fn new(n: usize, epsilon: f64) -> Self {
        let scheme = match n {
            0 => NetScheme::Point,
            1 => NetScheme::E8,
            2 => NetScheme::Grid { magnitude_steps: 4, phase_steps: 4, weight_step: epsilon / 2.0 },
            _ => NetScheme::Grid { magnitude_steps: 2, phase_steps: 4, weight_step: epsilon / 2.0 },
        };
        NetConfig { n, epsilon, scheme, seed: 0 }
    }

    pub fn default_for(n: usize) -> Self {
        NetConfig::new(n, default_epsilon(n))
    }

    pub fn with_seed(self, seed: u64) -> Self {
        NetConfig { seed, ..self }
    }

    /// SHA-256 of the canonical JSON of this configuration.
    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Net points beyond the basis/mixed prefix.
#[derive(Clone, Debug)]
enum Body {
    Point,
    /// Generated on demand, one block per leading pair of doubled lattice
    /// coordinates.
    E8 { scale: f64, blocks: Vec<(i8, i8)>, limit: i32, bound: f64 },
    Grid {
        points: Vec<DensityOperator>,
        m: usize,
        p: usize,
        weights: usize,
        index: HashMap<GridKey, usize>,
    },
}

type GridKey = (Vec<u8>, Vec<u8>);

/// Points per block of a stored net.
const STORED_BLOCK: usize = 512;
/// Refuse nets whose lattice scan would exceed this many candidates.
pub const MAX_LATTICE_CANDIDATES: f64 = 4e8;

#[derive(Debug)]
pub struct StateNet {
    config: NetConfig,
    basis: StringBasis,
    prefix: Vec<DensityOperator>,
    body: Body,
    block_sizes: OnceLock<Vec<usize>>,
}

/// Sampled covering check.
#[derive(Clone, Debug, Serialize)]
pub struct CoverageCertificate {
    pub epsilon: f64,
    pub checked: usize,
    pub violations: usize,
    /// Largest nearest-point distance among the samples examined.
    pub worst_distance: f64,
    pub worst_sample: Option<usize>,
    /// True when the scan stopped early after enough violations.
    pub truncated: bool,
}

impl CoverageCertificate {
    pub fn passed(&self) -> bool {
        self.violations == 0 && !self.truncated
    }
}

impl StateNet {
    /// Builds the net without certifying it.
    pub fn build(config: NetConfig) -> Result<Self> {
        if !(config.epsilon > 0.0 && config.epsilon <= 1.0) {
            return Err(Error::InvalidParameter(format!("net epsilon {} outside (0,1]", config.epsilon)));
        }
        let basis = StringBasis::new(config.n)?;
        let space = Space::Strings(basis);
        let dim = basis.dim();
        let mut prefix: Vec<DensityOperator> =
            (0..dim).map(|k| DensityOperator::basis_index(space, k).expect("in range")).collect();
        if dim > 1 {
            prefix.push(DensityOperator::maximally_mixed(space));
        }
        let body = match config.scheme {
            NetScheme::Point => {
                if dim != 1 {
                    return Err(Error::InvalidParameter("point scheme needs n = 0".into()));
                }
                Body::Point
            }
            NetScheme::E8 => {
                if dim != 3 {
                    return Err(Error::InvalidParameter("E8 scheme needs n = 1".into()));
                }
                e8_body(config.epsilon)?
            }
            NetScheme::Grid { magnitude_steps, phase_steps, weight_step } => {
                if magnitude_steps == 0
                    || phase_steps == 0
                    || !(weight_step > 0.0)
                    || magnitude_steps > 255
                    || phase_steps > 255
                {
                    return Err(Error::InvalidParameter("grid resolution must be positive".into()));
                }
                grid_body(magnitude_steps, phase_steps, weight_step, space)?
            }
        };
        Ok(StateNet { config, basis, prefix, body, block_sizes: OnceLock::new() })
    }

    pub fn config(&self) -> &NetConfig {
        &self.config
    }

    pub fn n(&self) -> usize {
        self.config.n
    }

    pub fn epsilon(&self) -> f64 {
        self.config.epsilon
    }

    pub fn basis(&self) -> StringBasis {
        self.basis
    }

    pub fn fingerprint(&self) -> String {
        self.config.fingerprint()
    }

    fn block_count(&self) -> usize {
        1 + match &self.body {
            Body::Point => 0,
            Body::E8 { blocks, .. } => blocks.len(),
            Body::Grid { points, .. } => points.len().div_ceil(STORED_BLOCK),
        }
    }

    /// Points of block `b`; block 0 is the basis/mixed prefix.
    fn block(&self, b: usize) -> std::borrow::Cow<'_, [DensityOperator]> {
        use std::borrow::Cow;
        if b == 0 {
            return Cow::Borrowed(&self.prefix);
        }
        match &self.body {
            Body::Point => Cow::Borrowed(&[]),
            Body::E8 { scale, blocks, limit, bound } => {
                Cow::Owned(e8_block(*scale, blocks[b - 1], *limit, *bound, Space::Strings(self.basis)))
            }
            Body::Grid { points, .. } => {
                let start = (b - 1) * STORED_BLOCK;
                Cow::Borrowed(&points[start..(start + STORED_BLOCK).min(points.len())])
            }
        }
    }

    /// Applies `f` to every block in parallel; returns, in net order, each
    /// block's first net index with its result.
    pub fn map_blocks<T: Send>(&self, f: impl Fn(&[DensityOperator]) -> T + Sync + Send) -> Vec<(usize, T)> {
        let results = parallel::map_indexed(self.block_count(), |b| {
            let pts = self.block(b);
            (pts.len(), f(&pts))
        });
        let _ = self.block_sizes.set(results.iter().map(|r| r.0).collect());
        let mut start = 0;
        results
            .into_iter()
            .map(|(len, t)| {
                let first = start;
                start += len;
                (first, t)
            })
            .collect()
    }

    fn sizes(&self) -> &[usize] {
        self.block_sizes.get_or_init(|| parallel::map_indexed(self.block_count(), |b| self.block(b).len()))
    }

    pub fn len(&self) -> usize {
        self.sizes().iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Point `j` in net order.
    pub fn point(&self, j: usize) -> Option<DensityOperator> {
        let mut start = 0;
        for (b, &size) in self.sizes().iter().enumerate() {
            if j < start + size {
                return Some(self.block(b)[j - start].clone());
            }
            start += size;
        }
        None
    }

    /// Minimum trace distance from `rho` to the net, with the index attaining
    /// it (first index on ties).
    pub fn nearest(&self, rho: &DensityOperator) -> (usize, f64) {
        let m = rho.matrix();
        let closer = |best: (usize, f64), c: (usize, f64)| if c.1 < best.1 { c } else { best };
        self.map_blocks(|pts| {
            pts.iter()
                .enumerate()
                .map(|(k, p)| (k, 0.5 * linalg::trace_norm(&(m - p.matrix()))))
                .reduce(closer)
        })
        .into_iter()
        .filter_map(|(start, best)| best.map(|(k, d)| (start + k, d)))
        .fold((usize::MAX, f64::INFINITY), closer)
    }

    /// Distance from `rho` to a quantizer-chosen net point: an upper bound on
    /// the nearest distance.
    fn quick_distance(&self, rho: &DensityOperator) -> f64 {
        let m = rho.matrix();
        let dist = |p: &CMatrix| 0.5 * linalg::trace_norm(&(m - p));
        let prefix = self.prefix.iter().map(|p| dist(p.matrix())).fold(f64::INFINITY, f64::min);
        let body = match &self.body {
            Body::Point => f64::INFINITY,
            Body::E8 { scale, .. } => {
                let u = e8_decode(&gell_mann_coords(m), *scale);
                match e8_point(*scale, &u) {
                    Some(p) => dist(&p),
                    None => f64::INFINITY,
                }
            }
            Body::Grid { points, m: steps, p, weights, index } => {
                let eig = HermitianEigen::new(m);
                let key = grid_quantize(&eig.vector(eig.values.len() - 1), *steps, *p);
                match index.get(&key) {
                    Some(&j0) => (0..*weights)
                        .map(|w| dist(points[j0 + w * index.len()].matrix()))
                        .fold(f64::INFINITY, f64::min),
                    None => f64::INFINITY,
                }
            }
        };
        prefix.min(body)
    }

    /// Checks the covering radius on `samples` Hilbert–Schmidt random
    /// states, one random stream per sample.
    pub fn certify(&self, samples: usize) -> CoverageCertificate {
        let seed = self.config.seed;
        let space = Space::Strings(self.basis);
        let eps = self.config.epsilon;
        let quick = parallel::map_indexed(samples, |i| {
            let rho = random_density(space, &mut stream_rng(seed, i as u64));
            self.quick_distance(&rho)
        });
        let mut cert = CoverageCertificate {
            epsilon: eps,
            checked: 0,
            violations: 0,
            worst_distance: 0.0,
            worst_sample: None,
            truncated: false,
        };
        for (i, &q) in quick.iter().enumerate() {
            cert.checked += 1;
            let d = if q <= eps {
                q
            } else {
                let rho = random_density(space, &mut stream_rng(seed, i as u64));
                self.nearest(&rho).1
            };
            if d > cert.worst_distance {
                cert.worst_distance = d;
                cert.worst_sample = Some(i);
            }
            if d > eps {
                cert.violations += 1;
                if cert.violations >= MAX_REPORTED_VIOLATIONS && i + 1 < samples {
                    cert.truncated = true;
                    break;
                }
            }
        }
        cert
    }
}

/// Builds the default-resolution net for `(n, ε)` and rejects it unless the
/// sampled covering certificate passes.
pub fn build_net(n: usize, epsilon: f64) -> Result<StateNet> {
    build_certified(NetConfig::new(n, epsilon))
}

pub fn build_certified(config: NetConfig) -> Result<StateNet> {
    let net = StateNet::build(config)?;
    let cert = net.certify(CERTIFICATE_SAMPLES);
    if !cert.passed() {
        return Err(Error::CoverageFailed {
            epsilon: cert.epsilon,
            checked: cert.checked,
            violations: cert.violations,
            worst_sample: cert.worst_sample.unwrap_or(0),
            worst_distance: cert.worst_distance,
        });
    }
    Ok(net)
}

// ---- E8 ----

/// `λ_a / √2` for the eight Gell-Mann matrices: an orthonormal basis of
/// traceless 3×3 Hermitian matrices under `Tr(A†B)`.
fn gell_mann() -> [CMatrix; 8] {
    let z = real(0.0);
    let h = real(std::f64::consts::FRAC_1_SQRT_2);
    let i = C64::new(0.0, std::f64::consts::FRAC_1_SQRT_2);
    let d = 1.0 / 6f64.sqrt();
    let m = |v: [C64; 9]| CMatrix::from_row_slice(3, 3, &v);
    [
        m([z, h, z, h, z, z, z, z, z]),
        m([z, -i, z, i, z, z, z, z, z]),
        m([h, z, z, z, -h, z, z, z, z]),
        m([z, z, h, z, z, z, h, z, z]),
        m([z, z, -i, z, z, z, i, z, z]),
        m([z, z, z, z, z, h, z, h, z]),
        m([z, z, z, z, z, -i, z, i, z]),
        m([real(d), z, z, z, real(d), z, z, z, real(-2.0 * d)]),
    ]
}

fn gell_mann_coords(m: &CMatrix) -> [f64; 8] {
    let basis = gell_mann();
    let mut x = [0.0; 8];
    for (a, b) in basis.iter().enumerate() {
        x[a] = (b.adjoint() * m).trace().re;
    }
    x
}

/// Euclidean projection onto the probability simplex.
fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (k, &x) in u.iter().enumerate() {
        cumulative += x;
        let t = (cumulative - 1.0) / (k + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// Frobenius-nearest density operator to a Hermitian matrix, with the
/// distance moved.
fn project_to_states(h: &CMatrix) -> (CMatrix, f64) {
    let eig = HermitianEigen::new(h);
    let p = project_simplex(&eig.values);
    let moved = eig.values.iter().zip(&p).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    let mut out = CMatrix::zeros(h.nrows(), h.ncols());
    for (k, &w) in p.iter().enumerate() {
        if w > 0.0 {
            let v = eig.vectors.column(k);
            out += v * v.adjoint() * real(w);
        }
    }
    (out, moved)
}

fn fill(k: usize, parity: i32, limit: i32, bound: f64, norm: f64, u: &mut [i8; 8], out: &mut Vec<[i8; 8]>) {
    if k == 8 {
        let sum: i32 = u.iter().map(|&x| x as i32).sum();
        if sum.rem_euclid(4) == 0 {
            out.push(*u);
        }
        return;
    }
    for v in -limit..=limit {
        if v.rem_euclid(2) != parity {
            continue;
        }
        let next = norm + (v * v) as f64;
        if next <= bound {
            u[k] = v as i8;
            fill(k + 1, parity, limit, bound, next, u, out);
        }
    }
}

fn nearest_dn(x: &[f64; 8]) -> [f64; 8] {
    let mut f = x.map(f64::round);
    let sum: f64 = f.iter().sum();
    if (sum as i64).rem_euclid(2) != 0 {
        let (k, _) = x
            .iter()
            .zip(&f)
            .map(|(a, b)| (a - b).abs())
            .enumerate()
            .fold((0, -1.0), |best, (k, e)| if e > best.1 { (k, e) } else { best });
        f[k] += if x[k] > f[k] { 1.0 } else { -1.0 };
    }
    f
}

/// Nearest point of `scale · E8` to `x`, as doubled unscaled coordinates.
fn e8_decode(x: &[f64; 8], scale: f64) -> [i8; 8] {
    let y = x.map(|v| v / scale);
    let a = nearest_dn(&y);
    let shifted = y.map(|v| v - 0.5);
    let b = nearest_dn(&shifted).map(|v| v + 0.5);
    let dist = |p: &[f64; 8]| p.iter().zip(&y).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
    let best = if dist(&a) <= dist(&b) { a } else { b };
    best.map(|v| (2.0 * v).round().clamp(-127.0, 127.0) as i8)
}

/// Body radius: pure states sit at Frobenius distance `√(2/3)` from `I/3`.
const E8_BODY_RADIUS: f64 = 0.816_496_580_927_726;
/// Every traceless `A` with `‖A‖_F ≤ 1/√6` keeps `I/3 + A` positive.
const E8_INNER_RADIUS: f64 = 0.408_248_290_463_863;

fn e8_body(epsilon: f64) -> Result<Body> {
    let scale = epsilon * 1.5f64.sqrt();
    let radius = (E8_BODY_RADIUS + scale) / scale;
    // E8 has unit covolume: about vol(B_8(r)) = π⁴r⁸/24 candidates.
    let estimate = PI.powi(4) / 24.0 * radius.powi(8);
    if estimate > MAX_LATTICE_CANDIDATES {
        return Err(Error::InvalidParameter(format!(
            "E8 net at epsilon {epsilon} needs ~{estimate:.1e} lattice candidates (limit {MAX_LATTICE_CANDIDATES:.0e})"
        )));
    }
    let limit = (2.0 * radius).floor() as i32;
    let bound = 4.0 * radius * radius;
    let mut blocks = Vec::new();
    for parity in [0, 1] {
        for a in -limit..=limit {
            for b in -limit..=limit {
                if a.rem_euclid(2) == parity && b.rem_euclid(2) == parity && ((a * a + b * b) as f64) <= bound {
                    blocks.push((a as i8, b as i8));
                }
            }
        }
    }
    Ok(Body::E8 { scale, blocks, limit, bound })
}

/// The state a doubled lattice point maps to, if it is within `scale` of
/// the state space.
fn e8_point(scale: f64, u: &[i8; 8]) -> Option<CMatrix> {
    let x = u.map(|v| scale * v as f64 / 2.0);
    let h = from_gell_mann(&x);
    if x.iter().map(|v| v * v).sum::<f64>().sqrt() <= E8_INNER_RADIUS || is_psd3(&h) {
        return Some(h);
    }
    // The distance moved depends only on the spectrum, so most rejects never
    // need eigenvectors.
    let values = eigenvalues3(&h);
    let p = project_simplex(&values);
    let moved = values.iter().zip(&p).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    if moved > scale + 1e-9 {
        return None;
    }
    let (p, moved) = project_to_states(&h);
    (moved <= scale + 1e-12).then_some(p)
}

/// Eigenvalues of a 3×3 Hermitian matrix by the trigonometric solution of
/// its characteristic cubic.
fn eigenvalues3(m: &CMatrix) -> [f64; 3] {
    let d = [m[(0, 0)].re, m[(1, 1)].re, m[(2, 2)].re];
    let off = m[(0, 1)].norm_sqr() + m[(0, 2)].norm_sqr() + m[(1, 2)].norm_sqr();
    let q = (d[0] + d[1] + d[2]) / 3.0;
    let p2 = d.iter().map(|v| (v - q).powi(2)).sum::<f64>() + 2.0 * off;
    if p2 <= 1e-30 {
        return [q; 3];
    }
    let p = (p2 / 6.0).sqrt();
    // det((m − qI)/p) / 2, clamped against rounding.
    let b = [(d[0] - q) / p, (d[1] - q) / p, (d[2] - q) / p];
    let (a01, a02, a12) = (m[(0, 1)] / p, m[(0, 2)] / p, m[(1, 2)] / p);
    let det = b[0] * b[1] * b[2] + 2.0 * (a01 * a12 * a02.conj()).re
        - b[0] * a12.norm_sqr()
        - b[1] * a02.norm_sqr()
        - b[2] * a01.norm_sqr();
    let phi = (det / 2.0).clamp(-1.0, 1.0).acos() / 3.0;
    let hi = q + 2.0 * p * phi.cos();
    let lo = q + 2.0 * p * (phi + 2.0 * PI / 3.0).cos();
    [hi, 3.0 * q - hi - lo, lo]
}

/// `I/3 + Σ x_a G_a` with entries written out, skipping eight matrix sums.
fn from_gell_mann(x: &[f64; 8]) -> CMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let d = 1.0 / 6f64.sqrt();
    let third = 1.0 / 3.0;
    let c = |re: f64, im: f64| C64::new(h * re, h * im);
    let m01 = c(x[0], -x[1]);
    let m02 = c(x[3], -x[4]);
    let m12 = c(x[5], -x[6]);
    CMatrix::from_row_slice(
        3,
        3,
        &[
            real(third + h * x[2] + d * x[7]),
            m01,
            m02,
            m01.conj(),
            real(third - h * x[2] + d * x[7]),
            m12,
            m02.conj(),
            m12.conj(),
            real(third - 2.0 * d * x[7]),
        ],
    )
}

/// Positive semidefiniteness of a 3×3 Hermitian matrix through its
/// principal minors; cheaper than an eigendecomposition.
fn is_psd3(m: &CMatrix) -> bool {
    let a = |i: usize, j: usize| m[(i, j)];
    let diag = [a(0, 0).re, a(1, 1).re, a(2, 2).re];
    if diag.iter().any(|&v| v < 0.0) {
        return false;
    }
    let minor = |i: usize, j: usize| diag[i] * diag[j] - a(i, j).norm_sqr();
    if minor(0, 1) < 0.0 || minor(0, 2) < 0.0 || minor(1, 2) < 0.0 {
        return false;
    }
    let det = diag[0] * diag[1] * diag[2] + 2.0 * (a(0, 1) * a(1, 2) * a(2, 0)).re
        - diag[0] * a(1, 2).norm_sqr()
        - diag[1] * a(0, 2).norm_sqr()
        - diag[2] * a(0, 1).norm_sqr();
    det >= 0.0
}

fn e8_block(scale: f64, lead: (i8, i8), limit: i32, bound: f64, space: Space) -> Vec<DensityOperator> {
    let parity = (lead.0 as i32).rem_euclid(2);
    let mut u = [0i8; 8];
    u[0] = lead.0;
    u[1] = lead.1;
    let norm = (lead.0 as i32 * lead.0 as i32 + lead.1 as i32 * lead.1 as i32) as f64;
    let mut cands = Vec::new();
    fill(2, parity, limit, bound, norm, &mut u, &mut cands);
    cands
        .iter()
        .filter_map(|u| e8_point(scale, u))
        .map(|p| DensityOperator::from_state_matrix(p, space))
        .collect()
}

// ---- grid ----

/// Compositions of `m` into `parts` non-negative parts, lexicographic.
fn compositions(m: usize, parts: usize) -> Vec<Vec<u8>> {
    fn rec(left: usize, parts: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if cur.len() + 1 == parts {
            cur.push(left as u8);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for v in (0..=left).rev() {
            cur.push(v as u8);
            rec(left - v, parts, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, parts, &mut Vec::new(), &mut out);
    out
}

fn grid_vector(comp: &[u8], phases: &[u8], m: usize, p: usize) -> CVector {
    CVector::from_fn(comp.len(), |i, _| {
        let mag = (comp[i] as f64 / m as f64).sqrt();
        C64::from_polar(mag, 2.0 * PI * phases[i] as f64 / p as f64)
    })
}

/// Phase vectors for a composition: zero off the support and on its first
/// entry, all `p` values elsewhere on the support.
fn phase_choices(comp: &[u8], p: usize) -> Vec<Vec<u8>> {
    let support: Vec<usize> = (0..comp.len()).filter(|&i| comp[i] > 0).collect();
    let free = &support[1..];
    let total = p.pow(free.len() as u32);
    (0..total)
        .map(|mut code| {
            let mut ph = vec![0u8; comp.len()];
            for &i in free.iter().rev() {
                ph[i] = (code % p) as u8;
                code /= p;
            }
            ph
        })
        .collect()
}

fn grid_quantize(v: &CVector, m: usize, p: usize) -> GridKey {
    let d = v.len();
    let scaled: Vec<f64> = v.iter().map(|z| z.norm_sqr() * m as f64).collect();
    let mut comp: Vec<u8> = scaled.iter().map(|x| x.floor() as u8).collect();
    let short = m - comp.iter().map(|&c| c as usize).sum::<usize>().min(m);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| (scaled[b] - scaled[b].floor()).total_cmp(&(scaled[a] - scaled[a].floor())).then(a.cmp(&b)));
    for &i in order.iter().take(short) {
        comp[i] += 1;
    }
    let first = comp.iter().position(|&c| c > 0).expect("m ≥ 1");
    let reference = v[first].arg();
    let phases = (0..d)
        .map(|i| {
            if comp[i] == 0 || i == first {
                0
            } else {
                let rel = (v[i].arg() - reference).rem_euclid(2.0 * PI);
                ((rel * p as f64 / (2.0 * PI)).round() as usize % p) as u8
            }
        })
        .collect();
    (comp, phases)
}

fn grid_body(m: usize, p: usize, weight_step: f64, space: Space) -> Result<Body> {
    let dim = space.dim();
    let count = (1.0 / weight_step).ceil() as usize;
    let comps = compositions(m, dim);
    let pure_count: usize = comps.iter().map(|c| p.pow(c.iter().filter(|&&x| x > 0).count() as u32 - 1)).sum();
    if (pure_count * count) as f64 > MAX_LATTICE_CANDIDATES / 100.0 {
        return Err(Error::InvalidParameter(format!("grid net would hold {} points", pure_count * count)));
    }
    let mut pure = Vec::new();
    let mut keys = Vec::new();
    for comp in comps {
        for ph in phase_choices(&comp, p) {
            pure.push(linalg::projector(&grid_vector(&comp, &ph, m, p)));
            keys.push((comp.clone(), ph));
        }
    }
    let weights: Vec<f64> = (1..=count).map(|j| (j as f64 * weight_step).min(1.0)).collect();
    let mixed = CMatrix::identity(dim, dim) * real(1.0 / dim as f64);
    let mut points = Vec::with_capacity(pure.len() * weights.len());
    for &w in &weights {
        for g in &pure {
            let mat = &mixed * real(1.0 - w) + g * real(w);
            points.push(DensityOperator::from_state_matrix(mat, space));
        }
    }
    let index = keys.into_iter().enumerate().map(|(i, k)| (k, i)).collect();
    Ok(Body::Grid { points, m, p, weights: weights.len(), index })
}
