//! Seeded sampling of states, unitaries and channels.
//!
//! All randomness flows from a `u64` seed through ChaCha8. Parallel work
//! derives one stream per item index so results do not depend on the
//! scheduling order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channels::Channel;
use crate::qis::{DensityOperator, PureState, Space};
use crate::{CMatrix, CVector, C64};

pub type QRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> QRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `stream` of the generator seeded with `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> QRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn gaussian(rng: &mut impl Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre(rows: usize, cols: usize, rng: &mut impl Rng) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Haar-random isometry `C^cols → C^rows` (`rows ≥ cols`), from the QR
/// decomposition of a Ginibre matrix with the phases of `R`'s diagonal
/// moved into `Q`.
pub fn haar_isometry(rows: usize, cols: usize, rng: &mut impl Rng) -> CMatrix {
    assert!(rows >= cols, "isometry needs rows >= cols");
    let qr = ginibre(rows, cols, rng).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..cols {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

pub fn haar_unitary(dim: usize, rng: &mut impl Rng) -> CMatrix {
    haar_isometry(dim, dim, rng)
}

/// Haar-random pure state.
pub fn random_pure_state(space: Space, rng: &mut impl Rng) -> PureState {
    let v = CVector::from_fn(space.dim(), |_, _| gaussian(rng));
    PureState::normalized(v, space).expect("gaussian vector is nonzero")
}

/// Hilbert–Schmidt random mixed state `GG†/Tr(GG†)`.
pub fn random_density(space: Space, rng: &mut impl Rng) -> DensityOperator {
    let d = space.dim();
    let g = ginibre(d, d, rng);
    let m = &g * g.adjoint();
    let tr = crate::qis::linalg::trace_re(&m);
    DensityOperator::from_state_matrix(m / C64::new(tr, 0.0), space)
}

/// Channel induced by a Haar isometry `C^in → C^out ⊗ C^in`: the Kraus
/// operators are the `in_dim` row blocks of size `out_dim × in_dim`.
pub fn random_channel(in_dim: usize, out_dim: usize, rng: &mut impl Rng) -> Channel {
    let v = haar_isometry(in_dim * out_dim, in_dim, rng);
    Channel::from_isometry(&v, out_dim).expect("isometry induces a CPTP map")
}

/// `ρ ↦ (1−q) UρU† + q R(ρ)` for a Haar unitary `U` and a channel `R`
/// from [`random_channel`]. Unlike a bare isometry channel, small `q`
/// keeps orthonormal outputs nearly reachable.
pub fn random_noisy_unitary(dim: usize, q: f64, rng: &mut impl Rng) -> Channel {
    let u = haar_unitary(dim, rng);
    let r = random_channel(dim, dim, rng);
    let mut kraus = vec![u * C64::new((1.0 - q).sqrt(), 0.0)];
    if q > 0.0 {
        kraus.extend(r.kraus().iter().map(|k| k * C64::new(q.sqrt(), 0.0)));
    }
    Channel::new(kraus).expect("convex combination of channels")
}
