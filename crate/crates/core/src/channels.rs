//! CPTP maps in Kraus form, their Choi certificates, and the pinching
//! channel that records which target projector a state lands in.

use serde::{Deserialize, Serialize};

use crate::qis::linalg::{self, real};
use crate::qis::{DensityOperator, MatrixJson, PureState, Space};
use crate::{CMatrix, Error, Result, C64};

/// Completeness tolerance for `Σ K†K = 1`.
pub const TOL_COMPLETENESS: f64 = 1e-8;
/// Allowed negativity of the Choi spectrum.
pub const TOL_CHOI: f64 = 1e-8;
/// Kraus operators with Frobenius norm at or below this are dropped.
pub const KRAUS_ZERO: f64 = 1e-12;

/// Quantum channel `ρ ↦ Σ_k K_k ρ K_k†` from `C^in_dim` to `C^out_dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    in_dim: usize,
    out_dim: usize,
    kraus: Vec<CMatrix>,
}

/// Outcome of [`Channel::cptp_report`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CptpReport {
    pub min_choi_eigenvalue: f64,
    pub completeness_residual: f64,
    pub completely_positive: bool,
    pub trace_preserving: bool,
}

impl CptpReport {
    pub fn is_cptp(&self) -> bool {
        self.completely_positive && self.trace_preserving
    }

    /// Certificate for an arbitrary linear map given its Choi matrix in the
    /// `output ⊗ input` layout.
    pub fn from_choi(choi: &CMatrix, in_dim: usize, out_dim: usize) -> Self {
        let min_choi_eigenvalue = linalg::eigenvalues(choi).first().copied().unwrap_or(0.0);
        let reduced = partial_trace_output(choi, in_dim, out_dim);
        let completeness_residual = linalg::max_abs(&(reduced - CMatrix::identity(in_dim, in_dim)));
        CptpReport {
            min_choi_eigenvalue,
            completeness_residual,
            completely_positive: min_choi_eigenvalue >= -TOL_CHOI,
            trace_preserving: completeness_residual <= TOL_COMPLETENESS,
        }
    }
}

fn completeness_residual(kraus: &[CMatrix], in_dim: usize) -> f64 {
    let sum = kraus
        .iter()
        .fold(CMatrix::zeros(in_dim, in_dim), |acc, k| acc + k.adjoint() * k);
    linalg::max_abs(&(sum - CMatrix::identity(in_dim, in_dim)))
}

impl Channel {
    /// Validates a Kraus family: equal shapes and `Σ K†K = 1` within `1e-8`.
    pub fn new(kraus: Vec<CMatrix>) -> Result<Self> {
        let first = kraus.first().ok_or(Error::EmptyKraus)?;
        let (out_dim, in_dim) = first.shape();
        if in_dim == 0 || out_dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if kraus.iter().any(|k| k.shape() != (out_dim, in_dim)) {
            return Err(Error::KrausShape);
        }
        let residual = completeness_residual(&kraus, in_dim);
        if residual > TOL_COMPLETENESS {
            return Err(Error::NotTracePreserving { residual });
        }
        Ok(Channel { in_dim, out_dim, kraus })
    }

    pub fn identity(dim: usize) -> Self {
        Channel {
            in_dim: dim,
            out_dim: dim,
            kraus: vec![CMatrix::identity(dim, dim)],
        }
    }

    /// Conjugation by a unitary.
    pub fn unitary(u: CMatrix) -> Result<Self> {
        Channel::new(vec![u])
    }

    /// Channel induced by an isometry `V: C^in → C^out ⊗ C^k`, whose row
    /// index is `out · k + j`. Kraus operator `j` collects rows `j, k + j, …`.
    /// With `k = rows / out_dim`, this is `ρ ↦ Tr_k VρV†`.
    pub fn from_isometry(v: &CMatrix, out_dim: usize) -> Result<Self> {
        let (rows, in_dim) = v.shape();
        if out_dim == 0 || rows % out_dim != 0 {
            return Err(Error::DimensionMismatch { expected: out_dim, found: rows });
        }
        let k = rows / out_dim;
        let kraus = (0..k)
            .map(|j| CMatrix::from_fn(out_dim, in_dim, |r, c| v[(r * k + j, c)]))
            .filter(|m| m.norm() > KRAUS_ZERO)
            .collect();
        Channel::new(kraus)
    }

    /// Qubit depolarizing channel with Kraus
    /// `√(1−p) I, √(p/3) X, √(p/3) Y, √(p/3) Z`.
    pub fn depolarizing_qubit(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("depolarizing p={p} outside [0,1]")));
        }
        let i = C64::new(0.0, 1.0);
        let o = C64::new(0.0, 0.0);
        let l = real(1.0);
        let paulis = [
            CMatrix::from_row_slice(2, 2, &[l, o, o, l]),
            CMatrix::from_row_slice(2, 2, &[o, l, l, o]),
            CMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
            CMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
        ];
        let weights = [1.0 - p, p / 3.0, p / 3.0, p / 3.0];
        let kraus = paulis
            .iter()
            .zip(weights)
            .filter(|(_, w)| *w > 0.0)
            .map(|(m, w)| m * real(w.sqrt()))
            .collect();
        Channel::new(kraus)
    }

    /// Replacement channel `ρ ↦ I/d` with Kraus `|a⟩⟨b|/√d`.
    pub fn completely_depolarizing(dim: usize) -> Self {
        let s = real(1.0 / (dim as f64).sqrt());
        let kraus = (0..dim * dim)
            .map(|ab| {
                let mut m = CMatrix::zeros(dim, dim);
                m[(ab / dim, ab % dim)] = s;
                m
            })
            .collect();
        Channel { in_dim: dim, out_dim: dim, kraus }
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    /// `Σ K ρ K†` on a raw matrix.
    pub fn apply_matrix(&self, rho: &CMatrix) -> CMatrix {
        self.kraus
            .iter()
            .fold(CMatrix::zeros(self.out_dim, self.out_dim), |acc, k| acc + k * rho * k.adjoint())
    }

    /// Heisenberg-picture dual `X ↦ Σ K† X K`.
    pub fn adjoint_apply(&self, x: &CMatrix) -> CMatrix {
        self.kraus
            .iter()
            .fold(CMatrix::zeros(self.in_dim, self.in_dim), |acc, k| acc + k.adjoint() * x * k)
    }

    /// Applies the channel. The output keeps the input's space when the
    /// dimensions agree and is a plain space otherwise; see [`Self::apply_into`].
    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        let space = if self.out_dim == self.in_dim {
            rho.space()
        } else {
            Space::Plain(self.out_dim)
        };
        self.apply_into(rho, space)
    }

    /// Applies the channel and labels the output with `space`.
    pub fn apply_into(&self, rho: &DensityOperator, space: Space) -> Result<DensityOperator> {
        if rho.dim() != self.in_dim {
            return Err(Error::DimensionMismatch { expected: self.in_dim, found: rho.dim() });
        }
        if space.dim() != self.out_dim {
            return Err(Error::DimensionMismatch { expected: self.out_dim, found: space.dim() });
        }
        Ok(DensityOperator::from_state_matrix(self.apply_matrix(rho.matrix()), space))
    }

    /// `second ∘ first`, with Kraus family `{A_a B_b}`.
    pub fn compose(second: &Channel, first: &Channel) -> Result<Channel> {
        if first.out_dim != second.in_dim {
            return Err(Error::DimensionMismatch { expected: second.in_dim, found: first.out_dim });
        }
        let kraus = second
            .kraus
            .iter()
            .flat_map(|a| first.kraus.iter().map(move |b| a * b))
            .filter(|m| m.norm() > KRAUS_ZERO)
            .collect::<Vec<_>>();
        if kraus.is_empty() {
            return Err(Error::EmptyKraus);
        }
        Ok(Channel { in_dim: first.in_dim, out_dim: second.out_dim, kraus })
    }

    /// `J = Σ_ij E(|i⟩⟨j|) ⊗ |i⟩⟨j|`, output factor first.
    pub fn choi_matrix(&self) -> CMatrix {
        choi_of_map(self.in_dim, self.out_dim, |x| self.apply_matrix(x))
    }

    pub fn cptp_report(&self) -> CptpReport {
        CptpReport::from_choi(&self.choi_matrix(), self.in_dim, self.out_dim)
    }

    pub fn is_cptp(&self) -> bool {
        self.cptp_report().is_cptp()
    }

    pub fn to_json(&self) -> ChannelJson {
        ChannelJson {
            in_dim: self.in_dim,
            out_dim: self.out_dim,
            kraus: self.kraus.iter().map(|k| MatrixJson::from_matrix(k, None)).collect(),
        }
    }

    pub fn from_json(json: &ChannelJson) -> Result<Self> {
        let kraus = json
            .kraus
            .iter()
            .map(MatrixJson::to_matrix)
            .collect::<Result<Vec<_>>>()?;
        let channel = Channel::new(kraus)?;
        if channel.in_dim != json.in_dim || channel.out_dim != json.out_dim {
            return Err(Error::Json(format!(
                "declared {}→{} but Kraus operators are {}→{}",
                json.in_dim, json.out_dim, channel.in_dim, channel.out_dim
            )));
        }
        Ok(channel)
    }
}

/// Choi matrix of an arbitrary linear map on `in_dim × in_dim` matrices.
pub fn choi_of_map(in_dim: usize, out_dim: usize, map: impl Fn(&CMatrix) -> CMatrix) -> CMatrix {
    let mut choi = CMatrix::zeros(out_dim * in_dim, out_dim * in_dim);
    for i in 0..in_dim {
        for j in 0..in_dim {
            let mut unit = CMatrix::zeros(in_dim, in_dim);
            unit[(i, j)] = real(1.0);
            let image = map(&unit);
            for a in 0..out_dim {
                for b in 0..out_dim {
                    choi[(a * in_dim + i, b * in_dim + j)] = image[(a, b)];
                }
            }
        }
    }
    choi
}

/// `Tr_out J`, which equals `(Σ K†K)ᵀ` for a Kraus map.
fn partial_trace_output(choi: &CMatrix, in_dim: usize, out_dim: usize) -> CMatrix {
    CMatrix::from_fn(in_dim, in_dim, |i, j| {
        (0..out_dim).map(|a| choi[(a * in_dim + i, a * in_dim + j)]).sum()
    })
}

/// Serialized channel: `{"in_dim", "out_dim", "kraus": [matrix, …]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelJson {
    pub in_dim: usize,
    pub out_dim: usize,
    pub kraus: Vec<MatrixJson>,
}

/// Orthonormality tolerance for pinching targets.
pub const TOL_ORTHONORMAL: f64 = 1e-8;

/// Pinching channel onto `N` orthonormal targets, from `dim` to `N + 1`.
///
/// With `P_i = |φ_i⟩⟨φ_i|` and `P_{N+1} = 1 − Σ P_i`, the Kraus operators
/// are `|e_i⟩⟨k| P_i` over the computational basis `{|k⟩}` and
/// `{|e_i⟩}` of the output. Zero operators are omitted, so `P_{N+1} = 0`
/// contributes nothing.
pub fn build_pinching(targets: &[PureState]) -> Result<Channel> {
    let first = targets.first().ok_or(Error::EmptyKraus)?;
    let dim = first.dim();
    let n = targets.len();
    if let Some(bad) = targets.iter().find(|t| t.dim() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: bad.dim() });
    }
    if n > dim {
        return Err(Error::NotOrthonormal { deviation: f64::INFINITY });
    }
    let mut deviation: f64 = 0.0;
    for (i, a) in targets.iter().enumerate() {
        for (j, b) in targets.iter().enumerate().skip(i) {
            let expected = if i == j { 1.0 } else { 0.0 };
            deviation = deviation.max((a.inner(b) - real(expected)).norm());
        }
    }
    if deviation > TOL_ORTHONORMAL {
        return Err(Error::NotOrthonormal { deviation });
    }

    let mut projectors: Vec<CMatrix> = targets.iter().map(|t| linalg::projector(t.vector())).collect();
    let covered = projectors.iter().fold(CMatrix::zeros(dim, dim), |acc, p| acc + p);
    projectors.push(CMatrix::identity(dim, dim) - covered);

    let mut kraus = Vec::new();
    for (i, p) in projectors.iter().enumerate() {
        for k in 0..dim {
            let mut op = CMatrix::zeros(n + 1, dim);
            op.row_mut(i).copy_from(&p.row(k));
            if op.norm() > KRAUS_ZERO {
                kraus.push(op);
            }
        }
    }
    Channel::new(kraus)
}
