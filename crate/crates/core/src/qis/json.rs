use serde::{Deserialize, Serialize};

use super::basis::StringBasis;
use super::state::{DensityOperator, PureState, Space};
use crate::{CMatrix, CVector, Error, Result, C64};

/// Row-major real/imaginary matrix encoding.
///
/// Density operators over a string basis carry `n` and readers check the
/// array sizes against `2^(n+1) − 1`. Kraus operators and operators on plain
/// spaces omit `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMatrix, n: Option<usize>) -> Self {
        let rows = |f: fn(&C64) -> f64| {
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect())
                .collect()
        };
        MatrixJson {
            n,
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let rows = self.re.len();
        let cols = self.re.first().map_or(0, Vec::len);
        let shape_ok = self.im.len() == rows
            && self.re.iter().all(|r| r.len() == cols)
            && self.im.iter().all(|r| r.len() == cols);
        if !shape_ok || rows == 0 || cols == 0 {
            return Err(Error::Json("re/im arrays must be non-empty and equally shaped".into()));
        }
        if let Some(n) = self.n {
            let dim = StringBasis::new(n)?.dim();
            if rows != dim || cols != dim {
                return Err(Error::Shape { rows, cols, expected: dim });
            }
        }
        Ok(CMatrix::from_fn(rows, cols, |i, j| C64::new(self.re[i][j], self.im[i][j])))
    }
}

impl DensityOperator {
    pub fn to_json(&self) -> MatrixJson {
        MatrixJson::from_matrix(self.matrix(), self.space().string_basis().map(|b| b.n()))
    }

    pub fn from_json(json: &MatrixJson) -> Result<Self> {
        let m = json.to_matrix()?;
        let space = match json.n {
            Some(n) => Space::strings(n)?,
            None => Space::Plain(m.nrows()),
        };
        DensityOperator::new(m, space)
    }
}

impl Serialize for DensityOperator {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

/// Amplitude vector encoding, `{"n"?, "re": [...], "im": [...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VectorJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl PureState {
    pub fn to_json(&self) -> VectorJson {
        VectorJson {
            n: self.space().string_basis().map(|b| b.n()),
            re: self.vector().iter().map(|z| z.re).collect(),
            im: self.vector().iter().map(|z| z.im).collect(),
        }
    }

    pub fn from_json(json: &VectorJson) -> Result<Self> {
        if json.re.len() != json.im.len() || json.re.is_empty() {
            return Err(Error::Json("re/im arrays must be non-empty and equally long".into()));
        }
        let space = match json.n {
            Some(n) => Space::strings(n)?,
            None => Space::Plain(json.re.len()),
        };
        if space.dim() != json.re.len() {
            return Err(Error::DimensionMismatch { expected: space.dim(), found: json.re.len() });
        }
        let v = CVector::from_fn(json.re.len(), |i, _| C64::new(json.re[i], json.im[i]));
        PureState::new(v, space)
    }
}

impl Serialize for PureState {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}
