use crate::qis::StringBasis;
use crate::{Error, Result};

/// Upper end (exclusive) of the admissible tolerance range, `1/(2e)`.
pub const DELTA_LIMIT: f64 = 0.5 / std::f64::consts::E;

fn check_delta(delta: f64) -> Result<()> {
    if (0.0..DELTA_LIMIT).contains(&delta) {
        Ok(())
    } else {
        Err(Error::DeltaOutOfRange { delta, limit: DELTA_LIMIT })
    }
}

/// `4δ log₂(1/δ)`, zero at `δ = 0`.
fn slack(delta: f64) -> f64 {
    if delta == 0.0 {
        0.0
    } else {
        -4.0 * delta * delta.log2()
    }
}

/// `(log₂ d + 4δ log₂(1/δ)) / (1 − 4δ)`: the most orthonormal vectors (in
/// bits) a channel on a `d`-dimensional input can reach within trace
/// distance `δ`.
pub fn counting_bound(d: usize, delta: f64) -> Result<f64> {
    if d == 0 {
        return Err(Error::ZeroDimension);
    }
    check_delta(delta)?;
    Ok(((d as f64).log2() + slack(delta)) / (1.0 - 4.0 * delta))
}

/// [`counting_bound`] on the string space of length ≤ `n`.
pub fn qc_counting_bound(n: usize, delta: f64) -> Result<f64> {
    counting_bound(StringBasis::new(n)?.dim(), delta)
}

/// `(n + 1 + 4δ log₂(1/δ)) / (1 − 4δ)`, which dominates [`qc_counting_bound`].
pub fn relaxed_qc_bound(n: usize, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    Ok((n as f64 + 1.0 + slack(delta)) / (1.0 - 4.0 * delta))
}
