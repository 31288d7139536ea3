use crate::qis::{relative_entropy, von_neumann_entropy, DensityOperator};
use crate::{Error, Result};

/// Weights must sum to one within this.
pub const TOL_WEIGHTS: f64 = 1e-10;

/// Probability-weighted family of states on a common space.
#[derive(Clone, Debug)]
pub struct Ensemble {
    weights: Vec<f64>,
    states: Vec<DensityOperator>,
    average: DensityOperator,
}

impl Ensemble {
    pub fn new(weights: Vec<f64>, states: Vec<DensityOperator>) -> Result<Self> {
        if weights.len() != states.len() || states.is_empty() {
            return Err(Error::InvalidEnsemble(format!(
                "{} weights for {} states",
                weights.len(),
                states.len()
            )));
        }
        if weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::InvalidEnsemble("negative or NaN weight".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > TOL_WEIGHTS {
            return Err(Error::InvalidEnsemble(format!("weights sum to {total}")));
        }
        let average = DensityOperator::mixture(&weights, &states)?;
        Ok(Ensemble { weights, states, average })
    }

    /// Equal weights `1/N`.
    pub fn uniform(states: Vec<DensityOperator>) -> Result<Self> {
        let n = states.len().max(1);
        Ensemble::new(vec![1.0 / n as f64; states.len()], states)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn states(&self) -> &[DensityOperator] {
        &self.states
    }

    /// `ρ̄ = Σ λ_i ρ_i`.
    pub fn average(&self) -> &DensityOperator {
        &self.average
    }

    /// Holevo quantity `S(ρ̄) − Σ λ_i S(ρ_i)`, clamped at zero.
    pub fn chi(&self) -> f64 {
        let mixed: f64 = self
            .weights
            .iter()
            .zip(&self.states)
            .map(|(w, s)| w * von_neumann_entropy(s))
            .sum();
        (von_neumann_entropy(&self.average) - mixed).max(0.0)
    }

    /// The same quantity as `Σ λ_i S(ρ_i ‖ ρ̄)`.
    pub fn chi_relative(&self) -> f64 {
        self.weights
            .iter()
            .zip(&self.states)
            .filter(|(w, _)| **w > 0.0)
            .map(|(w, s)| w * relative_entropy(s, &self.average).expect("shared space"))
            .sum()
    }

    /// Image of every member under `f`, same weights.
    pub fn map(&self, f: impl Fn(&DensityOperator) -> Result<DensityOperator>) -> Result<Ensemble> {
        let states = self.states.iter().map(f).collect::<Result<Vec<_>>>()?;
        Ensemble::new(self.weights.clone(), states)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qis::Space;

    fn diag(p: &[f64]) -> DensityOperator {
        DensityOperator::diagonal(Space::Plain(p.len()), p).unwrap()
    }

    #[test]
    fn chi_examples() {
        let same = Ensemble::uniform(vec![diag(&[0.7, 0.3]); 3]).unwrap();
        assert!(same.chi().abs() < 1e-12);
        let basis = Ensemble::uniform(vec![diag(&[1.0, 0.0]), diag(&[0.0, 1.0])]).unwrap();
        assert!((basis.chi() - 1.0).abs() < 1e-12);
        assert!((basis.chi_relative() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_weights() {
        let s = vec![diag(&[1.0, 0.0]), diag(&[0.0, 1.0])];
        assert!(Ensemble::new(vec![0.5, 0.6], s.clone()).is_err());
        assert!(Ensemble::new(vec![1.5, -0.5], s.clone()).is_err());
        assert!(Ensemble::new(vec![1.0], s).is_err());
    }
}
