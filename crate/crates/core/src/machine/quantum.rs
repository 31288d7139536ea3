//! Fixed-circuit quantum machines on the string space of length ≤ `n`.
//!
//! A machine is an isometry `V: C^D → C^D ⊗ C^(2^a)` with `D = 2^(n+1) − 1`
//! and `a` ancilla qubits, row index `s · 2^a + ancilla`. Its action on
//! inputs is `σ ↦ Tr_anc V σ V†`, which equals running the joint unitary
//! on `σ ⊗ |0…0⟩⟨0…0|` and discarding the ancillas.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::classical::run_classical;
use crate::channels::Channel;
use crate::qis::linalg::real;
use crate::qis::{base_length, DensityOperator, Space, StringBasis, DEFAULT_TOL_OVERLAP};
use crate::random::{haar_isometry, haar_unitary, seeded_rng};
use crate::{CMatrix, Error, Result};

pub const MAX_MACHINE_N: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Identity,
    BasisPermutation,
    SeededRandomUnitary,
    DephasingCompose,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::Identity,
        Family::BasisPermutation,
        Family::SeededRandomUnitary,
        Family::DephasingCompose,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Identity => "identity",
            Family::BasisPermutation => "basis-permutation",
            Family::SeededRandomUnitary => "seeded-random-unitary",
            Family::DephasingCompose => "dephasing-compose",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::UnknownFamily(s.to_string()))
    }
}

/// Serializable machine description. `noise` only affects
/// [`Family::DephasingCompose`], where it is the weight of the
/// completely depolarizing branch.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MachineSpec {
    pub family: Family,
    pub n: usize,
    pub seed: u64,
    pub ancilla_count: usize,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub noise: f64,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

impl MachineSpec {
    /// Spec with the family's minimal ancilla count and no noise.
    pub fn new(family: Family, n: usize, seed: u64) -> Self {
        MachineSpec { family, n, seed, ancilla_count: 0, noise: 0.0 }.with_minimal_ancillas()
    }

    pub fn with_noise(self, noise: f64) -> Self {
        MachineSpec { noise, ..self }.with_minimal_ancillas()
    }

    fn with_minimal_ancillas(self) -> Self {
        let dim = (1usize << (self.n + 1)) - 1;
        let ancilla_count = self.ancilla_count.max(minimal_ancillas(self.family, dim, self.noise));
        MachineSpec { ancilla_count, ..self }
    }
}

fn minimal_ancillas(family: Family, dim: usize, noise: f64) -> usize {
    match family {
        Family::DephasingCompose => {
            let kraus = dim + if noise > 0.0 { dim * dim } else { 0 };
            kraus.next_power_of_two().trailing_zeros() as usize
        }
        _ => 0,
    }
}

#[derive(Clone, Debug)]
pub struct QuantumMachine {
    spec: MachineSpec,
    basis: StringBasis,
    isometry: CMatrix,
    channel: Channel,
    permutation: Option<Vec<usize>>,
}

/// Builds the machine for `(family, n, seed)` with default ancillas.
pub fn make_machine(family: Family, n: usize, seed: u64) -> Result<QuantumMachine> {
    QuantumMachine::new(MachineSpec::new(family, n, seed))
}

/// Bennett-style bijection on strings of length ≤ `n`: a string that is a
/// halting classical program goes to its output when that output fits and
/// is still free; the rest are matched by a seeded shuffle.
fn program_permutation(basis: StringBasis, seed: u64) -> Vec<usize> {
    let dim = basis.dim();
    let mut image = vec![usize::MAX; dim];
    let mut taken = vec![false; dim];
    for (i, s) in basis.strings().enumerate() {
        if let Some(j) = run_classical(&s).and_then(|x| basis.index_of(&x).ok()) {
            if !taken[j] {
                image[i] = j;
                taken[j] = true;
            }
        }
    }
    let mut free: Vec<usize> = (0..dim).filter(|&j| !taken[j]).collect();
    free.shuffle(&mut seeded_rng(seed));
    let mut free = free.into_iter();
    for slot in image.iter_mut().filter(|j| **j == usize::MAX) {
        *slot = free.next().expect("bijection");
    }
    image
}

/// Stacks Kraus operators `K_k` into `V = Σ_k K_k ⊗ |k⟩`.
fn stack_kraus(kraus: &[CMatrix], dim: usize, ancillas: usize) -> CMatrix {
    let width = 1usize << ancillas;
    assert!(kraus.len() <= width);
    let mut v = CMatrix::zeros(dim * width, dim);
    for (k, op) in kraus.iter().enumerate() {
        for r in 0..dim {
            for c in 0..dim {
                v[(r * width + k, c)] = op[(r, c)];
            }
        }
    }
    v
}

impl QuantumMachine {
    pub fn new(spec: MachineSpec) -> Result<Self> {
        if spec.n > MAX_MACHINE_N {
            return Err(Error::MachineTooLarge { n: spec.n, max: MAX_MACHINE_N });
        }
        if !(0.0..=1.0).contains(&spec.noise) {
            return Err(Error::InvalidParameter(format!("noise {} outside [0,1]", spec.noise)));
        }
        let basis = StringBasis::new(spec.n)?;
        let dim = basis.dim();
        let minimum = minimal_ancillas(spec.family, dim, spec.noise);
        if spec.ancilla_count < minimum {
            return Err(Error::InvalidParameter(format!(
                "{} needs at least {minimum} ancillas",
                spec.family
            )));
        }
        if spec.ancilla_count > 8 {
            return Err(Error::InvalidParameter("at most 8 ancillas".into()));
        }
        let a = spec.ancilla_count;
        let mut permutation = None;
        let isometry = match spec.family {
            Family::Identity => stack_kraus(&[CMatrix::identity(dim, dim)], dim, a),
            Family::BasisPermutation => {
                let pi = program_permutation(basis, spec.seed);
                let mut p = CMatrix::zeros(dim, dim);
                for (i, &j) in pi.iter().enumerate() {
                    p[(j, i)] = real(1.0);
                }
                permutation = Some(pi);
                stack_kraus(&[p], dim, a)
            }
            Family::SeededRandomUnitary => haar_isometry(dim << a, dim, &mut seeded_rng(spec.seed)),
            Family::DephasingCompose => {
                let u = haar_unitary(dim, &mut seeded_rng(spec.seed));
                let keep = real((1.0 - spec.noise).sqrt());
                let mut kraus: Vec<CMatrix> = (0..dim)
                    .map(|s| {
                        let mut k = CMatrix::zeros(dim, dim);
                        k.row_mut(s).copy_from(&u.row(s));
                        k * keep
                    })
                    .collect();
                if spec.noise > 0.0 {
                    let w = real((spec.noise / dim as f64).sqrt());
                    for st in 0..dim * dim {
                        let mut k = CMatrix::zeros(dim, dim);
                        k[(st / dim, st % dim)] = w;
                        kraus.push(k);
                    }
                }
                stack_kraus(&kraus, dim, a)
            }
        };
        let channel = Channel::from_isometry(&isometry, dim)?;
        Ok(QuantumMachine { spec, basis, isometry, channel, permutation })
    }

    pub fn spec(&self) -> &MachineSpec {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn basis(&self) -> StringBasis {
        self.basis
    }

    pub fn space(&self) -> Space {
        Space::Strings(self.basis)
    }

    /// `V`, with `D · 2^a` rows.
    pub fn isometry(&self) -> &CMatrix {
        &self.isometry
    }

    pub fn channel(&self) -> &Channel {
        &self.channel
    }

    /// Basis permutation `π` by index, for [`Family::BasisPermutation`].
    pub fn permutation(&self) -> Option<&[usize]> {
        self.permutation.as_deref()
    }

    /// Brings `sigma` onto this machine's input space, checking its base
    /// length.
    fn embed(&self, sigma: &DensityOperator) -> Result<DensityOperator> {
        let Some(b) = sigma.space().string_basis() else {
            return sigma.relabel(self.space());
        };
        if b.n() == self.n() {
            return Ok(sigma.clone());
        }
        let len = base_length(sigma, DEFAULT_TOL_OVERLAP)?;
        if len > self.n() {
            return Err(Error::InputTooLong { len, n: self.n() });
        }
        let dim = self.basis.dim();
        let m = sigma.matrix();
        let embedded = CMatrix::from_fn(dim, dim, |i, j| {
            if i < m.nrows() && j < m.ncols() {
                m[(i, j)]
            } else {
                real(0.0)
            }
        });
        DensityOperator::new(embedded, self.space())
    }

    /// Output state for input `sigma`, on the same string space.
    pub fn run(&self, sigma: &DensityOperator) -> Result<DensityOperator> {
        let sigma = self.embed(sigma)?;
        self.channel.apply_into(&sigma, self.space())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qis::{von_neumann_entropy, BitString};
    use crate::random::random_density;

    #[test]
    fn identity_machine() {
        let m = make_machine(Family::Identity, 1, 0).unwrap();
        assert_eq!(m.basis().dim(), 3);
        let rho = random_density(m.space(), &mut seeded_rng(1));
        assert!((m.run(&rho).unwrap().matrix() - rho.matrix()).norm() < 1e-12);
    }

    #[test]
    fn permutation_machine_maps_basis_to_basis() {
        let m = make_machine(Family::BasisPermutation, 3, 9).unwrap();
        let pi = m.permutation().unwrap().to_vec();
        let mut sorted = pi.clone();
        sorted.sort();
        assert_eq!(sorted, (0..15).collect::<Vec<_>>());
        // "000" halts with ε, "001" writes 0, "010" writes 1.
        let b = m.basis();
        let idx = |x: &str| b.index_of(&x.parse::<BitString>().unwrap()).unwrap();
        assert_eq!(pi[idx("000")], idx(""));
        assert_eq!(pi[idx("001")], idx("0"));
        assert_eq!(pi[idx("010")], idx("1"));
        for (i, s) in b.strings().enumerate() {
            let out = m.run(&DensityOperator::basis_state(b, &s).unwrap()).unwrap();
            let want = DensityOperator::basis_index(m.space(), pi[i]).unwrap();
            assert_eq!(out.matrix(), want.matrix());
        }
    }

    #[test]
    fn random_unitary_machine_is_cptp_and_spectral() {
        let m = make_machine(Family::SeededRandomUnitary, 2, 42).unwrap();
        assert_eq!(m.spec().ancilla_count, 0);
        assert!(m.channel().is_cptp());
        let rho = random_density(m.space(), &mut seeded_rng(3));
        let out = m.run(&rho).unwrap();
        assert!((von_neumann_entropy(&out) - von_neumann_entropy(&rho)).abs() < 1e-9);
        let again = make_machine(Family::SeededRandomUnitary, 2, 42).unwrap();
        assert_eq!(again.isometry(), m.isometry());
    }

    #[test]
    fn dephasing_machine() {
        let spec = MachineSpec::new(Family::DephasingCompose, 1, 4).with_noise(0.2);
        assert_eq!(spec.ancilla_count, 4); // 3 + 9 Kraus operators
        let m = QuantumMachine::new(spec).unwrap();
        assert!(m.channel().is_cptp());
        assert_eq!(MachineSpec::new(Family::DephasingCompose, 1, 4).ancilla_count, 2);
    }

    #[test]
    fn input_embedding_and_errors() {
        let m = make_machine(Family::Identity, 1, 0).unwrap();
        let short = DensityOperator::basis_state(StringBasis::new(0).unwrap(), &BitString::empty()).unwrap();
        assert_eq!(m.run(&short).unwrap().dim(), 3);
        let b3 = StringBasis::new(3).unwrap();
        let long = DensityOperator::basis_state(b3, &"101".parse().unwrap()).unwrap();
        assert!(matches!(m.run(&long), Err(Error::InputTooLong { len: 3, n: 1 })));
        let fits = DensityOperator::basis_state(b3, &"1".parse().unwrap()).unwrap();
        assert!(m.run(&fits).is_ok());
        assert!(matches!(make_machine(Family::Identity, 5, 0), Err(Error::MachineTooLarge { .. })));
        assert!("nope".parse::<Family>().is_err());
        let json = serde_json::to_string(m.spec()).unwrap();
        assert_eq!(json, r#"{"family":"identity","n":1,"seed":0,"ancilla_count":0}"#);
    }
}
