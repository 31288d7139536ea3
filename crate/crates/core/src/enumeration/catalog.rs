use std::collections::BTreeSet;

use serde::Serialize;

use super::net::StateNet;
use crate::counting::{counting_bound, DELTA_LIMIT};
use crate::machine::{MachineSpec, QuantumMachine};
use crate::qis::linalg::{basis_vector, projector};
use crate::qis::{trace_distance_to_pure, BitString};
use crate::CMatrix;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CatalogEntry {
    pub string: BitString,
    pub net_index: usize,
    pub distance: f64,
}

/// Strings a machine produces within `delta` from some net point, in
/// discovery order (net index, then string index).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutputCatalog {
    pub machine: MachineSpec,
    pub n: usize,
    pub delta: f64,
    pub net_epsilon: f64,
    pub net_fingerprint: String,
    pub net_size: usize,
    /// `delta > net_epsilon`: every string reachable within `delta − ε` is
    /// guaranteed to appear.
    pub complete: bool,
    /// `⌈n / (1 − 4δ)⌉`, the index width the counting bound suggests; only
    /// meaningful for `δ < 1/4`.
    pub index_width_bits: Option<usize>,
    pub entries: Vec<CatalogEntry>,
}

impl OutputCatalog {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn strings(&self) -> Vec<BitString> {
        self.entries.iter().map(|e| e.string.clone()).collect()
    }

    pub fn string_set(&self) -> BTreeSet<BitString> {
        self.entries.iter().map(|e| e.string.clone()).collect()
    }

    /// `log₂ #catalog`, `None` when empty.
    pub fn log2_count(&self) -> Option<f64> {
        (!self.is_empty()).then(|| (self.len() as f64).log2())
    }

    /// Counting bound at the catalog's own tolerance.
    pub fn bound(&self) -> Result<f64> {
        counting_bound((1usize << (self.n + 1)) - 1, self.delta)
    }

    /// `δ + ε`, and the counting bound there when it is below `1/(2e)`.
    pub fn inflated_bound(&self) -> (f64, Option<f64>) {
        let eff = self.delta + self.net_epsilon;
        let bound = (eff < DELTA_LIMIT)
            .then(|| counting_bound((1usize << (self.n + 1)) - 1, eff).ok())
            .flatten();
        (eff, bound)
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if (0.0..=1.0).contains(&delta) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("delta {delta} outside [0,1]")))
    }
}

/// One pass over the net serving several tolerances: `result[k]` is the
/// catalog for `deltas[k]`.
///
/// `‖ρ − |x⟩⟨x|‖_Tr ≥ 1 − ⟨x|ρ|x⟩`, so only strings with output weight at
/// least `1 − max δ` are measured exactly.
pub fn enumerate_outputs_multi(m: &QuantumMachine, deltas: &[f64], net: &StateNet) -> Result<Vec<OutputCatalog>> {
    if net.n() != m.n() {
        return Err(Error::DimensionMismatch { expected: m.n(), found: net.n() });
    }
    for &d in deltas {
        check_delta(d)?;
    }
    let max_delta = deltas.iter().copied().fold(0.0, f64::max);
    let dim = m.basis().dim();
    // ‖ρ − |x⟩⟨x|‖_Tr ≥ 1 − ⟨x|ρ|x⟩, and ⟨x|E(σ)|x⟩ = Tr(E†(|x⟩⟨x|) σ), so
    // the effects screen net points without forming channel outputs.
    let effects: Vec<CMatrix> =
        (0..dim).map(|x| m.channel().adjoint_apply(&projector(&basis_vector(dim, x)))).collect();
    let threshold = 1.0 - max_delta - 1e-12;
    let found = net.map_blocks(|points| {
        let mut hits = Vec::new();
        for (k, point) in points.iter().enumerate() {
            let sigma = point.matrix();
            let mut out = None;
            for (x, f) in effects.iter().enumerate() {
                if f.dotc(sigma).re < threshold {
                    continue;
                }
                let out = out.get_or_insert_with(|| m.channel().apply_matrix(sigma));
                let d = trace_distance_to_pure(out, x);
                if d <= max_delta {
                    hits.push((k, x, d));
                }
            }
        }
        hits
    });
    let net_size = net.len();

    let basis = m.basis();
    let mut catalogs: Vec<OutputCatalog> = deltas
        .iter()
        .map(|&delta| OutputCatalog {
            machine: *m.spec(),
            n: m.n(),
            delta,
            net_epsilon: net.epsilon(),
            net_fingerprint: net.fingerprint(),
            net_size,
            complete: delta > net.epsilon(),
            index_width_bits: (delta < 0.25).then(|| (m.n() as f64 / (1.0 - 4.0 * delta)).ceil() as usize),
            entries: Vec::new(),
        })
        .collect();
    let mut seen = vec![vec![false; dim]; deltas.len()];
    let hits = found
        .into_iter()
        .flat_map(|(start, hits)| hits.into_iter().map(move |(k, x, d)| (start + k, x, d)));
    for (j, x, d) in hits {
        for (k, cat) in catalogs.iter_mut().enumerate() {
            if d <= cat.delta && !seen[k][x] {
                seen[k][x] = true;
                cat.entries.push(CatalogEntry {
                    string: basis.string_at(x).expect("in range"),
                    net_index: j,
                    distance: d,
                });
            }
        }
    }
    Ok(catalogs)
}

/// All strings of length ≤ `n` the machine produces within `delta` from
/// some net point.
pub fn enumerate_outputs(m: &QuantumMachine, delta: f64, net: &StateNet) -> Result<OutputCatalog> {
    Ok(enumerate_outputs_multi(m, &[delta], net)?.remove(0))
}

/// The set `S_k`: outputs within `1/k`.
pub fn s_set(m: &QuantumMachine, k: usize, net: &StateNet) -> Result<OutputCatalog> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    enumerate_outputs(m, 1.0 / k as f64, net)
}

/// The `i`-th (1-based) catalog entry.
pub fn index_program(i: usize, catalog: &OutputCatalog) -> Result<BitString> {
    if i == 0 {
        return Err(Error::InvalidParameter("index is 1-based".into()));
    }
    catalog
        .entries
        .get(i - 1)
        .map(|e| e.string.clone())
        .ok_or(Error::IndexBeyondOutputs { index: i, count: catalog.len() })
}

/// Tolerance the adaptive program starts from.
pub const ADAPTIVE_START: f64 = 1.0 / 6.0;
/// Halvings tried before giving up.
pub const MAX_HALVINGS: u32 = 60;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdaptiveOutcome {
    pub string: BitString,
    pub final_delta: f64,
    pub halvings: u32,
    pub catalog_size: usize,
}

/// Halves `δ` from 1/6 until the list has at most `2^(n+1)` entries, then
/// returns entry `i`. `list(δ)` supplies the ordered outputs at `δ`.
pub fn adaptive_select(
    i: usize,
    n: usize,
    mut list: impl FnMut(f64) -> Result<Vec<BitString>>,
) -> Result<AdaptiveOutcome> {
    let cap = 1usize << (n + 1);
    if i == 0 {
        return Err(Error::InvalidParameter("index is 1-based".into()));
    }
    if i > cap {
        return Err(Error::IndexBeyondOutputs { index: i, count: cap });
    }
    let mut delta = ADAPTIVE_START;
    for halvings in 0..=MAX_HALVINGS {
        let items = list(delta)?;
        if items.len() <= cap {
            let catalog_size = items.len();
            let string = items
                .into_iter()
                .nth(i - 1)
                .ok_or(Error::IndexBeyondOutputs { index: i, count: catalog_size })?;
            return Ok(AdaptiveOutcome { string, final_delta: delta, halvings, catalog_size });
        }
        delta /= 2.0;
    }
    Err(Error::AdaptiveNoSettle { halvings: MAX_HALVINGS as usize })
}

/// [`adaptive_select`] over the machine's catalogs on a fixed net.
pub fn index_program_adaptive(i: usize, m: &QuantumMachine, net: &StateNet) -> Result<AdaptiveOutcome> {
    adaptive_select(i, m.n(), |delta| Ok(enumerate_outputs(m, delta, net)?.strings()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::NetConfig;
    use crate::machine::{make_machine, Family};

    fn s(x: &str) -> BitString {
        x.parse().unwrap()
    }

    fn identity_n1() -> (QuantumMachine, StateNet) {
        (
            make_machine(Family::Identity, 1, 0).unwrap(),
            StateNet::build(NetConfig::default_for(1)).unwrap(),
        )
    }

    #[test]
    fn identity_catalog_and_index_program() {
        let (m, net) = identity_n1();
        let cat = enumerate_outputs(&m, 0.1, &net).unwrap();
        assert_eq!(cat.strings(), vec![s(""), s("0"), s("1")]);
        assert!(cat.entries.iter().all(|e| e.distance == 0.0));
        assert_eq!(index_program(1, &cat).unwrap(), s(""));
        assert_eq!(index_program(3, &cat).unwrap(), s("1"));
        assert!(matches!(index_program(4, &cat), Err(Error::IndexBeyondOutputs { index: 4, count: 3 })));
    }

    #[test]
    fn adaptive_on_identity() {
        let (m, net) = identity_n1();
        let out = index_program_adaptive(2, &m, &net).unwrap();
        assert_eq!((out.string, out.halvings, out.catalog_size), (s("0"), 0, 3));
        assert!(matches!(index_program_adaptive(5, &m, &net), Err(Error::IndexBeyondOutputs { .. })));
    }

    #[test]
    fn adaptive_halves_on_oversized_lists() {
        // Synthetic list: 9 items above δ = 1/24, 3 below.
        let list = |delta: f64| {
            let k = if delta > 1.0 / 24.0 + 1e-15 { 9 } else { 3 };
            Ok(BitString::all_up_to(3).take(k).collect())
        };
        let out = adaptive_select(2, 1, list).unwrap();
        assert_eq!(out.halvings, 2);
        assert!((out.final_delta - 1.0 / 24.0).abs() < 1e-15);
        assert_eq!(out.catalog_size, 3);
        assert!(adaptive_select(1, 1, |_| Ok(BitString::all_up_to(3).collect())).is_err());
    }

    #[test]
    fn multi_delta_pass_matches_single() {
        let m = make_machine(Family::SeededRandomUnitary, 1, 3).unwrap();
        let net = StateNet::build(NetConfig::default_for(1)).unwrap();
        let deltas = [1.0 / 6.0, 1.0 / 8.0, 1.0 / 16.0];
        let multi = enumerate_outputs_multi(&m, &deltas, &net).unwrap();
        for (d, cat) in deltas.iter().zip(&multi) {
            assert_eq!(&enumerate_outputs(&m, *d, &net).unwrap(), cat);
        }
        assert!(multi[1].string_set().is_subset(&multi[0].string_set()));
    }
}
