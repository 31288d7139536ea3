use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// Largest string length a [`StringBasis`] accepts (dim = 2^11 − 1).
pub const MAX_BASIS_N: usize = 10;

/// Finite binary string. The empty string displays as `ε`.
///
/// Ordering is length-lexicographic: shorter strings first, then numeric.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn empty() -> Self {
        BitString(Vec::new())
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        BitString(bits)
    }

    /// The `len`-bit big-endian encoding of `value`.
    pub fn from_value(value: u64, len: usize) -> Self {
        BitString((0..len).rev().map(|k| (value >> k) & 1 == 1).collect())
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    /// Big-endian numeric value. Only meaningful for strings of at most 64 bits.
    pub fn value(&self) -> u64 {
        self.0.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
    }

    /// Plain `0`/`1` rendering; the empty string renders as `""`.
    pub fn to_bits_string(&self) -> String {
        self.0.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    /// All strings of length ≤ `n` in length-lexicographic order.
    pub fn all_up_to(n: usize) -> impl Iterator<Item = BitString> {
        (0..=n).flat_map(|len| (0..1u64 << len).map(move |v| BitString::from_value(v, len)))
    }
}

impl Ord for BitString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for BitString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            f.write_str("ε")
        } else {
            f.write_str(&self.to_bits_string())
        }
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "ε" {
            return Ok(BitString::empty());
        }
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::InvalidBitString(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitString)
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_bits_string())
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Orthonormal basis of all binary strings of length ≤ `n`.
///
/// Index `i` corresponds to the `i`-th string in the order ε, 0, 1, 00, 01, …,
/// so `dim = 2^(n+1) − 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StringBasis {
    n: usize,
}

impl StringBasis {
    pub fn new(n: usize) -> Result<Self> {
        if n > MAX_BASIS_N {
            return Err(Error::BasisTooLarge { n, max: MAX_BASIS_N });
        }
        Ok(StringBasis { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        (1usize << (self.n + 1)) - 1
    }

    pub fn index_of(&self, s: &BitString) -> Result<usize> {
        if s.len() > self.n {
            return Err(Error::StringTooLong { len: s.len(), n: self.n });
        }
        Ok((1usize << s.len()) - 1 + s.value() as usize)
    }

    pub fn string_at(&self, index: usize) -> Result<BitString> {
        let dim = self.dim();
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, dim });
        }
        let len = (usize::BITS - 1 - (index + 1).leading_zeros()) as usize;
        Ok(BitString::from_value((index + 1 - (1 << len)) as u64, len))
    }

    /// Length of the string at `index`, without building it.
    pub fn length_at(&self, index: usize) -> usize {
        (usize::BITS - 1 - (index + 1).leading_zeros()) as usize
    }

    pub fn strings(&self) -> impl Iterator<Item = BitString> {
        BitString::all_up_to(self.n)
    }
}
