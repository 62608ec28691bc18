//! n-qubit Pauli operators in the symplectic (X-bits, Z-bits) representation.
//!
//! A [`PauliOperator`] is a tensor product of the Hermitian letters I, X, Y, Z
//! with an overall sign of +1 or -1. Qubit `q` is encoded by bit `q` of the two
//! masks:
//!
//! | x | z | letter |
//! |---|---|--------|
//! | 0 | 0 | I      |
//! | 1 | 0 | X      |
//! | 0 | 1 | Z      |
//! | 1 | 1 | Y      |
//!
//! In the text form the leftmost letter is qubit 0, so `"XZ"` is X on qubit 0
//! and Z on qubit 1.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Hard limit imposed by the mask width.
pub const MAX_QUBITS: usize = 16;

/// Default cap for operations that touch all `4^n` Paulis.
pub const DEFAULT_ENUMERATION_CAP: usize = 12;

/// Parity of the number of Y letters in a Pauli string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

/// Membership of a Pauli in the orbit structure of the CNOT+Pauli group.
///
/// `B0` is the identity, `B1` the Z/I-only strings, `B2` the X/I-only strings,
/// `B4` the strings with an odd number of Y letters and `B3` everything else.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CnotPauliBlock {
    B0,
    B1,
    B2,
    B3,
    B4,
}

impl CnotPauliBlock {
    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliOperator {
    n_qubits: u8,
    negative: bool,
    x: u32,
    z: u32,
}

#[inline]
fn mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// Phase exponent `k` (mod 4) such that `P(x1,z1) * P(x2,z2) = i^k P(x1^x2, z1^z2)`
/// for sign-positive Hermitian Paulis.
#[inline]
pub(crate) fn product_phase(x1: u32, z1: u32, x2: u32, z2: u32) -> u32 {
    let k = (x1 & z1).count_ones() + (x2 & z2).count_ones() + 2 * (z1 & x2).count_ones();
    let back = ((x1 ^ x2) & (z1 ^ z2)).count_ones();
    (k + 4 * 32 - back) & 3
}

impl PauliOperator {
    /// Builds a Pauli from raw masks. Fails if a mask has bits beyond `n_qubits`.
    pub fn new(n_qubits: usize, x_bits: u32, z_bits: u32, negative: bool) -> Result<Self> {
        check_qubits(n_qubits)?;
        let m = mask(n_qubits);
        if x_bits & !m != 0 || z_bits & !m != 0 {
            return Err(Error::InvalidPauli(format!(
                "bit masks x={x_bits:#b} z={z_bits:#b} do not fit in {n_qubits} qubits"
            )));
        }
        Ok(Self {
            n_qubits: n_qubits as u8,
            negative,
            x: x_bits,
            z: z_bits,
        })
    }

    /// Unchecked constructor for internal hot paths; masks must already fit.
    #[inline]
    pub(crate) fn from_parts(n_qubits: usize, x: u32, z: u32, negative: bool) -> Self {
        debug_assert!(x & !mask(n_qubits) == 0 && z & !mask(n_qubits) == 0);
        Self {
            n_qubits: n_qubits as u8,
            negative,
            x,
            z,
        }
    }

    pub fn identity(n_qubits: usize) -> Result<Self> {
        Self::new(n_qubits, 0, 0, false)
    }

    /// Single-qubit letter on qubit `q`, identity elsewhere.
    pub fn single(n_qubits: usize, qubit: usize, letter: char) -> Result<Self> {
        if qubit >= n_qubits {
            return Err(Error::InvalidPauli(format!(
                "qubit {qubit} out of range for {n_qubits} qubits"
            )));
        }
        let (x, z) = letter_bits(letter)
            .ok_or_else(|| Error::InvalidPauli(format!("unknown Pauli letter {letter:?}")))?;
        Self::new(n_qubits, (x as u32) << qubit, (z as u32) << qubit, false)
    }

    /// Pauli at position `index` of the canonical order for `n_qubits`.
    pub fn from_index(n_qubits: usize, index: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        if (index as u64) >> (2 * n_qubits) != 0 {
            return Err(Error::InvalidPauli(format!(
                "index {index} out of range for {n_qubits} qubits"
            )));
        }
        Ok(Self::from_parts(
            n_qubits,
            (index >> n_qubits) as u32,
            (index as u32) & mask(n_qubits),
            false,
        ))
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n_qubits as usize
    }

    #[inline]
    pub fn x_bits(&self) -> u32 {
        self.x
    }

    #[inline]
    pub fn z_bits(&self) -> u32 {
        self.z
    }

    #[inline]
    pub fn is_negative(&self) -> bool {
        self.negative
    }

    /// +1 or -1.
    #[inline]
    pub fn sign(&self) -> i8 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    #[inline]
    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Position in the canonical order: lexicographic on `(x_bits, z_bits)`.
    #[inline]
    pub fn index(&self) -> usize {
        ((self.x as usize) << self.n_qubits) | self.z as usize
    }

    /// Same letters with sign +1.
    #[inline]
    pub fn unsigned(&self) -> Self {
        Self {
            negative: false,
            ..*self
        }
    }

    #[inline]
    pub fn negated(&self) -> Self {
        Self {
            negative: !self.negative,
            ..*self
        }
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    pub fn letter(&self, qubit: usize) -> char {
        match ((self.x >> qubit) & 1, (self.z >> qubit) & 1) {
            (0, 0) => 'I',
            (1, 0) => 'X',
            (0, 1) => 'Z',
            _ => 'Y',
        }
    }

    fn check_same_size(&self, other: &Self) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::SizeMismatch {
                left: self.n_qubits(),
                right: other.n_qubits(),
            });
        }
        Ok(())
    }

    /// True iff the two Paulis commute. Signs are irrelevant.
    pub fn commutes(&self, other: &Self) -> Result<bool> {
        self.check_same_size(other)?;
        Ok(self.commutes_unchecked(other))
    }

    #[inline]
    pub(crate) fn commutes_unchecked(&self, other: &Self) -> bool {
        symplectic_product(self.x, self.z, other.x, other.z) == 0
    }

    pub fn y_count_parity(&self) -> Parity {
        if (self.x & self.z).count_ones().is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn cnot_pauli_block(&self) -> CnotPauliBlock {
        if self.is_identity() {
            CnotPauliBlock::B0
        } else if self.x == 0 {
            CnotPauliBlock::B1
        } else if self.z == 0 {
            CnotPauliBlock::B2
        } else if self.y_count_parity() == Parity::Odd {
            CnotPauliBlock::B4
        } else {
            CnotPauliBlock::B3
        }
    }

    /// Product `self * other` as a phase exponent (mod 4) and the resulting
    /// sign-positive letters. Signs of both factors are folded into the phase.
    pub(crate) fn mul_phase(&self, other: &Self) -> (u32, u32, u32) {
        let mut k = product_phase(self.x, self.z, other.x, other.z);
        if self.negative {
            k += 2;
        }
        if other.negative {
            k += 2;
        }
        (k & 3, self.x ^ other.x, self.z ^ other.z)
    }

    /// Product of two Paulis when it is Hermitian (i.e. the factors commute).
    /// Returns `None` for anticommuting factors, whose product carries a factor of i.
    pub fn checked_mul(&self, other: &Self) -> Result<Option<Self>> {
        self.check_same_size(other)?;
        let (k, x, z) = self.mul_phase(other);
        Ok(match k {
            0 => Some(Self::from_parts(self.n_qubits(), x, z, false)),
            2 => Some(Self::from_parts(self.n_qubits(), x, z, true)),
            _ => None,
        })
    }
}

/// Parity of the symplectic inner product of two masks pairs.
#[inline]
pub(crate) fn symplectic_product(x1: u32, z1: u32, x2: u32, z2: u32) -> u32 {
    ((x1 & z2).count_ones() + (z1 & x2).count_ones()) & 1
}

fn letter_bits(c: char) -> Option<(bool, bool)> {
    match c {
        'I' | 'i' | '_' => Some((false, false)),
        'X' | 'x' => Some((true, false)),
        'Z' | 'z' => Some((false, true)),
        'Y' | 'y' => Some((true, true)),
        _ => None,
    }
}

pub(crate) fn check_qubits(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::InvalidQubitCount(n));
    }
    Ok(())
}

/// All `4^n` sign-positive Paulis in canonical order (identity first).
pub fn enumerate_paulis(n: usize) -> Result<Vec<PauliOperator>> {
    enumerate_paulis_with_cap(n, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_paulis_with_cap(n: usize, cap: usize) -> Result<Vec<PauliOperator>> {
    check_qubits(n)?;
    if n > cap {
        return Err(Error::CapExceeded {
            what: "Pauli enumeration (qubits)",
            cap,
            reached: n,
        });
    }
    let count = 1usize << (2 * n);
    let m = mask(n);
    Ok((0..count)
        .map(|i| PauliOperator::from_parts(n, (i >> n) as u32, (i as u32) & m, false))
        .collect())
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negative {
            f.write_str("-")?;
        }
        for q in 0..self.n_qubits() {
            write!(f, "{}", self.letter(q))?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pauli({self})")
    }
}

impl FromStr for PauliOperator {
    type Err = Error;

    /// Accepts an optional leading `+`, `-` or `−`, then one letter per qubit.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (negative, body) = if let Some(rest) = s.strip_prefix('-') {
            (true, rest)
        } else if let Some(rest) = s.strip_prefix('\u{2212}') {
            (true, rest)
        } else if let Some(rest) = s.strip_prefix('+') {
            (false, rest)
        } else {
            (false, s)
        };
        let n = body.chars().count();
        if n == 0 {
            return Err(Error::InvalidPauli(format!("empty Pauli string {s:?}")));
        }
        check_qubits(n)?;
        let (mut x, mut z) = (0u32, 0u32);
        for (q, c) in body.chars().enumerate() {
            let (bx, bz) = letter_bits(c)
                .ok_or_else(|| Error::InvalidPauli(format!("unknown letter {c:?} in {s:?}")))?;
            x |= (bx as u32) << q;
            z |= (bz as u32) << q;
        }
        Ok(Self::from_parts(n, x, z, negative))
    }
}

impl Serialize for PauliOperator {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliOperator {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
