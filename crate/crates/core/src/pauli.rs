//! Phased Pauli operators with the convention `Y = iXZ`.
//!
//! A [`PauliString`] stores `i^phase · σ_0 ⊗ … ⊗ σ_{n-1}` where each `σ_q` is one of the
//! Hermitian single-qubit Paulis selected by the pair `(x_q, z_q)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::BitVec;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PauliError {
    #[error("size mismatch: {0} vs {1} qubits")]
    SizeMismatch(usize, usize),
    #[error("invalid Pauli literal `{0}`")]
    BadLiteral(String),
    #[error("invalid phase `{0}`")]
    BadPhase(String),
}

/// Single-qubit Pauli.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const NONTRIVIAL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn from_char(c: char) -> Option<Pauli> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn anticommutes(self, other: Pauli) -> bool {
        let (a, b) = (self.bits(), other.bits());
        (a.0 & b.1) ^ (a.1 & b.0)
    }

    /// Pointwise product ignoring the phase.
    pub fn times(self, other: Pauli) -> Pauli {
        let (a, b) = (self.bits(), other.bits());
        Pauli::from_bits(a.0 ^ b.0, a.1 ^ b.1)
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

impl FromStr for Pauli {
    type Err = PauliError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut chars = s.chars();
        match (chars.next().and_then(Pauli::from_char), chars.next()) {
            (Some(p), None) => Ok(p),
            _ => Err(PauliError::BadLiteral(s.to_string())),
        }
    }
}

/// Scalar `i^k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_exponent(k: i64) -> Phase {
        Phase(k.rem_euclid(4) as u8)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn mul(self, other: Phase) -> Phase {
        Phase((self.0 + other.0) % 4)
    }

    pub fn inverse(self) -> Phase {
        Phase((4 - self.0) % 4)
    }

    pub fn as_str(self) -> &'static str {
        ["+1", "+i", "-1", "-i"][self.0 as usize]
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Phase {
    type Err = PauliError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "+1" | "1" => Ok(Phase::ONE),
            "+i" | "i" => Ok(Phase::I),
            "-1" => Ok(Phase::MINUS_ONE),
            "-i" => Ok(Phase::MINUS_I),
            _ => Err(PauliError::BadPhase(s.to_string())),
        }
    }
}

impl Serialize for Phase {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Phase {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// n-qubit Pauli operator with an exact phase.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: BitVec,
    z: BitVec,
    phase: u8,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        Self { n, x: BitVec::zeros(n), z: BitVec::zeros(n), phase: 0 }
    }

    pub fn single(n: usize, qubit: usize, p: Pauli) -> Self {
        let mut out = Self::identity(n);
        out.set(qubit, p);
        out
    }

    pub fn from_paulis(paulis: &[Pauli]) -> Self {
        let mut out = Self::identity(paulis.len());
        for (q, &p) in paulis.iter().enumerate() {
            out.set(q, p);
        }
        out
    }

    /// Builds from bit vectors with phase zero.
    pub fn from_bits(x: BitVec, z: BitVec) -> Self {
        assert_eq!(x.len(), z.len(), "x/z length mismatch");
        Self { n: x.len(), x, z, phase: 0 }
    }

    /// Inverse of [`PauliString::symplectic`].
    pub fn from_symplectic(v: &BitVec) -> Self {
        let n = v.len() / 2;
        Self::from_bits(v.slice(0, n), v.slice(n, 2 * n))
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn x_bits(&self) -> &BitVec {
        &self.x
    }

    pub fn z_bits(&self) -> &BitVec {
        &self.z
    }

    pub fn phase(&self) -> Phase {
        Phase(self.phase)
    }

    pub fn set_phase(&mut self, p: Phase) {
        self.phase = p.0;
    }

    pub fn with_phase(mut self, p: Phase) -> Self {
        self.phase = p.0;
        self
    }

    pub fn mul_phase(&mut self, p: Phase) {
        self.phase = (self.phase + p.0) % 4;
    }

    /// Sign as ±1 when the phase is real.
    pub fn sign(&self) -> Option<i8> {
        match self.phase {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    #[inline]
    pub fn get(&self, q: usize) -> Pauli {
        Pauli::from_bits(self.x.get(q), self.z.get(q))
    }

    #[inline]
    pub fn set(&mut self, q: usize, p: Pauli) {
        let (x, z) = p.bits();
        self.x.set(q, x);
        self.z.set(q, z);
    }

    pub fn weight(&self) -> usize {
        let mut support = self.x.clone();
        support.or_assign(&self.z);
        support.weight()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&q| self.get(q) != Pauli::I).collect()
    }

    /// True when the operator is `i^k · I`.
    pub fn is_scalar(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    /// `(x | z)` encoding with the phase dropped.
    pub fn symplectic(&self) -> BitVec {
        self.x.concat(&self.z)
    }

    pub fn commutes(&self, other: &PauliString) -> bool {
        assert_eq!(self.n, other.n, "size mismatch");
        self.x.dot(&other.z) == self.z.dot(&other.x)
    }

    fn y_count(&self) -> usize {
        self.x
            .words()
            .iter()
            .zip(self.z.words())
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// Product `self · other` with exact phase.
    pub fn try_mul(&self, other: &PauliString) -> Result<PauliString, PauliError> {
        if self.n != other.n {
            return Err(PauliError::SizeMismatch(self.n, other.n));
        }
        let mut out = self.clone();
        out.mul_assign_right(other);
        Ok(out)
    }

    /// `self ← self · other`.
    pub fn mul_assign_right(&mut self, other: &PauliString) {
        assert_eq!(self.n, other.n, "size mismatch");
        // i^a σ_a · i^b σ_b written in X^x Z^z form, where each Y contributes one factor of i.
        let cross: usize = self
            .z
            .words()
            .iter()
            .zip(other.x.words())
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum();
        let before = self.phase as usize + other.phase as usize + self.y_count() + other.y_count() + 2 * cross;
        self.x.xor_assign(&other.x);
        self.z.xor_assign(&other.z);
        let after = self.y_count();
        self.phase = ((before + 4 - after % 4) % 4) as u8;
    }

    /// `self ← other · self`.
    pub fn mul_assign_left(&mut self, other: &PauliString) {
        let mut out = other.clone();
        out.mul_assign_right(self);
        *self = out;
    }

    pub fn to_literal(&self) -> String {
        let mut s = String::from(["+", "+i", "-", "-i"][self.phase as usize]);
        for q in 0..self.n {
            s.push(self.get(q).to_char());
        }
        s
    }

    /// Parses an optional sign (`+`, `-`, `+i`, `-i`, `i`) followed by `IXYZ` characters.
    pub fn from_literal(lit: &str) -> Result<PauliString, PauliError> {
        let bad = || PauliError::BadLiteral(lit.to_string());
        let (phase, body) = if let Some(rest) = lit.strip_prefix("+i") {
            (1, rest)
        } else if let Some(rest) = lit.strip_prefix("-i") {
            (3, rest)
        } else if let Some(rest) = lit.strip_prefix('i') {
            (1, rest)
        } else if let Some(rest) = lit.strip_prefix('+') {
            (0, rest)
        } else if let Some(rest) = lit.strip_prefix('-') {
            (2, rest)
        } else {
            (0, lit)
        };
        if body.is_empty() {
            return Err(bad());
        }
        let paulis = body.chars().map(Pauli::from_char).collect::<Option<Vec<_>>>().ok_or_else(bad)?;
        Ok(PauliString::from_paulis(&paulis).with_phase(Phase(phase)))
    }

    /// Embeds into a larger register, mapping qubit `q` to `q` (extra qubits get identity).
    pub fn extended(&self, n: usize) -> PauliString {
        assert!(n >= self.n);
        let mut out = PauliString::identity(n).with_phase(self.phase());
        for q in 0..self.n {
            out.set(q, self.get(q));
        }
        out
    }

    /// Restriction to the first `n` qubits (phase kept).
    pub fn truncated(&self, n: usize) -> PauliString {
        let mut out = PauliString::identity(n).with_phase(self.phase());
        for q in 0..n {
            out.set(q, self.get(q));
        }
        out
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_literal())
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_literal())
    }
}

impl FromStr for PauliString {
    type Err = PauliError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PauliString::from_literal(s)
    }
}

impl std::ops::Mul for &PauliString {
    type Output = PauliString;
    fn mul(self, rhs: &PauliString) -> PauliString {
        let mut out = self.clone();
        out.mul_assign_right(rhs);
        out
    }
}
