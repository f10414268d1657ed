//! Bit-packed Pauli strings and their exact product algebra.
//!
//! A string on `n` qubits is stored as two masks packed 64 qubits per word.
//! Qubit `q` carries
//!
//! ```text
//!   (x, z) = (0,0) -> I   (1,0) -> X   (1,1) -> Y   (0,1) -> Z
//! ```
//!
//! and the leftmost letter of the text form is qubit 0, which is also the most
//! significant tensor factor of the dense matrix.
//!
//! Products carry a quarter phase `i^k`. Writing a Hermitian string as
//! `P = i^{|x&z|} X^x Z^z`, the product of two Hermitian strings is
//!
//! ```text
//!   P1 P2 = i^{|y1| + |y2| - |y3| + 2|z1 & x2|} P3,   P3 = (x1^x2, z1^z2)
//! ```
//!
//! where `|y|` counts the Y letters of a string.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

const WORD: usize = 64;

fn words_for(num_qubits: usize) -> usize {
    num_qubits.div_ceil(WORD)
}

/// A single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Letter::I),
            'X' => Some(Letter::X),
            'Y' => Some(Letter::Y),
            'Z' => Some(Letter::Z),
            _ => None,
        }
    }

    /// Base-4 digit used by [`PauliString::from_index`]: I=0, X=1, Y=2, Z=3.
    fn from_digit(d: u64) -> Self {
        match d & 3 {
            0 => Letter::I,
            1 => Letter::X,
            2 => Letter::Y,
            _ => Letter::Z,
        }
    }
}

/// Tensor product of single-qubit Paulis, without phase.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    num_qubits: usize,
    x: Vec<u64>,
    z: Vec<u64>,
}

impl PauliString {
    /// All-identity string. Panics if `num_qubits == 0`.
    pub fn identity(num_qubits: usize) -> Self {
        assert!(num_qubits > 0, "a Pauli string needs at least one qubit");
        let words = words_for(num_qubits);
        PauliString {
            num_qubits,
            x: vec![0; words],
            z: vec![0; words],
        }
    }

    pub fn from_letters(letters: &[Letter]) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::EmptyPauli);
        }
        let mut p = PauliString::identity(letters.len());
        for (q, &l) in letters.iter().enumerate() {
            p.set(q, l);
        }
        Ok(p)
    }

    /// Decodes `index` in base 4, qubit 0 being the most significant digit.
    /// Index 0 is the identity; `1..4^n` enumerates the non-identity strings.
    pub fn from_index(num_qubits: usize, index: u64) -> Self {
        let mut p = PauliString::identity(num_qubits);
        let mut rest = index;
        for q in (0..num_qubits).rev() {
            p.set(q, Letter::from_digit(rest));
            rest >>= 2;
        }
        p
    }

    /// A single letter on qubit `qubit`, identity elsewhere.
    pub fn single(num_qubits: usize, qubit: usize, letter: Letter) -> Self {
        let mut p = PauliString::identity(num_qubits);
        p.set(qubit, letter);
        p
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    pub fn letter(&self, qubit: usize) -> Letter {
        assert!(qubit < self.num_qubits, "qubit {qubit} out of range");
        let (w, b) = (qubit / WORD, qubit % WORD);
        Letter::from_bits((self.x[w] >> b) & 1 == 1, (self.z[w] >> b) & 1 == 1)
    }

    pub fn set(&mut self, qubit: usize, letter: Letter) {
        assert!(qubit < self.num_qubits, "qubit {qubit} out of range");
        let (w, b) = (qubit / WORD, qubit % WORD);
        let (x, z) = letter.bits();
        self.x[w] = (self.x[w] & !(1 << b)) | ((x as u64) << b);
        self.z[w] = (self.z[w] & !(1 << b)) | ((z as u64) << b);
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.num_qubits).map(move |q| self.letter(q))
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    /// Qubits carrying a non-identity letter, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.num_qubits)
            .filter(|&q| self.letter(q) != Letter::I)
            .collect()
    }

    fn y_count(&self) -> u32 {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x & z).count_ones())
            .sum()
    }

    fn check_same_size(&self, other: &PauliString) -> Result<()> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::QubitMismatch {
                left: self.num_qubits,
                right: other.num_qubits,
            });
        }
        Ok(())
    }

    /// Exact matrix product `self · other`.
    pub fn mul(&self, other: &PauliString) -> Result<PhasedPauli> {
        let mut out = PhasedPauli::from(self.clone());
        out.mul_assign_right(other)?;
        Ok(out)
    }

    /// True iff the two strings commute as matrices.
    pub fn commutes(&self, other: &PauliString) -> Result<bool> {
        self.check_same_size(other)?;
        let parity: u32 = self
            .x
            .iter()
            .zip(&self.z)
            .zip(other.x.iter().zip(&other.z))
            .map(|((x1, z1), (x2, z2))| ((x1 & z2) ^ (z1 & x2)).count_ones())
            .sum();
        Ok(parity % 2 == 0)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in self.letters() {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .enumerate()
            .map(|(position, c)| {
                Letter::from_char(c).ok_or(Error::IllegalLetter {
                    letter: c,
                    position,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        PauliString::from_letters(&letters)
    }
}

impl Serialize for PauliString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A Pauli string with a global phase `i^phase`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PhasedPauli {
    phase: u8,
    pauli: PauliString,
}

impl PhasedPauli {
    pub fn new(phase: u8, pauli: PauliString) -> Self {
        PhasedPauli {
            phase: phase & 3,
            pauli,
        }
    }

    pub fn identity(num_qubits: usize) -> Self {
        PhasedPauli::from(PauliString::identity(num_qubits))
    }

    /// Exponent `k` of the phase `i^k`, in `0..4`.
    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn pauli(&self) -> &PauliString {
        &self.pauli
    }

    pub fn phase_value(&self) -> Complex64 {
        match self.phase {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    /// Hermitian iff the phase is real.
    pub fn is_hermitian(&self) -> bool {
        self.phase % 2 == 0
    }

    pub fn negate(&mut self) {
        self.phase = (self.phase + 2) & 3;
    }

    /// In-place right multiplication `self <- self · rhs`.
    pub fn mul_assign_right(&mut self, rhs: &PauliString) -> Result<()> {
        self.pauli.check_same_size(rhs)?;
        let y_lhs = self.pauli.y_count();
        let y_rhs = rhs.y_count();
        let mut anti = 0u32;
        for (w, (x2, z2)) in rhs.x.iter().zip(&rhs.z).enumerate() {
            anti += (self.pauli.z[w] & x2).count_ones();
            self.pauli.x[w] ^= x2;
            self.pauli.z[w] ^= z2;
        }
        let y_out = self.pauli.y_count();
        let k = (self.phase as u32)
            .wrapping_add(y_lhs)
            .wrapping_add(y_rhs)
            .wrapping_sub(y_out)
            .wrapping_add(2 * anti);
        self.phase = (k & 3) as u8;
        Ok(())
    }

    pub fn mul(&self, rhs: &PhasedPauli) -> Result<PhasedPauli> {
        let mut out = self.clone();
        out.mul_assign_right(&rhs.pauli)?;
        out.phase = (out.phase + rhs.phase) & 3;
        Ok(out)
    }

    /// `tr(self) / 2^N`: the phase when the string is the identity, else 0.
    pub fn normalized_trace(&self) -> Complex64 {
        if self.pauli.is_identity() {
            self.phase_value()
        } else {
            Complex64::new(0.0, 0.0)
        }
    }
}

impl From<PauliString> for PhasedPauli {
    fn from(pauli: PauliString) -> Self {
        PhasedPauli { phase: 0, pauli }
    }
}

impl fmt::Display for PhasedPauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = ["+", "+i", "-", "-i"][self.phase as usize];
        write!(f, "{prefix}{}", self.pauli)
    }
}
