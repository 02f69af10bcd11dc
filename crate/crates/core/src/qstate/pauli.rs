//! Pauli strings and qubit subsets.
//!
//! A Pauli string is stored as a packed base-4 code (two bits per letter),
//! which keeps it `Copy`, hashable, and directly usable as a dense index
//! into per-Pauli accumulator arrays. Qubit 0 is the leftmost letter and
//! occupies the most significant digit pair.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::MAX_QUBITS;

/// One tensor factor of a Pauli string.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PauliLetter {
    I = 0,
    X = 1,
    Y = 2,
    Z = 3,
}

impl PauliLetter {
    pub fn from_char(ch: char) -> Result<Self> {
        match ch {
            'I' => Ok(Self::I),
            'X' => Ok(Self::X),
            'Y' => Ok(Self::Y),
            'Z' => Ok(Self::Z),
            other => Err(Error::Parse(format!("invalid Pauli letter '{other}'"))),
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Self::I => 'I',
            Self::X => 'X',
            Self::Y => 'Y',
            Self::Z => 'Z',
        }
    }

    fn from_digit(d: u32) -> Self {
        match d {
            0 => Self::I,
            1 => Self::X,
            2 => Self::Y,
            3 => Self::Z,
            _ => unreachable!("digit masked to two bits"),
        }
    }
}

/// An `n`-letter Pauli string over `{I, X, Y, Z}`.
///
/// Ordered lexicographically with `I < X < Y < Z`, which coincides with
/// numeric order of the packed code.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n: u8,
    code: u32,
}

impl PauliString {
    /// Builds a string from its letters (leftmost letter = qubit 0).
    pub fn from_letters(letters: &[PauliLetter]) -> Result<Self> {
        let n = letters.len();
        if n == 0 {
            return Err(Error::EmptyInput("pauli string"));
        }
        if n > MAX_QUBITS {
            return Err(Error::TooManyQubits { n, max: MAX_QUBITS });
        }
        let mut code = 0u32;
        for &letter in letters {
            code = (code << 2) | letter as u32;
        }
        Ok(Self { n: n as u8, code })
    }

    /// Builds a string from its packed base-4 code. Codes enumerate all
    /// `4^n` strings in lexicographic order.
    pub fn from_code(n: usize, code: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyInput("pauli string"));
        }
        if n > MAX_QUBITS {
            return Err(Error::TooManyQubits { n, max: MAX_QUBITS });
        }
        if u64::from(code) >= 1u64 << (2 * n) {
            return Err(Error::Parse(format!(
                "pauli code {code} out of range for {n} qubits"
            )));
        }
        Ok(Self { n: n as u8, code })
    }

    /// The all-identity string on `n` qubits.
    pub fn identity(n: usize) -> Result<Self> {
        Self::from_code(n, 0)
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn code(&self) -> u32 {
        self.code
    }

    /// Letter at qubit `index` (0 = leftmost).
    pub fn letter(&self, index: usize) -> PauliLetter {
        debug_assert!(index < self.n());
        let shift = 2 * (self.n() - 1 - index);
        PauliLetter::from_digit((self.code >> shift) & 3)
    }

    pub fn letters(&self) -> Vec<PauliLetter> {
        (0..self.n()).map(|i| self.letter(i)).collect()
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> usize {
        (0..self.n())
            .filter(|&i| self.letter(i) != PauliLetter::I)
            .count()
    }

    /// Indices of the non-identity letters, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n())
            .filter(|&i| self.letter(i) != PauliLetter::I)
            .collect()
    }

    /// Applies the string to computational basis state `|j>`; returns the
    /// target index and phase: `P |j> = phase |target>`.
    ///
    /// Single-letter actions: `I|b> = |b>`, `X|b> = |1-b>`,
    /// `Z|b> = (-1)^b |b>`, and `Y|0> = -i|1>`, `Y|1> = i|0>` (so that
    /// `Y = [[0, i], [-i, 0]]`).
    pub fn apply_to_basis(&self, j: u32) -> (u32, Complex64) {
        let n = self.n();
        debug_assert!(u64::from(j) < 1u64 << n);
        let mut target = j;
        let mut phase = Complex64::new(1.0, 0.0);
        for q in 0..n {
            let bit_pos = n - 1 - q;
            let bit = (j >> bit_pos) & 1;
            match self.letter(q) {
                PauliLetter::I => {}
                PauliLetter::X => target ^= 1 << bit_pos,
                PauliLetter::Y => {
                    target ^= 1 << bit_pos;
                    phase *= if bit == 0 {
                        Complex64::new(0.0, -1.0)
                    } else {
                        Complex64::new(0.0, 1.0)
                    };
                }
                PauliLetter::Z => {
                    if bit == 1 {
                        phase = -phase;
                    }
                }
            }
        }
        (target, phase)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n() {
            write!(f, "{}", self.letter(i).to_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters: Vec<PauliLetter> = s.chars().map(PauliLetter::from_char).collect::<Result<_>>()?;
        Self::from_letters(&letters)
    }
}

/// A non-empty, strictly increasing list of qubit indices.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset {
    indices: Vec<usize>,
}

impl Subset {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidSubset("subset is empty".into()));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSubset(format!(
                "indices {indices:?} are not strictly increasing"
            )));
        }
        Ok(Self { indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn size(&self) -> usize {
        self.indices.len()
    }

    /// Checks every index is `< n`.
    pub fn validate_for(&self, n: usize) -> Result<()> {
        if let Some(&max) = self.indices.last() {
            if max >= n {
                return Err(Error::InvalidSubset(format!(
                    "index {max} out of range for {n} qubits"
                )));
            }
        }
        Ok(())
    }

    /// All size-`k` subsets of `{0, .., n-1}` in lexicographic order.
    pub fn all_subsets(n: usize, k: usize) -> Result<Vec<Subset>> {
        if k == 0 || k > n {
            return Err(Error::InvalidSubset(format!(
                "subset size {k} out of range for {n} qubits"
            )));
        }
        let mut out = Vec::new();
        let mut current: Vec<usize> = (0..k).collect();
        loop {
            out.push(Subset {
                indices: current.clone(),
            });
            // Advance the rightmost index that can still move.
            let mut i = k;
            loop {
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
                if current[i] < n - (k - i) {
                    current[i] += 1;
                    for j in i + 1..k {
                        current[j] = current[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, q) in self.indices.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{q}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Subset {
    type Err = Error;

    /// Parses `"0,2,5"` (optionally wrapped in braces).
    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim().trim_start_matches('{').trim_end_matches('}');
        if trimmed.is_empty() {
            return Err(Error::InvalidSubset("subset is empty".into()));
        }
        let indices = trimmed
            .split(',')
            .map(|part| {
                part.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidSubset(format!("bad index '{part}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(indices)
    }
}
