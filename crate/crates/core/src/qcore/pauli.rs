use std::fmt;
use std::str::FromStr;

use super::matrix::{from_rows, tensor_all, ComplexMatrix, C64, I, ONE, ZERO};
use crate::error::{QptError, Result};

/// Pauli bases are materialized densely, so keep `4^k` matrices of size
/// `2^k` within reach.
pub const MAX_PAULI_QUBITS: usize = 6;

/// Single-qubit Pauli letter. The discriminant is the canonical base-4 digit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I = 0,
    X = 1,
    Y = 2,
    Z = 3,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_digit(d: usize) -> Pauli {
        Self::ALL[d & 3]
    }

    pub fn digit(self) -> usize {
        self as usize
    }

    pub fn matrix(self) -> ComplexMatrix {
        match self {
            Pauli::I => from_rows(&[vec![ONE, ZERO], vec![ZERO, ONE]]),
            Pauli::X => from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]]),
            Pauli::Y => from_rows(&[vec![ZERO, -I], vec![I, ZERO]]),
            Pauli::Z => from_rows(&[vec![ONE, ZERO], vec![ZERO, -ONE]]),
        }
    }

    /// `self · other = phase · result`.
    pub fn times(self, other: Pauli) -> (C64, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (ONE, p),
            (a, b) if a == b => (ONE, I),
            (X, Y) => (I_PHASE, Z),
            (Y, Z) => (I_PHASE, X),
            (Z, X) => (I_PHASE, Y),
            (Y, X) => (-I_PHASE, Z),
            (Z, Y) => (-I_PHASE, X),
            (X, Z) => (-I_PHASE, Y),
            _ => unreachable!(),
        }
    }

    pub fn letter(self) -> char {
        ['I', 'X', 'Y', 'Z'][self.digit()]
    }
}

const I_PHASE: C64 = C64::new(0.0, 1.0);

/// Tensor product of single-qubit Paulis, qubit 0 first.
///
/// The canonical index reads the letters as base-4 digits with qubit 0 most
/// significant, so `XY` on two qubits is `1·4 + 2 = 6`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    letters: Vec<Pauli>,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Self {
        PauliString { letters }
    }

    pub fn identity(k: usize) -> Self {
        PauliString { letters: vec![Pauli::I; k] }
    }

    pub fn from_index(index: usize, k: usize) -> Self {
        let letters = (0..k).map(|q| Pauli::from_digit(index >> (2 * (k - 1 - q)))).collect();
        PauliString { letters }
    }

    pub fn index(&self) -> usize {
        self.letters.iter().fold(0, |acc, p| acc * 4 + p.digit())
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn num_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.iter().all(|&p| p == Pauli::I)
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> usize {
        self.letters.iter().filter(|&&p| p != Pauli::I).count()
    }

    pub fn matrix(&self) -> ComplexMatrix {
        let factors: Vec<ComplexMatrix> = self.letters.iter().map(|p| p.matrix()).collect();
        tensor_all(&factors).expect("pauli string within size limits")
    }

    /// `self · other = phase · result`, computed letter by letter.
    pub fn mul(&self, other: &PauliString) -> (C64, PauliString) {
        assert_eq!(self.num_qubits(), other.num_qubits(), "pauli strings of different length");
        let mut phase = ONE;
        let letters = self
            .letters
            .iter()
            .zip(&other.letters)
            .map(|(&a, &b)| {
                let (ph, p) = a.times(b);
                phase *= ph;
                p
            })
            .collect();
        (phase, PauliString { letters })
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let anti = self
            .letters
            .iter()
            .zip(&other.letters)
            .filter(|(&a, &b)| a != Pauli::I && b != Pauli::I && a != b)
            .count();
        anti % 2 == 0
    }

    /// Concatenation `self ⊗ other`.
    pub fn tensor(&self, other: &PauliString) -> PauliString {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        PauliString { letters }
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.letters {
            write!(f, "{}", p.letter())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = QptError;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|ch| match ch.to_ascii_uppercase() {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(QptError::Argument(format!("'{other}' is not a Pauli letter"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if letters.is_empty() {
            return Err(QptError::Argument("empty Pauli string".into()));
        }
        Ok(PauliString { letters })
    }
}

fn check_qubits(k: usize) -> Result<()> {
    if k == 0 || k > MAX_PAULI_QUBITS {
        return Err(QptError::Size(format!("Pauli basis needs 1..={MAX_PAULI_QUBITS} qubits, got {k}")));
    }
    Ok(())
}

/// All `4^k` Pauli strings on `k` qubits in canonical index order.
pub fn pauli_strings(k: usize) -> Result<Vec<PauliString>> {
    check_qubits(k)?;
    Ok((0..1usize << (2 * k)).map(|i| PauliString::from_index(i, k)).collect())
}

/// The operator basis `E_0..E_{4^k-1}`, with `Tr(E_i† E_j) = 2^k δ_ij`.
pub fn pauli_basis(k: usize) -> Result<Vec<ComplexMatrix>> {
    Ok(pauli_strings(k)?.iter().map(PauliString::matrix).collect())
}
