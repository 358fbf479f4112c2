
use super::matrix::{
    basis_ket, c64, hermitian_eigen, is_hermitian, outer, tensor_product, ComplexMatrix, ComplexVector, C64,
    DEFAULT_TOL, ZERO,
};
use crate::error::{QptError, Result};

/// A trace-one positive semidefinite operator on `2^k` dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
}

impl DensityOperator {
    /// Validates Hermiticity, unit trace and positivity at `DEFAULT_TOL`.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tol(matrix, DEFAULT_TOL)
    }

    pub fn with_tol(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        let dim = matrix.nrows();
        if !matrix.is_square() || dim == 0 || !dim.is_power_of_two() {
            return Err(QptError::Size(format!(
                "density operator must be square with power-of-two dimension, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if !is_hermitian(&matrix, tol) {
            return Err(QptError::Validity("density operator is not Hermitian".into()));
        }
        let tr = matrix.trace();
        if (tr - c64(1.0, 0.0)).norm() > tol {
            return Err(QptError::Validity(format!("density operator has trace {tr}")));
        }
        let min = hermitian_eigen(&matrix).values[0];
        if min < -tol {
            return Err(QptError::Validity(format!("density operator has negative eigenvalue {min:e}")));
        }
        Ok(DensityOperator { matrix })
    }

    /// Wraps a matrix already known to be a state (internal use after
    /// trace-preserving operations).
    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        DensityOperator { matrix }
    }

    /// `|ψ⟩⟨ψ|` for a normalized ket.
    pub fn pure(psi: &ComplexVector) -> Result<Self> {
        let norm = psi.norm();
        if (norm - 1.0).abs() > DEFAULT_TOL {
            return Err(QptError::Validity(format!("ket has norm {norm}")));
        }
        Self::new(outer(psi))
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        Self::new(ComplexMatrix::identity(dim, dim).scale(1.0 / dim as f64))
    }

    /// Computational basis state `|index⟩⟨index|`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        Self::pure(&basis_ket(dim, index))
    }

    /// `|Φ+⟩ = Σ_i |i⟩⊗|i⟩/√d` on `n` system qubits plus `n` ancilla qubits.
    pub fn phi_plus(n: usize) -> Self {
        Self::from_trusted(outer(&phi_plus_ket(n)))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn num_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn tensor(&self, other: &DensityOperator) -> Result<DensityOperator> {
        Ok(Self::from_trusted(tensor_product(&self.matrix, &other.matrix)?))
    }

    /// `⟨O⟩ = Tr(ρ O)`.
    pub fn expectation(&self, op: &ComplexMatrix) -> C64 {
        super::matrix::trace_product(&self.matrix, op)
    }
}

/// The ket `Σ_i |i⟩|i⟩/√d`, `d = 2^n`, system qubits first.
pub fn phi_plus_ket(n: usize) -> ComplexVector {
    let d = 1usize << n;
    let mut v = ComplexVector::from_element(d * d, ZERO);
    let amp = c64(1.0 / (d as f64).sqrt(), 0.0);
    for i in 0..d {
        v[i * d + i] = amp;
    }
    v
}


/// Random mixed state from the Ginibre ensemble (`G G† / Tr`).
pub fn random_density_operator<R: rand::Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityOperator {
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| {
        c64(rng.sample(rand_distr::StandardNormal), rng.sample(rand_distr::StandardNormal))
    });
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityOperator::from_trusted(m.scale(1.0 / tr))
}
