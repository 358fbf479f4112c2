//! Dense complex linear algebra, Pauli bases and density operators.
//!
//! Everything here is built on `nalgebra::DMatrix<Complex64>`. Tensor
//! products put the left operand's index in the most significant position,
//! so qubit 0 is the leftmost factor of every product state.

mod matrix;
mod pauli;
mod state;

pub use matrix::*;
pub use pauli::{pauli_basis, pauli_strings, Pauli, PauliString, MAX_PAULI_QUBITS};
pub use state::{phi_plus_ket, random_density_operator, DensityOperator};
