//! Ancilla-assisted tomography with joint separable measurements.
//!
//! One faithful joint input `ρ_AB` on system plus ancilla is sent through
//! `E ⊗ I` and the output is characterized by all `16^n` products
//! `E_k^A ⊗ E_j^B`. Writing `ρ_AB = Σ ρ_ij E_i ⊗ E_j` with
//! `ρ_ij = Tr(ρ (E_i ⊗ E_j)†)/4^n`, the output coefficients satisfy
//! `α̃ = χ̃ ϱ`, and `χ̃_ki = Σ_mn χ_mn Tr(E_k† E_m E_i E_n†)/d`.

use serde::{Deserialize, Serialize};

use crate::channels::{apply_channel, ChiMatrix, QuantumChannel};
use crate::error::{QptError, Result};
use crate::measurement::{pauli_expectation, Mode};
use crate::qcore::{
    c64, condition_number, hermitian_eigen, outer, permute_qubits, pseudo_inverse, singular_values, tensor_all,
    trace_product, ComplexMatrix, ComplexVector, DensityOperator, PauliString, C64, ZERO,
};

/// Smallest singular value of `ϱ` accepted as invertible.
pub const FAITHFUL_TOL: f64 = 1e-10;
/// Largest register the inversion is run on; `A` is `16^n × 16^n`.
pub const MAX_JSM_QUBITS: usize = 2;

/// Named joint input families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "epsilon")]
pub enum JsmInputKind {
    /// `|Φ+⟩` on every system/ancilla pair.
    Bell,
    /// `(1−ε) I/4 + ε |Ψ−⟩⟨Ψ−|` on every pair.
    Werner(f64),
}

impl std::fmt::Display for JsmInputKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            JsmInputKind::Bell => write!(f, "bell"),
            JsmInputKind::Werner(e) => write!(f, "werner({e})"),
        }
    }
}

impl std::str::FromStr for JsmInputKind {
    type Err = QptError;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        if t == "bell" {
            return Ok(JsmInputKind::Bell);
        }
        if let Some(inner) = t.strip_prefix("werner(").and_then(|r| r.strip_suffix(')')) {
            let e: f64 = inner.trim().parse().map_err(|_| QptError::Argument(format!("bad Werner parameter in {s:?}")))?;
            if !(0.0..=1.0).contains(&e) {
                return Err(QptError::Argument(format!("Werner parameter {e} outside [0, 1]")));
            }
            return Ok(JsmInputKind::Werner(e));
        }
        Err(QptError::Argument(format!("unknown input {s:?}; expected bell or werner(ε)")))
    }
}

/// Two-qubit Werner state built on the singlet.
pub fn werner_pair(epsilon: f64) -> DensityOperator {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let singlet = ComplexVector::from_row_slice(&[ZERO, c64(h, 0.0), c64(-h, 0.0), ZERO]);
    let m = ComplexMatrix::identity(4, 4).scale((1.0 - epsilon) / 4.0) + outer(&singlet).scale(epsilon);
    DensityOperator::new(m).expect("Werner state is valid")
}

/// Joint input on `n` system qubits followed by `n` ancilla qubits.
pub fn jsm_input(kind: JsmInputKind, n: usize) -> Result<DensityOperator> {
    match kind {
        JsmInputKind::Bell => Ok(DensityOperator::phi_plus(n)),
        JsmInputKind::Werner(e) => {
            let pair = werner_pair(e).into_matrix();
            let pairs = vec![pair; n];
            let joint = tensor_all(&pairs)?;
            let perm: Vec<usize> = (0..n).map(|i| 2 * i).chain((0..n).map(|i| 2 * i + 1)).collect();
            DensityOperator::new(permute_qubits(&joint, &perm)?)
        }
    }
}

/// Faithfulness report for a joint input.
#[derive(Debug, Clone)]
pub struct FaithfulInput {
    pub n: usize,
    pub rho: DensityOperator,
    /// `ϱ_ij = Tr(ρ (E_i ⊗ E_j)†)/4^n`.
    pub coeff_matrix: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub schmidt_number: usize,
    pub purity: f64,
    pub faithful: bool,
}

fn joint_pauli(n: usize, i: usize, j: usize) -> PauliString {
    PauliString::from_index(i, n).tensor(&PauliString::from_index(j, n))
}

pub fn faithfulness_check(rho: &DensityOperator, n: usize) -> Result<FaithfulInput> {
    if n == 0 || rho.dim() != 1 << (2 * n) {
        return Err(QptError::Size(format!("joint input for n={n} must be {0}x{0}", 1usize << (2 * n))));
    }
    let size = 1usize << (2 * n);
    let norm = size as f64;
    let mut coeff = ComplexMatrix::zeros(size, size);
    for i in 0..size {
        for j in 0..size {
            // Pauli strings are Hermitian
            coeff[(i, j)] = trace_product(rho.matrix(), &joint_pauli(n, i, j).matrix()) / c64(norm, 0.0);
        }
    }
    let sv = singular_values(&coeff);
    let schmidt_number = sv.iter().filter(|&&s| s > FAITHFUL_TOL).count();
    let faithful = sv.last().is_some_and(|&s| s > FAITHFUL_TOL);
    Ok(FaithfulInput {
        n,
        rho: rho.clone(),
        coeff_matrix: coeff,
        singular_values: sv,
        schmidt_number,
        purity: rho.purity(),
        faithful,
    })
}

/// Rebuilds `Σ ϱ_ij E_i ⊗ E_j`.
pub fn expand_coefficients(coeff: &ComplexMatrix, n: usize) -> ComplexMatrix {
    let size = coeff.nrows();
    let mut out = ComplexMatrix::zeros(size, size);
    for i in 0..size {
        for j in 0..size {
            if coeff[(i, j)] != ZERO {
                out += joint_pauli(n, i, j).matrix() * coeff[(i, j)];
            }
        }
    }
    out
}

/// Measured output coefficients and the structure constants of the inversion.
#[derive(Debug, Clone)]
pub struct AlphaTensor {
    pub n: usize,
    /// `α̃_kj = Tr(ρ' (E_k ⊗ E_j)†)/4^n`.
    pub entries: ComplexMatrix,
    pub config_count: u64,
    pub total_shots: u64,
}

/// Structure constant `α_k^{m,i,n}`: `E_m E_i E_n† = Σ_k α_k^{m,i,n} E_k`
/// has a single nonzero term, returned as `(k, coefficient)`.
pub fn alpha_structure(n: usize, m: usize, i: usize, nn: usize) -> (usize, C64) {
    let em = PauliString::from_index(m, n);
    let ei = PauliString::from_index(i, n);
    let en = PauliString::from_index(nn, n);
    let (p1, mi) = em.mul(&ei);
    let (p2, k) = mi.mul(&en);
    (k.index(), p1 * p2)
}

pub fn jsm_measure<C: QuantumChannel + ?Sized>(input: &FaithfulInput, channel: &C, mode: Mode) -> Result<AlphaTensor> {
    mode.validate()?;
    let n = input.n;
    if channel.num_qubits() != n {
        return Err(QptError::Size(format!("channel acts on {} qubits, input prepared for {n}", channel.num_qubits())));
    }
    let out = apply_channel(channel, &input.rho, 1 << n)?;
    let size = 1usize << (2 * n);
    let mut entries = ComplexMatrix::zeros(size, size);
    for k in 0..size {
        for j in 0..size {
            let p = joint_pauli(n, k, j);
            let setting = (k * size + j) as u64;
            entries[(k, j)] = c64(pauli_expectation(&out, &p, mode, setting)? / size as f64, 0.0);
        }
    }
    let config_count = (size * size) as u64;
    Ok(AlphaTensor { n, entries, config_count, total_shots: mode.shots().map_or(0, |s| s * config_count) })
}

/// The matrix `A` with `χ̃_{(k,i)} = Σ_{(m,n)} A_{(k,i),(m,n)} χ_mn`.
pub fn a_matrix(n: usize) -> Result<ComplexMatrix> {
    if n == 0 || n > MAX_JSM_QUBITS {
        return Err(QptError::Scope(format!("joint-measurement inversion is limited to n <= {MAX_JSM_QUBITS}")));
    }
    let size = 1usize << (2 * n);
    let mut a = ComplexMatrix::zeros(size * size, size * size);
    for m in 0..size {
        for i in 0..size {
            for nn in 0..size {
                let (k, c) = alpha_structure(n, m, i, nn);
                a[(k * size + i, m * size + nn)] += c;
            }
        }
    }
    Ok(a)
}

#[derive(Debug, Clone)]
pub struct JsmResult {
    pub chi: ChiMatrix,
    pub chi_tilde: ComplexMatrix,
    /// `‖Aχ − χ̃‖`.
    pub residual: f64,
    pub input_condition_number: f64,
}

pub fn jsm_reconstruct(alpha: &AlphaTensor, input: &FaithfulInput) -> Result<JsmResult> {
    if alpha.n != input.n {
        return Err(QptError::Size("α̃ and input disagree on n".into()));
    }
    if !input.faithful {
        return Err(QptError::Faithfulness(format!(
            "input coefficient matrix is singular (Schmidt number {} < {}); the input is not faithful",
            input.schmidt_number,
            input.coeff_matrix.nrows()
        )));
    }
    let n = input.n;
    let size = 1usize << (2 * n);
    let a = a_matrix(n)?;
    let rho_inv = input
        .coeff_matrix
        .clone()
        .try_inverse()
        .ok_or_else(|| QptError::Faithfulness("input coefficient matrix is not invertible".into()))?;
    let chi_tilde = &alpha.entries * rho_inv;
    let rhs = ComplexVector::from_fn(size * size, |r, _| chi_tilde[(r / size, r % size)]);
    let sv = singular_values(&a);
    let pinv = pseudo_inverse(&a, 1e-10 * sv[0]);
    let x = &pinv * &rhs;
    let residual = (&a * &x - &rhs).norm();
    let chi = ComplexMatrix::from_fn(size, size, |m, k| x[m * size + k]);
    Ok(JsmResult {
        chi: ChiMatrix::new(n, chi)?,
        chi_tilde,
        residual,
        input_condition_number: condition_number(&input.coeff_matrix),
    })
}

/// Input check, measurement and inversion in one call.
pub fn jsm_run<C: QuantumChannel + ?Sized>(channel: &C, kind: JsmInputKind, mode: Mode) -> Result<JsmResult> {
    let n = channel.num_qubits();
    if n > MAX_JSM_QUBITS {
        return Err(QptError::Scope(format!("joint-measurement inversion is limited to n <= {MAX_JSM_QUBITS}")));
    }
    let input = faithfulness_check(&jsm_input(kind, n)?, n)?;
    let alpha = jsm_measure(&input, channel, mode)?;
    jsm_reconstruct(&alpha, &input)
}

/// The joint operator whose coefficient matrix is `ϱ = I/4^n`; it is not
/// positive, so no physical input makes the inversion trivial.
pub fn identity_coefficient_operator(n: usize) -> ComplexMatrix {
    let size = 1usize << (2 * n);
    expand_coefficients(&ComplexMatrix::identity(size, size).scale(1.0 / size as f64), n)
}

/// Smallest eigenvalue of [`identity_coefficient_operator`].
pub fn identity_coefficient_min_eigenvalue(n: usize) -> f64 {
    hermitian_eigen(&identity_coefficient_operator(n)).values[0]
}
