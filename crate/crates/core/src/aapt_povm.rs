//! Ancilla-assisted tomography with a single generalized measurement.
//!
//! A non-degenerate joint observable `Ω = Σ_a c_a E_a ⊗ E_a` on system and
//! ancilla, with `E_a = σ_a/√2`, turns one measurement of `ρ ⊗ r` into
//! `d²` outcome probabilities `p_a = Σ_mn M^a_mn ρ_nm`, which a linear
//! inversion maps back to `ρ`. Channel tomography measures two such
//! observables jointly on the Choi state, one per half.

use nalgebra::DVector;

use crate::channels::{apply_channel, choi_to_chi, ChiMatrix, QuantumChannel};
use crate::error::{QptError, Result};
use crate::measurement::{measure_setting, Mode, Observable, OutcomeHistogram};
use crate::qcore::{
    c64, condition_number, from_rows, hermitian_eigen, outer, pauli_basis, permute_qubits, tensor_all,
    tensor_product, trace_product, ComplexMatrix, DensityOperator, C64, ONE,
};

/// Eigenvalue gap below which `Ω` counts as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-8;
/// Step of the coefficient perturbation applied to a degenerate `Ω`.
pub const REPAIR_STEP: f64 = 1e-3;
/// Condition numbers of `M` above this produce a warning.
pub const ILL_CONDITIONED: f64 = 1e6;

pub const DEFAULT_COEFFS: [f64; 4] = [1.0, 2.0, 3.0, 4.0];

/// `(I + 0.5X + 0.3Y + 0.2Z)/2`: full rank with every Pauli component nonzero.
pub fn default_ancilla_state() -> DensityOperator {
    let r = from_rows(&[vec![c64(0.6, 0.0), c64(0.25, -0.15)], vec![c64(0.25, 0.15), c64(0.4, 0.0)]]);
    DensityOperator::new(r).expect("valid ancilla state")
}

/// Normalized Pauli basis `σ_a/√2` on one qubit.
fn normalized_basis() -> Vec<ComplexMatrix> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    pauli_basis(1).expect("one qubit").into_iter().map(|p| p.scale(s)).collect()
}

#[derive(Debug, Clone)]
pub struct UniversalObservable {
    pub d: usize,
    /// Coefficients actually used, after any degeneracy repair.
    pub coeffs: Vec<f64>,
    pub repaired: bool,
    pub omega: ComplexMatrix,
    pub eigenvalues: Vec<f64>,
    pub projectors: Vec<ComplexMatrix>,
    pub min_gap: f64,
    pub ancilla: DensityOperator,
    /// Row `a`, column `n·d + m`: `M^a_mn = Σ_αβ r_αβ ⟨mβ|P_a|nα⟩`.
    pub m_matrix: ComplexMatrix,
    pub condition_number: f64,
}

impl UniversalObservable {
    pub fn observable(&self) -> Observable {
        Observable::from_spectral(self.eigenvalues.clone(), self.projectors.clone()).expect("spectral data")
    }

    pub fn warning(&self) -> Option<String> {
        (self.condition_number > ILL_CONDITIONED)
            .then(|| format!("M is ill-conditioned (condition number {:e}); shot noise is amplified accordingly", self.condition_number))
    }
}

fn omega_for(coeffs: &[f64]) -> Result<ComplexMatrix> {
    let basis = normalized_basis();
    let mut omega = ComplexMatrix::zeros(4, 4);
    for (c, e) in coeffs.iter().zip(&basis) {
        omega += tensor_product(e, e)?.scale(*c);
    }
    Ok(omega)
}

fn spectrum(omega: &ComplexMatrix) -> (Vec<f64>, Vec<ComplexMatrix>, f64) {
    let eig = hermitian_eigen(omega);
    let gap = eig.values.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let projectors = (0..eig.values.len()).map(|i| outer(&eig.vector(i))).collect();
    (eig.values.clone(), projectors, gap)
}

/// `M` as the matrix of `ρ ↦ (Tr[P_a (ρ ⊗ r)])_a` on matrix units `|n⟩⟨m|`.
fn m_matrix_for(projectors: &[ComplexMatrix], r: &DensityOperator) -> Result<ComplexMatrix> {
    let d = r.dim();
    let mut m = ComplexMatrix::zeros(projectors.len(), d * d);
    for col in 0..d * d {
        let mut unit = ComplexMatrix::zeros(d, d);
        unit[(col / d, col % d)] = ONE;
        let joint = tensor_product(&unit, r.matrix())?;
        for (a, p) in projectors.iter().enumerate() {
            m[(a, col)] = trace_product(p, &joint);
        }
    }
    Ok(m)
}

pub fn build_universal_observable(coeffs: &[f64], r: &DensityOperator) -> Result<UniversalObservable> {
    if coeffs.len() != 4 {
        return Err(QptError::Size(format!("a qubit observable needs 4 coefficients, got {}", coeffs.len())));
    }
    if r.dim() != 2 {
        return Err(QptError::Size("ancilla state must be a single qubit".into()));
    }
    let r_eig = hermitian_eigen(r.matrix());
    if r_eig.values[0] < 1e-12 {
        return Err(QptError::Validity("ancilla state is rank deficient; M would not be invertible".into()));
    }
    let mut used = coeffs.to_vec();
    let mut omega = omega_for(&used)?;
    let (mut eigenvalues, mut projectors, mut gap) = spectrum(&omega);
    let mut repaired = false;
    if gap < DEGENERACY_GAP {
        used = coeffs.iter().enumerate().map(|(a, c)| c + (a + 1) as f64 * REPAIR_STEP).collect();
        omega = omega_for(&used)?;
        (eigenvalues, projectors, gap) = spectrum(&omega);
        repaired = true;
        if gap < DEGENERACY_GAP {
            return Err(QptError::Construction(format!("Ω stays degenerate after repair (gap {gap:e})")));
        }
    }
    let m_matrix = m_matrix_for(&projectors, r)?;
    let cond = condition_number(&m_matrix);
    if !cond.is_finite() || cond > 1e14 {
        return Err(QptError::Construction("M is singular for this ancilla state".into()));
    }
    Ok(UniversalObservable {
        d: 2,
        coeffs: used,
        repaired,
        omega,
        eigenvalues,
        projectors,
        min_gap: gap,
        ancilla: r.clone(),
        m_matrix,
        condition_number: cond,
    })
}

pub fn default_universal_observable() -> UniversalObservable {
    build_universal_observable(&DEFAULT_COEFFS, &default_ancilla_state()).expect("default observable is valid")
}

#[derive(Debug, Clone)]
pub struct PovmTomography {
    /// Linear-inversion estimate; Hermitian with unit trace.
    pub estimate: ComplexMatrix,
    pub probabilities: Vec<f64>,
    pub histogram: Option<OutcomeHistogram>,
}

pub fn povm_state_tomography(rho: &DensityOperator, u: &UniversalObservable, mode: Mode) -> Result<PovmTomography> {
    mode.validate()?;
    if rho.dim() != u.d {
        return Err(QptError::Size(format!("state has dimension {} but the observable expects {}", rho.dim(), u.d)));
    }
    let joint = rho.tensor(&u.ancilla)?;
    let (p, histogram) = measure_setting(&joint, &u.observable(), mode, 0, "omega")?;
    let rhs = DVector::from_iterator(p.len(), p.iter().map(|&x| c64(x, 0.0)));
    let x = u
        .m_matrix
        .clone()
        .lu()
        .solve(&rhs)
        .ok_or_else(|| QptError::Construction("M is singular".into()))?;
    let d = u.d;
    let estimate = ComplexMatrix::from_fn(d, d, |i, j| x[i * d + j]);
    Ok(PovmTomography { estimate, probabilities: p, histogram })
}

/// `F_O = Σ_a Tr(O E_a†)/Tr(r E_a) E_a ⊗ E_a`.
pub fn f_operator(o: &ComplexMatrix, r: &DensityOperator) -> Result<ComplexMatrix> {
    let basis = normalized_basis();
    let mut f = ComplexMatrix::zeros(4, 4);
    for (a, e) in basis.iter().enumerate() {
        let den = trace_product(r.matrix(), e);
        if den.norm() < 1e-12 {
            return Err(QptError::Construction(format!("Tr(r E_{a}) vanishes; F_O is undefined")));
        }
        f += tensor_product(e, e)? * (trace_product(o, &e.adjoint()) / den);
    }
    Ok(f)
}

/// `⟨O⟩_ρ` estimated as `⟨F_O(Ω)⟩` over the outcomes of `Ω` on `ρ ⊗ r`.
pub fn povm_expectation_via_f(o: &ComplexMatrix, u: &UniversalObservable, rho: &DensityOperator, mode: Mode) -> Result<f64> {
    let f = f_operator(o, &u.ancilla)?;
    let joint = rho.tensor(&u.ancilla)?;
    let (p, _) = measure_setting(&joint, &u.observable(), mode, 0, "omega")?;
    // F_O is diagonal in the eigenbasis of Ω
    let values: Vec<C64> = u.projectors.iter().map(|pa| trace_product(pa, &f)).collect();
    Ok(values.iter().zip(&p).map(|(v, pa)| v.re * pa).sum())
}

#[derive(Debug, Clone)]
pub struct PovmQptResult {
    pub chi: ChiMatrix,
    pub choi_estimate: ComplexMatrix,
    pub composite_condition_number: f64,
    pub outcomes: usize,
    pub config_count: u64,
    pub histogram: Option<OutcomeHistogram>,
}

/// Qubit order of the joint state before measurement: `[A, B1, B, B2]`.
const MEASURE_ORDER: [usize; 4] = [0, 2, 1, 3];

/// Single-setting channel tomography with ancillas B1 (paired with A) and
/// B2 (paired with B), both in the observable's ancilla state.
pub fn povm_qpt<C: QuantumChannel + ?Sized>(channel: &C, u: &UniversalObservable, mode: Mode) -> Result<PovmQptResult> {
    mode.validate()?;
    if channel.num_qubits() != 1 {
        return Err(QptError::Scope(format!(
            "generalized-measurement channel tomography covers one qubit, got {}",
            channel.num_qubits()
        )));
    }
    let mut projectors = Vec::with_capacity(16);
    for pa in &u.projectors {
        for pb in &u.projectors {
            projectors.push(tensor_product(pa, pb)?);
        }
    }
    let r = u.ancilla.matrix();
    let embed = |ab: &ComplexMatrix| -> Result<ComplexMatrix> {
        permute_qubits(&tensor_all([ab, r, r])?, &MEASURE_ORDER)
    };

    let mut map = ComplexMatrix::zeros(16, 16);
    for col in 0..16 {
        let mut unit = ComplexMatrix::zeros(4, 4);
        unit[(col / 4, col % 4)] = ONE;
        let joint = embed(&unit)?;
        for (k, p) in projectors.iter().enumerate() {
            map[(k, col)] = trace_product(p, &joint);
        }
    }
    let cond = condition_number(&map);
    if !cond.is_finite() || cond > 1e14 {
        return Err(QptError::Construction("composite measurement map is singular".into()));
    }

    let out = apply_channel(channel, &DensityOperator::phi_plus(1), 2)?;
    let joint = DensityOperator::new(embed(out.matrix())?)?;
    let labels: Vec<f64> = (0..16).map(|k| k as f64).collect();
    let obs = Observable::from_spectral(labels, projectors)?;
    let (p, histogram) = measure_setting(&joint, &obs, mode, 0, "omega_pair")?;
    let rhs = DVector::from_iterator(16, p.iter().map(|&x| c64(x, 0.0)));
    let x = map.lu().solve(&rhs).ok_or_else(|| QptError::Construction("composite map is singular".into()))?;
    let choi = ComplexMatrix::from_fn(4, 4, |i, j| x[i * 4 + j]);
    Ok(PovmQptResult {
        chi: choi_to_chi(&choi, 1)?,
        choi_estimate: choi,
        composite_condition_number: cond,
        outcomes: 16,
        config_count: 1,
        histogram,
    })
}
