//! Standard process tomography.
//!
//! The channel is fed the `4^n` product preparations built from
//! `{|0⟩, |1⟩, |+⟩, |−i⟩}` on every qubit and each output is measured in all
//! `4^n` Pauli strings. Matrix-unit inputs `|a⟩⟨b|` are recovered from the
//! physical preparations by linearity:
//!
//! ```text
//! |0⟩⟨1| = |+⟩⟨+| + i|−i⟩⟨−i| − (1+i)/2 (|0⟩⟨0| + |1⟩⟨1|)
//! ```
//!
//! with `|+⟩ = (|0⟩+|1⟩)/√2` and `|−i⟩ = (|0⟩+i|1⟩)/√2`, and χ solves
//! `B χ = λ` where `E_m ρ_k E_n† = Σ_l B_{mn,lk} ρ_l`.

use nalgebra::DVector;

use crate::channels::{apply_channel, ChiMatrix, QuantumChannel};
use crate::error::{QptError, Result};
use crate::measurement::{pauli_expectation, Mode};
use crate::qcore::{
    c64, condition_number, hermitian_eigen, pauli_basis, pauli_strings, pseudo_inverse, singular_values,
    tensor_all, ComplexMatrix, ComplexVector, DensityOperator, PauliString, C64, ONE, ZERO,
};

/// Largest register accepted by [`sqpt_inputs`].
pub const MAX_PLAN_QUBITS: usize = 3;
/// Largest register accepted by [`sqpt_reconstruct`]; `B` is `16^n × 16^n`.
pub const MAX_RECONSTRUCT_QUBITS: usize = 2;
/// Relative singular-value cutoff for the pseudoinverse of `B`.
pub const PINV_CUTOFF: f64 = 1e-10;

const SINGLE_LABELS: [&str; 4] = ["0", "1", "+", "-i"];

fn single_qubit_state(i: usize) -> ComplexVector {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let v = match i {
        0 => [ONE, ZERO],
        1 => [ZERO, ONE],
        2 => [c64(h, 0.0), c64(h, 0.0)],
        _ => [c64(h, 0.0), c64(0.0, h)],
    };
    DVector::from_row_slice(&v)
}

/// Coefficients of the single-qubit unit `|a⟩⟨b|` (index `2a + b`) over the
/// four physical preparations.
fn single_unit_coefficients(unit: usize) -> [C64; 4] {
    let half_1pi = c64(0.5, 0.5);
    let half_1mi = c64(0.5, -0.5);
    match unit {
        0 => [ONE, ZERO, ZERO, ZERO],
        1 => [-half_1pi, -half_1pi, ONE, c64(0.0, 1.0)],
        2 => [-half_1mi, -half_1mi, ONE, c64(0.0, -1.0)],
        _ => [ZERO, ONE, ZERO, ZERO],
    }
}

/// Inputs and observables of a standard tomography run.
#[derive(Debug, Clone)]
pub struct SqptPlan {
    pub n: usize,
    /// Physical preparations, index `s = Σ s_q 4^{n−1−q}`.
    pub inputs: Vec<DensityOperator>,
    pub input_labels: Vec<String>,
    pub observables: Vec<PauliString>,
    /// Row `l = a·2^n + b` expresses `|a⟩⟨b|` over the physical inputs.
    pub unit_coefficients: ComplexMatrix,
    pub config_count: u64,
}

impl SqptPlan {
    pub fn dim(&self) -> usize {
        1 << self.n
    }

    /// The matrix unit `|a⟩⟨b|` for `l = a·d + b`.
    pub fn matrix_unit(&self, l: usize) -> ComplexMatrix {
        matrix_unit(self.dim(), l)
    }
}

fn matrix_unit(d: usize, l: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d, d);
    m[(l / d, l % d)] = ONE;
    m
}

pub fn sqpt_inputs(n: usize) -> Result<SqptPlan> {
    if n == 0 || n > MAX_PLAN_QUBITS {
        return Err(QptError::Size(format!("SQPT plan supports 1..={MAX_PLAN_QUBITS} qubits, got {n}")));
    }
    let d = 1usize << n;
    let count = d * d;
    let digits = |s: usize| (0..n).map(move |q| (s >> (2 * (n - 1 - q))) & 3);

    let mut inputs = Vec::with_capacity(count);
    let mut input_labels = Vec::with_capacity(count);
    for s in 0..count {
        let kets: Vec<ComplexMatrix> = digits(s).map(|i| {
            let v = single_qubit_state(i);
            &v * v.adjoint()
        }).collect();
        inputs.push(DensityOperator::new(tensor_all(&kets)?)?);
        input_labels.push(digits(s).map(|i| SINGLE_LABELS[i]).collect::<Vec<_>>().join(","));
    }

    let mut coeffs = ComplexMatrix::zeros(count, count);
    for l in 0..count {
        let (a, b) = (l / d, l % d);
        for s in 0..count {
            let mut c = ONE;
            for (q, sq) in digits(s).enumerate() {
                let aq = (a >> (n - 1 - q)) & 1;
                let bq = (b >> (n - 1 - q)) & 1;
                c *= single_unit_coefficients(2 * aq + bq)[sq];
            }
            coeffs[(l, s)] = c;
        }
    }

    Ok(SqptPlan {
        n,
        inputs,
        input_labels,
        observables: pauli_strings(n)?,
        unit_coefficients: coeffs,
        config_count: (count * count) as u64,
    })
}

/// Measured Pauli expectations assembled for matrix-unit inputs.
#[derive(Debug, Clone)]
pub struct SqptData {
    pub n: usize,
    /// `λ_kl = Tr(E_k E(ρ_l))`: row `k` is the Pauli observable, column `l`
    /// the matrix-unit input.
    pub lambda: ComplexMatrix,
    /// `Tr(E_k E(ρ_s))` for the physical preparations, before recombination.
    pub physical_expectations: ComplexMatrix,
    pub config_count: u64,
    pub total_shots: u64,
}

pub fn sqpt_measure<C: QuantumChannel + ?Sized>(plan: &SqptPlan, channel: &C, mode: Mode) -> Result<SqptData> {
    mode.validate()?;
    if channel.num_qubits() != plan.n {
        return Err(QptError::Size(format!("channel acts on {} qubits, plan on {}", channel.num_qubits(), plan.n)));
    }
    let count = plan.inputs.len();
    let mut phys = ComplexMatrix::zeros(count, count);
    for (s, input) in plan.inputs.iter().enumerate() {
        let out = apply_channel(channel, input, 1)?;
        for (k, p) in plan.observables.iter().enumerate() {
            let setting = (s * count + k) as u64;
            phys[(k, s)] = c64(pauli_expectation(&out, p, mode, setting)?, 0.0);
        }
    }
    let lambda = &phys * plan.unit_coefficients.transpose();
    Ok(SqptData {
        n: plan.n,
        lambda,
        physical_expectations: phys,
        config_count: plan.config_count,
        total_shots: mode.shots().map_or(0, |s| s * plan.config_count),
    })
}

/// `B_{mn,lk}` with row index `l·D + k` and column index `m·D + n`.
#[derive(Debug, Clone)]
pub struct BMatrix {
    pub n: usize,
    pub entries: ComplexMatrix,
}

pub fn b_matrix(n: usize) -> Result<BMatrix> {
    if n == 0 || n > MAX_RECONSTRUCT_QUBITS {
        return Err(QptError::Size(format!("B matrix supports 1..={MAX_RECONSTRUCT_QUBITS} qubits, got {n}")));
    }
    let d = 1usize << n;
    let size = d * d;
    let basis = pauli_basis(n)?;
    let mut b = ComplexMatrix::zeros(size * size, size * size);
    for k in 0..size {
        let (ka, kb) = (k / d, k % d);
        for (m, em) in basis.iter().enumerate() {
            for (nn, en) in basis.iter().enumerate() {
                // E_m |ka⟩⟨kb| E_n† = (column ka of E_m)(column kb of E_n)†
                for la in 0..d {
                    let left = em[(la, ka)];
                    if left == ZERO {
                        continue;
                    }
                    for lb in 0..d {
                        let v = left * en[(lb, kb)].conj();
                        if v != ZERO {
                            let l = la * d + lb;
                            b[(l * size + k, m * size + nn)] = v;
                        }
                    }
                }
            }
        }
    }
    Ok(BMatrix { n, entries: b })
}

/// Output of [`sqpt_reconstruct`].
#[derive(Debug, Clone)]
pub struct SqptResult {
    pub chi: ChiMatrix,
    /// `‖Bχ − λ‖`.
    pub residual: f64,
    pub min_eigenvalue: f64,
    pub condition_number: f64,
    pub config_count: u64,
    pub warning: Option<String>,
}

/// Condition numbers of `B` above this are flagged in the result.
pub const ILL_CONDITIONED: f64 = 1e8;

pub fn sqpt_reconstruct(lambda: &ComplexMatrix, n: usize) -> Result<SqptResult> {
    let d = 1usize << n;
    let size = d * d;
    if lambda.nrows() != size || lambda.ncols() != size {
        return Err(QptError::Size(format!("λ for n={n} must be {size}x{size}")));
    }
    let b = b_matrix(n)?;
    let basis = pauli_basis(n)?;

    // Output operators E(ρ_k) = Σ_j λ_jk E_j / d, expanded in matrix units.
    let mut rhs = ComplexVector::zeros(size * size);
    for k in 0..size {
        let mut out = ComplexMatrix::zeros(d, d);
        for (j, e) in basis.iter().enumerate() {
            out += e * lambda[(j, k)];
        }
        out /= c64(d as f64, 0.0);
        for l in 0..size {
            rhs[l * size + k] = out[(l / d, l % d)];
        }
    }

    let sv = singular_values(&b.entries);
    let cutoff = PINV_CUTOFF * sv.first().copied().unwrap_or(1.0);
    let pinv = pseudo_inverse(&b.entries, cutoff);
    let x = &pinv * &rhs;
    let residual = (&b.entries * &x - &rhs).norm();
    let chi = ComplexMatrix::from_fn(size, size, |m, k| x[m * size + k]);
    let cond = condition_number(&b.entries);
    let warning = (cond > ILL_CONDITIONED).then(|| format!("B is ill-conditioned (condition number {cond:e})"));
    let min_eigenvalue = hermitian_eigen(&chi).values[0];
    Ok(SqptResult {
        chi: ChiMatrix::new(n, chi)?,
        residual,
        min_eigenvalue,
        condition_number: cond,
        config_count: (size * size) as u64,
        warning,
    })
}

/// Plan, measure and invert in one call.
pub fn sqpt_run<C: QuantumChannel + ?Sized>(channel: &C, mode: Mode) -> Result<SqptResult> {
    let n = channel.num_qubits();
    if n > MAX_RECONSTRUCT_QUBITS {
        return Err(QptError::Scope(format!("SQPT reconstruction is limited to n <= {MAX_RECONSTRUCT_QUBITS}")));
    }
    let plan = sqpt_inputs(n)?;
    let data = sqpt_measure(&plan, channel, mode)?;
    sqpt_reconstruct(&data.lambda, n)
}

/// Clips negative eigenvalues of χ and rescales to the original trace.
///
/// Off by default in every scheme; an explicit post-processing step.
pub fn project_psd(chi: &ChiMatrix) -> ChiMatrix {
    let eig = hermitian_eigen(chi.matrix());
    let tr = chi.matrix().trace().re;
    let clipped = eig.map(|l| l.max(0.0));
    let ctr = clipped.trace().re;
    let scaled = if ctr > 0.0 { clipped.scale(tr / ctr) } else { clipped };
    ChiMatrix::new(chi.n(), scaled).expect("same shape")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{kraus_to_chi, named_channel, random_cptp_channel, ChannelSpec};
    use crate::qcore::{diag, trace_product};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_qubit_plan() {
        let plan = sqpt_inputs(1).unwrap();
        assert_eq!(plan.inputs.len(), 4);
        assert_eq!(plan.input_labels, vec!["0", "1", "+", "-i"]);
        assert_eq!(plan.config_count, 16);
    }

    #[test]
    fn unit_coefficients_reproduce_matrix_units() {
        for n in 1..=2 {
            let plan = sqpt_inputs(n).unwrap();
            for l in 0..plan.inputs.len() {
                let mut acc = ComplexMatrix::zeros(plan.dim(), plan.dim());
                for (s, rho) in plan.inputs.iter().enumerate() {
                    acc += rho.matrix() * plan.unit_coefficients[(l, s)];
                }
                assert!((acc - plan.matrix_unit(l)).norm() < 1e-14, "n={n} l={l}");
            }
        }
    }

    #[test]
    fn two_qubit_plan_counts() {
        let plan = sqpt_inputs(2).unwrap();
        assert_eq!((plan.inputs.len(), plan.observables.len(), plan.config_count), (16, 16, 256));
        assert!(matches!(sqpt_inputs(4), Err(QptError::Size(_))));
    }

    #[test]
    fn b_matrix_reexpands_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=2 {
            let d = 1usize << n;
            let size = d * d;
            let b = b_matrix(n).unwrap();
            let basis = pauli_basis(n).unwrap();
            for _ in 0..50 {
                let (m, nn, k) = (rng.random_range(0..size), rng.random_range(0..size), rng.random_range(0..size));
                let target = &basis[m] * matrix_unit(d, k) * basis[nn].adjoint();
                let mut acc = ComplexMatrix::zeros(d, d);
                for l in 0..size {
                    acc += matrix_unit(d, l) * b.entries[(l * size + k, m * size + nn)];
                }
                assert!((acc - target).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn identity_lambda_is_input_trace() {
        let plan = sqpt_inputs(1).unwrap();
        let id = named_channel(&ChannelSpec::Identity).unwrap();
        let data = sqpt_measure(&plan, &id, Mode::Exact).unwrap();
        let basis = pauli_basis(1).unwrap();
        for k in 0..4 {
            for l in 0..4 {
                let expected = trace_product(&basis[k], &plan.matrix_unit(l));
                assert!((data.lambda[(k, l)] - expected).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn bit_flip_and_depolarizing_lambda_entries() {
        let plan = sqpt_inputs(1).unwrap();
        let bf = named_channel(&ChannelSpec::BitFlip(0.25)).unwrap();
        let data = sqpt_measure(&plan, &bf, Mode::Exact).unwrap();
        // E_k = Z (3), ρ_l = |0⟩⟨0| (0)
        assert!((data.lambda[(3, 0)] - c64(0.5, 0.0)).norm() < 1e-14);

        let dep = named_channel(&ChannelSpec::Depolarizing(0.3)).unwrap();
        let data = sqpt_measure(&plan, &dep, Mode::Exact).unwrap();
        let out = dep.apply_raw(&plan.matrix_unit(0), 1).unwrap();
        let oracle = trace_product(&pauli_basis(1).unwrap()[3], &out);
        assert!((data.lambda[(3, 0)] - oracle).norm() < 1e-14);
        assert!((oracle.re - (1.0 - 4.0 * 0.3 / 3.0)).abs() < 1e-14);
    }

    #[test]
    fn exact_reconstruction_of_library_channels() {
        let cases = [
            (ChannelSpec::Identity, Some(diag(&[1.0, 0.0, 0.0, 0.0]))),
            (ChannelSpec::BitFlip(0.25), Some(diag(&[0.75, 0.25, 0.0, 0.0]))),
            (ChannelSpec::AmplitudeDamping(0.2), None),
        ];
        for (spec, expected) in cases {
            let ch = named_channel(&spec).unwrap();
            let res = sqpt_run(&ch, Mode::Exact).unwrap();
            let truth = kraus_to_chi(&ch);
            assert!(res.chi.frobenius_distance(&truth) < 1e-8, "{spec}");
            if let Some(e) = expected {
                assert!((res.chi.matrix() - e).norm() < 1e-8);
            }
            assert!(res.residual < 1e-10 && res.warning.is_none());
        }
        let ad = sqpt_run(&named_channel(&ChannelSpec::AmplitudeDamping(0.2)).unwrap(), Mode::Exact).unwrap();
        assert!((ad.chi.get(0, 3) - c64(0.05, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn exact_round_trip_on_random_channels() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for i in 0..25 {
            let ch = random_cptp_channel(1, 1 + i % 4, &mut rng);
            let res = sqpt_run(&ch, Mode::Exact).unwrap();
            assert!(res.chi.frobenius_distance(&kraus_to_chi(&ch)) < 1e-8);
        }
    }

    #[test]
    fn two_qubit_exact_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let ch = random_cptp_channel(2, 2, &mut rng);
        let res = sqpt_run(&ch, Mode::Exact).unwrap();
        assert_eq!(res.config_count, 256);
        assert!(res.chi.frobenius_distance(&kraus_to_chi(&ch)) < 1e-8);
    }

    #[test]
    fn sampled_mode_rejects_zero_shots() {
        let ch = named_channel(&ChannelSpec::Identity).unwrap();
        assert!(matches!(sqpt_run(&ch, Mode::Sampled { shots: 0, seed: 1 }), Err(QptError::Argument(_))));
    }

    #[test]
    fn psd_projection_clips_negative_eigenvalues() {
        let chi = ChiMatrix::new(1, diag(&[1.02, -0.02, 0.0, 0.0])).unwrap();
        let p = project_psd(&chi);
        assert!(hermitian_eigen(p.matrix()).values[0] >= -1e-15);
        assert!((p.matrix().trace().re - 1.0).abs() < 1e-14);
    }
}
