//! Direct characterization of quantum dynamics for one principal qubit.
//!
//! Every configuration is read out with the same Bell-state analyzer. With a
//! maximally entangled input the four Bell frequencies are the diagonal of
//! χ. Three non-maximally entangled inputs `α|00⟩ + β|11⟩`, rotated into
//! the X and Y eigenbases, expose the off-diagonal elements through the
//! stabilizer and normalizer combinations of those same frequencies.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::channels::{apply_channel, ChiMatrix, QuantumChannel};
use crate::error::{QptError, Result};
use crate::measurement::{bell_kets, bell_observable, derive_seed, measure_setting, Mode};
use crate::qcore::{
    c64, from_rows, max_abs, pauli_basis, tensor_product, trace_product, ComplexMatrix, ComplexVector,
    DensityOperator, PauliString, C64, ONE, ZERO,
};

/// Bell outcome order; outcome `m` flags the error `E_m` on the principal qubit.
pub const BELL_LABELS: [&str; 4] = ["phi+", "psi+", "psi-", "phi-"];

/// Tolerance for the amplitude constraints and vanishing expectations.
pub const AMPLITUDE_TOL: f64 = 1e-9;

/// Amplitudes of `α|00⟩ + β|11⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Amplitudes {
    pub alpha: C64,
    pub beta: C64,
}

impl Default for Amplitudes {
    /// `α = √0.8`, `β = e^{iπ/4}√0.2`.
    fn default() -> Self {
        Amplitudes::from_alpha_sq(0.8)
    }
}

impl Amplitudes {
    /// Real `α = √a`, `β = e^{iπ/4}√(1−a)`.
    pub fn from_alpha_sq(alpha_sq: f64) -> Self {
        let b = (1.0 - alpha_sq).max(0.0).sqrt();
        let phase = std::f64::consts::FRAC_PI_4;
        Amplitudes { alpha: c64(alpha_sq.max(0.0).sqrt(), 0.0), beta: C64::from_polar(b, phase) }
    }

    pub fn validate(&self) -> Result<()> {
        let a2 = self.alpha.norm_sqr();
        let b2 = self.beta.norm_sqr();
        if (a2 + b2 - 1.0).abs() > AMPLITUDE_TOL {
            return Err(QptError::Argument(format!("|α|² + |β|² = {} must be 1", a2 + b2)));
        }
        if a2 < AMPLITUDE_TOL || b2 < AMPLITUDE_TOL || (a2 - 0.5).abs() < AMPLITUDE_TOL {
            return Err(QptError::Argument(format!(
                "coherence inputs need |α|, |β| not in {{0, 1/√2}}; got |α|² = {a2}"
            )));
        }
        if (self.alpha * self.beta.conj()).im.abs() < AMPLITUDE_TOL {
            return Err(QptError::Argument("coherence inputs need Im(αβ̄) ≠ 0".into()));
        }
        Ok(())
    }

    fn ket(&self) -> ComplexVector {
        ComplexVector::from_row_slice(&[self.alpha, ZERO, ZERO, self.beta])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConfigKind {
    Population,
    CoherenceZ,
    CoherenceX,
    CoherenceY,
}

impl ConfigKind {
    pub const ALL: [ConfigKind; 4] =
        [ConfigKind::Population, ConfigKind::CoherenceZ, ConfigKind::CoherenceX, ConfigKind::CoherenceY];

    pub fn label(self) -> &'static str {
        match self {
            ConfigKind::Population => "population",
            ConfigKind::CoherenceZ => "coherence_Z",
            ConfigKind::CoherenceX => "coherence_X",
            ConfigKind::CoherenceY => "coherence_Y",
        }
    }

    /// χ elements this configuration determines.
    pub fn targets(self) -> Vec<(usize, usize)> {
        match self {
            ConfigKind::Population => vec![(0, 0), (1, 1), (2, 2), (3, 3)],
            ConfigKind::CoherenceZ => vec![(0, 3), (1, 2)],
            ConfigKind::CoherenceX => vec![(0, 1), (2, 3)],
            ConfigKind::CoherenceY => vec![(0, 2), (1, 3)],
        }
    }
}

/// One input preparation read out by a Bell-state measurement.
#[derive(Debug, Clone)]
pub struct DcqdConfiguration {
    pub kind: ConfigKind,
    pub input_state: DensityOperator,
    pub stabilizers: Vec<PauliString>,
    pub normalizer: Option<PauliString>,
    pub amplitudes: Option<Amplitudes>,
    pub targets: Vec<(usize, usize)>,
    /// `⟨σ^A⟩` in the input, with `σ` the local factor of the stabilizer.
    pub local_expectation: f64,
    pub normalizer_expectation: f64,
}

fn single(m: [[C64; 2]; 2]) -> ComplexMatrix {
    from_rows(&[m[0].to_vec(), m[1].to_vec()])
}

fn hadamard() -> ComplexMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    single([[c64(h, 0.0), c64(h, 0.0)], [c64(h, 0.0), c64(-h, 0.0)]])
}

fn phase_gate() -> ComplexMatrix {
    single([[ONE, ZERO], [ZERO, c64(0.0, 1.0)]])
}

fn pauli(s: &str) -> PauliString {
    s.parse().expect("valid Pauli label")
}

fn build(kind: ConfigKind, psi: ComplexVector, stabilizers: &[&str], normalizer: Option<&str>, amps: Option<Amplitudes>) -> Result<DcqdConfiguration> {
    let input_state = DensityOperator::pure(&psi)?;
    let stabilizers: Vec<PauliString> = stabilizers.iter().map(|s| pauli(s)).collect();
    for s in &stabilizers {
        let v = input_state.expectation(&s.matrix());
        if (v - ONE).norm() > 1e-10 {
            return Err(QptError::Construction(format!("{} input is not a +1 eigenstate of {s}", kind.label())));
        }
    }
    let local = match kind {
        ConfigKind::Population | ConfigKind::CoherenceZ => "ZI",
        ConfigKind::CoherenceX => "XI",
        ConfigKind::CoherenceY => "YI",
    };
    let local_expectation = input_state.expectation(&pauli(local).matrix()).re;
    let normalizer = normalizer.map(pauli);
    let normalizer_expectation = normalizer.as_ref().map_or(0.0, |n| input_state.expectation(&n.matrix()).re);
    Ok(DcqdConfiguration {
        kind,
        input_state,
        stabilizers,
        normalizer,
        amplitudes: amps,
        targets: kind.targets(),
        local_expectation,
        normalizer_expectation,
    })
}

/// The four configurations in order population, Z, X, Y.
pub fn dcqd_configurations(amps: &Amplitudes) -> Result<Vec<DcqdConfiguration>> {
    amps.validate()?;
    let phi = ComplexVector::from_row_slice(&[
        c64(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        ZERO,
        ZERO,
        c64(std::f64::consts::FRAC_1_SQRT_2, 0.0),
    ]);
    let hh = tensor_product(&hadamard(), &hadamard())?;
    let ss = tensor_product(&phase_gate(), &phase_gate())?;
    let z_ket = amps.ket();
    let x_ket = &hh * &z_ket;
    let y_ket = &ss * &x_ket;
    let configs = vec![
        build(ConfigKind::Population, phi, &["ZZ", "XX"], None, None)?,
        build(ConfigKind::CoherenceZ, z_ket, &["ZZ"], Some("XX"), Some(*amps))?,
        build(ConfigKind::CoherenceX, x_ket, &["XX"], Some("ZZ"), Some(*amps))?,
        build(ConfigKind::CoherenceY, y_ket, &["YY"], Some("ZZ"), Some(*amps))?,
    ];
    for c in &configs[1..] {
        if c.local_expectation.abs() < AMPLITUDE_TOL {
            return Err(QptError::Configuration(format!("{}: local expectation vanishes", c.kind.label())));
        }
    }
    Ok(configs)
}

/// Bell data for one configuration, with the stabilizer/normalizer readings
/// formed from it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigRecord {
    pub label: String,
    /// Frequencies in Bell outcome order.
    pub frequencies: Vec<f64>,
    pub counts: Option<Vec<u64>>,
    pub seed: Option<u64>,
    /// `Tr[P_{±1} E(ρ)]` for the (first) stabilizer.
    pub stabilizer_plus: f64,
    pub stabilizer_minus: f64,
    /// `Tr[N ρ_{±1}]`; absent for the population configuration or when the
    /// stabilizer outcome never occurred.
    pub normalizer_plus: Option<f64>,
    pub normalizer_minus: Option<f64>,
}

fn bell_eigenvalue(p: &PauliString, b: usize) -> f64 {
    let k = &bell_kets()[b];
    (k.adjoint() * p.matrix() * k)[(0, 0)].re.round()
}

fn run_config<C: QuantumChannel + ?Sized>(channel: &C, cfg: &DcqdConfiguration, mode: Mode, index: u64) -> Result<ConfigRecord> {
    let out = apply_channel(channel, &cfg.input_state, 2)?;
    let (frequencies, hist) = measure_setting(&out, &bell_observable(), mode, index, cfg.kind.label())?;
    let stab = &cfg.stabilizers[0];
    let (mut plus, mut minus) = (0.0, 0.0);
    let (mut n_plus, mut n_minus) = (0.0, 0.0);
    for (b, f) in frequencies.iter().enumerate() {
        let nb = cfg.normalizer.as_ref().map_or(0.0, |n| bell_eigenvalue(n, b));
        if bell_eigenvalue(stab, b) > 0.0 {
            plus += f;
            n_plus += nb * f;
        } else {
            minus += f;
            n_minus += nb * f;
        }
    }
    let conditional = |num: f64, den: f64| (cfg.normalizer.is_some() && den > 0.0).then(|| num / den);
    Ok(ConfigRecord {
        label: cfg.kind.label().to_string(),
        frequencies,
        counts: hist.as_ref().map(|h| h.counts.clone()),
        seed: hist.as_ref().map(|h| h.seed),
        stabilizer_plus: plus,
        stabilizer_minus: minus,
        normalizer_plus: conditional(n_plus, plus),
        normalizer_minus: conditional(n_minus, minus),
    })
}

fn sampled_index(mode: Mode, k: u64) -> u64 {
    match mode {
        Mode::Exact => k,
        Mode::Sampled { seed, .. } => derive_seed(seed, k) ^ k,
    }
}

fn check_single_qubit<C: QuantumChannel + ?Sized>(channel: &C) -> Result<()> {
    if channel.num_qubits() != 1 {
        return Err(QptError::Scope(format!(
            "DCQD reconstruction covers one principal qubit; channel acts on {}",
            channel.num_qubits()
        )));
    }
    Ok(())
}

/// χ diagonal read directly from the Bell frequencies on `(E ⊗ I)|Φ+⟩`.
pub fn dcqd_populations<C: QuantumChannel + ?Sized>(channel: &C, mode: Mode) -> Result<(Vec<f64>, ConfigRecord)> {
    check_single_qubit(channel)?;
    mode.validate()?;
    let configs = dcqd_configurations(&Amplitudes::default())?;
    let record = run_config(channel, &configs[0], mode, sampled_index(mode, 0))?;
    Ok((record.frequencies.clone(), record))
}

/// `K^b_{mn} = Tr[P_b (E_m ⊗ I) ρ (E_n ⊗ I)†]` for one input.
pub fn bell_coefficients(input: &DensityOperator) -> Result<Vec<ComplexMatrix>> {
    let basis = pauli_basis(1)?;
    let id = ComplexMatrix::identity(2, 2);
    let ext: Vec<ComplexMatrix> = basis.iter().map(|e| tensor_product(e, &id)).collect::<Result<_>>()?;
    let projectors = bell_observable().projectors().to_vec();
    Ok(projectors
        .iter()
        .map(|p| {
            ComplexMatrix::from_fn(4, 4, |m, n| trace_product(p, &(&ext[m] * input.matrix() * ext[n].adjoint())))
        })
        .collect())
}

/// Coherence elements from one configuration's data, given the populations.
#[derive(Debug, Clone)]
pub struct CoherenceSolve {
    pub values: Vec<((usize, usize), C64)>,
    /// Populations entering each target's equations.
    pub depths: Vec<usize>,
}

pub fn solve_coherences(cfg: &DcqdConfiguration, populations: &[f64], frequencies: &[f64]) -> Result<CoherenceSolve> {
    if cfg.kind == ConfigKind::Population {
        return Err(QptError::Argument("the population configuration has no coherence targets".into()));
    }
    let k = bell_coefficients(&cfg.input_state)?;
    let targets = &cfg.targets;
    for (b, kb) in k.iter().enumerate() {
        for m in 0..4 {
            for n in 0..4 {
                let is_target = targets.iter().any(|&(i, j)| (i, j) == (m, n) || (j, i) == (m, n));
                if m != n && !is_target && kb[(m, n)].norm() > 1e-10 {
                    return Err(QptError::Construction(format!(
                        "{}: outcome {} couples non-target element {m}{n}",
                        cfg.kind.label(),
                        BELL_LABELS[b]
                    )));
                }
            }
        }
    }
    let mut a = DMatrix::<f64>::zeros(4, 4);
    let mut rhs = DVector::<f64>::zeros(4);
    for (b, kb) in k.iter().enumerate() {
        rhs[b] = frequencies[b] - (0..4).map(|m| kb[(m, m)].re * populations[m]).sum::<f64>();
        for (t, &(m, n)) in targets.iter().enumerate() {
            a[(b, 2 * t)] = 2.0 * kb[(m, n)].re;
            a[(b, 2 * t + 1)] = -2.0 * kb[(m, n)].im;
        }
    }
    let sv = a.clone().svd(false, false).singular_values;
    let (smax, smin) = (sv.max(), sv.min());
    if smin < 1e-10 * smax.max(1.0) {
        return Err(QptError::Configuration(format!(
            "{}: coherence equations are singular for these amplitudes",
            cfg.kind.label()
        )));
    }
    let x = a.clone().lu().solve(&rhs).ok_or_else(|| QptError::Configuration("singular coherence system".into()))?;
    let depths = targets
        .iter()
        .map(|&(m, n)| {
            (0..4)
                .filter(|&j| k.iter().any(|kb| kb[(m, n)].norm() > 1e-10 && kb[(j, j)].norm() > 1e-10))
                .count()
        })
        .collect();
    let values = targets.iter().enumerate().map(|(t, &mn)| (mn, c64(x[2 * t], x[2 * t + 1]))).collect();
    Ok(CoherenceSolve { values, depths })
}

/// A χ entry `((m, n), χ_mn)`.
pub type Coherence = ((usize, usize), C64);

/// Off-diagonal χ from the three coherence configurations.
pub fn dcqd_coherences<C: QuantumChannel + ?Sized>(
    channel: &C,
    populations: &[f64],
    amps: &Amplitudes,
    mode: Mode,
) -> Result<(Vec<Coherence>, Vec<ConfigRecord>)> {
    check_single_qubit(channel)?;
    mode.validate()?;
    if populations.len() != 4 {
        return Err(QptError::Argument("four populations are required".into()));
    }
    let configs = dcqd_configurations(amps)?;
    let mut values = Vec::new();
    let mut records = Vec::new();
    for (i, cfg) in configs.iter().enumerate().skip(1) {
        let rec = run_config(channel, cfg, mode, sampled_index(mode, i as u64))?;
        values.extend(solve_coherences(cfg, populations, &rec.frequencies)?.values);
        records.push(rec);
    }
    Ok((values, records))
}

/// Output of a complete single-qubit run.
#[derive(Debug, Clone)]
pub struct DcqdReport {
    pub chi: ChiMatrix,
    pub populations: Vec<f64>,
    /// Population record first, then Z, X, Y.
    pub records: Vec<ConfigRecord>,
    /// Prior quantities each element needed; 0 on the diagonal.
    pub inversion_depth: [[usize; 4]; 4],
    /// `‖χ − χ†‖` before the Hermitian completion.
    pub asymmetry_residual: f64,
    pub amplitudes: Amplitudes,
    pub config_count: u64,
    pub total_shots: u64,
}

pub fn dcqd_full<C: QuantumChannel + ?Sized>(channel: &C, amps: &Amplitudes, mode: Mode) -> Result<DcqdReport> {
    check_single_qubit(channel)?;
    mode.validate()?;
    let configs = dcqd_configurations(amps)?;
    let pop = run_config(channel, &configs[0], mode, sampled_index(mode, 0))?;
    let populations = pop.frequencies.clone();

    let mut raw = ComplexMatrix::zeros(4, 4);
    let mut depth = [[0usize; 4]; 4];
    for (m, p) in populations.iter().enumerate() {
        raw[(m, m)] = c64(*p, 0.0);
    }
    let mut records = vec![pop];
    for (i, cfg) in configs.iter().enumerate().skip(1) {
        let rec = run_config(channel, cfg, mode, sampled_index(mode, i as u64))?;
        let solved = solve_coherences(cfg, &populations, &rec.frequencies)?;
        for (((m, n), v), d) in solved.values.iter().zip(&solved.depths) {
            raw[(*m, *n)] = *v;
            raw[(*n, *m)] = v.conj();
            depth[*m][*n] = *d;
            depth[*n][*m] = *d;
        }
        records.push(rec);
    }
    let asymmetry_residual = max_abs(&(&raw - raw.adjoint()));
    let chi = (&raw + raw.adjoint()).scale(0.5);
    // keep the diagonal bit-identical to the frequencies
    let mut chi = chi;
    for (m, p) in populations.iter().enumerate() {
        chi[(m, m)] = c64(*p, 0.0);
    }
    Ok(DcqdReport {
        chi: ChiMatrix::new(1, chi)?,
        populations,
        records,
        inversion_depth: depth,
        asymmetry_residual,
        amplitudes: *amps,
        config_count: 4,
        total_shots: mode.shots().map_or(0, |s| 4 * s),
    })
}

/// Experimental configurations for `n` principal qubits: `4^n`.
pub fn dcqd_config_count(n: u32) -> u64 {
    4u64.pow(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{kraus_to_chi, named_channel, random_cptp_channel, Axis, ChannelSpec};
    use crate::qcore::diag;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ch(spec: ChannelSpec) -> crate::channels::KrausChannel {
        named_channel(&spec).unwrap()
    }

    #[test]
    fn configurations_are_stabilizer_eigenstates() {
        let configs = dcqd_configurations(&Amplitudes::default()).unwrap();
        assert_eq!(configs.len(), 4);
        let z = &configs[1];
        assert!((z.local_expectation - 0.6).abs() < 1e-12);
        assert!((configs[2].local_expectation - 0.6).abs() < 1e-12);
        assert!((configs[3].local_expectation - 0.6).abs() < 1e-12);
        for c in &configs {
            for s in &c.stabilizers {
                assert!((c.input_state.expectation(&s.matrix()) - ONE).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn forbidden_amplitudes_are_rejected() {
        for a2 in [0.5, 0.0, 1.0] {
            assert!(matches!(dcqd_configurations(&Amplitudes::from_alpha_sq(a2)), Err(QptError::Argument(_))));
        }
        let real = Amplitudes { alpha: c64(0.8f64.sqrt(), 0.0), beta: c64(0.2f64.sqrt(), 0.0) };
        assert!(matches!(dcqd_configurations(&real), Err(QptError::Argument(_))));
    }

    #[test]
    fn bell_outcome_flags_each_pauli_error() {
        let phi = DensityOperator::phi_plus(1);
        for (m, e) in pauli_basis(1).unwrap().iter().enumerate() {
            let k = crate::channels::KrausChannel::new(1, vec![e.clone()]).unwrap();
            let out = apply_channel(&k, &phi, 2).unwrap();
            let p = crate::measurement::outcome_probabilities(&out, &bell_observable()).unwrap();
            for (b, pb) in p.iter().enumerate() {
                assert_eq!(*pb > 0.5, b == m, "error {m} outcome {b}");
            }
        }
    }

    #[test]
    fn populations_match_library_channels() {
        let (p, rec) = dcqd_populations(&ch(ChannelSpec::Identity), Mode::Exact).unwrap();
        assert_eq!(p, vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(p, rec.frequencies);
        let (p, _) = dcqd_populations(&ch(ChannelSpec::BitFlip(0.25)), Mode::Exact).unwrap();
        for (a, b) in p.iter().zip([0.75, 0.25, 0.0, 0.0]) {
            assert!((a - b).abs() < 1e-15);
        }
        let dep = ch(ChannelSpec::Depolarizing(0.3));
        let (p, _) = dcqd_populations(&dep, Mode::Exact).unwrap();
        let oracle = kraus_to_chi(&dep);
        for (m, pm) in p.iter().enumerate() {
            assert!((pm - oracle.get(m, m).re).abs() < 1e-14);
            assert!((pm - [0.7, 0.1, 0.1, 0.1][m]).abs() < 1e-14);
        }
    }

    #[test]
    fn amplitude_damping_stabilizer_reading() {
        let ad = ch(ChannelSpec::AmplitudeDamping(0.2));
        let report = dcqd_full(&ad, &Amplitudes::default(), Mode::Exact).unwrap();
        let z = &report.records[1];
        assert!((z.stabilizer_plus - 0.96).abs() < 1e-9, "{}", z.stabilizer_plus);
        // χ_00 + χ_33 + 2 Re(χ_03)⟨Z^A⟩
        let chi = report.chi.matrix();
        let rhs = chi[(0, 0)].re + chi[(3, 3)].re + 2.0 * chi[(0, 3)].re * 0.6;
        assert!((z.stabilizer_plus - rhs).abs() < 1e-12);
        assert!((chi[(0, 0)].re - 0.897_213_595_499_958).abs() < 1e-9);
        assert!((chi[(0, 3)] - c64(0.05, 0.0)).norm() < 1e-9);
        assert!((chi[(1, 2)] - c64(0.0, -0.05)).norm() < 1e-9);
    }

    #[test]
    fn z_config_normalizer_relation() {
        let rz = ch(ChannelSpec::Unitary { axis: Axis::Z, angle: 0.9 });
        let report = dcqd_full(&rz, &Amplitudes::default(), Mode::Exact).unwrap();
        let chi = report.chi.matrix();
        let cfg = &dcqd_configurations(&Amplitudes::default()).unwrap()[1];
        let za = tensor_product(&pauli("Z").matrix(), &ComplexMatrix::identity(2, 2)).unwrap();
        let zn = cfg.input_state.expectation(&(za * pauli("XX").matrix()));
        // Tr[Nρ_{+1}] = [(χ00 − χ33)⟨N⟩ + 2i Im(χ03)⟨Z^A N⟩] / Tr[P_{+1}]
        let rec = &report.records[1];
        let num = c64((chi[(0, 0)].re - chi[(3, 3)].re) * cfg.normalizer_expectation, 0.0)
            + c64(0.0, 2.0 * chi[(0, 3)].im) * zn;
        assert!(num.im.abs() < 1e-12 && chi[(0, 3)].im.abs() > 0.1);
        assert!((rec.normalizer_plus.unwrap() - num.re / rec.stabilizer_plus).abs() < 1e-9);
    }

    #[test]
    fn rotations_and_unitaries() {
        let theta = 0.7f64;
        let rz = ch(ChannelSpec::Unitary { axis: Axis::Z, angle: theta });
        let r = dcqd_full(&rz, &Amplitudes::default(), Mode::Exact).unwrap();
        let expect = c64(0.0, (theta / 2.0).cos() * (theta / 2.0).sin());
        assert!((r.chi.get(0, 3) - expect).norm() < 1e-8);
        let zpi = ch(ChannelSpec::Unitary { axis: Axis::Z, angle: std::f64::consts::PI });
        let r = dcqd_full(&zpi, &Amplitudes::default(), Mode::Exact).unwrap();
        assert!((r.chi.matrix() - diag(&[0.0, 0.0, 0.0, 1.0])).norm() < 1e-8);
        let id = dcqd_full(&ch(ChannelSpec::Identity), &Amplitudes::default(), Mode::Exact).unwrap();
        assert!((id.chi.matrix() - diag(&[1.0, 0.0, 0.0, 0.0])).norm() < 1e-12);
    }

    #[test]
    fn exact_mode_matches_ground_truth_on_random_channels() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for i in 0..25 {
            let c = random_cptp_channel(1, 1 + i % 4, &mut rng);
            let r = dcqd_full(&c, &Amplitudes::default(), Mode::Exact).unwrap();
            assert!(r.chi.frobenius_distance(&kraus_to_chi(&c)) < 1e-8, "channel {i}");
            assert_eq!(r.config_count, 4);
            assert!(r.asymmetry_residual < 1e-12);
            for m in 0..4 {
                assert_eq!(r.chi.get(m, m).re, r.records[0].frequencies[m]);
                assert_eq!(r.inversion_depth[m][m], 0);
            }
            assert!(r.inversion_depth.iter().flatten().all(|&d| d <= 2));
        }
    }

    #[test]
    fn other_amplitudes_also_work() {
        let ad = ch(ChannelSpec::AmplitudeDamping(0.3));
        let amps = Amplitudes { alpha: C64::from_polar(0.3f64.sqrt(), 0.4), beta: c64(0.7f64.sqrt(), 0.0) };
        let r = dcqd_full(&ad, &amps, Mode::Exact).unwrap();
        assert!(r.chi.frobenius_distance(&kraus_to_chi(&ad)) < 1e-8);
    }

    #[test]
    fn sampled_populations_are_raw_frequencies() {
        let bf = ch(ChannelSpec::BitFlip(0.25));
        let mode = Mode::Sampled { shots: 10_000, seed: 5 };
        let r = dcqd_full(&bf, &Amplitudes::default(), mode).unwrap();
        let counts = r.records[0].counts.as_ref().unwrap();
        for m in 0..4 {
            assert_eq!(r.chi.get(m, m).re, counts[m] as f64 / 10_000.0);
        }
        let again = dcqd_full(&bf, &Amplitudes::default(), mode).unwrap();
        assert_eq!(r.records, again.records);
        assert_eq!(r.total_shots, 40_000);
    }

    #[test]
    fn scope_and_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let two = random_cptp_channel(2, 1, &mut rng);
        assert!(matches!(dcqd_full(&two, &Amplitudes::default(), Mode::Exact), Err(QptError::Scope(_))));
        assert_eq!((dcqd_config_count(1), dcqd_config_count(3), dcqd_config_count(4)), (4, 64, 256));
    }
}
