//! Channel representations: Kraus operators, the Pauli-basis χ matrix and
//! the Choi state, plus a library of named single-qubit channels.
//!
//! χ is expanded in the Pauli-string basis `E_m` with `Tr(E_m† E_n) = d δ_mn`,
//! so `a_im = Tr(E_m† A_i)/d` and the identity channel has `χ_00 = 1`.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{QptError, Result};
use crate::qcore::{
    c64, hermitian_eigen, hs_inner, max_abs, pauli_basis, phi_plus_ket, tensor_product, ComplexMatrix, DensityOperator,
    MatrixJson, Pauli, C64, DEFAULT_TOL, ONE, ZERO,
};

/// Completely positive map given by Kraus operators on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    n: usize,
    operators: Vec<ComplexMatrix>,
}

impl KrausChannel {
    /// Checks shapes and `Σ A†A ⩽ I` within [`DEFAULT_TOL`].
    pub fn new(n: usize, operators: Vec<ComplexMatrix>) -> Result<Self> {
        let d = 1usize << n;
        if n == 0 || operators.is_empty() {
            return Err(QptError::Size("channel needs n >= 1 and at least one Kraus operator".into()));
        }
        if let Some(bad) = operators.iter().find(|a| a.nrows() != d || a.ncols() != d) {
            return Err(QptError::Size(format!("Kraus operator is {}x{}, expected {d}x{d}", bad.nrows(), bad.ncols())));
        }
        let ch = KrausChannel { n, operators };
        let min = hermitian_eigen(&ch.completeness_deficit()).values[0];
        if min < -DEFAULT_TOL {
            return Err(QptError::Validity(format!("Σ A†A exceeds the identity (I − ΣA†A has eigenvalue {min:e})")));
        }
        Ok(ch)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    /// `I − Σ A_i† A_i`.
    pub fn completeness_deficit(&self) -> ComplexMatrix {
        let d = self.dim();
        let sum: ComplexMatrix = self.operators.iter().map(|a| a.adjoint() * a).fold(ComplexMatrix::zeros(d, d), |acc, m| acc + m);
        ComplexMatrix::identity(d, d) - sum
    }

    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        max_abs(&self.completeness_deficit()) <= tol
    }
}

/// Process matrix in the Pauli-string basis, `4^n × 4^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiMatrix {
    n: usize,
    chi: ComplexMatrix,
}

impl ChiMatrix {
    pub fn new(n: usize, chi: ComplexMatrix) -> Result<Self> {
        let size = 1usize << (2 * n);
        if n == 0 || chi.nrows() != size || chi.ncols() != size {
            return Err(QptError::Size(format!("χ for {n} qubits must be {size}x{size}, got {}x{}", chi.nrows(), chi.ncols())));
        }
        Ok(ChiMatrix { n, chi })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.chi
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.chi
    }

    pub fn get(&self, m: usize, n: usize) -> C64 {
        self.chi[(m, n)]
    }

    pub fn frobenius_distance(&self, other: &ChiMatrix) -> f64 {
        (&self.chi - &other.chi).norm()
    }

    /// `Σ_mn χ_mn E_n† E_m`, equal to the identity for trace-preserving maps.
    pub fn trace_condition(&self) -> ComplexMatrix {
        let basis = pauli_basis(self.n).expect("n validated at construction");
        let d = 1usize << self.n;
        let mut acc = ComplexMatrix::zeros(d, d);
        for (m, em) in basis.iter().enumerate() {
            for (k, ek) in basis.iter().enumerate() {
                let c = self.chi[(m, k)];
                if c != ZERO {
                    acc += (ek.adjoint() * em) * c;
                }
            }
        }
        acc
    }

    pub fn to_json(&self) -> ChiFile {
        ChiFile { n: self.n, basis: "pauli".into(), chi: MatrixJson::from(&self.chi) }
    }

    pub fn from_json(file: &ChiFile) -> Result<Self> {
        if file.basis != "pauli" {
            return Err(QptError::Argument(format!("unsupported χ basis '{}'", file.basis)));
        }
        Self::new(file.n, ComplexMatrix::try_from(&file.chi)?)
    }
}

/// Anything that can act as `E ⊗ I` on a joint state.
pub trait QuantumChannel {
    fn num_qubits(&self) -> usize;

    /// Applies the channel to the leading `2^n` factor of `rho`, acting as
    /// the identity on the trailing `ancilla_dim` factor.
    fn apply_raw(&self, rho: &ComplexMatrix, ancilla_dim: usize) -> Result<ComplexMatrix>;
}

fn check_extension(n: usize, rho: &ComplexMatrix, ancilla_dim: usize) -> Result<()> {
    let d = 1usize << n;
    if !rho.is_square() || rho.nrows() != d * ancilla_dim {
        return Err(QptError::Size(format!(
            "channel on {d} dims with {ancilla_dim}-dim ancilla cannot act on a {}x{} operator",
            rho.nrows(),
            rho.ncols()
        )));
    }
    Ok(())
}

impl QuantumChannel for KrausChannel {
    fn num_qubits(&self) -> usize {
        self.n
    }

    fn apply_raw(&self, rho: &ComplexMatrix, ancilla_dim: usize) -> Result<ComplexMatrix> {
        check_extension(self.n, rho, ancilla_dim)?;
        let id = ComplexMatrix::identity(ancilla_dim, ancilla_dim);
        let mut out = ComplexMatrix::zeros(rho.nrows(), rho.ncols());
        for a in &self.operators {
            let ext = tensor_product(a, &id)?;
            out += &ext * rho * ext.adjoint();
        }
        Ok(out)
    }
}

impl QuantumChannel for ChiMatrix {
    fn num_qubits(&self) -> usize {
        self.n
    }

    fn apply_raw(&self, rho: &ComplexMatrix, ancilla_dim: usize) -> Result<ComplexMatrix> {
        check_extension(self.n, rho, ancilla_dim)?;
        let id = ComplexMatrix::identity(ancilla_dim, ancilla_dim);
        let ext: Vec<ComplexMatrix> =
            pauli_basis(self.n)?.iter().map(|e| tensor_product(e, &id)).collect::<Result<_>>()?;
        let mut out = ComplexMatrix::zeros(rho.nrows(), rho.ncols());
        for (m, em) in ext.iter().enumerate() {
            let left = em * rho;
            for (k, ek) in ext.iter().enumerate() {
                let c = self.chi[(m, k)];
                if c != ZERO {
                    out += (&left * ek.adjoint()) * c;
                }
            }
        }
        Ok(out)
    }
}

/// `(E ⊗ I_ancilla)(ρ)` for a trace-preserving channel.
pub fn apply_channel<C: QuantumChannel + ?Sized>(c: &C, rho: &DensityOperator, ancilla_dim: usize) -> Result<DensityOperator> {
    let out = c.apply_raw(rho.matrix(), ancilla_dim)?;
    let tr = out.trace();
    if (tr - ONE).norm() > 1e-8 {
        return Err(QptError::Validity(format!("channel output has trace {tr}; the channel is not trace preserving")));
    }
    Ok(DensityOperator::from_trusted(out))
}

/// `χ_mn = Σ_i a_im a_in*` with `a_im = Tr(E_m† A_i)/d`.
pub fn kraus_to_chi(ch: &KrausChannel) -> ChiMatrix {
    let basis = pauli_basis(ch.n).expect("channel size validated");
    let d = ch.dim() as f64;
    let size = basis.len();
    let mut chi = ComplexMatrix::zeros(size, size);
    for a in &ch.operators {
        let coeffs: Vec<C64> = basis.iter().map(|e| hs_inner(e, a) / d).collect();
        for m in 0..size {
            for k in 0..size {
                chi[(m, k)] += coeffs[m] * coeffs[k].conj();
            }
        }
    }
    ChiMatrix { n: ch.n, chi }
}

/// Kraus form of a PSD χ; eigenvalues within `±tol` are dropped as zeros.
pub fn chi_to_kraus(c: &ChiMatrix) -> Result<KrausChannel> {
    chi_to_kraus_tol(c, DEFAULT_TOL)
}

pub fn chi_to_kraus_tol(c: &ChiMatrix, tol: f64) -> Result<KrausChannel> {
    let eig = hermitian_eigen(&c.chi);
    if eig.values[0] < -tol {
        return Err(QptError::Validity(format!("χ is not positive semidefinite: eigenvalue {:e}", eig.values[0])));
    }
    let basis = pauli_basis(c.n)?;
    let d = 1usize << c.n;
    let mut ops = Vec::new();
    for (k, &lam) in eig.values.iter().enumerate() {
        if lam <= tol {
            continue;
        }
        let v = eig.vector(k);
        let mut a = ComplexMatrix::zeros(d, d);
        for (m, e) in basis.iter().enumerate() {
            a += e * v[m];
        }
        ops.push(a.scale(lam.sqrt()));
    }
    if ops.is_empty() {
        ops.push(ComplexMatrix::zeros(d, d));
    }
    Ok(KrausChannel { n: c.n, operators: ops })
}

/// Choi state `ρ_E = (E⊗I)(|Φ+⟩⟨Φ+|)` on `2n` qubits, system first.
pub fn choi_state<C: QuantumChannel + ?Sized>(c: &C) -> Result<DensityOperator> {
    let n = c.num_qubits();
    if n > 3 {
        return Err(QptError::Size(format!("Choi state limited to n <= 3, got {n}")));
    }
    let phi = DensityOperator::phi_plus(n);
    let out = c.apply_raw(phi.matrix(), 1 << n)?;
    Ok(DensityOperator::from_trusted(out))
}

/// χ in the matrix-unit basis `{|i⟩⟨j|}` (index `i·d + j`), where it equals
/// `d ρ_E`.
pub fn kraus_to_chi_matrix_units(ch: &KrausChannel) -> ComplexMatrix {
    let d = ch.dim();
    let mut chi = ComplexMatrix::zeros(d * d, d * d);
    for a in &ch.operators {
        for r in 0..d * d {
            for s in 0..d * d {
                chi[(r, s)] += a[(r / d, r % d)] * a[(s / d, s % d)].conj();
            }
        }
    }
    chi
}

/// Converts a Choi state into the Pauli-basis χ.
///
/// The vectors `(E_m ⊗ I)|Φ+⟩` are orthonormal, and `ρ_E = Σ χ_mn |e_m⟩⟨e_n|`,
/// so `χ_mn = ⟨e_m|ρ_E|e_n⟩`.
pub fn choi_to_chi(choi: &ComplexMatrix, n: usize) -> Result<ChiMatrix> {
    let d = 1usize << n;
    if choi.nrows() != d * d || !choi.is_square() {
        return Err(QptError::Size(format!("Choi matrix for n={n} must be {}x{}", d * d, d * d)));
    }
    let phi = phi_plus_ket(n);
    let id = ComplexMatrix::identity(d, d);
    let vecs: Vec<_> = pauli_basis(n)?.iter().map(|e| tensor_product(e, &id).map(|ext| ext * &phi)).collect::<Result<_>>()?;
    let size = vecs.len();
    let rho_v: Vec<_> = vecs.iter().map(|v| choi * v).collect();
    let chi = ComplexMatrix::from_fn(size, size, |m, k| vecs[m].dotc(&rho_v[k]));
    ChiMatrix::new(n, chi)
}

/// Rotation axis for [`ChannelSpec::Unitary`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    fn pauli(self) -> Pauli {
        match self {
            Axis::X => Pauli::X,
            Axis::Y => Pauli::Y,
            Axis::Z => Pauli::Z,
        }
    }
}

/// Named channels accepted on the command line and in experiment files.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelSpec {
    Identity,
    BitFlip(f64),
    Depolarizing(f64),
    AmplitudeDamping(f64),
    PhaseDamping(f64),
    /// `exp(−i θ σ/2)` about the given axis.
    Unitary { axis: Axis, angle: f64 },
    KrausFile(PathBuf),
}

impl fmt::Display for ChannelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChannelSpec::Identity => write!(f, "identity"),
            ChannelSpec::BitFlip(p) => write!(f, "bit_flip({p})"),
            ChannelSpec::Depolarizing(p) => write!(f, "depolarizing({p})"),
            ChannelSpec::AmplitudeDamping(g) => write!(f, "amplitude_damping({g})"),
            ChannelSpec::PhaseDamping(l) => write!(f, "phase_damping({l})"),
            ChannelSpec::Unitary { axis, angle } => {
                let a = match axis {
                    Axis::X => "x",
                    Axis::Y => "y",
                    Axis::Z => "z",
                };
                write!(f, "unitary({a},{angle})")
            }
            ChannelSpec::KrausFile(p) => write!(f, "kraus_file({})", p.display()),
        }
    }
}

impl FromStr for ChannelSpec {
    type Err = QptError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, args) = match s.find('(') {
            Some(open) if s.ends_with(')') => (&s[..open], s[open + 1..s.len() - 1].trim()),
            Some(_) => return Err(QptError::Argument(format!("unbalanced parentheses in channel '{s}'"))),
            None => (s, ""),
        };
        let number = |a: &str| -> Result<f64> {
            a.trim().parse::<f64>().map_err(|_| QptError::Argument(format!("'{a}' is not a number in channel '{s}'")))
        };
        let spec = match name.trim() {
            "identity" if args.is_empty() => ChannelSpec::Identity,
            "bit_flip" => ChannelSpec::BitFlip(number(args)?),
            "depolarizing" => ChannelSpec::Depolarizing(number(args)?),
            "amplitude_damping" => ChannelSpec::AmplitudeDamping(number(args)?),
            "phase_damping" => ChannelSpec::PhaseDamping(number(args)?),
            "unitary" => {
                let (axis, angle) = args
                    .split_once(',')
                    .ok_or_else(|| QptError::Argument(format!("unitary needs (axis,angle), got '{args}'")))?;
                let axis = match axis.trim().to_ascii_lowercase().as_str() {
                    "x" => Axis::X,
                    "y" => Axis::Y,
                    "z" => Axis::Z,
                    other => return Err(QptError::Argument(format!("unknown rotation axis '{other}'"))),
                };
                ChannelSpec::Unitary { axis, angle: number(angle)? }
            }
            "kraus_file" if !args.is_empty() => ChannelSpec::KrausFile(PathBuf::from(args)),
            _ => return Err(QptError::Argument(format!("unknown channel '{s}'"))),
        };
        Ok(spec)
    }
}

impl Serialize for ChannelSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ChannelSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn unit_interval(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(QptError::Argument(format!("{name} = {v} is outside [0, 1]")));
    }
    Ok(())
}

fn m2(a: C64, b: C64, c: C64, d: C64) -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[a, b, c, d])
}

/// Standard Kraus set for a named channel.
pub fn named_channel(spec: &ChannelSpec) -> Result<KrausChannel> {
    let id = || ComplexMatrix::identity(2, 2);
    let r = |x: f64| c64(x, 0.0);
    let ops = match spec {
        ChannelSpec::Identity => vec![id()],
        ChannelSpec::BitFlip(p) => {
            unit_interval("bit_flip p", *p)?;
            vec![id().scale((1.0 - p).sqrt()), Pauli::X.matrix().scale(p.sqrt())]
        }
        ChannelSpec::Depolarizing(p) => {
            unit_interval("depolarizing p", *p)?;
            let w = (p / 3.0).sqrt();
            vec![id().scale((1.0 - p).sqrt()), Pauli::X.matrix().scale(w), Pauli::Y.matrix().scale(w), Pauli::Z.matrix().scale(w)]
        }
        ChannelSpec::AmplitudeDamping(g) => {
            unit_interval("amplitude_damping gamma", *g)?;
            vec![m2(ONE, ZERO, ZERO, r((1.0 - g).sqrt())), m2(ZERO, r(g.sqrt()), ZERO, ZERO)]
        }
        ChannelSpec::PhaseDamping(l) => {
            unit_interval("phase_damping lambda", *l)?;
            vec![m2(ONE, ZERO, ZERO, r((1.0 - l).sqrt())), m2(ZERO, ZERO, ZERO, r(l.sqrt()))]
        }
        ChannelSpec::Unitary { axis, angle } => {
            if !angle.is_finite() {
                return Err(QptError::Argument(format!("rotation angle {angle} is not finite")));
            }
            let half = angle / 2.0;
            vec![id().scale(half.cos()) - axis.pauli().matrix() * c64(0.0, half.sin())]
        }
        ChannelSpec::KrausFile(path) => return read_channel_file(path),
    };
    KrausChannel::new(1, ops)
}

/// Channel file: `{"n": int, "kraus": [matrix, ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelFile {
    pub n: usize,
    pub kraus: Vec<MatrixJson>,
}

/// χ file: `{"n": int, "basis": "pauli", "chi": matrix}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiFile {
    pub n: usize,
    pub basis: String,
    pub chi: MatrixJson,
}

impl ChannelFile {
    pub fn from_channel(ch: &KrausChannel) -> Self {
        ChannelFile { n: ch.n, kraus: ch.operators.iter().map(MatrixJson::from).collect() }
    }

    pub fn to_channel(&self) -> Result<KrausChannel> {
        let ops = self.kraus.iter().map(ComplexMatrix::try_from).collect::<Result<Vec<_>>>()?;
        KrausChannel::new(self.n, ops)
    }
}

pub fn read_channel_file(path: &Path) -> Result<KrausChannel> {
    let text = std::fs::read_to_string(path)?;
    let file: ChannelFile = serde_json::from_str(&text)?;
    file.to_channel()
}

/// A single pass/fail line of a [`ValidityReport`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Check {
    pub value: f64,
    pub pass: bool,
}

/// Complete positivity, trace preservation and Hermiticity of a channel.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidityReport {
    /// Smallest eigenvalue of χ.
    pub is_cp: Check,
    /// Operator norm of `Σ A†A − I` (or the χ equivalent).
    pub is_tp: Check,
    /// `‖χ − χ†‖_F`.
    pub is_hermitian: Check,
}

impl ValidityReport {
    pub fn all_pass(&self) -> bool {
        self.is_cp.pass && self.is_tp.pass && self.is_hermitian.pass
    }
}

/// Borrowed channel in either representation.
#[derive(Debug, Clone, Copy)]
pub enum ChannelRef<'a> {
    Kraus(&'a KrausChannel),
    Chi(&'a ChiMatrix),
}

fn spectral_norm_hermitian(m: &ComplexMatrix) -> f64 {
    hermitian_eigen(m).values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

pub fn validate_channel(c: ChannelRef<'_>, tol: f64) -> ValidityReport {
    let (chi, tp_dev) = match c {
        ChannelRef::Kraus(k) => (kraus_to_chi(k), spectral_norm_hermitian(&k.completeness_deficit())),
        ChannelRef::Chi(x) => {
            let d = 1usize << x.n;
            let dev = x.trace_condition() - ComplexMatrix::identity(d, d);
            let norm = if max_abs(&(&dev - dev.adjoint())) <= tol { spectral_norm_hermitian(&dev) } else { dev.norm() };
            (x.clone(), norm)
        }
    };
    let herm = (chi.matrix() - chi.matrix().adjoint()).norm();
    let min_eig = hermitian_eigen(chi.matrix()).values[0];
    ValidityReport {
        is_cp: Check { value: min_eig, pass: min_eig >= -tol },
        is_tp: Check { value: tp_dev, pass: tp_dev <= tol },
        is_hermitian: Check { value: herm, pass: herm <= tol },
    }
}

/// Random CPTP channel from a Haar-like isometry split into `rank` Kraus
/// operators.
pub fn random_cptp_channel<R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> KrausChannel {
    let d = 1usize << n;
    let g = ComplexMatrix::from_fn(rank * d, d, |_, _| {
        c64(rng.sample(rand_distr::StandardNormal), rng.sample(rand_distr::StandardNormal))
    });
    let q = g.qr().q();
    let operators = (0..rank).map(|i| q.rows(i * d, d).into_owned()).collect();
    KrausChannel { n, operators }
}

/// Random PSD χ with unit trace (completely positive, generally not TP).
pub fn random_psd_chi<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ChiMatrix {
    let size = 1usize << (2 * n);
    let g = ComplexMatrix::from_fn(size, size, |_, _| {
        c64(rng.sample(rand_distr::StandardNormal), rng.sample(rand_distr::StandardNormal))
    });
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    ChiMatrix { n, chi: m.scale(1.0 / tr) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{basis_ket, diag, outer, DensityOperator};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    /// Direct a-coefficient oracle: builds χ by summing outer products of
    /// the coefficient vectors of each Kraus operator, using matrix traces.
    fn chi_oracle(ch: &KrausChannel) -> ComplexMatrix {
        let basis = pauli_basis(ch.n()).unwrap();
        let d = ch.dim() as f64;
        let mut chi = ComplexMatrix::zeros(basis.len(), basis.len());
        for a in ch.operators() {
            let v = nalgebra::DVector::from_iterator(basis.len(), basis.iter().map(|e| (e.adjoint() * a).trace() / d));
            chi += &v * v.adjoint();
        }
        chi
    }

    #[test]
    fn identity_channel_chi() {
        let chi = kraus_to_chi(&named_channel(&ChannelSpec::Identity).unwrap());
        assert!(close(chi.matrix(), &diag(&[1.0, 0.0, 0.0, 0.0]), 1e-15));
    }

    #[test]
    fn bit_flip_chi() {
        let ch = named_channel(&ChannelSpec::BitFlip(0.25)).unwrap();
        let chi = kraus_to_chi(&ch);
        assert!(close(chi.matrix(), &diag(&[0.75, 0.25, 0.0, 0.0]), 1e-15));
        assert!(close(chi.matrix(), &chi_oracle(&ch), 1e-15));
    }

    #[test]
    fn amplitude_damping_chi_matches_analytic_expansion() {
        let g: f64 = 0.2;
        let s = (1.0 - g).sqrt();
        let chi = kraus_to_chi(&named_channel(&ChannelSpec::AmplitudeDamping(g)).unwrap());
        assert!((chi.get(0, 0).re - (1.0 + s).powi(2) / 4.0).abs() < 1e-15);
        assert!((chi.get(0, 0).re - 0.897214).abs() < 1e-6);
        assert!((chi.get(3, 3).re - 0.002786).abs() < 1e-6);
        assert!((chi.get(0, 3) - c64(0.05, 0.0)).norm() < 1e-15);
        assert!((chi.get(1, 1).re - 0.05).abs() < 1e-15 && (chi.get(2, 2).re - 0.05).abs() < 1e-15);
        assert!((chi.get(1, 2) - c64(0.0, -0.05)).norm() < 1e-15);
    }

    #[test]
    fn depolarizing_and_rotation_chi() {
        let dep = kraus_to_chi(&named_channel(&ChannelSpec::Depolarizing(0.3)).unwrap());
        assert!(close(dep.matrix(), &diag(&[0.7, 0.1, 0.1, 0.1]), 1e-15));
        let zero = kraus_to_chi(&named_channel(&ChannelSpec::Depolarizing(0.0)).unwrap());
        assert!(close(zero.matrix(), &diag(&[1.0, 0.0, 0.0, 0.0]), 1e-15));
        let rot = ChannelSpec::Unitary { axis: Axis::Z, angle: std::f64::consts::PI };
        let chi = kraus_to_chi(&named_channel(&rot).unwrap());
        assert!(close(chi.matrix(), &diag(&[0.0, 0.0, 0.0, 1.0]), 1e-15));
    }

    #[test]
    fn chi_to_kraus_inverts_identity_and_bit_flip() {
        let id = chi_to_kraus(&ChiMatrix::new(1, diag(&[1.0, 0.0, 0.0, 0.0])).unwrap()).unwrap();
        assert_eq!(id.operators().len(), 1);
        let a = &id.operators()[0];
        let phase = a[(0, 0)];
        assert!(close(a, &(ComplexMatrix::identity(2, 2) * phase), 1e-14) && (phase.norm() - 1.0).abs() < 1e-14);

        let bf = chi_to_kraus(&ChiMatrix::new(1, diag(&[0.75, 0.25, 0.0, 0.0])).unwrap()).unwrap();
        let reference = named_channel(&ChannelSpec::BitFlip(0.25)).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let unit = outer(&basis_ket(2, i)) * outer(&basis_ket(2, j));
                let lhs = bf.apply_raw(&unit, 1).unwrap();
                let rhs = reference.apply_raw(&unit, 1).unwrap();
                assert!(close(&lhs, &rhs, 1e-14));
            }
        }
    }

    #[test]
    fn chi_to_kraus_amplitude_damping_action() {
        let chi = kraus_to_chi(&named_channel(&ChannelSpec::AmplitudeDamping(0.2)).unwrap());
        let k = chi_to_kraus(&chi).unwrap();
        let out = k.apply_raw(&diag(&[0.0, 1.0]), 1).unwrap();
        assert!(close(&out, &diag(&[0.2, 0.8]), 1e-14));
    }

    #[test]
    fn chi_to_kraus_rejects_negative_chi() {
        let bad = ChiMatrix::new(1, diag(&[1.0, -0.01, 0.0, 0.0])).unwrap();
        match chi_to_kraus(&bad) {
            Err(QptError::Validity(msg)) => assert!(msg.contains("-1e-2")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn round_trip_on_random_psd_chi() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let chi = random_psd_chi(1, &mut rng);
            let back = kraus_to_chi(&chi_to_kraus(&chi).unwrap());
            assert!(back.frobenius_distance(&chi) < 1e-8);
        }
    }

    #[test]
    fn apply_bit_flip_to_bell_state() {
        let ch = named_channel(&ChannelSpec::BitFlip(0.25)).unwrap();
        let out = apply_channel(&ch, &DensityOperator::phi_plus(1), 2).unwrap();
        let h = 0.5f64.sqrt();
        let phi = nalgebra::DVector::from_vec(vec![c64(h, 0.0), ZERO, ZERO, c64(h, 0.0)]);
        let psi = nalgebra::DVector::from_vec(vec![ZERO, c64(h, 0.0), c64(h, 0.0), ZERO]);
        let expected = outer(&phi).scale(0.75) + outer(&psi).scale(0.25);
        assert!(close(out.matrix(), &expected, 1e-15));
    }

    #[test]
    fn apply_amplitude_damping_to_excited_state() {
        let g = 0.35;
        let ch = named_channel(&ChannelSpec::AmplitudeDamping(g)).unwrap();
        let out = apply_channel(&ch, &DensityOperator::basis(2, 1).unwrap(), 1).unwrap();
        assert!(close(out.matrix(), &diag(&[g, 1.0 - g]), 1e-15));
    }

    #[test]
    fn apply_rejects_dimension_mismatch() {
        let ch = named_channel(&ChannelSpec::Identity).unwrap();
        let rho = DensityOperator::maximally_mixed(8).unwrap();
        assert!(matches!(apply_channel(&ch, &rho, 2), Err(QptError::Size(_))));
    }

    #[test]
    fn kraus_and_chi_actions_agree_for_library() {
        let specs = [
            ChannelSpec::Identity,
            ChannelSpec::BitFlip(0.25),
            ChannelSpec::Depolarizing(0.3),
            ChannelSpec::AmplitudeDamping(0.2),
            ChannelSpec::PhaseDamping(0.4),
            ChannelSpec::Unitary { axis: Axis::Y, angle: 1.1 },
        ];
        for spec in &specs {
            let k = named_channel(spec).unwrap();
            let chi = kraus_to_chi(&k);
            for i in 0..2 {
                for j in 0..2 {
                    let unit = basis_ket(2, i) * basis_ket(2, j).adjoint();
                    assert!(close(&k.apply_raw(&unit, 1).unwrap(), &chi.apply_raw(&unit, 1).unwrap(), 1e-10), "{spec}");
                }
            }
        }
    }

    #[test]
    fn choi_state_properties() {
        let id = named_channel(&ChannelSpec::Identity).unwrap();
        assert!(close(choi_state(&id).unwrap().matrix(), DensityOperator::phi_plus(1).matrix(), 1e-15));
        // (1−p)ρ + p I/2 with p = 1 is depolarizing(3/4) in the Kraus parametrization.
        let full = named_channel(&ChannelSpec::Depolarizing(0.75)).unwrap();
        let rho = choi_state(&full).unwrap();
        assert!(close(rho.matrix(), &ComplexMatrix::identity(4, 4).scale(0.25), 1e-15));
        for spec in [ChannelSpec::AmplitudeDamping(0.2), ChannelSpec::PhaseDamping(0.3), ChannelSpec::BitFlip(0.1)] {
            let k = named_channel(&spec).unwrap();
            let rho = choi_state(&k).unwrap();
            assert!((rho.matrix().trace() - ONE).norm() < 1e-14);
            assert!(DensityOperator::new(rho.matrix().clone()).is_ok());
            let d = 2.0;
            assert!(close(&kraus_to_chi_matrix_units(&k), &rho.matrix().scale(d), 1e-14));
            let chi = choi_to_chi(rho.matrix(), 1).unwrap();
            assert!(chi.frobenius_distance(&kraus_to_chi(&k)) < 1e-14);
        }
    }

    #[test]
    fn validation_reports() {
        let id = named_channel(&ChannelSpec::Identity).unwrap();
        assert!(validate_channel(ChannelRef::Kraus(&id), 1e-9).all_pass());

        let bad = ChiMatrix::new(1, diag(&[1.0, -0.01, 0.0, 0.0])).unwrap();
        let r = validate_channel(ChannelRef::Chi(&bad), 1e-9);
        assert!(!r.is_cp.pass && (r.is_cp.value + 0.01).abs() < 1e-12);
        assert!(r.is_hermitian.pass);

        let half = KrausChannel::new(1, vec![ComplexMatrix::identity(2, 2).scale(0.5f64.sqrt())]).unwrap();
        let r = validate_channel(ChannelRef::Kraus(&half), 1e-9);
        assert!(!r.is_tp.pass && (r.is_tp.value - 0.5).abs() < 1e-12);
        assert!(r.is_cp.pass);
    }

    #[test]
    fn kraus_constructor_rejects_expansive_sets() {
        let two = ComplexMatrix::identity(2, 2).scale(2.0);
        assert!(matches!(KrausChannel::new(1, vec![two]), Err(QptError::Validity(_))));
        assert!(matches!(KrausChannel::new(1, vec![ComplexMatrix::identity(4, 4)]), Err(QptError::Size(_))));
    }

    #[test]
    fn named_channel_parameter_ranges() {
        assert!(matches!(named_channel(&ChannelSpec::BitFlip(1.5)), Err(QptError::Argument(_))));
        assert!(matches!(named_channel(&ChannelSpec::AmplitudeDamping(-0.1)), Err(QptError::Argument(_))));
    }

    #[test]
    fn spec_parsing_round_trips() {
        for text in ["identity", "bit_flip(0.25)", "depolarizing(0.3)", "amplitude_damping(0.2)", "phase_damping(0.1)", "unitary(z,3.5)", "kraus_file(ch.json)"] {
            let spec: ChannelSpec = text.parse().unwrap();
            assert_eq!(spec.to_string(), text);
        }
        assert!("bit_flip(x)".parse::<ChannelSpec>().is_err());
        assert!("warp(0.1)".parse::<ChannelSpec>().is_err());
        assert!("unitary(w,1)".parse::<ChannelSpec>().is_err());
    }

    #[test]
    fn random_cptp_channels_are_trace_preserving() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for rank in 1..=4 {
            let ch = random_cptp_channel(1, rank, &mut rng);
            assert!(ch.is_trace_preserving(1e-12));
            let chi = kraus_to_chi(&ch);
            assert!(close(&chi.trace_condition(), &ComplexMatrix::identity(2, 2), 1e-12));
        }
    }

    #[test]
    fn channel_file_round_trip() {
        let ch = named_channel(&ChannelSpec::AmplitudeDamping(0.3)).unwrap();
        let json = serde_json::to_string(&ChannelFile::from_channel(&ch)).unwrap();
        let back: ChannelFile = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_channel().unwrap(), ch);
        let chi = kraus_to_chi(&ch);
        assert_eq!(ChiMatrix::from_json(&chi.to_json()).unwrap(), chi);
    }
}
