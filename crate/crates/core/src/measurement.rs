//! Projective measurements, exact outcome probabilities and seeded
//! finite-shot sampling.
//!
//! Every random draw comes from a ChaCha8 stream seeded with an explicit
//! 64-bit value; per-setting and per-trial seeds are derived with
//! [`derive_seed`], so results do not depend on scheduling.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{QptError, Result};
use crate::qcore::{
    c64, hermitian_eigen, is_hermitian, outer, trace_product, ComplexMatrix, ComplexVector, DensityOperator,
    PauliString,
};

/// Hermitian observable with merged spectral projectors.
#[derive(Debug, Clone)]
pub struct Observable {
    matrix: ComplexMatrix,
    eigenvalues: Vec<f64>,
    projectors: Vec<ComplexMatrix>,
}

impl Observable {
    /// Diagonalizes `matrix`; eigenvalues closer than `tol` share a projector.
    pub fn from_hermitian(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        if !is_hermitian(&matrix, tol) {
            return Err(QptError::Validity("observable is not Hermitian".into()));
        }
        let eig = hermitian_eigen(&matrix);
        let mut eigenvalues: Vec<f64> = Vec::new();
        let mut projectors: Vec<ComplexMatrix> = Vec::new();
        for (i, &lam) in eig.values.iter().enumerate() {
            let p = outer(&eig.vector(i));
            match eigenvalues.last() {
                Some(&last) if (lam - last).abs() <= tol => {
                    let k = projectors.len() - 1;
                    projectors[k] += p;
                }
                _ => {
                    eigenvalues.push(lam);
                    projectors.push(p);
                }
            }
        }
        Ok(Observable { matrix, eigenvalues, projectors })
    }

    /// Builds `Σ λ_i P_i` from given orthogonal projectors.
    pub fn from_spectral(eigenvalues: Vec<f64>, projectors: Vec<ComplexMatrix>) -> Result<Self> {
        if eigenvalues.len() != projectors.len() || projectors.is_empty() {
            return Err(QptError::Argument("eigenvalue and projector counts differ".into()));
        }
        let dim = projectors[0].nrows();
        let mut matrix = ComplexMatrix::zeros(dim, dim);
        for (lam, p) in eigenvalues.iter().zip(&projectors) {
            matrix += p.scale(*lam);
        }
        Ok(Observable { matrix, eigenvalues, projectors })
    }

    /// Rank-one projectors onto the columns of an orthonormal basis,
    /// labelled `0..d`.
    pub fn from_basis(vectors: &[ComplexVector]) -> Result<Self> {
        let eigenvalues = (0..vectors.len()).map(|i| i as f64).collect();
        Self::from_spectral(eigenvalues, vectors.iter().map(outer).collect())
    }

    /// Two-outcome measurement of a Pauli string, `(I ± P)/2`, ordered `(+1, −1)`.
    /// The identity string has the single outcome `+1`.
    pub fn pauli(p: &PauliString) -> Self {
        let m = p.matrix();
        let dim = m.nrows();
        let id = ComplexMatrix::identity(dim, dim);
        if p.is_identity() {
            return Observable { matrix: m, eigenvalues: vec![1.0], projectors: vec![id] };
        }
        let plus = (&id + &m).scale(0.5);
        let minus = (&id - &m).scale(0.5);
        Observable { matrix: m, eigenvalues: vec![1.0, -1.0], projectors: vec![plus, minus] }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    pub fn num_outcomes(&self) -> usize {
        self.projectors.len()
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

const BELL_AMP: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Bell kets in outcome order `(Φ+, Ψ+, Ψ−, Φ−)`.
pub fn bell_kets() -> [ComplexVector; 4] {
    let v = |a: [f64; 4]| ComplexVector::from_iterator(4, a.iter().map(|&x| c64(x * BELL_AMP, 0.0)));
    [v([1.0, 0.0, 0.0, 1.0]), v([0.0, 1.0, 1.0, 0.0]), v([0.0, 1.0, -1.0, 0.0]), v([1.0, 0.0, 0.0, -1.0])]
}

/// Bell-state measurement with outcomes `0..3` for `Φ+, Ψ+, Ψ−, Φ−`.
///
/// These are the joint eigenstates of `Z^A Z^B` and `X^A X^B` with
/// eigenvalue pairs `(+,+), (−,+), (−,−), (+,−)`. Outcome `m` flags the
/// Pauli error `E_m` on qubit A.
pub fn bell_observable() -> Observable {
    Observable::from_basis(&bell_kets()).expect("four Bell projectors")
}

/// `p_i = Tr(ρ P_i)`, clipped to `[0, 1]` and renormalized.
pub fn outcome_probabilities(rho: &DensityOperator, obs: &Observable) -> Result<Vec<f64>> {
    if rho.dim() != obs.dim() {
        return Err(QptError::Size(format!("state has dimension {} but observable has {}", rho.dim(), obs.dim())));
    }
    let mut p: Vec<f64> = obs.projectors.iter().map(|proj| trace_product(rho.matrix(), proj).re).collect();
    for x in &mut p {
        if *x < 0.0 {
            *x = 0.0;
        }
    }
    let total: f64 = p.iter().sum();
    if total > 0.0 {
        for x in &mut p {
            *x = (*x / total).min(1.0);
        }
    }
    Ok(p)
}

/// Seeded ChaCha8 generator. Same seed, same stream on every platform.
#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub const ALGORITHM: &'static str = "chacha8";

    pub fn new(seed: u64) -> Self {
        RandomSource { seed, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn algorithm_label(&self) -> &'static str {
        Self::ALGORITHM
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

/// SplitMix64 finalizer over `(master, index)`: the seed for trial or
/// setting `index`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counts per outcome from a finite ensemble.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeHistogram {
    pub counts: Vec<u64>,
    pub total: u64,
    pub seed: u64,
    pub setting_label: String,
}

impl OutcomeHistogram {
    pub fn frequencies(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64 / self.total as f64).collect()
    }

    /// CSV row: `setting_label,seed,N,count_0,...`.
    pub fn csv_row(&self) -> String {
        let mut row = format!("{},{},{}", self.setting_label, self.seed, self.total);
        for c in &self.counts {
            row.push_str(&format!(",{c}"));
        }
        row
    }
}

/// Writes histograms with a header sized for the widest outcome space.
pub fn write_histograms_csv<W: Write>(mut w: W, hists: &[OutcomeHistogram]) -> Result<()> {
    let width = hists.iter().map(|h| h.counts.len()).max().unwrap_or(0);
    let mut header = String::from("setting_label,seed,N");
    for i in 0..width {
        header.push_str(&format!(",count_{i}"));
    }
    writeln!(w, "{header}")?;
    for h in hists {
        writeln!(w, "{}", h.csv_row())?;
    }
    Ok(())
}

/// Multinomial draw by sequential conditional binomials.
pub fn sample_counts<R: Rng + ?Sized>(probs: &[f64], shots: u64, rng: &mut R) -> Vec<u64> {
    let mut counts = vec![0u64; probs.len()];
    let mut remaining = shots;
    let mut mass = 1.0f64;
    for (i, &p) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if i + 1 == probs.len() {
            counts[i] = remaining;
            break;
        }
        let q = if mass > 0.0 { (p / mass).clamp(0.0, 1.0) } else { 0.0 };
        let k = Binomial::new(remaining, q).expect("probability clamped to [0,1]").sample(rng);
        counts[i] = k;
        remaining -= k;
        mass -= p;
    }
    counts
}

/// Draws `shots` outcomes of `obs` on `rho`.
pub fn sample_outcomes(
    rho: &DensityOperator,
    obs: &Observable,
    shots: u64,
    rng: &mut RandomSource,
    setting_label: &str,
) -> Result<OutcomeHistogram> {
    if shots == 0 {
        return Err(QptError::Argument("shots must be at least 1".into()));
    }
    let p = outcome_probabilities(rho, obs)?;
    let seed = rng.seed();
    let counts = sample_counts(&p, shots, rng.rng());
    Ok(OutcomeHistogram { counts, total: shots, seed, setting_label: setting_label.to_string() })
}

/// Empirical mean `μ = Σ λ_i f_i` and deviation `ξ = √(Σ λ_i² f_i − μ²)`.
pub fn empirical_mean_and_deviation(h: &OutcomeHistogram, eigenvalues: &[f64]) -> Result<(f64, f64)> {
    if h.counts.len() != eigenvalues.len() {
        return Err(QptError::Argument(format!(
            "{} counts but {} eigenvalues",
            h.counts.len(),
            eigenvalues.len()
        )));
    }
    let f = h.frequencies();
    let mu: f64 = f.iter().zip(eigenvalues).map(|(fi, l)| fi * l).sum();
    let second: f64 = f.iter().zip(eigenvalues).map(|(fi, l)| fi * l * l).sum();
    Ok((mu, (second - mu * mu).max(0.0).sqrt()))
}

/// How a scheme turns outcome probabilities into data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "mode")]
pub enum Mode {
    /// Use the exact Born probabilities.
    Exact,
    /// Draw `shots` outcomes per setting; setting `k` uses
    /// `derive_seed(seed, k)`.
    Sampled { shots: u64, seed: u64 },
}

impl Mode {
    pub fn shots(&self) -> Option<u64> {
        match self {
            Mode::Exact => None,
            Mode::Sampled { shots, .. } => Some(*shots),
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if let Mode::Sampled { shots: 0, .. } = self {
            return Err(QptError::Argument("sampled mode needs at least one shot per setting".into()));
        }
        Ok(())
    }
}

/// Frequencies for one measurement setting: exact probabilities, or a
/// seeded histogram in sampled mode.
pub fn measure_setting(
    rho: &DensityOperator,
    obs: &Observable,
    mode: Mode,
    setting_index: u64,
    label: &str,
) -> Result<(Vec<f64>, Option<OutcomeHistogram>)> {
    match mode {
        Mode::Exact => Ok((outcome_probabilities(rho, obs)?, None)),
        Mode::Sampled { shots, seed } => {
            let mut src = RandomSource::new(derive_seed(seed, setting_index));
            let h = sample_outcomes(rho, obs, shots, &mut src, label)?;
            Ok((h.frequencies(), Some(h)))
        }
    }
}

/// Estimate of `⟨P⟩` for a Pauli string from one setting.
pub fn pauli_expectation(rho: &DensityOperator, p: &PauliString, mode: Mode, setting_index: u64) -> Result<f64> {
    if p.is_identity() {
        return Ok(1.0);
    }
    let obs = Observable::pauli(p);
    let (f, _) = measure_setting(rho, &obs, mode, setting_index, &p.to_string())?;
    Ok(f[0] - f[1])
}
