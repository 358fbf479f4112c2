//! Ancilla-assisted tomography with mutually unbiased bases.
//!
//! The `4^m − 1` nontrivial Pauli strings on `m` qubits split into `2^m + 1`
//! classes of `2^m − 1` commuting strings. The joint eigenbases of the
//! classes are mutually unbiased, and measuring all of them determines a
//! state through `ρ = Σ_k Σ_i p_ki Π_ki − I`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::channels::{apply_channel, choi_to_chi, ChiMatrix, QuantumChannel};
use crate::error::{QptError, Result};
use crate::measurement::{measure_setting, Mode, Observable, OutcomeHistogram};
use crate::qcore::{hermitian_eigen, outer, pauli_strings, ComplexMatrix, ComplexVector, DensityOperator, PauliString};

pub const MAX_MUB_QUBITS: usize = 3;

/// Unbiasedness tolerance used by [`MubFamily::verify`].
pub const OVERLAP_TOL: f64 = 1e-10;

const TABLE_TWO_QUBITS: [[&str; 3]; 5] = [
    ["ZI", "IZ", "ZZ"],
    ["XI", "IX", "XX"],
    ["YI", "IY", "YY"],
    ["XZ", "YX", "ZY"],
    ["XY", "YZ", "ZX"],
];

/// `d + 1` mutually unbiased bases with their Pauli classes.
#[derive(Debug, Clone)]
pub struct MubFamily {
    pub m: usize,
    pub dim: usize,
    pub pauli_classes: Vec<Vec<PauliString>>,
    /// `bases[k]` is the joint eigenbasis of `pauli_classes[k]`.
    pub bases: Vec<Vec<ComplexVector>>,
}

impl MubFamily {
    /// Largest `||⟨a|b⟩|² − 1/d|` over vectors from distinct bases.
    pub fn max_overlap_deviation(&self) -> f64 {
        let target = 1.0 / self.dim as f64;
        let mut worst = 0.0f64;
        for (k, bk) in self.bases.iter().enumerate() {
            for bl in &self.bases[k + 1..] {
                for a in bk {
                    for b in bl {
                        worst = worst.max(((a.adjoint() * b)[(0, 0)].norm_sqr() - target).abs());
                    }
                }
            }
        }
        worst
    }

    /// Checks the partition, the eigenbasis property and unbiasedness.
    pub fn verify(&self) -> Result<()> {
        let expected = (1usize << (2 * self.m)) - 1;
        let mut seen = BTreeSet::new();
        for class in &self.pauli_classes {
            if class.len() != self.dim - 1 {
                return Err(QptError::Construction(format!("class of size {} (want {})", class.len(), self.dim - 1)));
            }
            for (i, p) in class.iter().enumerate() {
                if p.is_identity() || !seen.insert(p.index()) {
                    return Err(QptError::Construction(format!("{p} is repeated or trivial")));
                }
                if class[i + 1..].iter().any(|q| !p.commutes_with(q)) {
                    return Err(QptError::Construction(format!("class containing {p} does not commute")));
                }
            }
        }
        if seen.len() != expected {
            return Err(QptError::Construction(format!("classes cover {} of {expected} strings", seen.len())));
        }
        for (class, basis) in self.pauli_classes.iter().zip(&self.bases) {
            for p in class {
                let pm = p.matrix();
                for v in basis {
                    let pv = &pm * v;
                    let lam = (v.adjoint() * &pv)[(0, 0)];
                    if (pv - v * lam).norm() > 1e-10 {
                        return Err(QptError::Construction(format!("basis vector is not an eigenvector of {p}")));
                    }
                }
            }
        }
        let dev = self.max_overlap_deviation();
        if dev >= OVERLAP_TOL {
            return Err(QptError::Construction(format!("bases are biased: overlap deviation {dev:e}")));
        }
        Ok(())
    }

    /// Rank-one projective measurement for basis `k`.
    pub fn observable(&self, k: usize) -> Observable {
        Observable::from_basis(&self.bases[k]).expect("orthonormal basis")
    }

    pub fn num_settings(&self) -> usize {
        self.bases.len()
    }
}

/// Joint eigenbasis of commuting strings from `Σ_j 3^j S_j`, whose spectrum
/// separates every sign pattern.
fn joint_eigenbasis(class: &[PauliString]) -> Vec<ComplexVector> {
    let dim = 1usize << class[0].num_qubits();
    let mut h = ComplexMatrix::zeros(dim, dim);
    let mut w = 1.0;
    for s in class {
        h += s.matrix().scale(w);
        w *= 3.0;
    }
    let eig = hermitian_eigen(&h);
    (0..dim).map(|i| eig.vector(i)).collect()
}

fn product_index(a: &PauliString, b: &PauliString) -> usize {
    a.mul(b).1.index()
}

/// All maximal commuting sets of nontrivial strings on `m` qubits, each as
/// a sorted index list, in lexicographic order.
fn maximal_commuting_sets(m: usize) -> Result<Vec<Vec<usize>>> {
    let strings = pauli_strings(m)?;
    let mut found = BTreeSet::new();
    // closure of m independent commuting generators
    fn extend(
        strings: &[PauliString],
        gens: &mut Vec<usize>,
        span: &BTreeSet<usize>,
        m: usize,
        found: &mut BTreeSet<Vec<usize>>,
    ) {
        if gens.len() == m {
            found.insert(span.iter().copied().filter(|&i| i != 0).collect());
            return;
        }
        let start = gens.last().map_or(1, |&g| g + 1);
        for c in start..strings.len() {
            if span.contains(&c) || gens.iter().any(|&g| !strings[g].commutes_with(&strings[c])) {
                continue;
            }
            let mut next = span.clone();
            for &s in span {
                next.insert(product_index(&strings[s], &strings[c]));
            }
            gens.push(c);
            extend(strings, gens, &next, m, found);
            gens.pop();
        }
    }
    let mut gens = Vec::new();
    let span: BTreeSet<usize> = [0].into_iter().collect();
    extend(&strings, &mut gens, &span, m, &mut found);
    Ok(found.into_iter().collect())
}

/// Exact cover of the nontrivial strings by maximal commuting sets, always
/// branching on the smallest uncovered index.
fn partition_search(m: usize) -> Result<Vec<Vec<usize>>> {
    let sets = maximal_commuting_sets(m)?;
    let total = (1usize << (2 * m)) - 1;
    fn go(sets: &[Vec<usize>], covered: &mut Vec<bool>, chosen: &mut Vec<usize>, total: usize) -> bool {
        let Some(first) = (1..=total).find(|&i| !covered[i]) else {
            return true;
        };
        for (si, s) in sets.iter().enumerate() {
            if !s.contains(&first) || s.iter().any(|&i| covered[i]) {
                continue;
            }
            s.iter().for_each(|&i| covered[i] = true);
            chosen.push(si);
            if go(sets, covered, chosen, total) {
                return true;
            }
            chosen.pop();
            s.iter().for_each(|&i| covered[i] = false);
        }
        false
    }
    let mut covered = vec![false; total + 1];
    let mut chosen = Vec::new();
    if !go(&sets, &mut covered, &mut chosen, total) {
        return Err(QptError::Construction(format!("no commuting partition found for m={m}")));
    }
    Ok(chosen.into_iter().map(|i| sets[i].clone()).collect())
}

pub fn mub_construct(m: usize) -> Result<MubFamily> {
    if m == 0 || m > MAX_MUB_QUBITS {
        return Err(QptError::Size(format!("MUB construction supports 1..={MAX_MUB_QUBITS} qubits, got {m}")));
    }
    let classes: Vec<Vec<PauliString>> = match m {
        1 => ["Z", "X", "Y"].iter().map(|s| vec![s.parse().expect("label")]).collect(),
        2 => TABLE_TWO_QUBITS.iter().map(|c| c.iter().map(|s| s.parse().expect("label")).collect()).collect(),
        _ => partition_search(m)?
            .into_iter()
            .map(|c| c.into_iter().map(|i| PauliString::from_index(i, m)).collect())
            .collect(),
    };
    let bases = classes.iter().map(|c| joint_eigenbasis(c)).collect();
    let fam = MubFamily { m, dim: 1 << m, pauli_classes: classes, bases };
    fam.verify()?;
    Ok(fam)
}

/// Result of a MUB state reconstruction.
#[derive(Debug, Clone)]
pub struct MubTomography {
    /// Linear-inversion estimate; Hermitian with unit trace, not
    /// necessarily positive in sampled mode.
    pub estimate: ComplexMatrix,
    pub probabilities: Vec<Vec<f64>>,
    pub histograms: Vec<OutcomeHistogram>,
    pub settings: usize,
}

pub fn mub_state_tomography(rho: &DensityOperator, fam: &MubFamily, mode: Mode) -> Result<MubTomography> {
    mode.validate()?;
    if rho.dim() != fam.dim {
        return Err(QptError::Size(format!("state has dimension {} but the family has {}", rho.dim(), fam.dim)));
    }
    let d = fam.dim;
    let mut estimate = -ComplexMatrix::identity(d, d);
    let mut probabilities = Vec::with_capacity(fam.num_settings());
    let mut histograms = Vec::new();
    for (k, basis) in fam.bases.iter().enumerate() {
        let label = format!("mub{k}");
        let (p, h) = measure_setting(rho, &fam.observable(k), mode, k as u64, &label)?;
        for (v, pk) in basis.iter().zip(&p) {
            estimate += outer(v).scale(*pk);
        }
        probabilities.push(p);
        histograms.extend(h);
    }
    Ok(MubTomography { estimate, probabilities, histograms, settings: fam.num_settings() })
}

#[derive(Debug, Clone)]
pub struct MubQptResult {
    pub chi: ChiMatrix,
    pub choi_estimate: ComplexMatrix,
    pub settings: usize,
    pub total_shots: u64,
}

/// Channel tomography from MUB measurements on the Choi state.
pub fn mub_qpt<C: QuantumChannel + ?Sized>(channel: &C, mode: Mode) -> Result<MubQptResult> {
    let n = channel.num_qubits();
    if n != 1 {
        return Err(QptError::Scope(format!("MUB channel tomography covers one principal qubit, got {n}")));
    }
    let fam = mub_construct(2 * n)?;
    let out = apply_channel(channel, &DensityOperator::phi_plus(n), 1 << n)?;
    let tomo = mub_state_tomography(&out, &fam, mode)?;
    let chi = choi_to_chi(&tomo.estimate, n)?;
    Ok(MubQptResult {
        chi,
        choi_estimate: tomo.estimate,
        settings: tomo.settings,
        total_shots: mode.shots().map_or(0, |s| s * tomo.settings as u64),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GateLocality {
    Nonlocal,
    NearestNeighbor,
}

/// Order-of-magnitude gate count for one MUB measurement circuit, in units
/// of elementary gates with unit constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GateCost {
    pub units: u64,
    pub order: &'static str,
}

pub fn mub_gate_cost(n: u32, locality: GateLocality) -> GateCost {
    let n = u64::from(n);
    match locality {
        GateLocality::Nonlocal => GateCost { units: n * n, order: "O(n^2)" },
        GateLocality::NearestNeighbor => GateCost { units: n * n * n, order: "O(n^3)" },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{kraus_to_chi, named_channel, random_cptp_channel, ChannelSpec};
    use crate::qcore::{c64, diag, random_density_operator};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn families_are_valid() {
        for (m, classes) in [(1, 3), (2, 5), (3, 9)] {
            let f = mub_construct(m).unwrap();
            assert_eq!(f.bases.len(), classes);
            assert!(f.max_overlap_deviation() < 1e-10);
        }
        assert!(matches!(mub_construct(4), Err(QptError::Size(_))));
    }

    #[test]
    fn two_qubit_partition_is_the_table() {
        let f = mub_construct(2).unwrap();
        let labels: Vec<Vec<String>> =
            f.pauli_classes.iter().map(|c| c.iter().map(|p| p.to_string()).collect()).collect();
        assert_eq!(labels[0], vec!["ZI", "IZ", "ZZ"]);
        assert_eq!(labels[3], vec!["XZ", "YX", "ZY"]);
    }

    #[test]
    fn search_partition_is_valid_for_two_qubits_too() {
        let sets = maximal_commuting_sets(2).unwrap();
        assert_eq!(sets.len(), 15);
        assert_eq!(partition_search(2).unwrap().len(), 5);
        assert_eq!(maximal_commuting_sets(3).unwrap().len(), 135);
    }

    #[test]
    fn tomography_examples() {
        let f = mub_construct(2).unwrap();
        let mixed = DensityOperator::maximally_mixed(4).unwrap();
        let t = mub_state_tomography(&mixed, &f, Mode::Exact).unwrap();
        assert_eq!(t.settings, 5);
        assert!((&t.estimate - mixed.matrix()).norm() < 1e-12);
        assert!(t.probabilities.iter().flatten().all(|p| (p - 0.25).abs() < 1e-12));
        let phi = DensityOperator::phi_plus(1);
        let t = mub_state_tomography(&phi, &f, Mode::Exact).unwrap();
        assert!((&t.estimate - phi.matrix()).norm() < 1e-10);
    }

    #[test]
    fn tomography_is_identity_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for m in 1..=3 {
            let f = mub_construct(m).unwrap();
            for _ in 0..20 {
                let rho = random_density_operator(f.dim, &mut rng);
                let t = mub_state_tomography(&rho, &f, Mode::Exact).unwrap();
                assert!((&t.estimate - rho.matrix()).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn channel_tomography() {
        let id = mub_qpt(&named_channel(&ChannelSpec::Identity).unwrap(), Mode::Exact).unwrap();
        assert_eq!(id.settings, 5);
        assert!((id.chi.matrix() - diag(&[1.0, 0.0, 0.0, 0.0])).norm() < 1e-8);
        let ad = mub_qpt(&named_channel(&ChannelSpec::AmplitudeDamping(0.2)).unwrap(), Mode::Exact).unwrap();
        assert!((ad.chi.get(0, 3) - c64(0.05, 0.0)).norm() < 1e-8);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for i in 0..10 {
            let c = random_cptp_channel(1, 1 + i % 4, &mut rng);
            let r = mub_qpt(&c, Mode::Exact).unwrap();
            assert!(r.chi.frobenius_distance(&kraus_to_chi(&c)) < 1e-8);
        }
    }

    #[test]
    fn gate_costs() {
        assert_eq!(mub_gate_cost(2, GateLocality::Nonlocal).units, 4);
        assert_eq!(mub_gate_cost(2, GateLocality::NearestNeighbor).units, 8);
        assert_eq!(mub_gate_cost(4, GateLocality::Nonlocal).units / mub_gate_cost(2, GateLocality::Nonlocal).units, 4);
        assert_eq!(
            mub_gate_cost(4, GateLocality::NearestNeighbor).units / mub_gate_cost(2, GateLocality::NearestNeighbor).units,
            8
        );
    }
}
