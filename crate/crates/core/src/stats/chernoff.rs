//! Chernoff sample sizes and the total-measurement count.
//!
//! `Pr(|p_N − p| ⩾ Δp) ⩽ exp(−pNΔ²/3)`, so `N ⩾ 3/(pΔ²)·ln(1/ε)` shots
//! bound the relative error by `Δ` with confidence `1 − ε`. Under a uniform
//! distribution over `ν` outcomes this becomes `N ⩾ ν·C(Δ, ε)` with
//! `C = 3/Δ²·ln(1/ε)`.

use serde::Serialize;

use super::resources::{resource_table, Scheme};
use crate::error::{QptError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChernoffQuery {
    pub p: f64,
    pub delta: f64,
    pub epsilon: f64,
}

impl ChernoffQuery {
    pub fn new(p: f64, delta: f64, epsilon: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(QptError::Argument(format!("probability {p} must lie in (0, 1]")));
        }
        check_delta_eps(delta, epsilon)?;
        Ok(ChernoffQuery { p, delta, epsilon })
    }

    /// Uniform assumption `p = 1/ν`.
    pub fn uniform(nu: u64, delta: f64, epsilon: f64) -> Result<Self> {
        if nu == 0 {
            return Err(QptError::Argument("outcome count ν must be at least 1".into()));
        }
        Self::new(1.0 / nu as f64, delta, epsilon)
    }
}

fn check_delta_eps(delta: f64, epsilon: f64) -> Result<()> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(QptError::Argument(format!("relative error Δ = {delta} must lie in (0, 1]")));
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(QptError::Argument(format!("failure probability ε = {epsilon} must lie in (0, 1]")));
    }
    Ok(())
}

/// `exp(−pNΔ²/3)`.
pub fn chernoff_bound(q: &ChernoffQuery, shots: u64) -> f64 {
    (-q.p * shots as f64 * q.delta * q.delta / 3.0).exp()
}

/// `ceil(3/(pΔ²)·ln(1/ε))`.
pub fn required_samples(q: &ChernoffQuery) -> u64 {
    let n = 3.0 / (q.p * q.delta * q.delta) * (1.0 / q.epsilon).ln();
    // guard against 1798.0000000001-style rounding of exact products
    let r = n.round();
    if (n - r).abs() < 1e-9 * n.max(1.0) { r as u64 } else { n.ceil() as u64 }
}

/// Good-statistics form `ceil(3ν/Δ²·ln(1/ε))`.
pub fn good_statistics_samples(nu: u64, delta: f64, epsilon: f64) -> Result<u64> {
    Ok(required_samples(&ChernoffQuery::uniform(nu, delta, epsilon)?))
}

/// `N₂ = N₁ (ξ₂/ξ₁)²`, the sample size giving equal confidence intervals.
pub fn confidence_equalize(xi1: f64, n1: f64, xi2: f64) -> Result<f64> {
    if xi1 <= 0.0 || xi2 < 0.0 || n1 < 1.0 {
        return Err(QptError::Argument("need ξ₁ > 0, ξ₂ ⩾ 0 and N₁ ⩾ 1".into()));
    }
    Ok(n1 * (xi2 / xi1).powi(2))
}

/// What is assumed about the outcome probabilities of each setting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "p_min")]
pub enum ProbabilityAssumption {
    /// `p_i = 1/ν_k`: the good-statistics condition.
    Uniform,
    /// Every outcome of interest has probability at least `p_min`.
    Floor(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SettingBudget {
    pub nu: u64,
    pub settings: u64,
    pub shots_per_setting: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TotalMeasurements {
    pub scheme: Scheme,
    pub n: u32,
    /// Input preparations per measurement setting.
    pub inputs_per_setting: u64,
    pub budgets: Vec<SettingBudget>,
    /// `Σ_k N_k · N_inputs`.
    pub total: u64,
    pub assumption: ProbabilityAssumption,
    /// `16^n · C(Δ, ε)`, the common scaling under the uniform assumption.
    pub uniform_scaling: f64,
}

/// `N^(X) = Σ_k N_k · N_inputs,k`.
pub fn total_measurements(
    scheme: Scheme,
    n: u32,
    delta: f64,
    epsilon: f64,
    assumption: ProbabilityAssumption,
) -> Result<TotalMeasurements> {
    check_delta_eps(delta, epsilon)?;
    let row = resource_table(n)?.into_iter().find(|r| r.scheme == scheme).expect("every scheme has a row");
    let settings: u64 = row.nu.iter().map(|g| g.settings).sum();
    let inputs_per_setting = row.n_exp / settings;
    let mut budgets = Vec::new();
    let mut total = 0u64;
    for g in &row.nu {
        let shots = match assumption {
            ProbabilityAssumption::Uniform => good_statistics_samples(g.nu, delta, epsilon)?,
            ProbabilityAssumption::Floor(p) => required_samples(&ChernoffQuery::new(p, delta, epsilon)?),
        };
        total += shots * g.settings * inputs_per_setting;
        budgets.push(SettingBudget { nu: g.nu, settings: g.settings, shots_per_setting: shots });
    }
    let c = 3.0 / (delta * delta) * (1.0 / epsilon).ln();
    Ok(TotalMeasurements {
        scheme,
        n,
        inputs_per_setting,
        budgets,
        total,
        assumption,
        uniform_scaling: 16f64.powi(n as i32) * c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_values() {
        let q = ChernoffQuery::new(0.5, 0.1, 0.05).unwrap();
        assert!((chernoff_bound(&q, 1798) - (-2.996_666_666_666_667f64).exp()).abs() < 1e-12);
        assert!((chernoff_bound(&q, 1798) - 0.05).abs() < 1e-3);
        assert_eq!(chernoff_bound(&q, 0), 1.0);
        assert!(chernoff_bound(&q, 100) > chernoff_bound(&q, 101));
    }

    #[test]
    fn sample_sizes() {
        assert_eq!(required_samples(&ChernoffQuery::new(0.5, 0.1, 0.05).unwrap()), 1798);
        assert_eq!(good_statistics_samples(4, 0.1, 0.05).unwrap(), 3595);
        assert_eq!(good_statistics_samples(1, 0.1, 0.05).unwrap(), 899);
        assert_eq!(required_samples(&ChernoffQuery::new(0.5, 0.1, 1.0).unwrap()), 0);
        assert!(ChernoffQuery::new(0.0, 0.1, 0.05).is_err());
    }

    #[test]
    fn equalize() {
        assert_eq!(confidence_equalize(1.0, 100.0, 1.0).unwrap(), 100.0);
        assert_eq!(confidence_equalize(1.0, 100.0, 2.0).unwrap(), 400.0);
        assert_eq!(confidence_equalize(0.5, 1000.0, 1.0).unwrap(), 4000.0);
        assert!(confidence_equalize(0.0, 100.0, 1.0).is_err());
    }

    #[test]
    fn totals() {
        let u = ProbabilityAssumption::Uniform;
        assert_eq!(total_measurements(Scheme::Dcqd, 1, 0.1, 0.05, u).unwrap().total, 14380);
        assert_eq!(total_measurements(Scheme::Sqpt, 1, 0.1, 0.05, u).unwrap().total, 14384);
        let mub = total_measurements(Scheme::AaptMub, 1, 0.1, 0.05, u).unwrap();
        assert_eq!(mub.total, 4 * good_statistics_samples(3, 0.1, 0.05).unwrap() + 3595);
        let floor = total_measurements(Scheme::Dcqd, 1, 0.1, 0.05, ProbabilityAssumption::Floor(0.5)).unwrap();
        assert_eq!(floor.total, 4 * 1798);
        for n in [4, 8] {
            let d = total_measurements(Scheme::Dcqd, n, 0.1, 0.05, u).unwrap().total as f64;
            let s = total_measurements(Scheme::Sqpt, n, 0.1, 0.05, u).unwrap().total as f64;
            assert!((d / s - 1.0).abs() < 0.01);
        }
    }
}
