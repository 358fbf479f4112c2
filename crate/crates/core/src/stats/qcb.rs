//! Quantum Chernoff bound `Λ = min_{0⩽α⩽1} Tr[ρ^α σ^{1−α}]`.
//!
//! Powers act on eigenvalues; zero eigenvalues give `0^α = 0` for `α > 0`,
//! and at `α = 0` the power is the support projector.

use serde::Serialize;

use crate::channels::ChiMatrix;
use crate::error::{QptError, Result};
use crate::qcore::{hermitian_eigen, ComplexMatrix};

const GRID: usize = 101;
const ZERO_EIGEN: f64 = 1e-12;
const PSD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QcbResult {
    pub value: f64,
    pub alpha: f64,
}

struct Spectral {
    values: Vec<f64>,
    /// `|⟨u_i|v_j⟩|²`
    overlaps: Vec<Vec<f64>>,
    other: Vec<f64>,
}

fn checked_spectrum(m: &ComplexMatrix, name: &str) -> Result<crate::qcore::HermitianEigen> {
    let eig = hermitian_eigen(m);
    if eig.values[0] < -PSD_TOL {
        return Err(QptError::Validity(format!("{name} has eigenvalue {} < 0", eig.values[0])));
    }
    let tr: f64 = eig.values.iter().sum();
    if (tr - 1.0).abs() > 1e-8 {
        return Err(QptError::Validity(format!("{name} has trace {tr}, expected 1")));
    }
    Ok(eig)
}

fn power(x: f64, a: f64) -> f64 {
    if x <= ZERO_EIGEN {
        0.0
    } else if a == 0.0 {
        1.0
    } else {
        x.powf(a)
    }
}

impl Spectral {
    fn eval(&self, alpha: f64) -> f64 {
        let mut s = 0.0;
        for (i, &l) in self.values.iter().enumerate() {
            let la = power(l, alpha);
            if la == 0.0 {
                continue;
            }
            for (j, &m) in self.other.iter().enumerate() {
                s += la * power(m, 1.0 - alpha) * self.overlaps[i][j];
            }
        }
        s
    }
}

pub fn quantum_chernoff_bound(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<QcbResult> {
    if rho.shape() != sigma.shape() {
        return Err(QptError::Size("states differ in dimension".into()));
    }
    let er = checked_spectrum(rho, "first state")?;
    let es = checked_spectrum(sigma, "second state")?;
    let d = rho.nrows();
    let overlaps = (0..d)
        .map(|i| {
            let u = er.vector(i);
            (0..d).map(|j| (u.adjoint() * es.vector(j))[(0, 0)].norm_sqr()).collect()
        })
        .collect();
    let f = Spectral { values: er.values.clone(), overlaps, other: es.values.clone() };

    let mut best = QcbResult { value: f64::INFINITY, alpha: 0.0 };
    for k in 0..GRID {
        let a = k as f64 / (GRID - 1) as f64;
        let v = f.eval(a);
        if v < best.value {
            best = QcbResult { value: v, alpha: a };
        }
    }
    // golden-section refinement on the open bracket around the grid minimum
    let h = 1.0 / (GRID - 1) as f64;
    let (mut lo, mut hi) = ((best.alpha - h).max(1e-12), (best.alpha + h).min(1.0 - 1e-12));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f.eval(x1), f.eval(x2));
    for _ in 0..60 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f.eval(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f.eval(x2);
        }
    }
    for (a, v) in [(x1, f1), (x2, f2)] {
        if v < best.value {
            best = QcbResult { value: v, alpha: a };
        }
    }
    best.value = best.value.clamp(0.0, 1.0);
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiDistance {
    pub frobenius: f64,
    /// QCB of the trace-normalized pair.
    pub qcb: f64,
}

pub fn chi_distance_metrics(a: &ChiMatrix, b: &ChiMatrix) -> Result<ChiDistance> {
    if a.n() != b.n() {
        return Err(QptError::Size("χ matrices act on different registers".into()));
    }
    let normalize = |c: &ChiMatrix| -> Result<ComplexMatrix> {
        let tr = c.matrix().trace().re;
        if tr <= 0.0 {
            return Err(QptError::Validity("χ has non-positive trace".into()));
        }
        let m = c.matrix();
        Ok((m + m.adjoint()).scale(0.5 / tr))
    };
    Ok(ChiDistance {
        frobenius: a.frobenius_distance(b),
        qcb: quantum_chernoff_bound(&normalize(a)?, &normalize(b)?)?.value,
    })
}
