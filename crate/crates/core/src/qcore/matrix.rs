use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QptError, Result};

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;
pub type ComplexVector = DVector<C64>;

/// Absolute tolerance used for Hermiticity, trace and positivity checks.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Largest matrix dimension accepted by constructors that can grow
/// exponentially (Kronecker products, Pauli bases).
pub const MAX_DIM: usize = 1 << 12;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Builds a matrix from row-major rows.
pub fn from_rows(rows: &[Vec<C64>]) -> ComplexMatrix {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    DMatrix::from_fn(r, c, |i, j| rows[i][j])
}

/// Builds a real diagonal matrix.
pub fn diag(values: &[f64]) -> ComplexMatrix {
    let n = values.len();
    DMatrix::from_fn(n, n, |i, j| if i == j { c64(values[i], 0.0) } else { ZERO })
}

/// Kronecker product `a ⊗ b`, with `a`'s index most significant.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let rows = a.nrows().checked_mul(b.nrows());
    let cols = a.ncols().checked_mul(b.ncols());
    match (rows, cols) {
        (Some(r), Some(c)) if r <= MAX_DIM && c <= MAX_DIM => Ok(a.kronecker(b)),
        _ => Err(QptError::Size(format!(
            "tensor product of {}x{} and {}x{} exceeds {MAX_DIM}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        ))),
    }
}

/// Kronecker product of a sequence of factors, left to right.
pub fn tensor_all<'a, I>(factors: I) -> Result<ComplexMatrix>
where
    I: IntoIterator<Item = &'a ComplexMatrix>,
{
    let mut acc = DMatrix::from_element(1, 1, ONE);
    for f in factors {
        acc = tensor_product(&acc, f)?;
    }
    Ok(acc)
}

/// Which factor of a bipartite space survives a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keep {
    A,
    B,
}

/// Partial trace of `m` on `H_A ⊗ H_B` with `dims = (dim_A, dim_B)`.
pub fn partial_trace(m: &ComplexMatrix, keep: Keep, dims: (usize, usize)) -> Result<ComplexMatrix> {
    let (da, db) = dims;
    if !m.is_square() || m.nrows() != da * db {
        return Err(QptError::Size(format!(
            "partial trace: {}x{} matrix does not match dims {da}x{db}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(match keep {
        Keep::A => DMatrix::from_fn(da, da, |i, j| (0..db).map(|k| m[(i * db + k, j * db + k)]).sum()),
        Keep::B => DMatrix::from_fn(db, db, |i, j| (0..da).map(|k| m[(k * db + i, k * db + j)]).sum()),
    })
}

/// Reorders the qubits of an operator on `k` qubits: qubit `j` of the result
/// is qubit `perm[j]` of the input.
pub fn permute_qubits(m: &ComplexMatrix, perm: &[usize]) -> Result<ComplexMatrix> {
    let k = perm.len();
    let dim = 1usize << k;
    if !m.is_square() || m.nrows() != dim {
        return Err(QptError::Size(format!("permutation of {k} qubits on a {}x{} matrix", m.nrows(), m.ncols())));
    }
    let mut seen = vec![false; k];
    for &p in perm {
        if p >= k || seen[p] {
            return Err(QptError::Argument(format!("{perm:?} is not a permutation")));
        }
        seen[p] = true;
    }
    let old_index = |x: usize| {
        let mut y = 0;
        for (j, &p) in perm.iter().enumerate() {
            let bit = (x >> (k - 1 - j)) & 1;
            y |= bit << (k - 1 - p);
        }
        y
    };
    let map: Vec<usize> = (0..dim).map(old_index).collect();
    Ok(DMatrix::from_fn(dim, dim, |i, j| m[(map[i], map[j])]))
}

/// `|v⟩⟨v|` for a column vector.
pub fn outer(v: &ComplexVector) -> ComplexMatrix {
    v * v.adjoint()
}

/// Computational basis ket `|index⟩` in dimension `dim`.
pub fn basis_ket(dim: usize, index: usize) -> ComplexVector {
    let mut v = DVector::from_element(dim, ZERO);
    v[index] = ONE;
    v
}

pub fn trace(m: &ComplexMatrix) -> C64 {
    m.trace()
}

/// Frobenius norm.
pub fn frobenius(m: &ComplexMatrix) -> f64 {
    m.norm()
}

/// Hilbert-Schmidt inner product `Tr(a† b)`.
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// `Tr(a b)` without forming the product.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Largest entry modulus.
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn is_hermitian(m: &ComplexMatrix, tol: f64) -> bool {
    m.is_square() && max_abs(&(m - m.adjoint())) <= tol
}

pub fn is_unitary(m: &ComplexMatrix, tol: f64) -> bool {
    m.is_square() && max_abs(&(m.adjoint() * m - DMatrix::identity(m.nrows(), m.ncols()))) <= tol
}

pub fn is_positive_semidefinite(m: &ComplexMatrix, tol: f64) -> bool {
    is_hermitian(m, tol) && hermitian_eigen(m).values.first().is_none_or(|&v| v >= -tol)
}

/// `(m + m†)/2`.
pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Spectral decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, matching `values`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, i: usize) -> ComplexVector {
        self.vectors.column(i).into_owned()
    }

    /// Rebuilds `Σ f(λ_i) |v_i⟩⟨v_i|`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let mut out = DMatrix::from_element(n, n, ZERO);
        for (i, &lam) in self.values.iter().enumerate() {
            let w = f(lam);
            if w != 0.0 {
                let v = self.vectors.column(i);
                out += (v * v.adjoint()).scale(w);
            }
        }
        out
    }
}

/// Eigendecomposition of the Hermitian part of `m`.
pub fn hermitian_eigen(m: &ComplexMatrix) -> HermitianEigen {
    let eig = hermitian_part(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    HermitianEigen { values, vectors }
}

pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Ratio of largest to smallest singular value (infinite when singular).
pub fn condition_number(m: &ComplexMatrix) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    }
}

/// Moore-Penrose pseudoinverse; singular values below `cutoff` are dropped.
pub fn pseudo_inverse(m: &ComplexMatrix, cutoff: f64) -> ComplexMatrix {
    let svd = m.clone().svd(true, true);
    let u = svd.u.as_ref().expect("u requested");
    let v_t = svd.v_t.as_ref().expect("v_t requested");
    let mut out = DMatrix::from_element(m.ncols(), m.nrows(), ZERO);
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > cutoff {
            let col = v_t.row(k).adjoint();
            let row = u.column(k).adjoint();
            out += (col * row).scale(1.0 / s);
        }
    }
    out
}

/// Row-major JSON form `{rows, cols, re, im}` shared by every file format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl From<&ComplexMatrix> for MatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        let mut re = Vec::with_capacity(m.len());
        let mut im = Vec::with_capacity(m.len());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                re.push(m[(i, j)].re);
                im.push(m[(i, j)].im);
            }
        }
        MatrixJson { rows: m.nrows(), cols: m.ncols(), re, im }
    }
}

impl TryFrom<&MatrixJson> for ComplexMatrix {
    type Error = QptError;

    fn try_from(j: &MatrixJson) -> Result<Self> {
        let n = j.rows * j.cols;
        if j.re.len() != n || j.im.len() != n {
            return Err(QptError::Size(format!(
                "matrix json declares {}x{} but has {} re / {} im entries",
                j.rows,
                j.cols,
                j.re.len(),
                j.im.len()
            )));
        }
        Ok(DMatrix::from_fn(j.rows, j.cols, |r, c| c64(j.re[r * j.cols + c], j.im[r * j.cols + c])))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> ComplexMatrix {
        diag(&[1.0, -1.0])
    }

    #[test]
    fn kron_puts_left_factor_most_significant() {
        let id = ComplexMatrix::identity(2, 2);
        assert_eq!(tensor_product(&id, &z()).unwrap(), diag(&[1.0, -1.0, 1.0, -1.0]));
        assert_eq!(tensor_product(&z(), &id).unwrap(), diag(&[1.0, 1.0, -1.0, -1.0]));
    }

    #[test]
    fn xx_flips_both_bits() {
        let x = from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]]);
        let xx = tensor_product(&x, &x).unwrap();
        assert_eq!(&xx * basis_ket(4, 0), basis_ket(4, 3));
    }

    #[test]
    fn kron_rejects_huge_dimensions() {
        let big = ComplexMatrix::identity(1 << 7, 1 << 7);
        assert!(matches!(tensor_product(&big, &big), Err(QptError::Size(_))));
    }

    #[test]
    fn partial_trace_of_bell_state_is_maximally_mixed() {
        let mut v = ComplexVector::from_element(4, ZERO);
        v[0] = c64(0.5f64.sqrt(), 0.0);
        v[3] = c64(0.5f64.sqrt(), 0.0);
        let rho = outer(&v);
        let expected = diag(&[0.5, 0.5]);
        assert!((partial_trace(&rho, Keep::A, (2, 2)).unwrap() - &expected).norm() < 1e-15);
        assert!((partial_trace(&rho, Keep::B, (2, 2)).unwrap() - &expected).norm() < 1e-15);
    }

    #[test]
    fn partial_trace_of_unbalanced_entangled_state() {
        // α|00⟩ + β|11⟩ with |α|² = 0.8
        let mut v = ComplexVector::from_element(4, ZERO);
        v[0] = c64(0.8f64.sqrt(), 0.0);
        v[3] = C64::from_polar(0.2f64.sqrt(), std::f64::consts::FRAC_PI_4);
        let reduced = partial_trace(&outer(&v), Keep::B, (2, 2)).unwrap();
        assert!((reduced - diag(&[0.8, 0.2])).norm() < 1e-15);
    }

    #[test]
    fn partial_trace_dimension_mismatch() {
        let m = ComplexMatrix::identity(6, 6);
        assert!(partial_trace(&m, Keep::A, (2, 2)).is_err());
    }

    #[test]
    fn permutation_swaps_factors() {
        let x = from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]]);
        let xz = tensor_product(&x, &z()).unwrap();
        let zx = tensor_product(&z(), &x).unwrap();
        assert!((permute_qubits(&xz, &[1, 0]).unwrap() - zx).norm() < 1e-15);
        assert!(permute_qubits(&xz, &[0, 0]).is_err());
    }

    #[test]
    fn eigenvalues_are_ascending_and_orthonormal() {
        let m = from_rows(&[vec![c64(2.0, 0.0), c64(0.0, 1.0)], vec![c64(0.0, -1.0), c64(2.0, 0.0)]]);
        let e = hermitian_eigen(&m);
        assert!((e.values[0] - 1.0).abs() < 1e-12 && (e.values[1] - 3.0).abs() < 1e-12);
        assert!(is_unitary(&e.vectors, 1e-12));
        assert!((e.map(|l| l) - m).norm() < 1e-12);
    }

    #[test]
    fn predicates_on_constructed_matrices() {
        let y = from_rows(&[vec![ZERO, -I], vec![I, ZERO]]);
        assert!(is_hermitian(&y, 1e-12) && is_unitary(&y, 1e-12));
        assert!(!is_positive_semidefinite(&y, 1e-12));
        assert!(is_positive_semidefinite(&diag(&[0.3, 0.0]), 1e-12));
        let nonherm = from_rows(&[vec![ONE, ONE], vec![ZERO, ONE]]);
        assert!(!is_hermitian(&nonherm, 1e-12));
    }

    #[test]
    fn pseudo_inverse_of_invertible_matrix() {
        let m = from_rows(&[vec![c64(2.0, 1.0), c64(0.5, 0.0)], vec![c64(0.0, -1.0), c64(1.0, 0.0)]]);
        let p = pseudo_inverse(&m, 1e-12);
        assert!((&p * &m - ComplexMatrix::identity(2, 2)).norm() < 1e-12);
        assert!(condition_number(&diag(&[1.0, 0.0])).is_infinite());
    }

    #[test]
    fn json_is_row_major() {
        let m = from_rows(&[vec![c64(1.0, 0.0), c64(2.0, -1.0)], vec![c64(3.0, 0.0), c64(4.0, 0.5)]]);
        let j = MatrixJson::from(&m);
        assert_eq!(j.re, vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(j.im, vec![0.0, -1.0, 0.0, 0.5]);
        assert_eq!(ComplexMatrix::try_from(&j).unwrap(), m);
        let bad = MatrixJson { rows: 2, cols: 2, re: vec![0.0], im: vec![0.0] };
        assert!(ComplexMatrix::try_from(&bad).is_err());
    }
}
