//! Dense square complex matrices with the handful of operations the spin
//! machinery needs: Kronecker products, adjoints, hermiticity checks, and
//! site-index permutations.

use ndarray::Array2;
use num_complex::Complex64;

use crate::{Error, Result};

pub type C64 = Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix(Array2<C64>);

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        ComplexMatrix(Array2::zeros((n, n)))
    }

    pub fn identity(n: usize) -> Self {
        Array2::eye(n).into()
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> C64) -> Self {
        ComplexMatrix(Array2::from_shape_fn((n, n), |(i, j)| f(i, j)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.0[(i, j)] = v;
    }

    pub fn as_array(&self) -> &Array2<C64> {
        &self.0
    }

    /// A ⊗ B with the first factor slowest: index (i, k) ↦ i·dim(B) + k.
    pub fn kron(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let (n, m) = (self.dim(), other.dim());
        let mut out = Array2::zeros((n * m, n * m));
        for i in 0..n {
            for j in 0..n {
                let a = self.0[(i, j)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..m {
                    for l in 0..m {
                        out[(i * m + k, j * m + l)] = a * other.0[(k, l)];
                    }
                }
            }
        }
        ComplexMatrix(out)
    }

    pub fn dot(&self, other: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.0.dot(&other.0))
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        let n = self.dim();
        assert_eq!(v.len(), n, "matvec length mismatch");
        (0..n)
            .map(|i| (0..n).map(|j| self.0[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn adjoint(&self) -> ComplexMatrix {
        let n = self.dim();
        ComplexMatrix::from_fn(n, |i, j| self.0[(j, i)].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.0[(i, i)]).sum()
    }

    pub fn frobenius(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: f64) -> ComplexMatrix {
        ComplexMatrix(self.0.mapv(|z| z * s))
    }

    pub fn add(&self, other: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &other.0)
    }

    /// Checks A ≈ A† with `rel_tol` relative to the largest entry magnitude.
    /// The zero matrix passes.
    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        let scale = self.max_abs();
        if scale == 0.0 {
            return true;
        }
        let n = self.dim();
        for i in 0..n {
            for j in i..n {
                let dev = (self.0[(i, j)] - self.0[(j, i)].conj()).norm();
                if dev > rel_tol * scale {
                    return false;
                }
            }
        }
        true
    }

    pub fn require_hermitian(&self, rel_tol: f64) -> Result<()> {
        if self.is_hermitian(rel_tol) {
            return Ok(());
        }
        let n = self.dim();
        let mut max_dev = 0.0f64;
        for i in 0..n {
            for j in i..n {
                max_dev = max_dev.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        Err(Error::NotHermitian {
            max_dev,
            tol: rel_tol * self.max_abs(),
        })
    }
}

impl From<Array2<C64>> for ComplexMatrix {
    fn from(a: Array2<C64>) -> Self {
        assert_eq!(a.nrows(), a.ncols(), "ComplexMatrix must be square");
        ComplexMatrix(a)
    }
}

/// Reorders the tensor factors of an operator on ⊗_s C^{dims[s]}.
///
/// `perm[new_slot] = old_site`: the factor that occupied `old_site` in the
/// input ordering appears at position `new_slot` in the output ordering.
pub fn permute_sites(m: &ComplexMatrix, dims: &[usize], perm: &[usize]) -> ComplexMatrix {
    let total: usize = dims.iter().product();
    assert_eq!(m.dim(), total, "operator dim must match site dims");
    assert_eq!(perm.len(), dims.len());
    let mut seen = vec![false; dims.len()];
    for &p in perm {
        assert!(p < dims.len() && !seen[p], "perm must be a permutation");
        seen[p] = true;
    }

    // Strides of each site in the input ordering (first factor slowest).
    let nsites = dims.len();
    let mut in_stride = vec![1usize; nsites];
    for s in (0..nsites.saturating_sub(1)).rev() {
        in_stride[s] = in_stride[s + 1] * dims[s + 1];
    }
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let mut new_stride = vec![1usize; nsites];
    for s in (0..nsites.saturating_sub(1)).rev() {
        new_stride[s] = new_stride[s + 1] * new_dims[s + 1];
    }

    // old flat index -> new flat index
    let map: Vec<usize> = (0..total)
        .map(|idx| {
            let mut out = 0;
            for slot in 0..nsites {
                let old_site = perm[slot];
                let digit = (idx / in_stride[old_site]) % dims[old_site];
                out += digit * new_stride[slot];
            }
            out
        })
        .collect();

    let mut out = ComplexMatrix::zeros(total);
    for i in 0..total {
        for j in 0..total {
            out.set(map[i], map[j], m.get(i, j));
        }
    }
    out
}
