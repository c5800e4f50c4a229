//! Spin quantum numbers and angular-momentum operator matrices.
//!
//! Basis convention inside each site: |m⟩ ordered from m = +s down to m = −s,
//! so Sz = diag(s, s−1, …, −s). Multi-site operators use Kronecker products
//! with the first factor slowest.

use num_complex::Complex64;

use crate::matrix::{C64, ComplexMatrix};
use crate::{Error, Result};

/// Spin magnitude stored as 2s, so half-integers stay exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpinQuantumNumber {
    twice_spin: u32,
}

impl SpinQuantumNumber {
    pub fn new(twice_spin: u32) -> Result<Self> {
        if twice_spin == 0 {
            return Err(Error::invalid("spin must be at least 1/2 (twice_spin ≥ 1)"));
        }
        Ok(SpinQuantumNumber { twice_spin })
    }

    pub const HALF: SpinQuantumNumber = SpinQuantumNumber { twice_spin: 1 };
    pub const ONE: SpinQuantumNumber = SpinQuantumNumber { twice_spin: 2 };

    pub fn twice_spin(&self) -> u32 {
        self.twice_spin
    }

    pub fn spin_value(&self) -> f64 {
        self.twice_spin as f64 / 2.0
    }

    pub fn multiplicity(&self) -> usize {
        self.twice_spin as usize + 1
    }
}

#[derive(Debug, Clone)]
pub struct OperatorTriple {
    pub sx: ComplexMatrix,
    pub sy: ComplexMatrix,
    pub sz: ComplexMatrix,
}

impl OperatorTriple {
    /// S·S' = SxSx' + SySy' + SzSz', both triples already on the full space.
    pub fn dot(&self, other: &OperatorTriple) -> ComplexMatrix {
        self.sx
            .dot(&other.sx)
            .add(&self.sy.dot(&other.sy))
            .add(&self.sz.dot(&other.sz))
    }
}

/// Sx, Sy, Sz for a single spin-s site (dimension 2s+1).
pub fn spin_operators(s: SpinQuantumNumber) -> OperatorTriple {
    let n = s.multiplicity();
    let sv = s.spin_value();
    let mut sx = ComplexMatrix::zeros(n);
    let mut sy = ComplexMatrix::zeros(n);
    let mut sz = ComplexMatrix::zeros(n);
    for i in 0..n {
        let m = sv - i as f64;
        sz.set(i, i, C64::new(m, 0.0));
    }
    // Raising element ⟨m+1|S₊|m⟩ = √(s(s+1) − m(m+1)) sits at (i, i+1)
    // because index i holds m = s − i.
    for i in 0..n - 1 {
        let m = sv - (i + 1) as f64;
        let amp = (sv * (sv + 1.0) - m * (m + 1.0)).sqrt();
        sx.set(i, i + 1, C64::new(amp / 2.0, 0.0));
        sx.set(i + 1, i, C64::new(amp / 2.0, 0.0));
        sy.set(i, i + 1, C64::new(0.0, -amp / 2.0));
        sy.set(i + 1, i, C64::new(0.0, amp / 2.0));
    }
    OperatorTriple { sx, sy, sz }
}

/// Lifts a single-site operator to the full product space
/// ⊗_s C^{dims[s]} by tensoring identities around it.
pub fn embed_site_operator(op: &ComplexMatrix, site: usize, dims: &[usize]) -> ComplexMatrix {
    assert!(site < dims.len(), "site index out of range");
    assert_eq!(op.dim(), dims[site], "operator dim must match its site");
    let left: usize = dims[..site].iter().product();
    let right: usize = dims[site + 1..].iter().product();
    ComplexMatrix::identity(left)
        .kron(op)
        .kron(&ComplexMatrix::identity(right))
}

/// Spin triple for `site`, embedded in the full product space.
pub fn embedded_spin(s: SpinQuantumNumber, site: usize, dims: &[usize]) -> OperatorTriple {
    let ops = spin_operators(s);
    OperatorTriple {
        sx: embed_site_operator(&ops.sx, site, dims),
        sy: embed_site_operator(&ops.sy, site, dims),
        sz: embed_site_operator(&ops.sz, site, dims),
    }
}

pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
