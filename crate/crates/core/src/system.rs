//! Radical-pair model: two spin-½ electrons, each with its own set of
//! isotropically coupled nuclear spins, in a static field along z.
//!
//! Site ordering of the product space is fixed: electron A first, then A's
//! nuclei in declaration order, then electron B, then B's nuclei. All
//! energies leave this module in angular-frequency units (rad/s); field and
//! coupling inputs are µT.

use crate::matrix::{C64, ComplexMatrix};
use crate::spin::{embedded_spin, OperatorTriple, SpinQuantumNumber};
use crate::tol;
use crate::{Error, Result};

/// Electron gyromagnetic ratio magnitude, rad s⁻¹ T⁻¹.
pub const GAMMA_E_DEFAULT: f64 = 1.76e11;

/// Largest |a_iso| accepted, µT.
pub const HYPERFINE_MAX_UT: f64 = 1e7;

#[derive(Debug, Clone, Copy)]
pub struct PhysicalConstants {
    pub gamma_e: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        PhysicalConstants {
            gamma_e: GAMMA_E_DEFAULT,
        }
    }
}

impl PhysicalConstants {
    /// rad/s per µT of field or coupling.
    pub fn rad_per_ut(&self) -> f64 {
        self.gamma_e * 1e-6
    }

    fn validate(&self) -> Result<()> {
        if !(self.gamma_e.is_finite() && self.gamma_e > 0.0) {
            return Err(Error::invalid(format!(
                "gamma_e must be finite and positive, got {}",
                self.gamma_e
            )));
        }
        Ok(())
    }
}

/// Constants chosen so built Hamiltonian entries come out in µT
/// (rad_per_ut = 1). Handy for comparing against tabulated matrices.
pub fn field_unit_constants() -> PhysicalConstants {
    PhysicalConstants { gamma_e: 1e6 }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Electron {
    A,
    B,
}

impl Electron {
    fn letter(&self) -> char {
        match self {
            Electron::A => 'A',
            Electron::B => 'B',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NucleusSpec {
    spin: SpinQuantumNumber,
    a_iso_ut: f64,
    electron: Electron,
}

impl NucleusSpec {
    pub fn new(spin: SpinQuantumNumber, a_iso_ut: f64, electron: Electron) -> Result<Self> {
        if !a_iso_ut.is_finite() || a_iso_ut.abs() >= HYPERFINE_MAX_UT {
            return Err(Error::invalid(format!(
                "hyperfine coupling must be finite with |a| < {HYPERFINE_MAX_UT} µT, got {a_iso_ut}"
            )));
        }
        Ok(NucleusSpec {
            spin,
            a_iso_ut,
            electron,
        })
    }

    pub fn spin(&self) -> SpinQuantumNumber {
        self.spin
    }

    pub fn a_iso_ut(&self) -> f64 {
        self.a_iso_ut
    }

    pub fn electron(&self) -> Electron {
        self.electron
    }
}

/// Immutable description of one radical pair; validated on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct RadicalPairSpec {
    a_nuclei: Vec<NucleusSpec>,
    b_nuclei: Vec<NucleusSpec>,
    dim_cap: usize,
}

impl RadicalPairSpec {
    pub fn new(nuclei: Vec<NucleusSpec>) -> Result<Self> {
        Self::with_dim_cap(nuclei, tol::DEFAULT_DIM_CAP)
    }

    pub fn with_dim_cap(nuclei: Vec<NucleusSpec>, dim_cap: usize) -> Result<Self> {
        let a_nuclei: Vec<_> = nuclei
            .iter()
            .copied()
            .filter(|n| n.electron == Electron::A)
            .collect();
        let b_nuclei: Vec<_> = nuclei
            .iter()
            .copied()
            .filter(|n| n.electron == Electron::B)
            .collect();
        let spec = RadicalPairSpec {
            a_nuclei,
            b_nuclei,
            dim_cap,
        };
        let dim = spec.total_dim();
        if dim > dim_cap {
            return Err(Error::DimensionCap { dim, cap: dim_cap });
        }
        Ok(spec)
    }

    /// Bare pair: no nuclei at all.
    pub fn bare() -> Self {
        RadicalPairSpec {
            a_nuclei: Vec::new(),
            b_nuclei: Vec::new(),
            dim_cap: tol::DEFAULT_DIM_CAP,
        }
    }

    /// One nucleus on electron A — the workhorse model.
    pub fn single_nucleus(spin: SpinQuantumNumber, a_iso_ut: f64) -> Result<Self> {
        Self::new(vec![NucleusSpec::new(spin, a_iso_ut, Electron::A)?])
    }

    /// Nuclei in site order: A's first, then B's.
    pub fn nuclei(&self) -> impl Iterator<Item = &NucleusSpec> {
        self.a_nuclei.iter().chain(self.b_nuclei.iter())
    }

    pub fn nucleus_count(&self) -> usize {
        self.a_nuclei.len() + self.b_nuclei.len()
    }

    /// Dimensions per tensor factor: [2, A-nuclei…, 2, B-nuclei…].
    pub fn site_dims(&self) -> Vec<usize> {
        let mut dims = Vec::with_capacity(2 + self.nucleus_count());
        dims.push(2);
        dims.extend(self.a_nuclei.iter().map(|n| n.spin.multiplicity()));
        dims.push(2);
        dims.extend(self.b_nuclei.iter().map(|n| n.spin.multiplicity()));
        dims
    }

    /// (site of electron A, site of electron B).
    pub fn electron_sites(&self) -> (usize, usize) {
        (0, 1 + self.a_nuclei.len())
    }

    /// Site of the `idx`-th nucleus (site order).
    pub fn nucleus_site(&self, idx: usize) -> usize {
        assert!(idx < self.nucleus_count());
        if idx < self.a_nuclei.len() {
            1 + idx
        } else {
            2 + idx
        }
    }

    /// Product of nuclear multiplicities (1 for a bare pair).
    pub fn nuclear_multiplicity(&self) -> usize {
        self.nuclei().map(|n| n.spin.multiplicity()).product()
    }

    pub fn total_dim(&self) -> usize {
        4 * self.nuclear_multiplicity()
    }

    /// Canonical text form; stable across runs, distinct across specs.
    pub fn fingerprint(&self) -> String {
        let mut s = String::from("radpair/v1");
        for n in self.nuclei() {
            s.push_str(&format!(
                ";{}:{}:{:.17e}",
                n.electron.letter(),
                n.spin.twice_spin(),
                n.a_iso_ut
            ));
        }
        s
    }

    pub fn electron_spin(&self, which: Electron) -> OperatorTriple {
        let dims = self.site_dims();
        let (sa, sb) = self.electron_sites();
        let site = match which {
            Electron::A => sa,
            Electron::B => sb,
        };
        embedded_spin(SpinQuantumNumber::HALF, site, &dims)
    }

    pub fn nucleus_spin(&self, idx: usize) -> OperatorTriple {
        let dims = self.site_dims();
        let n: Vec<&NucleusSpec> = self.nuclei().collect();
        embedded_spin(n[idx].spin(), self.nucleus_site(idx), &dims)
    }

    /// (a_iso µT, spin) pairs in site order.
    pub fn couplings(&self) -> Vec<(f64, SpinQuantumNumber)> {
        self.nuclei().map(|n| (n.a_iso_ut(), n.spin())).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BornState {
    Singlet,
    Triplet,
}

impl BornState {
    pub fn as_str(&self) -> &'static str {
        match self {
            BornState::Singlet => "singlet",
            BornState::Triplet => "triplet",
        }
    }
}

/// Zeeman + isotropic hyperfine Hamiltonian, rad/s:
/// H = γ'·[B(S_Az + S_Bz) + Σ_i a_i S_{e(i)}·I_i], γ' = γ_e·1e-6.
pub fn build_hamiltonian(
    spec: &RadicalPairSpec,
    b_ut: f64,
    c: &PhysicalConstants,
) -> Result<ComplexMatrix> {
    c.validate()?;
    if !b_ut.is_finite() || b_ut < 0.0 {
        return Err(Error::invalid(format!(
            "field must be finite and non-negative, got {b_ut} µT"
        )));
    }
    let w = c.rad_per_ut();
    let sa = spec.electron_spin(Electron::A);
    let sb = spec.electron_spin(Electron::B);
    let mut h = sa.sz.add(&sb.sz).scale(w * b_ut);
    for (idx, n) in spec.nuclei().enumerate() {
        let e = spec.electron_spin(n.electron());
        let i = spec.nucleus_spin(idx);
        h = h.add(&e.dot(&i).scale(w * n.a_iso_ut()));
    }
    h.require_hermitian(tol::HERMITICITY_REL)?;
    Ok(h)
}

/// Projector onto the two-electron singlet subspace: ¼·1 − S_A·S_B.
/// Basis-free, so it already carries the identity on every nuclear factor.
pub fn singlet_projector(spec: &RadicalPairSpec) -> ComplexMatrix {
    let sa = spec.electron_spin(Electron::A);
    let sb = spec.electron_spin(Electron::B);
    ComplexMatrix::identity(spec.total_dim())
        .scale(0.25)
        .sub(&sa.dot(&sb))
}

pub fn triplet_projector(spec: &RadicalPairSpec) -> ComplexMatrix {
    ComplexMatrix::identity(spec.total_dim()).sub(&singlet_projector(spec))
}

/// Maximally mixed nuclear bath times the electronic projector:
/// P_S/M when singlet-born, P_T/(3M) when triplet-born. Trace is 1.
pub fn initial_density(spec: &RadicalPairSpec, born: BornState) -> ComplexMatrix {
    let m = spec.nuclear_multiplicity() as f64;
    match born {
        BornState::Singlet => singlet_projector(spec).scale(1.0 / m),
        BornState::Triplet => triplet_projector(spec).scale(1.0 / (3.0 * m)),
    }
}

/// Pure state |S⟩ ⊗ |nuclear_index⟩ as a vector over the full space.
/// Nuclear basis states are indexed in site order, first nucleus slowest;
/// |S⟩ = (|↑↓⟩ − |↓↑⟩)/√2 on the electron pair.
pub fn singlet_born_state(spec: &RadicalPairSpec, nuclear_index: usize) -> Result<Vec<C64>> {
    let m = spec.nuclear_multiplicity();
    if nuclear_index >= m {
        return Err(Error::invalid(format!(
            "nuclear state index {nuclear_index} out of range (multiplicity {m})"
        )));
    }
    let dims = spec.site_dims();
    let nsites = dims.len();
    let mut stride = vec![1usize; nsites];
    for s in (0..nsites - 1).rev() {
        stride[s] = stride[s + 1] * dims[s + 1];
    }
    let (site_a, site_b) = spec.electron_sites();

    // Spread the nuclear digits over their sites.
    let mut base = 0usize;
    let mut rem = nuclear_index;
    let mut nuc_mult_after = m;
    for idx in 0..spec.nucleus_count() {
        let mult = dims[spec.nucleus_site(idx)];
        nuc_mult_after /= mult;
        let digit = rem / nuc_mult_after;
        rem %= nuc_mult_after;
        base += digit * stride[spec.nucleus_site(idx)];
    }

    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut v = vec![C64::new(0.0, 0.0); spec.total_dim()];
    v[base + stride[site_b]] = C64::new(inv_sqrt2, 0.0); // |↑↓⟩
    v[base + stride[site_a]] = C64::new(-inv_sqrt2, 0.0); // −|↓↑⟩
    Ok(v)
}

/// One cell where the constructed matrix disagrees with the tabulated
/// reference. Indices are 1-based to match the usual printed layout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixMismatch {
    pub row: usize,
    pub col: usize,
    pub built_ut: f64,
    pub printed_ut: f64,
}

/// Compares the one-proton Hamiltonian built here, in µT units, against a
/// reference table for the same model that circulates in the literature,
/// and reports every disagreeing cell. The reference's (4,4) entry is
/// inconsistent with its own defining expression — the builder follows the
/// expression, so one mismatch is expected whenever a ≠ 0 and B ≠ a/2.
/// Discrepancies are reported, never patched.
pub fn printed_matrix_diagnostic(a_ut: f64, b_ut: f64) -> Result<Vec<MatrixMismatch>> {
    let spec = RadicalPairSpec::single_nucleus(SpinQuantumNumber::HALF, a_ut)?;
    let built = build_hamiltonian(&spec, b_ut, &field_unit_constants())?;

    let (a, b) = (a_ut, b_ut);
    let q = a / 4.0;
    let mut printed = ComplexMatrix::zeros(8);
    let diag = [
        q + b,
        q,
        -q + b,
        q - b, // reference table's entry; the defining expression gives −q
        -q,
        -q - b,
        q,
        q - b,
    ];
    for (i, d) in diag.iter().enumerate() {
        printed.set(i, i, C64::new(*d, 0.0));
    }
    for &(r, c) in &[(2usize, 4usize), (4, 2), (3, 5), (5, 3)] {
        printed.set(r, c, C64::new(a / 2.0, 0.0));
    }

    let scale = a.abs().max(b.abs()).max(1.0);
    let mut out = Vec::new();
    for i in 0..8 {
        for j in 0..8 {
            let built_v = built.get(i, j);
            let printed_v = printed.get(i, j);
            if (built_v - printed_v).norm() > 1e-12 * scale {
                out.push(MatrixMismatch {
                    row: i + 1,
                    col: j + 1,
                    built_ut: built_v.re,
                    printed_ut: printed_v.re,
                });
            }
        }
    }
    Ok(out)
}
