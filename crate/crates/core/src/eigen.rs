//! Hermitian eigendecomposition and derived spectral data.
//!
//! The solver is a cyclic complex Jacobi iteration. Chosen over a
//! Householder/QL routine on purpose: rotations with an exactly-zero pivot
//! are skipped, so block structure of the input survives bit-for-bit, and
//! degenerate subspaces keep a reproducible, basis-stable decomposition —
//! level-resolved overlap reports depend on that. Dimensions here are tiny
//! (tens), so O(n³) per sweep costs nothing.

use std::sync::atomic::{AtomicU64, Ordering};

use ndarray::Array2;

use crate::matrix::{C64, ComplexMatrix};
use crate::spin::SpinQuantumNumber;
use crate::system::{
    build_hamiltonian, field_unit_constants, singlet_born_state, singlet_projector,
    PhysicalConstants, RadicalPairSpec,
};
use crate::tol;
use crate::{Error, Result};

static DECOMPOSITION_COUNT: AtomicU64 = AtomicU64::new(0);

/// How many eigendecompositions this process has run. Sweeps assert with
/// this that spectral data is hoisted out of their inner loops.
pub fn decompositions_performed() -> u64 {
    DECOMPOSITION_COUNT.load(Ordering::Relaxed)
}

#[derive(Debug, Clone)]
pub struct EigenSystem {
    /// Ascending; same units as the input matrix.
    pub values: Vec<f64>,
    /// Column k pairs with values[k]. Unitary; each column's largest
    /// component is made real and positive so output is reproducible.
    pub vectors: ComplexMatrix,
}

fn off_norm(a: &Array2<C64>) -> f64 {
    let n = a.nrows();
    let mut sum = 0.0;
    for p in 0..n {
        for q in p + 1..n {
            sum += a[(p, q)].norm_sqr();
        }
    }
    (2.0 * sum).sqrt()
}

pub fn eigendecompose(h: &ComplexMatrix) -> Result<EigenSystem> {
    h.require_hermitian(tol::HERMITICITY_REL)?;
    if h.as_array().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::invalid("matrix contains non-finite entries"));
    }
    DECOMPOSITION_COUNT.fetch_add(1, Ordering::Relaxed);

    let n = h.dim();
    let mut a = h.as_array().clone();
    let mut v: Array2<C64> = Array2::eye(n);
    let threshold = tol::JACOBI_OFF_REL * h.frobenius();

    let mut sweeps = 0;
    loop {
        let off = off_norm(&a);
        if off <= threshold {
            break;
        }
        if sweeps >= tol::JACOBI_MAX_SWEEPS {
            return Err(Error::NonConvergence { sweeps, off });
        }
        sweeps += 1;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let b = apq.norm();
                if b == 0.0 {
                    continue; // exact zeros never rotate: blocks stay intact
                }
                let phase = apq / b;
                let theta = 0.5 * (2.0 * b).atan2(a[(q, q)].re - a[(p, p)].re);
                let c = theta.cos();
                let s = phase * theta.sin();
                let s_conj = s.conj();

                // B = A·J, touching columns p and q
                for i in 0..n {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = aip * c - s_conj * aiq;
                    a[(i, q)] = s * aip + aiq * c;
                }
                // A' = J†·B, touching rows p and q
                for j in 0..n {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = apj * c - s * aqj;
                    a[(q, j)] = s_conj * apj + aqj * c;
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * c - s_conj * viq;
                    v[(i, q)] = s * vip + viq * c;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap());

    let values: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n);
    for (k, &src) in order.iter().enumerate() {
        // pin the gauge: largest component (first on ties) real positive
        let mut imax = 0;
        let mut vmax = 0.0;
        for i in 0..n {
            let m = v[(i, src)].norm();
            if m > vmax {
                vmax = m;
                imax = i;
            }
        }
        let z = v[(imax, src)];
        let factor = if vmax > 0.0 {
            z.conj() / vmax
        } else {
            C64::new(1.0, 0.0)
        };
        for i in 0..n {
            vectors.set(i, k, v[(i, src)] * factor);
        }
    }

    Ok(EigenSystem { values, vectors })
}

/// One eigenlevel's share of a singlet-born state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelOverlap {
    /// Index into the ascending eigenvalue list.
    pub level_index: usize,
    /// Eigenvalue divided by γ_e·1e-6, i.e. expressed in µT.
    pub energy_ut: f64,
    pub weight: f64,
}

/// Which eigenlevels a singlet-born pair actually populates.
///
/// With `nuclear_state = Some(i)` the born state is |S⟩⊗|i⟩ and the weight
/// is |⟨v_k|ψ⟩|²; with `None` the nuclear bath is maximally mixed and the
/// weight is ⟨v_k|P_S|v_k⟩/M. One entry per eigenvector — degenerate levels
/// are reported separately, which is meaningful because the solver keeps
/// degenerate blocks intact. Weights ≤ 1e-10 are dropped. Weights sum to 1.
pub fn singlet_overlap_levels(
    spec: &RadicalPairSpec,
    b_ut: f64,
    c: &PhysicalConstants,
    nuclear_state: Option<usize>,
) -> Result<Vec<LevelOverlap>> {
    let h = build_hamiltonian(spec, b_ut, c)?;
    let eig = eigendecompose(&h)?;
    let n = spec.total_dim();
    let scale = c.rad_per_ut();

    let weights: Vec<f64> = match nuclear_state {
        Some(idx) => {
            let psi = singlet_born_state(spec, idx)?;
            (0..n)
                .map(|k| {
                    let amp: C64 = (0..n)
                        .map(|i| eig.vectors.get(i, k).conj() * psi[i])
                        .sum();
                    amp.norm_sqr()
                })
                .collect()
        }
        None => {
            let ps = singlet_projector(spec);
            let m = spec.nuclear_multiplicity() as f64;
            (0..n)
                .map(|k| {
                    let col: Vec<C64> = (0..n).map(|i| eig.vectors.get(i, k)).collect();
                    let pv = ps.matvec(&col);
                    let val: C64 = col.iter().zip(pv.iter()).map(|(a, b)| a.conj() * b).sum();
                    val.re / m
                })
                .collect()
        }
    };

    Ok(weights
        .into_iter()
        .enumerate()
        .filter(|&(_, w)| w > tol::OVERLAP_WEIGHT_MIN)
        .map(|(k, w)| LevelOverlap {
            level_index: k,
            energy_ut: eig.values[k] / scale,
            weight: w,
        })
        .collect())
}

/// |ω_mn| line with its singlet-projector weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralLine {
    pub omega_rad_s: f64,
    pub weight: f64,
}

/// Transition-frequency content of the singlet projector in the eigenbasis:
/// weight(ω) = (1/M) Σ_{|λ_m−λ_n|=ω} |⟨v_m|P_S|v_n⟩|², over ordered pairs
/// including the diagonal. Weights sum to 1 and fully determine both the
/// coherent singlet probability and the reaction yields.
#[derive(Debug, Clone)]
pub struct PairSpectrum {
    /// Ascending ω ≥ 0; gaps grouped only when bit-identical, so exact
    /// degeneracies collapse and near-degeneracies stay distinct.
    pub lines: Vec<SpectralLine>,
}

impl PairSpectrum {
    pub fn max_omega(&self) -> f64 {
        self.lines.last().map_or(0.0, |l| l.omega_rad_s)
    }

    pub fn total_weight(&self) -> f64 {
        self.lines.iter().map(|l| l.weight).sum()
    }
}

pub fn singlet_pair_spectrum(
    spec: &RadicalPairSpec,
    b_ut: f64,
    c: &PhysicalConstants,
) -> Result<PairSpectrum> {
    let h = build_hamiltonian(spec, b_ut, c)?;
    let eig = eigendecompose(&h)?;
    let p_eig = eig
        .vectors
        .adjoint()
        .dot(&singlet_projector(spec))
        .dot(&eig.vectors);

    let n = spec.total_dim();
    let m = spec.nuclear_multiplicity() as f64;
    let mut grouped: std::collections::BTreeMap<u64, f64> = std::collections::BTreeMap::new();
    for i in 0..n {
        for j in 0..n {
            let w = p_eig.get(i, j).norm_sqr() / m;
            if w == 0.0 {
                continue;
            }
            let gap = (eig.values[i] - eig.values[j]).abs();
            *grouped.entry(gap.to_bits()).or_insert(0.0) += w;
        }
    }
    Ok(PairSpectrum {
        lines: grouped
            .into_iter()
            .map(|(bits, weight)| SpectralLine {
                omega_rad_s: f64::from_bits(bits),
                weight,
            })
            .collect(),
    })
}

/// Health report for one closed-form candidate eigenvector: its norm as
/// written, its Rayleigh quotient, and the eigen-residual ‖Hψ̂ − λψ̂‖ of the
/// normalized vector (µT units). Zero residual ⇔ genuine eigenvector.
#[derive(Debug, Clone, Copy)]
pub struct ResidualReport {
    /// 1-based, matching the usual listing order of the eight vectors.
    pub index: usize,
    pub norm: f64,
    pub rayleigh_ut: f64,
    pub residual_ut: f64,
}

/// Evaluates the closed-form eigenvector formulas that circulate for the
/// one-proton pair against the actual Hamiltonian. The formulas are taken
/// as written — several are not normalized and two are not eigenvectors at
/// all; the point of this function is to measure that, not to repair it.
/// Undefined at a = 0 (normalization factors vanish).
pub fn analytic_eigvec_residuals(a_ut: f64, b_ut: f64) -> Result<Vec<ResidualReport>> {
    if a_ut == 0.0 {
        return Err(Error::invalid(
            "closed-form eigenvectors are undefined at a = 0",
        ));
    }
    let spec = RadicalPairSpec::single_nucleus(SpinQuantumNumber::HALF, a_ut)?;
    let h = build_hamiltonian(&spec, b_ut, &field_unit_constants())?;

    let a = a_ut;
    let b = b_ut;
    let alpha = b - a / 4.0;
    let xi = (alpha * alpha + a * a / 4.0).sqrt();
    let delta = (alpha * alpha + 4.0 * a * a).sqrt();
    let eta = 4.0 * b - 3.0 * a;
    let s5 = 5.0f64.sqrt();
    let sg_a = alpha.signum();
    let sg_e = eta.signum();

    let mut candidates: Vec<[f64; 8]> = vec![[0.0; 8]; 8];
    candidates[0][0] = 1.0;
    candidates[1][1] = 1.0;
    candidates[2][2] = alpha / xi;
    candidates[2][4] = 2.0 * a / delta;
    candidates[3][3] = -1.0 / s5;
    candidates[3][5] = -2.0 * sg_a / s5;
    candidates[4][2] = a / (2.0 * xi);
    candidates[4][4] = -4.0 * alpha / delta;
    candidates[5][3] = 2.0 / s5;
    candidates[5][5] = -sg_e / s5;
    candidates[6][6] = 1.0;
    candidates[7][7] = -sg_a;

    let reports = candidates
        .iter()
        .enumerate()
        .map(|(i, coeffs)| {
            let norm = coeffs.iter().map(|x| x * x).sum::<f64>().sqrt();
            let unit: Vec<C64> = coeffs.iter().map(|&x| C64::new(x / norm, 0.0)).collect();
            let hv = h.matvec(&unit);
            let rayleigh: f64 = unit
                .iter()
                .zip(hv.iter())
                .map(|(u, w)| (u.conj() * w).re)
                .sum();
            let residual = unit
                .iter()
                .zip(hv.iter())
                .map(|(u, w)| (w - u * rayleigh).norm_sqr())
                .sum::<f64>()
                .sqrt();
            ResidualReport {
                index: i + 1,
                norm,
                rayleigh_ut: rayleigh,
                residual_ut: residual,
            }
        })
        .collect();
    Ok(reports)
}
