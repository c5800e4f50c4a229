//! Reaction yields in closed form, the hypomagnetic-field contrast metric,
//! and a slow-but-independent time-domain quadrature oracle.
//!
//! With equal singlet/triplet reaction rate k and relaxation rate r, the
//! singlet yield of a singlet-born pair is
//!   Φ = ¼ − k/(4(k+r)) + Σ_g w_g · k(k+r)/((k+r)² + ω_g²)
//! over the pair spectrum's lines, and the triplet-born variant replaces
//! the last term's sign and weight (see `singlet_yield_triplet_born`).
//! Degenerate lines (ω = 0) hit the Lorentzian at its k/(k+r) limit with no
//! special casing.

use crate::eigen::{singlet_pair_spectrum, PairSpectrum, SpectralLine};
use crate::spin::SpinQuantumNumber;
use crate::system::{BornState, PhysicalConstants, RadicalPairSpec};
use crate::tol;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    Singlet,
    Triplet,
}

impl Channel {
    pub fn as_str(&self) -> &'static str {
        match self {
            Channel::Singlet => "singlet",
            Channel::Triplet => "triplet",
        }
    }
}

/// Shared reaction rate k, relaxation rate r, and static field B.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KineticParams {
    pub k_per_s: f64,
    pub r_per_s: f64,
    pub b_ut: f64,
}

impl KineticParams {
    pub fn new(k_per_s: f64, r_per_s: f64, b_ut: f64) -> Result<Self> {
        let p = KineticParams {
            k_per_s,
            r_per_s,
            b_ut,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k_per_s.is_finite() && self.k_per_s > 0.0) {
            return Err(Error::invalid(format!(
                "reaction rate k must be finite and positive, got {}",
                self.k_per_s
            )));
        }
        if !(self.r_per_s.is_finite() && self.r_per_s >= 0.0) {
            return Err(Error::invalid(format!(
                "relaxation rate r must be finite and non-negative, got {}",
                self.r_per_s
            )));
        }
        if !(self.b_ut.is_finite() && self.b_ut >= 0.0) {
            return Err(Error::invalid(format!(
                "field must be finite and non-negative, got {} µT",
                self.b_ut
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YieldResult {
    /// Clipped to [0, 1] for reporting.
    pub phi: f64,
    pub born: BornState,
    pub channel: Channel,
}

/// Holds one field point's spectral data so that many (k, r) cells can be
/// evaluated after a single eigendecomposition.
#[derive(Debug, Clone)]
pub struct YieldEngine {
    spectrum: PairSpectrum,
}

impl YieldEngine {
    pub fn new(spec: &RadicalPairSpec, b_ut: f64, c: &PhysicalConstants) -> Result<Self> {
        Ok(YieldEngine {
            spectrum: singlet_pair_spectrum(spec, b_ut, c)?,
        })
    }

    pub fn spectrum(&self) -> &PairSpectrum {
        &self.spectrum
    }

    /// Σ_g w_g · k(k+r)/((k+r)² + ω_g²).
    pub fn lorentzian_sum(&self, k_per_s: f64, r_per_s: f64) -> f64 {
        let kr = k_per_s + r_per_s;
        self.spectrum
            .lines
            .iter()
            .map(|l| l.weight * k_per_s * kr / (kr * kr + l.omega_rad_s * l.omega_rad_s))
            .sum()
    }

    /// Singlet yield before clipping.
    pub fn singlet_yield_raw(&self, born: BornState, k_per_s: f64, r_per_s: f64) -> f64 {
        let kappa = k_per_s / (k_per_s + r_per_s);
        let lambda = self.lorentzian_sum(k_per_s, r_per_s);
        match born {
            BornState::Singlet => 0.25 - kappa / 4.0 + lambda,
            BornState::Triplet => 0.25 + kappa / 12.0 - lambda / 3.0,
        }
    }

    pub fn yield_for(&self, born: BornState, channel: Channel, k_per_s: f64, r_per_s: f64) -> f64 {
        let phi_s = self.singlet_yield_raw(born, k_per_s, r_per_s);
        let phi = match channel {
            Channel::Singlet => phi_s,
            Channel::Triplet => 1.0 - phi_s,
        };
        phi.clamp(0.0, 1.0)
    }
}

pub fn singlet_yield_singlet_born(
    spec: &RadicalPairSpec,
    params: &KineticParams,
    c: &PhysicalConstants,
) -> Result<YieldResult> {
    yield_any(spec, params, BornState::Singlet, Channel::Singlet, c)
}

pub fn singlet_yield_triplet_born(
    spec: &RadicalPairSpec,
    params: &KineticParams,
    c: &PhysicalConstants,
) -> Result<YieldResult> {
    yield_any(spec, params, BornState::Triplet, Channel::Singlet, c)
}

pub fn yield_any(
    spec: &RadicalPairSpec,
    params: &KineticParams,
    born: BornState,
    channel: Channel,
    c: &PhysicalConstants,
) -> Result<YieldResult> {
    params.validate()?;
    let engine = YieldEngine::new(spec, params.b_ut, c)?;
    Ok(YieldResult {
        phi: engine.yield_for(born, channel, params.k_per_s, params.r_per_s),
        born,
        channel,
    })
}

/// The two fields being contrasted: a hypomagnetic one and a reference
/// (geomagnetic-scale) one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HmfContrast {
    pub b_hmf_ut: f64,
    pub b_gmf_ut: f64,
}

impl Default for HmfContrast {
    fn default() -> Self {
        HmfContrast {
            b_hmf_ut: 1.0,
            b_gmf_ut: 50.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HmfEffect {
    /// ΔΘ = |(Φ_hmf − Φ_gmf)/Φ_hmf| · 100.
    pub delta_percent: f64,
    pub phi_hmf: f64,
    pub phi_gmf: f64,
    pub born: BornState,
    pub channel: Channel,
}

/// Relative yield change, in percent, when the field drops from the
/// reference value to the hypomagnetic one. The hypomagnetic yield is the
/// denominator; if it vanishes the contrast is undefined and reported as
/// an error rather than a number.
pub fn hmf_effect(
    spec: &RadicalPairSpec,
    k_per_s: f64,
    r_per_s: f64,
    born: BornState,
    channel: Channel,
    contrast: HmfContrast,
    c: &PhysicalConstants,
) -> Result<HmfEffect> {
    KineticParams::new(k_per_s, r_per_s, contrast.b_hmf_ut)?;
    KineticParams::new(k_per_s, r_per_s, contrast.b_gmf_ut)?;
    let phi_hmf =
        YieldEngine::new(spec, contrast.b_hmf_ut, c)?.yield_for(born, channel, k_per_s, r_per_s);
    let phi_gmf =
        YieldEngine::new(spec, contrast.b_gmf_ut, c)?.yield_for(born, channel, k_per_s, r_per_s);
    if phi_hmf.abs() < tol::CONTRAST_DENOM_MIN {
        return Err(Error::UndefinedContrast {
            phi_abs: phi_hmf.abs(),
            min: tol::CONTRAST_DENOM_MIN,
        });
    }
    Ok(HmfEffect {
        delta_percent: ((phi_hmf - phi_gmf) / phi_hmf).abs() * 100.0,
        phi_hmf,
        phi_gmf,
        born,
        channel,
    })
}

/// a_eiso = sqrt((4/3) Σ_i a_i² I_i(I_i+1)), µT. One number standing in for
/// a whole hyperfine environment.
pub fn effective_hyperfine(couplings: &[(f64, SpinQuantumNumber)]) -> Result<f64> {
    if couplings.is_empty() {
        return Err(Error::invalid(
            "effective hyperfine needs at least one coupling",
        ));
    }
    let sum: f64 = couplings
        .iter()
        .map(|&(a, spin)| {
            let i = spin.spin_value();
            a * a * i * (i + 1.0)
        })
        .sum();
    Ok((4.0 / 3.0 * sum).sqrt())
}

/// Lines closer together than 1e-12 of the largest frequency are fused
/// (weighted-mean frequency). Only the integrator uses this; analytic sums
/// keep every line since coincident Lorentzians add exactly anyway.
fn merged_lines(sp: &PairSpectrum) -> Vec<SpectralLine> {
    let tol_abs = tol::GAP_MERGE_REL * sp.max_omega();
    let mut out: Vec<SpectralLine> = Vec::new();
    let mut cluster_start = 0.0;
    let mut acc_w = 0.0;
    let mut acc_wo = 0.0;
    let mut flushed = true;
    for l in &sp.lines {
        if flushed || l.omega_rad_s - cluster_start > tol_abs {
            if !flushed {
                out.push(SpectralLine {
                    omega_rad_s: acc_wo / acc_w,
                    weight: acc_w,
                });
            }
            cluster_start = l.omega_rad_s;
            acc_w = l.weight;
            acc_wo = l.weight * l.omega_rad_s;
            flushed = false;
        } else {
            acc_w += l.weight;
            acc_wo += l.weight * l.omega_rad_s;
        }
    }
    if !flushed {
        out.push(SpectralLine {
            omega_rad_s: acc_wo / acc_w,
            weight: acc_w,
        });
    }
    out
}

pub fn yield_quadrature_oracle(
    spec: &RadicalPairSpec,
    params: &KineticParams,
    born: BornState,
    c: &PhysicalConstants,
) -> Result<f64> {
    yield_quadrature_oracle_with_budget(spec, params, born, c, tol::ORACLE_DEFAULT_MAX_NODES)
}

/// Composite-trapezoid evaluation of k·∫₀^∞ ⟨P_S⟩(t)·e^{−kt} dt with the
/// relaxation map applied, truncated where e^{−kT} < 1e-10.
///
/// The step obeys three caps at once: ≤ 1/(50·f_max) to resolve every
/// oscillation, ≤ sqrt(1.2e-8/(k(k+r))) so the trapezoid's endpoint error
/// term (h²/12)·f′(0) stays near 1e-9, and ≤ 1.1e-3/k as a floor on kernel
/// sampling when no oscillation constrains anything. Node counts beyond
/// `max_nodes` are an error, not a silent accuracy downgrade.
///
/// This routine is deliberately independent of the closed forms: it never
/// touches the Lorentzian algebra, only the time-domain signal.
pub fn yield_quadrature_oracle_with_budget(
    spec: &RadicalPairSpec,
    params: &KineticParams,
    born: BornState,
    c: &PhysicalConstants,
    max_nodes: u64,
) -> Result<f64> {
    params.validate()?;
    let (k, r) = (params.k_per_s, params.r_per_s);
    let lines = merged_lines(&singlet_pair_spectrum(spec, params.b_ut, c)?);

    let omega_max = lines.last().map_or(0.0, |l| l.omega_rad_s);
    let mut h = (1.2e-8 / (k * (k + r))).sqrt().min(1.1e-3 / k);
    if omega_max > 0.0 {
        let f_max = omega_max / (2.0 * std::f64::consts::PI);
        h = h.min(1.0 / (50.0 * f_max));
    }
    let t_star = 1e10f64.ln() / k;
    let n_steps = (t_star / h).ceil() as u64;
    let needed = n_steps + 1;
    if needed > max_nodes {
        return Err(Error::QuadratureBudget {
            needed,
            cap: max_nodes,
        });
    }
    let h = t_star / n_steps as f64;

    // Trig/exp recurrences, reseeded with exact values every block so drift
    // cannot accumulate; Kahan compensation on the running sum.
    const RESEED: u64 = 4096;
    let nl = lines.len();
    let cos_h: Vec<f64> = lines.iter().map(|l| (l.omega_rad_s * h).cos()).collect();
    let mut cur = vec![0.0f64; nl];
    let mut prev = vec![0.0f64; nl];
    let ek_h = (-k * h).exp();
    let er_h = (-r * h).exp();
    let mut ekt = 1.0f64;
    let mut ert = 1.0f64;
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;

    for i in 0..=n_steps {
        if i % RESEED == 0 {
            let t = i as f64 * h;
            for (l, line) in lines.iter().enumerate() {
                cur[l] = (line.omega_rad_s * t).cos();
                prev[l] = (line.omega_rad_s * (t - h)).cos();
            }
            ekt = (-k * t).exp();
            ert = (-r * t).exp();
        } else {
            for l in 0..nl {
                let next = 2.0 * cos_h[l] * cur[l] - prev[l];
                prev[l] = cur[l];
                cur[l] = next;
            }
            ekt *= ek_h;
            ert *= er_h;
        }
        let mut dot = 0.0;
        for (l, line) in lines.iter().enumerate() {
            dot += line.weight * cur[l];
        }
        let p_coh = match born {
            BornState::Singlet => dot,
            BornState::Triplet => (1.0 - dot) / 3.0,
        };
        let p_rel = 0.25 - (0.25 - p_coh) * ert;
        let mut f = k * ekt * p_rel;
        if i == 0 || i == n_steps {
            f *= 0.5;
        }
        let y = f - comp;
        let t_sum = sum + y;
        comp = (t_sum - sum) - y;
        sum = t_sum;
    }
    Ok(sum * h)
}
