//! Parameter-grid sweeps with deterministic, serialization-stable output.
//!
//! Cells run in parallel (rayon) but results are gathered into grid-index
//! order, so the emitted CSV/JSON is byte-identical no matter how many
//! workers ran. Eigendecompositions are hoisted: one per distinct
//! (spec, field) combination, shared read-only across cells.

use rayon::prelude::*;

use crate::system::{BornState, NucleusSpec, PhysicalConstants, RadicalPairSpec};
use crate::tol;
use crate::yields::{Channel, HmfContrast, KineticParams, YieldEngine};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

impl Spacing {
    pub fn as_str(&self) -> &'static str {
        match self {
            Spacing::Linear => "linear",
            Spacing::Log => "log",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    name: String,
    values: Vec<f64>,
    spacing: Spacing,
}

impl Grid1D {
    pub fn linear(name: &str, min: f64, max: f64, count: usize) -> Result<Self> {
        Self::generated(name, min, max, count, Spacing::Linear)
    }

    pub fn log(name: &str, min: f64, max: f64, count: usize) -> Result<Self> {
        if min <= 0.0 {
            return Err(Error::invalid(format!(
                "log grid '{name}' needs min > 0, got {min}"
            )));
        }
        Self::generated(name, min, max, count, Spacing::Log)
    }

    fn generated(name: &str, min: f64, max: f64, count: usize, spacing: Spacing) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) {
            return Err(Error::invalid(format!("grid '{name}' bounds must be finite")));
        }
        if count == 0 {
            return Err(Error::invalid(format!("grid '{name}' needs at least one point")));
        }
        if count == 1 {
            if min != max {
                return Err(Error::invalid(format!(
                    "grid '{name}' with one point needs min == max"
                )));
            }
            return Ok(Grid1D {
                name: name.to_string(),
                values: vec![min],
                spacing,
            });
        }
        if min >= max {
            return Err(Error::invalid(format!(
                "grid '{name}' needs min < max, got [{min}, {max}]"
            )));
        }
        let n = count - 1;
        let values: Vec<f64> = (0..count)
            .map(|i| {
                if i == 0 {
                    min
                } else if i == n {
                    max // endpoints exact, no pow/exp round-off
                } else {
                    match spacing {
                        Spacing::Linear => min + (max - min) * i as f64 / n as f64,
                        Spacing::Log => min * (max / min).powf(i as f64 / n as f64),
                    }
                }
            })
            .collect();
        Ok(Grid1D {
            name: name.to_string(),
            values,
            spacing,
        })
    }

    /// Explicit values; must be finite, strictly increasing, and (for grids
    /// labeled log) non-negative.
    pub fn from_values(name: &str, values: Vec<f64>, spacing: Spacing) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid(format!("grid '{name}' needs at least one point")));
        }
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::invalid(format!("grid '{name}' value {i} not finite")));
            }
            if i > 0 && values[i - 1] >= *v {
                return Err(Error::invalid(format!(
                    "grid '{name}' must be strictly increasing (index {i})"
                )));
            }
            if spacing == Spacing::Log && *v < 0.0 {
                return Err(Error::invalid(format!(
                    "log-labeled grid '{name}' cannot contain negatives"
                )));
            }
        }
        Ok(Grid1D {
            name: name.to_string(),
            values,
            spacing,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }
}

/// 0 µT plus 60 log-spaced points in [0.1, 1e4] µT.
pub fn default_field_grid() -> Grid1D {
    let mut values = vec![0.0];
    values.extend_from_slice(Grid1D::log("B_uT", 0.1, 1e4, 60).unwrap().values());
    Grid1D::from_values("B_uT", values, Spacing::Log).unwrap()
}

/// 60 log-spaced points in [10, 1e6] µT.
pub fn default_hyperfine_grid() -> Grid1D {
    Grid1D::log("a_uT", 10.0, 1e6, 60).unwrap()
}

/// 61 log-spaced points in [1e3, 1e9] s⁻¹.
pub fn default_rate_grid(name: &str) -> Grid1D {
    Grid1D::log(name, 1e3, 1e9, 61).unwrap()
}

/// Rate pairs for field sweeps: both peak-present (k > r) and
/// peak-suppressed (k < r) regimes.
pub const DEFAULT_RATE_PAIRS_FIELD: [(f64, f64); 4] =
    [(1e6, 1e4), (1e6, 1e5), (1e5, 1e6), (1e4, 1e6)];

/// Rate pairs for hyperfine sweeps. These are fast-kinetics pairs
/// (k + r ≥ ~1e7 s⁻¹): with slow kinetics the low-field beat line keeps a
/// field-dependent splitting ~B/2 whatever the coupling strength, so the
/// contrast would plateau near 37% instead of dying off at strong coupling.
/// Rate broadening beyond that splitting is what makes the effect vanish
/// for large a, which is the regime these sweeps are meant to show.
pub const DEFAULT_RATE_PAIRS_HYPERFINE: [(f64, f64); 4] =
    [(1e8, 1e6), (1e8, 1e7), (1e7, 1e8), (1e6, 1e8)];

fn fnv1a64(s: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub spec_hash: String,
    pub tool_version: String,
}

impl Provenance {
    pub fn for_spec(spec: &RadicalPairSpec) -> Self {
        Provenance {
            spec_hash: format!("{:016x}", fnv1a64(&spec.fingerprint())),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    /// For sweeps where the coupling itself is the swept axis: hash the
    /// template with the coupling masked out.
    pub fn for_template(template: &RadicalPairSpec) -> Self {
        let masked: Vec<String> = template
            .nuclei()
            .map(|n| format!("{:?}:{}:var", n.electron(), n.spin().twice_spin()))
            .collect();
        Provenance {
            spec_hash: format!(
                "{:016x}",
                fnv1a64(&format!("radpair-template/v1;{}", masked.join(";")))
            ),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

/// 17 significant digits, −0 folded into 0, so equal values always
/// serialize to equal bytes.
pub fn fmt_float(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

#[derive(Debug, Clone)]
pub enum FieldValue {
    Num(f64),
    Str(&'static str),
}

pub trait SweepRecord {
    fn fields(&self) -> Vec<(&'static str, FieldValue)>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSweepRecord {
    pub b_ut: f64,
    pub k_per_s: f64,
    pub r_per_s: f64,
    pub born: BornState,
    pub channel: Channel,
    pub phi: f64,
}

impl SweepRecord for FieldSweepRecord {
    fn fields(&self) -> Vec<(&'static str, FieldValue)> {
        vec![
            ("b_ut", FieldValue::Num(self.b_ut)),
            ("k_per_s", FieldValue::Num(self.k_per_s)),
            ("r_per_s", FieldValue::Num(self.r_per_s)),
            ("born", FieldValue::Str(self.born.as_str())),
            ("channel", FieldValue::Str(self.channel.as_str())),
            ("phi", FieldValue::Num(self.phi)),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperfineSweepRecord {
    pub a_ut: f64,
    pub a_eff_ut: f64,
    pub k_per_s: f64,
    pub r_per_s: f64,
    pub delta_percent: f64,
    pub phi_hmf: f64,
    pub phi_gmf: f64,
}

impl SweepRecord for HyperfineSweepRecord {
    fn fields(&self) -> Vec<(&'static str, FieldValue)> {
        vec![
            ("a_ut", FieldValue::Num(self.a_ut)),
            ("a_eff_ut", FieldValue::Num(self.a_eff_ut)),
            ("k_per_s", FieldValue::Num(self.k_per_s)),
            ("r_per_s", FieldValue::Num(self.r_per_s)),
            ("delta_percent", FieldValue::Num(self.delta_percent)),
            ("phi_hmf", FieldValue::Num(self.phi_hmf)),
            ("phi_gmf", FieldValue::Num(self.phi_gmf)),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrSweepRecord {
    pub k_per_s: f64,
    pub r_per_s: f64,
    pub born: BornState,
    pub channel: Channel,
    pub delta_percent: f64,
    pub phi_hmf: f64,
    pub phi_gmf: f64,
}

impl SweepRecord for KrSweepRecord {
    fn fields(&self) -> Vec<(&'static str, FieldValue)> {
        vec![
            ("k_per_s", FieldValue::Num(self.k_per_s)),
            ("r_per_s", FieldValue::Num(self.r_per_s)),
            ("born", FieldValue::Str(self.born.as_str())),
            ("channel", FieldValue::Str(self.channel.as_str())),
            ("delta_percent", FieldValue::Num(self.delta_percent)),
            ("phi_hmf", FieldValue::Num(self.phi_hmf)),
            ("phi_gmf", FieldValue::Num(self.phi_gmf)),
        ]
    }
}

pub fn to_csv<R: SweepRecord>(records: &[R], prov: &Provenance) -> String {
    let mut out = String::new();
    if let Some(first) = records.first() {
        let mut headers: Vec<&str> = first.fields().iter().map(|(h, _)| *h).collect();
        headers.push("spec_hash");
        headers.push("tool_version");
        out.push_str(&headers.join(","));
        out.push('\n');
    }
    for r in records {
        let mut cols: Vec<String> = r
            .fields()
            .iter()
            .map(|(_, v)| match v {
                FieldValue::Num(x) => fmt_float(*x),
                FieldValue::Str(s) => s.to_string(),
            })
            .collect();
        cols.push(prov.spec_hash.clone());
        cols.push(prov.tool_version.clone());
        out.push_str(&cols.join(","));
        out.push('\n');
    }
    out
}

pub fn to_jsonl<R: SweepRecord>(records: &[R], prov: &Provenance) -> String {
    let mut out = String::new();
    for r in records {
        let mut parts: Vec<String> = r
            .fields()
            .iter()
            .map(|(h, v)| match v {
                FieldValue::Num(x) => format!("\"{h}\":{}", fmt_float(*x)),
                FieldValue::Str(s) => format!("\"{h}\":\"{s}\""),
            })
            .collect();
        parts.push(format!("\"spec_hash\":\"{}\"", prov.spec_hash));
        parts.push(format!("\"tool_version\":\"{}\"", prov.tool_version));
        out.push('{');
        out.push_str(&parts.join(","));
        out.push_str("}\n");
    }
    out
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SweepOptions {
    /// None ⇒ rayon's global pool (all cores).
    pub workers: Option<usize>,
}

fn with_pool<T: Send>(opts: SweepOptions, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match opts.workers {
        None => f(),
        Some(n) => {
            if n == 0 {
                return Err(Error::invalid("worker count must be ≥ 1"));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::invalid(format!("worker pool: {e}")))?;
            pool.install(f)
        }
    }
}

/// Φ(B) for one (k, r): one eigendecomposition per field point, grid order
/// preserved in the output.
#[allow(clippy::too_many_arguments)]
pub fn sweep_field(
    spec: &RadicalPairSpec,
    k_per_s: f64,
    r_per_s: f64,
    born: BornState,
    channel: Channel,
    b_grid: &Grid1D,
    c: &PhysicalConstants,
    opts: SweepOptions,
) -> Result<Vec<FieldSweepRecord>> {
    for &b in b_grid.values() {
        KineticParams::new(k_per_s, r_per_s, b)?;
    }
    with_pool(opts, || {
        b_grid
            .values()
            .par_iter()
            .map(|&b_ut| {
                let engine = YieldEngine::new(spec, b_ut, c)?;
                Ok(FieldSweepRecord {
                    b_ut,
                    k_per_s,
                    r_per_s,
                    born,
                    channel,
                    phi: engine.yield_for(born, channel, k_per_s, r_per_s),
                })
            })
            .collect()
    })
}

/// ΔΘ of the singlet-born singlet yield per (a, k, r). The template must
/// carry exactly one nucleus; its coupling is replaced by each grid value.
pub fn sweep_hyperfine(
    template: &RadicalPairSpec,
    rate_pairs: &[(f64, f64)],
    a_grid: &Grid1D,
    contrast: HmfContrast,
    c: &PhysicalConstants,
    opts: SweepOptions,
) -> Result<Vec<HyperfineSweepRecord>> {
    if template.nucleus_count() != 1 {
        return Err(Error::invalid(
            "hyperfine sweep needs a single-nucleus template",
        ));
    }
    if rate_pairs.is_empty() {
        return Err(Error::invalid("at least one (k, r) pair required"));
    }
    for &(k, r) in rate_pairs {
        KineticParams::new(k, r, contrast.b_hmf_ut)?;
        KineticParams::new(k, r, contrast.b_gmf_ut)?;
    }
    let nucleus = *template.nuclei().next().unwrap();
    let specs: Vec<RadicalPairSpec> = a_grid
        .values()
        .iter()
        .map(|&a_ut| {
            RadicalPairSpec::new(vec![NucleusSpec::new(
                nucleus.spin(),
                a_ut,
                nucleus.electron(),
            )?])
        })
        .collect::<Result<_>>()?;

    with_pool(opts, || {
        let nested: Vec<Vec<HyperfineSweepRecord>> = specs
            .par_iter()
            .map(|spec_a| {
                let e_hmf = YieldEngine::new(spec_a, contrast.b_hmf_ut, c)?;
                let e_gmf = YieldEngine::new(spec_a, contrast.b_gmf_ut, c)?;
                let a_ut = spec_a.nuclei().next().unwrap().a_iso_ut();
                let a_eff_ut =
                    crate::yields::effective_hyperfine(&spec_a.couplings()).unwrap_or(0.0);
                rate_pairs
                    .iter()
                    .map(|&(k, r)| {
                        let phi_hmf =
                            e_hmf.yield_for(BornState::Singlet, Channel::Singlet, k, r);
                        let phi_gmf =
                            e_gmf.yield_for(BornState::Singlet, Channel::Singlet, k, r);
                        if phi_hmf.abs() < tol::CONTRAST_DENOM_MIN {
                            return Err(Error::UndefinedContrast {
                                phi_abs: phi_hmf.abs(),
                                min: tol::CONTRAST_DENOM_MIN,
                            });
                        }
                        Ok(HyperfineSweepRecord {
                            a_ut,
                            a_eff_ut,
                            k_per_s: k,
                            r_per_s: r,
                            delta_percent: ((phi_hmf - phi_gmf) / phi_hmf).abs() * 100.0,
                            phi_hmf,
                            phi_gmf,
                        })
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        Ok(nested.into_iter().flatten().collect())
    })
}

/// Full ΔΘ(k, r) map. Exactly two eigendecompositions run, one per field;
/// every cell reuses them.
#[allow(clippy::too_many_arguments)]
pub fn sweep_kr(
    spec: &RadicalPairSpec,
    k_grid: &Grid1D,
    r_grid: &Grid1D,
    born: BornState,
    channel: Channel,
    contrast: HmfContrast,
    c: &PhysicalConstants,
    opts: SweepOptions,
) -> Result<Vec<KrSweepRecord>> {
    for &k in k_grid.values() {
        for &r in [r_grid.values()[0], *r_grid.values().last().unwrap()].iter() {
            KineticParams::new(k, r, contrast.b_hmf_ut)?;
            KineticParams::new(k, r, contrast.b_gmf_ut)?;
        }
    }
    for &r in r_grid.values() {
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::invalid(format!("relaxation grid value {r} invalid")));
        }
    }
    let e_hmf = YieldEngine::new(spec, contrast.b_hmf_ut, c)?;
    let e_gmf = YieldEngine::new(spec, contrast.b_gmf_ut, c)?;

    let ks = k_grid.values();
    let rs = r_grid.values();
    let cells = ks.len() * rs.len();
    with_pool(opts, || {
        (0..cells)
            .into_par_iter()
            .map(|idx| {
                let k = ks[idx / rs.len()];
                let r = rs[idx % rs.len()];
                let phi_hmf = e_hmf.yield_for(born, channel, k, r);
                let phi_gmf = e_gmf.yield_for(born, channel, k, r);
                if phi_hmf.abs() < tol::CONTRAST_DENOM_MIN {
                    return Err(Error::UndefinedContrast {
                        phi_abs: phi_hmf.abs(),
                        min: tol::CONTRAST_DENOM_MIN,
                    });
                }
                Ok(KrSweepRecord {
                    k_per_s: k,
                    r_per_s: r,
                    born,
                    channel,
                    delta_percent: ((phi_hmf - phi_gmf) / phi_hmf).abs() * 100.0,
                    phi_hmf,
                    phi_gmf,
                })
            })
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::SpinQuantumNumber;
    use crate::yields::{hmf_effect, yield_any};

    fn one_proton(a: f64) -> RadicalPairSpec {
        RadicalPairSpec::single_nucleus(SpinQuantumNumber::HALF, a).unwrap()
    }

    fn cst() -> PhysicalConstants {
        PhysicalConstants::default()
    }

    #[test]
    fn grid_constructors() {
        let g = Grid1D::log("k_per_s", 1e3, 1e9, 61).unwrap();
        assert_eq!(g.len(), 61);
        assert_eq!(g.values()[0], 1e3);
        assert_eq!(*g.values().last().unwrap(), 1e9);
        for w in g.values().windows(2) {
            assert!(w[0] < w[1]);
        }
        // 61 points over 6 decades ⇒ 10 points per decade
        assert!((g.values()[10] - 1e4).abs() < 1e4 * 1e-12);

        let lin = Grid1D::linear("B_uT", 0.0, 10.0, 11).unwrap();
        assert_eq!(lin.values()[3], 3.0);

        assert!(Grid1D::log("x", 0.0, 1.0, 5).is_err());
        assert!(Grid1D::log("x", -1.0, 1.0, 5).is_err());
        assert!(Grid1D::linear("x", 0.0, 1.0, 0).is_err());
        assert!(Grid1D::linear("x", 2.0, 1.0, 5).is_err());
        assert!(Grid1D::linear("x", 1.0, 2.0, 1).is_err());
        assert!(Grid1D::linear("x", 5.0, 5.0, 1).is_ok());
        assert!(Grid1D::from_values("x", vec![1.0, 1.0], Spacing::Linear).is_err());
        assert!(Grid1D::from_values("x", vec![], Spacing::Linear).is_err());
    }

    #[test]
    fn default_grids_shape() {
        let b = default_field_grid();
        assert_eq!(b.len(), 61);
        assert_eq!(b.values()[0], 0.0);
        assert_eq!(b.values()[1], 0.1);
        assert_eq!(*b.values().last().unwrap(), 1e4);

        let a = default_hyperfine_grid();
        assert_eq!(a.len(), 60);
        assert_eq!(a.values()[0], 10.0);
        assert_eq!(*a.values().last().unwrap(), 1e6);

        let k = default_rate_grid("k_per_s");
        assert_eq!(k.len(), 61);
        assert_eq!(k.values()[0], 1e3);
        assert_eq!(*k.values().last().unwrap(), 1e9);
    }

    #[test]
    fn float_formatting_is_stable() {
        assert_eq!(fmt_float(37.5), "3.7500000000000000e1");
        assert_eq!(fmt_float(0.0), fmt_float(-0.0));
        assert_eq!(fmt_float(1e-4), "1.0000000000000000e-4");
        // round-trips exactly at 17 significant digits
        assert_eq!(fmt_float(37.6).parse::<f64>().unwrap(), 37.6);
    }

    #[test]
    fn single_point_field_sweep_matches_yield_any() {
        let spec = one_proton(1000.0);
        let grid = Grid1D::from_values("B_uT", vec![50.0], Spacing::Linear).unwrap();
        let recs = sweep_field(
            &spec,
            1e6,
            1e5,
            BornState::Singlet,
            Channel::Singlet,
            &grid,
            &cst(),
            SweepOptions::default(),
        )
        .unwrap();
        assert_eq!(recs.len(), 1);
        let direct = yield_any(
            &spec,
            &KineticParams::new(1e6, 1e5, 50.0).unwrap(),
            BornState::Singlet,
            Channel::Singlet,
            &cst(),
        )
        .unwrap();
        assert_eq!(recs[0].phi, direct.phi);
    }

    #[test]
    fn single_cell_kr_sweep_matches_hmf_effect() {
        let spec = one_proton(1000.0);
        let kg = Grid1D::from_values("k_per_s", vec![1e6], Spacing::Log).unwrap();
        let rg = Grid1D::from_values("r_per_s", vec![1e4], Spacing::Log).unwrap();
        let recs = sweep_kr(
            &spec,
            &kg,
            &rg,
            BornState::Singlet,
            Channel::Singlet,
            HmfContrast::default(),
            &cst(),
            SweepOptions::default(),
        )
        .unwrap();
        assert_eq!(recs.len(), 1);
        let direct = hmf_effect(
            &spec,
            1e6,
            1e4,
            BornState::Singlet,
            Channel::Singlet,
            HmfContrast::default(),
            &cst(),
        )
        .unwrap();
        assert_eq!(recs[0].delta_percent, direct.delta_percent);
        assert_eq!(recs[0].phi_hmf, direct.phi_hmf);
    }

    #[test]
    fn kr_sweep_is_deterministic_across_worker_counts() {
        let spec = one_proton(1000.0);
        let kg = Grid1D::log("k_per_s", 1e4, 1e8, 5).unwrap();
        let rg = Grid1D::log("r_per_s", 1e3, 1e7, 4).unwrap();
        let prov = Provenance::for_spec(&spec);
        let mut outputs = Vec::new();
        for workers in [Some(1), Some(3), None] {
            let recs = sweep_kr(
                &spec,
                &kg,
                &rg,
                BornState::Singlet,
                Channel::Singlet,
                HmfContrast::default(),
                &cst(),
                SweepOptions { workers },
            )
            .unwrap();
            outputs.push(to_csv(&recs, &prov));
        }
        assert_eq!(outputs[0], outputs[1]);
        assert_eq!(outputs[0], outputs[2]);
    }

    #[test]
    fn kr_records_in_lexicographic_order() {
        let spec = one_proton(500.0);
        let kg = Grid1D::log("k_per_s", 1e4, 1e6, 3).unwrap();
        let rg = Grid1D::log("r_per_s", 1e3, 1e5, 2).unwrap();
        let recs = sweep_kr(
            &spec,
            &kg,
            &rg,
            BornState::Singlet,
            Channel::Singlet,
            HmfContrast::default(),
            &cst(),
            SweepOptions { workers: Some(4) },
        )
        .unwrap();
        assert_eq!(recs.len(), 6);
        for pair in recs.windows(2) {
            let a = (pair[0].k_per_s, pair[0].r_per_s);
            let b = (pair[1].k_per_s, pair[1].r_per_s);
            assert!(a < b || (a.0 == b.0 && a.1 < b.1) || a.0 < b.0);
        }
        assert_eq!(recs[0].k_per_s, recs[1].k_per_s);
        assert!(recs[0].r_per_s < recs[1].r_per_s);
    }

    #[test]
    fn hyperfine_sweep_needs_single_nucleus_template() {
        let bare = RadicalPairSpec::bare();
        let grid = Grid1D::log("a_uT", 10.0, 100.0, 3).unwrap();
        let res = sweep_hyperfine(
            &bare,
            &[(1e6, 1e4)],
            &grid,
            HmfContrast::default(),
            &cst(),
            SweepOptions::default(),
        );
        assert!(res.is_err());
    }

    #[test]
    fn hyperfine_sweep_record_order_and_values() {
        let template = one_proton(1000.0);
        let grid = Grid1D::from_values("a_uT", vec![0.0, 1000.0], Spacing::Log).unwrap();
        let pairs = [(1e6, 1e4), (1e6, 1e5)];
        let recs = sweep_hyperfine(
            &template,
            &pairs,
            &grid,
            HmfContrast::default(),
            &cst(),
            SweepOptions::default(),
        )
        .unwrap();
        assert_eq!(recs.len(), 4);
        // (a_idx, pair_idx) lexicographic
        assert_eq!(recs[0].a_ut, 0.0);
        assert_eq!(recs[0].k_per_s, 1e6);
        assert_eq!(recs[1].a_ut, 0.0);
        assert_eq!(recs[1].k_per_s, 1e6);
        assert_eq!(recs[1].r_per_s, 1e5);
        assert_eq!(recs[2].a_ut, 1000.0);
        // no coupling ⇒ exactly zero contrast
        assert_eq!(recs[0].delta_percent, 0.0);
        assert_eq!(recs[1].delta_percent, 0.0);
        // and the workhorse point matches the direct evaluation
        let direct = hmf_effect(
            &template,
            1e6,
            1e4,
            BornState::Singlet,
            Channel::Singlet,
            HmfContrast::default(),
            &cst(),
        )
        .unwrap();
        assert_eq!(recs[2].delta_percent, direct.delta_percent);
        assert_eq!(recs[2].a_eff_ut, 1000.0);
    }

    #[test]
    fn csv_layout() {
        let spec = one_proton(1000.0);
        let prov = Provenance::for_spec(&spec);
        let recs = vec![FieldSweepRecord {
            b_ut: 50.0,
            k_per_s: 1e6,
            r_per_s: 1e5,
            born: BornState::Singlet,
            channel: Channel::Singlet,
            phi: 0.375,
        }];
        let csv = to_csv(&recs, &prov);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "b_ut,k_per_s,r_per_s,born,channel,phi,spec_hash,tool_version"
        );
        let row = lines.next().unwrap();
        assert!(row.starts_with("5.0000000000000000e1,1.0000000000000000e6,"));
        assert!(row.contains(",singlet,singlet,3.7500000000000000e-1,"));
        assert!(row.ends_with(&prov.tool_version));
        assert_eq!(lines.next(), None);
    }

    #[test]
    fn jsonl_layout() {
        let spec = one_proton(1000.0);
        let prov = Provenance::for_spec(&spec);
        let recs = vec![KrSweepRecord {
            k_per_s: 1e6,
            r_per_s: 0.0,
            born: BornState::Triplet,
            channel: Channel::Triplet,
            delta_percent: 1.5,
            phi_hmf: 0.5,
            phi_gmf: 0.4,
        }];
        let jsonl = to_jsonl(&recs, &prov);
        let line = jsonl.lines().next().unwrap();
        assert!(line.starts_with("{\"k_per_s\":1.0000000000000000e6,"));
        assert!(line.contains("\"born\":\"triplet\""));
        assert!(line.contains("\"delta_percent\":1.5000000000000000e0"));
        assert!(line.ends_with("}"));
    }

    #[test]
    fn provenance_hash_is_stable_and_spec_sensitive() {
        let p1 = Provenance::for_spec(&one_proton(1000.0));
        let p2 = Provenance::for_spec(&one_proton(1000.0));
        let p3 = Provenance::for_spec(&one_proton(999.0));
        assert_eq!(p1.spec_hash, p2.spec_hash);
        assert_ne!(p1.spec_hash, p3.spec_hash);
        assert_eq!(p1.spec_hash.len(), 16);
    }

    #[test]
    fn worker_pool_validation() {
        let spec = one_proton(1000.0);
        let grid = Grid1D::from_values("B_uT", vec![0.0], Spacing::Linear).unwrap();
        let res = sweep_field(
            &spec,
            1e6,
            1e4,
            BornState::Singlet,
            Channel::Singlet,
            &grid,
            &cst(),
            SweepOptions { workers: Some(0) },
        );
        assert!(res.is_err());
    }
}
