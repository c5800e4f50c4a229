//! Invariant checks over randomized inputs: structural identities the
//! physics guarantees for *every* valid model, not just the worked examples.

use num_complex::Complex64;
use proptest::prelude::*;

use radpair_core::dynamics::{coherent_singlet_probability, singlet_probability_trace};
use radpair_core::eigen::{eigendecompose, singlet_pair_spectrum};
use radpair_core::spin::SpinQuantumNumber;
use radpair_core::sweep::{fmt_float, sweep_kr, Grid1D, SweepOptions};
use radpair_core::yields::{yield_any, Channel, HmfContrast, KineticParams, YieldEngine};
use radpair_core::{
    build_hamiltonian, initial_density, singlet_projector, triplet_projector, BornState,
    ComplexMatrix, Electron, NucleusSpec, PhysicalConstants, RadicalPairSpec,
};

type C64 = Complex64;

fn cst() -> PhysicalConstants {
    PhysicalConstants::default()
}

fn spin_strategy() -> impl Strategy<Value = SpinQuantumNumber> {
    (1u32..=3).prop_map(|t| SpinQuantumNumber::new(t).unwrap())
}

fn nucleus_strategy() -> impl Strategy<Value = NucleusSpec> {
    (spin_strategy(), -5000.0..5000.0f64, prop_oneof![Just(Electron::A), Just(Electron::B)])
        .prop_map(|(spin, a, e)| NucleusSpec::new(spin, a, e).unwrap())
}

fn spec_strategy() -> impl Strategy<Value = RadicalPairSpec> {
    prop::collection::vec(nucleus_strategy(), 0..=2)
        .prop_map(|nuclei| RadicalPairSpec::new(nuclei).unwrap())
}

fn small_matrix_strategy(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n * n).prop_map(move |vals| {
        ComplexMatrix::from_fn(n, |i, j| {
            let (re, im) = vals[i * n + j];
            C64::new(re, im)
        })
    })
}

fn hermitian_strategy() -> impl Strategy<Value = ComplexMatrix> {
    (2usize..=8).prop_flat_map(|n| {
        prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n * n).prop_map(move |vals| {
            let raw = ComplexMatrix::from_fn(n, |i, j| {
                let (re, im) = vals[i * n + j];
                C64::new(re, im)
            });
            let mut h = ComplexMatrix::zeros(n);
            for i in 0..n {
                for j in 0..n {
                    let z = (raw.get(i, j) + raw.get(j, i).conj()) * 0.5;
                    h.set(i, j, if i == j { C64::new(z.re, 0.0) } else { z });
                }
            }
            h
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kron_mixed_product(
        a in small_matrix_strategy(2),
        b in small_matrix_strategy(3),
        c in small_matrix_strategy(2),
        d in small_matrix_strategy(3),
    ) {
        let lhs = a.kron(&b).dot(&c.kron(&d));
        let rhs = a.dot(&c).kron(&b.dot(&d));
        prop_assert!(lhs.sub(&rhs).max_abs() < 1e-12);
    }

    #[test]
    fn hamiltonian_is_hermitian_and_linear_in_field(
        spec in spec_strategy(),
        b1 in 0.0..1e4f64,
        b2 in 0.0..1e4f64,
    ) {
        let c = cst();
        let h1 = build_hamiltonian(&spec, b1, &c).unwrap();
        let h2 = build_hamiltonian(&spec, b2, &c).unwrap();
        // hermiticity is enforced on construction; field enters linearly
        // through the electron Zeeman term alone
        let diff = h2.sub(&h1);
        let (sa, sb) = (spec.electron_spin(Electron::A), spec.electron_spin(Electron::B));
        let zeeman = sa.sz.add(&sb.sz).scale((b2 - b1) * c.rad_per_ut());
        let scale = diff.max_abs().max(1.0);
        prop_assert!(diff.sub(&zeeman).max_abs() <= 1e-12 * scale);
    }

    #[test]
    fn projectors_resolve_identity_on_random_specs(spec in spec_strategy()) {
        let ps = singlet_projector(&spec);
        let pt = triplet_projector(&spec);
        let n = spec.total_dim();
        prop_assert!(ps.dot(&ps).sub(&ps).max_abs() < 1e-12);
        prop_assert!(ps.dot(&pt).max_abs() < 1e-12);
        prop_assert!(ps.add(&pt).sub(&ComplexMatrix::identity(n)).max_abs() < 1e-12);
        let m = spec.nuclear_multiplicity() as f64;
        prop_assert!((ps.trace().re - m).abs() < 1e-9);
        prop_assert!((pt.trace().re - 3.0 * m).abs() < 1e-9);
    }

    #[test]
    fn born_densities_are_unit_trace_hermitian(spec in spec_strategy()) {
        for born in [BornState::Singlet, BornState::Triplet] {
            let rho = initial_density(&spec, born);
            prop_assert!((rho.trace().re - 1.0).abs() < 1e-12);
            prop_assert!(rho.is_hermitian(1e-12));
            // idempotent up to normalization: projectors scaled by trace weight
            let w = match born {
                BornState::Singlet => spec.nuclear_multiplicity() as f64,
                BornState::Triplet => 3.0 * spec.nuclear_multiplicity() as f64,
            };
            prop_assert!(rho.dot(&rho).scale(w).sub(&rho).max_abs() < 1e-12);
        }
    }

    #[test]
    fn eigendecomposition_preserves_trace_and_norm(h in hermitian_strategy()) {
        let eig = eigendecompose(&h).unwrap();
        let tr: f64 = eig.values.iter().sum();
        let fro: f64 = eig.values.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert!((tr - h.trace().re).abs() < 1e-9 * h.frobenius().max(1.0));
        prop_assert!((fro - h.frobenius()).abs() < 1e-9 * h.frobenius().max(1.0));
        for w in eig.values.windows(2) {
            prop_assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn spectrum_is_normalized_ascending_nonnegative(
        spec in spec_strategy(),
        b in 0.0..5e3f64,
    ) {
        let spectrum = singlet_pair_spectrum(&spec, b, &cst()).unwrap();
        prop_assert!((spectrum.total_weight() - 1.0).abs() < 1e-9);
        let lines = &spectrum.lines;
        prop_assert!(!lines.is_empty());
        prop_assert!(lines[0].omega_rad_s >= 0.0);
        for w in lines.windows(2) {
            prop_assert!(w[0].omega_rad_s < w[1].omega_rad_s);
        }
        for l in lines {
            prop_assert!(l.weight > 0.0);
        }
    }

    #[test]
    fn yields_bounded_complementary_and_mixture_invariant(
        a in -5000.0..5000.0f64,
        b in 0.0..5e3f64,
        logk in 2.0..9.0f64,
        logr in 2.0..9.0f64,
    ) {
        let c = cst();
        let spec = RadicalPairSpec::single_nucleus(SpinQuantumNumber::HALF, a).unwrap();
        let params = KineticParams::new(10f64.powf(logk), 10f64.powf(logr), b).unwrap();
        let mut phis = Vec::new();
        for born in [BornState::Singlet, BornState::Triplet] {
            let s = yield_any(&spec, &params, born, Channel::Singlet, &c).unwrap().phi;
            let t = yield_any(&spec, &params, born, Channel::Triplet, &c).unwrap().phi;
            prop_assert!((0.0..=1.0).contains(&s) && (0.0..=1.0).contains(&t));
            prop_assert!((s + t - 1.0).abs() < 1e-12);
            phis.push(s);
        }
        // an unpolarized pair retains no field memory in its total recombined
        // singlet fraction
        let mixture = 0.25 * phis[0] + 0.75 * phis[1];
        prop_assert!((mixture - 0.25).abs() < 1e-9);
    }

    #[test]
    fn coherent_probability_is_even_in_time(
        a in -3000.0..3000.0f64,
        b in 0.0..1e3f64,
        t in 0.0..1e-5f64,
    ) {
        let spectrum = singlet_pair_spectrum(
            &RadicalPairSpec::single_nucleus(SpinQuantumNumber::HALF, a).unwrap(),
            b,
            &cst(),
        )
        .unwrap();
        let fwd = coherent_singlet_probability(&spectrum, t);
        let bwd = coherent_singlet_probability(&spectrum, -t);
        prop_assert!((fwd - bwd).abs() < 1e-12);
        prop_assert!((-1e-10..=1.0 + 1e-10).contains(&fwd));
    }

    #[test]
    fn relaxation_forgets_the_initial_state(
        a in 100.0..3000.0f64,
        b in 0.0..500.0f64,
        logr in 4.0..7.0f64,
    ) {
        let r = 10f64.powf(logr);
        let spec = RadicalPairSpec::single_nucleus(SpinQuantumNumber::HALF, a).unwrap();
        let t_late = 40.0 / r;
        let trace =
            singlet_probability_trace(&spec, b, r, &[0.0, t_late], &cst()).unwrap();
        prop_assert!((trace.probabilities[0] - 1.0).abs() < 1e-10);
        prop_assert!((trace.probabilities[1] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn generated_grids_are_sorted_with_exact_endpoints(
        min in 1e-3..1e3f64,
        span in 1.001..1e4f64,
        count in 2usize..200,
    ) {
        let max = min * span;
        for grid in [
            Grid1D::linear("x", min, max, count).unwrap(),
            Grid1D::log("x", min, max, count).unwrap(),
        ] {
            prop_assert_eq!(grid.len(), count);
            prop_assert_eq!(grid.values()[0], min);
            prop_assert_eq!(*grid.values().last().unwrap(), max);
            for w in grid.values().windows(2) {
                prop_assert!(w[0] < w[1]);
            }
        }
    }

    #[test]
    fn float_formatting_round_trips(x in prop::num::f64::NORMAL) {
        let shown = fmt_float(x);
        prop_assert_eq!(shown.parse::<f64>().unwrap(), x);
    }
}

/// The line-sum formula must agree with direct unitary evolution of the
/// density matrix — same physics through a completely different pipeline.
#[test]
fn trace_matches_direct_propagation() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x7107);
    let c = cst();
    for _ in 0..6 {
        let a = rng.gen_range(-2000.0..2000.0);
        let b = rng.gen_range(0.0..200.0);
        let spin = if rng.gen_bool(0.5) {
            SpinQuantumNumber::HALF
        } else {
            SpinQuantumNumber::ONE
        };
        let spec = RadicalPairSpec::single_nucleus(spin, a).unwrap();
        let n = spec.total_dim();

        let h = build_hamiltonian(&spec, b, &c).unwrap();
        let eig = eigendecompose(&h).unwrap();
        let ps = singlet_projector(&spec);
        let rho0 = initial_density(&spec, BornState::Singlet);

        let times: Vec<f64> = (0..32).map(|i| i as f64 * 2e-7).collect();
        let trace = singlet_probability_trace(&spec, b, 0.0, &times, &c).unwrap();

        for (idx, &t) in times.iter().enumerate() {
            // U = V e^{-iΛt} V†
            let mut phases = ComplexMatrix::zeros(n);
            for (k, &lambda) in eig.values.iter().enumerate() {
                phases.set(k, k, (C64::new(0.0, -lambda * t)).exp());
            }
            let u = eig.vectors.dot(&phases).dot(&eig.vectors.adjoint());
            let rho_t = u.dot(&rho0).dot(&u.adjoint());
            let direct = ps.dot(&rho_t).trace().re;
            assert!(
                (direct - trace.probabilities[idx]).abs() < 1e-10,
                "t = {t:.2e}: direct {direct} vs line sum {}",
                trace.probabilities[idx]
            );
        }
    }
}

/// Flipping the sign of one coupling must leave the strong-contrast region
/// of the (k, r) map nearly unchanged.
#[test]
fn contrast_region_is_sign_robust() {
    let c = cst();
    let same = RadicalPairSpec::new(vec![
        NucleusSpec::new(SpinQuantumNumber::HALF, 500.0, Electron::A).unwrap(),
        NucleusSpec::new(SpinQuantumNumber::HALF, 500.0, Electron::A).unwrap(),
    ])
    .unwrap();
    let flipped = RadicalPairSpec::new(vec![
        NucleusSpec::new(SpinQuantumNumber::HALF, 500.0, Electron::A).unwrap(),
        NucleusSpec::new(SpinQuantumNumber::HALF, -500.0, Electron::A).unwrap(),
    ])
    .unwrap();

    let kg = Grid1D::log("k_per_s", 1e3, 1e9, 31).unwrap();
    let rg = Grid1D::log("r_per_s", 1e3, 1e9, 31).unwrap();
    let mut regions = Vec::new();
    for spec in [&same, &flipped] {
        let recs = sweep_kr(
            spec,
            &kg,
            &rg,
            BornState::Singlet,
            Channel::Singlet,
            HmfContrast::default(),
            &c,
            SweepOptions::default(),
        )
        .unwrap();
        let region: Vec<bool> = recs.iter().map(|r| r.delta_percent > 10.0).collect();
        regions.push(region);
    }
    let inter = regions[0]
        .iter()
        .zip(&regions[1])
        .filter(|(x, y)| **x && **y)
        .count();
    let union = regions[0]
        .iter()
        .zip(&regions[1])
        .filter(|(x, y)| **x || **y)
        .count();
    assert!(union > 0, "no strong-contrast cells at all");
    let jaccard = inter as f64 / union as f64;
    assert!(jaccard >= 0.8, "region overlap too low: {jaccard:.3}");
}

/// The shared-spectrum engine must agree with the one-shot entry point.
#[test]
fn engine_matches_one_shot_api() {
    let c = cst();
    let spec = RadicalPairSpec::single_nucleus(SpinQuantumNumber::HALF, 1000.0).unwrap();
    let engine = YieldEngine::new(&spec, 50.0, &c).unwrap();
    for (k, r) in [(1e6, 1e4), (1e5, 1e7), (5e3, 5e3)] {
        let params = KineticParams::new(k, r, 50.0).unwrap();
        for born in [BornState::Singlet, BornState::Triplet] {
            for channel in [Channel::Singlet, Channel::Triplet] {
                let fast = engine.yield_for(born, channel, k, r);
                let slow = yield_any(&spec, &params, born, channel, &c).unwrap().phi;
                assert_eq!(fast, slow);
            }
        }
    }
}
