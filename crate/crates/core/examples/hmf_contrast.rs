//! Minimal end-to-end use: hypomagnetic contrast for a one-proton pair.

use radpair_core::yields::{hmf_effect, Channel, HmfContrast};
use radpair_core::{BornState, PhysicalConstants, RadicalPairSpec, SpinQuantumNumber};

fn main() -> radpair_core::Result<()> {
    // one spin-1/2 nucleus on radical A with a 1000 µT coupling
    let spec = RadicalPairSpec::single_nucleus(SpinQuantumNumber::HALF, 1000.0)?;
    let effect = hmf_effect(
        &spec,
        1e6, // reaction rate k (s^-1)
        1e4, // relaxation rate r (s^-1)
        BornState::Singlet,
        Channel::Singlet,
        HmfContrast::default(), // 1 µT vs 50 µT
        &PhysicalConstants::default(),
    )?;
    println!("yield change: {:.2} %", effect.delta_percent);
    Ok(())
}
