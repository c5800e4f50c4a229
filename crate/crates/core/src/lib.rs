//! Spin dynamics of radical pairs in weak magnetic fields.
//!
//! Two unpaired electrons, each optionally coupled to a set of nuclear spins
//! through isotropic hyperfine constants, evolve under a Zeeman + hyperfine
//! Hamiltonian. Singlet/triplet recombination yields follow in closed form
//! from the eigendecomposition, and parameter sweeps quantify how much the
//! singlet yield changes when the ambient field drops from geomagnetic
//! (~50 µT) to hypomagnetic (~1 µT) levels.
//!
//! Energies are tracked in angular frequency units (rad/s); magnetic fields
//! and hyperfine couplings are given in µT and scaled by the electron
//! gyromagnetic ratio on entry.

pub mod dynamics;
pub mod eigen;
mod error;
pub mod matrix;
pub mod spin;
pub mod sweep;
pub mod system;
pub mod tol;
pub mod yields;

pub use error::Error;
pub use matrix::ComplexMatrix;
pub use spin::{spin_operators, OperatorTriple, SpinQuantumNumber};
pub use system::{
    build_hamiltonian, initial_density, printed_matrix_diagnostic, singlet_born_state,
    singlet_projector, triplet_projector, BornState, Electron, MatrixMismatch, NucleusSpec,
    PhysicalConstants, RadicalPairSpec,
};

pub type Result<T> = std::result::Result<T, Error>;
