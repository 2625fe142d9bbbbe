//! Small-register simulation of quantum annealing: the interpolated
//! Hamiltonian, its low-lying spectrum and gap, and the Schrodinger dynamics.

pub mod eigen;
pub mod error;
pub mod evolve;
pub mod hamiltonian;
pub mod instances;
pub mod spectrum;
pub mod state;

pub use eigen::{lowest_eigenpairs, EigenMethod, Eigenpairs};
pub use error::{QaError, Result};
pub use evolve::{evolve, evolve_frozen, EvolutionResult, EvolveOptions, TrajectoryPoint};
pub use hamiltonian::{problem_diagonal, ControlHamiltonian, Operator};
pub use instances::signed_chimera_instance;
pub use spectrum::{driver_element, spectrum_point, spectrum_scan, SpectrumPoint, SpectrumScan};
pub use state::{measurement_stats, QuantumState};
