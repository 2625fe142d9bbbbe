//! QUBO and Ising models, hardware graphs and classical solvers.

pub mod assignment;
pub mod error;
pub mod graph;
pub mod io;
pub mod model;
pub mod solvers;

pub use assignment::{bit_to_spin, spin_to_bit, Assignment, Form};
pub use error::{ForgeError, Result};
pub use graph::{check_compatible, chimera_graph, is_compatible, CellPosition, HardwareGraph};
pub use model::{
    energy, ising_to_qubo, qubo_to_ising, IsingBuilder, IsingModel, QuadraticModel, QuboBuilder,
    QuboModel,
};
pub use solvers::{
    brute_force, simulated_annealing, tabu_search, time_to_target, SaSchedule, SolveResult,
};
