//! Compilers for planning, diagnosis, routing and satisfiability.

pub mod faulttree;
pub mod planning;
pub mod sat;
pub mod uav;

pub use faulttree::{
    decode_cut, faulttree_compile, gate_audit, gate_penalty, random_fault_tree, BasicEvent,
    FaultTree, FaultTreeModel, Gate, GateKind,
};
pub use planning::{
    constant_propagation, plan_compile, plan_compile_reduced, plan_decode_validate, rocket_problem,
    PlanLayout, PlanReport, PlanViolation, PlanningProblem,
};
pub use sat::{parse_dimacs, sat3_compile, sat3_random_instance, Clause3, Sat3Instance};
pub use uav::{
    decode_tour, distance_matrix, dubins_distance, tour_length, uav_tsp_compile, TargetTriple,
    UavModel,
};
