//! Compilers from application problems to QUBO cost functions, with the
//! matching decoders and validators.
//!
//! [`learning`] covers boosting, clustering, box covering, feature matching
//! and structured labelling. [`mission`] covers STRIPS planning, fault-tree
//! minimum cuts, single-vehicle tours and 3-SAT.

pub mod error;
pub mod learning;
pub mod mission;
pub mod reduce;

pub use error::{CompileError, Result};
pub use reduce::{exact_solver, FixedVariables};
