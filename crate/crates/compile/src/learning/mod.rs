//! Compilers for learning problems.

pub mod imagematch;
pub mod points;
pub mod qboost;
pub mod qcut;
pub mod qims;
pub mod structured;

pub use imagematch::{
    conflict_edges, decode_matches, distance_ratio_conflict, imagematch_compile, CandidatePair,
};
pub use points::{Metric, PointSet};
pub use qboost::{qboost_classify, qboost_compile, Stump, WeakClassifierMatrix};
pub use qcut::{cut_value, default_penalty, qcut_compile, qcut_compile_onehot, qcut_decode};
pub use qims::{qims_batch, qims_compile, qims_compile_subset, BatchOutcome, QimsParams};
pub use structured::{
    structured_energy, structured_train, Example, StructuredModel, TrainOptions, TrainReport,
};
