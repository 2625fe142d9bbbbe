//! Hybrid minimization of black-box functions over hardware-shaped spin
//! models, plus exact and sampled Boltzmann machinery.

pub mod blackbox;
pub mod boltzmann;
pub mod crf;
pub mod error;
pub mod population;

pub use blackbox::{
    blackbox_minimize, blackbox_minimize_with, BlackboxOptions, BlackboxReport, Sampler,
};
pub use boltzmann::{
    empirical_distribution, exact_boltzmann, gibbs_sample, total_variation, BoltzmannModel,
    Distribution, EXACT_LIMIT,
};
pub use crf::{crf_loglik_gradient, crf_negative_log_likelihood, Estimator};
pub use error::{HybridError, Result};
pub use population::{filter_population, fit_hardware_model, FitOptions, HardwareFit, Population};
