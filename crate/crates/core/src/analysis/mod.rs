//! Degree-sequence statistics and growth-law checks.

mod laws;
mod powerlaw;
pub mod zeta;

use thiserror::Error;

pub use laws::{
    check_density_law, check_linear_law, check_maxdpg_law, edge_density, final_max_degree,
    growth_samples, max_degree_scaling, minimal_linear_k, regress, GrowthLawReport, GrowthSample,
    ScalingPoint, ScalingReport,
};
pub use powerlaw::{
    check_density_bounded, check_distribution_bounded, sf_matching_constant, sf_theoretical_c,
    BoundKind, PowerLawReport, Violation,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("wrong protocol: {0}")]
    WrongProtocol(String),
    #[error("seed premise fails at i = {i} (degree {degree})")]
    HypothesisFailed { i: usize, degree: usize },
    #[error("graph has {0} vertices, need at least 2")]
    TooSmall(usize),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("trace lacks the seed summary header")]
    MissingSeed,
}
