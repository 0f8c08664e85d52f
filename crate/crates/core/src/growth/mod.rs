//! Forward DP-steps and the growth protocols built on them.

mod protocol;
mod step;

use thiserror::Error;

use crate::graph::GraphError;
use crate::matching::{Infeasibility, MatchingError};

pub use protocol::{
    grow, grow_with, next_degree_linear, next_degree_scale_free, GrowthRun, Grower,
    PowerLawSampler, Protocol, ProtocolConfig,
};
pub(crate) use protocol::exact_decimal;
pub use step::{apply_step, covered_in_order, dp_step_even, dp_step_odd, DpStepRecord, OpKind};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GrowthError {
    #[error("no matching with {k} lifts ({reason:?}; found {available})")]
    NoMatching {
        k: usize,
        available: usize,
        reason: Infeasibility,
    },
    #[error("stub state does not fit the request: {0}")]
    StubMismatch(String),
    #[error("r = {r} outside [0, {max}]")]
    BadR { r: usize, max: usize },
    #[error("seed graph has no edges")]
    SeedTooSmall,
    #[error("invalid lift: {0}")]
    InvalidLift(String),
    #[error("invalid protocol: {0}")]
    BadProtocol(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Matching(#[from] MatchingError),
}
