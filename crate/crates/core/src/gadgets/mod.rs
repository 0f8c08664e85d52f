//! Hardness and structure constructions: clique blockers, the 3-SAT-3
//! reduction, the irreducible 4-regular family and checkers for the
//! low-degree decomposition results.

mod blockers;
mod formula;
mod lowdeg;
mod reduction;
mod regular4;

use thiserror::Error;

use crate::graph::{GraphError, VertexId};
use crate::reduce::ReduceError;

pub use blockers::{attach_blocker, attach_shared_blocker, block_all_except};
pub use formula::{unit_propagate, Formula, Simplified};
pub use lowdeg::{check_low_degree_kernel, decompose_low_degree, kernel_components, KernelComponent};
pub use reduction::{
    build_reduction, padded_instance, variable_gadget, verify_reduction, BuildOptions, GadgetInstance,
    Verification, PADDING_VERTEX_LIMIT, VERIFY_VAR_LIMIT,
};
pub use regular4::{
    check_4regular_indecomposable_structure, irreducible_4regular, random_block_4regular, Block, BlockKind,
    FourRegularStructure,
};

#[derive(Debug, Error)]
pub enum GadgetError {
    #[error("bad formula: {0}")]
    BadFormula(String),
    #[error("formula is not 3-SAT-3")]
    NotThreeSatThree,
    #[error("no clause identification keeps every literal pair a non-edge")]
    Collision,
    #[error("brute-force verification limited to {limit} variables, formula has {vars}")]
    TooLarge { vars: usize, limit: usize },
    #[error("epsilon must lie in (0, 1], got {0}")]
    BadEpsilon(f64),
    #[error("padding would need {vertices} vertices")]
    PaddingTooLarge { vertices: f64 },
    #[error("k must be at least 3, got {0}")]
    KTooSmall(usize),
    #[error("graph is not 4-regular (vertex {0} has degree {1})")]
    NotFourRegular(VertexId, usize),
    #[error("maximum degree {0} exceeds 3")]
    DegreeTooHigh(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Reduce(#[from] ReduceError),
}
