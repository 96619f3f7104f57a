//! Dense semidefinite programming: a homogeneous self-dual interior-point
//! solver over PSD blocks, free scalars and affine constraints, plus an
//! LMI-form wrapper for problems with few scalar variables and one matrix
//! inequality (the moment relaxations).

mod lmi;
mod problem;
mod solver;
pub(crate) mod sym;

pub use lmi::{LmiBlock, LmiProblem, LmiSolution};
pub use problem::{
    BlockKind, BlockSpec, Constraint, LinearExpr, SdpProblem, SdpSolution, SdpStatus, Sense,
    DEFAULT_MAX_ITERS, DEFAULT_TOL,
};
