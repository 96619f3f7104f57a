//! Bounds for bipartite entanglement witnesses under measurement inaccuracy.
//!
//! An experimenter intends to measure projective targets but the lab devices
//! only reach them up to an average-fidelity budget ε per setting. This crate
//! computes how the separable and entangled bounds of linear witnesses move
//! under that budget:
//!
//! - [`analytic`]: closed-form corrected bounds for the standard two-qubit
//!   witnesses, the CHSH quantity and a d-dimensional Bloch-operator family;
//! - [`seesaw`]: alternating convex search producing certified lower bounds
//!   on the corrected bounds;
//! - [`moment`]: sampled tracial moment-matrix relaxations producing
//!   certified upper bounds;
//! - [`sdp`]: the dense interior-point solver backing both;
//! - [`witness`]: scenario description, Born-rule evaluation and the builtin
//!   witness catalog;
//! - [`linalg`], [`bases`], [`fidelity`]: the numerical substrate.

pub mod analytic;
pub mod bases;
pub mod error;
pub mod fidelity;
pub mod linalg;
pub mod moment;
pub mod sdp;
pub mod seesaw;
pub mod witness;

pub use error::{Error, Result};
