//! Explicit finite-difference solver for the graphical leading-edge flow
//!
//! ```text
//! h_t = h_uu / (1 + h_u^2) + h_u / ((1 + h_u^2) L[h]),   h_u(0) = 0,  h(rho0) = 0,
//! ```
//!
//! where `L[h]` is the arclength of the graph, together with runtime
//! monitors derived from its maximum principles and a nested-grid
//! convergence harness.

pub mod cli;
pub mod convergence;
pub mod diagnostics;
pub mod error;
pub mod mesh;
pub mod profiles;
pub mod solver;

pub use error::{Error, Result};
pub use mesh::{GridSpec, MeshProfile};
pub use profiles::{ProfileKind, ProfileSpec};
pub use solver::{run, step, validate_stability, SolverState, StabilityPolicy, StabilityReport};
