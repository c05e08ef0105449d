//! Optimal fidelity of deterministic port-based teleportation.
//!
//! The optimal fidelity for `N` ports of local dimension `d` is the spectral
//! radius of an integer matrix over Young diagrams (the teleportation matrix)
//! divided by `d²`. This crate builds that matrix and its relatives from
//! exact symmetric-group combinatorics, computes its spectral radius, derives
//! the optimal measurement and resource-state coefficients, and checks every
//! formula against dense operators at small `(N, d)`.
//!
//! Module map:
//!
//! * [`diagrams`]: Young diagrams, branching, irrep dimensions and
//!   Schur–Weyl multiplicities.
//! * [`characters`]: conjugacy classes and Murnaghan–Nakayama characters.
//! * [`telemat`]: teleportation, incidence and Gram matrices.
//! * [`spectral`]: power iteration, closed forms, Jacobi eigensolver.
//! * [`protocol`]: fidelities, optimal coefficients, sweeps.
//! * [`oracle`]: brute-force dense-operator verification.

pub mod characters;
pub mod checks;
pub mod diagrams;
pub mod error;
pub mod numeric;
pub mod oracle;
pub mod protocol;
pub mod spectral;
pub mod telemat;

pub use error::{Error, Result};

/// Version string embedded in emitted reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
