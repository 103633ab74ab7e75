//! Variational ground-state solver for interacting fermionic lattice
//! Hamiltonians.
//!
//! The variational family is a global Bogoliubov rotation applied to a
//! product of local quartic factors `cos β + sin β a†a†a†a†` over disjoint
//! four-mode quartets. Energies and gradients are evaluated from the rotated
//! covariance matrix plus sparse per-quartet four-body corrections, without
//! ever materializing the full four-index correlation tensor. Small-system
//! exact diagonalization and an analytic single-mode solution serve as
//! oracles.
//!
//! The numeric core is generic over the real scalar type (`f32`/`f64`);
//! concrete `f64` aliases are exported at the crate root. The exact
//! diagonalization backend is `f64` only.

pub mod algebra;
pub mod config;
pub mod ed;
pub mod engine;
pub mod error;
pub mod layout;
pub mod m1;
pub mod models;
pub mod orthogonal;
pub mod observables;
pub mod optimizer;
pub mod pairing;
pub mod reference;
pub mod runner;
pub mod scalar;
pub mod tensors;

pub use error::{Error, Result};
pub use layout::{MajoranaKind, ModeLayout};
pub use models::{Boundary, HubbardParams, Tiling};
pub use scalar::Scalar;

/// Default-precision aliases for the generic core types.
pub type QuadraticTensor64 = tensors::QuadraticTensor<f64>;
pub type QuarticTensor64 = tensors::QuarticTensor<f64>;
pub type OrthogonalMatrix64 = orthogonal::OrthogonalMatrix<f64>;
pub type MajoranaOperator64 = algebra::MajoranaOperator<f64>;
