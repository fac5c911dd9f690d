//! Invertibility analysis and structured inverses for symmetric double
//! saddle-point matrices
//!
//! ```text
//!     [ A   Bᵀ  0  ]
//! K = [ B  -D   Cᵀ ]      A: n×n, D: m×m, E: p×p symmetric
//!     [ 0   C   E  ]
//! ```
//!
//! The crate is `no_std` (it needs `alloc`) and works on dense
//! [`nalgebra::DMatrix`] blocks. It is organized bottom-up:
//!
//! - [`subspaces`]: tolerance-governed kernels, ranges, intersections, direct
//!   sums and definiteness classification.
//! - [`system`]: the [`BlockSystem`] data model, assembly of `K`, the similar
//!   block-reversed system, the congruence `WᵀKW` and middle-block rescaling.
//! - [`invertibility`]: the ladder of necessary and sufficient conditions,
//!   producing a [`Diagnosis`] with certificates.
//! - [`inverse`]: the reduced-Hessian projector, the two- and three-block
//!   explicit inverses, the factorized inverse and the `Z₂₂` nullity bounds.
//! - [`generate`]: seeded instance generators with prescribed ranks,
//!   nullities and subspace relations.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod dense;
pub mod error;
pub mod generate;
pub mod inverse;
pub mod invertibility;
pub mod subspaces;
pub mod system;
pub mod tol;

pub use error::{Error, Precondition, Result};
pub use generate::{gen_instance, Certificate, Family, GeneratorSpec};
pub use inverse::{InverseBlocks, ReducedHessianProjector, TwoBlockInverse};
pub use invertibility::{diagnose, oracle_invertible, Diagnosis, Rule, Verdict};
pub use subspaces::{Definiteness, SubspaceBasis};
pub use system::{assemble, AssembledMatrix, BlockSystem};
pub use tol::ToleranceConfig;

pub use nalgebra::{DMatrix, DVector};
