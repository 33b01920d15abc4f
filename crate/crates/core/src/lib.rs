//! Numerical toolkit for the C_λ-extended oscillator algebra.
//!
//! * [`algebra`]: parameters, κ↔α transforms, structure function, classification.
//! * [`fock`]: truncated Fock-space matrices for `a, a†, N, T, P_μ`.
//! * [`verify`]: residuals of every defining relation on the truncation interior.
//! * [`spectrum`]: bosonic and shifted Hamiltonians, degeneracy clustering.
//! * [`pssqm`]: parasupercharges, the sector-shift solver and the
//!   (para)supersymmetry checks.

pub mod algebra;
pub mod error;
pub mod fmt;
pub mod fock;
pub mod pssqm;
pub mod sampling;
pub mod scalar;
pub mod spectrum;
pub mod verify;

pub use algebra::{AlgebraSpec, RepClass, RepKind};
pub use error::{Error, Result};
pub use fock::{FockRep, FockRepDd, TruncatedFockRep};
pub use scalar::{DoubleF64, Real};
