//! Symplectic Lefschetz fibrations `f_H(x) = <H, x>` on adjoint orbits of
//! sl(n,C), as executable numerics.
//!
//! The crate enumerates singularities through the Weyl orbit `W.H0`,
//! certifies Hessian nondegeneracy, transports regular fibres along a
//! transversal vector field, checks symplectic and Lagrangian conditions for
//! `Omega = Im H_tau`, and reproduces the sl(2,C) example with its thimbles
//! and directed Fukaya-Seidel data.

pub mod error;
pub mod fibration;
pub mod liealg;
pub mod linalg;
pub mod plot;
pub mod report;
pub mod serial;
pub mod sl2;
pub mod symplectic;
pub mod transport;
pub mod verify;
pub mod weyl;

pub use error::{AbortReason, Error, Result};
pub use liealg::{AlgebraElement, CartanElement, FormConfig, Root};
