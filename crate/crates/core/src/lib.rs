//! Finite-dimensional Itô ⋆-algebras, quantum stochastic germs over finite
//! ⋆-semigroups, and their pseudo-Hilbert dilations.
//!
//! The crate is `no_std` and needs only `alloc`. File formats, reports and
//! the command-line front-end live in the `germlab` crate.
#![no_std]

extern crate alloc;

mod prelude;

pub mod check;
pub mod corpus;
pub mod dilation;
pub mod germ;
pub mod ito_algebra;
pub mod noise_sim;
pub mod numkit;

pub use check::Check;
pub use numkit::{CMatrix, NumError, Tolerance, C64};
