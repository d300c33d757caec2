//! Crate-internal imports shared by every module.
//!
//! `Float` supplies `sqrt`, `exp` and friends on `f64` without `std`.

pub(crate) use alloc::vec;
pub(crate) use alloc::vec::Vec;
#[allow(unused_imports)]
pub(crate) use num_traits::Float;
