//! Exact and high-precision machinery for verifying an Apéry-limit
//! representation of `L(chi_-8, 2)` against a two-variable Mahler measure.

pub mod characters;
pub mod check;
pub mod mahler;
pub mod mpnum;
pub mod recurrence;
pub mod telescope;
pub mod trigamma;
