//! Exact-arithmetic toolkit for the combinatorial invariants of generic
//! character varieties: HLRV functions via modified Macdonald symmetric
//! functions and plethystic calculus, and cell decompositions of very
//! generic character varieties via walks on positive braids.
//!
//! Everything is computed over arbitrary-precision rationals and canonical
//! rational functions; there is no floating point anywhere.

pub mod braid;
pub mod charvar;
pub mod exact;
pub mod macdonald;
pub mod partitions;
pub mod symfunc;
