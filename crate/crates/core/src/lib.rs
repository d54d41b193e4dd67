//! Symbolic tensor algebra kernel.
//!
//! The crate covers three styles of tensor computation:
//!
//! * index-free algebra over commuting, anticommuting and noncommuting
//!   objects ([`rewrite::prodsort`]),
//! * abstract-index manipulation: substitution, metric and Kronecker-delta
//!   elimination, canonicalisation under tableau symmetries, Young
//!   projection and gamma-matrix (Clifford) algebra,
//! * component calculus on coordinate charts ([`geometry`]) built on a small
//!   exact scalar engine ([`scalar`]).
//!
//! Input uses a TeX-like notation (`R_{a b c d}`, `\partial_{c}{g_{a b}}`)
//! parsed by [`notation`]; a [`session::Session`] ties declarations,
//! expression registers and algorithms together without doing any IO.
//!
//! The crate is `no_std` (it needs `alloc`); the `std` feature only lifts
//! that restriction.

#![cfg_attr(not(any(test, feature = "std")), no_std)]

extern crate alloc;

pub mod clifford;
pub mod expr;
pub mod geometry;
pub mod index;
pub mod notation;
pub mod properties;
pub mod rational;
pub mod rewrite;
pub mod scalar;
pub mod session;
pub mod symmetry;

pub use expr::{Expr, Factor, Rule, Tensor, Term, Wrapper};
pub use index::{Index, Variance};
pub use rational::Rational;
