//! Reference implementations used only by tests.
//!
//! Each oracle is deliberately naive and shares no code with the kernel:
//!
//! * [`orbit`] enumerates the complete signed orbit of a monomial under its
//!   slot-symmetry group, all dummy relabelings and all admissible dummy
//!   variance exchanges, and returns the minimum;
//! * [`dirac`] is the explicit 4×4 Dirac representation over exact
//!   Gaussian integers;
//! * [`fd`] holds central finite-difference formulas.

pub mod dirac;
pub mod fd;
pub mod orbit;
