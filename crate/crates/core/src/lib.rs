//! Matched pairs of Lie groups and Lie algebras, their first and second
//! order tangent groups, and the reduced dynamics those structures generate.
//!
//! The crate is organized as a small tower:
//!
//! * [`kernel`] - fixed-step RK4, finite-difference stencils, trajectories
//! * [`cmat`] - 2x2 complex matrices (the ambient SL(2,C) arena)
//! * [`algebra`] - structure constants, coadjoint actions, matched pairs
//! * [`groups`] - matrix groups, tangent towers TG / T^2G / TTG, cocycles,
//!   group-level matched pairs via factorization
//! * [`instances`] - the shipped examples: `su2k`, `heisenberg`, `abelian:<n>`
//! * [`dynamics`] - reduced Lagrangians, equation-of-motion fields,
//!   integrators, reconstruction, residual evaluators
//! * [`verify`] - named, seeded, reportable property suites
//!
//! Sample evaluation inside the suites is data-parallel when the `parallel`
//! feature (default) is enabled; reports are identical either way.

// `!(x > 0.0)` is the NaN-rejecting validation idiom used throughout;
// index-juggling loops mirror the tensor contraction formulas directly.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod algebra;
pub mod batch;
pub mod cmat;
pub mod dynamics;
pub mod groups;
pub mod instances;
pub mod kernel;
pub mod verify;
