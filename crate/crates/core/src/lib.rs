//! Deterministic numerical toolkit for the ground-state energetics of bosonic
//! Coulomb atoms and self-gravitating Newton systems.
//!
//! The crate computes, in fixed dimensionless units:
//!
//! * rigorous Rayleigh-Ritz upper bounds from a correlated two-body basis
//!   ([`hylleraas`]) and from one-orbital product trials ([`hartree`]),
//! * closed-form exact values where they exist ([`exact`]),
//! * chain (Hall-Post type) lower bounds obtained by telescoping exact
//!   rational factors down to a two- or three-body seed ([`bounds`]),
//! * and a verification harness ([`report`]) that checks every numerically
//!   assertable identity (pair decomposition, complete-graph bond identity,
//!   dilation scaling laws, telescoping products, bound orderings) and emits
//!   reproducible CSV/JSON tables.
//!
//! All solvers are deterministic for a given configuration; randomized
//! identity checks draw from a seeded ChaCha stream recorded in the report.
//!
//! With the default `parallel` feature the batch-style inner loops (matrix
//! assembly, phase-point sweeps, per-N solves) run on rayon; disabling the
//! feature yields a bit-identical sequential build.

// `!(x > 0.0)` is the NaN-rejecting validity guard throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod estimate;
pub mod exact;
mod exec;
pub mod hartree;
pub mod hylleraas;
pub mod report;
pub mod system;

pub use estimate::{BoundKind, EnergyEstimate};
pub use system::{PhasePoint, ReducedSystem, SystemKind, SystemSpec};
