//! Simulator and library for two-party communication problems about Brouwer
//! fixed points and Sperner colorings.
//!
//! All vector norms in this crate are *normalized*: the finite `p`-norm of an
//! `n`-vector is `((1/n) * sum |x_i|^p)^(1/p)`, and the max norm is the usual
//! `max |x_i|`. Every epsilon bound stated for instances, protocols and
//! reductions is relative to these normalized norms, which differ from the
//! unnormalized norms most numeric libraries default to.
//!
//! Layout:
//!
//! * [`numerics`]: norms, grids and points.
//! * [`functions`]: Lipschitz functions given by anchor points, and the
//!   combinators built from them.
//! * [`protocols`]: the bit-metered channel, instances and the grid protocol.
//! * [`reductions`]: instance transformations with solution back-maps.
//! * [`sperner`]: Freudenthal triangulations, Sperner colorings and the
//!   surplus-path protocols.

// Negated float comparisons are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exact;
pub mod functions;
pub mod numerics;
pub mod protocols;
pub mod reductions;
pub mod sperner;

pub use error::{Error, Result};
pub use functions::{
    lipschitz_estimate, lipschitz_regularize, random_lipschitz, AnchorFunction, CombineKind,
    CombinedFunction, Evaluate, Map,
};
pub use numerics::{grid_points, nearest_grid, normalized_norm, GridSpec, NormKind, Point};
pub use protocols::{
    run_grid_protocol, total_regime_check, verify_solution, BrouwerInstance, GridOutcome,
    ProblemKind, Transcript,
};
pub use reductions::{EpsilonMap, ReductionKind, ReductionRecord};
pub use sperner::{Cell, SpernerInstance, Triangulation};

/// Absolute tolerance used for epsilon comparisons when the caller does not
/// supply one.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Format version stamped on every JSON document the crate writes.
pub const FORMAT_VERSION: u32 = 1;
