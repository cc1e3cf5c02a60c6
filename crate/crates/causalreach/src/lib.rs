//! Numerical toolkit for sub-Lorentzian space-times.
//!
//! A sub-space-time is a manifold together with a bracket-generating
//! distribution spanned by frame fields, an index-1 metric on the
//! distribution, and a horizontal timelike vector field fixing the time
//! orientation. This crate represents such structures numerically and
//! computes the objects their causal theory is built from:
//!
//! * causal classification of horizontal vectors and curves,
//! * grid under-approximations of chronological/causal futures and pasts,
//! * lower bounds for the time separation function via trajectory shooting,
//! * quotients by cyclic isometry groups and closed-causal-curve search,
//! * finite, resolution-stamped comparisons of the manifold, Alexandrov,
//!   open-Alexandrov and time-separation topologies.
//!
//! All sampling is deterministic given a seed: trajectory controls are
//! drawn from per-index counter-based streams, so results do not depend on
//! the number of worker threads.

pub mod curves;
pub mod error;
pub mod geometry;
pub mod quotient;
pub mod reach;
pub mod registry;
pub mod rng;
pub mod separation;
pub mod topology;

pub use error::{Error, Result};
pub use geometry::{AxisBox, CausalCharacter, Character, Orientation, SubSpaceTime};
pub use reach::{Direction, ReachConfig, ReachGrid, Strictness};
