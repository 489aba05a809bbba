//! Linearly parameterized bandits.
//!
//! Arms are vectors `u` in a compact set, the reward of `u` is `u'Z + W` for a
//! hidden parameter `Z` and zero-mean noise `W`. The crate provides the arm
//! geometries, reward environments, least-squares and Gaussian-posterior
//! estimation, the phased greedy (PEGE) and uncertainty-ellipsoid (UE)
//! policies with baselines, and a Monte Carlo harness that estimates regret
//! and Bayes risk and checks the invariants behind the regret bounds.

pub mod environment;
pub mod error;
pub mod estimation;
pub mod geometry;
pub mod harness;
pub mod linalg;
pub mod policies;
pub mod stats;

pub use error::{Error, Result};
pub use geometry::ArmSet;
pub use linalg::{Matrix, Vector};
pub use policies::{Policy, PolicySpec};
