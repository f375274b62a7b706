//! Solver toolkit for convex vector optimization problems (CVOPs) with
//! polyhedral ordering cones.
//!
//! The crate is organized around a small incremental double-description
//! kernel for low-dimensional polyhedra ([`poly`]), ordering-cone and norm
//! machinery ([`cones`]), the two scalarization oracles ([`scalar`]), the
//! primal and dual outer-approximation algorithms ([`solve`]), the geometric
//! duality transforms between upper sets in `R^q` and lower cones in
//! `R^{q+1}` ([`duality`]), performance indicators ([`metrics`]) and a batch
//! experiment harness ([`harness`]).

pub mod cones;
pub mod duality;
pub mod harness;
pub mod metrics;
pub mod poly;
pub mod scalar;
pub mod solve;
pub mod testing;
pub mod tol;

pub use cones::{NormSpec, OrderingCone};
pub use poly::{DoubleDescription, FaceDescriptor, HRep, Halfspace, VRep};
pub use scalar::ProblemInstance;
pub use solve::{RunArtifacts, StoppingRule};
