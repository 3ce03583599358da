#![allow(clippy::neg_cmp_op_on_partial_ord)]
//! Decentralized flocking controllers learned by imitation.
//!
//! The crate simulates a planar double-integrator swarm, computes the centralized
//! expert and the one-hop local heuristic, and learns decentralized policies that
//! act on a delayed aggregation of neighbor features over a time-varying
//! communication graph. Agent features are either handcrafted from neighbor
//! velocities and positions, or produced by a small convolutional network from a
//! synthetic panoramic inverse-depth camera, trained jointly with the readout by
//! backpropagation through the aggregation window.
//!
//! Module map:
//!
//! - [`swarm`]: state, initialization, saturation, dynamics
//! - [`controllers`]: expert, local heuristic, flocking cost, handcrafted features
//! - [`graph`]: radius graph, shift operators, aggregation buffer, message passing
//! - [`nn`]: dense/conv/residual layers with explicit backward, Adam, gradient checks
//! - [`vision`]: panoramic renderer and the visual state estimator
//! - [`policy`]: readout network and the learned controller
//! - [`trainer`]: rollouts, DAgger, windowed BPTT training
//! - [`eval`]: experiment sweeps, reports, trajectory export
//!
//! Runnable walkthroughs live in `examples/`.

pub mod config;
pub mod controllers;
pub mod error;
pub mod eval;
pub mod graph;
pub mod nn;
pub mod policy;
pub mod swarm;
pub mod trainer;
pub mod vec2;
pub mod vision;

pub use error::{Error, Result};
pub use vec2::Vec2;
