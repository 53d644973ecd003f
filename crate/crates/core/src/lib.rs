//! Minimerror perceptron training and Monoplane constructive networks,
//! with the tooling to check linear separability claims on the sonar
//! (rocks vs mines) benchmark.
//!
//! - [`data`]: CSV ingestion, Train/Test split, standardization.
//! - [`perceptron`]: stabilities, the annealed cost, Minimerror and the
//!   Rosenblatt rule.
//! - [`monoplane`]: hidden-layer growth and the network forward pass.
//! - [`eval`]: misclassified-pattern reports, cosines, separability probe
//!   and verification of the published separators.
//! - [`report`]: text, CSV and JSON renderings.

pub mod data;
pub mod error;
pub mod eval;
pub mod monoplane;
pub mod perceptron;
pub mod report;

pub use error::{Error, Result, StallReason};
