//! Sequential probability models for piecewise stationary sources, with
//! redundancy measurement, a range coder and an experiment harness.
//!
//! Letters are `usize` values in `0..N`. Code lengths are in nats.

pub mod codec;
pub mod dist;
pub mod error;
pub mod exec;
pub mod harness;
pub mod lab;
pub mod models;
pub mod pws;

pub use dist::{Alphabet, Distribution};
pub use error::{Error, Result};
pub use exec::{derive_seed, Execution};
pub use models::{AnyModel, ModelKind, ModelSpec, SequentialModel};
pub use pws::{Partition, PwsSpec};
