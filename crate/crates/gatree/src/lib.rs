//! File formats, parallel fitness evaluation and the `gatree` command line
//! on top of [`gatree_core`].

pub mod cli;
pub mod error;
pub mod manifest;
pub mod model;
pub mod parallel;
pub mod stats;

pub use error::{Error, Result};
pub use gatree_core as core;
pub use model::Model;
pub use parallel::RayonEvaluator;
