//! Genetic-algorithm induction of binary decision trees.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is pure and
//! deterministic given a seed: parsing and printing ARFF text, the tree
//! genome and its operators, the generational GA, k-fold evaluation and the
//! synthetic soil-texture generator. File IO, the model file format and the
//! command-line front end live in the `gatree` crate.

#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod arff;
pub mod dataset;
pub mod evaluation;
pub mod evolution;
pub mod rng;
pub mod soil;
pub mod tree;

pub use dataset::{Attribute, AttributeKind, Dataset, DatasetError, Schema, SchemaFingerprint, Value};
pub use evaluation::{ConfusionMatrix, CvReport, FoldAssignment};
pub use evolution::{EvolutionConfig, EvolutionError, FitnessEvaluator, GenerationStats, SequentialEvaluator};
pub use rng::Stream;
pub use tree::{DecisionTree, Node, NodeTest, Rule, TreeError, ValuePool};
