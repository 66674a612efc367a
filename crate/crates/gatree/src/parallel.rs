use rayon::prelude::*;

use gatree_core::evolution::{accuracy, FitnessEvaluator};
use gatree_core::{Dataset, DecisionTree, TreeError};

/// Scores trees on the rayon pool. Results come back in input order, so runs
/// are identical to [`gatree_core::SequentialEvaluator`].
#[derive(Clone, Copy, Debug, Default)]
pub struct RayonEvaluator;

impl FitnessEvaluator for RayonEvaluator {
    fn accuracies(&self, trees: &[DecisionTree], data: &Dataset) -> Result<Vec<f64>, TreeError> {
        trees.par_iter().map(|t| accuracy(t, data)).collect()
    }
}
