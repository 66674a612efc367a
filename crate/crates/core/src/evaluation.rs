//! k-fold cross-validation and confusion matrices.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::dataset::Dataset;
use crate::evolution::{accuracy, evolve, EvolutionConfig, EvolutionError, FitnessEvaluator, GenerationStats};
use crate::rng::{self, Stream};
use crate::tree::{DecisionTree, TreeError};

#[derive(Clone, Debug, PartialEq)]
pub enum EvaluationError {
    FoldCount { k: usize, n: usize },
    Evolution(EvolutionError),
    Tree(TreeError),
}

impl fmt::Display for EvaluationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvaluationError::FoldCount { k, n } => write!(f, "fold count {k} must be in [2, {n}]"),
            EvaluationError::Evolution(e) => write!(f, "{e}"),
            EvaluationError::Tree(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for EvaluationError {}

impl From<EvolutionError> for EvaluationError {
    fn from(e: EvolutionError) -> Self {
        EvaluationError::Evolution(e)
    }
}

impl From<TreeError> for EvaluationError {
    fn from(e: TreeError) -> Self {
        EvaluationError::Tree(e)
    }
}

/// Fold index of every instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoldAssignment {
    k: usize,
    assignment: Vec<usize>,
}

impl FoldAssignment {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.assignment {
            sizes[f] += 1;
        }
        sizes
    }

    /// Training and held-out row indices for `fold`, each ascending.
    pub fn split(&self, fold: usize) -> (Vec<usize>, Vec<usize>) {
        let mut train = Vec::new();
        let mut test = Vec::new();
        for (i, &f) in self.assignment.iter().enumerate() {
            if f == fold {
                test.push(i);
            } else {
                train.push(i);
            }
        }
        (train, test)
    }
}

/// Seeded shuffle of `0..n` followed by round-robin assignment to `k` folds.
pub fn kfold_assign(n: usize, k: usize, seed: u64) -> Result<FoldAssignment, EvaluationError> {
    if k < 2 || k > n {
        return Err(EvaluationError::FoldCount { k, n });
    }
    let mut order: Vec<usize> = (0..n).collect();
    rng::shuffle(&mut Stream::new(seed), &mut order);
    let mut assignment = vec![0; n];
    for (pos, &i) in order.iter().enumerate() {
        assignment[i] = pos % k;
    }
    Ok(FoldAssignment { k, assignment })
}

pub fn kfold_split(data: &Dataset, k: usize, seed: u64) -> Result<FoldAssignment, EvaluationError> {
    kfold_assign(data.len(), k, seed)
}

/// Result of training on all folds but one.
#[derive(Clone, Debug, PartialEq)]
pub struct FoldOutcome {
    pub fold: usize,
    pub best: DecisionTree,
    pub test_accuracy: f64,
    pub history: Vec<GenerationStats>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CvReport {
    pub per_fold_accuracy: Vec<f64>,
    pub per_fold_size: Vec<usize>,
    pub mean_accuracy: f64,
    pub mean_best_size: f64,
    pub per_fold_history: Vec<Vec<GenerationStats>>,
}

impl CvReport {
    /// Assembles a report; `folds` must be in fold order.
    pub fn from_folds(folds: Vec<FoldOutcome>) -> Self {
        let k = folds.len() as f64;
        let per_fold_accuracy: Vec<f64> = folds.iter().map(|f| f.test_accuracy).collect();
        let per_fold_size: Vec<usize> = folds.iter().map(|f| f.best.size()).collect();
        CvReport {
            mean_accuracy: per_fold_accuracy.iter().sum::<f64>() / k,
            mean_best_size: per_fold_size.iter().sum::<usize>() as f64 / k,
            per_fold_accuracy,
            per_fold_size,
            per_fold_history: folds.into_iter().map(|f| f.history).collect(),
        }
    }
}

/// Seed used for the evolution run of `fold`.
pub fn fold_seed(seed: u64, fold: usize) -> u64 {
    seed ^ fold as u64
}

/// Trains on every fold but `fold` and scores on `fold`. The held-out
/// accuracy is tracked per generation for reporting only.
pub fn run_fold<E: FitnessEvaluator + ?Sized>(
    config: &EvolutionConfig,
    data: &Dataset,
    folds: &FoldAssignment,
    fold: usize,
    seed: u64,
    evaluator: &E,
) -> Result<FoldOutcome, EvaluationError> {
    let (train_idx, test_idx) = folds.split(fold);
    let train = data.select(&train_idx);
    let test = data.select(&test_idx);
    let cfg = EvolutionConfig { seed: fold_seed(seed, fold), ..config.clone() };
    let run = evolve(&cfg, &train, Some(&test), evaluator, |_| {})?;
    let test_accuracy = accuracy(&run.best, &test)?;
    Ok(FoldOutcome { fold, best: run.best, test_accuracy, history: run.history })
}

/// k-fold cross-validation; `seed` drives the split and, XOR-ed with the
/// fold index, each fold's evolution run.
pub fn cross_validate<E: FitnessEvaluator + ?Sized>(
    config: &EvolutionConfig,
    data: &Dataset,
    k: usize,
    seed: u64,
    evaluator: &E,
) -> Result<CvReport, EvaluationError> {
    config.validate()?;
    let folds = kfold_split(data, k, seed)?;
    let outcomes = (0..k).map(|i| run_fold(config, data, &folds, i, seed, evaluator)).collect::<Result<Vec<_>, _>>()?;
    Ok(CvReport::from_folds(outcomes))
}

/// Counts indexed `[actual][predicted]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfusionMatrix {
    counts: Vec<Vec<usize>>,
}

impl ConfusionMatrix {
    pub fn counts(&self) -> &[Vec<usize>] {
        &self.counts
    }

    pub fn get(&self, actual: usize, predicted: usize) -> usize {
        self.counts[actual][predicted]
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> usize {
        (0..self.counts.len()).map(|i| self.counts[i][i]).sum()
    }

    pub fn accuracy(&self) -> f64 {
        self.trace() as f64 / self.total() as f64
    }

    /// Plain-text table with class names on both axes.
    pub fn render(&self, labels: &[String]) -> String {
        let width = labels.iter().map(|l| l.len()).max().unwrap_or(1).max(6);
        let mut out = format!("{:>width$}", "actual");
        for l in labels {
            out.push_str(&format!(" {l:>width$}"));
        }
        out.push('\n');
        for (l, row) in labels.iter().zip(&self.counts) {
            out.push_str(&format!("{l:>width$}"));
            for c in row {
                out.push_str(&format!(" {c:>width$}"));
            }
            out.push('\n');
        }
        out
    }
}

pub fn confusion_matrix(tree: &DecisionTree, data: &Dataset) -> Result<ConfusionMatrix, TreeError> {
    tree.ensure_schema(data.schema())?;
    if data.is_empty() {
        return Err(TreeError::EmptyDataset);
    }
    let k = data.schema().num_classes();
    let mut counts = vec![vec![0; k]; k];
    for (i, row) in data.rows().iter().enumerate() {
        let actual = data.label(i).ok_or(TreeError::Unlabeled)?;
        counts[actual][tree.classify(row)?] += 1;
    }
    Ok(ConfusionMatrix { counts })
}
