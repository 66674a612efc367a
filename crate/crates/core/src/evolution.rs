//! The generational GA over decision trees.
//!
//! Each generation the whole population is ranked by fitness, the worst
//! `ceil(replacement_fraction * N)` individuals (never touching the top
//! `elitism`) are replaced by offspring, and everything else carries over.
//! Offspring come from roulette selection, subtree crossover and per-node
//! mutation, drawn from one seeded stream in that fixed order. Fitness
//! evaluation is delegated to a [`FitnessEvaluator`] so it may run in
//! parallel without affecting the stream.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand_core::RngCore;

use crate::dataset::{Dataset, Schema};
use crate::rng::{self, Stream};
use crate::tree::{random_label, random_test, random_tree, DecisionTree, Node, TreeError, ValuePool};

#[derive(Clone, Debug, PartialEq)]
pub struct EvolutionConfig {
    pub population_size: usize,
    pub generations: usize,
    pub crossover_prob: f64,
    /// Per-node probability of redrawing a test or label.
    pub mutation_prob: f64,
    pub replacement_fraction: f64,
    /// `x` in `acc^2 * x / (size^2 + x)`.
    pub size_bias_x: f64,
    pub elitism: usize,
    pub seed: u64,
    /// Offspring larger than this are rejected. `None` means
    /// `10 * attributes * classes` of the training schema.
    pub max_size: Option<usize>,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig {
            population_size: 100,
            generations: 100,
            crossover_prob: 0.99,
            mutation_prob: 0.01,
            replacement_fraction: 0.25,
            size_bias_x: 1000.0,
            elitism: 1,
            seed: 0,
            max_size: None,
        }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<(), EvolutionError> {
        let bad = |m: String| Err(EvolutionError::InvalidConfig(m));
        if self.population_size < 2 {
            return bad(format!("population size must be at least 2, got {}", self.population_size));
        }
        for (name, p) in [("crossover", self.crossover_prob), ("mutation", self.mutation_prob)] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} probability must be in [0, 1], got {p}"));
            }
        }
        if !(self.replacement_fraction > 0.0 && self.replacement_fraction <= 1.0) {
            return bad(format!("replacement fraction must be in (0, 1], got {}", self.replacement_fraction));
        }
        if !(self.size_bias_x > 0.0 && self.size_bias_x.is_finite()) {
            return bad(format!("size bias must be positive and finite, got {}", self.size_bias_x));
        }
        if self.elitism >= self.population_size {
            return bad(format!(
                "elitism ({}) must be smaller than the population ({})",
                self.elitism, self.population_size
            ));
        }
        if self.max_size == Some(0) {
            return bad("maximum tree size must be positive".into());
        }
        Ok(())
    }

    /// Number of individuals replaced per generation.
    pub fn replacement_count(&self) -> usize {
        let exact = self.replacement_fraction * self.population_size as f64;
        let mut k = exact as usize;
        if (k as f64) < exact {
            k += 1;
        }
        k.clamp(1, self.population_size - self.elitism)
    }

    pub fn size_cap(&self, schema: &Schema) -> usize {
        self.max_size.unwrap_or(10 * schema.len() * schema.num_classes())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum EvolutionError {
    InvalidConfig(String),
    EmptyTrainingSet,
    /// Missing values outside the class column are not supported here.
    MissingValues,
    Unlabeled,
    Tree(TreeError),
}

impl fmt::Display for EvolutionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvolutionError::InvalidConfig(m) => write!(f, "invalid configuration: {m}"),
            EvolutionError::EmptyTrainingSet => write!(f, "training set is empty"),
            EvolutionError::MissingValues => {
                write!(f, "dataset contains missing values, which evolution does not support")
            }
            EvolutionError::Unlabeled => write!(f, "dataset has rows without a class value"),
            EvolutionError::Tree(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for EvolutionError {}

impl From<TreeError> for EvolutionError {
    fn from(e: TreeError) -> Self {
        EvolutionError::Tree(e)
    }
}

/// Statistics for one generation, taken after evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct GenerationStats {
    pub generation: usize,
    pub best_fitness: f64,
    pub avg_fitness: f64,
    pub best_size: usize,
    pub best_train_accuracy: f64,
    /// Accuracy of the generation's best tree on the held-out set; reporting only.
    pub test_accuracy: Option<f64>,
}

/// Share of rows the tree labels correctly.
pub fn accuracy(tree: &DecisionTree, data: &Dataset) -> Result<f64, TreeError> {
    tree.ensure_schema(data.schema())?;
    if data.is_empty() {
        return Err(TreeError::EmptyDataset);
    }
    let mut hits = 0usize;
    for (i, row) in data.rows().iter().enumerate() {
        let label = data.label(i).ok_or(TreeError::Unlabeled)?;
        if tree.classify(row)? == label {
            hits += 1;
        }
    }
    Ok(hits as f64 / data.len() as f64)
}

/// `accuracy^2 * x / (size^2 + x)`.
pub fn fitness_from(accuracy: f64, size: usize, size_bias_x: f64) -> f64 {
    let s = size as f64;
    accuracy * accuracy * size_bias_x / (s * s + size_bias_x)
}

pub fn fitness(tree: &DecisionTree, data: &Dataset, size_bias_x: f64) -> Result<f64, TreeError> {
    Ok(fitness_from(accuracy(tree, data)?, tree.size(), size_bias_x))
}

/// Computes training accuracies for a batch of trees.
///
/// Implementations must return exactly what [`accuracy`] returns for each
/// tree, in input order.
pub trait FitnessEvaluator {
    fn accuracies(&self, trees: &[DecisionTree], data: &Dataset) -> Result<Vec<f64>, TreeError>;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SequentialEvaluator;

impl FitnessEvaluator for SequentialEvaluator {
    fn accuracies(&self, trees: &[DecisionTree], data: &Dataset) -> Result<Vec<f64>, TreeError> {
        trees.iter().map(|t| accuracy(t, data)).collect()
    }
}

/// Roulette-wheel draw; uniform when every fitness is zero.
pub fn select_parent<R: RngCore + ?Sized>(fitnesses: &[f64], rng: &mut R) -> usize {
    debug_assert!(!fitnesses.is_empty());
    let total: f64 = fitnesses.iter().sum();
    if total <= 0.0 {
        return rng::index(rng, fitnesses.len());
    }
    let target = rng::unit(rng) * total;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, &f) in fitnesses.iter().enumerate() {
        if f > 0.0 {
            acc += f;
            last_positive = i;
            if target < acc {
                return i;
            }
        }
    }
    // rounding left the target past the final partial sum
    last_positive
}

/// Subtree crossover.
///
/// With probability `prob` a uniformly chosen node of each parent is picked
/// and the rooted subtrees are exchanged. If either child would exceed
/// `max_size`, the points are redrawn once; failing that, and whenever no
/// crossover happens, the parents are returned unchanged.
pub fn crossover<R: RngCore + ?Sized>(
    a: &DecisionTree,
    b: &DecisionTree,
    prob: f64,
    max_size: Option<usize>,
    rng: &mut R,
) -> (DecisionTree, DecisionTree) {
    if !rng::chance(rng, prob) {
        return (a.clone(), b.clone());
    }
    let (size_a, size_b) = (a.size(), b.size());
    let cap = max_size.unwrap_or(usize::MAX);
    for _ in 0..2 {
        let i = rng::index(rng, size_a);
        let j = rng::index(rng, size_b);
        let sub_a = a.root().get(i).expect("index below size").size();
        let sub_b = b.root().get(j).expect("index below size").size();
        if size_a - sub_a + sub_b > cap || size_b - sub_b + sub_a > cap {
            continue;
        }
        let (mut ca, mut cb) = (a.clone(), b.clone());
        core::mem::swap(
            ca.root_mut().get_mut(i).expect("index below size"),
            cb.root_mut().get_mut(j).expect("index below size"),
        );
        return (ca, cb);
    }
    (a.clone(), b.clone())
}

/// Per-node payload mutation; the shape of the tree never changes.
///
/// Each node, in pre-order, is hit with probability `prob`. A hit internal
/// node gets a freshly drawn test, a hit leaf a uniformly drawn label.
pub fn mutate<R: RngCore + ?Sized>(
    tree: &DecisionTree,
    schema: &Schema,
    pool: &ValuePool,
    prob: f64,
    rng: &mut R,
) -> Result<DecisionTree, TreeError> {
    fn walk<R: RngCore + ?Sized>(
        node: &mut Node,
        schema: &Schema,
        pool: &ValuePool,
        prob: f64,
        rng: &mut R,
    ) -> Result<(), TreeError> {
        let hit = rng::chance(rng, prob);
        match node {
            Node::Leaf(label) => {
                if hit {
                    *label = random_label(schema, rng);
                }
                Ok(())
            }
            Node::Internal { test, yes, no } => {
                if hit {
                    *test = random_test(schema, pool, rng)?;
                }
                walk(yes, schema, pool, prob, rng)?;
                walk(no, schema, pool, prob, rng)
            }
        }
    }
    tree.ensure_schema(schema)?;
    let mut out = tree.clone();
    walk(out.root_mut(), schema, pool, prob, rng)?;
    Ok(out)
}

/// Outcome of a run.
#[derive(Clone, Debug, PartialEq)]
pub struct Evolved {
    /// Highest-fitness tree seen in any generation (earliest on ties).
    pub best: DecisionTree,
    pub best_fitness: f64,
    /// One entry per generation, `generations + 1` in total.
    pub history: Vec<GenerationStats>,
}

struct Individual {
    tree: DecisionTree,
    accuracy: f64,
    fitness: f64,
}

fn check_data(data: &Dataset, schema: &Schema) -> Result<(), EvolutionError> {
    if data.schema().fingerprint() != schema.fingerprint() {
        return Err(
            TreeError::SchemaMismatch { expected: schema.fingerprint(), found: data.schema().fingerprint() }.into()
        );
    }
    if !data.is_labeled() {
        return Err(EvolutionError::Unlabeled);
    }
    if data.has_missing_predictors() {
        return Err(EvolutionError::MissingValues);
    }
    Ok(())
}

fn evaluate<E: FitnessEvaluator + ?Sized>(
    trees: Vec<DecisionTree>,
    data: &Dataset,
    x: f64,
    evaluator: &E,
) -> Result<Vec<Individual>, EvolutionError> {
    let acc = evaluator.accuracies(&trees, data)?;
    Ok(trees
        .into_iter()
        .zip(acc)
        .map(|(tree, accuracy)| {
            let fitness = fitness_from(accuracy, tree.size(), x);
            Individual { tree, accuracy, fitness }
        })
        .collect())
}

/// Runs the GA on `train`. When `test` is given, the accuracy of each
/// generation's best tree on it is recorded in the history; it never
/// influences selection. `sink` sees every generation as it completes.
pub fn evolve<E, S>(
    config: &EvolutionConfig,
    train: &Dataset,
    test: Option<&Dataset>,
    evaluator: &E,
    mut sink: S,
) -> Result<Evolved, EvolutionError>
where
    E: FitnessEvaluator + ?Sized,
    S: FnMut(&GenerationStats),
{
    config.validate()?;
    if train.is_empty() {
        return Err(EvolutionError::EmptyTrainingSet);
    }
    let schema = train.schema();
    check_data(train, schema)?;
    if let Some(t) = test {
        check_data(t, schema)?;
        if t.is_empty() {
            return Err(TreeError::EmptyDataset.into());
        }
    }

    let mut rng = Stream::new(config.seed);
    let pool = ValuePool::from_dataset(train);
    let cap = config.size_cap(schema);
    let n = config.population_size;
    let x = config.size_bias_x;

    let initial = (0..n).map(|_| random_tree(schema, &pool, &mut rng)).collect::<Result<Vec<_>, _>>()?;
    let mut population = evaluate(initial, train, x, evaluator)?;
    let mut history = Vec::with_capacity(config.generations + 1);
    let mut best: Option<(DecisionTree, f64)> = None;
    let replace = config.replacement_count();

    for generation in 0..=config.generations {
        // stable: equal fitness keeps the older position
        population.sort_by(|a, b| b.fitness.total_cmp(&a.fitness));
        let top = &population[0];
        let shortfall: f64 = population.iter().map(|i| top.fitness - i.fitness).sum();
        let stats = GenerationStats {
            generation,
            best_fitness: top.fitness,
            avg_fitness: top.fitness - shortfall / n as f64,
            best_size: top.tree.size(),
            best_train_accuracy: top.accuracy,
            test_accuracy: match test {
                Some(t) => Some(accuracy(&top.tree, t)?),
                None => None,
            },
        };
        sink(&stats);
        history.push(stats);
        if best.as_ref().is_none_or(|(_, f)| top.fitness > *f) {
            best = Some((top.tree.clone(), top.fitness));
        }
        if generation == config.generations {
            break;
        }

        let fitnesses: Vec<f64> = population.iter().map(|i| i.fitness).collect();
        let mut offspring = Vec::with_capacity(replace + 1);
        while offspring.len() < replace {
            let pa = select_parent(&fitnesses, &mut rng);
            let pb = select_parent(&fitnesses, &mut rng);
            let (ca, cb) =
                crossover(&population[pa].tree, &population[pb].tree, config.crossover_prob, Some(cap), &mut rng);
            let ca = mutate(&ca, schema, &pool, config.mutation_prob, &mut rng)?;
            let cb = mutate(&cb, schema, &pool, config.mutation_prob, &mut rng)?;
            offspring.push(ca);
            if offspring.len() < replace {
                offspring.push(cb);
            }
        }
        population.truncate(n - replace);
        population.extend(evaluate(offspring, train, x, evaluator)?);
    }

    let (best, best_fitness) = best.expect("at least one generation recorded");
    Ok(Evolved { best, best_fitness, history })
}
