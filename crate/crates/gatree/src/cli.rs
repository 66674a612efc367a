//! The `gatree` command line.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand};
use rayon::prelude::*;

use gatree_core::arff::{parse_arff_with, write_arff, ArffErrorKind, ClassAttribute, ParseOptions};
use gatree_core::evaluation::{confusion_matrix, kfold_split, run_fold, CvReport};
use gatree_core::evolution::{accuracy, evolve, EvolutionConfig};
use gatree_core::soil::{self, GenConfig, TextureBoundaryTable};
use gatree_core::{rng, Dataset, DatasetError};

use crate::error::{Error, Result};
use crate::manifest::RunManifest;
use crate::model::Model;
use crate::parallel::RayonEvaluator;
use crate::stats;

#[derive(Parser, Debug)]
#[command(name = "gatree", version, about = "Evolve decision trees with a genetic algorithm")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evolve a tree on an ARFF dataset.
    Train(TrainArgs),
    /// Label the rows of an ARFF file with a saved model.
    Predict(PredictArgs),
    /// k-fold cross-validation of the GA.
    Crossval(CrossvalArgs),
    /// Render a model as Graphviz DOT or as rules.
    Export(ExportArgs),
    /// Reduced-error pruning of a model against a labelled ARFF file.
    Prune(PruneArgs),
    /// Write a synthetic soil-texture dataset.
    Datagen(DatagenArgs),
}

/// GA settings; names mirror `EvolutionConfig`.
#[derive(Args, Clone, Debug)]
pub struct GaArgs {
    #[arg(long, default_value_t = 100)]
    pub population: usize,
    #[arg(long, default_value_t = 100)]
    pub generations: usize,
    #[arg(long, default_value_t = 0.99)]
    pub crossover: f64,
    #[arg(long, default_value_t = 0.01)]
    pub mutation: f64,
    /// Fraction of the worst trees replaced each generation.
    #[arg(long, default_value_t = 0.25)]
    pub replace: f64,
    #[arg(long = "size-bias", default_value_t = 1000.0)]
    pub size_bias: f64,
    #[arg(long, default_value_t = 1)]
    pub elitism: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest offspring accepted (default: 10 x attributes x classes).
    #[arg(long = "max-size")]
    pub max_size: Option<usize>,
    /// Worker threads for fitness evaluation; does not change results.
    #[arg(long)]
    pub threads: Option<usize>,
}

impl GaArgs {
    pub fn config(&self) -> EvolutionConfig {
        EvolutionConfig {
            population_size: self.population,
            generations: self.generations,
            crossover_prob: self.crossover,
            mutation_prob: self.mutation,
            replacement_fraction: self.replace,
            size_bias_x: self.size_bias,
            elitism: self.elitism,
            seed: self.seed,
            max_size: self.max_size,
        }
    }
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// Held-out ARFF file; its accuracy is reported per generation.
    #[arg(long)]
    pub test: Option<PathBuf>,
    /// Class attribute name (default: last attribute).
    #[arg(long)]
    pub class: Option<String>,
    #[arg(long, default_value = "model.json")]
    pub model: PathBuf,
    #[arg(long, default_value = "stats.csv")]
    pub stats: PathBuf,
    /// Manifest path (default: <model>.manifest).
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[command(flatten)]
    pub ga: GaArgs,
}

#[derive(Args, Debug)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    /// Write labels here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also print a confusion matrix to stderr when labels are present.
    #[arg(long)]
    pub confusion: bool,
}

#[derive(Args, Debug)]
pub struct CrossvalArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub class: Option<String>,
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    /// Per-fold, per-generation statistics.
    #[arg(long, default_value = "crossval.csv")]
    pub stats: PathBuf,
    /// Per-fold summary table (also printed to stdout).
    #[arg(long)]
    pub summary: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[command(flatten)]
    pub ga: GaArgs,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("format").required(true).args(["dot", "rules"])))]
pub struct ExportArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub dot: bool,
    #[arg(long)]
    pub rules: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PruneArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Labelled pruning set.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct DatagenArgs {
    #[arg(long, default_value_t = 500)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Fraction of labels moved to another class.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long = "depth-min", default_value_t = 0.0)]
    pub depth_min: f64,
    #[arg(long = "depth-max", default_value_t = 2.0)]
    pub depth_max: f64,
    #[arg(long, default_value = "soil.arff")]
    pub out: PathBuf,
    /// Sidecar path (default: <out>.manifest).
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Train(a) => train(&a),
        Command::Predict(a) => predict(&a),
        Command::Crossval(a) => crossval(&a),
        Command::Export(a) => export(&a),
        Command::Prune(a) => prune(&a),
        Command::Datagen(a) => datagen(&a),
    };
    match result {
        Ok(()) => crate::error::exit::OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn text(path: &Path, bytes: &[u8]) -> Result<String> {
    String::from_utf8(bytes.to_vec())
        .map_err(|e| Error::io(path, std::io::Error::new(std::io::ErrorKind::InvalidData, e)))
}

fn class_option(class: &Option<String>) -> ClassAttribute {
    class.clone().map(ClassAttribute::Name).unwrap_or_default()
}

/// Reads and parses an ARFF file, returning the dataset and raw bytes.
pub fn read_arff(path: &Path, opts: &ParseOptions) -> Result<(Dataset, Vec<u8>)> {
    let bytes = read(path)?;
    let source = text(path, &bytes)?;
    let data = parse_arff_with(&source, opts).map_err(|source| Error::Arff { path: path.to_path_buf(), source })?;
    Ok((data, bytes))
}

pub fn read_model(path: &Path) -> Result<(Model, Vec<u8>)> {
    let bytes = read(path)?;
    let source = text(path, &bytes)?;
    let model =
        Model::from_json(&source).map_err(|e| Error::Model { path: path.to_path_buf(), message: e.to_string() })?;
    Ok((model, bytes))
}

/// Reads a data file that must share the model's schema. Schema problems
/// map to [`Error::SchemaMismatch`].
fn read_for_model(path: &Path, model: &Model, allow_unlabeled: bool) -> Result<(Dataset, Vec<u8>)> {
    let opts = ParseOptions { class: ClassAttribute::Index(model.schema.class_index()), allow_unlabeled };
    let (data, bytes) = match read_arff(path, &opts) {
        Err(Error::Arff { source, .. })
            if matches!(
                source.kind,
                ArffErrorKind::ClassNotNominal(_) | ArffErrorKind::Schema(DatasetError::ClassIndexOutOfRange(_))
            ) =>
        {
            return Err(Error::SchemaMismatch(format!("{}: {source}", path.display())));
        }
        other => other?,
    };
    model.tree.ensure_schema(data.schema()).map_err(|e| Error::SchemaMismatch(format!("{}: {e}", path.display())))?;
    Ok((data, bytes))
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn ga_manifest(m: &mut RunManifest, cfg: &EvolutionConfig, data: &Dataset) {
    m.set("rng", rng::ALGORITHM)
        .set("seed", cfg.seed)
        .set("population", cfg.population_size)
        .set("generations", cfg.generations)
        .set("crossover", cfg.crossover_prob)
        .set("mutation", cfg.mutation_prob)
        .set("replace", cfg.replacement_fraction)
        .set("size_bias", cfg.size_bias_x)
        .set("elitism", cfg.elitism)
        .set("max_size", cfg.size_cap(data.schema()))
        .set("class", &data.schema().class_attribute().name)
        .set("schema_fingerprint", data.schema().fingerprint());
}

fn manifest_path(explicit: &Option<PathBuf>, output: &Path) -> PathBuf {
    explicit.clone().unwrap_or_else(|| {
        let mut p = output.as_os_str().to_owned();
        p.push(".manifest");
        PathBuf::from(p)
    })
}

pub fn train(a: &TrainArgs) -> Result<()> {
    let cfg = a.ga.config();
    cfg.validate()?;
    let opts = ParseOptions { class: class_option(&a.class), allow_unlabeled: false };
    let (train, train_bytes) = read_arff(&a.data, &opts)?;
    let test = match &a.test {
        Some(p) => {
            let (t, bytes) = read_arff(p, &opts)?;
            if t.schema() != train.schema() {
                return Err(Error::SchemaMismatch(format!("{} does not share the training schema", p.display())));
            }
            Some((t, bytes))
        }
        None => None,
    };

    let run =
        with_threads(a.ga.threads, || evolve(&cfg, &train, test.as_ref().map(|t| &t.0), &RayonEvaluator, |_| {}))??;

    let model = Model::new(train.schema().clone(), run.best.clone())?;
    write(&a.model, &model.to_json())?;
    write(&a.stats, &stats::write_history(&run.history))?;

    let mut m = RunManifest::new("train");
    ga_manifest(&mut m, &cfg, &train);
    m.input("data", &a.data, &train_bytes);
    if let (Some(p), Some((_, bytes))) = (&a.test, &test) {
        m.input("test", p, bytes);
    }
    write(&manifest_path(&a.manifest, &a.model), &m.render())?;

    let train_acc = accuracy(&run.best, &train)?;
    println!(
        "best fitness {} | train accuracy {} | size {} | height {}",
        run.best_fitness,
        train_acc,
        run.best.size(),
        run.best.height()
    );
    if let Some((t, _)) = &test {
        println!("test accuracy {}", accuracy(&run.best, t)?);
    }
    Ok(())
}

pub fn predict(a: &PredictArgs) -> Result<()> {
    let (model, _) = read_model(&a.model)?;
    let (data, _) = read_for_model(&a.data, &model, true)?;
    let labels = model.tree.predict(&data)?;
    let names = model.schema.class_labels();
    let mut out = String::new();
    for l in &labels {
        out.push_str(&names[*l]);
        out.push('\n');
    }
    match &a.out {
        Some(p) => write(p, &out)?,
        None => print!("{out}"),
    }
    if data.is_labeled() && !data.is_empty() {
        eprintln!("accuracy={}", accuracy(&model.tree, &data)?);
        if a.confusion {
            eprint!("{}", confusion_matrix(&model.tree, &data)?.render(names));
        }
    }
    Ok(())
}

/// Summary table: one `fold,accuracy,best_size` row per fold and a `mean` row.
pub fn render_summary(report: &CvReport) -> String {
    let mut s = String::from("fold,accuracy,best_size\n");
    for (i, (acc, size)) in report.per_fold_accuracy.iter().zip(&report.per_fold_size).enumerate() {
        let _ = writeln!(s, "{i},{acc},{size}");
    }
    let _ = writeln!(s, "mean,{},{}", report.mean_accuracy, report.mean_best_size);
    s
}

pub fn crossval(a: &CrossvalArgs) -> Result<()> {
    let cfg = a.ga.config();
    cfg.validate()?;
    let opts = ParseOptions { class: class_option(&a.class), allow_unlabeled: false };
    let (data, bytes) = read_arff(&a.data, &opts)?;
    let folds = kfold_split(&data, a.folds, cfg.seed)?;
    let outcomes = with_threads(a.ga.threads, || {
        (0..a.folds)
            .into_par_iter()
            .map(|i| run_fold(&cfg, &data, &folds, i, cfg.seed, &RayonEvaluator))
            .collect::<Result<Vec<_>, _>>()
    })??;
    let report = CvReport::from_folds(outcomes);

    write(&a.stats, &stats::write_fold_histories(&report.per_fold_history))?;
    let summary = render_summary(&report);
    if let Some(p) = &a.summary {
        write(p, &summary)?;
    }
    let mut m = RunManifest::new("crossval");
    ga_manifest(&mut m, &cfg, &data);
    m.set("folds", a.folds);
    m.input("data", &a.data, &bytes);
    write(&manifest_path(&a.manifest, &a.stats), &m.render())?;
    print!("{summary}");
    Ok(())
}

pub fn export(a: &ExportArgs) -> Result<()> {
    let (model, _) = read_model(&a.model)?;
    let out = if a.dot {
        model.tree.to_dot(&model.schema)
    } else {
        model.tree.rules().iter().map(|r| r.describe(&model.schema) + "\n").collect()
    };
    match &a.out {
        Some(p) => write(p, &out),
        None => {
            print!("{out}");
            Ok(())
        }
    }
}

pub fn prune(a: &PruneArgs) -> Result<()> {
    let (model, _) = read_model(&a.model)?;
    let (data, _) = read_for_model(&a.data, &model, false)?;
    let pruned = model.tree.prune(&data)?;
    println!(
        "size {} -> {} | pruning-set accuracy {} -> {}",
        model.tree.size(),
        pruned.size(),
        accuracy(&model.tree, &data)?,
        accuracy(&pruned, &data)?
    );
    write(&a.out, &Model::new(model.schema, pruned)?.to_json())
}

pub fn datagen(a: &DatagenArgs) -> Result<()> {
    let cfg = GenConfig { n: a.n, seed: a.seed, noise_rate: a.noise, depth_range: (a.depth_min, a.depth_max) };
    let table = TextureBoundaryTable::usda_default();
    let data = soil::generate(&cfg, &table)?;
    let mut text = String::new();
    let _ = writeln!(text, "% synthetic soil texture data, boundary table {}", table.version);
    let _ = writeln!(text, "% ratio attributes divide by max(denominator, {}) percentage points", soil::RATIO_FLOOR);
    let _ = writeln!(text, "% depth in metres, uniform and independent of the label");
    text.push_str(&write_arff(&data));
    write(&a.out, &text)?;

    let mut m = RunManifest::new("datagen");
    m.set("rng", rng::ALGORITHM)
        .set("seed", a.seed)
        .set("n", a.n)
        .set("noise", a.noise)
        .set("depth_min", a.depth_min)
        .set("depth_max", a.depth_max)
        .set("ratio_floor", soil::RATIO_FLOOR)
        .set("boundary_table", &table.version);
    write(&manifest_path(&a.manifest, &a.out), &m.render())
}
