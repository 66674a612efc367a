//! Synthetic soil-texture datasets.
//!
//! Sand/silt/clay compositions are sampled uniformly on the simplex and
//! labelled by a [`TextureBoundaryTable`], a first-match list of regions
//! bounded by linear inequalities. The shipped table follows the USDA
//! texture triangle restricted to eleven survey symbols; silt is folded
//! into silt loam.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::dataset::{Attribute, Dataset, Schema, Value};
use crate::rng::{self, Stream};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TextureClass {
    pub symbol: &'static str,
    pub long_name: &'static str,
}

/// The eleven survey symbols, in the order used for the class attribute.
pub const TEXTURE_CLASSES: [TextureClass; 11] = [
    TextureClass { symbol: "s", long_name: "Sand" },
    TextureClass { symbol: "sicl", long_name: "Silty Clay Loam" },
    TextureClass { symbol: "sic", long_name: "Silty Clay" },
    TextureClass { symbol: "c", long_name: "Clay" },
    TextureClass { symbol: "sl", long_name: "Sandy Loam" },
    TextureClass { symbol: "cl", long_name: "Clay Loam" },
    TextureClass { symbol: "sil", long_name: "Silty Loam" },
    TextureClass { symbol: "l", long_name: "Loam" },
    TextureClass { symbol: "ls", long_name: "Loamy Sand" },
    TextureClass { symbol: "scl", long_name: "Sand Clay Loam" },
    TextureClass { symbol: "sc", long_name: "Sand Clay" },
];

pub fn texture_index(symbol: &str) -> Option<usize> {
    TEXTURE_CLASSES.iter().position(|c| c.symbol == symbol)
}

/// `sand * a + silt * b + clay * c <= bound`, all in percent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearBound {
    pub sand: f64,
    pub silt: f64,
    pub clay: f64,
    pub bound: f64,
}

impl LinearBound {
    pub const fn new(sand: f64, silt: f64, clay: f64, bound: f64) -> Self {
        LinearBound { sand, silt, clay, bound }
    }

    pub fn holds(&self, sand: f64, silt: f64, clay: f64) -> bool {
        self.sand * sand + self.silt * silt + self.clay * clay <= self.bound
    }
}

/// A conjunction of bounds labelled with an index into [`TEXTURE_CLASSES`].
#[derive(Clone, Debug, PartialEq)]
pub struct TextureRegion {
    pub class: usize,
    pub bounds: Vec<LinearBound>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TextureBoundaryTable {
    pub version: String,
    pub regions: Vec<TextureRegion>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SoilError {
    Negative { sand: f64, silt: f64, clay: f64 },
    NotSummingTo100 { sum: f64 },
    Uncovered { sand: f64, silt: f64, clay: f64 },
    InvalidConfig(String),
}

impl fmt::Display for SoilError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SoilError::Negative { sand, silt, clay } => {
                write!(f, "negative component in sand={sand} silt={silt} clay={clay}")
            }
            SoilError::NotSummingTo100 { sum } => write!(f, "sand + silt + clay = {sum}, expected 100"),
            SoilError::Uncovered { sand, silt, clay } => {
                write!(f, "no texture region covers sand={sand} silt={silt} clay={clay}")
            }
            SoilError::InvalidConfig(m) => write!(f, "invalid generator configuration: {m}"),
        }
    }
}

impl core::error::Error for SoilError {}

/// Allowed deviation of `sand + silt + clay` from 100.
pub const SUM_TOLERANCE: f64 = 1e-9;

// Shorthands for the shipped table: `x <= v` and `x >= v`.
const fn sand_ge(v: f64) -> LinearBound {
    LinearBound::new(-1.0, 0.0, 0.0, -v)
}
const fn silt_le(v: f64) -> LinearBound {
    LinearBound::new(0.0, 1.0, 0.0, v)
}
const fn silt_ge(v: f64) -> LinearBound {
    LinearBound::new(0.0, -1.0, 0.0, -v)
}
const fn clay_le(v: f64) -> LinearBound {
    LinearBound::new(0.0, 0.0, 1.0, v)
}
const fn clay_ge(v: f64) -> LinearBound {
    LinearBound::new(0.0, 0.0, -1.0, -v)
}

impl TextureBoundaryTable {
    pub const DEFAULT_VERSION: &'static str = "usda-11/1";

    /// The shipped table. Regions, first match wins:
    ///
    /// | class | bounds |
    /// |-------|--------|
    /// | s     | silt + 1.5 clay <= 15 |
    /// | ls    | silt + 2 clay <= 30 |
    /// | sl    | clay <= 20, sand >= 52 |
    /// | sl    | clay <= 7, silt <= 50 |
    /// | sil   | silt >= 50, clay <= 27 |
    /// | scl   | clay <= 35, sand >= 45, silt <= 28 |
    /// | l     | clay <= 27 |
    /// | sc    | clay >= 35, sand >= 45 |
    /// | cl    | clay <= 40, sand >= 20 |
    /// | sicl  | clay <= 40 |
    /// | sic   | silt >= 40 |
    /// | c     | (everything else) |
    pub fn usda_default() -> Self {
        let region = |symbol: &str, bounds: &[LinearBound]| TextureRegion {
            class: texture_index(symbol).expect("known symbol"),
            bounds: bounds.to_vec(),
        };
        TextureBoundaryTable {
            version: String::from(Self::DEFAULT_VERSION),
            regions: vec![
                region("s", &[LinearBound::new(0.0, 1.0, 1.5, 15.0)]),
                region("ls", &[LinearBound::new(0.0, 1.0, 2.0, 30.0)]),
                region("sl", &[clay_le(20.0), sand_ge(52.0)]),
                region("sl", &[clay_le(7.0), silt_le(50.0)]),
                region("sil", &[silt_ge(50.0), clay_le(27.0)]),
                region("scl", &[clay_le(35.0), sand_ge(45.0), silt_le(28.0)]),
                region("l", &[clay_le(27.0)]),
                region("sc", &[clay_ge(35.0), sand_ge(45.0)]),
                region("cl", &[clay_le(40.0), sand_ge(20.0)]),
                region("sicl", &[clay_le(40.0)]),
                region("sic", &[silt_ge(40.0)]),
                region("c", &[]),
            ],
        }
    }

    /// Index into [`TEXTURE_CLASSES`] of the first region containing the
    /// composition.
    pub fn classify(&self, sand: f64, silt: f64, clay: f64) -> Result<usize, SoilError> {
        if !(sand >= 0.0 && silt >= 0.0 && clay >= 0.0) {
            return Err(SoilError::Negative { sand, silt, clay });
        }
        let sum = sand + silt + clay;
        if (sum - 100.0).abs() > SUM_TOLERANCE || sum.is_nan() {
            return Err(SoilError::NotSummingTo100 { sum });
        }
        self.regions
            .iter()
            .find(|r| r.bounds.iter().all(|b| b.holds(sand, silt, clay)))
            .map(|r| r.class)
            .ok_or(SoilError::Uncovered { sand, silt, clay })
    }
}

/// Texture class of a composition under `table`.
pub fn classify_texture(
    sand: f64,
    silt: f64,
    clay: f64,
    table: &TextureBoundaryTable,
) -> Result<TextureClass, SoilError> {
    table.classify(sand, silt, clay).map(|i| TEXTURE_CLASSES[i])
}

/// Denominator floor (percentage points) for the ratio attributes.
pub const RATIO_FLOOR: f64 = 0.5;

#[derive(Clone, Debug, PartialEq)]
pub struct GenConfig {
    pub n: usize,
    pub seed: u64,
    /// Fraction of labels moved to a different, uniformly drawn class.
    pub noise_rate: f64,
    /// Depth range in metres.
    pub depth_range: (f64, f64),
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { n: 500, seed: 0, noise_rate: 0.0, depth_range: (0.0, 2.0) }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<(), SoilError> {
        if self.n == 0 {
            return Err(SoilError::InvalidConfig("n must be at least 1".into()));
        }
        if !(self.noise_rate >= 0.0 && self.noise_rate < 1.0) {
            return Err(SoilError::InvalidConfig(format!("noise rate must be in [0, 1), got {}", self.noise_rate)));
        }
        let (lo, hi) = self.depth_range;
        if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
            return Err(SoilError::InvalidConfig(format!(
                "depth range ({lo}, {hi}) must be non-negative and increasing"
            )));
        }
        Ok(())
    }
}

/// Attribute names of generated datasets; the class comes last.
pub const SOIL_ATTRIBUTES: [&str; 8] =
    ["Depth", "Sand", "Silt", "Clay", "Sandbysilt", "Sandbyclay", "Sandbysiltclay", "TextureClass"];

pub fn soil_schema() -> Schema {
    let mut attrs: Vec<Attribute> = SOIL_ATTRIBUTES[..7].iter().map(|n| Attribute::numeric(*n)).collect();
    attrs.push(Attribute::nominal(SOIL_ATTRIBUTES[7], TEXTURE_CLASSES.iter().map(|c| c.symbol)));
    Schema::new(attrs, 7).expect("static soil schema is valid")
}

/// Column positions within generated rows.
pub mod columns {
    pub const DEPTH: usize = 0;
    pub const SAND: usize = 1;
    pub const SILT: usize = 2;
    pub const CLAY: usize = 3;
    pub const CLASS: usize = 7;
}

fn ratio(num: f64, den: f64) -> f64 {
    num / den.max(RATIO_FLOOR)
}

/// Draws `cfg.n` labelled samples. Per row the stream yields two simplex
/// coordinates, the depth, the noise coin and, on a hit, the replacement
/// class offset.
pub fn generate(cfg: &GenConfig, table: &TextureBoundaryTable) -> Result<Dataset, SoilError> {
    cfg.validate()?;
    let mut rng = Stream::new(cfg.seed);
    let (dlo, dhi) = cfg.depth_range;
    let classes = TEXTURE_CLASSES.len();
    let mut rows = Vec::with_capacity(cfg.n);
    for _ in 0..cfg.n {
        let u = rng::unit(&mut rng);
        let v = rng::unit(&mut rng);
        let (lo, hi) = if u <= v { (u, v) } else { (v, u) };
        let sand = 100.0 * lo;
        let silt = 100.0 * (hi - lo);
        let clay = (100.0 - sand - silt).max(0.0);
        let depth = dlo + rng::unit(&mut rng) * (dhi - dlo);
        let mut label = table.classify(sand, silt, clay)?;
        if rng::chance(&mut rng, cfg.noise_rate) {
            label = (label + 1 + rng::index(&mut rng, classes - 1)) % classes;
        }
        rows.push(vec![
            Value::Numeric(depth),
            Value::Numeric(sand),
            Value::Numeric(silt),
            Value::Numeric(clay),
            Value::Numeric(ratio(sand, silt)),
            Value::Numeric(ratio(sand, clay)),
            Value::Numeric(ratio(sand, silt + clay)),
            Value::Nominal(label),
        ]);
    }
    Ok(Dataset::new("soil", soil_schema(), rows).expect("generated rows match the soil schema"))
}
