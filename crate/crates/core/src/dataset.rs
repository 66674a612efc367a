//! Attribute schemas and in-memory datasets.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

#[derive(Clone, Debug, PartialEq)]
pub enum AttributeKind {
    Numeric,
    /// Ordered, non-empty list of distinct category names.
    Nominal(Vec<String>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Attribute {
    pub name: String,
    pub kind: AttributeKind,
}

impl Attribute {
    pub fn numeric(name: impl Into<String>) -> Self {
        Attribute { name: name.into(), kind: AttributeKind::Numeric }
    }

    pub fn nominal<S: Into<String>>(name: impl Into<String>, categories: impl IntoIterator<Item = S>) -> Self {
        Attribute { name: name.into(), kind: AttributeKind::Nominal(categories.into_iter().map(Into::into).collect()) }
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self.kind, AttributeKind::Numeric)
    }

    /// Declared categories, empty for numeric attributes.
    pub fn categories(&self) -> &[String] {
        match &self.kind {
            AttributeKind::Numeric => &[],
            AttributeKind::Nominal(c) => c,
        }
    }

    pub fn category_index(&self, name: &str) -> Option<usize> {
        self.categories().iter().position(|c| c == name)
    }
}

/// One cell of a data row.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Value {
    Numeric(f64),
    /// Index into the attribute's category list.
    Nominal(usize),
    Missing,
}

impl Value {
    pub fn is_missing(&self) -> bool {
        matches!(self, Value::Missing)
    }

    /// Equality that compares numeric payloads bit for bit.
    pub fn bit_eq(&self, other: &Value) -> bool {
        match (self, other) {
            (Value::Numeric(a), Value::Numeric(b)) => a.to_bits() == b.to_bits(),
            _ => self == other,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DatasetError {
    NoAttributes,
    EmptyName { attribute: usize },
    DuplicateAttribute(String),
    EmptyCategories(String),
    DuplicateCategory { attribute: String, category: String },
    ClassIndexOutOfRange(usize),
    ClassNotNominal(String),
    RowWidth { row: usize, expected: usize, found: usize },
    KindMismatch { row: usize, attribute: String },
    CategoryOutOfRange { row: usize, attribute: String, index: usize },
    NonFinite { row: usize, attribute: String },
    MissingClass { row: usize },
}

impl fmt::Display for DatasetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DatasetError::NoAttributes => write!(f, "schema declares no attributes"),
            DatasetError::EmptyName { attribute } => write!(f, "attribute {attribute} has an empty name"),
            DatasetError::DuplicateAttribute(n) => write!(f, "duplicate attribute name '{n}'"),
            DatasetError::EmptyCategories(n) => write!(f, "nominal attribute '{n}' declares no categories"),
            DatasetError::DuplicateCategory { attribute, category } => {
                write!(f, "attribute '{attribute}' declares category '{category}' twice")
            }
            DatasetError::ClassIndexOutOfRange(i) => write!(f, "class index {i} is out of range"),
            DatasetError::ClassNotNominal(n) => write!(f, "class attribute '{n}' is not nominal"),
            DatasetError::RowWidth { row, expected, found } => {
                write!(f, "row {row} has {found} values, expected {expected}")
            }
            DatasetError::KindMismatch { row, attribute } => {
                write!(f, "row {row}: value kind does not match attribute '{attribute}'")
            }
            DatasetError::CategoryOutOfRange { row, attribute, index } => {
                write!(f, "row {row}: category index {index} out of range for '{attribute}'")
            }
            DatasetError::NonFinite { row, attribute } => {
                write!(f, "row {row}: non-finite value for '{attribute}'")
            }
            DatasetError::MissingClass { row } => write!(f, "row {row}: class value is missing"),
        }
    }
}

impl core::error::Error for DatasetError {}

/// 64-bit FNV-1a digest of a schema's canonical encoding.
///
/// Covers attribute names, kinds, category lists and the class index. The
/// relation name does not participate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SchemaFingerprint(pub u64);

impl fmt::Display for SchemaFingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}

/// Attributes plus the designated class attribute.
#[derive(Clone, Debug, PartialEq)]
pub struct Schema {
    attributes: Vec<Attribute>,
    class_index: usize,
}

impl Schema {
    /// Validates names, category lists and the class attribute.
    pub fn new(attributes: Vec<Attribute>, class_index: usize) -> Result<Self, DatasetError> {
        if attributes.is_empty() {
            return Err(DatasetError::NoAttributes);
        }
        for (i, a) in attributes.iter().enumerate() {
            if a.name.is_empty() {
                return Err(DatasetError::EmptyName { attribute: i });
            }
            if attributes[..i].iter().any(|b| b.name == a.name) {
                return Err(DatasetError::DuplicateAttribute(a.name.clone()));
            }
            if let AttributeKind::Nominal(cats) = &a.kind {
                if cats.is_empty() {
                    return Err(DatasetError::EmptyCategories(a.name.clone()));
                }
                for (j, c) in cats.iter().enumerate() {
                    if cats[..j].contains(c) {
                        return Err(DatasetError::DuplicateCategory { attribute: a.name.clone(), category: c.clone() });
                    }
                }
            }
        }
        let class = attributes.get(class_index).ok_or(DatasetError::ClassIndexOutOfRange(class_index))?;
        if class.is_numeric() {
            return Err(DatasetError::ClassNotNominal(class.name.clone()));
        }
        Ok(Schema { attributes, class_index })
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn attribute(&self, index: usize) -> Option<&Attribute> {
        self.attributes.get(index)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name == name)
    }

    pub fn len(&self) -> usize {
        self.attributes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attributes.is_empty()
    }

    pub fn class_index(&self) -> usize {
        self.class_index
    }

    pub fn class_attribute(&self) -> &Attribute {
        &self.attributes[self.class_index]
    }

    pub fn class_labels(&self) -> &[String] {
        self.class_attribute().categories()
    }

    pub fn num_classes(&self) -> usize {
        self.class_labels().len()
    }

    /// Indices of every attribute other than the class.
    pub fn predictors(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.attributes.len()).filter(move |&i| i != self.class_index)
    }

    pub fn num_predictors(&self) -> usize {
        self.attributes.len() - 1
    }

    pub fn fingerprint(&self) -> SchemaFingerprint {
        let mut h = Fnv::new();
        h.write_u64(self.attributes.len() as u64);
        for a in &self.attributes {
            h.write_str(&a.name);
            match &a.kind {
                AttributeKind::Numeric => h.write(&[0]),
                AttributeKind::Nominal(cats) => {
                    h.write(&[1]);
                    h.write_u64(cats.len() as u64);
                    for c in cats {
                        h.write_str(c);
                    }
                }
            }
        }
        h.write_u64(self.class_index as u64);
        SchemaFingerprint(h.0)
    }

    fn check_row(&self, row_no: usize, row: &[Value], require_class: bool) -> Result<(), DatasetError> {
        if row.len() != self.attributes.len() {
            return Err(DatasetError::RowWidth { row: row_no, expected: self.attributes.len(), found: row.len() });
        }
        for (a, v) in self.attributes.iter().zip(row) {
            match (&a.kind, v) {
                (_, Value::Missing) => {}
                (AttributeKind::Numeric, Value::Numeric(x)) => {
                    if !x.is_finite() {
                        return Err(DatasetError::NonFinite { row: row_no, attribute: a.name.clone() });
                    }
                }
                (AttributeKind::Nominal(cats), Value::Nominal(c)) => {
                    if *c >= cats.len() {
                        return Err(DatasetError::CategoryOutOfRange {
                            row: row_no,
                            attribute: a.name.clone(),
                            index: *c,
                        });
                    }
                }
                _ => return Err(DatasetError::KindMismatch { row: row_no, attribute: a.name.clone() }),
            }
        }
        if require_class && row[self.class_index].is_missing() {
            return Err(DatasetError::MissingClass { row: row_no });
        }
        Ok(())
    }
}

struct Fnv(u64);

impl Fnv {
    fn new() -> Self {
        Fnv(0xcbf2_9ce4_8422_2325)
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= u64::from(b);
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }

    fn write_u64(&mut self, v: u64) {
        self.write(&v.to_le_bytes());
    }

    fn write_str(&mut self, s: &str) {
        self.write_u64(s.len() as u64);
        self.write(s.as_bytes());
    }
}

/// A schema plus rows of values.
///
/// A labeled dataset never holds `Missing` in the class column. Unlabeled
/// datasets (built with [`Dataset::unlabeled`]) exist only for prediction.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    relation: String,
    schema: Schema,
    rows: Vec<Vec<Value>>,
    labeled: bool,
}

impl Dataset {
    pub fn new(relation: impl Into<String>, schema: Schema, rows: Vec<Vec<Value>>) -> Result<Self, DatasetError> {
        for (i, r) in rows.iter().enumerate() {
            schema.check_row(i, r, true)?;
        }
        Ok(Dataset { relation: relation.into(), schema, rows, labeled: true })
    }

    /// Like [`Dataset::new`] but tolerates missing class values.
    pub fn unlabeled(relation: impl Into<String>, schema: Schema, rows: Vec<Vec<Value>>) -> Result<Self, DatasetError> {
        for (i, r) in rows.iter().enumerate() {
            schema.check_row(i, r, false)?;
        }
        let labeled = rows.iter().all(|r| !r[schema.class_index].is_missing());
        Ok(Dataset { relation: relation.into(), schema, rows, labeled })
    }

    pub fn relation(&self) -> &str {
        &self.relation
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn rows(&self) -> &[Vec<Value>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// True when every row carries a class value.
    pub fn is_labeled(&self) -> bool {
        self.labeled
    }

    /// Class label of a row, `None` when it is missing.
    pub fn label(&self, row: usize) -> Option<usize> {
        match self.rows[row][self.schema.class_index] {
            Value::Nominal(c) => Some(c),
            _ => None,
        }
    }

    /// Re-designates the class attribute.
    pub fn with_class_index(self, class_index: usize) -> Result<Self, DatasetError> {
        let schema = Schema::new(self.schema.attributes, class_index)?;
        if self.labeled {
            Dataset::new(self.relation, schema, self.rows)
        } else {
            Dataset::unlabeled(self.relation, schema, self.rows)
        }
    }

    /// Subset of rows, in the order given.
    pub fn select(&self, indices: &[usize]) -> Dataset {
        let rows: Vec<Vec<Value>> = indices.iter().map(|&i| self.rows[i].clone()).collect();
        let labeled = rows.iter().all(|r| !r[self.schema.class_index].is_missing());
        Dataset { relation: self.relation.clone(), schema: self.schema.clone(), rows, labeled }
    }

    /// True if any cell outside the class column is missing.
    pub fn has_missing_predictors(&self) -> bool {
        let class = self.schema.class_index;
        self.rows.iter().any(|r| r.iter().enumerate().any(|(i, v)| i != class && v.is_missing()))
    }

    /// Structural equality with numeric cells compared bit for bit.
    pub fn bit_eq(&self, other: &Dataset) -> bool {
        self.relation == other.relation
            && self.schema == other.schema
            && self.rows.len() == other.rows.len()
            && self
                .rows
                .iter()
                .zip(&other.rows)
                .all(|(a, b)| a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.bit_eq(y)))
    }
}
