//! Binary decision trees: the genome the GA evolves.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::fmt::Write as _;

use rand_core::RngCore;

use crate::arff::quote_name;
use crate::dataset::{AttributeKind, Dataset, Schema, SchemaFingerprint, Value};
use crate::rng;

#[derive(Clone, Debug, PartialEq)]
pub enum TreeError {
    /// A tested attribute was `?` in the row being classified.
    MissingValue {
        attribute: usize,
    },
    SchemaMismatch {
        expected: SchemaFingerprint,
        found: SchemaFingerprint,
    },
    RowTooShort {
        attribute: usize,
        width: usize,
    },
    EmptyValuePool {
        attribute: usize,
    },
    NoPredictors,
    EmptyDataset,
    /// The dataset has rows without a class value.
    Unlabeled,
    Invalid(String),
}

impl fmt::Display for TreeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeError::MissingValue { attribute } => write!(f, "missing value at tested attribute {attribute}"),
            TreeError::SchemaMismatch { expected, found } => {
                write!(f, "schema fingerprint mismatch: tree expects {expected}, data has {found}")
            }
            TreeError::RowTooShort { attribute, width } => {
                write!(f, "row of width {width} has no attribute {attribute}")
            }
            TreeError::EmptyValuePool { attribute } => {
                write!(f, "no observed values for numeric attribute {attribute}")
            }
            TreeError::NoPredictors => write!(f, "schema has no predictor attributes"),
            TreeError::EmptyDataset => write!(f, "dataset is empty"),
            TreeError::Unlabeled => write!(f, "dataset has rows without a class value"),
            TreeError::Invalid(m) => write!(f, "invalid tree: {m}"),
        }
    }
}

impl core::error::Error for TreeError {}

/// Split predicate of an internal node.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NodeTest {
    /// Numeric attribute; `value <= threshold` takes the true branch.
    LessEq { attribute: usize, threshold: f64 },
    /// Nominal attribute; equality takes the true branch.
    Equals { attribute: usize, category: usize },
}

impl NodeTest {
    pub fn attribute(&self) -> usize {
        match *self {
            NodeTest::LessEq { attribute, .. } | NodeTest::Equals { attribute, .. } => attribute,
        }
    }

    pub fn evaluate(&self, row: &[Value]) -> Result<bool, TreeError> {
        let attribute = self.attribute();
        let v = row.get(attribute).ok_or(TreeError::RowTooShort { attribute, width: row.len() })?;
        match (self, v) {
            (_, Value::Missing) => Err(TreeError::MissingValue { attribute }),
            (NodeTest::LessEq { threshold, .. }, Value::Numeric(x)) => Ok(*x <= *threshold),
            (NodeTest::Equals { category, .. }, Value::Nominal(c)) => Ok(c == category),
            _ => Err(TreeError::Invalid(format!("test kind does not match value at attribute {attribute}"))),
        }
    }

    /// `attr <= v` / `attr = cat`, or the negation when `outcome` is false.
    pub fn describe(&self, schema: &Schema, outcome: bool) -> String {
        let attr = &schema.attributes()[self.attribute()];
        let name = quote_name(&attr.name);
        match *self {
            NodeTest::LessEq { threshold, .. } => {
                format!("{name} {} {threshold}", if outcome { "<=" } else { ">" })
            }
            NodeTest::Equals { category, .. } => {
                let cat = quote_name(&attr.categories()[category]);
                format!("{name} {} {cat}", if outcome { "=" } else { "!=" })
            }
        }
    }

    fn check(&self, schema: &Schema) -> Result<(), TreeError> {
        let a = self.attribute();
        if a == schema.class_index() {
            return Err(TreeError::Invalid(format!("test on class attribute {a}")));
        }
        let attr =
            schema.attribute(a).ok_or_else(|| TreeError::Invalid(format!("attribute index {a} out of range")))?;
        match (self, &attr.kind) {
            (NodeTest::LessEq { threshold, .. }, AttributeKind::Numeric) if threshold.is_finite() => Ok(()),
            (NodeTest::LessEq { .. }, AttributeKind::Numeric) => {
                Err(TreeError::Invalid(format!("non-finite threshold on '{}'", attr.name)))
            }
            (NodeTest::Equals { category, .. }, AttributeKind::Nominal(cats)) if *category < cats.len() => Ok(()),
            _ => Err(TreeError::Invalid(format!("test does not fit attribute '{}'", attr.name))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Internal {
        test: NodeTest,
        yes: Box<Node>,
        no: Box<Node>,
    },
    /// Class label index.
    Leaf(usize),
}

impl Node {
    pub fn internal(test: NodeTest, yes: Node, no: Node) -> Node {
        Node::Internal { test, yes: Box::new(yes), no: Box::new(no) }
    }

    pub fn size(&self) -> usize {
        match self {
            Node::Leaf(_) => 1,
            Node::Internal { yes, no, .. } => 1 + yes.size() + no.size(),
        }
    }

    /// Edges on the longest root-to-leaf path.
    pub fn height(&self) -> usize {
        match self {
            Node::Leaf(_) => 0,
            Node::Internal { yes, no, .. } => 1 + yes.height().max(no.height()),
        }
    }

    pub fn classify(&self, row: &[Value]) -> Result<usize, TreeError> {
        let mut node = self;
        loop {
            match node {
                Node::Leaf(label) => return Ok(*label),
                Node::Internal { test, yes, no } => {
                    node = if test.evaluate(row)? { yes } else { no };
                }
            }
        }
    }

    /// The `index`-th node in pre-order (root is 0, true branch first).
    pub fn get(&self, mut index: usize) -> Option<&Node> {
        let mut node = self;
        loop {
            if index == 0 {
                return Some(node);
            }
            match node {
                Node::Leaf(_) => return None,
                Node::Internal { yes, no, .. } => {
                    let left = yes.size();
                    if index <= left {
                        index -= 1;
                        node = yes;
                    } else {
                        index -= 1 + left;
                        node = no;
                    }
                }
            }
        }
    }

    pub fn get_mut(&mut self, mut index: usize) -> Option<&mut Node> {
        let mut node = self;
        loop {
            if index == 0 {
                return Some(node);
            }
            match node {
                Node::Leaf(_) => return None,
                Node::Internal { yes, no, .. } => {
                    let left = yes.size();
                    if index <= left {
                        index -= 1;
                        node = yes;
                    } else {
                        index -= 1 + left;
                        node = no;
                    }
                }
            }
        }
    }

    /// Visits every node in pre-order.
    pub fn visit_mut(&mut self, f: &mut impl FnMut(&mut Node)) {
        f(self);
        if let Node::Internal { yes, no, .. } = self {
            yes.visit_mut(f);
            no.visit_mut(f);
        }
    }

    fn check(&self, schema: &Schema) -> Result<(), TreeError> {
        match self {
            Node::Leaf(l) if *l < schema.num_classes() => Ok(()),
            Node::Leaf(l) => Err(TreeError::Invalid(format!("class label {l} out of range"))),
            Node::Internal { test, yes, no } => {
                test.check(schema)?;
                yes.check(schema)?;
                no.check(schema)
            }
        }
    }
}

/// A tree bound to the schema it was built for.
#[derive(Clone, Debug, PartialEq)]
pub struct DecisionTree {
    root: Node,
    fingerprint: SchemaFingerprint,
}

impl DecisionTree {
    /// Binds `root` to `schema` after checking every index and test kind.
    pub fn new(root: Node, schema: &Schema) -> Result<Self, TreeError> {
        root.check(schema)?;
        Ok(DecisionTree { root, fingerprint: schema.fingerprint() })
    }

    pub fn leaf(label: usize, schema: &Schema) -> Result<Self, TreeError> {
        DecisionTree::new(Node::Leaf(label), schema)
    }

    pub(crate) fn from_parts(root: Node, fingerprint: SchemaFingerprint) -> Self {
        DecisionTree { root, fingerprint }
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn root_mut(&mut self) -> &mut Node {
        &mut self.root
    }

    pub fn into_root(self) -> Node {
        self.root
    }

    pub fn fingerprint(&self) -> SchemaFingerprint {
        self.fingerprint
    }

    pub fn size(&self) -> usize {
        self.root.size()
    }

    pub fn height(&self) -> usize {
        self.root.height()
    }

    /// Structural check against a schema, including the fingerprint.
    pub fn validate(&self, schema: &Schema) -> Result<(), TreeError> {
        self.ensure_schema(schema)?;
        self.root.check(schema)
    }

    pub fn ensure_schema(&self, schema: &Schema) -> Result<(), TreeError> {
        let found = schema.fingerprint();
        if found != self.fingerprint {
            return Err(TreeError::SchemaMismatch { expected: self.fingerprint, found });
        }
        Ok(())
    }

    pub fn classify(&self, row: &[Value]) -> Result<usize, TreeError> {
        self.root.classify(row)
    }

    /// Labels for every row of a schema-compatible dataset.
    pub fn predict(&self, data: &Dataset) -> Result<Vec<usize>, TreeError> {
        self.ensure_schema(data.schema())?;
        data.rows().iter().map(|r| self.classify(r)).collect()
    }

    /// One rule per leaf, depth-first with the true branch first.
    pub fn rules(&self) -> Vec<Rule> {
        fn walk(node: &Node, path: &mut Vec<(NodeTest, bool)>, out: &mut Vec<Rule>) {
            match node {
                Node::Leaf(label) => out.push(Rule { conditions: path.clone(), label: *label }),
                Node::Internal { test, yes, no } => {
                    path.push((*test, true));
                    walk(yes, path, out);
                    path.pop();
                    path.push((*test, false));
                    walk(no, path, out);
                    path.pop();
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.root, &mut Vec::new(), &mut out);
        out
    }

    /// Reduced-error pruning against `pruning_set`.
    ///
    /// Children are pruned first. A node whose two children end up as the
    /// same leaf collapses into that leaf. Otherwise the node becomes a leaf
    /// of the majority class of the rows reaching it whenever that does not
    /// increase the error on those rows. Nodes no row reaches are kept.
    pub fn prune(&self, pruning_set: &Dataset) -> Result<DecisionTree, TreeError> {
        self.ensure_schema(pruning_set.schema())?;
        if pruning_set.is_empty() {
            return Err(TreeError::EmptyDataset);
        }
        if !pruning_set.is_labeled() {
            return Err(TreeError::Unlabeled);
        }
        let rows: Vec<usize> = (0..pruning_set.len()).collect();
        let classes = pruning_set.schema().num_classes();
        let (root, _) = prune_node(&self.root, pruning_set, &rows, classes)?;
        Ok(DecisionTree { root, fingerprint: self.fingerprint })
    }

    /// Graphviz rendering. Internal nodes read `attr <= v` or `attr = cat`;
    /// the true edge is labelled `yes`, the false edge `no`.
    pub fn to_dot(&self, schema: &Schema) -> String {
        fn walk(node: &Node, schema: &Schema, next: &mut usize, out: &mut String) -> usize {
            let id = *next;
            *next += 1;
            match node {
                Node::Leaf(label) => {
                    let _ =
                        writeln!(out, "  n{id} [label=\"{}\", shape=box];", dot_escape(&schema.class_labels()[*label]));
                }
                Node::Internal { test, yes, no } => {
                    let attr = &schema.attributes()[test.attribute()];
                    let text = match *test {
                        NodeTest::LessEq { threshold, .. } => format!("{} <= {threshold}", attr.name),
                        NodeTest::Equals { category, .. } => format!("{} = {}", attr.name, attr.categories()[category]),
                    };
                    let _ = writeln!(out, "  n{id} [label=\"{}\"];", dot_escape(&text));
                    let y = walk(yes, schema, next, out);
                    let _ = writeln!(out, "  n{id} -> n{y} [label=\"yes\"];");
                    let n = walk(no, schema, next, out);
                    let _ = writeln!(out, "  n{id} -> n{n} [label=\"no\"];");
                }
            }
            id
        }
        let mut out = String::from("digraph tree {\n");
        walk(&self.root, schema, &mut 0, &mut out);
        out.push_str("}\n");
        out
    }
}

fn dot_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => {}
            c => out.push(c),
        }
    }
    out
}

fn majority(data: &Dataset, rows: &[usize], classes: usize) -> (usize, usize) {
    let mut counts = vec![0usize; classes];
    for &r in rows {
        if let Some(c) = data.label(r) {
            counts[c] += 1;
        }
    }
    // lowest index wins ties
    let mut best = 0;
    for c in 1..classes {
        if counts[c] > counts[best] {
            best = c;
        }
    }
    (best, counts[best])
}

// Returns the pruned node and its error count on `rows`.
fn prune_node(node: &Node, data: &Dataset, rows: &[usize], classes: usize) -> Result<(Node, usize), TreeError> {
    match node {
        Node::Leaf(label) => {
            let errors = rows.iter().filter(|&&r| data.label(r) != Some(*label)).count();
            Ok((Node::Leaf(*label), errors))
        }
        Node::Internal { test, yes, no } => {
            let mut yes_rows = Vec::new();
            let mut no_rows = Vec::new();
            for &r in rows {
                if test.evaluate(&data.rows()[r])? {
                    yes_rows.push(r);
                } else {
                    no_rows.push(r);
                }
            }
            let (yes, ye) = prune_node(yes, data, &yes_rows, classes)?;
            let (no, ne) = prune_node(no, data, &no_rows, classes)?;
            let subtree_errors = ye + ne;
            if let (Node::Leaf(a), Node::Leaf(b)) = (&yes, &no) {
                if a == b {
                    return Ok((Node::Leaf(*a), subtree_errors));
                }
            }
            if !rows.is_empty() {
                let (label, hits) = majority(data, rows, classes);
                let leaf_errors = rows.len() - hits;
                if leaf_errors <= subtree_errors {
                    return Ok((Node::Leaf(label), leaf_errors));
                }
            }
            Ok((Node::internal(*test, yes, no), subtree_errors))
        }
    }
}

/// A root-to-leaf path as a conjunction of test outcomes.
#[derive(Clone, Debug, PartialEq)]
pub struct Rule {
    pub conditions: Vec<(NodeTest, bool)>,
    pub label: usize,
}

impl Rule {
    pub fn matches(&self, row: &[Value]) -> Result<bool, TreeError> {
        for (test, outcome) in &self.conditions {
            if test.evaluate(row)? != *outcome {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `IF a <= 1 AND b != x THEN label`; an empty path reads `IF TRUE`.
    pub fn describe(&self, schema: &Schema) -> String {
        let mut out = String::from("IF ");
        if self.conditions.is_empty() {
            out.push_str("TRUE");
        }
        for (i, (test, outcome)) in self.conditions.iter().enumerate() {
            if i > 0 {
                out.push_str(" AND ");
            }
            out.push_str(&test.describe(schema, *outcome));
        }
        let _ = write!(out, " THEN {}", quote_name(&schema.class_labels()[self.label]));
        out
    }
}

/// Distinct observed values of each numeric attribute, sorted ascending.
/// Numeric thresholds are only ever drawn from here.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValuePool {
    values: Vec<Vec<f64>>,
}

impl ValuePool {
    pub fn from_dataset(data: &Dataset) -> Self {
        let mut values = vec![Vec::new(); data.schema().len()];
        for row in data.rows() {
            for (i, v) in row.iter().enumerate() {
                if let (Value::Numeric(x), true) = (v, data.schema().attributes()[i].is_numeric()) {
                    values[i].push(*x);
                }
            }
        }
        for v in &mut values {
            v.sort_by(f64::total_cmp);
            v.dedup_by(|a, b| a.to_bits() == b.to_bits());
        }
        ValuePool { values }
    }

    pub fn from_values(values: Vec<Vec<f64>>) -> Self {
        ValuePool { values }
    }

    pub fn values(&self, attribute: usize) -> &[f64] {
        self.values.get(attribute).map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Draws a test: uniform predictor, then a uniform pool value (numeric) or
/// declared category (nominal).
pub fn random_test<R: RngCore + ?Sized>(schema: &Schema, pool: &ValuePool, rng: &mut R) -> Result<NodeTest, TreeError> {
    let n = schema.num_predictors();
    if n == 0 {
        return Err(TreeError::NoPredictors);
    }
    let attribute = schema.predictors().nth(rng::index(rng, n)).expect("index below predictor count");
    match &schema.attributes()[attribute].kind {
        AttributeKind::Numeric => {
            let values = pool.values(attribute);
            if values.is_empty() {
                return Err(TreeError::EmptyValuePool { attribute });
            }
            Ok(NodeTest::LessEq { attribute, threshold: values[rng::index(rng, values.len())] })
        }
        AttributeKind::Nominal(cats) => Ok(NodeTest::Equals { attribute, category: rng::index(rng, cats.len()) }),
    }
}

/// Uniform class label.
pub fn random_label<R: RngCore + ?Sized>(schema: &Schema, rng: &mut R) -> usize {
    rng::index(rng, schema.num_classes())
}

/// A minimal tree: one random test over two random leaves.
pub fn random_tree<R: RngCore + ?Sized>(
    schema: &Schema,
    pool: &ValuePool,
    rng: &mut R,
) -> Result<DecisionTree, TreeError> {
    let test = random_test(schema, pool, rng)?;
    let yes = random_label(schema, rng);
    let no = random_label(schema, rng);
    Ok(DecisionTree::from_parts(Node::internal(test, Node::Leaf(yes), Node::Leaf(no)), schema.fingerprint()))
}
