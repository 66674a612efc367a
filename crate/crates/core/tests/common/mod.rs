#![allow(dead_code)]

use gatree_core::rng::{self, Stream};
use gatree_core::tree::{random_label, random_test};
use gatree_core::{Attribute, Dataset, DecisionTree, Node, Schema, Value, ValuePool};

/// Schema with `numeric` numeric and `nominal` nominal predictors and a
/// class with `classes` labels, class last.
pub fn schema(numeric: usize, nominal: usize, classes: usize) -> Schema {
    let mut attrs = Vec::new();
    for i in 0..numeric {
        attrs.push(Attribute::numeric(format!("n{i}")));
    }
    for i in 0..nominal {
        attrs.push(Attribute::nominal(format!("k{i}"), (0..3).map(|c| format!("v{c}"))));
    }
    attrs.push(Attribute::nominal("class", (0..classes).map(|c| format!("c{c}"))));
    let idx = attrs.len() - 1;
    Schema::new(attrs, idx).unwrap()
}

/// Rows with numeric values on a coarse grid so thresholds hit exactly.
pub fn dataset(schema: &Schema, rows: usize, rng: &mut Stream) -> Dataset {
    let data = (0..rows)
        .map(|_| {
            schema
                .attributes()
                .iter()
                .map(|a| {
                    if a.is_numeric() {
                        Value::Numeric(rng::index(rng, 20) as f64 / 2.0)
                    } else {
                        Value::Nominal(rng::index(rng, a.categories().len()))
                    }
                })
                .collect()
        })
        .collect();
    Dataset::new("random", schema.clone(), data).unwrap()
}

pub fn random_node(schema: &Schema, pool: &ValuePool, rng: &mut Stream, depth: usize) -> Node {
    if depth == 0 || rng::chance(rng, 0.3) {
        return Node::Leaf(random_label(schema, rng));
    }
    let test = random_test(schema, pool, rng).unwrap();
    let yes = random_node(schema, pool, rng, depth - 1);
    let no = random_node(schema, pool, rng, depth - 1);
    Node::internal(test, yes, no)
}

pub fn random_tree(schema: &Schema, pool: &ValuePool, rng: &mut Stream, depth: usize) -> DecisionTree {
    DecisionTree::new(random_node(schema, pool, rng, depth), schema).unwrap()
}

/// Independent recount: walks the tree by hand for each row.
pub fn recount_accuracy(tree: &DecisionTree, data: &Dataset) -> f64 {
    let mut hits = 0;
    for (i, row) in data.rows().iter().enumerate() {
        let mut node = tree.root();
        let label = loop {
            match node {
                Node::Leaf(l) => break *l,
                Node::Internal { test, yes, no } => {
                    let go_yes = match (test, &row[test.attribute()]) {
                        (gatree_core::NodeTest::LessEq { threshold, .. }, Value::Numeric(x)) => x <= threshold,
                        (gatree_core::NodeTest::Equals { category, .. }, Value::Nominal(c)) => c == category,
                        _ => panic!("unexpected value"),
                    };
                    node = if go_yes { yes } else { no };
                }
            }
        };
        if Some(label) == data.label(i) {
            hits += 1;
        }
    }
    hits as f64 / data.len() as f64
}

/// Same tree shape, ignoring test and label payloads.
pub fn same_shape(a: &Node, b: &Node) -> bool {
    match (a, b) {
        (Node::Leaf(_), Node::Leaf(_)) => true,
        (Node::Internal { yes: ya, no: na, .. }, Node::Internal { yes: yb, no: nb, .. }) => {
            same_shape(ya, yb) && same_shape(na, nb)
        }
        _ => false,
    }
}
