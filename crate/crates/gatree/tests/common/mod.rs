#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::Path;
use std::process::{Command, Output};

use gatree_core::rng::{self, Stream};
use gatree_core::tree::{random_label, random_test};
use gatree_core::{Attribute, DecisionTree, Node, Schema, Value, ValuePool};

pub fn gatree(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gatree")).current_dir(dir).args(args).output().expect("binary runs")
}

pub fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = gatree(dir, args);
    assert!(out.status.success(), "gatree {args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    out
}

const NAMES: [&str; 8] = ["Clay", "a b", "it's", "x,y", "100%", "é", "q?", "{brace}"];

/// Schema with awkward names: spaces, quotes, commas, non-ASCII.
pub fn awkward_schema(rng: &mut Stream) -> Schema {
    let preds = 1 + rng::index(rng, 4);
    let mut attrs = Vec::new();
    for i in 0..preds {
        let name = format!("{}{i}", NAMES[rng::index(rng, NAMES.len())]);
        if rng::chance(rng, 0.5) {
            attrs.push(Attribute::numeric(name));
        } else {
            let n = 1 + rng::index(rng, 3);
            attrs.push(Attribute::nominal(name, (0..n).map(|c| format!("{} {c}", NAMES[c]))));
        }
    }
    let classes = 1 + rng::index(rng, 4);
    attrs.push(Attribute::nominal("class label", (0..classes).map(|c| format!("{}'{c}", NAMES[7 - c]))));
    let idx = if rng::chance(rng, 0.5) { attrs.len() - 1 } else { 0 };
    if idx == 0 {
        let class = attrs.pop().unwrap();
        attrs.insert(0, class);
    }
    Schema::new(attrs, idx).unwrap()
}

/// Thresholds cover arbitrary finite bit patterns.
pub fn awkward_pool(schema: &Schema, rng: &mut Stream) -> ValuePool {
    let values = schema
        .attributes()
        .iter()
        .map(|a| {
            if !a.is_numeric() {
                return Vec::new();
            }
            (0..5)
                .map(|_| loop {
                    let x = f64::from_bits(rng::index(rng, usize::MAX) as u64);
                    if x.is_finite() {
                        break if rng::chance(rng, 0.5) { x } else { rng::index(rng, 200) as f64 / 8.0 };
                    }
                })
                .collect()
        })
        .collect();
    ValuePool::from_values(values)
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

/// Two nominal predictors, class = a XOR b, 50 rows per cell.
pub fn xor_arff() -> String {
    let mut s =
        String::from("@relation xor\n@attribute a {f,t}\n@attribute b {f,t}\n@attribute class {no,yes}\n@data\n");
    for i in 0..200 {
        let (a, b) = (i % 2 == 1, (i / 2) % 2 == 1);
        let name = |v: bool| if v { "t" } else { "f" };
        s.push_str(&format!("{},{},{}\n", name(a), name(b), if a != b { "yes" } else { "no" }));
    }
    s
}

// ---------------------------------------------------------------------------
// DOT subset grammar:
//   graph  := "digraph" ID "{" stmt* "}"
//   stmt   := ID attrs? ";"? | ID "->" ID attrs? ";"?
//   attrs  := "[" (ID "=" (ID | STRING) ","?)* "]"

#[derive(Debug, Default)]
pub struct DotGraph {
    pub nodes: BTreeMap<String, BTreeMap<String, String>>,
    pub edges: Vec<(String, String, BTreeMap<String, String>)>,
}

#[derive(Debug, PartialEq)]
enum Tok {
    Id(String),
    Str(String),
    Sym(&'static str),
}

fn lex(text: &str) -> Result<Vec<Tok>, String> {
    let mut out = Vec::new();
    let mut it = text.chars().peekable();
    while let Some(&c) = it.peek() {
        if c.is_whitespace() {
            it.next();
        } else if c == '"' {
            it.next();
            let mut s = String::new();
            loop {
                match it.next() {
                    None => return Err("unterminated string".into()),
                    Some('"') => break,
                    Some('\\') => match it.next() {
                        Some('n') => s.push('\n'),
                        Some(e) => s.push(e),
                        None => return Err("dangling escape".into()),
                    },
                    Some(ch) => s.push(ch),
                }
            }
            out.push(Tok::Str(s));
        } else if c.is_alphanumeric() || c == '_' {
            let mut s = String::new();
            while let Some(&ch) = it.peek() {
                if ch.is_alphanumeric() || ch == '_' {
                    s.push(ch);
                    it.next();
                } else {
                    break;
                }
            }
            out.push(Tok::Id(s));
        } else {
            it.next();
            let sym = match c {
                '{' => "{",
                '}' => "}",
                '[' => "[",
                ']' => "]",
                '=' => "=",
                ',' => ",",
                ';' => ";",
                '-' if it.next() == Some('>') => "->",
                _ => return Err(format!("unexpected character {c:?}")),
            };
            out.push(Tok::Sym(sym));
        }
    }
    Ok(out)
}

pub fn parse_dot(text: &str) -> Result<DotGraph, String> {
    let toks = lex(text)?;
    let mut i = 0;
    let id = |i: &mut usize| match toks.get(*i) {
        Some(Tok::Id(s)) => {
            *i += 1;
            Ok(s.clone())
        }
        t => Err(format!("expected identifier, got {t:?}")),
    };
    let sym = |i: &mut usize, s: &str| match toks.get(*i) {
        Some(Tok::Sym(x)) if *x == s => {
            *i += 1;
            Ok(())
        }
        t => Err(format!("expected {s}, got {t:?}")),
    };
    if id(&mut i)? != "digraph" {
        return Err("expected digraph".into());
    }
    id(&mut i)?;
    sym(&mut i, "{")?;
    let mut g = DotGraph::default();
    loop {
        if sym(&mut i, "}").is_ok() {
            break;
        }
        let from = id(&mut i)?;
        let to = if sym(&mut i, "->").is_ok() { Some(id(&mut i)?) } else { None };
        let mut attrs = BTreeMap::new();
        if sym(&mut i, "[").is_ok() {
            while sym(&mut i, "]").is_err() {
                let k = id(&mut i)?;
                sym(&mut i, "=")?;
                let v = match toks.get(i) {
                    Some(Tok::Id(s)) | Some(Tok::Str(s)) => s.clone(),
                    t => return Err(format!("expected value, got {t:?}")),
                };
                i += 1;
                let _ = sym(&mut i, ",");
                attrs.insert(k, v);
            }
        }
        let _ = sym(&mut i, ";");
        match to {
            Some(to) => g.edges.push((from, to, attrs)),
            None => {
                if g.nodes.insert(from.clone(), attrs).is_some() {
                    return Err(format!("node {from} declared twice"));
                }
            }
        }
    }
    if i != toks.len() {
        return Err("trailing tokens".into());
    }
    Ok(g)
}

/// Checks that the graph is a binary tree with `size` nodes whose internal
/// nodes carry one `yes` and one `no` edge and whose leaves are boxes.
pub fn check_tree_graph(g: &DotGraph, size: usize) -> Result<(), String> {
    if g.nodes.len() != size || g.edges.len() + 1 != size {
        return Err(format!("{} nodes, {} edges, want size {size}", g.nodes.len(), g.edges.len()));
    }
    let mut indegree: BTreeMap<&str, usize> = g.nodes.keys().map(|k| (k.as_str(), 0)).collect();
    let mut out: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (from, to, attrs) in &g.edges {
        *indegree.get_mut(to.as_str()).ok_or("edge to undeclared node")? += 1;
        if !g.nodes.contains_key(from) {
            return Err("edge from undeclared node".into());
        }
        out.entry(from).or_default().push(attrs.get("label").map(String::as_str).unwrap_or(""));
    }
    if indegree.values().filter(|&&d| d == 0).count() != 1 || indegree.values().any(|&d| d > 1) {
        return Err("not a rooted tree".into());
    }
    for (name, attrs) in &g.nodes {
        match out.get(name.as_str()) {
            Some(labels) => {
                let mut l = labels.clone();
                l.sort();
                if l != ["no", "yes"] || attrs.get("shape").is_some() {
                    return Err(format!("internal node {name} has edges {labels:?}"));
                }
            }
            None if attrs.get("shape").map(String::as_str) != Some("box") => {
                return Err(format!("leaf {name} is not a box"));
            }
            None => {}
        }
        if !attrs.contains_key("label") {
            return Err(format!("node {name} has no label"));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Rules text: `IF <cond> (AND <cond>)* THEN <label>` or `IF TRUE THEN <label>`.
// A condition is `<name> <op> <value>`; names may be single-quoted.

#[derive(Debug)]
pub enum Cond {
    Le(String, f64),
    Gt(String, f64),
    Eq(String, String),
    Ne(String, String),
}

#[derive(Debug)]
pub struct TextRule {
    pub conds: Vec<Cond>,
    pub label: String,
}

fn words(line: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut it = line.chars().peekable();
    while let Some(&c) = it.peek() {
        if c == ' ' {
            it.next();
        } else if c == '\'' {
            it.next();
            let mut s = String::new();
            while let Some(ch) = it.next() {
                match ch {
                    '\\' => s.push(it.next().unwrap()),
                    '\'' => break,
                    _ => s.push(ch),
                }
            }
            out.push(s);
        } else {
            let mut s = String::new();
            while let Some(&ch) = it.peek() {
                if ch == ' ' {
                    break;
                }
                s.push(ch);
                it.next();
            }
            out.push(s);
        }
    }
    out
}

pub fn parse_rule(line: &str) -> TextRule {
    let w = words(line);
    assert_eq!(w[0], "IF", "{line}");
    let then = w.iter().position(|x| x == "THEN").expect("THEN");
    assert_eq!(then + 2, w.len(), "{line}");
    let mut conds = Vec::new();
    if w[1..then] != ["TRUE"] {
        for c in w[1..then].split(|x| x == "AND") {
            let [name, op, value] = c else { panic!("bad condition in {line}") };
            conds.push(match op.as_str() {
                "<=" => Cond::Le(name.clone(), value.parse().unwrap()),
                ">" => Cond::Gt(name.clone(), value.parse().unwrap()),
                "=" => Cond::Eq(name.clone(), value.clone()),
                "!=" => Cond::Ne(name.clone(), value.clone()),
                _ => panic!("bad operator in {line}"),
            });
        }
    }
    TextRule { conds, label: w[then + 1].clone() }
}

impl TextRule {
    pub fn matches(&self, schema: &Schema, row: &[Value]) -> bool {
        let get = |name: &str| &row[schema.index_of(name).expect("known attribute")];
        let cat = |name: &str, v: &Value| match v {
            Value::Nominal(c) => schema.attributes()[schema.index_of(name).unwrap()].categories()[*c].clone(),
            _ => panic!("not nominal"),
        };
        let num = |v: &Value| match v {
            Value::Numeric(x) => *x,
            _ => panic!("not numeric"),
        };
        self.conds.iter().all(|c| match c {
            Cond::Le(n, t) => num(get(n)) <= *t,
            Cond::Gt(n, t) => num(get(n)) > *t,
            Cond::Eq(n, v) => cat(n, get(n)) == *v,
            Cond::Ne(n, v) => cat(n, get(n)) != *v,
        })
    }
}

/// Rows over `schema`; numeric cells mix a coarse grid with raw bit
/// patterns, predictors go missing with probability `missing`.
pub fn random_dataset(schema: &Schema, rows: usize, missing: f64, rng: &mut Stream) -> gatree_core::Dataset {
    let data = (0..rows)
        .map(|_| {
            schema
                .attributes()
                .iter()
                .enumerate()
                .map(|(i, a)| {
                    if i != schema.class_index() && rng::chance(rng, missing) {
                        Value::Missing
                    } else if a.is_numeric() {
                        let raw = f64::from_bits(rng::index(rng, usize::MAX) as u64);
                        if raw.is_finite() && rng::chance(rng, 0.3) {
                            Value::Numeric(raw)
                        } else {
                            Value::Numeric(rng::index(rng, 40) as f64 / 4.0)
                        }
                    } else {
                        Value::Nominal(rng::index(rng, a.categories().len()))
                    }
                })
                .collect()
        })
        .collect();
    gatree_core::Dataset::new("random data", schema.clone(), data).unwrap()
}

/// Walks the tree by hand for one row.
pub fn walk(node: &Node, row: &[Value]) -> usize {
    match node {
        Node::Leaf(l) => *l,
        Node::Internal { test, yes, no } => {
            let go_yes = match (test, &row[test.attribute()]) {
                (gatree_core::NodeTest::LessEq { threshold, .. }, Value::Numeric(x)) => x <= threshold,
                (gatree_core::NodeTest::Equals { category, .. }, Value::Nominal(c)) => c == category,
                _ => panic!("unexpected value"),
            };
            walk(if go_yes { yes } else { no }, row)
        }
    }
}

pub fn same_shape(a: &Node, b: &Node) -> bool {
    match (a, b) {
        (Node::Leaf(_), Node::Leaf(_)) => true,
        (Node::Internal { yes: ya, no: na, .. }, Node::Internal { yes: yb, no: nb, .. }) => {
            same_shape(ya, yb) && same_shape(na, nb)
        }
        _ => false,
    }
}
