//! JSON model files.
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "fingerprint": "9f1c0c2be5a1d3e4",
//!   "schema": [
//!     { "name": "Clay", "type": "numeric" },
//!     { "name": "TextureClass", "type": "nominal", "categories": ["c", "s"] }
//!   ],
//!   "class_index": 1,
//!   "root": {
//!     "test": { "attr": "Clay", "op": "<=", "value": 34.0 },
//!     "true": { "leaf": "c" },
//!     "false": { "leaf": "s" }
//!   }
//! }
//! ```
//!
//! Nominal tests use `"op": "="` with the category name as `value`.
//! Attributes, categories and labels are referenced by name. The fingerprint
//! is recomputed on load and must match.

use serde::{Deserialize, Serialize};

use gatree_core::{Attribute, AttributeKind, DecisionTree, Node, NodeTest, Schema, SchemaFingerprint};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDoc {
    format_version: u32,
    fingerprint: String,
    schema: Vec<AttributeDoc>,
    class_index: usize,
    root: NodeDoc,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AttributeDoc {
    name: String,
    #[serde(rename = "type")]
    kind: KindDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    categories: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "lowercase")]
enum KindDoc {
    Numeric,
    Nominal,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum NodeDoc {
    Leaf {
        leaf: String,
    },
    Internal {
        test: TestDoc,
        #[serde(rename = "true")]
        yes: Box<NodeDoc>,
        #[serde(rename = "false")]
        no: Box<NodeDoc>,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TestDoc {
    attr: String,
    op: String,
    value: serde_json::Value,
}

/// A tree together with the schema it is bound to.
#[derive(Clone, Debug, PartialEq)]
pub struct Model {
    pub schema: Schema,
    pub tree: DecisionTree,
}

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported format_version {0}")]
    Version(u32),
    #[error("{0}")]
    Invalid(String),
    #[error("stored fingerprint {stored} does not match schema fingerprint {computed}")]
    Fingerprint { stored: String, computed: SchemaFingerprint },
}

fn invalid(m: impl Into<String>) -> ModelError {
    ModelError::Invalid(m.into())
}

impl Model {
    pub fn new(schema: Schema, tree: DecisionTree) -> Result<Self, gatree_core::TreeError> {
        tree.validate(&schema)?;
        Ok(Model { schema, tree })
    }

    /// Pretty-printed JSON, newline terminated.
    pub fn to_json(&self) -> String {
        let doc = ModelDoc {
            format_version: FORMAT_VERSION,
            fingerprint: self.schema.fingerprint().to_string(),
            schema: self
                .schema
                .attributes()
                .iter()
                .map(|a| match &a.kind {
                    AttributeKind::Numeric => {
                        AttributeDoc { name: a.name.clone(), kind: KindDoc::Numeric, categories: None }
                    }
                    AttributeKind::Nominal(c) => {
                        AttributeDoc { name: a.name.clone(), kind: KindDoc::Nominal, categories: Some(c.clone()) }
                    }
                })
                .collect(),
            class_index: self.schema.class_index(),
            root: node_doc(self.tree.root(), &self.schema),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("model documents always serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let mut de = serde_json::Deserializer::from_str(text);
        de.disable_recursion_limit();
        let doc = ModelDoc::deserialize(&mut de)?;
        de.end()?;
        if doc.format_version != FORMAT_VERSION {
            return Err(ModelError::Version(doc.format_version));
        }
        let attributes = doc
            .schema
            .into_iter()
            .map(|a| match (a.kind, a.categories) {
                (KindDoc::Numeric, None) => Ok(Attribute::numeric(a.name)),
                (KindDoc::Nominal, Some(c)) => Ok(Attribute::nominal(a.name, c)),
                (KindDoc::Numeric, Some(_)) => Err(invalid(format!("numeric attribute '{}' lists categories", a.name))),
                (KindDoc::Nominal, None) => Err(invalid(format!("nominal attribute '{}' lacks categories", a.name))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let schema = Schema::new(attributes, doc.class_index).map_err(|e| invalid(e.to_string()))?;
        let computed = schema.fingerprint();
        if doc.fingerprint != computed.to_string() {
            return Err(ModelError::Fingerprint { stored: doc.fingerprint, computed });
        }
        let root = node_from_doc(doc.root, &schema)?;
        let tree = DecisionTree::new(root, &schema).map_err(|e| invalid(e.to_string()))?;
        Ok(Model { schema, tree })
    }
}

fn node_doc(node: &Node, schema: &Schema) -> NodeDoc {
    match node {
        Node::Leaf(l) => NodeDoc::Leaf { leaf: schema.class_labels()[*l].clone() },
        Node::Internal { test, yes, no } => {
            let attr = &schema.attributes()[test.attribute()];
            let test = match *test {
                NodeTest::LessEq { threshold, .. } => {
                    TestDoc { attr: attr.name.clone(), op: "<=".into(), value: serde_json::Value::from(threshold) }
                }
                NodeTest::Equals { category, .. } => TestDoc {
                    attr: attr.name.clone(),
                    op: "=".into(),
                    value: serde_json::Value::from(attr.categories()[category].clone()),
                },
            };
            NodeDoc::Internal { test, yes: Box::new(node_doc(yes, schema)), no: Box::new(node_doc(no, schema)) }
        }
    }
}

fn node_from_doc(doc: NodeDoc, schema: &Schema) -> Result<Node, ModelError> {
    match doc {
        NodeDoc::Leaf { leaf } => schema
            .class_attribute()
            .category_index(&leaf)
            .map(Node::Leaf)
            .ok_or_else(|| invalid(format!("unknown class label '{leaf}'"))),
        NodeDoc::Internal { test, yes, no } => {
            let attribute =
                schema.index_of(&test.attr).ok_or_else(|| invalid(format!("unknown attribute '{}'", test.attr)))?;
            let attr = &schema.attributes()[attribute];
            let parsed = match (test.op.as_str(), &test.value) {
                ("<=", serde_json::Value::Number(n)) => NodeTest::LessEq {
                    attribute,
                    threshold: n.as_f64().ok_or_else(|| invalid("threshold is not a finite number"))?,
                },
                ("=", serde_json::Value::String(c)) => NodeTest::Equals {
                    attribute,
                    category: attr
                        .category_index(c)
                        .ok_or_else(|| invalid(format!("unknown category '{c}' for '{}'", attr.name)))?,
                },
                (op, v) => return Err(invalid(format!("unsupported test {op} {v} on '{}'", attr.name))),
            };
            Ok(Node::internal(parsed, node_from_doc(*yes, schema)?, node_from_doc(*no, schema)?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schema() -> Schema {
        Schema::new(
            vec![
                Attribute::numeric("Clay"),
                Attribute::nominal("kind", ["x", "y z"]),
                Attribute::nominal("TextureClass", ["c", "s"]),
            ],
            2,
        )
        .unwrap()
    }

    fn figure_like() -> Model {
        let s = schema();
        let root = Node::internal(
            NodeTest::LessEq { attribute: 0, threshold: 34.0 },
            Node::Leaf(0),
            Node::internal(NodeTest::Equals { attribute: 1, category: 1 }, Node::Leaf(1), Node::Leaf(0)),
        );
        let tree = DecisionTree::new(root, &s).unwrap();
        Model::new(s, tree).unwrap()
    }

    #[test]
    fn round_trips() {
        let m = figure_like();
        let text = m.to_json();
        assert!(text.contains("\"op\": \"<=\""));
        assert!(text.contains("\"value\": 34.0"));
        assert!(text.contains("\"leaf\": \"c\""));
        assert_eq!(Model::from_json(&text).unwrap(), m);
        let leaf = Model::new(schema(), DecisionTree::leaf(1, &schema()).unwrap()).unwrap();
        assert_eq!(Model::from_json(&leaf.to_json()).unwrap(), leaf);
    }

    #[test]
    fn rejects_malformed_documents() {
        let good = figure_like().to_json();
        assert!(matches!(Model::from_json("{"), Err(ModelError::Json(_))));
        assert!(matches!(
            Model::from_json(&good.replace("\"format_version\": 1", "\"format_version\": 7")),
            Err(ModelError::Version(7))
        ));
        assert!(matches!(
            Model::from_json(&good.replace("\"leaf\": \"c\"", "\"leaf\": \"q\"")),
            Err(ModelError::Invalid(_))
        ));
        assert!(matches!(Model::from_json(&good.replace("\"Clay\"", "\"Silt\"")), Err(ModelError::Fingerprint { .. })));
        assert!(Model::from_json(&good.replace("\"<=\"", "\"<\"")).is_err());
        assert!(Model::from_json(&format!("{good} trailing")).is_err());
    }

    #[test]
    fn deep_trees_load() {
        let s = schema();
        let mut node = Node::Leaf(0);
        for i in 0..400 {
            node = Node::internal(NodeTest::LessEq { attribute: 0, threshold: i as f64 }, node, Node::Leaf(1));
        }
        let m = Model::new(s.clone(), DecisionTree::new(node, &s).unwrap()).unwrap();
        assert_eq!(Model::from_json(&m.to_json()).unwrap(), m);
    }
}
