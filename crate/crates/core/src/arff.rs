//! Reader and writer for the dense ARFF subset used by the tool.
//!
//! Supported: `@relation`, `@attribute` with `numeric`/`real` or a `{...}`
//! category list, `@data` with comma separated rows, `%` comment lines, `?`
//! for missing values and single-quoted names (`\'` and `\\` escape inside
//! quotes). Keywords are case-insensitive; blank lines are ignored.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::fmt::Write as _;

use crate::dataset::{Attribute, AttributeKind, Dataset, DatasetError, Schema, Value};

/// Which attribute is the class.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum ClassAttribute {
    #[default]
    Last,
    Index(usize),
    Name(String),
}

#[derive(Clone, Debug, Default)]
pub struct ParseOptions {
    pub class: ClassAttribute,
    /// Accept `?` in the class column (prediction inputs).
    pub allow_unlabeled: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ArffErrorKind {
    Syntax(String),
    UndeclaredNominal { attribute: String, value: String },
    NotNumeric { attribute: String, token: String },
    NoAttributes,
    ClassNotNominal(String),
    UnknownClassAttribute(String),
    RowWidth { expected: usize, found: usize },
    MissingClass,
    Schema(DatasetError),
}

/// Parse failure with a 1-based source position.
#[derive(Clone, Debug, PartialEq)]
pub struct ArffError {
    pub line: usize,
    pub column: usize,
    pub kind: ArffErrorKind,
}

impl fmt::Display for ArffError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: ", self.line, self.column)?;
        match &self.kind {
            ArffErrorKind::Syntax(m) => write!(f, "syntax error: {m}"),
            ArffErrorKind::UndeclaredNominal { attribute, value } => {
                write!(f, "undeclared nominal value \"{value}\" for attribute '{attribute}'")
            }
            ArffErrorKind::NotNumeric { attribute, token } => {
                write!(f, "non-numeric token \"{token}\" in numeric attribute '{attribute}'")
            }
            ArffErrorKind::NoAttributes => write!(f, "no attributes declared"),
            ArffErrorKind::ClassNotNominal(n) => write!(f, "class attribute '{n}' is not nominal"),
            ArffErrorKind::UnknownClassAttribute(n) => write!(f, "no attribute named '{n}' to use as class"),
            ArffErrorKind::RowWidth { expected, found } => {
                write!(f, "row has {found} values, expected {expected}")
            }
            ArffErrorKind::MissingClass => write!(f, "class value is missing"),
            ArffErrorKind::Schema(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for ArffError {}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Word(String),
    Quoted(String),
    Open,
    Close,
    Comma,
}

struct Token {
    tok: Tok,
    column: usize,
}

fn err(line: usize, column: usize, kind: ArffErrorKind) -> ArffError {
    ArffError { line, column, kind }
}

fn syntax(line: usize, column: usize, msg: impl Into<String>) -> ArffError {
    err(line, column, ArffErrorKind::Syntax(msg.into()))
}

fn is_delim(c: char) -> bool {
    c.is_whitespace() || matches!(c, ',' | '{' | '}' | '\'')
}

fn tokenize(line_no: usize, text: &str) -> Result<Vec<Token>, ArffError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let tok = match c {
            '{' => {
                i += 1;
                Tok::Open
            }
            '}' => {
                i += 1;
                Tok::Close
            }
            ',' => {
                i += 1;
                Tok::Comma
            }
            '\'' => {
                i += 1;
                let mut s = String::new();
                loop {
                    match chars.get(i) {
                        None => return Err(syntax(line_no, column, "unterminated quoted name")),
                        Some('\\') => match chars.get(i + 1) {
                            Some(&e @ ('\'' | '\\')) => {
                                s.push(e);
                                i += 2;
                            }
                            _ => return Err(syntax(line_no, i + 1, "invalid escape in quoted name")),
                        },
                        Some('\'') => {
                            i += 1;
                            break;
                        }
                        Some(&ch) => {
                            s.push(ch);
                            i += 1;
                        }
                    }
                }
                Tok::Quoted(s)
            }
            _ => {
                let start = i;
                while i < chars.len() && !is_delim(chars[i]) {
                    i += 1;
                }
                Tok::Word(chars[start..i].iter().collect())
            }
        };
        out.push(Token { tok, column });
    }
    Ok(out)
}

fn name_of(line: usize, t: Option<&Token>, what: &str, end_col: usize) -> Result<String, ArffError> {
    match t {
        Some(Token { tok: Tok::Word(w) | Tok::Quoted(w), .. }) => Ok(w.clone()),
        Some(t) => Err(syntax(line, t.column, format!("expected {what}"))),
        None => Err(syntax(line, end_col, format!("expected {what}"))),
    }
}

fn keyword(t: &Token) -> Option<String> {
    match &t.tok {
        Tok::Word(w) => Some(w.to_ascii_lowercase()),
        _ => None,
    }
}

fn parse_attribute(line: usize, toks: &[Token], end_col: usize) -> Result<Attribute, ArffError> {
    let name = name_of(line, toks.get(1), "attribute name", end_col)?;
    if name.is_empty() {
        return Err(syntax(line, toks[1].column, "empty attribute name"));
    }
    let kind_tok = toks.get(2).ok_or_else(|| syntax(line, end_col, "expected attribute type"))?;
    let (kind, used) = match &kind_tok.tok {
        Tok::Word(w) if w.eq_ignore_ascii_case("numeric") || w.eq_ignore_ascii_case("real") => {
            (AttributeKind::Numeric, 3)
        }
        Tok::Open => {
            let mut cats: Vec<String> = Vec::new();
            let mut i = 3;
            loop {
                let c = name_of(line, toks.get(i), "category name", end_col)?;
                if cats.contains(&c) {
                    return Err(err(
                        line,
                        toks[i].column,
                        ArffErrorKind::Schema(DatasetError::DuplicateCategory { attribute: name, category: c }),
                    ));
                }
                cats.push(c);
                i += 1;
                match toks.get(i).map(|t| &t.tok) {
                    Some(Tok::Comma) => i += 1,
                    Some(Tok::Close) => break,
                    Some(_) => return Err(syntax(line, toks[i].column, "expected ',' or '}'")),
                    None => return Err(syntax(line, end_col, "unterminated category list")),
                }
            }
            (AttributeKind::Nominal(cats), i + 1)
        }
        Tok::Word(w) => return Err(syntax(line, kind_tok.column, format!("unsupported attribute type \"{w}\""))),
        _ => return Err(syntax(line, kind_tok.column, "expected attribute type")),
    };
    if let Some(t) = toks.get(used) {
        return Err(syntax(line, t.column, "unexpected token after attribute declaration"));
    }
    Ok(Attribute { name, kind })
}

fn parse_value(line: usize, t: &Token, attr: &Attribute) -> Result<Value, ArffError> {
    let (text, quoted) = match &t.tok {
        Tok::Word(w) => (w, false),
        Tok::Quoted(w) => (w, true),
        _ => return Err(syntax(line, t.column, "expected value")),
    };
    if !quoted && text == "?" {
        return Ok(Value::Missing);
    }
    match &attr.kind {
        AttributeKind::Numeric => match text.parse::<f64>() {
            Ok(x) if !quoted && x.is_finite() && looks_numeric(text) => Ok(Value::Numeric(x)),
            _ => Err(err(
                line,
                t.column,
                ArffErrorKind::NotNumeric { attribute: attr.name.clone(), token: text.clone() },
            )),
        },
        AttributeKind::Nominal(cats) => match cats.iter().position(|c| c == text) {
            Some(i) => Ok(Value::Nominal(i)),
            None => Err(err(
                line,
                t.column,
                ArffErrorKind::UndeclaredNominal { attribute: attr.name.clone(), value: text.clone() },
            )),
        },
    }
}

// Rejects spellings such as "inf" or "NaN" that `f64::from_str` accepts.
fn looks_numeric(s: &str) -> bool {
    s.bytes().all(|b| b.is_ascii_digit() || matches!(b, b'+' | b'-' | b'.' | b'e' | b'E'))
}

/// Parses ARFF text with the last attribute as class.
pub fn parse_arff(source: &str) -> Result<Dataset, ArffError> {
    parse_arff_with(source, &ParseOptions::default())
}

pub fn parse_arff_with(source: &str, opts: &ParseOptions) -> Result<Dataset, ArffError> {
    let mut relation: Option<String> = None;
    let mut attributes: Vec<Attribute> = Vec::new();
    let mut schema: Option<Schema> = None;
    let mut rows: Vec<Vec<Value>> = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in source.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let trimmed = raw.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let toks = tokenize(line, raw)?;
        if toks.is_empty() {
            continue;
        }
        let end_col = raw.chars().count() + 1;

        if let Some(schema) = &schema {
            rows.push(parse_row(line, &toks, schema, opts.allow_unlabeled, end_col)?);
            continue;
        }

        let kw = keyword(&toks[0]);
        match kw.as_deref() {
            Some("@relation") => {
                if relation.is_some() {
                    return Err(syntax(line, toks[0].column, "duplicate @relation"));
                }
                relation = Some(name_of(line, toks.get(1), "relation name", end_col)?);
                if let Some(t) = toks.get(2) {
                    return Err(syntax(line, t.column, "unexpected token after relation name"));
                }
            }
            Some("@attribute") => {
                if relation.is_none() {
                    return Err(syntax(line, toks[0].column, "@attribute before @relation"));
                }
                let a = parse_attribute(line, &toks, end_col)?;
                if attributes.iter().any(|b| b.name == a.name) {
                    return Err(err(
                        line,
                        toks[1].column,
                        ArffErrorKind::Schema(DatasetError::DuplicateAttribute(a.name)),
                    ));
                }
                attributes.push(a);
            }
            Some("@data") => {
                if relation.is_none() {
                    return Err(syntax(line, toks[0].column, "@data before @relation"));
                }
                if let Some(t) = toks.get(1) {
                    return Err(syntax(line, t.column, "unexpected token after @data"));
                }
                schema = Some(build_schema(line, core::mem::take(&mut attributes), &opts.class)?);
            }
            _ => {
                let what = if relation.is_none() { "@relation" } else { "@attribute or @data" };
                return Err(syntax(line, toks[0].column, format!("expected {what}")));
            }
        }
    }

    let schema = match schema {
        Some(s) => s,
        None => {
            if relation.is_some() && attributes.is_empty() {
                return Err(err(last_line.max(1), 1, ArffErrorKind::NoAttributes));
            }
            return Err(syntax(last_line.max(1), 1, "missing @data section"));
        }
    };
    let relation = relation.unwrap_or_default();
    let built = if opts.allow_unlabeled {
        Dataset::unlabeled(relation, schema, rows)
    } else {
        Dataset::new(relation, schema, rows)
    };
    // Rows were validated while parsing, so this cannot fail.
    built.map_err(|e| err(last_line, 1, ArffErrorKind::Schema(e)))
}

fn build_schema(line: usize, attributes: Vec<Attribute>, class: &ClassAttribute) -> Result<Schema, ArffError> {
    if attributes.is_empty() {
        return Err(err(line, 1, ArffErrorKind::NoAttributes));
    }
    let class_index = match class {
        ClassAttribute::Last => attributes.len() - 1,
        ClassAttribute::Index(i) => *i,
        ClassAttribute::Name(n) => attributes
            .iter()
            .position(|a| &a.name == n)
            .ok_or_else(|| err(line, 1, ArffErrorKind::UnknownClassAttribute(n.clone())))?,
    };
    Schema::new(attributes, class_index).map_err(|e| match e {
        DatasetError::ClassNotNominal(n) => err(line, 1, ArffErrorKind::ClassNotNominal(n)),
        other => err(line, 1, ArffErrorKind::Schema(other)),
    })
}

fn parse_row(
    line: usize,
    toks: &[Token],
    schema: &Schema,
    allow_unlabeled: bool,
    end_col: usize,
) -> Result<Vec<Value>, ArffError> {
    let attrs = schema.attributes();
    let mut row = Vec::with_capacity(attrs.len());
    let mut i = 0;
    loop {
        let t = toks.get(i).ok_or_else(|| syntax(line, end_col, "expected value"))?;
        let attr = attrs.get(row.len()).ok_or_else(|| {
            err(line, t.column, ArffErrorKind::RowWidth { expected: attrs.len(), found: count_values(toks) })
        })?;
        let v = parse_value(line, t, attr)?;
        if row.len() == schema.class_index() && v.is_missing() && !allow_unlabeled {
            return Err(err(line, t.column, ArffErrorKind::MissingClass));
        }
        row.push(v);
        i += 1;
        match toks.get(i) {
            None => break,
            Some(Token { tok: Tok::Comma, .. }) => i += 1,
            Some(t) => return Err(syntax(line, t.column, "expected ','")),
        }
    }
    if row.len() != attrs.len() {
        return Err(err(line, 1, ArffErrorKind::RowWidth { expected: attrs.len(), found: row.len() }));
    }
    Ok(row)
}

fn count_values(toks: &[Token]) -> usize {
    toks.iter().filter(|t| t.tok == Tok::Comma).count() + 1
}

fn needs_quotes(s: &str) -> bool {
    s.is_empty() || s == "?" || s.chars().any(|c| c.is_whitespace() || matches!(c, ',' | '{' | '}' | '\'' | '\\' | '%'))
}

/// Renders a name, single-quoting it when a bare word would not read back.
pub fn quote_name(s: &str) -> String {
    if !needs_quotes(s) {
        return s.to_string();
    }
    let mut out = String::with_capacity(s.len() + 2);
    out.push('\'');
    for c in s.chars() {
        if c == '\'' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('\'');
    out
}

/// Serializes a dataset so that [`parse_arff`] (with the same class
/// attribute) reads back an identical dataset. Numbers use Rust's shortest
/// round-trip formatting.
pub fn write_arff(d: &Dataset) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "@relation {}", quote_name(d.relation()));
    let schema = d.schema();
    for a in schema.attributes() {
        match &a.kind {
            AttributeKind::Numeric => {
                let _ = writeln!(out, "@attribute {} numeric", quote_name(&a.name));
            }
            AttributeKind::Nominal(cats) => {
                let list: Vec<String> = cats.iter().map(|c| quote_name(c)).collect();
                let _ = writeln!(out, "@attribute {} {{{}}}", quote_name(&a.name), list.join(","));
            }
        }
    }
    out.push_str("@data\n");
    for row in d.rows() {
        for (i, (v, a)) in row.iter().zip(schema.attributes()).enumerate() {
            if i > 0 {
                out.push(',');
            }
            match v {
                Value::Missing => out.push('?'),
                Value::Numeric(x) => {
                    let _ = write!(out, "{x}");
                }
                Value::Nominal(c) => out.push_str(&quote_name(&a.categories()[*c])),
            }
        }
        out.push('\n');
    }
    out
}
