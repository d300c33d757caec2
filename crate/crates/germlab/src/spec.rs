//! Reading and validating algebra and germ specs.

use std::fmt;
use std::path::Path;

use germlab_core::germ::GermMap;
use germlab_core::ito_algebra::ItoAlgebra;
use germlab_core::{Check, Tolerance};
use serde::de::DeserializeOwned;
use serde_json::Value;
use thiserror::Error;

use crate::format::{AlgebraSpec, CanonicalSpec, GermSpec};

/// Where in a spec a problem sits: a field path and optionally an element.
#[derive(Debug, Clone, PartialEq)]
pub struct Location {
    pub field: String,
    pub element: Option<String>,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{}`", self.field)?;
        if let Some(e) = &self.element {
            write!(f, " at element `{e}`")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("schema error in {at}: {reason}")]
    Schema { at: Location, reason: String },
    #[error("invariant violated in {at}: {reason}")]
    Invariant { at: Location, reason: String },
}

impl SpecError {
    pub(crate) fn schema(field: &str, element: Option<&str>, reason: String) -> Self {
        Self::Schema { at: Location { field: field.into(), element: element.map(Into::into) }, reason }
    }

    pub(crate) fn invariant(field: &str, element: Option<&str>, reason: String) -> Self {
        Self::Invariant { at: Location { field: field.into(), element: element.map(Into::into) }, reason }
    }

    /// Short machine-readable kind used in reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Io { .. } => "IoError",
            Self::Parse { .. } => "ParseError",
            Self::Schema { .. } => "SchemaError",
            Self::Invariant { .. } => "InvariantError",
        }
    }
}

/// A validated spec of either sort.
#[derive(Debug, Clone, PartialEq)]
pub enum Spec {
    Algebra(ItoAlgebra),
    Germ(GermMap),
}

fn decode<T: DeserializeOwned>(value: serde_json::Value) -> Result<T, SpecError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        SpecError::schema(if path == "." { "<root>" } else { &path }, None, e.into_inner().to_string())
    })
}

fn parse_json(text: &str) -> Result<serde_json::Value, SpecError> {
    serde_json::from_str(text).map_err(|e| SpecError::Parse { line: e.line(), column: e.column(), message: e.to_string() })
}

fn read(path: &Path) -> Result<String, SpecError> {
    std::fs::read_to_string(path).map_err(|source| SpecError::Io { path: path.display().to_string(), source })
}

fn has_key(v: &serde_json::Value, key: &str) -> bool {
    v.as_object().is_some_and(|o| o.contains_key(key))
}

/// Shape-checked algebra, either by canonical name or by tables, without
/// checking the axioms.
pub fn algebra_from_str_unchecked(text: &str, tol: Tolerance) -> Result<ItoAlgebra, SpecError> {
    algebra_from_value(parse_json(text)?, tol)
}

fn algebra_from_value(v: serde_json::Value, tol: Tolerance) -> Result<ItoAlgebra, SpecError> {
    if has_key(&v, "canonical") {
        decode::<CanonicalSpec>(v)?.to_algebra(tol)
    } else {
        decode::<AlgebraSpec>(v)?.to_algebra(tol)
    }
}

/// Shape-checked germ without the symmetry checks.
pub fn germ_from_str_unchecked(text: &str) -> Result<GermMap, SpecError> {
    decode::<GermSpec>(parse_json(text)?)?.to_germ()
}

fn axiom_field(check: &str) -> &'static str {
    match check {
        "associativity" => "structure",
        "involution" | "anti-multiplicativity" => "involution",
        _ => "functional",
    }
}

fn symmetry_field(check: &str) -> &'static str {
    match check {
        "lam-symmetry" | "D-hermitian" => "lam",
        "lam_out-lam_in-symmetry" => "lam_out/lam_in",
        "lam_dot-symmetry" => "lam_dot",
        _ => "rep",
    }
}

fn describe(c: &Check) -> String {
    format!("`{}` defect {:e} exceeds {:e}", c.name, c.defect, c.threshold)
}

/// Algebra passing every axiom.
pub fn validate_algebra(alg: ItoAlgebra) -> Result<ItoAlgebra, SpecError> {
    match alg.verify_axioms().first_failure() {
        Some(c) => Err(SpecError::invariant(axiom_field(c.name), None, describe(c))),
        None => Ok(alg),
    }
}

/// Label of element `x`, marked when it is the unit.
pub fn element_label(g: &GermMap, x: usize) -> String {
    let sg = g.semigroup();
    if x == sg.unit() {
        format!("{} (unit)", sg.labels()[x])
    } else {
        sg.labels()[x].clone()
    }
}

/// Germ passing the representation and ♭-symmetry checks.
pub fn validate_germ(g: GermMap, tol: Tolerance) -> Result<GermMap, SpecError> {
    let checks = g.check_symmetry(tol).map_err(|e| SpecError::schema("germ", None, e.to_string()))?;
    match checks.iter().find(|c| !c.pass) {
        Some(c) => {
            let element = c.at.map(|(x, _)| element_label(&g, x));
            Err(SpecError::invariant(symmetry_field(c.name), element.as_deref(), describe(c)))
        }
        None => Ok(g),
    }
}

/// Parses and validates a spec held in memory; a top-level `semigroup` key
/// marks a germ.
pub fn parse_spec_str(text: &str, tol: Tolerance) -> Result<Spec, SpecError> {
    let v = parse_json(text)?;
    if has_key(&v, "semigroup") {
        let g = decode::<GermSpec>(v)?.to_germ()?;
        validate_germ(g, tol).map(Spec::Germ)
    } else {
        algebra_from_value(v, tol).and_then(validate_algebra).map(Spec::Algebra)
    }
}

pub fn parse_spec(path: &Path, tol: Tolerance) -> Result<Spec, SpecError> {
    parse_spec_str(&read(path)?, tol)
}

pub fn read_algebra(path: &Path, tol: Tolerance) -> Result<ItoAlgebra, SpecError> {
    algebra_from_str_unchecked(&read(path)?, tol)
}

pub fn read_germ(path: &Path) -> Result<GermMap, SpecError> {
    germ_from_str_unchecked(&read(path)?)
}

pub fn algebra_to_string(alg: &ItoAlgebra) -> String {
    to_pretty(&AlgebraSpec::from_algebra(alg))
}

pub fn germ_to_string(g: &GermMap) -> String {
    to_pretty(&GermSpec::from_germ(g))
}

/// Indented JSON in which short arrays of numbers (complex scalars, matrix
/// rows) stay on one line. Floats use the shortest exact round-trip form.
pub(crate) fn to_pretty<T: serde::Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("wire types always serialize");
    let mut out = String::new();
    write_value(&v, 0, &mut out);
    out.push('\n');
    out
}

const INLINE_WIDTH: usize = 96;

fn inline(v: &Value) -> Option<String> {
    match v {
        Value::Array(items) => {
            let parts: Option<Vec<String>> = items.iter().map(inline).collect();
            let s = format!("[{}]", parts?.join(", "));
            (s.len() <= INLINE_WIDTH).then_some(s)
        }
        Value::Object(_) => None,
        scalar => Some(scalar.to_string()),
    }
}

fn write_value(v: &Value, depth: usize, out: &mut String) {
    if let Some(s) = inline(v) {
        out.push_str(&s);
        return;
    }
    let pad = "  ".repeat(depth + 1);
    let (open, close) = if v.is_array() { ('[', ']') } else { ('{', '}') };
    out.push(open);
    let mut first = true;
    let mut item = |key: Option<&str>, x: &Value, out: &mut String| {
        out.push_str(if first { "\n" } else { ",\n" });
        first = false;
        out.push_str(&pad);
        if let Some(k) = key {
            out.push_str(&Value::from(k).to_string());
            out.push_str(": ");
        }
        write_value(x, depth + 1, out);
    };
    match v {
        Value::Array(items) => items.iter().for_each(|x| item(None, x, out)),
        Value::Object(map) => map.iter().for_each(|(k, x)| item(Some(k), x, out)),
        _ => unreachable!("scalars are inline"),
    }
    if !first {
        out.push('\n');
        out.push_str(&"  ".repeat(depth));
    }
    out.push(close);
}
