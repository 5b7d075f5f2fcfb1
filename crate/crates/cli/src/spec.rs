//! The external spec format: a single JSON document describing a fiber
//! algebra, a base with its chart cover, transition data, and optionally
//! named sections and a representation.
//!
//! Parsing resolves every cross-reference (chart names, point names,
//! operation symbols) and checks structural shape; the bundle laws and
//! theorem-level properties are checked by the commands, not here.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use serde_json::Value;
use thiserror::Error;

use fibra_core::algebra::{FiniteAlgebra, Signature};
use fibra_core::bundle::{BaseSpace, BundleError, TransitionSpec};
use fibra_core::representation::Variance;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("syntax error at line {line}: {message}")]
    SyntaxError { line: usize, message: String },
    #[error("unknown reference `{name}` in {context}")]
    UnknownReference { name: String, context: String },
    #[error("schema violation in `{field}`: {message}")]
    SchemaViolation { field: String, message: String },
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn schema(field: &str, message: impl ToString) -> ParseError {
    ParseError::SchemaViolation {
        field: field.to_string(),
        message: message.to_string(),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    signature: Vec<RawOp>,
    fiber: RawFiber,
    base: RawBase,
    #[serde(default)]
    transitions: Vec<RawTransition>,
    #[serde(default)]
    sections: BTreeMap<String, BTreeMap<String, usize>>,
    #[serde(default)]
    representation: Option<RawRepresentation>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOp {
    name: String,
    arity: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFiber {
    size: usize,
    #[serde(default)]
    tables: BTreeMap<String, Value>,
    #[serde(default)]
    group: Option<RawGroup>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGroup {
    mul: String,
    inv: String,
    unit: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBase {
    points: Vec<String>,
    charts: Vec<RawChart>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChart {
    name: String,
    points: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTransition {
    from: String,
    to: String,
    map: Vec<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRepresentation {
    variance: String,
    #[serde(default)]
    group_spec: Option<Value>,
    action: BTreeMap<String, BTreeMap<String, Vec<usize>>>,
}

/// A structurally validated spec with every name resolved to indices.
#[derive(Debug, Clone)]
pub struct SpecDocument {
    pub fiber: FiniteAlgebra,
    /// `(mul, inv, unit)` symbols when the fiber is declared a group.
    pub group_symbols: Option<(String, String, String)>,
    pub base: BaseSpace,
    pub transitions: Vec<TransitionSpec>,
    /// Named sections, values per base point in canonical charts.
    pub sections: BTreeMap<String, Vec<usize>>,
    pub representation: Option<SpecRepresentation>,
}

#[derive(Debug, Clone)]
pub struct SpecRepresentation {
    pub variance: Variance,
    /// The fibered group's own spec; `None` means the main document's fiber
    /// and bundle act on themselves.
    pub group: Option<Box<SpecDocument>>,
    /// `[point][group element] -> fiber images`, point order as in the base.
    pub action: Vec<Vec<Vec<usize>>>,
}

pub fn parse_spec_path(path: &Path) -> Result<SpecDocument, ParseError> {
    let text = std::fs::read_to_string(path).map_err(|source| ParseError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_spec(&text, path.parent())
}

pub fn parse_spec(text: &str, base_dir: Option<&Path>) -> Result<SpecDocument, ParseError> {
    let raw: RawSpec = serde_json::from_str(text).map_err(|e| {
        if e.classify() == serde_json::error::Category::Syntax {
            ParseError::SyntaxError {
                line: e.line(),
                message: e.to_string(),
            }
        } else {
            schema("<document>", e)
        }
    })?;
    resolve(raw, base_dir)
}

fn resolve(raw: RawSpec, base_dir: Option<&Path>) -> Result<SpecDocument, ParseError> {
    let signature = Signature::new(
        raw.signature
            .iter()
            .map(|op| (op.name.clone(), op.arity))
            .collect(),
    )
    .map_err(|e| schema("signature", e))?;

    let size = raw.fiber.size;
    let mut tables = Vec::new();
    for (symbol, value) in &raw.fiber.tables {
        let arity = signature.arity(symbol).ok_or_else(|| ParseError::UnknownReference {
            name: symbol.clone(),
            context: "fiber.tables".to_string(),
        })?;
        let field = format!("fiber.tables.{symbol}");
        let mut flat = Vec::new();
        flatten_table(value, arity, size, &field, &mut flat)?;
        tables.push((symbol.clone(), flat));
    }
    let fiber = FiniteAlgebra::new(signature, size, tables)
        .map_err(|e| schema("fiber", e))?;

    let group_symbols = match &raw.fiber.group {
        None => None,
        Some(g) => {
            for (role, symbol, arity) in [
                ("mul", &g.mul, 2usize),
                ("inv", &g.inv, 1),
                ("unit", &g.unit, 0),
            ] {
                match fiber.signature().arity(symbol) {
                    None => {
                        return Err(ParseError::UnknownReference {
                            name: symbol.clone(),
                            context: format!("fiber.group.{role}"),
                        })
                    }
                    Some(a) if a != arity => {
                        return Err(schema(
                            &format!("fiber.group.{role}"),
                            format!("symbol `{symbol}` has arity {a}, expected {arity}"),
                        ))
                    }
                    Some(_) => {}
                }
            }
            Some((g.mul.clone(), g.inv.clone(), g.unit.clone()))
        }
    };

    let base = BaseSpace::new(
        raw.base.points.clone(),
        raw.base
            .charts
            .iter()
            .map(|c| (c.name.clone(), c.points.clone()))
            .collect(),
    )
    .map_err(|e| match e {
        BundleError::UnknownPoint { chart, point } => ParseError::UnknownReference {
            name: point,
            context: format!("base.charts.{chart}"),
        },
        other => schema("base", other),
    })?;

    let mut transitions = Vec::new();
    for t in &raw.transitions {
        let from = base.chart_index(&t.from).ok_or_else(|| ParseError::UnknownReference {
            name: t.from.clone(),
            context: "transitions.from".to_string(),
        })?;
        let to = base.chart_index(&t.to).ok_or_else(|| ParseError::UnknownReference {
            name: t.to.clone(),
            context: "transitions.to".to_string(),
        })?;
        transitions.push(TransitionSpec {
            from,
            to,
            map: t.map.clone(),
        });
    }

    let mut sections = BTreeMap::new();
    for (name, values) in &raw.sections {
        let field = format!("sections.{name}");
        for point in values.keys() {
            if base.point_index(point).is_none() {
                return Err(ParseError::UnknownReference {
                    name: point.clone(),
                    context: field.clone(),
                });
            }
        }
        let mut resolved = Vec::with_capacity(base.points().len());
        for point in base.points() {
            let value = *values.get(point).ok_or_else(|| {
                schema(&field, format!("missing value for point `{point}`"))
            })?;
            if value >= fiber.size() {
                return Err(schema(
                    &field,
                    format!("value {value} for point `{point}` exceeds fiber size {}", fiber.size()),
                ));
            }
            resolved.push(value);
        }
        sections.insert(name.clone(), resolved);
    }

    let representation = match raw.representation {
        None => None,
        Some(rep) => Some(resolve_representation(rep, &base, &fiber, base_dir)?),
    };

    Ok(SpecDocument {
        fiber,
        group_symbols,
        base,
        transitions,
        sections,
        representation,
    })
}

fn resolve_representation(
    raw: RawRepresentation,
    base: &BaseSpace,
    fiber: &FiniteAlgebra,
    base_dir: Option<&Path>,
) -> Result<SpecRepresentation, ParseError> {
    let variance = match raw.variance.as_str() {
        "covariant" => Variance::Covariant,
        "contravariant" => Variance::Contravariant,
        other => {
            return Err(schema(
                "representation.variance",
                format!("expected `covariant` or `contravariant`, got `{other}`"),
            ))
        }
    };

    let group = match raw.group_spec {
        None => None,
        Some(Value::String(path)) => {
            let mut resolved = PathBuf::from(&path);
            if resolved.is_relative() {
                if let Some(dir) = base_dir {
                    resolved = dir.join(resolved);
                }
            }
            Some(Box::new(parse_spec_path(&resolved)?))
        }
        Some(inline @ Value::Object(_)) => {
            let nested: RawSpec = serde_json::from_value(inline)
                .map_err(|e| schema("representation.group_spec", e))?;
            Some(Box::new(resolve(nested, base_dir)?))
        }
        Some(_) => {
            return Err(schema(
                "representation.group_spec",
                "expected a path string or an inline spec object",
            ))
        }
    };
    if let Some(doc) = &group {
        if doc.group_symbols.is_none() {
            return Err(schema(
                "representation.group_spec",
                "the group spec must declare fiber.group",
            ));
        }
    }
    let group_size = group
        .as_ref()
        .map(|doc| doc.fiber.size())
        .unwrap_or(fiber.size());

    let mut action = Vec::with_capacity(base.points().len());
    for key in raw.action.keys() {
        if base.point_index(key).is_none() {
            return Err(ParseError::UnknownReference {
                name: key.clone(),
                context: "representation.action".to_string(),
            });
        }
    }
    for point in base.points() {
        let per_point = raw.action.get(point).ok_or_else(|| {
            schema(
                "representation.action",
                format!("missing action table for point `{point}`"),
            )
        })?;
        let field = format!("representation.action.{point}");
        let mut rows = Vec::with_capacity(group_size);
        for element in 0..group_size {
            let key = element.to_string();
            let row = per_point.get(&key).ok_or_else(|| {
                schema(&field, format!("missing row for group element {element}"))
            })?;
            if row.len() != fiber.size() {
                return Err(schema(
                    &field,
                    format!(
                        "row for element {element} has {} entries, expected {}",
                        row.len(),
                        fiber.size()
                    ),
                ));
            }
            rows.push(row.clone());
        }
        if per_point.len() != group_size {
            return Err(schema(
                &field,
                format!("expected exactly {group_size} rows, got {}", per_point.len()),
            ));
        }
        action.push(rows);
    }

    Ok(SpecRepresentation {
        variance,
        group,
        action,
    })
}

/// Table values are nested arrays, one level per argument, each of length
/// `size`; an arity-0 table is a bare integer (or a one-element array).
fn flatten_table(
    value: &Value,
    arity: usize,
    size: usize,
    field: &str,
    out: &mut Vec<usize>,
) -> Result<(), ParseError> {
    if arity == 0 {
        return match value {
            Value::Number(n) => {
                let v = n
                    .as_u64()
                    .ok_or_else(|| schema(field, "expected a non-negative integer"))?;
                out.push(v as usize);
                Ok(())
            }
            Value::Array(items) if items.len() == 1 => {
                flatten_table(&items[0], 0, size, field, out)
            }
            _ => Err(schema(field, "arity-0 table must be a single integer")),
        };
    }
    match value {
        Value::Array(items) => {
            if items.len() != size {
                return Err(schema(
                    field,
                    format!("expected {size} entries, got {}", items.len()),
                ));
            }
            for item in items {
                flatten_table(item, arity - 1, size, field, out)?;
            }
            Ok(())
        }
        _ => Err(schema(field, "expected a nested array")),
    }
}
