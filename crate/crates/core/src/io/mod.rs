//! Score-sheet and design documents, and the on-disk workspace that holds them.
//!
//! Documents are JSON with unknown fields rejected. Serialisation is canonical:
//! fixed key order, criteria in table order, numbers as decimal strings, two-space
//! indentation and a trailing newline, so equal values give identical bytes.

mod workspace;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use workspace::{Revision, Workspace};

use crate::error::{Error, Result};
use crate::model::{CriterionAssessment, CriterionId, GlyphDesign, Provenance, ScoreSheet, SCHEMA_VERSION};
use crate::rational::Rational;

fn schema(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Schema {
        path: path.into(),
        message: message.into(),
    }
}

fn typed<T: DeserializeOwned>(value: Value, prefix: &str) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let p = e.path().to_string();
        let path = match (prefix.is_empty(), p == ".") {
            (true, _) => p,
            (false, true) => prefix.to_string(),
            (false, false) => format!("{prefix}.{p}"),
        };
        schema(path, e.into_inner().to_string())
    })
}

fn parse_object(text: &str) -> Result<serde_json::Map<String, Value>> {
    match serde_json::from_str::<Value>(text) {
        Ok(Value::Object(m)) => Ok(m),
        Ok(_) => Err(schema(".", "document must be an object")),
        Err(e) => Err(schema(".", e.to_string())),
    }
}

fn check_version(doc: &serde_json::Map<String, Value>) -> Result<()> {
    match doc.get("schema_version") {
        Some(Value::String(v)) if v == SCHEMA_VERSION => Ok(()),
        Some(Value::String(v)) => Err(Error::VersionMismatch(v.clone())),
        Some(other) => Err(Error::VersionMismatch(other.to_string())),
        None => Err(schema("schema_version", "missing field")),
    }
}

pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    crate::report::to_json(value)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SheetDoc {
    schema_version: String,
    design: String,
    assessor: String,
    timestamp: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<Provenance>,
    assessments: Vec<CriterionAssessment>,
}

/// Checks that name the criterion before the typed pass loses that context.
fn precheck_assessments(doc: &serde_json::Map<String, Value>) -> Result<()> {
    let Some(Value::Array(items)) = doc.get("assessments") else {
        return Ok(());
    };
    for item in items {
        let Some(Value::String(c)) = item.get("criterion") else {
            continue;
        };
        let criterion: CriterionId = c.parse()?;
        let mut scores: Vec<&Value> = item.get("direct_score").into_iter().collect();
        if let Some(Value::Array(entries)) = item.get("variable_entries") {
            scores.extend(entries.iter().filter_map(|e| e.get("score")));
        }
        for s in scores {
            let text = match s {
                Value::String(t) => t.clone(),
                Value::Number(n) => n.to_string(),
                _ => continue,
            };
            if let Ok(q) = text.parse::<Rational>() {
                #[allow(clippy::manual_range_contains)]
                if q < 1 || q > 5 {
                    return Err(Error::ScoreOutOfRange {
                        criterion: criterion.as_str().to_string(),
                        value: text,
                    });
                }
            }
        }
        if let Some(inputs) = item.get("inputs") {
            if !inputs.is_object() {
                return Err(schema(
                    format!("assessments.{criterion}.inputs"),
                    "inputs must be an object",
                ));
            }
        }
    }
    Ok(())
}

/// Parses and fully validates a score-sheet document.
pub fn parse_sheet(text: &str) -> Result<ScoreSheet> {
    let doc = parse_object(text)?;
    check_version(&doc)?;
    precheck_assessments(&doc)?;
    let d: SheetDoc = typed(Value::Object(doc), "")?;
    chrono::DateTime::parse_from_rfc3339(&d.timestamp)
        .map_err(|e| schema("timestamp", format!("not an RFC 3339 timestamp: {e}")))?;
    for (field, v) in [("design", &d.design), ("assessor", &d.assessor)] {
        if v.is_empty() {
            return Err(schema(field, "must not be empty"));
        }
    }
    let mut sheet = ScoreSheet::from_assessments(&d.design, &d.assessor, &d.timestamp, d.assessments)?;
    sheet.provenance = d.provenance;
    Ok(sheet)
}

pub fn serialize_sheet(sheet: &ScoreSheet) -> String {
    to_canonical_json(&SheetDoc {
        schema_version: SCHEMA_VERSION.to_string(),
        design: sheet.design_id.clone(),
        assessor: sheet.assessor.clone(),
        timestamp: sheet.timestamp.clone(),
        provenance: sheet.provenance.clone(),
        assessments: sheet.assessments().to_vec(),
    })
}

#[derive(Serialize)]
struct DesignDocOut<'a> {
    schema_version: &'a str,
    #[serde(flatten)]
    design: &'a GlyphDesign,
}

/// Parses a design document. Structural problems are errors; invariant
/// violations are left to [`crate::model::validate_design`].
pub fn parse_design(text: &str) -> Result<GlyphDesign> {
    let mut doc = parse_object(text)?;
    check_version(&doc)?;
    doc.remove("schema_version");
    typed(Value::Object(doc), "")
}

pub fn serialize_design(design: &GlyphDesign) -> String {
    to_canonical_json(&DesignDocOut {
        schema_version: SCHEMA_VERSION,
        design,
    })
}
