//! Library calls rendered to the exact bytes both front ends emit.
//!
//! The CLI's structured output and the HTTP bodies come from these functions, so
//! the two can be compared byte for byte.

use std::collections::BTreeMap;

use glyph_mcda::criteria::kop::KnowledgeBase;
use glyph_mcda::criteria::{derive, DeriveContext};
use glyph_mcda::invariance::{colorimetry_sheet, geometry_sheet, DegradationSheet, GlyphImage, ViewingGeometry};
use glyph_mcda::io::Workspace;
use glyph_mcda::report::{render_ranking_json, render_report_json, to_json};
use glyph_mcda::{
    compare_designs, merge_sheets, weighted_average, AssessmentReport, ChannelKind, CriterionId, Error, LevelScore,
    MergePolicy, Ranking, Result, ScoreSheet,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

/// How the sheets of one design become a report.
#[derive(Debug, Clone, PartialEq, Eq, Default, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case", deny_unknown_fields)]
pub enum AggregatePolicy {
    /// The only sheet if there is one, otherwise the mean.
    #[default]
    Auto,
    Single {
        assessor: String,
    },
    Mean,
    Consensus {
        scores: BTreeMap<CriterionId, LevelScore>,
        #[serde(default)]
        note: String,
    },
}

/// The sheet a report is computed from.
pub fn resolve_sheet(ws: &Workspace, design: &str, policy: &AggregatePolicy) -> Result<ScoreSheet> {
    ws.get_design(design)?;
    let merge = match policy {
        AggregatePolicy::Single { assessor } => return ws.get_sheet(design, assessor).map(|(s, _)| s),
        AggregatePolicy::Auto | AggregatePolicy::Mean => MergePolicy::Mean,
        AggregatePolicy::Consensus { scores, note } => MergePolicy::Consensus {
            scores: scores.clone(),
            note: note.clone(),
        },
    };
    let sheets = ws.sheets(design)?;
    if sheets.is_empty() {
        return Err(Error::NotFound(format!("score sheets for design `{design}`")));
    }
    merge_sheets(&sheets, &merge)
}

pub fn aggregate(ws: &Workspace, design: &str, policy: &AggregatePolicy) -> Result<AssessmentReport> {
    weighted_average(&resolve_sheet(ws, design, policy)?)
}

pub fn aggregate_json(ws: &Workspace, design: &str, policy: &AggregatePolicy) -> Result<String> {
    aggregate(ws, design, policy).map(|r| render_report_json(&r))
}

/// Ranks designs, each aggregated under [`AggregatePolicy::Auto`].
pub fn compare(ws: &Workspace, ids: &[String]) -> Result<(Ranking, Vec<AssessmentReport>)> {
    let reports = ids
        .iter()
        .map(|id| aggregate(ws, id, &AggregatePolicy::Auto))
        .collect::<Result<Vec<_>>>()?;
    let ranking = compare_designs(&reports)?;
    Ok((ranking, reports))
}

pub fn compare_json(ws: &Workspace, ids: &[String]) -> Result<String> {
    compare(ws, ids).map(|(ranking, reports)| render_ranking_json(&ranking, &reports))
}

/// Derives one criterion; `design` supplies encodings and group sizes when given.
pub fn derive_json(ws: &Workspace, criterion: CriterionId, design: Option<&str>, inputs: &Value) -> Result<String> {
    let design = design.map(|d| ws.get_design(d).map(|(d, _)| d)).transpose()?;
    let ctx = DeriveContext {
        design: design.as_ref(),
        ..DeriveContext::default()
    };
    derive(criterion, inputs, &ctx).map(|d| to_json(&d))
}

pub fn kop_json(kind: &str) -> Result<String> {
    let kind: ChannelKind = kind
        .parse()
        .map_err(|_| Error::NotFound(format!("channel kind `{kind}`")))?;
    let kb = KnowledgeBase::builtin();
    let ratings = kb.ratings(kind)?;
    Ok(to_json(&json!({
        "channel_kind": kind.as_str(),
        "knowledge_base_version": kb.version,
        "ratings": ratings,
    })))
}

#[derive(Serialize)]
struct SheetBody<'a> {
    manifest: &'a glyph_mcda::invariance::SheetManifest,
    composite_png_base64: String,
}

pub fn sheet_json(sheet: &DegradationSheet) -> String {
    use base64::Engine;
    to_json(&SheetBody {
        manifest: &sheet.manifest,
        composite_png_base64: base64::engine::general_purpose::STANDARD.encode(sheet.composite.to_png()),
    })
}

pub fn geometry_json(png: &[u8], geom: &ViewingGeometry, ppcm: f64) -> Result<String> {
    let image = GlyphImage::from_png(png)?;
    Ok(sheet_json(&geometry_sheet(&image, geom, ppcm)?))
}

pub fn colorimetry_json(png: &[u8]) -> Result<String> {
    let image = GlyphImage::from_png(png)?;
    Ok(sheet_json(&colorimetry_sheet(&image)?))
}

/// `{"error": {"kind", "message", "path"?}}`, one line.
pub fn error_json(err: &Error) -> String {
    let mut body = json!({
        "kind": err.kind().as_str(),
        "message": err.to_string(),
    });
    if let Error::Schema { path, .. } = err {
        body["path"] = Value::String(path.clone());
    }
    json!({ "error": body }).to_string()
}
