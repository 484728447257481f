//! Domain types shared by every other module.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::criteria::kop::{Kop, KopRating};
use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataType {
    Nominal,
    Ordinal,
    Interval,
    Ratio,
    Directional,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataVariable {
    pub id: String,
    pub name: String,
    pub data_type: DataType,
    /// Number of key values (or key value ranges) `k`.
    pub key_value_count: u32,
    /// 1 = most important.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub importance_rank: Option<u32>,
    /// Group 1 is reserved for variables that need no comparison.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comparability_group: Option<u32>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub is_identity_variable: bool,
}

/// Visual channel kinds with a knowledge-base row, plus `Custom`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    Size,
    Orientation,
    Shape,
    Curvature,
    Smoothness,
    Brightness,
    Color,
    Opacity,
    Texture,
    Shading,
    Halos,
    Shadow,
    PhotoEffects,
    ImplicitMotion,
    ExplicitMotion,
    ConnectionEdge,
    Node,
    InsideOutside,
    EnclosureBoundary,
    Distance,
    ClosureOpening,
    Connectivity,
    Partition,
    IntersectionOverlap,
    DepthOrdering,
    HierarchyLevel,
    DensityDistribution,
    Convexity,
    Continuity,
    Genera,
    Similarity,
    Deformation,
    Number,
    Text,
    SymbolIdeogram,
    SignPictogram,
    Isotype,
    Custom,
}

impl ChannelKind {
    pub const ALL: [ChannelKind; 38] = [
        ChannelKind::Size,
        ChannelKind::Orientation,
        ChannelKind::Shape,
        ChannelKind::Curvature,
        ChannelKind::Smoothness,
        ChannelKind::Brightness,
        ChannelKind::Color,
        ChannelKind::Opacity,
        ChannelKind::Texture,
        ChannelKind::Shading,
        ChannelKind::Halos,
        ChannelKind::Shadow,
        ChannelKind::PhotoEffects,
        ChannelKind::ImplicitMotion,
        ChannelKind::ExplicitMotion,
        ChannelKind::ConnectionEdge,
        ChannelKind::Node,
        ChannelKind::InsideOutside,
        ChannelKind::EnclosureBoundary,
        ChannelKind::Distance,
        ChannelKind::ClosureOpening,
        ChannelKind::Connectivity,
        ChannelKind::Partition,
        ChannelKind::IntersectionOverlap,
        ChannelKind::DepthOrdering,
        ChannelKind::HierarchyLevel,
        ChannelKind::DensityDistribution,
        ChannelKind::Convexity,
        ChannelKind::Continuity,
        ChannelKind::Genera,
        ChannelKind::Similarity,
        ChannelKind::Deformation,
        ChannelKind::Number,
        ChannelKind::Text,
        ChannelKind::SymbolIdeogram,
        ChannelKind::SignPictogram,
        ChannelKind::Isotype,
        ChannelKind::Custom,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ChannelKind::Size => "size",
            ChannelKind::Orientation => "orientation",
            ChannelKind::Shape => "shape",
            ChannelKind::Curvature => "curvature",
            ChannelKind::Smoothness => "smoothness",
            ChannelKind::Brightness => "brightness",
            ChannelKind::Color => "color",
            ChannelKind::Opacity => "opacity",
            ChannelKind::Texture => "texture",
            ChannelKind::Shading => "shading",
            ChannelKind::Halos => "halos",
            ChannelKind::Shadow => "shadow",
            ChannelKind::PhotoEffects => "photo_effects",
            ChannelKind::ImplicitMotion => "implicit_motion",
            ChannelKind::ExplicitMotion => "explicit_motion",
            ChannelKind::ConnectionEdge => "connection_edge",
            ChannelKind::Node => "node",
            ChannelKind::InsideOutside => "inside_outside",
            ChannelKind::EnclosureBoundary => "enclosure_boundary",
            ChannelKind::Distance => "distance",
            ChannelKind::ClosureOpening => "closure_opening",
            ChannelKind::Connectivity => "connectivity",
            ChannelKind::Partition => "partition",
            ChannelKind::IntersectionOverlap => "intersection_overlap",
            ChannelKind::DepthOrdering => "depth_ordering",
            ChannelKind::HierarchyLevel => "hierarchy_level",
            ChannelKind::DensityDistribution => "density_distribution",
            ChannelKind::Convexity => "convexity",
            ChannelKind::Continuity => "continuity",
            ChannelKind::Genera => "genera",
            ChannelKind::Similarity => "similarity",
            ChannelKind::Deformation => "deformation",
            ChannelKind::Number => "number",
            ChannelKind::Text => "text",
            ChannelKind::SymbolIdeogram => "symbol_ideogram",
            ChannelKind::SignPictogram => "sign_pictogram",
            ChannelKind::Isotype => "isotype",
            ChannelKind::Custom => "custom",
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ChannelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ChannelKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::input(format!("unknown channel kind `{s}`")))
    }
}

/// Ratings for all four kinds of perception.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KopRatings {
    pub associative: KopRating,
    pub selective: KopRating,
    pub ordered: KopRating,
    pub quantitative: KopRating,
}

impl KopRatings {
    pub fn get(&self, kop: Kop) -> KopRating {
        match kop {
            Kop::Associative => self.associative,
            Kop::Selective => self.selective,
            Kop::Ordered => self.ordered,
            Kop::Quantitative => self.quantitative,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VisualChannel {
    pub id: String,
    pub name: String,
    pub kind: ChannelKind,
    /// Required for `custom`; otherwise overrides the knowledge base.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kop_ratings: Option<KopRatings>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlyphDesign {
    pub id: String,
    pub name: String,
    #[serde(default)]
    pub variables: Vec<DataVariable>,
    #[serde(default)]
    pub channels: Vec<VisualChannel>,
    /// Variable id → channel ids.
    #[serde(default)]
    pub encoding: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image_ref: Option<String>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub notes: String,
}

impl GlyphDesign {
    pub fn variable(&self, id: &str) -> Option<&DataVariable> {
        self.variables.iter().find(|v| v.id == id)
    }

    pub fn channel(&self, id: &str) -> Option<&VisualChannel> {
        self.channels.iter().find(|c| c.id == id)
    }

    pub fn identity_variable(&self) -> Option<&DataVariable> {
        self.variables.iter().find(|v| v.is_identity_variable)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub field: String,
    pub rule: String,
}

impl Violation {
    fn new(field: impl Into<String>, rule: impl Into<String>) -> Self {
        Violation {
            field: field.into(),
            rule: rule.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.rule)
    }
}

/// Checks every design invariant and returns the breaches; an empty list means valid.
pub fn validate_design(design: &GlyphDesign) -> Vec<Violation> {
    let mut out = Vec::new();
    if design.id.trim().is_empty() {
        out.push(Violation::new("id", "must not be empty"));
    }

    let mut seen = BTreeSet::new();
    for v in &design.variables {
        let field = format!("variables.{}", v.id);
        if !seen.insert(v.id.as_str()) {
            out.push(Violation::new(&field, "duplicate variable id"));
        }
        if v.key_value_count < 1 {
            out.push(Violation::new(
                format!("{field}.key_value_count"),
                "must be at least 1",
            ));
        }
        if v.importance_rank == Some(0) {
            out.push(Violation::new(
                format!("{field}.importance_rank"),
                "must be at least 1 when present",
            ));
        }
        if v.comparability_group == Some(0) {
            out.push(Violation::new(
                format!("{field}.comparability_group"),
                "must be at least 1 when present",
            ));
        }
    }
    let identities: Vec<_> = design
        .variables
        .iter()
        .filter(|v| v.is_identity_variable)
        .map(|v| v.id.as_str())
        .collect();
    if identities.len() > 1 {
        out.push(Violation::new(
            "variables",
            format!("at most one identity variable (found {})", identities.join(", ")),
        ));
    }

    let mut channel_ids = BTreeSet::new();
    for c in &design.channels {
        let field = format!("channels.{}", c.id);
        if !channel_ids.insert(c.id.as_str()) {
            out.push(Violation::new(&field, "duplicate channel id"));
        }
        if c.kind == ChannelKind::Custom && c.kop_ratings.is_none() {
            out.push(Violation::new(
                format!("{field}.kop_ratings"),
                "custom channels require explicit KOP ratings",
            ));
        }
    }

    for v in &design.variables {
        match design.encoding.get(&v.id) {
            None => out.push(Violation::new(
                format!("encoding.{}", v.id),
                "variable is not mapped to any channel",
            )),
            Some(chs) if chs.is_empty() => out.push(Violation::new(
                format!("encoding.{}", v.id),
                "variable must map to at least one channel",
            )),
            Some(_) => {}
        }
    }
    for (var, chs) in &design.encoding {
        if design.variable(var).is_none() {
            out.push(Violation::new(
                format!("encoding.{var}"),
                "mapping references an unknown variable",
            ));
        }
        for ch in chs {
            if !channel_ids.contains(ch.as_str()) {
                out.push(Violation::new(
                    format!("encoding.{var}"),
                    format!("unknown channel `{ch}`"),
                ));
            }
        }
    }
    out
}

/// The twelve criteria, in table order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriterionId {
    Typedness,
    Discernability,
    Intuitiveness,
    InvarianceGeometry,
    InvarianceColorimetry,
    CompositionSeparability,
    CompositionComparability,
    AttentionImportance,
    AttentionBalance,
    Searchability,
    Learnability,
    Memorability,
}

impl CriterionId {
    pub const ALL: [CriterionId; 12] = [
        CriterionId::Typedness,
        CriterionId::Discernability,
        CriterionId::Intuitiveness,
        CriterionId::InvarianceGeometry,
        CriterionId::InvarianceColorimetry,
        CriterionId::CompositionSeparability,
        CriterionId::CompositionComparability,
        CriterionId::AttentionImportance,
        CriterionId::AttentionBalance,
        CriterionId::Searchability,
        CriterionId::Learnability,
        CriterionId::Memorability,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CriterionId::Typedness => "typedness",
            CriterionId::Discernability => "discernability",
            CriterionId::Intuitiveness => "intuitiveness",
            CriterionId::InvarianceGeometry => "invariance_geometry",
            CriterionId::InvarianceColorimetry => "invariance_colorimetry",
            CriterionId::CompositionSeparability => "composition_separability",
            CriterionId::CompositionComparability => "composition_comparability",
            CriterionId::AttentionImportance => "attention_importance",
            CriterionId::AttentionBalance => "attention_balance",
            CriterionId::Searchability => "searchability",
            CriterionId::Learnability => "learnability",
            CriterionId::Memorability => "memorability",
        }
    }

    /// Row label used in rendered tables.
    pub fn label(self) -> &'static str {
        match self {
            CriterionId::Typedness => "Typedness",
            CriterionId::Discernability => "Discernability",
            CriterionId::Intuitiveness => "Intuitiveness",
            CriterionId::InvarianceGeometry => "Invariance: Geometry",
            CriterionId::InvarianceColorimetry => "Invariance: Colorimetry",
            CriterionId::CompositionSeparability => "Composition: Separability",
            CriterionId::CompositionComparability => "Composition: Comparability",
            CriterionId::AttentionImportance => "Attention: Importance",
            CriterionId::AttentionBalance => "Attention: Balance",
            CriterionId::Searchability => "Searchability",
            CriterionId::Learnability => "Learnability",
            CriterionId::Memorability => "Memorability",
        }
    }

    /// Recommended Type D weight: 1 for the three per-variable criteria, 0.5 otherwise.
    pub fn default_weight(self) -> Rational {
        match self {
            CriterionId::Typedness | CriterionId::Discernability | CriterionId::Intuitiveness => {
                Rational::ONE
            }
            _ => Rational::new(1, 2),
        }
    }

    /// Criteria normally scored per variable and averaged.
    pub fn is_per_variable(self) -> bool {
        matches!(
            self,
            CriterionId::Typedness | CriterionId::Discernability | CriterionId::Intuitiveness
        )
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for CriterionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CriterionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CriterionId::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::UnknownCriterion(s.to_string()))
    }
}

/// A score on the five-level scale; fractional values arise from averaging.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct LevelScore(Rational);

impl LevelScore {
    #[allow(clippy::manual_range_contains)]
    pub fn new(value: Rational) -> Option<Self> {
        (value >= 1 && value <= 5).then_some(LevelScore(value))
    }

    /// Panics unless `level` is 1..=5.
    pub fn level(level: u8) -> Self {
        assert!((1..=5).contains(&level), "level {level} outside 1..=5");
        LevelScore(Rational::from_integer(i64::from(level)))
    }

    pub fn value(self) -> Rational {
        self.0
    }

    /// The integer level, when this is a raw (non-averaged) score.
    pub fn as_level(self) -> Option<u8> {
        self.0.is_integer().then(|| self.0.numer() as u8)
    }
}

impl<'de> Deserialize<'de> for LevelScore {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let value = Rational::deserialize(d)?;
        LevelScore::new(value)
            .ok_or_else(|| serde::de::Error::custom(format!("score {value} is outside [1, 5]")))
    }
}

impl fmt::Display for LevelScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssessmentMode {
    /// Type A per-variable scores averaged into the Type D score.
    Aggregated,
    /// Type D score entered directly.
    Direct,
    /// Not applicable; excluded from the weighted average.
    Null,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableEntry {
    pub variable: String,
    pub score: LevelScore,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub rationale: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriterionAssessment {
    pub criterion: CriterionId,
    pub mode: AssessmentMode,
    pub weight: Rational,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direct_score: Option<LevelScore>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub variable_entries: Vec<VariableEntry>,
    /// Raw criterion inputs kept for audit and re-derivation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inputs: Option<serde_json::Value>,
}

impl CriterionAssessment {
    pub fn null(criterion: CriterionId) -> Self {
        CriterionAssessment {
            criterion,
            mode: AssessmentMode::Null,
            weight: criterion.default_weight(),
            direct_score: None,
            variable_entries: Vec::new(),
            inputs: None,
        }
    }

    pub fn direct(criterion: CriterionId, score: LevelScore) -> Self {
        CriterionAssessment {
            mode: AssessmentMode::Direct,
            direct_score: Some(score),
            ..CriterionAssessment::null(criterion)
        }
    }

    pub fn aggregated(criterion: CriterionId, entries: Vec<VariableEntry>) -> Self {
        CriterionAssessment {
            mode: AssessmentMode::Aggregated,
            variable_entries: entries,
            ..CriterionAssessment::null(criterion)
        }
    }

    pub fn with_weight(mut self, weight: Rational) -> Self {
        self.weight = weight;
        self
    }

    pub fn is_null(&self) -> bool {
        self.mode == AssessmentMode::Null
    }

    /// The single score that enters the weighted average, or `None` for null criteria.
    pub fn type_d_score(&self) -> Option<Rational> {
        match self.mode {
            AssessmentMode::Null => None,
            AssessmentMode::Direct => self.direct_score.map(LevelScore::value),
            AssessmentMode::Aggregated => {
                let scores: Vec<_> = self.variable_entries.iter().map(|e| e.score).collect();
                crate::aggregation::aggregate_type_a(&scores).ok()
            }
        }
    }

    pub fn check(&self) -> Result<()> {
        let invalid = |reason: &str| Error::InvalidAssessment {
            criterion: self.criterion,
            reason: reason.to_string(),
        };
        if self.weight.is_negative() {
            return Err(invalid("weight must be non-negative"));
        }
        match self.mode {
            AssessmentMode::Null => {
                if self.direct_score.is_some() || !self.variable_entries.is_empty() {
                    return Err(invalid("null mode carries no score"));
                }
            }
            AssessmentMode::Direct => {
                if self.direct_score.is_none() {
                    return Err(invalid("direct mode requires direct_score"));
                }
                if !self.variable_entries.is_empty() {
                    return Err(invalid("direct mode takes no variable_entries"));
                }
            }
            AssessmentMode::Aggregated => {
                if self.variable_entries.is_empty() {
                    return Err(invalid("aggregated mode requires variable_entries"));
                }
                if self.direct_score.is_some() {
                    return Err(invalid("aggregated mode takes no direct_score"));
                }
                let mut seen = BTreeSet::new();
                for e in &self.variable_entries {
                    if !seen.insert(e.variable.as_str()) {
                        return Err(invalid(&format!("variable `{}` scored twice", e.variable)));
                    }
                }
            }
        }
        Ok(())
    }
}

/// How a multi-assessor sheet was produced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub policy: MergeMode,
    pub assessors: Vec<String>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MergeMode {
    Single,
    Mean,
    Consensus,
}

impl MergeMode {
    pub fn as_str(self) -> &'static str {
        match self {
            MergeMode::Single => "single",
            MergeMode::Mean => "mean",
            MergeMode::Consensus => "consensus",
        }
    }
}

/// One assessor's assessment of one design: always twelve entries in criterion order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoreSheet {
    pub design_id: String,
    pub assessor: String,
    pub timestamp: String,
    assessments: Vec<CriterionAssessment>,
    pub provenance: Option<Provenance>,
}

pub const SCHEMA_VERSION: &str = "1";

impl ScoreSheet {
    /// A blank sheet: every criterion null, recommended weights.
    pub fn blank(design_id: &str, assessor: &str, timestamp: &str) -> Self {
        ScoreSheet {
            design_id: design_id.to_string(),
            assessor: assessor.to_string(),
            timestamp: timestamp.to_string(),
            assessments: CriterionId::ALL
                .into_iter()
                .map(CriterionAssessment::null)
                .collect(),
            provenance: None,
        }
    }

    /// Builds a sheet from exactly one assessment per criterion, in any order.
    pub fn from_assessments(
        design_id: &str,
        assessor: &str,
        timestamp: &str,
        assessments: Vec<CriterionAssessment>,
    ) -> Result<Self> {
        let mut slots: Vec<Option<CriterionAssessment>> = vec![None; 12];
        for a in assessments {
            a.check()?;
            let slot = &mut slots[a.criterion.index()];
            if slot.is_some() {
                return Err(Error::DuplicateCriterion(a.criterion));
            }
            *slot = Some(a);
        }
        let assessments = slots
            .into_iter()
            .zip(CriterionId::ALL)
            .map(|(slot, c)| slot.ok_or(Error::MissingCriterion(c)))
            .collect::<Result<Vec<_>>>()?;
        Ok(ScoreSheet {
            design_id: design_id.to_string(),
            assessor: assessor.to_string(),
            timestamp: timestamp.to_string(),
            assessments,
            provenance: None,
        })
    }

    pub fn assessments(&self) -> &[CriterionAssessment] {
        &self.assessments
    }

    pub fn get(&self, criterion: CriterionId) -> &CriterionAssessment {
        &self.assessments[criterion.index()]
    }

    /// Replaces the assessment for its criterion.
    pub fn set(&mut self, assessment: CriterionAssessment) -> Result<()> {
        assessment.check()?;
        let idx = assessment.criterion.index();
        self.assessments[idx] = assessment;
        Ok(())
    }

    /// Criteria whose weight differs from the recommended default.
    pub fn weight_overrides(&self) -> Vec<CriterionId> {
        self.assessments
            .iter()
            .filter(|a| a.weight != a.criterion.default_weight())
            .map(|a| a.criterion)
            .collect()
    }
}

/// One row of a report: weight and Type D score (absent for null criteria).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriterionRow {
    pub criterion: CriterionId,
    pub mode: AssessmentMode,
    pub weight: Rational,
    pub score: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssessmentReport {
    pub design_id: String,
    pub per_criterion: Vec<CriterionRow>,
    pub total_weight: Rational,
    pub weighted_average: Rational,
    pub assessor_set: Vec<String>,
    pub merge_mode: MergeMode,
    pub weight_overrides: Vec<CriterionId>,
}
