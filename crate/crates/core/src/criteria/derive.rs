//! Criterion-specific input records and the dispatch from raw inputs to a level.
//!
//! Every record is a JSON object with unknown fields rejected, so what the UI
//! posts to the service and what a sheet stores under `inputs` are the same thing.

use std::collections::{BTreeMap, BTreeSet};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::importance::{importance_correlation, importance_correlation_boxes, ImportanceBoxCounts};
use super::kop::{akops_for, suitability, typedness_variable_score, KnowledgeBase, Kop, Suitability};
use super::levels::*;
use super::separability::{
    separability_channel_score, separability_estimate, separability_exact, separability_score,
    Severity,
};
use crate::error::{Error, Result};
use crate::model::{
    AssessmentMode, ChannelKind, CriterionAssessment, CriterionId, DataType, GlyphDesign,
    KopRatings, LevelScore, VariableEntry,
};
use crate::rational::Rational;

/// What the derivation sees besides the inputs.
#[derive(Clone, Copy)]
pub struct DeriveContext<'a> {
    pub design: Option<&'a GlyphDesign>,
    pub knowledge_base: &'a KnowledgeBase,
}

impl Default for DeriveContext<'_> {
    fn default() -> Self {
        DeriveContext {
            design: None,
            knowledge_base: KnowledgeBase::builtin(),
        }
    }
}

/// Result of deriving one criterion from its inputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Derivation {
    pub criterion: CriterionId,
    pub mode: AssessmentMode,
    /// Type D level for direct criteria; `None` for aggregated and null ones.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<u8>,
    /// Score entering the weighted average (the mean for aggregated criteria).
    pub score: Option<Rational>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub variable_entries: Vec<VariableEntry>,
    /// Intermediate quantities (correlation, interference summary, pair counts).
    #[serde(flatten)]
    pub details: Map<String, Value>,
}

impl Derivation {
    fn direct(criterion: CriterionId, level: u8) -> Self {
        Derivation {
            criterion,
            mode: AssessmentMode::Direct,
            level: Some(level),
            score: Some(Rational::from_integer(level as i64)),
            variable_entries: Vec::new(),
            details: Map::new(),
        }
    }

    fn null(criterion: CriterionId) -> Self {
        Derivation {
            criterion,
            mode: AssessmentMode::Null,
            level: None,
            score: None,
            variable_entries: Vec::new(),
            details: Map::new(),
        }
    }

    fn aggregated(criterion: CriterionId, entries: Vec<VariableEntry>) -> Result<Self> {
        let scores: Vec<_> = entries.iter().map(|e| e.score).collect();
        let mean = crate::aggregation::aggregate_type_a(&scores)?;
        Ok(Derivation {
            criterion,
            mode: AssessmentMode::Aggregated,
            level: None,
            score: Some(mean),
            variable_entries: entries,
            details: Map::new(),
        })
    }

    fn with(mut self, key: &str, value: Value) -> Self {
        self.details.insert(key.to_string(), value);
        self
    }

    /// Assessment carrying the derived score, the default weight and the raw inputs.
    pub fn into_assessment(self, inputs: Value) -> CriterionAssessment {
        let mut a = match self.mode {
            AssessmentMode::Null => CriterionAssessment::null(self.criterion),
            AssessmentMode::Direct => CriterionAssessment::direct(
                self.criterion,
                LevelScore::level(self.level.expect("direct derivation has a level")),
            ),
            AssessmentMode::Aggregated => {
                CriterionAssessment::aggregated(self.criterion, self.variable_entries)
            }
        };
        a.inputs = Some(inputs);
        a
    }
}

fn parse<T: DeserializeOwned>(criterion: CriterionId, inputs: &Value) -> Result<T> {
    serde_path_to_error::deserialize(inputs.clone()).map_err(|e| Error::Schema {
        path: format!("inputs.{}", criterion.as_str()) + &path_suffix(e.path()),
        message: e.into_inner().to_string(),
    })
}

fn path_suffix(p: &serde_path_to_error::Path) -> String {
    let s = p.to_string();
    if s == "." {
        String::new()
    } else {
        format!(".{s}")
    }
}

fn entry(variable: &str, level: u8) -> VariableEntry {
    VariableEntry {
        variable: variable.to_string(),
        score: LevelScore::level(level),
        rationale: String::new(),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PerVariable<T> {
    variables: Vec<T>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TypednessVariable {
    variable: String,
    #[serde(default)]
    data_type: Option<DataType>,
    /// Overrides the set implied by the data type (needed for directional data).
    #[serde(default)]
    akops: Option<BTreeSet<Kop>>,
    /// Defaults to the channels the design maps the variable to.
    #[serde(default)]
    channels: Option<Vec<TypednessChannel>>,
    /// Suitability for hedged ratings, per channel id or kind.
    #[serde(default)]
    overrides: BTreeMap<String, BTreeMap<Kop, Suitability>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TypednessChannel {
    #[serde(default)]
    id: Option<String>,
    #[serde(default)]
    kind: Option<ChannelKind>,
    #[serde(default)]
    ratings: Option<KopRatings>,
}

fn derive_typedness(v: &TypednessVariable, ctx: &DeriveContext) -> Result<u8> {
    let design_var = ctx.design.and_then(|d| d.variable(&v.variable));
    let akops = match (&v.akops, v.data_type, design_var) {
        (Some(a), _, _) => a.clone(),
        (None, Some(t), _) => akops_for(t)?,
        (None, None, Some(dv)) => akops_for(dv.data_type)?,
        (None, None, None) => {
            return Err(Error::input(format!(
                "typedness `{}`: give akops or data_type",
                v.variable
            )))
        }
    };
    // (label for overrides, ratings)
    let mut rated: Vec<(String, KopRatings)> = Vec::new();
    match &v.channels {
        Some(list) => {
            for c in list {
                let from_design = c
                    .id
                    .as_deref()
                    .and_then(|id| ctx.design.and_then(|d| d.channel(id)));
                let ratings = match (c.ratings, c.kind, from_design) {
                    (Some(r), _, _) => r,
                    (None, Some(k), _) => ctx.knowledge_base.ratings(k)?,
                    (None, None, Some(ch)) => ctx.knowledge_base.channel_ratings(ch)?,
                    (None, None, None) => {
                        return Err(Error::input(format!(
                            "typedness `{}`: each channel needs ratings, a kind, or a known id",
                            v.variable
                        )))
                    }
                };
                let label = c
                    .id
                    .clone()
                    .or_else(|| c.kind.map(|k| k.as_str().to_string()))
                    .unwrap_or_default();
                rated.push((label, ratings));
            }
        }
        None => {
            let design = ctx.design.ok_or_else(|| {
                Error::input(format!(
                    "typedness `{}`: no channels given and no design to look them up in",
                    v.variable
                ))
            })?;
            for id in design.encoding.get(&v.variable).into_iter().flatten() {
                let ch = design
                    .channel(id)
                    .ok_or_else(|| Error::input(format!("unknown channel `{id}`")))?;
                rated.push((ch.id.clone(), ctx.knowledge_base.channel_ratings(ch)?));
            }
        }
    }
    let per_channel: Vec<BTreeMap<Kop, Suitability>> = rated
        .iter()
        .map(|(label, ratings)| {
            let over = v.overrides.get(label);
            akops
                .iter()
                .map(|&k| (k, suitability(ratings.get(k), over.and_then(|m| m.get(&k).copied()))))
                .collect()
        })
        .collect();
    typedness_variable_score(&per_channel, &akops)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiscernabilityVariable {
    variable: String,
    easy: u64,
    differentiable: u64,
    not_differentiable: u64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct IntuitivenessVariable {
    variable: String,
    dc: DomainConvention,
    am: VisualMetaphor,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InvarianceInputs {
    #[serde(default)]
    invariant_at: Option<BTreeMap<String, bool>>,
    /// Colorimetry only: `grid[sign_pair][magnitude]`, magnitudes 25.5..102.
    #[serde(default)]
    grid: Option<[[bool; 4]; 4]>,
}

fn flags(
    criterion: CriterionId,
    map: &BTreeMap<String, bool>,
    keys: &[Rational; 4],
) -> Result<[bool; 4]> {
    let mut out = [None; 4];
    for (k, &b) in map {
        let q: Rational = k
            .parse()
            .map_err(|_| Error::input(format!("{criterion}: `{k}` is not a number")))?;
        let idx = keys.iter().position(|&x| x == q).ok_or_else(|| {
            Error::input(format!("{criterion}: no observation is taken at `{k}`"))
        })?;
        out[idx] = Some(b);
    }
    let mut res = [false; 4];
    for (i, o) in out.into_iter().enumerate() {
        res[i] = o.ok_or_else(|| {
            Error::input(format!("{criterion}: missing observation at {}", keys[i]))
        })?;
    }
    Ok(res)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SeparabilityInputs {
    /// Per channel, the interference received from each other channel.
    #[serde(default)]
    received: Option<Vec<Vec<Severity>>>,
    /// Per channel, its already-maximised score.
    #[serde(default)]
    channel_scores: Option<Vec<Severity>>,
    #[serde(default)]
    method: SeparabilityMethod,
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
enum SeparabilityMethod {
    #[default]
    Exact,
    Estimate,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComparabilityInputs {
    major: u64,
    medium: u64,
    minor: u64,
    #[serde(default)]
    total_pairs: Option<u64>,
    #[serde(default)]
    group_sizes: Option<Vec<u64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ImportanceInputs {
    #[serde(default)]
    boxes: Option<BoxesInput>,
    #[serde(default)]
    importance: Option<Vec<Rational>>,
    #[serde(default)]
    attention: Option<Vec<Rational>>,
    /// `false` when the variables carry no importance ranking at all.
    #[serde(default)]
    ranked: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum BoxesInput {
    Grid(Vec<Vec<u32>>),
    Named(NamedBoxes),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NamedBoxes {
    #[serde(default)]
    n11: u32,
    #[serde(default)]
    n12: u32,
    #[serde(default)]
    n21: u32,
    #[serde(default)]
    n22: u32,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BalanceInputs {
    #[serde(default)]
    weak_count: Option<u64>,
    #[serde(default)]
    weak_variables: Option<BTreeSet<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SearchabilityInputs {
    high: u64,
    medium: u64,
    low: u64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MemorabilityInputs {
    pct_1h: Rational,
    pct_24h: Rational,
}

fn frac(r: Rational) -> Value {
    Value::String(r.to_string())
}

/// Derives the score of `criterion` from its raw input record.
pub fn derive(criterion: CriterionId, inputs: &Value, ctx: &DeriveContext) -> Result<Derivation> {
    use CriterionId as C;
    match criterion {
        C::Typedness => {
            let p: PerVariable<TypednessVariable> = parse(criterion, inputs)?;
            let entries = p
                .variables
                .iter()
                .map(|v| Ok(entry(&v.variable, derive_typedness(v, ctx)?)))
                .collect::<Result<Vec<_>>>()?;
            Derivation::aggregated(criterion, entries)
        }
        C::Discernability => {
            let p: PerVariable<DiscernabilityVariable> = parse(criterion, inputs)?;
            let entries = p
                .variables
                .iter()
                .map(|v| {
                    let l = discernability_score(v.easy, v.differentiable, v.not_differentiable)?;
                    Ok(entry(&v.variable, l))
                })
                .collect::<Result<Vec<_>>>()?;
            Derivation::aggregated(criterion, entries)
        }
        C::Intuitiveness => {
            let p: PerVariable<IntuitivenessVariable> = parse(criterion, inputs)?;
            let entries = p
                .variables
                .iter()
                .map(|v| entry(&v.variable, intuitiveness_score(IntuitivenessInputs { dc: v.dc, am: v.am })))
                .collect();
            Derivation::aggregated(criterion, entries)
        }
        C::InvarianceGeometry => {
            let p: InvarianceInputs = parse(criterion, inputs)?;
            if p.grid.is_some() {
                return Err(Error::input("invariance_geometry takes invariant_at, not grid"));
            }
            let map = p
                .invariant_at
                .ok_or_else(|| Error::input("invariance_geometry needs invariant_at"))?;
            let scales = GEOMETRY_SCALES.map(|s| s.parse::<Rational>().expect("static scale"));
            let f = flags(criterion, &map, &scales)?;
            Ok(Derivation::direct(criterion, geometry_score(f)?))
        }
        C::InvarianceColorimetry => {
            let p: InvarianceInputs = parse(criterion, inputs)?;
            let f = match (p.invariant_at, p.grid) {
                (Some(map), None) => flags(criterion, &map, &colorimetry_magnitudes())?,
                (None, Some(grid)) => colorimetry_flags_from_grid(grid),
                _ => {
                    return Err(Error::input(
                        "invariance_colorimetry needs exactly one of invariant_at or grid",
                    ))
                }
            };
            Ok(Derivation::direct(criterion, colorimetry_score(f)?))
        }
        C::CompositionSeparability => {
            let p: SeparabilityInputs = parse(criterion, inputs)?;
            let scores = match (p.received, p.channel_scores) {
                (Some(r), None) => r.iter().map(|v| separability_channel_score(v)).collect(),
                (None, Some(s)) => s,
                _ => {
                    return Err(Error::input(
                        "composition_separability needs exactly one of received or channel_scores",
                    ))
                }
            };
            let (max_int, exact_avg) = separability_exact(&scores)?;
            let est = separability_estimate(&scores)?;
            let avg_int = match p.method {
                SeparabilityMethod::Exact => exact_avg,
                SeparabilityMethod::Estimate => est.avg_int,
            };
            let level = separability_score(max_int, avg_int.min(max_int))?;
            Ok(Derivation::direct(criterion, level)
                .with("max_int", frac(max_int))
                .with("avg_int", frac(exact_avg))
                .with("avg_int_estimate", frac(est.avg_int))
                .with("estimate_path", json!(est.path)))
        }
        C::CompositionComparability => {
            let p: ComparabilityInputs = parse(criterion, inputs)?;
            let total = match (p.total_pairs, &p.group_sizes) {
                (Some(t), None) => t,
                (None, Some(g)) => comparability_pair_count(g),
                (None, None) => match ctx.design {
                    Some(d) => comparability_pair_count(&design_group_sizes(d)),
                    None => {
                        return Err(Error::input(
                            "composition_comparability needs total_pairs or group_sizes",
                        ))
                    }
                },
                (Some(_), Some(_)) => {
                    return Err(Error::input("give total_pairs or group_sizes, not both"))
                }
            };
            let d = match comparability_score(p.major, p.medium, p.minor, total)? {
                Some(l) => Derivation::direct(criterion, l),
                None => Derivation::null(criterion),
            };
            Ok(d.with("total_pairs", json!(total)))
        }
        C::AttentionImportance => {
            let p: ImportanceInputs = parse(criterion, inputs)?;
            let corr = match (p.ranked, p.boxes, p.importance, p.attention) {
                (Some(false), None, None, None) => return Ok(Derivation::null(criterion)),
                (None | Some(true), Some(b), None, None) => {
                    let counts = match b {
                        BoxesInput::Grid(g) => ImportanceBoxCounts { counts: g },
                        BoxesInput::Named(n) => {
                            ImportanceBoxCounts::two_by_two(n.n11, n.n12, n.n21, n.n22)
                        }
                    };
                    importance_correlation_boxes(&counts)?
                }
                (None | Some(true), None, Some(i), Some(a)) => importance_correlation(&i, &a)?,
                (None | Some(true), None, None, None) => match ctx.design {
                    Some(d) => return Err(design_ranks_only(d)),
                    None => return Err(Error::input("attention_importance needs boxes or rank vectors")),
                },
                _ => {
                    return Err(Error::input(
                        "attention_importance takes one of: boxes, importance+attention, ranked=false",
                    ))
                }
            };
            let c = corr.value();
            Ok(Derivation::direct(criterion, corr.level()).with("C", json!(c)))
        }
        C::AttentionBalance => {
            let p: BalanceInputs = parse(criterion, inputs)?;
            let weak = match (p.weak_count, p.weak_variables) {
                (Some(n), None) => n,
                (None, Some(v)) => v.len() as u64,
                _ => {
                    return Err(Error::input(
                        "attention_balance needs exactly one of weak_count or weak_variables",
                    ))
                }
            };
            Ok(Derivation::direct(criterion, balance_score(weak)))
        }
        C::Searchability => {
            let p: SearchabilityInputs = parse(criterion, inputs)?;
            Ok(Derivation::direct(criterion, searchability_score(p.high, p.medium, p.low)?))
        }
        C::Learnability => {
            let p: LearnabilityInputs = parse(criterion, inputs)?;
            Ok(Derivation::direct(criterion, learnability_score(p)?))
        }
        C::Memorability => {
            let p: MemorabilityInputs = parse(criterion, inputs)?;
            Ok(Derivation::direct(criterion, memorability_score(p.pct_1h, p.pct_24h)?))
        }
    }
}

/// Sizes of the comparable groups in a design (group 1 means "not compared").
pub fn design_group_sizes(design: &GlyphDesign) -> Vec<u64> {
    let mut groups: BTreeMap<u32, u64> = BTreeMap::new();
    for v in &design.variables {
        if let Some(g) = v.comparability_group.filter(|&g| g > 1) {
            *groups.entry(g).or_default() += 1;
        }
    }
    groups.into_values().collect()
}

/// Design ranks cover importance only; attention must come from the assessor.
fn design_ranks_only(design: &GlyphDesign) -> Error {
    if design.variables.iter().all(|v| v.importance_rank.is_none()) {
        Error::input("design has no importance ranking; send ranked=false for a null criterion")
    } else {
        Error::input("attention_importance needs attention ranks (boxes or importance+attention)")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(c: CriterionId, v: Value) -> Result<Derivation> {
        derive(c, &v, &DeriveContext::default())
    }

    #[test]
    fn importance_named_boxes() {
        let d = run(CriterionId::AttentionImportance, json!({"boxes": {"n11": 2, "n22": 2}})).unwrap();
        assert_eq!(d.level, Some(5));
        assert_eq!(d.details["C"], json!(1.0));
        let d = run(CriterionId::AttentionImportance, json!({"boxes": [[1, 1], [1, 1]]})).unwrap();
        assert_eq!(d.level, Some(1));
        let d = run(CriterionId::AttentionImportance, json!({"ranked": false})).unwrap();
        assert_eq!(d.mode, AssessmentMode::Null);
    }

    #[test]
    fn typedness_from_kinds() {
        let d = run(
            CriterionId::Typedness,
            json!({"variables": [
                {"variable": "a", "data_type": "nominal", "channels": [{"kind": "shape"}]},
                {"variable": "b", "data_type": "ratio", "channels": [{"kind": "brightness"}]}
            ]}),
        )
        .unwrap();
        let levels: Vec<_> = d.variable_entries.iter().map(|e| e.score.as_level()).collect();
        assert_eq!(levels, [Some(4), Some(2)]);
        assert_eq!(d.score, Some(Rational::from_integer(3)));
    }

    #[test]
    fn typedness_override_applies_to_hedged_rating() {
        let d = run(
            CriterionId::Typedness,
            json!({"variables": [{
                "variable": "a", "data_type": "nominal", "channels": [{"kind": "shape"}],
                "overrides": {"shape": {"selective": "appropriate"}}
            }]}),
        )
        .unwrap();
        assert_eq!(d.variable_entries[0].score.as_level(), Some(5));
    }

    #[test]
    fn directional_needs_explicit_akops() {
        let e = run(
            CriterionId::Typedness,
            json!({"variables": [{"variable": "a", "data_type": "directional", "channels": [{"kind": "orientation"}]}]}),
        )
        .unwrap_err();
        assert!(matches!(e, Error::UndefinedAkops));
    }

    #[test]
    fn per_variable_means() {
        let d = run(
            CriterionId::Discernability,
            json!({"variables": [
                {"variable": "a", "easy": 10, "differentiable": 0, "not_differentiable": 0},
                {"variable": "b", "easy": 7, "differentiable": 3, "not_differentiable": 0}
            ]}),
        )
        .unwrap();
        assert_eq!(d.score, Some(Rational::from_integer(4)));
        let d = run(
            CriterionId::Intuitiveness,
            json!({"variables": [{"variable": "a", "dc": "noDC", "am": "apAM"}]}),
        )
        .unwrap();
        assert_eq!(d.score, Some(Rational::from_integer(5)));
    }

    #[test]
    fn invariance_inputs() {
        let d = run(
            CriterionId::InvarianceGeometry,
            json!({"invariant_at": {"1/5": false, "2/5": true, "3/5": true, "4/5": true}}),
        )
        .unwrap();
        assert_eq!(d.level, Some(4));
        let d = run(
            CriterionId::InvarianceColorimetry,
            json!({"invariant_at": {"25.5": true, "51": true, "76.5": false, "102": false}}),
        )
        .unwrap();
        assert!(d.level.is_some());
        let e = run(
            CriterionId::InvarianceGeometry,
            json!({"invariant_at": {"1/5": true, "2/5": true}}),
        )
        .unwrap_err();
        assert!(e.to_string().contains("missing observation"));
    }

    #[test]
    fn separability_reports_both_routes() {
        let d = run(
            CriterionId::CompositionSeparability,
            json!({"channel_scores": ["major", "major", "medium", "medium", "medium", "medium", "medium", "none", "none", "none"]}),
        )
        .unwrap();
        assert_eq!(d.details["avg_int"], json!("0.25"));
        assert_eq!(d.details["avg_int_estimate"], json!("0.3"));
        assert_eq!(d.level, Some(1));
    }

    #[test]
    fn comparability_with_nothing_to_compare_is_null() {
        let d = run(
            CriterionId::CompositionComparability,
            json!({"major": 0, "medium": 0, "minor": 0, "group_sizes": [1]}),
        )
        .unwrap();
        assert_eq!(d.mode, AssessmentMode::Null);
    }

    #[test]
    fn unknown_fields_are_reported_with_path() {
        let e = run(CriterionId::Searchability, json!({"high": 0, "medium": 1, "low": 3, "x": 1})).unwrap_err();
        match e {
            Error::Schema { path, .. } => assert!(path.starts_with("inputs.searchability")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn into_assessment_keeps_inputs() {
        let inputs = json!({"weak_count": 1});
        let d = run(CriterionId::AttentionBalance, inputs.clone()).unwrap();
        let a = d.into_assessment(inputs.clone());
        assert_eq!(a.direct_score, Some(LevelScore::level(4)));
        assert_eq!(a.inputs, Some(inputs));
    }
}
