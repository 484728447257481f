//! Type A → D averaging, weighted averages, assessor merging and design ranking.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    AssessmentReport, CriterionAssessment, CriterionId, CriterionRow, LevelScore,
    MergeMode, Provenance, ScoreSheet,
};
use crate::rational::Rational;

/// Exact mean of per-variable scores.
pub fn aggregate_type_a(entries: &[LevelScore]) -> Result<Rational> {
    if entries.is_empty() {
        return Err(Error::input("no per-variable scores to average"));
    }
    let sum: Rational = entries.iter().map(|s| s.value()).sum();
    Ok(sum / Rational::from_integer(entries.len() as i64))
}

/// Σ wᵢsᵢ / Σ wᵢ over the non-null criteria of a sheet.
pub fn weighted_average(sheet: &ScoreSheet) -> Result<AssessmentReport> {
    let mut rows = Vec::with_capacity(12);
    let mut total_weight = Rational::ZERO;
    let mut weighted_sum = Rational::ZERO;
    let mut scored = 0;
    for a in sheet.assessments() {
        let score = a.type_d_score();
        if let Some(s) = score {
            scored += 1;
            total_weight = total_weight + a.weight;
            weighted_sum = weighted_sum + a.weight * s;
        }
        rows.push(CriterionRow {
            criterion: a.criterion,
            mode: a.mode,
            weight: a.weight,
            score,
        });
    }
    if scored == 0 {
        return Err(Error::AllNull);
    }
    if total_weight.is_zero() {
        return Err(Error::ZeroTotalWeight);
    }
    let (assessor_set, merge_mode) = match &sheet.provenance {
        Some(p) => (p.assessors.clone(), p.policy),
        None => (vec![sheet.assessor.clone()], MergeMode::Single),
    };
    Ok(AssessmentReport {
        design_id: sheet.design_id.clone(),
        per_criterion: rows,
        total_weight,
        weighted_average: weighted_sum / total_weight,
        assessor_set,
        merge_mode,
        weight_overrides: sheet.weight_overrides(),
    })
}

/// How several assessors' sheets become one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case", deny_unknown_fields)]
pub enum MergePolicy {
    /// Per-criterion arithmetic mean of the Type D scores.
    Mean,
    /// Scores the assessors agreed on after discussion.
    Consensus {
        scores: BTreeMap<CriterionId, LevelScore>,
        #[serde(default)]
        note: String,
    },
}

impl MergePolicy {
    pub fn mode(&self) -> MergeMode {
        match self {
            MergePolicy::Mean => MergeMode::Mean,
            MergePolicy::Consensus { .. } => MergeMode::Consensus,
        }
    }
}

/// Merges sheets of one design into a single sheet of direct Type D scores.
///
/// A single sheet under the mean policy is returned unchanged.
pub fn merge_sheets(sheets: &[ScoreSheet], policy: &MergePolicy) -> Result<ScoreSheet> {
    let first = sheets.first().ok_or(Error::NoSheets)?;
    for s in &sheets[1..] {
        if s.design_id != first.design_id {
            return Err(Error::DesignMismatch(first.design_id.clone(), s.design_id.clone()));
        }
    }
    if sheets.len() == 1 && *policy == MergePolicy::Mean {
        return Ok(first.clone());
    }

    let mut merged = Vec::with_capacity(12);
    for c in CriterionId::ALL {
        let column: Vec<&CriterionAssessment> = sheets.iter().map(|s| s.get(c)).collect();
        let weight = column[0].weight;
        if column.iter().any(|a| a.weight != weight) {
            return Err(Error::WeightMismatch(c));
        }
        let nulls = column.iter().filter(|a| a.is_null()).count();
        if nulls != 0 && nulls != column.len() {
            return Err(Error::MixedNull(c));
        }
        let assessment = if nulls > 0 {
            if let MergePolicy::Consensus { scores, .. } = policy {
                if scores.contains_key(&c) {
                    return Err(Error::InvalidAssessment {
                        criterion: c,
                        reason: "agreed score given for a criterion every assessor left null"
                            .into(),
                    });
                }
            }
            CriterionAssessment::null(c)
        } else {
            let score = match policy {
                MergePolicy::Mean => {
                    let mut sum = Rational::ZERO;
                    for a in &column {
                        sum = sum + a.type_d_score().ok_or(Error::InvalidAssessment {
                            criterion: c,
                            reason: "no resolvable score".into(),
                        })?;
                    }
                    let mean = sum / Rational::from_integer(column.len() as i64);
                    LevelScore::new(mean).expect("mean of scores in [1,5] stays in range")
                }
                MergePolicy::Consensus { scores, .. } => {
                    *scores.get(&c).ok_or(Error::MissingConsensus(c))?
                }
            };
            CriterionAssessment::direct(c, score)
        };
        merged.push(assessment.with_weight(weight));
    }

    let assessors: Vec<String> = sheets.iter().map(|s| s.assessor.clone()).collect();
    let timestamp = sheets.iter().map(|s| s.timestamp.as_str()).max().unwrap_or_default();
    let mut out = ScoreSheet::from_assessments(&first.design_id, &assessors.join("+"), timestamp, merged)?;
    out.provenance = Some(Provenance {
        policy: policy.mode(),
        assessors,
        note: match policy {
            MergePolicy::Mean => String::new(),
            MergePolicy::Consensus { note, .. } => note.clone(),
        },
    });
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankEntry {
    /// 1-based; tied designs still get consecutive positions.
    pub position: usize,
    pub design_id: String,
    pub weighted_average: Rational,
    pub weighted_average_2dp: String,
    pub total_weight: Rational,
    /// Shares its weighted average with another design.
    pub tied: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CriterionComparison {
    pub criterion: CriterionId,
    /// Type D score per design (`None` when null), in ranking order.
    pub scores: Vec<Option<Rational>>,
    /// Score minus the leader's score on this criterion.
    pub delta_from_leader: Vec<Option<Rational>>,
    /// Designs with the highest score on this criterion.
    pub best: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Ranking {
    pub entries: Vec<RankEntry>,
    pub criteria: Vec<CriterionComparison>,
}

impl Ranking {
    pub fn order(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.design_id.as_str()).collect()
    }
}

/// Ranks designs by weighted average, descending; ties go to the smaller design id.
pub fn compare_designs(reports: &[AssessmentReport]) -> Result<Ranking> {
    if reports.len() < 2 {
        return Err(Error::TooFewReports);
    }
    let mut sorted: Vec<&AssessmentReport> = reports.iter().collect();
    sorted.sort_by(|a, b| {
        b.weighted_average
            .cmp(&a.weighted_average)
            .then_with(|| a.design_id.cmp(&b.design_id))
    });
    let entries = sorted
        .iter()
        .enumerate()
        .map(|(i, r)| RankEntry {
            position: i + 1,
            design_id: r.design_id.clone(),
            weighted_average: r.weighted_average,
            weighted_average_2dp: r.weighted_average.to_fixed2(),
            total_weight: r.total_weight,
            tied: sorted
                .iter()
                .filter(|o| o.weighted_average == r.weighted_average)
                .count()
                > 1,
        })
        .collect();
    let criteria = CriterionId::ALL
        .into_iter()
        .map(|c| {
            let scores: Vec<Option<Rational>> = sorted
                .iter()
                .map(|r| r.per_criterion[c.index()].score)
                .collect();
            let lead = scores[0];
            let delta_from_leader = scores
                .iter()
                .map(|s| match (s, lead) {
                    (Some(s), Some(l)) => Some(*s - l),
                    _ => None,
                })
                .collect();
            let top = scores.iter().flatten().max().copied();
            let best = sorted
                .iter()
                .zip(&scores)
                .filter(|(_, s)| s.is_some() && **s == top)
                .map(|(r, _)| r.design_id.clone())
                .collect();
            CriterionComparison {
                criterion: c,
                scores,
                delta_from_leader,
                best,
            }
        })
        .collect();
    Ok(Ranking { entries, criteria })
}
