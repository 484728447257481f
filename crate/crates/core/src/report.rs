//! Plain-text and structured renderings of reports and rankings.

use serde::Serialize;

use crate::aggregation::Ranking;
use crate::model::{AssessmentMode, AssessmentReport, CriterionId, MergeMode};
use crate::rational::Rational;

const TOTAL_LABEL: &str = "Total Weight & Weighted Average";

/// Aggregated means print at two decimals. Entered scores print short when they
/// are whole or half levels (`5`, `4.5`) and at two decimals otherwise (`4.60`).
pub fn display_score(mode: AssessmentMode, score: Rational) -> String {
    if mode == AssessmentMode::Direct && (score.denom() == 1 || score.denom() == 2) {
        score.to_string()
    } else {
        score.to_fixed2()
    }
}

fn weight_cell(report: &AssessmentReport, c: CriterionId) -> String {
    let w = report.per_criterion[c.index()].weight;
    if report.weight_overrides.contains(&c) {
        format!("{w}*")
    } else {
        w.to_string()
    }
}

/// Criterion rows with a weight/score column pair per report, then the total row.
pub fn render_table(reports: &[AssessmentReport]) -> String {
    let label_w = TOTAL_LABEL.len();
    let line = |label: &str, cells: &[(String, String)]| {
        let mut s = format!("{label:<label_w$}");
        for (w, v) in cells {
            s.push_str(&format!("  {w:>6} {v:>6}"));
        }
        format!("{}\n", s.trim_end())
    };
    let header: Vec<_> = reports
        .iter()
        .map(|r| (String::new(), r.design_id.clone()))
        .collect();
    let columns: Vec<_> = reports
        .iter()
        .map(|_| ("weight".to_string(), "score".to_string()))
        .collect();
    let rule = format!("{}\n", "-".repeat(label_w + reports.len() * 15));

    let mut out = String::new();
    if reports.len() > 1 {
        out.push_str(&line("", &header));
    }
    out.push_str(&line("Criterion", &columns));
    out.push_str(&rule);
    for c in CriterionId::ALL {
        let cells: Vec<_> = reports
            .iter()
            .map(|r| {
                let row = &r.per_criterion[c.index()];
                match row.score {
                    Some(s) => (weight_cell(r, c), display_score(row.mode, s)),
                    None => (String::new(), String::new()),
                }
            })
            .collect();
        out.push_str(&line(c.label(), &cells));
    }
    out.push_str(&rule);
    let totals: Vec<_> = reports
        .iter()
        .map(|r| (r.total_weight.to_string(), r.weighted_average.to_fixed2()))
        .collect();
    out.push_str(&line(TOTAL_LABEL, &totals));
    if reports.iter().any(|r| !r.weight_overrides.is_empty()) {
        out.push_str("* weight differs from the recommended default\n");
    }
    out
}

/// Single-report text: a provenance line followed by the table.
pub fn render_report_text(report: &AssessmentReport) -> String {
    format!(
        "design {}  assessors {}  merge {}\n{}",
        report.design_id,
        report.assessor_set.join(","),
        report.merge_mode.as_str(),
        render_table(std::slice::from_ref(report))
    )
}

/// Ranking lines (first line is the leader), then the side-by-side table.
pub fn render_ranking_text(ranking: &Ranking, reports: &[AssessmentReport]) -> String {
    let mut out = String::new();
    for e in &ranking.entries {
        out.push_str(&format!(
            "{}. {}  {}  (total weight {}){}\n",
            e.position,
            e.design_id,
            e.weighted_average_2dp,
            e.total_weight,
            if e.tied { "  tied" } else { "" }
        ));
    }
    let ordered: Vec<AssessmentReport> = ranking
        .entries
        .iter()
        .filter_map(|e| reports.iter().find(|r| r.design_id == e.design_id).cloned())
        .collect();
    out.push('\n');
    out.push_str(&render_table(&ordered));
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportRowDoc {
    pub criterion: CriterionId,
    pub label: &'static str,
    pub mode: AssessmentMode,
    pub weight: Rational,
    pub weight_override: bool,
    pub score: Option<Rational>,
    pub score_display: Option<String>,
}

/// Structured report: exact values plus the 2-dp strings printed in tables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportDoc {
    pub design_id: String,
    pub assessor_set: Vec<String>,
    pub merge_mode: MergeMode,
    pub total_weight: Rational,
    pub weighted_average: String,
    pub weighted_average_exact: Rational,
    pub weight_overrides: Vec<CriterionId>,
    pub criteria: Vec<ReportRowDoc>,
}

impl From<&AssessmentReport> for ReportDoc {
    fn from(r: &AssessmentReport) -> Self {
        ReportDoc {
            design_id: r.design_id.clone(),
            assessor_set: r.assessor_set.clone(),
            merge_mode: r.merge_mode,
            total_weight: r.total_weight,
            weighted_average: r.weighted_average.to_fixed2(),
            weighted_average_exact: r.weighted_average,
            weight_overrides: r.weight_overrides.clone(),
            criteria: r
                .per_criterion
                .iter()
                .map(|row| ReportRowDoc {
                    criterion: row.criterion,
                    label: row.criterion.label(),
                    mode: row.mode,
                    weight: row.weight,
                    weight_override: r.weight_overrides.contains(&row.criterion),
                    score: row.score,
                    score_display: row.score.map(|s| display_score(row.mode, s)),
                })
                .collect(),
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types always serialize");
    s.push('\n');
    s
}

pub fn render_report_json(report: &AssessmentReport) -> String {
    to_json(&ReportDoc::from(report))
}

#[derive(Serialize)]
struct RankingDoc<'a> {
    ranking: &'a Ranking,
    reports: Vec<ReportDoc>,
}

pub fn render_ranking_json(ranking: &Ranking, reports: &[AssessmentReport]) -> String {
    to_json(&RankingDoc {
        ranking,
        reports: reports.iter().map(ReportDoc::from).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aggregation::weighted_average;
    use crate::model::{CriterionAssessment, LevelScore, ScoreSheet, VariableEntry};

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn sample() -> AssessmentReport {
        let mut sheet = ScoreSheet::blank("designA", "a1", "2024-01-01T00:00:00Z");
        for c in CriterionId::ALL {
            if c != CriterionId::CompositionComparability {
                sheet.set(CriterionAssessment::direct(c, LevelScore::level(5))).unwrap();
            }
        }
        let entries = (0..7)
            .map(|i| VariableEntry {
                variable: format!("v{i}"),
                score: LevelScore::level(if i == 0 { 5 } else { 4 }),
                rationale: String::new(),
            })
            .collect();
        sheet.set(CriterionAssessment::aggregated(CriterionId::Intuitiveness, entries)).unwrap();
        sheet
            .set(CriterionAssessment::direct(CriterionId::Memorability, LevelScore::new(q("4.5")).unwrap()))
            .unwrap();
        weighted_average(&sheet).unwrap()
    }

    #[test]
    fn score_display_rules() {
        assert_eq!(display_score(AssessmentMode::Direct, q("5")), "5");
        assert_eq!(display_score(AssessmentMode::Direct, q("4.5")), "4.5");
        assert_eq!(display_score(AssessmentMode::Direct, q("13/3")), "4.33");
        assert_eq!(display_score(AssessmentMode::Aggregated, q("5")), "5.00");
        assert_eq!(display_score(AssessmentMode::Aggregated, q("29/7")), "4.14");
    }

    #[test]
    fn text_table_layout() {
        let text = render_report_text(&sample());
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "design designA  assessors a1  merge single");
        assert!(lines.iter().any(|l| l.starts_with("Intuitiveness") && l.ends_with("1   4.14")));
        assert!(lines.iter().any(|l| l.starts_with("Memorability") && l.ends_with("0.5    4.5")));
        assert!(lines.iter().any(|l| l.trim_end() == "Composition: Comparability"));
        assert!(lines.last().unwrap().starts_with(TOTAL_LABEL));
        assert!(lines.last().unwrap().ends_with("7   4.84"));
    }

    #[test]
    fn overrides_flagged() {
        let mut r = sample();
        r.weight_overrides = vec![CriterionId::Learnability];
        let text = render_table(&[r]);
        assert!(text.contains("0.5*"));
        assert!(text.ends_with("* weight differs from the recommended default\n"));
    }

    #[test]
    fn structured_carries_both_forms() {
        let v: serde_json::Value = serde_json::from_str(&render_report_json(&sample())).unwrap();
        assert_eq!(v["weighted_average"], "4.84");
        assert_eq!(v["total_weight"], "7");
        assert_eq!(v["criteria"][2]["score"], "29/7");
        assert_eq!(v["criteria"][2]["score_display"], "4.14");
        assert!(v["criteria"][6]["score"].is_null());
    }
}
