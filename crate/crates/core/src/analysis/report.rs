//! The full analysis report: every metric per treatment, the U tests and
//! per-requirement data tables for plotting.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::accuracy::{accuracy_scores, agreement_buckets, AgreementBuckets, JudgmentRecord};
use super::confidence::{shares, ConfidenceKind, ConfidenceShares};
use super::consistency::{consistency, encode_vectors, label_rows, EncodingMode};
use super::summary::{duration_summary, summarize, GroupSummary};
use super::utest::{mann_whitney_u, UTestConfig, UTestResult};
use super::AnalysisError;
use crate::annotation::{AnnotationRecord, Association, Requirement, Treatment};

const GROUPS: [Treatment; 2] = [Treatment::Ccr, Treatment::Search];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReportOptions {
    pub experts: usize,
    pub encoding: EncodingMode,
    pub utest: UTestConfig,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self { experts: 2, encoding: EncodingMode::OneHot, utest: UTestConfig::default() }
    }
}

/// Group summaries of one metric and the test between them. A group with no
/// values is left out and the test is then omitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub groups: Vec<GroupSummary>,
    pub test: Option<UTestResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceMetric {
    pub shares: BTreeMap<String, ConfidenceShares>,
    pub comparison: Comparison,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RequirementValues {
    pub requirement_id: String,
    pub ccr: Vec<f64>,
    pub search: Vec<f64>,
}

/// Answers per scale point, `counts[0]` being −2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaleCounts {
    pub group: String,
    pub counts: [usize; 5],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tables {
    pub duration_by_requirement: Vec<RequirementValues>,
    pub accuracy_by_requirement: Vec<RequirementValues>,
    pub consistency_by_requirement: Vec<RequirementValues>,
    pub correctness_confidence: Vec<ScaleCounts>,
    pub completeness_confidence: Vec<ScaleCounts>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub participants: BTreeMap<String, usize>,
    pub records: usize,
    pub duration: Comparison,
    /// Absent when no judgments were supplied.
    pub accuracy: Option<Comparison>,
    pub agreement: Option<AgreementBuckets>,
    pub consistency: Comparison,
    pub completeness: ConfidenceMetric,
    pub correctness: ConfidenceMetric,
    pub tables: Tables,
}

/// Builds the report. `requirements` fixes the table order and the number of
/// term positions per requirement for consistency vectors; without it the
/// annotated terms are used.
pub fn build_report(
    records: &[AnnotationRecord],
    judgments: Option<&[JudgmentRecord]>,
    requirements: Option<&[Requirement]>,
    opts: &ReportOptions,
) -> Result<Report, AnalysisError> {
    if records.is_empty() {
        return Err(AnalysisError::EmptyDataset);
    }
    let order = requirement_order(records, requirements);
    let word_counts: BTreeMap<&str, usize> =
        requirements.unwrap_or(&[]).iter().map(|r| (r.id.as_str(), r.word_count())).collect();

    let mut participants: BTreeMap<String, BTreeSet<&str>> = BTreeMap::new();
    for r in records {
        participants.entry(r.treatment.to_string()).or_default().insert(&r.participant);
    }

    let duration = {
        let groups = duration_summary(records).or_else(|_| partial_groups(records, |r| r.duration_seconds))?;
        compare(groups, &opts.utest)?
    };

    let duration_table = per_requirement(&order, |req, t| {
        records.iter().filter(|r| r.requirement_id == req && r.treatment == t).map(|r| r.duration_seconds).collect()
    });

    let (accuracy, agreement, accuracy_table) = match judgments {
        None => (None, None, Vec::new()),
        Some(judgments) => {
            let scores = accuracy_scores(judgments, opts.experts)?;
            let agreement = if opts.experts == 2 { Some(agreement_buckets(judgments)?) } else { None };
            let table = accuracy_table(records, &order, &scores)?;
            (Some(compare_table(&table, &opts.utest)?), agreement, table)
        }
    };

    let mut consistency_table = Vec::new();
    for req in &order {
        let mut row = RequirementValues { requirement_id: req.clone(), ccr: Vec::new(), search: Vec::new() };
        for t in GROUPS {
            let group: Vec<&AnnotationRecord> =
                records.iter().filter(|r| &r.requirement_id == req && r.treatment == t).collect();
            if group.len() < 2 {
                continue;
            }
            let rows = label_rows(&group, word_counts.get(req.as_str()).copied());
            let value =
                if rows[0].1.is_empty() { 1.0 } else { consistency(&encode_vectors(req, &rows, opts.encoding)?)? };
            group_slot(&mut row, t).push(value);
        }
        consistency_table.push(row);
    }
    let consistency = compare_table(&consistency_table, &opts.utest)?;

    let confidence = |kind: ConfidenceKind| -> Result<(ConfidenceMetric, Vec<ScaleCounts>), AnalysisError> {
        let mut shares_by_group = BTreeMap::new();
        let mut counts = Vec::new();
        let mut groups = Vec::new();
        for t in GROUPS {
            let values: Vec<i8> = records.iter().filter(|r| r.treatment == t).map(|r| kind.value(r)).collect();
            if values.is_empty() {
                continue;
            }
            shares_by_group.insert(t.to_string(), shares(&values)?);
            let mut c = [0usize; 5];
            for v in &values {
                c[(v + 2) as usize] += 1;
            }
            counts.push(ScaleCounts { group: t.to_string(), counts: c });
            groups.push(summarize(t.to_string(), values.iter().map(|v| f64::from(*v)).collect())?);
        }
        Ok((ConfidenceMetric { shares: shares_by_group, comparison: compare(groups, &opts.utest)? }, counts))
    };
    let (completeness, completeness_counts) = confidence(ConfidenceKind::Complete)?;
    let (correctness, correctness_counts) = confidence(ConfidenceKind::Correct)?;

    Ok(Report {
        participants: participants.into_iter().map(|(g, set)| (g, set.len())).collect(),
        records: records.len(),
        duration,
        accuracy,
        agreement,
        consistency,
        completeness,
        correctness,
        tables: Tables {
            duration_by_requirement: duration_table,
            accuracy_by_requirement: accuracy_table,
            consistency_by_requirement: consistency_table,
            correctness_confidence: correctness_counts,
            completeness_confidence: completeness_counts,
        },
    })
}

fn requirement_order(records: &[AnnotationRecord], requirements: Option<&[Requirement]>) -> Vec<String> {
    let seen: BTreeSet<&str> = records.iter().map(|r| r.requirement_id.as_str()).collect();
    match requirements {
        Some(reqs) => {
            let listed: BTreeSet<&str> = reqs.iter().map(|r| r.id.as_str()).collect();
            let mut order: Vec<String> =
                reqs.iter().filter(|r| seen.contains(r.id.as_str())).map(|r| r.id.clone()).collect();
            order.extend(seen.iter().filter(|id| !listed.contains(*id)).map(|id| id.to_string()));
            order
        }
        None => seen.into_iter().map(str::to_string).collect(),
    }
}

fn group_slot(row: &mut RequirementValues, t: Treatment) -> &mut Vec<f64> {
    match t {
        Treatment::Ccr => &mut row.ccr,
        Treatment::Search => &mut row.search,
    }
}

fn per_requirement(order: &[String], mut values: impl FnMut(&str, Treatment) -> Vec<f64>) -> Vec<RequirementValues> {
    order
        .iter()
        .map(|req| RequirementValues {
            requirement_id: req.clone(),
            ccr: values(req, Treatment::Ccr),
            search: values(req, Treatment::Search),
        })
        .collect()
}

fn partial_groups(
    records: &[AnnotationRecord],
    value: fn(&AnnotationRecord) -> f64,
) -> Result<Vec<GroupSummary>, AnalysisError> {
    GROUPS
        .into_iter()
        .map(|t| (t, records.iter().filter(|r| r.treatment == t).map(value).collect::<Vec<_>>()))
        .filter(|(_, v)| !v.is_empty())
        .map(|(t, v)| summarize(t.to_string(), v))
        .collect()
}

fn compare(groups: Vec<GroupSummary>, utest: &UTestConfig) -> Result<Comparison, AnalysisError> {
    let test = match groups.as_slice() {
        [a, b] => Some(mann_whitney_u(&a.values, &b.values, utest)?),
        _ => None,
    };
    Ok(Comparison { groups, test })
}

fn compare_table(table: &[RequirementValues], utest: &UTestConfig) -> Result<Comparison, AnalysisError> {
    let mut groups = Vec::new();
    for t in GROUPS {
        let values: Vec<f64> = table
            .iter()
            .flat_map(|row| match t {
                Treatment::Ccr => row.ccr.clone(),
                Treatment::Search => row.search.clone(),
            })
            .collect();
        if !values.is_empty() {
            groups.push(summarize(t.to_string(), values)?);
        }
    }
    compare(groups, utest)
}

/// Whether a participant's association is the judged one. A missing
/// position on either side matches any position.
fn same_association(made: &Association, judged: &Association) -> bool {
    made.stem == judged.stem
        && made.code == judged.code
        && (made.position.is_none() || judged.position.is_none() || made.position == judged.position)
}

/// Per requirement and group: the summed mean expert points of the distinct
/// judged associations the group made.
fn accuracy_table(
    records: &[AnnotationRecord],
    order: &[String],
    scores: &BTreeMap<String, BTreeMap<String, f64>>,
) -> Result<Vec<RequirementValues>, AnalysisError> {
    let mut table = Vec::new();
    for req in order {
        let Some(judged) = scores.get(req) else {
            continue;
        };
        let judged: Vec<(Association, f64)> = judged
            .iter()
            .map(|(key, mean)| {
                key.parse::<Association>()
                    .map(|a| (a, *mean))
                    .map_err(|_| AnalysisError::JudgedAssociation(key.clone()))
            })
            .collect::<Result<_, _>>()?;
        let mut row = RequirementValues { requirement_id: req.clone(), ccr: Vec::new(), search: Vec::new() };
        for t in GROUPS {
            let made: Vec<&Association> = records
                .iter()
                .filter(|r| &r.requirement_id == req && r.treatment == t)
                .flat_map(|r| &r.associations)
                .collect();
            if !records.iter().any(|r| &r.requirement_id == req && r.treatment == t) {
                continue;
            }
            let total: f64 =
                judged.iter().filter(|(j, _)| made.iter().any(|m| same_association(m, j))).map(|(_, mean)| mean).sum();
            group_slot(&mut row, t).push(total);
        }
        table.push(row);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotation::Confidence;

    fn rec(p: &str, t: Treatment, req: &str, dur: f64, conf: i64, assocs: &[&str]) -> AnnotationRecord {
        AnnotationRecord {
            participant: p.into(),
            treatment: t,
            requirement_id: req.into(),
            duration_seconds: dur,
            conf_correct: Confidence::new(conf).unwrap(),
            conf_complete: Confidence::new(-conf).unwrap(),
            associations: assocs.iter().map(|a| a.parse().unwrap()).collect(),
        }
    }

    fn fixture() -> Vec<AnnotationRecord> {
        use Treatment::*;
        vec![
            rec("P1", Ccr, "R1", 50.0, 1, &["bridge@2:A10"]),
            rec("P2", Ccr, "R1", 60.0, 2, &["bridge@2:A10"]),
            rec("P3", Search, "R1", 90.0, 0, &["bridge@2:A40"]),
            rec("P4", Search, "R1", 110.0, -1, &["bridge@2:A10"]),
            rec("P1", Ccr, "R2", 40.0, 1, &[]),
            rec("P2", Ccr, "R2", 70.0, 0, &["road@1:A30"]),
            rec("P3", Search, "R2", 100.0, -2, &["road@1:A30"]),
            rec("P4", Search, "R2", 120.0, 1, &["road@1:A30"]),
        ]
    }

    fn judgments() -> Vec<JudgmentRecord> {
        let j = |e: &str, req: &str, pts: &[(&str, u32)]| JudgmentRecord {
            expert: e.into(),
            requirement_id: req.into(),
            points: pts.iter().map(|(a, p)| (a.to_string(), *p)).collect(),
        };
        vec![
            j("E1", "R1", &[("bridge@2:A10", 8), ("bridge@2:A40", 2)]),
            j("E2", "R1", &[("bridge@2:A10", 9), ("bridge@2:A40", 1)]),
            j("E1", "R2", &[("road@1:A30", 10)]),
            j("E2", "R2", &[("road@1:A30", 10)]),
        ]
    }

    #[test]
    fn two_group_report() {
        let reqs = vec![
            Requirement { id: "R1".into(), text: "A bridge".into() },
            Requirement { id: "R2".into(), text: "Road".into() },
        ];
        let js = judgments();
        let r = build_report(&fixture(), Some(&js), Some(&reqs), &ReportOptions::default()).unwrap();
        assert_eq!(r.participants["ccr"], 2);
        assert_eq!(r.duration.groups[0].median, 55.0);
        assert_eq!(r.duration.groups[1].median, 105.0);
        let t = r.duration.test.as_ref().unwrap();
        assert_eq!((t.u, t.n1, t.n2), (0.0, 4, 4));

        let acc = &r.tables.accuracy_by_requirement;
        assert_eq!(acc[0].ccr, vec![8.5]);
        assert_eq!(acc[0].search, vec![10.0]);
        assert_eq!(acc[1].ccr, vec![10.0]);
        assert_eq!(r.agreement.unwrap().total(), 3);

        let cons = &r.tables.consistency_by_requirement;
        assert!((cons[0].ccr[0] - 1.0).abs() < 1e-12);
        assert!((cons[0].search[0] - 0.5).abs() < 1e-12);
        assert!((cons[1].ccr[0] - 0.0).abs() < 1e-12);

        assert_eq!(r.tables.correctness_confidence[0].counts, [0, 0, 1, 2, 1]);
        assert!((r.correctness.shares["ccr"].high - 0.75).abs() < 1e-12);
        assert!(r.completeness.comparison.test.is_some());
    }

    #[test]
    fn empty_dataset_and_bad_judgments() {
        assert!(matches!(build_report(&[], None, None, &ReportOptions::default()), Err(AnalysisError::EmptyDataset)));
        let mut js = judgments();
        js[0].points.insert("x:Z".into(), 1);
        assert!(matches!(
            build_report(&fixture(), Some(&js), None, &ReportOptions::default()),
            Err(AnalysisError::PointSum { .. })
        ));
    }

    #[test]
    fn single_group_has_no_test() {
        let records: Vec<_> = fixture().into_iter().filter(|r| r.treatment == Treatment::Ccr).collect();
        let r = build_report(&records, None, None, &ReportOptions::default()).unwrap();
        assert_eq!(r.duration.groups.len(), 1);
        assert!(r.duration.test.is_none());
        assert!(r.accuracy.is_none());
    }
}
