//! Experiment metrics over exported annotation datasets: duration,
//! expert accuracy, within-group consistency and self-reported confidence,
//! each compared between the two treatments with a Mann-Whitney U test.

mod accuracy;
mod confidence;
mod consistency;
mod report;
mod summary;
mod utest;

use thiserror::Error;

pub use accuracy::{
    accuracy_scores, agreement_buckets, load_judgments, validate_judgments, write_judgments, AgreementBuckets,
    JudgmentRecord, POINTS_PER_REQUIREMENT,
};
pub use confidence::{confidence_distribution, shares, ConfidenceKind, ConfidenceShares};
pub use consistency::{
    consistency, cosine, encode_vectors, label_rows, AssociationVector, EncodingMode, TermKey, NO_OBJECT,
};
pub use report::{
    build_report, Comparison, ConfidenceMetric, Report, ReportOptions, RequirementValues, ScaleCounts, Tables,
};
pub use summary::{duration_summary, durations, median, summarize, GroupSummary};
pub use utest::{binomial_within, mann_whitney_u, midranks, AppliedMethod, UMethod, UTestConfig, UTestResult};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("dataset contains no annotation records")]
    EmptyDataset,
    #[error("group `{0}` has no values")]
    EmptyGroup(String),
    #[error("input contains a non-finite value")]
    NonFinite,
    #[error("exact test for n1={n1}, n2={n2} exceeds the permutation cap {cap}")]
    PermutationSpace { n1: usize, n2: usize, cap: u64 },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("expert `{expert}` distributed {total} points on requirement `{requirement}`, expected 10")]
    PointSum { expert: String, requirement: String, total: u32 },
    #[error("expert `{expert}` judged requirement `{requirement}` twice")]
    DuplicateJudgment { expert: String, requirement: String },
    #[error("requirement `{requirement}` has {found} expert judgments, expected {expected}")]
    ExpertCount { requirement: String, expected: usize, found: usize },
    #[error("experts judged different associations for requirement `{0}`")]
    MismatchedAssociations(String),
    #[error("invalid judged association `{0}`")]
    JudgedAssociation(String),
    #[error(
        "requirement `{requirement}`: participant `{participant}` has {found} term positions, expected {expected}"
    )]
    TermCount { requirement: String, participant: String, expected: usize, found: usize },
    #[error("consistency needs at least 2 vectors, got {0}")]
    TooFewVectors(usize),
    #[error("vectors use different encodings")]
    MixedEncodings,
    #[error("vectors have different dimensions")]
    DimensionMismatch,
    #[error("association vector of participant `{0}` is all zero")]
    ZeroVector(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
