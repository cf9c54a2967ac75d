//! Boundary precision/recall, R-value, frame overlap and relative
//! reductions, per utterance and pooled over corpora.

mod boundaries;
mod report;

pub use boundaries::{
    boundary_metrics, frame_overlap, match_boundaries, r_value_from, relative_reduction, BoundaryCounts,
    BoundaryScores, BoundarySet, Level, Matching, WordIds,
};
pub use report::{
    format_table, planted_event_recall, score_alignment, score_parts, severity_report, EvalOptions, MetricsReport,
    SeverityRow, Tally, METRICS,
};
