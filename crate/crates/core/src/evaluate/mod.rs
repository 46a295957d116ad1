//! Evaluation: classification and regression metrics, participant-batched
//! fold plans, and the nested cross-validation driver.

pub mod folds;
pub mod metrics;
pub mod nested;

pub use folds::{make_fold_plan, FoldPlan};
pub use metrics::{
    confusion_metrics, mean_roc, rmse, roc_auc, ClassificationMetrics, ConfusionCounts,
    DECISION_THRESHOLD,
};
pub use nested::{run_nested_cv, CvConfig, CvReport, MetricSummary, RunReport, SummaryReport};
