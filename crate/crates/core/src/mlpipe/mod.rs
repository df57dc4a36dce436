//! Feature-table analysis: preprocessing, transformations, feature
//! selection, baseline models, cross-validated score curves and plot data.

mod cv;
mod models;
mod preprocess;
mod select;
mod table;
mod transform;
mod viz;

use thiserror::Error;

pub use cv::{cv_folds, cv_score_curve, cv_score_curve_detailed, CurvePoint, CvReport, Selector};
pub use models::{accuracy, lasso, r2, Estimator, FittedModel, DEFAULT_LOGISTIC_L2};
pub use preprocess::{
    correlation_matrix, impute_and_standardize, imputed_matrix, pearson, Standardizer,
};
pub use select::{
    anova_f_scores, anova_f_select, high_correlation_filter, importance_select,
    low_variance_filter, mrmr_rank, rfe_select, ImportanceThreshold, SelectionResult,
    DEFAULT_LASSO_ALPHA,
};
pub use table::{FeatureTable, Target, TargetKind};
pub use transform::{
    factor_analysis, ica, ica_with, pca, FactorAnalysisResult, IcaConfig, IcaResult, PcaResult,
    FA_MAX_ITER, FA_TOL,
};
pub use viz::{
    corr_heatmap, scatter, scatter_matrix, swarm, CorrHeatmap, Histogram, ScatterExport,
    ScatterMatrix, SwarmExport, SwarmPoint, DEFAULT_BINS,
};

#[derive(Debug, Error)]
pub enum MlError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("invalid k = {k}: must be in 1..={max}")]
    InvalidK { k: usize, max: usize },
    #[error("need at least {needed} columns, found {found}")]
    TooFewColumns { needed: usize, found: usize },
    #[error("operation requires a classification target")]
    NotClassification,
    #[error("operation requires a target column")]
    MissingTarget,
    #[error("degenerate classes: {0}")]
    DegenerateClasses(String),
    #[error("no convergence after {iterations} iterations")]
    ConvergenceFailure { iterations: usize },
    #[error("need at least 2 folds and at most one row per fold, got {folds} folds for {rows} rows")]
    InvalidFolds { folds: usize, rows: usize },
    #[error("estimator does not match the target: {0}")]
    EstimatorMismatch(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
