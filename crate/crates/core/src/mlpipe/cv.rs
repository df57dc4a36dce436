use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::preprocess::Standardizer;
use super::select::{anova_f_select, importances, mrmr_rank, rfe_select};
use super::{Estimator, FeatureTable, MlError, Target};

/// Feature selector used inside each training fold, always asked for a
/// fixed number of columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selector {
    AnovaF,
    /// Recursive elimination with the curve's estimator.
    Rfe,
    /// Top-k by LASSO or L2-logistic coefficient magnitude.
    Importance,
    Mrmr,
}

impl FromStr for Selector {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "anova" | "anova_f" => Ok(Self::AnovaF),
            "rfe" => Ok(Self::Rfe),
            "importance" | "lasso" => Ok(Self::Importance),
            "mrmr" => Ok(Self::Mrmr),
            other => Err(format!("unknown selector {other:?}")),
        }
    }
}

impl Selector {
    pub fn select(&self, tbl: &FeatureTable, k: usize, estimator: Estimator) -> Result<Vec<String>, MlError> {
        Ok(match self {
            Selector::AnovaF => anova_f_select(tbl, k)?.kept,
            Selector::Rfe => rfe_select(tbl, k, estimator)?.kept,
            Selector::Mrmr => mrmr_rank(tbl, k)?.kept,
            Selector::Importance => {
                if k == 0 || k > tbl.n_cols() {
                    return Err(MlError::InvalidK { k, max: tbl.n_cols() });
                }
                let imp = importances(tbl.data(), tbl.require_target()?)?;
                let mut order: Vec<usize> = (0..imp.len()).collect();
                order.sort_by(|&a, &b| imp[b].total_cmp(&imp[a]).then(a.cmp(&b)));
                order[..k].iter().map(|&j| tbl.column_names()[j].clone()).collect()
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub k: usize,
    pub mean_score: f64,
    /// Population standard deviation over folds.
    pub std_score: f64,
    pub fold_scores: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    pub points: Vec<CurvePoint>,
    /// Validation rows per fold.
    pub folds: Vec<Vec<usize>>,
    /// Selected columns, indexed by k position then fold.
    pub selections: Vec<Vec<Vec<String>>>,
}

/// Validation row sets. Classification targets are stratified: each class
/// is shuffled and dealt round-robin across folds, continuing the deal from
/// class to class. Regression rows are shuffled and cut into contiguous
/// folds whose sizes differ by at most one.
pub fn cv_folds(target: &Target, folds: usize, seed: u64) -> Result<Vec<Vec<usize>>, MlError> {
    let n = target.len();
    if folds < 2 || folds > n {
        return Err(MlError::InvalidFolds { folds, rows: n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![Vec::new(); folds];
    if target.is_classification() {
        let mut deal = 0;
        for c in target.classes() {
            let mut members: Vec<usize> = (0..n).filter(|&i| target.values()[i] == c).collect();
            members.shuffle(&mut rng);
            for i in members {
                out[deal % folds].push(i);
                deal += 1;
            }
        }
    } else {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut rng);
        let (base, extra) = (n / folds, n % folds);
        let mut start = 0;
        for (f, fold) in out.iter_mut().enumerate() {
            let len = base + usize::from(f < extra);
            fold.extend_from_slice(&idx[start..start + len]);
            start += len;
        }
    }
    for f in &mut out {
        f.sort_unstable();
    }
    Ok(out)
}

pub fn cv_score_curve(
    tbl: &FeatureTable,
    selector: Selector,
    estimator: Estimator,
    k_values: &[usize],
    folds: usize,
    seed: u64,
) -> Result<Vec<CurvePoint>, MlError> {
    Ok(cv_score_curve_detailed(tbl, selector, estimator, k_values, folds, seed)?.points)
}

/// Cross-validated score against the number of selected features. Within
/// each fold the standardizer, the selector and the estimator see only the
/// training rows. Scores are accuracy for classifiers and R^2 otherwise.
pub fn cv_score_curve_detailed(
    tbl: &FeatureTable,
    selector: Selector,
    estimator: Estimator,
    k_values: &[usize],
    folds: usize,
    seed: u64,
) -> Result<CvReport, MlError> {
    let target = tbl.require_target()?;
    if estimator.is_classifier() != target.is_classification() {
        return Err(MlError::EstimatorMismatch(format!(
            "{estimator:?} with a {:?} target",
            target.kind()
        )));
    }
    if k_values.is_empty() {
        return Err(MlError::Schema("no k values requested".into()));
    }
    if let Some(&k) = k_values.iter().find(|&&k| k == 0 || k > tbl.n_cols()) {
        return Err(MlError::InvalidK { k, max: tbl.n_cols() });
    }
    let fold_rows = cv_folds(target, folds, seed)?;
    let n = tbl.n_rows();
    let mut prepared = Vec::with_capacity(folds);
    for val in &fold_rows {
        let train: Vec<usize> = (0..n).filter(|i| val.binary_search(i).is_err()).collect();
        let train_tbl = tbl.select_rows(&train);
        let std = Standardizer::fit(train_tbl.data());
        prepared.push((std.transform_table(&train_tbl), std.transform_table(&tbl.select_rows(val))));
    }
    let mut points = Vec::with_capacity(k_values.len());
    let mut selections = Vec::with_capacity(k_values.len());
    for &k in k_values {
        let mut scores = Vec::with_capacity(folds);
        let mut chosen = Vec::with_capacity(folds);
        for (train, val) in &prepared {
            let cols = selector.select(train, k, estimator)?;
            let tr = train.select_columns(&cols)?;
            let va = val.select_columns(&cols)?;
            let model = estimator.fit(tr.data(), tr.require_target()?)?;
            scores.push(model.score(va.data(), va.require_target()?.values()));
            chosen.push(cols);
        }
        let m = scores.iter().sum::<f64>() / scores.len() as f64;
        let sd = (scores.iter().map(|s| (s - m).powi(2)).sum::<f64>() / scores.len() as f64).sqrt();
        points.push(CurvePoint {
            k,
            mean_score: m,
            std_score: sd,
            fold_scores: scores,
        });
        selections.push(chosen);
    }
    Ok(CvReport {
        points,
        folds: fold_rows,
        selections,
    })
}
