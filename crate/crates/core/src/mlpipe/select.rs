use std::collections::BTreeMap;
use std::str::FromStr;

use nalgebra::DMatrix;

use super::models::{lasso, Estimator};
use super::preprocess::{imputed_matrix, pearson, Standardizer};
use super::{FeatureTable, MlError, Target};

pub const DEFAULT_LASSO_ALPHA: f64 = 0.01;

/// Outcome of a filter or selector, reported with original column names.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SelectionResult {
    /// Kept columns: table order for filters, rank order for rankers.
    pub kept: Vec<String>,
    /// 1 is best. Covers every ranked column.
    pub ranking: BTreeMap<String, usize>,
    pub scores: BTreeMap<String, f64>,
}

impl SelectionResult {
    /// Columns of `tbl` not kept, in table order.
    pub fn dropped(&self, tbl: &FeatureTable) -> Vec<String> {
        tbl.column_names()
            .iter()
            .filter(|c| !self.kept.contains(c))
            .cloned()
            .collect()
    }

    /// Columns ordered by rank.
    pub fn ranked(&self) -> Vec<(String, usize)> {
        let mut r: Vec<_> = self.ranking.iter().map(|(n, r)| (n.clone(), *r)).collect();
        r.sort_by_key(|(_, r)| *r);
        r
    }
}

fn columns(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.column_iter().map(|c| c.iter().copied().collect()).collect()
}

fn standardized(tbl: &FeatureTable) -> DMatrix<f64> {
    Standardizer::fit(tbl.data()).transform(tbl.data())
}

fn check_k(k: usize, max: usize) -> Result<(), MlError> {
    if k == 0 || k > max {
        Err(MlError::InvalidK { k, max })
    } else {
        Ok(())
    }
}

/// Ranks columns by descending score, ties by column order, and keeps the
/// first `k` in rank order.
fn top_k(names: &[String], scores: &[f64], k: usize) -> SelectionResult {
    let mut order: Vec<usize> = (0..names.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    SelectionResult {
        kept: order[..k].iter().map(|&j| names[j].clone()).collect(),
        ranking: order
            .iter()
            .enumerate()
            .map(|(r, &j)| (names[j].clone(), r + 1))
            .collect(),
        scores: names.iter().cloned().zip(scores.iter().copied()).collect(),
    }
}

/// Drops columns whose population variance, after mean imputation, is at
/// most `threshold`.
pub fn low_variance_filter(tbl: &FeatureTable, threshold: f64) -> SelectionResult {
    let data = imputed_matrix(tbl);
    let mut res = SelectionResult::default();
    for (name, col) in tbl.column_names().iter().zip(data.column_iter()) {
        let n = col.len() as f64;
        let var = if col.is_empty() {
            0.0
        } else {
            let m = col.sum() / n;
            col.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n
        };
        res.scores.insert(name.clone(), var);
        if var > threshold {
            res.kept.push(name.clone());
        }
    }
    res
}

/// Greedy scan in column order: a column is dropped when its absolute
/// Pearson correlation with an already kept column exceeds `threshold`.
/// The score of a column is its largest absolute correlation with an
/// earlier kept column.
pub fn high_correlation_filter(tbl: &FeatureTable, threshold: f64) -> Result<SelectionResult, MlError> {
    if tbl.n_cols() < 2 {
        return Err(MlError::TooFewColumns {
            needed: 2,
            found: tbl.n_cols(),
        });
    }
    let cols = columns(&imputed_matrix(tbl));
    let mut kept_idx: Vec<usize> = Vec::new();
    let mut res = SelectionResult::default();
    for (j, col) in cols.iter().enumerate() {
        let worst = kept_idx
            .iter()
            .map(|&k| pearson(col, &cols[k]).abs())
            .fold(0.0, f64::max);
        res.scores.insert(tbl.column_names()[j].clone(), worst);
        if worst <= threshold {
            kept_idx.push(j);
            res.kept.push(tbl.column_names()[j].clone());
        }
    }
    Ok(res)
}

fn class_target(tbl: &FeatureTable) -> Result<&Target, MlError> {
    let t = tbl.require_target()?;
    if !t.is_classification() {
        return Err(MlError::NotClassification);
    }
    Ok(t)
}

/// One-way ANOVA F per column. Zero within-group variance gives +inf when
/// the group means differ and 0 when they do not.
pub fn anova_f_scores(tbl: &FeatureTable) -> Result<Vec<f64>, MlError> {
    let t = class_target(tbl)?;
    let classes = t.classes();
    if classes.len() < 2 {
        return Err(MlError::DegenerateClasses("need at least two classes".into()));
    }
    let groups: Vec<Vec<usize>> = classes
        .iter()
        .map(|c| (0..t.len()).filter(|&i| t.values()[i] == *c).collect())
        .collect();
    if let Some((c, _)) = classes.iter().zip(&groups).find(|(_, g)| g.len() < 2) {
        return Err(MlError::DegenerateClasses(format!("class {c} has fewer than two rows")));
    }
    let data = standardized(tbl);
    let n = t.len() as f64;
    let g = classes.len() as f64;
    Ok(data
        .column_iter()
        .map(|col| {
            let grand = col.sum() / n;
            let (mut between, mut within) = (0.0, 0.0);
            for members in &groups {
                let m = members.iter().map(|&i| col[i]).sum::<f64>() / members.len() as f64;
                between += members.len() as f64 * (m - grand).powi(2);
                within += members.iter().map(|&i| (col[i] - m).powi(2)).sum::<f64>();
            }
            let msb = between / (g - 1.0);
            let msw = within / (n - g);
            if msw == 0.0 {
                if msb > 0.0 {
                    f64::INFINITY
                } else {
                    0.0
                }
            } else {
                msb / msw
            }
        })
        .collect())
}

/// The `k` columns with the largest ANOVA F, ties by column order.
pub fn anova_f_select(tbl: &FeatureTable, k: usize) -> Result<SelectionResult, MlError> {
    let scores = anova_f_scores(tbl)?;
    check_k(k, tbl.n_cols())?;
    Ok(top_k(tbl.column_names(), &scores, k))
}

/// Recursive feature elimination on standardized data. Each round refits
/// the estimator and drops the `max(1, remaining / 10)` features with the
/// smallest coefficient magnitude (later columns first on ties), never
/// going below `k`. Ranks follow reverse elimination order; the survivors
/// are ranked by their final magnitude.
pub fn rfe_select(tbl: &FeatureTable, k: usize, estimator: Estimator) -> Result<SelectionResult, MlError> {
    let target = tbl.require_target()?;
    check_k(k, tbl.n_cols())?;
    let data = standardized(tbl);
    let names = tbl.column_names();
    let mut remaining: Vec<usize> = (0..tbl.n_cols()).collect();
    let mut eliminated: Vec<usize> = Vec::new();
    let mut last_importance = vec![0.0; tbl.n_cols()];
    loop {
        let sub = data.select_columns(&remaining);
        let imp = estimator.fit(&sub, target)?.importance();
        for (pos, &j) in remaining.iter().enumerate() {
            last_importance[j] = imp[pos];
        }
        if remaining.len() <= k {
            break;
        }
        let step = (remaining.len() / 10).max(1).min(remaining.len() - k);
        let mut order: Vec<usize> = (0..remaining.len()).collect();
        order.sort_by(|&a, &b| imp[a].total_cmp(&imp[b]).then(b.cmp(&a)));
        let drop: Vec<usize> = order[..step].iter().map(|&p| remaining[p]).collect();
        eliminated.extend(&drop);
        remaining.retain(|j| !drop.contains(j));
    }
    let mut survivors = remaining.clone();
    survivors.sort_by(|&a, &b| last_importance[b].total_cmp(&last_importance[a]).then(a.cmp(&b)));
    let mut res = SelectionResult {
        kept: survivors.iter().map(|&j| names[j].clone()).collect(),
        ..Default::default()
    };
    for (r, &j) in survivors.iter().chain(eliminated.iter().rev()).enumerate() {
        res.ranking.insert(names[j].clone(), r + 1);
        res.scores.insert(names[j].clone(), last_importance[j]);
    }
    Ok(res)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ImportanceThreshold {
    Value(f64),
    /// The mean importance; zero importance never passes.
    Mean,
}

impl FromStr for ImportanceThreshold {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("mean") {
            return Ok(Self::Mean);
        }
        s.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite() && *v >= 0.0)
            .map(Self::Value)
            .ok_or_else(|| format!("threshold must be 'mean' or a non-negative number, got {s:?}"))
    }
}

/// Coefficient magnitudes of LASSO (regression) or L2 logistic
/// (classification) on standardized data.
pub(crate) fn importances(data: &DMatrix<f64>, target: &Target) -> Result<Vec<f64>, MlError> {
    if target.is_classification() {
        Ok(Estimator::default_for(target.kind()).fit(data, target)?.importance())
    } else {
        Ok(lasso(data, target.values(), DEFAULT_LASSO_ALPHA).importance())
    }
}

/// Keeps columns whose model importance reaches the threshold, in table order.
pub fn importance_select(tbl: &FeatureTable, threshold: ImportanceThreshold) -> Result<SelectionResult, MlError> {
    let target = tbl.require_target()?;
    let imp = importances(&standardized(tbl), target)?;
    let names = tbl.column_names();
    let mut res = top_k(names, &imp, names.len());
    let cut = match threshold {
        ImportanceThreshold::Value(v) => v,
        ImportanceThreshold::Mean => imp.iter().sum::<f64>() / imp.len().max(1) as f64,
    };
    res.kept = names
        .iter()
        .zip(&imp)
        .filter(|(_, &v)| v >= cut && (threshold != ImportanceThreshold::Mean || v > 0.0))
        .map(|(n, _)| n.clone())
        .collect();
    Ok(res)
}

/// Relevance of each column: |r| with the target, or for more than two
/// classes the largest |r| with a one-vs-rest indicator.
pub(crate) fn relevance(cols: &[Vec<f64>], target: &Target) -> Vec<f64> {
    let classes = target.classes();
    if target.is_classification() && classes.len() > 2 {
        let indicators: Vec<Vec<f64>> = classes
            .iter()
            .map(|c| target.values().iter().map(|v| f64::from(u8::from(v == c))).collect())
            .collect();
        cols.iter()
            .map(|col| {
                indicators
                    .iter()
                    .map(|ind| pearson(col, ind).abs())
                    .fold(0.0, f64::max)
            })
            .collect()
    } else {
        cols.iter().map(|col| pearson(col, target.values()).abs()).collect()
    }
}

/// Greedy minimum-redundancy maximum-relevance ranking of `k` columns. The
/// first pick maximizes relevance; each later pick maximizes relevance
/// minus mean |r| with the columns already picked. Ties go to the earlier
/// column. The score of a pick is its criterion value when picked.
pub fn mrmr_rank(tbl: &FeatureTable, k: usize) -> Result<SelectionResult, MlError> {
    let target = tbl.require_target()?;
    check_k(k, tbl.n_cols())?;
    let cols = columns(&imputed_matrix(tbl));
    let rel = relevance(&cols, target);
    let p = cols.len();
    let mut redundancy_sum = vec![0.0; p];
    let mut picked: Vec<usize> = Vec::new();
    let mut res = SelectionResult::default();
    while picked.len() < k {
        let mut best: Option<(usize, f64)> = None;
        for j in (0..p).filter(|j| !picked.contains(j)) {
            let score = if picked.is_empty() {
                rel[j]
            } else {
                rel[j] - redundancy_sum[j] / picked.len() as f64
            };
            if best.is_none_or(|(_, b)| score > b) {
                best = Some((j, score));
            }
        }
        let (j, score) = best.expect("k <= p");
        picked.push(j);
        for (i, r) in redundancy_sum.iter_mut().enumerate() {
            *r += pearson(&cols[i], &cols[j]).abs();
        }
        let name = tbl.column_names()[j].clone();
        res.ranking.insert(name.clone(), picked.len());
        res.scores.insert(name.clone(), score);
        res.kept.push(name);
    }
    Ok(res)
}
