//! Filter, transform, select and cross-validate a feature table, writing
//! reports and SVG plots.

use std::path::{Path, PathBuf};

use serde::Serialize;
use voicemark::mlpipe::{
    anova_f_select, corr_heatmap, cv_score_curve_detailed, factor_analysis, high_correlation_filter, ica_with,
    importance_select, low_variance_filter, mrmr_rank, pca, rfe_select, scatter, scatter_matrix, swarm, Estimator,
    FeatureTable, IcaConfig, ImportanceThreshold, MlError, SelectionResult, Selector, TargetKind,
};

use crate::config::{CurveSpec, FilterSpec, PipelineConfig, SelectionSpec, TransformSpec};
use crate::error::CliError;
use crate::output::{create_dir, csv_io, write_atomic, write_string};
use crate::svg;

/// Most columns drawn in the scatter matrix regardless of `max_columns`.
const SCATTER_MATRIX_CAP: usize = 6;

#[derive(Debug, Clone, Serialize)]
pub struct StageReport {
    pub stage: String,
    pub method: String,
    pub input_columns: usize,
    pub kept: Vec<String>,
    pub dropped: Vec<String>,
    /// Method-specific numbers such as explained variance.
    pub details: serde_json::Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct CurveRow {
    pub k: usize,
    pub mean_score: f64,
    pub std_score: f64,
    pub fold_scores: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub input: PathBuf,
    pub config_hash: String,
    pub seed: u64,
    pub n_rows: usize,
    pub n_input_columns: usize,
    pub task: Option<String>,
    pub stages: Vec<StageReport>,
    pub kept_features: Vec<String>,
    pub metric: Option<String>,
    pub curve: Vec<CurveRow>,
    pub outputs: Vec<String>,
    pub notes: Vec<String>,
}

fn stage_err(stage: &str) -> impl Fn(MlError) -> CliError + '_ {
    move |source| CliError::Stage {
        stage: stage.to_string(),
        source,
    }
}

fn filter_name(f: &FilterSpec) -> &'static str {
    match f {
        FilterSpec::LowVariance { .. } => "low_variance",
        FilterSpec::HighCorrelation { .. } => "high_correlation",
    }
}

fn apply_selection(
    stage: &str,
    method: &str,
    tbl: &FeatureTable,
    res: SelectionResult,
    details: serde_json::Value,
    stages: &mut Vec<StageReport>,
) -> Result<FeatureTable, CliError> {
    if res.kept.is_empty() {
        return Err(CliError::Stage {
            stage: stage.into(),
            source: MlError::Schema("every column was removed".into()),
        });
    }
    let next = tbl.select_columns(&res.kept).map_err(stage_err(stage))?;
    stages.push(StageReport {
        stage: stage.into(),
        method: method.into(),
        input_columns: tbl.n_cols(),
        dropped: res.dropped(tbl),
        kept: res.kept,
        details,
    });
    Ok(next)
}

fn default_k_values(p: usize) -> Vec<usize> {
    let mut ks: Vec<usize> = std::iter::successors(Some(1usize), |k| k.checked_mul(2)).take_while(|&k| k < p).collect();
    ks.push(p);
    ks
}

fn write_ranking(path: &Path, res: &SelectionResult) -> Result<(), CliError> {
    write_atomic(path, |w| {
        let mut c = csv::Writer::from_writer(w);
        c.write_record(["feature", "rank", "score"]).map_err(csv_io)?;
        for (name, rank) in res.ranked() {
            let score = res.scores.get(&name).map_or(String::new(), |s| s.to_string());
            c.write_record([name, rank.to_string(), score]).map_err(csv_io)?;
        }
        c.flush()
    })
}

fn write_curve(path: &Path, rows: &[CurveRow], folds: usize) -> Result<(), CliError> {
    write_atomic(path, |w| {
        let mut c = csv::Writer::from_writer(w);
        let mut header = vec!["k".to_string(), "mean_score".into(), "std_score".into()];
        header.extend((0..folds).map(|f| format!("fold_{f}")));
        c.write_record(&header).map_err(csv_io)?;
        for r in rows {
            let mut rec = vec![r.k.to_string(), r.mean_score.to_string(), r.std_score.to_string()];
            rec.extend(r.fold_scores.iter().map(|s| s.to_string()));
            c.write_record(&rec).map_err(csv_io)?;
        }
        c.flush()
    })
}

/// Runs the configured chain on `features_csv` and writes its outputs into
/// `out_dir`. The input file is only read.
pub fn run_analyze(cfg: &PipelineConfig, features_csv: &Path, out_dir: &Path) -> Result<AnalysisReport, CliError> {
    cfg.validate()?;
    let a = &cfg.analysis;
    let mut tbl = FeatureTable::read_csv(features_csv, a.task.kind())
        .map_err(|e| CliError::Schema(format!("{}: {e}", features_csv.display())))?;
    if tbl.target().is_none() {
        if a.selection.is_some() {
            return Err(CliError::Schema(format!(
                "stage 'selection' needs a target column but {} has none",
                features_csv.display()
            )));
        }
        if a.curve.is_some() {
            return Err(CliError::Schema(format!(
                "stage 'curve' needs a target column but {} has none",
                features_csv.display()
            )));
        }
    }
    if tbl.n_cols() == 0 || tbl.n_rows() == 0 {
        return Err(CliError::Schema(format!("{} has no feature data", features_csv.display())));
    }
    create_dir(out_dir)?;
    let task = tbl.target().map(|t| t.kind());
    let mut report = AnalysisReport {
        input: features_csv.to_path_buf(),
        config_hash: cfg.hash(),
        seed: cfg.seed,
        n_rows: tbl.n_rows(),
        n_input_columns: tbl.n_cols(),
        task: task.map(|k| match k {
            TargetKind::Classification => "classification".into(),
            TargetKind::Regression => "regression".into(),
        }),
        stages: Vec::new(),
        kept_features: Vec::new(),
        metric: task.map(|k| match k {
            TargetKind::Classification => "accuracy".into(),
            TargetKind::Regression => "r2".into(),
        }),
        curve: Vec::new(),
        outputs: Vec::new(),
        notes: Vec::new(),
    };

    for (i, f) in a.filters.iter().enumerate() {
        let stage = format!("filter[{i}]:{}", filter_name(f));
        let (res, details) = match f {
            FilterSpec::LowVariance { threshold } => (
                low_variance_filter(&tbl, *threshold),
                serde_json::json!({ "threshold": threshold }),
            ),
            FilterSpec::HighCorrelation { threshold } => (
                high_correlation_filter(&tbl, *threshold).map_err(stage_err(&stage))?,
                serde_json::json!({ "threshold": threshold }),
            ),
        };
        tbl = apply_selection(&stage, filter_name(f), &tbl, res, details, &mut report.stages)?;
    }

    if let Some(t) = &a.transform {
        let stage = "transform";
        let input_columns = tbl.n_cols();
        let (method, next, details) = match t {
            TransformSpec::Pca { k } => {
                let r = pca(&tbl, *k).map_err(stage_err(stage))?;
                let d = serde_json::json!({
                    "explained_variance": r.explained_variance,
                    "explained_variance_ratio": r.explained_variance_ratio,
                });
                ("pca", r.transformed, d)
            }
            TransformSpec::Ica { k, max_iter, tol } => {
                let r = ica_with(
                    &tbl,
                    *k,
                    IcaConfig {
                        max_iter: *max_iter,
                        tol: *tol,
                    },
                )
                .map_err(stage_err(stage))?;
                if !r.converged {
                    report.notes.push(format!("ica did not converge in {} iterations", r.n_iter));
                }
                let d = serde_json::json!({ "n_iter": r.n_iter, "converged": r.converged });
                ("ica", r.transformed, d)
            }
            TransformSpec::FactorAnalysis { k, max_iter, tol } => {
                let r = factor_analysis(&tbl, *k, *max_iter, *tol).map_err(stage_err(stage))?;
                let d = serde_json::json!({ "n_iter": r.n_iter, "uniquenesses": r.uniquenesses });
                ("factor_analysis", r.transformed, d)
            }
        };
        report.stages.push(StageReport {
            stage: stage.into(),
            method: method.into(),
            input_columns,
            kept: next.column_names().to_vec(),
            dropped: Vec::new(),
            details,
        });
        tbl = next;
    }

    let curve_input = tbl.clone();

    if let Some(s) = &a.selection {
        let stage = "selection";
        let estimator = Estimator::default_for(tbl.require_target().map_err(stage_err(stage))?.kind());
        let (method, res) = match s {
            SelectionSpec::Anova { k } => ("anova", anova_f_select(&tbl, *k)),
            SelectionSpec::Rfe { k } => ("rfe", rfe_select(&tbl, *k, estimator)),
            SelectionSpec::Mrmr { k } => ("mrmr", mrmr_rank(&tbl, *k)),
            SelectionSpec::Importance { threshold } => {
                let th: ImportanceThreshold = threshold
                    .parse()
                    .map_err(|e: String| stage_err(stage)(MlError::Schema(e)))?;
                ("importance", importance_select(&tbl, th))
            }
        };
        let res = res.map_err(stage_err(stage))?;
        let path = out_dir.join("ranking.csv");
        write_ranking(&path, &res)?;
        report.outputs.push("ranking.csv".into());
        tbl = apply_selection(stage, method, &tbl, res, serde_json::json!({}), &mut report.stages)?;
    }

    report.kept_features = tbl.column_names().to_vec();
    let kept_text: String = report.kept_features.iter().map(|n| format!("{n}\n")).collect();
    write_string(&out_dir.join("kept_features.txt"), &kept_text)?;
    report.outputs.push("kept_features.txt".into());

    if let Some(c) = &a.curve {
        run_curve(cfg, c, &curve_input, out_dir, &mut report)?;
    }

    write_plots(cfg, &tbl, out_dir, &mut report)?;

    report.outputs.push("report.json".into());
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    write_atomic(&out_dir.join("report.json"), |w| {
        w.write_all(json.as_bytes())?;
        w.write_all(b"\n")
    })?;
    Ok(report)
}

fn run_curve(
    cfg: &PipelineConfig,
    c: &CurveSpec,
    tbl: &FeatureTable,
    out_dir: &Path,
    report: &mut AnalysisReport,
) -> Result<(), CliError> {
    let stage = "curve";
    let selector: Selector = c.selector.parse().map_err(|e: String| stage_err(stage)(MlError::Schema(e)))?;
    let kind = tbl.require_target().map_err(stage_err(stage))?.kind();
    let k_values = c.k_values.clone().unwrap_or_else(|| default_k_values(tbl.n_cols()));
    let cv = cv_score_curve_detailed(tbl, selector, Estimator::default_for(kind), &k_values, c.folds, cfg.seed)
        .map_err(stage_err(stage))?;
    report.curve = cv
        .points
        .iter()
        .map(|p| CurveRow {
            k: p.k,
            mean_score: p.mean_score,
            std_score: p.std_score,
            fold_scores: p.fold_scores.clone(),
        })
        .collect();
    write_curve(&out_dir.join("curve.csv"), &report.curve, c.folds)?;
    report.outputs.push("curve.csv".into());
    let metric = report.metric.clone().unwrap_or_default();
    write_string(&out_dir.join("curve.svg"), &svg::curve_svg(&cv.points, &metric))?;
    report.outputs.push("curve.svg".into());
    Ok(())
}

fn write_plots(
    cfg: &PipelineConfig,
    tbl: &FeatureTable,
    out_dir: &Path,
    report: &mut AnalysisReport,
) -> Result<(), CliError> {
    let plots = &cfg.analysis.plots;
    let names = tbl.column_names();
    let capped = |cap: usize| -> Result<FeatureTable, CliError> {
        tbl.select_columns(&names[..names.len().min(cap)]).map_err(stage_err("plots"))
    };

    let pair = match &plots.scatter {
        Some((x, y)) => Some((x.clone(), y.clone())),
        None if names.len() >= 2 => Some((names[0].clone(), names[1].clone())),
        None => None,
    };
    match pair {
        Some((x, y)) => {
            let s = scatter(tbl, &x, &y, plots.bins).map_err(stage_err("plots"))?;
            write_string(&out_dir.join("scatter.svg"), &svg::scatter_svg(&s))?;
            report.outputs.push("scatter.svg".into());
        }
        None => report.notes.push("scatter plot skipped: fewer than two columns".into()),
    }

    if names.len() >= 2 {
        let hm = corr_heatmap(&capped(plots.max_columns)?).map_err(stage_err("plots"))?;
        write_string(&out_dir.join("heatmap.svg"), &svg::heatmap_svg(&hm))?;
        report.outputs.push("heatmap.svg".into());
        let m = scatter_matrix(&capped(plots.max_columns.min(SCATTER_MATRIX_CAP))?, plots.bins);
        write_string(&out_dir.join("scatter_matrix.svg"), &svg::scatter_matrix_svg(&m))?;
        report.outputs.push("scatter_matrix.svg".into());
    } else {
        report.notes.push("heatmap and scatter matrix skipped: fewer than two columns".into());
    }

    if tbl.target().is_some_and(|t| t.is_classification()) {
        let s = swarm(&capped(plots.max_columns)?).map_err(stage_err("plots"))?;
        write_string(&out_dir.join("swarm.svg"), &svg::swarm_svg(&s))?;
        report.outputs.push("swarm.svg".into());
    }
    if names.len() > plots.max_columns {
        report.notes.push(format!(
            "plots show the first {} of {} columns",
            plots.max_columns,
            names.len()
        ));
    }
    Ok(())
}
