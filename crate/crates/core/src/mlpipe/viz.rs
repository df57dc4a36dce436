//! Plot-ready data: scatter with marginals and fit, scatter matrix, swarm
//! and correlation heat map.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::preprocess::{correlation_matrix, imputed_matrix, Standardizer};
use super::{FeatureTable, MlError};

use nalgebra::DMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    /// `counts.len() + 1` ascending edges; the last bin is closed.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

impl Histogram {
    /// Equal-width bins over the finite values. A constant input gets a
    /// unit-wide range centred on the value. No finite values give an empty
    /// histogram.
    pub fn new(values: &[f64], bins: usize) -> Self {
        let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
        if finite.is_empty() || bins == 0 {
            return Self { edges: Vec::new(), counts: Vec::new() };
        }
        let mut lo = finite.iter().copied().fold(f64::INFINITY, f64::min);
        let mut hi = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if lo == hi {
            lo -= 0.5;
            hi += 0.5;
        }
        let width = (hi - lo) / bins as f64;
        let edges = (0..=bins).map(|i| if i == bins { hi } else { lo + width * i as f64 }).collect();
        let mut counts = vec![0; bins];
        for v in finite {
            let b = (((v - lo) / width).floor() as usize).min(bins - 1);
            counts[b] += 1;
        }
        Self { edges, counts }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterExport {
    pub x_name: String,
    pub y_name: String,
    /// Rows where both values are finite.
    pub points: Vec<(f64, f64)>,
    pub x_hist: Histogram,
    pub y_hist: Histogram,
    /// OLS fit of y on x; NaN when x is constant.
    pub slope: f64,
    pub intercept: f64,
}

pub const DEFAULT_BINS: usize = 10;

fn named_column(tbl: &FeatureTable, name: &str) -> Result<Vec<f64>, MlError> {
    tbl.column_index(name)
        .map(|j| tbl.column(j))
        .ok_or_else(|| MlError::Schema(format!("no column '{name}'")))
}

fn scatter_of(x_name: &str, y_name: &str, x: &[f64], y: &[f64], bins: usize) -> ScatterExport {
    let points: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| a.is_finite() && b.is_finite())
        .map(|(a, b)| (*a, *b))
        .collect();
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let (slope, intercept) = if sxx > 0.0 {
        let s = sxy / sxx;
        (s, my - s * mx)
    } else {
        (f64::NAN, f64::NAN)
    };
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    ScatterExport {
        x_name: x_name.to_string(),
        y_name: y_name.to_string(),
        x_hist: Histogram::new(&xs, bins),
        y_hist: Histogram::new(&ys, bins),
        points,
        slope,
        intercept,
    }
}

pub fn scatter(tbl: &FeatureTable, x: &str, y: &str, bins: usize) -> Result<ScatterExport, MlError> {
    Ok(scatter_of(x, y, &named_column(tbl, x)?, &named_column(tbl, y)?, bins))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterMatrix {
    pub names: Vec<String>,
    /// One per column, for the diagonal.
    pub histograms: Vec<Histogram>,
    /// Every pair `i < j`, with column `i` on x.
    pub pairs: Vec<((usize, usize), ScatterExport)>,
}

pub fn scatter_matrix(tbl: &FeatureTable, bins: usize) -> ScatterMatrix {
    let cols: Vec<Vec<f64>> = (0..tbl.n_cols()).map(|j| tbl.column(j)).collect();
    let names = tbl.column_names().to_vec();
    let mut pairs = Vec::new();
    for i in 0..cols.len() {
        for j in i + 1..cols.len() {
            pairs.push(((i, j), scatter_of(&names[i], &names[j], &cols[i], &cols[j], bins)));
        }
    }
    ScatterMatrix {
        histograms: cols.iter().map(|c| Histogram::new(c, bins)).collect(),
        names,
        pairs,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwarmPoint {
    pub feature: usize,
    pub class: f64,
    pub value: f64,
    /// Z-scored value, comparable across features.
    pub z: f64,
    /// Horizontal jitter in [-0.4, 0.4] around the category slot.
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwarmExport {
    pub names: Vec<String>,
    pub classes: Vec<f64>,
    pub points: Vec<SwarmPoint>,
}

const SWARM_SEED: u64 = 0x5eed;

/// Per-feature points grouped by class, with seeded jitter.
pub fn swarm(tbl: &FeatureTable) -> Result<SwarmExport, MlError> {
    let target = tbl.require_target()?;
    if !target.is_classification() {
        return Err(MlError::NotClassification);
    }
    let z = Standardizer::fit(tbl.data()).transform(tbl.data());
    let mut rng = ChaCha8Rng::seed_from_u64(SWARM_SEED);
    let mut points = Vec::with_capacity(tbl.n_rows() * tbl.n_cols());
    for j in 0..tbl.n_cols() {
        for i in 0..tbl.n_rows() {
            let value = tbl.data()[(i, j)];
            if !value.is_finite() {
                continue;
            }
            points.push(SwarmPoint {
                feature: j,
                class: target.values()[i],
                value,
                z: z[(i, j)],
                offset: rng.gen_range(-0.4..=0.4),
            });
        }
    }
    Ok(SwarmExport {
        names: tbl.column_names().to_vec(),
        classes: target.classes(),
        points,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrHeatmap {
    pub names: Vec<String>,
    pub matrix: DMatrix<f64>,
}

/// Pearson matrix of the mean-imputed columns.
pub fn corr_heatmap(tbl: &FeatureTable) -> Result<CorrHeatmap, MlError> {
    if tbl.n_cols() < 2 {
        return Err(MlError::TooFewColumns { needed: 2, found: tbl.n_cols() });
    }
    Ok(CorrHeatmap {
        names: tbl.column_names().to_vec(),
        matrix: correlation_matrix(&imputed_matrix(tbl)),
    })
}
