use nalgebra::DMatrix;

use super::FeatureTable;

/// Column means of the defined values and population standard deviations
/// of the mean-imputed columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl Standardizer {
    /// An all-NaN column gets mean 0.
    pub fn fit(data: &DMatrix<f64>) -> Self {
        let mut means = Vec::with_capacity(data.ncols());
        let mut stds = Vec::with_capacity(data.ncols());
        for col in data.column_iter() {
            let defined: Vec<f64> = col.iter().copied().filter(|v| !v.is_nan()).collect();
            let m = if defined.is_empty() {
                0.0
            } else {
                defined.iter().sum::<f64>() / defined.len() as f64
            };
            let n = col.len();
            let var = if n == 0 {
                0.0
            } else {
                defined.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n as f64
            };
            means.push(m);
            stds.push(var.sqrt());
        }
        Self { means, stds }
    }

    /// Missing values become the column mean.
    pub fn impute(&self, data: &DMatrix<f64>) -> DMatrix<f64> {
        DMatrix::from_fn(data.nrows(), data.ncols(), |i, j| {
            let v = data[(i, j)];
            if v.is_nan() {
                self.means[j]
            } else {
                v
            }
        })
    }

    /// Imputes then z-scores; zero-variance columns become all zeros.
    pub fn transform(&self, data: &DMatrix<f64>) -> DMatrix<f64> {
        DMatrix::from_fn(data.nrows(), data.ncols(), |i, j| {
            let v = data[(i, j)];
            let v = if v.is_nan() { self.means[j] } else { v };
            if self.stds[j] > 0.0 {
                (v - self.means[j]) / self.stds[j]
            } else {
                0.0
            }
        })
    }

    pub fn transform_table(&self, tbl: &FeatureTable) -> FeatureTable {
        tbl.with_data(tbl.column_names().to_vec(), self.transform(tbl.data()))
            .expect("shape preserved")
    }
}

/// Mean-imputed, z-scored copy of `tbl` and the fitted parameters.
pub fn impute_and_standardize(tbl: &FeatureTable) -> (FeatureTable, Standardizer) {
    let s = Standardizer::fit(tbl.data());
    (s.transform_table(tbl), s)
}

/// Mean-imputed copy of the data.
pub fn imputed_matrix(tbl: &FeatureTable) -> DMatrix<f64> {
    Standardizer::fit(tbl.data()).impute(tbl.data())
}

/// Pearson correlation, 0 when either input is constant. The result is
/// clamped to [-1, 1] and is exactly 1 for identical inputs.
pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len().min(y.len());
    if n == 0 {
        return 0.0;
    }
    let mx = x[..n].iter().sum::<f64>() / n as f64;
    let my = y[..n].iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x[..n].iter().zip(&y[..n]) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0)
}

/// Pearson matrix of the columns with an exact unit diagonal.
pub fn correlation_matrix(data: &DMatrix<f64>) -> DMatrix<f64> {
    let cols: Vec<Vec<f64>> = data.column_iter().map(|c| c.iter().copied().collect()).collect();
    let p = cols.len();
    let mut r = DMatrix::identity(p, p);
    for i in 0..p {
        for j in i + 1..p {
            let v = pearson(&cols[i], &cols[j]);
            r[(i, j)] = v;
            r[(j, i)] = v;
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn impute_then_standardize() {
        let t = FeatureTable::from_columns(&[vec![1.0, f64::NAN, 3.0], vec![5.0; 3]], None).unwrap();
        let (z, s) = impute_and_standardize(&t);
        assert_eq!(s.means, vec![2.0, 5.0]);
        let expect = [-1.224744871391589, 0.0, 1.224744871391589];
        for (a, b) in z.column(0).iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(z.column(1), vec![0.0; 3]);
    }

    #[test]
    fn all_nan_column_is_zero() {
        let t = FeatureTable::from_columns(&[vec![f64::NAN; 4]], None).unwrap();
        let (z, _) = impute_and_standardize(&t);
        assert_eq!(z.column(0), vec![0.0; 4]);
    }

    #[test]
    fn empty_table() {
        let t = FeatureTable::from_columns(&[], None).unwrap();
        let (z, s) = impute_and_standardize(&t);
        assert_eq!((z.n_rows(), z.n_cols()), (0, 0));
        assert!(s.means.is_empty());
    }

    #[test]
    fn standardizer_reuses_training_parameters() {
        let train = FeatureTable::from_columns(&[vec![0.0, 2.0]], None).unwrap();
        let (_, s) = impute_and_standardize(&train);
        let held = DMatrix::from_column_slice(2, 1, &[4.0, f64::NAN]);
        let z = s.transform(&held);
        assert_eq!(z[(0, 0)], 3.0);
        assert_eq!(z[(1, 0)], 0.0);
    }

    #[test]
    fn pearson_edge_cases() {
        let x = [1.0, 2.0, 4.0, 8.0];
        assert_eq!(pearson(&x, &x), 1.0);
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert_eq!(pearson(&x, &neg), -1.0);
        assert_eq!(pearson(&x, &[3.0; 4]), 0.0);
    }
}
