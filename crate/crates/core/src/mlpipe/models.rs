use nalgebra::{DMatrix, DVector};

use super::{MlError, Target, TargetKind};

/// Baseline estimators. Ridge and logistic penalties apply to the mean loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Estimator {
    Ols,
    Ridge { lambda: f64 },
    /// Multinomial logistic regression with an L2 penalty `l2 / 2 * |W|^2`.
    Logistic { l2: f64 },
}

pub const DEFAULT_LOGISTIC_L2: f64 = 1e-3;
const LOGISTIC_MAX_ITER: usize = 3000;
const LOGISTIC_TOL: f64 = 1e-8;

impl Estimator {
    pub fn default_for(kind: TargetKind) -> Self {
        match kind {
            TargetKind::Regression => Estimator::Ols,
            TargetKind::Classification => Estimator::Logistic {
                l2: DEFAULT_LOGISTIC_L2,
            },
        }
    }

    pub fn is_classifier(&self) -> bool {
        matches!(self, Estimator::Logistic { .. })
    }

    pub fn fit(&self, x: &DMatrix<f64>, y: &Target) -> Result<FittedModel, MlError> {
        if x.nrows() != y.len() {
            return Err(MlError::Schema("row count differs from target length".into()));
        }
        if x.nrows() == 0 {
            return Err(MlError::Schema("cannot fit on zero rows".into()));
        }
        match (*self, y.kind()) {
            (Estimator::Ols, TargetKind::Regression) => linear(x, y.values(), 0.0),
            (Estimator::Ridge { lambda }, TargetKind::Regression) => linear(x, y.values(), lambda),
            (Estimator::Logistic { l2 }, TargetKind::Classification) => logistic(x, y, l2),
            (e, k) => Err(MlError::EstimatorMismatch(format!("{e:?} with a {k:?} target"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FittedModel {
    Linear {
        coef: DVector<f64>,
        intercept: f64,
    },
    Softmax {
        /// p x C weights.
        coef: DMatrix<f64>,
        intercept: DVector<f64>,
        classes: Vec<f64>,
    },
}

impl FittedModel {
    pub fn predict(&self, x: &DMatrix<f64>) -> Vec<f64> {
        match self {
            FittedModel::Linear { coef, intercept } => {
                (x * coef).iter().map(|v| v + intercept).collect()
            }
            FittedModel::Softmax {
                coef,
                intercept,
                classes,
            } => {
                let scores = x * coef;
                (0..x.nrows())
                    .map(|i| {
                        let mut best = 0;
                        for c in 1..classes.len() {
                            if scores[(i, c)] + intercept[c] > scores[(i, best)] + intercept[best] {
                                best = c;
                            }
                        }
                        classes[best]
                    })
                    .collect()
            }
        }
    }

    /// Per-feature magnitude: |coef|, summed over classes for softmax.
    pub fn importance(&self) -> Vec<f64> {
        match self {
            FittedModel::Linear { coef, .. } => coef.iter().map(|c| c.abs()).collect(),
            FittedModel::Softmax { coef, .. } => coef
                .row_iter()
                .map(|r| r.iter().map(|c| c.abs()).sum())
                .collect(),
        }
    }

    /// Accuracy for classifiers, R^2 for linear models. R^2 is NaN when the
    /// truth is constant.
    pub fn score(&self, x: &DMatrix<f64>, y: &[f64]) -> f64 {
        let pred = self.predict(x);
        match self {
            FittedModel::Softmax { .. } => accuracy(&pred, y),
            FittedModel::Linear { .. } => r2(&pred, y),
        }
    }
}

pub fn accuracy(pred: &[f64], truth: &[f64]) -> f64 {
    if truth.is_empty() {
        return f64::NAN;
    }
    pred.iter().zip(truth).filter(|(p, t)| p == t).count() as f64 / truth.len() as f64
}

pub fn r2(pred: &[f64], truth: &[f64]) -> f64 {
    if truth.is_empty() {
        return f64::NAN;
    }
    let m = truth.iter().sum::<f64>() / truth.len() as f64;
    let ss_tot: f64 = truth.iter().map(|t| (t - m).powi(2)).sum();
    let ss_res: f64 = pred.iter().zip(truth).map(|(p, t)| (t - p).powi(2)).sum();
    if ss_tot == 0.0 {
        f64::NAN
    } else {
        1.0 - ss_res / ss_tot
    }
}

fn column_means(x: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_iterator(x.ncols(), x.column_iter().map(|c| c.mean()))
}

fn centered(x: &DMatrix<f64>, means: &DVector<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(x.nrows(), x.ncols(), |i, j| x[(i, j)] - means[j])
}

/// Least squares with intercept; minimum-norm solution when rank deficient.
fn linear(x: &DMatrix<f64>, y: &[f64], lambda: f64) -> Result<FittedModel, MlError> {
    let n = x.nrows() as f64;
    let xm = column_means(x);
    let ym = y.iter().sum::<f64>() / n;
    let xc = centered(x, &xm);
    let yc = DVector::from_iterator(y.len(), y.iter().map(|v| v - ym));
    let coef = if x.ncols() == 0 {
        DVector::zeros(0)
    } else {
        let svd = xc.clone().svd(true, true);
        let u = svd.u.as_ref().ok_or_else(|| MlError::Numerical("SVD failed".into()))?;
        let vt = svd.v_t.as_ref().ok_or_else(|| MlError::Numerical("SVD failed".into()))?;
        let s = &svd.singular_values;
        let smax = s.iter().copied().fold(0.0, f64::max);
        let cutoff = smax * 1e-10 * (x.nrows().max(x.ncols()) as f64);
        let uty = u.transpose() * &yc;
        let mut scaled = DVector::zeros(s.len());
        for k in 0..s.len() {
            if s[k] > cutoff {
                scaled[k] = s[k] * uty[k] / (s[k] * s[k] + n * lambda);
            }
        }
        vt.transpose() * scaled
    };
    let intercept = ym - xm.dot(&coef);
    Ok(FittedModel::Linear { coef, intercept })
}

/// Softmax regression by Nesterov-accelerated gradient descent with step
/// 1/L, where L bounds the Hessian of the mean cross-entropy.
fn logistic(x: &DMatrix<f64>, y: &Target, l2: f64) -> Result<FittedModel, MlError> {
    let classes = y.classes();
    if classes.len() < 2 {
        return Err(MlError::DegenerateClasses("logistic fit needs two classes".into()));
    }
    let (n, p, c) = (x.nrows(), x.ncols(), classes.len());
    let nf = n as f64;
    let mut xa = DMatrix::from_element(n, p + 1, 1.0);
    xa.view_mut((0, 0), (n, p)).copy_from(x);
    let onehot = DMatrix::from_fn(n, c, |i, k| f64::from(u8::from(y.values()[i] == classes[k])));
    let smax = xa.clone().singular_values().iter().copied().fold(0.0, f64::max);
    let lipschitz = 0.5 * smax * smax / nf + l2;
    let step = 1.0 / lipschitz;

    let grad = |w: &DMatrix<f64>| -> DMatrix<f64> {
        let mut probs = &xa * w;
        for mut row in probs.row_iter_mut() {
            let m = row.max();
            row.apply(|v| *v = (*v - m).exp());
            let s = row.sum();
            row /= s;
        }
        let mut g = xa.transpose() * (probs - &onehot) / nf;
        for j in 0..p {
            for k in 0..c {
                g[(j, k)] += l2 * w[(j, k)];
            }
        }
        g
    };

    let mut w = DMatrix::zeros(p + 1, c);
    let mut w_prev = w.clone();
    let mut t = 1.0f64;
    for _ in 0..LOGISTIC_MAX_ITER {
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        let momentum = (t - 1.0) / t_next;
        let look = &w + (&w - &w_prev) * momentum;
        let g = grad(&look);
        w_prev = w;
        w = &look - g * step;
        t = t_next;
        let change = (&w - &w_prev).amax();
        if change < LOGISTIC_TOL {
            break;
        }
    }
    if w.iter().any(|v| !v.is_finite()) {
        return Err(MlError::Numerical("logistic weights diverged".into()));
    }
    Ok(FittedModel::Softmax {
        coef: w.rows(0, p).into_owned(),
        intercept: w.row(p).transpose(),
        classes,
    })
}

/// L1-penalized least squares by cyclic coordinate descent, minimizing
/// `|y - Xb|^2 / (2n) + alpha |b|_1` with an unpenalized intercept.
pub fn lasso(x: &DMatrix<f64>, y: &[f64], alpha: f64) -> FittedModel {
    const MAX_SWEEPS: usize = 10_000;
    const TOL: f64 = 1e-10;
    let (n, p) = (x.nrows(), x.ncols());
    let nf = n as f64;
    let xm = column_means(x);
    let ym = y.iter().sum::<f64>() / nf;
    let xc = centered(x, &xm);
    let mut resid = DVector::from_iterator(n, y.iter().map(|v| v - ym));
    let norms: Vec<f64> = xc.column_iter().map(|c| c.norm_squared() / nf).collect();
    let mut coef = DVector::<f64>::zeros(p);
    for _ in 0..MAX_SWEEPS {
        let mut max_change = 0.0f64;
        for j in 0..p {
            if norms[j] == 0.0 {
                continue;
            }
            let col = xc.column(j);
            let rho = col.dot(&resid) / nf + norms[j] * coef[j];
            let new = soft_threshold(rho, alpha) / norms[j];
            let delta = new - coef[j];
            if delta != 0.0 {
                resid.axpy(-delta, &col, 1.0);
                coef[j] = new;
                max_change = max_change.max(delta.abs());
            }
        }
        if max_change < TOL {
            break;
        }
    }
    let intercept = ym - xm.dot(&coef);
    FittedModel::Linear { coef, intercept }
}

fn soft_threshold(v: f64, a: f64) -> f64 {
    if v > a {
        v - a
    } else if v < -a {
        v + a
    } else {
        0.0
    }
}
