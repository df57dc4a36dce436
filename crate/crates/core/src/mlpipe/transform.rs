use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::preprocess::{correlation_matrix, imputed_matrix};
use super::{FeatureTable, MlError};

#[derive(Debug, Clone, PartialEq)]
pub struct PcaResult {
    /// Scores named `pc1..pck`, same rows and target as the input.
    pub transformed: FeatureTable,
    /// k x p, orthonormal rows.
    pub components: DMatrix<f64>,
    /// Variance of each component's scores (n - 1 denominator).
    pub explained_variance: Vec<f64>,
    pub explained_variance_ratio: Vec<f64>,
    pub mean: Vec<f64>,
}

fn centered(x: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>) {
    let means: Vec<f64> = x.column_iter().map(|c| c.mean()).collect();
    let xc = DMatrix::from_fn(x.nrows(), x.ncols(), |i, j| x[(i, j)] - means[j]);
    (xc, means)
}

/// Singular values in descending order with matching right singular
/// vectors as rows.
type Svd = (DVector<f64>, DMatrix<f64>, DMatrix<f64>);

fn sorted_svd(x: &DMatrix<f64>) -> Result<Svd, MlError> {
    let svd = x.clone().svd(true, true);
    let u = svd.u.ok_or_else(|| MlError::Numerical("SVD failed".into()))?;
    let vt = svd.v_t.ok_or_else(|| MlError::Numerical("SVD failed".into()))?;
    let s = svd.singular_values;
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]).then(a.cmp(&b)));
    let s_sorted = DVector::from_iterator(s.len(), order.iter().map(|&i| s[i]));
    let u_sorted = u.select_columns(&order);
    let vt_sorted = vt.select_rows(&order);
    Ok((s_sorted, u_sorted, vt_sorted))
}

/// Flips each row so its largest-magnitude entry is positive.
fn fix_signs(rows: &mut DMatrix<f64>) {
    for mut r in rows.row_iter_mut() {
        let lead = r.iter().copied().fold(0.0f64, |a, v| if v.abs() > a.abs() { v } else { a });
        if lead < 0.0 {
            r.neg_mut();
        }
    }
}

fn names(prefix: &str, k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("{prefix}{i}")).collect()
}

/// Principal components of the mean-imputed, centered data.
pub fn pca(tbl: &FeatureTable, k: usize) -> Result<PcaResult, MlError> {
    let max = tbl.n_rows().min(tbl.n_cols());
    if k == 0 || k > max {
        return Err(MlError::InvalidK { k, max });
    }
    let (xc, mean) = centered(&imputed_matrix(tbl));
    let (s, _, vt) = sorted_svd(&xc)?;
    let mut components = vt.rows(0, k).into_owned();
    fix_signs(&mut components);
    let scores = &xc * components.transpose();
    let dof = (tbl.n_rows().max(2) - 1) as f64;
    let total: f64 = s.iter().map(|v| v * v).sum();
    let explained_variance: Vec<f64> = s.iter().take(k).map(|v| v * v / dof).collect();
    let explained_variance_ratio = s
        .iter()
        .take(k)
        .map(|v| if total > 0.0 { v * v / total } else { 0.0 })
        .collect();
    Ok(PcaResult {
        transformed: tbl.with_data(names("pc", k), scores)?,
        components,
        explained_variance,
        explained_variance_ratio,
        mean,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IcaConfig {
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for IcaConfig {
    fn default() -> Self {
        Self {
            max_iter: 500,
            tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IcaResult {
    /// Estimated sources named `ic1..ick`, unit variance.
    pub transformed: FeatureTable,
    /// k x p map from centered data to sources.
    pub unmixing: DMatrix<f64>,
    pub n_iter: usize,
    /// False when `max_iter` ran out first; the result is still the last
    /// iterate.
    pub converged: bool,
}

/// `(W W^T)^(-1/2) W`.
fn sym_decorrelate(w: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(w * w.transpose());
    let d = eig.eigenvalues.map(|v| 1.0 / v.max(f64::MIN_POSITIVE).sqrt());
    &eig.eigenvectors * DMatrix::from_diagonal(&d) * eig.eigenvectors.transpose() * w
}

pub fn ica(tbl: &FeatureTable, k: usize) -> Result<IcaResult, MlError> {
    ica_with(tbl, k, IcaConfig::default())
}

/// FastICA: PCA whitening to `k` dimensions, then symmetric fixed-point
/// iterations with the log-cosh contrast starting from the identity.
/// Convergence is reached when every unmixing row changes direction by less
/// than `tol`.
pub fn ica_with(tbl: &FeatureTable, k: usize, cfg: IcaConfig) -> Result<IcaResult, MlError> {
    let max = tbl.n_rows().min(tbl.n_cols());
    if k == 0 || k > max {
        return Err(MlError::InvalidK { k, max });
    }
    let n = tbl.n_rows();
    let nf = n as f64;
    let (xc, _) = centered(&imputed_matrix(tbl));
    let (s, _, vt) = sorted_svd(&xc)?;
    if s[k - 1] <= s[0] * 1e-10 || s[0] == 0.0 {
        return Err(MlError::Numerical(format!("data has rank below k = {k}")));
    }
    // p x k whitening map: unit-variance, uncorrelated columns.
    let whiten = DMatrix::from_fn(tbl.n_cols(), k, |j, c| vt[(c, j)] / s[c] * nf.sqrt());
    let z = &xc * &whiten;

    let mut w = sym_decorrelate(&DMatrix::identity(k, k));
    let mut converged = false;
    let mut n_iter = 0;
    for it in 1..=cfg.max_iter {
        n_iter = it;
        let wx = &z * w.transpose();
        let g = wx.map(f64::tanh);
        let g_prime_mean: Vec<f64> = g
            .column_iter()
            .map(|c| c.iter().map(|v| 1.0 - v * v).sum::<f64>() / nf)
            .collect();
        let mut w_new = g.transpose() * &z / nf;
        for r in 0..k {
            for c in 0..k {
                w_new[(r, c)] -= g_prime_mean[r] * w[(r, c)];
            }
        }
        let w_new = sym_decorrelate(&w_new);
        let lim = (&w_new * w.transpose())
            .diagonal()
            .iter()
            .map(|d| (d.abs() - 1.0).abs())
            .fold(0.0, f64::max);
        w = w_new;
        if lim < cfg.tol {
            converged = true;
            break;
        }
    }
    if !converged {
        log::warn!("ICA did not converge in {} iterations", cfg.max_iter);
    }
    let mut unmixing = &w * whiten.transpose();
    fix_signs(&mut unmixing);
    let sources = &xc * unmixing.transpose();
    Ok(IcaResult {
        transformed: tbl.with_data(names("ic", k), sources)?,
        unmixing,
        n_iter,
        converged,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactorAnalysisResult {
    /// p x k.
    pub loadings: DMatrix<f64>,
    pub uniquenesses: Vec<f64>,
    pub n_iter: usize,
    /// Regression-method factor scores named `fa1..fak`.
    pub transformed: FeatureTable,
}

pub const FA_MAX_ITER: usize = 200;
pub const FA_TOL: f64 = 1e-5;
const PSI_MIN: f64 = 0.005;

/// Iterated principal-axis factoring of the correlation matrix. Starting
/// uniquenesses are `1 - max |r|` per row; each round eigendecomposes the
/// reduced correlation matrix and updates communalities until they change
/// by less than `tol`. Uniquenesses are clamped to [0.005, 1].
pub fn factor_analysis(
    tbl: &FeatureTable,
    k: usize,
    max_iter: usize,
    tol: f64,
) -> Result<FactorAnalysisResult, MlError> {
    let p = tbl.n_cols();
    if k == 0 || k >= p {
        return Err(MlError::InvalidK {
            k,
            max: p.saturating_sub(1),
        });
    }
    let data = imputed_matrix(tbl);
    let r = correlation_matrix(&data);
    let mut psi: Vec<f64> = (0..p)
        .map(|i| {
            let m = (0..p).filter(|&j| j != i).map(|j| r[(i, j)].abs()).fold(0.0, f64::max);
            (1.0 - m).clamp(PSI_MIN, 1.0)
        })
        .collect();
    let mut loadings = DMatrix::zeros(p, k);
    for it in 1..=max_iter {
        let mut reduced = r.clone();
        for i in 0..p {
            reduced[(i, i)] = 1.0 - psi[i];
        }
        let eig = SymmetricEigen::new(reduced);
        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
        for (c, &e) in order.iter().take(k).enumerate() {
            let scale = eig.eigenvalues[e].max(0.0).sqrt();
            for i in 0..p {
                loadings[(i, c)] = eig.eigenvectors[(i, e)] * scale;
            }
        }
        let new_psi: Vec<f64> = loadings
            .row_iter()
            .map(|row| (1.0 - row.norm_squared()).clamp(PSI_MIN, 1.0))
            .collect();
        let change = psi
            .iter()
            .zip(&new_psi)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        psi = new_psi;
        if change < tol {
            let mut lt = loadings.transpose();
            fix_signs(&mut lt);
            let loadings = lt.transpose();
            let transformed = factor_scores(tbl, &data, &r, &loadings)?;
            return Ok(FactorAnalysisResult {
                loadings,
                uniquenesses: psi,
                n_iter: it,
                transformed,
            });
        }
    }
    Err(MlError::ConvergenceFailure {
        iterations: max_iter,
    })
}

/// Thurstone scores `Z R^+ L` on z-scored data.
fn factor_scores(
    tbl: &FeatureTable,
    data: &DMatrix<f64>,
    r: &DMatrix<f64>,
    loadings: &DMatrix<f64>,
) -> Result<FeatureTable, MlError> {
    let z = super::preprocess::Standardizer::fit(data).transform(data);
    let r_pinv = r
        .clone()
        .pseudo_inverse(1e-10)
        .map_err(|e| MlError::Numerical(e.to_string()))?;
    tbl.with_data(names("fa", loadings.ncols()), z * r_pinv * loadings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Box-Muller standard normal.
    fn normal<R: Rng>(rng: &mut R) -> f64 {
        let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
        let u2: f64 = rng.gen();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    #[test]
    fn pca_rank_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x: Vec<f64> = (0..50).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        let t = FeatureTable::from_columns(&[x, y], None).unwrap();
        let r = pca(&t, 1).unwrap();
        assert!(r.explained_variance_ratio[0] >= 1.0 - 1e-9);
        assert!(r.components[(0, 1)] > 0.0);
        assert!(matches!(pca(&t, 0), Err(MlError::InvalidK { .. })));
        assert!(pca(&t, 3).is_err());
    }

    #[test]
    fn pca_isotropic() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let cols: Vec<Vec<f64>> = (0..2).map(|_| (0..1000).map(|_| normal(&mut rng)).collect()).collect();
        let r = pca(&FeatureTable::from_columns(&cols, None).unwrap(), 2).unwrap();
        for v in &r.explained_variance_ratio {
            assert!((v - 0.5).abs() < 0.1);
        }
    }

    #[test]
    fn pca_orthonormal_and_score_variance() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cols: Vec<Vec<f64>> = (0..5).map(|j| (0..80).map(|_| (j + 1) as f64 * normal(&mut rng)).collect()).collect();
        let r = pca(&FeatureTable::from_columns(&cols, None).unwrap(), 4).unwrap();
        let gram = &r.components * r.components.transpose();
        assert!((gram - DMatrix::identity(4, 4)).amax() < 1e-8);
        for w in r.explained_variance_ratio.windows(2) {
            assert!(w[0] >= w[1]);
        }
        for (c, ev) in r.explained_variance.iter().enumerate() {
            let s = r.transformed.column(c);
            let var = s.iter().map(|v| v * v).sum::<f64>() / 79.0;
            assert!((var - ev).abs() < 1e-8 * ev.max(1.0));
        }
    }

    fn mixed_uniform(n: usize, seed: u64) -> (Vec<Vec<f64>>, FeatureTable) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s: Vec<Vec<f64>> = (0..2).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        let x1: Vec<f64> = (0..n).map(|i| s[0][i] + 0.5 * s[1][i]).collect();
        let x2: Vec<f64> = (0..n).map(|i| 0.5 * s[0][i] + s[1][i]).collect();
        (s, FeatureTable::from_columns(&[x1, x2], None).unwrap())
    }

    #[test]
    fn ica_unmixes_uniform_sources() {
        let (s, t) = mixed_uniform(5000, 4);
        let r = ica(&t, 2).unwrap();
        assert!(r.converged);
        for src in &s {
            let best = (0..2)
                .map(|c| crate::mlpipe::pearson(src, &r.transformed.column(c)).abs())
                .fold(0.0, f64::max);
            assert!(best > 0.95, "{best}");
        }
    }

    #[test]
    fn ica_single_column_and_gaussian() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x: Vec<f64> = (0..100).map(|_| rng.gen_range(0.0..4.0)).collect();
        let t = FeatureTable::from_columns(std::slice::from_ref(&x), None).unwrap();
        let r = ica(&t, 1).unwrap();
        assert!(r.converged);
        assert!((crate::mlpipe::pearson(&x, &r.transformed.column(0)).abs() - 1.0).abs() < 1e-12);
        let cols: Vec<Vec<f64>> = (0..2).map(|_| (0..500).map(|_| normal(&mut rng)).collect()).collect();
        let g = ica_with(&FeatureTable::from_columns(&cols, None).unwrap(), 2, IcaConfig { max_iter: 50, tol: 1e-12 }).unwrap();
        assert!(g.transformed.data().iter().all(|v| v.is_finite()));
    }

    #[test]
    fn ica_is_deterministic() {
        let (_, t) = mixed_uniform(500, 6);
        assert_eq!(ica(&t, 2).unwrap(), ica(&t, 2).unwrap());
    }

    #[test]
    fn fa_one_factor_reconstructs_correlation() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let l0 = [0.9, 0.8, 0.7, 0.6, 0.5];
        let n = 2000;
        let f: Vec<f64> = (0..n).map(|_| normal(&mut rng)).collect();
        let cols: Vec<Vec<f64>> = l0
            .iter()
            .map(|l: &f64| (0..n).map(|i| l * f[i] + (1.0 - l * l).sqrt() * normal(&mut rng)).collect())
            .collect();
        let t = FeatureTable::from_columns(&cols, None).unwrap();
        let r = factor_analysis(&t, 1, FA_MAX_ITER, FA_TOL).unwrap();
        let fitted = &r.loadings * r.loadings.transpose() + DMatrix::from_diagonal(&DVector::from_vec(r.uniquenesses.clone()));
        let sample = correlation_matrix(t.data());
        assert!((fitted - sample).norm() < 0.1);
        for (i, l) in l0.iter().enumerate() {
            assert!((r.loadings[(i, 0)] - l).abs() < 0.1);
        }
    }

    #[test]
    fn fa_uncorrelated_and_errors() {
        // Principal-axis iterations on pure noise either settle quickly with
        // small loadings or drift towards a Heywood case, which the
        // iteration cap reports as a convergence failure.
        for seed in 8..14 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let cols: Vec<Vec<f64>> = (0..4).map(|_| (0..2000).map(|_| normal(&mut rng)).collect()).collect();
            let t = FeatureTable::from_columns(&cols, None).unwrap();
            match factor_analysis(&t, 1, FA_MAX_ITER, FA_TOL) {
                Ok(r) => {
                    assert!(r.loadings.amax() < 0.35, "{}", r.loadings);
                    assert!(r.uniquenesses.iter().all(|u| *u > 0.85));
                }
                Err(e) => assert!(matches!(e, MlError::ConvergenceFailure { iterations: FA_MAX_ITER })),
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let cols: Vec<Vec<f64>> = (0..4).map(|_| (0..50).map(|_| normal(&mut rng)).collect()).collect();
        let t = FeatureTable::from_columns(&cols, None).unwrap();
        assert!(matches!(factor_analysis(&t, 4, 200, 1e-5), Err(MlError::InvalidK { .. })));
        assert!(factor_analysis(&t, 0, 200, 1e-5).is_err());
    }

    #[test]
    fn fa_constant_table() {
        let t = FeatureTable::from_columns(&[vec![1.0; 10], vec![2.0; 10], vec![f64::NAN; 10]], None).unwrap();
        let r = factor_analysis(&t, 1, FA_MAX_ITER, FA_TOL).unwrap();
        assert_eq!(r.loadings.amax(), 0.0);
        assert_eq!(r.uniquenesses, vec![1.0; 3]);
        assert!(r.transformed.data().iter().all(|v| *v == 0.0));
    }
}
