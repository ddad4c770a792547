//! Adaptive lasso by coordinate descent, tuned by an information criterion.

use nalgebra::{DMatrix, DVector};

/// Information criterion used to pick lambda along the path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Criterion {
    /// `n ln(RSS/n) + df ln n`.
    Bic,
    /// BIC plus `2 gamma ln C(p, df)`, for many candidates relative to runs.
    ExtendedBic { gamma: f64 },
    /// `n ln(RSS/(n - df - 1)) + df ln n`: residual variance on its own
    /// degrees of freedom.
    CorrectedBic,
}

impl Criterion {
    pub fn score(self, n: usize, p: usize, rss: f64, df: usize) -> f64 {
        let nf = n as f64;
        let ln_choose = |p: usize, k: usize| (0..k).map(|i| ((p - i) as f64 / (i + 1) as f64).ln()).sum::<f64>();
        match self {
            Criterion::Bic => nf * (rss / nf).ln() + df as f64 * nf.ln(),
            Criterion::ExtendedBic { gamma } => {
                nf * (rss / nf).ln() + df as f64 * nf.ln() + 2.0 * gamma * ln_choose(p, df)
            }
            Criterion::CorrectedBic => nf * (rss / (n - df - 1) as f64).ln() + df as f64 * nf.ln(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LassoOptions {
    /// Exponent of the adaptive weights `1 / |b|^gamma`.
    pub gamma: f64,
    pub grid_size: usize,
    /// Decades spanned by the lambda grid below `lambda_max`.
    pub grid_decades: f64,
    /// Ridge penalty for the initial estimator, relative to `trace(X'X) / p`.
    pub ridge_scale: f64,
    pub tol: f64,
    pub max_sweeps: usize,
    /// Largest model size considered by BIC, as a fraction of the run count.
    pub max_df_fraction: f64,
    /// Score each support by the residual of a least-squares refit instead
    /// of the shrunken lasso fit.
    pub refit_bic: bool,
    pub criterion: Criterion,
}

impl Default for LassoOptions {
    fn default() -> Self {
        LassoOptions {
            gamma: 1.0,
            grid_size: 100,
            grid_decades: 4.0,
            ridge_scale: 1e-3,
            tol: 1e-10,
            max_sweeps: 10_000,
            max_df_fraction: 0.5,
            refit_bic: false,
            criterion: Criterion::ExtendedBic { gamma: 2.0 },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LassoFit {
    /// Coefficients on the original column scale; dropped columns get 0.
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    pub lambda: f64,
    pub bic: f64,
    pub df: usize,
}

impl LassoFit {
    pub fn support(&self) -> Vec<usize> {
        self.coefficients.iter().enumerate().filter(|(_, b)| **b != 0.0).map(|(j, _)| j).collect()
    }
}

/// Columns centered and scaled so that `x_j'x_j / n = 1`.
#[derive(Debug, Clone)]
pub struct Standardized {
    pub x: DMatrix<f64>,
    pub y: DVector<f64>,
    pub means: Vec<f64>,
    pub scales: Vec<f64>,
    /// Original index of each kept column.
    pub kept: Vec<usize>,
    pub y_mean: f64,
}

pub fn standardize(x: &DMatrix<f64>, y: &DVector<f64>) -> Standardized {
    let n = x.nrows() as f64;
    let mut cols = Vec::new();
    let (mut means, mut scales, mut kept) = (Vec::new(), Vec::new(), Vec::new());
    for j in 0..x.ncols() {
        let c = x.column(j);
        let mean = c.sum() / n;
        let ss = c.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        if ss <= 1e-12 * (1.0 + mean * mean) {
            log::warn!("dropping zero-variance column {j}");
            continue;
        }
        let sd = ss.sqrt();
        cols.push(c.map(|v| (v - mean) / sd));
        means.push(mean);
        scales.push(sd);
        kept.push(j);
    }
    let xs = if cols.is_empty() { DMatrix::zeros(x.nrows(), 0) } else { DMatrix::from_columns(&cols) };
    let y_mean = y.mean();
    Standardized { x: xs, y: y.map(|v| v - y_mean), means, scales, kept, y_mean }
}

/// Initial estimate: least squares when well determined, ridge otherwise.
pub fn initial_estimate(x: &DMatrix<f64>, y: &DVector<f64>, ridge_scale: f64) -> DVector<f64> {
    let p = x.ncols();
    let xtx = x.transpose() * x;
    let xty = x.transpose() * y;
    if p < x.nrows() {
        if let Some(ch) = xtx.clone().cholesky() {
            let l = ch.l_dirty();
            let scale = xtx.diagonal().max();
            if (0..p).all(|i| l[(i, i)] * l[(i, i)] > 1e-10 * scale) {
                return ch.solve(&xty);
            }
        }
    }
    let penalty = ridge_scale * xtx.trace() / p as f64;
    let ridge = xtx + DMatrix::identity(p, p) * penalty;
    ridge.cholesky().expect("ridge system is positive definite").solve(&xty)
}

/// Minimizes `(1/2n)|y - Xb|^2 + lambda * sum w_j |b_j|` for standardized `x`,
/// starting from `beta`. Infinite weights pin a coefficient at zero.
pub fn weighted_lasso(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    weights: &[f64],
    lambda: f64,
    beta: &mut DVector<f64>,
    tol: f64,
    max_sweeps: usize,
) {
    let n = x.nrows() as f64;
    let mut resid = y - x * &*beta;
    for _ in 0..max_sweeps {
        let mut max_change = 0.0f64;
        for j in 0..x.ncols() {
            let col = x.column(j);
            let old = beta[j];
            let z = col.dot(&resid) / n + old;
            let new = soft_threshold(z, lambda * weights[j]);
            if new != old {
                resid.axpy(old - new, &col, 1.0);
                beta[j] = new;
                max_change = max_change.max((new - old).abs());
            }
        }
        if max_change < tol {
            break;
        }
    }
}

pub fn soft_threshold(z: f64, t: f64) -> f64 {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

/// Fits the adaptive lasso path and returns the minimum-BIC fit.
pub fn adaptive_lasso(x: &DMatrix<f64>, y: &DVector<f64>, options: &LassoOptions) -> LassoFit {
    let n = x.nrows();
    let s = standardize(x, y);
    let p = s.x.ncols();
    let null_rss = s.y.norm_squared();
    let null_fit = LassoFit {
        coefficients: vec![0.0; x.ncols()],
        intercept: s.y_mean,
        lambda: f64::INFINITY,
        bic: score(options.criterion, n, p, null_rss, 0, null_rss),
        df: 0,
    };
    if p == 0 || n < 2 {
        return null_fit;
    }

    let init = initial_estimate(&s.x, &s.y, options.ridge_scale);
    let weights: Vec<f64> = init.iter().map(|b| b.abs().powf(-options.gamma)).collect();
    let xty = s.x.transpose() * &s.y / n as f64;
    let lambda_max = (0..p)
        .filter(|&j| weights[j].is_finite())
        .map(|j| xty[j].abs() / weights[j])
        .fold(0.0, f64::max);
    if lambda_max <= 0.0 {
        return null_fit;
    }

    let mut best = null_fit;
    let mut beta = DVector::zeros(p);
    let steps = options.grid_size.max(2) - 1;
    for g in 0..=steps {
        let lambda = lambda_max * 10f64.powf(-options.grid_decades * g as f64 / steps as f64);
        weighted_lasso(&s.x, &s.y, &weights, lambda, &mut beta, options.tol, options.max_sweeps);
        let df = beta.iter().filter(|b| **b != 0.0).count();
        // Saturated fits have no residual degrees of freedom; BIC is meaningless there.
        if df + 1 >= n || df as f64 > options.max_df_fraction * n as f64 {
            break;
        }
        let rss = if options.refit_bic { refit_rss(&s.x, &s.y, &beta) } else { (&s.y - &s.x * &beta).norm_squared() };
        let score = score(options.criterion, n, p, rss, df, null_rss);
        if score < best.bic {
            let mut coefficients = vec![0.0; x.ncols()];
            let mut intercept = s.y_mean;
            for (k, &j) in s.kept.iter().enumerate() {
                let b = beta[k] / s.scales[k];
                coefficients[j] = b;
                intercept -= b * s.means[k];
            }
            best = LassoFit { coefficients, intercept, lambda, bic: score, df };
        }
    }
    best
}

/// Residual sum of squares of least squares on the support of `beta`; falls
/// back to the lasso residual when the support columns are collinear.
fn refit_rss(x: &DMatrix<f64>, y: &DVector<f64>, beta: &DVector<f64>) -> f64 {
    let support: Vec<usize> = (0..beta.len()).filter(|&j| beta[j] != 0.0).collect();
    if support.is_empty() {
        return y.norm_squared();
    }
    let xs = x.select_columns(&support);
    let xtx = xs.transpose() * &xs;
    let scale = xtx.diagonal().max();
    if let Some(ch) = xtx.cholesky() {
        let l = ch.l_dirty();
        if (0..support.len()).all(|i| l[(i, i)] * l[(i, i)] > 1e-10 * scale) {
            let b = ch.solve(&(xs.transpose() * y));
            return (y - xs * b).norm_squared();
        }
    }
    (y - x * beta).norm_squared()
}

fn score(criterion: Criterion, n: usize, p: usize, rss: f64, df: usize, null_rss: f64) -> f64 {
    let floor = 1e-12 * null_rss.max(f64::MIN_POSITIVE);
    criterion.score(n, p, rss.max(floor), df)
}
