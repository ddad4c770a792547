//! Uncommon-parameter dispersions and the A-ComVar objective.
//!
//! For model `i` the dispersion is `Var(b_2i) / sigma^2`, the last diagonal
//! entry of `(X'X)^-1`; with `k > 1` interaction terms it is the determinant
//! of the bottom-right `k x k` block. The objective rewards a small average
//! dispersion and penalizes spread across models:
//!
//! `f(d; phi) = (1 / mean) / (1 + phi * sum_i (d_i - mean)^2)`

use nalgebra::DMatrix;
use serde::Serialize;

use crate::design::{build_model_matrix, enumerate_models, Design, ModelClass, ModelMatrix, ModelSpec};
use crate::error::{Error, Result};

pub const DEFAULT_PHI: f64 = 1e14;
pub const DEFAULT_CV_TOL: f64 = 1e-9;

/// Pivots of the Cholesky factor below this fraction of the largest diagonal
/// entry of `X'X` mark the matrix as singular.
const SINGULAR_RTOL: f64 = 1e-10;

/// `(X'X)^-1` for a full-column-rank model matrix.
pub fn fisher_inverse(matrix: &ModelMatrix) -> Result<DMatrix<f64>> {
    let x = &matrix.values;
    let singular = || Error::Singular { model: matrix.label.clone() };
    if x.nrows() < x.ncols() {
        return Err(singular());
    }
    let info = x.transpose() * x;
    let scale = info.diagonal().max();
    if scale <= 0.0 {
        return Err(singular());
    }
    let chol = info.cholesky().ok_or_else(singular)?;
    let l = chol.l_dirty();
    let min_pivot = (0..l.nrows()).map(|i| l[(i, i)] * l[(i, i)]).fold(f64::INFINITY, f64::min);
    if min_pivot <= SINGULAR_RTOL * scale {
        return Err(singular());
    }
    let inv = chol.inverse();
    Ok((&inv + inv.transpose()) * 0.5)
}

/// Determinant of the bottom-right `k x k` block of a square matrix.
pub fn trailing_block_det(inv: &DMatrix<f64>, k: usize) -> f64 {
    let p = inv.nrows();
    if k == 1 {
        return inv[(p - 1, p - 1)];
    }
    inv.view((p - k, p - k), (k, k)).clone_owned().determinant()
}

/// Dispersion of the uncommon parameters of one model.
pub fn uncommon_dispersion(design: &Design, model: &ModelSpec, num_levels: u8) -> Result<f64> {
    let x = build_model_matrix(design, model, num_levels);
    let inv = fisher_inverse(&x)?;
    Ok(trailing_block_det(&inv, model.terms.len()))
}

/// Mean of the dispersions; infinite when any model is singular.
pub fn mean(dispersions: &[f64]) -> f64 {
    dispersions.iter().sum::<f64>() / dispersions.len() as f64
}

/// `f(d; phi)`; zero when any dispersion is not finite.
pub fn objective(dispersions: &[f64], phi: f64) -> f64 {
    if dispersions.is_empty() || dispersions.iter().any(|d| !d.is_finite()) {
        return 0.0;
    }
    let avg = mean(dispersions);
    let spread: f64 = dispersions.iter().map(|d| (d - avg).powi(2)).sum();
    (1.0 / avg) / (1.0 + phi * spread)
}

/// `min_i d_i / max_i d_i`; zero when any dispersion is not finite.
pub fn acv_ratio(dispersions: &[f64]) -> f64 {
    if dispersions.is_empty() || dispersions.iter().any(|d| !d.is_finite()) {
        return 0.0;
    }
    let lo = dispersions.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = dispersions.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    lo / hi
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitnessReport {
    /// One entry per candidate model; `f64::INFINITY` for singular models.
    pub dispersions: Vec<f64>,
    pub mean_dispersion: f64,
    pub objective: f64,
    pub r_acv: f64,
    pub is_cv: bool,
    /// One-based indices of models with singular information matrices.
    pub singular_models: Vec<usize>,
}

impl FitnessReport {
    pub fn from_dispersions(dispersions: Vec<f64>, phi: f64, cv_tol: f64) -> Self {
        let singular_models: Vec<usize> = dispersions
            .iter()
            .enumerate()
            .filter(|(_, d)| !d.is_finite())
            .map(|(i, _)| i + 1)
            .collect();
        let r_acv = acv_ratio(&dispersions);
        Self {
            mean_dispersion: if singular_models.is_empty() { mean(&dispersions) } else { f64::INFINITY },
            objective: objective(&dispersions, phi),
            is_cv: singular_models.is_empty() && r_acv >= 1.0 - cv_tol,
            r_acv,
            singular_models,
            dispersions,
        }
    }
}

/// Evaluates a design against every model of `class`. Singular models do not
/// raise; they are listed in the report and force the objective to zero.
pub fn evaluate(design: &Design, class: &ModelClass, phi: f64, cv_tol: f64) -> FitnessReport {
    let models = enumerate_models(class);
    evaluate_models(design, class.num_levels(), &models, phi, cv_tol)
}

/// Same as [`evaluate`] with a precomputed model list.
pub fn evaluate_models(
    design: &Design,
    num_levels: u8,
    models: &[ModelSpec],
    phi: f64,
    cv_tol: f64,
) -> FitnessReport {
    let dispersions = models
        .iter()
        .map(|model| uncommon_dispersion(design, model, num_levels).unwrap_or(f64::INFINITY))
        .collect();
    FitnessReport::from_dispersions(dispersions, phi, cv_tol)
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelEntry {
    pub index: usize,
    pub interaction: String,
    pub dispersion: Option<f64>,
}

/// JSON form of a [`FitnessReport`].
#[derive(Debug, Clone, Serialize)]
pub struct ReportJson {
    pub m: usize,
    pub levels: u8,
    pub n: usize,
    pub k: usize,
    pub phi: f64,
    pub models: Vec<ModelEntry>,
    pub mean_dispersion: Option<f64>,
    pub objective: f64,
    pub r_acv: f64,
    pub is_cv: bool,
    pub singular_models: Vec<usize>,
}

impl ReportJson {
    pub fn new(report: &FitnessReport, design: &Design, class: &ModelClass, phi: f64) -> Self {
        let names = design.names();
        let finite = |v: f64| v.is_finite().then_some(v);
        let models = enumerate_models(class)
            .iter()
            .zip(&report.dispersions)
            .map(|(model, &d)| ModelEntry {
                index: model.index,
                interaction: model.label(names),
                dispersion: finite(d),
            })
            .collect();
        Self {
            m: class.m(),
            levels: class.num_levels(),
            n: design.n(),
            k: class.k(),
            phi,
            models,
            mean_dispersion: finite(report.mean_dispersion),
            objective: report.objective,
            r_acv: report.r_acv,
            is_cv: report.is_cv,
            singular_models: report.singular_models.clone(),
        }
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
