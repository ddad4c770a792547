//! Model-identification simulation: draw a sparse true model, simulate
//! responses on a design, select terms with the adaptive lasso and count exact
//! recoveries.

pub mod lasso;

use std::collections::BTreeSet;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};
use rayon::prelude::*;
use serde::Serialize;

use crate::design::Design;
use crate::error::{Error, Result};
pub use lasso::{adaptive_lasso, Criterion, LassoFit, LassoOptions};

pub const DEFAULT_SIGMAS: [f64; 7] = [0.1, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5];
pub const BIG: (f64, f64) = (1.5, 2.5);
pub const SMALL: (f64, f64) = (0.1, 0.3);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Effect {
    /// Main effect of placeholder factor `F(i+1)`.
    Main(usize),
    Interaction(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Size {
    Big,
    Small,
}

impl Size {
    fn range(self) -> (f64, f64) {
        match self {
            Size::Big => BIG,
            Size::Small => SMALL,
        }
    }
}

/// Model template such as `F1+F2+F1F3` with sizes `b+s+s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shape {
    pub effects: Vec<Effect>,
    pub sizes: Vec<Size>,
}

fn parse_factor(s: &str) -> Option<usize> {
    s.parse::<usize>().ok().filter(|&i| i >= 1).map(|i| i - 1)
}

fn parse_effect(tok: &str) -> Result<Effect> {
    let bad = || Error::Parse(format!("bad model term `{tok}`"));
    let parts: Vec<&str> = tok.trim().split('F').collect();
    match parts.as_slice() {
        ["", a] => Ok(Effect::Main(parse_factor(a).ok_or_else(bad)?)),
        ["", a, b] => {
            let (a, b) = (parse_factor(a).ok_or_else(bad)?, parse_factor(b).ok_or_else(bad)?);
            if a == b {
                return Err(bad());
            }
            Ok(Effect::Interaction(a.min(b), a.max(b)))
        }
        _ => Err(bad()),
    }
}

impl Shape {
    pub fn parse(model: &str, sizes: &str) -> Result<Shape> {
        let effects = model.split('+').map(parse_effect).collect::<Result<Vec<_>>>()?;
        let sizes = sizes
            .split('+')
            .map(|s| match s.trim() {
                "b" => Ok(Size::Big),
                "s" => Ok(Size::Small),
                other => Err(Error::Parse(format!("bad size `{other}`"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if effects.len() != sizes.len() {
            return Err(Error::Parse(format!("{} terms but {} sizes", effects.len(), sizes.len())));
        }
        if effects.iter().collect::<BTreeSet<_>>().len() != effects.len() {
            return Err(Error::Parse(format!("repeated term in `{model}`")));
        }
        Ok(Shape { effects, sizes })
    }

    /// Number of distinct factors referenced.
    pub fn arity(&self) -> usize {
        self.effects
            .iter()
            .map(|e| match *e {
                Effect::Main(a) => a + 1,
                Effect::Interaction(_, b) => b + 1,
            })
            .max()
            .unwrap_or(0)
    }

    pub fn model_string(&self) -> String {
        self.effects
            .iter()
            .map(|e| match *e {
                Effect::Main(a) => format!("F{}", a + 1),
                Effect::Interaction(a, b) => format!("F{}F{}", a + 1, b + 1),
            })
            .collect::<Vec<_>>()
            .join("+")
    }

    pub fn sizes_string(&self) -> String {
        self.sizes.iter().map(|s| if *s == Size::Big { "b" } else { "s" }).collect::<Vec<_>>().join("+")
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.model_string(), self.sizes_string())
    }
}

const BUILTIN: [(&str, &str); 35] = [
    ("F1", "b"),
    ("F1", "s"),
    ("F1+F2", "b+b"),
    ("F1+F2", "b+s"),
    ("F1+F2", "s+s"),
    ("F1+F1F2", "b+b"),
    ("F1+F1F2", "b+s"),
    ("F1+F1F2", "s+s"),
    ("F1+F2+F1F2", "b+b+b"),
    ("F1+F2+F1F2", "b+b+s"),
    ("F1+F2+F1F2", "b+s+b"),
    ("F1+F2+F1F2", "b+s+s"),
    ("F1+F2+F1F2", "s+s+s"),
    ("F1+F2+F3", "b+b+b"),
    ("F1+F2+F3", "b+b+s"),
    ("F1+F2+F3", "b+s+s"),
    ("F1+F2+F3", "s+s+s"),
    ("F1+F2+F1F3", "b+b+b"),
    ("F1+F2+F1F3", "b+b+s"),
    ("F1+F2+F1F3", "b+s+b"),
    ("F1+F2+F1F3", "b+s+s"),
    ("F1+F2+F1F3", "s+b+s"),
    ("F1+F2+F1F3", "s+s+s"),
    ("F1+F2+F3+F1F3", "b+b+b+b"),
    ("F1+F2+F3+F1F3", "b+b+s+s"),
    ("F1+F2+F3+F1F3", "b+s+s+b"),
    ("F1+F2+F3+F1F3", "s+s+s+s"),
    ("F1+F2+F3+F1F3+F2F3", "b+b+b+b+b"),
    ("F1+F2+F3+F1F3+F2F3", "b+b+s+s+s"),
    ("F1+F2+F3+F1F3+F2F3", "b+s+s+b+b"),
    ("F1+F2+F3+F1F3+F2F3", "s+s+s+s+s"),
    ("F1+F2+F3+F4+F5+F1F2", "b+b+b+b+b+b"),
    ("F1+F2+F3+F4+F5+F1F2", "b+b+s+s+s+s"),
    ("F1+F2+F3+F4+F5+F1F2", "b+s+s+b+b+b"),
    ("F1+F2+F3+F4+F5+F1F2", "s+s+s+s+s+s"),
];

/// The 35 benchmark shapes, in row order.
pub fn builtin_shapes() -> Vec<Shape> {
    BUILTIN.iter().map(|(m, s)| Shape::parse(m, s).expect("builtin shapes parse")).collect()
}

/// Resolves `rowN`, `rowA-B`, `all`, or comma-separated mixes of these.
pub fn select_builtin(spec: &str) -> Result<Vec<Shape>> {
    let all = builtin_shapes();
    let mut out = Vec::new();
    for part in spec.split(',').map(str::trim) {
        if part == "all" {
            out.extend(all.iter().cloned());
            continue;
        }
        let body = part.strip_prefix("row").ok_or_else(|| Error::Parse(format!("bad shape selector `{part}`")))?;
        let (lo, hi) = match body.split_once('-') {
            Some((a, b)) => (a, b),
            None => (body, body),
        };
        let parse = |s: &str| s.parse::<usize>().ok().filter(|&i| (1..=all.len()).contains(&i));
        match (parse(lo), parse(hi)) {
            (Some(lo), Some(hi)) if lo <= hi => out.extend(all[lo - 1..hi].iter().cloned()),
            _ => return Err(Error::Parse(format!("bad shape selector `{part}`"))),
        }
    }
    Ok(out)
}

/// Reads `model,sizes` lines; blank lines and `#` comments are skipped.
pub fn parse_shape_file(text: &str) -> Result<Vec<Shape>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let (m, s) = l.split_once(',').ok_or_else(|| Error::Parse(format!("expected `model,sizes`: `{l}`")))?;
            Shape::parse(m, s)
        })
        .collect()
}

/// Candidate terms: every main effect, then every pair in lexicographic order.
pub fn candidate_terms(m: usize) -> Vec<Effect> {
    let mut terms: Vec<Effect> = (0..m).map(Effect::Main).collect();
    for a in 0..m {
        for b in a + 1..m {
            terms.push(Effect::Interaction(a, b));
        }
    }
    terms
}

/// Linear contrast columns for the given terms.
pub fn term_matrix(design: &Design, terms: &[Effect]) -> DMatrix<f64> {
    DMatrix::from_fn(design.n(), terms.len(), |r, t| match terms[t] {
        Effect::Main(a) => design.get(r, a),
        Effect::Interaction(a, b) => design.get(r, a) * design.get(r, b),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrueModel {
    /// Design columns standing in for `F1..Fp`.
    pub active_factors: Vec<usize>,
    /// Terms in design-column indices, with coefficients and size tags.
    pub terms: Vec<(Effect, f64, Size)>,
    pub sigma: f64,
}

impl TrueModel {
    pub fn support(&self, m: usize) -> BTreeSet<usize> {
        let cands = candidate_terms(m);
        self.terms.iter().map(|(e, _, _)| cands.iter().position(|c| c == e).expect("term is a candidate")).collect()
    }
}

fn uniform(range: (f64, f64)) -> Uniform<f64> {
    Uniform::new_inclusive(range.0, range.1).expect("valid range")
}

pub fn sample_true_model<R: Rng + ?Sized>(m: usize, shape: &Shape, sigma: f64, rng: &mut R) -> Result<TrueModel> {
    let p = shape.arity();
    if p > m {
        return Err(Error::InvalidConfig(format!("shape {shape} needs {p} factors but the design has {m}")));
    }
    let active_factors = sample(rng, m, p).into_vec();
    let terms = shape
        .effects
        .iter()
        .zip(&shape.sizes)
        .map(|(e, &size)| {
            let mapped = match *e {
                Effect::Main(a) => Effect::Main(active_factors[a]),
                Effect::Interaction(a, b) => {
                    let (x, y) = (active_factors[a], active_factors[b]);
                    Effect::Interaction(x.min(y), x.max(y))
                }
            };
            (mapped, uniform(size.range()).sample(rng), size)
        })
        .collect();
    Ok(TrueModel { active_factors, terms, sigma })
}

/// `y = X_active b + e` with zero intercept and `e ~ N(0, sigma^2)`.
pub fn generate_response<R: Rng + ?Sized>(design: &Design, model: &TrueModel, rng: &mut R) -> DVector<f64> {
    let effects: Vec<Effect> = model.terms.iter().map(|t| t.0).collect();
    let x = term_matrix(design, &effects);
    let beta = DVector::from_iterator(effects.len(), model.terms.iter().map(|t| t.1));
    let mut y = x * beta;
    if model.sigma > 0.0 {
        let noise = Normal::new(0.0, model.sigma).expect("finite sigma");
        for v in y.iter_mut() {
            *v += noise.sample(rng);
        }
    }
    y
}

pub fn identify_model(fit: &LassoFit, truth: &BTreeSet<usize>) -> bool {
    fit.support().into_iter().collect::<BTreeSet<_>>() == *truth
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub shape: Shape,
    pub sigmas: Vec<f64>,
    pub inner_reps: usize,
    pub outer_reps: usize,
    pub seed: u64,
    pub lasso: LassoOptions,
}

impl Scenario {
    pub fn new(shape: Shape, sigmas: Vec<f64>, seed: u64) -> Self {
        Scenario { shape, sigmas, inner_reps: 100, outer_reps: 50, seed, lasso: LassoOptions::default() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SigmaResult {
    pub sigma: f64,
    pub mean_pct: f64,
    pub sd_pct: f64,
    pub replicate_pcts: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SimulationResult {
    pub shape: Shape,
    pub by_sigma: Vec<SigmaResult>,
}

fn replicate_rng(seed: u64, sigma_idx: usize, rep: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((sigma_idx as u64) << 32) | rep as u64);
    rng
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let sd = if xs.len() > 1 { (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt() } else { 0.0 };
    (mean, sd)
}

/// Outer replicates draw a true model, inner replicates redraw the noise.
/// Each (sigma, replicate) pair owns its own RNG stream, so the result does
/// not depend on thread count.
pub fn run_scenario(design: &Design, scenario: &Scenario) -> Result<SimulationResult> {
    let m = design.m();
    if scenario.shape.arity() > m {
        return Err(Error::InvalidConfig(format!("shape {} needs more factors than the design has", scenario.shape)));
    }
    if scenario.inner_reps == 0 || scenario.outer_reps == 0 {
        return Err(Error::InvalidConfig("replicate counts must be positive".into()));
    }
    let x = term_matrix(design, &candidate_terms(m));
    let mut by_sigma = Vec::with_capacity(scenario.sigmas.len());
    for (si, &sigma) in scenario.sigmas.iter().enumerate() {
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(Error::InvalidConfig(format!("sigma must be finite and non-negative, got {sigma}")));
        }
        let replicate_pcts: Vec<f64> = (0..scenario.outer_reps)
            .into_par_iter()
            .map(|rep| {
                let mut rng = replicate_rng(scenario.seed, si, rep);
                let truth = sample_true_model(m, &scenario.shape, sigma, &mut rng).expect("arity checked");
                let support = truth.support(m);
                let hits = (0..scenario.inner_reps)
                    .filter(|_| {
                        let y = generate_response(design, &truth, &mut rng);
                        identify_model(&adaptive_lasso(&x, &y, &scenario.lasso), &support)
                    })
                    .count();
                100.0 * hits as f64 / scenario.inner_reps as f64
            })
            .collect();
        let (mean_pct, sd_pct) = mean_sd(&replicate_pcts);
        by_sigma.push(SigmaResult { sigma, mean_pct, sd_pct, replicate_pcts });
    }
    Ok(SimulationResult { shape: scenario.shape.clone(), by_sigma })
}

#[derive(Serialize)]
struct ResultRow<'a> {
    shape: &'a str,
    sizes: &'a str,
    sigma: f64,
    mean_pct: String,
    sd_pct: String,
}

#[derive(Serialize)]
struct BoxplotRow<'a> {
    shape: &'a str,
    sizes: &'a str,
    sigma: f64,
    replicate: usize,
    pct: f64,
}

/// Summary table: `shape,sizes,sigma,mean_pct,sd_pct`.
pub fn write_results<W: Write>(results: &[SimulationResult], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in results {
        let (shape, sizes) = (r.shape.model_string(), r.shape.sizes_string());
        for s in &r.by_sigma {
            w.serialize(ResultRow {
                shape: &shape,
                sizes: &sizes,
                sigma: s.sigma,
                mean_pct: format!("{:.2}", s.mean_pct),
                sd_pct: format!("{:.2}", s.sd_pct),
            })?;
        }
    }
    w.flush()?;
    Ok(())
}

/// One row per outer replicate, for box plots.
pub fn write_boxplot_data<W: Write>(results: &[SimulationResult], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in results {
        let (shape, sizes) = (r.shape.model_string(), r.shape.sizes_string());
        for s in &r.by_sigma {
            for (i, &pct) in s.replicate_pcts.iter().enumerate() {
                w.serialize(BoxplotRow { shape: &shape, sizes: &sizes, sigma: s.sigma, replicate: i + 1, pct })?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

impl FromStr for Shape {
    type Err = Error;

    /// `model:sizes`, e.g. `F1+F2+F1F2:b+s+b`.
    fn from_str(s: &str) -> Result<Shape> {
        let (m, z) = s.split_once(':').ok_or_else(|| Error::Parse(format!("expected `model:sizes`, got `{s}`")))?;
        Shape::parse(m, z)
    }
}
