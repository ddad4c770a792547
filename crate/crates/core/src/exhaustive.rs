//! Exhaustive census of all `n`-point subsets of a full factorial.
//!
//! Every subset is classified exactly. With `C` the integer information
//! matrix of the mean and main effects, `d = det(C)` and `R = d * C^-1`, the
//! uncommon block of model `i` has Schur complement
//! `S_i = G_ii - B_i' C^-1 B_i`, so `T_i = d * S_i = d * G_ii - B_i' R B_i` is
//! an integer matrix and the model's dispersion is `d^k / det(T_i)`. One
//! fraction-free elimination per subset therefore classifies all models.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::design::{factorial_point, Design, DesignProblem, ModelClass};
use crate::design::{default_factor_name, enumerate_models, level_set, Term};
use crate::error::{Error, Result};
use crate::exact::{bareiss_det, psd_scaled_inverse, Rational};

pub const DEFAULT_BUDGET: u128 = 20_000_000;

/// Exact binomial coefficient; saturates at `u128::MAX`.
pub fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Lexicographic rank ↔ subset conversion for `n`-subsets of `0..big_n`.
#[derive(Debug, Clone)]
struct Combinations {
    big_n: usize,
    n: usize,
}

impl Combinations {
    fn unrank(&self, mut rank: u128) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.n);
        let mut x = 0usize;
        for i in 0..self.n {
            loop {
                let remaining = (self.n - i - 1) as u128;
                let count = binomial((self.big_n - x - 1) as u128, remaining);
                if rank < count {
                    break;
                }
                rank -= count;
                x += 1;
            }
            out.push(x);
            x += 1;
        }
        out
    }

    fn rank(&self, subset: &[usize]) -> u128 {
        let mut rank = 0u128;
        let mut prev = 0usize;
        for (i, &x) in subset.iter().enumerate() {
            for y in prev..x {
                rank += binomial((self.big_n - y - 1) as u128, (self.n - i - 1) as u128);
            }
            prev = x + 1;
        }
        rank
    }

    /// Advance to the next subset; returns the leftmost changed position.
    fn advance(&self, idx: &mut [usize]) -> Option<usize> {
        let (n, big_n) = (self.n, self.big_n);
        let mut i = n;
        while i > 0 && idx[i - 1] == big_n - n + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return None;
        }
        idx[i - 1] += 1;
        for j in i..n {
            idx[j] = idx[j - 1] + 1;
        }
        Some(i - 1)
    }
}

/// Outcome of exact classification of one design.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExactClass {
    /// Some model's information matrix is singular.
    RankDeficient,
    NonCv,
    Cv(Rational),
}

/// Column layout of a model class over integer contrasts, optionally with
/// the outer products of every full factorial point.
struct Lattice {
    /// Columns: mean, mains, then one column per base interaction term.
    dim: usize,
    common: usize,
    k: usize,
    /// For every model, its term column offsets (relative to `common`).
    model_terms: Vec<Vec<usize>>,
    num_terms: usize,
    levels: u8,
    base: Vec<Term>,
    /// Flattened `dim x dim` outer product per lattice point.
    outer: Vec<Vec<i64>>,
}

impl Lattice {
    fn new(class: &ModelClass) -> Self {
        let base = class.base_terms();
        let common = 1 + class.main_effect_columns();
        let model_terms = enumerate_models(class)
            .iter()
            .map(|model| model.terms.iter().map(|t| base.iter().position(|b| b == t).expect("base term")).collect())
            .collect();
        Self {
            dim: common + base.len(),
            common,
            k: class.k(),
            model_terms,
            num_terms: base.len(),
            levels: class.num_levels(),
            base,
            outer: Vec::new(),
        }
    }

    fn with_point_table(mut self, m: usize) -> Self {
        let count = (self.levels as usize).pow(m as u32);
        self.outer = (0..count)
            .map(|p| {
                let v = self.contrast_vector(&factorial_point(p as u128, m, self.levels));
                self.outer_product(&v)
            })
            .collect();
        self
    }

    fn outer_product(&self, v: &[i64]) -> Vec<i64> {
        let dim = self.dim;
        let mut o = vec![0i64; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                o[i * dim + j] = v[i] * v[j];
            }
        }
        o
    }

    fn contrast_vector(&self, point: &[f64]) -> Vec<i64> {
        let mut v = Vec::with_capacity(self.dim);
        v.push(1i64);
        for &x in point {
            let x = x as i64;
            v.push(x);
            if self.levels == 3 {
                v.push(3 * x * x - 2);
            }
        }
        v.extend(self.base.iter().map(|t| t.value(point) as i64));
        v
    }

    /// `d = det(C)` and `det(T_i)` for every model; `None` when any model is
    /// singular.
    fn model_dets(&self, g: &[i64]) -> Option<(i128, Vec<i128>)> {
        let (dim, c, k) = (self.dim, self.common, self.k);
        let cblock: Vec<i128> = (0..c).flat_map(|i| (0..c).map(move |j| g[i * dim + j] as i128)).collect();
        let (d, r) = psd_scaled_inverse(&cblock, c)?;
        // u_t = R b_t for every base term column.
        let u: Vec<Vec<i128>> = (0..self.num_terms)
            .map(|t| {
                let col = c + t;
                (0..c).map(|i| (0..c).map(|j| r[i * c + j] * g[j * dim + col] as i128).sum()).collect()
            })
            .collect();
        let t_entry = |s: usize, t: usize| -> i128 {
            let (cs, ct) = (c + s, c + t);
            let quad: i128 = (0..c).map(|i| g[i * dim + cs] as i128 * u[t][i]).sum();
            d * g[cs * dim + ct] as i128 - quad
        };
        let mut dets = Vec::with_capacity(self.model_terms.len());
        for terms in &self.model_terms {
            let det = if k == 1 {
                t_entry(terms[0], terms[0])
            } else {
                let mut block: Vec<i128> =
                    terms.iter().flat_map(|&s| terms.iter().map(move |&t| (s, t))).map(|(s, t)| t_entry(s, t)).collect();
                bareiss_det(&mut block, k)
            };
            if det == 0 {
                return None;
            }
            dets.push(det);
        }
        Some((d, dets))
    }

    fn classify_gram(&self, g: &[i64]) -> ExactClass {
        let Some((d, dets)) = self.model_dets(g) else {
            return ExactClass::RankDeficient;
        };
        if dets.iter().any(|&v| v != dets[0]) {
            return ExactClass::NonCv;
        }
        ExactClass::Cv(Rational::new(self.power(d), dets[0]))
    }

    fn power(&self, d: i128) -> i128 {
        (0..self.k).fold(1i128, |acc, _| acc * d)
    }

    fn gram(&self, design: &Design) -> Result<Vec<i64>> {
        let set = level_set(self.levels);
        let mut g = vec![0i64; self.dim * self.dim];
        for row in design.rows() {
            if !row.iter().all(|v| set.contains(v)) {
                return Err(Error::InvalidDesign("exact classification needs a lattice design".into()));
            }
            let v = self.contrast_vector(row);
            for i in 0..self.dim {
                for j in 0..self.dim {
                    g[i * self.dim + j] += v[i] * v[j];
                }
            }
        }
        Ok(g)
    }

    fn point_index(row: &[f64], levels: u8) -> Option<usize> {
        let set = level_set(levels);
        row.iter().try_fold(0usize, |acc, v| {
            let digit = set.iter().position(|l| l == v)?;
            Some(acc * levels as usize + digit)
        })
    }
}

fn check_factors(design: &Design, class: &ModelClass) -> Result<()> {
    if design.m() != class.m() {
        return Err(Error::InvalidDesign(format!(
            "design has {} factors, model class has {}",
            design.m(),
            class.m()
        )));
    }
    Ok(())
}

/// Exact dispersions of one lattice design, `None` when any model is
/// singular.
pub fn exact_dispersions(design: &Design, class: &ModelClass) -> Result<Option<Vec<Rational>>> {
    check_factors(design, class)?;
    let lattice = Lattice::new(class);
    let g = lattice.gram(design)?;
    Ok(lattice
        .model_dets(&g)
        .map(|(d, dets)| dets.into_iter().map(|t| Rational::new(lattice.power(d), t)).collect()))
}

/// Exact CV classification of one lattice design.
pub fn classify(design: &Design, class: &ModelClass) -> Result<ExactClass> {
    check_factors(design, class)?;
    let lattice = Lattice::new(class);
    let g = lattice.gram(design)?;
    Ok(lattice.classify_gram(&g))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CvGroup {
    pub count: u64,
    /// Lexicographic rank of the first subset in the group.
    pub witness_rank: u128,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExhaustiveReport {
    pub m: usize,
    pub levels: u8,
    pub n: usize,
    pub k: usize,
    pub total_subsets: u128,
    pub rank_ok: u64,
    pub non_cv: u64,
    pub cv: u64,
    pub groups: BTreeMap<Rational, CvGroup>,
}

impl ExhaustiveReport {
    fn empty(problem: &DesignProblem, total: u128) -> Self {
        Self {
            m: problem.m(),
            levels: problem.num_levels(),
            n: problem.n(),
            k: problem.k(),
            total_subsets: total,
            rank_ok: 0,
            non_cv: 0,
            cv: 0,
            groups: BTreeMap::new(),
        }
    }

    /// Associative merge of two partial reports over disjoint ranges.
    pub fn merge(mut self, other: ExhaustiveReport) -> Self {
        self.rank_ok += other.rank_ok;
        self.non_cv += other.non_cv;
        self.cv += other.cv;
        for (value, g) in other.groups {
            self.groups
                .entry(value)
                .and_modify(|e| {
                    e.count += g.count;
                    e.witness_rank = e.witness_rank.min(g.witness_rank);
                })
                .or_insert(g);
        }
        self
    }

    /// Design of the subset with the given lexicographic rank.
    pub fn design_at(&self, rank: u128) -> Design {
        let comb = Combinations { big_n: (self.levels as usize).pow(self.m as u32), n: self.n };
        let rows = comb
            .unrank(rank)
            .into_iter()
            .map(|p| factorial_point(p as u128, self.m, self.levels))
            .collect();
        Design::new((0..self.m).map(default_factor_name).collect(), rows).expect("lattice design")
    }

    pub fn witness(&self, value: &Rational) -> Option<Design> {
        self.groups.get(value).map(|g| self.design_at(g.witness_rank))
    }

    pub fn to_json(&self) -> ExhaustiveJson {
        let groups = self
            .groups
            .iter()
            .map(|(v, g)| GroupJson { value_exact: format_ratio(v), value: round4(ratio_f64(v)), count: g.count })
            .collect();
        ExhaustiveJson {
            total: self.total_subsets,
            rank_ok: self.rank_ok,
            cv: self.cv,
            groups,
            optcv: optcv(self).map(|(v, _)| OptcvJson { value_exact: format_ratio(&v), value: round4(ratio_f64(&v)) }),
        }
    }
}

/// Smallest common-variance value with a witness design.
pub fn optcv(report: &ExhaustiveReport) -> Option<(Rational, Design)> {
    let (value, group) = report.groups.iter().next()?;
    Some((*value, report.design_at(group.witness_rank)))
}

pub fn ratio_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

pub fn format_ratio(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn round4(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}

#[derive(Debug, Clone, Serialize)]
pub struct GroupJson {
    pub value_exact: String,
    pub value: f64,
    pub count: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OptcvJson {
    pub value_exact: String,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExhaustiveJson {
    pub total: u128,
    pub rank_ok: u64,
    pub cv: u64,
    pub groups: Vec<GroupJson>,
    pub optcv: Option<OptcvJson>,
}

#[derive(Debug, Clone)]
pub struct ExhaustiveOptions {
    pub budget: u128,
    /// Number of disjoint rank ranges; does not affect the result.
    pub chunks: Option<usize>,
}

impl Default for ExhaustiveOptions {
    fn default() -> Self {
        Self { budget: DEFAULT_BUDGET, chunks: None }
    }
}

/// Full census of the `n`-subsets of the full factorial of `problem`.
/// Parallel width follows the ambient rayon pool.
pub fn exhaustive_search(problem: &DesignProblem, options: &ExhaustiveOptions) -> Result<ExhaustiveReport> {
    let big_n = problem.candidate_count();
    let total = binomial(big_n, problem.n() as u128);
    if total > options.budget {
        return Err(Error::BudgetExceeded { subsets: total, budget: options.budget });
    }
    let lattice = Lattice::new(problem.class()).with_point_table(problem.m());
    let comb = Combinations { big_n: big_n as usize, n: problem.n() };
    let chunks = options
        .chunks
        .unwrap_or_else(|| rayon::current_num_threads() * 32)
        .max(1) as u128;
    let step = total.div_ceil(chunks).max(1);
    let ranges: Vec<(u128, u128)> =
        (0..chunks).map(|i| (i * step, ((i + 1) * step).min(total))).filter(|(a, b)| a < b).collect();
    let partials: Vec<ExhaustiveReport> = ranges
        .par_iter()
        .map(|&(start, end)| scan_range(problem, &lattice, &comb, start, end))
        .collect();
    Ok(partials.into_iter().fold(ExhaustiveReport::empty(problem, total), ExhaustiveReport::merge))
}

/// Classifies the subsets with ranks in `start..end`.
fn scan_range(problem: &DesignProblem, lattice: &Lattice, comb: &Combinations, start: u128, end: u128) -> ExhaustiveReport {
    let mut report = ExhaustiveReport::empty(problem, 0);
    let n = comb.n;
    let d2 = lattice.dim * lattice.dim;
    let mut idx = comb.unrank(start);
    // prefix[i] holds the Gram matrix of the first i points.
    let mut prefix = vec![0i64; (n + 1) * d2];
    let refill = |prefix: &mut [i64], idx: &[usize], from: usize| {
        for i in from..n {
            let (lo, hi) = prefix.split_at_mut((i + 1) * d2);
            let src = &lo[i * d2..];
            for ((dst, s), o) in hi[..d2].iter_mut().zip(src).zip(&lattice.outer[idx[i]]) {
                *dst = s + o;
            }
        }
    };
    refill(&mut prefix, &idx, 0);
    let mut rank = start;
    while rank < end {
        match lattice.classify_gram(&prefix[n * d2..]) {
            ExactClass::RankDeficient => {}
            ExactClass::NonCv => {
                report.rank_ok += 1;
                report.non_cv += 1;
            }
            ExactClass::Cv(v) => {
                report.rank_ok += 1;
                report.cv += 1;
                report.groups.entry(v).and_modify(|g| g.count += 1).or_insert(CvGroup { count: 1, witness_rank: rank });
            }
        }
        rank += 1;
        if rank < end {
            let changed = comb.advance(&mut idx).expect("rank within range");
            refill(&mut prefix, &idx, changed);
        }
    }
    report
}

/// Uniformly random `n`-subset of the full factorial, as a design in
/// lexicographic row order.
pub fn random_subset<R: Rng + ?Sized>(problem: &DesignProblem, rng: &mut R) -> Design {
    let big_n = problem.candidate_count() as usize;
    let mut idx = rand::seq::index::sample(rng, big_n, problem.n()).into_vec();
    idx.sort_unstable();
    let rows = idx.into_iter().map(|p| factorial_point(p as u128, problem.m(), problem.num_levels())).collect();
    Design::new(problem.class().factor_names(), rows).expect("lattice design")
}

/// Lexicographic rank of a design whose rows are distinct lattice points.
pub fn subset_rank(design: &Design, problem: &DesignProblem) -> Option<u128> {
    let mut idx: Vec<usize> =
        design.rows().map(|r| Lattice::point_index(r, problem.num_levels())).collect::<Option<_>>()?;
    idx.sort_unstable();
    if idx.windows(2).any(|w| w[0] == w[1]) || idx.len() != problem.n() {
        return None;
    }
    Some(Combinations { big_n: problem.candidate_count() as usize, n: problem.n() }.rank(&idx))
}
