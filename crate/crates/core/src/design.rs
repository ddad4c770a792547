//! Factorial design problems, candidate points, candidate models and model
//! matrices.
//!
//! Two-level factors are coded `-1, +1`. Three-level factors are coded
//! `-1, 0, +1` and enter the model through the unnormalized orthogonal
//! polynomial contrasts `linear = x` and `quadratic = 3x^2 - 2`, which give
//! `(-1, 1)`, `(0, -2)` and `(1, 1)` on the lattice.

use std::collections::HashSet;
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const TWO_LEVELS: [f64; 2] = [-1.0, 1.0];
pub const THREE_LEVELS: [f64; 3] = [-1.0, 0.0, 1.0];

/// Coded level set of a factor with `num_levels` levels.
pub fn level_set(num_levels: u8) -> &'static [f64] {
    match num_levels {
        2 => &TWO_LEVELS,
        _ => &THREE_LEVELS,
    }
}

/// Default factor label for column `j`: `A`, `B`, ..., `Z`, then `X27`, ...
pub fn default_factor_name(j: usize) -> String {
    if j < 26 {
        char::from(b'A' + j as u8).to_string()
    } else {
        format!("X{}", j + 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorSpec {
    pub name: String,
    pub num_levels: u8,
}

impl FactorSpec {
    pub fn new(name: impl Into<String>, num_levels: u8) -> Self {
        Self { name: name.into(), num_levels }
    }
}

/// The family of candidate models: every factor's main effects plus `k`
/// two-factor interaction terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelClass {
    factors: Vec<FactorSpec>,
    k: usize,
}

impl ModelClass {
    pub fn new(factors: Vec<FactorSpec>, k: usize) -> Result<Self> {
        if factors.len() < 2 {
            return Err(Error::InvalidProblem(format!(
                "need at least 2 factors, got {}",
                factors.len()
            )));
        }
        if k == 0 {
            return Err(Error::InvalidProblem("k must be at least 1".into()));
        }
        let levels = factors[0].num_levels;
        let mut seen = HashSet::new();
        for f in &factors {
            if f.num_levels != 2 && f.num_levels != 3 {
                return Err(Error::InvalidProblem(format!(
                    "factor `{}` has {} levels; only 2 or 3 are supported",
                    f.name, f.num_levels
                )));
            }
            if f.num_levels != levels {
                return Err(Error::InvalidProblem(
                    "mixed-level factors are not supported".into(),
                ));
            }
            if !seen.insert(f.name.as_str()) {
                return Err(Error::InvalidProblem(format!("duplicate factor name `{}`", f.name)));
            }
        }
        let class = Self { factors, k };
        let base = class.base_terms().len();
        if k > base {
            return Err(Error::InvalidProblem(format!(
                "k = {k} exceeds the {base} available interaction terms"
            )));
        }
        Ok(class)
    }

    /// `m` factors named `A`, `B`, ... all with `num_levels` levels.
    pub fn uniform(m: usize, num_levels: u8, k: usize) -> Result<Self> {
        let factors = (0..m).map(|j| FactorSpec::new(default_factor_name(j), num_levels)).collect();
        Self::new(factors, k)
    }

    pub fn factors(&self) -> &[FactorSpec] {
        &self.factors
    }

    pub fn m(&self) -> usize {
        self.factors.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn num_levels(&self) -> u8 {
        self.factors[0].num_levels
    }

    pub fn factor_names(&self) -> Vec<String> {
        self.factors.iter().map(|f| f.name.clone()).collect()
    }

    /// Number of main-effect columns `q`.
    pub fn main_effect_columns(&self) -> usize {
        match self.num_levels() {
            2 => self.m(),
            _ => 2 * self.m(),
        }
    }

    /// Columns of every model matrix: mean, mains and `k` interactions.
    pub fn num_parameters(&self) -> usize {
        1 + self.main_effect_columns() + self.k
    }

    /// All single interaction terms, pair-major then component order.
    pub fn base_terms(&self) -> Vec<Term> {
        let m = self.m();
        let comps: &[Component] = match self.num_levels() {
            2 => &[Component::Plain],
            _ => &Component::THREE_LEVEL,
        };
        let mut terms = Vec::with_capacity(m * (m - 1) / 2 * comps.len());
        for a in 0..m {
            for b in a + 1..m {
                for &component in comps {
                    terms.push(Term { a, b, component });
                }
            }
        }
        terms
    }
}

/// A model class together with a run count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DesignProblem {
    class: ModelClass,
    n: usize,
}

impl DesignProblem {
    pub fn new(class: ModelClass, n: usize) -> Result<Self> {
        let p = class.num_parameters();
        if n < p {
            return Err(Error::InvalidProblem(format!(
                "{n} runs cannot estimate {p} parameters"
            )));
        }
        Ok(Self { class, n })
    }

    pub fn uniform(m: usize, num_levels: u8, n: usize, k: usize) -> Result<Self> {
        Self::new(ModelClass::uniform(m, num_levels, k)?, n)
    }

    pub fn class(&self) -> &ModelClass {
        &self.class
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.class.m()
    }

    pub fn k(&self) -> usize {
        self.class.k()
    }

    pub fn num_levels(&self) -> u8 {
        self.class.num_levels()
    }

    /// Size of the full factorial candidate set, `levels^m`.
    pub fn candidate_count(&self) -> u128 {
        (self.num_levels() as u128).pow(self.m() as u32)
    }
}

/// Decode the `index`-th point of the lexicographically ordered full
/// factorial (last factor varies fastest).
pub fn factorial_point(index: u128, m: usize, num_levels: u8) -> Vec<f64> {
    let levels = level_set(num_levels);
    let base = num_levels as u128;
    let mut point = vec![0.0; m];
    let mut rest = index;
    for j in (0..m).rev() {
        point[j] = levels[(rest % base) as usize];
        rest /= base;
    }
    point
}

/// Every point of the full factorial in lexicographic order of coded levels.
pub fn enumerate_full_factorial(factors: &[FactorSpec]) -> Vec<Vec<f64>> {
    let mut points: Vec<Vec<f64>> = vec![Vec::new()];
    for f in factors {
        let levels = level_set(f.num_levels);
        points = points
            .into_iter()
            .flat_map(|p| {
                levels.iter().map(move |&l| {
                    let mut q = p.clone();
                    q.push(l);
                    q
                })
            })
            .collect();
    }
    points
}

/// Main-effect contrast values of one coded level: the level itself for a
/// two-level factor, `(linear, quadratic)` for a three-level factor.
pub fn main_effect_contrasts(level: f64, num_levels: u8) -> Result<Vec<f64>> {
    let valid = matches!(num_levels, 2 | 3) && level_set(num_levels).contains(&level);
    if !valid {
        return Err(Error::InvalidLevel { level, num_levels });
    }
    Ok(match num_levels {
        2 => vec![level],
        _ => vec![linear(level), quadratic(level)],
    })
}

#[inline]
pub(crate) fn linear(x: f64) -> f64 {
    x
}

#[inline]
pub(crate) fn quadratic(x: f64) -> f64 {
    3.0 * x * x - 2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Component {
    /// Product of two two-level columns.
    Plain,
    LL,
    LQ,
    QL,
    QQ,
}

type Contrast = fn(f64) -> f64;

impl Component {
    pub const THREE_LEVEL: [Component; 4] =
        [Component::LL, Component::LQ, Component::QL, Component::QQ];

    fn tag(self) -> &'static str {
        match self {
            Component::Plain => "",
            Component::LL => "LL",
            Component::LQ => "LQ",
            Component::QL => "QL",
            Component::QQ => "QQ",
        }
    }

    /// Contrasts of the first and second factor used by this component.
    fn contrasts(self) -> (Contrast, Contrast) {
        match self {
            Component::Plain | Component::LL => (linear, linear),
            Component::LQ => (linear, quadratic),
            Component::QL => (quadratic, linear),
            Component::QQ => (quadratic, quadratic),
        }
    }
}

/// One two-factor interaction column: factors `a < b` (zero-based) and the
/// contrast component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    pub a: usize,
    pub b: usize,
    pub component: Component,
}

impl Term {
    pub fn new(a: usize, b: usize, component: Component) -> Self {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        Self { a, b, component }
    }

    /// Interaction value for one run.
    pub fn value(&self, row: &[f64]) -> f64 {
        let (fa, fb) = self.component.contrasts();
        fa(row[self.a]) * fb(row[self.b])
    }

    pub fn label(&self, names: &[String]) -> String {
        let (na, nb) = (&names[self.a], &names[self.b]);
        let pair = if na.chars().count() == 1 && nb.chars().count() == 1 {
            format!("{na}{nb}")
        } else {
            format!("{na}*{nb}")
        };
        match self.component {
            Component::Plain => pair,
            c => format!("{pair}.{}", c.tag()),
        }
    }
}

/// One candidate model, identified by its interaction terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelSpec {
    /// Ordinal in `1..=s`.
    pub index: usize,
    pub terms: Vec<Term>,
}

impl ModelSpec {
    pub fn label(&self, names: &[String]) -> String {
        self.terms.iter().map(|t| t.label(names)).collect::<Vec<_>>().join("+")
    }
}

/// The candidate models of a class, in deterministic order. For `k = 1`
/// there is one model per base term; for larger `k` every `k`-subset of the
/// base terms in lexicographic order of term indices.
pub fn enumerate_models(class: &ModelClass) -> Vec<ModelSpec> {
    let base = class.base_terms();
    k_subsets(base.len(), class.k())
        .into_iter()
        .enumerate()
        .map(|(i, idx)| ModelSpec {
            index: i + 1,
            terms: idx.into_iter().map(|t| base[t]).collect(),
        })
        .collect()
}

pub(crate) fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// An `n x m` matrix of coded factor levels.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    names: Vec<String>,
    data: Vec<f64>,
}

impl Design {
    pub fn new(names: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = names.len();
        if m == 0 {
            return Err(Error::InvalidDesign("a design needs at least one factor".into()));
        }
        let mut data = Vec::with_capacity(rows.len() * m);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(Error::InvalidDesign(format!(
                    "row {} has {} entries, expected {m}",
                    r + 1,
                    row.len()
                )));
            }
            if let Some(v) = row.iter().find(|v| !v.is_finite()) {
                return Err(Error::InvalidDesign(format!("row {} has non-finite value {v}", r + 1)));
            }
            data.extend_from_slice(row);
        }
        Ok(Self { names, data })
    }

    /// Design with default factor names.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = rows.first().map_or(0, Vec::len);
        Self::new((0..m).map(default_factor_name).collect(), rows)
    }

    pub fn n(&self) -> usize {
        self.data.len() / self.names.len()
    }

    pub fn m(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn row(&self, r: usize) -> &[f64] {
        let m = self.m();
        &self.data[r * m..(r + 1) * m]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.m())
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.m() + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        let m = self.m();
        self.data[r * m + c] = v;
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        self.rows().map(|r| r[c]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }

    /// Whether every entry lies in the coded level set.
    pub fn is_lattice(&self, num_levels: u8) -> bool {
        let levels = level_set(num_levels);
        self.data.iter().all(|v| levels.contains(v))
    }

    /// Smallest level count (2 or 3) whose lattice contains the design, or
    /// 3 for non-lattice designs.
    pub fn infer_levels(&self) -> u8 {
        if self.is_lattice(2) {
            2
        } else {
            3
        }
    }

    /// Same design with rows reordered by `perm` (row `i` of the result is
    /// row `perm[i]` of `self`).
    pub fn permute_rows(&self, perm: &[usize]) -> Design {
        let rows = perm.iter().map(|&r| self.row(r).to_vec()).collect();
        Design::new(self.names.clone(), rows).expect("permutation of a valid design")
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Design> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
        let names: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let row = rec
                .iter()
                .map(|s| {
                    s.parse::<f64>()
                        .map_err(|_| Error::Parse(format!("line {}: `{s}` is not a number", i + 2)))
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        Design::new(names, rows)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(&self.names)?;
        for row in self.rows() {
            wtr.write_record(row.iter().map(|v| format_level(*v)))?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Design> {
        Self::read_csv(std::fs::File::open(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is utf-8")
    }
}

/// Shortest decimal that parses back to the same value; `-0` prints as `0`.
pub fn format_level(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v}")
    }
}

impl fmt::Display for Design {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_csv_string())
    }
}

/// `X = (j_n, X_1, X_2)`: mean column, main-effect contrasts in factor order
/// and one column per interaction term.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelMatrix {
    pub values: DMatrix<f64>,
    /// Model label, used in error context.
    pub label: String,
    /// Number of leading columns shared by every model (mean plus mains).
    pub common_columns: usize,
}

impl ModelMatrix {
    pub fn nrows(&self) -> usize {
        self.values.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.values.ncols()
    }
}

/// Mean and main-effect columns of a design (`(j_n, X_1)`).
pub fn common_block(design: &Design, num_levels: u8) -> DMatrix<f64> {
    let (n, m) = (design.n(), design.m());
    let q = if num_levels == 2 { m } else { 2 * m };
    let mut x = DMatrix::zeros(n, 1 + q);
    for (r, row) in design.rows().enumerate() {
        x[(r, 0)] = 1.0;
        for (j, &v) in row.iter().enumerate() {
            if num_levels == 2 {
                x[(r, 1 + j)] = v;
            } else {
                x[(r, 1 + 2 * j)] = linear(v);
                x[(r, 2 + 2 * j)] = quadratic(v);
            }
        }
    }
    x
}

/// Interaction columns of a model (`X_2`).
pub fn interaction_block(design: &Design, model: &ModelSpec) -> DMatrix<f64> {
    DMatrix::from_fn(design.n(), model.terms.len(), |r, t| model.terms[t].value(design.row(r)))
}

pub fn build_model_matrix(design: &Design, model: &ModelSpec, num_levels: u8) -> ModelMatrix {
    let common = common_block(design, num_levels);
    let c = common.ncols();
    let k = model.terms.len();
    let mut values = common.resize_horizontally(c + k, 0.0);
    for (r, row) in design.rows().enumerate() {
        for (t, term) in model.terms.iter().enumerate() {
            values[(r, c + t)] = term.value(row);
        }
    }
    ModelMatrix { values, label: model.label(design.names()), common_columns: c }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn full_factorial_two_level_order() {
        let class = ModelClass::uniform(3, 2, 1).unwrap();
        let pts = enumerate_full_factorial(class.factors());
        let expected = vec![
            vec![-1.0, -1.0, -1.0],
            vec![-1.0, -1.0, 1.0],
            vec![-1.0, 1.0, -1.0],
            vec![-1.0, 1.0, 1.0],
            vec![1.0, -1.0, -1.0],
            vec![1.0, -1.0, 1.0],
            vec![1.0, 1.0, -1.0],
            vec![1.0, 1.0, 1.0],
        ];
        assert_eq!(pts, expected);
        for (i, p) in pts.iter().enumerate() {
            assert_eq!(&factorial_point(i as u128, 3, 2), p);
        }
    }

    #[test]
    fn full_factorial_single_and_three_level() {
        assert_eq!(enumerate_full_factorial(&[FactorSpec::new("A", 2)]), vec![vec![-1.0], vec![1.0]]);
        let class = ModelClass::uniform(3, 3, 1).unwrap();
        let pts = enumerate_full_factorial(class.factors());
        assert_eq!(pts.len(), 27);
        assert!(pts.iter().flatten().all(|v| THREE_LEVELS.contains(v)));
        for (i, p) in pts.iter().enumerate() {
            assert_eq!(&factorial_point(i as u128, 3, 3), p);
        }
    }

    #[test]
    fn contrasts() {
        assert_eq!(main_effect_contrasts(-1.0, 2).unwrap(), vec![-1.0]);
        assert_eq!(main_effect_contrasts(0.0, 3).unwrap(), vec![0.0, -2.0]);
        assert_eq!(main_effect_contrasts(1.0, 3).unwrap(), vec![1.0, 1.0]);
        assert_eq!(main_effect_contrasts(-1.0, 3).unwrap(), vec![-1.0, 1.0]);
        assert!(matches!(main_effect_contrasts(0.0, 2), Err(Error::InvalidLevel { .. })));
        assert!(main_effect_contrasts(2.0, 3).is_err());
        assert!(main_effect_contrasts(1.0, 4).is_err());
    }

    #[test]
    fn model_counts() {
        let names: Vec<String> = ["A", "B", "C"].iter().map(|s| s.to_string()).collect();
        let models = enumerate_models(&ModelClass::uniform(3, 2, 1).unwrap());
        let labels: Vec<String> = models.iter().map(|m| m.label(&names)).collect();
        assert_eq!(labels, ["AB", "AC", "BC"]);
        assert_eq!(enumerate_models(&ModelClass::uniform(3, 3, 1).unwrap()).len(), 12);
        assert_eq!(enumerate_models(&ModelClass::uniform(4, 2, 2).unwrap()).len(), 15);
        for m in 2..=9 {
            let pairs = m * (m - 1) / 2;
            for k in 1..=2 {
                if k <= pairs {
                    assert_eq!(enumerate_models(&ModelClass::uniform(m, 2, k).unwrap()).len(), binom(pairs, k));
                }
                assert_eq!(
                    enumerate_models(&ModelClass::uniform(m, 3, k).unwrap()).len(),
                    binom(4 * pairs, k)
                );
            }
        }
    }

    #[test]
    fn model_indices_are_ordinal() {
        let models = enumerate_models(&ModelClass::uniform(4, 3, 2).unwrap());
        assert!(models.iter().enumerate().all(|(i, m)| m.index == i + 1));
        assert!(models.iter().all(|m| m.terms.len() == 2 && m.terms[0] != m.terms[1]));
    }

    #[test]
    fn three_level_single_run_row() {
        let d = Design::from_rows(vec![vec![-1.0, 0.0, 1.0]]).unwrap();
        let model = ModelSpec { index: 1, terms: vec![Term::new(0, 1, Component::LL)] };
        let x = build_model_matrix(&d, &model, 3);
        let row: Vec<f64> = x.values.row(0).iter().copied().collect();
        assert_eq!(row, vec![1.0, -1.0, 1.0, 0.0, -2.0, 1.0, 1.0, 0.0]);
        let qq = ModelSpec { index: 1, terms: vec![Term::new(1, 2, Component::QQ)] };
        assert_eq!(build_model_matrix(&d, &qq, 3).values[(0, 7)], -2.0);
        let lq = ModelSpec { index: 1, terms: vec![Term::new(0, 1, Component::LQ)] };
        assert_eq!(build_model_matrix(&d, &lq, 3).values[(0, 7)], 2.0);
    }

    #[test]
    fn full_factorial_columns_orthogonal() {
        for (m, levels) in [(2, 2), (3, 2), (3, 3), (4, 2)] {
            let class = ModelClass::uniform(m, levels, 1).unwrap();
            let d = Design::from_rows(enumerate_full_factorial(class.factors())).unwrap();
            for model in enumerate_models(&class) {
                let x = build_model_matrix(&d, &model, levels).values;
                let g = x.transpose() * &x;
                for i in 0..g.nrows() {
                    for j in 0..g.ncols() {
                        if i != j {
                            assert!(g[(i, j)].abs() < 1e-12, "m={m} levels={levels} ({i},{j})");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn two_by_two_factorial_matrix() {
        let d = Design::from_rows(enumerate_full_factorial(&[FactorSpec::new("A", 2), FactorSpec::new("B", 2)])).unwrap();
        let model = &enumerate_models(&ModelClass::uniform(2, 2, 1).unwrap())[0];
        let x = build_model_matrix(&d, model, 2).values;
        assert_eq!(x.shape(), (4, 4));
        let g = x.transpose() * &x;
        assert_eq!(g, DMatrix::identity(4, 4) * 4.0);
    }

    #[test]
    fn csv_round_trip() {
        let d = Design::new(
            vec!["A".into(), "B".into(), "C".into()],
            vec![vec![-1.0, 0.0, 1.0], vec![1.682, -1.682, 0.0]],
        )
        .unwrap();
        let text = d.to_csv_string();
        assert_eq!(text, "A,B,C\n-1,0,1\n1.682,-1.682,0\n");
        let back = Design::read_csv(text.as_bytes()).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn csv_rejects_garbage() {
        assert!(Design::read_csv("A,B\n1,x\n".as_bytes()).is_err());
        assert!(Design::read_csv("A,B\n1,1,1\n".as_bytes()).is_err());
    }

    #[test]
    fn class_validation() {
        assert!(ModelClass::uniform(1, 2, 1).is_err());
        assert!(ModelClass::uniform(3, 2, 0).is_err());
        assert!(ModelClass::uniform(3, 4, 1).is_err());
        assert!(ModelClass::new(vec![FactorSpec::new("A", 2), FactorSpec::new("A", 2)], 1).is_err());
        assert!(ModelClass::new(vec![FactorSpec::new("A", 2), FactorSpec::new("B", 3)], 1).is_err());
        assert!(DesignProblem::uniform(3, 3, 7, 1).is_err());
        assert!(DesignProblem::uniform(3, 3, 8, 1).is_ok());
        assert!(DesignProblem::uniform(3, 2, 4, 1).is_err());
        assert!(DesignProblem::uniform(3, 2, 5, 1).is_ok());
    }
}
