//! Known common-variance constructions and published reference designs.

use nalgebra::DMatrix;
use sha2::{Digest, Sha256};

use crate::design::{common_block, interaction_block, Design, ModelSpec};
use crate::error::{Error, Result};

pub const PROJECTION_TOL: f64 = 1e-9;

fn with_default_names(rows: Vec<Vec<f64>>) -> Design {
    Design::from_rows(rows).expect("constructed rows are rectangular")
}

fn foldover_rows(m: usize) -> Vec<Vec<f64>> {
    let upper: Vec<Vec<f64>> = (0..m)
        .map(|i| (0..m).map(|j| if i == j { 1.0 } else { -1.0 }).collect())
        .collect();
    let lower: Vec<Vec<f64>> = upper.iter().map(|r| r.iter().map(|v| -v).collect()).collect();
    upper.into_iter().chain(lower).collect()
}

/// `2m x m` fold-over design: rows of `2I - J` followed by their negations.
pub fn foldover_2m(m: usize) -> Result<Design> {
    if m < 3 {
        return Err(Error::InvalidProblem(format!("foldover_2m needs m >= 3, got {m}")));
    }
    Ok(with_default_names(foldover_rows(m)))
}

/// `(2m + 2) x m` design: all-ones row, all-minus-ones row, then the
/// fold-over rows.
pub fn foldover_2m_plus_2(m: usize) -> Result<Design> {
    if m < 2 {
        return Err(Error::InvalidProblem(format!("foldover_2m_plus_2 needs m >= 2, got {m}")));
    }
    let mut rows = vec![vec![1.0; m], vec![-1.0; m]];
    rows.extend(foldover_rows(m));
    Ok(with_default_names(rows))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceDesign {
    pub id: &'static str,
    pub source: &'static str,
    pub num_levels: u8,
    pub design: Design,
}

struct Entry {
    id: &'static str,
    source: &'static str,
    num_levels: u8,
    csv: &'static str,
    sha256: &'static str,
}

const ENTRIES: &[Entry] = &[
    Entry {
        id: "d5_12",
        source: "two-level common variance design with equal eigenvalue vectors, 5 factors, 12 runs",
        num_levels: 2,
        csv: include_str!("../data/d5_12.csv"),
        sha256: "f54c82141cbaa78faa83efd6f6eabfbcf5f3f7e37f23078042c9d76a6ff5152b",
    },
    Entry {
        id: "pb11",
        source: "Plackett-Burman design, 11 factors, 12 runs",
        num_levels: 2,
        csv: include_str!("../data/pb11.csv"),
        sha256: "63e1658ffd157b736d6c648103dd6ae620a7a0f4bf2797cfaa151c91ef4d7f52",
    },
    Entry {
        id: "acv_D1",
        source: "two-level A-ComVar design, k=1, 5 factors, 12 runs",
        num_levels: 2,
        csv: include_str!("../data/acv_D1.csv"),
        sha256: "d923e6d07970833e1e64c9615b66dd5293c623a80a73c47cee28656ae172de71",
    },
    Entry {
        id: "acv_D2",
        source: "three-level A-ComVar design, k=1, 4 factors, 20 runs",
        num_levels: 3,
        csv: include_str!("../data/acv_D2.csv"),
        sha256: "fd0aa69c750fcf6c152276f69e2b8e2403b67aea1ec732ca2c62abb8a1d832dc",
    },
    Entry {
        id: "acv_D3",
        source: "three-level A-ComVar design, k=1, 18 runs (5 printed columns)",
        num_levels: 3,
        csv: include_str!("../data/acv_D3.csv"),
        sha256: "a83cc19a5e205047e30950fe30adb2e451a41e52aad3b4bfcc10172a77fba9e4",
    },
    Entry {
        id: "bayes_D4",
        source: "two-level Bayes optimal design, 5 factors, 12 runs (Bingham and Chipman, 2007)",
        num_levels: 2,
        csv: include_str!("../data/bayes_D4.csv"),
        sha256: "acd3189f248d7d7a112b1274f546fee403fc4f7667d423da5711042a98b72c51",
    },
    Entry {
        id: "li_D5",
        source: "two-level model-robust design, 5 factors, 12 runs (Li and Nachtsheim, 2000)",
        num_levels: 2,
        csv: include_str!("../data/li_D5.csv"),
        sha256: "188eb2de3fe2b156fefaf51de965ed894afb94c22bf96bcfd9578c75c4112006",
    },
    Entry {
        id: "ghosh_D6",
        source: "two-level optimum design, 5 factors, 12 runs (Ghosh and Tian, 2006)",
        num_levels: 2,
        csv: include_str!("../data/ghosh_D6.csv"),
        sha256: "a8d395ba045c0d85011c70f106f803e38d2c9e44e77150b304509a571abfa37a",
    },
    Entry {
        id: "ccd_D7",
        source: "central composite design, 3 factors, 20 runs, axial distance 1.682",
        num_levels: 3,
        csv: include_str!("../data/ccd_D7.csv"),
        sha256: "82a837e9d621c3cf26779d57d70a0e7d97439d94fafa52b2eae01e91452bc66b",
    },
    Entry {
        id: "ome_D8",
        source: "three-level orthogonal main effect plan, 7 factors, 18 runs",
        num_levels: 3,
        csv: include_str!("../data/ome_D8.csv"),
        sha256: "9f72a2003cdd172d418af75ec6f2e30bf99f8cb6efa79245618aa6cc0a532ac9",
    },
];

pub fn reference_ids() -> Vec<&'static str> {
    ENTRIES.iter().map(|e| e.id).collect()
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn load_reference_design(id: &str) -> Result<ReferenceDesign> {
    let entry = ENTRIES
        .iter()
        .find(|e| e.id == id)
        .ok_or_else(|| Error::UnknownDesign(id.to_string()))?;
    if sha256_hex(entry.csv.as_bytes()) != entry.sha256 {
        return Err(Error::Checksum { id: id.to_string() });
    }
    Ok(ReferenceDesign {
        id: entry.id,
        source: entry.source,
        num_levels: entry.num_levels,
        design: Design::read_csv(entry.csv.as_bytes())?,
    })
}

/// Raw CSV text of a reference design, as shipped.
pub fn reference_csv(id: &str) -> Result<&'static str> {
    ENTRIES
        .iter()
        .find(|e| e.id == id)
        .map(|e| e.csv)
        .ok_or_else(|| Error::UnknownDesign(id.to_string()))
}

/// `I - X1 (X1'X1)^-1 X1'` for the mean and main-effect columns.
pub fn projection_matrix(design: &Design, num_levels: u8) -> Result<DMatrix<f64>> {
    let x1 = common_block(design, num_levels);
    let singular = || Error::Singular { model: "mean and main effects".to_string() };
    if x1.nrows() < x1.ncols() {
        return Err(singular());
    }
    let info = x1.transpose() * &x1;
    let scale = info.diagonal().max();
    let chol = info.cholesky().ok_or_else(singular)?;
    let l = chol.l_dirty();
    if (0..l.nrows()).any(|i| l[(i, i)] * l[(i, i)] <= 1e-10 * scale) {
        return Err(singular());
    }
    let hat = &x1 * chol.solve(&x1.transpose());
    Ok(DMatrix::identity(design.n(), design.n()) - hat)
}

/// Sufficient condition for equal dispersions of two models:
/// `P X2(i1) == P X2(i2)` elementwise.
pub fn projection_condition(design: &Design, num_levels: u8, i1: &ModelSpec, i2: &ModelSpec) -> Result<bool> {
    let p = projection_matrix(design, num_levels)?;
    let a = &p * interaction_block(design, i1);
    let b = &p * interaction_block(design, i2);
    Ok(a.shape() == b.shape() && (a - b).amax() < PROJECTION_TOL)
}
