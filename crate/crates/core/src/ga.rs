//! Steady-state genetic algorithm over lattice designs.
//!
//! Each iteration replaces the `num_replace` worst chromosomes with mutated
//! crossover offspring of parents drawn from the survivors. The search stops
//! at `max_iter` or as soon as a common-variance design appears.

use std::io::Write;

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::design::{enumerate_full_factorial, level_set, Design, DesignProblem};
use crate::error::{Error, Result};
use crate::variance::{evaluate, FitnessReport, DEFAULT_CV_TOL, DEFAULT_PHI};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ParentSelection {
    /// Two distinct survivors, uniformly.
    #[default]
    Uniform,
    /// Each parent is the better of two uniformly drawn survivors.
    Tournament,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaConfig {
    pub population_size: usize,
    pub mutation_prob: f64,
    pub num_replace: usize,
    pub max_iter: usize,
    pub phi: f64,
    pub seed: u64,
    pub cv_tol: f64,
    pub parent_selection: ParentSelection,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population_size: 50,
            mutation_prob: 0.05,
            num_replace: 2,
            max_iter: 10_000,
            phi: DEFAULT_PHI,
            seed: 0,
            cv_tol: DEFAULT_CV_TOL,
            parent_selection: ParentSelection::Uniform,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.population_size < 3 {
            return bad(format!("population_size must be at least 3, got {}", self.population_size));
        }
        if self.num_replace < 1 || self.num_replace > self.population_size - 2 {
            return bad(format!(
                "num_replace must lie in 1..={}, got {}",
                self.population_size - 2,
                self.num_replace
            ));
        }
        if !(0.0..=1.0).contains(&self.mutation_prob) {
            return bad(format!("mutation_prob must lie in [0, 1], got {}", self.mutation_prob));
        }
        if !(self.phi.is_finite() && self.phi >= 0.0) {
            return bad(format!("phi must be finite and non-negative, got {}", self.phi));
        }
        if !(self.cv_tol.is_finite() && self.cv_tol >= 0.0) {
            return bad(format!("cv_tol must be finite and non-negative, got {}", self.cv_tol));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Chromosome {
    design: Design,
    fitness: FitnessReport,
}

impl Chromosome {
    pub fn new(design: Design, problem: &DesignProblem, config: &GaConfig) -> Self {
        let fitness = evaluate(&design, problem.class(), config.phi, config.cv_tol);
        Chromosome { design, fitness }
    }

    pub fn design(&self) -> &Design {
        &self.design
    }

    pub fn fitness(&self) -> &FitnessReport {
        &self.fitness
    }

    pub fn objective(&self) -> f64 {
        self.fitness.objective
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TracePoint {
    pub iteration: usize,
    pub best_objective: f64,
    pub best_r_acv: f64,
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub best: Design,
    pub report: FitnessReport,
    pub iterations: usize,
    pub terminated_early: bool,
    pub trace: Vec<TracePoint>,
}

impl SearchResult {
    pub fn write_trace<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for point in &self.trace {
            w.serialize(point)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn evaluate_all(designs: Vec<Design>, problem: &DesignProblem, config: &GaConfig) -> Vec<Chromosome> {
    designs.into_par_iter().map(|d| Chromosome::new(d, problem, config)).collect()
}

fn sample_designs<R: Rng + ?Sized>(problem: &DesignProblem, count: usize, rng: &mut R) -> Vec<Design> {
    let points = enumerate_full_factorial(problem.class().factors());
    let names = problem.class().factor_names();
    let n = problem.n();
    (0..count)
        .map(|_| {
            let rows: Vec<Vec<f64>> = if n <= points.len() {
                let mut idx = sample(rng, points.len(), n).into_vec();
                idx.sort_unstable();
                idx.into_iter().map(|i| points[i].clone()).collect()
            } else {
                (0..n).map(|_| points[rng.random_range(0..points.len())].clone()).collect()
            };
            Design::new(names.clone(), rows).expect("factorial points form a valid design")
        })
        .collect()
}

/// Random initial population. Rows of each design are sorted by candidate
/// index.
pub fn init_population<R: Rng + ?Sized>(
    problem: &DesignProblem,
    config: &GaConfig,
    rng: &mut R,
) -> Result<Vec<Chromosome>> {
    config.validate()?;
    let designs = sample_designs(problem, config.population_size, rng);
    Ok(evaluate_all(designs, problem, config))
}

/// Single-point column crossover. Columns `0..c` come from `p1`, the rest
/// from `p2`, with `c` uniform in `1..m`.
pub fn crossover<R: Rng + ?Sized>(p1: &Design, p2: &Design, rng: &mut R) -> Design {
    assert_eq!((p1.n(), p1.m()), (p2.n(), p2.m()), "parents must share shape");
    let cut = rng.random_range(1..p1.m());
    crossover_at(p1, p2, cut)
}

pub fn crossover_at(p1: &Design, p2: &Design, cut: usize) -> Design {
    let mut child = p1.clone();
    for r in 0..p1.n() {
        for c in cut..p1.m() {
            child.set(r, c, p2.get(r, c));
        }
    }
    child
}

/// Each cell mutates with probability `prob` to a different level, drawn
/// uniformly.
pub fn mutate<R: Rng + ?Sized>(design: &Design, num_levels: u8, prob: f64, rng: &mut R) -> Design {
    let levels = level_set(num_levels);
    let mut out = design.clone();
    for r in 0..design.n() {
        for c in 0..design.m() {
            if rng.random_bool(prob) {
                let current = design.get(r, c);
                let others: Vec<f64> = levels.iter().copied().filter(|&l| l != current).collect();
                out.set(r, c, others[rng.random_range(0..others.len())]);
            }
        }
    }
    out
}

fn best_index(population: &[Chromosome]) -> usize {
    let mut best = 0;
    for (i, c) in population.iter().enumerate() {
        if c.objective() > population[best].objective() {
            best = i;
        }
    }
    best
}

fn pick_parent<R: Rng + ?Sized>(survivors: &[usize], population: &[Chromosome], strategy: ParentSelection, rng: &mut R) -> usize {
    match strategy {
        ParentSelection::Uniform => survivors[rng.random_range(0..survivors.len())],
        ParentSelection::Tournament => {
            let a = survivors[rng.random_range(0..survivors.len())];
            let b = survivors[rng.random_range(0..survivors.len())];
            if population[b].objective() > population[a].objective() {
                b
            } else {
                a
            }
        }
    }
}

pub fn run_search(problem: &DesignProblem, config: &GaConfig) -> Result<SearchResult> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut population = init_population(problem, config, &mut rng)?;
    let mut best = population[best_index(&population)].clone();
    let mut trace = vec![TracePoint {
        iteration: 0,
        best_objective: best.objective(),
        best_r_acv: best.fitness.r_acv,
    }];
    let mut iterations = 0;
    let mut terminated_early = best.fitness.is_cv;
    let pop = config.population_size;

    while !terminated_early && iterations < config.max_iter {
        iterations += 1;
        // Shuffle then stable sort so equal objectives are ordered at random.
        let mut order: Vec<usize> = (0..pop).collect();
        order.shuffle(&mut rng);
        order.sort_by(|&a, &b| population[a].objective().total_cmp(&population[b].objective()));
        let (worst, survivors) = order.split_at(config.num_replace);

        let mut offspring = Vec::with_capacity(worst.len());
        for _ in worst {
            let i = pick_parent(survivors, &population, config.parent_selection, &mut rng);
            let mut j = pick_parent(survivors, &population, config.parent_selection, &mut rng);
            if config.parent_selection == ParentSelection::Uniform {
                while j == i {
                    j = survivors[rng.random_range(0..survivors.len())];
                }
            }
            let child = crossover(&population[i].design, &population[j].design, &mut rng);
            offspring.push(mutate(&child, problem.num_levels(), config.mutation_prob, &mut rng));
        }
        for (&slot, child) in worst.iter().zip(evaluate_all(offspring, problem, config)) {
            population[slot] = child;
        }

        let current = &population[best_index(&population)];
        if current.objective() > best.objective() {
            best = current.clone();
        }
        trace.push(TracePoint {
            iteration: iterations,
            best_objective: best.objective(),
            best_r_acv: best.fitness.r_acv,
        });
        terminated_early = population.iter().any(|c| c.fitness.is_cv);
        if terminated_early {
            if let Some(cv) = population.iter().filter(|c| c.fitness.is_cv).max_by(|a, b| a.objective().total_cmp(&b.objective())) {
                if !best.fitness.is_cv || cv.objective() > best.objective() {
                    best = cv.clone();
                }
            }
        }
        log::debug!("iteration {iterations}: best objective {}", best.objective());
    }

    Ok(SearchResult {
        best: best.design,
        report: best.fitness,
        iterations,
        terminated_early,
        trace,
    })
}
