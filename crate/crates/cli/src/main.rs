//! `acomvar`: search, verify and benchmark common-variance designs.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use acomvar::catalog::{load_reference_design, reference_csv, reference_ids};
use acomvar::exhaustive::{exhaustive_search, format_ratio, ExhaustiveOptions, DEFAULT_BUDGET};
use acomvar::ga::{run_search, GaConfig, ParentSelection};
use acomvar::selection::{
    parse_shape_file, run_scenario, select_builtin, write_boxplot_data, write_results, Scenario, Shape,
    DEFAULT_SIGMAS,
};
use acomvar::variance::{DEFAULT_CV_TOL, DEFAULT_PHI};
use acomvar::{evaluate, Design, DesignProblem, Error, ModelClass};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "acomvar", version, about = "Common-variance and approximate common-variance factorial designs")]
struct Cli {
    /// Worker threads for parallel sections. Output does not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Genetic-algorithm search for an A-ComVar design.
    Search(SearchArgs),
    /// Evaluate a design CSV against the model class.
    Eval(EvalArgs),
    /// Exact census of all n-run subsets of the full factorial.
    Exhaustive(ExhaustiveArgs),
    /// Reference designs and known series.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Model-identification simulation with the adaptive lasso.
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct ClassArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(2..=3))]
    levels: u8,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    k: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Selection {
    Uniform,
    Tournament,
}

#[derive(Args)]
struct SearchArgs {
    #[command(flatten)]
    class: ClassArgs,
    #[arg(long, default_value_t = 50)]
    pop: usize,
    #[arg(long = "mut", default_value_t = 0.05)]
    mutation: f64,
    #[arg(long, default_value_t = 2)]
    replace: usize,
    #[arg(long, default_value_t = 10_000)]
    iters: usize,
    #[arg(long, default_value_t = DEFAULT_PHI)]
    phi: f64,
    #[arg(long, default_value_t = DEFAULT_CV_TOL)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Selection::Uniform)]
    parents: Selection,
    /// Directory for best.csv, report.json and trace.csv. Without it the
    /// report is printed.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    design: PathBuf,
    /// Levels per factor; inferred from the design when omitted.
    #[arg(long, value_parser = clap::value_parser!(u8).range(2..=3))]
    levels: Option<u8>,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value_t = DEFAULT_PHI)]
    phi: f64,
    #[arg(long, default_value_t = DEFAULT_CV_TOL)]
    tol: f64,
}

#[derive(Args)]
struct ExhaustiveArgs {
    #[command(flatten)]
    class: ClassArgs,
    /// Maximum number of subsets; also read from ACOMVAR_BUDGET.
    #[arg(long, env = "ACOMVAR_BUDGET", default_value_t = DEFAULT_BUDGET)]
    budget: u128,
    /// Write one witness design CSV per common-variance group here.
    #[arg(long)]
    witness_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum CatalogAction {
    /// List reference design ids.
    List,
    /// Print a reference design as CSV.
    Show { id: String },
    /// Evaluate a reference design and print the report.
    Verify {
        id: String,
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// Print a fold-over series design.
    Foldover {
        #[arg(long)]
        m: usize,
        /// Use the 2m+2 run variant.
        #[arg(long)]
        plus_two: bool,
    },
}

#[derive(Args)]
struct SimulateArgs {
    /// Reference design id or path to a design CSV.
    #[arg(long)]
    design: String,
    /// `rowN`, `rowA-B`, `all` (comma separated), or a file of `model,sizes` lines.
    #[arg(long, default_value = "all")]
    shapes: String,
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_SIGMAS.to_vec())]
    sigmas: Vec<f64>,
    #[arg(long, default_value_t = 100)]
    inner: usize,
    #[arg(long, default_value_t = 50)]
    outer: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Results CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-replicate percentages for box plots.
    #[arg(long)]
    boxplot: Option<PathBuf>,
}

fn class_problem(a: &ClassArgs) -> acomvar::Result<DesignProblem> {
    DesignProblem::new(ModelClass::uniform(a.m, a.levels, a.k)?, a.n)
}

fn json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn write_file(path: &Path, contents: &[u8]) -> acomvar::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, contents)?;
    Ok(())
}

fn cmd_search(a: SearchArgs, out: &mut impl Write) -> acomvar::Result<()> {
    let problem = class_problem(&a.class)?;
    let config = GaConfig {
        population_size: a.pop,
        mutation_prob: a.mutation,
        num_replace: a.replace,
        max_iter: a.iters,
        phi: a.phi,
        seed: a.seed,
        cv_tol: a.tol,
        parent_selection: match a.parents {
            Selection::Uniform => ParentSelection::Uniform,
            Selection::Tournament => ParentSelection::Tournament,
        },
    };
    let result = run_search(&problem, &config)?;
    let report = acomvar::variance::ReportJson::new(&result.report, &result.best, problem.class(), a.phi);
    log::info!("{} iterations, terminated early: {}", result.iterations, result.terminated_early);
    match a.out {
        Some(dir) => {
            fs::create_dir_all(&dir)?;
            result.best.save(dir.join("best.csv"))?;
            write_file(&dir.join("report.json"), json(&report).as_bytes())?;
            let mut trace = Vec::new();
            result.write_trace(&mut trace)?;
            write_file(&dir.join("trace.csv"), &trace)?;
        }
        None => out.write_all(json(&report).as_bytes())?,
    }
    Ok(())
}

fn cmd_eval(a: EvalArgs, out: &mut impl Write) -> acomvar::Result<()> {
    let design = Design::load(&a.design)?;
    let levels = a.levels.unwrap_or_else(|| design.infer_levels());
    let class = ModelClass::new(
        design.names().iter().map(|n| acomvar::FactorSpec::new(n.clone(), levels)).collect(),
        a.k,
    )?;
    let report = evaluate(&design, &class, a.phi, a.tol);
    out.write_all(json(&acomvar::variance::ReportJson::new(&report, &design, &class, a.phi)).as_bytes())?;
    Ok(())
}

fn cmd_exhaustive(a: ExhaustiveArgs, out: &mut impl Write) -> acomvar::Result<()> {
    let problem = class_problem(&a.class)?;
    let report = exhaustive_search(&problem, &ExhaustiveOptions { budget: a.budget, chunks: None })?;
    if let Some(dir) = a.witness_dir {
        fs::create_dir_all(&dir)?;
        for value in report.groups.keys() {
            let name = format!("cv_{}.csv", format_ratio(value).replace('/', "_"));
            report.witness(value).expect("group has a witness").save(dir.join(name))?;
        }
    }
    out.write_all(json(&report.to_json()).as_bytes())?;
    Ok(())
}

fn cmd_catalog(action: CatalogAction, out: &mut impl Write) -> acomvar::Result<()> {
    match action {
        CatalogAction::List => {
            for id in reference_ids() {
                let r = load_reference_design(id)?;
                writeln!(out, "{id}\t{}x{}\t{}", r.design.n(), r.design.m(), r.source)?;
            }
        }
        CatalogAction::Show { id } => out.write_all(reference_csv(&id)?.as_bytes())?,
        CatalogAction::Verify { id, k } => {
            let r = load_reference_design(&id)?;
            let class = ModelClass::new(
                r.design.names().iter().map(|n| acomvar::FactorSpec::new(n.clone(), r.num_levels)).collect(),
                k,
            )?;
            let report = evaluate(&r.design, &class, DEFAULT_PHI, DEFAULT_CV_TOL);
            out.write_all(json(&acomvar::variance::ReportJson::new(&report, &r.design, &class, DEFAULT_PHI)).as_bytes())?;
        }
        CatalogAction::Foldover { m, plus_two } => {
            let d = if plus_two { acomvar::catalog::foldover_2m_plus_2(m)? } else { acomvar::catalog::foldover_2m(m)? };
            out.write_all(d.to_csv_string().as_bytes())?;
        }
    }
    Ok(())
}

fn load_design_arg(spec: &str) -> acomvar::Result<Design> {
    if reference_ids().contains(&spec) {
        return Ok(load_reference_design(spec)?.design);
    }
    Design::load(spec)
}

fn parse_shapes(spec: &str) -> acomvar::Result<Vec<Shape>> {
    let path = Path::new(spec);
    if path.is_file() {
        return parse_shape_file(&fs::read_to_string(path)?);
    }
    select_builtin(spec)
}

fn cmd_simulate(a: SimulateArgs, out: &mut impl Write) -> acomvar::Result<()> {
    let design = load_design_arg(&a.design)?;
    let shapes = parse_shapes(&a.shapes)?;
    let mut results = Vec::with_capacity(shapes.len());
    for shape in shapes {
        let mut scenario = Scenario::new(shape, a.sigmas.clone(), a.seed);
        scenario.inner_reps = a.inner;
        scenario.outer_reps = a.outer;
        log::info!("simulating {}", scenario.shape);
        results.push(run_scenario(&design, &scenario)?);
    }
    let mut table = Vec::new();
    write_results(&results, &mut table)?;
    match a.out {
        Some(p) => write_file(&p, &table)?,
        None => out.write_all(&table)?,
    }
    if let Some(p) = a.boxplot {
        let mut data = Vec::new();
        write_boxplot_data(&results, &mut data)?;
        write_file(&p, &data)?;
    }
    Ok(())
}

fn run(cli: Cli) -> acomvar::Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Search(a) => cmd_search(a, &mut out),
        Command::Eval(a) => cmd_eval(a, &mut out),
        Command::Exhaustive(a) => cmd_exhaustive(a, &mut out),
        Command::Catalog { action } => cmd_catalog(action, &mut out),
        Command::Simulate(a) => cmd_simulate(a, &mut out),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(w) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ Error::BudgetExceeded { .. }) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
