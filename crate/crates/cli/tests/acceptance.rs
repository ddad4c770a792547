//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

use std::collections::BTreeMap;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use acomvar::catalog::{foldover_2m, foldover_2m_plus_2, load_reference_design};
use acomvar::design::enumerate_full_factorial;
use acomvar::exhaustive::{
    classify, exact_dispersions, exhaustive_search, random_subset, ExactClass, ExhaustiveOptions, ExhaustiveReport,
};
use acomvar::exact::Rational;
use acomvar::ga::{run_search, GaConfig};
use acomvar::selection::{run_scenario, select_builtin, Scenario, DEFAULT_SIGMAS};
use acomvar::variance::{evaluate, DEFAULT_CV_TOL, DEFAULT_PHI};
use acomvar::{Design, DesignProblem, FactorSpec, ModelClass};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, ok: String, bad: String) -> Outcome {
    if cond {
        Ok(ok)
    } else {
        Err(bad)
    }
}

fn ratio(n: i128, d: i128) -> Rational {
    Rational::new(n, d)
}

fn full_factorial(m: usize, levels: u8) -> Design {
    let factors: Vec<FactorSpec> =
        (0..m).map(|j| FactorSpec::new(acomvar::design::default_factor_name(j), levels)).collect();
    Design::from_rows(enumerate_full_factorial(&factors)).unwrap()
}

fn groups(report: &ExhaustiveReport) -> BTreeMap<Rational, u64> {
    report.groups.iter().map(|(v, g)| (*v, g.count)).collect()
}

fn census_summary(r: &ExhaustiveReport) -> String {
    let g: Vec<String> = groups(r).iter().map(|(v, c)| format!("{v}: {c}")).collect();
    format!("total {} rank_ok {} cv {} groups {{{}}}", r.total_subsets, r.rank_ok, r.cv, g.join(", "))
}

fn ac1() -> Outcome {
    let d = Design::from_rows(vec![
        vec![-1.0, -1.0, -1.0],
        vec![-1.0, 1.0, 1.0],
        vec![1.0, -1.0, -1.0],
        vec![1.0, -1.0, 1.0],
        vec![1.0, 1.0, -1.0],
        vec![1.0, 1.0, 1.0],
    ])
    .unwrap();
    let class = ModelClass::uniform(3, 2, 1).unwrap();
    let start = Instant::now();
    let r = evaluate(&d, &class, DEFAULT_PHI, DEFAULT_CV_TOL);
    let elapsed = start.elapsed();
    let tol = 1e-9;
    let ok = r.dispersions.iter().all(|x| (x - 0.25).abs() <= tol)
        && (r.mean_dispersion - 0.25).abs() <= tol
        && (r.objective - 4.0).abs() <= tol
        && (r.r_acv - 1.0).abs() <= tol
        && r.is_cv
        && elapsed < Duration::from_millis(1);
    let msg = format!("dispersions {:?} objective {} r_acv {} in {:?}", r.dispersions, r.objective, r.r_acv, elapsed);
    check(ok, msg.clone(), msg)
}

fn ac2() -> Outcome {
    let d = full_factorial(3, 2);
    let class = ModelClass::uniform(3, 2, 1).unwrap();
    let exact = exact_dispersions(&d, &class).unwrap().unwrap_or_default();
    let exact_ok = exact.len() == 3 && exact.iter().all(|v| *v == ratio(1, 8));
    let f = evaluate(&d, &class, DEFAULT_PHI, DEFAULT_CV_TOL);
    let float_ok = (f.objective - 8.0).abs() <= 1e-12 && (f.r_acv - 1.0).abs() <= 1e-12;
    let msg = format!("exact {exact:?} float objective {} r_acv {}", f.objective, f.r_acv);
    check(exact_ok && float_ok, msg.clone(), msg)
}

fn ac3() -> Outcome {
    let problem = DesignProblem::uniform(3, 3, 8, 1).unwrap();
    let r = exhaustive_search(&problem, &ExhaustiveOptions::default()).map_err(|e| e.to_string())?;
    let expected: BTreeMap<Rational, u64> = [(ratio(2, 3), 9_600), (ratio(8, 9), 16_688)].into();
    let ok = r.total_subsets == 2_220_075 && r.rank_ok == 49_628 && r.cv == 26_288 && groups(&r) == expected;
    let msg = census_summary(&r);
    check(ok, msg.clone(), format!("{msg}; expected rank_ok 49628 cv 26288 groups {{2/3: 9600, 8/9: 16688}}"))
}

fn ac4() -> Outcome {
    let problem = DesignProblem::uniform(3, 3, 9, 1).unwrap();
    let r = exhaustive_search(&problem, &ExhaustiveOptions::default()).map_err(|e| e.to_string())?;
    let ok = r.cv == 48_000 && groups(&r).get(&ratio(1, 3)) == Some(&8_256);
    let msg = census_summary(&r);
    check(ok, msg.clone(), format!("{msg}; expected cv 48000 with group 1/3: 8256"))
}

fn ac5() -> Outcome {
    let mut failures = Vec::new();
    for m in 3..=9 {
        let class = ModelClass::uniform(m, 2, 1).unwrap();
        for (label, d) in [("2m", foldover_2m(m)), ("2m+2", foldover_2m_plus_2(m))] {
            let d = d.map_err(|e| e.to_string())?;
            if !evaluate(&d, &class, DEFAULT_PHI, DEFAULT_CV_TOL).is_cv {
                failures.push(format!("{label} m={m}"));
            }
        }
    }
    let d5 = load_reference_design("d5_12").map_err(|e| e.to_string())?;
    if !evaluate(&d5.design, &ModelClass::uniform(5, 2, 1).unwrap(), DEFAULT_PHI, DEFAULT_CV_TOL).is_cv {
        failures.push("d5_12".into());
    }
    check(failures.is_empty(), "14 series designs and d5_12 are CV".into(), format!("not CV: {failures:?}"))
}

fn ga_runs(n: usize) -> Vec<(f64, Duration)> {
    let problem = DesignProblem::uniform(3, 3, n, 1).unwrap();
    (0..20u64)
        .map(|seed| {
            let start = Instant::now();
            let r = run_search(&problem, &GaConfig { seed, ..Default::default() }).unwrap();
            (r.report.r_acv, start.elapsed())
        })
        .collect()
}

fn ac6() -> Outcome {
    let runs = ga_runs(8);
    let hits = runs.iter().filter(|(r, _)| *r >= 1.0 - DEFAULT_CV_TOL).count();
    let slowest = runs.iter().map(|(_, t)| *t).max().unwrap();
    let best = runs.iter().map(|(r, _)| *r).fold(0.0, f64::max);
    let msg = format!("{hits}/20 runs reached r_acv 1 (best {best:.4}), slowest run {slowest:?}");
    check(hits >= 10 && slowest < Duration::from_secs(60), msg.clone(), msg)
}

fn ac7() -> Outcome {
    let best = ga_runs(12).iter().map(|(r, _)| *r).fold(0.0, f64::max);
    check(best > 0.8, format!("best r_acv {best:.4}"), format!("best r_acv {best:.4} <= 0.8"))
}

fn ac8() -> Outcome {
    let d = full_factorial(4, 2);
    let class = ModelClass::uniform(4, 2, 2).unwrap();
    let r = evaluate(&d, &class, DEFAULT_PHI, DEFAULT_CV_TOL);
    let target = (1.0f64 / 16.0).powi(2);
    let exact = exact_dispersions(&d, &class).unwrap().unwrap_or_default();
    let ok = r.dispersions.len() == 15
        && r.dispersions.iter().all(|x| (x - target).abs() <= 1e-12)
        && exact.iter().all(|v| *v == ratio(1, 256))
        && (r.r_acv - 1.0).abs() <= 1e-12;
    let msg = format!("{} models, r_acv {}", r.dispersions.len(), r.r_acv);
    check(ok, msg.clone(), format!("{msg}, dispersions {:?}", r.dispersions))
}

fn ac9() -> Outcome {
    let problem = DesignProblem::uniform(3, 3, 8, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut checked, mut disagreements, mut cv) = (0, 0, 0);
    while checked < 1000 {
        let d = random_subset(&problem, &mut rng);
        let label = classify(&d, problem.class()).map_err(|e| e.to_string())?;
        if label == ExactClass::RankDeficient {
            continue;
        }
        checked += 1;
        let exact_cv = matches!(label, ExactClass::Cv(_));
        cv += exact_cv as usize;
        if exact_cv != evaluate(&d, problem.class(), DEFAULT_PHI, DEFAULT_CV_TOL).is_cv {
            disagreements += 1;
        }
    }
    let msg = format!("{checked} rank-ok subsets ({cv} CV), {disagreements} disagreements");
    check(disagreements == 0, msg.clone(), msg)
}

fn ac10() -> Outcome {
    let d = load_reference_design("d5_12").map_err(|e| e.to_string())?.design;
    let shapes = select_builtin("row1,row2").map_err(|e| e.to_string())?;
    let results: Vec<_> = shapes
        .into_iter()
        .map(|shape| run_scenario(&d, &Scenario::new(shape, DEFAULT_SIGMAS.to_vec(), 1)))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let at = |row: usize, sigma: f64| {
        results[row].by_sigma.iter().find(|s| (s.sigma - sigma).abs() < 1e-12).map(|s| s.mean_pct).unwrap()
    };
    let (row1, row2) = (at(0, 0.1), at(1, 0.5));
    let pooled: Vec<f64> = (0..DEFAULT_SIGMAS.len())
        .map(|i| results.iter().map(|r| r.by_sigma[i].mean_pct).sum::<f64>() / results.len() as f64)
        .collect();
    let monotone = pooled.windows(2).all(|w| w[1] <= w[0] + 2.0);
    let ok = row1 >= 95.0 && (row2 - 10.22).abs() <= 6.0 && monotone;
    let msg = format!("F1/b at 0.1: {row1:.2}; F1/s at 0.5: {row2:.2} (target 10.22 +/- 6); pooled by sigma {pooled:.2?}");
    check(ok, msg.clone(), msg)
}

fn acomvar(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_acomvar"))
        .args(args)
        .env_remove("ACOMVAR_BUDGET")
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?} exited {:?}", out.status.code()));
    }
    Ok(out.stdout)
}

fn ac11() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let commands: [&[&str]; 4] = [
        &["search", "--levels", "3", "--m", "3", "--n", "10", "--iters", "300", "--seed", "7"],
        &["exhaustive", "--levels", "2", "--m", "4", "--n", "7"],
        &["simulate", "--design", "d5_12", "--shapes", "row1-3", "--sigmas", "0.5,1.0", "--inner", "20", "--outer", "8", "--seed", "3"],
        &["catalog", "foldover", "--m", "5", "--plus-two"],
    ];
    let mut mismatches = Vec::new();
    for cmd in commands {
        let mut outputs = Vec::new();
        for workers in ["1", "1", "2"] {
            let mut args = vec!["--workers", workers];
            args.extend_from_slice(cmd);
            outputs.push(acomvar(&args)?);
        }
        if outputs.windows(2).any(|w| w[0] != w[1]) {
            mismatches.push(cmd[0]);
        }
    }
    let mut trees = Vec::new();
    for (i, workers) in ["1", "2"].iter().enumerate() {
        let out = dir.path().join(format!("run{i}"));
        let out_s = out.to_str().unwrap();
        acomvar(&["--workers", workers, "search", "--levels", "3", "--m", "3", "--n", "9", "--iters", "300", "--out", out_s])?;
        let files: Vec<Vec<u8>> = ["best.csv", "report.json", "trace.csv"]
            .iter()
            .map(|f| std::fs::read(out.join(f)).map_err(|e| e.to_string()))
            .collect::<Result<_, _>>()?;
        trees.push(files);
    }
    if trees[0] != trees[1] {
        mismatches.push("search --out");
    }
    check(
        mismatches.is_empty(),
        "outputs byte-identical across repeats and worker counts".into(),
        format!("differing outputs: {mismatches:?}"),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("AC-1", ac1),
        ("AC-2", ac2),
        ("AC-3", ac3),
        ("AC-4", ac4),
        ("AC-5", ac5),
        ("AC-6", ac6),
        ("AC-7", ac7),
        ("AC-8", ac8),
        ("AC-9", ac9),
        ("AC-10", ac10),
        ("AC-11", ac11),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("{name} PASS ({secs:.1}s) {msg}"),
            Err(msg) => {
                failed += 1;
                println!("{name} FAIL ({secs:.1}s) {msg}");
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
