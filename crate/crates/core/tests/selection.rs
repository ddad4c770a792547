use acomvar::catalog::load_reference_design;
use acomvar::design::enumerate_full_factorial;
use acomvar::selection::*;
use acomvar::{Design, FactorSpec};

fn small(shape: &str, sizes: &str, sigmas: Vec<f64>, seed: u64) -> Scenario {
    let mut s = Scenario::new(Shape::parse(shape, sizes).unwrap(), sigmas, seed);
    s.outer_reps = 6;
    s.inner_reps = 10;
    s
}

#[test]
fn scenario_is_independent_of_thread_count() {
    let d = load_reference_design("d5_12").unwrap().design;
    let sc = small("F1+F2+F1F2", "b+s+b", vec![0.25, 1.0], 9);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_scenario(&d, &sc).unwrap())
    };
    let (a, b) = (run(1), run(3));
    for (x, y) in a.by_sigma.iter().zip(&b.by_sigma) {
        assert_eq!(x.replicate_pcts, y.replicate_pcts);
    }
}

#[test]
fn noiseless_big_effects_on_full_factorial_are_recovered() {
    let factors: Vec<FactorSpec> = (0..4).map(|j| FactorSpec::new(acomvar::design::default_factor_name(j), 2)).collect();
    let d = Design::from_rows(enumerate_full_factorial(&factors)).unwrap();
    for (shape, sizes) in [("F1", "b"), ("F1+F2+F1F2", "b+b+b"), ("F1+F2+F3+F1F3", "b+b+b+b")] {
        let r = run_scenario(&d, &small(shape, sizes, vec![0.0], 1)).unwrap();
        assert_eq!(r.by_sigma[0].mean_pct, 100.0, "{shape}");
    }
}

#[test]
fn results_csv_layout() {
    let d = load_reference_design("d5_12").unwrap().design;
    let r = run_scenario(&d, &small("F1", "b", vec![0.1, 0.5], 2)).unwrap();
    let mut buf = Vec::new();
    write_results(std::slice::from_ref(&r), &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "shape,sizes,sigma,mean_pct,sd_pct");
    assert!(lines[1].starts_with("F1,b,0.1,"));
    let mut box_buf = Vec::new();
    write_boxplot_data(&[r], &mut box_buf).unwrap();
    assert_eq!(String::from_utf8(box_buf).unwrap().lines().count(), 1 + 2 * 6);
}

#[test]
fn percentages_are_bounded() {
    let d = load_reference_design("pb11").unwrap().design;
    let r = run_scenario(&d, &small("F1+F2+F3+F4+F5+F1F2", "b+s+s+b+b+b", vec![0.5], 3)).unwrap();
    assert!(r.by_sigma[0].replicate_pcts.iter().all(|p| (0.0..=100.0).contains(p)));
}
