use cardylab::domain::{classify, standard_triangle};
use cardylab::engine::{coupled_estimate, crossing_indicators, estimate, SamplingPlan};
use cardylab::experiment::{self, ConfigLayer, Experiment, ExperimentConfig, OutputFormat};
use cardylab::lattice::{LatticeFamily, LatticeSpec};

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

#[test]
fn estimates_do_not_depend_on_worker_count() {
    let spec = LatticeSpec::new(LatticeFamily::Triangular(2.0), 1.0 / 32.0).unwrap();
    let cls = classify(&spec, &standard_triangle(&spec, 0.3).unwrap()).unwrap();
    let plan = SamplingPlan::new(0.5, 99, 4000).unwrap();
    let one = in_pool(1, || estimate(&cls, &plan));
    let four = in_pool(4, || estimate(&cls, &plan));
    assert_eq!(one, four);
    let ind1 = in_pool(1, || crossing_indicators(&cls, 0.5, 99, 0..4000));
    let ind4 = in_pool(4, || crossing_indicators(&cls, 0.5, 99, 0..4000));
    assert_eq!(ind1, ind4);
    assert_eq!(ind1.iter().filter(|&&b| b).count() as u64, one.successes);
}

#[test]
fn coupled_runs_do_not_depend_on_worker_count() {
    let a_spec = LatticeSpec::new(LatticeFamily::SquareNe, 1.0 / (16.0 * std::f64::consts::SQRT_2)).unwrap();
    let a = classify(&a_spec, &standard_triangle(&a_spec, 0.5).unwrap())
        .unwrap()
        .rotated_square_ne()
        .unwrap();
    let b_spec = LatticeSpec::new(LatticeFamily::equilateral(), 1.0 / 16.0).unwrap();
    let b = classify(&b_spec, &standard_triangle(&b_spec, 0.5).unwrap()).unwrap();
    let plan = SamplingPlan::new(0.5, 3, 2000).unwrap();
    let one = in_pool(1, || coupled_estimate(&a, &b, &plan).unwrap());
    let three = in_pool(3, || coupled_estimate(&a, &b, &plan).unwrap());
    assert_eq!(one.indicators_a, three.indicators_a);
    assert_eq!(one.indicators_b, three.indicators_b);
    assert!(one.all_agree());
}

#[test]
fn rendered_reports_are_identical() {
    let layer: ConfigLayer = serde_json::from_str(r#"{"delta": [0.1, 0.05], "n_samples": 2000}"#).unwrap();
    let cfg = ExperimentConfig::resolve(Experiment::Sweep, Some(layer), ConfigLayer::default()).unwrap();
    let render = |threads| {
        in_pool(threads, || {
            let rep = experiment::run(&cfg).unwrap();
            (rep.render(OutputFormat::Csv), rep.render(OutputFormat::Json))
        })
    };
    assert_eq!(render(1), render(4));
}
