use comac_core::simulator::{monte_carlo, Scenario};
use comac_core::{optimize, CandidatePool, EnergyParams, OptimizerOptions, Topology};

fn scenario_parts() -> (CandidatePool, Vec<f64>) {
    let t = Topology::generate(15, 50.0, 8).unwrap();
    let pool = CandidatePool::build(&t, 2, 6, &EnergyParams::default()).unwrap();
    let p = optimize(&pool.candidates, &pool.costs, pool.n, &OptimizerOptions::default())
        .unwrap()
        .distribution()
        .p
        .clone();
    (pool, p)
}

#[test]
fn averaged_error_curve_is_non_increasing() {
    let (pool, p) = scenario_parts();
    let sc = Scenario {
        candidates: &pool.candidates,
        costs: &pool.costs,
        p: &p,
        n: pool.n,
        init_low: 0.0,
        init_high: 30.0,
        threshold: 0.01,
        max_iters: 10_000,
    };
    let avg = monte_carlo(&sc, 400, 3).unwrap();
    assert_eq!(avg.terminated_runs, avg.runs);
    for w in avg.mean_error.windows(2) {
        assert!(w[1] <= w[0] + 1e-12, "{} -> {}", w[0], w[1]);
    }
    for w in avg.mean_energy.windows(2) {
        assert!(w[1] >= w[0]);
    }
    assert!(avg.final_error() < 0.01);
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let (pool, p) = scenario_parts();
    let sc = Scenario {
        candidates: &pool.candidates,
        costs: &pool.costs,
        p: &p,
        n: pool.n,
        init_low: 0.0,
        init_high: 30.0,
        threshold: 0.05,
        max_iters: 10_000,
    };
    let a = monte_carlo(&sc, 200, 11).unwrap();
    let b = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| monte_carlo(&sc, 200, 11).unwrap());
    assert_eq!(a.mean_error, b.mean_error);
    assert_eq!(a.mean_energy, b.mean_energy);
}
