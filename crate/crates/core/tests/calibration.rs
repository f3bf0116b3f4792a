//! Manual calibration probes for the paper-scale experiment. Run with
//! `cargo test --test calibration -- --ignored --nocapture`.

use codelink::{
    build_cascade, longest_path, run_b, run_c, run_d, run_e, Algorithm, FieldSpec, GAConfig,
};
use std::time::Instant;

fn paper_config(seed: u64) -> GAConfig {
    GAConfig {
        population_size: 200,
        pipeline_depth: 32,
        migration_interval: 10,
        tournament_size: 100,
        crossover_probability: 0.8,
        mixing_ratio: 0.8,
        mutation_rate: 0.015,
        field: FieldSpec::Binary(8),
        max_generations: 20_000,
        target_fitness: Some(0),
        seed,
        record_trace: false,
    }
}

#[test]
#[ignore]
fn network_g_convergence_probe() {
    let net = build_cascade(4).unwrap();
    assert_eq!(longest_path(&net), 16);
    for seed in [1u64, 2, 3] {
        let t = Instant::now();
        let cfg = paper_config(seed);
        let b = run_b(&net, &cfg).unwrap();
        println!(
            "B    seed={seed} time={} evals={} gens={} best={} wall={:?}",
            b.elapsed, b.evaluations, b.generations, b.best_fitness, t.elapsed()
        );

        let t = Instant::now();
        let mut cfg_c = paper_config(seed);
        cfg_c.tournament_size = 3200;
        let c = run_c(&net, &cfg_c).unwrap();
        println!(
            "C    seed={seed} time={} evals={} gens={} best={} wall={:?}",
            c.elapsed, c.evaluations, c.generations, c.best_fitness, t.elapsed()
        );

        let t = Instant::now();
        let d10 = run_d(&net, &paper_config(seed)).unwrap();
        println!(
            "D10  seed={seed} time={} evals={} gens={} best={} wall={:?}",
            d10.elapsed, d10.evaluations, d10.generations, d10.best_fitness, t.elapsed()
        );

        let t = Instant::now();
        let mut cfg_d1 = paper_config(seed);
        cfg_d1.migration_interval = 1;
        let d1 = run_d(&net, &cfg_d1).unwrap();
        println!(
            "D1   seed={seed} time={} evals={} gens={} best={} wall={:?}",
            d1.elapsed, d1.evaluations, d1.generations, d1.best_fitness, t.elapsed()
        );

        let t = Instant::now();
        let mut cfg_e = paper_config(seed);
        cfg_e.tournament_size = 3200;
        let e = run_e(&net, &cfg_e).unwrap();
        println!(
            "E    seed={seed} time={} evals={} gens={} best={} wall={:?}",
            e.elapsed, e.evaluations, e.generations, e.best_fitness, t.elapsed()
        );
    }
}

#[test]
#[ignore]
fn forced_efficiency_probe() {
    let net = build_cascade(4).unwrap();
    let mut cfg = paper_config(7);
    cfg.target_fitness = None;
    cfg.max_generations = 200;
    for (name, alg, stats) in [
        ("B", Algorithm::B, run_b(&net, &cfg).unwrap()),
        ("C", Algorithm::C, {
            let mut c = cfg.clone();
            c.tournament_size = 3200;
            run_c(&net, &c).unwrap()
        }),
        ("D", Algorithm::D, run_d(&net, &cfg).unwrap()),
        ("E", Algorithm::E, {
            let mut c = cfg.clone();
            c.tournament_size = 3200;
            run_e(&net, &c).unwrap()
        }),
    ] {
        let theory = codelink::theoretical_efficiency(alg, 200, 16, 32, 200);
        println!(
            "{name}: elapsed={} evals={} measured_eff={:.4} theory={:?}",
            stats.elapsed, stats.evaluations, stats.eval_efficiency, theory
        );
    }
}
