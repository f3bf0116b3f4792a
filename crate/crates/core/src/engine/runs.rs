//! The five run loops.

use super::{next_generation, Algorithm, EngineError, GAConfig, RunStats, Tracker, STREAM_ENGINE};
use crate::galois::stream_rng;
use crate::genome::{all_ones_genotype, random_genotype, Fitness, Genotype};
use crate::netgraph::{BlockLayout, Network};
use crate::protocol::{EvalResult, Evaluator, Pipeline};
use rand::Rng;
use std::collections::VecDeque;

/// Fresh batch of N genotypes. The first chromosome of every initial batch
/// is the all-coded genotype, guaranteeing a feasible individual whenever
/// the rate is achievable at all.
fn initial_batch(layout: &BlockLayout, n: u32, rng: &mut impl Rng) -> Vec<Genotype> {
    let mut batch: Vec<Genotype> = (0..n).map(|_| random_genotype(layout, rng)).collect();
    batch[0] = all_ones_genotype(layout);
    batch
}

fn batch_min(fitness: &[Fitness]) -> Fitness {
    *fitness.iter().min().expect("batches are nonempty")
}

/// Centralized baseline: the same generational mathematics as `run_b` with
/// no clock. Elapsed time is reported as generations * 2l for
/// comparability and flagged synthetic.
pub fn run_a(net: &Network, cfg: &GAConfig) -> Result<RunStats, EngineError> {
    let evaluator = Evaluator::new(net, cfg.field);
    cfg.validate(evaluator.lag(), Algorithm::A)?;
    let lag = evaluator.lag();
    let n = cfg.population_size;
    let mut rng = stream_rng(cfg.seed, &[STREAM_ENGINE]);
    let mut population = initial_batch(evaluator.layout(), n, &mut rng);
    let mut tracker = Tracker::new(cfg.target_fitness);
    let mut trajectory = Vec::new();
    let mut elapsed = 0;
    let mut generations = 0;

    for gen in 0..cfg.max_generations {
        tracker.record_launch(gen * lag);
        let fitness = evaluator.evaluate(&population, cfg.seed, gen)?;
        let completion = (gen + 1) * lag;
        generations = gen + 1;
        elapsed = completion;
        trajectory.push(batch_min(&fitness));
        if tracker.observe(&population, &fitness, completion) {
            break;
        }
        if gen + 1 < cfg.max_generations {
            population = next_generation(&population, &fitness, n as usize, cfg, &mut rng)?;
        }
    }
    Ok(tracker.finish(Algorithm::A, elapsed, generations, trajectory, true, 0, None))
}

/// Genotype-distributed, no pipelining: one batch in flight, each
/// generation launched the moment the previous one returns.
pub fn run_b(net: &Network, cfg: &GAConfig) -> Result<RunStats, EngineError> {
    let evaluator = Evaluator::new(net, cfg.field);
    cfg.validate(evaluator.lag(), Algorithm::B)?;
    let lag = evaluator.lag();
    let n = cfg.population_size;
    let mut rng = stream_rng(cfg.seed, &[STREAM_ENGINE]);
    let mut population = initial_batch(evaluator.layout(), n, &mut rng);
    let mut pipeline = Pipeline::new();
    let mut trace = cfg.record_trace.then(Vec::new);
    let mut tracker = Tracker::new(cfg.target_fitness);
    let mut trajectory = Vec::new();
    let mut elapsed = 0;
    let mut generations = 0;

    for gen in 0..cfg.max_generations {
        let launch = gen * lag;
        tracker.record_launch(launch);
        let result = evaluator.evaluate_batch(
            &population,
            cfg.seed,
            gen,
            launch,
            &mut pipeline,
            trace.as_mut(),
        )?;
        generations = gen + 1;
        elapsed = result.completion;
        trajectory.push(batch_min(&result.fitness));
        if tracker.observe(&population, &result.fitness, result.completion) {
            break;
        }
        if gen + 1 < cfg.max_generations {
            population = next_generation(&population, &result.fitness, n as usize, cfg, &mut rng)?;
        }
    }
    Ok(tracker.finish(Algorithm::B, elapsed, generations, trajectory, false, 0, trace))
}

/// Generational / single population: k batches launched on consecutive
/// slots, pipeline flushed, then the pooled k*N genotypes are regenerated
/// as one population. One generation spans 2l + k - 1 time units.
pub fn run_c(net: &Network, cfg: &GAConfig) -> Result<RunStats, EngineError> {
    let evaluator = Evaluator::new(net, cfg.field);
    cfg.validate(evaluator.lag(), Algorithm::C)?;
    let lag = evaluator.lag();
    let n = cfg.population_size as usize;
    let k = cfg.pipeline_depth as usize;
    let period = lag + k as u64 - 1;
    let mut rng = stream_rng(cfg.seed, &[STREAM_ENGINE]);
    let mut population: Vec<Genotype> = (0..k)
        .flat_map(|_| initial_batch(evaluator.layout(), cfg.population_size, &mut rng))
        .collect();
    let mut pipeline = Pipeline::new();
    let mut trace = cfg.record_trace.then(Vec::new);
    let mut tracker = Tracker::new(cfg.target_fitness);
    let mut trajectory = Vec::new();
    let mut elapsed = 0;
    let mut generations = 0;

    'generations: for gen in 0..cfg.max_generations {
        let start = gen * period;
        let mut fitness = vec![Fitness::Infeasible; k * n];
        let mut results: Vec<EvalResult> = Vec::with_capacity(k);
        for j in 0..k {
            let launch = start + j as u64;
            tracker.record_launch(launch);
            results.push(evaluator.evaluate_batch(
                &population[j * n..(j + 1) * n],
                cfg.seed,
                gen * k as u64 + j as u64,
                launch,
                &mut pipeline,
                trace.as_mut(),
            )?);
        }
        generations = gen + 1;
        for (j, result) in results.iter().enumerate() {
            fitness[j * n..(j + 1) * n].copy_from_slice(&result.fitness);
            elapsed = result.completion;
            if tracker.observe(
                &population[j * n..(j + 1) * n],
                &result.fitness,
                result.completion,
            ) {
                trajectory.push(batch_min(&fitness[..(j + 1) * n]));
                break 'generations;
            }
        }
        trajectory.push(batch_min(&fitness));
        if gen + 1 < cfg.max_generations {
            population = next_generation(&population, &fitness, k * n, cfg, &mut rng)?;
        }
    }
    Ok(tracker.finish(Algorithm::C, elapsed, generations, trajectory, false, 0, trace))
}

struct Subpopulation {
    /// genotypes currently in flight (or about to be launched)
    in_flight: Vec<Genotype>,
    pending: Option<EvalResult>,
    /// most recent generation whose fitness values are available
    evaluated: Vec<Genotype>,
    fitness: Vec<Fitness>,
    age: u64,
}

/// Generational / multi-population: k subpopulations staggered one slot
/// apart, each advancing every 2l units with no flush. Every f generations
/// a subpopulation replaces its worst k-1 individuals with the best
/// individual of every other subpopulation, donors taken from the most
/// recent generation whose fitness is already known (age gap at most one).
pub fn run_d(net: &Network, cfg: &GAConfig) -> Result<RunStats, EngineError> {
    let evaluator = Evaluator::new(net, cfg.field);
    cfg.validate(evaluator.lag(), Algorithm::D)?;
    let lag = evaluator.lag();
    let n = cfg.population_size as usize;
    let k = cfg.pipeline_depth as usize;
    let f = cfg.migration_interval as u64;
    let mut rng = stream_rng(cfg.seed, &[STREAM_ENGINE]);
    let mut pipeline = Pipeline::new();
    let mut trace = cfg.record_trace.then(Vec::new);
    let mut tracker = Tracker::new(cfg.target_fitness);
    let mut trajectory = Vec::new();
    let mut elapsed = 0;
    let mut generations = 0;
    let mut max_age_gap = 0u64;

    let mut subpops: Vec<Subpopulation> = Vec::with_capacity(k);
    for j in 0..k {
        let genotypes = initial_batch(evaluator.layout(), cfg.population_size, &mut rng);
        let launch = j as u64;
        tracker.record_launch(launch);
        let pending = evaluator.evaluate_batch(
            &genotypes,
            cfg.seed,
            j as u64,
            launch,
            &mut pipeline,
            trace.as_mut(),
        )?;
        subpops.push(Subpopulation {
            in_flight: genotypes,
            pending: Some(pending),
            evaluated: Vec::new(),
            fitness: Vec::new(),
            age: 0,
        });
    }

    'rows: for gen in 0..cfg.max_generations {
        let mut row_best = Fitness::Infeasible;
        for j in 0..k {
            let result = subpops[j].pending.take().expect("a batch is in flight");
            let sub = &mut subpops[j];
            sub.evaluated = std::mem::take(&mut sub.in_flight);
            sub.fitness = result.fitness.clone();
            sub.age = gen;
            elapsed = result.completion;
            generations = gen + 1;
            row_best = row_best.min(batch_min(&result.fitness));
            let stop = tracker.observe(&subpops[j].evaluated, &result.fitness, result.completion);
            if stop {
                trajectory.push(row_best);
                break 'rows;
            }
            if gen + 1 >= cfg.max_generations {
                continue;
            }

            // renew subpopulation j for generation gen+1
            let mut parents = subpops[j].evaluated.clone();
            let mut parent_fitness = subpops[j].fitness.clone();
            if (gen + 1) % f == 0 && k > 1 {
                migrate(
                    &mut parents,
                    &mut parent_fitness,
                    &subpops,
                    j,
                    gen,
                    &mut max_age_gap,
                );
            }
            let children = next_generation(&parents, &parent_fitness, n, cfg, &mut rng)?;
            let launch = j as u64 + (gen + 1) * lag;
            tracker.record_launch(launch);
            let pending = evaluator.evaluate_batch(
                &children,
                cfg.seed,
                (gen + 1) * k as u64 + j as u64,
                launch,
                &mut pipeline,
                trace.as_mut(),
            )?;
            let sub = &mut subpops[j];
            sub.in_flight = children;
            sub.pending = Some(pending);
        }
        trajectory.push(row_best);
    }
    Ok(tracker.finish(
        Algorithm::D,
        elapsed,
        generations,
        trajectory,
        false,
        max_age_gap,
        trace,
    ))
}

/// Replace the worst individuals of the renewing subpopulation with the
/// best individual of every other subpopulation that has an evaluated
/// generation. Ties on both sides break toward the lowest index.
fn migrate(
    parents: &mut [Genotype],
    parent_fitness: &mut [Fitness],
    subpops: &[Subpopulation],
    renewing: usize,
    generation: u64,
    max_age_gap: &mut u64,
) {
    let mut donors: Vec<(Genotype, Fitness)> = Vec::with_capacity(subpops.len() - 1);
    for (j, sub) in subpops.iter().enumerate() {
        if j == renewing || sub.evaluated.is_empty() {
            continue;
        }
        let best = sub
            .fitness
            .iter()
            .enumerate()
            .min_by_key(|(i, f)| (**f, *i))
            .expect("evaluated subpopulations are nonempty");
        donors.push((sub.evaluated[best.0].clone(), *best.1));
        *max_age_gap = (*max_age_gap).max(generation - sub.age);
    }
    // worst-first victim order, ties toward the lowest index
    let mut victims: Vec<usize> = (0..parents.len()).collect();
    victims.sort_by(|&a, &b| {
        parent_fitness[b]
            .cmp(&parent_fitness[a])
            .then(a.cmp(&b))
    });
    for ((genotype, fitness), &victim) in donors.into_iter().zip(&victims) {
        parents[victim] = genotype;
        parent_fitness[victim] = fitness;
    }
}

/// Non-generational / single population: a population of k*N updated
/// just-in-time. Each returning batch of N is merged (the best k*N of
/// (k+1)*N survive once the fill phase is over) and immediately replaced
/// in the pipeline by N offspring selected from the current population.
pub fn run_e(net: &Network, cfg: &GAConfig) -> Result<RunStats, EngineError> {
    let evaluator = Evaluator::new(net, cfg.field);
    cfg.validate(evaluator.lag(), Algorithm::E)?;
    let n = cfg.population_size as usize;
    let k = cfg.pipeline_depth as usize;
    let capacity = k * n;
    let total_batches = cfg
        .max_generations
        .saturating_mul(k as u64);
    let mut rng = stream_rng(cfg.seed, &[STREAM_ENGINE]);
    let mut pipeline = Pipeline::new();
    let mut trace = cfg.record_trace.then(Vec::new);
    let mut tracker = Tracker::new(cfg.target_fitness);
    let mut trajectory = Vec::new();
    let mut elapsed = 0;

    let mut population: Vec<Genotype> = Vec::with_capacity(capacity);
    let mut fitness: Vec<Fitness> = Vec::with_capacity(capacity);
    let mut in_flight: VecDeque<(EvalResult, Vec<Genotype>)> = VecDeque::with_capacity(k);
    let mut launched = 0u64;
    for j in 0..k.min(total_batches as usize) {
        let batch = initial_batch(evaluator.layout(), cfg.population_size, &mut rng);
        tracker.record_launch(j as u64);
        let result = evaluator.evaluate_batch(
            &batch,
            cfg.seed,
            launched,
            j as u64,
            &mut pipeline,
            trace.as_mut(),
        )?;
        in_flight.push_back((result, batch));
        launched += 1;
    }

    let mut completed = 0u64;
    while let Some((result, batch)) = in_flight.pop_front() {
        completed += 1;
        elapsed = result.completion;
        let stop = tracker.observe(&batch, &result.fitness, result.completion);
        if population.len() < capacity {
            // fill phase: the offspring join unconditionally
            population.extend(batch);
            fitness.extend(result.fitness.iter().copied());
        } else {
            population.extend(batch);
            fitness.extend(result.fitness.iter().copied());
            let mut order: Vec<usize> = (0..population.len()).collect();
            order.sort_by_key(|&i| (fitness[i], i));
            order.truncate(capacity);
            order.sort_unstable();
            population = order.iter().map(|&i| population[i].clone()).collect();
            fitness = order.iter().map(|&i| fitness[i]).collect();
        }
        trajectory.push(*fitness.iter().min().expect("population is nonempty"));
        if stop {
            break;
        }
        if launched < total_batches {
            let children = next_generation(&population, &fitness, n, cfg, &mut rng)?;
            tracker.record_launch(result.completion);
            let next = evaluator.evaluate_batch(
                &children,
                cfg.seed,
                launched,
                result.completion,
                &mut pipeline,
                trace.as_mut(),
            )?;
            in_flight.push_back((next, children));
            launched += 1;
        }
    }
    let generations = completed / k as u64;
    Ok(tracker.finish(
        Algorithm::E,
        elapsed,
        generations,
        trajectory,
        false,
        0,
        trace,
    ))
}
