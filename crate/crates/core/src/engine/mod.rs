//! GA control loops over the distributed evaluation pipeline.
//!
//! Five run modes share the same genetic machinery and differ in how
//! batches occupy the pipeline:
//!
//! * `A` — centralized baseline, no clock (elapsed time is synthetic);
//! * `B` — one batch in flight, a new generation every 2l time units;
//! * `C` — k batches launched back to back, flushed, then regenerated as a
//!   single population;
//! * `D` — k temporally staggered subpopulations advancing independently,
//!   with age-mixed migration every f generations;
//! * `E` — one population of k*N updated just-in-time as each batch of N
//!   offspring returns, keeping the best k*N individuals.

use crate::galois::FieldSpec;
use crate::genome::{Fitness, GenomeError, Genotype};
use crate::netgraph::NetworkError;
use crate::protocol::{ProtocolError, TraceEvent};
use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

mod runs;
mod sweep;

pub use runs::{run_a, run_b, run_c, run_d, run_e};
pub use sweep::greedy_sweep;

/// Stream-id domain for the control-loop RNG (selection, pairing,
/// variation); evaluation randomness lives in per-node streams.
pub(crate) const STREAM_ENGINE: u64 = 0x454E_4745;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("selection over an empty population")]
    EmptyPopulation,
    #[error("coordination vector needs an even number of selected indices, got {0}")]
    OddSelection(usize),
    #[error("greedy sweep requires an oracle-feasible genotype")]
    SweepInfeasible,
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Genome(#[from] GenomeError),
}

/// The five control loops.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    A,
    B,
    C,
    D,
    E,
}

/// Run parameters. `pipeline_depth` is k, the number of batches in flight;
/// its maximal useful value is 2l, one per time slot of the evaluation lag.
#[derive(Debug, Clone)]
pub struct GAConfig {
    /// Chromosomes per batch (N).
    pub population_size: u32,
    /// Batches in flight (k); used by C, D, and E.
    pub pipeline_depth: u32,
    /// Generations between migrations (f); used by D.
    pub migration_interval: u32,
    pub tournament_size: u32,
    /// Probability that a selected pair undergoes crossover at all.
    pub crossover_probability: f64,
    /// Per-block swap probability once a pair is crossed over.
    pub mixing_ratio: f64,
    /// Per-block mutation probability.
    pub mutation_rate: f64,
    pub field: FieldSpec,
    /// Evaluated generations (batch rounds) before stopping.
    pub max_generations: u64,
    /// Stop at the first source-side observation of a fitness this low.
    pub target_fitness: Option<u32>,
    pub seed: u64,
    /// Collect the full delivery trace (costly; small runs only).
    pub record_trace: bool,
}

impl GAConfig {
    pub(crate) fn validate(&self, lag: u64, alg: Algorithm) -> Result<(), EngineError> {
        let fail = |msg: String| Err(EngineError::InvalidConfig(msg));
        if self.population_size < 2 || self.population_size % 2 != 0 {
            return fail(format!(
                "population size must be even and at least 2, got {}",
                self.population_size
            ));
        }
        if self.tournament_size == 0 {
            return fail("tournament size must be at least 1".into());
        }
        let uses_pipeline_depth = matches!(alg, Algorithm::C | Algorithm::D | Algorithm::E);
        if uses_pipeline_depth && !(1..=lag).contains(&(self.pipeline_depth as u64)) {
            return fail(format!(
                "pipeline depth must lie in 1..=2l = {lag}, got {}",
                self.pipeline_depth
            ));
        }
        if alg == Algorithm::D && self.migration_interval == 0 {
            return fail("migration interval must be at least 1".into());
        }
        for (name, p) in [
            ("crossover probability", self.crossover_probability),
            ("mixing ratio", self.mixing_ratio),
            ("mutation rate", self.mutation_rate),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return fail(format!("{name} must be a probability, got {p}"));
            }
        }
        if self.max_generations == 0 {
            return fail("at least one generation is required".into());
        }
        Ok(())
    }
}

/// Source-computed message that lets every merging node apply identical
/// genetic operations: the selected chromosome indices arranged as
/// consecutive pairs, plus one crossover flag per pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoordinationVector {
    pub order: Vec<u32>,
    pub crossover_flags: Vec<bool>,
}

/// Tournament selection: each winner is the best of `tournament_size`
/// uniform draws with replacement; ties go to the lowest index.
pub fn tournament_select(
    fitness: &[Fitness],
    count: usize,
    tournament_size: u32,
    rng: &mut impl Rng,
) -> Result<Vec<u32>, EngineError> {
    if fitness.is_empty() {
        return Err(EngineError::EmptyPopulation);
    }
    let n = fitness.len();
    let mut winners = Vec::with_capacity(count);
    for _ in 0..count {
        let mut best = rng.random_range(0..n);
        for _ in 1..tournament_size {
            let challenger = rng.random_range(0..n);
            if (fitness[challenger], challenger) < (fitness[best], best) {
                best = challenger;
            }
        }
        winners.push(best as u32);
    }
    Ok(winners)
}

/// Randomly pair the selected indices and flag each pair for crossover
/// with the given probability.
pub fn build_coordination_vector(
    selected: &[u32],
    crossover_probability: f64,
    rng: &mut impl Rng,
) -> Result<CoordinationVector, EngineError> {
    if selected.len() % 2 != 0 {
        return Err(EngineError::OddSelection(selected.len()));
    }
    let mut order = selected.to_vec();
    order.shuffle(rng);
    let crossover_flags = (0..order.len() / 2)
        .map(|_| rng.random_bool(crossover_probability))
        .collect();
    Ok(CoordinationVector {
        order,
        crossover_flags,
    })
}

/// One generational step: select `count` parents, pair them, cross over
/// flagged pairs block-wise, then mutate every child. Children replace
/// parents wholesale; no elitism.
pub(crate) fn next_generation(
    population: &[Genotype],
    fitness: &[Fitness],
    count: usize,
    cfg: &GAConfig,
    rng: &mut impl Rng,
) -> Result<Vec<Genotype>, EngineError> {
    let selected = tournament_select(fitness, count, cfg.tournament_size, rng)?;
    let coord = build_coordination_vector(&selected, cfg.crossover_probability, rng)?;
    let mut children = Vec::with_capacity(count);
    for (pair, &flagged) in coord.order.chunks_exact(2).zip(&coord.crossover_flags) {
        let a = &population[pair[0] as usize];
        let b = &population[pair[1] as usize];
        let (c0, c1) = if flagged {
            crate::genome::blockwise_crossover(a, b, cfg.mixing_ratio, rng)?
        } else {
            (a.clone(), b.clone())
        };
        children.push(crate::genome::blockwise_mutation(&c0, cfg.mutation_rate, rng));
        children.push(crate::genome::blockwise_mutation(&c1, cfg.mutation_rate, rng));
    }
    Ok(children)
}

/// Closed-form evaluation efficiency (fitness evaluations per time unit)
/// under a full pipeline. `generations` matters only for D, whose pipeline
/// spends an extra lag priming. Algorithm A has no wall-clock semantics.
pub fn theoretical_efficiency(
    alg: Algorithm,
    population_size: u32,
    longest_path: u32,
    pipeline_depth: u32,
    generations: u64,
) -> Option<f64> {
    let n = population_size as f64;
    let l2 = 2.0 * longest_path as f64;
    let k = pipeline_depth as f64;
    let g = generations as f64;
    match alg {
        Algorithm::A => None,
        Algorithm::B => Some(n / l2),
        Algorithm::C => Some(k * n / (l2 + k - 1.0)),
        Algorithm::D => Some(g * k * n / ((g + 1.0) * l2 + k - 1.0)),
        Algorithm::E => Some(k * n / l2),
    }
}

/// Everything observed during one run.
#[derive(Debug, Clone)]
pub struct RunStats {
    pub algorithm: Algorithm,
    /// Time units from the first launch to the stop observation.
    pub elapsed: u64,
    /// Completed fitness evaluations.
    pub evaluations: u64,
    /// Evaluated generations (batch rounds).
    pub generations: u64,
    /// Measured evaluations per time unit.
    pub eval_efficiency: f64,
    pub best_fitness: Fitness,
    pub best_genotype: Option<Genotype>,
    /// Best observed fitness per generation (per batch return for E).
    pub trajectory: Vec<Fitness>,
    /// Completion time of the batch that first met the target, if any.
    pub time_to_target: Option<u64>,
    /// True for algorithm A, whose elapsed time is generations * 2l.
    pub synthetic_time: bool,
    /// Launch slot of every batch sent into the pipeline.
    pub launch_times: Vec<u64>,
    /// Completion time of every batch observed at the source.
    pub completion_times: Vec<u64>,
    /// Largest generation-age difference seen across migrations (D).
    pub max_migration_age_gap: u64,
    pub trace: Option<Vec<TraceEvent>>,
}

pub(crate) struct Tracker {
    target: Option<u32>,
    pub evaluations: u64,
    pub best: Option<(Fitness, Genotype)>,
    pub launch_times: Vec<u64>,
    pub completion_times: Vec<u64>,
    pub time_to_target: Option<u64>,
}

impl Tracker {
    pub fn new(target: Option<u32>) -> Tracker {
        Tracker {
            target,
            evaluations: 0,
            best: None,
            launch_times: Vec::new(),
            completion_times: Vec::new(),
            time_to_target: None,
        }
    }

    pub fn record_launch(&mut self, slot: u64) {
        self.launch_times.push(slot);
    }

    /// Account one completed batch; returns true when the target fitness
    /// has been observed and the run should stop.
    pub fn observe(
        &mut self,
        genotypes: &[Genotype],
        fitness: &[Fitness],
        completion: u64,
    ) -> bool {
        self.evaluations += fitness.len() as u64;
        self.completion_times.push(completion);
        let batch_best = fitness
            .iter()
            .enumerate()
            .min_by_key(|(i, f)| (**f, *i))
            .expect("batches are nonempty");
        let improved = match &self.best {
            Some((f, _)) => batch_best.1 < f,
            None => true,
        };
        if improved {
            self.best = Some((*batch_best.1, genotypes[batch_best.0].clone()));
        }
        if self.time_to_target.is_none() {
            if let Some(t) = self.target {
                if *batch_best.1 <= Fitness::Links(t) {
                    self.time_to_target = Some(completion);
                }
            }
        }
        self.time_to_target.is_some()
    }

    pub fn finish(
        self,
        algorithm: Algorithm,
        elapsed: u64,
        generations: u64,
        trajectory: Vec<Fitness>,
        synthetic_time: bool,
        max_migration_age_gap: u64,
        trace: Option<Vec<TraceEvent>>,
    ) -> RunStats {
        let (best_fitness, best_genotype) = match self.best {
            Some((f, g)) => (f, Some(g)),
            None => (Fitness::Infeasible, None),
        };
        RunStats {
            algorithm,
            elapsed,
            evaluations: self.evaluations,
            generations,
            eval_efficiency: self.evaluations as f64 / elapsed.max(1) as f64,
            best_fitness,
            best_genotype,
            trajectory,
            time_to_target: self.time_to_target,
            synthetic_time,
            launch_times: self.launch_times,
            completion_times: self.completion_times,
            max_migration_age_gap,
            trace,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galois::stream_rng;

    #[test]
    fn full_size_tournament_with_distinct_fitness_returns_the_best() {
        let fitness: Vec<Fitness> = [5u32, 3, 7, 1, 9]
            .iter()
            .map(|&n| Fitness::Links(n))
            .collect();
        let mut rng = stream_rng(1, &[0]);
        // with tournament size == population size and distinct fitnesses the
        // winner is almost surely index 3; over many trials it must always be
        for _ in 0..50 {
            let sel = tournament_select(&fitness, 8, 64, &mut rng).unwrap();
            assert!(sel.iter().all(|&i| i == 3));
        }
    }

    #[test]
    fn singleton_population_always_wins() {
        let mut rng = stream_rng(2, &[0]);
        let sel = tournament_select(&[Fitness::Links(4)], 5, 3, &mut rng).unwrap();
        assert_eq!(sel, vec![0, 0, 0, 0, 0]);
        assert!(matches!(
            tournament_select(&[], 1, 1, &mut rng),
            Err(EngineError::EmptyPopulation)
        ));
    }

    #[test]
    fn equal_fitness_selection_is_uniform() {
        let fitness = vec![Fitness::Links(2); 8];
        let mut rng = stream_rng(3, &[0]);
        let mut counts = [0u32; 8];
        let trials = 80_000;
        let sel = tournament_select(&fitness, trials, 1, &mut rng).unwrap();
        for &i in &sel {
            counts[i as usize] += 1;
        }
        let expect = trials as f64 / 8.0;
        let sigma = (trials as f64 * (1.0 / 8.0) * (7.0 / 8.0)).sqrt();
        for &c in &counts {
            assert!((c as f64 - expect).abs() < 5.0 * sigma, "count {c}");
        }
    }

    #[test]
    fn coordination_vector_is_a_perfect_matching() {
        let selected: Vec<u32> = (0..16).collect();
        let mut rng = stream_rng(4, &[0]);
        let cv = build_coordination_vector(&selected, 0.5, &mut rng).unwrap();
        assert_eq!(cv.order.len(), 16);
        assert_eq!(cv.crossover_flags.len(), 8);
        let mut sorted = cv.order.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, selected);

        let all_off = build_coordination_vector(&selected, 0.0, &mut rng).unwrap();
        assert!(all_off.crossover_flags.iter().all(|&f| !f));
        let all_on = build_coordination_vector(&selected, 1.0, &mut rng).unwrap();
        assert!(all_on.crossover_flags.iter().all(|&f| f));

        assert!(matches!(
            build_coordination_vector(&[1, 2, 3], 0.5, &mut rng),
            Err(EngineError::OddSelection(3))
        ));
    }

    #[test]
    fn efficiency_formulas_match_the_closed_forms() {
        assert_eq!(
            theoretical_efficiency(Algorithm::B, 200, 16, 1, 0),
            Some(6.25)
        );
        assert_eq!(
            theoretical_efficiency(Algorithm::C, 200, 16, 32, 0),
            Some(6400.0 / 63.0)
        );
        // D approaches N as the generation count grows
        let d = theoretical_efficiency(Algorithm::D, 200, 16, 32, 1_000_000).unwrap();
        assert!((d - 200.0).abs() < 0.01);
        assert_eq!(
            theoretical_efficiency(Algorithm::E, 200, 16, 32, 0),
            Some(200.0)
        );
        assert_eq!(theoretical_efficiency(Algorithm::A, 200, 16, 1, 0), None);
    }
}
