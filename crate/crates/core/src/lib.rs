//! Minimizing the number of network-coding links in single-source
//! multicast.
//!
//! The toolkit models a multicast instance as a unit-capacity directed
//! acyclic multigraph, encodes per-link coding decisions as block-structured
//! genotypes, and searches for feasible assignments with few coding links
//! using a genetic algorithm whose fitness evaluation is simulated as a
//! distributed protocol: pilot vectors flow from the source to the sinks,
//! fitness vectors aggregate back, and one full evaluation costs twice the
//! longest path. Pipelined run modes keep many batches in flight to raise
//! the number of evaluations per time unit. A deterministic max-flow oracle
//! provides ground-truth feasibility for verification and greedy sweeps.

pub mod engine;
pub mod galois;
pub mod genome;
pub mod netgraph;
pub mod protocol;

pub use engine::{
    build_coordination_vector, greedy_sweep, run_a, run_b, run_c, run_d, run_e,
    theoretical_efficiency, tournament_select, Algorithm, EngineError, GAConfig, RunStats,
};
pub use galois::{Field, FieldSpec};
pub use genome::{
    all_ones_genotype, blockwise_crossover, blockwise_mutation, coding_link_count,
    random_genotype, BlockState, Fitness, Genotype,
};
pub use netgraph::{
    block_layout, build_butterfly, build_butterfly_prime, build_cascade, build_dense,
    emit_topology, load_topology, longest_path, oracle_feasible, search_space_size, BlockLayout,
    Network, NetworkError,
};
pub use protocol::{count_field_multiplications, EvalResult, Evaluator, Pipeline};
