//! Post-run local search: demote link states wherever feasibility survives.

use super::EngineError;
use crate::genome::{coding_link_count, BlockState, Genotype};
use crate::netgraph::{block_layout, oracle_feasible_with, Network};

/// Deterministic scan in layout order. A coded block tries each single
/// input in order and then no transmission, keeping the first demotion the
/// oracle accepts; an uncoded block tries switching off entirely. Never
/// increases the coding-link count and always returns a feasible genotype.
pub fn greedy_sweep(net: &Network, genotype: &Genotype) -> Result<Genotype, EngineError> {
    let layout = block_layout(net);
    if !oracle_feasible_with(net, &layout, genotype)? {
        return Err(EngineError::SweepInfeasible);
    }
    let mut current = genotype.clone();
    for block in 0..layout.len() {
        let k = layout.block_len(block) as u16;
        match current.states()[block] {
            BlockState::Coded => {
                let candidates = (0..k)
                    .map(BlockState::Uncoded)
                    .chain(std::iter::once(BlockState::Inactive));
                for candidate in candidates {
                    current.set_state(block, candidate);
                    if oracle_feasible_with(net, &layout, &current)? {
                        break;
                    }
                    current.set_state(block, BlockState::Coded);
                }
            }
            BlockState::Uncoded(_) => {
                let original = current.states()[block];
                current.set_state(block, BlockState::Inactive);
                if !oracle_feasible_with(net, &layout, &current)? {
                    current.set_state(block, original);
                }
            }
            BlockState::Inactive => {}
        }
    }
    debug_assert!(coding_link_count(&current) <= coding_link_count(genotype));
    Ok(current)
}
