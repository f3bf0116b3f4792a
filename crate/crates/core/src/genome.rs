//! Block-structured genotypes and block-wise genetic operators.
//!
//! A block of length k can take only k+2 canonical states: all-ones
//! (coded transmission), one of k one-hot strings (uncoded forwarding of a
//! single input), or all-zeros (no transmission). Bit patterns with two or
//! more ones behave identically to all-ones, so they are never represented.

use crate::netgraph::BlockLayout;
use rand::Rng;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenomeError {
    #[error("genotypes belong to different block layouts")]
    LayoutMismatch,
    #[error("block {block}: {message}")]
    BadBlock { block: usize, message: String },
    #[error("genotype text: {0}")]
    Parse(String),
}

/// Canonical state of one block of length k.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BlockState {
    /// All inputs active; the outgoing link carries a coded combination.
    Coded,
    /// Exactly input i active; plain forwarding, no coding.
    Uncoded(u16),
    /// No input active; the link carries nothing.
    Inactive,
}

/// An assignment of one canonical state per block of a layout. The
/// fingerprint ties a genotype to the layout that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Genotype {
    states: Vec<BlockState>,
    block_lens: Vec<u16>,
    fingerprint: u64,
}

impl Genotype {
    pub fn from_states(
        layout: &BlockLayout,
        states: Vec<BlockState>,
    ) -> Result<Genotype, GenomeError> {
        if states.len() != layout.len() {
            return Err(GenomeError::LayoutMismatch);
        }
        for (i, s) in states.iter().enumerate() {
            if let BlockState::Uncoded(j) = s {
                if *j as usize >= layout.block_len(i) {
                    return Err(GenomeError::BadBlock {
                        block: i,
                        message: format!(
                            "uncoded input {} out of range for block length {}",
                            j,
                            layout.block_len(i)
                        ),
                    });
                }
            }
        }
        Ok(Genotype {
            states,
            block_lens: (0..layout.len()).map(|i| layout.block_len(i) as u16).collect(),
            fingerprint: layout.fingerprint(),
        })
    }

    pub fn states(&self) -> &[BlockState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Length k of block i.
    pub fn block_len(&self, i: usize) -> u16 {
        self.block_lens[i]
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub(crate) fn set_state(&mut self, block: usize, state: BlockState) {
        debug_assert!(match state {
            BlockState::Uncoded(j) => j < self.block_lens[block],
            _ => true,
        });
        self.states[block] = state;
    }

    /// Canonical bit-string form, one block per `|`-separated group, e.g.
    /// `11|10|00`. Bit i of a group is input i of that block.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, s) in self.states.iter().enumerate() {
            if i > 0 {
                out.push('|');
            }
            let k = self.block_lens[i] as usize;
            match s {
                BlockState::Coded => out.extend(std::iter::repeat('1').take(k)),
                BlockState::Inactive => out.extend(std::iter::repeat('0').take(k)),
                BlockState::Uncoded(j) => {
                    for bit in 0..k {
                        out.push(if bit == *j as usize { '1' } else { '0' });
                    }
                }
            }
        }
        out
    }

    /// Parse the `to_text` form against a layout. Only the k+2 canonical
    /// bit strings per block are accepted.
    pub fn from_text(layout: &BlockLayout, text: &str) -> Result<Genotype, GenomeError> {
        let groups: Vec<&str> = if text.is_empty() {
            Vec::new()
        } else {
            text.split('|').collect()
        };
        if groups.len() != layout.len() {
            return Err(GenomeError::Parse(format!(
                "expected {} blocks, got {}",
                layout.len(),
                groups.len()
            )));
        }
        let mut states = Vec::with_capacity(groups.len());
        for (i, group) in groups.iter().enumerate() {
            let k = layout.block_len(i);
            if group.len() != k || group.bytes().any(|b| b != b'0' && b != b'1') {
                return Err(GenomeError::Parse(format!(
                    "block {i}: '{group}' is not a length-{k} bit string"
                )));
            }
            let ones: Vec<usize> = group
                .bytes()
                .enumerate()
                .filter(|(_, b)| *b == b'1')
                .map(|(j, _)| j)
                .collect();
            let state = match ones.len() {
                0 => BlockState::Inactive,
                1 => BlockState::Uncoded(ones[0] as u16),
                n if n == k => BlockState::Coded,
                _ => {
                    return Err(GenomeError::Parse(format!(
                        "block {i}: '{group}' is not canonical (use all-ones for coded)"
                    )))
                }
            };
            states.push(state);
        }
        Genotype::from_states(layout, states)
    }
}

/// Fitness of a genotype: the number of coding links when feasible, with a
/// dedicated sentinel for infeasibility that absorbs addition and orders
/// above every finite value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fitness {
    Links(u32),
    Infeasible,
}

impl Fitness {
    pub const ZERO: Fitness = Fitness::Links(0);

    pub fn is_feasible(self) -> bool {
        matches!(self, Fitness::Links(_))
    }

    /// Saturating component addition; Infeasible dominates.
    pub fn saturating_add(self, other: Fitness) -> Fitness {
        match (self, other) {
            (Fitness::Links(a), Fitness::Links(b)) => Fitness::Links(a.saturating_add(b)),
            _ => Fitness::Infeasible,
        }
    }

    pub fn add_links(self, n: u32) -> Fitness {
        self.saturating_add(Fitness::Links(n))
    }
}

impl PartialOrd for Fitness {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Fitness {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        match (self, other) {
            (Fitness::Links(a), Fitness::Links(b)) => a.cmp(b),
            (Fitness::Links(_), Fitness::Infeasible) => std::cmp::Ordering::Less,
            (Fitness::Infeasible, Fitness::Links(_)) => std::cmp::Ordering::Greater,
            (Fitness::Infeasible, Fitness::Infeasible) => std::cmp::Ordering::Equal,
        }
    }
}

impl fmt::Display for Fitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fitness::Links(n) => write!(f, "{n}"),
            Fitness::Infeasible => write!(f, "inf"),
        }
    }
}

/// Each block drawn uniformly from its k+2 canonical states.
pub fn random_genotype(layout: &BlockLayout, rng: &mut impl Rng) -> Genotype {
    let states = (0..layout.len())
        .map(|i| {
            let k = layout.block_len(i) as u32;
            match rng.random_range(0..k + 2) {
                0 => BlockState::Coded,
                1 => BlockState::Inactive,
                j => BlockState::Uncoded((j - 2) as u16),
            }
        })
        .collect();
    Genotype::from_states(layout, states).expect("states are drawn in range")
}

/// Every block coded. Imposes no routing constraint, so it is feasible
/// whenever the rate is achievable at all; used to seed initial populations.
pub fn all_ones_genotype(layout: &BlockLayout) -> Genotype {
    Genotype::from_states(layout, vec![BlockState::Coded; layout.len()])
        .expect("all-coded states always match the layout")
}

/// Number of coding links: blocks in the Coded state. Blocks always have
/// k >= 2 inputs, so a Coded block is a genuine combination.
pub fn coding_link_count(genotype: &Genotype) -> u32 {
    genotype
        .states()
        .iter()
        .filter(|s| matches!(s, BlockState::Coded))
        .count() as u32
}

/// Block-wise uniform crossover: each block position is swapped between the
/// two genotypes independently with probability `mixing_ratio`.
pub fn blockwise_crossover(
    a: &Genotype,
    b: &Genotype,
    mixing_ratio: f64,
    rng: &mut impl Rng,
) -> Result<(Genotype, Genotype), GenomeError> {
    if a.fingerprint != b.fingerprint {
        return Err(GenomeError::LayoutMismatch);
    }
    let mut ca = a.clone();
    let mut cb = b.clone();
    for i in 0..ca.states.len() {
        if rng.random_bool(mixing_ratio) {
            std::mem::swap(&mut ca.states[i], &mut cb.states[i]);
        }
    }
    Ok((ca, cb))
}

/// Block-wise mutation: each block, independently with probability
/// `mutation_rate`, is replaced by a state drawn uniformly from the other
/// k+1 canonical states (never its current one).
pub fn blockwise_mutation(g: &Genotype, mutation_rate: f64, rng: &mut impl Rng) -> Genotype {
    let mut out = g.clone();
    for i in 0..out.states.len() {
        if !rng.random_bool(mutation_rate) {
            continue;
        }
        let k = out.block_lens[i] as u32;
        // states indexed 0=Coded, 1=Inactive, 2..k+2=Uncoded(j)
        let current = match out.states[i] {
            BlockState::Coded => 0,
            BlockState::Inactive => 1,
            BlockState::Uncoded(j) => 2 + j as u32,
        };
        let mut pick = rng.random_range(0..k + 1);
        if pick >= current {
            pick += 1;
        }
        out.states[i] = match pick {
            0 => BlockState::Coded,
            1 => BlockState::Inactive,
            j => BlockState::Uncoded((j - 2) as u16),
        };
    }
    out
}

/// All genotypes of a layout in lexicographic state order. Only sensible
/// for layouts whose search space is tiny; used by exhaustive tests.
pub fn enumerate_genotypes(layout: &BlockLayout) -> impl Iterator<Item = Genotype> + '_ {
    let radices: Vec<u32> = (0..layout.len())
        .map(|i| layout.block_len(i) as u32 + 2)
        .collect();
    let total: u64 = radices.iter().map(|&r| r as u64).product();
    (0..total).map(move |mut code| {
        let states = radices
            .iter()
            .map(|&r| {
                let digit = (code % r as u64) as u32;
                code /= r as u64;
                match digit {
                    0 => BlockState::Coded,
                    1 => BlockState::Inactive,
                    j => BlockState::Uncoded((j - 2) as u16),
                }
            })
            .collect();
        Genotype::from_states(layout, states).expect("digits are in range")
    })
}
