//! Directed multigraph model for single-source multicast, block layout
//! extraction, and the deterministic feasibility oracle.
//!
//! Networks are immutable after construction: every constructor validates
//! acyclicity, reachability, and that the requested rate is achievable on
//! the unconstrained graph. Parallel links are first-class, each with its
//! own link id; larger capacities are modelled as multiple unit links.

use num_bigint::BigUint;
use thiserror::Error;

mod builders;
mod oracle;
mod topofile;

pub use builders::{build_butterfly, build_butterfly_prime, build_cascade, build_dense};
pub use oracle::{max_flow_unconstrained, oracle_feasible, oracle_feasible_with};
pub use topofile::{emit_topology, load_topology};

pub type NodeId = u32;
pub type LinkId = u32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NetworkError {
    #[error("graph contains a directed cycle")]
    Cyclic,
    #[error("source node {0} has incoming links")]
    SourceHasInputs(u64),
    #[error("no sink nodes specified")]
    NoSinks,
    #[error("the source cannot be a sink")]
    SourceIsSink,
    #[error("node {0} is not reachable from the source")]
    Unreachable(u64),
    #[error("node {0} cannot reach any sink")]
    DeadEnd(u64),
    #[error("rate {rate} is unachievable: max-flow to sink {sink} is {max_flow}")]
    RateUnachievable { rate: u32, sink: u64, max_flow: u32 },
    #[error("rate must be at least 1")]
    ZeroRate,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    BadParameter(String),
    #[error("genotype does not match the network's block layout")]
    LayoutMismatch,
}

/// One directed unit-capacity link.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Link {
    pub tail: NodeId,
    pub head: NodeId,
}

/// A validated multicast instance: acyclic multigraph, one source, a sink
/// set, and a target rate achievable on the unconstrained graph.
#[derive(Debug, Clone)]
pub struct Network {
    labels: Vec<u64>,
    links: Vec<Link>,
    source: NodeId,
    sinks: Vec<NodeId>,
    rate: u32,
    in_links: Vec<Vec<LinkId>>,
    out_links: Vec<Vec<LinkId>>,
    topo_order: Vec<NodeId>,
}

impl Network {
    /// Assemble and validate a network. `labels` gives the external name of
    /// each node (emitted in topology files); internal ids are indices.
    pub fn new(
        labels: Vec<u64>,
        links: Vec<Link>,
        source: NodeId,
        mut sinks: Vec<NodeId>,
        rate: u32,
    ) -> Result<Network, NetworkError> {
        let n = labels.len();
        sinks.sort_unstable();
        sinks.dedup();
        if sinks.is_empty() {
            return Err(NetworkError::NoSinks);
        }
        if sinks.contains(&source) {
            return Err(NetworkError::SourceIsSink);
        }
        if rate == 0 {
            return Err(NetworkError::ZeroRate);
        }

        let mut in_links = vec![Vec::new(); n];
        let mut out_links = vec![Vec::new(); n];
        for (i, link) in links.iter().enumerate() {
            out_links[link.tail as usize].push(i as LinkId);
            in_links[link.head as usize].push(i as LinkId);
        }
        if !in_links[source as usize].is_empty() {
            return Err(NetworkError::SourceHasInputs(labels[source as usize]));
        }

        // Kahn's algorithm; a leftover node means a cycle.
        let mut indegree: Vec<usize> = in_links.iter().map(Vec::len).collect();
        let mut queue: Vec<NodeId> = (0..n as NodeId)
            .filter(|&v| indegree[v as usize] == 0)
            .collect();
        let mut topo_order = Vec::with_capacity(n);
        let mut head = 0;
        while head < queue.len() {
            let v = queue[head];
            head += 1;
            topo_order.push(v);
            for &e in &out_links[v as usize] {
                let w = links[e as usize].head as usize;
                indegree[w] -= 1;
                if indegree[w] == 0 {
                    queue.push(w as NodeId);
                }
            }
        }
        if topo_order.len() != n {
            return Err(NetworkError::Cyclic);
        }

        // Every node must lie on some source-to-sink path, otherwise the
        // burst-oriented schedule would deadlock on it.
        let mut fwd = vec![false; n];
        fwd[source as usize] = true;
        for &v in &topo_order {
            if fwd[v as usize] {
                for &e in &out_links[v as usize] {
                    fwd[links[e as usize].head as usize] = true;
                }
            }
        }
        if let Some(v) = (0..n).find(|&v| !fwd[v]) {
            return Err(NetworkError::Unreachable(labels[v]));
        }
        let mut back = vec![false; n];
        for &t in &sinks {
            back[t as usize] = true;
        }
        for &v in topo_order.iter().rev() {
            if !back[v as usize] {
                back[v as usize] = out_links[v as usize]
                    .iter()
                    .any(|&e| back[links[e as usize].head as usize]);
            }
        }
        if let Some(v) = (0..n).find(|&v| !back[v]) {
            return Err(NetworkError::DeadEnd(labels[v]));
        }

        let net = Network {
            labels,
            links,
            source,
            sinks,
            rate,
            in_links,
            out_links,
            topo_order,
        };
        for &t in &net.sinks {
            let mf = oracle::max_flow_unconstrained(&net, t);
            if mf < rate {
                return Err(NetworkError::RateUnachievable {
                    rate,
                    sink: net.labels[t as usize],
                    max_flow: mf,
                });
            }
        }
        Ok(net)
    }

    /// Same network with a different target rate, revalidated.
    pub fn with_rate(&self, rate: u32) -> Result<Network, NetworkError> {
        Network::new(
            self.labels.clone(),
            self.links.clone(),
            self.source,
            self.sinks.clone(),
            rate,
        )
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn source(&self) -> NodeId {
        self.source
    }

    pub fn sinks(&self) -> &[NodeId] {
        &self.sinks
    }

    pub fn is_sink(&self, v: NodeId) -> bool {
        self.sinks.binary_search(&v).is_ok()
    }

    pub fn rate(&self) -> u32 {
        self.rate
    }

    pub fn label(&self, v: NodeId) -> u64 {
        self.labels[v as usize]
    }

    /// Incoming link ids of `v`, ascending.
    pub fn in_links(&self, v: NodeId) -> &[LinkId] {
        &self.in_links[v as usize]
    }

    /// Outgoing link ids of `v`, ascending.
    pub fn out_links(&self, v: NodeId) -> &[LinkId] {
        &self.out_links[v as usize]
    }

    pub fn topo_order(&self) -> &[NodeId] {
        &self.topo_order
    }

    /// A merging node has at least two incoming links; coding can occur only
    /// on the outgoing links of such nodes.
    pub fn is_merging(&self, v: NodeId) -> bool {
        self.in_links[v as usize].len() >= 2
    }

    /// Structural identity: link multiset, source, sinks, and rate, all in
    /// label space. Two networks with equal shapes behave identically.
    pub fn shape(&self) -> (Vec<(u64, u64)>, u64, Vec<u64>, u32) {
        let mut links: Vec<(u64, u64)> = self
            .links
            .iter()
            .map(|l| (self.labels[l.tail as usize], self.labels[l.head as usize]))
            .collect();
        links.sort_unstable();
        let sinks: Vec<u64> = self.sinks.iter().map(|&t| self.labels[t as usize]).collect();
        (links, self.labels[self.source as usize], sinks, self.rate)
    }
}

/// One block: the ordered incoming links of a merging node feeding one of
/// its outgoing links. A genotype assigns each block one canonical state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockDescriptor {
    pub node: NodeId,
    pub out_link: LinkId,
    /// The node's incoming links, ascending by link id; genotype bit i of
    /// this block refers to `inputs[i]`.
    pub inputs: Vec<LinkId>,
}

/// Deterministic enumeration of every block in a network, ordered by
/// (node id, outgoing link id) so genotypes are comparable across runs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockLayout {
    blocks: Vec<BlockDescriptor>,
    fingerprint: u64,
}

impl BlockLayout {
    pub fn blocks(&self) -> &[BlockDescriptor] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Block length k = the merging node's in-degree.
    pub fn block_len(&self, block: usize) -> usize {
        self.blocks[block].inputs.len()
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }
}

/// Extract the block layout of a network: each merging node with d_out
/// outgoing links contributes d_out blocks of length d_in.
pub fn block_layout(net: &Network) -> BlockLayout {
    let mut blocks = Vec::new();
    for v in 0..net.node_count() as NodeId {
        if !net.is_merging(v) {
            continue;
        }
        for &e in net.out_links(v) {
            blocks.push(BlockDescriptor {
                node: v,
                out_link: e,
                inputs: net.in_links(v).to_vec(),
            });
        }
    }
    let fingerprint = layout_fingerprint(&blocks);
    BlockLayout {
        blocks,
        fingerprint,
    }
}

fn layout_fingerprint(blocks: &[BlockDescriptor]) -> u64 {
    // FNV-1a over the block structure; stable across platforms.
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    let mut eat = |v: u64| {
        for byte in v.to_le_bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01B3);
        }
    };
    eat(blocks.len() as u64);
    for b in blocks {
        eat(b.node as u64);
        eat(b.out_link as u64);
        eat(b.inputs.len() as u64);
        for &i in &b.inputs {
            eat(i as u64);
        }
    }
    h
}

/// Size of the genotype search space: the product over blocks of (k + 2)
/// canonical states. The empty layout yields 1.
pub fn search_space_size(layout: &BlockLayout) -> BigUint {
    let mut m = BigUint::from(1u32);
    for b in layout.blocks() {
        m *= BigUint::from(b.inputs.len() as u64 + 2);
    }
    m
}

/// Length in links of the longest directed path from the source to any
/// sink. This is the forward-phase latency of the slowest sink; one full
/// evaluation takes twice this long.
pub fn longest_path(net: &Network) -> u32 {
    let dist = longest_path_per_node(net);
    net.sinks()
        .iter()
        .map(|&t| dist[t as usize])
        .max()
        .unwrap_or(0)
}

/// Longest path from the source to every node, by DAG dynamic programming.
/// Also the burst-schedule forward emission offset of each node.
pub(crate) fn longest_path_per_node(net: &Network) -> Vec<u32> {
    let mut dist = vec![0u32; net.node_count()];
    for &v in net.topo_order() {
        for &e in net.out_links(v) {
            let w = net.links()[e as usize].head as usize;
            dist[w] = dist[w].max(dist[v as usize] + 1);
        }
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Test-only oracle: enumerate every directed path from the source by
    /// exhaustive DFS. Exponential, so only for tiny networks.
    fn brute_force_longest_path(net: &Network) -> u32 {
        fn dfs(net: &Network, v: NodeId, len: u32, best: &mut u32) {
            if net.is_sink(v) {
                *best = (*best).max(len);
            }
            for &e in net.out_links(v) {
                dfs(net, net.links()[e as usize].head, len + 1, best);
            }
        }
        let mut best = 0;
        dfs(net, net.source(), 0, &mut best);
        best
    }

    #[test]
    fn butterfly_counts_and_merging_nodes() {
        let net = build_butterfly();
        assert_eq!(net.node_count(), 7);
        assert_eq!(net.link_count(), 9);
        assert_eq!(net.rate(), 2);
        // z is the only merging node with outputs; t1 and t2 merge but have
        // no outgoing links, so they contribute no blocks.
        let merging: Vec<NodeId> = (0..7).filter(|&v| net.is_merging(v)).collect();
        assert_eq!(merging, vec![3, 5, 6]);
        let layout = block_layout(&net);
        assert_eq!(layout.len(), 1);
        assert_eq!(layout.blocks()[0].node, 3);
        assert_eq!(layout.blocks()[0].inputs.len(), 2);
    }

    #[test]
    fn butterfly_prime_counts_and_layout() {
        let net = build_butterfly_prime();
        assert_eq!(net.node_count(), 7);
        assert_eq!(net.link_count(), 10);
        let layout = block_layout(&net);
        // z has two parallel outputs (2 blocks), w merges the parallel pair
        // and feeds both sinks (2 blocks)
        assert_eq!(layout.len(), 4);
        assert!(layout.blocks().iter().all(|b| b.inputs.len() == 2));
        let nodes: Vec<NodeId> = layout.blocks().iter().map(|b| b.node).collect();
        assert_eq!(nodes, vec![3, 3, 4, 4]);
    }

    #[test]
    fn search_space_sizes() {
        assert_eq!(
            search_space_size(&block_layout(&build_butterfly())),
            BigUint::from(4u32)
        );
        assert_eq!(
            search_space_size(&block_layout(&build_butterfly_prime())),
            BigUint::from(256u32)
        );
        let empty = BlockLayout {
            blocks: Vec::new(),
            fingerprint: layout_fingerprint(&[]),
        };
        assert_eq!(search_space_size(&empty), BigUint::from(1u32));
    }

    #[test]
    fn longest_paths_match_brute_force() {
        let butterfly = build_butterfly();
        assert_eq!(longest_path(&butterfly), 4);
        assert_eq!(brute_force_longest_path(&butterfly), 4);

        let casc2 = build_cascade(2).unwrap();
        assert_eq!(longest_path(&casc2), 8);
        assert_eq!(brute_force_longest_path(&casc2), 8);

        let single = Network::new(
            vec![0, 1],
            vec![Link { tail: 0, head: 1 }],
            0,
            vec![1],
            1,
        )
        .unwrap();
        assert_eq!(longest_path(&single), 1);
    }

    #[test]
    fn cascade_depth_four_matches_paper_scale() {
        let net = build_cascade(4).unwrap();
        assert_eq!(net.sinks().len(), 16);
        assert_eq!(net.link_count(), 150);
        assert_eq!(net.node_count(), 91);
        assert_eq!(longest_path(&net), 16);
        assert_eq!(net.rate(), 2);
    }

    #[test]
    fn cascade_depth_one_is_butterfly_prime() {
        let c1 = build_cascade(1).unwrap();
        assert_eq!(c1.shape(), build_butterfly_prime().shape());
    }

    #[test]
    fn cascade_rejects_degenerate_depths() {
        assert!(matches!(
            build_cascade(0),
            Err(NetworkError::BadParameter(_))
        ));
        assert!(matches!(
            build_cascade(29),
            Err(NetworkError::BadParameter(_))
        ));
    }

    #[test]
    fn dense_construction_and_default_rate() {
        let net = build_dense(15, 10).unwrap();
        assert_eq!(net.node_count(), 15);
        assert_eq!(net.link_count(), 105); // C(15,2)
        let sink_labels: Vec<u64> = net.sinks().iter().map(|&t| net.label(t)).collect();
        assert_eq!(sink_labels, (6..=15).collect::<Vec<u64>>());
        // min over sinks of unconstrained max-flow; the tightest sink is the
        // lowest-numbered one with in-degree 5
        assert_eq!(net.rate(), 5);

        let small = build_dense(3, 1).unwrap();
        assert_eq!(small.rate(), 2);
        assert_eq!(
            small.shape().0,
            vec![(1u64, 2u64), (1, 3), (2, 3)]
        );
        assert!(matches!(
            build_dense(2, 1),
            Err(NetworkError::BadParameter(_))
        ));
    }

    #[test]
    fn validation_rejects_bad_instances() {
        // cycle
        let cyclic = Network::new(
            vec![0, 1, 2],
            vec![
                Link { tail: 0, head: 1 },
                Link { tail: 1, head: 2 },
                Link { tail: 2, head: 1 },
            ],
            0,
            vec![2],
            1,
        );
        assert_eq!(cyclic.unwrap_err(), NetworkError::Cyclic);

        // unreachable sink
        let unreachable = Network::new(
            vec![0, 1, 2],
            vec![Link { tail: 0, head: 1 }],
            0,
            vec![2],
            1,
        );
        assert_eq!(unreachable.unwrap_err(), NetworkError::Unreachable(2));

        // dead-end interior node would stall the backward phase
        let dead_end = Network::new(
            vec![0, 1, 2],
            vec![Link { tail: 0, head: 1 }, Link { tail: 0, head: 2 }],
            0,
            vec![1],
            1,
        );
        assert_eq!(dead_end.unwrap_err(), NetworkError::DeadEnd(2));

        // unachievable rate: butterfly max-flow per sink is 2
        let b = build_butterfly();
        assert_eq!(
            b.with_rate(3).unwrap_err(),
            NetworkError::RateUnachievable {
                rate: 3,
                sink: 5,
                max_flow: 2
            }
        );
    }

    #[test]
    fn rate_two_is_achievable_on_builtins() {
        for net in [
            build_butterfly(),
            build_butterfly_prime(),
            build_cascade(2).unwrap(),
        ] {
            for &t in net.sinks() {
                assert!(max_flow_unconstrained(&net, t) >= 2);
            }
        }
    }
}
