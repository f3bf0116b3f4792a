//! Deterministic feasibility oracle.
//!
//! A genotype fixes, for every outgoing link of every merging node, which
//! inputs may flow onto it. Feasibility of rate R is then a pure max-flow
//! question on the node-split line graph: one capacity-1 vertex pair per
//! link, adjacency filtered by the genotype's block states, a super-source
//! feeding the source's outgoing links, and one collector per sink. Linear
//! coding achieves rate R exactly when every sink's max-flow reaches R.

use super::{block_layout, BlockLayout, LinkId, Network, NetworkError, NodeId};
use crate::genome::{BlockState, Genotype};

/// Exact integer max-flow (Dinic's algorithm) with an early-exit limit.
struct FlowGraph {
    adj: Vec<Vec<u32>>,
    to: Vec<u32>,
    cap: Vec<u32>,
    level: Vec<u32>,
    iter: Vec<usize>,
}

const UNVISITED: u32 = u32::MAX;

impl FlowGraph {
    fn new(vertices: usize) -> FlowGraph {
        FlowGraph {
            adj: vec![Vec::new(); vertices],
            to: Vec::new(),
            cap: Vec::new(),
            level: vec![UNVISITED; vertices],
            iter: vec![0; vertices],
        }
    }

    fn add_edge(&mut self, u: u32, v: u32, cap: u32) {
        let id = self.to.len() as u32;
        self.to.push(v);
        self.cap.push(cap);
        self.to.push(u);
        self.cap.push(0);
        self.adj[u as usize].push(id);
        self.adj[v as usize].push(id + 1);
    }

    fn bfs(&mut self, s: u32, t: u32) -> bool {
        self.level.fill(UNVISITED);
        self.level[s as usize] = 0;
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &e in &self.adj[u as usize] {
                let v = self.to[e as usize];
                if self.cap[e as usize] > 0 && self.level[v as usize] == UNVISITED {
                    self.level[v as usize] = self.level[u as usize] + 1;
                    queue.push_back(v);
                }
            }
        }
        self.level[t as usize] != UNVISITED
    }

    fn dfs(&mut self, u: u32, t: u32, pushed: u32) -> u32 {
        if u == t {
            return pushed;
        }
        while self.iter[u as usize] < self.adj[u as usize].len() {
            let e = self.adj[u as usize][self.iter[u as usize]] as usize;
            let v = self.to[e];
            if self.cap[e] > 0 && self.level[v as usize] == self.level[u as usize] + 1 {
                let d = self.dfs(v, t, pushed.min(self.cap[e]));
                if d > 0 {
                    self.cap[e] -= d;
                    self.cap[e ^ 1] += d;
                    return d;
                }
            }
            self.iter[u as usize] += 1;
        }
        0
    }

    /// Max-flow from s to t, stopping early once `limit` is reached.
    fn max_flow(&mut self, s: u32, t: u32, limit: u32) -> u32 {
        let mut flow = 0;
        while flow < limit && self.bfs(s, t) {
            self.iter.fill(0);
            loop {
                let pushed = self.dfs(s, t, limit - flow);
                if pushed == 0 {
                    break;
                }
                flow += pushed;
                if flow >= limit {
                    break;
                }
            }
        }
        flow
    }
}

/// Max-flow from the source to one sink on the unconstrained graph (all
/// links usable, unit capacity each). Used to validate achievable rates.
pub fn max_flow_unconstrained(net: &Network, sink: NodeId) -> u32 {
    let mut g = FlowGraph::new(net.node_count());
    for link in net.links() {
        g.add_edge(link.tail, link.head, 1);
    }
    g.max_flow(net.source(), sink, u32::MAX)
}

/// Does the genotype admit a rate-R network code? True iff the max-flow
/// from the super-source to every sink's collector reaches R in the
/// constrained line graph. Deterministic: no field size, no randomness.
pub fn oracle_feasible(net: &Network, genotype: &Genotype) -> Result<bool, NetworkError> {
    let layout = block_layout(net);
    oracle_feasible_with(net, &layout, genotype)
}

/// [`oracle_feasible`] with a precomputed layout, for callers probing many
/// genotypes against one network.
pub fn oracle_feasible_with(
    net: &Network,
    layout: &BlockLayout,
    genotype: &Genotype,
) -> Result<bool, NetworkError> {
    if genotype.fingerprint() != layout.fingerprint() {
        return Err(NetworkError::LayoutMismatch);
    }

    // Per link: the block governing it, if its tail is a merging node.
    let mut block_of_link: Vec<Option<usize>> = vec![None; net.link_count()];
    for (b, desc) in layout.blocks().iter().enumerate() {
        block_of_link[desc.out_link as usize] = Some(b);
    }

    let nlinks = net.link_count() as u32;
    let vert_in = |e: LinkId| 2 * e;
    let vert_out = |e: LinkId| 2 * e + 1;
    let super_source = 2 * nlinks;
    let collector = 2 * nlinks + 1;

    // Adjacency shared by all sinks; only the collector edges differ.
    let mut base_edges: Vec<(u32, u32)> = Vec::with_capacity(3 * net.link_count());
    for e in 0..nlinks {
        base_edges.push((vert_in(e), vert_out(e)));
    }
    for (e2, link) in net.links().iter().enumerate() {
        let e2 = e2 as LinkId;
        let tail = link.tail;
        if tail == net.source() {
            base_edges.push((super_source, vert_in(e2)));
            continue;
        }
        match block_of_link[e2 as usize] {
            Some(b) => {
                let desc = &layout.blocks()[b];
                match genotype.states()[b] {
                    BlockState::Coded => {
                        for &e1 in &desc.inputs {
                            base_edges.push((vert_out(e1), vert_in(e2)));
                        }
                    }
                    BlockState::Uncoded(i) => {
                        base_edges.push((vert_out(desc.inputs[i as usize]), vert_in(e2)));
                    }
                    BlockState::Inactive => {}
                }
            }
            None => {
                // non-merging tail forwards its single input unchanged
                for &e1 in net.in_links(tail) {
                    base_edges.push((vert_out(e1), vert_in(e2)));
                }
            }
        }
    }

    let rate = net.rate();
    for &t in net.sinks() {
        let mut g = FlowGraph::new(2 * net.link_count() + 2);
        for &(u, v) in &base_edges {
            g.add_edge(u, v, 1);
        }
        for &e in net.in_links(t) {
            g.add_edge(vert_out(e), collector, 1);
        }
        if g.max_flow(super_source, collector, rate) < rate {
            return Ok(false);
        }
    }
    Ok(true)
}
