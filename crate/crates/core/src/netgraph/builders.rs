//! Benchmark topology constructors.

use super::{Link, Network, NetworkError, NodeId};

/// The canonical butterfly: rate-2 multicast from `s` to `{t1, t2}` where
/// the bottleneck link z->w forces coding at z.
///
/// Node labels: 0=s, 1=x, 2=y, 3=z, 4=w, 5=t1, 6=t2.
pub fn build_butterfly() -> Network {
    butterfly_links(false)
}

/// The butterfly with the z->w bottleneck doubled into two parallel unit
/// links, which makes rate 2 routable without any coding.
pub fn build_butterfly_prime() -> Network {
    butterfly_links(true)
}

fn butterfly_links(parallel_bottleneck: bool) -> Network {
    let mut links = vec![
        Link { tail: 0, head: 1 }, // s -> x
        Link { tail: 0, head: 2 }, // s -> y
        Link { tail: 1, head: 3 }, // x -> z
        Link { tail: 2, head: 3 }, // y -> z
        Link { tail: 1, head: 5 }, // x -> t1
        Link { tail: 2, head: 6 }, // y -> t2
        Link { tail: 3, head: 4 }, // z -> w
    ];
    if parallel_bottleneck {
        links.push(Link { tail: 3, head: 4 });
    }
    links.push(Link { tail: 4, head: 5 }); // w -> t1
    links.push(Link { tail: 4, head: 6 }); // w -> t2
    Network::new((0..7).collect(), links, 0, vec![5, 6], 2)
        .expect("butterfly construction is always valid")
}

/// A full binary tree of `2^depth - 1` butterfly-prime copies: each
/// non-root copy's source node is one sink of its parent copy. The overall
/// sinks are the `2^depth` sinks of the leaf copies; the rate is 2.
pub fn build_cascade(depth: u32) -> Result<Network, NetworkError> {
    if depth == 0 {
        return Err(NetworkError::BadParameter(
            "cascade depth must be at least 1".into(),
        ));
    }
    if depth > 20 {
        return Err(NetworkError::BadParameter(format!(
            "cascade depth {depth} exceeds the supported maximum of 20"
        )));
    }
    let copies = (1u64 << depth) - 1;
    let mut next_node: NodeId = 0;
    let mut fresh = || {
        let v = next_node;
        next_node += 1;
        v
    };

    let mut links = Vec::with_capacity(copies as usize * 10);
    let mut sinks = Vec::new();
    // per copy index (1-based heap order): its two sink nodes
    let mut copy_sinks = vec![(0 as NodeId, 0 as NodeId); copies as usize + 1];
    for c in 1..=copies {
        let s = if c == 1 {
            fresh()
        } else {
            let (t1, t2) = copy_sinks[(c / 2) as usize];
            if c % 2 == 0 {
                t1
            } else {
                t2
            }
        };
        let x = fresh();
        let y = fresh();
        let z = fresh();
        let w = fresh();
        let t1 = fresh();
        let t2 = fresh();
        copy_sinks[c as usize] = (t1, t2);
        if 2 * c > copies {
            sinks.push(t1);
            sinks.push(t2);
        }
        links.extend_from_slice(&[
            Link { tail: s, head: x },
            Link { tail: s, head: y },
            Link { tail: x, head: z },
            Link { tail: y, head: z },
            Link { tail: x, head: t1 },
            Link { tail: y, head: t2 },
            Link { tail: z, head: w },
            Link { tail: z, head: w },
            Link { tail: w, head: t1 },
            Link { tail: w, head: t2 },
        ]);
    }
    Network::new((0..next_node as u64).collect(), links, 0, sinks, 2)
}

/// Fully connected acyclic topology: nodes 1..=n with one link i->j for
/// every i < j. Node 1 is the source; the last `num_sinks` nodes are the
/// sinks. The rate defaults to the minimum over sinks of the unconstrained
/// max-flow (override with [`Network::with_rate`]).
pub fn build_dense(n: u32, num_sinks: u32) -> Result<Network, NetworkError> {
    if num_sinks == 0 {
        return Err(NetworkError::BadParameter(
            "dense topology needs at least one sink".into(),
        ));
    }
    if n < num_sinks + 2 {
        return Err(NetworkError::BadParameter(format!(
            "dense topology requires n >= num_sinks + 2 (n={n}, num_sinks={num_sinks})"
        )));
    }
    let mut links = Vec::with_capacity((n as usize * (n as usize - 1)) / 2);
    for i in 0..n {
        for j in i + 1..n {
            links.push(Link { tail: i, head: j });
        }
    }
    let sinks: Vec<NodeId> = (n - num_sinks..n).collect();
    // labels are 1-based per the conventional numbering of these graphs
    let labels: Vec<u64> = (1..=n as u64).collect();
    let probe = Network::new(labels, links, 0, sinks, 1)?;
    let rate = probe
        .sinks()
        .iter()
        .map(|&t| super::oracle::max_flow_unconstrained(&probe, t))
        .min()
        .expect("sink set is nonempty");
    probe.with_rate(rate)
}
