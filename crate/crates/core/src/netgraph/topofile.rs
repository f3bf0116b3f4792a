//! Line-oriented topology file format.
//!
//! ```text
//! # optional comments
//! source 0
//! sinks 5 6
//! rate 2
//! link 0 1
//! link 0 2
//! ```
//!
//! One `link` line per directed unit-capacity link; repeating a line adds a
//! parallel link. The emitter is canonical: header lines first, links
//! sorted by (tail, head) label, LF line endings.

use super::{Link, Network, NetworkError};
use std::collections::HashMap;
use std::fmt::Write as _;

pub fn load_topology(text: &str) -> Result<Network, NetworkError> {
    let mut source_label: Option<u64> = None;
    let mut sink_labels: Option<Vec<u64>> = None;
    let mut rate: Option<u32> = None;
    let mut link_labels: Vec<(u64, u64)> = Vec::new();

    let parse_err = |line: usize, message: String| NetworkError::Parse { line, message };

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let directive = tokens.next().expect("non-empty line has a token");
        let rest: Vec<&str> = tokens.collect();
        let number = |s: &str| -> Result<u64, NetworkError> {
            s.parse::<u64>()
                .map_err(|_| parse_err(line_no, format!("expected an integer, got '{s}'")))
        };
        match directive {
            "source" => {
                if source_label.is_some() {
                    return Err(parse_err(line_no, "duplicate 'source' line".into()));
                }
                let [id] = rest.as_slice() else {
                    return Err(parse_err(line_no, "usage: source <id>".into()));
                };
                source_label = Some(number(id)?);
            }
            "sinks" => {
                if sink_labels.is_some() {
                    return Err(parse_err(line_no, "duplicate 'sinks' line".into()));
                }
                if rest.is_empty() {
                    return Err(parse_err(line_no, "usage: sinks <id> [<id> ...]".into()));
                }
                let ids = rest.iter().map(|s| number(s)).collect::<Result<_, _>>()?;
                sink_labels = Some(ids);
            }
            "rate" => {
                if rate.is_some() {
                    return Err(parse_err(line_no, "duplicate 'rate' line".into()));
                }
                let [r] = rest.as_slice() else {
                    return Err(parse_err(line_no, "usage: rate <R>".into()));
                };
                let r = number(r)?;
                rate = Some(u32::try_from(r).map_err(|_| {
                    parse_err(line_no, format!("rate {r} is out of range"))
                })?);
            }
            "link" => {
                let [u, v] = rest.as_slice() else {
                    return Err(parse_err(line_no, "usage: link <tail> <head>".into()));
                };
                link_labels.push((number(u)?, number(v)?));
            }
            other => {
                return Err(parse_err(line_no, format!("unknown directive '{other}'")));
            }
        }
    }

    let source_label =
        source_label.ok_or_else(|| parse_err(0, "missing 'source' line".into()))?;
    let sink_labels = sink_labels.ok_or_else(|| parse_err(0, "missing 'sinks' line".into()))?;
    let rate = rate.ok_or_else(|| parse_err(0, "missing 'rate' line".into()))?;

    // internal ids by order of first appearance: source, sinks, link ends
    let mut index: HashMap<u64, u32> = HashMap::new();
    let mut labels: Vec<u64> = Vec::new();
    let intern = |label: u64, index: &mut HashMap<u64, u32>, labels: &mut Vec<u64>| -> u32 {
        *index.entry(label).or_insert_with(|| {
            labels.push(label);
            labels.len() as u32 - 1
        })
    };
    let source = intern(source_label, &mut index, &mut labels);
    let sinks: Vec<u32> = sink_labels
        .iter()
        .map(|&s| intern(s, &mut index, &mut labels))
        .collect();
    let links: Vec<Link> = link_labels
        .iter()
        .map(|&(u, v)| Link {
            tail: intern(u, &mut index, &mut labels),
            head: intern(v, &mut index, &mut labels),
        })
        .collect();

    Network::new(labels, links, source, sinks, rate)
}

/// Canonical text form of a network; `load_topology` inverts it up to node
/// relabeling, and emitting a loaded file is byte-stable.
pub fn emit_topology(net: &Network) -> String {
    let mut out = String::new();
    writeln!(out, "source {}", net.label(net.source())).unwrap();
    let mut sinks: Vec<u64> = net.sinks().iter().map(|&t| net.label(t)).collect();
    sinks.sort_unstable();
    let sink_list: Vec<String> = sinks.iter().map(u64::to_string).collect();
    writeln!(out, "sinks {}", sink_list.join(" ")).unwrap();
    writeln!(out, "rate {}", net.rate()).unwrap();
    let mut links: Vec<(u64, u64)> = net
        .links()
        .iter()
        .map(|l| (net.label(l.tail), net.label(l.head)))
        .collect();
    links.sort_unstable();
    for (u, v) in links {
        writeln!(out, "link {u} {v}").unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netgraph::{build_butterfly, build_cascade};

    #[test]
    fn butterfly_round_trips() {
        let net = build_butterfly();
        let text = emit_topology(&net);
        let loaded = load_topology(&text).unwrap();
        assert_eq!(loaded.shape(), net.shape());
        // canonical emission is stable
        assert_eq!(emit_topology(&loaded), text);
    }

    #[test]
    fn parallel_links_survive_the_round_trip() {
        let net = build_cascade(1).unwrap();
        let loaded = load_topology(&emit_topology(&net)).unwrap();
        assert_eq!(loaded.link_count(), 10);
        assert_eq!(loaded.shape(), net.shape());
    }

    #[test]
    fn cycle_is_a_validation_error() {
        let text = "source 0\nsinks 2\nrate 1\nlink 0 1\nlink 1 2\nlink 2 1\n";
        assert_eq!(load_topology(text).unwrap_err(), NetworkError::Cyclic);
    }

    #[test]
    fn unachievable_rate_is_reported_with_the_sink() {
        let mut text = emit_topology(&build_butterfly());
        text = text.replace("rate 2", "rate 3");
        match load_topology(&text).unwrap_err() {
            NetworkError::RateUnachievable { rate, max_flow, .. } => {
                assert_eq!(rate, 3);
                assert_eq!(max_flow, 2);
            }
            other => panic!("expected RateUnachievable, got {other:?}"),
        }
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let bad = "source 0\nsinks 1\nrate 1\nlink 0 x\n";
        match load_topology(bad).unwrap_err() {
            NetworkError::Parse { line, .. } => assert_eq!(line, 4),
            other => panic!("expected Parse, got {other:?}"),
        }
        let unknown = "source 0\nsinks 1\nrate 1\nedge 0 1\n";
        match load_topology(unknown).unwrap_err() {
            NetworkError::Parse { line, message } => {
                assert_eq!(line, 4);
                assert!(message.contains("edge"));
            }
            other => panic!("expected Parse, got {other:?}"),
        }
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "# a butterfly\n\nsource 0\nsinks 5 6\nrate 2\nlink 0 1\nlink 0 2\nlink 1 3\nlink 2 3\nlink 1 5\nlink 2 6\nlink 3 4\nlink 4 5\nlink 4 6\n";
        let loaded = load_topology(text).unwrap();
        assert_eq!(loaded.shape(), build_butterfly().shape());
    }
}
