//! Plain-text network format.
//!
//! ```text
//! nodes 3
//! 0 1.0000000000000000e0
//! 1 2.0000000000000000e0
//! 2 3.0000000000000000e0
//! 0 1
//! 0 2
//! 1 2
//! ```
//!
//! A header with the node count, one `index quantity` line per node in index
//! order (17 significant digits, so values round-trip bit-exactly), then one
//! `i j` line per edge with `i < j`.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::io::format::exact;
use crate::netgen::{Network, Population};

pub fn format_network(net: &Network, pop: &Population) -> Result<String> {
    if net.node_count() != pop.len() {
        return Err(Error::SizeMismatch {
            network: net.node_count(),
            population: pop.len(),
        });
    }
    let mut out = String::with_capacity(32 * (pop.len() + net.edge_count()));
    writeln!(out, "nodes {}", pop.len()).unwrap();
    for (i, &x) in pop.values().iter().enumerate() {
        writeln!(out, "{i} {}", exact(x)).unwrap();
    }
    for (i, j) in net.edges() {
        writeln!(out, "{i} {j}").unwrap();
    }
    Ok(out)
}

pub fn parse_network(text: &str, origin: &Path) -> Result<(Network, Population)> {
    let malformed = |line: usize, message: String| Error::Malformed {
        path: origin.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));

    let (_, header) = lines
        .next()
        .ok_or_else(|| malformed(1, "empty file".into()))?;
    let n: usize = header
        .strip_prefix("nodes ")
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| malformed(1, format!("expected 'nodes <count>', found '{header}'")))?;

    let mut values = Vec::with_capacity(n);
    for expected in 0..n {
        let (lineno, line) = lines.next().ok_or_else(|| {
            malformed(
                expected + 2,
                format!("missing quantity line for node {expected}"),
            )
        })?;
        let mut parts = line.split_whitespace();
        let (Some(idx), Some(val), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(malformed(
                lineno,
                format!("expected 'index value', found '{line}'"),
            ));
        };
        if idx.parse::<usize>().ok() != Some(expected) {
            return Err(malformed(
                lineno,
                format!("expected node index {expected}, found '{idx}'"),
            ));
        }
        let v: f64 = val
            .parse()
            .map_err(|_| malformed(lineno, format!("invalid quantity '{val}'")))?;
        values.push(v);
    }

    let mut net_edges = Vec::new();
    let mut adjacency_check = std::collections::HashSet::new();
    for (lineno, line) in lines {
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace().map(str::parse::<usize>);
        let (Some(Ok(i)), Some(Ok(j)), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(malformed(
                lineno,
                format!("expected edge 'i j', found '{line}'"),
            ));
        };
        if i == j {
            return Err(malformed(lineno, format!("self-loop at node {i}")));
        }
        if i >= n || j >= n {
            return Err(malformed(
                lineno,
                format!("edge ({i}, {j}) references a node >= {n}"),
            ));
        }
        if !adjacency_check.insert((i.min(j), i.max(j))) {
            return Err(malformed(lineno, format!("duplicate edge ({i}, {j})")));
        }
        net_edges.push((i, j));
    }

    let pop = Population::new(values).map_err(|e| malformed(1, e.to_string()))?;
    let net = Network::from_edges(n, net_edges).map_err(|e| malformed(1, e.to_string()))?;
    Ok((net, pop))
}

pub fn write_network(path: &Path, net: &Network, pop: &Population) -> Result<()> {
    let text = format_network(net, pop)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_network(path: &Path) -> Result<(Network, Population)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_network(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netgen::{generate_network, generate_population, Topology, TopologyKind};
    use crate::rng::seeded;

    fn origin() -> &'static Path {
        Path::new("net.txt")
    }

    #[test]
    fn triangle_round_trip() {
        let pop = Population::new(vec![1.0, 2.0, 3.0]).unwrap();
        let net = Network::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let text = format_network(&net, &pop).unwrap();
        assert_eq!(text.lines().count(), 1 + 3 + 3);
        let (n2, p2) = parse_network(&text, origin()).unwrap();
        assert_eq!((n2, p2), (net, pop));
    }

    #[test]
    fn generated_network_round_trip() {
        let mut rng = seeded(12);
        let pop = generate_population(1000, 175.0, 100.0, &mut rng).unwrap();
        let net = generate_network(
            &pop,
            Topology::new(TopologyKind::Homophily, 0.6).unwrap(),
            &mut rng,
        );
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("net.txt");
        write_network(&path, &net, &pop).unwrap();
        let (n2, p2) = read_network(&path).unwrap();
        assert_eq!(n2, net);
        assert!(p2
            .values()
            .iter()
            .zip(pop.values())
            .all(|(a, b)| a.to_bits() == b.to_bits()));
    }

    #[test]
    fn malformed_lines_are_located() {
        let text = "nodes 6\n0 1\n1 1\n2 1\n3 1\n4 1\n5 1\n0 1\n5 5\n";
        match parse_network(text, origin()) {
            Err(Error::Malformed { line, message, .. }) => {
                assert_eq!(line, 9);
                assert!(message.contains("self-loop"));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_network("nodes x\n", origin()),
            Err(Error::Malformed { line: 1, .. })
        ));
        assert!(matches!(
            parse_network("nodes 2\n0 1.5\n", origin()),
            Err(Error::Malformed { line: 3, .. })
        ));
        assert!(matches!(
            parse_network("nodes 2\n0 1\n1 2\n0 1\n1 0\n", origin()),
            Err(Error::Malformed { line: 5, .. })
        ));
        assert!(matches!(
            parse_network("nodes 2\n0 1\n1 2\n0 7\n", origin()),
            Err(Error::Malformed { line: 4, .. })
        ));
    }
}
