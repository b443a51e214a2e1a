//! Self-checks: random-walk stationarity and estimator oracles.

use rand::seq::SliceRandom;
use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::Result;
use crate::estimators::{compromise_estimate, plain_mean, vh_estimate};
use crate::netgen::{edge_probability, Network, Population, Topology, TopologyKind};
use crate::rds::{run_random_walk, RdsRecord, RdsSample};
use crate::rng::{stream, Domain};

/// Consecutive walk positions are strongly correlated, so the test only
/// counts every `THINNING`-th visit. Odd, so bipartite graphs are not
/// pinned to one side.
pub const THINNING: usize = 49;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for CheckResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

/// Connected graph on `n` nodes: a random recursive tree plus each
/// remaining pair with probability `extra`.
pub fn random_connected_graph<R: Rng + ?Sized>(n: usize, extra: f64, rng: &mut R) -> Network {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    for k in 1..n {
        let parent = order[rng.random_range(0..k)];
        edges.push((parent.min(order[k]), parent.max(order[k])));
    }
    for i in 0..n {
        for j in i + 1..n {
            if !edges.contains(&(i, j)) && rng.random::<f64>() < extra {
                edges.push((i, j));
            }
        }
    }
    Network::from_edges(n, edges).expect("valid simple graph")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stationarity {
    pub chi2: f64,
    pub df: usize,
    pub p_value: f64,
    pub visits: usize,
}

/// Chi-square goodness of fit of thinned walk visits against `d_i / 2|E|`.
pub fn stationarity_test<R: Rng + ?Sized>(
    net: &Network,
    steps: usize,
    rng: &mut R,
) -> Result<Stationarity> {
    let walk = run_random_walk(net, 0, steps, rng)?;
    let mut counts = vec![0usize; net.node_count()];
    let mut visits = 0;
    for &v in walk.iter().skip(THINNING).step_by(THINNING) {
        counts[v] += 1;
        visits += 1;
    }
    let two_e = 2.0 * net.edge_count() as f64;
    let chi2 = counts
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let e = visits as f64 * net.degree(i) as f64 / two_e;
            (c as f64 - e).powi(2) / e
        })
        .sum();
    let df = net.node_count() - 1;
    let p_value = 1.0 - ChiSquared::new(df as f64).expect("positive df").cdf(chi2);
    Ok(Stationarity {
        chi2,
        df,
        p_value,
        visits,
    })
}

/// Runs the stationarity test on `graphs` random connected graphs of 3 to
/// 10 nodes.
pub fn stationarity_suite(
    master_seed: u64,
    graphs: usize,
    steps: usize,
) -> Result<Vec<CheckResult>> {
    (0..graphs)
        .map(|g| {
            let mut rng = stream(master_seed, Domain::Validation, &[g as u64]);
            let n = rng.random_range(3..=10);
            let net = random_connected_graph(n, 0.25, &mut rng);
            let s = stationarity_test(&net, steps, &mut rng)?;
            Ok(CheckResult {
                name: format!("random walk stationarity, graph {g}"),
                passed: s.p_value > 0.01,
                detail: format!(
                    "{n} nodes, {} edges, chi2 = {:.3} on {} df, p = {:.4}",
                    net.edge_count(),
                    s.chi2,
                    s.df,
                    s.p_value
                ),
            })
        })
        .collect()
}

fn sample_of(degrees: &[usize], quantities: &[f64]) -> RdsSample {
    RdsSample {
        records: degrees
            .iter()
            .zip(quantities)
            .enumerate()
            .map(|(i, (&d, &x))| RdsRecord {
                node: i,
                quantity: x,
                reported_degree: d,
                true_degree: d,
                wave: 0,
                recruiter: None,
                restart_index: 0,
            })
            .collect(),
        restarts: 0,
        waves_max: 0,
    }
}

/// Closed-form estimator checks.
pub fn oracle_suite() -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();

    let s = sample_of(&[2, 1], &[10.0, 20.0]);
    let vh = vh_estimate(&s)?;
    out.push(CheckResult {
        name: "VH on degrees [2, 1], quantities [10, 20]".into(),
        passed: (vh - 50.0 / 3.0).abs() <= 1e-9,
        detail: format!("{vh:.10} (expected 50/3)"),
    });

    let s = sample_of(&[4, 4, 4, 4], &[170.0, 181.5, 166.25, 190.0]);
    let gap = (vh_estimate(&s)? - plain_mean(&s)?).abs();
    out.push(CheckResult {
        name: "VH equals the mean for equal degrees".into(),
        passed: gap <= 1e-12,
        detail: format!("|vh - mean| = {gap:e}"),
    });

    let s = sample_of(&[3, 1, 7, 2, 12], &[160.0, 171.0, 183.0, 177.5, 190.25]);
    let lo = compromise_estimate(&s, 0.0)?;
    let hi = compromise_estimate(&s, 1.0)?;
    let (m, v) = (plain_mean(&s)?, vh_estimate(&s)?);
    out.push(CheckResult {
        name: "compromise endpoints".into(),
        passed: lo.to_bits() == m.to_bits() && hi.to_bits() == v.to_bits(),
        detail: format!("alpha 0: {lo} vs mean {m}; alpha 1: {hi} vs vh {v}"),
    });
    Ok(out)
}

/// Edges against expectation among pairs whose bucket key falls in
/// `[lo, hi]`. The key is the quantity distance, or the larger rank for
/// rich-get-richer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeBucket {
    pub lo: f64,
    pub hi: f64,
    pub pairs: usize,
    pub edges: usize,
    pub expected: f64,
    /// Standard deviation of the edge count under the model.
    pub sd: f64,
}

impl EdgeBucket {
    /// Deviation in standard errors; zero when the model allows no spread
    /// and the count matches.
    pub fn z(&self) -> f64 {
        let diff = self.edges as f64 - self.expected;
        if self.sd > 0.0 {
            diff / self.sd
        } else if diff.abs() < 1e-9 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// Splits all node pairs into `buckets` groups of (nearly) equal size by
/// key and compares observed edge counts to the model.
pub fn edge_frequency_buckets(
    net: &Network,
    pop: &Population,
    topology: Topology,
    buckets: usize,
) -> Vec<EdgeBucket> {
    let n = pop.len();
    let ranks = pop.ranks();
    let x = pop.values();
    let mut pairs: Vec<(f64, f64, bool)> = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let key = match topology.kind {
                TopologyKind::RichGetRicher => ranks[i].max(ranks[j]) as f64,
                _ => (x[i] - x[j]).abs(),
            };
            let p = edge_probability(topology, x[i], x[j], (ranks[i], ranks[j]), n);
            pairs.push((key, p, net.has_edge(i, j)));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let size = pairs.len().div_ceil(buckets.max(1));
    pairs
        .chunks(size.max(1))
        .map(|chunk| EdgeBucket {
            lo: chunk[0].0,
            hi: chunk[chunk.len() - 1].0,
            pairs: chunk.len(),
            edges: chunk.iter().filter(|c| c.2).count(),
            expected: chunk.iter().map(|c| c.1).sum(),
            sd: chunk.iter().map(|c| c.1 * (1.0 - c.1)).sum::<f64>().sqrt(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn random_graphs_are_connected() {
        let mut rng = seeded(3);
        for n in 2..=10 {
            for _ in 0..20 {
                let g = random_connected_graph(n, 0.2, &mut rng);
                assert!(g.is_connected());
                assert!(g.edge_count() >= n - 1);
            }
        }
    }

    #[test]
    fn buckets_cover_all_pairs() {
        let pop = Population::new(vec![1.0, 2.0, 4.0, 8.0]).unwrap();
        let net = Network::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        let t = Topology::new(TopologyKind::Homophily, 0.5).unwrap();
        let b = edge_frequency_buckets(&net, &pop, t, 3);
        assert_eq!(b.len(), 3);
        assert_eq!(b.iter().map(|b| b.pairs).sum::<usize>(), 6);
        assert_eq!(b.iter().map(|b| b.edges).sum::<usize>(), 2);
        // smallest distance is 1 (pair 0-1), an edge
        assert_eq!((b[0].lo, b[0].edges), (1.0, 1));
        let expected: f64 = [1.0f64, 3.0, 7.0, 2.0, 6.0, 4.0]
            .iter()
            .map(|d| crate::netgen::invlogit(-0.5 * d))
            .sum();
        assert!((b.iter().map(|b| b.expected).sum::<f64>() - expected).abs() < 1e-12);
    }

    #[test]
    fn oracles_pass() {
        for c in oracle_suite().unwrap() {
            assert!(c.passed, "{c}");
        }
    }

    #[test]
    fn star_walk_is_stationary() {
        // bipartite, and the hub holds half the stationary mass
        let net = Network::from_edges(5, [(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let s = stationarity_test(&net, 200_000, &mut seeded(8)).unwrap();
        assert!(s.p_value > 0.01);
        assert_eq!(s.visits, 200_000 / THINNING);
    }

    #[test]
    fn small_suite_passes() {
        for c in stationarity_suite(1, 3, 200_000).unwrap() {
            assert!(c.passed, "{c}");
        }
    }
}
