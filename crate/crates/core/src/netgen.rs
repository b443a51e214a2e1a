//! Populations of surveyed quantities and quantity-dependent random networks.
//!
//! Each node carries a scalar quantity that doubles as its position in a
//! one-dimensional social space. Edges are drawn independently given the
//! quantities, with a probability that depends on the topology class:
//!
//! * homophily: `invlogit(-a * |x_i - x_j|)`, similar nodes connect;
//! * inverse homophily: `invlogit(c * |x_i - x_j| - 20)`, distant nodes connect;
//! * rich-get-richer: `(b / n) * max(rank(x_i), rank(x_j))`, high quantities
//!   attract edges.

use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Offset inside the inverse-homophily logistic.
pub const INVERSE_HOMOPHILY_OFFSET: f64 = 20.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    values: Vec<f64>,
}

impl Population {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::Config(format!(
                "population needs at least 2 nodes, got {}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Config(format!("quantity of node {i} is not finite")));
        }
        Ok(Population { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Realized population mean, the estimand of every chain on this population.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Number of values `<= x_i`, so the result lies in `1..=n`.
    pub fn rank(&self, i: usize) -> Result<usize> {
        let x = *self.values.get(i).ok_or(Error::IndexOutOfRange {
            index: i,
            len: self.values.len(),
        })?;
        Ok(self.values.iter().filter(|&&v| v <= x).count())
    }

    /// Ranks of every node, O(n log n). Tied values share a rank.
    pub fn ranks(&self) -> Vec<usize> {
        let mut sorted = self.values.clone();
        sorted.sort_by(f64::total_cmp);
        self.values
            .iter()
            .map(|&x| sorted.partition_point(|&v| v <= x))
            .collect()
    }
}

/// Draws `n` i.i.d. Normal(mean, variance) quantities.
pub fn generate_population<R: Rng + ?Sized>(
    n: usize,
    mean: f64,
    variance: f64,
    rng: &mut R,
) -> Result<Population> {
    if n < 2 {
        return Err(Error::Config(format!(
            "population size must be >= 2, got {n}"
        )));
    }
    if !(variance > 0.0 && variance.is_finite()) || !mean.is_finite() {
        return Err(Error::Config(format!(
            "population needs finite mean and positive variance, got mean {mean}, variance {variance}"
        )));
    }
    let normal = Normal::new(mean, variance.sqrt())
        .map_err(|e| Error::Config(format!("normal distribution: {e}")))?;
    Population::new(normal.sample_iter(rng).take(n).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TopologyKind {
    Homophily,
    InverseHomophily,
    RichGetRicher,
}

impl TopologyKind {
    pub const ALL: [TopologyKind; 3] = [
        TopologyKind::Homophily,
        TopologyKind::InverseHomophily,
        TopologyKind::RichGetRicher,
    ];

    /// Sensitivity range that keeps networks connected but not too dense.
    pub fn sensitivity_range(self) -> (f64, f64) {
        match self {
            TopologyKind::Homophily => (0.2, 1.0),
            TopologyKind::InverseHomophily => (0.8, 1.2),
            TopologyKind::RichGetRicher => (0.1, 0.5),
        }
    }

    /// `steps` equidistant values covering the sensitivity range, endpoints
    /// included. A single step yields the midpoint.
    pub fn sensitivity_values(self, steps: usize) -> Vec<f64> {
        let (lo, hi) = self.sensitivity_range();
        match steps {
            0 => Vec::new(),
            1 => vec![0.5 * (lo + hi)],
            _ => (0..steps)
                .map(|k| lo + (hi - lo) * k as f64 / (steps - 1) as f64)
                .collect(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TopologyKind::Homophily => "homophily",
            TopologyKind::InverseHomophily => "inverse_homophily",
            TopologyKind::RichGetRicher => "rich_get_richer",
        }
    }
}

impl fmt::Display for TopologyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for TopologyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TopologyKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown topology '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Topology {
    pub kind: TopologyKind,
    pub sensitivity: f64,
}

impl Topology {
    pub fn new(kind: TopologyKind, sensitivity: f64) -> Result<Self> {
        if !(sensitivity > 0.0 && sensitivity.is_finite()) {
            return Err(Error::Config(format!(
                "sensitivity must be positive, got {sensitivity}"
            )));
        }
        Ok(Topology { kind, sensitivity })
    }
}

#[inline]
pub fn invlogit(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Probability of the edge `{i, j}` given both quantities and ranks.
#[inline]
pub fn edge_probability(
    topology: Topology,
    x_i: f64,
    x_j: f64,
    ranks: (usize, usize),
    n: usize,
) -> f64 {
    let d = (x_i - x_j).abs();
    let s = topology.sensitivity;
    let p = match topology.kind {
        TopologyKind::Homophily => invlogit(-s * d),
        TopologyKind::InverseHomophily => invlogit(s * d - INVERSE_HOMOPHILY_OFFSET),
        TopologyKind::RichGetRicher => s / n as f64 * ranks.0.max(ranks.1) as f64,
    };
    p.clamp(0.0, 1.0)
}

/// Undirected simple graph stored as sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    adjacency: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Network {
    pub fn empty(n: usize) -> Self {
        Network {
            adjacency: vec![Vec::new(); n],
            edge_count: 0,
        }
    }

    /// Builds a network from unordered pairs, rejecting self-loops,
    /// duplicates and out-of-range endpoints.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adjacency = vec![Vec::new(); n];
        let mut edge_count = 0;
        for (i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::IndexOutOfRange {
                    index: i.max(j),
                    len: n,
                });
            }
            if i == j {
                return Err(Error::Config(format!("self-loop at node {i}")));
            }
            adjacency[i].push(j);
            adjacency[j].push(i);
            edge_count += 1;
        }
        for (i, nbrs) in adjacency.iter_mut().enumerate() {
            nbrs.sort_unstable();
            if let Some(w) = nbrs.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::Config(format!("duplicate edge {{{i}, {}}}", w[0])));
            }
        }
        Ok(Network {
            adjacency,
            edge_count,
        })
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i < self.adjacency.len() && self.adjacency[i].binary_search(&j).is_ok()
    }

    /// Edges as `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, nbrs)| nbrs.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
    }

    /// Nodes reachable from `start`, including `start`.
    pub fn component_of(&self, start: usize) -> Vec<usize> {
        let mut seen = vec![false; self.node_count()];
        let mut stack = vec![start];
        seen[start] = true;
        let mut out = Vec::new();
        while let Some(v) = stack.pop() {
            out.push(v);
            for &w in &self.adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn is_connected(&self) -> bool {
        self.node_count() == 0 || self.component_of(0).len() == self.node_count()
    }
}

/// Generates a network where pair `(i, j)`, visited in lexicographic order
/// with `i < j`, is joined when `uniform(i, j) < p_ij`.
pub fn generate_network_from_uniforms<F>(
    pop: &Population,
    topology: Topology,
    mut uniform: F,
) -> Network
where
    F: FnMut(usize, usize) -> f64,
{
    let n = pop.len();
    let x = pop.values();
    let ranks = match topology.kind {
        TopologyKind::RichGetRicher => pop.ranks(),
        _ => Vec::new(),
    };
    let rank_of = |i: usize| ranks.get(i).copied().unwrap_or(0);

    let mut adjacency = vec![Vec::new(); n];
    let mut edge_count = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            let p = edge_probability(topology, x[i], x[j], (rank_of(i), rank_of(j)), n);
            if uniform(i, j) < p {
                adjacency[i].push(j);
                adjacency[j].push(i);
                edge_count += 1;
            }
        }
    }
    Network {
        adjacency,
        edge_count,
    }
}

pub fn generate_network<R: Rng + ?Sized>(
    pop: &Population,
    topology: Topology,
    rng: &mut R,
) -> Network {
    generate_network_from_uniforms(pop, topology, |_, _| rng.random::<f64>())
}

/// Per-node `(quantity, degree)` pairs.
pub fn degree_quantity_profile(net: &Network, pop: &Population) -> Result<Vec<(f64, usize)>> {
    if net.node_count() != pop.len() {
        return Err(Error::SizeMismatch {
            network: net.node_count(),
            population: pop.len(),
        });
    }
    Ok(pop
        .values()
        .iter()
        .zip(net.adjacency.iter())
        .map(|(&x, nbrs)| (x, nbrs.len()))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use proptest::prelude::*;
    use rand::Rng;

    fn topo(kind: TopologyKind, s: f64) -> Topology {
        Topology::new(kind, s).unwrap()
    }

    #[test]
    fn population_is_deterministic_and_centered() {
        let a = generate_population(1000, 175.0, 100.0, &mut seeded(3)).unwrap();
        let b = generate_population(1000, 175.0, 100.0, &mut seeded(3)).unwrap();
        assert_eq!(a, b);
        // 4 standard errors: 4 * 10 / sqrt(1000)
        assert!((a.mean() - 175.0).abs() < 1.3);
    }

    #[test]
    fn population_sample_mean_rarely_strays() {
        let misses = (0..500u64)
            .filter(|&s| {
                let p = generate_population(1000, 175.0, 100.0, &mut seeded(s)).unwrap();
                (p.mean() - 175.0).abs() >= 1.3
            })
            .count();
        assert!(misses <= 1, "{misses} seeds outside 175 +/- 1.3");
    }

    #[test]
    fn population_rejects_degenerate_input() {
        assert!(generate_population(2, 175.0, 0.0, &mut seeded(0)).is_err());
        assert!(generate_population(1, 175.0, 100.0, &mut seeded(0)).is_err());
        assert!(Population::new(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn rank_counts_values_at_or_below() {
        let p = Population::new(vec![5.0, 10.0, 15.0]).unwrap();
        assert_eq!(p.rank(1).unwrap(), 2);
        assert_eq!(p.rank(2).unwrap(), 3);
        assert!(matches!(p.rank(3), Err(Error::IndexOutOfRange { .. })));

        let tied = Population::new(vec![2.0, 1.0, 2.0]).unwrap();
        assert_eq!(tied.ranks(), vec![3, 1, 3]);
    }

    #[test]
    fn ranks_of_distinct_values_are_a_bijection() {
        let p = generate_population(200, 0.0, 1.0, &mut seeded(9)).unwrap();
        let mut r = p.ranks();
        r.sort_unstable();
        assert_eq!(r, (1..=200).collect::<Vec<_>>());
        for i in 0..200 {
            assert_eq!(p.ranks()[i], p.rank(i).unwrap());
        }
    }

    #[test]
    fn edge_probability_reference_values() {
        let h = edge_probability(topo(TopologyKind::Homophily, 0.2), 3.0, 3.0, (0, 0), 10);
        assert_eq!(h, 0.5);
        // 1 / (1 + e^5)
        let h = edge_probability(topo(TopologyKind::Homophily, 0.5), 0.0, 10.0, (0, 0), 10);
        assert!((h - 0.006_692_850_924_284_856).abs() < 1e-15);
        let r = edge_probability(
            topo(TopologyKind::RichGetRicher, 0.1),
            0.0,
            0.0,
            (1000, 3),
            1000,
        );
        assert!((r - 0.1).abs() < 1e-15);
        let ih = edge_probability(
            topo(TopologyKind::InverseHomophily, 1.0),
            150.0,
            170.0,
            (0, 0),
            10,
        );
        assert_eq!(ih, 0.5);
    }

    #[test]
    fn sensitivity_grid_spans_range() {
        let v = TopologyKind::Homophily.sensitivity_values(10);
        assert_eq!(v.len(), 10);
        assert_eq!(v[0], 0.2);
        assert!((v[9] - 1.0).abs() < 1e-15);
        let step = v[1] - v[0];
        assert!(v.windows(2).all(|w| (w[1] - w[0] - step).abs() < 1e-12));
    }

    #[test]
    fn forced_edge() {
        let pop = Population::new(vec![1.0, 2.0]).unwrap();
        // b = 1, n = 2: p = max rank / 2 = 1
        let net = generate_network(&pop, topo(TopologyKind::RichGetRicher, 1.0), &mut seeded(0));
        assert_eq!(net.edges().collect::<Vec<_>>(), vec![(0, 1)]);
        assert_eq!(net.degrees(), vec![1, 1]);
    }

    #[test]
    fn from_edges_rejects_bad_input() {
        assert!(Network::from_edges(3, [(1, 1)]).is_err());
        assert!(Network::from_edges(3, [(0, 1), (1, 0)]).is_err());
        assert!(Network::from_edges(3, [(0, 3)]).is_err());
        let net = Network::from_edges(3, [(2, 0), (0, 1)]).unwrap();
        assert_eq!(net.edges().collect::<Vec<_>>(), vec![(0, 1), (0, 2)]);
        assert!(net.has_edge(2, 0));
    }

    #[test]
    fn degree_quantity_profile_on_path() {
        let pop = Population::new(vec![1.0, 2.0, 3.0]).unwrap();
        let net = Network::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(
            degree_quantity_profile(&net, &pop).unwrap(),
            vec![(1.0, 1), (2.0, 2), (3.0, 1)]
        );
        let small = Network::empty(2);
        assert!(matches!(
            degree_quantity_profile(&small, &pop),
            Err(Error::SizeMismatch { .. })
        ));
    }

    #[test]
    fn edge_count_matches_expectation() {
        let pop = generate_population(300, 175.0, 100.0, &mut seeded(1)).unwrap();
        let t = topo(TopologyKind::Homophily, 0.5);
        let x = pop.values();
        let (mut mean, mut var) = (0.0, 0.0);
        for i in 0..300 {
            for j in (i + 1)..300 {
                let p = edge_probability(t, x[i], x[j], (0, 0), 300);
                mean += p;
                var += p * (1.0 - p);
            }
        }
        let sd = var.sqrt();
        for s in 0..5 {
            let net = generate_network(&pop, t, &mut seeded(100 + s));
            let z = (net.edge_count() as f64 - mean) / sd;
            assert!(z.abs() < 4.0, "z = {z}");
        }
    }

    #[test]
    fn relabeling_permutes_edges() {
        let pop = generate_population(60, 175.0, 100.0, &mut seeded(5)).unwrap();
        let n = pop.len();
        let mut rng = seeded(6);
        let u: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.random()).collect())
            .collect();
        let sym = |i: usize, j: usize| u[i.min(j)][i.max(j)];
        // sigma: old index -> new index
        let sigma: Vec<usize> = (0..n).map(|i| (i * 7 + 3) % n).collect();
        let mut inv = vec![0; n];
        for (i, &s) in sigma.iter().enumerate() {
            inv[s] = i;
        }
        let permuted = Population::new((0..n).map(|k| pop.value(inv[k])).collect()).unwrap();

        for kind in TopologyKind::ALL {
            let t = topo(kind, kind.sensitivity_range().0);
            let a = generate_network_from_uniforms(&pop, t, sym);
            let b = generate_network_from_uniforms(&permuted, t, |k, l| sym(inv[k], inv[l]));
            let mut mapped: Vec<(usize, usize)> = a
                .edges()
                .map(|(i, j)| (sigma[i].min(sigma[j]), sigma[i].max(sigma[j])))
                .collect();
            mapped.sort_unstable();
            assert_eq!(mapped, b.edges().collect::<Vec<_>>(), "{kind}");
        }
    }

    proptest! {
        #[test]
        fn probability_is_bounded_and_monotone(
            s in 0.01f64..3.0, d1 in 0.0f64..80.0, d2 in 0.0f64..80.0,
            r1 in 1usize..1000, r2 in 1usize..1000,
        ) {
            let (lo, hi) = (d1.min(d2), d1.max(d2));
            let h = topo(TopologyKind::Homophily, s);
            let ih = topo(TopologyKind::InverseHomophily, s);
            let rgr = topo(TopologyKind::RichGetRicher, s.min(1.0));
            for t in [h, ih, rgr] {
                let p = edge_probability(t, 0.0, d1, (r1, r2), 1000);
                prop_assert!((0.0..=1.0).contains(&p));
            }
            prop_assert!(edge_probability(h, 0.0, lo, (0, 0), 1) >= edge_probability(h, 0.0, hi, (0, 0), 1));
            prop_assert!(edge_probability(ih, 0.0, lo, (0, 0), 1) <= edge_probability(ih, 0.0, hi, (0, 0), 1));
            let (rl, rh) = (r1.min(r2), r1.max(r2));
            prop_assert!(edge_probability(rgr, 0.0, 0.0, (rl, 1), 1000) <= edge_probability(rgr, 0.0, 0.0, (rh, 1), 1000));
        }

        #[test]
        fn rank_is_permutation_invariant(values in proptest::collection::vec(-50.0f64..50.0, 2..40), rot in 0usize..40) {
            let pop = Population::new(values.clone()).unwrap();
            let mut rotated = values.clone();
            let k = rot % values.len();
            rotated.rotate_left(k);
            let pr = Population::new(rotated).unwrap();
            let ranks = pop.ranks();
            let rr = pr.ranks();
            for i in 0..values.len() {
                prop_assert_eq!(ranks[(i + k) % values.len()], rr[i]);
            }
        }
    }
}
