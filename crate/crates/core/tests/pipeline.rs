use rdsim::harness::{run_grid, CellKey, EstimatorId, GridSpec};
use rdsim::io::emit::format_density;
use rdsim::io::netfile::{format_network, parse_network};
use rdsim::netgen::{
    degree_quantity_profile, generate_network, generate_population, Topology, TopologyKind,
};
use rdsim::rds::{DegreeReporting, Referral, SeedRule};
use rdsim::rng::seeded;
use rdsim::validate::edge_frequency_buckets;

fn network(
    kind: TopologyKind,
    s: f64,
    seed: u64,
) -> (rdsim::netgen::Network, rdsim::netgen::Population) {
    let mut rng = seeded(seed);
    let pop = generate_population(1000, 175.0, 100.0, &mut rng).unwrap();
    let net = generate_network(&pop, Topology::new(kind, s).unwrap(), &mut rng);
    (net, pop)
}

#[test]
fn edge_frequencies_match_the_model() {
    for (kind, s) in [
        (TopologyKind::Homophily, 0.2),
        (TopologyKind::Homophily, 0.9),
        (TopologyKind::InverseHomophily, 1.2),
        (TopologyKind::RichGetRicher, 0.45),
    ] {
        let (net, pop) = network(kind, s, 2024);
        for b in edge_frequency_buckets(&net, &pop, Topology::new(kind, s).unwrap(), 10) {
            assert!(b.z().abs() <= 3.0, "{kind} {s}: {b:?}");
        }
    }
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

/// Tercile counts (low, middle, high by quantity) among the 50 highest-degree nodes.
fn hub_terciles(kind: TopologyKind, s: f64, seed: u64) -> [usize; 3] {
    let (net, pop) = network(kind, s, seed);
    let profile = degree_quantity_profile(&net, &pop).unwrap();
    let ranks = pop.ranks();
    let mut order: Vec<usize> = (0..pop.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(profile[i].1));
    let mut t = [0; 3];
    for &i in &order[..50] {
        t[((ranks[i] - 1) * 3 / pop.len()).min(2)] += 1;
    }
    t
}

#[test]
fn degree_quantity_shapes() {
    let (net, pop) = network(TopologyKind::RichGetRicher, 0.3, 7);
    let ranks: Vec<f64> = pop.ranks().into_iter().map(|r| r as f64).collect();
    let degrees: Vec<f64> = net.degrees().into_iter().map(|d| d as f64).collect();
    let r = pearson(&ranks, &degrees);
    assert!(r > 0.5, "rank/degree correlation {r}");

    let t = hub_terciles(TopologyKind::Homophily, 0.6, 8);
    assert!(t[1] > t[0] && t[1] > t[2], "homophily hubs {t:?}");
    let t = hub_terciles(TopologyKind::RichGetRicher, 0.3, 9);
    assert!(t[2] > t[0] && t[2] > t[1], "rich-get-richer hubs {t:?}");
}

#[test]
fn generated_networks_round_trip() {
    for (k, &kind) in TopologyKind::ALL.iter().enumerate() {
        let (net, pop) = network(kind, kind.sensitivity_values(10)[4], 100 + k as u64);
        let text = format_network(&net, &pop).unwrap();
        let (n2, p2) = parse_network(&text, std::path::Path::new("mem")).unwrap();
        assert_eq!(n2, net);
        assert!(p2
            .values()
            .iter()
            .zip(pop.values())
            .all(|(a, b)| a.to_bits() == b.to_bits()));
    }
}

fn density_means(text: &str, estimator: &str) -> [f64; 3] {
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .filter(|l| l.split(',').next() == Some(estimator))
        .map(|l| l.split(',').skip(2).map(|v| v.parse().unwrap()).collect())
        .collect();
    let mut m = [0.0; 3];
    for r in &rows {
        for k in 0..3 {
            m[k] += r[k] / rows.len() as f64;
        }
    }
    m
}

#[test]
fn density_plot_data_orders_estimators() {
    // n = 3000, middle sensitivity, 3 coupons, proportional seeds, uniform referral, exact degrees
    let mut spec = GridSpec::published();
    spec.topologies = vec![TopologyKind::Homophily, TopologyKind::InverseHomophily];
    spec.sensitivity_indices = vec![5];
    spec.network_sizes = vec![3000];
    spec.coupons = vec![3];
    spec.referrals = vec![Referral::Uniform];
    spec.seed_rules = vec![SeedRule::DegreeProportionalSeeds];
    spec.degree_modes = vec![DegreeReporting::Exact];
    spec.networks_per_cell = 12;
    spec.runs_per_network = 15;
    spec.master_seed = 5;
    let out = run_grid(&spec, 0).unwrap();

    let cell = |topology| CellKey {
        topology,
        sensitivity_index: 5,
        network_size: 3000,
        coupons: 3,
        seed_rule: SeedRule::DegreeProportionalSeeds,
        referral: Referral::Uniform,
        degree_mode: DegreeReporting::Exact,
    };
    let mean = EstimatorId::Mean.to_string();
    let vh = EstimatorId::Vh.to_string();

    let text = format_density(&out.reports, &cell(TopologyKind::Homophily)).unwrap();
    let (m, v) = (density_means(&text, &mean), density_means(&text, &vh));
    assert!(m[2] < v[2], "homophily mse: mean {m:?} vh {v:?}");

    let text = format_density(&out.reports, &cell(TopologyKind::InverseHomophily)).unwrap();
    let (m, v) = (density_means(&text, &mean), density_means(&text, &vh));
    for k in 0..3 {
        assert!(
            v[k] < m[k],
            "inverse homophily metric {k}: mean {m:?} vh {v:?}"
        );
    }
}
