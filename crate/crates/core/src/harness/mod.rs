//! Experiment grid execution and aggregation.
//!
//! Every (topology, sensitivity, network size) cell gets `networks_per_cell`
//! freshly drawn populations and networks. Each network hosts
//! `runs_per_network` chains for every (coupons, seed rule, referral)
//! combination. Exact and stochastic degree reports are taken from the same
//! chain, so the two degree modes form a paired comparison.
//!
//! Each unit of work draws from its own coordinate-derived stream and the
//! reduction runs in coordinate order, so output is independent of the
//! worker count.

mod spec;
mod tables;

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

pub use spec::{GridSpec, PUBLISHED_COUPONS};
pub use tables::{
    pairwise, sensitivity_table, summary_table, MetricDiff, Pairing, SensitivityRow,
    SensitivityTable, SummaryCell, SummaryRow, SummaryTable,
};

use crate::error::{Error, Result};
use crate::estimators::compromise_estimate;
use crate::netgen::{
    generate_network, generate_population, Network, Population, Topology, TopologyKind,
};
use crate::rds::{
    run_rds, with_reported_degrees, DegreeReporting, RdsConfig, RdsSample, Referral, SeedRule,
};
use crate::rng::{stream, Domain};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EstimatorId {
    Mean,
    Vh,
    Compromise(f64),
}

impl EstimatorId {
    /// Plain mean, VH, then one compromise estimator per exponent.
    pub fn roster(alphas: &[f64]) -> Vec<EstimatorId> {
        let mut ids = vec![EstimatorId::Mean, EstimatorId::Vh];
        ids.extend(alphas.iter().map(|&a| EstimatorId::Compromise(a)));
        ids
    }

    pub fn exponent(self) -> f64 {
        match self {
            EstimatorId::Mean => 0.0,
            EstimatorId::Vh => 1.0,
            EstimatorId::Compromise(a) => a,
        }
    }

    pub fn estimate(self, sample: &RdsSample) -> Result<f64> {
        compromise_estimate(sample, self.exponent())
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "mean" => Ok(EstimatorId::Mean),
            "vh" => Ok(EstimatorId::Vh),
            _ => s
                .strip_prefix("compromise_")
                .and_then(|a| a.parse::<f64>().ok())
                .map(EstimatorId::Compromise)
                .ok_or_else(|| Error::Config(format!("unknown estimator '{s}'"))),
        }
    }
}

impl fmt::Display for EstimatorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EstimatorId::Mean => f.write_str("mean"),
            EstimatorId::Vh => f.write_str("vh"),
            EstimatorId::Compromise(a) => write!(f, "compromise_{a}"),
        }
    }
}

/// Coordinates of one aggregation cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellKey {
    pub topology: TopologyKind,
    pub sensitivity_index: usize,
    pub network_size: usize,
    pub coupons: usize,
    pub seed_rule: SeedRule,
    pub referral: Referral,
    pub degree_mode: DegreeReporting,
}

impl fmt::Display for CellKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} s{} n{} C{} seeds={} referral={} degrees={}",
            self.topology,
            self.sensitivity_index,
            self.network_size,
            self.coupons,
            self.seed_rule,
            self.referral,
            self.degree_mode
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    /// One value per estimator, in roster order.
    pub estimates: Vec<f64>,
    pub restarts: usize,
    pub waves_max: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub cell: CellKey,
    pub sensitivity: f64,
    pub network: usize,
    pub run: usize,
    /// Realized mean of this network's population.
    pub truth: f64,
    /// `None` when the chain was exhausted before reaching the sample size.
    pub outcome: Option<RunOutcome>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decomposition {
    pub bias_sq: f64,
    pub variance: f64,
    pub mse: f64,
}

/// Squared bias, population variance and MSE of `estimates` around `truth`.
pub fn decompose(estimates: &[f64], truth: f64) -> Result<Decomposition> {
    if estimates.is_empty() {
        return Err(Error::EmptySample);
    }
    let m = estimates.len() as f64;
    let mean = estimates.iter().sum::<f64>() / m;
    let variance = estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / m;
    let mse = estimates.iter().map(|e| (e - truth).powi(2)).sum::<f64>() / m;
    Ok(Decomposition {
        bias_sq: (mean - truth).powi(2),
        variance,
        mse,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorReport {
    pub cell: CellKey,
    pub sensitivity: f64,
    pub estimator: EstimatorId,
    pub mean_estimate: f64,
    /// Averages over networks of the per-network decomposition.
    pub bias_sq: f64,
    pub variance: f64,
    pub mse: f64,
    pub mean_restarts: f64,
    pub mean_waves: f64,
    pub run_count: usize,
    pub failed_runs: usize,
    pub per_network: Vec<Decomposition>,
}

#[derive(Debug, Clone)]
pub struct GridOutput {
    pub estimators: Vec<EstimatorId>,
    pub runs: Vec<RunRecord>,
    pub reports: Vec<EstimatorReport>,
}

struct NetworkTask {
    topology: TopologyKind,
    sensitivity_index: usize,
    sensitivity: f64,
    network_size: usize,
    network: usize,
}

fn topology_code(k: TopologyKind) -> u64 {
    k as u64
}

fn chain_coords(
    task: &NetworkTask,
    coupons: usize,
    seed_rule: SeedRule,
    referral: Referral,
    run: usize,
) -> [u64; 8] {
    [
        topology_code(task.topology),
        task.sensitivity_index as u64,
        task.network_size as u64,
        task.network as u64,
        coupons as u64,
        seed_rule as u64,
        referral as u64,
        run as u64,
    ]
}

fn build_network(spec: &GridSpec, task: &NetworkTask) -> Result<(Population, Network)> {
    let mut net_rng = stream(
        spec.master_seed,
        Domain::Network,
        &[
            topology_code(task.topology),
            task.sensitivity_index as u64,
            task.network_size as u64,
            task.network as u64,
        ],
    );
    let pop = generate_population(
        task.network_size,
        spec.population_mean,
        spec.population_variance,
        &mut net_rng,
    )?;
    let topology = Topology::new(task.topology, task.sensitivity)?;
    let net = generate_network(&pop, topology, &mut net_rng);
    Ok((pop, net))
}

fn chain_config(
    spec: &GridSpec,
    coupons: usize,
    seed_rule: SeedRule,
    referral: Referral,
) -> RdsConfig {
    RdsConfig {
        coupons,
        sample_size: spec.sample_size,
        num_seeds: spec.num_seeds,
        referral,
        seed_rule,
        degree_reporting: DegreeReporting::Exact,
        no_recruit_prob: spec.no_recruit_prob,
        referral_params: spec.referral_params,
    }
}

/// Network, population and sample of one grid run, drawn from the same
/// streams `run_grid` uses.
#[derive(Debug, Clone)]
pub struct SimulatedRun {
    pub population: Population,
    pub network: Network,
    pub sample: RdsSample,
}

/// Population and network number `network` of a (topology, sensitivity
/// index, network size) cell, as `run_grid` draws them.
pub fn grid_network(
    spec: &GridSpec,
    topology: TopologyKind,
    sensitivity_index: usize,
    network_size: usize,
    network: usize,
) -> Result<(Population, Network)> {
    build_network(
        spec,
        &NetworkTask {
            topology,
            sensitivity_index,
            sensitivity: spec.sensitivity(topology, sensitivity_index),
            network_size,
            network,
        },
    )
}

/// Replays run `run` on network `network` of `cell`.
pub fn simulate_run(
    spec: &GridSpec,
    cell: &CellKey,
    network: usize,
    run: usize,
) -> Result<SimulatedRun> {
    let task = NetworkTask {
        topology: cell.topology,
        sensitivity_index: cell.sensitivity_index,
        sensitivity: spec.sensitivity(cell.topology, cell.sensitivity_index),
        network_size: cell.network_size,
        network,
    };
    let (population, net) = build_network(spec, &task)?;
    let cfg = chain_config(spec, cell.coupons, cell.seed_rule, cell.referral);
    cfg.validate(net.node_count())?;
    let coords = chain_coords(&task, cell.coupons, cell.seed_rule, cell.referral, run);
    let mut sample = run_rds(
        &net,
        &population,
        &cfg,
        &mut stream(spec.master_seed, Domain::Chain, &coords),
    )?;
    if cell.degree_mode != DegreeReporting::Exact {
        let mut rng = stream(spec.master_seed, Domain::DegreeReport, &coords);
        sample = with_reported_degrees(&sample, cell.degree_mode, &mut rng);
    }
    Ok(SimulatedRun {
        population,
        network: net,
        sample,
    })
}

fn run_network_task(
    spec: &GridSpec,
    estimators: &[EstimatorId],
    task: &NetworkTask,
) -> Result<Vec<RunRecord>> {
    let (pop, net) = build_network(spec, task)?;
    let truth = pop.mean();

    let per_chain = spec.degree_modes.len();
    let mut out = Vec::with_capacity(
        spec.coupons.len()
            * spec.seed_rules.len()
            * spec.referrals.len()
            * spec.runs_per_network
            * per_chain,
    );
    for &coupons in &spec.coupons {
        for &seed_rule in &spec.seed_rules {
            for &referral in &spec.referrals {
                let cfg = chain_config(spec, coupons, seed_rule, referral);
                for run in 0..spec.runs_per_network {
                    let coords = chain_coords(task, coupons, seed_rule, referral, run);
                    let chain = run_rds(
                        &net,
                        &pop,
                        &cfg,
                        &mut stream(spec.master_seed, Domain::Chain, &coords),
                    );
                    let chain = match chain {
                        Ok(s) => Some(s),
                        Err(Error::ProcessExhausted(msg)) => {
                            log::warn!(
                                "{} s{} n{} network {} C{} {} {} run {}: {msg}",
                                task.topology,
                                task.sensitivity_index,
                                task.network_size,
                                task.network,
                                coupons,
                                seed_rule,
                                referral,
                                run
                            );
                            None
                        }
                        Err(e) => return Err(e),
                    };
                    for &mode in &spec.degree_modes {
                        let cell = CellKey {
                            topology: task.topology,
                            sensitivity_index: task.sensitivity_index,
                            network_size: task.network_size,
                            coupons,
                            seed_rule,
                            referral,
                            degree_mode: mode,
                        };
                        let outcome = match &chain {
                            None => None,
                            Some(exact) => {
                                let reported;
                                let sample = match mode {
                                    DegreeReporting::Exact => exact,
                                    DegreeReporting::PoissonStochastic => {
                                        let mut rng =
                                            stream(spec.master_seed, Domain::DegreeReport, &coords);
                                        reported = with_reported_degrees(exact, mode, &mut rng);
                                        &reported
                                    }
                                };
                                Some(RunOutcome {
                                    estimates: estimators
                                        .iter()
                                        .map(|e| e.estimate(sample))
                                        .collect::<Result<_>>()?,
                                    restarts: sample.restarts,
                                    waves_max: sample.waves_max,
                                })
                            }
                        };
                        out.push(RunRecord {
                            cell,
                            sensitivity: task.sensitivity,
                            network: task.network,
                            run,
                            truth,
                            outcome,
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Runs every chain of the grid on `workers` threads (0 = rayon default)
/// and aggregates the results.
pub fn run_grid(spec: &GridSpec, workers: usize) -> Result<GridOutput> {
    spec.validate(false)?;
    let estimators = EstimatorId::roster(&spec.compromise_alphas);

    let mut tasks = Vec::with_capacity(spec.total_networks());
    for &topology in &spec.topologies {
        for &sensitivity_index in &spec.sensitivity_indices {
            for &network_size in &spec.network_sizes {
                for network in 0..spec.networks_per_cell {
                    tasks.push(NetworkTask {
                        topology,
                        sensitivity_index,
                        sensitivity: spec.sensitivity(topology, sensitivity_index),
                        network_size,
                        network,
                    });
                }
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {workers} workers: {e}")))?;
    let chunks: Vec<Vec<RunRecord>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|t| run_network_task(spec, &estimators, t))
            .collect::<Result<_>>()
    })?;
    let runs: Vec<RunRecord> = chunks.into_iter().flatten().collect();
    let failed = runs.iter().filter(|r| r.outcome.is_none()).count();
    if failed > 0 {
        log::warn!(
            "{failed} of {} run records failed and are excluded",
            runs.len()
        );
    }
    let reports = aggregate(&estimators, &runs);
    Ok(GridOutput {
        estimators,
        runs,
        reports,
    })
}

/// Reduces run records to one report per (cell, estimator), in cell order.
///
/// Bias, variance and MSE are decomposed per network against that network's
/// own population mean and then averaged over networks, so
/// `bias_sq + variance == mse` holds cell by cell.
pub fn aggregate(estimators: &[EstimatorId], runs: &[RunRecord]) -> Vec<EstimatorReport> {
    let mut cells: BTreeMap<CellKey, Vec<&RunRecord>> = BTreeMap::new();
    for r in runs {
        cells.entry(r.cell).or_default().push(r);
    }

    let mut reports = Vec::with_capacity(cells.len() * estimators.len());
    for (cell, mut records) in cells {
        records.sort_by_key(|r| (r.network, r.run));
        let sensitivity = records[0].sensitivity;
        let ok: Vec<(&RunRecord, &RunOutcome)> = records
            .iter()
            .filter_map(|r| r.outcome.as_ref().map(|o| (*r, o)))
            .collect();
        let failed_runs = records.len() - ok.len();
        let n_ok = ok.len() as f64;
        let mean_restarts = ok.iter().map(|(_, o)| o.restarts as f64).sum::<f64>() / n_ok;
        let mean_waves = ok.iter().map(|(_, o)| o.waves_max as f64).sum::<f64>() / n_ok;

        for (e, &estimator) in estimators.iter().enumerate() {
            let mut per_network = Vec::new();
            let mut start = 0;
            while start < ok.len() {
                let network = ok[start].0.network;
                let end = start
                    + ok[start..]
                        .iter()
                        .take_while(|(r, _)| r.network == network)
                        .count();
                let values: Vec<f64> = ok[start..end].iter().map(|(_, o)| o.estimates[e]).collect();
                per_network.push(decompose(&values, ok[start].0.truth).expect("non-empty group"));
                start = end;
            }
            let nets = per_network.len() as f64;
            let avg = |f: fn(&Decomposition) -> f64| per_network.iter().map(f).sum::<f64>() / nets;
            reports.push(EstimatorReport {
                cell,
                sensitivity,
                estimator,
                mean_estimate: ok.iter().map(|(_, o)| o.estimates[e]).sum::<f64>() / n_ok,
                bias_sq: avg(|d| d.bias_sq),
                variance: avg(|d| d.variance),
                mse: avg(|d| d.mse),
                mean_restarts,
                mean_waves,
                run_count: ok.len(),
                failed_runs,
                per_network,
            });
        }
    }
    reports
}
