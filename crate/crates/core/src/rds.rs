//! Respondent-driven sampling over a fixed network.
//!
//! A chain starts from a handful of seeds (wave 0). Respondents are processed
//! breadth-first in recruitment order; each one either recruits nobody (with
//! probability `no_recruit_prob`) or picks a count uniformly from
//! `1..=coupons`, then draws that many distinct, not yet sampled neighbors
//! from its referral distribution. Recruitment is capped by the unsampled
//! neighborhood and by the remaining sample budget. When the frontier dies
//! before the budget is spent, fresh seeds are drawn from the unsampled nodes.

use std::collections::VecDeque;
use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netgen::{Network, Population};

/// Floor applied to social-space distances before a negative power.
pub const MIN_DISTANCE: f64 = 1e-12;

macro_rules! named_enum {
    ($name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self { $($name::$variant => $text),+ }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl std::str::FromStr for $name {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                $name::ALL
                    .iter()
                    .copied()
                    .find(|v| v.as_str() == s)
                    .ok_or_else(|| Error::Config(format!(
                        concat!("unknown ", stringify!($name), " '{}'"), s
                    )))
            }
        }
    };
}

/// How a respondent chooses among unsampled neighbors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Referral {
    /// Weight `d^-c`: close neighbors in social space are favored.
    Preferential,
    /// Weight `a^d`: distant neighbors are favored.
    InversePreferential,
    Uniform,
}

named_enum!(Referral {
    Uniform => "uniform",
    Preferential => "preferential",
    InversePreferential => "inverse_preferential",
});

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedRule {
    UniformSeeds,
    DegreeProportionalSeeds,
}

named_enum!(SeedRule {
    UniformSeeds => "uniform",
    DegreeProportionalSeeds => "degree_proportional",
});

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeReporting {
    Exact,
    /// Reported degree is a Poisson draw with the true degree as mean.
    PoissonStochastic,
}

named_enum!(DegreeReporting {
    Exact => "exact",
    PoissonStochastic => "stochastic",
});

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferralParams {
    pub preferential_exponent: f64,
    pub inverse_preferential_base: f64,
}

impl Default for ReferralParams {
    fn default() -> Self {
        ReferralParams {
            preferential_exponent: 1.5,
            inverse_preferential_base: std::f64::consts::E,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RdsConfig {
    pub coupons: usize,
    pub sample_size: usize,
    pub num_seeds: usize,
    pub referral: Referral,
    pub seed_rule: SeedRule,
    pub degree_reporting: DegreeReporting,
    pub no_recruit_prob: f64,
    pub referral_params: ReferralParams,
}

impl RdsConfig {
    /// 300 respondents, 8 seeds, 30% non-recruitment, `c = 1.5`, `a = e`.
    pub fn standard(
        coupons: usize,
        referral: Referral,
        seed_rule: SeedRule,
        degree_reporting: DegreeReporting,
    ) -> Self {
        RdsConfig {
            coupons,
            sample_size: 300,
            num_seeds: 8,
            referral,
            seed_rule,
            degree_reporting,
            no_recruit_prob: 0.3,
            referral_params: ReferralParams::default(),
        }
    }

    pub fn validate(&self, node_count: usize) -> Result<()> {
        if self.coupons == 0 {
            return Err(Error::Config("coupons must be >= 1".into()));
        }
        if self.num_seeds == 0 {
            return Err(Error::Config("num_seeds must be >= 1".into()));
        }
        if self.sample_size == 0 || self.sample_size > node_count {
            return Err(Error::Config(format!(
                "sample_size {} must lie in 1..={node_count}",
                self.sample_size
            )));
        }
        if !(0.0..=1.0).contains(&self.no_recruit_prob) {
            return Err(Error::Config(format!(
                "no_recruit_prob {} is not a probability",
                self.no_recruit_prob
            )));
        }
        let p = self.referral_params;
        if !(p.preferential_exponent.is_finite() && p.inverse_preferential_base > 0.0) {
            return Err(Error::Config("invalid referral parameters".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RdsRecord {
    pub node: usize,
    pub quantity: f64,
    pub reported_degree: usize,
    pub true_degree: usize,
    pub wave: usize,
    /// `None` for seeds.
    pub recruiter: Option<usize>,
    pub restart_index: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RdsSample {
    pub records: Vec<RdsRecord>,
    pub restarts: usize,
    pub waves_max: usize,
}

impl RdsSample {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn quantities(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.quantity)
    }
}

/// Picks `k` distinct seeds outside `excluded`.
///
/// Degree-proportional selection draws sequentially, each time proportional
/// to degree among the remaining eligible nodes, so isolated nodes are never
/// chosen by it.
pub fn select_seeds<R: Rng + ?Sized>(
    net: &Network,
    rule: SeedRule,
    k: usize,
    excluded: &[bool],
    rng: &mut R,
) -> Result<Vec<usize>> {
    if k == 0 {
        return Err(Error::Config("seed count must be >= 1".into()));
    }
    let n = net.node_count();
    let is_excluded = |i: usize| excluded.get(i).copied().unwrap_or(false);
    let mut eligible: Vec<usize> = (0..n)
        .filter(|&i| !is_excluded(i))
        .filter(|&i| rule == SeedRule::UniformSeeds || net.degree(i) > 0)
        .collect();
    if eligible.len() < k {
        return Err(Error::ProcessExhausted(format!(
            "{} eligible seed nodes, {k} required",
            eligible.len()
        )));
    }

    match rule {
        SeedRule::UniformSeeds => {
            // partial Fisher-Yates
            for t in 0..k {
                let j = rng.random_range(t..eligible.len());
                eligible.swap(t, j);
            }
            eligible.truncate(k);
            Ok(eligible)
        }
        SeedRule::DegreeProportionalSeeds => {
            let mut weights: Vec<f64> = eligible.iter().map(|&i| net.degree(i) as f64).collect();
            let mut seeds = Vec::with_capacity(k);
            for _ in 0..k {
                let idx = draw_weighted(&weights, rng);
                seeds.push(eligible.swap_remove(idx));
                weights.swap_remove(idx);
            }
            Ok(seeds)
        }
    }
}

/// Index drawn with probability proportional to `weights` (not all zero).
fn draw_weighted<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (i, &w) in weights.iter().enumerate() {
        if u < w {
            return i;
        }
        u -= w;
    }
    // rounding left u just above the last positive weight
    weights
        .iter()
        .rposition(|&w| w > 0.0)
        .unwrap_or(weights.len() - 1)
}

/// Unnormalized referral weights of `candidates` relative to `from`.
fn referral_weights(
    x_from: f64,
    candidates: &[usize],
    pop: &Population,
    referral: Referral,
    params: ReferralParams,
    out: &mut Vec<f64>,
) {
    out.clear();
    let dist = |k: usize| (pop.value(k) - x_from).abs();
    match referral {
        Referral::Uniform => out.extend(std::iter::repeat_n(1.0, candidates.len())),
        Referral::Preferential => {
            let c = params.preferential_exponent;
            out.extend(
                candidates
                    .iter()
                    .map(|&k| dist(k).max(MIN_DISTANCE).powf(-c)),
            );
        }
        Referral::InversePreferential => {
            // a^d rescaled by a^-dmax so large distances cannot overflow
            let ln_a = params.inverse_preferential_base.ln();
            let shift = candidates
                .iter()
                .map(|&k| dist(k) * ln_a)
                .fold(f64::NEG_INFINITY, f64::max);
            out.extend(candidates.iter().map(|&k| (dist(k) * ln_a - shift).exp()));
        }
    }
}

/// Referral probabilities over the unsampled neighbors of `current`, as
/// `(node, probability)` pairs in neighbor order. Empty when every neighbor
/// is already sampled.
pub fn referral_distribution(
    net: &Network,
    pop: &Population,
    current: usize,
    already_sampled: &[bool],
    referral: Referral,
    params: ReferralParams,
) -> Vec<(usize, f64)> {
    let candidates: Vec<usize> = net
        .neighbors(current)
        .iter()
        .copied()
        .filter(|&k| !already_sampled.get(k).copied().unwrap_or(false))
        .collect();
    let mut weights = Vec::new();
    referral_weights(
        pop.value(current),
        &candidates,
        pop,
        referral,
        params,
        &mut weights,
    );
    let total: f64 = weights.iter().sum();
    candidates
        .into_iter()
        .zip(weights)
        .map(|(k, w)| (k, w / total))
        .collect()
}

/// Intended number of recruits before feasibility capping.
pub fn recruit_count<R: Rng + ?Sized>(coupons: usize, no_recruit_prob: f64, rng: &mut R) -> usize {
    if rng.random::<f64>() < no_recruit_prob {
        0
    } else {
        rng.random_range(1..=coupons)
    }
}

/// Degree as reported by a respondent, floored at 1 so inverse-degree
/// weights stay finite.
pub fn report_degree<R: Rng + ?Sized>(
    true_degree: usize,
    mode: DegreeReporting,
    rng: &mut R,
) -> usize {
    let reported = match mode {
        DegreeReporting::Exact => true_degree,
        DegreeReporting::PoissonStochastic if true_degree == 0 => 0,
        DegreeReporting::PoissonStochastic => {
            let poisson = Poisson::new(true_degree as f64).expect("positive Poisson mean");
            poisson.sample(rng) as usize
        }
    };
    reported.max(1)
}

/// Copy of `sample` with reported degrees redrawn under `mode`, in record
/// order. Lets exact and stochastic reporting share one chain realization.
pub fn with_reported_degrees<R: Rng + ?Sized>(
    sample: &RdsSample,
    mode: DegreeReporting,
    rng: &mut R,
) -> RdsSample {
    let mut out = sample.clone();
    for r in &mut out.records {
        r.reported_degree = report_degree(r.true_degree, mode, rng);
    }
    out
}

struct ChainState<'a> {
    net: &'a Network,
    pop: &'a Population,
    cfg: &'a RdsConfig,
    sampled: Vec<bool>,
    records: Vec<RdsRecord>,
    frontier: VecDeque<usize>,
}

impl ChainState<'_> {
    fn budget_left(&self) -> usize {
        self.cfg.sample_size - self.records.len()
    }

    fn admit<R: Rng + ?Sized>(
        &mut self,
        node: usize,
        wave: usize,
        recruiter: Option<usize>,
        restart_index: usize,
        rng: &mut R,
    ) {
        let true_degree = self.net.degree(node);
        let reported_degree = report_degree(true_degree, self.cfg.degree_reporting, rng);
        self.sampled[node] = true;
        self.frontier.push_back(self.records.len());
        self.records.push(RdsRecord {
            node,
            quantity: self.pop.value(node),
            reported_degree,
            true_degree,
            wave,
            recruiter,
            restart_index,
        });
    }

    fn seed<R: Rng + ?Sized>(&mut self, restart_index: usize, rng: &mut R) -> Result<()> {
        let wanted = self.cfg.num_seeds.min(self.budget_left());
        let eligible = (0..self.net.node_count())
            .filter(|&i| !self.sampled[i])
            .filter(|&i| self.cfg.seed_rule == SeedRule::UniformSeeds || self.net.degree(i) > 0)
            .count();
        if eligible == 0 {
            return Err(Error::ProcessExhausted(format!(
                "no eligible seeds left after {} of {} respondents",
                self.records.len(),
                self.cfg.sample_size
            )));
        }
        let seeds = select_seeds(
            self.net,
            self.cfg.seed_rule,
            wanted.min(eligible),
            &self.sampled,
            rng,
        )?;
        for s in seeds {
            self.admit(s, 0, None, restart_index, rng);
        }
        Ok(())
    }
}

/// Runs one recruitment chain until `cfg.sample_size` respondents are
/// recorded.
pub fn run_rds<R: Rng + ?Sized>(
    net: &Network,
    pop: &Population,
    cfg: &RdsConfig,
    rng: &mut R,
) -> Result<RdsSample> {
    if net.node_count() != pop.len() {
        return Err(Error::SizeMismatch {
            network: net.node_count(),
            population: pop.len(),
        });
    }
    cfg.validate(net.node_count())?;

    let mut state = ChainState {
        net,
        pop,
        cfg,
        sampled: vec![false; net.node_count()],
        records: Vec::with_capacity(cfg.sample_size),
        frontier: VecDeque::new(),
    };
    let mut restart_index = 0;
    let mut candidates = Vec::new();
    let mut weights = Vec::new();

    state.seed(restart_index, rng)?;
    while state.budget_left() > 0 {
        let Some(rec) = state.frontier.pop_front() else {
            restart_index += 1;
            state.seed(restart_index, rng)?;
            continue;
        };
        let intended = recruit_count(cfg.coupons, cfg.no_recruit_prob, rng);
        if intended == 0 {
            continue;
        }
        let (node, wave) = (state.records[rec].node, state.records[rec].wave);
        candidates.clear();
        candidates.extend(
            net.neighbors(node)
                .iter()
                .copied()
                .filter(|&k| !state.sampled[k]),
        );
        let count = intended.min(candidates.len()).min(state.budget_left());
        if count == 0 {
            continue;
        }
        referral_weights(
            pop.value(node),
            &candidates,
            pop,
            cfg.referral,
            cfg.referral_params,
            &mut weights,
        );
        for _ in 0..count {
            let idx = draw_weighted(&weights, rng);
            let recruit = candidates.swap_remove(idx);
            weights.swap_remove(idx);
            state.admit(recruit, wave + 1, Some(node), restart_index, rng);
        }
    }

    let waves_max = state.records.iter().map(|r| r.wave).max().unwrap_or(0);
    Ok(RdsSample {
        records: state.records,
        restarts: restart_index,
        waves_max,
    })
}

/// Simple random walk of `steps` moves from `start`; the returned sequence
/// has `steps + 1` entries and begins with `start`.
pub fn run_random_walk<R: Rng + ?Sized>(
    net: &Network,
    start: usize,
    steps: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    if start >= net.node_count() {
        return Err(Error::IndexOutOfRange {
            index: start,
            len: net.node_count(),
        });
    }
    if net.degree(start) == 0 {
        return Err(Error::ProcessExhausted(format!(
            "random walk cannot leave isolated node {start}"
        )));
    }
    let mut walk = Vec::with_capacity(steps + 1);
    let mut at = start;
    walk.push(at);
    for _ in 0..steps {
        let nbrs = net.neighbors(at);
        at = nbrs[rng.random_range(0..nbrs.len())];
        walk.push(at);
    }
    Ok(walk)
}
