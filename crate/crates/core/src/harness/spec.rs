use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::estimators::DEFAULT_ALPHAS;
use crate::netgen::TopologyKind;
use crate::rds::{DegreeReporting, Referral, ReferralParams, SeedRule};

/// The experimental grid: topology classes crossed with sensitivity values,
/// network sizes and recruitment features.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub topologies: Vec<TopologyKind>,
    pub sensitivity_steps: usize,
    /// 1-based positions into the `sensitivity_steps` grid.
    pub sensitivity_indices: Vec<usize>,
    pub network_sizes: Vec<usize>,
    pub coupons: Vec<usize>,
    pub referrals: Vec<Referral>,
    pub seed_rules: Vec<SeedRule>,
    pub degree_modes: Vec<DegreeReporting>,
    pub networks_per_cell: usize,
    pub runs_per_network: usize,
    pub master_seed: u64,
    pub sample_size: usize,
    pub num_seeds: usize,
    pub no_recruit_prob: f64,
    pub referral_params: ReferralParams,
    pub population_mean: f64,
    pub population_variance: f64,
    pub compromise_alphas: Vec<f64>,
}

pub const PUBLISHED_COUPONS: std::ops::RangeInclusive<usize> = 2..=6;

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::published()
    }
}

impl GridSpec {
    /// Full grid: 3 topologies x 10 sensitivities x {1000, 3000} nodes x
    /// 2..=6 coupons x 3 referrals x 2 seed rules x 2 degree modes, with 500
    /// networks per cell and 100 chains per network and feature combination.
    pub fn published() -> Self {
        GridSpec {
            topologies: TopologyKind::ALL.to_vec(),
            sensitivity_steps: 10,
            sensitivity_indices: (1..=10).collect(),
            network_sizes: vec![1000, 3000],
            coupons: PUBLISHED_COUPONS.collect(),
            referrals: Referral::ALL.to_vec(),
            seed_rules: SeedRule::ALL.to_vec(),
            degree_modes: DegreeReporting::ALL.to_vec(),
            networks_per_cell: 500,
            runs_per_network: 100,
            master_seed: 0,
            sample_size: 300,
            num_seeds: 8,
            no_recruit_prob: 0.3,
            referral_params: ReferralParams::default(),
            population_mean: 175.0,
            population_variance: 100.0,
            compromise_alphas: DEFAULT_ALPHAS.to_vec(),
        }
    }

    /// Laptop-sized reduction: 1000-node networks, 50 networks x 20 chains,
    /// sensitivity positions {first, middle, last}.
    pub fn desk_scale(mut self) -> Self {
        let steps = self.sensitivity_steps.max(1);
        let mut idx = vec![1, steps.div_ceil(2), steps];
        idx.dedup();
        self.sensitivity_indices = idx;
        self.network_sizes = vec![1000];
        self.networks_per_cell = 50;
        self.runs_per_network = 20;
        self
    }

    /// Sensitivity value at a 1-based grid position.
    pub fn sensitivity(&self, kind: TopologyKind, index: usize) -> f64 {
        kind.sensitivity_values(self.sensitivity_steps)[index - 1]
    }

    pub fn total_networks(&self) -> usize {
        self.topologies.len()
            * self.sensitivity_indices.len()
            * self.network_sizes.len()
            * self.networks_per_cell
    }

    pub fn total_chains(&self) -> usize {
        self.total_networks()
            * self.coupons.len()
            * self.referrals.len()
            * self.seed_rules.len()
            * self.runs_per_network
    }

    /// Structural checks always apply; `strict` additionally enforces the
    /// published parameter ranges (coupons in 2..=6, exponents in [0, 1]).
    pub fn validate(&self, strict: bool) -> Result<()> {
        non_empty_unique("topologies", &self.topologies)?;
        non_empty_unique("network_sizes", &self.network_sizes)?;
        non_empty_unique("coupons", &self.coupons)?;
        non_empty_unique("referrals", &self.referrals)?;
        non_empty_unique("seed_rules", &self.seed_rules)?;
        non_empty_unique("degree_modes", &self.degree_modes)?;
        non_empty_unique("sensitivity_indices", &self.sensitivity_indices)?;

        if self.sensitivity_steps == 0 {
            return Err(Error::out_of_range("sensitivity_steps", 0, ">= 1"));
        }
        for &i in &self.sensitivity_indices {
            if i == 0 || i > self.sensitivity_steps {
                return Err(Error::out_of_range(
                    "sensitivity_indices",
                    i,
                    format!("1..={}", self.sensitivity_steps),
                ));
            }
        }
        for &n in &self.network_sizes {
            if n < 2 || n < self.sample_size {
                return Err(Error::out_of_range(
                    "network_sizes",
                    n,
                    format!(">= max(2, sample_size = {})", self.sample_size),
                ));
            }
        }
        for &c in &self.coupons {
            if c == 0 {
                return Err(Error::out_of_range("coupons", c, ">= 1"));
            }
            if strict && !PUBLISHED_COUPONS.contains(&c) {
                return Err(Error::out_of_range("coupons", c, "{2..6}"));
            }
        }
        if self.networks_per_cell == 0 {
            return Err(Error::out_of_range("networks_per_cell", 0, ">= 1"));
        }
        if self.runs_per_network == 0 {
            return Err(Error::out_of_range("runs_per_network", 0, ">= 1"));
        }
        if self.sample_size == 0 {
            return Err(Error::out_of_range("sample_size", 0, ">= 1"));
        }
        if self.num_seeds == 0 {
            return Err(Error::out_of_range("num_seeds", 0, ">= 1"));
        }
        if !(0.0..=1.0).contains(&self.no_recruit_prob) {
            return Err(Error::out_of_range(
                "no_recruit_prob",
                self.no_recruit_prob,
                "[0, 1]",
            ));
        }
        let rp = self.referral_params;
        if !(rp.preferential_exponent.is_finite() && rp.preferential_exponent >= 0.0) {
            return Err(Error::out_of_range(
                "preferential_exponent",
                rp.preferential_exponent,
                ">= 0",
            ));
        }
        if !(rp.inverse_preferential_base.is_finite() && rp.inverse_preferential_base > 0.0) {
            return Err(Error::out_of_range(
                "inverse_preferential_base",
                rp.inverse_preferential_base,
                "> 0",
            ));
        }
        if !self.population_mean.is_finite() {
            return Err(Error::out_of_range(
                "population_mean",
                self.population_mean,
                "finite",
            ));
        }
        if !(self.population_variance.is_finite() && self.population_variance > 0.0) {
            return Err(Error::out_of_range(
                "population_variance",
                self.population_variance,
                "> 0",
            ));
        }
        let mut seen = Vec::new();
        for &a in &self.compromise_alphas {
            if !a.is_finite() {
                return Err(Error::out_of_range("compromise_alphas", a, "finite"));
            }
            if strict && !(0.0..=1.0).contains(&a) {
                return Err(Error::out_of_range("compromise_alphas", a, "[0, 1]"));
            }
            if seen.contains(&a) {
                return Err(Error::Config(format!("compromise_alphas lists {a} twice")));
            }
            seen.push(a);
        }
        Ok(())
    }
}

fn non_empty_unique<T: Ord + std::fmt::Debug>(field: &str, items: &[T]) -> Result<()> {
    if items.is_empty() {
        return Err(Error::Config(format!("{field} must not be empty")));
    }
    let set: BTreeSet<&T> = items.iter().collect();
    if set.len() != items.len() {
        return Err(Error::Config(format!(
            "{field} contains duplicates: {items:?}"
        )));
    }
    Ok(())
}
