//! TOML experiment configuration.
//!
//! Every key is optional; missing keys take the published grid values.
//! Unknown keys are rejected. The schema is listed in the repository README.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::GridSpec;
use crate::netgen::TopologyKind;
use crate::rds::{DegreeReporting, Referral, ReferralParams, SeedRule};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub topologies: Option<Vec<TopologyKind>>,
    pub sensitivity_steps: Option<usize>,
    pub sensitivity_indices: Option<Vec<usize>>,
    pub network_sizes: Option<Vec<usize>>,
    pub coupons: Option<Vec<usize>>,
    pub referrals: Option<Vec<Referral>>,
    pub seed_rules: Option<Vec<SeedRuleName>>,
    pub degree_modes: Option<Vec<DegreeModeName>>,
    pub networks_per_cell: Option<usize>,
    pub runs_per_network: Option<usize>,
    pub master_seed: Option<u64>,
    pub sample_size: Option<usize>,
    pub num_seeds: Option<usize>,
    pub no_recruit_prob: Option<f64>,
    pub preferential_exponent: Option<f64>,
    pub inverse_preferential_base: Option<f64>,
    pub population_mean: Option<f64>,
    pub population_variance: Option<f64>,
    pub compromise_alphas: Option<Vec<f64>>,
    /// Permit values outside the published ranges (e.g. 7 coupons).
    pub allow_out_of_range: Option<bool>,
}

/// Config-file spelling of [`SeedRule`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedRuleName {
    Uniform,
    DegreeProportional,
}

/// Config-file spelling of [`DegreeReporting`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeModeName {
    Exact,
    Stochastic,
}

impl From<SeedRuleName> for SeedRule {
    fn from(s: SeedRuleName) -> Self {
        match s {
            SeedRuleName::Uniform => SeedRule::UniformSeeds,
            SeedRuleName::DegreeProportional => SeedRule::DegreeProportionalSeeds,
        }
    }
}

impl From<SeedRule> for SeedRuleName {
    fn from(s: SeedRule) -> Self {
        match s {
            SeedRule::UniformSeeds => SeedRuleName::Uniform,
            SeedRule::DegreeProportionalSeeds => SeedRuleName::DegreeProportional,
        }
    }
}

impl From<DegreeModeName> for DegreeReporting {
    fn from(d: DegreeModeName) -> Self {
        match d {
            DegreeModeName::Exact => DegreeReporting::Exact,
            DegreeModeName::Stochastic => DegreeReporting::PoissonStochastic,
        }
    }
}

impl From<DegreeReporting> for DegreeModeName {
    fn from(d: DegreeReporting) -> Self {
        match d {
            DegreeReporting::Exact => DegreeModeName::Exact,
            DegreeReporting::PoissonStochastic => DegreeModeName::Stochastic,
        }
    }
}

impl ConfigFile {
    /// Fills defaults and validates. Returns the spec and whether
    /// out-of-range values were allowed.
    pub fn into_spec(self) -> Result<(GridSpec, bool)> {
        let d = GridSpec::published();
        let steps = self.sensitivity_steps.unwrap_or(d.sensitivity_steps);
        let spec = GridSpec {
            topologies: self.topologies.unwrap_or(d.topologies),
            sensitivity_steps: steps,
            sensitivity_indices: self
                .sensitivity_indices
                .unwrap_or_else(|| (1..=steps).collect()),
            network_sizes: self.network_sizes.unwrap_or(d.network_sizes),
            coupons: self.coupons.unwrap_or(d.coupons),
            referrals: self.referrals.unwrap_or(d.referrals),
            seed_rules: self
                .seed_rules
                .map(|v| v.into_iter().map(Into::into).collect())
                .unwrap_or(d.seed_rules),
            degree_modes: self
                .degree_modes
                .map(|v| v.into_iter().map(Into::into).collect())
                .unwrap_or(d.degree_modes),
            networks_per_cell: self.networks_per_cell.unwrap_or(d.networks_per_cell),
            runs_per_network: self.runs_per_network.unwrap_or(d.runs_per_network),
            master_seed: self.master_seed.unwrap_or(d.master_seed),
            sample_size: self.sample_size.unwrap_or(d.sample_size),
            num_seeds: self.num_seeds.unwrap_or(d.num_seeds),
            no_recruit_prob: self.no_recruit_prob.unwrap_or(d.no_recruit_prob),
            referral_params: ReferralParams {
                preferential_exponent: self
                    .preferential_exponent
                    .unwrap_or(d.referral_params.preferential_exponent),
                inverse_preferential_base: self
                    .inverse_preferential_base
                    .unwrap_or(d.referral_params.inverse_preferential_base),
            },
            population_mean: self.population_mean.unwrap_or(d.population_mean),
            population_variance: self.population_variance.unwrap_or(d.population_variance),
            compromise_alphas: self.compromise_alphas.unwrap_or(d.compromise_alphas),
        };
        let allow = self.allow_out_of_range.unwrap_or(false);
        spec.validate(!allow)?;
        Ok((spec, allow))
    }

    /// Fully populated config describing `spec`.
    pub fn from_spec(spec: &GridSpec, allow_out_of_range: bool) -> Self {
        ConfigFile {
            topologies: Some(spec.topologies.clone()),
            sensitivity_steps: Some(spec.sensitivity_steps),
            sensitivity_indices: Some(spec.sensitivity_indices.clone()),
            network_sizes: Some(spec.network_sizes.clone()),
            coupons: Some(spec.coupons.clone()),
            referrals: Some(spec.referrals.clone()),
            seed_rules: Some(spec.seed_rules.iter().map(|&s| s.into()).collect()),
            degree_modes: Some(spec.degree_modes.iter().map(|&m| m.into()).collect()),
            networks_per_cell: Some(spec.networks_per_cell),
            runs_per_network: Some(spec.runs_per_network),
            master_seed: Some(spec.master_seed),
            sample_size: Some(spec.sample_size),
            num_seeds: Some(spec.num_seeds),
            no_recruit_prob: Some(spec.no_recruit_prob),
            preferential_exponent: Some(spec.referral_params.preferential_exponent),
            inverse_preferential_base: Some(spec.referral_params.inverse_preferential_base),
            population_mean: Some(spec.population_mean),
            population_variance: Some(spec.population_variance),
            compromise_alphas: Some(spec.compromise_alphas.clone()),
            allow_out_of_range: Some(allow_out_of_range),
        }
    }
}

/// Parses TOML text; `origin` only labels error messages.
pub fn parse_config_str(text: &str, origin: &Path) -> Result<(GridSpec, bool)> {
    let file: ConfigFile = toml::from_str(text).map_err(|e| Error::Parse {
        path: origin.to_path_buf(),
        message: e.to_string(),
    })?;
    file.into_spec()
}

pub fn parse_config(path: &Path) -> Result<GridSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config_str(&text, path).map(|(spec, _)| spec)
}

/// TOML echo of `spec`; parsing it yields an equal spec.
pub fn config_echo(spec: &GridSpec, allow_out_of_range: bool) -> String {
    toml::to_string(&ConfigFile::from_spec(spec, allow_out_of_range)).expect("config serializes")
}
