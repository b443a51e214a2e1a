//! Slices of the report collection: per-sensitivity VH-minus-mean
//! differences and sensitivity-averaged MSE summaries.

use std::collections::{BTreeMap, BTreeSet};

use super::{CellKey, EstimatorId, EstimatorReport};
use crate::error::{Error, Result};
use crate::netgen::TopologyKind;
use crate::rds::{DegreeReporting, Referral, SeedRule};

/// Reports of two estimators in the same cell.
#[derive(Debug, Clone, Copy)]
pub struct Pairing<'a> {
    pub cell: CellKey,
    pub first: &'a EstimatorReport,
    pub second: &'a EstimatorReport,
}

/// Matches reports of `first` and `second` cell by cell, in cell order.
pub fn pairwise(
    reports: &[EstimatorReport],
    first: EstimatorId,
    second: EstimatorId,
) -> Vec<Pairing<'_>> {
    let mut by_cell: BTreeMap<CellKey, (Option<&EstimatorReport>, Option<&EstimatorReport>)> =
        BTreeMap::new();
    for r in reports {
        if r.estimator == first {
            by_cell.entry(r.cell).or_default().0 = Some(r);
        } else if r.estimator == second {
            by_cell.entry(r.cell).or_default().1 = Some(r);
        }
    }
    by_cell
        .into_iter()
        .filter_map(|(cell, pair)| match pair {
            (Some(first), Some(second)) => Some(Pairing {
                cell,
                first,
                second,
            }),
            _ => None,
        })
        .collect()
}

/// Signed VH-minus-mean differences; positive means the plain mean is better.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricDiff {
    pub mse: f64,
    pub bias_sq: f64,
    pub variance: f64,
}

impl MetricDiff {
    fn between(vh: &EstimatorReport, mean: &EstimatorReport) -> Self {
        MetricDiff {
            mse: vh.mse - mean.mse,
            bias_sq: vh.bias_sq - mean.bias_sq,
            variance: vh.variance - mean.variance,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityRow {
    pub sensitivity_index: usize,
    pub sensitivity: f64,
    pub coupons: usize,
    pub exact: Option<MetricDiff>,
    pub stochastic: Option<MetricDiff>,
    pub mean_restarts: f64,
    pub mean_waves: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityTable {
    pub topology: TopologyKind,
    pub network_size: usize,
    pub seed_rule: SeedRule,
    pub referral: Referral,
    pub rows: Vec<SensitivityRow>,
}

/// Rows over (sensitivity index x coupons) for one topology, network size,
/// seed rule and referral.
pub fn sensitivity_table(
    reports: &[EstimatorReport],
    topology: TopologyKind,
    network_size: usize,
    seed_rule: SeedRule,
    referral: Referral,
) -> Result<SensitivityTable> {
    let mut rows: BTreeMap<(usize, usize), SensitivityRow> = BTreeMap::new();
    for p in pairwise(reports, EstimatorId::Vh, EstimatorId::Mean) {
        let c = p.cell;
        if c.topology != topology
            || c.network_size != network_size
            || c.seed_rule != seed_rule
            || c.referral != referral
        {
            continue;
        }
        let row = rows
            .entry((c.sensitivity_index, c.coupons))
            .or_insert(SensitivityRow {
                sensitivity_index: c.sensitivity_index,
                sensitivity: p.first.sensitivity,
                coupons: c.coupons,
                exact: None,
                stochastic: None,
                mean_restarts: p.second.mean_restarts,
                mean_waves: p.second.mean_waves,
            });
        let diff = MetricDiff::between(p.first, p.second);
        match c.degree_mode {
            DegreeReporting::Exact => {
                row.exact = Some(diff);
                // the exact-mode cell is the reference for chain statistics
                row.mean_restarts = p.second.mean_restarts;
                row.mean_waves = p.second.mean_waves;
            }
            DegreeReporting::PoissonStochastic => row.stochastic = Some(diff),
        }
    }
    if rows.is_empty() {
        return Err(Error::MissingSlice(format!(
            "no reports for {topology} n{network_size} seeds={seed_rule} referral={referral}"
        )));
    }
    Ok(SensitivityTable {
        topology,
        network_size,
        seed_rule,
        referral,
        rows: rows.into_values().collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryCell {
    pub mean_mse: f64,
    pub vh_mse_exact: Option<f64>,
    pub vh_mse_stochastic: Option<f64>,
}

impl SummaryCell {
    /// VH beats the plain mean under exact reporting (or stochastic, when
    /// exact was not simulated).
    pub fn vh_wins(&self) -> bool {
        self.vh_mse_exact
            .or(self.vh_mse_stochastic)
            .is_some_and(|v| v < self.mean_mse)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub topology: TopologyKind,
    pub seed_rule: SeedRule,
    /// One entry per referral column; `None` when not simulated.
    pub cells: Vec<Option<SummaryCell>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryTable {
    pub network_size: usize,
    pub coupons: usize,
    pub referrals: Vec<Referral>,
    pub rows: Vec<SummaryRow>,
}

impl SummaryTable {
    pub fn cell(
        &self,
        topology: TopologyKind,
        seed_rule: SeedRule,
        referral: Referral,
    ) -> Option<SummaryCell> {
        let col = self.referrals.iter().position(|&r| r == referral)?;
        self.rows
            .iter()
            .find(|r| r.topology == topology && r.seed_rule == seed_rule)
            .and_then(|r| r.cells[col])
    }
}

/// MSE averaged over sensitivity values, rows = topology x seed rule,
/// columns = referral.
pub fn summary_table(
    reports: &[EstimatorReport],
    network_size: usize,
    coupons: usize,
) -> Result<SummaryTable> {
    #[derive(Default)]
    struct Acc {
        mean: Vec<f64>,
        mean_stochastic: Vec<f64>,
        vh_exact: Vec<f64>,
        vh_stochastic: Vec<f64>,
    }
    let avg = |v: &[f64]| (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);

    let mut acc: BTreeMap<(TopologyKind, SeedRule, Referral), Acc> = BTreeMap::new();
    for p in pairwise(reports, EstimatorId::Vh, EstimatorId::Mean) {
        let c = p.cell;
        if c.network_size != network_size || c.coupons != coupons {
            continue;
        }
        let a = acc
            .entry((c.topology, c.seed_rule, c.referral))
            .or_default();
        match c.degree_mode {
            DegreeReporting::Exact => {
                a.mean.push(p.second.mse);
                a.vh_exact.push(p.first.mse);
            }
            DegreeReporting::PoissonStochastic => {
                a.mean_stochastic.push(p.second.mse);
                a.vh_stochastic.push(p.first.mse);
            }
        }
    }
    if acc.is_empty() {
        return Err(Error::MissingSlice(format!(
            "no reports for n{network_size} C{coupons}"
        )));
    }

    let referrals: Vec<Referral> = acc
        .keys()
        .map(|k| k.2)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let row_keys: BTreeSet<(TopologyKind, SeedRule)> = acc.keys().map(|k| (k.0, k.1)).collect();
    let rows = row_keys
        .into_iter()
        .map(|(topology, seed_rule)| SummaryRow {
            topology,
            seed_rule,
            cells: referrals
                .iter()
                .map(|&referral| {
                    acc.get(&(topology, seed_rule, referral))
                        .map(|a| SummaryCell {
                            // the plain mean is identical under both modes; exact is preferred
                            mean_mse: avg(&a.mean).or(avg(&a.mean_stochastic)).unwrap_or(f64::NAN),
                            vh_mse_exact: avg(&a.vh_exact),
                            vh_mse_stochastic: avg(&a.vh_stochastic),
                        })
                })
                .collect(),
        })
        .collect();
    Ok(SummaryTable {
        network_size,
        coupons,
        referrals,
        rows,
    })
}
