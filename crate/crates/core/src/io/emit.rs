//! Delimited-text tables and plot data.
//!
//! Every real is printed with six significant digits; output depends only on
//! the reports, so identical reports give byte-identical files.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::harness::{
    sensitivity_table, summary_table, CellKey, EstimatorId, EstimatorReport, MetricDiff, RunRecord,
    SensitivityTable, SummaryTable,
};
use crate::io::format::g6;
use crate::io::runs::write_runs;
use crate::netgen::{Network, Population, TopologyKind};
use crate::rds::{DegreeReporting, Referral, SeedRule};

fn opt(x: Option<f64>) -> String {
    x.map(g6).unwrap_or_default()
}

pub fn format_summary(t: &SummaryTable) -> String {
    let mut out = String::from("network_size,coupons,topology,seed_rule");
    for r in &t.referrals {
        write!(
            out,
            ",{r}_mean_mse,{r}_vh_mse_exact,{r}_vh_mse_stochastic,{r}_vh_wins"
        )
        .unwrap();
    }
    out.push('\n');
    for row in &t.rows {
        write!(
            out,
            "{},{},{},{}",
            t.network_size, t.coupons, row.topology, row.seed_rule
        )
        .unwrap();
        for cell in &row.cells {
            match cell {
                Some(c) => write!(
                    out,
                    ",{},{},{},{}",
                    g6(c.mean_mse),
                    opt(c.vh_mse_exact),
                    opt(c.vh_mse_stochastic),
                    c.vh_wins()
                )
                .unwrap(),
                None => out.push_str(",,,,"),
            }
        }
        out.push('\n');
    }
    out
}

fn diff_fields(out: &mut String, d: Option<MetricDiff>) {
    match d {
        Some(d) => write!(out, ",{},{},{}", g6(d.mse), g6(d.bias_sq), g6(d.variance)).unwrap(),
        None => out.push_str(",,,"),
    }
}

pub fn format_sensitivity(t: &SensitivityTable) -> String {
    let mut out = String::from(
        "topology,network_size,seed_rule,referral,sensitivity_index,sensitivity,coupons,\
         exact_mse_diff,exact_bias_sq_diff,exact_variance_diff,\
         stochastic_mse_diff,stochastic_bias_sq_diff,stochastic_variance_diff,\
         mean_restarts,mean_waves\n",
    );
    for row in &t.rows {
        write!(
            out,
            "{},{},{},{},{},{},{}",
            t.topology,
            t.network_size,
            t.seed_rule,
            t.referral,
            row.sensitivity_index,
            g6(row.sensitivity),
            row.coupons
        )
        .unwrap();
        diff_fields(&mut out, row.exact);
        diff_fields(&mut out, row.stochastic);
        writeln!(out, ",{},{}", g6(row.mean_restarts), g6(row.mean_waves)).unwrap();
    }
    out
}

/// All cell reports in one long table.
pub fn format_reports(reports: &[EstimatorReport]) -> String {
    let mut out = String::from(
        "topology,sensitivity_index,sensitivity,network_size,coupons,seed_rule,referral,degree_mode,\
         estimator,mean_estimate,bias_sq,variance,mse,mean_restarts,mean_waves,run_count,failed_runs\n",
    );
    for r in reports {
        let c = &r.cell;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            c.topology,
            c.sensitivity_index,
            g6(r.sensitivity),
            c.network_size,
            c.coupons,
            c.seed_rule,
            c.referral,
            c.degree_mode,
            r.estimator,
            g6(r.mean_estimate),
            g6(r.bias_sq),
            g6(r.variance),
            g6(r.mse),
            g6(r.mean_restarts),
            g6(r.mean_waves),
            r.run_count,
            r.failed_runs
        )
        .unwrap();
    }
    out
}

fn write_file(dir: &Path, name: String, text: &str, inventory: &mut Vec<PathBuf>) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    inventory.push(path);
    Ok(())
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Writes one summary table per (network size, coupons) and one sensitivity
/// table per (topology, network size, seed rule, referral) present in
/// `reports`. Returns the written paths in a fixed order.
pub fn emit_reports(reports: &[EstimatorReport], out_dir: &Path) -> Result<Vec<PathBuf>> {
    create_dir(out_dir)?;
    let mut inventory = Vec::new();
    let summaries: BTreeSet<(usize, usize)> = reports
        .iter()
        .map(|r| (r.cell.network_size, r.cell.coupons))
        .collect();
    for (n, c) in summaries {
        let t = summary_table(reports, n, c)?;
        write_file(
            out_dir,
            format!("summary_n{n}_c{c}.csv"),
            &format_summary(&t),
            &mut inventory,
        )?;
    }
    let slices: BTreeSet<(TopologyKind, usize, SeedRule, Referral)> = reports
        .iter()
        .map(|r| {
            (
                r.cell.topology,
                r.cell.network_size,
                r.cell.seed_rule,
                r.cell.referral,
            )
        })
        .collect();
    for (topo, n, seed, referral) in slices {
        let t = sensitivity_table(reports, topo, n, seed, referral)?;
        write_file(
            out_dir,
            format!("sensitivity_{topo}_n{n}_{seed}_{referral}.csv"),
            &format_sensitivity(&t),
            &mut inventory,
        )?;
    }
    Ok(inventory)
}

#[derive(Debug, Clone, Copy)]
pub enum PlotData<'a> {
    /// Per-network bias², variance and MSE of every estimator in one cell.
    Density {
        reports: &'a [EstimatorReport],
        cell: CellKey,
    },
    /// Per-node quantity against degree scaled by the maximum degree.
    DegreeQuantity {
        net: &'a Network,
        pop: &'a Population,
    },
    /// Signed VH-minus-mean differences over sensitivity x coupons.
    Sensitivity {
        reports: &'a [EstimatorReport],
        topology: TopologyKind,
        network_size: usize,
        seed_rule: SeedRule,
        referral: Referral,
    },
}

pub fn cell_label(c: &CellKey) -> String {
    format!(
        "{}_s{}_n{}_c{}_{}_{}_{}",
        c.topology,
        c.sensitivity_index,
        c.network_size,
        c.coupons,
        c.seed_rule,
        c.referral,
        c.degree_mode
    )
}

pub fn format_density(reports: &[EstimatorReport], cell: &CellKey) -> Result<String> {
    let selected: Vec<&EstimatorReport> = reports.iter().filter(|r| r.cell == *cell).collect();
    if selected.is_empty() {
        return Err(Error::MissingSlice(format!(
            "no reports for cell {}",
            cell_label(cell)
        )));
    }
    let mut out = String::from("estimator,network,bias_sq,variance,mse\n");
    for r in selected {
        for (i, d) in r.per_network.iter().enumerate() {
            writeln!(
                out,
                "{},{i},{},{},{}",
                r.estimator,
                g6(d.bias_sq),
                g6(d.variance),
                g6(d.mse)
            )
            .unwrap();
        }
    }
    Ok(out)
}

pub fn format_degree_quantity(net: &Network, pop: &Population) -> Result<String> {
    let profile = crate::netgen::degree_quantity_profile(net, pop)?;
    let max = profile.iter().map(|p| p.1).max().unwrap_or(0).max(1) as f64;
    let mut out = String::from("node,quantity,degree,normalized_degree\n");
    for (i, (x, d)) in profile.into_iter().enumerate() {
        writeln!(out, "{i},{},{d},{}", g6(x), g6(d as f64 / max)).unwrap();
    }
    Ok(out)
}

pub fn format_sensitivity_grid(t: &SensitivityTable) -> String {
    let mut out = String::from(
        "sensitivity_index,sensitivity,coupons,degree_mode,mse_diff,bias_sq_diff,variance_diff\n",
    );
    for row in &t.rows {
        for (mode, d) in [
            (DegreeReporting::Exact, row.exact),
            (DegreeReporting::PoissonStochastic, row.stochastic),
        ] {
            if let Some(d) = d {
                writeln!(
                    out,
                    "{},{},{},{mode},{},{},{}",
                    row.sensitivity_index,
                    g6(row.sensitivity),
                    row.coupons,
                    g6(d.mse),
                    g6(d.bias_sq),
                    g6(d.variance)
                )
                .unwrap();
            }
        }
    }
    out
}

pub fn emit_plot_data(kind: PlotData<'_>, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let (name, text) = match kind {
        PlotData::Density { reports, cell } => (
            format!("density_{}.csv", cell_label(&cell)),
            format_density(reports, &cell)?,
        ),
        PlotData::DegreeQuantity { net, pop } => (
            "degree_quantity.csv".to_string(),
            format_degree_quantity(net, pop)?,
        ),
        PlotData::Sensitivity {
            reports,
            topology,
            network_size,
            seed_rule,
            referral,
        } => {
            let t = sensitivity_table(reports, topology, network_size, seed_rule, referral)?;
            (
                format!("sensitivity_grid_{topology}_n{network_size}_{seed_rule}_{referral}.csv"),
                format_sensitivity_grid(&t),
            )
        }
    };
    create_dir(out_dir)?;
    let mut inventory = Vec::new();
    write_file(out_dir, name, &text, &mut inventory)?;
    Ok(inventory)
}

/// Everything a grid or report command writes: `runs.csv`, `reports.csv`,
/// the summary and sensitivity tables and, with `plots`, density and
/// sensitivity plot data under `plots/`. Returns the written paths.
pub fn write_grid_outputs(
    out_dir: &Path,
    estimators: &[EstimatorId],
    runs: &[RunRecord],
    reports: &[EstimatorReport],
    plots: bool,
) -> Result<Vec<PathBuf>> {
    create_dir(out_dir)?;
    let mut files = Vec::new();
    let runs_path = out_dir.join("runs.csv");
    write_runs(&runs_path, estimators, runs)?;
    files.push(runs_path);
    write_file(
        out_dir,
        "reports.csv".into(),
        &format_reports(reports),
        &mut files,
    )?;
    files.extend(emit_reports(reports, out_dir)?);
    if plots {
        let dir = out_dir.join("plots");
        let cells: BTreeSet<CellKey> = reports.iter().map(|r| r.cell).collect();
        for cell in cells {
            files.extend(emit_plot_data(PlotData::Density { reports, cell }, &dir)?);
        }
        let slices: BTreeSet<(TopologyKind, usize, SeedRule, Referral)> = reports
            .iter()
            .map(|r| {
                (
                    r.cell.topology,
                    r.cell.network_size,
                    r.cell.seed_rule,
                    r.cell.referral,
                )
            })
            .collect();
        for (topology, network_size, seed_rule, referral) in slices {
            let kind = PlotData::Sensitivity {
                reports,
                topology,
                network_size,
                seed_rule,
                referral,
            };
            files.extend(emit_plot_data(kind, &dir)?);
        }
    }
    Ok(files)
}
