//! Per-run records as CSV, so reports can be re-aggregated later.
//!
//! Reals are written with full precision; re-aggregating a saved file
//! reproduces the original reports exactly.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::harness::{CellKey, EstimatorId, RunOutcome, RunRecord};

const FIXED_COLUMNS: [&str; 14] = [
    "topology",
    "sensitivity_index",
    "sensitivity",
    "network_size",
    "coupons",
    "seed_rule",
    "referral",
    "degree_mode",
    "network",
    "run",
    "truth",
    "status",
    "restarts",
    "waves_max",
];

pub fn format_runs(estimators: &[EstimatorId], runs: &[RunRecord]) -> String {
    let mut out = String::with_capacity(runs.len() * (120 + 24 * estimators.len()));
    out.push_str(&FIXED_COLUMNS.join(","));
    for e in estimators {
        write!(out, ",{e}").unwrap();
    }
    out.push('\n');
    for r in runs {
        let c = &r.cell;
        write!(
            out,
            "{},{},{:e},{},{},{},{},{},{},{},{:e}",
            c.topology,
            c.sensitivity_index,
            r.sensitivity,
            c.network_size,
            c.coupons,
            c.seed_rule,
            c.referral,
            c.degree_mode,
            r.network,
            r.run,
            r.truth
        )
        .unwrap();
        match &r.outcome {
            Some(o) => {
                write!(out, ",ok,{},{}", o.restarts, o.waves_max).unwrap();
                for v in &o.estimates {
                    write!(out, ",{v:e}").unwrap();
                }
            }
            None => {
                out.push_str(",failed,,");
                for _ in estimators {
                    out.push(',');
                }
            }
        }
        out.push('\n');
    }
    out
}

pub fn parse_runs(text: &str, origin: &Path) -> Result<(Vec<EstimatorId>, Vec<RunRecord>)> {
    let malformed = |line: usize, message: String| Error::Malformed {
        path: origin.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines
        .next()
        .ok_or_else(|| malformed(1, "empty file".into()))?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.len() < FIXED_COLUMNS.len() || cols[..FIXED_COLUMNS.len()] != FIXED_COLUMNS {
        return Err(malformed(1, "unexpected header".into()));
    }
    let estimators = cols[FIXED_COLUMNS.len()..]
        .iter()
        .map(|c| EstimatorId::parse(c))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| malformed(1, e.to_string()))?;

    let mut runs = Vec::new();
    for (lineno, line) in lines {
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != cols.len() {
            return Err(malformed(
                lineno,
                format!("expected {} fields, found {}", cols.len(), f.len()),
            ));
        }
        let bad = |what: &str| malformed(lineno, format!("invalid {what}"));
        let int = |i: usize, what: &str| f[i].parse::<usize>().map_err(|_| bad(what));
        let real = |i: usize, what: &str| f[i].parse::<f64>().map_err(|_| bad(what));
        let cell = CellKey {
            topology: f[0].parse().map_err(|_| bad("topology"))?,
            sensitivity_index: int(1, "sensitivity_index")?,
            network_size: int(3, "network_size")?,
            coupons: int(4, "coupons")?,
            seed_rule: f[5].parse().map_err(|_| bad("seed_rule"))?,
            referral: f[6].parse().map_err(|_| bad("referral"))?,
            degree_mode: f[7].parse().map_err(|_| bad("degree_mode"))?,
        };
        let outcome = match f[11] {
            "ok" => Some(RunOutcome {
                restarts: int(12, "restarts")?,
                waves_max: int(13, "waves_max")?,
                estimates: (FIXED_COLUMNS.len()..cols.len())
                    .map(|i| real(i, "estimate"))
                    .collect::<Result<_>>()?,
            }),
            "failed" => None,
            _ => return Err(bad("status")),
        };
        runs.push(RunRecord {
            cell,
            sensitivity: real(2, "sensitivity")?,
            network: int(8, "network")?,
            run: int(9, "run")?,
            truth: real(10, "truth")?,
            outcome,
        });
    }
    Ok((estimators, runs))
}

pub fn write_runs(path: &Path, estimators: &[EstimatorId], runs: &[RunRecord]) -> Result<()> {
    std::fs::write(path, format_runs(estimators, runs)).map_err(|e| Error::io(path, e))
}

pub fn read_runs(path: &Path) -> Result<(Vec<EstimatorId>, Vec<RunRecord>)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_runs(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netgen::TopologyKind;
    use crate::rds::{DegreeReporting, Referral, SeedRule};

    #[test]
    fn round_trip_with_failures() {
        let estimators = EstimatorId::roster(&[0.5]);
        let cell = CellKey {
            topology: TopologyKind::RichGetRicher,
            sensitivity_index: 3,
            network_size: 1000,
            coupons: 2,
            seed_rule: SeedRule::DegreeProportionalSeeds,
            referral: Referral::InversePreferential,
            degree_mode: DegreeReporting::PoissonStochastic,
        };
        let runs = vec![
            RunRecord {
                cell,
                sensitivity: 0.1 + 0.2,
                network: 0,
                run: 0,
                truth: 175.123_456_789_012_3,
                outcome: Some(RunOutcome {
                    estimates: vec![176.0 / 3.0, 1e-300, -0.0],
                    restarts: 2,
                    waves_max: 14,
                }),
            },
            RunRecord {
                cell,
                sensitivity: 0.3,
                network: 0,
                run: 1,
                truth: 175.0,
                outcome: None,
            },
        ];
        let text = format_runs(&estimators, &runs);
        let (e2, r2) = parse_runs(&text, Path::new("runs.csv")).unwrap();
        assert_eq!(e2, estimators);
        assert_eq!(r2, runs);
        assert!(parse_runs("topology\n", Path::new("x")).is_err());
    }
}
