use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rdsim::harness::{
    aggregate, grid_network, run_grid, simulate_run, CellKey, EstimatorId, GridSpec,
};
use rdsim::io::config::{config_echo, parse_config_str};
use rdsim::io::emit::{format_degree_quantity, write_grid_outputs};
use rdsim::io::manifest::{unix_now, MANIFEST_NAME};
use rdsim::io::sample::format_sample;
use rdsim::io::{read_manifest, read_runs, write_network, RunManifest};
use rdsim::netgen::TopologyKind;
use rdsim::rds::{DegreeReporting, Referral, SeedRule};
use rdsim::validate::{oracle_suite, stationarity_suite};
use rdsim::{Error, Result};

#[derive(Parser)]
#[command(
    name = "rdsim",
    version,
    about = "Respondent-driven sampling simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct GridArgs {
    /// TOML configuration, or a manifest.json from an earlier run
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the master seed
    #[arg(long)]
    seed: Option<u64>,
    /// Shrink the grid to 1000-node networks, 50 x 20 runs, three sensitivities
    #[arg(long)]
    desk_scale: bool,
}

#[derive(Args, Clone)]
struct CellArgs {
    #[arg(long, default_value = "homophily")]
    topology: TopologyKind,
    /// 1-based position on the sensitivity grid
    #[arg(long, default_value_t = 1)]
    sensitivity_index: usize,
    #[arg(long, default_value_t = 1000)]
    nodes: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Generate populations and networks
    Generate {
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        cell: CellArgs,
        /// Number of networks
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run one chain and dump the sample
    Simulate {
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        cell: CellArgs,
        #[arg(long, default_value_t = 3)]
        coupons: usize,
        #[arg(long, default_value = "uniform")]
        seed_rule: SeedRule,
        #[arg(long, default_value = "uniform")]
        referral: Referral,
        #[arg(long, default_value = "exact")]
        degree_mode: DegreeReporting,
        /// Network number within the cell
        #[arg(long, default_value_t = 0)]
        network: usize,
        /// Run number on that network
        #[arg(long, default_value_t = 0)]
        run: usize,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run the experiment grid and write tables
    Grid {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Worker threads (0 = one per core)
        #[arg(long, default_value_t = 0)]
        workers: usize,
        /// Also write per-cell density and sensitivity plot data
        #[arg(long)]
        plots: bool,
    },
    /// Re-aggregate a saved runs.csv
    Report {
        #[arg(long)]
        runs: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        plots: bool,
    },
    /// Random-walk stationarity and estimator oracle checks
    Validate {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        graphs: usize,
        #[arg(long, default_value_t = 1_000_000)]
        steps: usize,
    },
}

fn load_spec(args: &GridArgs) -> Result<(GridSpec, bool)> {
    let (mut spec, allow) = match &args.config {
        None => (GridSpec::published(), false),
        Some(path) if path.extension().is_some_and(|e| e == "json") => {
            read_manifest(path)?.spec(path)?
        }
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            parse_config_str(&text, path)?
        }
    };
    if args.desk_scale {
        spec = spec.desk_scale();
    }
    if let Some(seed) = args.seed {
        spec.master_seed = seed;
    }
    spec.validate(!allow)?;
    Ok((spec, allow))
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_text(path: PathBuf, text: &str, files: &mut Vec<PathBuf>) -> Result<()> {
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    files.push(path);
    Ok(())
}

fn single_cell_spec(mut spec: GridSpec, cell: &CellArgs) -> GridSpec {
    spec.topologies = vec![cell.topology];
    spec.sensitivity_indices = vec![cell.sensitivity_index];
    spec.network_sizes = vec![cell.nodes];
    spec
}

fn run(cli: Cli) -> Result<()> {
    let started = unix_now();
    match cli.command {
        Command::Generate {
            grid,
            cell,
            count,
            out,
        } => {
            let (spec, allow) = load_spec(&grid)?;
            let mut spec = single_cell_spec(spec, &cell);
            // no chains are run, so small networks are fine
            spec.sample_size = spec.sample_size.min(cell.nodes);
            spec.num_seeds = spec.num_seeds.min(spec.sample_size);
            spec.validate(!allow)?;
            create_dir(&out)?;
            let mut files = Vec::new();
            for k in 0..count {
                let (pop, net) =
                    grid_network(&spec, cell.topology, cell.sensitivity_index, cell.nodes, k)?;
                let path = out.join(format!("network_{k}.txt"));
                write_network(&path, &net, &pop)?;
                files.push(path);
                write_text(
                    out.join(format!("degree_quantity_{k}.csv")),
                    &format_degree_quantity(&net, &pop)?,
                    &mut files,
                )?;
                println!(
                    "network {k}: {} nodes, {} edges, connected: {}",
                    net.node_count(),
                    net.edge_count(),
                    net.is_connected()
                );
            }
            RunManifest::new("generate", config_echo(&spec, allow), 1, started)
                .finish(&out, &files)?;
        }
        Command::Simulate {
            grid,
            cell,
            coupons,
            seed_rule,
            referral,
            degree_mode,
            network,
            run,
            out,
        } => {
            let (spec, allow) = load_spec(&grid)?;
            let mut spec = single_cell_spec(spec, &cell);
            spec.coupons = vec![coupons];
            spec.seed_rules = vec![seed_rule];
            spec.referrals = vec![referral];
            spec.degree_modes = vec![degree_mode];
            spec.validate(!allow)?;
            let key = CellKey {
                topology: cell.topology,
                sensitivity_index: cell.sensitivity_index,
                network_size: cell.nodes,
                coupons,
                seed_rule,
                referral,
                degree_mode,
            };
            let sim = simulate_run(&spec, &key, network, run)?;
            create_dir(&out)?;
            let mut files = Vec::new();
            write_text(
                out.join("sample.csv"),
                &format_sample(&sim.sample),
                &mut files,
            )?;
            let net_path = out.join("network.txt");
            write_network(&net_path, &sim.network, &sim.population)?;
            files.push(net_path);
            RunManifest::new("simulate", config_echo(&spec, allow), 1, started)
                .finish(&out, &files)?;

            println!("truth {}", sim.population.mean());
            println!(
                "sample {} restarts {} waves_max {}",
                sim.sample.len(),
                sim.sample.restarts,
                sim.sample.waves_max
            );
            for e in EstimatorId::roster(&spec.compromise_alphas) {
                println!("{e} {}", e.estimate(&sim.sample)?);
            }
        }
        Command::Grid {
            grid,
            out,
            workers,
            plots,
        } => {
            let (spec, allow) = load_spec(&grid)?;
            log::info!(
                "{} networks, {} chains, master seed {}",
                spec.total_networks(),
                spec.total_chains(),
                spec.master_seed
            );
            let result = run_grid(&spec, workers)?;
            let files = write_grid_outputs(
                &out,
                &result.estimators,
                &result.runs,
                &result.reports,
                plots,
            )?;
            let path = RunManifest::new("grid", config_echo(&spec, allow), workers, started)
                .finish(&out, &files)?;
            println!("wrote {} files, manifest {}", files.len(), path.display());
        }
        Command::Report { runs, out, plots } => {
            let (estimators, records) = read_runs(&runs)?;
            let reports = aggregate(&estimators, &records);
            let config = runs
                .parent()
                .map(|d| d.join(MANIFEST_NAME))
                .filter(|p| p.exists())
                .map(|p| read_manifest(&p).map(|m| m.config))
                .transpose()?
                .unwrap_or_default();
            let files = write_grid_outputs(&out, &estimators, &records, &reports, plots)?;
            let path = RunManifest::new("report", config, 1, started).finish(&out, &files)?;
            println!("wrote {} files, manifest {}", files.len(), path.display());
        }
        Command::Validate {
            seed,
            graphs,
            steps,
        } => {
            let mut checks = oracle_suite()?;
            checks.extend(stationarity_suite(seed, graphs, steps)?);
            let failed = checks.iter().filter(|c| !c.passed).count();
            for c in &checks {
                println!("{c}");
            }
            if failed > 0 {
                return Err(Error::ChecksFailed {
                    failed,
                    total: checks.len(),
                });
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
