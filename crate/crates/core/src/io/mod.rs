//! Configuration, serialization and table output.

pub mod config;
pub mod emit;
pub mod format;
pub mod manifest;
pub mod netfile;
pub mod runs;
pub mod sample;

pub use config::{config_echo, parse_config, parse_config_str, ConfigFile};
pub use emit::{emit_plot_data, emit_reports, write_grid_outputs, PlotData};
pub use manifest::{read_manifest, RunManifest};
pub use netfile::{read_network, write_network};
pub use runs::{read_runs, write_runs};
