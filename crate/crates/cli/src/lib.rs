//! Configuration parsing, sweeps and figure-data emission for the
//! `multicell` command.

pub mod config;
pub mod figures;
pub mod output;
pub mod run;

pub use config::{parse_config, parse_config_str, ConfigError};
pub use figures::{figure_curves, reproduce_figure, FigureId};
pub use output::{emit_results, Format, ResultTable};
pub use run::{execute, Mode, RunError, RunManifest, SweepSpec};
