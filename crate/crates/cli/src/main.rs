use std::path::PathBuf;

use anyhow::Context;
use clap::Parser;
use multicell_cli::run::apply_overrides;
use multicell_cli::{execute, parse_config, reproduce_figure, FigureId, Format, Mode, RunManifest, SweepSpec};
use multicell_core::ScenarioConfig;

/// Simulate and evaluate multiple association in limited-backhaul ultra-dense networks.
#[derive(Debug, Parser)]
#[command(name = "multicell", version)]
struct Args {
    /// Scenario file (flat `key = value`); missing keys take the defaults.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "both")]
    mode: Mode,

    /// Sweep one parameter, e.g. `M=1,2,3` or `rho=2,4,inf`.
    #[arg(long, value_name = "AXIS=v1,v2,...", conflicts_with = "figure")]
    sweep: Option<SweepSpec>,

    /// Reproduce the data of one figure: 5a, 5b, 6, 7a, 7b, 8a, 8b, 9a or 9b.
    #[arg(long, value_name = "ID")]
    figure: Option<FigureId>,

    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,

    /// Output file (stdout if omitted); with --figure, the output directory.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "csv")]
    format: Format,

    /// Use 50 spatial realizations instead of the configured count.
    #[arg(long)]
    fast: bool,
}

fn main() -> anyhow::Result<()> {
    let args = Args::parse();
    if let Some(id) = args.figure {
        let base = match &args.config {
            Some(path) => parse_config(path)?,
            None => ScenarioConfig::default(),
        };
        let base = apply_overrides(base, args.seed, args.fast);
        let out_dir = args.out.unwrap_or_else(|| PathBuf::from("figures"));
        let written = reproduce_figure(id, &base, args.mode, args.format, &out_dir)
            .with_context(|| format!("reproducing figure {id}"))?;
        for path in written {
            eprintln!("wrote {}", path.display());
        }
        return Ok(());
    }
    let manifest = RunManifest {
        config_path: args.config,
        mode: args.mode,
        sweep: args.sweep,
        out: args.out,
        format: args.format,
        seed: args.seed,
        fast: args.fast,
    };
    execute(&manifest)?;
    Ok(())
}
