//! Parameter grids of the published figures, one data file per curve.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use multicell_core::rng::derive_key;
use multicell_core::{LinkScope, ScenarioConfig, SweepAxis};

use crate::output::{emit_results, Format};
use crate::run::{run_sweep, Mode, RunError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FigureId {
    /// HTC ASE vs M for several backhaul caps.
    F5a,
    /// HTC ASE vs M for several small-cell densities at rho = 2.
    F5b,
    /// HTC ASE vs rho for several M.
    F6,
    /// HTC ASE vs small-cell density.
    F7a,
    /// HTC ASE vs user density.
    F7b,
    /// Supported MTC density vs M.
    F8a,
    /// MTC ASE vs M.
    F8b,
    /// MTC ASE vs small-cell density.
    F9a,
    /// MTC ASE vs active device density.
    F9b,
}

impl FigureId {
    pub const ALL: [FigureId; 9] = [
        FigureId::F5a,
        FigureId::F5b,
        FigureId::F6,
        FigureId::F7a,
        FigureId::F7b,
        FigureId::F8a,
        FigureId::F8b,
        FigureId::F9a,
        FigureId::F9b,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FigureId::F5a => "5a",
            FigureId::F5b => "5b",
            FigureId::F6 => "6",
            FigureId::F7a => "7a",
            FigureId::F7b => "7b",
            FigureId::F8a => "8a",
            FigureId::F8b => "8b",
            FigureId::F9a => "9a",
            FigureId::F9b => "9b",
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FigureId {
    type Err = RunError;

    fn from_str(s: &str) -> Result<Self, RunError> {
        FigureId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| RunError::UnknownFigure(s.to_string()))
    }
}

/// One line of a figure: a fixed scenario swept along one axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub label: String,
    pub config: ScenarioConfig,
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

fn label_number(v: f64) -> String {
    if v.is_infinite() {
        "inf".into()
    } else {
        format!("{v}")
    }
}

fn multicell_sizes() -> Vec<f64> {
    (1..=10).map(f64::from).collect()
}

pub fn figure_curves(id: FigureId, base: &ScenarioConfig) -> Vec<Curve> {
    let downlink = ScenarioConfig {
        links: LinkScope::Downlink,
        ..base.clone()
    };
    let uplink = ScenarioConfig {
        links: LinkScope::Uplink,
        lambda_h: 500.0,
        lambda_m: 1e6,
        eta: 0.1,
        ..base.clone()
    };
    let curve = |label: String, config: ScenarioConfig, axis, values: Vec<f64>| Curve {
        label,
        config,
        axis,
        values,
    };
    let lambda_s_grid: Vec<f64> = (1..=10).map(|i| 1000.0 * i as f64).collect();
    let htc_pairs = [
        (1usize, 2.0),
        (2, 2.0),
        (5, 2.0),
        (1, f64::INFINITY),
        (2, f64::INFINITY),
        (5, f64::INFINITY),
    ];

    let curves: Vec<Curve> = match id {
        FigureId::F5a => [2.0, 4.0, f64::INFINITY]
            .into_iter()
            .map(|rho| {
                let c = ScenarioConfig {
                    rho,
                    lambda_s: 5000.0,
                    lambda_h: 500.0,
                    ..downlink.clone()
                };
                curve(
                    format!("rho_{}", label_number(rho)),
                    c,
                    SweepAxis::MulticellSize,
                    multicell_sizes(),
                )
            })
            .collect(),
        FigureId::F5b => [2000.0, 5000.0, 10000.0]
            .into_iter()
            .map(|lambda_s| {
                let c = ScenarioConfig {
                    rho: 2.0,
                    lambda_s,
                    lambda_h: 500.0,
                    ..downlink.clone()
                };
                curve(
                    format!("lambda_s_{lambda_s}"),
                    c,
                    SweepAxis::MulticellSize,
                    multicell_sizes(),
                )
            })
            .collect(),
        FigureId::F6 => [1usize, 2, 5, 10]
            .into_iter()
            .map(|m| {
                let c = ScenarioConfig {
                    multicell_size: m,
                    lambda_s: 5000.0,
                    lambda_h: 500.0,
                    ..downlink.clone()
                };
                let rhos = (0..=22).map(|i| 1.0 + 0.5 * i as f64).collect();
                curve(format!("M_{m}"), c, SweepAxis::Rho, rhos)
            })
            .collect(),
        FigureId::F7a => htc_pairs
            .into_iter()
            .map(|(m, rho)| {
                let c = ScenarioConfig {
                    multicell_size: m,
                    rho,
                    lambda_h: 500.0,
                    ..downlink.clone()
                };
                curve(
                    format!("M_{m}_rho_{}", label_number(rho)),
                    c,
                    SweepAxis::LambdaS,
                    lambda_s_grid.clone(),
                )
            })
            .collect(),
        FigureId::F7b => htc_pairs
            .into_iter()
            .map(|(m, rho)| {
                let c = ScenarioConfig {
                    multicell_size: m,
                    rho,
                    lambda_s: 5000.0,
                    ..downlink.clone()
                };
                let grid = vec![100.0, 250.0, 500.0, 750.0, 1000.0, 1500.0, 2000.0, 2500.0];
                curve(format!("M_{m}_rho_{}", label_number(rho)), c, SweepAxis::LambdaH, grid)
            })
            .collect(),
        FigureId::F8a | FigureId::F8b => [1000.0, 5000.0, 10000.0]
            .into_iter()
            .map(|lambda_s| {
                let c = ScenarioConfig {
                    lambda_s,
                    lambda_h: lambda_s / 10.0,
                    ..uplink.clone()
                };
                curve(
                    format!("lambda_s_{lambda_s}"),
                    c,
                    SweepAxis::MulticellSize,
                    multicell_sizes(),
                )
            })
            .collect(),
        FigureId::F9a => [1usize, 2, 5, 10]
            .into_iter()
            .map(|m| {
                let c = ScenarioConfig {
                    multicell_size: m,
                    ..uplink.clone()
                };
                curve(format!("M_{m}"), c, SweepAxis::LambdaS, lambda_s_grid.clone())
            })
            .collect(),
        FigureId::F9b => [1usize, 2, 5, 10]
            .into_iter()
            .map(|m| {
                let c = ScenarioConfig {
                    multicell_size: m,
                    lambda_s: 5000.0,
                    ..uplink.clone()
                };
                let grid = vec![1e3, 2e3, 5e3, 1e4, 2e4, 5e4, 1e5, 2e5, 5e5];
                curve(format!("M_{m}"), c, SweepAxis::LambdaMActive, grid)
            })
            .collect(),
    };
    curves
        .into_iter()
        .enumerate()
        .map(|(i, mut c)| {
            c.config.master_seed = derive_key(base.master_seed, &[i as u64]);
            c
        })
        .collect()
}

fn extension(format: Format) -> &'static str {
    match format {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

/// Runs every curve of figure `id` and writes `fig<id>_<curve>.<ext>` files
/// under `out_dir`. Returns the written paths in curve order.
pub fn reproduce_figure(
    id: FigureId,
    base: &ScenarioConfig,
    mode: Mode,
    format: Format,
    out_dir: &Path,
) -> Result<Vec<PathBuf>, RunError> {
    std::fs::create_dir_all(out_dir).map_err(|source| RunError::CreateDir {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    for curve in figure_curves(id, base) {
        let table = run_sweep(&curve.config, mode, curve.axis, &curve.values)?;
        let path = out_dir.join(format!("fig{}_{}.{}", id, curve.label, extension(format)));
        emit_results(&table, format, Some(&path))?;
        written.push(path);
    }
    Ok(written)
}
