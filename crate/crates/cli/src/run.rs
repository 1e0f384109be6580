//! Turning a run manifest into a result table.

use std::path::PathBuf;
use std::str::FromStr;

use multicell_core::analytic::predict;
use multicell_core::simulator::{run_backhaul_grid, run_experiment, sweep, sweep_point};
use multicell_core::{MetricSet, Prediction, ScenarioConfig, SweepAxis};
use thiserror::Error;

use crate::config::{parse_config, ConfigError};
use crate::output::{emit_results, Format, OutputError, ResultTable};

/// n_spatial used by `--fast`.
pub const FAST_SPATIAL: usize = 50;

/// Metrics reported per row; each becomes `<name>_sim`, `<name>_se` and/or
/// `<name>_analytic` columns depending on the mode.
pub const METRICS: [&str; 4] = ["ase_htc", "ase_mtc", "lambda_m_supported", "lambda_active"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    Simulate,
    Analytic,
    Both,
}

impl Mode {
    fn simulates(self) -> bool {
        matches!(self, Mode::Simulate | Mode::Both)
    }

    fn evaluates(self) -> bool {
        matches!(self, Mode::Analytic | Mode::Both)
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] multicell_core::Error),
    #[error(transparent)]
    Output(#[from] OutputError),
    #[error("invalid sweep `{0}`: expected AXIS=v1,v2,... with AXIS one of M, rho, lambda_s, lambda_h, lambda_m_active, N_RB")]
    BadSweep(String),
    #[error("unknown figure `{0}`; valid ids: 5a, 5b, 6, 7a, 7b, 8a, 8b, 9a, 9b")]
    UnknownFigure(String),
    #[error("cannot create {path}: {source}")]
    CreateDir {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

impl FromStr for SweepSpec {
    type Err = RunError;

    fn from_str(s: &str) -> Result<Self, RunError> {
        let bad = || RunError::BadSweep(s.to_string());
        let (axis, values) = s.split_once('=').ok_or_else(bad)?;
        let axis: SweepAxis = axis.trim().parse()?;
        let values = values
            .split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>, _>>()?;
        if values.is_empty() {
            return Err(bad());
        }
        Ok(Self { axis, values })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub config_path: Option<PathBuf>,
    pub mode: Mode,
    pub sweep: Option<SweepSpec>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub seed: Option<u64>,
    pub fast: bool,
}

impl RunManifest {
    /// Scenario after applying the config file and command-line overrides.
    pub fn scenario(&self) -> Result<ScenarioConfig, RunError> {
        let base = match &self.config_path {
            Some(path) => parse_config(path)?,
            None => ScenarioConfig::default(),
        };
        Ok(apply_overrides(base, self.seed, self.fast))
    }
}

pub fn apply_overrides(mut config: ScenarioConfig, seed: Option<u64>, fast: bool) -> ScenarioConfig {
    if let Some(seed) = seed {
        config.master_seed = seed;
    }
    if fast {
        config.n_spatial = FAST_SPATIAL;
    }
    config
}

pub fn columns(mode: Mode) -> Vec<String> {
    let mut out = Vec::new();
    for metric in METRICS {
        if mode.simulates() {
            out.push(format!("{metric}_sim"));
            out.push(format!("{metric}_se"));
        }
        if mode.evaluates() {
            out.push(format!("{metric}_analytic"));
        }
    }
    out
}

fn simulated_cells(m: &MetricSet) -> [(f64, f64); 4] {
    let nan = (f64::NAN, f64::NAN);
    let pair = |e: multicell_core::Estimate| (e.mean, e.std_err);
    [
        m.htc.as_ref().map_or(nan, |h| pair(h.ase)),
        m.mtc.as_ref().map_or(nan, |x| pair(x.ase)),
        m.mtc.as_ref().map_or(nan, |x| pair(x.lambda_supported)),
        pair(m.active_density),
    ]
}

fn analytic_cells(p: &Prediction) -> [f64; 4] {
    [p.ase_htc, p.mtc.t_m, p.mtc.lambda_m_s, p.tiers.lambda_all]
}

fn row(mode: Mode, sim: Option<&MetricSet>, analytic: Option<&Prediction>) -> Vec<f64> {
    let sim = sim.map(simulated_cells);
    let analytic = analytic.map(analytic_cells);
    let mut cells = Vec::new();
    for i in 0..METRICS.len() {
        if let Some(s) = &sim {
            cells.push(s[i].0);
            cells.push(s[i].1);
        }
        if let Some(a) = &analytic {
            cells.push(a[i]);
        }
    }
    debug_assert_eq!(cells.len(), columns(mode).len());
    cells
}

/// Runs `template` swept along `axis`. Backhaul sweeps reuse one set of
/// realizations for every rho; other axes get independent seeds per point.
pub fn run_sweep(
    template: &ScenarioConfig,
    mode: Mode,
    axis: SweepAxis,
    values: &[f64],
) -> Result<ResultTable, RunError> {
    let sims: Option<Vec<MetricSet>> = if mode.simulates() {
        Some(match axis {
            SweepAxis::Rho => run_backhaul_grid(template, values)?
                .into_iter()
                .map(|(_, m)| m)
                .collect(),
            _ => sweep(template, axis, values)?.into_iter().map(|r| r.metrics).collect(),
        })
    } else {
        None
    };
    let mut table = ResultTable::new(axis.name(), columns(mode));
    for (i, &value) in values.iter().enumerate() {
        let analytic = if mode.evaluates() {
            Some(predict(&sweep_point(template, axis, value, i)?)?)
        } else {
            None
        };
        table.push(value, row(mode, sims.as_ref().map(|s| &s[i]), analytic.as_ref()));
    }
    Ok(table)
}

/// A single scenario, reported as one row keyed by its MultiCell size.
pub fn run_single(config: &ScenarioConfig, mode: Mode) -> Result<ResultTable, RunError> {
    let sim = if mode.simulates() {
        Some(run_experiment(config)?)
    } else {
        None
    };
    let analytic = if mode.evaluates() { Some(predict(config)?) } else { None };
    let mut table = ResultTable::new(SweepAxis::MulticellSize.name(), columns(mode));
    table.push(config.multicell_size as f64, row(mode, sim.as_ref(), analytic.as_ref()));
    Ok(table)
}

pub fn execute(manifest: &RunManifest) -> Result<ResultTable, RunError> {
    let config = manifest.scenario()?;
    let table = match &manifest.sweep {
        Some(spec) => run_sweep(&config, manifest.mode, spec.axis, &spec.values)?,
        None => run_single(&config, manifest.mode)?,
    };
    emit_results(&table, manifest.format, manifest.out.as_deref())?;
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_spec_parsing() {
        let s: SweepSpec = "M=1,2,3".parse().unwrap();
        assert_eq!(s.axis, SweepAxis::MulticellSize);
        assert_eq!(s.values, vec![1.0, 2.0, 3.0]);
        let r: SweepSpec = "rho=2, 4, inf".parse().unwrap();
        assert!(r.values[2].is_infinite());
        assert!(matches!("M".parse::<SweepSpec>(), Err(RunError::BadSweep(_))));
        assert!(matches!("M=a".parse::<SweepSpec>(), Err(RunError::BadSweep(_))));
        assert!(matches!("K=1".parse::<SweepSpec>(), Err(RunError::Model(_))));
    }

    #[test]
    fn both_mode_pairs_columns() {
        let c = columns(Mode::Both);
        assert_eq!(&c[..3], ["ase_htc_sim", "ase_htc_se", "ase_htc_analytic"]);
        assert_eq!(columns(Mode::Analytic).len(), 4);
        assert_eq!(columns(Mode::Simulate).len(), 8);
    }

    #[test]
    fn overrides() {
        let c = apply_overrides(ScenarioConfig::default(), Some(9), true);
        assert_eq!((c.master_seed, c.n_spatial), (9, FAST_SPATIAL));
    }

    #[test]
    fn analytic_sweep_over_m() {
        let t = run_sweep(
            &ScenarioConfig::default(),
            Mode::Analytic,
            SweepAxis::MulticellSize,
            &[1.0, 5.0],
        )
        .unwrap();
        let lambda = t.column("lambda_active_analytic").unwrap();
        assert!((lambda[1] - 1_866.727_334_806).abs() < 1e-6);
        let ase = t.column("ase_htc_analytic").unwrap();
        assert!((ase[0] - 2_990.356_136_667).abs() < 1e-4);
    }
}
