//! Monte-Carlo experiments: spatial realizations, fading draws, aggregation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::str::FromStr;

use crate::association::{
    associate_htc, associate_mtc, resolve_conflicts, tier_activation_counts, CellActivation, RbAllocation, ServingTier,
    TierAssociation,
};
use crate::error::{Error, Result};
use crate::geometry::{sample_hppp, thin, Point, PointKind, PointSet, Window};
use crate::radio::{path_gain, rate_htc_cell, rate_mtc, sir_uplink, ChannelDraw, RadioParams, UplinkTx};
use crate::rng::{Purpose, StreamId};

/// Which link directions a run simulates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinkScope {
    #[default]
    Both,
    Downlink,
    Uplink,
}

impl LinkScope {
    pub fn downlink(self) -> bool {
        matches!(self, LinkScope::Both | LinkScope::Downlink)
    }

    pub fn uplink(self) -> bool {
        matches!(self, LinkScope::Both | LinkScope::Uplink)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Small-cell density per km².
    pub lambda_s: f64,
    /// HTC user density per km².
    pub lambda_h: f64,
    /// MTC device density per km² (before activation).
    pub lambda_m: f64,
    /// Fraction of MTC devices active in a slot.
    pub eta: f64,
    #[serde(rename = "M")]
    pub multicell_size: usize,
    /// Normalized backhaul capacity, bps/Hz. `inf` for unlimited.
    pub rho: f64,
    pub alpha: f64,
    #[serde(rename = "N_RB")]
    pub n_rb: usize,
    /// Side of the square simulation window, km.
    pub window_side: f64,
    pub n_spatial: usize,
    pub n_fading: usize,
    pub master_seed: u64,
    pub noise_over_power: f64,
    pub max_spectral_efficiency: f64,
    /// Keep every downlink SIR sample (per tier) in the output.
    pub record_sir: bool,
    pub links: LinkScope,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            lambda_s: 5000.0,
            lambda_h: 500.0,
            lambda_m: 1e6,
            eta: 0.1,
            multicell_size: 5,
            rho: f64::INFINITY,
            alpha: 4.0,
            n_rb: 10,
            window_side: 1.0,
            n_spatial: 500,
            n_fading: 10,
            master_seed: 1,
            noise_over_power: 0.0,
            max_spectral_efficiency: 30.0,
            record_sir: false,
            links: LinkScope::Both,
        }
    }
}

impl ScenarioConfig {
    pub fn radio(&self) -> RadioParams {
        RadioParams {
            alpha: self.alpha,
            noise_over_power: self.noise_over_power,
            rho: self.rho,
            multicell_size: self.multicell_size,
            n_rb: self.n_rb,
            max_spectral_efficiency: self.max_spectral_efficiency,
        }
    }

    pub fn window(&self) -> Result<Window> {
        Window::new(self.window_side)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("lambda_s", self.lambda_s),
            ("lambda_h", self.lambda_h),
            ("lambda_m", self.lambda_m),
        ] {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(Error::invalid(
                    name,
                    format!("density must be finite and non-negative, got {value}"),
                ));
            }
        }
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(Error::invalid("eta", format!("must lie in [0, 1], got {}", self.eta)));
        }
        if !(self.window_side > 0.0 && self.window_side.is_finite()) {
            return Err(Error::invalid(
                "window_side",
                format!("must be positive, got {}", self.window_side),
            ));
        }
        if self.n_spatial == 0 {
            return Err(Error::invalid(
                "n_spatial",
                "at least one spatial realization is required",
            ));
        }
        if self.n_fading == 0 {
            return Err(Error::invalid("n_fading", "at least one fading draw is required"));
        }
        self.radio().validate()
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_err: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self {
            mean: value,
            std_err: 0.0,
        }
    }

    /// Summation runs in slice order, so equal inputs give equal bits.
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len();
        if n == 0 {
            return Self::default();
        }
        let mean = samples.iter().sum::<f64>() / n as f64;
        if n == 1 {
            return Self::exact(mean);
        }
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        Self {
            mean,
            std_err: (var / n as f64).sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HtcMetrics {
    /// Area spectral efficiency, bps/Hz/km².
    pub ase: Estimate,
    pub ase_per_tier: Vec<Estimate>,
    /// Downlink SIR of every connected link, per tier (only with `record_sir`).
    pub sir_samples: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MtcMetrics {
    /// Area spectral efficiency, bps/Hz/km².
    pub ase: Estimate,
    /// Supported devices per km².
    pub lambda_supported: Estimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSet {
    pub n_spatial: usize,
    /// Active cells per km² on each tier; index 0 is tier 1.
    pub tier_densities: Vec<Estimate>,
    /// Cells per km² active on any tier.
    pub active_density: Estimate,
    pub htc: Option<HtcMetrics>,
    pub mtc: Option<MtcMetrics>,
}

/// One downlink link that survived conflict resolution.
#[derive(Debug, Clone)]
struct ServedLink {
    user: usize,
    cell: usize,
    /// Position of `cell` within its tier's cell list.
    slot: usize,
}

/// Downlink geometry of one tier band, precomputed once per realization.
#[derive(Debug, Clone)]
struct TierBand {
    tier: usize,
    cells: Vec<usize>,
    links: Vec<ServedLink>,
    /// Row `l` holds the path gains from every cell in `cells` to link `l`'s user.
    path_gains: Vec<f64>,
}

/// One cell's downlink result in one fading draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellDownlink {
    pub cell: usize,
    pub tier: usize,
    /// Aggregate rate before the backhaul cap, bps/Hz.
    pub uncapped: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DownlinkDraw {
    pub cells: Vec<CellDownlink>,
    /// `sir[k - 1]` lists the SIRs of every tier-k link.
    pub sir: Vec<Vec<f64>>,
}

impl DownlinkDraw {
    /// HTC ASE contribution of each tier under backhaul cap `rho`, bps/Hz/km².
    pub fn ase_per_tier(&self, rho: f64, multicell_size: usize, area: f64) -> Vec<f64> {
        let mut per_tier = vec![0.0; multicell_size];
        for c in &self.cells {
            per_tier[c.tier - 1] += c.uncapped.min(rho);
        }
        per_tier.iter_mut().for_each(|v| *v /= area);
        per_tier
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UplinkDraw {
    /// SIR and rate of every supported device.
    pub sir: Vec<f64>,
    pub rate_sum: f64,
}

/// Everything about one spatial realization that does not depend on fading.
#[derive(Debug, Clone)]
pub struct NetworkRealization {
    pub config: ScenarioConfig,
    pub stream: StreamId,
    pub cells: PointSet,
    pub users: PointSet,
    pub associations: Vec<TierAssociation>,
    pub activations: Vec<CellActivation>,
    pub active_devices: Option<PointSet>,
    pub rb_allocations: Vec<RbAllocation>,
    bands: Vec<TierBand>,
}

impl NetworkRealization {
    pub fn sample(config: &ScenarioConfig, realization: u64) -> Result<Self> {
        config.validate()?;
        let window = config.window()?;
        let stream = StreamId::new(config.master_seed, realization);
        let cells = sample_hppp(
            config.lambda_s,
            window,
            PointKind::SmallCell,
            &mut stream.rng(Purpose::Cells),
        )?;
        let users = sample_hppp(
            config.lambda_h,
            window,
            PointKind::HtcUser,
            &mut stream.rng(Purpose::HtcUsers),
        )?;

        let associations = if users.is_empty() {
            Vec::new()
        } else {
            associate_htc(&users, &cells, config.multicell_size)?
        };
        let (associations, activations) = resolve_conflicts(associations, cells.len());

        let mut active_devices = None;
        let mut rb_allocations = Vec::new();
        if config.links.uplink() {
            let all = sample_hppp(
                config.lambda_m,
                window,
                PointKind::MtcDevice,
                &mut stream.rng(Purpose::MtcDevices),
            )?;
            let active = thin(&all, config.eta, &mut stream.rng(Purpose::MtcActivation))?;
            if activations.iter().any(CellActivation::is_active) {
                rb_allocations = associate_mtc(
                    &active,
                    &cells,
                    &activations,
                    config.n_rb,
                    &mut stream.rng(Purpose::RbAssignment),
                )?;
            }
            active_devices = Some(active);
        }

        let mut realization = Self {
            config: config.clone(),
            stream,
            cells,
            users,
            associations,
            activations,
            active_devices,
            rb_allocations,
            bands: Vec::new(),
        };
        if config.links.downlink() {
            realization.bands = realization.build_bands();
        }
        Ok(realization)
    }

    fn build_bands(&self) -> Vec<TierBand> {
        let m = self.config.multicell_size;
        let window = self.cells.window;
        let mut bands: Vec<TierBand> = (1..=m)
            .map(|tier| TierBand {
                tier,
                cells: Vec::new(),
                links: Vec::new(),
                path_gains: Vec::new(),
            })
            .collect();
        let mut slot_of = vec![usize::MAX; self.cells.len()];
        for a in &self.activations {
            if let ServingTier::Tier(k) = a.serving_tier {
                let band = &mut bands[k - 1];
                slot_of[a.cell] = band.cells.len();
                band.cells.push(a.cell);
            }
        }
        for a in &self.activations {
            if let ServingTier::Tier(k) = a.serving_tier {
                for &user in &a.served_users {
                    bands[k - 1].links.push(ServedLink {
                        user,
                        cell: a.cell,
                        slot: slot_of[a.cell],
                    });
                }
            }
        }
        for band in &mut bands {
            band.path_gains.reserve(band.links.len() * band.cells.len());
            for link in &band.links {
                let at = self.users.points[link.user];
                band.path_gains.extend(
                    band.cells
                        .iter()
                        .map(|&c| path_gain(window.distance_sq(at, self.cells.points[c]), self.config.alpha)),
                );
            }
        }
        bands
    }

    pub fn area(&self) -> f64 {
        self.cells.window.area()
    }

    /// Number of cells serving on each tier.
    pub fn tier_counts(&self) -> Vec<usize> {
        tier_activation_counts(&self.activations, self.config.multicell_size)
    }

    pub fn supported_devices(&self) -> usize {
        self.rb_allocations.iter().map(RbAllocation::supported_count).sum()
    }

    /// Downlink SIRs and uncapped cell rates for fading draw `draw`.
    pub fn downlink_draw(&self, draw: u64) -> DownlinkDraw {
        let radio = RadioParams {
            rho: f64::INFINITY,
            ..self.config.radio()
        };
        let mut cells = Vec::new();
        let mut sir = Vec::with_capacity(self.bands.len());
        for band in &self.bands {
            let channel = ChannelDraw::new(
                self.stream
                    .key(Purpose::DownlinkFading, (draw << 20) | band.tier as u64),
            );
            let n = band.cells.len();
            let band_sir: Vec<f64> = band
                .links
                .iter()
                .enumerate()
                .map(|(l, link)| {
                    let row = &band.path_gains[l * n..(l + 1) * n];
                    let mut interference = 0.0;
                    let mut signal = 0.0;
                    for (slot, (&c, &g)) in band.cells.iter().zip(row).enumerate() {
                        let received = channel.gain(c, link.user) * g;
                        if slot == link.slot {
                            signal = received;
                        } else {
                            interference += received;
                        }
                    }
                    let denom = interference + radio.noise_over_power;
                    if denom > 0.0 {
                        signal / denom
                    } else {
                        f64::INFINITY
                    }
                })
                .collect();

            // links are grouped by cell, in activation order
            let mut start = 0;
            while start < band.links.len() {
                let cell = band.links[start].cell;
                let end = start + band.links[start..].iter().take_while(|l| l.cell == cell).count();
                let rate = rate_htc_cell(&band_sir[start..end], &radio);
                cells.push(CellDownlink {
                    cell,
                    tier: band.tier,
                    uncapped: rate.uncapped,
                });
                start = end;
            }
            sir.push(band_sir);
        }
        DownlinkDraw { cells, sir }
    }

    /// Uplink SIRs of supported devices for fading draw `draw`.
    pub fn uplink_draw(&self, draw: u64) -> UplinkDraw {
        let radio = self.config.radio();
        let window = self.cells.window;
        let Some(devices) = &self.active_devices else {
            return UplinkDraw {
                sir: Vec::new(),
                rate_sum: 0.0,
            };
        };
        let channel = ChannelDraw::new(self.stream.key(Purpose::UplinkFading, draw));
        let mut per_rb: Vec<Vec<(UplinkTx, usize, Point)>> = vec![Vec::new(); self.config.n_rb];
        for alloc in &self.rb_allocations {
            let cell_pos = self.cells.points[alloc.cell];
            for (rb, device) in alloc.supported() {
                let tx = UplinkTx {
                    device,
                    position: devices.points[device],
                };
                per_rb[rb].push((tx, alloc.cell, cell_pos));
            }
        }
        let mut sir = Vec::with_capacity(self.supported_devices());
        let mut rate_sum = 0.0;
        for group in &per_rb {
            let co_rb: Vec<UplinkTx> = group.iter().map(|(tx, _, _)| *tx).collect();
            for &(tx, cell, cell_pos) in group {
                let s = sir_uplink(tx, cell, cell_pos, &co_rb, window, &channel, &radio);
                rate_sum += rate_mtc(s, &radio);
                sir.push(s);
            }
        }
        UplinkDraw { sir, rate_sum }
    }
}

/// Raw per-realization values, evaluated at several backhaul caps at once.
#[derive(Debug, Clone)]
struct RealizationRecord {
    tier_densities: Vec<f64>,
    active_density: f64,
    /// `[rho index][tier]`, fading-averaged.
    ase_per_tier: Vec<Vec<f64>>,
    sir: Option<Vec<Vec<f64>>>,
    mtc_ase: f64,
    mtc_supported: f64,
}

fn record_realization(config: &ScenarioConfig, realization: u64, rhos: &[f64]) -> Result<RealizationRecord> {
    let net = NetworkRealization::sample(config, realization)?;
    let area = net.area();
    let m = config.multicell_size;
    let counts = net.tier_counts();
    let tier_densities: Vec<f64> = counts.iter().map(|&c| c as f64 / area).collect();
    let active_density = counts.iter().sum::<usize>() as f64 / area;
    let draws = config.n_fading as f64;

    let mut ase_per_tier = vec![vec![0.0; m]; rhos.len()];
    let mut sir = config.record_sir.then(|| vec![Vec::new(); m]);
    if config.links.downlink() {
        for d in 0..config.n_fading {
            let draw = net.downlink_draw(d as u64);
            for (acc, &rho) in ase_per_tier.iter_mut().zip(rhos) {
                for (a, v) in acc.iter_mut().zip(draw.ase_per_tier(rho, m, area)) {
                    *a += v / draws;
                }
            }
            if let Some(samples) = sir.as_mut() {
                for (s, tier) in samples.iter_mut().zip(draw.sir) {
                    s.extend(tier);
                }
            }
        }
    }

    let mut mtc_ase = 0.0;
    if config.links.uplink() && !net.rb_allocations.is_empty() {
        for d in 0..config.n_fading {
            mtc_ase += net.uplink_draw(d as u64).rate_sum / area / draws;
        }
    }
    Ok(RealizationRecord {
        tier_densities,
        active_density,
        ase_per_tier,
        sir,
        mtc_ase,
        mtc_supported: net.supported_devices() as f64 / area,
    })
}

fn summarize(config: &ScenarioConfig, records: &[RealizationRecord], rho_index: usize) -> MetricSet {
    let m = config.multicell_size;
    let column = |f: &dyn Fn(&RealizationRecord) -> f64| -> Estimate {
        Estimate::from_samples(&records.iter().map(f).collect::<Vec<_>>())
    };
    let htc = config.links.downlink().then(|| HtcMetrics {
        ase: column(&|r| r.ase_per_tier[rho_index].iter().sum()),
        ase_per_tier: (0..m).map(|k| column(&|r| r.ase_per_tier[rho_index][k])).collect(),
        sir_samples: config.record_sir.then(|| {
            (0..m)
                .map(|k| {
                    records
                        .iter()
                        .flat_map(|r| r.sir.as_ref().map(|s| s[k].clone()).unwrap_or_default())
                        .collect()
                })
                .collect()
        }),
    });
    let mtc = config.links.uplink().then(|| MtcMetrics {
        ase: column(&|r| r.mtc_ase),
        lambda_supported: column(&|r| r.mtc_supported),
    });
    MetricSet {
        n_spatial: records.len(),
        tier_densities: (0..m).map(|k| column(&|r| r.tier_densities[k])).collect(),
        active_density: column(&|r| r.active_density),
        htc,
        mtc,
    }
}

fn collect_records(config: &ScenarioConfig, rhos: &[f64]) -> Result<Vec<RealizationRecord>> {
    config.validate()?;
    (0..config.n_spatial as u64)
        .into_par_iter()
        .map(|i| record_realization(config, i, rhos))
        .collect()
}

/// Metrics of a single spatial realization (standard errors are zero).
pub fn run_realization(config: &ScenarioConfig, realization: u64) -> Result<MetricSet> {
    config.validate()?;
    let record = record_realization(config, realization, &[config.rho])?;
    Ok(summarize(config, &[record], 0))
}

/// Mean and standard error over `n_spatial` realizations.
pub fn run_experiment(config: &ScenarioConfig) -> Result<MetricSet> {
    let records = collect_records(config, &[config.rho])?;
    Ok(summarize(config, &records, 0))
}

/// Like [`run_experiment`] for every backhaul cap in `rhos`, reusing the same
/// realizations and fading draws (only the cap differs between entries).
pub fn run_backhaul_grid(config: &ScenarioConfig, rhos: &[f64]) -> Result<Vec<(f64, MetricSet)>> {
    for &rho in rhos {
        if !(rho >= 0.0) {
            return Err(Error::invalid("rho", format!("must be non-negative, got {rho}")));
        }
    }
    let records = collect_records(config, rhos)?;
    Ok(rhos
        .iter()
        .enumerate()
        .map(|(i, &rho)| {
            let cfg = ScenarioConfig { rho, ..config.clone() };
            (rho, summarize(&cfg, &records, i))
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SweepAxis {
    #[serde(rename = "M")]
    MulticellSize,
    #[serde(rename = "rho")]
    Rho,
    #[serde(rename = "lambda_s")]
    LambdaS,
    #[serde(rename = "lambda_h")]
    LambdaH,
    /// Active MTC device density; sets `lambda_m = value / eta`.
    #[serde(rename = "lambda_m_active")]
    LambdaMActive,
    #[serde(rename = "N_RB")]
    NRb,
}

impl SweepAxis {
    pub const ALL: [SweepAxis; 6] = [
        SweepAxis::MulticellSize,
        SweepAxis::Rho,
        SweepAxis::LambdaS,
        SweepAxis::LambdaH,
        SweepAxis::LambdaMActive,
        SweepAxis::NRb,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::MulticellSize => "M",
            SweepAxis::Rho => "rho",
            SweepAxis::LambdaS => "lambda_s",
            SweepAxis::LambdaH => "lambda_h",
            SweepAxis::LambdaMActive => "lambda_m_active",
            SweepAxis::NRb => "N_RB",
        }
    }

    /// `template` with this axis set to `value`.
    pub fn apply(self, template: &ScenarioConfig, value: f64) -> Result<ScenarioConfig> {
        let mut config = template.clone();
        let count = |name: &'static str| -> Result<usize> {
            if value >= 1.0 && value.fract() == 0.0 && value.is_finite() {
                Ok(value as usize)
            } else {
                Err(Error::invalid(name, format!("must be a positive integer, got {value}")))
            }
        };
        match self {
            SweepAxis::MulticellSize => config.multicell_size = count("M")?,
            SweepAxis::NRb => config.n_rb = count("N_RB")?,
            SweepAxis::Rho => config.rho = value,
            SweepAxis::LambdaS => config.lambda_s = value,
            SweepAxis::LambdaH => config.lambda_h = value,
            SweepAxis::LambdaMActive => {
                if config.eta == 0.0 {
                    return Err(Error::invalid(
                        "eta",
                        "cannot set an active device density when eta is zero",
                    ));
                }
                config.lambda_m = value / config.eta;
            }
        }
        config.validate()?;
        Ok(config)
    }
}

impl std::fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SweepAxis::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::UnknownAxis(s.to_string()))
    }
}

/// Configuration of sweep point `index`: the axis value applied and a master
/// seed derived from the template's, so points are statistically independent.
pub fn sweep_point(template: &ScenarioConfig, axis: SweepAxis, value: f64, index: usize) -> Result<ScenarioConfig> {
    let mut config = axis.apply(template, value)?;
    config.master_seed = StreamId::new(template.master_seed, index as u64).key(Purpose::SweepPoint, 0);
    Ok(config)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub config: ScenarioConfig,
    pub metrics: MetricSet,
}

pub fn sweep(template: &ScenarioConfig, axis: SweepAxis, values: &[f64]) -> Result<Vec<SweepRow>> {
    values
        .iter()
        .enumerate()
        .map(|(i, &value)| {
            let config = sweep_point(template, axis, value, i)?;
            let metrics = run_experiment(&config)?;
            Ok(SweepRow { value, config, metrics })
        })
        .collect()
}
