//! Closed-form network metrics.
//!
//! Cell loads follow the Gamma-shaped Voronoi size approximation with shape
//! 3.5. Everything here is a pure function of the scenario parameters.

use crate::error::{Error, Result};
use crate::quadrature::{integrate, IntegrationSpec, TailRule};
use crate::simulator::ScenarioConfig;
use serde::Serialize;
use std::f64::consts::LN_2;

/// Shape constant of the cell-size approximation.
pub const CELL_SHAPE: f64 = 3.5;

const INNER_TOL: f64 = 1e-9;
const RATE_TOL: f64 = 1e-11;
const RATE_TRUNCATION: f64 = 1e-10;
const PMF_TAIL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TierDensities {
    pub lambda_s: f64,
    /// Activation probability on tier 1.
    pub p_1_a: f64,
    /// Active-cell density per tier, index 0 is tier 1.
    pub lambda_k_a: Vec<f64>,
    /// Density of cells active on any tier.
    pub lambda_all: f64,
}

impl TierDensities {
    /// Fraction of all cells active on `tier` (1-based).
    pub fn activation_probability(&self, tier: usize) -> f64 {
        if self.lambda_s == 0.0 {
            return 0.0;
        }
        self.lambda_k_a[tier - 1] / self.lambda_s
    }

    pub fn multicell_size(&self) -> usize {
        self.lambda_k_a.len()
    }
}

/// Probability that a cell is active on at least one of tiers `1..=k`.
pub fn cumulative_activation(lambda_s: f64, lambda_h: f64, k: usize) -> f64 {
    if k == 0 || lambda_h == 0.0 {
        return 0.0;
    }
    let ratio = k as f64 * lambda_h / lambda_s;
    -(CELL_SHAPE * (CELL_SHAPE / (CELL_SHAPE + ratio)).ln()).exp_m1()
}

fn check_density(name: &'static str, value: f64) -> Result<()> {
    if value >= 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(
            name,
            format!("must be finite and non-negative, got {value}"),
        ))
    }
}

pub fn tier_densities(lambda_s: f64, lambda_h: f64, multicell_size: usize) -> Result<TierDensities> {
    if !(lambda_s > 0.0 && lambda_s.is_finite()) {
        return Err(Error::invalid("lambda_s", format!("must be positive, got {lambda_s}")));
    }
    check_density("lambda_h", lambda_h)?;
    if multicell_size == 0 {
        return Err(Error::invalid("M", "MultiCell size must be at least 1"));
    }
    let p_1_a = cumulative_activation(lambda_s, lambda_h, 1);
    let mut lambda_k_a = Vec::with_capacity(multicell_size);
    lambda_k_a.push(p_1_a * lambda_s);
    for k in 2..=multicell_size {
        let kf = k as f64;
        let correction = (CELL_SHAPE
            * ((CELL_SHAPE * lambda_s + kf * lambda_h) / (CELL_SHAPE * lambda_s + (kf - 1.0) * lambda_h)).ln())
        .exp_m1();
        let inactive = (CELL_SHAPE / (CELL_SHAPE + kf * lambda_h / lambda_s)).powf(CELL_SHAPE);
        lambda_k_a.push(correction * inactive * lambda_s);
    }
    let lambda_all = lambda_k_a.iter().sum();
    Ok(TierDensities {
        lambda_s,
        p_1_a,
        lambda_k_a,
        lambda_all,
    })
}

/// Distribution of the number of users (or devices) in a cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoadPmf {
    /// Mean load per cell.
    pub load: f64,
    /// `values[n]` is the probability of exactly `n`.
    pub values: Vec<f64>,
}

impl LoadPmf {
    pub fn cdf(&self, n: usize) -> f64 {
        self.values.iter().take(n + 1).sum()
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().enumerate().map(|(n, v)| n as f64 * v).sum()
    }
}

fn successive_ratio(q: f64, n: usize) -> f64 {
    q * (n as f64 + CELL_SHAPE) / (n as f64 + 1.0)
}

/// Terms `0..=n_max` of the load pmf, built in log space.
pub fn load_pmf(load: f64, n_max: usize) -> Result<LoadPmf> {
    check_density("load", load)?;
    let mut values = Vec::with_capacity(n_max + 1);
    if load == 0.0 {
        values.push(1.0);
        values.resize(n_max + 1, 0.0);
        return Ok(LoadPmf { load, values });
    }
    let q = load / (load + CELL_SHAPE);
    let ln_q = q.ln();
    let mut ln_term = CELL_SHAPE * (CELL_SHAPE / (load + CELL_SHAPE)).ln();
    for n in 0..=n_max {
        values.push(ln_term.exp());
        ln_term += ln_q + ((n as f64 + CELL_SHAPE) / (n as f64 + 1.0)).ln();
    }
    Ok(LoadPmf { load, values })
}

/// Load pmf extended until the neglected tail mass is below 1e-9.
pub fn load_pmf_auto(load: f64) -> Result<LoadPmf> {
    check_density("load", load)?;
    if load == 0.0 {
        return load_pmf(0.0, 0);
    }
    let q = load / (load + CELL_SHAPE);
    let mut pmf = load_pmf(load, (4.0 * load) as usize + 16)?;
    loop {
        let n = pmf.values.len() - 1;
        let r = successive_ratio(q, n);
        // past the mode the ratios decrease, so the tail is dominated by a
        // geometric series
        if r < 1.0 && pmf.values[n] * r / (1.0 - r) < PMF_TAIL {
            return Ok(pmf);
        }
        pmf = load_pmf(load, 2 * n)?;
    }
}

/// `zeta^(2/alpha) * int_{zeta^(-2/alpha)}^inf du / (1 + u^(alpha/2))`, the
/// normalised interference term shared by the downlink and uplink CCDFs.
pub fn interference_factor(zeta: f64, alpha: f64) -> Result<f64> {
    if !(alpha > 2.0) || !alpha.is_finite() {
        return Err(Error::invalid(
            "alpha",
            format!("path-loss exponent must exceed 2, got {alpha}"),
        ));
    }
    if !(zeta >= 0.0) {
        return Err(Error::invalid(
            "zeta",
            format!("threshold must be non-negative, got {zeta}"),
        ));
    }
    if zeta == 0.0 {
        return Ok(0.0);
    }
    if zeta.is_infinite() {
        return Ok(f64::INFINITY);
    }
    if alpha == 4.0 {
        let s = zeta.sqrt();
        return Ok(s * s.atan());
    }
    let half = alpha / 2.0;
    let lower = zeta.powf(-2.0 / alpha);
    let body = |u: f64| 1.0 / (1.0 + u.powf(half));
    let mut inner = 0.0;
    if lower < 1.0 {
        inner += integrate(body, &IntegrationSpec::finite(lower, 1.0, 0.5 * INNER_TOL))?.value;
    }
    // with u = e^y the tail decays like e^{-(alpha/2 - 1) y}
    let tail_threshold = 1e-3 * INNER_TOL * (half - 1.0);
    inner += integrate(
        |y: f64| y.exp() * body(y.exp()),
        &IntegrationSpec::semi_infinite(
            lower.max(1.0).ln(),
            TailRule::MonotoneTruncation {
                threshold: tail_threshold,
            },
            0.5 * INNER_TOL,
        ),
    )?
    .value;
    Ok(zeta.powf(2.0 / alpha) * inner)
}

fn check_probability(name: &'static str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must lie in [0, 1], got {p}")))
    }
}

/// Probability that a tier-`tier` downlink SIR exceeds `zeta` when a fraction
/// `activation` of cells is active on that tier.
pub fn sir_ccdf_htc(zeta: f64, tier: usize, activation: f64, alpha: f64) -> Result<f64> {
    if tier == 0 {
        return Err(Error::invalid("tier", "tiers are numbered from 1"));
    }
    check_probability("activation", activation)?;
    let factor = interference_factor(zeta, alpha)?;
    Ok((1.0 + activation * factor).powi(-(tier as i32)))
}

/// Probability that an uplink SIR exceeds `zeta` with `rb_load` co-channel
/// devices per active cell (mean supported devices over RBs).
pub fn sir_ccdf_mtc(zeta: f64, rb_load: f64, alpha: f64) -> Result<f64> {
    check_density("rb_load", rb_load)?;
    Ok(1.0 / (1.0 + rb_load * interference_factor(zeta, alpha)?))
}

fn rate_integral<F: Fn(f64) -> f64>(ccdf: F, rho: f64) -> Result<f64> {
    let spec = if rho.is_finite() {
        IntegrationSpec::finite(0.0, rho, RATE_TOL)
    } else {
        IntegrationSpec::semi_infinite(
            0.0,
            TailRule::MonotoneTruncation {
                threshold: RATE_TRUNCATION,
            },
            RATE_TOL,
        )
    };
    Ok(integrate(ccdf, &spec)?.value)
}

/// Mean rate (bps/Hz) of a tier-`tier` cell after the backhaul cap `rho`.
pub fn mean_rate_tier(tier: usize, activation: f64, multicell_size: usize, alpha: f64, rho: f64) -> Result<f64> {
    if !(rho >= 0.0) {
        return Err(Error::invalid(
            "rho",
            format!("backhaul capacity must be non-negative, got {rho}"),
        ));
    }
    if multicell_size == 0 {
        return Err(Error::invalid("M", "MultiCell size must be at least 1"));
    }
    // validates the remaining arguments
    sir_ccdf_htc(1.0, tier, activation, alpha)?;
    if rho == 0.0 {
        return Ok(0.0);
    }
    if rho.is_infinite() && activation == 0.0 {
        return Err(Error::UnboundedRate);
    }
    let m = multicell_size as f64;
    rate_integral(
        |t| {
            let zeta = (m * t * LN_2).exp_m1();
            let factor = interference_factor(zeta, alpha).unwrap_or(f64::INFINITY);
            (1.0 + activation * factor).powi(-(tier as i32))
        },
        rho,
    )
}

/// Per-tier contributions to the HTC area spectral efficiency.
pub fn ase_htc_per_tier(lambda_s: f64, lambda_h: f64, multicell_size: usize, alpha: f64, rho: f64) -> Result<Vec<f64>> {
    let tiers = tier_densities(lambda_s, lambda_h, multicell_size)?;
    (1..=multicell_size)
        .map(|k| {
            let density = tiers.lambda_k_a[k - 1];
            if density == 0.0 {
                return Ok(0.0);
            }
            let rate = mean_rate_tier(k, tiers.activation_probability(k), multicell_size, alpha, rho)?;
            Ok(density * rate)
        })
        .collect()
}

/// HTC area spectral efficiency in bps/Hz/km².
pub fn ase_htc(lambda_s: f64, lambda_h: f64, multicell_size: usize, alpha: f64, rho: f64) -> Result<f64> {
    Ok(ase_htc_per_tier(lambda_s, lambda_h, multicell_size, alpha, rho)?
        .iter()
        .sum())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MtcAnalytics {
    /// Mean active devices per active cell.
    pub load: f64,
    /// Density of active cells (any tier).
    pub lambda_all: f64,
    /// Mean supported devices per active cell.
    pub j: f64,
    pub lambda_m_s: f64,
    /// Mean rate per supported device. `None` when no device shares an RB,
    /// which leaves the interference-free rate unbounded.
    pub r_m_bar: Option<f64>,
    pub t_m: f64,
}

/// Mean of `min(N, n_rb)` under the load pmf.
pub fn mean_supported(load: f64, n_rb: usize) -> Result<f64> {
    if n_rb == 0 {
        return Err(Error::invalid("N_RB", "at least one resource block is required"));
    }
    let pmf = load_pmf(load, n_rb - 1)?;
    let mut cdf = 0.0;
    let mut j = n_rb as f64;
    for v in &pmf.values {
        cdf += v;
        j -= cdf;
    }
    Ok(j.clamp(0.0, n_rb as f64))
}

/// Mean per-device uplink rate with `j` supported devices spread over `n_rb` RBs.
pub fn mean_rate_mtc(j: f64, n_rb: usize, alpha: f64) -> Result<Option<f64>> {
    check_density("J", j)?;
    if n_rb == 0 {
        return Err(Error::invalid("N_RB", "at least one resource block is required"));
    }
    interference_factor(1.0, alpha)?;
    if j == 0.0 {
        return Ok(None);
    }
    let rb_load = j / n_rb as f64;
    let integral = rate_integral(
        |t| {
            let zeta = (t * LN_2).exp_m1();
            1.0 / (1.0 + rb_load * interference_factor(zeta, alpha).unwrap_or(f64::INFINITY))
        },
        f64::INFINITY,
    )?;
    Ok(Some(integral / n_rb as f64))
}

pub fn mtc_analytics(
    lambda_s: f64,
    lambda_h: f64,
    lambda_m: f64,
    eta: f64,
    multicell_size: usize,
    n_rb: usize,
    alpha: f64,
) -> Result<MtcAnalytics> {
    check_density("lambda_m", lambda_m)?;
    check_probability("eta", eta)?;
    let tiers = tier_densities(lambda_s, lambda_h, multicell_size)?;
    let lambda_all = tiers.lambda_all;
    let load = if lambda_all > 0.0 {
        eta * lambda_m / lambda_all
    } else {
        0.0
    };
    let j = if lambda_all > 0.0 {
        mean_supported(load, n_rb)?
    } else {
        0.0
    };
    let r_m_bar = mean_rate_mtc(j, n_rb, alpha)?;
    let lambda_m_s = j * lambda_all;
    Ok(MtcAnalytics {
        load,
        lambda_all,
        j,
        lambda_m_s,
        r_m_bar,
        t_m: r_m_bar.map_or(0.0, |r| lambda_m_s * r),
    })
}

/// Analytic counterparts of the simulated metrics for one scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prediction {
    pub tiers: TierDensities,
    pub ase_htc: f64,
    pub ase_htc_per_tier: Vec<f64>,
    pub mtc: MtcAnalytics,
}

pub fn predict(config: &ScenarioConfig) -> Result<Prediction> {
    config.validate()?;
    let tiers = tier_densities(config.lambda_s, config.lambda_h, config.multicell_size)?;
    let per_tier = ase_htc_per_tier(
        config.lambda_s,
        config.lambda_h,
        config.multicell_size,
        config.alpha,
        config.rho,
    )?;
    let mtc = mtc_analytics(
        config.lambda_s,
        config.lambda_h,
        config.lambda_m,
        config.eta,
        config.multicell_size,
        config.n_rb,
        config.alpha,
    )?;
    Ok(Prediction {
        tiers,
        ase_htc: per_tier.iter().sum(),
        ase_htc_per_tier: per_tier,
        mtc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::PI;

    // Reference values below were evaluated independently at 30 significant
    // digits with mpmath.

    #[test]
    fn tier_densities_reference() {
        let t = tier_densities(5000.0, 500.0, 5).unwrap();
        assert_relative_eq!(t.p_1_a, 0.093_893_173_081_004_094_4, max_relative = 1e-12);
        assert_relative_eq!(t.lambda_k_a[0], 469.465_865_405_020_472, max_relative = 1e-12);
        assert_relative_eq!(t.lambda_k_a[1], 414.280_517_711_092_893, max_relative = 1e-12);
        assert_relative_eq!(t.lambda_all, 1_866.727_334_806_001_23, max_relative = 1e-12);
        let ten = tier_densities(5000.0, 500.0, 10).unwrap();
        assert_relative_eq!(ten.lambda_all, 2_925.256_745_095_668_56, max_relative = 1e-12);
    }

    #[test]
    fn tier_density_telescoping() {
        for m in 1..=10 {
            let t = tier_densities(5000.0, 500.0, m).unwrap();
            let cumulative = cumulative_activation(5000.0, 500.0, m) * 5000.0;
            assert_relative_eq!(t.lambda_all, cumulative, max_relative = 1e-12);
            if m >= 2 {
                let step =
                    (cumulative_activation(5000.0, 500.0, m) - cumulative_activation(5000.0, 500.0, m - 1)) * 5000.0;
                assert_relative_eq!(t.lambda_k_a[m - 1], step, max_relative = 1e-10);
            }
            assert_eq!(t.lambda_all, t.lambda_k_a.iter().sum::<f64>());
        }
    }

    #[test]
    fn no_users_no_activation() {
        let t = tier_densities(5000.0, 0.0, 4).unwrap();
        assert_eq!(t.p_1_a, 0.0);
        assert!(t.lambda_k_a.iter().all(|&d| d == 0.0));
        assert_eq!(t.lambda_all, 0.0);
        assert_eq!(ase_htc(5000.0, 0.0, 4, 4.0, f64::INFINITY).unwrap(), 0.0);
    }

    #[test]
    fn tier_density_rejects_bad_input() {
        assert!(tier_densities(0.0, 1.0, 1).is_err());
        assert!(tier_densities(1.0, -1.0, 1).is_err());
        assert!(tier_densities(1.0, 1.0, 0).is_err());
    }

    #[test]
    fn pmf_reference_values() {
        let p = load_pmf(1.0, 0).unwrap();
        assert_relative_eq!(p.values[0], 0.414_948_650_980_866_288, max_relative = 1e-13);
        let p = load_pmf(50.0, 3).unwrap();
        assert_relative_eq!(p.values[3], 0.000_843_996_376_973_879_780, max_relative = 1e-12);
    }

    #[test]
    fn pmf_zero_load() {
        let p = load_pmf(0.0, 4).unwrap();
        assert_eq!(p.values, vec![1.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(load_pmf_auto(0.0).unwrap().values, vec![1.0]);
    }

    #[test]
    fn pmf_normalisation_and_mean() {
        for load in [0.1, 1.0, 50.0] {
            let p = load_pmf_auto(load).unwrap();
            assert_abs_diff_eq!(p.total(), 1.0, epsilon = 1e-9);
            assert_abs_diff_eq!(p.mean(), load, epsilon = 1e-6);
        }
    }

    #[test]
    fn pmf_survives_large_loads() {
        let p = load_pmf_auto(5000.0).unwrap();
        assert!(p.values.iter().all(|v| v.is_finite()));
        assert_abs_diff_eq!(p.total(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn interference_factor_reference() {
        assert_abs_diff_eq!(
            interference_factor(1.0, 3.0).unwrap(),
            1.671_297_696_529_442_09,
            epsilon = 1e-8
        );
        assert_abs_diff_eq!(
            interference_factor(10.0, 3.0).unwrap(),
            10.262_883_117_519_118_3,
            epsilon = 1e-7
        );
        assert_abs_diff_eq!(
            interference_factor(0.5, 6.0).unwrap(),
            0.211_528_920_395_134_307,
            epsilon = 1e-8
        );
        assert_abs_diff_eq!(interference_factor(1.0, 4.0).unwrap(), PI / 4.0, epsilon = 1e-15);
        // the closed form agrees with quadrature at nearby exponents
        let near = interference_factor(2.0, 4.0 + 1e-9).unwrap();
        assert_abs_diff_eq!(near, interference_factor(2.0, 4.0).unwrap(), epsilon = 1e-7);
    }

    #[test]
    fn classic_nearest_cell_coverage() {
        let c = sir_ccdf_htc(1.0, 1, 1.0, 4.0).unwrap();
        assert_abs_diff_eq!(c, 1.0 / (1.0 + PI / 4.0), epsilon = 1e-12);
        assert_abs_diff_eq!(c, 0.560_099_153_511_557_376, epsilon = 1e-12);
    }

    #[test]
    fn ccdf_reference_and_limits() {
        let t = tier_densities(5000.0, 500.0, 5).unwrap();
        let c = sir_ccdf_htc(10.0, 3, t.activation_probability(3), 4.0).unwrap();
        assert_abs_diff_eq!(c, 0.462_206_423_331_174_089, epsilon = 1e-12);
        assert_abs_diff_eq!(sir_ccdf_htc(1e-12, 2, 0.5, 4.0).unwrap(), 1.0, epsilon = 1e-6);
        assert!(sir_ccdf_htc(1.0, 0, 0.5, 4.0).is_err());
        assert!(sir_ccdf_htc(1.0, 1, 1.5, 4.0).is_err());
        assert!(sir_ccdf_htc(1.0, 1, 0.5, 2.0).is_err());
    }

    #[test]
    fn rate_reference_values() {
        assert_relative_eq!(
            mean_rate_tier(1, 1.0, 1, 4.0, f64::INFINITY).unwrap(),
            2.148_155_062_050_429_48,
            max_relative = 1e-8
        );
        assert_relative_eq!(
            mean_rate_tier(1, 1.0, 1, 4.0, 2.0).unwrap(),
            1.194_118_206_991_605_11,
            max_relative = 1e-9
        );
        assert_eq!(mean_rate_tier(1, 0.3, 2, 4.0, 0.0).unwrap(), 0.0);
        assert_eq!(mean_rate_tier(1, 0.0, 2, 4.0, f64::INFINITY), Err(Error::UnboundedRate));
        // an idle network still has a finite capped rate
        assert_relative_eq!(mean_rate_tier(1, 0.0, 2, 4.0, 3.0).unwrap(), 3.0, max_relative = 1e-12);
    }

    #[test]
    fn ase_reference_values() {
        let cases = [
            (5, 2.0, 1_526.551_281_003_774_86),
            (1, f64::INFINITY, 2_990.356_136_667_163_89),
            (2, 4.0, 2_104.739_335_424_075_61),
            (10, f64::INFINITY, 1_067.641_131_518_606_00),
        ];
        for (m, rho, expected) in cases {
            let ase = ase_htc(5000.0, 500.0, m, 4.0, rho).unwrap();
            assert_relative_eq!(ase, expected, max_relative = 1e-8);
        }
    }

    #[test]
    fn optimum_multicell_size() {
        let at = |rho: f64| -> Vec<f64> { (1..=10).map(|m| ase_htc(5000.0, 500.0, m, 4.0, rho).unwrap()).collect() };
        let capped = at(2.0);
        let best = capped[1..9].iter().cloned().fold(f64::MIN, f64::max);
        assert!(best > capped[0] && best > capped[9]);
        let free = at(f64::INFINITY);
        assert!(free[1..].iter().all(|&v| v < free[0]));
    }

    #[test]
    fn mtc_reference_values() {
        let a = mtc_analytics(5000.0, 500.0, 1e6, 0.1, 5, 10, 4.0).unwrap();
        assert_relative_eq!(a.load, 53.569_687_514_321_663_6, max_relative = 1e-12);
        assert_relative_eq!(a.j, 9.951_207_314_168_762_00, max_relative = 1e-12);
        assert_relative_eq!(a.lambda_m_s, a.j * a.lambda_all, max_relative = 1e-15);
        assert_relative_eq!(a.r_m_bar.unwrap(), 0.215_406_614_679_620_070, max_relative = 1e-8);
        assert_relative_eq!(a.t_m, 4_001.434_353_984_416_08, max_relative = 1e-8);
        assert!((a.j - 10.0).abs() < 0.2);
    }

    #[test]
    fn mean_supported_reference_values() {
        assert_relative_eq!(
            mean_supported(2.0, 10).unwrap(),
            1.998_360_218_071_294_92,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            mean_supported(0.5, 1).unwrap(),
            0.373_345_466_961_200_246,
            max_relative = 1e-12
        );
        assert!(mean_supported(1.0, 0).is_err());
    }

    #[test]
    fn many_rbs_recover_the_mean_load() {
        for load in [0.5, 3.0, 20.0] {
            let j = mean_supported(load, 2000).unwrap();
            assert_abs_diff_eq!(j, load_pmf_auto(load).unwrap().mean(), epsilon = 1e-8);
            assert_abs_diff_eq!(j, load, epsilon = 1e-6);
        }
    }

    #[test]
    fn inactive_devices() {
        let a = mtc_analytics(5000.0, 500.0, 1e6, 0.0, 5, 10, 4.0).unwrap();
        assert_eq!(a.j, 0.0);
        assert_eq!(a.lambda_m_s, 0.0);
        assert_eq!(a.t_m, 0.0);
        assert_eq!(a.r_m_bar, None);
        let idle = mtc_analytics(5000.0, 0.0, 1e6, 0.1, 5, 10, 4.0).unwrap();
        assert_eq!(idle.lambda_m_s, 0.0);
    }

    #[test]
    fn mtc_grows_with_multicell_size() {
        let mut prev = (0.0, 0.0);
        for m in 1..=10 {
            let a = mtc_analytics(5000.0, 500.0, 1e6, 0.1, m, 10, 4.0).unwrap();
            assert!(a.lambda_m_s > prev.0 && a.t_m > prev.1, "M={m}");
            prev = (a.lambda_m_s, a.t_m);
        }
    }

    proptest::proptest! {
        #[test]
        fn ccdf_monotone(z1 in 1e-3f64..100.0, dz in 0.0f64..100.0, k in 1usize..8, p in 0.0f64..1.0, alpha in 2.5f64..6.0) {
            let lo = sir_ccdf_htc(z1, k, p, alpha).unwrap();
            proptest::prop_assert!(sir_ccdf_htc(z1 + dz, k, p, alpha).unwrap() <= lo + 1e-12);
            proptest::prop_assert!(sir_ccdf_htc(z1, k + 1, p, alpha).unwrap() <= lo + 1e-12);
            proptest::prop_assert!((0.0..=1.0).contains(&lo));
        }

        #[test]
        fn rate_monotone_and_capped(rho in 0.01f64..15.0, drho in 0.0f64..5.0, k in 1usize..6, p in 0.01f64..1.0, m in 1usize..6) {
            let lo = mean_rate_tier(k, p, m, 4.0, rho).unwrap();
            let hi = mean_rate_tier(k, p, m, 4.0, rho + drho).unwrap();
            let free = mean_rate_tier(k, p, m, 4.0, f64::INFINITY).unwrap();
            proptest::prop_assert!(hi >= lo - 1e-12);
            proptest::prop_assert!(lo <= rho.min(free) + 1e-9);
        }

        #[test]
        fn supported_bounded_and_monotone(load in 0.0f64..200.0, n_rb in 1usize..40) {
            let j = mean_supported(load, n_rb).unwrap();
            let next = mean_supported(load, n_rb + 1).unwrap();
            proptest::prop_assert!((0.0..=n_rb as f64).contains(&j));
            proptest::prop_assert!(j <= load + 1e-9);
            proptest::prop_assert!(next >= j);
        }

        #[test]
        fn supported_density_grows_with_m(ratio in 2.0f64..20.0, lambda_m in 1e4f64..1e7, n_rb in 1usize..20, m in 1usize..10) {
            let lambda_h = 5000.0 / ratio;
            let a = mtc_analytics(5000.0, lambda_h, lambda_m, 0.1, m, n_rb, 4.0).unwrap();
            let b = mtc_analytics(5000.0, lambda_h, lambda_m, 0.1, m + 1, n_rb, 4.0).unwrap();
            proptest::prop_assert!(b.lambda_m_s >= a.lambda_m_s * (1.0 - 1e-12));
        }
    }

    #[test]
    fn rate_continuous_at_truncation() {
        let free = mean_rate_tier(2, 0.1, 3, 4.0, f64::INFINITY).unwrap();
        let capped = mean_rate_tier(2, 0.1, 3, 4.0, 200.0).unwrap();
        assert_abs_diff_eq!(free, capped, epsilon = 1e-8);
    }
}
