//! Rayleigh-faded SINR, per-cell rates with tier bandwidth split and
//! backhaul capping, and per-device uplink rates.

use rand::SeedableRng;
use rand_distr::{Distribution, Exp1};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, PointSet, Window};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadioParams {
    /// Path-loss exponent, > 2.
    pub alpha: f64,
    /// sigma² / P. Zero means interference-limited.
    pub noise_over_power: f64,
    /// Normalized backhaul capacity per cell (bps/Hz). `f64::INFINITY` for unlimited.
    pub rho: f64,
    pub multicell_size: usize,
    pub n_rb: usize,
    /// Cap on log2(1 + SINR) per link, keeps isolated-cell draws finite.
    pub max_spectral_efficiency: f64,
}

impl Default for RadioParams {
    fn default() -> Self {
        Self {
            alpha: 4.0,
            noise_over_power: 0.0,
            rho: f64::INFINITY,
            multicell_size: 5,
            n_rb: 10,
            max_spectral_efficiency: 30.0,
        }
    }
}

impl RadioParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 2.0 && self.alpha.is_finite()) {
            return Err(Error::invalid("alpha", format!("must exceed 2, got {}", self.alpha)));
        }
        if !(self.noise_over_power >= 0.0) {
            return Err(Error::invalid("noise_over_power", "must be non-negative"));
        }
        if !(self.rho >= 0.0) {
            return Err(Error::invalid("rho", format!("must be non-negative, got {}", self.rho)));
        }
        if self.multicell_size == 0 {
            return Err(Error::invalid("M", "must be at least 1"));
        }
        if self.n_rb == 0 {
            return Err(Error::invalid("N_RB", "must be at least 1"));
        }
        if !(self.max_spectral_efficiency > 0.0) {
            return Err(Error::invalid("max_spectral_efficiency", "must be positive"));
        }
        Ok(())
    }
}

/// `d^-alpha` from a squared distance.
#[inline]
pub fn path_gain(distance_sq: f64, alpha: f64) -> f64 {
    if alpha == 4.0 {
        1.0 / (distance_sq * distance_sq)
    } else {
        distance_sq.powf(-0.5 * alpha)
    }
}

/// One fading realization (one TTI): a unit-mean exponential power gain for
/// every `(tx, rx)` pair.
///
/// Gains are counter-based: each pair's gain is a pure function of the draw
/// key and the two indices, so nothing is stored and evaluation order is
/// irrelevant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChannelDraw {
    key: u64,
}

impl ChannelDraw {
    pub fn new(key: u64) -> Self {
        Self { key }
    }

    #[inline]
    pub fn gain(&self, tx: usize, rx: usize) -> f64 {
        debug_assert!(tx < 1 << 32 && rx < 1 << 32);
        let state = self.key ^ (((tx as u64) << 32) | rx as u64);
        let mut rng = SplitMix64::from_seed(state.to_le_bytes());
        let g: f64 = Exp1.sample(&mut rng);
        g.max(f64::MIN_POSITIVE)
    }
}

/// A transmitter as seen from one receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Link {
    pub tx: usize,
    pub path_gain: f64,
}

/// `h_s g_s / (sum_j h_j g_j + noise)`; `f64::INFINITY` when there is
/// neither interference nor noise.
#[inline]
pub fn sinr<I>(rx: usize, serving: Link, interferers: I, channel: &ChannelDraw, noise_over_power: f64) -> f64
where
    I: IntoIterator<Item = Link>,
{
    let signal = channel.gain(serving.tx, rx) * serving.path_gain;
    let interference: f64 = interferers
        .into_iter()
        .map(|l| channel.gain(l.tx, rx) * l.path_gain)
        .sum();
    let denom = interference + noise_over_power;
    if denom > 0.0 {
        signal / denom
    } else {
        f64::INFINITY
    }
}

/// Downlink SINR of `user` on the tier band whose active cells are
/// `tier_cells` (every cell whose serving tier is that band). Only cells on
/// the same band interfere.
pub fn sir_downlink(
    user: usize,
    user_pos: Point,
    serving_cell: usize,
    tier_cells: &[usize],
    cells: &PointSet,
    channel: &ChannelDraw,
    params: &RadioParams,
) -> f64 {
    let window = cells.window;
    let link_to = |c: usize| Link {
        tx: c,
        path_gain: path_gain(window.distance_sq(user_pos, cells.points[c]), params.alpha),
    };
    sinr(
        user,
        link_to(serving_cell),
        tier_cells.iter().filter(|&&c| c != serving_cell).map(|&c| link_to(c)),
        channel,
        params.noise_over_power,
    )
}

/// Capped rate of one active cell and the split among its users.
#[derive(Debug, Clone, PartialEq)]
pub struct CellRate {
    /// min(uncapped, rho), bps/Hz.
    pub rate: f64,
    pub uncapped: f64,
    pub user_shares: Vec<f64>,
}

#[inline]
pub fn spectral_efficiency(sinr: f64, max_spectral_efficiency: f64) -> f64 {
    (sinr.ln_1p() / std::f64::consts::LN_2).min(max_spectral_efficiency)
}

/// Each of the `n` users on the cell's tier band gets an equal FDMA share
/// `1 / (n M)` of the radio bandwidth; the cell aggregate is then capped by
/// the backhaul and user shares scale down proportionally.
pub fn rate_htc_cell(sinrs: &[f64], params: &RadioParams) -> CellRate {
    let n = sinrs.len();
    if n == 0 {
        return CellRate {
            rate: 0.0,
            uncapped: 0.0,
            user_shares: Vec::new(),
        };
    }
    let share = 1.0 / (n * params.multicell_size) as f64;
    let mut user_shares: Vec<f64> = sinrs
        .iter()
        .map(|&g| share * spectral_efficiency(g, params.max_spectral_efficiency))
        .collect();
    let uncapped: f64 = user_shares.iter().sum();
    let rate = uncapped.min(params.rho);
    if rate < uncapped {
        let scale = rate / uncapped;
        user_shares.iter_mut().for_each(|s| *s *= scale);
    }
    CellRate {
        rate,
        uncapped,
        user_shares,
    }
}

/// A device transmitting on some RB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UplinkTx {
    pub device: usize,
    pub position: Point,
}

/// Uplink SINR at the tagged cell. `co_rb` lists every device on the same RB
/// network-wide; the tagged device itself is skipped if present.
pub fn sir_uplink(
    tagged: UplinkTx,
    cell: usize,
    cell_pos: Point,
    co_rb: &[UplinkTx],
    window: Window,
    channel: &ChannelDraw,
    params: &RadioParams,
) -> f64 {
    let link_from = |t: &UplinkTx| Link {
        tx: t.device,
        path_gain: path_gain(window.distance_sq(t.position, cell_pos), params.alpha),
    };
    sinr(
        cell,
        link_from(&tagged),
        co_rb.iter().filter(|t| t.device != tagged.device).map(link_from),
        channel,
        params.noise_over_power,
    )
}

/// `log2(1 + sinr) / N_RB`; the uplink has no backhaul cap.
pub fn rate_mtc(sinr: f64, params: &RadioParams) -> f64 {
    spectral_efficiency(sinr, params.max_spectral_efficiency) / params.n_rb as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::PointKind;
    use approx::assert_relative_eq;

    /// Draw whose gains are all 1, by picking the fading out of the equation:
    /// evaluate SINR ratios with explicit unit-gain arithmetic instead.
    fn unit_sir(signal_d: f64, interferer_d: &[f64], alpha: f64) -> f64 {
        let s = path_gain(signal_d * signal_d, alpha);
        let i: f64 = interferer_d.iter().map(|d| path_gain(d * d, alpha)).sum();
        s / i
    }

    #[test]
    fn interferer_at_twice_distance_gives_sixteen() {
        assert_relative_eq!(unit_sir(0.1, &[0.2], 4.0), 16.0, max_relative = 1e-12);
    }

    #[test]
    fn isolated_cell_is_infinite() {
        let cells = PointSet::new(vec![Point::new(0.5, 0.5)], PointKind::SmallCell, 1.0, Window::unit());
        let g = sir_downlink(
            0,
            Point::new(0.4, 0.5),
            0,
            &[0],
            &cells,
            &ChannelDraw::new(1),
            &RadioParams::default(),
        );
        assert!(g.is_infinite());
        let noisy = RadioParams {
            noise_over_power: 1e-3,
            ..RadioParams::default()
        };
        assert!(sir_downlink(0, Point::new(0.4, 0.5), 0, &[0], &cells, &ChannelDraw::new(1), &noisy).is_finite());
    }

    #[test]
    fn downlink_sir_uses_drawn_gains() {
        let cells = PointSet::new(
            vec![Point::new(0.5, 0.5), Point::new(0.7, 0.5), Point::new(0.5, 0.9)],
            PointKind::SmallCell,
            3.0,
            Window::unit(),
        );
        let ch = ChannelDraw::new(99);
        let user = Point::new(0.4, 0.5);
        let got = sir_downlink(7, user, 0, &[0, 1], &cells, &ch, &RadioParams::default());
        // cell 2 is on another band and must not interfere
        let expected = ch.gain(0, 7) * path_gain(0.01, 4.0) / (ch.gain(1, 7) * path_gain(0.09, 4.0));
        assert_relative_eq!(got, expected, max_relative = 1e-12);
    }

    #[test]
    fn gains_are_positive_with_unit_mean() {
        let ch = ChannelDraw::new(12345);
        let n = 200_000;
        let mut sum = 0.0;
        for i in 0..n {
            let g = ch.gain(i % 1000, i / 1000);
            assert!(g > 0.0);
            sum += g;
        }
        assert!((sum / n as f64 - 1.0).abs() < 0.01);
        assert_eq!(ch.gain(3, 4), ChannelDraw::new(12345).gain(3, 4));
        assert_ne!(ch.gain(3, 4), ch.gain(4, 3));
    }

    #[test]
    fn cell_rate_examples() {
        let p = |m, rho| RadioParams {
            multicell_size: m,
            rho,
            ..RadioParams::default()
        };
        let r = rate_htc_cell(&[3.0], &p(2, f64::INFINITY));
        assert_relative_eq!(r.rate, 1.0, max_relative = 1e-12);

        let r = rate_htc_cell(&[15.0], &p(1, 2.0));
        assert_relative_eq!(r.uncapped, 4.0, max_relative = 1e-12);
        assert_eq!(r.rate, 2.0);
        assert_relative_eq!(r.user_shares[0], 2.0, max_relative = 1e-12);

        let r = rate_htc_cell(&[3.0, 3.0], &p(2, f64::INFINITY));
        assert_relative_eq!(r.rate, 1.0, max_relative = 1e-12);
        assert_relative_eq!(r.user_shares[0], 0.5, max_relative = 1e-12);
        assert_relative_eq!(r.user_shares[1], 0.5, max_relative = 1e-12);
    }

    #[test]
    fn zero_backhaul_zero_rate() {
        let r = rate_htc_cell(
            &[100.0, 5.0],
            &RadioParams {
                rho: 0.0,
                ..RadioParams::default()
            },
        );
        assert_eq!(r.rate, 0.0);
        assert!(r.user_shares.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn infinite_sinr_is_capped_by_max_spectral_efficiency() {
        let params = RadioParams {
            multicell_size: 1,
            ..RadioParams::default()
        };
        let r = rate_htc_cell(&[f64::INFINITY], &params);
        assert_relative_eq!(r.rate, 30.0, max_relative = 1e-12);
    }

    #[test]
    fn mtc_rate_examples() {
        let p = RadioParams::default();
        assert_relative_eq!(rate_mtc(1.0, &p), 0.1, max_relative = 1e-12);
        assert_eq!(rate_mtc(0.0, &p), 0.0);
        assert_relative_eq!(rate_mtc(15.0, &p), 0.4, max_relative = 1e-12);
        assert_relative_eq!(rate_mtc(f64::INFINITY, &p), 3.0, max_relative = 1e-12);
    }

    #[test]
    fn uplink_lone_device_and_two_device_geometry() {
        let w = Window::unit();
        let ch = ChannelDraw::new(5);
        let tagged = UplinkTx {
            device: 0,
            position: Point::new(0.5, 0.6),
        };
        let cell = Point::new(0.5, 0.5);
        let params = RadioParams::default();
        assert!(sir_uplink(tagged, 3, cell, &[tagged], w, &ch, &params).is_infinite());

        let other = UplinkTx {
            device: 1,
            position: Point::new(0.5, 0.3),
        };
        let got = sir_uplink(tagged, 3, cell, &[tagged, other], w, &ch, &params);
        let expected = ch.gain(0, 3) / ch.gain(1, 3) * 16.0;
        assert_relative_eq!(got, expected, max_relative = 1e-12);
    }

    proptest::proptest! {
        #[test]
        fn capping_never_exceeds_rho(
            sinrs in proptest::collection::vec(0.0f64..1e6, 1..8),
            m in 1usize..10,
            rho in 0.0f64..20.0,
        ) {
            let params = RadioParams { multicell_size: m, rho, ..RadioParams::default() };
            let capped = rate_htc_cell(&sinrs, &params);
            let free = rate_htc_cell(&sinrs, &RadioParams { rho: f64::INFINITY, ..params });
            proptest::prop_assert!(capped.rate <= rho);
            if free.rate <= rho {
                proptest::prop_assert_eq!(capped.rate, free.rate);
            }
            let shares: f64 = capped.user_shares.iter().sum();
            proptest::prop_assert!((shares - capped.rate).abs() <= 1e-9 * (1.0 + capped.rate));
        }
    }
}
