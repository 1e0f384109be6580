//! Distributional checks of the point-process sampler and neighbour search.

use multicell_core::geometry::{sample_hppp, PointKind, Window};
use multicell_core::rng::{Purpose, StreamId};
use multicell_core::Point;
use rand::Rng;
use std::f64::consts::PI;

/// CDF of the distance to the k-th nearest point of a planar HPPP.
fn kth_neighbor_cdf(r: f64, density: f64, k: usize) -> f64 {
    let mean = density * PI * r * r;
    let mut term = (-mean).exp();
    let mut below = 0.0;
    for i in 0..k {
        below += term;
        term *= mean / (i + 1) as f64;
    }
    1.0 - below
}

fn ks_statistic(mut samples: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

fn neighbor_distances(density: f64, k: usize) -> Vec<f64> {
    let window = Window::unit();
    let mut out = Vec::new();
    for r in 0..50 {
        let stream = StreamId::new(11, r);
        let cells = sample_hppp(density, window, PointKind::SmallCell, &mut stream.rng(Purpose::Cells)).unwrap();
        let index = cells.index();
        let mut rng = stream.rng(Purpose::HtcUsers);
        for _ in 0..400 {
            let q = Point::new(rng.gen(), rng.gen());
            out.push(index.k_nearest(q, k).unwrap()[k - 1].distance);
        }
    }
    out
}

#[test]
fn nearest_neighbor_distance_distribution() {
    for (density, k) in [(1000.0, 1), (1000.0, 3), (5000.0, 5)] {
        let d = ks_statistic(neighbor_distances(density, k), |r| kth_neighbor_cdf(r, density, k));
        assert!(d < 0.02, "KS distance {d} for density {density}, k {k}");
    }
}

/// Upper chi-square quantile via the Wilson-Hilferty approximation.
fn chi_square_critical(df: f64, z: f64) -> f64 {
    let c = 2.0 / (9.0 * df);
    df * (1.0 - c + z * c.sqrt()).powi(3)
}

#[test]
fn point_counts_are_poisson() {
    let density = 200.0;
    let draws = 4000;
    let window = Window::unit();
    let counts: Vec<usize> = (0..draws)
        .map(|r| {
            sample_hppp(
                density,
                window,
                PointKind::HtcUser,
                &mut StreamId::new(12, r).rng(Purpose::HtcUsers),
            )
            .unwrap()
            .len()
        })
        .collect();

    let (lo, hi) = (175usize, 225usize);
    let mut pmf = vec![0.0; hi + 1];
    let mut p = (-density).exp();
    for (n, slot) in pmf.iter_mut().enumerate() {
        if n > 0 {
            p *= density / n as f64;
        }
        *slot = p;
    }
    // bins: [0, lo), lo..=hi individually, (hi, inf)
    let mut expected = vec![pmf[..lo].iter().sum::<f64>()];
    expected.extend(&pmf[lo..=hi]);
    expected.push(1.0 - pmf.iter().sum::<f64>());
    let mut observed = vec![0.0; expected.len()];
    for &c in &counts {
        let bin = if c < lo {
            0
        } else if c > hi {
            expected.len() - 1
        } else {
            c - lo + 1
        };
        observed[bin] += 1.0;
    }
    let chi2: f64 = observed
        .iter()
        .zip(&expected)
        .map(|(o, e)| (o - e * draws as f64).powi(2) / (e * draws as f64))
        .sum();
    let df = (expected.len() - 1) as f64;
    assert!(chi2 < chi_square_critical(df, 3.09), "chi2 {chi2} with {df} dof");
}

#[test]
fn points_spread_evenly_over_the_window() {
    let window = Window::new(2.0).unwrap();
    let pts = sample_hppp(
        20_000.0,
        window,
        PointKind::MtcDevice,
        &mut StreamId::new(13, 0).rng(Purpose::MtcDevices),
    )
    .unwrap();
    let mut quadrants = [0usize; 4];
    for p in &pts.points {
        quadrants[(p.x >= 1.0) as usize + 2 * (p.y >= 1.0) as usize] += 1;
    }
    let mean = pts.len() as f64 / 4.0;
    for q in quadrants {
        assert!((q as f64 - mean).abs() < 4.0 * mean.sqrt(), "{quadrants:?}");
    }
}
