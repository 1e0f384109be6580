//! Poisson point processes on a square torus and nearest-neighbour queries.
//!
//! The simulation window is treated as a torus: distances wrap around both
//! axes, so a finite window carries no edge bias.

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// Square window `[0, side) x [0, side)` in km, with wrap-around metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    side: f64,
}

impl Window {
    pub fn new(side: f64) -> Result<Self> {
        if !(side.is_finite() && side > 0.0) {
            return Err(Error::invalid("window_side", format!("must be positive, got {side}")));
        }
        Ok(Self { side })
    }

    pub fn unit() -> Self {
        Self { side: 1.0 }
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn area(&self) -> f64 {
        self.side * self.side
    }

    pub fn contains(&self, p: Point) -> bool {
        (0.0..self.side).contains(&p.x) && (0.0..self.side).contains(&p.y)
    }

    #[inline]
    fn wrap_delta(&self, d: f64) -> f64 {
        let d = d.abs();
        d.min(self.side - d)
    }

    /// Squared toroidal distance.
    #[inline]
    pub fn distance_sq(&self, a: Point, b: Point) -> f64 {
        let dx = self.wrap_delta(a.x - b.x);
        let dy = self.wrap_delta(a.y - b.y);
        dx * dx + dy * dy
    }

    #[inline]
    pub fn distance(&self, a: Point, b: Point) -> f64 {
        self.distance_sq(a, b).sqrt()
    }

    /// Same window scaled by `factor`, used for scale-invariance checks.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.side * factor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PointKind {
    SmallCell,
    HtcUser,
    MtcDevice,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    pub points: Vec<Point>,
    pub kind: PointKind,
    /// Intensity (points per km²) of the process this set was drawn from.
    pub density: f64,
    pub window: Window,
}

impl PointSet {
    pub fn new(points: Vec<Point>, kind: PointKind, density: f64, window: Window) -> Self {
        Self {
            points,
            kind,
            density,
            window,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn index(&self) -> NeighborIndex {
        NeighborIndex::new(&self.points, self.window)
    }
}

/// Draws a homogeneous Poisson point process of the given intensity.
pub fn sample_hppp<R: Rng + ?Sized>(density: f64, window: Window, kind: PointKind, rng: &mut R) -> Result<PointSet> {
    if !(density.is_finite() && density >= 0.0) {
        return Err(Error::invalid(
            "density",
            format!("must be non-negative, got {density}"),
        ));
    }
    let mean = density * window.area();
    let count = if mean > 0.0 {
        let poisson = Poisson::new(mean).map_err(|e| Error::invalid("density", e.to_string()))?;
        poisson.sample(rng) as usize
    } else {
        0
    };
    let side = window.side();
    let points = (0..count)
        .map(|_| Point::new(rng.gen::<f64>() * side, rng.gen::<f64>() * side))
        .collect();
    Ok(PointSet::new(points, kind, density, window))
}

/// Independent thinning: each point survives with `keep_probability`.
pub fn thin<R: Rng + ?Sized>(points: &PointSet, keep_probability: f64, rng: &mut R) -> Result<PointSet> {
    if !(0.0..=1.0).contains(&keep_probability) {
        return Err(Error::invalid(
            "keep_probability",
            format!("must lie in [0, 1], got {keep_probability}"),
        ));
    }
    let kept = if keep_probability == 1.0 {
        points.points.clone()
    } else if keep_probability == 0.0 {
        Vec::new()
    } else {
        points
            .points
            .iter()
            .copied()
            .filter(|_| rng.gen::<f64>() < keep_probability)
            .collect()
    };
    Ok(PointSet::new(
        kept,
        points.kind,
        points.density * keep_probability,
        points.window,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub index: usize,
    /// Toroidal distance in km.
    pub distance: f64,
}

/// Uniform bucket grid over the torus for k-nearest queries.
///
/// Results are exact: ordered by distance, ties broken by lower point index.
#[derive(Debug, Clone)]
pub struct NeighborIndex {
    window: Window,
    bins_per_axis: usize,
    bin_width: f64,
    bin_start: Vec<u32>,
    slots: Vec<(u32, Point)>,
}

const TARGET_PER_BIN: f64 = 2.0;

impl NeighborIndex {
    pub fn new(points: &[Point], window: Window) -> Self {
        let n = points.len();
        let bins_per_axis = ((n as f64 / TARGET_PER_BIN).sqrt().floor() as usize).max(1);
        let bin_width = window.side() / bins_per_axis as f64;
        let n_bins = bins_per_axis * bins_per_axis;

        let bin_of = |p: &Point| {
            let bx = ((p.x / bin_width) as usize).min(bins_per_axis - 1);
            let by = ((p.y / bin_width) as usize).min(bins_per_axis - 1);
            by * bins_per_axis + bx
        };

        let mut bin_start = vec![0u32; n_bins + 1];
        for p in points {
            bin_start[bin_of(p) + 1] += 1;
        }
        for b in 0..n_bins {
            bin_start[b + 1] += bin_start[b];
        }
        let mut cursor = bin_start.clone();
        let mut slots = vec![(0u32, Point::default()); n];
        for (i, p) in points.iter().enumerate() {
            let b = bin_of(p);
            slots[cursor[b] as usize] = (i as u32, *p);
            cursor[b] += 1;
        }

        Self {
            window,
            bins_per_axis,
            bin_width,
            bin_start,
            slots,
        }
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn k_nearest(&self, query: Point, k: usize) -> Result<Vec<Neighbor>> {
        if k > self.len() {
            return Err(Error::InsufficientPoints {
                requested: k,
                available: self.len(),
            });
        }
        if k == 0 {
            return Ok(Vec::new());
        }
        let mut best = Candidates::with_capacity(k);
        let g = self.bins_per_axis as isize;
        let qx = ((query.x / self.bin_width) as isize).clamp(0, g - 1);
        let qy = ((query.y / self.bin_width) as isize).clamp(0, g - 1);

        let mut ring: isize = 0;
        loop {
            if 2 * ring + 1 >= g {
                // Ring would wrap onto itself: finish with a full scan.
                best.clear();
                for &(i, p) in &self.slots {
                    best.offer(self.window.distance_sq(query, p), i as usize);
                }
                break;
            }
            for dy in -ring..=ring {
                let step = if dy.abs() == ring { 1 } else { 2 * ring.max(1) };
                let mut dx = -ring;
                while dx <= ring {
                    let bx = (qx + dx).rem_euclid(g) as usize;
                    let by = (qy + dy).rem_euclid(g) as usize;
                    let b = by * self.bins_per_axis + bx;
                    let range = self.bin_start[b] as usize..self.bin_start[b + 1] as usize;
                    for &(i, p) in &self.slots[range] {
                        best.offer(self.window.distance_sq(query, p), i as usize);
                    }
                    dx += step;
                }
            }
            // Anything outside rings 0..=ring is at least ring * width away.
            let reach = ring as f64 * self.bin_width;
            if best.is_full() && best.worst() < reach * reach {
                break;
            }
            ring += 1;
        }
        Ok(best.into_neighbors())
    }
}

/// Sorted bounded list of `(distance², index)`.
struct Candidates {
    k: usize,
    items: Vec<(f64, usize)>,
}

impl Candidates {
    fn with_capacity(k: usize) -> Self {
        Self {
            k,
            items: Vec::with_capacity(k + 1),
        }
    }

    fn clear(&mut self) {
        self.items.clear();
    }

    fn is_full(&self) -> bool {
        self.items.len() == self.k
    }

    fn worst(&self) -> f64 {
        self.items.last().map_or(f64::INFINITY, |c| c.0)
    }

    #[inline]
    fn offer(&mut self, d2: f64, index: usize) {
        let key = (d2, index);
        if self.is_full() {
            let last = self.items[self.k - 1];
            if (key.0, key.1) >= (last.0, last.1) {
                return;
            }
        }
        let pos = self.items.partition_point(|c| (c.0, c.1) < (key.0, key.1));
        self.items.insert(pos, key);
        self.items.truncate(self.k);
    }

    fn into_neighbors(self) -> Vec<Neighbor> {
        self.items
            .into_iter()
            .map(|(d2, index)| Neighbor {
                index,
                distance: d2.sqrt(),
            })
            .collect()
    }
}

/// One-off k-nearest query. Builds an index per call; reuse
/// [`PointSet::index`] for repeated queries.
pub fn k_nearest(query: Point, targets: &PointSet, k: usize) -> Result<Vec<Neighbor>> {
    targets.index().k_nearest(query, k)
}
