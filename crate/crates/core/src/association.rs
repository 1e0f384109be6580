//! HTC multiple association with conflict resolution, and MTC
//! nearest-active-cell association with resource-block allocation.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{NeighborIndex, Point, PointSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LinkStatus {
    Connected,
    Disconnected,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TierLink {
    pub cell: usize,
    /// Distance to the cell in km.
    pub distance: f64,
    pub status: LinkStatus,
}

/// The MultiCell of one HTC user: `links[k - 1]` is the tier-k link, i.e.
/// the k-th nearest cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TierAssociation {
    pub user: usize,
    pub links: Vec<TierLink>,
}

impl TierAssociation {
    pub fn link(&self, tier: usize) -> Option<&TierLink> {
        tier.checked_sub(1).and_then(|i| self.links.get(i))
    }

    /// Iterates `(tier, link)` with 1-based tiers.
    pub fn tiers(&self) -> impl Iterator<Item = (usize, &TierLink)> {
        self.links.iter().enumerate().map(|(i, l)| (i + 1, l))
    }

    pub fn connected_tiers(&self) -> impl Iterator<Item = (usize, &TierLink)> {
        self.tiers().filter(|(_, l)| l.status == LinkStatus::Connected)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ServingTier {
    Idle,
    Tier(usize),
}

impl ServingTier {
    pub fn tier(self) -> Option<usize> {
        match self {
            ServingTier::Idle => None,
            ServingTier::Tier(k) => Some(k),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellActivation {
    pub cell: usize,
    pub serving_tier: ServingTier,
    /// Users served at `serving_tier`, ascending.
    pub served_users: Vec<usize>,
}

impl CellActivation {
    pub fn is_active(&self) -> bool {
        self.serving_tier != ServingTier::Idle
    }
}

/// Connects every user to its `multicell_size` nearest cells.
pub fn associate_htc(users: &PointSet, cells: &PointSet, multicell_size: usize) -> Result<Vec<TierAssociation>> {
    if multicell_size == 0 {
        return Err(Error::invalid("M", "MultiCell size must be at least 1"));
    }
    if cells.len() < multicell_size {
        return Err(Error::InsufficientPoints {
            requested: multicell_size,
            available: cells.len(),
        });
    }
    let index = cells.index();
    users
        .points
        .iter()
        .enumerate()
        .map(|(user, &pos)| {
            let links = index
                .k_nearest(pos, multicell_size)?
                .into_iter()
                .map(|n| TierLink {
                    cell: n.index,
                    distance: n.distance,
                    status: LinkStatus::Connected,
                })
                .collect();
            Ok(TierAssociation { user, links })
        })
        .collect()
}

/// A cell claimed at several tier indices keeps only the lowest one; every
/// link to it at a higher tier is disconnected. Disconnected users are not
/// re-associated elsewhere.
///
/// Returns one [`CellActivation`] per cell in `0..n_cells`.
pub fn resolve_conflicts(
    mut associations: Vec<TierAssociation>,
    n_cells: usize,
) -> (Vec<TierAssociation>, Vec<CellActivation>) {
    let mut min_tier: Vec<Option<usize>> = vec![None; n_cells];
    for assoc in &associations {
        for (tier, link) in assoc.tiers() {
            let slot = &mut min_tier[link.cell];
            *slot = Some(slot.map_or(tier, |t| t.min(tier)));
        }
    }

    let mut activations: Vec<CellActivation> = min_tier
        .iter()
        .enumerate()
        .map(|(cell, t)| CellActivation {
            cell,
            serving_tier: t.map_or(ServingTier::Idle, ServingTier::Tier),
            served_users: Vec::new(),
        })
        .collect();

    for assoc in &mut associations {
        for (i, link) in assoc.links.iter_mut().enumerate() {
            let tier = i + 1;
            if min_tier[link.cell] == Some(tier) {
                activations[link.cell].served_users.push(assoc.user);
            } else {
                link.status = LinkStatus::Disconnected;
            }
        }
    }
    (associations, activations)
}

/// Number of cells serving at each tier; `counts[k - 1]` is tier k.
pub fn tier_activation_counts(activations: &[CellActivation], multicell_size: usize) -> Vec<usize> {
    let mut counts = vec![0; multicell_size];
    for a in activations {
        if let ServingTier::Tier(k) = a.serving_tier {
            if let Some(c) = counts.get_mut(k - 1) {
                *c += 1;
            }
        }
    }
    counts
}

/// Uplink resource blocks of one active cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RbAllocation {
    pub cell: usize,
    /// `assignments[rb]` is the device transmitting on that RB, if any.
    pub assignments: Vec<Option<usize>>,
    /// Devices associated to this cell that were not granted an RB.
    pub rejected: Vec<usize>,
}

impl RbAllocation {
    pub fn supported(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.assignments
            .iter()
            .enumerate()
            .filter_map(|(rb, d)| d.map(|d| (rb, d)))
    }

    pub fn supported_count(&self) -> usize {
        self.assignments.iter().filter(|d| d.is_some()).count()
    }

    pub fn associated_count(&self) -> usize {
        self.supported_count() + self.rejected.len()
    }
}

/// Associates each active device with its nearest active cell, then grants
/// at most `n_rb` of them one RB each, chosen uniformly at random.
///
/// Returns one allocation per active cell, ordered by cell index.
pub fn associate_mtc<R: Rng + ?Sized>(
    active_devices: &PointSet,
    cells: &PointSet,
    activations: &[CellActivation],
    n_rb: usize,
    rng: &mut R,
) -> Result<Vec<RbAllocation>> {
    if n_rb == 0 {
        return Err(Error::invalid("N_RB", "at least one resource block is required"));
    }
    let active: Vec<usize> = activations.iter().filter(|a| a.is_active()).map(|a| a.cell).collect();
    if active.is_empty() {
        return Err(Error::NoServingInfrastructure);
    }
    let positions: Vec<Point> = active.iter().map(|&c| cells.points[c]).collect();
    let index = NeighborIndex::new(&positions, cells.window);

    let mut members: Vec<Vec<usize>> = vec![Vec::new(); active.len()];
    for (device, &pos) in active_devices.points.iter().enumerate() {
        let nearest = index.k_nearest(pos, 1)?[0].index;
        members[nearest].push(device);
    }

    Ok(active
        .iter()
        .zip(members)
        .map(|(&cell, devices)| allocate_rbs(cell, devices, n_rb, rng))
        .collect())
}

fn allocate_rbs<R: Rng + ?Sized>(cell: usize, devices: Vec<usize>, n_rb: usize, rng: &mut R) -> RbAllocation {
    let (supported, rejected) = if devices.len() > n_rb {
        let mut keep = vec![false; devices.len()];
        for i in index::sample(rng, devices.len(), n_rb) {
            keep[i] = true;
        }
        let mut supported = Vec::with_capacity(n_rb);
        let mut rejected = Vec::with_capacity(devices.len() - n_rb);
        for (d, k) in devices.into_iter().zip(keep) {
            if k {
                supported.push(d)
            } else {
                rejected.push(d)
            }
        }
        (supported, rejected)
    } else {
        (devices, Vec::new())
    };

    let mut assignments = vec![None; n_rb];
    for (rb, device) in index::sample(rng, n_rb, supported.len()).into_iter().zip(supported) {
        assignments[rb] = Some(device);
    }
    RbAllocation {
        cell,
        assignments,
        rejected,
    }
}
