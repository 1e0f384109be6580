//! Multiple-association downlink/uplink modelling for ultra-dense small-cell
//! networks with limited backhaul.
//!
//! The crate has two halves that are meant to be compared against each
//! other: a Monte-Carlo [`simulator`] built on [`geometry`], [`association`]
//! and [`radio`], and closed-form evaluations in [`analytic`] backed by
//! [`quadrature`].

pub mod analytic;
pub mod association;
pub mod error;
pub mod geometry;
pub mod quadrature;
pub mod radio;
pub mod rng;
pub mod simulator;

pub use analytic::{predict, MtcAnalytics, Prediction, TierDensities};
pub use association::{CellActivation, LinkStatus, RbAllocation, ServingTier, TierAssociation, TierLink};
pub use error::{Error, Result};
pub use geometry::{Point, PointKind, PointSet, Window};
pub use radio::RadioParams;
pub use simulator::{
    run_backhaul_grid, run_experiment, run_realization, sweep, Estimate, LinkScope, MetricSet, ScenarioConfig,
    SweepAxis, SweepRow,
};
