//! Receding-horizon informative path planning for locating a depth contour
//! with a sparse local Gaussian-process bathymetry model.
//!
//! The pieces, bottom up: [`gp`] models depth, [`reward`] scores planned
//! samples by how much they would shrink contour ambiguity, [`vehicle`]
//! generates feasible paths, [`baselines`] supplies lawnmower paths whose
//! value lower-bounds what is still obtainable, [`planner`] searches short
//! paths with that bound as a terminal reward, and [`sim`] closes the loop
//! against a synthetic lake.

// `!(x > 0.0)` is how parameter checks reject NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod config;
pub mod geo;
pub mod gp;
pub mod output;
pub mod planner;
pub mod reward;
pub mod sim;
pub mod vehicle;

pub use geo::GeoPoint;
pub use gp::{GpError, GpHyperparams, GpModel, PriorMeanSpec};
pub use planner::{rh_execute, rh_execute_baseline, Mission, MissionOutcome, PlannerConfig};
pub use reward::RewardConfig;
pub use vehicle::{ActionSet, OperationalArea, Path, VehicleState};
