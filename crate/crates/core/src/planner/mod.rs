//! Terminal-reward Monte Carlo tree search and the receding-horizon loop
//! around it.

mod mcts;
mod receding;

pub use mcts::{
    plan_epoch, plan_epoch_traced, uct_score, Arm, IncumbentSource, MctsNode, MctsTree, PlanResult, Planner,
    SearchTrace,
};
pub use receding::{
    rh_execute, rh_execute_baseline, EpochRecord, Mission, MissionError, MissionLog, MissionOutcome, MissionSummary,
    SampleRecord, StepRecord, GUARANTEE_TOLERANCE,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gp::GpError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlanError {
    #[error(transparent)]
    Model(#[from] GpError),
    #[error("planner: {0}")]
    InvalidConfig(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlannerConfig {
    /// Steps per planned path (n).
    pub planning_horizon: usize,
    /// Steps executed before replanning (m).
    pub execution_horizon: usize,
    /// Total mission steps (l).
    pub mission_length: usize,
    /// UCT exploration constant.
    pub exploration: f64,
    /// Tree-search iterations per planning epoch.
    pub iterations: usize,
    pub seed: u64,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            planning_horizon: 5,
            execution_horizon: 1,
            mission_length: 100,
            exploration: std::f64::consts::SQRT_2,
            iterations: 2000,
            seed: 7,
        }
    }
}

impl PlannerConfig {
    pub fn validate(&self) -> Result<(), PlanError> {
        if self.execution_horizon < 1 || self.execution_horizon > self.planning_horizon {
            return Err(PlanError::InvalidConfig("need 1 <= execution horizon <= planning horizon"));
        }
        if self.mission_length > 0 && self.planning_horizon > self.mission_length {
            return Err(PlanError::InvalidConfig("planning horizon exceeds mission length"));
        }
        if !(self.exploration >= 0.0) || !self.exploration.is_finite() {
            return Err(PlanError::InvalidConfig("exploration constant must be non-negative"));
        }
        if self.iterations < 1 {
            return Err(PlanError::InvalidConfig("iteration budget must be at least 1"));
        }
        Ok(())
    }
}
