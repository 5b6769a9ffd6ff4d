//! Receding-horizon mission loop: plan, execute a prefix through the
//! simulator, fold the measurements into the model, replan.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::mcts::{plan_epoch, Arm, IncumbentSource, Planner};
use super::{PlanError, PlannerConfig};
use crate::baselines::{value_to_go, BaselineError, Lawnmower, LawnmowerSpec, PlanningContext};
use crate::geo::GeoPoint;
use crate::gp::{GpError, GpHyperparams, GpModel, PriorMeanSpec};
use crate::reward::{ambiguity, realized_reduction, RewardConfig};
use crate::sim::{ingest, traverse_segment, BathymetryField, SensorConfig, SimError};
use crate::vehicle::{ActionSet, OperationalArea, Path, VehicleState};

/// Slack allowed when checking the lower-bound guarantee.
pub const GUARANTEE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum MissionError {
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Model(#[from] GpError),
    #[error(transparent)]
    Lawnmower(#[from] BaselineError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("mission: {0}")]
    Invalid(String),
}

/// Everything one simulated mission needs.
#[derive(Debug, Clone)]
pub struct Mission {
    pub area: OperationalArea,
    pub prior: PriorMeanSpec,
    pub gp: GpHyperparams,
    pub reward: RewardConfig,
    pub actions: ActionSet,
    pub lawnmower: LawnmowerSpec,
    pub planner: PlannerConfig,
    pub sensor: SensorConfig,
    pub field: BathymetryField,
    pub start: VehicleState,
    pub sensor_seed: u64,
    /// Record wall-clock planning time. Off by default so logs are reproducible.
    pub timing: bool,
}

impl Mission {
    pub fn validate(&self) -> Result<(), MissionError> {
        self.gp.validate()?;
        self.prior.validate()?;
        if !(self.reward.beta > 0.0) || !self.reward.level.is_finite() {
            return Err(MissionError::Invalid("reward beta must be positive and level finite".into()));
        }
        self.lawnmower.validate(self.actions.step_length())?;
        self.sensor.validate()?;
        if self.planner.mission_length > 0 {
            self.planner.validate()?;
        }
        if !self.area.contains(&self.start.position) {
            return Err(MissionError::Invalid(format!(
                "start ({}, {}) is outside the operational area",
                self.start.position.north, self.start.position.east
            )));
        }
        Ok(())
    }
}

/// One executed step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub position: GeoPoint,
    pub heading: f64,
    /// Anticipated reward accumulated over executed steps.
    pub j_anticipated: f64,
    /// Realized ambiguity reduction accumulated over executed steps.
    pub j_realized: f64,
    /// Value-to-go bound from this state with the model as it stands after the step.
    pub b_k: f64,
    pub j_plus_b: f64,
    pub epoch_ms: f64,
}

/// Planner bookkeeping for one epoch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    /// Steps executed before this epoch.
    pub step: usize,
    pub value: f64,
    pub root_bound: f64,
    pub remainder_value: Option<f64>,
    pub source: IncumbentSource,
    pub rollouts: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub time: f64,
    pub position: GeoPoint,
    pub depth: f64,
    pub retained: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MissionSummary {
    pub arm: Arm,
    /// Value-to-go bound at the start state under the prior.
    pub b0: f64,
    /// Running bound `max_k (J_k + B_k)` over executed steps.
    pub running_bound: f64,
    pub final_j: f64,
    pub final_realized: f64,
    pub steps: usize,
    pub guarantee_satisfied: bool,
    /// The vehicle ran out of feasible moves before the mission length.
    pub dead_end: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MissionLog {
    pub rows: Vec<StepRecord>,
    pub summary: MissionSummary,
}

#[derive(Debug, Clone)]
pub struct MissionOutcome {
    pub log: MissionLog,
    pub epochs: Vec<EpochRecord>,
    pub samples: Vec<SampleRecord>,
    /// Executed path from the start state.
    pub path: Path,
    pub model: GpModel,
}

/// Mission with terminal rewards and the incumbent floor.
pub fn rh_execute(mission: &Mission) -> Result<MissionOutcome, MissionError> {
    run(mission, Arm::TerminalReward)
}

/// Comparison mission planning on short-path reward alone.
pub fn rh_execute_baseline(mission: &Mission) -> Result<MissionOutcome, MissionError> {
    run(mission, Arm::Baseline)
}

fn arm_rng(seed: u64, arm: Arm) -> ChaCha8Rng {
    let tag = match arm {
        Arm::TerminalReward => 1,
        Arm::Baseline => 2,
    };
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(tag))
}

fn run(mission: &Mission, arm: Arm) -> Result<MissionOutcome, MissionError> {
    mission.validate()?;
    let lawnmower = Lawnmower::new(mission.lawnmower, &mission.actions)?;
    let ctx = PlanningContext {
        actions: &mission.actions,
        area: &mission.area,
        lawnmower: &lawnmower,
        reward: &mission.reward,
    };
    let planner = Planner { ctx, config: &mission.planner, arm };
    let terminal = arm == Arm::TerminalReward;
    let length = mission.planner.mission_length;
    let mut model = GpModel::new(mission.gp, mission.prior)?;
    let mut plan_rng = arm_rng(mission.planner.seed, arm);
    let mut sensor_rng = arm_rng(mission.sensor_seed, arm);

    let b0 = value_to_go(&model, &mission.start, length, &[], &ctx)?.bound;
    let mut rows: Vec<StepRecord> = Vec::with_capacity(length);
    let mut epochs = Vec::new();
    let mut samples = Vec::new();
    let mut path = Path::start(mission.start);
    let mut incumbent: Option<Path> = None;
    let mut state = mission.start;
    let mut time = 0.0;
    let mut j = 0.0;
    let mut j_realized = 0.0;
    let mut dead_end = false;

    while rows.len() < length {
        let k = rows.len();
        let started = mission.timing.then(Instant::now);
        let plan = plan_epoch(&model, &state, incumbent.as_ref(), length - k, &planner, &mut plan_rng)?;
        let epoch_ms = started.map_or(0.0, |t| t.elapsed().as_secs_f64() * 1e3);
        epochs.push(EpochRecord {
            step: k,
            value: plan.value,
            root_bound: plan.root_bound,
            remainder_value: plan.remainder_value,
            source: plan.source,
            rollouts: plan.rollouts,
        });
        if plan.path.steps() == 0 {
            dead_end = true;
            break;
        }

        let execute = mission.planner.execution_horizon.min(plan.path.steps());
        for i in 0..execute {
            let from = plan.path.states[i];
            let to = plan.path.states[i + 1];
            let a_before = ambiguity(&model.predict(&to.position)?, &mission.reward);
            let stream =
                traverse_segment(&from.position, &to.position, time, &mission.field, &mission.sensor, &mut sensor_rng);
            let retained = ingest(&mut model, &stream);
            time += from.position.distance(&to.position) / mission.sensor.speed + mission.sensor.dwell;
            let a_after = ambiguity(&model.predict(&to.position)?, &mission.reward);
            samples.extend(stream.iter().zip(&retained).map(|(m, &kept)| SampleRecord {
                time: m.time,
                position: m.position,
                depth: m.depth,
                retained: kept,
            }));

            j += plan.step_rewards[i];
            j_realized += realized_reduction(a_before, a_after);
            let b_k = if terminal { value_to_go(&model, &to, length - rows.len() - 1, &[], &ctx)?.bound } else { 0.0 };
            rows.push(StepRecord {
                step: rows.len() + 1,
                position: to.position,
                heading: to.heading,
                j_anticipated: j,
                j_realized,
                b_k,
                j_plus_b: j + b_k,
                epoch_ms: if i == 0 { epoch_ms } else { 0.0 },
            });
            path.states.push(to);
        }
        state = plan.path.states[execute];
        incumbent = terminal.then(|| plan.remainder(execute));
    }

    let running_bound = rows.iter().map(|r| r.j_plus_b).fold(0.0, f64::max);
    let summary = MissionSummary {
        arm,
        b0,
        running_bound,
        final_j: j,
        final_realized: j_realized,
        steps: rows.len(),
        guarantee_satisfied: j >= b0.max(running_bound) - GUARANTEE_TOLERANCE,
        dead_end,
    };
    Ok(MissionOutcome { log: MissionLog { rows, summary }, epochs, samples, path, model })
}
