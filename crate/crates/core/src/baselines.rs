//! Lawnmower (boustrophedon) survey paths and the value-to-go lower bound
//! they provide.
//!
//! A lawnmower runs straight legs parallel to the starting heading and, after
//! each leg, turns through 180° with a lateral offset of roughly the track
//! spacing, always stepping outward to the same side. Legs end early at the
//! area boundary. The turn manoeuvre is the shortest sequence of available
//! actions whose lateral offset is close to the track spacing, so every
//! lawnmower is a feasible path under the vehicle dynamics.

use std::collections::hash_map::Entry;
use std::f64::consts::PI;

use rustc_hash::FxHashMap as HashMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geo::GeoPoint;
use crate::gp::{GpError, GpModel};
use crate::reward::{point_reward, sequence_rewards, RewardConfig};
use crate::vehicle::{normalize_heading, ActionSet, OperationalArea, Path, VehicleState, GEOMETRY_TOLERANCE};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BaselineError {
    #[error("lawnmower: {0}")]
    InvalidSpec(&'static str),
    #[error("lawnmower needs a straight (0 rad) action in the action set")]
    NoStraightAction,
}

/// Which side the sweep offsets toward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TurnSide {
    /// One sweep per side whose first turn stays inside the area.
    FirstFeasible,
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LawnmowerSpec {
    pub track_spacing: f64,
    pub leg_length: f64,
    pub max_legs: usize,
    pub turn_side: TurnSide,
}

impl Default for LawnmowerSpec {
    fn default() -> Self {
        Self { track_spacing: 40.0, leg_length: 400.0, max_legs: 1000, turn_side: TurnSide::FirstFeasible }
    }
}

impl LawnmowerSpec {
    pub fn validate(&self, step_length: f64) -> Result<(), BaselineError> {
        if !(self.track_spacing > 0.0) {
            return Err(BaselineError::InvalidSpec("track spacing must be positive"));
        }
        if !(self.leg_length >= step_length - GEOMETRY_TOLERANCE) {
            return Err(BaselineError::InvalidSpec("leg length must be at least one step"));
        }
        if self.max_legs == 0 {
            return Err(BaselineError::InvalidSpec("max legs must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Left,
    Right,
}

impl Side {
    fn flip(self) -> Self {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// Lawnmower generator bound to one action set.
#[derive(Debug, Clone)]
pub struct Lawnmower {
    spec: LawnmowerSpec,
    straight: usize,
    leg_steps: usize,
    right_turn: Vec<usize>,
    left_turn: Vec<usize>,
}

struct Sweep {
    path: Path,
    /// `None` when the budget ran out before the first turn was attempted.
    first_turn_ok: Option<bool>,
}

impl Lawnmower {
    pub fn new(spec: LawnmowerSpec, actions: &ActionSet) -> Result<Self, BaselineError> {
        spec.validate(actions.step_length())?;
        let straight = actions.index_of(0.0).ok_or(BaselineError::NoStraightAction)?;
        let leg_steps = ((spec.leg_length / actions.step_length()) + GEOMETRY_TOLERANCE).floor() as usize;
        Ok(Self {
            spec,
            straight,
            leg_steps: leg_steps.max(1),
            right_turn: find_turn(actions, spec.track_spacing, Side::Right),
            left_turn: find_turn(actions, spec.track_spacing, Side::Left),
        })
    }

    pub fn spec(&self) -> &LawnmowerSpec {
        &self.spec
    }

    /// Action indices of the 180° manoeuvre that offsets to the right.
    pub fn right_turn(&self) -> &[usize] {
        &self.right_turn
    }

    pub fn left_turn(&self) -> &[usize] {
        &self.left_turn
    }

    fn turn(&self, side: Side) -> &[usize] {
        match side {
            Side::Left => &self.left_turn,
            Side::Right => &self.right_turn,
        }
    }

    fn sweep(
        &self,
        start: &VehicleState,
        actions: &ActionSet,
        area: &OperationalArea,
        budget: usize,
        side: Side,
        turn_first: bool,
    ) -> Sweep {
        let mut path = Path::start(*start);
        let mut first_turn_ok = None;
        let mut side = side;
        let mut legs = 0;
        let mut skip_leg = turn_first;
        while path.steps() < budget {
            if !skip_leg {
                for _ in 0..self.leg_steps {
                    if path.steps() == budget {
                        return Sweep { path, first_turn_ok };
                    }
                    let next = actions.apply(path.last(), self.straight);
                    if !area.contains(&next.position) {
                        break;
                    }
                    path.states.push(next);
                }
                legs += 1;
                if legs >= self.spec.max_legs || path.steps() == budget {
                    break;
                }
            }
            skip_leg = false;

            let manoeuvre = self.turn(side);
            let mut cursor = *path.last();
            let mut turn_states = Vec::with_capacity(manoeuvre.len());
            for &a in manoeuvre {
                cursor = actions.apply(&cursor, a);
                turn_states.push(cursor);
            }
            let ok = !manoeuvre.is_empty() && turn_states.iter().all(|s| area.contains(&s.position));
            first_turn_ok.get_or_insert(ok);
            if !ok {
                break;
            }
            let room = budget - path.steps();
            path.states.extend(turn_states.into_iter().take(room));
            side = side.flip();
        }
        Sweep { path, first_turn_ok }
    }

    /// Two lawnmowers from `start`, each at most `budget` steps.
    ///
    /// With [`TurnSide::FirstFeasible`] one sweep is produced per side whose
    /// first turn stays in the area. If only one side works, the second path
    /// sweeps the same side but turns first (legs in reverse order). If
    /// neither works both paths are the single truncated leg.
    pub fn pair(&self, start: &VehicleState, actions: &ActionSet, area: &OperationalArea, budget: usize) -> [Path; 2] {
        if budget == 0 {
            return [Path::start(*start), Path::start(*start)];
        }
        let forced = |side| {
            [
                self.sweep(start, actions, area, budget, side, false).path,
                self.sweep(start, actions, area, budget, side, true).path,
            ]
        };
        match self.spec.turn_side {
            TurnSide::Left => forced(Side::Left),
            TurnSide::Right => forced(Side::Right),
            TurnSide::FirstFeasible => {
                let right = self.sweep(start, actions, area, budget, Side::Right, false);
                let left = self.sweep(start, actions, area, budget, Side::Left, false);
                let feasible = |s: &Sweep| s.first_turn_ok != Some(false);
                match (feasible(&right), feasible(&left)) {
                    (true, false) => [right.path, self.sweep(start, actions, area, budget, Side::Right, true).path],
                    (false, true) => [left.path, self.sweep(start, actions, area, budget, Side::Left, true).path],
                    _ => [right.path, left.path],
                }
            }
        }
    }
}

/// Action sequence (≤ 4 steps) that reverses the heading with a lateral
/// offset to `side` near `spacing`. Sequences within 10% of the spacing are
/// ranked by length, then by offset error; if none is that close the
/// smallest offset error wins.
fn find_turn(actions: &ActionSet, spacing: f64, side: Side) -> Vec<usize> {
    const MAX_LEN: usize = 4;
    let tolerance = 0.1 * spacing;
    let origin = VehicleState::new(0.0, GeoPoint::new(0.0, 0.0));
    // (outside tolerance, primary, secondary, |along-track drift|, sequence)
    type Rank = (bool, f64, f64, f64, Vec<usize>);
    let mut best: Option<Rank> = None;
    let mut stack: Vec<(Vec<usize>, VehicleState)> = vec![(Vec::new(), origin)];
    while let Some((seq, state)) = stack.pop() {
        if !seq.is_empty() && (normalize_heading(state.heading) - PI).abs() < 1e-6 {
            let lateral = state.position.east;
            let on_side = match side {
                Side::Right => lateral > GEOMETRY_TOLERANCE,
                Side::Left => lateral < -GEOMETRY_TOLERANCE,
            };
            if on_side {
                let error = (lateral.abs() - spacing).abs();
                let outside = error > tolerance;
                let len = seq.len() as f64;
                let (primary, secondary) = if outside { (error, len) } else { (len, error) };
                let rank = (outside, primary, secondary, state.position.north.abs(), seq.clone());
                let better = match &best {
                    None => true,
                    Some(b) => {
                        let tol = 1e-9;
                        if rank.0 != b.0 {
                            !rank.0
                        } else if (rank.1 - b.1).abs() > tol {
                            rank.1 < b.1
                        } else if (rank.2 - b.2).abs() > tol {
                            rank.2 < b.2
                        } else if (rank.3 - b.3).abs() > tol {
                            rank.3 < b.3
                        } else {
                            rank.4 < b.4
                        }
                    }
                };
                if better {
                    best = Some(rank);
                }
            }
        }
        if seq.len() < MAX_LEN {
            for a in 0..actions.len() {
                let mut next = seq.clone();
                next.push(a);
                stack.push((next, actions.apply(&state, a)));
            }
        }
    }
    best.map(|b| b.4).unwrap_or_default()
}

/// Convenience wrapper building a [`Lawnmower`] for a single call.
pub fn lawnmower_pair(
    start: &VehicleState,
    actions: &ActionSet,
    area: &OperationalArea,
    spec: &LawnmowerSpec,
    budget: usize,
) -> Result<[Path; 2], BaselineError> {
    Ok(Lawnmower::new(*spec, actions)?.pair(start, actions, area, budget))
}

/// A lower bound on the reward still obtainable, witnessed by a feasible path.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueToGo {
    pub bound: f64,
    pub witness: Path,
    pub per_step: Vec<f64>,
}

impl ValueToGo {
    pub fn zero(state: VehicleState) -> Self {
        Self { bound: 0.0, witness: Path::start(state), per_step: Vec::new() }
    }
}

/// Everything needed to generate and score lawnmowers.
#[derive(Debug, Clone, Copy)]
pub struct PlanningContext<'a> {
    pub actions: &'a ActionSet,
    pub area: &'a OperationalArea,
    pub lawnmower: &'a Lawnmower,
    pub reward: &'a RewardConfig,
}

/// Best lawnmower reward from `state` within `remaining` steps, with every
/// lawnmower sample conditioned on the already planned `prefix`.
pub fn value_to_go(
    model: &GpModel,
    state: &VehicleState,
    remaining: usize,
    prefix: &[GeoPoint],
    ctx: &PlanningContext<'_>,
) -> Result<ValueToGo, GpError> {
    if remaining == 0 {
        return Ok(ValueToGo::zero(*state));
    }
    let mut best: Option<ValueToGo> = None;
    for path in ctx.lawnmower.pair(state, ctx.actions, ctx.area, remaining) {
        let per_step = sequence_rewards(model, prefix, &path.sample_points(), ctx.reward)?;
        let bound: f64 = per_step.iter().sum();
        if best.as_ref().is_none_or(|b| bound > b.bound) {
            best = Some(ValueToGo { bound, witness: path, per_step });
        }
    }
    Ok(best.expect("pair yields two paths"))
}

struct CachedTail {
    path: Path,
    points: Vec<GeoPoint>,
    rewards: Vec<f64>,
}

type TailKey = (u64, u64, u64, usize);

fn tail_key(state: &VehicleState, remaining: usize) -> TailKey {
    (state.heading.to_bits(), state.position.north.to_bits(), state.position.east.to_bits(), remaining)
}

/// Score of the best cached lawnmower for one start state and prefix.
#[derive(Debug, Clone)]
pub struct TailScore {
    pub bound: f64,
    pub per_step: Vec<f64>,
    key: TailKey,
    index: usize,
}

/// Memoizes lawnmower geometry and prefix-free rewards per start state for
/// one model snapshot. Results are bit-identical to [`value_to_go`]: only
/// lawnmower samples within the locality radius of some prefix point are
/// rescored, every other sample sees exactly the same conditioning set.
#[derive(Default)]
pub struct TailCache {
    entries: HashMap<TailKey, Vec<CachedTail>>,
}

impl TailCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn evaluate(
        &mut self,
        model: &GpModel,
        state: &VehicleState,
        remaining: usize,
        prefix: &[GeoPoint],
        ctx: &PlanningContext<'_>,
    ) -> Result<TailScore, GpError> {
        let key = tail_key(state, remaining);
        if let Entry::Vacant(slot) = self.entries.entry(key) {
            let mut tails = Vec::with_capacity(2);
            for path in ctx.lawnmower.pair(state, ctx.actions, ctx.area, remaining) {
                let points = path.sample_points();
                let rewards = sequence_rewards(model, &[], &points, ctx.reward)?;
                tails.push(CachedTail { path, points, rewards });
            }
            slot.insert(tails);
        }
        let tails = &self.entries[&key];
        let radius = model.hyperparams().locality_radius;

        let mut best: Option<TailScore> = None;
        let mut planned: Vec<GeoPoint> = Vec::new();
        for (index, tail) in tails.iter().enumerate() {
            planned.clear();
            planned.extend_from_slice(prefix);
            let mut per_step = Vec::with_capacity(tail.points.len());
            for (q, cached) in tail.points.iter().zip(&tail.rewards) {
                let touched = prefix.iter().any(|p| p.distance(q) <= radius);
                let r = if touched { point_reward(model, q, &planned, ctx.reward)? } else { *cached };
                per_step.push(r);
                planned.push(*q);
            }
            let bound: f64 = per_step.iter().sum();
            if best.as_ref().is_none_or(|b| bound > b.bound) {
                best = Some(TailScore { bound, per_step, key, index });
            }
        }
        Ok(best.expect("pair yields two paths"))
    }

    /// The lawnmower path behind a score from this cache.
    pub fn witness(&self, score: &TailScore) -> Path {
        self.entries[&score.key][score.index].path.clone()
    }

    /// Cached equivalent of [`value_to_go`].
    pub fn value_to_go(
        &mut self,
        model: &GpModel,
        state: &VehicleState,
        remaining: usize,
        prefix: &[GeoPoint],
        ctx: &PlanningContext<'_>,
    ) -> Result<ValueToGo, GpError> {
        let score = self.evaluate(model, state, remaining, prefix, ctx)?;
        let witness = self.witness(&score);
        Ok(ValueToGo { bound: score.bound, witness, per_step: score.per_step })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vehicle::validate_path;

    fn setup() -> (ActionSet, OperationalArea) {
        (
            ActionSet::from_degrees(&[-90.0, -45.0, -15.0, 0.0, 15.0, 45.0, 90.0], 30.0).unwrap(),
            OperationalArea::rectangle(GeoPoint::new(0.0, 0.0), 900.0, 600.0).unwrap(),
        )
    }

    #[test]
    fn default_turn_is_45_90_45() {
        let (acts, _) = setup();
        let lm = Lawnmower::new(LawnmowerSpec::default(), &acts).unwrap();
        // indices of +45, +90, +45 and their mirror
        assert_eq!(lm.right_turn(), &[5, 6, 5]);
        assert_eq!(lm.left_turn(), &[1, 0, 1]);
    }

    #[test]
    fn zero_budget_gives_empty_paths() {
        let (acts, area) = setup();
        let s = VehicleState::new(0.0, GeoPoint::new(450.0, 300.0));
        let [a, b] = lawnmower_pair(&s, &acts, &area, &LawnmowerSpec::default(), 0).unwrap();
        assert_eq!(a.steps(), 0);
        assert_eq!(b.steps(), 0);
    }

    #[test]
    fn centre_start_sweeps_both_ways() {
        let (acts, area) = setup();
        let s = VehicleState::new(0.0, GeoPoint::new(300.0, 300.0));
        let spec = LawnmowerSpec { leg_length: 120.0, ..Default::default() };
        let pair = lawnmower_pair(&s, &acts, &area, &spec, 10).unwrap();
        for p in &pair {
            assert_eq!(p.steps(), 10);
            validate_path(p, &acts, &area, true).unwrap();
            // first leg runs north
            for k in 1..=4 {
                assert!((p.states[k].position.east - 300.0).abs() < 1e-9);
                assert!(p.states[k].position.north > p.states[k - 1].position.north);
            }
            // after the turn it runs back south
            assert!(p.states[8].position.north < p.states[7].position.north);
        }
        assert!(pair[0].states[10].position.east > 300.0);
        assert!(pair[1].states[10].position.east < 300.0);
    }

    #[test]
    fn east_wall_forces_west_offset() {
        let (acts, area) = setup();
        let s = VehicleState::new(0.0, GeoPoint::new(300.0, 590.0));
        let spec = LawnmowerSpec { leg_length: 120.0, ..Default::default() };
        let pair = lawnmower_pair(&s, &acts, &area, &spec, 20).unwrap();
        for p in &pair {
            validate_path(p, &acts, &area, false).unwrap();
            assert!(p.states.iter().all(|st| st.position.east <= 590.0 + 1e-9));
            assert!(p.steps() > 0);
        }
        // second path turns before running its first leg
        assert!(pair[1].states[1].heading < 0.0);
    }

    #[test]
    fn legs_stop_at_boundary() {
        let (acts, area) = setup();
        let s = VehicleState::new(0.0, GeoPoint::new(850.0, 300.0));
        let pair = lawnmower_pair(&s, &acts, &area, &LawnmowerSpec::default(), 30).unwrap();
        for p in &pair {
            validate_path(p, &acts, &area, false).unwrap();
        }
    }

    #[test]
    fn missing_straight_action_is_rejected() {
        let acts = ActionSet::from_degrees(&[-45.0, 45.0], 30.0).unwrap();
        assert_eq!(Lawnmower::new(LawnmowerSpec::default(), &acts).unwrap_err(), BaselineError::NoStraightAction);
    }
}
