//! Tree search for one planning epoch.
//!
//! Two changes from textbook UCT: nodes back up the maximum objective seen
//! below them rather than the mean, and the exploitation term is divided by
//! the best objective found so far in the epoch. The search also starts from
//! an incumbent (the recomputed remainder of the previous plan or the best
//! lawnmower from the root, whichever is worth more), so the returned plan is
//! never worse than either.
//!
//! Expansion is full-path: a rollout that leaves the tree adds a node for
//! every step it takes, choosing uniformly among the not-yet-tried actions.
//! A subtree whose leaves have all been scored is marked exhausted and never
//! selected again, so a budget at least as large as the number of leaves
//! enumerates the whole search space.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{PlanError, PlannerConfig};
use crate::baselines::{PlanningContext, TailCache};
use crate::geo::GeoPoint;
use crate::gp::GpModel;
use crate::reward::{point_reward, sequence_rewards};
use crate::vehicle::{Path, VehicleState};

/// Which objective the planner maximizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Arm {
    /// Short-path reward plus the lawnmower value-to-go at the leaf, with the
    /// incumbent floor.
    TerminalReward,
    /// Short-path reward only, no incumbent.
    Baseline,
}

impl Arm {
    pub fn name(self) -> &'static str {
        match self {
            Arm::TerminalReward => "terminal",
            Arm::Baseline => "baseline",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IncumbentSource {
    PreviousRemainder,
    Lawnmower,
    Mcts,
}

impl IncumbentSource {
    pub fn name(self) -> &'static str {
        match self {
            IncumbentSource::PreviousRemainder => "remainder",
            IncumbentSource::Lawnmower => "lawnmower",
            IncumbentSource::Mcts => "mcts",
        }
    }
}

#[derive(Debug, Clone)]
pub struct MctsNode {
    pub state: VehicleState,
    pub depth: usize,
    pub parent: Option<usize>,
    /// Action index that led here from the parent.
    pub action: Option<usize>,
    pub visits: u64,
    /// Maximum objective over rollouts through this node.
    pub best_value: f64,
    /// Anticipated reward of the step into this node.
    pub reward: f64,
    /// Anticipated reward accumulated from the root.
    pub cumulative: f64,
    pub children: Vec<usize>,
    /// Every leaf below this node has been scored.
    pub exhausted: bool,
    untried: Vec<(usize, VehicleState)>,
}

impl MctsNode {
    fn new(state: VehicleState, depth: usize, parent: Option<usize>, action: Option<usize>) -> Self {
        Self {
            state,
            depth,
            parent,
            action,
            visits: 0,
            best_value: f64::NEG_INFINITY,
            reward: 0.0,
            cumulative: 0.0,
            children: Vec::new(),
            exhausted: false,
            untried: Vec::new(),
        }
    }

    pub fn untried(&self) -> usize {
        self.untried.len()
    }
}

/// Arena of search nodes; index 0 is the root.
#[derive(Debug, Clone)]
pub struct MctsTree {
    nodes: Vec<MctsNode>,
}

impl MctsTree {
    pub fn nodes(&self) -> &[MctsNode] {
        &self.nodes
    }

    pub fn root(&self) -> &MctsNode {
        &self.nodes[0]
    }

    /// States from the root down to `index`.
    pub fn path_to(&self, index: usize) -> Path {
        let mut states = Vec::with_capacity(self.nodes[index].depth + 1);
        let mut cursor = Some(index);
        while let Some(i) = cursor {
            states.push(self.nodes[i].state);
            cursor = self.nodes[i].parent;
        }
        states.reverse();
        Path { states }
    }

    /// Whether `index` lies in the subtree rooted at `ancestor` (inclusive).
    pub fn is_descendant(&self, index: usize, ancestor: usize) -> bool {
        let mut cursor = Some(index);
        while let Some(i) = cursor {
            if i == ancestor {
                return true;
            }
            cursor = self.nodes[i].parent;
        }
        false
    }

    fn step_rewards(&self, index: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.nodes[index].depth);
        let mut i = index;
        while let Some(p) = self.nodes[i].parent {
            out.push(self.nodes[i].reward);
            i = p;
        }
        out.reverse();
        out
    }
}

/// Normalized UCT score. Unvisited children score `+∞`; a non-positive
/// normalizer turns the exploitation term off.
pub fn uct_score(child: &MctsNode, parent_visits: u64, exploration: f64, normalizer: f64) -> f64 {
    if child.visits == 0 {
        return f64::INFINITY;
    }
    let exploit = if normalizer > 0.0 { child.best_value / normalizer } else { 0.0 };
    exploit + exploration * ((parent_visits as f64).ln() / child.visits as f64).sqrt()
}

/// Output of one planning epoch.
#[derive(Debug, Clone)]
pub struct PlanResult {
    /// Short path from the root, at most the planning horizon long.
    pub path: Path,
    pub step_rewards: Vec<f64>,
    /// Path continuing from the end of `path` that witnesses the terminal
    /// value. Just the end state for the baseline arm.
    pub tail: Path,
    pub tail_rewards: Vec<f64>,
    /// Objective: short-path reward plus terminal value.
    pub value: f64,
    /// Value-to-go bound at the root; zero for the baseline arm.
    pub root_bound: f64,
    /// Recomputed objective of the incumbent carried in, if any.
    pub remainder_value: Option<f64>,
    pub source: IncumbentSource,
    pub rollouts: usize,
}

impl PlanResult {
    pub fn terminal_value(&self) -> f64 {
        self.tail_rewards.iter().sum()
    }

    /// Short path followed by its tail.
    pub fn full_path(&self) -> Path {
        self.remainder(0)
    }

    /// What is left of the full path after executing `executed` steps.
    pub fn remainder(&self, executed: usize) -> Path {
        let mut states = self.path.states[executed..].to_vec();
        states.extend_from_slice(&self.tail.states[1..]);
        Path { states }
    }
}

/// Rollout statistics kept for inspection.
#[derive(Debug, Clone)]
pub struct SearchTrace {
    pub tree: MctsTree,
    /// `(leaf node, objective)` per rollout.
    pub rollouts: Vec<(usize, f64)>,
}

/// Read-only planning dependencies for one mission arm.
#[derive(Debug, Clone, Copy)]
pub struct Planner<'a> {
    pub ctx: PlanningContext<'a>,
    pub config: &'a PlannerConfig,
    pub arm: Arm,
}

struct Candidate {
    value: f64,
    path: Path,
    step_rewards: Vec<f64>,
    tail: Path,
    tail_rewards: Vec<f64>,
    source: IncumbentSource,
}

impl Candidate {
    /// Splits a complete path at the planning horizon.
    fn split(full: &Path, rewards: Vec<f64>, horizon: usize, source: IncumbentSource) -> Self {
        let cut = horizon.min(full.steps());
        let path = Path { states: full.states[..=cut].to_vec() };
        let tail = Path { states: full.states[cut..].to_vec() };
        let value = rewards.iter().sum();
        let tail_rewards = rewards[cut..].to_vec();
        let mut step_rewards = rewards;
        step_rewards.truncate(cut);
        Self { value, path, step_rewards, tail, tail_rewards, source }
    }
}

fn offer(best: &mut Option<Candidate>, candidate: Candidate) {
    if best.as_ref().is_none_or(|b| candidate.value > b.value) {
        *best = Some(candidate);
    }
}

/// Plans from `root` with `remaining` mission steps left.
///
/// `incumbent` is the unexecuted part of the previous plan, starting at
/// `root`; it is rescored against the current model and used as a floor.
/// Ignored by the baseline arm.
pub fn plan_epoch<R: Rng + ?Sized>(
    model: &GpModel,
    root: &VehicleState,
    incumbent: Option<&Path>,
    remaining: usize,
    planner: &Planner<'_>,
    rng: &mut R,
) -> Result<PlanResult, PlanError> {
    plan_epoch_traced(model, root, incumbent, remaining, planner, rng).map(|(plan, _)| plan)
}

/// [`plan_epoch`] that also returns the search tree and rollout values.
pub fn plan_epoch_traced<R: Rng + ?Sized>(
    model: &GpModel,
    root: &VehicleState,
    incumbent: Option<&Path>,
    remaining: usize,
    planner: &Planner<'_>,
    rng: &mut R,
) -> Result<(PlanResult, SearchTrace), PlanError> {
    if remaining == 0 {
        return Err(PlanError::InvalidConfig("no mission steps remaining"));
    }
    let cfg = planner.config;
    let ctx = &planner.ctx;
    let terminal = planner.arm == Arm::TerminalReward;
    let horizon = cfg.planning_horizon.min(remaining);
    let mut cache = TailCache::new();
    let mut best: Option<Candidate> = None;

    let mut root_bound = 0.0;
    let mut remainder_value = None;
    if terminal {
        if let Some(prev) = incumbent {
            let cut = remaining.min(prev.steps());
            let full = Path { states: prev.states[..=cut].to_vec() };
            let rewards = sequence_rewards(model, &[], &full.sample_points(), ctx.reward)?;
            let c = Candidate::split(&full, rewards, horizon, IncumbentSource::PreviousRemainder);
            remainder_value = Some(c.value);
            offer(&mut best, c);
        }
        let lawn = cache.evaluate(model, root, remaining, &[], ctx)?;
        root_bound = lawn.bound;
        let full = cache.witness(&lawn);
        offer(&mut best, Candidate::split(&full, lawn.per_step, horizon, IncumbentSource::Lawnmower));
    }

    let mut root_node = MctsNode::new(*root, 0, None, None);
    root_node.untried = ctx.actions.successors(root, ctx.area);
    let mut tree = MctsTree { nodes: vec![root_node] };
    let mut rollouts = Vec::with_capacity(cfg.iterations);
    let mut prefix: Vec<GeoPoint> = Vec::with_capacity(horizon);

    for _ in 0..cfg.iterations {
        if tree.nodes[0].exhausted {
            break;
        }
        prefix.clear();
        let mut idx = 0;
        loop {
            let node = &tree.nodes[idx];
            if node.depth == horizon || (node.untried.is_empty() && node.children.is_empty()) {
                break;
            }
            if !node.untried.is_empty() {
                let pick = rng.random_range(0..node.untried.len());
                let (action, state) = tree.nodes[idx].untried.remove(pick);
                let depth = tree.nodes[idx].depth + 1;
                let mut child = MctsNode::new(state, depth, Some(idx), Some(action));
                child.reward = point_reward(model, &state.position, &prefix, ctx.reward)?;
                child.cumulative = tree.nodes[idx].cumulative + child.reward;
                if depth < horizon {
                    child.untried = ctx.actions.successors(&state, ctx.area);
                }
                let child_idx = tree.nodes.len();
                tree.nodes.push(child);
                tree.nodes[idx].children.push(child_idx);
                prefix.push(state.position);
                idx = child_idx;
                continue;
            }
            let normalizer = best.as_ref().map_or(0.0, |b| b.value);
            let parent_visits = node.visits;
            let mut chosen = None;
            let mut chosen_score = f64::NEG_INFINITY;
            for &c in &node.children {
                let child = &tree.nodes[c];
                if child.exhausted {
                    continue;
                }
                let score = uct_score(child, parent_visits, cfg.exploration, normalizer);
                if chosen.is_none() || score > chosen_score {
                    chosen = Some(c);
                    chosen_score = score;
                }
            }
            let c = chosen.expect("a non-exhausted node has a live child");
            prefix.push(tree.nodes[c].state.position);
            idx = c;
        }

        let leaf = &tree.nodes[idx];
        let tail = if terminal {
            Some(cache.evaluate(model, &leaf.state, remaining - leaf.depth, &prefix, ctx)?)
        } else {
            None
        };
        let value = leaf.cumulative + tail.as_ref().map_or(0.0, |t| t.bound);
        rollouts.push((idx, value));

        tree.nodes[idx].exhausted = true;
        let mut cursor = Some(idx);
        while let Some(i) = cursor {
            let done =
                tree.nodes[i].untried.is_empty() && tree.nodes[i].children.iter().all(|&c| tree.nodes[c].exhausted);
            let node = &mut tree.nodes[i];
            node.visits += 1;
            node.best_value = node.best_value.max(value);
            node.exhausted |= done;
            cursor = node.parent;
        }

        if best.as_ref().is_none_or(|b| value > b.value) {
            let path = tree.path_to(idx);
            let step_rewards = tree.step_rewards(idx);
            let (tail, tail_rewards) = match tail {
                Some(t) => (cache.witness(&t), t.per_step),
                None => (Path::start(*path.last()), Vec::new()),
            };
            best = Some(Candidate { value, path, step_rewards, tail, tail_rewards, source: IncumbentSource::Mcts });
        }
    }

    let best = best.expect("at least one rollout or incumbent");
    let plan = PlanResult {
        path: best.path,
        step_rewards: best.step_rewards,
        tail: best.tail,
        tail_rewards: best.tail_rewards,
        value: best.value,
        root_bound,
        remainder_value,
        source: best.source,
        rollouts: rollouts.len(),
    };
    Ok((plan, SearchTrace { tree, rollouts }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn node(best_value: f64, visits: u64) -> MctsNode {
        let mut n = MctsNode::new(VehicleState::new(0.0, GeoPoint::new(0.0, 0.0)), 1, Some(0), Some(0));
        n.best_value = best_value;
        n.visits = visits;
        n
    }

    #[test]
    fn unvisited_children_come_first() {
        assert_eq!(uct_score(&node(f64::NEG_INFINITY, 0), 10, 1.4, 3.0), f64::INFINITY);
        assert!(uct_score(&node(3.0, 1), 10, 1.4, 3.0).is_finite());
    }

    #[test]
    fn uct_substitution() {
        let c = std::f64::consts::SQRT_2;
        let s = uct_score(&node(4.0, 9), 9, c, 4.0);
        assert!((s - (1.0 + c * (9f64.ln() / 9.0).sqrt())).abs() < 1e-15);
    }

    #[test]
    fn zero_exploration_is_greedy() {
        let a = uct_score(&node(2.0, 5), 20, 0.0, 4.0);
        let b = uct_score(&node(3.0, 15), 20, 0.0, 4.0);
        assert_eq!(a, 0.5);
        assert_eq!(b, 0.75);
    }

    #[test]
    fn zero_normalizer_drops_exploitation() {
        assert_eq!(uct_score(&node(0.0, 4), 4, 0.0, 0.0), 0.0);
    }
}
