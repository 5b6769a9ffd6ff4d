//! Shared test helpers: a dense Gaussian-process oracle written directly from
//! the textbook posterior formulas, and random instance generators.
#![allow(dead_code)]

use isobath_core::baselines::{value_to_go, Lawnmower, LawnmowerSpec, PlanningContext};
use isobath_core::config::MissionConfig;
use isobath_core::geo::GeoPoint;
use isobath_core::gp::{Datum, GpHyperparams, GpModel, PriorMeanSpec};
use isobath_core::planner::{Arm, PlannerConfig};
use isobath_core::reward::{sequence_rewards, RewardConfig};
use isobath_core::vehicle::{ActionSet, OperationalArea, Path, VehicleState};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn se(p: &GeoPoint, q: &GeoPoint, hp: &GpHyperparams) -> f64 {
    let dn = p.north - q.north;
    let de = p.east - q.east;
    hp.signal_std.powi(2) * (-(dn * dn + de * de) / (2.0 * hp.length_scale.powi(2))).exp()
}

/// Prior mean from its definition, using the perpendicular distance to the
/// infinite line through the two points.
pub fn oracle_prior(p: &GeoPoint, spec: &PriorMeanSpec) -> f64 {
    let (a, b) = spec.line;
    let (dn, de) = (b.north - a.north, b.east - a.east);
    let cross = (p.north - a.north) * de - (p.east - a.east) * dn;
    let d = cross.abs() / (dn * dn + de * de).sqrt();
    (spec.max_depth * (1.0 - (d / spec.falloff).powi(2))).max(0.0)
}

/// Full-matrix posterior mean and variance at `p` given every datum, solved
/// by LU (Gaussian elimination with partial pivoting).
pub fn dense_posterior(hp: &GpHyperparams, prior: &PriorMeanSpec, data: &[Datum], p: &GeoPoint) -> (f64, f64) {
    let n = data.len();
    let kss = hp.signal_std.powi(2);
    let m = oracle_prior(p, prior);
    if n == 0 {
        return (m, kss);
    }
    let k = DMatrix::from_fn(n, n, |i, j| {
        se(&data[i].position, &data[j].position, hp) + if i == j { hp.noise_std.powi(2) } else { 0.0 }
    });
    let kstar = DVector::from_fn(n, |i, _| se(p, &data[i].position, hp));
    let resid = DVector::from_fn(n, |i, _| data[i].depth - oracle_prior(&data[i].position, prior));
    let lu = k.lu();
    let alpha = lu.solve(&resid).expect("kernel matrix is invertible");
    let beta = lu.solve(&kstar).expect("kernel matrix is invertible");
    (m + kstar.dot(&alpha), kss - kstar.dot(&beta))
}

/// Posterior variance at `p` given noisy observations at `inputs`.
pub fn dense_variance(hp: &GpHyperparams, inputs: &[GeoPoint], p: &GeoPoint) -> f64 {
    let data: Vec<Datum> = inputs.iter().map(|q| Datum::new(*q, 0.0)).collect();
    let flat = PriorMeanSpec::new(GeoPoint::new(0.0, 0.0), GeoPoint::new(1.0, 0.0), 1.0, 1.0).unwrap();
    dense_posterior(hp, &flat, &data, p).1
}

pub fn random_point<R: Rng>(rng: &mut R, extent: f64) -> GeoPoint {
    GeoPoint::new(rng.random_range(0.0..extent), rng.random_range(0.0..extent))
}

pub fn random_data<R: Rng>(rng: &mut R, n: usize, extent: f64) -> Vec<Datum> {
    (0..n).map(|_| Datum::new(random_point(rng, extent), rng.random_range(0.0..30.0))).collect()
}

pub fn random_prior<R: Rng>(rng: &mut R, extent: f64) -> PriorMeanSpec {
    let a = random_point(rng, extent);
    let mut b = random_point(rng, extent);
    if a.distance(&b) < 1.0 {
        b = GeoPoint::new(a.north + 10.0, a.east);
    }
    PriorMeanSpec::new(a, b, rng.random_range(50.0..400.0), rng.random_range(10.0..40.0)).unwrap()
}

/// The default mission shrunk to run in well under a second.
pub fn quick_config(length: usize, iterations: usize) -> MissionConfig {
    let mut cfg = MissionConfig::default();
    cfg.planner.mission_length = length;
    cfg.planner.iterations = iterations;
    cfg
}

/// A random single-epoch planning problem on a 240 m × 300 m area.
pub struct Instance {
    pub model: GpModel,
    pub actions: ActionSet,
    pub area: OperationalArea,
    pub lawnmower: Lawnmower,
    pub reward: RewardConfig,
    pub start: VehicleState,
}

impl Instance {
    pub fn random(seed: u64) -> Self {
        let mut r = rng(seed);
        let actions = ActionSet::from_degrees(&[-90.0, -45.0, -15.0, 0.0, 15.0, 45.0, 90.0], 30.0).unwrap();
        let area = OperationalArea::rectangle(GeoPoint::new(0.0, 0.0), 240.0, 300.0).unwrap();
        let spec = LawnmowerSpec { track_spacing: 40.0, leg_length: 150.0, ..LawnmowerSpec::default() };
        let lawnmower = Lawnmower::new(spec, &actions).unwrap();
        let mut model = GpModel::new(GpHyperparams::default(), random_prior(&mut r, 300.0)).unwrap();
        let n = r.random_range(0..40);
        for d in random_data(&mut r, n, 300.0) {
            model.insert(d);
        }
        let reward = RewardConfig { level: r.random_range(5.0..25.0), beta: 2.0 };
        // Starts near the edges now and then, so dead ends get exercised.
        let start = VehicleState::new(
            (r.random_range(0..8) as f64) * std::f64::consts::FRAC_PI_4,
            GeoPoint::new(r.random_range(0.0..240.0), r.random_range(0.0..300.0)),
        );
        Self { model, actions, area, lawnmower, reward, start }
    }

    pub fn ctx(&self) -> PlanningContext<'_> {
        PlanningContext { actions: &self.actions, area: &self.area, lawnmower: &self.lawnmower, reward: &self.reward }
    }
}

pub fn planner_config(horizon: usize, remaining: usize, iterations: usize) -> PlannerConfig {
    PlannerConfig { planning_horizon: horizon, mission_length: remaining, iterations, ..PlannerConfig::default() }
}

/// Best objective over every feasible action sequence of up to `horizon`
/// steps; a state without feasible moves ends its sequence early.
pub fn enumerate(inst: &Instance, horizon: usize, remaining: usize, arm: Arm) -> f64 {
    let ctx = inst.ctx();
    let mut best = f64::NEG_INFINITY;
    let mut stack = vec![Path::start(inst.start)];
    while let Some(path) = stack.pop() {
        let last = *path.last();
        let next: Vec<VehicleState> = (0..inst.actions.len())
            .map(|a| inst.actions.apply(&last, a))
            .filter(|s| inst.area.contains(&s.position))
            .collect();
        if path.steps() == horizon || next.is_empty() {
            let points = path.sample_points();
            let rewards = sequence_rewards(&inst.model, &[], &points, &inst.reward).unwrap();
            let mut value = rewards.iter().fold(0.0, |acc, r| acc + r);
            if arm == Arm::TerminalReward {
                value += value_to_go(&inst.model, &last, remaining - path.steps(), &points, &ctx).unwrap().bound;
            }
            best = best.max(value);
            continue;
        }
        for s in next {
            let mut p = path.clone();
            p.states.push(s);
            stack.push(p);
        }
    }
    best
}
