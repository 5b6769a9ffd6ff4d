//! Ambiguity-reduction reward for locating a depth contour.
//!
//! The ambiguity of a point is `β σ − |μ − level|`: positive while the model
//! cannot tell (at the `β` confidence multiplier) which side of the contour
//! the point lies on. A planned sample earns the drop in clipped ambiguity it
//! is expected to cause, given the planned samples that precede it.

use serde::{Deserialize, Serialize};

use crate::geo::GeoPoint;
use crate::gp::{GpError, GpModel, Prediction};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardConfig {
    /// Target isobath depth in meters.
    pub level: f64,
    pub beta: f64,
}

impl Default for RewardConfig {
    fn default() -> Self {
        Self { level: 15.0, beta: 2.0 }
    }
}

/// Rewards earned along a sequence of planned samples.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PathValue {
    pub total: f64,
    pub per_step: Vec<f64>,
}

impl PathValue {
    fn from_steps(per_step: Vec<f64>) -> Self {
        Self { total: per_step.iter().sum(), per_step }
    }
}

pub fn ambiguity(pred: &Prediction, cfg: &RewardConfig) -> f64 {
    cfg.beta * pred.std() - (pred.mean - cfg.level).abs()
}

/// Ambiguity at `p` with the variance conditioned on the planned locations as
/// well as the data. The mean term uses measured data only.
pub fn anticipated_ambiguity(
    model: &GpModel,
    p: &GeoPoint,
    planned: &[GeoPoint],
    cfg: &RewardConfig,
) -> Result<f64, GpError> {
    let c = model.conditional(p, planned)?;
    Ok(cfg.beta * c.anticipated_variance.sqrt() - (c.mean - cfg.level).abs())
}

/// Anticipated reduction in clipped ambiguity from sampling `p` after `prefix`.
pub fn point_reward(model: &GpModel, p: &GeoPoint, prefix: &[GeoPoint], cfg: &RewardConfig) -> Result<f64, GpError> {
    let c = model.conditional(p, prefix)?;
    let before = c.anticipated_variance;
    // Appending p itself is a rank-one update at the query point:
    // σ²_new = σ² σ_n² / (σ² + σ_n²).
    let noise = model.hyperparams().noise_variance();
    let after = before * noise / (before + noise);
    let offset = (c.mean - cfg.level).abs();
    let a_before = cfg.beta * before.sqrt() - offset;
    let a_after = cfg.beta * after.sqrt() - offset;
    Ok(a_before.max(0.0) - a_after.max(0.0))
}

/// Per-step rewards of `points` sampled in order, all conditioned on an
/// already-planned `prefix`.
pub fn sequence_rewards(
    model: &GpModel,
    prefix: &[GeoPoint],
    points: &[GeoPoint],
    cfg: &RewardConfig,
) -> Result<Vec<f64>, GpError> {
    let mut planned: Vec<GeoPoint> = Vec::with_capacity(prefix.len() + points.len());
    planned.extend_from_slice(prefix);
    let mut rewards = Vec::with_capacity(points.len());
    for p in points {
        rewards.push(point_reward(model, p, &planned, cfg)?);
        planned.push(*p);
    }
    Ok(rewards)
}

/// Sum of point rewards along `points`, each conditioned on the points before it.
pub fn path_reward(model: &GpModel, points: &[GeoPoint], cfg: &RewardConfig) -> Result<PathValue, GpError> {
    Ok(PathValue::from_steps(sequence_rewards(model, &[], points, cfg)?))
}

/// Realized ambiguity reduction at a waypoint, clipped the same way as
/// [`point_reward`]. Negative when new data moved the estimate toward the
/// level faster than it shrank the variance.
pub fn realized_reduction(before: f64, after: f64) -> f64 {
    before.max(0.0) - after.max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gp::{GpHyperparams, PriorMeanSpec};

    /// Prior whose 15 m contour runs along east = 0 (line at east = -c √0.4).
    fn model_with_contour_at_origin() -> GpModel {
        let c = 300.0;
        let e = -c * 0.4f64.sqrt();
        let prior = PriorMeanSpec::new(GeoPoint::new(0.0, e), GeoPoint::new(1.0, e), c, 25.0).unwrap();
        GpModel::new(GpHyperparams::default(), prior).unwrap()
    }

    #[test]
    fn ambiguity_examples() {
        let cfg = RewardConfig::default();
        assert_eq!(ambiguity(&Prediction { mean: 15.0, variance: 0.0 }, &cfg), 0.0);
        assert_eq!(ambiguity(&Prediction { mean: 10.0, variance: 4.0 }, &cfg), -1.0);
        let a = ambiguity(&Prediction { mean: 16.0, variance: 5.0 }, &cfg);
        assert!((a - (2.0 * 5.0f64.sqrt() - 1.0)).abs() < 1e-12);
        assert!((a - 3.472).abs() < 1e-3);
    }

    #[test]
    fn fresh_point_on_contour() {
        let model = model_with_contour_at_origin();
        let cfg = RewardConfig::default();
        let p = GeoPoint::new(0.0, 0.0);
        assert!((model.prior_mean(&p) - 15.0).abs() < 1e-12);
        let r = point_reward(&model, &p, &[], &cfg).unwrap();
        let expected = 10.0 - 2.0 * 5.0f64.sqrt();
        assert!((r - expected).abs() < 1e-12);
        assert!((r - 5.528).abs() < 1e-3);
    }

    #[test]
    fn far_from_contour_is_worthless() {
        let model = model_with_contour_at_origin();
        let cfg = RewardConfig::default();
        // prior depth 0 here, |μ − l| = 15 > β σ_f
        let p = GeoPoint::new(0.0, 500.0);
        assert_eq!(point_reward(&model, &p, &[], &cfg).unwrap(), 0.0);
    }

    #[test]
    fn empty_prefix_matches_plain_ambiguity() {
        let model = model_with_contour_at_origin();
        let cfg = RewardConfig::default();
        let p = GeoPoint::new(3.0, 20.0);
        let plain = ambiguity(&model.predict(&p).unwrap(), &cfg);
        assert_eq!(anticipated_ambiguity(&model, &p, &[], &cfg).unwrap(), plain);
        let far = [GeoPoint::new(3.0, 100.0)];
        assert_eq!(anticipated_ambiguity(&model, &p, &far, &cfg).unwrap(), plain);
        let near = anticipated_ambiguity(&model, &p, &[p], &cfg).unwrap();
        assert!(near < plain);
    }

    #[test]
    fn path_reward_collapses() {
        let model = model_with_contour_at_origin();
        let cfg = RewardConfig::default();
        assert_eq!(path_reward(&model, &[], &cfg).unwrap().total, 0.0);
        let p = GeoPoint::new(0.0, 10.0);
        let single = path_reward(&model, &[p], &cfg).unwrap();
        assert_eq!(single.total, point_reward(&model, &p, &[], &cfg).unwrap());
        let twice = path_reward(&model, &[p, p], &cfg).unwrap();
        assert!(twice.per_step[1] < twice.per_step[0]);
        assert_eq!(twice.total, twice.per_step[0] + twice.per_step[1]);
    }

    #[test]
    fn realized_reduction_examples() {
        assert_eq!(realized_reduction(4.2, 4.2), 0.0);
        assert!((realized_reduction(10.0, 4.472) - 5.528).abs() < 1e-12);
        assert_eq!(realized_reduction(-1.0, -3.0), 0.0);
    }
}
