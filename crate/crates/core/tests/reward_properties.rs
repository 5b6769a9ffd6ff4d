//! Ambiguity rewards checked against a dense posterior and for their
//! ordering properties.

mod common;

use common::{dense_posterior, dense_variance, random_data, random_point, random_prior, rng};
use isobath_core::geo::GeoPoint;
use isobath_core::gp::{Datum, GpHyperparams, GpModel};
use isobath_core::reward::{
    ambiguity, anticipated_ambiguity, path_reward, point_reward, sequence_rewards, RewardConfig,
};
use proptest::prelude::*;
use rand::Rng;

fn random_model<R: Rng>(r: &mut R, hp: GpHyperparams, n: usize, extent: f64) -> GpModel {
    let mut model = GpModel::new_unthinned(hp, random_prior(r, extent)).unwrap();
    for d in random_data(r, n, extent) {
        model.insert(d);
    }
    model
}

fn random_reward<R: Rng>(r: &mut R) -> RewardConfig {
    RewardConfig { level: r.random_range(5.0..25.0), beta: r.random_range(0.5..4.0) }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn rewards_are_nonnegative_and_shrink_with_the_prefix(
        seed in any::<u64>(),
        n in 0usize..25,
        m in 0usize..8,
        extra in 1usize..5,
    ) {
        let mut r = rng(seed);
        let hp = GpHyperparams { retention_radius: r.random_range(0.0..8.0), ..GpHyperparams::default() };
        let model = random_model(&mut r, hp, n, 150.0);
        let cfg = random_reward(&mut r);
        let p = random_point(&mut r, 150.0);
        let prefix: Vec<GeoPoint> = (0..m + extra).map(|_| random_point(&mut r, 150.0)).collect();
        let short = point_reward(&model, &p, &prefix[..m], &cfg).unwrap();
        let long = point_reward(&model, &p, &prefix, &cfg).unwrap();
        prop_assert!(short >= 0.0 && long >= 0.0);
        prop_assert!(long <= short + 1e-12, "superset prefix raised reward {} -> {}", short, long);
    }

    #[test]
    fn empty_prefix_is_plain_ambiguity(seed in any::<u64>(), n in 0usize..30) {
        let mut r = rng(seed);
        let model = random_model(&mut r, GpHyperparams::default(), n, 150.0);
        let cfg = random_reward(&mut r);
        let p = random_point(&mut r, 150.0);
        let plain = ambiguity(&model.predict(&p).unwrap(), &cfg);
        prop_assert_eq!(anticipated_ambiguity(&model, &p, &[], &cfg).unwrap(), plain);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// Reward from the definition: clipped ambiguity with the variance
    /// conditioned on data and prefix, minus the same with `p` appended.
    #[test]
    fn point_reward_matches_dense_definition(seed in any::<u64>(), n in 0usize..20, m in 0usize..6) {
        let mut r = rng(seed);
        let hp = GpHyperparams::default().dense();
        let mut model = GpModel::new_unthinned(hp, random_prior(&mut r, 120.0)).unwrap();
        let data = random_data(&mut r, n, 120.0);
        for d in &data {
            model.insert(*d);
        }
        let cfg = random_reward(&mut r);
        let p = random_point(&mut r, 120.0);
        let prefix: Vec<GeoPoint> = (0..m).map(|_| random_point(&mut r, 120.0)).collect();

        let (mean, _) = dense_posterior(&hp, model.prior(), &data, &p);
        let mut inputs: Vec<GeoPoint> = data.iter().map(|d| d.position).collect();
        inputs.extend_from_slice(&prefix);
        let before = dense_variance(&hp, &inputs, &p);
        inputs.push(p);
        let after = dense_variance(&hp, &inputs, &p);
        let clipped = |v: f64| (cfg.beta * v.sqrt() - (mean - cfg.level).abs()).max(0.0);
        let expected = clipped(before) - clipped(after);

        let got = point_reward(&model, &p, &prefix, &cfg).unwrap();
        prop_assert!((got - expected).abs() <= 1e-8, "{} vs {}", got, expected);
    }

    /// Sampling exactly at the planned point realizes the anticipated σ.
    #[test]
    fn realized_sigma_equals_anticipated(seed in any::<u64>(), n in 0usize..25) {
        let mut r = rng(seed);
        let hp = GpHyperparams { retention_radius: 0.0, ..GpHyperparams::default() };
        let model = random_model(&mut r, hp, n, 150.0);
        let p = random_point(&mut r, 150.0);
        let anticipated = model.anticipated_std(&p, &[p]).unwrap();
        let mut after = model.clone();
        prop_assert!(after.insert(Datum::new(p, r.random_range(0.0..30.0) + 2.5 * r.random_range(-3.0..3.0))));
        let realized = after.predict(&p).unwrap().std();
        prop_assert!((anticipated - realized).abs() <= 1e-8);
    }

    #[test]
    fn path_reward_is_the_sum_of_sequential_rewards(seed in any::<u64>(), n in 0usize..20, m in 1usize..8) {
        let mut r = rng(seed);
        let model = random_model(&mut r, GpHyperparams::default(), n, 150.0);
        let cfg = random_reward(&mut r);
        let pts: Vec<GeoPoint> = (0..m).map(|_| random_point(&mut r, 150.0)).collect();
        let value = path_reward(&model, &pts, &cfg).unwrap();
        let steps = sequence_rewards(&model, &[], &pts, &cfg).unwrap();
        prop_assert_eq!(&value.per_step, &steps);
        for (i, s) in steps.iter().enumerate() {
            prop_assert_eq!(*s, point_reward(&model, &pts[i], &pts[..i], &cfg).unwrap());
        }
        prop_assert!((value.total - steps.iter().sum::<f64>()).abs() <= 1e-12);
    }
}

#[test]
fn far_from_the_level_with_low_sigma_earns_nothing() {
    let hp = GpHyperparams::default();
    let mut r = rng(3);
    let model = GpModel::new(hp, random_prior(&mut r, 10.0)).unwrap();
    // β σ_f = 10 < |μ − l| whenever the level is 100 m off the prior.
    let cfg = RewardConfig { level: 150.0, beta: 2.0 };
    assert_eq!(point_reward(&model, &GeoPoint::new(5.0, 5.0), &[], &cfg).unwrap(), 0.0);
}
