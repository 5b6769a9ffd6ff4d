//! Sensor simulation and file round trips.

mod common;

use common::{quick_config, rng};
use isobath_core::geo::GeoPoint;
use isobath_core::gp::{Datum, GpHyperparams, GpModel};
use isobath_core::output::{
    dump_posterior, dump_prior, read_measurements, read_mission_log, write_measurements, write_mission_log, Grid,
    MEASUREMENT_HEADER, MISSION_LOG_HEADER,
};
use isobath_core::planner::rh_execute;
use isobath_core::reward::RewardConfig;
use isobath_core::sim::{traverse_segment, AnalyticField, BathymetryField, GridField, SensorConfig};
use isobath_core::vehicle::OperationalArea;
use proptest::prelude::*;
use rand::Rng;

fn lake() -> BathymetryField {
    BathymetryField::Analytic(AnalyticField::synthetic_lake(11))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn segment_sample_counts_and_times(
        seed in any::<u64>(),
        length in 0.0f64..80.0,
        speed in 0.5f64..3.0,
        rate in 1.0f64..20.0,
        dwell in 0.0f64..5.0,
        start in 0.0f64..1000.0,
    ) {
        let mut r = rng(seed);
        let from = GeoPoint::new(r.random_range(100.0..500.0), r.random_range(100.0..500.0));
        let angle: f64 = r.random_range(0.0..std::f64::consts::TAU);
        let to = GeoPoint::new(from.north + length * angle.cos(), from.east + length * angle.sin());
        let cfg = SensorConfig { sample_rate: rate, noise_std: 0.0, speed, dwell };
        let stream = traverse_segment(&from, &to, start, &lake(), &cfg, &mut r);

        let transit = from.distance(&to) / speed;
        let n_transit = (transit * rate + 1e-9).floor() as usize;
        let n_dwell = (dwell * rate + 1e-9).floor() as usize;
        prop_assert_eq!(stream.len(), n_transit + n_dwell);
        for w in stream.windows(2) {
            prop_assert!(w[1].time > w[0].time);
        }
        for (i, m) in stream.iter().enumerate() {
            prop_assert!(m.time > start && m.time <= start + transit + dwell + 1e-9);
            prop_assert!(m.position.distance(&from) <= length + 1e-9);
            prop_assert_eq!(m.depth, lake().depth(&m.position));
            if i >= n_transit {
                prop_assert_eq!(m.position, to);
            }
        }
    }
}

#[test]
fn sensor_noise_has_the_configured_spread() {
    let field = lake();
    let cfg = SensorConfig { noise_std: 2.5, ..SensorConfig::default() };
    let mut r = rng(77);
    let mut residuals = Vec::new();
    let mut from = GeoPoint::new(100.0, 100.0);
    while residuals.len() < 20_000 {
        let to = GeoPoint::new(from.north + 30.0, from.east + 5.0);
        for m in traverse_segment(&from, &to, 0.0, &field, &cfg, &mut r) {
            residuals.push(m.depth - field.depth(&m.position));
        }
        from = to;
    }
    let n = residuals.len() as f64;
    let mean = residuals.iter().sum::<f64>() / n;
    let std = (residuals.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    assert!((std - 2.5).abs() <= 0.03 * 2.5, "sample std {std}");
    assert!(mean.abs() < 0.1, "sample mean {mean}");
}

#[test]
fn synthetic_lake_crosses_the_target_level() {
    let field = lake();
    let mut shallow = 0;
    let mut deep = 0;
    for i in 0..=90 {
        for j in 0..=60 {
            let d = field.depth(&GeoPoint::new(10.0 * i as f64, 10.0 * j as f64));
            assert!(d >= 0.0);
            if d < 15.0 {
                shallow += 1;
            } else {
                deep += 1;
            }
        }
    }
    assert!(shallow > 500 && deep > 500, "{shallow} shallow, {deep} deep");
}

#[test]
fn grid_field_interpolates_its_nodes() {
    let text = "ncols 4\nnrows 3\norigin_north 100\norigin_east 200\ncellsize 10\nnodata -9999\n\
                9 10 11 12\n5 6 7 8\n1 2 3 4\n";
    let grid = GridField::parse(text).unwrap();
    // The last text row is the southernmost.
    assert_eq!(grid.depth(&GeoPoint::new(100.0, 200.0)), 1.0);
    assert_eq!(grid.depth(&GeoPoint::new(120.0, 230.0)), 12.0);
    assert!((grid.depth(&GeoPoint::new(105.0, 205.0)) - 3.5).abs() < 1e-12);
    assert!(GridField::parse("ncols 2\nnrows 2\n1 2 3 4\n").is_err());
}

#[test]
fn mission_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = quick_config(6, 100);
    cfg.reseed(4);
    let out = rh_execute(&cfg.mission().unwrap()).unwrap();

    let log_path = dir.path().join("log.csv");
    write_mission_log(&log_path, &out.log.rows).unwrap();
    let text = std::fs::read_to_string(&log_path).unwrap();
    assert_eq!(text.lines().next(), Some(MISSION_LOG_HEADER));
    let back = read_mission_log(&log_path).unwrap();
    assert_eq!(back.len(), out.log.rows.len());
    for (a, b) in back.iter().zip(&out.log.rows) {
        assert_eq!(a.step, b.step);
        assert_eq!(a.position, b.position);
        assert_eq!(a.j_anticipated, b.j_anticipated);
        assert_eq!(a.j_realized, b.j_realized);
        assert_eq!(a.b_k, b.b_k);
        assert_eq!(a.j_plus_b, b.j_plus_b);
        assert_eq!(a.epoch_ms, b.epoch_ms);
    }

    let samples_path = dir.path().join("samples.csv");
    write_measurements(&samples_path, &out.samples).unwrap();
    let text = std::fs::read_to_string(&samples_path).unwrap();
    assert_eq!(text.lines().next(), Some(MEASUREMENT_HEADER));
    assert_eq!(read_measurements(&samples_path).unwrap(), out.samples);

    write_measurements(&samples_path, &[]).unwrap();
    assert!(read_measurements(&samples_path).unwrap().is_empty());
}

#[test]
fn posterior_grids_round_trip_and_agree_with_definitions() {
    let dir = tempfile::tempdir().unwrap();
    let area = OperationalArea::rectangle(GeoPoint::new(0.0, 0.0), 200.0, 150.0).unwrap();
    let hp = GpHyperparams::default();
    let prior = quick_config(1, 1).prior().unwrap();
    let reward = RewardConfig { level: 15.0, beta: 2.0 };

    let empty = GpModel::new(hp, prior).unwrap();
    let grids = dump_posterior(&empty, &area, 10.0, &reward).unwrap();
    assert_eq!((grids.mu.spec.nrows, grids.mu.spec.ncols), (21, 16));
    assert_eq!(grids.mu.values, dump_prior(&empty, &area, 10.0).values);

    let mut model = empty.clone();
    let mut r = rng(8);
    for _ in 0..60 {
        let p = GeoPoint::new(r.random_range(0.0..200.0), r.random_range(0.0..150.0));
        model.insert(Datum::new(p, r.random_range(5.0..25.0)));
    }
    let grids = dump_posterior(&model, &area, 7.5, &reward).unwrap();
    for i in 0..grids.mu.values.len() {
        let (mu, sigma) = (grids.mu.values[i], grids.sigma.values[i]);
        assert!(sigma >= 0.0 && sigma <= hp.signal_std);
        assert_eq!(grids.ambiguity.values[i], reward.beta * sigma - (mu - reward.level).abs());
    }
    let p = grids.mu.spec.point(3, 5);
    assert_eq!(grids.mu.at(3, 5), model.predict(&p).unwrap().mean);

    for grid in [&grids.mu, &grids.sigma, &grids.ambiguity] {
        let path = dir.path().join(format!("{}.csv", grid.quantity));
        grid.write(&path).unwrap();
        assert_eq!(&Grid::read(&path).unwrap(), grid);
    }
}
