//! Mission configuration: flat `section.key = value` text.
//!
//! ```text
//! # comments run to end of line
//! gp.sigma_f = 5.0
//! vehicle.actions_deg = -90, -45, -15, 0, 15, 45, 90
//! area.polygon = 0,0, 900,0, 900,600, 0,600    # north,east pairs
//! ```
//!
//! Every key is optional; omitted keys take the defaults in
//! [`MissionConfig::default`]. Unknown or repeated keys are errors. Relative
//! file paths resolve against the directory holding the config file.

use std::collections::HashMap;
use std::fmt;
use std::path::{Path as FsPath, PathBuf};

use thiserror::Error;

use crate::baselines::{LawnmowerSpec, TurnSide};
use crate::geo::GeoPoint;
use crate::gp::{GpHyperparams, PriorMeanSpec};
use crate::planner::{Mission, PlannerConfig};
use crate::reward::RewardConfig;
use crate::sim::{AnalyticField, BathymetryField, GridField, SensorConfig};
use crate::vehicle::{ActionSet, OperationalArea, VehicleState};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` given twice")]
    DuplicateKey { line: usize, key: String },
    #[error("{}`{key}`: {message}", line_prefix(*.line))]
    Invalid { key: &'static str, line: Option<usize>, message: String },
}

fn line_prefix(line: Option<usize>) -> String {
    line.map(|l| format!("line {l}: ")).unwrap_or_default()
}

/// Which planner arm(s) a run executes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    TerminalRewards,
    Baseline,
    Both,
}

impl Mode {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "terminal-rewards" | "terminal" => Some(Mode::TerminalRewards),
            "baseline" => Some(Mode::Baseline),
            "both" => Some(Mode::Both),
            _ => None,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::TerminalRewards => "terminal-rewards",
            Mode::Baseline => "baseline",
            Mode::Both => "both",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BathymetrySource {
    Synthetic { seed: u64 },
    Grid(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MissionConfig {
    pub mode: Mode,
    pub start: GeoPoint,
    pub start_heading_deg: f64,
    /// Polygon vertices as (north, east).
    pub area: Vec<GeoPoint>,
    pub prior_line: (GeoPoint, GeoPoint),
    pub prior_falloff: f64,
    pub prior_max_depth: f64,
    pub gp: GpHyperparams,
    pub reward: RewardConfig,
    pub actions_deg: Vec<f64>,
    pub step_length: f64,
    pub lawnmower: LawnmowerSpec,
    pub planner: PlannerConfig,
    pub sensor: SensorConfig,
    pub bathymetry: BathymetrySource,
    pub sensor_seed: u64,
    pub output_dir: PathBuf,
    pub grid_resolution: f64,
    pub timing: bool,
    /// Line of each key that was set explicitly, for diagnostics.
    lines: HashMap<&'static str, usize>,
}

impl Default for MissionConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Both,
            start: GeoPoint::new(60.0, 300.0),
            start_heading_deg: 0.0,
            area: vec![
                GeoPoint::new(0.0, 0.0),
                GeoPoint::new(900.0, 0.0),
                GeoPoint::new(900.0, 600.0),
                GeoPoint::new(0.0, 600.0),
            ],
            prior_line: (GeoPoint::new(0.0, 300.0), GeoPoint::new(900.0, 300.0)),
            prior_falloff: 300.0,
            prior_max_depth: 25.0,
            gp: GpHyperparams::default(),
            reward: RewardConfig::default(),
            actions_deg: vec![-90.0, -45.0, -15.0, 0.0, 15.0, 45.0, 90.0],
            step_length: 30.0,
            lawnmower: LawnmowerSpec::default(),
            planner: PlannerConfig::default(),
            sensor: SensorConfig::default(),
            bathymetry: BathymetrySource::Synthetic { seed: 11 },
            sensor_seed: 23,
            output_dir: PathBuf::from("out"),
            grid_resolution: 10.0,
            timing: false,
            lines: HashMap::new(),
        }
    }
}

/// Every recognized key, in the order `to_text` writes them.
const KEYS: &[&str] = &[
    "mission.mode",
    "mission.start",
    "mission.start_heading_deg",
    "area.polygon",
    "prior.line",
    "prior.falloff",
    "prior.max_depth",
    "gp.sigma_f",
    "gp.length_scale",
    "gp.sigma_n",
    "gp.delta_f",
    "gp.delta_c",
    "reward.level",
    "reward.beta",
    "vehicle.actions_deg",
    "vehicle.step_length",
    "lawnmower.track_spacing",
    "lawnmower.leg_length",
    "lawnmower.max_legs",
    "lawnmower.turn_side",
    "planner.horizon",
    "planner.execution_horizon",
    "planner.mission_length",
    "planner.exploration",
    "planner.iterations",
    "planner.seed",
    "sensor.rate_hz",
    "sensor.noise_std",
    "sensor.speed",
    "sensor.dwell_s",
    "sim.bathymetry",
    "sim.grid_file",
    "sim.field_seed",
    "sim.sensor_seed",
    "output.dir",
    "output.grid_resolution",
    "output.timing",
];

struct Entry<'a> {
    key: &'static str,
    line: usize,
    value: &'a str,
}

impl Entry<'_> {
    fn bad(&self, message: impl Into<String>) -> ConfigError {
        ConfigError::Invalid { key: self.key, line: Some(self.line), message: message.into() }
    }

    fn f64(&self) -> Result<f64, ConfigError> {
        let v: f64 = self.value.parse().map_err(|_| self.bad(format!("`{}` is not a number", self.value)))?;
        if !v.is_finite() {
            return Err(self.bad("value must be finite"));
        }
        Ok(v)
    }

    fn u64(&self) -> Result<u64, ConfigError> {
        self.value.parse().map_err(|_| self.bad(format!("`{}` is not a non-negative integer", self.value)))
    }

    fn usize(&self) -> Result<usize, ConfigError> {
        self.value.parse().map_err(|_| self.bad(format!("`{}` is not a non-negative integer", self.value)))
    }

    fn bool(&self) -> Result<bool, ConfigError> {
        match self.value {
            "true" | "yes" | "1" => Ok(true),
            "false" | "no" | "0" => Ok(false),
            other => Err(self.bad(format!("`{other}` is not a boolean"))),
        }
    }

    fn list(&self) -> Result<Vec<f64>, ConfigError> {
        self.value
            .split(',')
            .map(|s| {
                let s = s.trim();
                match s.parse::<f64>() {
                    Ok(v) if v.is_finite() => Ok(v),
                    _ => Err(self.bad(format!("`{s}` is not a finite number"))),
                }
            })
            .collect()
    }

    fn points(&self, expected: Option<usize>) -> Result<Vec<GeoPoint>, ConfigError> {
        let values = self.list()?;
        if values.len() % 2 != 0 {
            return Err(self.bad("expected north,east pairs"));
        }
        let points: Vec<GeoPoint> = values.chunks(2).map(|c| GeoPoint::new(c[0], c[1])).collect();
        if let Some(n) = expected {
            if points.len() != n {
                return Err(self.bad(format!("expected {n} north,east pair(s), got {}", points.len())));
            }
        }
        Ok(points)
    }
}

impl MissionConfig {
    /// Reads and validates a config file. Relative paths inside it resolve
    /// against its directory.
    pub fn load(path: &FsPath) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        let base = path.parent().unwrap_or_else(|| FsPath::new("."));
        Self::parse(&text, base)
    }

    /// Parses and validates config text; `base` anchors relative paths.
    pub fn parse(text: &str, base: &FsPath) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        let mut field_seed = None;
        let mut bathymetry_kind: Option<(usize, String)> = None;
        let mut grid_file: Option<PathBuf> = None;

        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line,
                message: format!("expected `key = value`, got `{content}`"),
            })?;
            let key = key.trim();
            let value = value.trim();
            let key = *KEYS
                .iter()
                .find(|k| **k == key)
                .ok_or_else(|| ConfigError::UnknownKey { line, key: key.to_string() })?;
            if cfg.lines.insert(key, line).is_some() {
                return Err(ConfigError::DuplicateKey { line, key: key.to_string() });
            }
            if value.is_empty() {
                return Err(ConfigError::Invalid { key, line: Some(line), message: "missing value".into() });
            }
            let e = Entry { key, line, value };
            match key {
                "mission.mode" => {
                    cfg.mode = Mode::parse(value).ok_or_else(|| e.bad("expected terminal-rewards, baseline or both"))?
                }
                "mission.start" => cfg.start = e.points(Some(1))?[0],
                "mission.start_heading_deg" => cfg.start_heading_deg = e.f64()?,
                "area.polygon" => cfg.area = e.points(None)?,
                "prior.line" => {
                    let p = e.points(Some(2))?;
                    cfg.prior_line = (p[0], p[1]);
                }
                "prior.falloff" => cfg.prior_falloff = e.f64()?,
                "prior.max_depth" => cfg.prior_max_depth = e.f64()?,
                "gp.sigma_f" => cfg.gp.signal_std = e.f64()?,
                "gp.length_scale" => cfg.gp.length_scale = e.f64()?,
                "gp.sigma_n" => cfg.gp.noise_std = e.f64()?,
                "gp.delta_f" => cfg.gp.retention_radius = e.f64()?,
                "gp.delta_c" => cfg.gp.locality_radius = e.f64()?,
                "reward.level" => cfg.reward.level = e.f64()?,
                "reward.beta" => cfg.reward.beta = e.f64()?,
                "vehicle.actions_deg" => cfg.actions_deg = e.list()?,
                "vehicle.step_length" => cfg.step_length = e.f64()?,
                "lawnmower.track_spacing" => cfg.lawnmower.track_spacing = e.f64()?,
                "lawnmower.leg_length" => cfg.lawnmower.leg_length = e.f64()?,
                "lawnmower.max_legs" => cfg.lawnmower.max_legs = e.usize()?,
                "lawnmower.turn_side" => {
                    cfg.lawnmower.turn_side = match value {
                        "first-feasible" => TurnSide::FirstFeasible,
                        "left" => TurnSide::Left,
                        "right" => TurnSide::Right,
                        _ => return Err(e.bad("expected first-feasible, left or right")),
                    }
                }
                "planner.horizon" => cfg.planner.planning_horizon = e.usize()?,
                "planner.execution_horizon" => cfg.planner.execution_horizon = e.usize()?,
                "planner.mission_length" => cfg.planner.mission_length = e.usize()?,
                "planner.exploration" => cfg.planner.exploration = e.f64()?,
                "planner.iterations" => cfg.planner.iterations = e.usize()?,
                "planner.seed" => cfg.planner.seed = e.u64()?,
                "sensor.rate_hz" => cfg.sensor.sample_rate = e.f64()?,
                "sensor.noise_std" => cfg.sensor.noise_std = e.f64()?,
                "sensor.speed" => cfg.sensor.speed = e.f64()?,
                "sensor.dwell_s" => cfg.sensor.dwell = e.f64()?,
                "sim.bathymetry" => bathymetry_kind = Some((line, value.to_string())),
                "sim.grid_file" => grid_file = Some(base.join(value)),
                "sim.field_seed" => field_seed = Some(e.u64()?),
                "sim.sensor_seed" => cfg.sensor_seed = e.u64()?,
                "output.dir" => cfg.output_dir = base.join(value),
                "output.grid_resolution" => cfg.grid_resolution = e.f64()?,
                "output.timing" => cfg.timing = e.bool()?,
                _ => unreachable!("key table and match arms agree"),
            }
        }
        if !cfg.lines.contains_key("output.dir") {
            cfg.output_dir = base.join(&cfg.output_dir);
        }

        let kind = bathymetry_kind.as_ref().map_or("synthetic", |(_, k)| k.as_str());
        cfg.bathymetry = match kind {
            "synthetic" => BathymetrySource::Synthetic { seed: field_seed.unwrap_or(11) },
            "grid" => BathymetrySource::Grid(grid_file.ok_or_else(|| ConfigError::Invalid {
                key: "sim.grid_file",
                line: bathymetry_kind.as_ref().map(|(l, _)| *l),
                message: "required when sim.bathymetry = grid".into(),
            })?),
            other => {
                return Err(ConfigError::Invalid {
                    key: "sim.bathymetry",
                    line: bathymetry_kind.as_ref().map(|(l, _)| *l),
                    message: format!("`{other}` is not one of synthetic, grid"),
                })
            }
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn invalid(&self, key: &'static str, message: impl Into<String>) -> ConfigError {
        ConfigError::Invalid { key, line: self.lines.get(key).copied(), message: message.into() }
    }

    /// Checks every component invariant; reports the offending key.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive: [(&'static str, f64); 14] = [
            ("prior.falloff", self.prior_falloff),
            ("prior.max_depth", self.prior_max_depth),
            ("gp.sigma_f", self.gp.signal_std),
            ("gp.length_scale", self.gp.length_scale),
            ("gp.sigma_n", self.gp.noise_std),
            ("gp.delta_f", self.gp.retention_radius),
            ("gp.delta_c", self.gp.locality_radius),
            ("reward.beta", self.reward.beta),
            ("vehicle.step_length", self.step_length),
            ("lawnmower.track_spacing", self.lawnmower.track_spacing),
            ("lawnmower.leg_length", self.lawnmower.leg_length),
            ("sensor.rate_hz", self.sensor.sample_rate),
            ("sensor.speed", self.sensor.speed),
            ("output.grid_resolution", self.grid_resolution),
        ];
        for (key, value) in positive {
            if !(value > 0.0) {
                return Err(self.invalid(key, format!("must be positive, got {value}")));
            }
        }
        if !(self.sensor.noise_std >= 0.0) {
            return Err(self.invalid("sensor.noise_std", "must be non-negative"));
        }
        if !(self.sensor.dwell >= 0.0) {
            return Err(self.invalid("sensor.dwell_s", "must be non-negative"));
        }
        if self.prior_line.0.distance(&self.prior_line.1) == 0.0 {
            return Err(self.invalid("prior.line", "endpoints must be distinct"));
        }
        if self.lawnmower.leg_length < self.step_length {
            return Err(self.invalid("lawnmower.leg_length", "must be at least one step length"));
        }
        if self.lawnmower.max_legs == 0 {
            return Err(self.invalid("lawnmower.max_legs", "must be at least 1"));
        }
        let p = &self.planner;
        if p.execution_horizon < 1 || p.execution_horizon > p.planning_horizon {
            return Err(self.invalid("planner.execution_horizon", "need 1 <= execution_horizon <= horizon"));
        }
        if p.mission_length > 0 && p.planning_horizon > p.mission_length {
            return Err(self.invalid("planner.horizon", "must not exceed planner.mission_length"));
        }
        if !(p.exploration >= 0.0) {
            return Err(self.invalid("planner.exploration", "must be non-negative"));
        }
        if p.iterations < 1 {
            return Err(self.invalid("planner.iterations", "must be at least 1"));
        }
        let actions = self.action_set()?;
        if actions.index_of(0.0).is_none() {
            return Err(self.invalid("vehicle.actions_deg", "must include 0 for lawnmower legs"));
        }
        let area = self.operational_area()?;
        if !area.contains(&self.start) {
            return Err(self.invalid("mission.start", "start position is outside area.polygon"));
        }
        if let BathymetrySource::Grid(path) = &self.bathymetry {
            if !path.is_file() {
                return Err(self.invalid("sim.grid_file", format!("{} does not exist", path.display())));
            }
        }
        Ok(())
    }

    pub fn action_set(&self) -> Result<ActionSet, ConfigError> {
        ActionSet::from_degrees(&self.actions_deg, self.step_length)
            .map_err(|e| self.invalid("vehicle.actions_deg", e.to_string()))
    }

    pub fn operational_area(&self) -> Result<OperationalArea, ConfigError> {
        OperationalArea::new(self.area.clone()).map_err(|e| self.invalid("area.polygon", e.to_string()))
    }

    pub fn prior(&self) -> Result<PriorMeanSpec, ConfigError> {
        PriorMeanSpec::new(self.prior_line.0, self.prior_line.1, self.prior_falloff, self.prior_max_depth)
            .map_err(|e| self.invalid("prior.line", e.to_string()))
    }

    /// Loads or generates the ground-truth field.
    pub fn field(&self) -> Result<BathymetryField, ConfigError> {
        match &self.bathymetry {
            BathymetrySource::Synthetic { seed } => Ok(BathymetryField::Analytic(AnalyticField::synthetic_lake(*seed))),
            BathymetrySource::Grid(path) => GridField::load(path)
                .map(BathymetryField::Gridded)
                .map_err(|e| self.invalid("sim.grid_file", e.to_string())),
        }
    }

    pub fn mission(&self) -> Result<Mission, ConfigError> {
        Ok(Mission {
            area: self.operational_area()?,
            prior: self.prior()?,
            gp: self.gp,
            reward: self.reward,
            actions: self.action_set()?,
            lawnmower: self.lawnmower,
            planner: self.planner,
            sensor: self.sensor,
            field: self.field()?,
            start: VehicleState::new(self.start_heading_deg.to_radians(), self.start),
            sensor_seed: self.sensor_seed,
            timing: self.timing,
        })
    }

    /// Overrides the planner and sensor seeds.
    pub fn reseed(&mut self, seed: u64) {
        self.planner.seed = seed;
        self.sensor_seed = seed.wrapping_add(1);
    }

    /// Config text that parses back to this configuration.
    pub fn to_text(&self) -> String {
        let pairs =
            |pts: &[GeoPoint]| pts.iter().map(|p| format!("{},{}", p.north, p.east)).collect::<Vec<_>>().join(", ");
        let list = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
        let mut out = String::new();
        let mut put = |k: &str, v: String| out.push_str(&format!("{k} = {v}\n"));
        put("mission.mode", self.mode.to_string());
        put("mission.start", pairs(&[self.start]));
        put("mission.start_heading_deg", self.start_heading_deg.to_string());
        put("area.polygon", pairs(&self.area));
        put("prior.line", pairs(&[self.prior_line.0, self.prior_line.1]));
        put("prior.falloff", self.prior_falloff.to_string());
        put("prior.max_depth", self.prior_max_depth.to_string());
        put("gp.sigma_f", self.gp.signal_std.to_string());
        put("gp.length_scale", self.gp.length_scale.to_string());
        put("gp.sigma_n", self.gp.noise_std.to_string());
        put("gp.delta_f", self.gp.retention_radius.to_string());
        put("gp.delta_c", self.gp.locality_radius.to_string());
        put("reward.level", self.reward.level.to_string());
        put("reward.beta", self.reward.beta.to_string());
        put("vehicle.actions_deg", list(&self.actions_deg));
        put("vehicle.step_length", self.step_length.to_string());
        put("lawnmower.track_spacing", self.lawnmower.track_spacing.to_string());
        put("lawnmower.leg_length", self.lawnmower.leg_length.to_string());
        put("lawnmower.max_legs", self.lawnmower.max_legs.to_string());
        put(
            "lawnmower.turn_side",
            match self.lawnmower.turn_side {
                TurnSide::FirstFeasible => "first-feasible",
                TurnSide::Left => "left",
                TurnSide::Right => "right",
            }
            .to_string(),
        );
        put("planner.horizon", self.planner.planning_horizon.to_string());
        put("planner.execution_horizon", self.planner.execution_horizon.to_string());
        put("planner.mission_length", self.planner.mission_length.to_string());
        put("planner.exploration", self.planner.exploration.to_string());
        put("planner.iterations", self.planner.iterations.to_string());
        put("planner.seed", self.planner.seed.to_string());
        put("sensor.rate_hz", self.sensor.sample_rate.to_string());
        put("sensor.noise_std", self.sensor.noise_std.to_string());
        put("sensor.speed", self.sensor.speed.to_string());
        put("sensor.dwell_s", self.sensor.dwell.to_string());
        match &self.bathymetry {
            BathymetrySource::Synthetic { seed } => {
                put("sim.bathymetry", "synthetic".into());
                put("sim.field_seed", seed.to_string());
            }
            BathymetrySource::Grid(path) => {
                put("sim.bathymetry", "grid".into());
                put("sim.grid_file", path.display().to_string());
            }
        }
        put("sim.sensor_seed", self.sensor_seed.to_string());
        put("output.dir", self.output_dir.display().to_string());
        put("output.grid_resolution", self.grid_resolution.to_string());
        put("output.timing", self.timing.to_string());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<MissionConfig, ConfigError> {
        MissionConfig::parse(text, FsPath::new("/cfg"))
    }

    #[test]
    fn empty_text_gives_defaults() {
        let cfg = parse("# nothing\n\n").unwrap();
        assert_eq!(cfg.gp, GpHyperparams::default());
        assert_eq!(cfg.planner.planning_horizon, 5);
        assert_eq!(cfg.planner.mission_length, 100);
        assert_eq!(cfg.actions_deg, vec![-90.0, -45.0, -15.0, 0.0, 15.0, 45.0, 90.0]);
        assert_eq!(cfg.output_dir, PathBuf::from("/cfg/out"));
        cfg.mission().unwrap();
    }

    #[test]
    fn values_and_comments() {
        let cfg = parse(
            "gp.sigma_f = 4.5   # trailing comment\nvehicle.actions_deg = -45, 0, 45\n\
             mission.mode = baseline\nmission.start = 100, 200\noutput.dir = runs/a\n",
        )
        .unwrap();
        assert_eq!(cfg.gp.signal_std, 4.5);
        assert_eq!(cfg.actions_deg, vec![-45.0, 0.0, 45.0]);
        assert_eq!(cfg.mode, Mode::Baseline);
        assert_eq!(cfg.start, GeoPoint::new(100.0, 200.0));
        assert_eq!(cfg.output_dir, PathBuf::from("/cfg/runs/a"));
    }

    #[test]
    fn errors_carry_line_and_key() {
        let err = parse("\n\ngp.sigma_f = -1\n").unwrap_err();
        assert!(matches!(err, ConfigError::Invalid { key: "gp.sigma_f", line: Some(3), .. }), "{err}");
        assert!(err.to_string().starts_with("line 3: `gp.sigma_f`"));

        let err = parse("gp.sigma = 1\n").unwrap_err();
        assert!(matches!(err, ConfigError::UnknownKey { line: 1, .. }));
        let err = parse("gp.sigma_f = 1\ngp.sigma_f = 2\n").unwrap_err();
        assert!(matches!(err, ConfigError::DuplicateKey { line: 2, .. }));
        let err = parse("just words\n").unwrap_err();
        assert!(matches!(err, ConfigError::Syntax { line: 1, .. }));
        let err = parse("planner.iterations = many\n").unwrap_err();
        assert!(matches!(err, ConfigError::Invalid { key: "planner.iterations", line: Some(1), .. }));
    }

    #[test]
    fn cross_key_checks() {
        let err = parse("planner.execution_horizon = 6\n").unwrap_err();
        assert!(matches!(err, ConfigError::Invalid { key: "planner.execution_horizon", .. }));
        let err = parse("mission.start = 1000, 0\n").unwrap_err();
        assert!(matches!(err, ConfigError::Invalid { key: "mission.start", line: Some(1), .. }));
        let err = parse("vehicle.actions_deg = -45, 45\n").unwrap_err();
        assert!(matches!(err, ConfigError::Invalid { key: "vehicle.actions_deg", .. }));
        let err = parse("sim.bathymetry = grid\nsim.grid_file = nope.asc\n").unwrap_err();
        assert!(matches!(err, ConfigError::Invalid { key: "sim.grid_file", .. }));
        let err = parse("sim.bathymetry = grid\n").unwrap_err();
        assert!(matches!(err, ConfigError::Invalid { key: "sim.grid_file", line: Some(1), .. }));
    }

    #[test]
    fn text_round_trip() {
        let mut cfg = parse("gp.sigma_f = 4.25\nplanner.seed = 99\nsim.field_seed = 5\n").unwrap();
        cfg.lines.clear();
        let mut back = parse(&cfg.to_text()).unwrap();
        back.lines.clear();
        assert_eq!(back, cfg);
    }
}
