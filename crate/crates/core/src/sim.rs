//! Synthetic ground truth, timed depth sampling along commanded segments and
//! ingestion of the samples into the model.

use std::f64::consts::PI;
use std::fs;
use std::path::Path as FsPath;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geo::GeoPoint;
use crate::gp::{Datum, GpModel};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("cannot read bathymetry grid {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("bathymetry grid line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("sensor: {0}")]
    InvalidSensor(&'static str),
}

/// One smooth component of an analytic lake bed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Basin {
    /// Radially symmetric Gaussian bowl; a negative depth makes a shoal.
    Bowl { center: GeoPoint, depth: f64, radius: f64 },
    /// Gaussian-profile valley along a sinusoidally meandering centreline
    /// that follows the axis `start`→`end`.
    Trough { start: GeoPoint, end: GeoPoint, depth: f64, width: f64, meander_amplitude: f64, meander_wavelength: f64 },
}

impl Basin {
    fn depth_at(&self, p: &GeoPoint) -> f64 {
        match self {
            Basin::Bowl { center, depth, radius } => depth * (-p.distance_sq(center) / (2.0 * radius * radius)).exp(),
            Basin::Trough { start, end, depth, width, meander_amplitude, meander_wavelength } => {
                let dn = end.north - start.north;
                let de = end.east - start.east;
                let len = (dn * dn + de * de).sqrt();
                let (un, ue) = (dn / len, de / len);
                let rn = p.north - start.north;
                let re = p.east - start.east;
                let along = rn * un + re * ue;
                // positive to the right of the axis
                let across = re * un - rn * ue;
                let centre = meander_amplitude * (2.0 * PI * along / meander_wavelength).sin();
                let d = across - centre;
                depth * (-d * d / (2.0 * width * width)).exp()
            }
        }
    }
}

/// Sum of basins, clamped at zero depth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticField {
    pub basins: Vec<Basin>,
}

impl AnalyticField {
    /// Default synthetic lake for a 900 m × 600 m area with its south-west
    /// corner at the origin: a 28 m deep meandering valley running north
    /// around east = 330 m, plus a few seeded bumps and dips. Its 15 m
    /// contours sit roughly 170 m either side of the valley floor.
    pub fn synthetic_lake(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut basins = vec![Basin::Trough {
            start: GeoPoint::new(-100.0, 330.0),
            end: GeoPoint::new(1000.0, 330.0),
            depth: 28.0,
            width: 152.0,
            meander_amplitude: 40.0,
            meander_wavelength: 900.0,
        }];
        for _ in 0..4 {
            basins.push(Basin::Bowl {
                center: GeoPoint::new(rng.random_range(100.0..800.0), rng.random_range(150.0..450.0)),
                depth: rng.random_range(-3.0..3.0),
                radius: rng.random_range(50.0..90.0),
            });
        }
        Self { basins }
    }
}

/// Node-registered regular grid; row 0 is the northernmost row, matching the
/// ESRI ASCII layout. Nodata nodes read as zero depth (shore).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridField {
    pub ncols: usize,
    pub nrows: usize,
    pub origin_north: f64,
    pub origin_east: f64,
    pub cellsize: f64,
    /// Row-major, north row first.
    pub values: Vec<f64>,
}

impl GridField {
    pub fn parse(text: &str) -> Result<Self, SimError> {
        let err = |line: usize, message: String| SimError::Parse { line, message };
        let mut header: [Option<f64>; 6] = [None; 6];
        let mut values = Vec::new();
        let mut in_body = false;
        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let first = line.split_whitespace().next().unwrap_or_default();
            let slot = if in_body {
                None
            } else {
                match first.to_ascii_lowercase().as_str() {
                    "ncols" => Some(0),
                    "nrows" => Some(1),
                    "origin_north" | "yllcorner" | "yllcenter" => Some(2),
                    "origin_east" | "xllcorner" | "xllcenter" => Some(3),
                    "cellsize" => Some(4),
                    "nodata" | "nodata_value" => Some(5),
                    _ => None,
                }
            };
            match slot {
                Some(k) => {
                    let value =
                        line.split_whitespace().nth(1).ok_or_else(|| err(lineno, format!("`{first}` has no value")))?;
                    let v: f64 =
                        value.parse().map_err(|_| err(lineno, format!("`{first}` value `{value}` is not a number")))?;
                    header[k] = Some(v);
                }
                None => {
                    in_body = true;
                    for tok in line.split_whitespace() {
                        let v: f64 = tok.parse().map_err(|_| err(lineno, format!("`{tok}` is not a number")))?;
                        values.push((v, lineno));
                    }
                }
            }
        }
        let names = ["ncols", "nrows", "origin_north", "origin_east", "cellsize"];
        for (k, name) in names.iter().enumerate() {
            if header[k].is_none() {
                return Err(err(0, format!("missing header `{name}`")));
            }
        }
        let ncols = header[0].unwrap();
        let nrows = header[1].unwrap();
        if ncols < 1.0 || nrows < 1.0 || ncols.fract() != 0.0 || nrows.fract() != 0.0 {
            return Err(err(0, "ncols and nrows must be positive integers".into()));
        }
        let cellsize = header[4].unwrap();
        if !(cellsize > 0.0) {
            return Err(err(0, "cellsize must be positive".into()));
        }
        let (ncols, nrows) = (ncols as usize, nrows as usize);
        if values.len() != ncols * nrows {
            return Err(err(0, format!("expected {} values, found {}", ncols * nrows, values.len())));
        }
        let nodata = header[5];
        let values = values
            .into_iter()
            .map(|(v, lineno)| {
                if nodata == Some(v) {
                    Ok(0.0)
                } else if !v.is_finite() || v < 0.0 {
                    Err(err(lineno, format!("depth {v} must be finite and non-negative")))
                } else {
                    Ok(v)
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { ncols, nrows, origin_north: header[2].unwrap(), origin_east: header[3].unwrap(), cellsize, values })
    }

    pub fn load(path: &FsPath) -> Result<Self, SimError> {
        let text =
            fs::read_to_string(path).map_err(|source| SimError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text)
    }

    /// Value at column `c` and row `r` counted from the south.
    fn node(&self, c: usize, r_from_south: usize) -> f64 {
        let row = self.nrows - 1 - r_from_south;
        self.values[row * self.ncols + c]
    }

    /// Bilinear interpolation, clamped to the grid edges.
    pub fn depth(&self, p: &GeoPoint) -> f64 {
        let max_x = (self.ncols - 1) as f64;
        let max_y = (self.nrows - 1) as f64;
        let x = ((p.east - self.origin_east) / self.cellsize).clamp(0.0, max_x);
        let y = ((p.north - self.origin_north) / self.cellsize).clamp(0.0, max_y);
        let c0 = (x.floor() as usize).min(self.ncols.saturating_sub(2));
        let r0 = (y.floor() as usize).min(self.nrows.saturating_sub(2));
        let c1 = (c0 + 1).min(self.ncols - 1);
        let r1 = (r0 + 1).min(self.nrows - 1);
        let tx = x - c0 as f64;
        let ty = y - r0 as f64;
        let south = self.node(c0, r0) * (1.0 - tx) + self.node(c1, r0) * tx;
        let north = self.node(c0, r1) * (1.0 - tx) + self.node(c1, r1) * tx;
        south * (1.0 - ty) + north * ty
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum BathymetryField {
    Analytic(AnalyticField),
    Gridded(GridField),
}

impl BathymetryField {
    pub fn depth(&self, p: &GeoPoint) -> f64 {
        match self {
            BathymetryField::Analytic(f) => f.basins.iter().map(|b| b.depth_at(p)).sum::<f64>().max(0.0),
            BathymetryField::Gridded(g) => g.depth(p),
        }
    }
}

pub fn ground_truth_depth(field: &BathymetryField, p: &GeoPoint) -> f64 {
    field.depth(p)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorConfig {
    pub sample_rate: f64,
    pub noise_std: f64,
    pub speed: f64,
    pub dwell: f64,
}

impl Default for SensorConfig {
    fn default() -> Self {
        Self { sample_rate: 10.0, noise_std: 2.5, speed: 1.6, dwell: 3.0 }
    }
}

impl SensorConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.sample_rate > 0.0 && self.sample_rate.is_finite()) {
            return Err(SimError::InvalidSensor("sample rate must be positive"));
        }
        if !(self.noise_std >= 0.0 && self.noise_std.is_finite()) {
            return Err(SimError::InvalidSensor("noise std must be non-negative"));
        }
        if !(self.speed > 0.0 && self.speed.is_finite()) {
            return Err(SimError::InvalidSensor("speed must be positive"));
        }
        if !(self.dwell >= 0.0 && self.dwell.is_finite()) {
            return Err(SimError::InvalidSensor("dwell must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub time: f64,
    pub position: GeoPoint,
    pub depth: f64,
}

/// Samples taken while tracking `from`→`to` at constant speed, then while
/// holding at `to` for the dwell time. Times start after `start_time`.
///
/// Transit samples fall at `start_time + i / rate` for `i = 1..=⌊T·rate⌋`,
/// `T = ‖to − from‖ / speed`; dwell samples at `start_time + T + j / rate`
/// for `j = 1..=⌊dwell·rate⌋`.
pub fn traverse_segment<R: Rng + ?Sized>(
    from: &GeoPoint,
    to: &GeoPoint,
    start_time: f64,
    field: &BathymetryField,
    cfg: &SensorConfig,
    rng: &mut R,
) -> Vec<Measurement> {
    let length = from.distance(to);
    let transit = length / cfg.speed;
    let n_transit = (transit * cfg.sample_rate + 1e-9).floor() as usize;
    let n_dwell = (cfg.dwell * cfg.sample_rate + 1e-9).floor() as usize;
    let noise = Normal::new(0.0, cfg.noise_std).expect("noise std validated");
    let mut out = Vec::with_capacity(n_transit + n_dwell);
    let mut sample = |time: f64, position: GeoPoint, rng: &mut R| {
        let depth = field.depth(&position) + noise.sample(rng);
        out.push(Measurement { time, position, depth });
    };
    for i in 1..=n_transit {
        let dt = i as f64 / cfg.sample_rate;
        let frac = (dt / transit).min(1.0);
        let position =
            GeoPoint::new(from.north + frac * (to.north - from.north), from.east + frac * (to.east - from.east));
        sample(start_time + dt, position, rng);
    }
    for j in 1..=n_dwell {
        sample(start_time + transit + j as f64 / cfg.sample_rate, *to, rng);
    }
    out
}

/// Offers every measurement to the model in time order; returns, per
/// measurement, whether it was retained.
pub fn ingest(model: &mut GpModel, stream: &[Measurement]) -> Vec<bool> {
    stream.iter().map(|m| model.insert(Datum::new(m.position, m.depth))).collect()
}
