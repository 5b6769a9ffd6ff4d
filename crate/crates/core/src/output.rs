//! Mission artifacts: CSV logs, posterior grids and the run summary.
//!
//! Floats are written in Rust's shortest round-trip form, so reading a file
//! back reproduces the in-memory values exactly.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path as FsPath;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geo::GeoPoint;
use crate::gp::{GpError, GpModel};
use crate::planner::{EpochRecord, MissionLog, MissionSummary, SampleRecord, StepRecord};
use crate::reward::{ambiguity, RewardConfig};
use crate::vehicle::OperationalArea;

pub const MISSION_LOG_HEADER: &str = "step,north_m,east_m,J_anticipated,J_realized,B_k,J_plus_B,epoch_ms";
pub const MEASUREMENT_HEADER: &str = "time_s,north_m,east_m,depth_m,retained";

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Csv { path: String, source: csv::Error },
    #[error("{path}: {message}")]
    Format { path: String, message: String },
    #[error(transparent)]
    Model(#[from] GpError),
}

fn io_err(path: &FsPath) -> impl FnOnce(std::io::Error) -> OutputError + '_ {
    move |source| OutputError::Io { path: path.display().to_string(), source }
}

fn csv_err(path: &FsPath) -> impl FnOnce(csv::Error) -> OutputError + '_ {
    move |source| OutputError::Csv { path: path.display().to_string(), source }
}

#[derive(Debug, Serialize, Deserialize)]
struct LogRow {
    step: usize,
    north_m: f64,
    east_m: f64,
    #[serde(rename = "J_anticipated")]
    j_anticipated: f64,
    #[serde(rename = "J_realized")]
    j_realized: f64,
    #[serde(rename = "B_k")]
    b_k: f64,
    #[serde(rename = "J_plus_B")]
    j_plus_b: f64,
    epoch_ms: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct MeasurementRow {
    time_s: f64,
    north_m: f64,
    east_m: f64,
    depth_m: f64,
    retained: u8,
}

#[derive(Debug, Serialize)]
struct EpochRow {
    step: usize,
    value: f64,
    root_bound: f64,
    remainder_value: Option<f64>,
    source: &'static str,
    rollouts: usize,
}

fn write_rows<T: Serialize>(path: &FsPath, rows: impl IntoIterator<Item = T>) -> Result<(), OutputError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    for row in rows {
        w.serialize(row).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

fn read_rows<T: for<'de> Deserialize<'de>>(path: &FsPath) -> Result<Vec<T>, OutputError> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    r.deserialize().collect::<Result<Vec<T>, _>>().map_err(csv_err(path))
}

/// Per-step mission log. Headings are not written; read-back sets them to 0.
pub fn write_mission_log(path: &FsPath, rows: &[StepRecord]) -> Result<(), OutputError> {
    if rows.is_empty() {
        // csv writes nothing for zero records; keep the header.
        return std::fs::write(path, format!("{MISSION_LOG_HEADER}\n")).map_err(io_err(path));
    }
    write_rows(
        path,
        rows.iter().map(|r| LogRow {
            step: r.step,
            north_m: r.position.north,
            east_m: r.position.east,
            j_anticipated: r.j_anticipated,
            j_realized: r.j_realized,
            b_k: r.b_k,
            j_plus_b: r.j_plus_b,
            epoch_ms: r.epoch_ms,
        }),
    )
}

pub fn read_mission_log(path: &FsPath) -> Result<Vec<StepRecord>, OutputError> {
    Ok(read_rows::<LogRow>(path)?
        .into_iter()
        .map(|r| StepRecord {
            step: r.step,
            position: GeoPoint::new(r.north_m, r.east_m),
            heading: 0.0,
            j_anticipated: r.j_anticipated,
            j_realized: r.j_realized,
            b_k: r.b_k,
            j_plus_b: r.j_plus_b,
            epoch_ms: r.epoch_ms,
        })
        .collect())
}

pub fn write_measurements(path: &FsPath, samples: &[SampleRecord]) -> Result<(), OutputError> {
    if samples.is_empty() {
        return std::fs::write(path, format!("{MEASUREMENT_HEADER}\n")).map_err(io_err(path));
    }
    write_rows(
        path,
        samples.iter().map(|s| MeasurementRow {
            time_s: s.time,
            north_m: s.position.north,
            east_m: s.position.east,
            depth_m: s.depth,
            retained: s.retained as u8,
        }),
    )
}

pub fn read_measurements(path: &FsPath) -> Result<Vec<SampleRecord>, OutputError> {
    Ok(read_rows::<MeasurementRow>(path)?
        .into_iter()
        .map(|r| SampleRecord {
            time: r.time_s,
            position: GeoPoint::new(r.north_m, r.east_m),
            depth: r.depth_m,
            retained: r.retained != 0,
        })
        .collect())
}

pub fn write_epochs(path: &FsPath, epochs: &[EpochRecord]) -> Result<(), OutputError> {
    write_rows(
        path,
        epochs.iter().map(|e| EpochRow {
            step: e.step,
            value: e.value,
            root_bound: e.root_bound,
            remainder_value: e.remainder_value,
            source: e.source.name(),
            rollouts: e.rollouts,
        }),
    )
}

/// Summary as flat `key = value` lines.
pub fn summary_text(log: &MissionLog) -> String {
    let s: &MissionSummary = &log.summary;
    format!(
        "arm = {}\nsteps = {}\nB0 = {}\nrunning_bound = {}\nfinal_J = {}\nfinal_realized = {}\n\
         guarantee_satisfied = {}\ndead_end = {}\n",
        s.arm.name(),
        s.steps,
        s.b0,
        s.running_bound,
        s.final_j,
        s.final_realized,
        s.guarantee_satisfied,
        s.dead_end
    )
}

pub fn write_summary(path: &FsPath, log: &MissionLog) -> Result<(), OutputError> {
    std::fs::write(path, summary_text(log)).map_err(io_err(path))
}

/// Node-registered grid over the bounding box of an area. Row `i` lies at
/// `origin.north + i · resolution`, column `j` at `origin.east + j · resolution`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub origin: GeoPoint,
    pub resolution: f64,
    pub nrows: usize,
    pub ncols: usize,
}

impl GridSpec {
    pub fn covering(area: &OperationalArea, resolution: f64) -> Self {
        assert!(resolution > 0.0, "grid resolution must be positive");
        let (lo, hi) = area.bounding_box();
        let count = |extent: f64| ((extent / resolution) + 1e-9).floor() as usize + 1;
        Self { origin: lo, resolution, nrows: count(hi.north - lo.north), ncols: count(hi.east - lo.east) }
    }

    pub fn point(&self, row: usize, col: usize) -> GeoPoint {
        GeoPoint::new(self.origin.north + row as f64 * self.resolution, self.origin.east + col as f64 * self.resolution)
    }

    fn header(&self, quantity: &str) -> String {
        format!(
            "# quantity={quantity} nrows={} ncols={} origin_north={} origin_east={} resolution={} rows=north_ascending",
            self.nrows, self.ncols, self.origin.north, self.origin.east, self.resolution
        )
    }
}

/// Row-major grid of one quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub spec: GridSpec,
    pub quantity: String,
    pub values: Vec<f64>,
}

impl Grid {
    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.spec.ncols + col]
    }

    pub fn write(&self, path: &FsPath) -> Result<(), OutputError> {
        let file = File::create(path).map_err(io_err(path))?;
        let mut w = BufWriter::new(file);
        let mut text = self.spec.header(&self.quantity);
        text.push('\n');
        for row in self.values.chunks(self.spec.ncols) {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            text.push_str(&line.join(","));
            text.push('\n');
        }
        w.write_all(text.as_bytes()).map_err(io_err(path))?;
        w.flush().map_err(io_err(path))
    }

    pub fn read(path: &FsPath) -> Result<Self, OutputError> {
        let bad = |message: String| OutputError::Format { path: path.display().to_string(), message };
        let file = File::open(path).map_err(io_err(path))?;
        let mut lines = BufReader::new(file).lines();
        let header = lines.next().ok_or_else(|| bad("empty file".into()))?.map_err(io_err(path))?;
        let meta = header.strip_prefix('#').ok_or_else(|| bad("missing `#` metadata line".into()))?;
        let field = |name: &str| -> Result<&str, OutputError> {
            meta.split_whitespace()
                .find_map(|kv| kv.strip_prefix(name).and_then(|r| r.strip_prefix('=')))
                .ok_or_else(|| bad(format!("metadata lacks `{name}`")))
        };
        let num =
            |name: &str| -> Result<f64, OutputError> { field(name)?.parse().map_err(|_| bad(format!("bad `{name}`"))) };
        let spec = GridSpec {
            origin: GeoPoint::new(num("origin_north")?, num("origin_east")?),
            resolution: num("resolution")?,
            nrows: num("nrows")? as usize,
            ncols: num("ncols")? as usize,
        };
        let quantity = field("quantity")?.to_string();
        let mut values = Vec::with_capacity(spec.nrows * spec.ncols);
        for (i, line) in lines.enumerate() {
            let line = line.map_err(io_err(path))?;
            let row: Vec<f64> = line
                .split(',')
                .map(|v| v.trim().parse().map_err(|_| bad(format!("row {}: bad value `{v}`", i + 1))))
                .collect::<Result<_, _>>()?;
            if row.len() != spec.ncols {
                return Err(bad(format!("row {} has {} values, expected {}", i + 1, row.len(), spec.ncols)));
            }
            values.extend(row);
        }
        if values.len() != spec.nrows * spec.ncols {
            return Err(bad(format!("expected {} rows", spec.nrows)));
        }
        Ok(Self { spec, quantity, values })
    }
}

/// Posterior mean, standard deviation and ambiguity on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorGrids {
    pub mu: Grid,
    pub sigma: Grid,
    pub ambiguity: Grid,
}

pub fn dump_posterior(
    model: &GpModel,
    area: &OperationalArea,
    resolution: f64,
    reward: &RewardConfig,
) -> Result<PosteriorGrids, GpError> {
    let spec = GridSpec::covering(area, resolution);
    let n = spec.nrows * spec.ncols;
    let (mut mu, mut sigma, mut amb) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    for row in 0..spec.nrows {
        for col in 0..spec.ncols {
            let pred = model.predict(&spec.point(row, col))?;
            mu.push(pred.mean);
            sigma.push(pred.std());
            amb.push(ambiguity(&pred, reward));
        }
    }
    let grid = |quantity: &str, values| Grid { spec, quantity: quantity.into(), values };
    Ok(PosteriorGrids { mu: grid("mu", mu), sigma: grid("sigma", sigma), ambiguity: grid("ambiguity", amb) })
}

/// Prior mean on a grid.
pub fn dump_prior(model: &GpModel, area: &OperationalArea, resolution: f64) -> Grid {
    let spec = GridSpec::covering(area, resolution);
    let mut values = Vec::with_capacity(spec.nrows * spec.ncols);
    for row in 0..spec.nrows {
        for col in 0..spec.ncols {
            values.push(model.prior_mean(&spec.point(row, col)));
        }
    }
    Grid { spec, quantity: "prior".into(), values }
}
