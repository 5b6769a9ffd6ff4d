//! Sparse local Gaussian-process model of lake-bed depth.
//!
//! Samples are thinned on insertion (a new sample is kept only if it lies at
//! least `retention_radius` from every retained sample) and every prediction
//! conditions only on the retained samples within `locality_radius` of the
//! query point. Predictions can additionally be conditioned on *planned*
//! sample locations that carry no measured value yet; because GP posterior
//! variance depends only on input locations this gives the variance the model
//! will have once those locations are measured.

use rustc_hash::FxHashMap as HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geo::{distance_to_line, GeoPoint};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GpError {
    #[error("hyperparameter `{name}` must be strictly positive, got {value}")]
    InvalidHyperparameter { name: &'static str, value: f64 },
    #[error("invalid prior mean: {0}")]
    InvalidPrior(&'static str),
    #[error("local kernel matrix of size {size} is not positive definite")]
    Degenerate { size: usize },
}

/// Squared-exponential kernel and sparsification radii.
///
/// `locality_radius` may be infinite, in which case every retained sample is
/// used for every prediction. `retention_radius` may be zero (keep everything)
/// only through [`GpHyperparams::dense`]; regular configurations require it
/// positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GpHyperparams {
    pub signal_std: f64,
    pub length_scale: f64,
    pub noise_std: f64,
    pub locality_radius: f64,
    pub retention_radius: f64,
}

impl GpHyperparams {
    pub fn validate(&self) -> Result<(), GpError> {
        let checks = [
            ("signal_std", self.signal_std),
            ("length_scale", self.length_scale),
            ("noise_std", self.noise_std),
            ("locality_radius", self.locality_radius),
            ("retention_radius", self.retention_radius),
        ];
        for (name, value) in checks {
            if !(value > 0.0) {
                return Err(GpError::InvalidHyperparameter { name, value });
            }
        }
        Ok(())
    }

    /// Same kernel without sparsification: no thinning and unbounded locality.
    pub fn dense(&self) -> Self {
        Self { locality_radius: f64::INFINITY, retention_radius: 0.0, ..*self }
    }

    pub fn signal_variance(&self) -> f64 {
        self.signal_std * self.signal_std
    }

    pub fn noise_variance(&self) -> f64 {
        self.noise_std * self.noise_std
    }

    fn validate_dense_ok(&self) -> Result<(), GpError> {
        let checks = [
            ("signal_std", self.signal_std),
            ("length_scale", self.length_scale),
            ("noise_std", self.noise_std),
            ("locality_radius", self.locality_radius),
        ];
        for (name, value) in checks {
            if !(value > 0.0) {
                return Err(GpError::InvalidHyperparameter { name, value });
            }
        }
        if !(self.retention_radius >= 0.0) || !self.retention_radius.is_finite() {
            return Err(GpError::InvalidHyperparameter { name: "retention_radius", value: self.retention_radius });
        }
        Ok(())
    }
}

impl Default for GpHyperparams {
    fn default() -> Self {
        Self { signal_std: 5.0, length_scale: 40.0, noise_std: 2.5, locality_radius: 40.0, retention_radius: 6.0 }
    }
}

/// `σ_f² · exp(−‖p − q‖² / (2 l²))`
pub fn kernel(p: &GeoPoint, q: &GeoPoint, hp: &GpHyperparams) -> f64 {
    hp.signal_variance() * (-p.distance_sq(q) / (2.0 * hp.length_scale * hp.length_scale)).exp()
}

/// Prior depth: deepest along an infinite line, falling off quadratically
/// with distance from it and clamped at zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorMeanSpec {
    pub line: (GeoPoint, GeoPoint),
    pub falloff: f64,
    pub max_depth: f64,
}

impl PriorMeanSpec {
    pub fn new(a: GeoPoint, b: GeoPoint, falloff: f64, max_depth: f64) -> Result<Self, GpError> {
        let spec = Self { line: (a, b), falloff, max_depth };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), GpError> {
        let (a, b) = &self.line;
        if !a.is_finite() || !b.is_finite() {
            return Err(GpError::InvalidPrior("line endpoints must be finite"));
        }
        if a == b {
            return Err(GpError::InvalidPrior("line endpoints must be distinct"));
        }
        if !(self.falloff > 0.0) {
            return Err(GpError::InvalidPrior("falloff must be positive"));
        }
        if !(self.max_depth > 0.0) {
            return Err(GpError::InvalidPrior("max depth must be positive"));
        }
        Ok(())
    }
}

/// `max(d_max (1 − (d(p, line) / c)²), 0)`
pub fn prior_mean(p: &GeoPoint, spec: &PriorMeanSpec) -> f64 {
    let ratio = distance_to_line(p, &spec.line.0, &spec.line.1) / spec.falloff;
    (spec.max_depth * (1.0 - ratio * ratio)).max(0.0)
}

/// A measured depth (meters, positive down) at a position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Datum {
    pub position: GeoPoint,
    pub depth: f64,
}

impl Datum {
    pub const fn new(position: GeoPoint, depth: f64) -> Self {
        Self { position, depth }
    }
}

/// Retained samples in insertion order, with a uniform-grid spatial hash.
#[derive(Debug, Clone)]
pub struct Dataset {
    samples: Vec<Datum>,
    retention_radius: f64,
    cell_size: f64,
    cells: HashMap<(i64, i64), Vec<usize>>,
}

impl Dataset {
    /// `cell_size` is the hash-grid pitch; the locality radius is the natural choice.
    pub fn new(retention_radius: f64, cell_size: f64) -> Self {
        let cell_size = if cell_size.is_finite() && cell_size > 0.0 {
            cell_size
        } else if retention_radius > 0.0 {
            retention_radius
        } else {
            1.0
        };
        Self { samples: Vec::new(), retention_radius, cell_size, cells: HashMap::default() }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Datum] {
        &self.samples
    }

    pub fn retention_radius(&self) -> f64 {
        self.retention_radius
    }

    fn cell_of(&self, p: &GeoPoint) -> (i64, i64) {
        ((p.north / self.cell_size).floor() as i64, (p.east / self.cell_size).floor() as i64)
    }

    /// Visits every sample index that may lie within `radius` of `p`.
    /// Candidates are a superset of the true neighbours, in no particular order.
    fn visit_candidates(&self, p: &GeoPoint, radius: f64, mut visit: impl FnMut(usize)) {
        let span = (radius / self.cell_size).ceil();
        let cells_to_scan = (2.0 * span + 1.0).powi(2);
        if !radius.is_finite() || cells_to_scan > self.cells.len() as f64 {
            (0..self.samples.len()).for_each(visit);
            return;
        }
        let span = span as i64;
        let (cn, ce) = self.cell_of(p);
        for dn in -span..=span {
            for de in -span..=span {
                if let Some(bucket) = self.cells.get(&(cn + dn, ce + de)) {
                    bucket.iter().copied().for_each(&mut visit);
                }
            }
        }
    }

    /// Inserts `datum` unless a retained sample lies strictly closer than the
    /// retention radius. Returns whether it was kept.
    pub fn maybe_insert(&mut self, datum: Datum) -> bool {
        let p = datum.position;
        if self.retention_radius > 0.0 {
            let mut blocked = false;
            self.visit_candidates(&p, self.retention_radius, |i| {
                blocked |= self.samples[i].position.distance(&p) < self.retention_radius;
            });
            if blocked {
                return false;
            }
        }
        let idx = self.samples.len();
        self.samples.push(datum);
        let cell = self.cell_of(&p);
        self.cells.entry(cell).or_default().push(idx);
        true
    }

    /// Indices (ascending, i.e. insertion order) of samples within `radius` of `p`.
    pub fn local_indices(&self, p: &GeoPoint, radius: f64) -> Vec<usize> {
        let mut out = Vec::new();
        self.visit_candidates(p, radius, |i| {
            if self.samples[i].position.distance(p) <= radius {
                out.push(i);
            }
        });
        out.sort_unstable();
        out
    }

    /// The retained samples within `radius` of `p`, as a dataset of their own.
    pub fn local_subset(&self, p: &GeoPoint, radius: f64) -> Dataset {
        let mut subset = Dataset::new(self.retention_radius, self.cell_size);
        for i in self.local_indices(p, radius) {
            let d = self.samples[i];
            let idx = subset.samples.len();
            subset.samples.push(d);
            let cell = subset.cell_of(&d.position);
            subset.cells.entry(cell).or_default().push(idx);
        }
        subset
    }
}

/// Posterior predictive mean and variance at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub mean: f64,
    pub variance: f64,
}

impl Prediction {
    pub fn std(&self) -> f64 {
        self.variance.sqrt()
    }
}

/// Output of a single local solve: the mean conditioned on measured data, the
/// variance conditioned on measured data only, and the variance conditioned
/// on measured data plus the planned locations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conditional {
    pub mean: f64,
    pub data_variance: f64,
    pub anticipated_variance: f64,
}

#[derive(Debug, Clone)]
pub struct GpModel {
    hyper: GpHyperparams,
    prior: PriorMeanSpec,
    data: Dataset,
}

impl GpModel {
    pub fn new(hyper: GpHyperparams, prior: PriorMeanSpec) -> Result<Self, GpError> {
        hyper.validate()?;
        prior.validate()?;
        Ok(Self::build(hyper, prior))
    }

    /// Like [`GpModel::new`] but also accepts a zero retention radius and an
    /// infinite locality radius (a plain dense GP).
    pub fn new_unthinned(hyper: GpHyperparams, prior: PriorMeanSpec) -> Result<Self, GpError> {
        hyper.validate_dense_ok()?;
        prior.validate()?;
        Ok(Self::build(hyper, prior))
    }

    fn build(hyper: GpHyperparams, prior: PriorMeanSpec) -> Self {
        let data = Dataset::new(hyper.retention_radius, hyper.locality_radius);
        Self { hyper, prior, data }
    }

    pub fn hyperparams(&self) -> &GpHyperparams {
        &self.hyper
    }

    pub fn prior(&self) -> &PriorMeanSpec {
        &self.prior
    }

    pub fn data(&self) -> &Dataset {
        &self.data
    }

    pub fn insert(&mut self, datum: Datum) -> bool {
        self.data.maybe_insert(datum)
    }

    pub fn prior_mean(&self, p: &GeoPoint) -> f64 {
        prior_mean(p, &self.prior)
    }

    pub fn predict(&self, p: &GeoPoint) -> Result<Prediction, GpError> {
        let c = self.conditional(p, &[])?;
        Ok(Prediction { mean: c.mean, variance: c.data_variance })
    }

    /// Posterior standard deviation at `p` once the planned locations (those
    /// within the locality radius of `p`) have been measured.
    pub fn anticipated_std(&self, p: &GeoPoint, planned: &[GeoPoint]) -> Result<f64, GpError> {
        Ok(self.conditional(p, planned)?.anticipated_variance.sqrt())
    }

    /// One factorization of the local kernel matrix over `[data, planned]`.
    ///
    /// Measured data come first, so the leading block of the Cholesky factor
    /// is the factor of the data-only system and the data-only mean and
    /// variance fall out of the same forward solves.
    pub fn conditional(&self, p: &GeoPoint, planned: &[GeoPoint]) -> Result<Conditional, GpError> {
        let hp = &self.hyper;
        let radius = hp.locality_radius;
        let prior = self.prior_mean(p);
        let kss = hp.signal_variance();

        let local = self.data.local_indices(p, radius);
        let n_data = local.len();
        let near_planned = planned.iter().filter(|q| q.distance(p) <= radius);
        let n = n_data + near_planned.clone().count();
        if n == 0 {
            return Ok(Conditional { mean: prior, data_variance: kss, anticipated_variance: kss });
        }
        let mut inputs: Vec<GeoPoint> = Vec::with_capacity(n);
        inputs.extend(local.iter().map(|&i| self.data.samples[i].position));
        inputs.extend(near_planned.copied());

        // scratch = [row-major lower factor n×n | k* n | residual n_data]
        let mut scratch = vec![0.0; n * n + n + n_data];
        let (factor, rest) = scratch.split_at_mut(n * n);
        let (kstar, residual) = rest.split_at_mut(n);
        let noise = hp.noise_variance();
        for i in 0..n {
            for j in 0..i {
                factor[i * n + j] = kernel(&inputs[i], &inputs[j], hp);
            }
            factor[i * n + i] = kss + noise;
            kstar[i] = kernel(p, &inputs[i], hp);
        }
        for (r, &i) in residual.iter_mut().zip(&local) {
            let d = &self.data.samples[i];
            *r = d.depth - self.prior_mean(&d.position);
        }
        if !cholesky_in_place(factor, n) {
            return Err(GpError::Degenerate { size: n });
        }
        forward_substitute(factor, n, kstar);
        forward_substitute(factor, n, residual);

        let mean = prior + kstar[..n_data].iter().zip(residual.iter()).map(|(a, b)| a * b).sum::<f64>();
        let data_reduction: f64 = kstar[..n_data].iter().map(|x| x * x).sum();
        let planned_reduction: f64 = kstar[n_data..].iter().map(|x| x * x).sum();
        Ok(Conditional {
            mean,
            data_variance: (kss - data_reduction).max(0.0),
            anticipated_variance: (kss - data_reduction - planned_reduction).max(0.0),
        })
    }
}

/// Cholesky factorization of the symmetric matrix whose lower triangle is
/// stored row-major in `a` (`n × n`); the factor overwrites it. Returns false
/// if the matrix is not positive definite.
///
/// Local systems hold a few dozen points at most, so a plain in-place
/// factorization into one scratch buffer beats a general dense solver that
/// allocates per call.
fn cholesky_in_place(a: &mut [f64], n: usize) -> bool {
    for j in 0..n {
        let d = a[j * n + j] - (0..j).map(|k| a[j * n + k] * a[j * n + k]).sum::<f64>();
        if !(d > 0.0) {
            return false;
        }
        let d = d.sqrt();
        a[j * n + j] = d;
        for i in j + 1..n {
            let s = a[i * n + j] - (0..j).map(|k| a[i * n + k] * a[j * n + k]).sum::<f64>();
            a[i * n + j] = s / d;
        }
    }
    true
}

/// Solves `L x = b` in place for the leading `b.len()` rows of the
/// row-major lower factor `l`.
fn forward_substitute(l: &[f64], n: usize, b: &mut [f64]) {
    for i in 0..b.len() {
        let row = &l[i * n..i * n + i + 1];
        let acc = b[i] - row[..i].iter().zip(&b[..i]).map(|(a, x)| a * x).sum::<f64>();
        b[i] = acc / row[i];
    }
}
