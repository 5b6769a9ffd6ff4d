//! Discrete vehicle kinematics and the operational area.
//!
//! A state is a heading plus a position. Each action turns the vehicle by a
//! fixed angle and then advances a fixed step length along the new heading.
//! Heading is measured clockwise from north, so east = sin(heading).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geo::{distance_to_segment, GeoPoint};

/// Tolerance used when matching turn angles and step lengths.
pub const GEOMETRY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VehicleError {
    #[error("turn angle {0} rad is not in the action set")]
    InvalidAction(f64),
    #[error("action set must be non-empty with a positive step length")]
    InvalidActionSet,
    #[error("operational area: {0}")]
    InvalidArea(&'static str),
}

/// Wraps an angle into (−π, π].
pub fn normalize_heading(angle: f64) -> f64 {
    let wrapped = (angle + PI).rem_euclid(2.0 * PI) - PI;
    if wrapped <= -PI {
        wrapped + 2.0 * PI
    } else {
        wrapped
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleState {
    pub heading: f64,
    pub position: GeoPoint,
}

impl VehicleState {
    pub fn new(heading: f64, position: GeoPoint) -> Self {
        Self { heading: normalize_heading(heading), position }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionSet {
    angles: Vec<f64>,
    step_length: f64,
}

impl ActionSet {
    pub fn new(angles: Vec<f64>, step_length: f64) -> Result<Self, VehicleError> {
        if angles.is_empty()
            || !(step_length > 0.0)
            || !step_length.is_finite()
            || angles.iter().any(|a| !a.is_finite())
        {
            return Err(VehicleError::InvalidActionSet);
        }
        Ok(Self { angles, step_length })
    }

    pub fn from_degrees(degrees: &[f64], step_length: f64) -> Result<Self, VehicleError> {
        Self::new(degrees.iter().map(|d| d.to_radians()).collect(), step_length)
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn step_length(&self) -> f64 {
        self.step_length
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    /// Index of the action whose turn angle matches `angle`.
    pub fn index_of(&self, angle: f64) -> Option<usize> {
        self.angles.iter().position(|a| (a - angle).abs() <= GEOMETRY_TOLERANCE)
    }

    /// Applies the action at `index`. Panics if out of range.
    pub fn apply(&self, state: &VehicleState, index: usize) -> VehicleState {
        let heading = state.heading + self.angles[index];
        VehicleState {
            heading: normalize_heading(heading),
            position: GeoPoint::new(
                state.position.north + self.step_length * heading.cos(),
                state.position.east + self.step_length * heading.sin(),
            ),
        }
    }

    /// Turns by `angle` and advances one step, if `angle` is a member of the set.
    pub fn step(&self, state: &VehicleState, angle: f64) -> Result<VehicleState, VehicleError> {
        let index = self.index_of(angle).ok_or(VehicleError::InvalidAction(angle))?;
        Ok(self.apply(state, index))
    }

    /// `(action index, next state)` for every action that stays inside `area`.
    pub fn successors(&self, state: &VehicleState, area: &OperationalArea) -> Vec<(usize, VehicleState)> {
        (0..self.angles.len())
            .map(|i| (i, self.apply(state, i)))
            .filter(|(_, next)| area.contains(&next.position))
            .collect()
    }
}

/// Simple polygon bounding the region the vehicle may visit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperationalArea {
    vertices: Vec<GeoPoint>,
}

impl OperationalArea {
    pub fn new(vertices: Vec<GeoPoint>) -> Result<Self, VehicleError> {
        if vertices.len() < 3 {
            return Err(VehicleError::InvalidArea("needs at least 3 vertices"));
        }
        if vertices.iter().any(|v| !v.is_finite()) {
            return Err(VehicleError::InvalidArea("vertices must be finite"));
        }
        let area = Self { vertices };
        if !(area.signed_area().abs() > 0.0) {
            return Err(VehicleError::InvalidArea("polygon has zero area"));
        }
        if area.self_intersects() {
            return Err(VehicleError::InvalidArea("polygon is self-intersecting"));
        }
        Ok(area)
    }

    /// Axis-aligned rectangle with its south-west corner at `origin`.
    pub fn rectangle(origin: GeoPoint, north_extent: f64, east_extent: f64) -> Result<Self, VehicleError> {
        Self::new(vec![
            origin,
            GeoPoint::new(origin.north + north_extent, origin.east),
            GeoPoint::new(origin.north + north_extent, origin.east + east_extent),
            GeoPoint::new(origin.north, origin.east + east_extent),
        ])
    }

    pub fn vertices(&self) -> &[GeoPoint] {
        &self.vertices
    }

    fn edges(&self) -> impl Iterator<Item = (&GeoPoint, &GeoPoint)> {
        self.vertices.iter().zip(self.vertices.iter().cycle().skip(1))
    }

    pub fn signed_area(&self) -> f64 {
        0.5 * self.edges().map(|(a, b)| a.north * b.east - b.north * a.east).sum::<f64>()
    }

    /// `(min, max)` corners of the bounding box.
    pub fn bounding_box(&self) -> (GeoPoint, GeoPoint) {
        let mut lo = GeoPoint::new(f64::INFINITY, f64::INFINITY);
        let mut hi = GeoPoint::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in &self.vertices {
            lo.north = lo.north.min(v.north);
            lo.east = lo.east.min(v.east);
            hi.north = hi.north.max(v.north);
            hi.east = hi.east.max(v.east);
        }
        (lo, hi)
    }

    pub fn centroid(&self) -> GeoPoint {
        let a = self.signed_area();
        let (mut cn, mut ce) = (0.0, 0.0);
        for (p, q) in self.edges() {
            let cross = p.north * q.east - q.north * p.east;
            cn += (p.north + q.north) * cross;
            ce += (p.east + q.east) * cross;
        }
        GeoPoint::new(cn / (6.0 * a), ce / (6.0 * a))
    }

    fn self_intersects(&self) -> bool {
        let n = self.vertices.len();
        let edge = |i: usize| (self.vertices[i], self.vertices[(i + 1) % n]);
        for i in 0..n {
            for j in (i + 1)..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    continue;
                }
                let (a, b) = edge(i);
                let (c, d) = edge(j);
                if segments_intersect(&a, &b, &c, &d) {
                    return true;
                }
            }
        }
        false
    }

    /// Even-odd test; points on the boundary count as inside.
    pub fn contains(&self, p: &GeoPoint) -> bool {
        if self.edges().any(|(a, b)| distance_to_segment(p, a, b) <= GEOMETRY_TOLERANCE) {
            return true;
        }
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a.east > p.east) != (b.east > p.east) {
                let north_at = a.north + (p.east - a.east) * (b.north - a.north) / (b.east - a.east);
                if p.north < north_at {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Whether the straight segment `a`-`b` crosses the boundary.
    pub fn segment_crosses_boundary(&self, a: &GeoPoint, b: &GeoPoint) -> bool {
        self.edges().any(|(c, d)| proper_crossing(a, b, c, d))
    }
}

fn orient(a: &GeoPoint, b: &GeoPoint, c: &GeoPoint) -> f64 {
    (b.north - a.north) * (c.east - a.east) - (b.east - a.east) * (c.north - a.north)
}

fn on_segment(a: &GeoPoint, b: &GeoPoint, p: &GeoPoint) -> bool {
    p.north >= a.north.min(b.north)
        && p.north <= a.north.max(b.north)
        && p.east >= a.east.min(b.east)
        && p.east <= a.east.max(b.east)
}

fn segments_intersect(a: &GeoPoint, b: &GeoPoint, c: &GeoPoint, d: &GeoPoint) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
        return true;
    }
    (o1 == 0.0 && on_segment(a, b, c))
        || (o2 == 0.0 && on_segment(a, b, d))
        || (o3 == 0.0 && on_segment(c, d, a))
        || (o4 == 0.0 && on_segment(c, d, b))
}

fn proper_crossing(a: &GeoPoint, b: &GeoPoint, c: &GeoPoint, d: &GeoPoint) -> bool {
    orient(a, b, c) * orient(a, b, d) < 0.0 && orient(c, d, a) * orient(c, d, b) < 0.0
}

/// A sequence of states; `states[0]` is the start, every later state is a step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Path {
    pub states: Vec<VehicleState>,
}

impl Path {
    pub fn start(state: VehicleState) -> Self {
        Self { states: vec![state] }
    }

    /// Number of steps (transitions).
    pub fn steps(&self) -> usize {
        self.states.len().saturating_sub(1)
    }

    pub fn first(&self) -> &VehicleState {
        &self.states[0]
    }

    pub fn last(&self) -> &VehicleState {
        self.states.last().expect("path has a start state")
    }

    /// Positions sampled along the path, i.e. every state after the start.
    pub fn sample_points(&self) -> Vec<GeoPoint> {
        self.states.iter().skip(1).map(|s| s.position).collect()
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FeasibilityError {
    #[error("step {step}: turn of {turn} rad is not an available action")]
    BadTurn { step: usize, turn: f64 },
    #[error("step {step}: moved {length} m instead of the step length")]
    BadLength { step: usize, length: f64 },
    #[error("step {step}: position does not follow the new heading")]
    BadDirection { step: usize },
    #[error("state {index} lies outside the operational area")]
    Outside { index: usize },
    #[error("step {step}: segment crosses the area boundary")]
    CrossesBoundary { step: usize },
}

/// Re-derives every transition of `path` from the action set.
///
/// With `check_segments`, each straight segment must also stay clear of the
/// boundary (endpoint containment alone is the default planning rule).
pub fn validate_path(
    path: &Path,
    actions: &ActionSet,
    area: &OperationalArea,
    check_segments: bool,
) -> Result<(), FeasibilityError> {
    for (index, s) in path.states.iter().enumerate() {
        if !area.contains(&s.position) {
            return Err(FeasibilityError::Outside { index });
        }
    }
    for (k, pair) in path.states.windows(2).enumerate() {
        let step = k + 1;
        let (from, to) = (&pair[0], &pair[1]);
        let turn = normalize_heading(to.heading - from.heading);
        let matched = actions.angles().iter().any(|a| normalize_heading(a - turn).abs() <= GEOMETRY_TOLERANCE);
        if !matched {
            return Err(FeasibilityError::BadTurn { step, turn });
        }
        let length = from.position.distance(&to.position);
        if (length - actions.step_length()).abs() > GEOMETRY_TOLERANCE {
            return Err(FeasibilityError::BadLength { step, length });
        }
        let expected = GeoPoint::new(
            from.position.north + actions.step_length() * to.heading.cos(),
            from.position.east + actions.step_length() * to.heading.sin(),
        );
        if expected.distance(&to.position) > GEOMETRY_TOLERANCE {
            return Err(FeasibilityError::BadDirection { step });
        }
        if check_segments && area.segment_crosses_boundary(&from.position, &to.position) {
            return Err(FeasibilityError::CrossesBoundary { step });
        }
    }
    Ok(())
}
