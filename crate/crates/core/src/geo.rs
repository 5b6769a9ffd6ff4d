//! Planar NED-frame geometry shared by the model, vehicle and simulator.

use serde::{Deserialize, Serialize};

/// A horizontal position in meters, north and east of the NED origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    pub north: f64,
    pub east: f64,
}

impl GeoPoint {
    pub const fn new(north: f64, east: f64) -> Self {
        Self { north, east }
    }

    pub fn is_finite(&self) -> bool {
        self.north.is_finite() && self.east.is_finite()
    }

    pub fn distance_sq(&self, other: &GeoPoint) -> f64 {
        let dn = self.north - other.north;
        let de = self.east - other.east;
        dn * dn + de * de
    }

    pub fn distance(&self, other: &GeoPoint) -> f64 {
        self.distance_sq(other).sqrt()
    }
}

/// Minimum euclidean distance from `p` to the infinite line through `a` and `b`.
///
/// `a` and `b` must be distinct.
pub fn distance_to_line(p: &GeoPoint, a: &GeoPoint, b: &GeoPoint) -> f64 {
    let dn = b.north - a.north;
    let de = b.east - a.east;
    let len = (dn * dn + de * de).sqrt();
    // |cross(b - a, p - a)| / |b - a|
    ((p.north - a.north) * de - (p.east - a.east) * dn).abs() / len
}

/// Minimum distance from `p` to the closed segment `a`-`b`.
pub fn distance_to_segment(p: &GeoPoint, a: &GeoPoint, b: &GeoPoint) -> f64 {
    let dn = b.north - a.north;
    let de = b.east - a.east;
    let len_sq = dn * dn + de * de;
    if len_sq == 0.0 {
        return p.distance(a);
    }
    let t = (((p.north - a.north) * dn + (p.east - a.east) * de) / len_sq).clamp(0.0, 1.0);
    p.distance(&GeoPoint::new(a.north + t * dn, a.east + t * de))
}
