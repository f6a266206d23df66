//! Coordinates and the equirectangular distance model.
//!
//! Distances are computed on a plane tangent to a fixed reference latitude:
//! one degree of latitude is `R·π/180` meters and one degree of longitude is
//! that times `cos(ref_lat)`. At city scale this tracks geodesic distance
//! closely and, more importantly, is monotone and symmetric.

use crate::error::{Error, Result};

/// Mean Earth radius in meters.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// Meters per degree of latitude.
pub const METERS_PER_DEGREE: f64 = EARTH_RADIUS_M * std::f64::consts::PI / 180.0;

/// A WGS-84 longitude/latitude pair in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoPoint {
    pub lon: f64,
    pub lat: f64,
}

impl GeoPoint {
    pub fn new(lon: f64, lat: f64) -> Result<Self> {
        let ok = lon.is_finite()
            && lat.is_finite()
            && (-180.0..=180.0).contains(&lon)
            && (-90.0..=90.0).contains(&lat);
        if ok {
            Ok(Self { lon, lat })
        } else {
            Err(Error::InvalidCoordinate { lon, lat })
        }
    }
}

/// A point on the local plane, in meters east (`x`) and north (`y`) of some origin.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Planar {
    pub x: f64,
    pub y: f64,
}

impl Planar {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Planar) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Linear interpolation, `frac` in [0, 1].
    pub fn lerp(self, other: Planar, frac: f64) -> Planar {
        Planar::new(
            self.x + (other.x - self.x) * frac,
            self.y + (other.y - self.y) * frac,
        )
    }
}

/// Equirectangular projection at a fixed reference latitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    ref_lat: f64,
    lon_scale: f64,
}

impl Projection {
    pub fn new(ref_lat: f64) -> Self {
        Self {
            ref_lat,
            lon_scale: METERS_PER_DEGREE * ref_lat.to_radians().cos(),
        }
    }

    pub fn ref_lat(&self) -> f64 {
        self.ref_lat
    }

    #[inline]
    pub fn distance(&self, a: &GeoPoint, b: &GeoPoint) -> f64 {
        let dy = (a.lat - b.lat) * METERS_PER_DEGREE;
        let dx = (a.lon - b.lon) * self.lon_scale;
        (dx * dx + dy * dy).sqrt()
    }

    /// Offset of `p` from `origin` on the local plane.
    pub fn to_planar(&self, origin: &GeoPoint, p: &GeoPoint) -> Planar {
        Planar::new(
            (p.lon - origin.lon) * self.lon_scale,
            (p.lat - origin.lat) * METERS_PER_DEGREE,
        )
    }

    /// Inverse of [`Projection::to_planar`].
    pub fn to_geo(&self, origin: &GeoPoint, p: Planar) -> GeoPoint {
        GeoPoint {
            lon: origin.lon + p.x / self.lon_scale,
            lat: origin.lat + p.y / METERS_PER_DEGREE,
        }
    }
}

/// Distance in meters between two points under the equirectangular model
/// anchored at `ref_lat`.
pub fn planar_distance(a: &GeoPoint, b: &GeoPoint, ref_lat: f64) -> f64 {
    Projection::new(ref_lat).distance(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identical_points_are_zero_apart() {
        let p = GeoPoint::new(116.523625, 39.792935).unwrap();
        assert_eq!(planar_distance(&p, &p, 39.79), 0.0);
    }

    #[test]
    fn latitude_step_matches_arc_length() {
        let a = GeoPoint::new(116.0, 39.0).unwrap();
        let b = GeoPoint::new(116.0, 39.001).unwrap();
        let d = planar_distance(&a, &b, 39.0);
        assert!((d - 111.19).abs() < 0.01, "{d}");
    }

    #[test]
    fn longitude_step_shrinks_with_cos_ref_lat() {
        let a = GeoPoint::new(116.0, 39.79).unwrap();
        let b = GeoPoint::new(116.001, 39.79).unwrap();
        let d = planar_distance(&a, &b, 39.79);
        assert!((d - 85.45).abs() < 0.05, "{d}");
    }

    #[test]
    fn rejects_out_of_range_coordinates() {
        assert!(GeoPoint::new(181.0, 0.0).is_err());
        assert!(GeoPoint::new(0.0, -90.5).is_err());
        assert!(GeoPoint::new(f64::NAN, 0.0).is_err());
        assert!(GeoPoint::new(-180.0, 90.0).is_ok());
    }

    #[test]
    fn planar_round_trip() {
        let proj = Projection::new(39.9);
        let origin = GeoPoint::new(116.4, 39.9).unwrap();
        let p = Planar::new(1234.5, -987.25);
        let back = proj.to_planar(&origin, &proj.to_geo(&origin, p));
        assert!(back.distance(p) < 1e-6);
    }

    fn point_in_box() -> impl Strategy<Value = GeoPoint> {
        (116.0f64..117.0, 39.0f64..40.0).prop_map(|(lon, lat)| GeoPoint { lon, lat })
    }

    proptest! {
        #[test]
        fn triangle_inequality(a in point_in_box(), b in point_in_box(), c in point_in_box()) {
            let proj = Projection::new(39.5);
            let ab = proj.distance(&a, &b);
            let bc = proj.distance(&b, &c);
            let ac = proj.distance(&a, &c);
            prop_assert!(ac <= (ab + bc) * (1.0 + 1e-9));
        }

        #[test]
        fn symmetric(a in point_in_box(), b in point_in_box()) {
            let proj = Projection::new(39.5);
            prop_assert_eq!(proj.distance(&a, &b), proj.distance(&b, &a));
        }
    }
}
