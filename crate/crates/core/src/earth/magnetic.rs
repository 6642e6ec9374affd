//! Tilted-dipole geomagnetic field stand-in.
//!
//! Full spherical-harmonic synthesis is out of scope; the truth-vs-onboard
//! discrepancy is represented separately by [`super::GeoPerturbation`].

use super::geodesy::GeodeticPosition;
use nalgebra::{Matrix3, Vector3};

/// Mean field strength at the geomagnetic equator on the surface [nT].
const B0_NT: f64 = 31_200.0;
/// Reference radius [m].
const R_REF: f64 = 6_371_200.0;
/// Geomagnetic north pole, geodetic latitude [deg].
const POLE_LAT_DEG: f64 = 80.65;
/// Geomagnetic north pole, longitude [deg].
const POLE_LON_DEG: f64 = -72.68;

fn unit_ecef(lat: f64, lon: f64) -> Vector3<f64> {
    Vector3::new(lat.cos() * lon.cos(), lat.cos() * lon.sin(), lat.sin())
}

fn ecef_to_ned(lat: f64, lon: f64) -> Matrix3<f64> {
    let (sl, cl) = (lat.sin(), lat.cos());
    let (so, co) = (lon.sin(), lon.cos());
    Matrix3::new(
        -sl * co, -sl * so, cl, //
        -so, co, 0.0, //
        -cl * co, -cl * so, -sl,
    )
}

/// Dipole magnetic field at a geodetic position, in NED [nT].
pub fn magnetic_field_ned(pos: &GeodeticPosition) -> Vector3<f64> {
    let r = R_REF + pos.alt;
    let r_hat = unit_ecef(pos.lat, pos.lon);
    // Dipole moment points from the geomagnetic north pole toward the south.
    let m_hat = -unit_ecef(POLE_LAT_DEG.to_radians(), POLE_LON_DEG.to_radians());
    let b_ecef = B0_NT * (R_REF / r).powi(3) * (3.0 * m_hat.dot(&r_hat) * r_hat - m_hat);
    ecef_to_ned(pos.lat, pos.lon) * b_ecef
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn magnitude_range_over_zones() {
        // Terrain zone initial coordinates (lon deg, lat deg, ground alt m).
        let zones = [
            (248.001_185, 32.157_903, 661.0),
            (272.122_371, 38.865_625, 144.0),
            (287.490_805, 43.354_486, 200.0),
            (270.984_538, 34.720_636, 133.0),
            (279.088_834, 25.855_172, 10.0),
            (241.799_731, 33.924_426, 26.0),
        ];
        for (lon, lat, alt) in zones {
            let p = GeodeticPosition::new(
                (lon as f64).to_radians(),
                (lat as f64).to_radians(),
                alt + 2700.0,
            );
            let b = magnetic_field_ned(&p).norm();
            assert!((20_000.0..=70_000.0).contains(&b), "zone field {b} nT");
        }
    }

    #[test]
    fn field_is_smooth() {
        let p = GeodeticPosition::new(-1.9, 0.55, 2700.0);
        let dlat = 1.0 / 6_371_000.0; // about 1 m
        let q = GeodeticPosition::new(p.lon, p.lat + dlat, p.alt);
        let db = (magnetic_field_ned(&p) - magnetic_field_ned(&q)).norm();
        assert!(db < 1.0, "delta {db} nT over 1 m");
    }

    #[test]
    fn northern_hemisphere_dips_down() {
        let p = GeodeticPosition::new(-1.5, 0.7, 1000.0);
        let b = magnetic_field_ned(&p);
        assert!(b.z > 0.0, "down component should be positive: {b}");
        assert!(b.x > 0.0, "north component should be positive: {b}");
    }
}
