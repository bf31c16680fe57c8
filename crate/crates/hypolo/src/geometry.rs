//! Points of the Poincare disk and the Rao (geodesic) distance.
//!
//! The model is the open unit disk of the Euclidean plane carrying the
//! conformal metric `lambda_x = 2 / (1 - |x|^2)`. Geodesic distances blow
//! up exponentially toward the boundary, so points are validated once at
//! construction and every other operation can assume a safe margin.

use thiserror::Error;

/// Points with Euclidean norm at or above `1 - BOUNDARY_MARGIN` are
/// rejected at ingestion. This keeps `1 - |z|^2` above ~2e-9, so the
/// distance formula stays in comfortably finite range.
pub const BOUNDARY_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("coordinates ({x}, {y}) must both be finite")]
    NonFinite { x: f64, y: f64 },
    #[error("point ({x}, {y}) lies outside the open unit disk (|z| = {norm} >= 1 - {BOUNDARY_MARGIN})")]
    OutsideDisk { x: f64, y: f64, norm: f64 },
}

/// A validated point of the open unit disk.
///
/// Fields are private so that every `DiskPoint` in existence satisfies
/// `x^2 + y^2 < (1 - BOUNDARY_MARGIN)^2` with finite coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskPoint {
    x: f64,
    y: f64,
}

impl DiskPoint {
    pub const ORIGIN: DiskPoint = DiskPoint { x: 0.0, y: 0.0 };

    /// Validates a raw coordinate pair.
    pub fn new(x: f64, y: f64) -> Result<DiskPoint, GeometryError> {
        if !x.is_finite() || !y.is_finite() {
            return Err(GeometryError::NonFinite { x, y });
        }
        let norm = (x * x + y * y).sqrt();
        if norm >= 1.0 - BOUNDARY_MARGIN {
            return Err(GeometryError::OutsideDisk { x, y, norm });
        }
        Ok(DiskPoint { x, y })
    }

    pub fn x(self) -> f64 {
        self.x
    }

    pub fn y(self) -> f64 {
        self.y
    }

    /// Squared Euclidean norm of the coordinate vector.
    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Conformal factor `2 / (1 - |p|^2)`, always >= 2 on the disk.
    pub fn conformal_factor(self) -> f64 {
        2.0 / (1.0 - self.norm_sq())
    }

    /// Rotation about the origin by `theta` radians, an isometry of the
    /// disk. Revalidates because rounding can nudge the norm by an ulp.
    pub fn rotate(self, theta: f64) -> Result<DiskPoint, GeometryError> {
        let (sin, cos) = theta.sin_cos();
        DiskPoint::new(cos * self.x - sin * self.y, sin * self.x + cos * self.y)
    }
}

/// Geodesic (Rao) distance between two disk points:
/// `arcosh(1 + 2 |a-b|^2 / ((1 - |a|^2)(1 - |b|^2)))`.
///
/// Evaluated as `ln1p(t + sqrt(t (t + 2)))` with `t` the fraction above,
/// which is the same arcosh but keeps full relative precision when `a`
/// and `b` nearly coincide (plain `acosh` near argument 1 loses half the
/// significant digits). `t` is clamped at 0 to absorb rounding.
pub fn rao_distance(a: DiskPoint, b: DiskPoint) -> f64 {
    let dx = a.x - b.x;
    let dy = a.y - b.y;
    let d2 = dx * dx + dy * dy;
    let t = (2.0 * d2 / ((1.0 - a.norm_sq()) * (1.0 - b.norm_sq()))).max(0.0);
    (t + (t * (t + 2.0)).sqrt()).ln_1p()
}

/// Plain Euclidean distance between the coordinate pairs.
pub fn euclidean_distance(a: DiskPoint, b: DiskPoint) -> f64 {
    let dx = a.x - b.x;
    let dy = a.y - b.y;
    (dx * dx + dy * dy).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pt(x: f64, y: f64) -> DiskPoint {
        DiskPoint::new(x, y).expect("test point must be valid")
    }

    #[test]
    fn accepts_center_and_interior_points() {
        assert_eq!(pt(0.0, 0.0), DiskPoint::ORIGIN);
        assert!(DiskPoint::new(0.7, -0.7).is_ok());
    }

    #[test]
    fn rejects_boundary_and_beyond() {
        assert!(matches!(
            DiskPoint::new(1.0, 0.0),
            Err(GeometryError::OutsideDisk { .. })
        ));
        assert!(matches!(
            DiskPoint::new(-0.9, 0.9),
            Err(GeometryError::OutsideDisk { .. })
        ));
        // Inside the unit circle but within the 1e-9 safety margin.
        assert!(matches!(
            DiskPoint::new(0.999999999999, 0.0),
            Err(GeometryError::OutsideDisk { .. })
        ));
        assert!(DiskPoint::new(0.99999999, 0.0).is_ok());
    }

    #[test]
    fn rejects_non_finite_coordinates() {
        assert!(matches!(
            DiskPoint::new(f64::NAN, 0.0),
            Err(GeometryError::NonFinite { .. })
        ));
        assert!(matches!(
            DiskPoint::new(0.0, f64::INFINITY),
            Err(GeometryError::NonFinite { .. })
        ));
    }

    #[test]
    fn conformal_factor_examples() {
        assert_eq!(DiskPoint::ORIGIN.conformal_factor(), 2.0);
        assert!((pt(0.5, 0.0).conformal_factor() - 8.0 / 3.0).abs() < 1e-15);
        // |p|^2 = 0.99 -> 2 / 0.01 = 200.
        let p = pt(0.99_f64.sqrt(), 0.0);
        assert!((p.conformal_factor() - 200.0).abs() < 1e-9);
    }

    #[test]
    fn distance_of_identical_points_is_zero() {
        let p = pt(0.3, -0.2);
        assert_eq!(rao_distance(p, p), 0.0);
    }

    #[test]
    fn distance_from_origin_has_closed_form() {
        // d(0, z) = 2 artanh(|z|); at |z| = 0.5 that is ln 3.
        let d = rao_distance(DiskPoint::ORIGIN, pt(0.5, 0.0));
        assert!((d - 3.0_f64.ln()).abs() < 1e-15, "d = {d}");
    }

    #[test]
    fn distance_adds_along_a_diameter() {
        // (-0.3, 0) to (0.3, 0) passes through the origin: 4 artanh(0.3).
        let d = rao_distance(pt(-0.3, 0.0), pt(0.3, 0.0));
        assert!((d - 1.238_078_416_812_446_9).abs() < 1e-15, "d = {d}");
        let two_legs = 2.0 * rao_distance(DiskPoint::ORIGIN, pt(0.3, 0.0));
        assert!((d - two_legs).abs() < 1e-15);
    }

    #[test]
    fn distance_keeps_precision_for_nearly_coincident_points() {
        let a = pt(0.2, 0.1);
        let b = pt(0.2 + 1e-9, 0.1);
        // Nearby points: d ~ conformal factor * |a-b|.
        let expected = a.conformal_factor() * 1e-9;
        let d = rao_distance(a, b);
        assert!(
            (d - expected).abs() <= 1e-6 * expected,
            "d = {d}, expected ~{expected}"
        );
    }

    #[test]
    fn rotation_preserves_distances() {
        let a = pt(0.4, -0.1);
        let b = pt(-0.2, 0.55);
        let theta = 0.83;
        let (ra, rb) = (a.rotate(theta).unwrap(), b.rotate(theta).unwrap());
        assert!((rao_distance(a, b) - rao_distance(ra, rb)).abs() < 1e-14);
    }

    prop_compose! {
        fn disk_point(max_norm: f64)
            (norm in 0.0..1.0f64, angle in 0.0..std::f64::consts::TAU)
            -> DiskPoint
        {
            let r = norm * max_norm;
            DiskPoint::new(r * angle.cos(), r * angle.sin()).unwrap()
        }
    }

    proptest! {
        #[test]
        fn symmetry_is_bit_exact(a in disk_point(0.999), b in disk_point(0.999)) {
            prop_assert_eq!(rao_distance(a, b), rao_distance(b, a));
        }

        #[test]
        fn triangle_inequality_holds(
            a in disk_point(0.999),
            b in disk_point(0.999),
            c in disk_point(0.999),
        ) {
            let (ab, bc, ac) = (rao_distance(a, b), rao_distance(b, c), rao_distance(a, c));
            prop_assert!(ac <= ab + bc + 1e-9, "d(a,c) = {} > {} + {}", ac, ab, bc);
        }

        #[test]
        fn origin_distance_matches_artanh(p in disk_point(0.999)) {
            let d = rao_distance(DiskPoint::ORIGIN, p);
            let closed = 2.0 * p.norm().atanh();
            prop_assert!((d - closed).abs() <= 1e-12 * closed.max(f64::MIN_POSITIVE));
        }

        #[test]
        fn dominates_twice_the_euclidean_distance(a in disk_point(0.999), b in disk_point(0.999)) {
            prop_assert!(rao_distance(a, b) >= 2.0 * euclidean_distance(a, b) - 1e-12);
        }
    }
}
