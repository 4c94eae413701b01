//! Small fixed-size vector types and planar isometries.

use serde::{Deserialize, Serialize};
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, o: Self) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn normalized(self) -> Self {
        self / self.norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn lerp(self, o: Self, t: f64) -> Self {
        self + (o - self) * t
    }
}

impl Add for Vec3 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Div<f64> for Vec3 {
    type Output = Self;
    fn div(self, s: f64) -> Self {
        Self::new(self.x / s, self.y / s, self.z / s)
    }
}

impl Neg for Vec3 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, o: Self) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, o: Self) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn normalized(self) -> Self {
        self / self.norm()
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn perp(self) -> Self {
        Self::new(-self.y, self.x)
    }

    pub fn rotated(self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn lerp(self, o: Self, t: f64) -> Self {
        self + (o - self) * t
    }
}

impl Add for Vec2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(self.x * s, self.y * s)
    }
}

impl Div<f64> for Vec2 {
    type Output = Self;
    fn div(self, s: f64) -> Self {
        Self::new(self.x / s, self.y / s)
    }
}

impl Neg for Vec2 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

/// Orientation-preserving rigid motion of the plane: `p ↦ R·p + t`.
///
/// The rotation is stored as its cosine/sine pair so that composing many
/// unfoldings never renormalizes an angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarIsometry {
    pub cos: f64,
    pub sin: f64,
    pub translation: Vec2,
}

impl PlanarIsometry {
    pub const IDENTITY: Self = Self {
        cos: 1.0,
        sin: 0.0,
        translation: Vec2::new(0.0, 0.0),
    };

    pub fn from_angle(angle: f64, translation: Vec2) -> Self {
        let (sin, cos) = angle.sin_cos();
        Self {
            cos,
            sin,
            translation,
        }
    }

    /// The isometry taking segment `(a0, a1)` onto `(b0, b1)`, assuming
    /// both segments have the same length.
    pub fn matching(a0: Vec2, a1: Vec2, b0: Vec2, b1: Vec2) -> Self {
        let da = (a1 - a0).normalized();
        let db = (b1 - b0).normalized();
        let cos = da.dot(db);
        let sin = da.cross(db);
        let r = Self {
            cos,
            sin,
            translation: Vec2::default(),
        };
        let t = b0 - r.rotate(a0);
        Self {
            translation: t,
            ..r
        }
    }

    pub fn rotate(&self, v: Vec2) -> Vec2 {
        Vec2::new(
            self.cos * v.x - self.sin * v.y,
            self.sin * v.x + self.cos * v.y,
        )
    }

    pub fn apply(&self, p: Vec2) -> Vec2 {
        self.rotate(p) + self.translation
    }

    pub fn inverse(&self) -> Self {
        let r = Self {
            cos: self.cos,
            sin: -self.sin,
            translation: Vec2::default(),
        };
        Self {
            translation: -r.rotate(self.translation),
            ..r
        }
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            cos: self.cos * other.cos - self.sin * other.sin,
            sin: self.sin * other.cos + self.cos * other.sin,
            translation: self.apply(other.translation),
        }
    }

    pub fn determinant(&self) -> f64 {
        self.cos * self.cos + self.sin * self.sin
    }
}

/// Unsigned angle between two planar vectors in `[0, π]`.
pub fn angle_between(a: Vec2, b: Vec2) -> f64 {
    a.cross(b).abs().atan2(a.dot(b))
}

/// Counterclockwise angle from `a` to `b` in `[0, 2π)`.
pub fn ccw_angle(a: Vec2, b: Vec2) -> f64 {
    let t = a.cross(b).atan2(a.dot(b));
    if t < 0.0 {
        t + std::f64::consts::TAU
    } else {
        t
    }
}

pub fn triangle_area_2d(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    0.5 * (b - a).cross(c - a)
}

/// Distance from `p` to the closed segment `[a, b]`.
pub fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    (p - a.lerp(b, t)).norm()
}

/// Minimum distance between two closed segments; zero when they intersect.
pub fn segment_segment_distance(a0: Vec2, a1: Vec2, b0: Vec2, b1: Vec2) -> f64 {
    let d1 = (a1 - a0).cross(b0 - a0);
    let d2 = (a1 - a0).cross(b1 - a0);
    let d3 = (b1 - b0).cross(a0 - b0);
    let d4 = (b1 - b0).cross(a1 - b0);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return 0.0;
    }
    point_segment_distance(a0, b0, b1)
        .min(point_segment_distance(a1, b0, b1))
        .min(point_segment_distance(b0, a0, a1))
        .min(point_segment_distance(b1, a0, a1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn isometry_matching_maps_segment() {
        let iso = PlanarIsometry::matching(
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(2.0, 1.0),
            Vec2::new(2.0, 2.0),
        );
        let p = iso.apply(Vec2::new(1.0, 0.0));
        assert!((p - Vec2::new(2.0, 2.0)).norm() < 1e-15);
        assert!((iso.determinant() - 1.0).abs() < 1e-15);
        let back = iso.inverse().apply(p);
        assert!((back - Vec2::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn compose_matches_sequential_application() {
        let a = PlanarIsometry::from_angle(0.3, Vec2::new(1.0, -2.0));
        let b = PlanarIsometry::from_angle(-1.1, Vec2::new(0.5, 0.25));
        let p = Vec2::new(0.7, 0.2);
        let q1 = a.apply(b.apply(p));
        let q2 = a.compose(&b).apply(p);
        assert!((q1 - q2).norm() < 1e-14);
    }

    #[test]
    fn angles() {
        let x = Vec2::new(1.0, 0.0);
        let y = Vec2::new(0.0, 1.0);
        assert!((angle_between(x, y) - PI / 2.0).abs() < 1e-15);
        assert!((ccw_angle(y, x) - 1.5 * PI).abs() < 1e-15);
        assert!((angle_between(x, -x) - PI).abs() < 1e-15);
    }

    #[test]
    fn segment_distance() {
        let d = segment_segment_distance(
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(0.0, 1.0),
            Vec2::new(1.0, 0.0),
        );
        assert_eq!(d, 0.0);
        let d = segment_segment_distance(
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(0.0, 0.5),
            Vec2::new(1.0, 0.5),
        );
        assert!((d - 0.5).abs() < 1e-15);
    }
}
