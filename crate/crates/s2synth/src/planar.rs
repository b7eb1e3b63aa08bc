//! Plane geometry shared by the rescaled charts and the pendulum limit.

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

/// A point of the rescaled plane (or of the pendulum phase plane).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanarPoint {
    pub z1: f64,
    pub z2: f64,
}

impl PlanarPoint {
    pub fn new(z1: f64, z2: f64) -> Self {
        PlanarPoint { z1, z2 }
    }

    pub const fn origin() -> Self {
        PlanarPoint { z1: 0.0, z2: 0.0 }
    }

    pub fn norm(&self) -> f64 {
        self.z1.hypot(self.z2)
    }

    pub fn as_vector(&self) -> Vector2<f64> {
        Vector2::new(self.z1, self.z2)
    }

    pub fn from_vector(v: Vector2<f64>) -> Self {
        PlanarPoint { z1: v.x, z2: v.y }
    }

    pub fn dist(&self, other: &PlanarPoint) -> f64 {
        (self.z1 - other.z1).hypot(self.z2 - other.z2)
    }

    /// Rotation by `t` about the origin (multiplication by `e^{it}`).
    pub fn rotated(&self, t: f64) -> Self {
        let (s, c) = t.sin_cos();
        PlanarPoint {
            z1: c * self.z1 - s * self.z2,
            z2: s * self.z1 + c * self.z2,
        }
    }
}

impl std::ops::Add for PlanarPoint {
    type Output = PlanarPoint;
    fn add(self, rhs: PlanarPoint) -> PlanarPoint {
        PlanarPoint::new(self.z1 + rhs.z1, self.z2 + rhs.z2)
    }
}

impl std::ops::Sub for PlanarPoint {
    type Output = PlanarPoint;
    fn sub(self, rhs: PlanarPoint) -> PlanarPoint {
        PlanarPoint::new(self.z1 - rhs.z1, self.z2 - rhs.z2)
    }
}

impl std::ops::Mul<f64> for PlanarPoint {
    type Output = PlanarPoint;
    fn mul(self, k: f64) -> PlanarPoint {
        PlanarPoint::new(self.z1 * k, self.z2 * k)
    }
}

/// Distance from `p` to the segment `[a, b]`.
pub fn point_segment_distance(p: &PlanarPoint, a: &PlanarPoint, b: &PlanarPoint) -> f64 {
    let ab = *b - *a;
    let ap = *p - *a;
    let len2 = ab.z1 * ab.z1 + ab.z2 * ab.z2;
    if len2 == 0.0 {
        return p.dist(a);
    }
    let tau = ((ap.z1 * ab.z1 + ap.z2 * ab.z2) / len2).clamp(0.0, 1.0);
    p.dist(&(*a + ab * tau))
}

/// Symmetric Hausdorff distance between two polylines, measured point-to-segment.
pub fn hausdorff_polyline(a: &[PlanarPoint], b: &[PlanarPoint]) -> f64 {
    one_sided_hausdorff(a, b).max(one_sided_hausdorff(b, a))
}

fn one_sided_hausdorff(from: &[PlanarPoint], to: &[PlanarPoint]) -> f64 {
    let mut worst = 0.0f64;
    for p in from {
        let mut best = f64::INFINITY;
        if to.len() == 1 {
            best = p.dist(&to[0]);
        }
        for w in to.windows(2) {
            best = best.min(point_segment_distance(p, &w[0], &w[1]));
            if best == 0.0 {
                break;
            }
        }
        worst = worst.max(best);
    }
    worst
}

/// Whether the closed polyline through `pts` is simple (no self-intersections).
///
/// Neighboring segments sharing an endpoint are not counted as crossings.
pub fn closed_polyline_is_simple(pts: &[PlanarPoint]) -> bool {
    let n = pts.len();
    if n < 4 {
        return true;
    }
    let seg = |i: usize| (pts[i], pts[(i + 1) % n]);
    for i in 0..n {
        for j in (i + 2)..n {
            // skip adjacent segments (including the wrap-around pair)
            if i == 0 && j == n - 1 {
                continue;
            }
            let (a, b) = seg(i);
            let (c, d) = seg(j);
            if segments_cross(&a, &b, &c, &d) {
                return false;
            }
        }
    }
    true
}

fn segments_cross(a: &PlanarPoint, b: &PlanarPoint, c: &PlanarPoint, d: &PlanarPoint) -> bool {
    let orient = |p: &PlanarPoint, q: &PlanarPoint, r: &PlanarPoint| {
        (q.z1 - p.z1) * (r.z2 - p.z2) - (q.z2 - p.z2) * (r.z1 - p.z1)
    };
    let d1 = orient(a, b, c);
    let d2 = orient(a, b, d);
    let d3 = orient(c, d, a);
    let d4 = orient(c, d, b);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}
