//! Minimum-time synthesis for the linearized pendulum with a circle source.
//!
//! The flow is an exact complex rotation, `z(t) = (z(0) + u) e^{it} - u`, so
//! the whole synthesis (switching semicircles, overlap curve, per-family
//! arrival times) reduces to scalar trigonometric equations.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::planar::PlanarPoint;
use crate::so3::Sign;

use std::f64::consts::PI;

pub type PendulumState = PlanarPoint;

/// Tolerance used to declare the two family arrival times equal (cut locus).
pub const CUT_TIME_TOL: f64 = 1e-9;

/// Exact flow of the pendulum with constant control `u`.
///
/// Valid for any constant `u` (the oracle also uses `u = 0`, a pure rotation).
pub fn pen_flow(z: PendulumState, u: f64, t: f64) -> PendulumState {
    let shifted = PlanarPoint::new(z.z1 + u, z.z2);
    let rotated = shifted.rotated(t);
    PlanarPoint::new(rotated.z1 - u, rotated.z2)
}

/// The bang vector field `A0 z + u b0 = (-z2, z1 + u)`.
pub fn pen_field(z: PendulumState, u: f64) -> (f64, f64) {
    (-z.z2, z.z1 + u)
}

/// Source point on `C(0, rho)` at parameter theta: `z(0) = -rho e^{-i theta}`.
pub fn source_point(theta: f64, rho: f64) -> PendulumState {
    PlanarPoint::new(-rho * theta.cos(), rho * theta.sin())
}

/// Optimal control leaving the source circle: `u = -sgn(z2(0))`.
///
/// The two points `(+-rho, 0)` admit both controls and are reported as an
/// error so the caller can handle the ambiguity explicitly.
pub fn source_feedback(theta: f64, rho: f64) -> Result<Sign> {
    check_rho(rho)?;
    let z2 = rho * theta.sin();
    if z2.abs() <= 1e-12 {
        return Err(Error::ParamOutOfRange {
            name: "theta (feedback pole, both controls admissible)",
            value: theta,
        });
    }
    Ok(if z2 > 0.0 { Sign::Minus } else { Sign::Plus })
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho > 0.0 && rho <= 2.0) {
        return Err(Error::RhoOutOfRange { value: rho });
    }
    Ok(())
}

/// One of the two switching semicircles of the circle-source problem.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SemiCircle {
    pub center: PlanarPoint,
    pub radius: f64,
    /// Parameter range of `z(theta) = center - e^{i theta}`.
    pub theta_range: (f64, f64),
    /// Family switching on this arc (the control before the switch).
    pub family: Sign,
    /// Never true for rho < 2: the arcs reflect trajectories.
    pub locally_optimal: bool,
    /// At rho = 2 the switching arcs coincide with the overlap curve.
    pub is_overlap: bool,
}

impl SemiCircle {
    pub fn point(&self, theta: f64) -> PlanarPoint {
        PlanarPoint::new(self.center.z1 - theta.cos(), self.center.z2 - theta.sin())
    }

    pub fn tangent(&self, theta: f64) -> (f64, f64) {
        (theta.sin(), -theta.cos())
    }
}

/// The two switching semicircles: centers `(1 - rho, 0)` and `(rho - 1, 0)`,
/// radius one. Not locally optimal (and hence not part of the synthesis) for
/// `rho < 2`.
pub fn switching_semicircles(rho: f64) -> Result<[SemiCircle; 2]> {
    check_rho(rho)?;
    let overlap = (rho - 2.0).abs() < 1e-12;
    Ok([
        SemiCircle {
            center: PlanarPoint::new(1.0 - rho, 0.0),
            radius: 1.0,
            theta_range: (0.0, PI),
            family: Sign::Minus,
            locally_optimal: false,
            is_overlap: overlap,
        },
        SemiCircle {
            center: PlanarPoint::new(rho - 1.0, 0.0),
            radius: 1.0,
            theta_range: (PI, 2.0 * PI),
            family: Sign::Plus,
            locally_optimal: false,
            is_overlap: overlap,
        },
    ])
}

/// Left-hand side of the overlap locus equation
/// `z1^4 + z2^4 + 2 z1^2 z2^2 - rho^2 z1^2 + (4 - rho^2) z2^2`.
pub fn overlap_locus_residual(z: PendulumState, rho: f64) -> f64 {
    let a = z.z1 * z.z1;
    let b = z.z2 * z.z2;
    a * a + b * b + 2.0 * a * b - rho * rho * a + (4.0 - rho * rho) * b
}

/// Meeting time along the overlap curve as a function of the `+` family
/// source parameter: `t(s') = -2 arctan(rho sin s' / (2 - rho cos s'))`.
pub fn overlap_param(s_prime: f64, rho: f64) -> Result<f64> {
    if !(rho > 0.0 && rho < 2.0) {
        return Err(Error::RhoOutOfRange { value: rho });
    }
    Ok(-2.0 * (rho * s_prime.sin() / (2.0 - rho * s_prime.cos())).atan())
}

/// A sample of the overlap curve (cut locus) of the pendulum synthesis.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct OverlapPoint {
    /// `-` family source parameter in [0, pi).
    pub s: f64,
    /// `+` family source parameter in [pi, 2 pi).
    pub s_prime: f64,
    /// Common meeting time.
    pub t: f64,
    pub z: PlanarPoint,
}

/// Builds the overlap point at a given `s'` from the meeting-time relation.
///
/// The curve is parametrized by `s'`; the matching `-` family parameter `s`
/// is recovered from the meeting condition
/// `z = -rho e^{i(t-s)} + 1 - e^{it} = -rho e^{i(t-s')} - 1 + e^{it}`.
pub fn overlap_point(s_prime: f64, rho: f64) -> Result<OverlapPoint> {
    let t = overlap_param(s_prime, rho)?;
    let z = pen_flow(source_point(s_prime, rho), 1.0, t);
    // -rho e^{i(t-s)} = z - 1 + e^{it}
    let w1 = z.z1 - 1.0 + t.cos();
    let w2 = z.z2 + t.sin();
    let s = (t - (-w2).atan2(-w1)).rem_euclid(2.0 * PI);
    Ok(OverlapPoint { s, s_prime, t, z })
}

/// Uniform sampling of the overlap curve over `s'` in `(pi, 2 pi)`.
pub fn overlap_curve(rho: f64, n: usize) -> Result<Vec<OverlapPoint>> {
    (0..n)
        .map(|j| {
            let s_prime = PI + PI * (j as f64 + 0.5) / n as f64;
            overlap_point(s_prime, rho)
        })
        .collect()
}

/// One time-optimal arrival at a target from the source circle.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ArrivalRecord {
    pub time: f64,
    pub family: Sign,
    /// Source parameter on `C(0, rho)`.
    pub theta: f64,
}

/// Minimum arrival times at `target` from the circle `C(0, rho)`.
///
/// For each family the scalar condition `|target + u - u e^{it}| = rho` is
/// bracketed on a fine grid over [0, pi] and bisected to 1e-12; the source
/// angle is recovered from the backward flow and checked for inward
/// admissibility. Returns the records achieving the minimum: two on the cut
/// locus, one elsewhere.
pub fn min_time_from_circle(target: PendulumState, rho: f64) -> Result<Vec<ArrivalRecord>> {
    check_rho(rho)?;
    let norm = target.norm();
    if norm > rho + 1e-12 {
        return Err(Error::TargetOutsideDisk { norm, rho });
    }
    let mut records = Vec::new();
    for family in [Sign::Minus, Sign::Plus] {
        if let Some(rec) = first_family_arrival(target, rho, family) {
            records.push(rec);
        }
    }
    if records.is_empty() {
        return Ok(records);
    }
    let best = records
        .iter()
        .map(|r| r.time)
        .fold(f64::INFINITY, f64::min);
    records.retain(|r| r.time <= best + CUT_TIME_TOL);
    records.sort_by(|a, b| a.time.partial_cmp(&b.time).unwrap());
    Ok(records)
}

fn first_family_arrival(target: PendulumState, rho: f64, family: Sign) -> Option<ArrivalRecord> {
    let u = family.as_f64();
    // backward flow: z0(t) = (target + u) e^{-it} - u; g(t) = |z0|^2 - rho^2
    let w = PlanarPoint::new(target.z1 + u, target.z2);
    let g = |t: f64| {
        let z0 = backward_source(w, u, t);
        z0.z1 * z0.z1 + z0.z2 * z0.z2 - rho * rho
    };
    let admissible = |t: f64| {
        let z0 = backward_source(w, u, t);
        u * z0.z2 <= 1e-12
    };
    let record_at = |t: f64| {
        let z0 = backward_source(w, u, t);
        let theta = z0.z2.atan2(-z0.z1).rem_euclid(2.0 * PI);
        ArrivalRecord {
            time: t,
            family,
            theta,
        }
    };

    const N: usize = 4096;
    let mut t_prev = 0.0;
    let mut g_prev = g(0.0);
    if g_prev.abs() <= 1e-12 && admissible(0.0) {
        return Some(record_at(0.0));
    }
    for j in 1..=N {
        let t = PI * j as f64 / N as f64;
        let gj = g(t);
        if g_prev < 0.0 && gj >= 0.0 {
            let root = bisect(&g, t_prev, t);
            if admissible(root) {
                return Some(record_at(root));
            }
        }
        t_prev = t;
        g_prev = gj;
    }
    None
}

fn backward_source(w: PlanarPoint, u: f64, t: f64) -> PlanarPoint {
    let r = w.rotated(-t);
    PlanarPoint::new(r.z1 - u, r.z2)
}

fn bisect(g: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    // g(lo) < 0 <= g(hi)
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if hi - lo < 1e-12 {
            return mid;
        }
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// The assembled synthesis: overlap samples and switching arcs.
#[derive(Debug, Clone)]
pub struct PenSynthesis {
    pub rho: f64,
    pub overlap: Vec<OverlapPoint>,
    pub semicircles: [SemiCircle; 2],
}

impl PenSynthesis {
    /// Builds and validates the synthesis for `rho` in (0, 2).
    ///
    /// Every overlap sample is checked against the quartic locus equation
    /// (within 1e-10) and the quadrant condition `z1 z2 >= 0`.
    pub fn build(rho: f64, n_overlap: usize) -> Result<Self> {
        let overlap = overlap_curve(rho, n_overlap)?;
        for p in &overlap {
            let res = overlap_locus_residual(p.z, rho);
            if res.abs() > 1e-10 {
                return Err(Error::RegimeViolation(format!(
                    "overlap sample off the locus: residual {res:e}"
                )));
            }
            if p.z.z1 * p.z.z2 < -1e-12 {
                return Err(Error::RegimeViolation(
                    "overlap sample violates z1 z2 >= 0".into(),
                ));
            }
        }
        Ok(PenSynthesis {
            rho,
            overlap,
            semicircles: switching_semicircles(rho)?,
        })
    }
}

/// A row of the exported synthesis grid.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SynthesisSample {
    pub z1: f64,
    pub z2: f64,
    pub u_opt: i8,
    pub min_time: f64,
    pub on_cut_locus: bool,
}

/// Samples the feedback and value function on an `n x n` grid over the disk.
pub fn sample_synthesis(rho: f64, n: usize) -> Result<Vec<SynthesisSample>> {
    let mut rows = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let z1 = -rho + 2.0 * rho * i as f64 / (n - 1) as f64;
            let z2 = -rho + 2.0 * rho * j as f64 / (n - 1) as f64;
            let z = PlanarPoint::new(z1, z2);
            if z.norm() > rho {
                continue;
            }
            let records = min_time_from_circle(z, rho)?;
            if records.is_empty() {
                continue;
            }
            rows.push(SynthesisSample {
                z1,
                z2,
                u_opt: records[0].family.as_f64() as i8,
                min_time: records[0].time,
                on_cut_locus: records.len() > 1,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn flow_closed_form_values() {
        // from the origin with u = 1 for time pi: (z0 + 1) e^{i pi} - 1 = (-2, 0)
        let z = pen_flow(PlanarPoint::origin(), 1.0, PI);
        assert!((z.z1 + 2.0).abs() < 1e-14);
        assert!(z.z2.abs() < 1e-14);
        // full turn returns the start
        let z0 = PlanarPoint::new(0.3, -0.4);
        let z = pen_flow(z0, 1.0, 2.0 * PI);
        assert!(z.dist(&z0) < 1e-14);
    }

    #[test]
    fn flow_preserves_distance_to_center() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..200 {
            let z0 = PlanarPoint::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let u = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let t = rng.random_range(0.0..2.0 * PI);
            let z = pen_flow(z0, u, t);
            let before = (z0.z1 + u).hypot(z0.z2);
            let after = (z.z1 + u).hypot(z.z2);
            assert!((before - after).abs() < 1e-12);
        }
    }

    #[test]
    fn feedback_signs() {
        // z(0) = (0, -rho) corresponds to theta = 3 pi / 2
        assert_eq!(source_feedback(1.5 * PI, 1.0).unwrap(), Sign::Plus);
        assert_eq!(source_feedback(0.5 * PI, 1.0).unwrap(), Sign::Minus);
        assert!(source_feedback(0.0, 1.0).is_err());
        assert!(source_feedback(PI, 1.0).is_err());
    }

    #[test]
    fn semicircles_geometry() {
        let [c_minus, c_plus] = switching_semicircles(1.0).unwrap();
        assert_eq!(c_minus.center, PlanarPoint::origin());
        assert_eq!(c_plus.center, PlanarPoint::origin());
        assert!(!c_minus.locally_optimal);
        assert!(!c_minus.is_overlap);
        let [a, _] = switching_semicircles(2.0).unwrap();
        assert!(a.is_overlap);
    }

    #[test]
    fn semicircles_reflect_everywhere() {
        // planar cone test: tangent against the two bang fields
        let rho = 1.3;
        let [arc_minus, arc_plus] = switching_semicircles(rho).unwrap();
        for arc in [arc_minus, arc_plus] {
            for j in 1..40 {
                let theta = arc.theta_range.0
                    + (arc.theta_range.1 - arc.theta_range.0) * j as f64 / 40.0;
                let z = arc.point(theta);
                let tangent = arc.tangent(theta);
                let bp = pen_field(z, 1.0);
                let bm = pen_field(z, -1.0);
                let verdict = crate::extremal::cone_verdict_planar(tangent, bp, bm).unwrap();
                assert_eq!(verdict, crate::extremal::ConeVerdict::Reflecting);
            }
        }
    }

    #[test]
    fn semicircle_is_switch_point_of_trajectory() {
        // a trajectory from theta with u = -sgn(sin theta) switches at time
        // t = theta on the corresponding semicircle, where the adjoint
        // lambda(t) = e^{i (t - theta)} has lambda_2 = 0
        let rho = 1.2;
        let [arc_minus, _] = switching_semicircles(rho).unwrap();
        for j in 1..20 {
            let theta = PI * j as f64 / 20.0;
            let z0 = source_point(theta, rho);
            let u = source_feedback(theta, rho).unwrap().as_f64();
            assert_eq!(u, -1.0);
            let z = pen_flow(z0, u, theta);
            assert!(z.dist(&arc_minus.point(theta)) < 1e-12);
            let lambda2 = (theta - theta).sin();
            assert_eq!(lambda2, 0.0);
        }
    }

    #[test]
    fn locus_residual_special_points() {
        for rho in [0.6, 1.0, 1.7] {
            assert_eq!(overlap_locus_residual(PlanarPoint::origin(), rho), 0.0);
            // (rho, 0) cancels algebraically
            let r = overlap_locus_residual(PlanarPoint::new(rho, 0.0), rho);
            assert!(r.abs() < 1e-12);
            // z2-axis points are off the locus except the origin
            let r = overlap_locus_residual(PlanarPoint::new(0.0, 0.3), rho);
            assert!(r > 0.0);
        }
    }

    #[test]
    fn overlap_param_values() {
        assert!(overlap_param(PI, 1.0).unwrap().abs() < 1e-15);
        let t = overlap_param(1.5 * PI, 1.0).unwrap();
        assert!((t - 2.0 * 0.5f64.atan()).abs() < 1e-14);
        assert!((t - 0.92730).abs() < 1e-5);
        // substituting back lands on the quartic locus
        let p = overlap_point(1.5 * PI, 1.0).unwrap();
        assert!(overlap_locus_residual(p.z, 1.0).abs() < 1e-12);
    }

    #[test]
    fn overlap_samples_meet_at_equal_times() {
        let rho = 1.0;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let s_prime = rng.random_range(PI + 0.05..2.0 * PI - 0.05);
            let p = overlap_point(s_prime, rho).unwrap();
            // both parametrizations reproduce the same point at the same time
            let from_plus = pen_flow(source_point(p.s_prime, rho), 1.0, p.t);
            let from_minus = pen_flow(source_point(p.s, rho), -1.0, p.t);
            assert!(from_plus.dist(&p.z) < 1e-12);
            assert!(from_minus.dist(&p.z) < 1e-12, "s' = {s_prime}");
            assert!(p.z.z1 * p.z.z2 >= -1e-12);
            // and the solver sees the cut locus
            let recs = min_time_from_circle(p.z, rho).unwrap();
            assert_eq!(recs.len(), 2, "s' = {s_prime}");
            assert!((recs[0].time - recs[1].time).abs() < 1e-9);
            assert!((recs[0].time - p.t).abs() < 1e-9);
        }
    }

    #[test]
    fn min_time_to_origin() {
        // time to the origin is arccos(1 - rho^2/2), both families
        let rho = 1.0;
        let recs = min_time_from_circle(PlanarPoint::origin(), rho).unwrap();
        assert_eq!(recs.len(), 2);
        let expected = (1.0 - rho * rho / 2.0).acos();
        assert!((recs[0].time - expected).abs() < 1e-9);
        assert!((recs[0].time - PI / 3.0).abs() < 1e-9);
        assert_ne!(recs[0].family, recs[1].family);
    }

    #[test]
    fn min_time_on_circle_is_zero() {
        let recs = min_time_from_circle(PlanarPoint::new(0.3, (1.0f64 - 0.09).sqrt()), 1.0).unwrap();
        assert!(recs[0].time.abs() < 1e-9);
    }

    #[test]
    fn outside_disk_is_rejected() {
        assert!(matches!(
            min_time_from_circle(PlanarPoint::new(1.5, 0.0), 1.0),
            Err(Error::TargetOutsideDisk { .. })
        ));
    }

    #[test]
    fn feedback_sides_of_the_overlap_curve() {
        // just above the curve the minimizer is the - family, below the +
        let rho = 1.0;
        for j in 1..20 {
            let s_prime = PI + PI * j as f64 / 20.0;
            let p = overlap_point(s_prime, rho).unwrap();
            if p.z.norm() > rho - 0.05 {
                continue;
            }
            let above = PlanarPoint::new(p.z.z1, p.z.z2 + 0.02);
            let below = PlanarPoint::new(p.z.z1, p.z.z2 - 0.02);
            if above.norm() < rho {
                let recs = min_time_from_circle(above, rho).unwrap();
                assert_eq!(recs[0].family, Sign::Minus, "above at s'={s_prime}");
            }
            if below.norm() < rho {
                let recs = min_time_from_circle(below, rho).unwrap();
                assert_eq!(recs[0].family, Sign::Plus, "below at s'={s_prime}");
            }
        }
    }

    #[test]
    fn interior_times_below_pi() {
        let rho = 1.4;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let z = PlanarPoint::new(rng.random_range(-rho..rho), rng.random_range(-rho..rho));
            if z.norm() >= rho {
                continue;
            }
            let recs = min_time_from_circle(z, rho).unwrap();
            assert!(!recs.is_empty());
            assert!(recs[0].time < PI);
        }
    }

    #[test]
    fn synthesis_build_validates() {
        let syn = PenSynthesis::build(1.0, 200).unwrap();
        assert_eq!(syn.overlap.len(), 200);
    }
}
