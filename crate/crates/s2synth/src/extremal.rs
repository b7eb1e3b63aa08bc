//! The bang-bang extremal family from the north pole.
//!
//! Extremals are concatenations of bang arcs: a first arc of duration
//! `s_i` in (0, pi], interior arcs all of duration `v(s_i)`, and a final arc
//! of duration `s_f <= v(s_i)`. Switching curves collect the k-th switching
//! points of the family; their tangents are computed in closed form because
//! the local-optimality cone test is sign-sensitive.

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::so3::{self, generators, rodrigues, MirrorX3, Sign, SpherePoint};

use std::f64::consts::{FRAC_PI_4, PI};

/// Largest alpha for which `k_max <= n_mon` holds (verified on a grid in the
/// tests); below this threshold every switching time `T_k`, `k <= k_max`, is
/// strictly increasing in the first-arc duration.
pub const ALPHA_KMAX_MONOTONE: f64 = 0.28;

/// The geometric parameter alpha with its derived arithmetic quantities.
#[derive(Debug, Clone, Copy)]
pub struct AlphaParam {
    alpha: f64,
    remainder: f64,
    k_max: usize,
    n_mon: usize,
}

impl AlphaParam {
    /// Builds from a raw alpha in (0, pi/4).
    ///
    /// `pi/(2 alpha)` within 1e-9 of an integer is snapped to remainder zero,
    /// so that the degenerate regime is reachable from a floating-point alpha.
    pub fn from_alpha(alpha: f64) -> Result<Self> {
        Self::check_alpha(alpha)?;
        let ratio = PI / (2.0 * alpha);
        let mut k = ratio.floor() as usize;
        let mut r = ratio - ratio.floor();
        if r > 1.0 - 1e-9 {
            k += 1;
            r = 0.0;
        } else if r < 1e-9 {
            r = 0.0;
        }
        Ok(AlphaParam {
            alpha,
            remainder: r,
            k_max: k,
            n_mon: n_mon(alpha),
        })
    }

    /// Constant-remainder sequence: `alpha = pi / (2 (k + rbar))`.
    pub fn from_k_rbar(k: usize, rbar: f64) -> Result<Self> {
        if !(rbar > 0.0 && rbar < 1.0) {
            return Err(Error::ParamOutOfRange {
                name: "rbar",
                value: rbar,
            });
        }
        let alpha = PI / (2.0 * (k as f64 + rbar));
        Self::check_alpha(alpha)?;
        Ok(AlphaParam {
            alpha,
            remainder: rbar,
            k_max: k,
            n_mon: n_mon(alpha),
        })
    }

    /// Proportional-remainder sequence: alpha solves `r(alpha) = C alpha`,
    /// i.e. `C alpha^2 + k alpha - pi/2 = 0`.
    pub fn from_k_c(k: usize, c: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(Error::ParamOutOfRange { name: "C", value: c });
        }
        let kf = k as f64;
        let alpha = PI / (kf + (kf * kf + 2.0 * PI * c).sqrt());
        Self::check_alpha(alpha)?;
        let remainder = c * alpha;
        if remainder >= 1.0 {
            return Err(Error::ParamOutOfRange {
                name: "C*alpha",
                value: remainder,
            });
        }
        Ok(AlphaParam {
            alpha,
            remainder,
            k_max: k,
            n_mon: n_mon(alpha),
        })
    }

    /// Zero-remainder sequence: `alpha = pi / (2k)`.
    pub fn from_k_r0(k: usize) -> Result<Self> {
        let alpha = PI / (2.0 * k as f64);
        Self::check_alpha(alpha)?;
        Ok(AlphaParam {
            alpha,
            remainder: 0.0,
            k_max: k,
            n_mon: n_mon(alpha),
        })
    }

    fn check_alpha(alpha: f64) -> Result<()> {
        if !(alpha > 0.0 && alpha < FRAC_PI_4) {
            return Err(Error::AlphaOutOfRange {
                value: alpha,
                lo: 0.0,
                hi: FRAC_PI_4,
            });
        }
        Ok(())
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Fractional part of `pi / (2 alpha)`.
    pub fn remainder(&self) -> f64 {
        self.remainder
    }

    /// Integer part of `pi / (2 alpha)`: index of the last switching curve.
    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// Largest k for which `T_k(s) = s + k v(s)` is strictly increasing.
    pub fn n_mon(&self) -> usize {
        self.n_mon
    }
}

fn n_mon(alpha: f64) -> usize {
    let q = 1.0 / alpha.tan().powi(2);
    ((q - 1.0).powi(2) / (2.0 * q - 1.0)).floor() as usize
}

/// Interior-arc duration `v(s) = pi + 2 arctan(sin s / (cos s + cot^2 alpha))`.
pub fn interior_duration(s: f64, alpha: f64) -> Result<f64> {
    check_s_range(s)?;
    AlphaParam::check_alpha(alpha)?;
    Ok(v(s, alpha))
}

pub(crate) fn v(s: f64, alpha: f64) -> f64 {
    let q = 1.0 / alpha.tan().powi(2);
    PI + 2.0 * (s.sin() / (s.cos() + q)).atan()
}

/// `v'(s) = 2 (1 + q cos s) / (1 + 2 q cos s + q^2)`, `q = cot^2 alpha`.
pub(crate) fn v_prime(s: f64, alpha: f64) -> f64 {
    let q = 1.0 / alpha.tan().powi(2);
    2.0 * (1.0 + q * s.cos()) / (1.0 + 2.0 * q * s.cos() + q * q)
}

fn check_s_range(s: f64) -> Result<()> {
    if !(0.0..=PI).contains(&s) {
        return Err(Error::ParamOutOfRange { name: "s", value: s });
    }
    Ok(())
}

/// One extremal of the family, identified by its arc structure.
#[derive(Debug, Clone, Copy)]
pub struct BangSequence {
    pub eps_first: Sign,
    pub s_i: f64,
    pub n_arcs: usize,
    pub s_f: f64,
}

impl BangSequence {
    pub fn new(eps_first: Sign, s_i: f64, n_arcs: usize, s_f: f64) -> Result<Self> {
        if !(s_i > 0.0 && s_i <= PI) {
            return Err(Error::ParamOutOfRange { name: "s_i", value: s_i });
        }
        if n_arcs == 0 {
            return Err(Error::ParamOutOfRange { name: "n_arcs", value: 0.0 });
        }
        if n_arcs >= 2 && !(s_f > 0.0) {
            return Err(Error::ParamOutOfRange { name: "s_f", value: s_f });
        }
        Ok(BangSequence {
            eps_first,
            s_i,
            n_arcs,
            s_f,
        })
    }
}

/// Endpoint and total time of a bang sequence applied to the north pole.
///
/// For a single arc the final-arc field is ignored and the time is `s_i`;
/// otherwise the time is `s_i + (n-2) v(s_i) + s_f`.
pub fn extremal_endpoint(seq: &BangSequence, alpha: &AlphaParam) -> Result<(SpherePoint, f64)> {
    if seq.n_arcs > alpha.k_max() + 1 {
        return Err(Error::ParamOutOfRange {
            name: "n_arcs (at most k_max + 1)",
            value: seq.n_arcs as f64,
        });
    }
    let gen = generators(alpha.alpha())?;
    if seq.n_arcs == 1 {
        let p = so3::rodrigues_apply(
            gen.bang(seq.eps_first).axis(),
            seq.s_i,
            SpherePoint::north().as_vector(),
        );
        return Ok((SpherePoint::from_vector_unchecked(p), seq.s_i));
    }
    let dur = v(seq.s_i, alpha.alpha());
    if seq.s_f > dur + 1e-12 {
        return Err(Error::FinalArcTooLong {
            s_f: seq.s_f,
            limit: dur,
        });
    }
    let mut p = so3::rodrigues_apply(
        gen.bang(seq.eps_first).axis(),
        seq.s_i,
        SpherePoint::north().as_vector(),
    );
    for j in 2..seq.n_arcs {
        p = so3::rodrigues_apply(gen.bang(seq.eps_first.at_arc(j)).axis(), dur, &p);
    }
    p = so3::rodrigues_apply(gen.bang(seq.eps_first.at_arc(seq.n_arcs)).axis(), seq.s_f, &p);
    let time = seq.s_i + (seq.n_arcs as f64 - 2.0) * dur + seq.s_f;
    Ok((SpherePoint::from_vector_unchecked(p), time))
}

/// A sample of the k-th switching curve.
#[derive(Debug, Clone, Copy)]
pub struct SwitchCurveSample {
    pub k: usize,
    pub eps: Sign,
    pub s: f64,
    pub point: SpherePoint,
    pub tangent: Vector3<f64>,
    pub arrival_time: f64,
}

/// Evaluates `C_k^eps(s)` together with its exact tangent and arrival time.
///
/// The recursion is `C_1^eps(s) = e^{v(s) X_eps} e^{s X_-eps} N`,
/// `C_k^eps(s) = e^{v(s) X_eps} C_{k-1}^{-eps}(s)`; the tangent follows by the
/// product rule with `v'(s)` in closed form.
pub fn switching_curve(k: usize, eps: Sign, s: f64, alpha: &AlphaParam) -> Result<SwitchCurveSample> {
    if k < 1 || k > alpha.k_max() {
        return Err(Error::CurveIndexOutOfRange {
            k,
            k_max: alpha.k_max(),
        });
    }
    if !(s > 0.0 && s <= PI) {
        return Err(Error::ParamOutOfRange { name: "s", value: s });
    }
    let a = alpha.alpha();
    let gen = generators(a)?;
    let dur = v(s, a);
    let dvp = v_prime(s, a);

    // sign of the j-th curve in the recursion, ending at `eps` for j = k
    let eps_j = |j: usize| if (k - j) % 2 == 0 { eps } else { eps.flip() };

    let x1 = gen.bang(eps_j(1));
    let x_inner = gen.bang(eps_j(1).flip());
    let inner = so3::rodrigues_apply(x_inner.axis(), s, SpherePoint::north().as_vector());
    let r1 = rodrigues(&x1.matrix(), dur);
    let mut point = r1 * inner;
    // d/ds [e^{v(s) X} e^{s X'} N] = v' X e^{v X} e^{s X'} N + e^{v X} X' e^{s X'} N
    let mut tangent = x1.apply(&point) * dvp + r1 * x_inner.apply(&inner);

    for j in 2..=k {
        let xj = gen.bang(eps_j(j));
        let rj = rodrigues(&xj.matrix(), dur);
        point = rj * point;
        tangent = xj.apply(&point) * dvp + rj * tangent;
    }

    Ok(SwitchCurveSample {
        k,
        eps,
        s,
        point: SpherePoint::from_vector_unchecked(point),
        tangent,
        arrival_time: s + k as f64 * dur,
    })
}

/// `d T_k / ds` in closed form; strictly positive for `k <= n_mon`.
pub fn switch_time_derivative(k: usize, s: f64, alpha: f64) -> Result<f64> {
    check_s_range(s)?;
    AlphaParam::check_alpha(alpha)?;
    let q = 1.0 / alpha.tan().powi(2);
    let den = 1.0 + 2.0 * q * s.cos() + q * q;
    Ok((den + k as f64 * (2.0 + 2.0 * q * s.cos())) / den)
}

/// Outcome of the cone test on a switching-curve tangent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConeVerdict {
    /// Tangent decomposes on `{X+, X-}` with strictly opposite signs: the
    /// curve never reflects incoming trajectories.
    LocallyOptimal,
    /// One coefficient vanishes (within tolerance): boundary of the cone.
    ConjugatePoint,
    /// Same-sign coefficients: trajectories are reflected and optimality is
    /// lost before the curve.
    Reflecting,
}

/// Coefficient magnitude below which the tangent is declared on the cone
/// boundary.
pub const CONE_ZERO_TOL: f64 = 1e-9;

/// Classifies a switching-curve sample by decomposing its tangent on the
/// bang directions at the sample point.
///
/// At `s = pi` the curve parametrization ends, so the verdict there uses the
/// one-sided (left) tangent carried by the sample.
pub fn local_optimality(sample: &SwitchCurveSample, alpha: &AlphaParam) -> Result<ConeVerdict> {
    let gen = generators(alpha.alpha())?;
    let p = sample.point.as_vector();
    let b_plus = gen.x_plus.axis().cross(p);
    let b_minus = gen.x_minus.axis().cross(p);
    cone_decompose(&sample.tangent, &b_plus, &b_minus)
}

fn cone_decompose(
    tangent: &Vector3<f64>,
    b_plus: &Vector3<f64>,
    b_minus: &Vector3<f64>,
) -> Result<ConeVerdict> {
    // Solve tangent = a b+ + b b- in the plane they span (all three vectors
    // lie in the tangent plane of the sphere at the sample point).
    let e1 = b_plus;
    let n = b_plus.cross(b_minus);
    let nn = n.norm();
    if nn <= 1e-12 * b_plus.norm() * b_minus.norm() {
        return Err(Error::DegenerateBasis);
    }
    let e2 = n.cross(e1);
    // coordinates in the (e1, e2) frame
    let m11 = e1.dot(e1);
    let m21 = 0.0;
    let m12 = e1.dot(b_minus);
    let m22 = e2.dot(b_minus);
    let t1 = e1.dot(tangent);
    let t2 = e2.dot(tangent);
    let det = m11 * m22 - m12 * m21;
    let a = (t1 * m22 - m12 * t2) / det;
    let b = (m11 * t2 - m21 * t1) / det;
    Ok(classify_cone(a, b))
}

/// Planar variant of the cone test, used for switching curves of the limit
/// systems.
pub fn cone_verdict_planar(
    tangent: (f64, f64),
    b_plus: (f64, f64),
    b_minus: (f64, f64),
) -> Result<ConeVerdict> {
    let det = b_plus.0 * b_minus.1 - b_plus.1 * b_minus.0;
    let scale = b_plus.0.hypot(b_plus.1) * b_minus.0.hypot(b_minus.1);
    if det.abs() <= 1e-12 * scale {
        return Err(Error::DegenerateBasis);
    }
    let a = (tangent.0 * b_minus.1 - tangent.1 * b_minus.0) / det;
    let b = (b_plus.0 * tangent.1 - b_plus.1 * tangent.0) / det;
    Ok(classify_cone(a, b))
}

fn classify_cone(a: f64, b: f64) -> ConeVerdict {
    if a.abs() <= CONE_ZERO_TOL || b.abs() <= CONE_ZERO_TOL {
        ConeVerdict::ConjugatePoint
    } else if a * b < 0.0 {
        ConeVerdict::LocallyOptimal
    } else {
        ConeVerdict::Reflecting
    }
}

/// Mirrored switching curve: `C_k^{-eps}(s) = mirror(C_k^{eps}(s))`.
pub fn mirror_sample(sample: &SwitchCurveSample) -> SwitchCurveSample {
    SwitchCurveSample {
        k: sample.k,
        eps: sample.eps.flip(),
        s: sample.s,
        point: sample.point.mirror_x3(),
        tangent: sample.tangent.mirror_x3(),
        arrival_time: sample.arrival_time,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::so3::rot_exp;
    use std::f64::consts::FRAC_PI_8;

    #[test]
    fn alpha_param_derived_quantities() {
        let p = AlphaParam::from_alpha(0.1).unwrap();
        assert_eq!(p.k_max(), 15);
        assert_eq!(p.n_mon(), 48);
        assert!((p.remainder() - (PI / 0.2 - 15.0)).abs() < 1e-12);

        let p = AlphaParam::from_k_rbar(20, 0.5).unwrap();
        assert!((p.alpha() - PI / 41.0).abs() < 1e-15);
        assert_eq!(p.k_max(), 20);
        assert_eq!(p.remainder(), 0.5);

        let p = AlphaParam::from_k_r0(10).unwrap();
        assert_eq!(p.remainder(), 0.0);
        assert_eq!(p.k_max(), 10);
        // floating-point roundtrip through from_alpha snaps to r = 0
        let q = AlphaParam::from_alpha(p.alpha()).unwrap();
        assert_eq!(q.remainder(), 0.0);
        assert_eq!(q.k_max(), 10);

        let p = AlphaParam::from_k_c(30, PI / 16.0).unwrap();
        // r(alpha) = C alpha by construction
        assert!((PI / (2.0 * p.alpha()) - 30.0 - (PI / 16.0) * p.alpha()).abs() < 1e-12);
    }

    #[test]
    fn kmax_below_nmon_up_to_documented_threshold() {
        let mut a = 0.005;
        while a < ALPHA_KMAX_MONOTONE {
            let p = AlphaParam::from_alpha(a).unwrap();
            assert!(
                p.k_max() <= p.n_mon(),
                "k_max > n_mon at alpha = {a}: {} > {}",
                p.k_max(),
                p.n_mon()
            );
            a += 0.0025;
        }
    }

    #[test]
    fn interior_duration_endpoints_and_range() {
        for alpha in [0.05, 0.1, 0.2, 0.7] {
            assert_eq!(interior_duration(0.0, alpha).unwrap(), PI);
            assert!((interior_duration(PI, alpha).unwrap() - PI).abs() < 1e-12);
        }
        // v > pi strictly on (0, pi), checked on a dense grid
        for alpha in [0.05, 0.1, 0.2] {
            for j in 1..10_000 {
                let s = PI * j as f64 / 10_000.0;
                let val = v(s, alpha);
                assert!(val > PI && val < 2.0 * PI);
            }
        }
    }

    #[test]
    fn interior_duration_value_at_half_pi() {
        // v(pi/2) = pi + 2 arctan(tan^2(alpha))
        let alpha = FRAC_PI_8;
        let got = interior_duration(PI / 2.0, alpha).unwrap();
        let expected = PI + 2.0 * alpha.tan().powi(2).atan();
        assert!((got - expected).abs() < 1e-13);
        assert!((got - 3.48141).abs() < 1e-4);
    }

    #[test]
    fn v_prime_matches_finite_differences() {
        let alpha = 0.13;
        let h = 1e-6;
        for &s in &[0.3, 1.0, 2.0, 3.0] {
            let fd = (v(s + h, alpha) - v(s - h, alpha)) / (2.0 * h);
            assert!((v_prime(s, alpha) - fd).abs() < 1e-8);
        }
    }

    #[test]
    fn single_arc_endpoint_is_rotation_of_north() {
        let alpha = AlphaParam::from_alpha(0.2).unwrap();
        let seq = BangSequence::new(Sign::Plus, 0.4, 1, 0.0).unwrap();
        let (p, t) = extremal_endpoint(&seq, &alpha).unwrap();
        assert_eq!(t, 0.4);
        let gen = generators(0.2).unwrap();
        let expected = rot_exp(&gen.x_plus, 0.4).unwrap().apply(&SpherePoint::north());
        assert!((p.as_vector() - expected.as_vector()).norm() < 1e-15);
    }

    #[test]
    fn two_full_arcs_match_conjugate_rotation() {
        // endpoint of (+, pi, 2, pi) is e^{pi X-} e^{pi X+} N = e^{Theta(pi) Z+(pi)} N
        let alpha = AlphaParam::from_alpha(0.2).unwrap();
        let seq = BangSequence::new(Sign::Plus, PI, 2, PI).unwrap();
        let (p, t) = extremal_endpoint(&seq, &alpha).unwrap();
        assert!((t - 2.0 * PI).abs() < 1e-12);
        let pair = crate::so3::conjugate_pair(PI, 0.2).unwrap();
        let expected = rot_exp(&pair.z_plus, pair.theta)
            .unwrap()
            .apply(&SpherePoint::north());
        assert!((p.as_vector() - expected.as_vector()).norm() < 1e-10);
    }

    #[test]
    fn final_arc_longer_than_interior_duration_is_rejected() {
        let alpha = AlphaParam::from_alpha(0.2).unwrap();
        let seq = BangSequence::new(Sign::Plus, 1.0, 3, 2.0 * PI).unwrap();
        assert!(matches!(
            extremal_endpoint(&seq, &alpha),
            Err(Error::FinalArcTooLong { .. })
        ));
    }

    #[test]
    fn arc_count_bound_is_enforced() {
        let alpha = AlphaParam::from_alpha(0.2).unwrap();
        let seq = BangSequence::new(Sign::Plus, 1.0, alpha.k_max() + 2, 1.0).unwrap();
        assert!(matches!(
            extremal_endpoint(&seq, &alpha),
            Err(Error::ParamOutOfRange { .. })
        ));
    }

    #[test]
    fn switching_curve_small_s_limit() {
        // C_1^+(s) -> e^{pi X+} N as s -> 0+ since v(0) = pi
        let alpha = AlphaParam::from_alpha(0.2).unwrap();
        let gen = generators(0.2).unwrap();
        let limit = rot_exp(&gen.x_plus, PI).unwrap().apply(&SpherePoint::north());
        let sample = switching_curve(1, Sign::Plus, 1e-9, &alpha).unwrap();
        assert!((sample.point.as_vector() - limit.as_vector()).norm() < 1e-7);
    }

    #[test]
    fn switching_curve_mirror_symmetry() {
        let alpha = AlphaParam::from_alpha(0.1).unwrap();
        let plus = switching_curve(3, Sign::Plus, 1.2, &alpha).unwrap();
        let minus = switching_curve(3, Sign::Minus, 1.2, &alpha).unwrap();
        assert!(
            (plus.point.mirror_x3().as_vector() - minus.point.as_vector()).norm() < 1e-12
        );
        assert!((plus.tangent.mirror_x3() - minus.tangent).norm() < 1e-12);
        assert_eq!(plus.arrival_time, minus.arrival_time);
    }

    #[test]
    fn switching_curve_tangent_matches_finite_differences() {
        let alpha = AlphaParam::from_alpha(0.11).unwrap();
        let h = 1e-6;
        for &s in &[0.5, 1.3, 2.4, 3.0] {
            for k in [1, 2, 5] {
                let c = switching_curve(k, Sign::Plus, s, &alpha).unwrap();
                let cp = switching_curve(k, Sign::Plus, s + h, &alpha).unwrap();
                let cm = switching_curve(k, Sign::Plus, s - h, &alpha).unwrap();
                let fd = (cp.point.as_vector() - cm.point.as_vector()) / (2.0 * h);
                assert!(
                    (c.tangent - fd).norm() < 1e-6,
                    "tangent mismatch at k={k}, s={s}"
                );
            }
        }
    }

    #[test]
    fn arrival_time_value() {
        // T_2(pi/2) at alpha = pi/8 is pi/2 + 2 v(pi/2)
        let alpha = AlphaParam::from_alpha(FRAC_PI_8).unwrap();
        let sample = switching_curve(2, Sign::Plus, PI / 2.0, &alpha).unwrap();
        let expected = PI / 2.0 + 2.0 * v(PI / 2.0, FRAC_PI_8);
        assert!((sample.arrival_time - expected).abs() < 1e-12);
        assert!((sample.arrival_time - 8.53362).abs() < 1e-4);
    }

    #[test]
    fn switch_time_derivative_values() {
        // k = 0 gives exactly 1 for any s
        for &s in &[0.0, 1.0, 2.0, PI] {
            assert_eq!(switch_time_derivative(0, s, 0.1).unwrap(), 1.0);
        }
        // positive at s = pi for k = n_mon
        let p = AlphaParam::from_alpha(0.1).unwrap();
        let d = switch_time_derivative(p.n_mon(), PI, 0.1).unwrap();
        assert!(d > 0.0);
        // and for all k <= n_mon on a grid, at several alphas
        for alpha in [0.05, 0.1, 0.2] {
            let p = AlphaParam::from_alpha(alpha).unwrap();
            for k in 1..=p.n_mon() {
                for j in 0..=200 {
                    let s = PI * j as f64 / 200.0;
                    assert!(switch_time_derivative(k, s, alpha).unwrap() > 0.0);
                }
            }
        }
    }

    #[test]
    fn derivative_formula_is_one_plus_k_v_prime() {
        let alpha = 0.17;
        for &s in &[0.3, 1.5, 2.9] {
            for k in [1usize, 4, 9] {
                let lhs = switch_time_derivative(k, s, alpha).unwrap();
                let rhs = 1.0 + k as f64 * v_prime(s, alpha);
                assert!((lhs - rhs).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn no_interior_switching_at_multiples_of_pi() {
        // T_j(s) = k pi has no solution with s in (0, pi) for j < k:
        // T_j ranges over (j pi, (j+1) pi) there, so scan for sign changes.
        let p = AlphaParam::from_alpha(0.1).unwrap();
        for k in 1..=p.k_max() {
            for j in 1..k {
                let target = k as f64 * PI;
                let mut prev = j as f64 * PI + 1e-9 + j as f64 * (v(1e-9, 0.1) - PI) - target;
                let mut crossings = 0;
                for i in 1..2000 {
                    let s = (PI - 2e-9) * i as f64 / 1999.0 + 1e-9;
                    let val = s + j as f64 * v(s, 0.1) - target;
                    if val == 0.0 || val.signum() != prev.signum() {
                        crossings += 1;
                    }
                    prev = val;
                }
                assert_eq!(crossings, 0, "interior solution found for j={j}, k={k}");
            }
        }
    }

    #[test]
    fn cone_test_on_last_curves() {
        // C_{k_M} is nowhere locally optimal for r = 0.5 and small alpha
        let alpha = AlphaParam::from_k_rbar(20, 0.5).unwrap();
        for j in 1..40 {
            let s = PI * j as f64 / 40.0;
            let sample = switching_curve(alpha.k_max(), Sign::Plus, s, &alpha).unwrap();
            let verdict = local_optimality(&sample, &alpha).unwrap();
            assert_eq!(verdict, ConeVerdict::Reflecting, "s = {s}");
        }
        // C_{k_M - 2} is locally optimal on (0, pi)
        let alpha = AlphaParam::from_alpha(PI / 21.0).unwrap();
        for j in 1..40 {
            let s = PI * j as f64 / 40.0;
            let sample = switching_curve(alpha.k_max() - 2, Sign::Plus, s, &alpha).unwrap();
            let verdict = local_optimality(&sample, &alpha).unwrap();
            assert_eq!(verdict, ConeVerdict::LocallyOptimal, "s = {s}");
        }
    }

    #[test]
    fn cone_transition_for_zero_remainder() {
        // r = 0, alpha = pi/20: the cone verdict of C_{k_M} changes near
        // arccos(sqrt(1/3)), where the coefficient along X- crosses zero.
        // The curve is tangent to the X+ flow at leading order there, so the
        // verdict orientation is decided by an O(alpha) coefficient whose
        // magnitude follows (pi/8) alpha (1 + 3 cos 2s).
        let alpha = AlphaParam::from_k_r0(10).unwrap();
        let sbar = (1.0f64 / 3.0).sqrt().acos();
        let mut transition = None;
        let n = 400;
        let mut prev = None;
        for j in 1..=n {
            let s = PI * j as f64 / (n as f64 + 1.0);
            let sample = switching_curve(alpha.k_max(), Sign::Plus, s, &alpha).unwrap();
            let verdict = local_optimality(&sample, &alpha).unwrap();
            if let Some(p) = prev {
                if p != verdict {
                    transition = Some(s);
                    break;
                }
            }
            prev = Some(verdict);
        }
        let t = transition.expect("no transition found");
        assert!(
            (t - sbar).abs() < 0.2,
            "transition at {t}, expected near {sbar}"
        );
        // past pi - sbar the verdict is reflecting again
        let sample = switching_curve(alpha.k_max(), Sign::Plus, 2.6, &alpha).unwrap();
        assert_eq!(
            local_optimality(&sample, &alpha).unwrap(),
            ConeVerdict::Reflecting
        );
    }
}
