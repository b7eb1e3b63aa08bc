//! Degenerate-remainder regimes: the curve L, its singular points, the
//! restricted Jordan front, the segment overlap, and the switching-loss
//! parameter of the zero-remainder case.
//!
//! For `r(alpha) = C alpha` the front at `k_max pi`, rescaled by `1/alpha^2`,
//! converges to the closed curve `L`; for `C < pi/4` that curve carries four
//! cusps and two double points and the minimum-time front is the Jordan
//! restriction between the double points. For `r(alpha) = 0` the front
//! passes through the south pole and the last switching curve stays optimal
//! up to a parameter `s(alpha)` converging to `arccos(sqrt(1/3))`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::extremal::{switching_curve, AlphaParam};
use crate::front::{self, n_alpha};
use crate::planar::{closed_polyline_is_simple, PlanarPoint};
use crate::so3::{generators, Sign};

use std::f64::consts::{FRAC_PI_4, PI};

/// The limit curve `L(s) = (cos s (-2C + pi sin^2 s / 2), sin s (pi + 2C - pi sin^2 s / 2))`.
pub fn l_curve(s: f64, c: f64) -> PlanarPoint {
    let (ss, cs) = s.sin_cos();
    PlanarPoint::new(
        cs * (-2.0 * c + PI * ss * ss / 2.0),
        ss * (PI + 2.0 * c - PI * ss * ss / 2.0),
    )
}

/// `L'(s) = (2C + pi - (3 pi / 2) sin^2 s) (sin s, cos s)`; the scalar factor
/// vanishing is exactly the cusp condition.
pub fn l_curve_deriv(s: f64, c: f64) -> PlanarPoint {
    let (ss, cs) = s.sin_cos();
    let g = 2.0 * c + PI - 1.5 * PI * ss * ss;
    PlanarPoint::new(g * ss, g * cs)
}

/// The rescaled front `N_alpha(F(alpha, k_max pi))` glued over [0, 2 pi]
/// (branch `+` on [0, pi], branch `-` on [pi, 2 pi]).
#[derive(Debug, Clone, Copy)]
pub struct LAlphaCurve {
    alpha: AlphaParam,
}

impl LAlphaCurve {
    pub fn new(alpha: &AlphaParam) -> Self {
        LAlphaCurve { alpha: *alpha }
    }

    pub fn point(&self, s: f64) -> Result<PlanarPoint> {
        let (branch, sb) = front::glued_branch(self.alpha.k_max(), s);
        let p = front::front_point(&self.alpha, self.alpha.k_max(), branch, sb)?;
        Ok(n_alpha(&p, self.alpha.alpha()))
    }

    pub fn deriv(&self, s: f64) -> Result<PlanarPoint> {
        let (branch, sb) = front::glued_branch(self.alpha.k_max(), s);
        let (_, tan) =
            front::front_point_and_tangent(&self.alpha, self.alpha.k_max(), branch, sb)?;
        let a2 = self.alpha.alpha() * self.alpha.alpha();
        Ok(PlanarPoint::new(tan.x / a2, tan.y / a2))
    }
}

/// A cusp of the (limit or perturbed) front curve.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Cusp {
    pub s: f64,
    pub point: PlanarPoint,
    /// Norm of the curve velocity at the located parameter.
    pub speed: f64,
}

/// A double point: two parameters mapping to one point.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DoublePair {
    pub s1: f64,
    pub s2: f64,
    pub point: PlanarPoint,
    /// Distance between the two images at the located parameters.
    pub mismatch: f64,
}

/// The four cusp parameters of `L`: `sin^2 s = (2 + 4C/pi) / 3`.
///
/// Empty for `C >= pi/4` (the curve is then an immersed circle). With an
/// alpha supplied, each limit cusp is refined on the exact rescaled front by
/// bisection of the velocity component along the limit cusp axis.
pub fn cusp_points(c: f64, alpha: Option<&AlphaParam>) -> Result<Vec<Cusp>> {
    if c <= 0.0 {
        return Err(Error::ParamOutOfRange { name: "C", value: c });
    }
    if c >= FRAC_PI_4 {
        return Ok(Vec::new());
    }
    let sin2 = (2.0 + 4.0 * c / PI) / 3.0;
    let s0 = sin2.sqrt().asin();
    let limits = [s0, PI - s0, PI + s0, 2.0 * PI - s0];
    limits
        .iter()
        .map(|&s_lim| match alpha {
            None => Ok(Cusp {
                s: s_lim,
                point: l_curve(s_lim, c),
                speed: l_curve_deriv(s_lim, c).norm(),
            }),
            Some(a) => refine_cusp(c, a, s_lim),
        })
        .collect()
}

fn refine_cusp(_c: f64, alpha: &AlphaParam, s_lim: f64) -> Result<Cusp> {
    let curve = LAlphaCurve::new(alpha);
    // at the limit cusp L'' is parallel to (sin s, cos s)
    let dir = (s_lim.sin(), s_lim.cos());
    let h = |s: f64| -> Result<f64> {
        let d = curve.deriv(s)?;
        Ok(d.z1 * dir.0 + d.z2 * dir.1)
    };
    let mut width = 0.25f64;
    let (mut lo, mut hi) = loop {
        let lo = s_lim - width;
        let hi = s_lim + width;
        let (hlo, hhi) = (h(lo)?, h(hi)?);
        if hlo * hhi < 0.0 {
            break (lo, hi);
        }
        width *= 1.6;
        if width > 1.2 {
            return Err(Error::NewtonFailed {
                s: s_lim,
                iters: 0,
                residual: hlo.abs().min(hhi.abs()),
            });
        }
    };
    let mut hlo = h(lo)?;
    for _ in 0..120 {
        let mid = 0.5 * (lo + hi);
        if hi - lo < 1e-14 {
            break;
        }
        let hm = h(mid)?;
        if hm == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if hm * hlo < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            hlo = hm;
        }
    }
    let s = 0.5 * (lo + hi);
    Ok(Cusp {
        s,
        point: curve.point(s)?,
        speed: curve.deriv(s)?.norm(),
    })
}

/// The two double-point pairs of `L`: `sin(theta_d) = 2 sqrt(C / pi)`,
/// pairs `(theta_d, pi - theta_d)` and `(pi + theta_d, 2 pi - theta_d)`.
///
/// Empty for `C >= pi/4`. With an alpha supplied, each pair is refined on the
/// exact rescaled front by a 2x2 Newton iteration on
/// `L_alpha(s1) - L_alpha(s2) = 0`.
pub fn double_points(c: f64, alpha: Option<&AlphaParam>) -> Result<Vec<DoublePair>> {
    if c <= 0.0 {
        return Err(Error::ParamOutOfRange { name: "C", value: c });
    }
    if c >= FRAC_PI_4 {
        return Ok(Vec::new());
    }
    let theta_d = (2.0 * (c / PI).sqrt()).asin();
    let limit_pairs = [
        (theta_d, PI - theta_d),
        (PI + theta_d, 2.0 * PI - theta_d),
    ];
    limit_pairs
        .iter()
        .map(|&(s1, s2)| match alpha {
            None => Ok(DoublePair {
                s1,
                s2,
                point: l_curve(s1, c),
                mismatch: l_curve(s1, c).dist(&l_curve(s2, c)),
            }),
            Some(a) => refine_double(a, s1, s2),
        })
        .collect()
}

fn refine_double(alpha: &AlphaParam, mut s1: f64, mut s2: f64) -> Result<DoublePair> {
    let curve = LAlphaCurve::new(alpha);
    for _ in 0..60 {
        let p1 = curve.point(s1)?;
        let p2 = curve.point(s2)?;
        let f = (p1.z1 - p2.z1, p1.z2 - p2.z2);
        let res = f.0.hypot(f.1);
        // the rescaled evaluation has a roundoff floor of a few 1e-12
        if res <= 5e-11 {
            return Ok(DoublePair {
                s1,
                s2,
                point: p1,
                mismatch: res,
            });
        }
        let d1 = curve.deriv(s1)?;
        let d2 = curve.deriv(s2)?;
        let det = d1.z1 * (-d2.z2) - (-d2.z1) * d1.z2;
        if det.abs() < 1e-14 {
            break;
        }
        let ds1 = (f.0 * (-d2.z2) - (-d2.z1) * f.1) / det;
        let ds2 = (d1.z1 * f.1 - f.0 * d1.z2) / det;
        s1 -= ds1.clamp(-0.2, 0.2);
        s2 -= ds2.clamp(-0.2, 0.2);
    }
    Err(Error::NewtonFailed {
        s: s1,
        iters: 60,
        residual: f64::NAN,
    })
}

/// The restricted front: a Jordan curve for every `C != pi/4`.
#[derive(Debug, Clone)]
pub struct JordanCurve {
    /// Kept parameter intervals of the glued curve.
    pub intervals: Vec<(f64, f64)>,
    pub samples: Vec<(f64, PlanarPoint)>,
    pub is_simple: bool,
    /// The restriction is the minimum-time front at `k_max pi`.
    pub is_optimal_front: bool,
}

/// Restriction of the front curve to the complement of the two loops cut off
/// by the double points (full curve for `C > pi/4`).
///
/// Refuses `C = pi/4`, where the regime bifurcates.
pub fn jordan_restriction(
    c: f64,
    alpha: Option<&AlphaParam>,
    n_samples: usize,
) -> Result<JordanCurve> {
    if (c - FRAC_PI_4).abs() < 1e-9 {
        return Err(Error::UnresolvedBifurcation);
    }
    let eval = |s: f64| -> Result<PlanarPoint> {
        match alpha {
            None => Ok(l_curve(s, c)),
            Some(a) => LAlphaCurve::new(a).point(s),
        }
    };
    let intervals: Vec<(f64, f64)> = if c > FRAC_PI_4 {
        vec![(0.0, 2.0 * PI)]
    } else {
        let doubles = double_points(c, alpha)?;
        let (s1p, s2p) = (doubles[0].s1, doubles[0].s2);
        let (s1m, s2m) = (doubles[1].s1, doubles[1].s2);
        vec![(0.0, s1p), (s2p, s1m), (s2m, 2.0 * PI)]
    };
    let total: f64 = intervals.iter().map(|(a, b)| b - a).sum();
    let mut samples = Vec::new();
    for &(a, b) in &intervals {
        let n = ((b - a) / total * n_samples as f64).ceil().max(2.0) as usize;
        for j in 0..n {
            let s = a + (b - a) * j as f64 / n as f64;
            samples.push((s, eval(s)?));
        }
    }
    // drop consecutive duplicates (the two double-point parameters map to
    // one geometric vertex)
    samples.dedup_by(|a, b| a.1.dist(&b.1) < 1e-9);
    let polyline: Vec<PlanarPoint> = samples.iter().map(|(_, p)| *p).collect();
    let is_simple = closed_polyline_is_simple(&polyline);
    Ok(JordanCurve {
        intervals,
        samples,
        is_simple,
        is_optimal_front: is_simple,
    })
}

/// The segment overlap curve of the second-order limit system.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SegmentOverlap {
    pub c: f64,
    pub endpoints: [PlanarPoint; 2],
    /// Feedback above the segment (below is the opposite).
    pub control_above: i8,
}

impl SegmentOverlap {
    /// Sources of the two limit-optimal trajectories reaching the origin:
    /// the double points for `C < pi/4`, the top and bottom of the curve
    /// otherwise. Limit trajectories are vertical lines.
    pub fn origin_sources(&self) -> [PlanarPoint; 2] {
        if self.c < FRAC_PI_4 {
            let d = 2.0 * (PI * self.c).sqrt();
            [PlanarPoint::new(0.0, d), PlanarPoint::new(0.0, -d)]
        } else {
            let top = PI / 2.0 + 2.0 * self.c;
            [PlanarPoint::new(0.0, top), PlanarPoint::new(0.0, -top)]
        }
    }
}

/// The overlap segment between `(-2C, 0)` and `(2C, 0)`; control -1 above,
/// +1 below, with vertical integral curves.
pub fn seg_overlap(c: f64) -> Result<SegmentOverlap> {
    if c <= 0.0 {
        return Err(Error::ParamOutOfRange { name: "C", value: c });
    }
    if (c - FRAC_PI_4).abs() < 1e-9 {
        return Err(Error::UnresolvedBifurcation);
    }
    Ok(SegmentOverlap {
        c,
        endpoints: [PlanarPoint::new(-2.0 * c, 0.0), PlanarPoint::new(2.0 * c, 0.0)],
        control_above: -1,
    })
}

/// Limit of the switching-loss parameter: `arccos(sqrt(1/3))`.
pub fn switch_loss_limit() -> f64 {
    (1.0f64 / 3.0).sqrt().acos()
}

/// Parameter at which the last switching curve stops being optimal in the
/// zero-remainder regime: smallest root in `(0, pi)` of
/// `H(s) = det(X+(C(s)), C'(s), C(s))` along `C = C^+_{k_max}`.
pub fn r0_switch_loss(alpha: &AlphaParam) -> Result<f64> {
    if alpha.remainder() != 0.0 {
        return Err(Error::RegimeViolation(format!(
            "r0_switch_loss requires r(alpha) = 0, got {}",
            alpha.remainder()
        )));
    }
    if alpha.k_max() < 5 {
        return Err(Error::RegimeViolation(format!(
            "r0_switch_loss requires k >= 5, got {}",
            alpha.k_max()
        )));
    }
    let gen = generators(alpha.alpha())?;
    // det(a, b, c) = a . (b x c)
    let det_h = |s: f64| -> Result<f64> {
        let sample = switching_curve(alpha.k_max(), Sign::Plus, s, alpha)?;
        let p = *sample.point.as_vector();
        let field = gen.x_plus.axis().cross(&p);
        Ok(field.dot(&sample.tangent.cross(&p)))
    };
    let n = 4000;
    let lo = 0.05;
    let hi = PI - 1e-4;
    let mut prev_s = lo;
    let mut prev = det_h(lo)?;
    for j in 1..=n {
        let s = lo + (hi - lo) * j as f64 / n as f64;
        let val = det_h(s)?;
        if prev != 0.0 && val != 0.0 && prev.signum() != val.signum() {
            // bisect
            let (mut a, mut b) = (prev_s, s);
            let mut fa = prev;
            for _ in 0..100 {
                let m = 0.5 * (a + b);
                if b - a < 1e-12 {
                    break;
                }
                let fm = det_h(m)?;
                if fm == 0.0 {
                    return Ok(m);
                }
                if fa.signum() != fm.signum() {
                    b = m;
                } else {
                    a = m;
                    fa = fm;
                }
            }
            return Ok(0.5 * (a + b));
        }
        prev_s = s;
        prev = val;
    }
    Err(Error::RegimeViolation(
        "no sign change of H(s) on (0, pi): not in the zero-remainder regime".into(),
    ))
}

/// How the parameter sequence approaches zero.
#[derive(Debug, Clone, Copy, Serialize)]
pub enum AlphaSpec {
    Direct { alpha: f64 },
    ConstantRemainder { k: usize, rbar: f64 },
    ProportionalRemainder { k: usize, c: f64 },
    ZeroRemainder { k: usize },
}

/// Inferred regime name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    C1,
    C2,
    C3,
}

/// Threshold on `r(alpha)/alpha` below which a direct alpha is classified as
/// the proportional regime (the shape bifurcation sits at `r/alpha = pi/4`).
pub const C2_INFER_MAX_RATIO: f64 = 2.0;

impl AlphaSpec {
    pub fn build(&self) -> Result<(AlphaParam, Regime, Option<f64>, Option<f64>)> {
        match *self {
            AlphaSpec::ConstantRemainder { k, rbar } => Ok((
                AlphaParam::from_k_rbar(k, rbar)?,
                Regime::C1,
                Some(rbar),
                None,
            )),
            AlphaSpec::ProportionalRemainder { k, c } => Ok((
                AlphaParam::from_k_c(k, c)?,
                Regime::C2,
                None,
                Some(c),
            )),
            AlphaSpec::ZeroRemainder { k } => {
                Ok((AlphaParam::from_k_r0(k)?, Regime::C3, None, None))
            }
            AlphaSpec::Direct { alpha } => {
                let p = AlphaParam::from_alpha(alpha)?;
                if p.remainder() == 0.0 {
                    Ok((p, Regime::C3, None, None))
                } else if p.remainder() / p.alpha() <= C2_INFER_MAX_RATIO {
                    let c = p.remainder() / p.alpha();
                    Ok((p, Regime::C2, None, Some(c)))
                } else {
                    Ok((p, Regime::C1, Some(p.remainder()), None))
                }
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseReport {
    pub regime: Regime,
    pub alpha: f64,
    pub k_max: usize,
    pub remainder: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_bar: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub overlap_endpoints: Option<[PlanarPoint; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cusps: Option<Vec<Cusp>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub doubles: Option<Vec<DoublePair>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub segment: Option<SegmentOverlap>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_alpha: Option<f64>,
}

/// Computes the regime-specific synthesis objects for an alpha specification.
pub fn classify(spec: &AlphaSpec) -> Result<CaseReport> {
    let (alpha, regime, r_bar, c) = spec.build()?;
    let mut report = CaseReport {
        regime,
        alpha: alpha.alpha(),
        k_max: alpha.k_max(),
        remainder: alpha.remainder(),
        r_bar,
        c,
        overlap_endpoints: None,
        cusps: None,
        doubles: None,
        segment: None,
        s_alpha: None,
    };
    match regime {
        Regime::C1 => {
            let sigma = crate::cutlocus::SigmaAlpha::new(&alpha)?;
            report.overlap_endpoints =
                Some([sigma.corner(Sign::Minus)?, sigma.corner(Sign::Plus)?]);
        }
        Regime::C2 => {
            let c = c.expect("C2 regime carries C");
            if c < FRAC_PI_4 {
                report.cusps = Some(cusp_points(c, Some(&alpha))?);
                report.doubles = Some(double_points(c, Some(&alpha))?);
            } else {
                report.cusps = Some(Vec::new());
                report.doubles = Some(Vec::new());
            }
            report.segment = Some(seg_overlap(c)?);
        }
        Regime::C3 => {
            report.s_alpha = Some(r0_switch_loss(&alpha)?);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extremal::v;

    #[test]
    fn l_curve_values() {
        let c = 0.3;
        let p0 = l_curve(0.0, c);
        assert!((p0.z1 + 2.0 * c).abs() < 1e-15 && p0.z2.abs() < 1e-15);
        let ppi = l_curve(PI, c);
        assert!((ppi.z1 - 2.0 * c).abs() < 1e-14 && ppi.z2.abs() < 1e-14);
        let phalf = l_curve(PI / 2.0, c);
        assert!(phalf.z1.abs() < 1e-16);
        assert!((phalf.z2 - (PI + 2.0 * c - PI / 2.0)).abs() < 1e-15);
    }

    #[test]
    fn l_curve_deriv_matches_fd() {
        let c = 0.22;
        let h = 1e-6;
        for &s in &[0.3, 1.0, 2.5, 4.0, 5.9] {
            let d = l_curve_deriv(s, c);
            let fd1 = (l_curve(s + h, c).z1 - l_curve(s - h, c).z1) / (2.0 * h);
            let fd2 = (l_curve(s + h, c).z2 - l_curve(s - h, c).z2) / (2.0 * h);
            assert!((d.z1 - fd1).abs() < 1e-8 && (d.z2 - fd2).abs() < 1e-8);
        }
    }

    #[test]
    fn l_curve_antipodal_symmetry() {
        let c = 0.15;
        for &s in &[0.2, 1.1, 2.0, 3.0] {
            let p = l_curve(s, c);
            let q = l_curve(s + PI, c);
            assert!((p.z1 + q.z1).abs() < 1e-13 && (p.z2 + q.z2).abs() < 1e-13);
        }
        // the exact rescaled front has the same symmetry
        let alpha = AlphaParam::from_k_c(40, c).unwrap();
        let curve = LAlphaCurve::new(&alpha);
        for &s in &[0.2, 1.1, 2.0, 3.0] {
            let p = curve.point(s).unwrap();
            let q = curve.point(s + PI).unwrap();
            assert!((p.z1 + q.z1).abs() < 1e-10 && (p.z2 + q.z2).abs() < 1e-10);
        }
    }

    #[test]
    fn rescaled_front_converges_to_l_curve() {
        let c = PI / 16.0;
        let mut errs = Vec::new();
        for &k in &[40usize, 80] {
            let alpha = AlphaParam::from_k_c(k, c).unwrap();
            let curve = LAlphaCurve::new(&alpha);
            let mut worst = 0.0f64;
            for j in 0..=150 {
                let s = 2.0 * PI * j as f64 / 150.0;
                worst = worst.max(curve.point(s).unwrap().dist(&l_curve(s, c)));
            }
            errs.push(worst);
        }
        let ratio = errs[0] / errs[1];
        assert!((1.5..2.9).contains(&ratio), "errors {errs:?}");
    }

    #[test]
    fn limit_cusp_values() {
        // C = 0 limit: sin^2 s = 2/3
        let s = ((2.0f64 / 3.0).sqrt()).asin();
        assert!((s - 0.95532).abs() < 1e-5);
        assert!((s - switch_loss_limit()).abs() < 1e-12);
        // C = pi/16: sin^2 s = 3/4, s = pi/3
        let cusps = cusp_points(PI / 16.0, None).unwrap();
        assert_eq!(cusps.len(), 4);
        assert!((cusps[0].s - PI / 3.0).abs() < 1e-12);
        assert!(cusps[0].speed < 1e-12);
        // no cusps beyond the bifurcation
        assert!(cusp_points(1.0, None).unwrap().is_empty());
    }

    #[test]
    fn refined_cusps_near_limit() {
        let c = PI / 16.0;
        let alpha = AlphaParam::from_k_c(40, c).unwrap();
        let cusps = cusp_points(c, Some(&alpha)).unwrap();
        assert_eq!(cusps.len(), 4);
        for (cusp, lim) in cusps.iter().zip(cusp_points(c, None).unwrap()) {
            assert!(
                (cusp.s - lim.s).abs() < 5.0 * alpha.alpha(),
                "cusp {} vs limit {}",
                cusp.s,
                lim.s
            );
            assert!(cusp.speed < 1e-9, "residual speed {}", cusp.speed);
        }
    }

    #[test]
    fn limit_double_points() {
        let c = PI / 16.0;
        let doubles = double_points(c, None).unwrap();
        assert_eq!(doubles.len(), 2);
        assert!((doubles[0].s1 - PI / 6.0).abs() < 1e-12);
        assert!((doubles[0].s2 - 5.0 * PI / 6.0).abs() < 1e-12);
        assert!(doubles[0].mismatch < 1e-13);
        // D+ = (0, 2 sqrt(pi C))
        assert!(doubles[0].point.z1.abs() < 1e-13);
        assert!((doubles[0].point.z2 - 2.0 * (PI * c).sqrt()).abs() < 1e-12);
        assert!((doubles[1].point.z2 + 2.0 * (PI * c).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn refined_doubles_satisfy_switch_relation() {
        // s2 = v(s1) - s1 on the exact front
        let c = PI / 16.0;
        let alpha = AlphaParam::from_k_c(30, c).unwrap();
        let doubles = double_points(c, Some(&alpha)).unwrap();
        let d = &doubles[0];
        assert!(d.mismatch <= 1e-10);
        let expected = v(d.s1, alpha.alpha()) - d.s1;
        assert!(
            (d.s2 - expected).abs() < 1e-6,
            "s2 = {}, v(s1) - s1 = {expected}",
            d.s2
        );
    }

    #[test]
    fn cusps_interlace_doubles() {
        for &c in &[0.05, 0.2, PI / 16.0, 0.7] {
            if c >= FRAC_PI_4 {
                continue;
            }
            let cusps = cusp_points(c, None).unwrap();
            let doubles = double_points(c, None).unwrap();
            let mut params: Vec<(f64, char)> = cusps.iter().map(|x| (x.s, 'c')).collect();
            params.extend([
                (doubles[0].s1, 'd'),
                (doubles[0].s2, 'd'),
                (doubles[1].s1, 'd'),
                (doubles[1].s2, 'd'),
            ]);
            params.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            let pattern: String = params.iter().map(|x| x.1).collect();
            assert_eq!(pattern, "dccddccd", "C = {c}");
        }
    }

    #[test]
    fn jordan_restriction_cases() {
        // C > pi/4: the whole curve is simple
        let curve = jordan_restriction(PI / 2.0, None, 400).unwrap();
        assert!(curve.is_simple);
        assert_eq!(curve.intervals.len(), 1);
        // C < pi/4: the full curve is not simple, the restriction is
        let full: Vec<PlanarPoint> = (0..600)
            .map(|j| l_curve(2.0 * PI * j as f64 / 600.0, PI / 16.0))
            .collect();
        assert!(!closed_polyline_is_simple(&full));
        let curve = jordan_restriction(PI / 16.0, None, 400).unwrap();
        assert!(curve.is_simple);
        assert!(curve.is_optimal_front);
        assert_eq!(curve.intervals.len(), 3);
        // the removed-arc endpoints map to the double points
        let doubles = double_points(PI / 16.0, None).unwrap();
        let d_plus = doubles[0].point;
        assert!(l_curve(curve.intervals[0].1, PI / 16.0).dist(&d_plus) < 1e-10);
        assert!(l_curve(curve.intervals[1].0, PI / 16.0).dist(&d_plus) < 1e-10);
        // bifurcation wall
        assert!(matches!(
            jordan_restriction(FRAC_PI_4, None, 100),
            Err(Error::UnresolvedBifurcation)
        ));
    }

    #[test]
    fn segment_descriptor() {
        let seg = seg_overlap(PI / 16.0).unwrap();
        assert!((seg.endpoints[0].z1 + PI / 8.0).abs() < 1e-15);
        assert!((seg.endpoints[1].z1 - PI / 8.0).abs() < 1e-15);
        assert_eq!(seg.control_above, -1);
        let sources = seg.origin_sources();
        assert!((sources[0].z2 - 2.0 * (PI * PI / 16.0).sqrt()).abs() < 1e-12);
        // C > pi/4: origin reached from the vertical-tangent extremes
        let seg = seg_overlap(PI / 2.0).unwrap();
        let sources = seg.origin_sources();
        assert!((sources[0].z2 - (PI / 2.0 + PI)).abs() < 1e-12);
        assert!(matches!(seg_overlap(FRAC_PI_4), Err(Error::UnresolvedBifurcation)));
    }

    #[test]
    fn r0_front_contains_origin() {
        // with C = 0 the rescaled front passes through the origin exactly
        let alpha = AlphaParam::from_k_r0(20).unwrap();
        let curve = LAlphaCurve::new(&alpha);
        let p = curve.point(0.0).unwrap();
        assert!(p.norm() < 1e-9, "front misses the origin by {}", p.norm());
    }

    #[test]
    fn switch_loss_parameter_converges() {
        let limit = switch_loss_limit();
        assert!((limit - 0.955317).abs() < 1e-6);
        let s20 = r0_switch_loss(&AlphaParam::from_k_r0(20).unwrap()).unwrap();
        let s40 = r0_switch_loss(&AlphaParam::from_k_r0(40).unwrap()).unwrap();
        assert!(s20 < PI && s40 < PI);
        let e20 = (s20 - limit).abs();
        let e40 = (s40 - limit).abs();
        assert!(e40 < e20, "errors {e20} -> {e40}");
        let ratio = e20 / e40;
        assert!((1.4..3.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn r0_switch_loss_guards_regime() {
        let alpha = AlphaParam::from_k_rbar(20, 0.5).unwrap();
        assert!(matches!(
            r0_switch_loss(&alpha),
            Err(Error::RegimeViolation(_))
        ));
    }

    #[test]
    fn classify_all_regimes() {
        let r = classify(&AlphaSpec::ConstantRemainder { k: 20, rbar: 0.5 }).unwrap();
        assert_eq!(r.regime, Regime::C1);
        let ends = r.overlap_endpoints.unwrap();
        assert!(ends[0].dist(&PlanarPoint::new(-1.0, 0.0)) < 0.3);
        assert!(ends[1].dist(&PlanarPoint::new(1.0, 0.0)) < 0.3);

        let r = classify(&AlphaSpec::ProportionalRemainder {
            k: 40,
            c: PI / 16.0,
        })
        .unwrap();
        assert_eq!(r.regime, Regime::C2);
        let doubles = r.doubles.unwrap();
        assert!((doubles[0].s1 - PI / 6.0).abs() < 0.1);
        assert!((doubles[0].s2 - 5.0 * PI / 6.0).abs() < 0.1);

        let r = classify(&AlphaSpec::ZeroRemainder { k: 40 }).unwrap();
        assert_eq!(r.regime, Regime::C3);
        assert!((r.s_alpha.unwrap() - 0.9553).abs() < 0.1);
    }
}
