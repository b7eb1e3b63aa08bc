//! Extremal fronts at times `k pi`, their alpha-series, and rescaling maps.
//!
//! At `T = k pi` every extremal has switched exactly k times, so the front is
//! the union of two closed-form branches, one per starting control. Each
//! branch is a product of three rotations (the interior arcs collapse into a
//! single conjugate rotation), which makes pointwise evaluation and exact
//! s-differentiation cheap.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::extremal::{v, v_prime, AlphaParam};
use crate::planar::PlanarPoint;
use crate::so3::{
    self, big_theta, big_theta_deriv, cross_matrix, generators, rodrigues, rodrigues_deriv,
    z_minus_axis, z_minus_axis_deriv, MirrorX3, Sign, SpherePoint,
};

use std::f64::consts::PI;

/// Number of samples per branch used when a front is materialized.
pub const FRONT_GRID: usize = 2048;

/// Default validity threshold for the alpha power series of `chi`.
///
/// The series converges on some interval around zero whose size is not
/// known in closed form; residual sweeps with `alpha` beyond this window
/// report the blow-up instead of failing, and the window itself is only a
/// conservative default.
pub const SERIES_ALPHA_WINDOW: f64 = PI / 16.0;

/// Whether `alpha` lies inside the default series validity window.
pub fn within_series_window(alpha: f64) -> bool {
    alpha.abs() < SERIES_ALPHA_WINDOW
}

/// Threshold on the planar radius (relative to its maximum) below which the
/// projected front is considered to pass through the projection axis.
const RHO_POLE_REL_TOL: f64 = 1e-8;

/// One sampled point of a front branch.
#[derive(Debug, Clone, Copy)]
pub struct FrontSample {
    pub s: f64,
    pub point: SpherePoint,
    pub tangent: Vector3<f64>,
}

/// The extremal front at time `k pi`, sampled on a uniform grid over [0, pi].
#[derive(Debug, Clone)]
pub struct FrontCurve {
    pub alpha: AlphaParam,
    pub k: usize,
    pub samples_plus: Vec<FrontSample>,
    pub samples_minus: Vec<FrontSample>,
    pub is_simple_closed: bool,
    pub is_optimal: bool,
}

/// Topology of the projected front.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrontTopology {
    SimpleClosed,
    SelfIntersecting { through_pole: bool },
}

/// Polar coordinates of the glued front projection, for diagnostics.
#[derive(Debug, Clone)]
pub struct PolarData {
    /// Glued parameter over [0, 2 pi] (branch `+` first, then branch `-`).
    pub s: Vec<f64>,
    pub rho: Vec<f64>,
    /// Unwrapped polar angle.
    pub beta: Vec<f64>,
}

/// Evaluates one front branch point `E^eps(alpha, k, s)`.
pub fn front_point(alpha: &AlphaParam, k: usize, eps: Sign, s: f64) -> Result<SpherePoint> {
    front_factors(alpha, k, eps, s).map(|f| f.point())
}

/// Front branch point together with its exact s-derivative.
pub fn front_point_and_tangent(
    alpha: &AlphaParam,
    k: usize,
    eps: Sign,
    s: f64,
) -> Result<(SpherePoint, Vector3<f64>)> {
    let f = front_factors(alpha, k, eps, s)?;
    Ok((f.point(), f.tangent()))
}

/// The three rotation factors of a front branch and their s-derivatives.
struct FrontFactors {
    outer: Matrix3<f64>,
    outer_axis: Vector3<f64>,
    outer_angle_deriv: f64,
    mid: Matrix3<f64>,
    mid_deriv: Matrix3<f64>,
    inner_axis: Vector3<f64>,
    inner_applied: Vector3<f64>, // e^{s X_eps} N
}

impl FrontFactors {
    fn point_vec(&self) -> Vector3<f64> {
        self.outer * (self.mid * self.inner_applied)
    }

    fn point(&self) -> SpherePoint {
        SpherePoint::from_vector_unchecked(self.point_vec())
    }

    fn tangent(&self) -> Vector3<f64> {
        let mid_inner = self.mid * self.inner_applied;
        let term_outer = self.outer_axis.cross(&(self.outer * mid_inner)) * self.outer_angle_deriv;
        let term_mid = self.outer * (self.mid_deriv * self.inner_applied);
        let term_inner = self.outer * (self.mid * self.inner_axis.cross(&self.inner_applied));
        term_outer + term_mid + term_inner
    }
}

fn front_factors(alpha: &AlphaParam, k: usize, eps: Sign, s: f64) -> Result<FrontFactors> {
    if k < 1 || k > alpha.k_max() {
        return Err(Error::CurveIndexOutOfRange {
            k,
            k_max: alpha.k_max(),
        });
    }
    if k > alpha.n_mon() {
        return Err(Error::MonotonicityViolated {
            k,
            n_mon: alpha.n_mon(),
        });
    }
    let a = alpha.alpha();
    let gen = generators(a)?;
    let vs = v(s, a);
    let vp = v_prime(s, a);
    let theta_v = big_theta(vs, a);
    let theta_v_deriv = big_theta_deriv(vs, a) * vp;

    // conjugate-rotation axis for this branch: Z_{-eps}(v(s))
    let zax = match eps {
        Sign::Plus => z_minus_axis(vs, a),
        Sign::Minus => z_minus_axis(vs, a).mirror_x3_axis(),
    };
    let zax_deriv = match eps {
        Sign::Plus => z_minus_axis_deriv(vs, a) * vp,
        Sign::Minus => (z_minus_axis_deriv(vs, a) * vp).mirror_x3_axis(),
    };

    let kf = k as f64;
    let (outer_sign, angle, angle_deriv, half_count) = if k % 2 == 1 {
        // e^{(k pi - (k-1) v - s) X_{-eps}}, (k-1)/2 conjugate turns
        (
            eps.flip(),
            kf * PI - (kf - 1.0) * vs - s,
            -(kf - 1.0) * vp - 1.0,
            (kf - 1.0) / 2.0,
        )
    } else {
        // e^{(k (pi - v) - s) X_{eps}}, k/2 conjugate turns
        (eps, kf * (PI - vs) - s, -kf * vp - 1.0, kf / 2.0)
    };

    let outer_axis = *gen.bang(outer_sign).axis();
    let outer = rodrigues(&cross_matrix(&outer_axis), angle);

    let zmat = cross_matrix(&zax);
    let zmat_deriv = cross_matrix(&zax_deriv);
    let mid_angle = half_count * theta_v;
    let mid_angle_deriv = half_count * theta_v_deriv;
    let mid = rodrigues(&zmat, mid_angle);
    let mid_deriv = rodrigues_deriv(&zmat, &zmat_deriv, mid_angle, mid_angle_deriv);

    let inner_axis = *gen.bang(eps).axis();
    let inner_applied = so3::rodrigues_apply(&inner_axis, s, SpherePoint::north().as_vector());

    Ok(FrontFactors {
        outer,
        outer_axis,
        outer_angle_deriv: angle_deriv,
        mid,
        mid_deriv,
        inner_axis,
        inner_applied,
    })
}

trait MirrorAxis {
    fn mirror_x3_axis(self) -> Self;
}

impl MirrorAxis for Vector3<f64> {
    /// Conjugating a rotation by Diag(-1,-1,1) negates the third axis
    /// component relative to the first two; for an axis vector this is
    /// `(x, y, z) -> (-x, -y, z)`.
    fn mirror_x3_axis(self) -> Self {
        Vector3::new(-self.x, -self.y, self.z)
    }
}

/// Builds the front at time `k pi` on the default grid.
pub fn extremal_front(alpha: &AlphaParam, k: usize) -> Result<FrontCurve> {
    extremal_front_with_grid(alpha, k, FRONT_GRID)
}

pub fn extremal_front_with_grid(alpha: &AlphaParam, k: usize, n: usize) -> Result<FrontCurve> {
    let sample_branch = |eps: Sign| -> Result<Vec<FrontSample>> {
        (0..n)
            .map(|j| {
                let s = PI * j as f64 / (n - 1) as f64;
                let (point, tangent) = front_point_and_tangent(alpha, k, eps, s)?;
                Ok(FrontSample { s, point, tangent })
            })
            .collect()
    };
    let samples_plus = sample_branch(Sign::Plus)?;
    let samples_minus = sample_branch(Sign::Minus)?;
    let mut front = FrontCurve {
        alpha: *alpha,
        k,
        samples_plus,
        samples_minus,
        is_simple_closed: false,
        is_optimal: false,
    };
    // topology is meaningful for the last two fronts, where singularities
    // may develop; earlier fronts are left unflagged
    if k + 1 >= alpha.k_max() {
        let (topo, _) = front_topology(&front)?;
        front.is_simple_closed = topo == FrontTopology::SimpleClosed;
        front.is_optimal = front.is_simple_closed;
    }
    Ok(front)
}

/// Classifies the projected front by polar coordinates.
///
/// The glued curve is simple and closed iff the projected radius stays
/// positive and the polar angle is strictly monotone; in that case the front
/// at `k pi` is also the minimum time front.
pub fn front_topology(front: &FrontCurve) -> Result<(FrontTopology, PolarData)> {
    if front.k + 1 < front.alpha.k_max() {
        return Err(Error::ParamOutOfRange {
            name: "k (front_topology expects the last two fronts)",
            value: front.k as f64,
        });
    }
    let glued = glue_samples(front);
    let mut s_out = Vec::with_capacity(glued.len());
    let mut rho = Vec::with_capacity(glued.len());
    let mut beta = Vec::with_capacity(glued.len());
    let mut prev_raw: Option<f64> = None;
    let mut unwrapped = 0.0;
    for (sg, p) in &glued {
        let r = p.x1().hypot(p.x2());
        let b_raw = p.x2().atan2(p.x1());
        match prev_raw {
            None => unwrapped = b_raw,
            Some(pr) => {
                let mut d = b_raw - pr;
                while d > PI {
                    d -= 2.0 * PI;
                }
                while d < -PI {
                    d += 2.0 * PI;
                }
                unwrapped += d;
            }
        }
        prev_raw = Some(b_raw);
        s_out.push(*sg);
        rho.push(r);
        beta.push(unwrapped);
    }
    let polar = PolarData {
        s: s_out,
        rho: rho.clone(),
        beta: beta.clone(),
    };

    let rho_max = rho.iter().cloned().fold(0.0f64, f64::max);
    let rho_min = rho.iter().cloned().fold(f64::INFINITY, f64::min);
    if rho_min <= RHO_POLE_REL_TOL * rho_max {
        return Ok((FrontTopology::SelfIntersecting { through_pole: true }, polar));
    }
    // strict monotonicity of the unwrapped angle; one-sided differences at
    // the gluing parameters are covered by the sample-to-sample comparison
    let monotone = beta.windows(2).all(|w| w[1] < w[0]);
    if monotone {
        Ok((FrontTopology::SimpleClosed, polar))
    } else {
        Ok((
            FrontTopology::SelfIntersecting { through_pole: false },
            polar,
        ))
    }
}

/// Glued parametrization over [0, 2 pi]: branch `+` on [0, pi], branch `-`
/// shifted to (pi, 2 pi].
fn glue_samples(front: &FrontCurve) -> Vec<(f64, SpherePoint)> {
    let mut out: Vec<(f64, SpherePoint)> = front
        .samples_plus
        .iter()
        .map(|smp| (smp.s, smp.point))
        .collect();
    out.extend(
        front
            .samples_minus
            .iter()
            .skip(1)
            .map(|smp| (smp.s + PI, smp.point)),
    );
    out
}

/// The function chi with alpha and r treated as independent variables.
///
/// `chi^eps(alpha, r, s) = e^{psi X_{-eps}} e^{theta Z_{-eps}(v(s))} e^{s X_eps} N`
/// with `psi = (pi/(2 alpha) - r)(pi - v) + v - s` and
/// `theta = (pi/(4 alpha) - (1+r)/2) Theta(v)`. At `r = r(alpha)` and odd
/// `k_max` it reproduces the front branch exactly.
pub fn chi(alpha: f64, r: f64, s: f64, eps: Sign) -> Result<SpherePoint> {
    chi_factors(alpha, r, s, eps).map(|f| f.point())
}

/// `chi` together with its exact s-derivative.
pub fn chi_and_deriv(alpha: f64, r: f64, s: f64, eps: Sign) -> Result<(SpherePoint, Vector3<f64>)> {
    let f = chi_factors(alpha, r, s, eps)?;
    Ok((f.point(), f.tangent()))
}

fn chi_factors(alpha: f64, r: f64, s: f64, eps: Sign) -> Result<FrontFactors> {
    if !(alpha > 0.0 && alpha < std::f64::consts::FRAC_PI_4) {
        return Err(Error::AlphaOutOfRange {
            value: alpha,
            lo: 0.0,
            hi: std::f64::consts::FRAC_PI_4,
        });
    }
    let gen = generators(alpha)?;
    let vs = v(s, alpha);
    let vp = v_prime(s, alpha);
    let half_ratio = PI / (2.0 * alpha);

    let psi = (half_ratio - r) * (PI - vs) + vs - s;
    let psi_deriv = (half_ratio - r) * (-vp) + vp - 1.0;
    let theta = (half_ratio / 2.0 - (1.0 + r) / 2.0) * big_theta(vs, alpha);
    let theta_deriv = (half_ratio / 2.0 - (1.0 + r) / 2.0) * big_theta_deriv(vs, alpha) * vp;

    let zax = match eps {
        Sign::Plus => z_minus_axis(vs, alpha),
        Sign::Minus => z_minus_axis(vs, alpha).mirror_x3_axis(),
    };
    let zax_deriv = match eps {
        Sign::Plus => z_minus_axis_deriv(vs, alpha) * vp,
        Sign::Minus => (z_minus_axis_deriv(vs, alpha) * vp).mirror_x3_axis(),
    };

    let outer_axis = *gen.bang(eps.flip()).axis();
    let zmat = cross_matrix(&zax);
    let inner_axis = *gen.bang(eps).axis();
    Ok(FrontFactors {
        outer: rodrigues(&cross_matrix(&outer_axis), psi),
        outer_axis,
        outer_angle_deriv: psi_deriv,
        mid: rodrigues(&zmat, theta),
        mid_deriv: rodrigues_deriv(&zmat, &cross_matrix(&zax_deriv), theta, theta_deriv),
        inner_axis,
        inner_applied: so3::rodrigues_apply(&inner_axis, s, SpherePoint::north().as_vector()),
    })
}

/// Parity of the front index, which fixes a sign in the series coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KParity {
    Odd,
    Even,
}

impl KParity {
    pub fn of(k: usize) -> Self {
        if k % 2 == 1 {
            KParity::Odd
        } else {
            KParity::Even
        }
    }
}

/// First three coefficients of the expansion `chi = f0 + f1 a + f2 a^2 + O(a^3)`.
#[derive(Debug, Clone, Copy)]
pub struct SeriesCoeffs {
    pub f0: Vector3<f64>,
    pub f1: Vector3<f64>,
    pub f2: Vector3<f64>,
    pub eps: Sign,
    pub parity: KParity,
}

impl SeriesCoeffs {
    pub fn eval(&self, alpha: f64) -> Vector3<f64> {
        self.f0 + self.f1 * alpha + self.f2 * (alpha * alpha)
    }

    /// Truncation to the given order (0, 1 or 2).
    pub fn eval_truncated(&self, alpha: f64, order: usize) -> Vector3<f64> {
        match order {
            0 => self.f0,
            1 => self.f0 + self.f1 * alpha,
            _ => self.eval(alpha),
        }
    }
}

/// Series coefficients at `(s, r)`; the `-` branch is the x3-mirror of the
/// `+` branch, and an even front index flips the sign of the planar entries.
pub fn series_coeffs(s: f64, r: f64, eps: Sign, parity: KParity) -> SeriesCoeffs {
    let (ss, cs) = s.sin_cos();
    let c2s = (2.0 * s).cos();
    let mut f0 = Vector3::new(0.0, 0.0, -1.0);
    let mut f1 = Vector3::new(-2.0 * r * cs, 2.0 * r * ss, 0.0);
    let mut f2 = Vector3::new(
        PI / 2.0 * (4.0 * r + cs) * ss * ss,
        PI / 4.0 * (3.0 + 8.0 * r * cs + c2s) * ss,
        2.0 * r * r,
    );
    let mut flip = 1.0;
    if eps == Sign::Minus {
        flip = -flip;
    }
    if parity == KParity::Even {
        flip = -flip;
    }
    if flip < 0.0 {
        f0 = f0.mirror_x3();
        f1 = f1.mirror_x3();
        f2 = f2.mirror_x3();
    }
    SeriesCoeffs { f0, f1, f2, eps, parity }
}

/// s-derivatives of the series coefficients (f0' = 0).
pub fn series_coeffs_deriv(s: f64, r: f64, eps: Sign, parity: KParity) -> SeriesCoeffs {
    let (ss, cs) = s.sin_cos();
    let s2s = (2.0 * s).sin();
    let c2s = (2.0 * s).cos();
    let mut f1 = Vector3::new(2.0 * r * ss, 2.0 * r * cs, 0.0);
    let mut f2 = Vector3::new(
        PI / 2.0 * ss * (2.0 * cs * (4.0 * r + cs) - ss * ss),
        PI / 4.0 * ((-8.0 * r * ss - 2.0 * s2s) * ss + (3.0 + 8.0 * r * cs + c2s) * cs),
        0.0,
    );
    let mut flip = 1.0;
    if eps == Sign::Minus {
        flip = -flip;
    }
    if parity == KParity::Even {
        flip = -flip;
    }
    if flip < 0.0 {
        f1 = f1.mirror_x3();
        f2 = f2.mirror_x3();
    }
    SeriesCoeffs {
        f0: Vector3::zeros(),
        f1,
        f2,
        eps,
        parity,
    }
}

/// Max-over-grid residual of the truncated series against chi, per alpha.
///
/// Every alpha in the list is expected to satisfy `r(alpha) = r_bar`; the
/// residual of the order-2 truncation decays like `alpha^3`.
pub fn front_residual(r_bar: f64, alphas: &[f64], s_grid: &[f64], order: usize) -> Result<Vec<f64>> {
    alphas
        .iter()
        .map(|&a| {
            let mut worst = 0.0f64;
            for &s in s_grid {
                let coeffs = series_coeffs(s, r_bar, Sign::Plus, KParity::Odd);
                let truncated = coeffs.eval_truncated(a, order);
                let exact = chi(a, r_bar, s, Sign::Plus)?;
                worst = worst.max((exact.as_vector() - truncated).norm());
            }
            Ok(worst)
        })
        .collect()
}

/// Residual of the s-derivative of the order-2 truncation against d chi/ds.
pub fn front_residual_deriv(r_bar: f64, alphas: &[f64], s_grid: &[f64]) -> Result<Vec<f64>> {
    alphas
        .iter()
        .map(|&a| {
            let mut worst = 0.0f64;
            for &s in s_grid {
                let coeffs = series_coeffs_deriv(s, r_bar, Sign::Plus, KParity::Odd);
                let truncated = coeffs.f1 * a + coeffs.f2 * (a * a);
                let (_, exact) = chi_and_deriv(a, r_bar, s, Sign::Plus)?;
                worst = worst.max((exact - truncated).norm());
            }
            Ok(worst)
        })
        .collect()
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let num: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}

/// Projection to the (x1, x2) plane followed by dilation by `1/alpha^power`.
pub fn rescale(p: &SpherePoint, alpha: f64, power: u32) -> PlanarPoint {
    debug_assert!(power == 1 || power == 2);
    let scale = alpha.powi(power as i32);
    PlanarPoint::new(p.x1() / scale, p.x2() / scale)
}

/// The map `M_alpha` (dilation by 1/alpha).
pub fn m_alpha(p: &SpherePoint, alpha: f64) -> PlanarPoint {
    rescale(p, alpha, 1)
}

/// The map `N_alpha` (dilation by 1/alpha^2).
pub fn n_alpha(p: &SpherePoint, alpha: f64) -> PlanarPoint {
    rescale(p, alpha, 2)
}

/// Branch and branch parameter of the glued front parametrization over
/// [0, 2 pi], aligned with the small-alpha limit.
///
/// The planar part of a branch flips sign with the parity of `k`, so the
/// branch whose rescaled image tracks `2 r e^{i(pi - s)}` (and, at the next
/// order, `L(s)`) is `+` for odd `k` and `-` for even `k`.
pub fn glued_branch(k: usize, s: f64) -> (Sign, f64) {
    let first = if k % 2 == 1 { Sign::Plus } else { Sign::Minus };
    let sm = s.rem_euclid(2.0 * PI);
    if sm <= PI {
        (first, sm)
    } else {
        (first.flip(), sm - PI)
    }
}
