//! Overlap-curve computation by Newton continuation on the meeting map.
//!
//! Inside the region enclosed by the optimal front at `k_max pi`, optimal
//! trajectories are single bangs emanating from the front, so a cut point is
//! a solution of `e^{t X+} sigma(s') = e^{t X-} sigma(s)` with equal elapsed
//! time. The solver runs on the rescaled planar chart, where flows are the
//! exact lift-flow-project composition (no ODE integration), and it is
//! generic over the planar system so that the pendulum limit exercises the
//! same Jacobian code path.

use nalgebra::{Matrix2, Vector2};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::extremal::AlphaParam;
use crate::front::{self, extremal_front_with_grid};
use crate::pendulum::{self, overlap_curve};
use crate::planar::{hausdorff_polyline, PlanarPoint};
use crate::so3::{self, generators, rodrigues, Sign};

use std::f64::consts::PI;

/// Converged-residual requirement for an overlap solution.
pub const NEWTON_TOL: f64 = 1e-10;
pub const NEWTON_MAX_ITER: usize = 25;

/// Nominal continuation step in `s`, halved on failure down to the floor.
pub const CONTINUATION_STEP: f64 = 1e-2;
pub const CONTINUATION_STEP_FLOOR: f64 = 1e-5;

/// A planar control system with exact flows and flow differentials.
pub trait PlanarSystem {
    fn flow(&self, z: PlanarPoint, eps: Sign, t: f64) -> Result<PlanarPoint>;
    /// The vector field of the `eps` bang at `z`.
    fn field(&self, z: PlanarPoint, eps: Sign) -> Result<Vector2<f64>>;
    /// Differential of `flow(., eps, t)` at `z`.
    fn flow_dz(&self, z: PlanarPoint, eps: Sign, t: f64) -> Result<Matrix2<f64>>;
}

/// The pendulum limit: rotations about `(-eps, 0)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct PendulumSystem;

impl PlanarSystem for PendulumSystem {
    fn flow(&self, z: PlanarPoint, eps: Sign, t: f64) -> Result<PlanarPoint> {
        Ok(pendulum::pen_flow(z, eps.as_f64(), t))
    }

    fn field(&self, z: PlanarPoint, eps: Sign) -> Result<Vector2<f64>> {
        let (a, b) = pendulum::pen_field(z, eps.as_f64());
        Ok(Vector2::new(a, b))
    }

    fn flow_dz(&self, _z: PlanarPoint, _eps: Sign, t: f64) -> Result<Matrix2<f64>> {
        let (s, c) = t.sin_cos();
        Ok(Matrix2::new(c, -s, s, c))
    }
}

/// The sphere system seen through the chart `z = M_alpha(x)` near the south
/// pole: lift, rotate exactly, project.
#[derive(Debug, Clone, Copy)]
pub struct RescaledSystem {
    alpha: f64,
}

impl RescaledSystem {
    pub fn new(alpha_param: &AlphaParam) -> Self {
        RescaledSystem {
            alpha: alpha_param.alpha(),
        }
    }

    pub fn from_raw_alpha(alpha: f64) -> Self {
        RescaledSystem { alpha }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Lift to the lower hemisphere: `(a z1, a z2, -sqrt(1 - a^2 |z|^2))`.
    fn lift(&self, z: PlanarPoint) -> Result<(nalgebra::Vector3<f64>, f64)> {
        let a = self.alpha;
        let rad2 = a * a * (z.z1 * z.z1 + z.z2 * z.z2);
        if rad2 >= 1.0 {
            return Err(Error::ChartExceeded { radius: rad2.sqrt() });
        }
        let x3 = -(1.0 - rad2).sqrt();
        Ok((nalgebra::Vector3::new(a * z.z1, a * z.z2, x3), -x3))
    }
}

impl PlanarSystem for RescaledSystem {
    fn flow(&self, z: PlanarPoint, eps: Sign, t: f64) -> Result<PlanarPoint> {
        let (x, _) = self.lift(z)?;
        let gen = generators(self.alpha)?;
        let w = so3::rodrigues_apply(gen.bang(eps).axis(), t, &x);
        if w.z >= 0.0 {
            return Err(Error::ChartExceeded { radius: 1.0 });
        }
        Ok(PlanarPoint::new(w.x / self.alpha, w.y / self.alpha))
    }

    fn field(&self, z: PlanarPoint, eps: Sign) -> Result<Vector2<f64>> {
        let a = self.alpha;
        let rad2 = a * a * (z.z1 * z.z1 + z.z2 * z.z2);
        if rad2 >= 1.0 {
            return Err(Error::ChartExceeded { radius: rad2.sqrt() });
        }
        let (sa, ca) = a.sin_cos();
        Ok(Vector2::new(
            -ca * z.z2,
            ca * z.z1 + eps.as_f64() * (sa / a) * (1.0 - rad2).sqrt(),
        ))
    }

    fn flow_dz(&self, z: PlanarPoint, eps: Sign, t: f64) -> Result<Matrix2<f64>> {
        let a = self.alpha;
        let (x, depth) = self.lift(z)?;
        let gen = generators(a)?;
        let r = rodrigues(&gen.bang(eps).matrix(), t);
        // D(M_a . e^{tX} . L_a) = R_2x2 + (a / sqrt(1 - a^2 |z|^2)) R_col3 z^T
        let scale = a / depth;
        let mut j = Matrix2::new(r[(0, 0)], r[(0, 1)], r[(1, 0)], r[(1, 1)]);
        j[(0, 0)] += scale * r[(0, 2)] * z.z1;
        j[(0, 1)] += scale * r[(0, 2)] * z.z2;
        j[(1, 0)] += scale * r[(1, 2)] * z.z1;
        j[(1, 1)] += scale * r[(1, 2)] * z.z2;
        let _ = x;
        Ok(j)
    }
}

/// A closed source curve in the plane, parametrized on [0, 2 pi].
pub trait SourceCurve {
    fn point(&self, s: f64) -> Result<PlanarPoint>;
    fn tangent(&self, s: f64) -> Result<Vector2<f64>>;
}

/// The limit source: the circle `sigma(s) = rho e^{i(pi - s)}`.
#[derive(Debug, Clone, Copy)]
pub struct PendulumCircle {
    pub rho: f64,
}

impl SourceCurve for PendulumCircle {
    fn point(&self, s: f64) -> Result<PlanarPoint> {
        Ok(pendulum::source_point(s, self.rho))
    }

    fn tangent(&self, s: f64) -> Result<Vector2<f64>> {
        Ok(Vector2::new(self.rho * s.sin(), self.rho * s.cos()))
    }
}

/// The rescaled optimal front at `k_max pi`, as a closed source curve.
///
/// Branch `+` covers `[0, pi]`, branch `-` covers `[pi, 2 pi]`; construction
/// refuses a front that is not a simple closed curve (outside the
/// constant-remainder regime the front at `k_max pi` is not optimal and the
/// meeting-map description does not apply).
#[derive(Debug, Clone, Copy)]
pub struct SigmaAlpha {
    alpha: AlphaParam,
}

impl SigmaAlpha {
    pub fn new(alpha: &AlphaParam) -> Result<Self> {
        let front = extremal_front_with_grid(alpha, alpha.k_max(), 512)?;
        if !front.is_optimal {
            return Err(Error::NonOptimalFront);
        }
        Ok(SigmaAlpha { alpha: *alpha })
    }

    pub fn alpha_param(&self) -> &AlphaParam {
        &self.alpha
    }

    /// The corner `P^eps = M_alpha(C^eps_{k_max}(0))`, an endpoint of the
    /// overlap curve: `sigma(0) = P^-`, `sigma(pi) = P^+`.
    pub fn corner(&self, eps: Sign) -> Result<PlanarPoint> {
        match eps {
            Sign::Minus => self.point(0.0),
            Sign::Plus => self.point(PI),
        }
    }
}

impl SourceCurve for SigmaAlpha {
    fn point(&self, s: f64) -> Result<PlanarPoint> {
        let (branch, sb) = front::glued_branch(self.alpha.k_max(), s);
        let p = front::front_point(&self.alpha, self.alpha.k_max(), branch, sb)?;
        Ok(front::m_alpha(&p, self.alpha.alpha()))
    }

    fn tangent(&self, s: f64) -> Result<Vector2<f64>> {
        let (branch, sb) = front::glued_branch(self.alpha.k_max(), s);
        let (_, tan) = front::front_point_and_tangent(&self.alpha, self.alpha.k_max(), branch, sb)?;
        let a = self.alpha.alpha();
        Ok(Vector2::new(tan.x / a, tan.y / a))
    }
}

/// One converged point of the overlap curve.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct OverlapSolution {
    pub s: f64,
    pub s_prime: f64,
    pub t: f64,
    pub point: PlanarPoint,
    pub newton_iters: usize,
    pub residual: f64,
    /// Determinant of the meeting-map Jacobian at the solution.
    pub jac_det: f64,
}

/// Residual and Jacobian of the meeting map at fixed `s`:
/// `F(s', t) = flow(sigma(s'), +, t) - flow(sigma(s), -, t)`.
pub fn meeting_residual_jacobian<S: PlanarSystem, C: SourceCurve>(
    sys: &S,
    src: &C,
    s: f64,
    s_prime: f64,
    t: f64,
) -> Result<(Vector2<f64>, Matrix2<f64>)> {
    let sig_p = src.point(s_prime)?;
    let sig_m = src.point(s)?;
    let w_plus = sys.flow(sig_p, Sign::Plus, t)?;
    let w_minus = sys.flow(sig_m, Sign::Minus, t)?;
    let f = w_plus.as_vector() - w_minus.as_vector();
    let col_s = sys.flow_dz(sig_p, Sign::Plus, t)? * src.tangent(s_prime)?;
    let col_t = sys.field(w_plus, Sign::Plus)? - sys.field(w_minus, Sign::Minus)?;
    Ok((f, Matrix2::from_columns(&[col_s, col_t])))
}

/// Newton iteration on `(s', t)` for the meeting map at fixed `s`.
pub fn solve_overlap<S: PlanarSystem, C: SourceCurve>(
    sys: &S,
    src: &C,
    s: f64,
    seed: (f64, f64),
    tol: f64,
) -> Result<OverlapSolution> {
    let (mut s_prime, mut t) = seed;
    let mut residual = f64::INFINITY;
    let mut det = 0.0;
    for iter in 0..NEWTON_MAX_ITER {
        let (f, j) = meeting_residual_jacobian(sys, src, s, s_prime, t)?;
        residual = f.norm();
        det = j.determinant();
        if residual <= tol {
            let point = sys.flow(src.point(s)?, Sign::Minus, t)?;
            return Ok(OverlapSolution {
                s,
                s_prime,
                t,
                point,
                newton_iters: iter,
                residual,
                jac_det: det,
            });
        }
        if det.abs() < 1e-14 {
            break;
        }
        let mut step = -j.try_inverse().ok_or(Error::NewtonFailed {
            s,
            iters: iter,
            residual,
        })? * f;
        // trust region: the seed geometry is only good locally
        let norm = step.norm();
        if norm > 0.3 {
            step *= 0.3 / norm;
        }
        s_prime += step.x;
        t += step.y;
    }
    let _ = det;
    Err(Error::NewtonFailed {
        s,
        iters: NEWTON_MAX_ITER,
        residual,
    })
}

/// Leading-order seed for the overlap solution near the corners.
///
/// Near `s = 0`: `s' = 2 pi - s (1-rbar)/(1+rbar)`, `t = 2 rbar s / (1+rbar)`;
/// near `s = pi` the reciprocal factors apply:
/// `s' = pi + (pi-s)(1+rbar)/(1-rbar)`, `t = 2 rbar (pi-s)/(1-rbar)`.
/// Both follow from the exact pendulum overlap relations
/// `t = rbar (s - stilde)` and `t^2 = rbar (s^2 - stilde^2)`.
pub fn corner_asymptotics(s: f64, r_bar: f64) -> (f64, f64) {
    if s <= PI / 2.0 {
        let ratio = (1.0 - r_bar) / (1.0 + r_bar);
        (2.0 * PI - ratio * s, 2.0 * r_bar * s / (1.0 + r_bar))
    } else {
        let d = PI - s;
        let ratio = (1.0 + r_bar) / (1.0 - r_bar);
        (PI + ratio * d, 2.0 * r_bar * d / (1.0 - r_bar))
    }
}

/// Closed form of `det DPhi` along the pendulum overlap curve:
/// `4 rbar (1 - rbar^2) sin s' / ((1 - rbar cos s')^2 + (rbar sin s')^2)`.
pub fn pendulum_meeting_det(r_bar: f64, s_prime: f64) -> f64 {
    let num = 4.0 * r_bar * (1.0 - r_bar * r_bar) * s_prime.sin();
    let den = (1.0 - r_bar * s_prime.cos()).powi(2) + (r_bar * s_prime.sin()).powi(2);
    num / den
}

/// The computed overlap curve of the rescaled problem.
#[derive(Debug, Clone)]
pub struct GammaCurve {
    pub alpha: AlphaParam,
    pub samples: Vec<OverlapSolution>,
    /// Sub-intervals of the `s` grid where the continuation failed.
    pub gaps: Vec<(f64, f64)>,
    pub corner_minus: PlanarPoint,
    pub corner_plus: PlanarPoint,
}

impl GammaCurve {
    /// Polyline through the corner endpoints and the computed samples.
    pub fn polyline(&self) -> Vec<PlanarPoint> {
        let mut pts = Vec::with_capacity(self.samples.len() + 2);
        pts.push(self.corner_minus);
        pts.extend(self.samples.iter().map(|s| s.point));
        pts.push(self.corner_plus);
        pts
    }

    /// Symmetric Hausdorff distance to the pendulum overlap curve at
    /// `rho = 2 rbar`.
    pub fn hausdorff_to_pendulum(&self, n_pen: usize) -> Result<f64> {
        let rho = 2.0 * self.alpha.remainder();
        let pen = overlap_curve(rho, n_pen)?;
        let mut pen_pts = Vec::with_capacity(n_pen + 2);
        pen_pts.push(PlanarPoint::new(rho, 0.0));
        pen_pts.extend(pen.iter().map(|p| p.z));
        pen_pts.push(PlanarPoint::new(-rho, 0.0));
        Ok(hausdorff_polyline(&self.polyline(), &pen_pts))
    }
}

/// Default continuation grid over `(0, pi)`.
pub fn default_s_grid() -> Vec<f64> {
    let mut grid = Vec::new();
    let mut s = 0.02;
    while s < PI - 0.02 + 1e-12 {
        grid.push(s);
        s += CONTINUATION_STEP;
    }
    grid
}

/// Traces the overlap curve over `s_grid` by seeded Newton continuation.
///
/// Seeds come from the corner asymptotics at the first point and from the
/// previous solution afterwards; on failure the step is halved down to the
/// floor, and a persistent failure is recorded as a gap rather than
/// interpolated over.
pub fn gamma_o_alpha(alpha: &AlphaParam, s_grid: &[f64]) -> Result<GammaCurve> {
    let src = SigmaAlpha::new(alpha)?;
    let sys = RescaledSystem::new(alpha);
    gamma_with(&sys, &src, alpha, s_grid)
}

fn gamma_with<S: PlanarSystem>(
    sys: &S,
    src: &SigmaAlpha,
    alpha: &AlphaParam,
    s_grid: &[f64],
) -> Result<GammaCurve> {
    let r_bar = alpha.remainder();
    let mut samples: Vec<OverlapSolution> = Vec::with_capacity(s_grid.len());
    let mut gaps = Vec::new();
    let mut prev: Option<OverlapSolution> = None;

    for &s in s_grid {
        let attempt = match &prev {
            None => solve_overlap(sys, src, s, corner_asymptotics(s, r_bar), NEWTON_TOL),
            Some(p) => continue_from(sys, src, p, s),
        };
        match attempt {
            Ok(sol) => {
                prev = Some(sol);
                samples.push(sol);
            }
            Err(_) => {
                // try a cold start from the corner model before flagging a gap
                match solve_overlap(sys, src, s, corner_asymptotics(s, r_bar), NEWTON_TOL) {
                    Ok(sol) => {
                        prev = Some(sol);
                        samples.push(sol);
                    }
                    Err(_) => {
                        let from = prev.map(|p| p.s).unwrap_or(0.0);
                        gaps.push((from, s));
                    }
                }
            }
        }
    }

    Ok(GammaCurve {
        alpha: *alpha,
        samples,
        gaps,
        corner_minus: src.corner(Sign::Minus)?,
        corner_plus: src.corner(Sign::Plus)?,
    })
}

fn continue_from<S: PlanarSystem>(
    sys: &S,
    src: &SigmaAlpha,
    from: &OverlapSolution,
    target: f64,
) -> Result<OverlapSolution> {
    let mut current = *from;
    let mut step = target - current.s;
    loop {
        let next_s = current.s + step;
        match solve_overlap(sys, src, next_s, (current.s_prime, current.t), NEWTON_TOL) {
            Ok(sol) => {
                if (sol.s - target).abs() < 1e-14 {
                    return Ok(sol);
                }
                current = sol;
                step = target - current.s;
            }
            Err(e) => {
                step /= 2.0;
                if step.abs() < CONTINUATION_STEP_FLOOR {
                    return Err(e);
                }
            }
        }
    }
}

/// Convergence report for a remainder value over a list of front indices.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub r_bar: f64,
    pub alphas: Vec<f64>,
    pub hausdorff: Vec<f64>,
}

/// Runs the continuation for `alpha_k = pi / (2(k + rbar))` over `k_list` and
/// reports the Hausdorff distances to the pendulum overlap curve.
pub fn convergence_report(r_bar: f64, k_list: &[usize]) -> Result<ConvergenceReport> {
    let grid = default_s_grid();
    let mut alphas = Vec::new();
    let mut hausdorff = Vec::new();
    for &k in k_list {
        let alpha = AlphaParam::from_k_rbar(k, r_bar)?;
        let gamma = gamma_o_alpha(&alpha, &grid)?;
        if !gamma.gaps.is_empty() {
            return Err(Error::RegimeViolation(format!(
                "continuation gaps at k = {k}: {:?}",
                gamma.gaps
            )));
        }
        alphas.push(alpha.alpha());
        hausdorff.push(gamma.hausdorff_to_pendulum(2000)?);
    }
    Ok(ConvergenceReport {
        r_bar,
        alphas,
        hausdorff,
    })
}

/// A first-arrival record of the rescaled synthesis: the bang trajectory
/// from the front reaching `target`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FrontArrival {
    pub family: Sign,
    /// Source parameter on `sigma_alpha`.
    pub s: f64,
    /// Time past `k_max pi`.
    pub t: f64,
}

/// Solves, per family, for the bang trajectory from the front through
/// `target`; seeds come from the pendulum synthesis at `rho = 2 rbar`.
///
/// Returns the arrivals found (two across the cut locus region, otherwise
/// typically one admissible per family with different times).
pub fn arrival_from_front(
    sigma: &SigmaAlpha,
    target: PlanarPoint,
) -> Result<Vec<FrontArrival>> {
    let alpha = sigma.alpha_param();
    let sys = RescaledSystem::new(alpha);
    let rho = 2.0 * alpha.remainder();
    let records = pendulum::min_time_from_circle(target, rho)?;
    let mut out = Vec::new();
    for rec in &records {
        let eps = match rec.family {
            Sign::Minus => Sign::Minus,
            Sign::Plus => Sign::Plus,
        };
        if let Ok(sol) = solve_arrival(&sys, sigma, target, eps, (rec.theta, rec.time)) {
            out.push(sol);
        }
    }
    Ok(out)
}

fn solve_arrival(
    sys: &RescaledSystem,
    src: &SigmaAlpha,
    target: PlanarPoint,
    eps: Sign,
    seed: (f64, f64),
) -> Result<FrontArrival> {
    let (mut s, mut t) = seed;
    for _iter in 0..NEWTON_MAX_ITER {
        let sig = src.point(s)?;
        let w = sys.flow(sig, eps, t)?;
        let f = w.as_vector() - target.as_vector();
        if f.norm() <= NEWTON_TOL {
            return Ok(FrontArrival { family: eps, s, t });
        }
        let col_s = sys.flow_dz(sig, eps, t)? * src.tangent(s)?;
        let col_t = sys.field(w, eps)?;
        let j = Matrix2::from_columns(&[col_s, col_t]);
        if j.determinant().abs() < 1e-14 {
            break;
        }
        let mut step = -j.try_inverse().unwrap() * f;
        let norm = step.norm();
        if norm > 0.3 {
            step *= 0.3 / norm;
        }
        s += step.x;
        t += step.y;
    }
    Err(Error::NewtonFailed {
        s,
        iters: NEWTON_MAX_ITER,
        residual: f64::NAN,
    })
}
