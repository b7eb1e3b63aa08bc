//! Self-check battery behind the `verify` command: fast spot checks of the
//! algebraic identities the rest of the engine depends on.

use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cutlocus::{meeting_residual_jacobian, pendulum_meeting_det, PendulumCircle, PendulumSystem};
use crate::error::Result;
use crate::extremal::{switch_time_derivative, v, AlphaParam};
use crate::front::{front_point, m_alpha, series_coeffs, KParity};
use crate::pendulum::{min_time_from_circle, overlap_locus_residual, overlap_point};
use crate::so3::{conjugate_pair, generators, rot_exp, MirrorX3, Sign, SpherePoint};

use std::f64::consts::{FRAC_PI_4, PI};

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn max_abs(m: &Matrix3<f64>) -> f64 {
    m.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
}

/// Runs the battery with a deterministic sample selection.
pub fn run_verification(seed: u64) -> Result<VerificationReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();

    // conjugate-rotation identity and sphere-norm preservation
    let mut worst_conj = 0.0f64;
    let mut worst_norm = 0.0f64;
    for _ in 0..500 {
        let alpha = rng.random_range(0.01..FRAC_PI_4);
        let t = rng.random_range(0.0..2.0 * PI);
        let gen = generators(alpha)?;
        let pair = conjugate_pair(t, alpha)?;
        let lhs = rot_exp(&pair.z_minus, pair.theta)?;
        let rhs = rot_exp(&gen.x_plus, t)?.compose(&rot_exp(&gen.x_minus, t)?);
        worst_conj = worst_conj.max(max_abs(&(lhs.matrix() - rhs.matrix())));
        let vchi = Vector3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        )
        .normalize();
        let p = SpherePoint::new(vchi.x, vchi.y, vchi.z)?;
        worst_norm = worst_norm.max((rhs.apply(&p).norm() - 1.0).abs());
    }
    checks.push(CheckResult {
        name: "conjugate_rotation_identity".into(),
        pass: worst_conj <= 1e-9,
        detail: format!("max |e^(Theta Z-) - e^(tX+) e^(tX-)| = {worst_conj:.3e}"),
    });
    checks.push(CheckResult {
        name: "sphere_norm_preservation".into(),
        pass: worst_norm <= 1e-12,
        detail: format!("max deviation of |Rx| from 1 = {worst_norm:.3e}"),
    });

    // mirror intertwining on flows
    let mut worst_mirror = 0.0f64;
    for _ in 0..100 {
        let alpha = rng.random_range(0.01..FRAC_PI_4);
        let t = rng.random_range(0.0..2.0 * PI);
        let gen = generators(alpha)?;
        let vchi = Vector3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        )
        .normalize();
        let x = SpherePoint::new(vchi.x, vchi.y, vchi.z)?;
        let lhs = rot_exp(&gen.x_plus, t)?.apply(&x).mirror_x3();
        let rhs = rot_exp(&gen.x_minus, t)?.apply(&x.mirror_x3());
        worst_mirror = worst_mirror.max((lhs.as_vector() - rhs.as_vector()).norm());
    }
    checks.push(CheckResult {
        name: "mirror_intertwining".into(),
        pass: worst_mirror <= 1e-12,
        detail: format!("max mismatch = {worst_mirror:.3e}"),
    });

    // interior duration range and switch-time monotonicity
    let mut v_ok = true;
    let mut mono_ok = true;
    for &alpha in &[0.05, 0.1, 0.2] {
        let p = AlphaParam::from_alpha(alpha)?;
        for j in 1..2000 {
            let s = PI * j as f64 / 2000.0;
            let val = v(s, alpha);
            v_ok &= val > PI && val < 2.0 * PI;
        }
        for k in 1..=p.n_mon().min(60) {
            for j in 0..=60 {
                let s = PI * j as f64 / 60.0;
                mono_ok &= switch_time_derivative(k, s, alpha)? > 0.0;
            }
        }
    }
    checks.push(CheckResult {
        name: "interior_duration_range".into(),
        pass: v_ok,
        detail: "v(s) in (pi, 2 pi) on (0, pi)".into(),
    });
    checks.push(CheckResult {
        name: "switch_time_monotonicity".into(),
        pass: mono_ok,
        detail: "dT_k/ds > 0 for k <= n_mon".into(),
    });

    // front gluing, mirror symmetry and rescaled radius
    let alpha = AlphaParam::from_k_rbar(20, 0.5)?;
    let k = alpha.k_max();
    let glue = (front_point(&alpha, k, Sign::Plus, 0.0)?.as_vector()
        - front_point(&alpha, k, Sign::Minus, PI)?.as_vector())
    .norm();
    let mut worst_front_mirror = 0.0f64;
    let mut worst_radius = 0.0f64;
    for j in 0..50 {
        let s = PI * j as f64 / 49.0;
        let p = front_point(&alpha, k, Sign::Plus, s)?;
        let m = front_point(&alpha, k, Sign::Minus, s)?;
        worst_front_mirror =
            worst_front_mirror.max((p.mirror_x3().as_vector() - m.as_vector()).norm());
        worst_radius = worst_radius.max((m_alpha(&p, alpha.alpha()).norm() - 1.0).abs());
    }
    checks.push(CheckResult {
        name: "front_glue_and_mirror".into(),
        pass: glue <= 1e-10 && worst_front_mirror <= 1e-12,
        detail: format!("glue gap {glue:.3e}, mirror gap {worst_front_mirror:.3e}"),
    });
    checks.push(CheckResult {
        name: "front_rescaled_radius".into(),
        pass: worst_radius <= 3.0 * alpha.alpha(),
        detail: format!("max | |M_a E| - 2 rbar | = {worst_radius:.3e}"),
    });

    // series mirror symmetry
    let mut series_ok = true;
    for j in 0..40 {
        let s = 2.0 * PI * j as f64 / 40.0;
        let p = series_coeffs(s, 0.5, Sign::Plus, KParity::Odd);
        let m = series_coeffs(s, 0.5, Sign::Minus, KParity::Odd);
        series_ok &= p.f1.mirror_x3() == m.f1 && p.f2.mirror_x3() == m.f2;
    }
    checks.push(CheckResult {
        name: "series_mirror_symmetry".into(),
        pass: series_ok,
        detail: "f_l^- = mirror(f_l^+)".into(),
    });

    // pendulum overlap samples: locus residual and equal meeting times
    let rho = 1.0;
    let mut worst_locus = 0.0f64;
    let mut worst_dt = 0.0f64;
    for _ in 0..100 {
        let s_prime = rng.random_range(PI + 0.05..2.0 * PI - 0.05);
        let p = overlap_point(s_prime, rho)?;
        worst_locus = worst_locus.max(overlap_locus_residual(p.z, rho).abs());
        let recs = min_time_from_circle(p.z, rho)?;
        if recs.len() == 2 {
            worst_dt = worst_dt.max((recs[0].time - recs[1].time).abs());
        } else {
            worst_dt = f64::INFINITY;
        }
    }
    checks.push(CheckResult {
        name: "pendulum_overlap_curve".into(),
        pass: worst_locus <= 1e-10 && worst_dt <= 1e-9,
        detail: format!("locus residual {worst_locus:.3e}, time gap {worst_dt:.3e}"),
    });

    // meeting-map Jacobian against the closed-form determinant
    let sys = PendulumSystem;
    let src = PendulumCircle { rho };
    let mut worst_det = 0.0f64;
    for j in 1..20 {
        let s_prime = PI + PI * j as f64 / 20.0;
        let p = overlap_point(s_prime, rho)?;
        let (_, jac) = meeting_residual_jacobian(&sys, &src, p.s, p.s_prime, p.t)?;
        worst_det = worst_det.max((jac.determinant() - pendulum_meeting_det(0.5, s_prime)).abs());
    }
    checks.push(CheckResult {
        name: "meeting_jacobian_determinant".into(),
        pass: worst_det <= 1e-6,
        detail: format!("max |det - closed form| = {worst_det:.3e}"),
    });

    Ok(VerificationReport { seed, checks })
}
