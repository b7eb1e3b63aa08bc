//! Exact 3x3 rotation algebra for the two bang fields.
//!
//! Everything here is closed form: exponentials use the Rodrigues formula for
//! a unit axis, and the product `e^{tX+} e^{tX-}` is expressed as a single
//! rotation through the conjugate pair `(Theta(t), Z_-(t))`. No general-purpose
//! matrix exponential is involved.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

/// Tolerance below which an axis is rejected as non-unit rather than renormalized.
pub const UNIT_AXIS_TOL: f64 = 1e-10;

/// Sign of a bang arc (the control value +1 or -1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    /// Sign of the j-th arc (1-based) of a sequence whose first arc has sign `self`.
    pub fn at_arc(self, j: usize) -> Sign {
        if j % 2 == 1 {
            self
        } else {
            self.flip()
        }
    }
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Sign::Plus => write!(f, "+"),
            Sign::Minus => write!(f, "-"),
        }
    }
}

impl serde::Serialize for Sign {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_i8(match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        })
    }
}

/// A point of the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePoint(Vector3<f64>);

impl SpherePoint {
    /// Builds a point, checking `x1^2 + x2^2 + x3^2 = 1` within 1e-12.
    pub fn new(x1: f64, x2: f64, x3: f64) -> Result<Self> {
        let v = Vector3::new(x1, x2, x3);
        let norm = v.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NotOnSphere { norm });
        }
        Ok(SpherePoint(v))
    }

    pub const fn north() -> Self {
        SpherePoint(Vector3::new(0.0, 0.0, 1.0))
    }

    pub const fn south() -> Self {
        SpherePoint(Vector3::new(0.0, 0.0, -1.0))
    }

    pub(crate) fn from_vector_unchecked(v: Vector3<f64>) -> Self {
        SpherePoint(v)
    }

    pub fn x1(&self) -> f64 {
        self.0.x
    }

    pub fn x2(&self) -> f64 {
        self.0.y
    }

    pub fn x3(&self) -> f64 {
        self.0.z
    }

    pub fn as_vector(&self) -> &Vector3<f64> {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }
}

/// A skew-symmetric generator, stored through its rotation axis.
///
/// The matrix is the cross-product matrix of `axis`, so antisymmetry is exact
/// by construction, and the inner-product norm `sqrt(-Tr(M^2)/2)` equals the
/// Euclidean length of the axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkewGenerator {
    axis: Vector3<f64>,
}

impl SkewGenerator {
    pub fn from_axis(axis: Vector3<f64>) -> Self {
        SkewGenerator { axis }
    }

    pub fn axis(&self) -> &Vector3<f64> {
        &self.axis
    }

    pub fn axis_length(&self) -> f64 {
        self.axis.norm()
    }

    /// The 3x3 matrix `[axis]_x`.
    pub fn matrix(&self) -> Matrix3<f64> {
        cross_matrix(&self.axis)
    }

    /// Applies the generator to a vector: `M v = axis x v`.
    pub fn apply(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.axis.cross(v)
    }

    pub fn is_unit(&self) -> bool {
        (self.axis_length() - 1.0).abs() <= UNIT_AXIS_TOL
    }
}

pub(crate) fn cross_matrix(a: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -a.z, a.y, a.z, 0.0, -a.x, -a.y, a.x, 0.0)
}

/// A proper rotation (orthogonal, determinant one).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation(Matrix3<f64>);

impl Rotation {
    pub fn identity() -> Self {
        Rotation(Matrix3::identity())
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn apply(&self, p: &SpherePoint) -> SpherePoint {
        SpherePoint(self.0 * p.0)
    }

    pub fn apply_vector(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.0 * v
    }

    pub fn compose(&self, other: &Rotation) -> Rotation {
        Rotation(self.0 * other.0)
    }

    /// `max |R^T R - Id|`, for validation.
    pub fn orthogonality_defect(&self) -> f64 {
        let d = self.0.transpose() * self.0 - Matrix3::identity();
        d.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    pub fn det(&self) -> f64 {
        self.0.determinant()
    }
}

/// The generator quadruple `(F, G, X+ = F+G, X- = F-G)` at a given alpha.
#[derive(Debug, Clone, Copy)]
pub struct Generators {
    pub f: SkewGenerator,
    pub g: SkewGenerator,
    pub x_plus: SkewGenerator,
    pub x_minus: SkewGenerator,
}

impl Generators {
    pub fn bang(&self, eps: Sign) -> &SkewGenerator {
        match eps {
            Sign::Plus => &self.x_plus,
            Sign::Minus => &self.x_minus,
        }
    }
}

/// Builds the drift and control generators at `alpha`.
///
/// `F` rotates about the x3-axis with length cos(alpha), `G` about the x1-axis
/// with length sin(alpha); the bang fields `X+- = F +- G` have unit axes
/// `(+-sin(alpha), 0, cos(alpha))`.
pub fn generators(alpha: f64) -> Result<Generators> {
    if !(alpha > 0.0 && alpha < std::f64::consts::FRAC_PI_2) {
        return Err(Error::AlphaOutOfRange {
            value: alpha,
            lo: 0.0,
            hi: std::f64::consts::FRAC_PI_2,
        });
    }
    let (s, c) = alpha.sin_cos();
    Ok(Generators {
        f: SkewGenerator::from_axis(Vector3::new(0.0, 0.0, c)),
        g: SkewGenerator::from_axis(Vector3::new(s, 0.0, 0.0)),
        x_plus: SkewGenerator::from_axis(Vector3::new(s, 0.0, c)),
        x_minus: SkewGenerator::from_axis(Vector3::new(-s, 0.0, c)),
    })
}

/// Rodrigues formula `e^{tY} = Id + sin(t) Y + (1-cos(t)) Y^2` for a unit axis.
///
/// Rejects a non-unit axis rather than renormalizing it.
pub fn rot_exp(y: &SkewGenerator, t: f64) -> Result<Rotation> {
    if !y.is_unit() {
        return Err(Error::NonUnitAxis {
            length: y.axis_length(),
            tol: UNIT_AXIS_TOL,
        });
    }
    Ok(Rotation(rodrigues(&y.matrix(), t)))
}

pub(crate) fn rodrigues(m: &Matrix3<f64>, t: f64) -> Matrix3<f64> {
    let (s, c) = t.sin_cos();
    Matrix3::identity() + m * s + m * m * (1.0 - c)
}

/// Applies `e^{tY}` to a single vector without forming the matrix.
pub fn rodrigues_apply(axis: &Vector3<f64>, t: f64, v: &Vector3<f64>) -> Vector3<f64> {
    let (s, c) = t.sin_cos();
    let av = axis.cross(v);
    let aav = axis.cross(&av);
    v + av * s + aav * (1.0 - c)
}

/// Derivative in `s` of `e^{tau(s) W(s)}` for a unit-axis family `W(s)`.
///
/// `d/ds e^{tau W} = tau' cos(tau) W + tau' sin(tau) W^2 + sin(tau) W' + (1-cos(tau)) (W'W + WW')`.
pub(crate) fn rodrigues_deriv(
    w: &Matrix3<f64>,
    dw: &Matrix3<f64>,
    tau: f64,
    dtau: f64,
) -> Matrix3<f64> {
    let (s, c) = tau.sin_cos();
    w * (dtau * c) + (w * w) * (dtau * s) + dw * s + (dw * w + w * dw) * (1.0 - c)
}

/// The single-rotation form of the product `e^{tX+} e^{tX-}`.
///
/// `e^{Theta(t) Z-(t)} = e^{tX+} e^{tX-}` and `e^{Theta(t) Z+(t)} = e^{tX-} e^{tX+}`,
/// with unit axes `Z-+ = [(0, +-B(t), C(t))]_x`.
#[derive(Debug, Clone, Copy)]
pub struct ConjugatePair {
    pub theta: f64,
    pub z_plus: SkewGenerator,
    pub z_minus: SkewGenerator,
    pub b: f64,
    pub c: f64,
}

/// Computes `Theta(t)` and the axes `Z+-(t)` at a given alpha.
///
/// `t` is reduced mod 2*pi; the formulas assume `t` in `[0, 2*pi)`.
pub fn conjugate_pair(t: f64, alpha: f64) -> Result<ConjugatePair> {
    if !(alpha > 0.0 && alpha < std::f64::consts::FRAC_PI_2) {
        return Err(Error::AlphaOutOfRange {
            value: alpha,
            lo: 0.0,
            hi: std::f64::consts::FRAC_PI_2,
        });
    }
    let t = t.rem_euclid(2.0 * std::f64::consts::PI);
    let (b, c) = conjugate_axis_components(t, alpha);
    Ok(ConjugatePair {
        theta: big_theta(t, alpha),
        z_plus: SkewGenerator::from_axis(Vector3::new(0.0, -b, c)),
        z_minus: SkewGenerator::from_axis(Vector3::new(0.0, b, c)),
        b,
        c,
    })
}

/// `Theta(t) = 2 arccos(sin^2(t/2) cos(2 alpha) - cos^2(t/2))`.
pub(crate) fn big_theta(t: f64, alpha: f64) -> f64 {
    let sh = (t / 2.0).sin();
    let ch = (t / 2.0).cos();
    let u = sh * sh * (2.0 * alpha).cos() - ch * ch;
    2.0 * u.clamp(-1.0, 1.0).acos()
}

/// `d Theta / dt = -2 cos^2(alpha) sin(t) / sqrt(1 - u^2)`.
pub(crate) fn big_theta_deriv(t: f64, alpha: f64) -> f64 {
    let sh = (t / 2.0).sin();
    let ch = (t / 2.0).cos();
    let u = sh * sh * (2.0 * alpha).cos() - ch * ch;
    let ca = alpha.cos();
    let disc = (1.0 - u * u).max(0.0);
    debug_assert!(disc > 1e-14, "Theta'(t) evaluated at a branch endpoint");
    -2.0 * ca * ca * t.sin() / disc.sqrt()
}

/// Axis components `B(t), C(t)` of the conjugate rotation.
pub(crate) fn conjugate_axis_components(t: f64, alpha: f64) -> (f64, f64) {
    let sa = alpha.sin();
    let sh = (t / 2.0).sin();
    let ch = (t / 2.0).cos();
    let d = (sh * sh * sa * sa + ch * ch).sqrt();
    (sa * sh / d, -ch / d)
}

/// Derivatives `(B'(t), C'(t))`.
pub(crate) fn conjugate_axis_components_deriv(t: f64, alpha: f64) -> (f64, f64) {
    let sa = alpha.sin();
    let ca = alpha.cos();
    let sh = (t / 2.0).sin();
    let ch = (t / 2.0).cos();
    let d2 = sh * sh * sa * sa + ch * ch;
    let d = d2.sqrt();
    // d'(t) = -cos^2(alpha) sin(t) / (4 d)
    let dp = -ca * ca * t.sin() / (4.0 * d);
    let bp = sa * (ch / (2.0 * d) - sh * dp / d2);
    let cp = sh / (2.0 * d) + ch * dp / d2;
    (bp, cp)
}

/// Unit axis of `Z-(t)` (for `Z+` negate the second component).
pub(crate) fn z_minus_axis(t: f64, alpha: f64) -> Vector3<f64> {
    let (b, c) = conjugate_axis_components(t, alpha);
    Vector3::new(0.0, b, c)
}

pub(crate) fn z_minus_axis_deriv(t: f64, alpha: f64) -> Vector3<f64> {
    let (bp, cp) = conjugate_axis_components_deriv(t, alpha);
    Vector3::new(0.0, bp, cp)
}

/// The orthogonal symmetry with respect to the x3-axis, `Diag(-1,-1,1)`.
///
/// It intertwines the bang fields: `mirror . X_eps = X_{-eps} . mirror`.
pub trait MirrorX3 {
    fn mirror_x3(&self) -> Self;
}

impl MirrorX3 for SpherePoint {
    fn mirror_x3(&self) -> Self {
        SpherePoint(Vector3::new(-self.0.x, -self.0.y, self.0.z))
    }
}

impl MirrorX3 for Vector3<f64> {
    fn mirror_x3(&self) -> Self {
        Vector3::new(-self.x, -self.y, self.z)
    }
}

impl MirrorX3 for Rotation {
    fn mirror_x3(&self) -> Self {
        let d = Matrix3::from_diagonal(&Vector3::new(-1.0, -1.0, 1.0));
        Rotation(d * self.0 * d)
    }
}
