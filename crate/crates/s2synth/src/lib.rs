//! Time-optimal synthesis engine for the control system `dx/dt = (F + uG) x`
//! on the unit sphere, `u` in `[-1, 1]`, where `F` and `G` generate rotations
//! with perpendicular axes of lengths `cos(alpha)` and `sin(alpha)`.
//!
//! The crate builds the objects the synthesis from the north pole is made
//! of, for `alpha < pi/4`:
//!
//! - exact rotation algebra for the bang fields ([`so3`]);
//! - the bang-bang extremal family, switching curves and the cone test for
//!   their local optimality ([`extremal`]);
//! - extremal fronts at times `k pi`, their power series in alpha, and the
//!   rescaling maps to the plane ([`front`]);
//! - the pendulum limit synthesis from a circle source ([`pendulum`]);
//! - the overlap curve (cut locus) of the rescaled problem by Newton
//!   continuation, and its convergence to the pendulum cut locus
//!   ([`cutlocus`]);
//! - the degenerate-remainder regimes with their cusps, double points,
//!   segment overlap and switching-loss parameter ([`regimes`]);
//! - brute-force grid oracles used as ground truth ([`oracle`]).

pub mod cutlocus;
pub mod error;
pub mod export;
pub mod extremal;
pub mod front;
pub mod oracle;
pub mod pendulum;
pub mod planar;
pub mod regimes;
pub mod so3;
pub mod verify;

pub use error::{Error, Result};
pub use extremal::AlphaParam;
pub use planar::PlanarPoint;
pub use so3::{Sign, SpherePoint};
