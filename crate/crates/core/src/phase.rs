use std::f64::consts::PI;
use std::ops::{Mul, Neg};

use crate::linalg::C64;

/// Maps an angle to `(−π, π]`.
pub fn wrap_angle(x: f64) -> f64 {
    let w = x - 2.0 * PI * ((x - PI) / (2.0 * PI)).ceil();
    // ceil can land on the open end after rounding
    if w <= -PI {
        w + 2.0 * PI
    } else {
        w
    }
}

/// Distance between two angles on the circle.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    wrap_angle(a - b).abs()
}

/// A point `e^{iθ}` of the unit circle, stored by its angle in `(−π, π]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Phase(f64);

impl Phase {
    pub const ONE: Phase = Phase(0.0);

    pub fn from_angle(theta: f64) -> Self {
        Phase(wrap_angle(theta))
    }

    pub fn angle(self) -> f64 {
        self.0
    }

    pub fn to_complex(self) -> C64 {
        C64::from_polar(1.0, self.0)
    }

    pub fn distance(self, other: Phase) -> f64 {
        angle_distance(self.0, other.0)
    }

    pub fn approx_eq(self, other: Phase, tol: f64) -> bool {
        self.distance(other) <= tol
    }

    pub fn is_one(self, tol: f64) -> bool {
        self.approx_eq(Phase::ONE, tol)
    }
}

impl Mul for Phase {
    type Output = Phase;

    // angles add under multiplication on the circle
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: Phase) -> Phase {
        Phase::from_angle(self.0 + rhs.0)
    }
}

impl Neg for Phase {
    type Output = Phase;

    fn neg(self) -> Phase {
        Phase::from_angle(-self.0)
    }
}
