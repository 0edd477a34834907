//! Unit complex numbers stored as angles: an exact root-of-unity part plus a
//! floating part in radians. Products add angles.

use crate::abelcoh::RootOfUnity;
use crate::util::wrap_angle;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::ops::{Add, Neg, Sub};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Phase {
    pub exact: RootOfUnity,
    /// Unreduced; reduction happens only when the angle is read.
    pub radians: f64,
}

impl Default for Phase {
    fn default() -> Self {
        Phase::ZERO
    }
}

impl Phase {
    pub const ZERO: Phase = Phase { exact: RootOfUnity::ONE, radians: 0.0 };

    pub fn from_radians(x: f64) -> Self {
        Phase { exact: RootOfUnity::ONE, radians: x }
    }

    pub fn from_root(r: RootOfUnity) -> Self {
        Phase { exact: r, radians: 0.0 }
    }

    /// Total angle reduced to (−π, π].
    pub fn angle(&self) -> f64 {
        let e = self.exact.turns();
        let e = if e > 0.5 { e - 1.0 } else { e };
        wrap_angle(2.0 * PI * e + wrap_angle(self.radians))
    }

    pub fn abs_angle(&self) -> f64 {
        self.angle().abs()
    }

    pub fn to_unit(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.angle())
    }

    /// True when both parts vanish identically.
    pub fn is_zero_exact(&self) -> bool {
        self.exact.is_one() && self.radians == 0.0
    }

    pub fn conj(self) -> Phase {
        -self
    }

    pub fn scale_radians(self, k: f64) -> Phase {
        Phase { exact: self.exact, radians: self.radians * k }
    }
}

impl Add for Phase {
    type Output = Phase;
    fn add(self, o: Phase) -> Phase {
        Phase { exact: self.exact.mul(o.exact), radians: self.radians + o.radians }
    }
}

impl Neg for Phase {
    type Output = Phase;
    fn neg(self) -> Phase {
        Phase { exact: self.exact.inv(), radians: -self.radians }
    }
}

impl Sub for Phase {
    type Output = Phase;
    fn sub(self, o: Phase) -> Phase {
        self + (-o)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_parts_cancel() {
        let a = Phase::from_root(RootOfUnity::new(1, 3)) + Phase::from_radians(0.25);
        assert!((a - a).is_zero_exact());
        assert!((a.angle() - (2.0 * PI / 3.0 + 0.25)).abs() < 1e-15);
        let b = Phase::from_root(RootOfUnity::new(2, 3));
        assert!((b.angle() + 2.0 * PI / 3.0).abs() < 1e-15);
    }
}
