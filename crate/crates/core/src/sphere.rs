//! Points of the Riemann sphere and the chordal metric.

use std::fmt;

use num_complex::Complex64;
use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

/// Default chordal tolerance for deciding that two sphere points coincide.
pub const EPS_PT: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpherePoint {
    Finite(Complex64),
    Infinity,
}

impl SpherePoint {
    pub fn finite(re: f64, im: f64) -> Self {
        SpherePoint::Finite(Complex64::new(re, im))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, SpherePoint::Infinity)
    }

    pub fn as_finite(&self) -> Option<Complex64> {
        match self {
            SpherePoint::Finite(z) => Some(*z),
            SpherePoint::Infinity => None,
        }
    }

    /// Chordal distance, normalized so that antipodal points are at distance 1.
    pub fn chordal(&self, other: &SpherePoint) -> f64 {
        match (self, other) {
            (SpherePoint::Infinity, SpherePoint::Infinity) => 0.0,
            (SpherePoint::Finite(a), SpherePoint::Infinity)
            | (SpherePoint::Infinity, SpherePoint::Finite(a)) => 1.0 / (1.0 + a.norm_sqr()).sqrt(),
            (SpherePoint::Finite(a), SpherePoint::Finite(b)) => {
                (a - b).norm() / ((1.0 + a.norm_sqr()).sqrt() * (1.0 + b.norm_sqr()).sqrt())
            }
        }
    }

    pub fn approx_eq(&self, other: &SpherePoint, eps: f64) -> bool {
        self.chordal(other) <= eps
    }

    /// Image under `z -> 1/z`.
    pub fn recip(&self) -> SpherePoint {
        match self {
            SpherePoint::Infinity => SpherePoint::Finite(Complex64::new(0.0, 0.0)),
            SpherePoint::Finite(z) if *z == Complex64::new(0.0, 0.0) => SpherePoint::Infinity,
            SpherePoint::Finite(z) => SpherePoint::Finite(z.inv()),
        }
    }

    /// Unit normal obtained by inverse stereographic projection.
    pub fn to_unit_vector(&self) -> [f64; 3] {
        match self {
            SpherePoint::Infinity => [0.0, 0.0, 1.0],
            SpherePoint::Finite(g) => {
                let n = g.norm_sqr();
                let d = 1.0 + n;
                [2.0 * g.re / d, 2.0 * g.im / d, (n - 1.0) / d]
            }
        }
    }

    pub fn is_finite_value(&self) -> bool {
        match self {
            SpherePoint::Finite(z) => z.re.is_finite() && z.im.is_finite(),
            SpherePoint::Infinity => true,
        }
    }
}

impl From<Complex64> for SpherePoint {
    fn from(z: Complex64) -> Self {
        SpherePoint::Finite(z)
    }
}

impl fmt::Display for SpherePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpherePoint::Infinity => write!(f, "inf"),
            SpherePoint::Finite(z) => {
                if z.im == 0.0 {
                    write!(f, "{}", z.re)
                } else if z.re == 0.0 {
                    write!(f, "{}i", z.im)
                } else if z.im < 0.0 {
                    write!(f, "{}-{}i", z.re, -z.im)
                } else {
                    write!(f, "{}+{}i", z.re, z.im)
                }
            }
        }
    }
}

impl Serialize for SpherePoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            SpherePoint::Infinity => s.serialize_str("inf"),
            // drop signed zeros so equal points serialize identically
            SpherePoint::Finite(z) => [z.re + 0.0, z.im + 0.0].serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for SpherePoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match &v {
            serde_json::Value::String(s) if s == "inf" || s == "infinity" => Ok(SpherePoint::Infinity),
            serde_json::Value::Array(a) if a.len() == 2 => {
                let re = a[0].as_f64().ok_or_else(|| de::Error::custom("expected number"))?;
                let im = a[1].as_f64().ok_or_else(|| de::Error::custom("expected number"))?;
                Ok(SpherePoint::finite(re, im))
            }
            _ => Err(de::Error::custom("expected [re, im] or \"inf\"")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chordal_metric_basics() {
        let zero = SpherePoint::finite(0.0, 0.0);
        assert_eq!(zero.chordal(&SpherePoint::Infinity), 1.0);
        assert_eq!(SpherePoint::Infinity.chordal(&SpherePoint::Infinity), 0.0);
        let a = SpherePoint::finite(1.0, 0.0);
        let b = SpherePoint::finite(-1.0, 0.0);
        assert!((a.chordal(&b) - 1.0).abs() < 1e-15);
        // large finite points approach infinity
        assert!(SpherePoint::finite(1e12, 0.0).approx_eq(&SpherePoint::Infinity, EPS_PT));
    }

    #[test]
    fn stereographic_normal() {
        assert_eq!(SpherePoint::finite(0.0, 0.0).to_unit_vector(), [0.0, 0.0, -1.0]);
        let n = SpherePoint::finite(1.0, 0.0).to_unit_vector();
        assert!((n[0] - 1.0).abs() < 1e-15 && n[2].abs() < 1e-15);
    }

    #[test]
    fn json_shape() {
        let s = serde_json::to_string(&vec![SpherePoint::finite(0.0, 1.0), SpherePoint::Infinity]).unwrap();
        assert_eq!(s, "[[0.0,1.0],\"inf\"]");
        let back: Vec<SpherePoint> = serde_json::from_str(&s).unwrap();
        assert_eq!(back[1], SpherePoint::Infinity);
    }
}
