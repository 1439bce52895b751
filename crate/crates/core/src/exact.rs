//! Exact polynomial arithmetic over the Gaussian rationals `Q(i)`.
//!
//! Every finite `f64` is a dyadic rational, so floating point input data can
//! always be lifted into this field without loss. Divisor multiplicities and
//! puncture membership are decided here; root locations are then obtained
//! numerically from square-free factors.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::poly::Poly;

pub type GaussRat = Complex<BigRational>;

pub fn gr_int(re: i64, im: i64) -> GaussRat {
    Complex::new(BigRational::from_integer(re.into()), BigRational::from_integer(im.into()))
}

pub fn gr_ratio(re: (i64, i64), im: (i64, i64)) -> GaussRat {
    Complex::new(
        BigRational::new(re.0.into(), re.1.into()),
        BigRational::new(im.0.into(), im.1.into()),
    )
}

/// Exact lift of a finite complex float.
pub fn gr_from_c64(z: Complex64) -> Result<GaussRat> {
    let re = BigRational::from_float(z.re).ok_or_else(|| Error::InvalidData(format!("non-finite value {z}")))?;
    let im = BigRational::from_float(z.im).ok_or_else(|| Error::InvalidData(format!("non-finite value {z}")))?;
    Ok(Complex::new(re, im))
}

pub fn gr_to_c64(z: &GaussRat) -> Complex64 {
    Complex64::new(rat_to_f64(&z.re), rat_to_f64(&z.im))
}

pub fn rat_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // numerator and denominator both overflow f64; scale down first
        let n = r.numer().bits() as i64;
        let d = r.denom().bits() as i64;
        let shift = (n - d).clamp(-1000, 1000);
        let scaled = if shift >= 0 {
            r / BigRational::from_integer(BigInt::one() << shift as usize)
        } else {
            r * BigRational::from_integer(BigInt::one() << (-shift) as usize)
        };
        scaled.to_f64().unwrap_or(0.0) * 2f64.powi(shift as i32)
    })
}

/// Parses a rational component given as `"p/q"`, `"p"` or a decimal literal.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if let Ok(r) = BigRational::from_str(s) {
        return Ok(r);
    }
    let x: f64 = s.parse().map_err(|_| Error::InvalidData(format!("cannot parse rational {s:?}")))?;
    BigRational::from_float(x).ok_or_else(|| Error::InvalidData(format!("non-finite value {s:?}")))
}

pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Polynomial with Gaussian-rational coefficients, ascending degree, no
/// trailing zeros. The zero polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QPoly {
    coeffs: Vec<GaussRat>,
}

impl fmt::Debug for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QPoly[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({})+({})i", format_rational(&c.re), format_rational(&c.im))?;
        }
        write!(f, "]")
    }
}

impl QPoly {
    pub fn new(mut coeffs: Vec<GaussRat>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        QPoly { coeffs }
    }

    pub fn zero() -> Self {
        QPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        QPoly::constant(GaussRat::one())
    }

    pub fn constant(c: GaussRat) -> Self {
        QPoly::new(vec![c])
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        QPoly::new(coeffs.iter().map(|&c| gr_int(c, 0)).collect())
    }

    pub fn from_c64(coeffs: &[Complex64]) -> Result<Self> {
        Ok(QPoly::new(coeffs.iter().map(|&c| gr_from_c64(c)).collect::<Result<_>>()?))
    }

    /// `z - p`
    pub fn linear(p: &GaussRat) -> Self {
        QPoly::new(vec![-p.clone(), GaussRat::one()])
    }

    /// `z^n`
    pub fn monomial(n: usize) -> Self {
        let mut c = vec![GaussRat::zero(); n + 1];
        c[n] = GaussRat::one();
        QPoly { coeffs: c }
    }

    pub fn coeffs(&self) -> &[GaussRat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0.
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn lead(&self) -> Option<&GaussRat> {
        self.coeffs.last()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn to_poly(&self) -> Poly {
        Poly::new(self.coeffs.iter().map(gr_to_c64).collect())
    }

    pub fn eval(&self, z: &GaussRat) -> GaussRat {
        let mut acc = GaussRat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    pub fn scale(&self, s: &GaussRat) -> QPoly {
        if s.is_zero() {
            return QPoly::zero();
        }
        QPoly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn add(&self, other: &QPoly) -> QPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut c = GaussRat::zero();
            if let Some(a) = self.coeffs.get(i) {
                c = c + a;
            }
            if let Some(b) = other.coeffs.get(i) {
                c = c + b;
            }
            out.push(c);
        }
        QPoly::new(out)
    }

    pub fn neg(&self) -> QPoly {
        QPoly { coeffs: self.coeffs.iter().map(|c| -c.clone()).collect() }
    }

    pub fn sub(&self, other: &QPoly) -> QPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &QPoly) -> QPoly {
        if self.is_zero() || other.is_zero() {
            return QPoly::zero();
        }
        let mut out = vec![GaussRat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + a * b;
            }
        }
        QPoly::new(out)
    }

    pub fn pow(&self, n: usize) -> QPoly {
        let mut acc = QPoly::one();
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn derivative(&self) -> QPoly {
        QPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * gr_int(i as i64, 0))
                .collect(),
        )
    }

    /// Euclidean division. Panics on division by the zero polynomial.
    pub fn divrem(&self, divisor: &QPoly) -> (QPoly, QPoly) {
        let dd = divisor.degree().expect("division by zero polynomial");
        let lead_inv = GaussRat::one() / divisor.lead().unwrap();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (QPoly::zero(), self.clone());
        }
        let mut quot = vec![GaussRat::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] * &lead_inv;
            if !c.is_zero() {
                for (j, dc) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] = &rem[k + j] - &c * dc;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (QPoly::new(quot), QPoly::new(rem))
    }

    /// Division that is required to be exact.
    pub fn exact_div(&self, divisor: &QPoly) -> QPoly {
        let (q, r) = self.divrem(divisor);
        debug_assert!(r.is_zero(), "inexact division");
        q
    }

    pub fn monic(&self) -> QPoly {
        match self.lead() {
            None => QPoly::zero(),
            Some(l) => self.scale(&(GaussRat::one() / l)),
        }
    }

    /// Monic greatest common divisor (zero if both are zero).
    pub fn gcd(&self, other: &QPoly) -> QPoly {
        let mut a = self.monic();
        let mut b = other.monic();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r.monic();
        }
        a
    }

    /// Yun's square-free decomposition: `self = lead * prod f_i^i`.
    /// Returns the nonconstant monic factors with their multiplicity.
    pub fn square_free(&self) -> Vec<(QPoly, usize)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.exact_div(&a0);
        let mut c = df.exact_div(&a0);
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        loop {
            let a = b.gcd(&d);
            if a.degree().unwrap_or(0) > 0 {
                out.push((a.clone(), i));
            }
            b = b.exact_div(&a);
            if b.degree().unwrap_or(0) == 0 {
                break;
            }
            c = d.exact_div(&a);
            d = c.sub(&b.derivative());
            i += 1;
        }
        out
    }

    /// Order of vanishing at `p` (0 when `p` is not a root). The zero
    /// polynomial is reported as `usize::MAX`.
    pub fn order_at(&self, p: &GaussRat) -> usize {
        if self.is_zero() {
            return usize::MAX;
        }
        self.deflate(p).1
    }

    /// Removes the factor `(z - p)^m` where `m = order_at(p)`.
    pub fn deflate(&self, p: &GaussRat) -> (QPoly, usize) {
        let lin = QPoly::linear(p);
        let mut cur = self.clone();
        let mut k = 0;
        while !cur.is_zero() && cur.eval(p).is_zero() {
            cur = cur.exact_div(&lin);
            k += 1;
        }
        (cur, k)
    }

    /// `w^n P(1/w)`; requires `n >= deg`.
    pub fn reversed(&self, n: usize) -> QPoly {
        let mut c = vec![GaussRat::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            c[n - i] = a.clone();
        }
        QPoly::new(c)
    }

    /// Largest coefficient modulus, as a float.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| gr_to_c64(c).norm()).fold(0.0, f64::max)
    }
}

/// A point of the sphere with an exact finite coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExactPoint {
    Finite(GaussRat),
    Infinity,
}

impl ExactPoint {
    pub fn from_sphere(p: &crate::sphere::SpherePoint) -> Result<Self> {
        match p {
            crate::sphere::SpherePoint::Infinity => Ok(ExactPoint::Infinity),
            crate::sphere::SpherePoint::Finite(z) => Ok(ExactPoint::Finite(gr_from_c64(*z)?)),
        }
    }

    pub fn to_sphere(&self) -> crate::sphere::SpherePoint {
        match self {
            ExactPoint::Infinity => crate::sphere::SpherePoint::Infinity,
            ExactPoint::Finite(z) => crate::sphere::SpherePoint::Finite(gr_to_c64(z)),
        }
    }
}

/// True when `z` has no imaginary part and a non-negative real part.
pub fn is_nonneg_real(z: &GaussRat) -> bool {
    z.im.is_zero() && !z.re.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divrem_and_gcd() {
        // (z-1)^2 (z+2) and (z-1)(z+3)
        let a = QPoly::from_ints(&[2, -3, 0, 1]);
        let b = QPoly::from_ints(&[-3, 2, 1]);
        let g = a.gcd(&b);
        assert_eq!(g, QPoly::from_ints(&[-1, 1]));
        let (q, r) = a.divrem(&b);
        assert_eq!(q.mul(&b).add(&r), a);
    }

    #[test]
    fn yun_decomposition() {
        // z (z-1)^2 (z^2+1)^3
        let z = QPoly::from_ints(&[0, 1]);
        let zm1 = QPoly::from_ints(&[-1, 1]);
        let q = QPoly::from_ints(&[1, 0, 1]);
        let p = z.mul(&zm1.pow(2)).mul(&q.pow(3)).scale(&gr_int(7, 2));
        let sf = p.square_free();
        assert_eq!(sf, vec![(z, 1), (zm1, 2), (q, 3)]);
    }

    #[test]
    fn order_and_deflate() {
        let p = QPoly::from_ints(&[0, 0, 0, 1, 1]); // z^3 (z+1)
        assert_eq!(p.order_at(&gr_int(0, 0)), 3);
        assert_eq!(p.order_at(&gr_int(-1, 0)), 1);
        assert_eq!(p.order_at(&gr_int(2, 0)), 0);
        let (d, k) = p.deflate(&gr_int(0, 0));
        assert_eq!(k, 3);
        assert_eq!(d, QPoly::from_ints(&[1, 1]));
    }

    #[test]
    fn float_lift_is_exact() {
        let z = Complex64::new(0.1, -3.25);
        let g = gr_from_c64(z).unwrap();
        assert_eq!(gr_to_c64(&g), z);
        assert_eq!(parse_rational("3/5").unwrap(), BigRational::new(3.into(), 5.into()));
        assert_eq!(format_rational(&parse_rational("-6/4").unwrap()), "-3/2");
    }
}
