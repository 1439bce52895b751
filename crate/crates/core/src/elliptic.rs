//! Functions on the square torus of the form `c * R(wp) * (wp')^eps`.
//!
//! Internally `R` is a rational function of the normalized coordinate
//! `X = wp / a`, and `Y = wp' / a^(3/2)` satisfies `Y^2 = 4 X (X^2 - 1)`. The
//! half-period values then sit at the exact points `X = 1, 0, -1`, so every
//! divisor computation stays on the exact Gaussian-rational path even though
//! `a` itself is transcendental.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use num_traits::Zero;
use serde::Serialize;

use crate::divisor::{Divisor, DivisorPoint};
use crate::error::{Error, Result};
use crate::exact::{gr_int, ExactPoint, GaussRat, QPoly};
use crate::rational::{locate_roots, RationalFunction};
use crate::sphere::{SpherePoint, EPS_PT};

const LAURENT_TERMS: usize = 16;

/// Square lattice `omega1 (Z + iZ)` with `(wp')^2 = 4 wp (wp^2 - a^2)`.
#[derive(Clone, Debug)]
pub struct SquareTorus {
    a: f64,
    omega1: f64,
    /// Laurent coefficients `c_k` (k = 2..) of wp for the unit lattice.
    laurent: Vec<f64>,
    /// `a` for the unit lattice.
    a_unit: f64,
}

/// `wp(1/2)` on the lattice `Z + iZ`, from theta constants at `q = e^{-pi}`.
pub fn lemniscatic_a() -> f64 {
    let q = (-PI).exp();
    let mut t3 = 1.0;
    let mut t4 = 1.0;
    for n in 1..8 {
        let term = 2.0 * q.powi(n * n);
        t3 += term;
        t4 += if n % 2 == 0 { term } else { -term };
    }
    PI * PI / 3.0 * (t3.powi(4) + t4.powi(4))
}

impl SquareTorus {
    /// The torus with real period `omega1 = 1`.
    pub fn standard() -> Self {
        Self::with_omega(1.0)
    }

    /// The torus whose cubic has parameter `a`.
    pub fn with_a(a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Parameter(format!("torus parameter a must be positive, got {a}")));
        }
        Ok(Self::with_omega((lemniscatic_a() / a).sqrt()))
    }

    fn with_omega(omega1: f64) -> Self {
        let a_unit = lemniscatic_a();
        let g2 = 4.0 * a_unit * a_unit;
        let mut c = vec![0.0; LAURENT_TERMS + 2];
        c[2] = g2 / 20.0;
        for k in 4..c.len() {
            let s: f64 = (2..=k - 2).map(|m| c[m] * c[k - m]).sum();
            c[k] = 3.0 / ((2 * k + 1) as f64 * (k - 3) as f64) * s;
        }
        SquareTorus { a: a_unit / (omega1 * omega1), omega1, laurent: c, a_unit }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn g2(&self) -> f64 {
        4.0 * self.a * self.a
    }

    pub fn omega1(&self) -> f64 {
        self.omega1
    }

    pub fn omega2(&self) -> Complex64 {
        Complex64::new(0.0, self.omega1)
    }

    /// `e_1 = a`, `e_2 = 0`, `e_3 = -a`.
    pub fn e(&self, i: u8) -> f64 {
        match i {
            1 => self.a,
            2 => 0.0,
            _ => -self.a,
        }
    }

    /// Uniformizer coordinate of a half period: `omega1/2`, `(omega1+omega2)/2`, `omega2/2`.
    pub fn half_period(&self, i: u8) -> Complex64 {
        let w = self.omega1 / 2.0;
        match i {
            1 => Complex64::new(w, 0.0),
            2 => Complex64::new(w, w),
            _ => Complex64::new(0.0, w),
        }
    }

    /// Reduces `z` to the fundamental cell centred at the origin.
    pub fn reduce(&self, z: Complex64) -> Complex64 {
        let u = z / self.omega1;
        Complex64::new(u.re - u.re.round(), u.im - u.im.round()) * self.omega1
    }

    /// `(wp(z), wp'(z))`.
    pub fn wp(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        let (p, dp) = self.wp_unit(z / self.omega1)?;
        let w2 = self.omega1 * self.omega1;
        Ok((p / w2, dp / (w2 * self.omega1)))
    }

    /// Normalized coordinates `(X, Y) = (wp / a, wp' / a^(3/2))`.
    pub fn xy(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        let (p, dp) = self.wp(z)?;
        Ok((p / self.a, dp / self.a.powf(1.5)))
    }

    fn wp_unit(&self, u: Complex64) -> Result<(Complex64, Complex64)> {
        let u = Complex64::new(u.re - u.re.round(), u.im - u.im.round());
        // Near a half period the duplication steps lose the small value of
        // wp'; use wp(w_i + v) = e_i + c_i / (wp(v) - e_i) instead.
        let a = self.a_unit;
        for (hp, e, c) in [
            (Complex64::new(0.5, 0.0), a, 2.0 * a * a),
            (Complex64::new(0.5, 0.5), 0.0, -a * a),
            (Complex64::new(0.0, 0.5), -a, 2.0 * a * a),
        ] {
            for sx in [-1.0, 1.0] {
                for sy in [-1.0, 1.0] {
                    let h = Complex64::new(hp.re * sx, hp.im * sy);
                    let v = u - h;
                    if v.norm() < EPS_PT {
                        return Ok((e + c * v * v, 2.0 * c * v));
                    }
                    if v.norm() < 0.125 {
                        let (p, dp) = self.wp_laurent(v)?;
                        let q = p - e;
                        return Ok((e + c / q, -c * dp / (q * q)));
                    }
                }
            }
        }
        self.wp_laurent(u)
    }

    /// Laurent series about the origin with duplication for larger `|u|`.
    fn wp_laurent(&self, u: Complex64) -> Result<(Complex64, Complex64)> {
        let mut u = u;
        if u.norm() < 1e-15 {
            return Err(Error::Pole(format!("lattice point {u}")));
        }
        let mut halvings = 0;
        while u.norm() > 0.125 {
            u /= 2.0;
            halvings += 1;
        }
        let u2 = u * u;
        let mut p = u2.inv();
        let mut dp = -2.0 * p / u;
        let mut pw = Complex64::new(1.0, 0.0); // u^(2k-4)
        for k in 2..self.laurent.len() {
            let ck = self.laurent[k];
            // d/du u^(2k-2) = (2k-2) u^(2k-3)
            dp += ck * (2 * k - 2) as f64 * pw * u;
            pw *= u2;
            p += ck * pw;
        }
        let g2 = 4.0 * self.a_unit * self.a_unit;
        for _ in 0..halvings {
            let s = p * p + g2 / 4.0;
            let n = s * s;
            let dn = 4.0 * p * s;
            let dd = 12.0 * p * p - g2;
            let dp2 = dp * dp;
            let p_new = n / dp2;
            let dp_new = (dn * dp2 - n * dd) / (2.0 * dp2 * dp);
            p = p_new;
            dp = dp_new;
        }
        Ok((p, dp))
    }
}

/// A point of the torus, addressed through the values of `wp` and `wp'`.
#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
#[serde(rename_all = "lowercase")]
pub enum TorusPoint {
    Lattice,
    HalfPeriod(u8),
    /// `x` is the value of `wp`; `s` selects `wp' = s * sqrt(4x^3 - g2 x)`
    /// with the principal square root.
    Generic { x: Complex64, s: i8 },
}

impl TorusPoint {
    /// Uniformizer coordinate of the lattice point or a half period.
    pub fn uniformizer(&self, t: &SquareTorus) -> Option<Complex64> {
        match self {
            TorusPoint::Lattice => Some(Complex64::zero()),
            TorusPoint::HalfPeriod(i) => Some(t.half_period(*i)),
            TorusPoint::Generic { .. } => None,
        }
    }

    /// The four 2-torsion points.
    pub fn standard4() -> Vec<TorusPoint> {
        vec![TorusPoint::Lattice, TorusPoint::HalfPeriod(1), TorusPoint::HalfPeriod(2), TorusPoint::HalfPeriod(3)]
    }

    /// Lattice point and the half periods over `wp = a` and `wp = -a`.
    pub fn standard3() -> Vec<TorusPoint> {
        vec![TorusPoint::Lattice, TorusPoint::HalfPeriod(1), TorusPoint::HalfPeriod(3)]
    }
}

impl DivisorPoint for TorusPoint {
    fn same_point(&self, other: &Self) -> bool {
        match (self, other) {
            (TorusPoint::Generic { x, s }, TorusPoint::Generic { x: y, s: t }) => {
                s == t && SpherePoint::Finite(*x).approx_eq(&SpherePoint::Finite(*y), EPS_PT)
            }
            _ => self == other,
        }
    }
}

impl fmt::Display for TorusPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TorusPoint::Lattice => write!(f, "lattice"),
            TorusPoint::HalfPeriod(i) => write!(f, "hp{i}"),
            TorusPoint::Generic { x, s } => {
                write!(f, "wp={}{}", SpherePoint::Finite(*x), if *s > 0 { "+" } else { "-" })
            }
        }
    }
}

/// Exact normalized half-period value `e_i / a`.
fn e_exact(i: u8) -> GaussRat {
    match i {
        1 => gr_int(1, 0),
        2 => gr_int(0, 0),
        _ => gr_int(-1, 0),
    }
}

/// `4X(X^2 - 1)`.
fn cubic() -> QPoly {
    QPoly::from_ints(&[0, -4, 0, 4])
}

/// `c * R(X) * Y^eps`.
#[derive(Clone, Debug)]
pub struct EllipticFunction {
    c: Complex64,
    r: RationalFunction,
    eps: u8,
}

impl EllipticFunction {
    pub fn new(c: Complex64, r: RationalFunction, eps: u8) -> Result<Self> {
        if eps > 1 {
            return Err(Error::InvalidData(format!("power of wp' must be 0 or 1, got {eps}")));
        }
        Ok(EllipticFunction { c, r, eps })
    }

    pub fn constant(c: Complex64) -> Self {
        EllipticFunction { c, r: RationalFunction::constant(Complex64::new(1.0, 0.0)), eps: 0 }
    }

    /// `wp^n` for any integer `n`.
    pub fn wp_pow(t: &SquareTorus, n: i32) -> Self {
        let x = if n >= 0 {
            RationalFunction::polynomial(QPoly::monomial(n as usize))
        } else {
            RationalFunction::new(Complex64::new(1.0, 0.0), QPoly::one(), QPoly::monomial((-n) as usize))
                .expect("nonzero denominator")
        };
        EllipticFunction { c: Complex64::new(t.a().powi(n), 0.0), r: x, eps: 0 }
    }

    pub fn wp(t: &SquareTorus) -> Self {
        Self::wp_pow(t, 1)
    }

    pub fn wp_prime(t: &SquareTorus) -> Self {
        EllipticFunction {
            c: Complex64::new(t.a().powf(1.5), 0.0),
            r: RationalFunction::constant(Complex64::new(1.0, 0.0)),
            eps: 1,
        }
    }

    /// `sigma / (wp^j wp')`.
    pub fn costa_gauss(t: &SquareTorus, j: u32, sigma: Complex64) -> Result<Self> {
        Ok(Self::constant(sigma).mul(&Self::wp_pow(t, j as i32).mul(&Self::wp_prime(t)).inverse()?))
    }

    pub fn c(&self) -> Complex64 {
        self.c
    }

    /// The rational factor in the normalized variable `X`.
    pub fn r(&self) -> &RationalFunction {
        &self.r
    }

    pub fn eps(&self) -> u8 {
        self.eps
    }

    pub fn is_zero(&self) -> bool {
        self.c == Complex64::zero() || self.r.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.eps == 0 && self.r.is_constant()
    }

    pub fn scaled_by(&self, k: Complex64) -> Self {
        EllipticFunction { c: self.c * k, ..self.clone() }
    }

    pub fn mul(&self, other: &EllipticFunction) -> Self {
        let mut r = self.r.mul(&other.r);
        let mut eps = self.eps + other.eps;
        if eps == 2 {
            r = r.mul(&RationalFunction::polynomial(cubic()));
            eps = 0;
        }
        EllipticFunction { c: self.c * other.c, r, eps }
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroFunction);
        }
        let mut r = self.r.inverse()?;
        if self.eps == 1 {
            // 1/(R Y) = Y / (R Y^2)
            r = r.mul(&RationalFunction::polynomial(cubic()).inverse()?);
        }
        Ok(EllipticFunction { c: self.c.inv(), r, eps: self.eps })
    }

    pub fn powi(&self, n: i32) -> Result<Self> {
        let base = if n < 0 { self.inverse()? } else { self.clone() };
        let mut out = Self::constant(Complex64::new(1.0, 0.0));
        for _ in 0..n.unsigned_abs() {
            out = out.mul(&base);
        }
        Ok(out)
    }

    /// Derivative with respect to the uniformizer, using
    /// `dX/dz = a^(1/2) Y` and `dY/dz = a^(1/2) (6X^2 - 2)`.
    pub fn derivative(&self, t: &SquareTorus) -> Self {
        let c = self.c * t.a().sqrt();
        let dr = self.r.derivative();
        if self.eps == 0 {
            EllipticFunction { c, r: dr, eps: 1 }
        } else {
            let cub = RationalFunction::polynomial(cubic());
            let dy = RationalFunction::polynomial(QPoly::from_ints(&[-2, 0, 6]));
            let r = dr.mul(&cub).add(&self.r.mul(&dy)).expect("sum of rational functions");
            EllipticFunction { c, r, eps: 0 }
        }
    }

    /// Numerical value at the uniformizer coordinate `z`.
    pub fn eval(&self, z: Complex64, t: &SquareTorus) -> Result<Complex64> {
        let (x, y) = t.xy(z)?;
        Ok(self.eval_xy(x, y))
    }

    /// Value from precomputed normalized coordinates (see [`SquareTorus::xy`]).
    pub fn eval_xy(&self, x: Complex64, y: Complex64) -> Complex64 {
        let v = self.c * self.r.eval(x);
        if self.eps == 1 {
            v * y
        } else {
            v
        }
    }

    /// Order at a torus point (positive for zeros).
    pub fn order_at(&self, p: &TorusPoint, t: &SquareTorus) -> i64 {
        let eps = self.eps as i64;
        match p {
            TorusPoint::Lattice => 2 * self.r.order_at(&ExactPoint::Infinity) - 3 * eps,
            TorusPoint::HalfPeriod(i) => 2 * self.r.order_at(&ExactPoint::Finite(e_exact(*i))) + eps,
            TorusPoint::Generic { x, .. } => {
                let xn = x / t.a();
                let num = self.r.num().to_poly();
                let den = self.r.den().to_poly();
                // multiplicity of the nearest root cluster, from the exact factors
                let mut ord = 0i64;
                for (f, m) in self.r.num().square_free() {
                    if f.to_poly().eval(xn).norm() <= 1e-8 * num.coeffs().iter().map(|c| c.norm()).sum::<f64>() {
                        ord += m as i64;
                    }
                }
                for (f, m) in self.r.den().square_free() {
                    if f.to_poly().eval(xn).norm() <= 1e-8 * den.coeffs().iter().map(|c| c.norm()).sum::<f64>() {
                        ord -= m as i64;
                    }
                }
                ord
            }
        }
    }

    /// Value at a torus point.
    pub fn value_at(&self, p: &TorusPoint, t: &SquareTorus) -> SpherePoint {
        let ord = self.order_at(p, t);
        if ord > 0 {
            return SpherePoint::Finite(Complex64::zero());
        }
        if ord < 0 {
            return SpherePoint::Infinity;
        }
        match p {
            TorusPoint::Lattice => self.denorm(&self.r.normalized_value(&ExactPoint::Infinity)),
            TorusPoint::HalfPeriod(i) => self.denorm(&self.r.normalized_value(&ExactPoint::Finite(e_exact(*i)))),
            TorusPoint::Generic { x, s } => {
                let xn = x / t.a();
                let mut v = self.c * self.r.eval(xn);
                if self.eps == 1 {
                    v *= branch_y(xn, *s);
                }
                SpherePoint::Finite(v)
            }
        }
    }

    fn denorm(&self, w: &ExactPoint) -> SpherePoint {
        match self.r.denormalize(w) {
            SpherePoint::Finite(v) => SpherePoint::Finite(self.c * v),
            inf => inf,
        }
    }

    /// Divisor of zeros and poles.
    pub fn divisor(&self, t: &SquareTorus) -> Result<Divisor<TorusPoint>> {
        if self.is_zero() {
            return Err(Error::ZeroFunction);
        }
        let mut d = Divisor::new();
        d.add(TorusPoint::Lattice, self.order_at(&TorusPoint::Lattice, t));
        for i in 1..=3 {
            d.add(TorusPoint::HalfPeriod(i), self.order_at(&TorusPoint::HalfPeriod(i), t));
        }
        for (poly, sign) in [(self.r.num(), 1i64), (self.r.den(), -1i64)] {
            for (x, m) in generic_roots(poly)? {
                for s in [1i8, -1] {
                    d.add(TorusPoint::Generic { x: x * t.a(), s }, sign * m as i64);
                }
            }
        }
        Ok(d)
    }

    /// Degree as a map to the sphere (total pole order).
    pub fn degree(&self, t: &SquareTorus) -> Result<usize> {
        Ok(self.divisor(t)?.pole_degree() as usize)
    }

    /// Ramification divisor: local multiplicity minus one at every point.
    pub fn ramification(&self, t: &SquareTorus) -> Result<Divisor<TorusPoint>> {
        if self.is_constant() {
            return Err(Error::ConstantMap);
        }
        let div = self.divisor(t)?;
        let mut out = Divisor::new();
        for (p, m) in div.entries() {
            out.add(*p, m.abs() - 1);
        }
        let ddiv = self.derivative(t).divisor(t)?;
        for (p, m) in ddiv.zeros() {
            if div.mult_at(p) == 0 {
                out.add(*p, *m);
            }
        }
        Ok(out)
    }

    /// Points where `f` branches, with local multiplicity and value.
    pub fn critical_points(&self, t: &SquareTorus) -> Result<Vec<(TorusPoint, usize, SpherePoint)>> {
        Ok(self
            .ramification(t)?
            .entries()
            .iter()
            .map(|(p, m)| (*p, *m as usize + 1, self.value_at(p, t)))
            .collect())
    }

    /// Exact `w` with `f(p) = c * w` at the lattice point or a half period,
    /// for functions without the `wp'` factor.
    pub fn normalized_value_at(&self, p: &TorusPoint) -> Option<ExactPoint> {
        if self.eps != 0 {
            return None;
        }
        match p {
            TorusPoint::Lattice => Some(self.r.normalized_value(&ExactPoint::Infinity)),
            TorusPoint::HalfPeriod(i) => Some(self.r.normalized_value(&ExactPoint::Finite(e_exact(*i)))),
            TorusPoint::Generic { .. } => None,
        }
    }

    /// Actual value for a normalized one.
    pub fn denormalize(&self, w: &ExactPoint) -> SpherePoint {
        self.denorm(w)
    }

    /// Exact fiber over a value of the form `c * w` with `w` exact. Only
    /// functions without the `wp'` factor admit this; zeros and poles of any
    /// function are available from [`EllipticFunction::divisor`].
    pub fn fiber_normalized(&self, w: &ExactPoint, t: &SquareTorus) -> Result<Vec<(TorusPoint, usize)>> {
        if self.eps != 0 {
            return Err(Error::Unsupported("exact fibers of odd elliptic functions over nonzero finite values".into()));
        }
        let fib = self.r.fiber_exact(w)?;
        let mut out = Vec::new();
        if fib.at_infinity > 0 {
            out.push((TorusPoint::Lattice, 2 * fib.at_infinity));
        }
        for (f, m) in &fib.factors {
            let mut rest = f.clone();
            for i in 1..=3u8 {
                let (q, k) = rest.deflate(&e_exact(i));
                if k > 0 {
                    out.push((TorusPoint::HalfPeriod(i), 2 * m));
                    rest = q;
                }
            }
            for (x, k) in locate_roots(&rest)? {
                for s in [1i8, -1] {
                    out.push((TorusPoint::Generic { x: x * t.a(), s }, m * k));
                }
            }
        }
        Ok(out)
    }
}

/// `s * sqrt(4X(X^2 - 1))` with the principal branch.
pub fn branch_y(x: Complex64, s: i8) -> Complex64 {
    let y = (4.0 * x * (x * x - 1.0)).sqrt();
    if s > 0 {
        y
    } else {
        -y
    }
}

/// Roots of an exact polynomial in `X` away from `X = 1, 0, -1`.
fn generic_roots(q: &QPoly) -> Result<Vec<(Complex64, usize)>> {
    if q.is_constant() {
        return Ok(Vec::new());
    }
    let mut rest = q.clone();
    for i in 1..=3u8 {
        rest = rest.deflate(&e_exact(i)).0;
    }
    locate_roots(&rest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// `g2 = 60 sum' w^-4` over `Z + iZ`, Richardson-extrapolated in the
    /// truncation size.
    fn lattice_sum_a() -> f64 {
        let g4 = |n: i64| {
            let mut s = 0.0;
            for m in -n..=n {
                for k in -n..=n {
                    if m == 0 && k == 0 {
                        continue;
                    }
                    s += c(m as f64, k as f64).powi(-4).re;
                }
            }
            s
        };
        let (s1, s2) = (g4(200), g4(400));
        let g = (4.0 * s2 - s1) / 3.0;
        (60.0 * g).sqrt() / 2.0
    }

    #[test]
    fn theta_value_matches_lattice_sum() {
        let a = lemniscatic_a();
        let oracle = lattice_sum_a();
        assert!((a - oracle).abs() < 1e-7 * a, "{a} vs {oracle}");
    }

    #[test]
    fn half_period_values() {
        let t = SquareTorus::standard();
        let a = t.a();
        let (p1, d1) = t.wp(t.half_period(1)).unwrap();
        let (p2, _) = t.wp(t.half_period(2)).unwrap();
        let (p3, _) = t.wp(t.half_period(3)).unwrap();
        assert!((p1 - a).norm() < 1e-12 * a);
        assert!(p2.norm() < 1e-10 * a);
        assert!((p3 + a).norm() < 1e-12 * a);
        assert!(d1.norm() < 1e-8 * a.powf(1.5));
    }

    #[test]
    fn laurent_leading_term() {
        let t = SquareTorus::standard();
        let z = c(1e-3, 0.0);
        let (p, _) = t.wp(z).unwrap();
        assert!((z * z * p - 1.0).norm() < 1e-6);
        assert!(t.wp(c(0.0, 0.0)).is_err());
        assert!(t.wp(c(1.0, 1.0)).is_err());
    }

    #[test]
    fn periodicity_and_curve_equation() {
        for t in [SquareTorus::standard(), SquareTorus::with_a(1.0).unwrap()] {
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            for _ in 0..50 {
                let z = c(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)) * t.omega1();
                let (p, dp) = t.wp(z).unwrap();
                let (q, _) = t.wp(z + t.omega1()).unwrap();
                let (r, _) = t.wp(z + t.omega2()).unwrap();
                assert!((p - q).norm() < 1e-9 * p.norm());
                assert!((p - r).norm() < 1e-9 * p.norm());
                let lhs = dp * dp;
                let rhs = 4.0 * p * p * p - t.g2() * p;
                assert!((lhs - rhs).norm() < 1e-8 * lhs.norm().max(rhs.norm()));
            }
        }
    }

    #[test]
    fn wp_derivative_matches_finite_difference() {
        let t = SquareTorus::standard();
        let z = c(0.31, 0.17);
        let h = 1e-5;
        let (_, dp) = t.wp(z).unwrap();
        let fd = (t.wp(z + h).unwrap().0 - t.wp(z - h).unwrap().0) / (2.0 * h);
        assert!((fd - dp).norm() < 1e-6 * dp.norm());
    }

    #[test]
    fn with_a_scales_lattice() {
        let t = SquareTorus::with_a(2.0).unwrap();
        let (p, _) = t.wp(t.half_period(1)).unwrap();
        assert!((p.re - 2.0).abs() < 1e-12);
    }

    #[test]
    fn divisor_examples() {
        let t = SquareTorus::standard();
        let wp = EllipticFunction::wp(&t).divisor(&t).unwrap();
        assert_eq!(wp.mult_at(&TorusPoint::HalfPeriod(2)), 2);
        assert_eq!(wp.mult_at(&TorusPoint::Lattice), -2);
        assert_eq!(wp.entries().len(), 2);

        let dwp = EllipticFunction::wp_prime(&t).divisor(&t).unwrap();
        for i in 1..=3 {
            assert_eq!(dwp.mult_at(&TorusPoint::HalfPeriod(i)), 1);
        }
        assert_eq!(dwp.mult_at(&TorusPoint::Lattice), -3);

        let g = EllipticFunction::costa_gauss(&t, 1, c(1.0, 0.0)).unwrap().divisor(&t).unwrap();
        assert_eq!(g.mult_at(&TorusPoint::Lattice), 5);
        assert_eq!(g.mult_at(&TorusPoint::HalfPeriod(2)), -3);
        assert_eq!(g.mult_at(&TorusPoint::HalfPeriod(1)), -1);
        assert_eq!(g.mult_at(&TorusPoint::HalfPeriod(3)), -1);
        assert_eq!(g.degree(), 0);
    }

    #[test]
    fn generic_points_come_in_pairs() {
        // wp - a/2 vanishes at two generic points
        let t = SquareTorus::standard();
        let f = EllipticFunction::new(
            c(t.a(), 0.0),
            RationalFunction::new(c(1.0, 0.0), QPoly::new(vec![crate::exact::gr_ratio((-1, 2), (0, 1)), gr_int(1, 0)]), QPoly::one())
                .unwrap(),
            0,
        )
        .unwrap();
        let d = f.divisor(&t).unwrap();
        assert_eq!(d.degree(), 0);
        assert_eq!(d.zeros().count(), 2);
        for (p, _) in d.zeros() {
            let TorusPoint::Generic { x, .. } = p else { panic!("expected generic zero") };
            assert!((x - t.a() / 2.0).norm() < 1e-12 * t.a());
        }
    }

    #[test]
    fn costa_degrees() {
        let t = SquareTorus::standard();
        for j in 1..=6u32 {
            let g = EllipticFunction::costa_gauss(&t, j, c(0.7, 0.2)).unwrap();
            assert_eq!(g.degree(&t).unwrap(), 2 * j as usize + 3);
        }
        assert_eq!(EllipticFunction::wp(&t).degree(&t).unwrap(), 2);
    }

    #[test]
    fn derivative_examples() {
        let t = SquareTorus::standard();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let z = c(rng.gen_range(0.05..0.45), rng.gen_range(0.05..0.45));
        let (p, dp) = t.wp(z).unwrap();
        let d1 = EllipticFunction::wp(&t).derivative(&t);
        assert_eq!(d1.eps(), 1);
        assert!((d1.eval(z, &t).unwrap() - dp).norm() < 1e-10 * dp.norm());
        let d2 = EllipticFunction::wp_pow(&t, 2).derivative(&t);
        assert!((d2.eval(z, &t).unwrap() - 2.0 * p * dp).norm() < 1e-10 * (p * dp).norm());
        let d3 = EllipticFunction::wp_prime(&t).derivative(&t);
        let want = 6.0 * p * p - t.g2() / 2.0;
        assert!((d3.eval(z, &t).unwrap() - want).norm() < 1e-10 * want.norm());
    }

    fn members(t: &SquareTorus) -> Vec<EllipticFunction> {
        let s = c(0.8, -0.3);
        let wp = EllipticFunction::wp(t);
        let dwp = EllipticFunction::wp_prime(t);
        let half = EllipticFunction::new(
            c(1.0, 0.0),
            RationalFunction::from_ints(&[1, 0, 3], &[-2, 1]),
            1,
        )
        .unwrap();
        vec![
            wp.clone(),
            dwp.clone(),
            wp.powi(2).unwrap(),
            wp.mul(&dwp),
            wp.inverse().unwrap(),
            EllipticFunction::costa_gauss(t, 1, s).unwrap(),
            EllipticFunction::costa_gauss(t, 2, s).unwrap(),
            EllipticFunction::costa_gauss(t, 0, s).unwrap(),
            half.clone(),
            half.mul(&wp).inverse().unwrap(),
        ]
    }

    #[test]
    fn ramification_is_twice_degree() {
        let t = SquareTorus::standard();
        for f in members(&t) {
            let d = f.degree(&t).unwrap() as i64;
            assert_eq!(f.ramification(&t).unwrap().degree(), 2 * d, "{f:?}");
            assert_eq!(f.divisor(&t).unwrap().degree(), 0);
        }
        let wp = EllipticFunction::wp(&t).ramification(&t).unwrap();
        assert_eq!(wp.entries().len(), 4);
        assert!(wp.entries().iter().all(|(_, m)| *m == 1));
        let g = EllipticFunction::costa_gauss(&t, 1, c(1.0, 0.0)).unwrap();
        assert_eq!(g.ramification(&t).unwrap().degree(), 10);
        assert_eq!(EllipticFunction::wp_prime(&t).ramification(&t).unwrap().degree(), 6);
    }

    #[test]
    fn derivative_commutes_with_finite_differences() {
        let t = SquareTorus::standard();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for f in members(&t) {
            let df = f.derivative(&t);
            for _ in 0..5 {
                let z = c(rng.gen_range(0.05..0.45), rng.gen_range(0.05..0.45));
                let h = 1e-5;
                let fd = (f.eval(z + h, &t).unwrap() - f.eval(z - h, &t).unwrap()) / (2.0 * h);
                let exact = df.eval(z, &t).unwrap();
                assert!((fd - exact).norm() < 1e-6 * exact.norm().max(1.0), "{f:?} at {z}");
            }
        }
    }

    #[test]
    fn generic_values_follow_branch_convention() {
        let t = SquareTorus::standard();
        let f = EllipticFunction::wp_prime(&t);
        let z = c(0.2, 0.1);
        let (p, dp) = t.wp(z).unwrap();
        let v_plus = f.value_at(&TorusPoint::Generic { x: p, s: 1 }, &t).as_finite().unwrap();
        let v_minus = f.value_at(&TorusPoint::Generic { x: p, s: -1 }, &t).as_finite().unwrap();
        assert!((v_plus - dp).norm() < 1e-9 * dp.norm() || (v_minus - dp).norm() < 1e-9 * dp.norm());
    }

    #[test]
    fn exact_fiber_of_even_function() {
        let t = SquareTorus::standard();
        let wp = EllipticFunction::wp(&t);
        // wp = a is hit only at the half period over e1, doubly
        let fib = wp.fiber_normalized(&ExactPoint::Finite(gr_int(1, 0)), &t).unwrap();
        assert_eq!(fib, vec![(TorusPoint::HalfPeriod(1), 2)]);
        let fib = wp.fiber_normalized(&ExactPoint::Finite(gr_int(2, 0)), &t).unwrap();
        assert_eq!(fib.len(), 2);
        assert_eq!(fib.iter().map(|(_, m)| m).sum::<usize>(), 2);
    }
}
