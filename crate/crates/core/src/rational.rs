//! Rational functions on the Riemann sphere.
//!
//! A function is stored as `scale * num / den` with `num`, `den` exact
//! Gaussian-rational polynomials, `den` monic and coprime to `num`. The
//! floating point `scale` carries irrational constants (such as the `sigma`
//! of a Gauss map) without spoiling exact divisor computations. Behaviour at
//! infinity is always obtained from the chart `w = 1/z`.

use std::fmt;

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::divisor::Divisor;
use crate::error::{Error, Result};
use crate::exact::{gr_from_c64, gr_int, gr_to_c64, ExactPoint, GaussRat, QPoly};
use crate::poly::{poly_roots, simple_roots, Poly};
use crate::sphere::{SpherePoint, EPS_PT};

#[derive(Clone)]
pub struct RationalFunction {
    scale: Complex64,
    num: QPoly,
    den: QPoly,
    num_f: Poly,
    den_f: Poly,
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) * {:?} / {:?}", self.scale, self.num_f.coeffs(), self.den_f.coeffs())
    }
}

/// Exact fiber of a rational function over a value given in normalized
/// coordinates (see [`RationalFunction::normalized_value`]).
#[derive(Clone, Debug)]
pub struct ExactFiber {
    /// Square-free factors of the finite part with their multiplicity.
    pub factors: Vec<(QPoly, usize)>,
    /// Multiplicity of the preimage at infinity (0 if infinity is not one).
    pub at_infinity: usize,
}

impl ExactFiber {
    /// The fiber polynomial `prod f_i^{m_i}` (monic).
    pub fn finite_poly(&self) -> QPoly {
        self.factors.iter().fold(QPoly::one(), |acc, (f, m)| acc.mul(&f.pow(*m)))
    }

    /// Numerically located preimages with exact multiplicities.
    pub fn points(&self) -> Result<Vec<(SpherePoint, usize)>> {
        let mut out = Vec::new();
        for (f, m) in &self.factors {
            for z in simple_roots(&f.to_poly())? {
                out.push((SpherePoint::Finite(z), *m));
            }
        }
        if self.at_infinity > 0 {
            out.push((SpherePoint::Infinity, self.at_infinity));
        }
        Ok(out)
    }

    pub fn total(&self) -> usize {
        self.factors.iter().map(|(f, m)| f.deg() * m).sum::<usize>() + self.at_infinity
    }
}

/// Roots of an exact polynomial, located numerically, with exact
/// multiplicities from the square-free decomposition.
pub fn locate_roots(q: &QPoly) -> Result<Vec<(Complex64, usize)>> {
    let mut out = Vec::new();
    for (f, m) in q.square_free() {
        for z in simple_roots(&f.to_poly())? {
            out.push((z, m));
        }
    }
    Ok(out)
}

impl RationalFunction {
    pub fn new(scale: Complex64, num: QPoly, den: QPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidData("zero denominator".into()));
        }
        if !(scale.re.is_finite() && scale.im.is_finite()) {
            return Err(Error::InvalidData(format!("non-finite scale {scale}")));
        }
        let (num, den) = if num.is_zero() || scale == Complex64::new(0.0, 0.0) {
            (QPoly::zero(), QPoly::one())
        } else {
            let g = num.gcd(&den);
            let num = num.exact_div(&g);
            let den = den.exact_div(&g);
            let lead_inv = GaussRat::one() / den.lead().unwrap();
            (num.scale(&lead_inv), den.scale(&lead_inv))
        };
        let num_f = num.to_poly();
        let den_f = den.to_poly();
        Ok(RationalFunction { scale, num, den, num_f, den_f })
    }

    /// Exact lift of floating point coefficients (ascending degree).
    pub fn from_coeffs(num: &[Complex64], den: &[Complex64]) -> Result<Self> {
        Self::new(Complex64::new(1.0, 0.0), QPoly::from_c64(num)?, QPoly::from_c64(den)?)
    }

    pub fn from_ints(num: &[i64], den: &[i64]) -> Self {
        Self::new(Complex64::new(1.0, 0.0), QPoly::from_ints(num), QPoly::from_ints(den))
            .expect("nonzero denominator")
    }

    pub fn polynomial(num: QPoly) -> Self {
        Self::new(Complex64::new(1.0, 0.0), num, QPoly::one()).expect("nonzero denominator")
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(c, QPoly::one(), QPoly::one()).expect("nonzero denominator")
    }

    /// The identity `z`.
    pub fn identity() -> Self {
        Self::polynomial(QPoly::monomial(1))
    }

    pub fn scale(&self) -> Complex64 {
        self.scale
    }

    pub fn num(&self) -> &QPoly {
        &self.num
    }

    pub fn den(&self) -> &QPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Degree as a map of the sphere.
    pub fn degree(&self) -> usize {
        if self.is_zero() {
            0
        } else {
            self.num.deg().max(self.den.deg())
        }
    }

    pub fn is_constant(&self) -> bool {
        self.degree() == 0
    }

    pub fn with_scale(&self, scale: Complex64) -> Self {
        Self::new(scale, self.num.clone(), self.den.clone()).expect("valid function")
    }

    pub fn scaled_by(&self, c: Complex64) -> Self {
        self.with_scale(self.scale * c)
    }

    /// Value at a finite point as a complex number; infinite at poles.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.scale * self.num_f.eval(z) / self.den_f.eval(z)
    }

    /// Value at a point of the sphere.
    pub fn eval_sphere(&self, p: &SpherePoint) -> SpherePoint {
        match p {
            SpherePoint::Finite(z) => {
                let d = self.den_f.eval(*z);
                let n = self.scale * self.num_f.eval(*z);
                if d == Complex64::new(0.0, 0.0) && n != Complex64::new(0.0, 0.0) {
                    SpherePoint::Infinity
                } else {
                    SpherePoint::Finite(n / d)
                }
            }
            SpherePoint::Infinity => self.at_infinity_chart().eval_sphere(&SpherePoint::finite(0.0, 0.0)),
        }
    }

    /// Numeric derivative value `f'(z)`.
    pub fn eval_derivative(&self, z: Complex64) -> Complex64 {
        let (n, dn) = self.num_f.eval_d(z);
        let (d, dd) = self.den_f.eval_d(z);
        self.scale * (dn * d - n * dd) / (d * d)
    }

    /// `f(1/w)` as a rational function of `w`.
    pub fn at_infinity_chart(&self) -> RationalFunction {
        let n = self.degree().max(self.num.deg()).max(self.den.deg());
        Self::new(self.scale, self.num.reversed(n), self.den.reversed(n)).expect("reversal keeps denominator nonzero")
    }

    pub fn derivative(&self) -> RationalFunction {
        let num = self.num.derivative().mul(&self.den).sub(&self.num.mul(&self.den.derivative()));
        Self::new(self.scale, num, self.den.mul(&self.den)).expect("nonzero denominator")
    }

    /// Exact value of `num / den` at an exact point, so that `f(p) = scale * value`.
    pub fn normalized_value(&self, p: &ExactPoint) -> ExactPoint {
        match p {
            ExactPoint::Finite(z) => {
                let d = self.den.eval(z);
                if d.is_zero() {
                    ExactPoint::Infinity
                } else {
                    ExactPoint::Finite(self.num.eval(z) / d)
                }
            }
            ExactPoint::Infinity => {
                let (dn, dd) = (self.num.deg(), self.den.deg());
                if self.is_zero() || dn < dd {
                    ExactPoint::Finite(GaussRat::zero())
                } else if dn > dd {
                    ExactPoint::Infinity
                } else {
                    ExactPoint::Finite(self.num.lead().unwrap() / self.den.lead().unwrap())
                }
            }
        }
    }

    /// Converts a normalized value back to an actual value of `f`.
    pub fn denormalize(&self, w: &ExactPoint) -> SpherePoint {
        match w {
            ExactPoint::Infinity => SpherePoint::Infinity,
            ExactPoint::Finite(v) => SpherePoint::Finite(self.scale * gr_to_c64(v)),
        }
    }

    /// Order of `f` at an exact point (positive for zeros, negative for poles).
    pub fn order_at(&self, p: &ExactPoint) -> i64 {
        match p {
            ExactPoint::Finite(z) => self.num.order_at(z) as i64 - self.den.order_at(z) as i64,
            ExactPoint::Infinity => self.den.deg() as i64 - self.num.deg() as i64,
        }
    }

    /// Exact fiber polynomial over a normalized value.
    pub fn fiber_exact(&self, w: &ExactPoint) -> Result<ExactFiber> {
        if self.is_constant() {
            return Err(Error::ConstantMap);
        }
        let d = self.degree();
        let p = match w {
            ExactPoint::Infinity => self.den.clone(),
            ExactPoint::Finite(v) => self.num.sub(&self.den.scale(v)),
        };
        let factors = p.square_free();
        let finite: usize = factors.iter().map(|(f, m)| f.deg() * m).sum();
        Ok(ExactFiber { factors, at_infinity: d - finite })
    }

    /// Preimages of `b` with multiplicities, computed numerically. A degree
    /// drop of the fiber polynomial is reported as a preimage at infinity.
    pub fn fiber(&self, b: &SpherePoint) -> Result<Vec<(SpherePoint, usize)>> {
        if self.is_constant() {
            return Err(Error::ConstantMap);
        }
        let d = self.degree();
        let p = match b {
            SpherePoint::Infinity => self.den_f.clone(),
            SpherePoint::Finite(v) => {
                let w = v / self.scale;
                let n = self.num_f.coeffs();
                let dn = self.den_f.coeffs();
                let len = n.len().max(dn.len());
                let zero = Complex64::new(0.0, 0.0);
                let mut c: Vec<Complex64> = (0..len)
                    .map(|k| n.get(k).copied().unwrap_or(zero) - w * dn.get(k).copied().unwrap_or(zero))
                    .collect();
                // cancelled leading terms mean a preimage at infinity
                while let Some(last) = c.last() {
                    let k = c.len() - 1;
                    let mag = n.get(k).map_or(0.0, |x| x.norm()) + w.norm() * dn.get(k).map_or(0.0, |x| x.norm());
                    if last.norm() <= 1e-12 * mag {
                        c.pop();
                    } else {
                        break;
                    }
                }
                Poly::new(c)
            }
        };
        let finite = p.degree().unwrap_or(0);
        let mut out = if finite > 0 { poly_roots(&p)? } else { Vec::new() };
        if d > finite {
            out.push((SpherePoint::Infinity, d - finite));
        }
        Ok(out)
    }

    /// Divisor of zeros and poles on the whole sphere.
    pub fn zeros_poles(&self) -> Result<Divisor<SpherePoint>> {
        if self.is_zero() {
            return Err(Error::ZeroFunction);
        }
        let mut div = Divisor::new();
        for (z, m) in locate_roots(&self.num)? {
            div.add(SpherePoint::Finite(z), m as i64);
        }
        for (z, m) in locate_roots(&self.den)? {
            div.add(SpherePoint::Finite(z), -(m as i64));
        }
        div.add(SpherePoint::Infinity, self.den.deg() as i64 - self.num.deg() as i64);
        Ok(div)
    }

    /// The Wronskian `num' den - num den'`; its roots are the finite
    /// ramification points with order `e - 1`.
    pub fn wronskian(&self) -> QPoly {
        self.num.derivative().mul(&self.den).sub(&self.num.mul(&self.den.derivative()))
    }

    /// Ramification order `e - 1` at infinity, read off in the chart `w = 1/z`.
    pub fn ramification_at_infinity(&self) -> usize {
        let chart = self.at_infinity_chart();
        chart.wronskian().order_at(&GaussRat::zero())
    }

    /// Divisor of `e_p - 1` over all branch points.
    pub fn ramification_divisor(&self) -> Result<Divisor<SpherePoint>> {
        if self.is_constant() {
            return Err(Error::ConstantMap);
        }
        let mut div = Divisor::new();
        for (z, m) in locate_roots(&self.wronskian())? {
            div.add(SpherePoint::Finite(z), m as i64);
        }
        div.add(SpherePoint::Infinity, self.ramification_at_infinity() as i64);
        Ok(div)
    }

    /// Finite poles with their orders.
    pub fn finite_poles(&self) -> Result<Vec<(Complex64, usize)>> {
        locate_roots(&self.den)
    }

    /// Residue of the differential `f(z) dz` at `p`.
    pub fn residue(&self, p: &SpherePoint) -> Result<Complex64> {
        match p {
            SpherePoint::Infinity => {
                // f(z) dz = -f(1/w) w^-2 dw
                let chart = self.at_infinity_chart();
                let g = chart.mul(&RationalFunction::new(
                    Complex64::new(-1.0, 0.0),
                    QPoly::one(),
                    QPoly::monomial(2),
                )?);
                g.residue(&SpherePoint::finite(0.0, 0.0))
            }
            SpherePoint::Finite(z0) => {
                let pole = self
                    .finite_poles()?
                    .into_iter()
                    .filter(|(z, _)| SpherePoint::Finite(*z).approx_eq(p, EPS_PT))
                    .max_by_key(|(_, m)| *m);
                let Some((z, m)) = pole else {
                    return Ok(Complex64::new(0.0, 0.0));
                };
                // exact poles at exactly representable points avoid deflation error
                let center = match gr_from_c64(*z0) {
                    Ok(e) if self.den.order_at(&e) == m => *z0,
                    _ => z,
                };
                let mut e = self.den_f.clone();
                for _ in 0..m {
                    e = e.deflate(center);
                }
                let ns = self.num_f.taylor_shift(center);
                let es = e.taylor_shift(center);
                let zero = Complex64::new(0.0, 0.0);
                let mut q = Vec::with_capacity(m);
                for k in 0..m {
                    let mut acc = ns.get(k).copied().unwrap_or(zero);
                    for j in 1..=k {
                        acc -= es.get(j).copied().unwrap_or(zero) * q[k - j];
                    }
                    q.push(acc / es[0]);
                }
                Ok(self.scale * q[m - 1])
            }
        }
    }

    pub fn mul(&self, other: &RationalFunction) -> RationalFunction {
        Self::new(self.scale * other.scale, self.num.mul(&other.num), self.den.mul(&other.den))
            .expect("nonzero denominator")
    }

    pub fn inverse(&self) -> Result<RationalFunction> {
        if self.is_zero() {
            return Err(Error::ZeroFunction);
        }
        Self::new(self.scale.inv(), self.den.clone(), self.num.clone())
    }

    /// Sum; both scales are folded exactly into the coefficients.
    pub fn add(&self, other: &RationalFunction) -> Result<RationalFunction> {
        let s1 = gr_from_c64(self.scale)?;
        let s2 = gr_from_c64(other.scale)?;
        let num = self.num.mul(&other.den).scale(&s1).add(&other.num.mul(&self.den).scale(&s2));
        Self::new(Complex64::new(1.0, 0.0), num, self.den.mul(&other.den))
    }

    pub fn sub(&self, other: &RationalFunction) -> Result<RationalFunction> {
        self.add(&other.scaled_by(Complex64::new(-1.0, 0.0)))
    }

    /// Exact equality of the represented functions.
    pub fn same_function(&self, other: &RationalFunction) -> Result<bool> {
        Ok(self.sub(other)?.is_zero())
    }

    /// `f^n` for `n >= 0`.
    pub fn powi(&self, n: u32) -> RationalFunction {
        let mut acc = RationalFunction::constant(Complex64::new(1.0, 0.0));
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn monomial(c: Complex64, n: usize) -> RationalFunction {
        Self::new(c, QPoly::monomial(n), QPoly::one()).expect("nonzero denominator")
    }

    /// Integer polynomial shortcut used by constructors: `c * prod (z - r)^m`.
    pub fn from_root_data(c: Complex64, zeros: &[(GaussRat, usize)], poles: &[(GaussRat, usize)]) -> Result<Self> {
        let num = zeros.iter().fold(QPoly::one(), |acc, (r, m)| acc.mul(&QPoly::linear(r).pow(*m)));
        let den = poles.iter().fold(QPoly::one(), |acc, (r, m)| acc.mul(&QPoly::linear(r).pow(*m)));
        Self::new(c, num, den)
    }
}

/// Helper for tests and constructors: `i`.
pub fn gi() -> GaussRat {
    gr_int(0, 1)
}
