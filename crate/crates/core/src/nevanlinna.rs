//! Area identities for fundamental domains and the characteristic function
//! of the Gauss map of Voss' surface with three ends, lifted to the disk by
//! the modular lambda function.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use num_complex::Complex64;
use num_rational::Rational64;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{inv_ratio, ser_rat};
use crate::error::{Error, Result};
use crate::quad::{integrate, QuadOptions};
use crate::sphere::{SpherePoint, EPS_PT};
use crate::surface::WeierstrassSurface;

/// `G - 1 + k/2`, the hyperbolic area of a fundamental domain for the metric
/// of curvature `-4 pi`, and whether `M` is of hyperbolic type.
pub fn hyperbolic_area(genus: i64, k: usize) -> (Rational64, bool) {
    let a = Rational64::new(2 * genus - 2 + k as i64, 2);
    (a, 2 - 2 * genus - (k as i64) < 0)
}

#[derive(Clone, Debug, Serialize)]
pub struct AreaReport {
    #[serde(rename = "A_hyp", serialize_with = "ser_rat")]
    pub a_hyp: Rational64,
    #[serde(rename = "A_FS", serialize_with = "ser_rat")]
    pub a_fs: Rational64,
    pub ratio: Option<String>,
    pub hyperbolic: bool,
}

impl AreaReport {
    pub fn ratio_value(&self) -> Option<Rational64> {
        (self.a_hyp != Rational64::from_integer(0)).then(|| self.a_fs / self.a_hyp)
    }
}

/// `A_FS = R A_hyp` with `A_FS = d`.
pub fn area_ratio_check(s: &WeierstrassSurface) -> Result<AreaReport> {
    let d = s.degree()?;
    let (a_hyp, hyperbolic) = hyperbolic_area(s.genus(), s.k());
    if !hyperbolic {
        return Err(Error::Domain(format!("M is not of hyperbolic type (G = {}, k = {})", s.genus(), s.k())));
    }
    let a_fs = Rational64::from_integer(d as i64);
    let r = inv_ratio(s.genus(), s.k(), d).recip();
    if a_fs != r * a_hyp {
        return Err(Error::IdentityFailed { identity: "area ratio", detail: format!("A_FS = {a_fs}, R A_hyp = {}", r * a_hyp) });
    }
    let ratio = a_fs / a_hyp;
    Ok(AreaReport { a_hyp, a_fs, ratio: Some(crate::analysis::fmt_rat(&ratio)), hyperbolic })
}

/// Theta constants `(theta_2, theta_3, theta_4)` at `q = exp(i pi tau)`.
fn thetas(tau: Complex64) -> (Complex64, Complex64, Complex64) {
    let i = Complex64::new(0.0, 1.0);
    let q4 = (i * PI * tau / 4.0).exp();
    let (mut t2, mut t3, mut t4) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
    for n in 0..40i32 {
        // q^(n(n+1)) and q^(n^2)
        let a = (i * PI * tau * (n * (n + 1)) as f64).exp();
        t2 += a;
        if n >= 1 {
            let b = (i * PI * tau * (n * n) as f64).exp();
            t3 += 2.0 * b;
            t4 += if n % 2 == 0 { 2.0 * b } else { -2.0 * b };
            if b.norm() < 1e-18 && a.norm() < 1e-18 {
                break;
            }
        }
    }
    (2.0 * q4 * t2, t3, t4)
}

/// `lambda(tau)` and `lambda'(tau)`.
pub fn modular_lambda_d(tau: Complex64) -> Result<(Complex64, Complex64)> {
    if !(tau.im > 0.0) || !tau.re.is_finite() {
        return Err(Error::Domain(format!("modular lambda needs Im tau > 0, got {tau}")));
    }
    // reduce to |Re| <= 1/2, |tau| >= 1; ops recorded outermost first
    enum Op {
        Shift(i64),
        Invert,
    }
    let mut ops = Vec::new();
    let mut t = tau;
    // d tau0 / d tau accumulated along the way
    let mut dt = Complex64::new(1.0, 0.0);
    for _ in 0..200 {
        let n = t.re.round();
        if n != 0.0 {
            t -= n;
            ops.push(Op::Shift(n as i64));
        }
        if t.norm_sqr() < 1.0 - 1e-15 {
            dt *= 1.0 / (t * t);
            t = -1.0 / t;
            ops.push(Op::Invert);
        } else {
            break;
        }
    }
    let (t2, t3, t4) = thetas(t);
    let mut lam = (t2 / t3).powi(4);
    let mut dlam = Complex64::new(0.0, PI) * lam * t4.powi(4) * dt;
    for op in ops.iter().rev() {
        match op {
            Op::Shift(n) => {
                if n % 2 != 0 {
                    let den = lam - 1.0;
                    dlam *= -1.0 / (den * den);
                    lam /= den;
                }
            }
            Op::Invert => {
                lam = 1.0 - lam;
                dlam = -dlam;
            }
        }
    }
    Ok((lam, dlam))
}

pub fn modular_lambda(tau: Complex64) -> Result<Complex64> {
    Ok(modular_lambda_d(tau)?.0)
}

/// `int_{|z| < r} rho(z) log(r / |z|) dA`, which equals
/// `int_0^r dt/t int_{|z| < t} rho dA`.
pub fn characteristic_integral(rho: &(impl Fn(Complex64) -> f64 + Sync), r: f64) -> (f64, f64, bool) {
    let opts = QuadOptions { abs_tol: 1e-12, rel_tol: 1e-10, max_intervals: 1000 };
    let inner = |s: f64| {
        let q = integrate(|t: f64| rho(Complex64::from_polar(s, t)), 0.0, TAU, opts);
        (q.value, q.error, q.converged)
    };
    let mut ok = true;
    let mut err = 0.0;
    let outer = integrate(
        |s: f64| {
            if s == 0.0 {
                return 0.0;
            }
            let (v, e, c) = inner(s);
            ok &= c;
            err += e * s * (r / s).ln();
            v * s * (r / s).ln()
        },
        0.0,
        r,
        opts,
    );
    (outer.value, outer.error + err, ok && outer.converged && outer.value.is_finite())
}

/// Density of the hyperbolic metric of curvature `-4 pi` on the unit disk.
pub fn hyperbolic_density(z: Complex64) -> f64 {
    1.0 / (PI * (1.0 - z.norm_sqr()).powi(2))
}

/// Density of the Fubini-Study metric of total area 1 at `w`.
pub fn fubini_study_density(w: SpherePoint, dw: Complex64) -> f64 {
    match w {
        SpherePoint::Finite(w) => dw.norm_sqr() / (PI * (1.0 + w.norm_sqr()).powi(2)),
        SpherePoint::Infinity => 0.0,
    }
}

/// The universal covering map of the sphere minus `a` (three points) by the
/// unit disk, with `0` sent to the image of `tau = i`.
pub struct ThricePuncturedCover {
    /// Mobius map `[[p, q], [r, s]]` sending `0, 1, inf` to the punctures.
    m: [Complex64; 4],
}

impl ThricePuncturedCover {
    pub fn new(a: [SpherePoint; 3]) -> Result<Self> {
        for i in 0..3 {
            for j in i + 1..3 {
                if a[i].approx_eq(&a[j], EPS_PT) {
                    return Err(Error::Parameter("punctures must be distinct".into()));
                }
            }
        }
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        // w = (p z + q) / (r z + s) with w(0) = a0, w(1) = a1, w(inf) = a2
        let m = match (a[0], a[1], a[2]) {
            (SpherePoint::Finite(a0), SpherePoint::Finite(a1), SpherePoint::Finite(a2)) => {
                // w = (a2 (a1 - a0) z + a0 (a2 - a1)) / ((a1 - a0) z + (a2 - a1))
                [a2 * (a1 - a0), a0 * (a2 - a1), a1 - a0, a2 - a1]
            }
            (SpherePoint::Finite(a0), SpherePoint::Finite(a1), SpherePoint::Infinity) => [a1 - a0, a0, zero, one],
            (SpherePoint::Finite(a0), SpherePoint::Infinity, SpherePoint::Finite(a2)) => [a2, -a0, one, -one],
            (SpherePoint::Infinity, SpherePoint::Finite(a1), SpherePoint::Finite(a2)) => [a2, a1 - a2, one, zero],
            _ => unreachable!("distinct points"),
        };
        Ok(ThricePuncturedCover { m })
    }

    /// Value and derivative of the covering map at `zeta` in the disk.
    pub fn eval(&self, zeta: Complex64) -> Result<(SpherePoint, Complex64)> {
        let i = Complex64::new(0.0, 1.0);
        let one = Complex64::new(1.0, 0.0);
        let tau = i * (one + zeta) / (one - zeta);
        let dtau = 2.0 * i / ((one - zeta) * (one - zeta));
        let (lam, dlam) = modular_lambda_d(tau)?;
        let [p, q, r, s] = self.m;
        let den = r * lam + s;
        if den.norm() == 0.0 {
            return Ok((SpherePoint::Infinity, Complex64::new(0.0, 0.0)));
        }
        let w = (p * lam + q) / den;
        let dw = (p * s - q * r) / (den * den) * dlam * dtau;
        Ok((SpherePoint::Finite(w), dw))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CharacteristicSample {
    pub r: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub bound: f64,
    /// `max(0, bound - T)`.
    pub slack: f64,
    pub error: f64,
    pub reliable: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CharacteristicSamples {
    pub samples: Vec<CharacteristicSample>,
    pub monotone: bool,
    /// Largest additive slack over the sampled radii.
    pub c_slack: f64,
    /// Slope of `T(r)` against `(1/2) log 1/(1-r)` (least squares with
    /// intercept; through the origin for a single sample).
    pub eta: f64,
}

impl CharacteristicSamples {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("r,T,bound,slack,eta\n");
        for x in &self.samples {
            let _ = writeln!(s, "{},{:.12},{:.12},{:.12},{:.6}", x.r, x.t, x.bound, x.slack, self.eta);
        }
        s
    }
}

/// Lower bound of the characteristic function when `g` omits 3 or 4 values
/// and branches only at the punctures.
pub fn characteristic_bound(d_g: usize, r: f64) -> Option<f64> {
    match d_g {
        3 => Some((1.0 / (1.0 - r)).ln()),
        4 => Some(0.5 * (1.0 / (1.0 - r)).ln()),
        _ => None,
    }
}

fn fit_eta(samples: &[CharacteristicSample]) -> f64 {
    let xs: Vec<f64> = samples.iter().map(|s| 0.5 * (1.0 / (1.0 - s.r)).ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.t).collect();
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return ys.first().zip(xs.first()).map_or(f64::NAN, |(y, x)| y / x);
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// `T_g(r)` for `g = z` on the sphere minus three points, via the lambda
/// covering of the disk.
pub fn t_characteristic_voss(punctures: [SpherePoint; 3], radii: &[f64]) -> Result<CharacteristicSamples> {
    if radii.iter().any(|r| !(*r > 0.0 && *r < 1.0)) {
        return Err(Error::Parameter("radii must lie in (0, 1)".into()));
    }
    let cover = ThricePuncturedCover::new(punctures)?;
    let rho = |z: Complex64| match cover.eval(z) {
        Ok((w, dw)) => fubini_study_density(w, dw),
        Err(_) => f64::NAN,
    };
    let mut samples: Vec<CharacteristicSample> = radii
        .par_iter()
        .map(|&r| {
            let (t, error, ok) = characteristic_integral(&rho, r);
            let bound = characteristic_bound(3, r).expect("three omitted values");
            CharacteristicSample { r, t, bound, slack: (bound - t).max(0.0), error, reliable: ok }
        })
        .collect();
    samples.sort_by(|a, b| a.r.total_cmp(&b.r));
    let monotone = samples.windows(2).all(|w| w[1].t >= w[0].t - w[0].error - w[1].error);
    let c_slack = samples.iter().map(|s| s.slack).fold(0.0, f64::max);
    let eta = fit_eta(&samples);
    Ok(CharacteristicSamples { samples, monotone, c_slack, eta })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn areas() {
        assert_eq!(hyperbolic_area(0, 3), (Rational64::new(1, 2), true));
        assert_eq!(hyperbolic_area(1, 4), (Rational64::from_integer(2), true));
        assert_eq!(hyperbolic_area(0, 2), (Rational64::from_integer(0), false));
    }

    #[test]
    fn lambda_special_values() {
        assert!((modular_lambda(c(0.0, 1.0)).unwrap() - c(0.5, 0.0)).norm() < 1e-14);
        // lambda(1 + i) = -1 and lambda(i sqrt 2) = (sqrt 2 - 1)^2
        assert!((modular_lambda(c(1.0, 1.0)).unwrap() + 1.0).norm() < 1e-12);
        let v = (2f64.sqrt() - 1.0).powi(2);
        assert!((modular_lambda(c(0.0, 2f64.sqrt())).unwrap() - v).norm() < 1e-13);
        assert!(modular_lambda(c(0.3, 0.0)).is_err());
    }

    #[test]
    fn lambda_functional_equations() {
        for k in 0..20 {
            let t = c(-1.3 + 0.17 * k as f64, 0.05 + 0.11 * k as f64);
            let l = modular_lambda(t).unwrap();
            assert!((modular_lambda(t + 2.0).unwrap() - l).norm() < 1e-10 * l.norm().max(1.0));
            let m = modular_lambda(-1.0 / t).unwrap();
            assert!((l + m - 1.0).norm() < 1e-10 * l.norm().max(1.0), "{t}");
        }
    }

    #[test]
    fn lambda_derivative_matches_difference() {
        for t in [c(0.1, 0.9), c(0.45, 0.2), c(-2.3, 0.07), c(0.0, 3.0)] {
            let (_, d) = modular_lambda_d(t).unwrap();
            let h = 1e-5 * t.im;
            let fd = (modular_lambda(t + h).unwrap() - modular_lambda(t - h).unwrap()) / (2.0 * h);
            assert!((fd - d).norm() < 1e-6 * d.norm().max(1.0), "{t}: {fd} vs {d}");
        }
    }

    #[test]
    fn comparison_integral() {
        for r in [0.5, 0.9] {
            let (v, _, ok) = characteristic_integral(&hyperbolic_density, r);
            assert!(ok);
            assert!((v - 0.5 * (1.0 / (1.0 - r * r)).ln()).abs() < 1e-6);
        }
    }

    #[test]
    fn cover_hits_punctures_and_base_value() {
        let a = [SpherePoint::finite(0.0, 0.0), SpherePoint::finite(1.0, 0.0), SpherePoint::Infinity];
        let cv = ThricePuncturedCover::new(a).unwrap();
        let (w, _) = cv.eval(c(0.0, 0.0)).unwrap();
        assert!(w.approx_eq(&SpherePoint::finite(0.5, 0.0), 1e-14));
        let b = [SpherePoint::finite(2.0, 0.0), SpherePoint::Infinity, SpherePoint::finite(-1.0, 0.0)];
        let cv = ThricePuncturedCover::new(b).unwrap();
        // lambda = 1/2 maps to the cross-ratio image
        let (w, _) = cv.eval(c(0.0, 0.0)).unwrap();
        let expect = (-1.0 * 0.5 - 2.0) / (0.5 - 1.0);
        assert!(w.approx_eq(&SpherePoint::finite(expect, 0.0), 1e-13), "{w}");
    }

    #[test]
    fn voss_characteristic_small_radii() {
        let a = [SpherePoint::finite(0.0, 0.0), SpherePoint::finite(1.0, 0.0), SpherePoint::Infinity];
        let s = t_characteristic_voss(a, &[0.05, 0.3]).unwrap();
        assert!(s.monotone);
        assert!(s.samples[0].t < 0.01);
    }
}
