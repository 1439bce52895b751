//! Adaptive Gauss-Kronrod (10/21 point) quadrature for real, complex and
//! vector valued integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077958109831074,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

/// Values that can be integrated: a real vector space with a norm.
pub trait QuadValue: Copy {
    fn zero() -> Self;
    fn add(self, other: Self) -> Self;
    fn scale(self, s: f64) -> Self;
    fn norm(self) -> f64;
    fn is_finite(self) -> bool;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn norm(self) -> f64 {
        self.abs()
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn norm(self) -> f64 {
        Complex64::norm(self)
    }
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

impl<T: QuadValue, const N: usize> QuadValue for [T; N] {
    fn zero() -> Self {
        [T::zero(); N]
    }
    fn add(mut self, other: Self) -> Self {
        for (a, b) in self.iter_mut().zip(other) {
            *a = a.add(b);
        }
        self
    }
    fn scale(mut self, s: f64) -> Self {
        for a in self.iter_mut() {
            *a = a.scale(s);
        }
        self
    }
    fn norm(self) -> f64 {
        self.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }
    fn is_finite(self) -> bool {
        self.iter().all(|a| a.is_finite())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { abs_tol: 1e-13, rel_tol: 1e-10, max_intervals: 2000 }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: f64,
    pub evals: usize,
    pub converged: bool,
}

/// One 21-point Kronrod panel: (integral, error estimate).
pub fn gk21<T: QuadValue>(f: &mut impl FnMut(f64) -> T, a: f64, b: f64) -> (T, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc.scale(WGK[10]);
    let mut gauss = T::zero();
    for i in 0..10 {
        let dx = h * XGK[i];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        let s = f1.add(f2);
        kron = kron.add(s.scale(WGK[i]));
        if i % 2 == 1 {
            gauss = gauss.add(s.scale(WG[i / 2]));
        }
    }
    let kron = kron.scale(h);
    let gauss = gauss.scale(h);
    let diff = kron.add(gauss.scale(-1.0)).norm();
    // QUADPACK style error scaling
    let err = if diff == 0.0 { 0.0 } else { diff * (200.0 * diff / kron.norm().max(1e-300)).powf(1.5).min(1.0) };
    let err = err.max(50.0 * f64::EPSILON * kron.norm());
    (kron, err)
}

struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T> Eq for Panel<T> {}
impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.partial_cmp(&other.error).unwrap_or(Ordering::Equal)
    }
}

/// Globally adaptive integration of `f` over `[a, b]`.
pub fn integrate<T: QuadValue>(mut f: impl FnMut(f64) -> T, a: f64, b: f64, opts: QuadOptions) -> QuadResult<T> {
    let (v, e) = gk21(&mut f, a, b);
    let mut evals = 21;
    if !v.is_finite() {
        return QuadResult { value: v, error: f64::INFINITY, evals, converged: false };
    }
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value: v, error: e });
    let mut total = v;
    let mut total_err = e;
    // sum of panel magnitudes; errors at the roundoff floor of a cancelling
    // integral are accepted
    let mut l1 = v.norm();
    loop {
        let tol = opts.abs_tol.max(opts.rel_tol * total.norm()).max(100.0 * f64::EPSILON * l1);
        if total_err <= tol {
            return QuadResult { value: total, error: total_err, evals, converged: true };
        }
        if heap.len() >= opts.max_intervals {
            break;
        }
        let worst = heap.pop().unwrap();
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            heap.push(worst);
            break;
        }
        let (v1, e1) = gk21(&mut f, worst.a, m);
        let (v2, e2) = gk21(&mut f, m, worst.b);
        evals += 42;
        if !v1.is_finite() || !v2.is_finite() {
            return QuadResult { value: total, error: f64::INFINITY, evals, converged: false };
        }
        total = total.add(worst.value.scale(-1.0)).add(v1).add(v2);
        total_err = total_err - worst.error + e1 + e2;
        l1 = l1 - worst.value.norm() + v1.norm() + v2.norm();
        heap.push(Panel { a: worst.a, b: m, value: v1, error: e1 });
        heap.push(Panel { a: m, b: worst.b, value: v2, error: e2 });
    }
    // resum to limit drift
    let mut value = T::zero();
    let mut error = 0.0;
    let mut l1 = 0.0;
    for p in heap.iter() {
        value = value.add(p.value);
        error += p.error;
        l1 += p.value.norm();
    }
    let tol = opts.abs_tol.max(opts.rel_tol * value.norm()).max(100.0 * f64::EPSILON * l1);
    QuadResult { value, error, evals, converged: error <= tol }
}

/// Line integral `int f(z) dz` along the straight segment from `z0` to `z1`.
pub fn integrate_segment<const N: usize>(
    f: impl Fn(Complex64) -> [Complex64; N],
    z0: Complex64,
    z1: Complex64,
    opts: QuadOptions,
) -> QuadResult<[Complex64; N]> {
    let dz = z1 - z0;
    integrate(
        |t| {
            let mut v = f(z0 + dz * t);
            for x in v.iter_mut() {
                *x *= dz;
            }
            v
        },
        0.0,
        1.0,
        opts,
    )
}

/// Line integral along the arc `center + r e^{i theta}`, `theta` from `t0` to `t1`.
pub fn integrate_arc<const N: usize>(
    f: impl Fn(Complex64) -> [Complex64; N],
    center: Complex64,
    r: f64,
    t0: f64,
    t1: f64,
    opts: QuadOptions,
) -> QuadResult<[Complex64; N]> {
    integrate(
        |t| {
            let e = Complex64::from_polar(r, t);
            let dz = Complex64::new(0.0, 1.0) * e;
            let mut v = f(center + e);
            for x in v.iter_mut() {
                *x *= dz;
            }
            v
        },
        t0,
        t1,
        opts,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| x.powi(7) - 3.0 * x * x, 0.0, 2.0, QuadOptions::default());
        assert!(r.converged);
        assert!((r.value - (256.0 / 8.0 - 8.0)).abs() < 1e-12);
    }

    #[test]
    fn peaked_integrand_is_refined() {
        // int_{-1}^{1} 1/(x^2 + 1e-4) dx = 2 atan(100)/0.01
        let exact = 2.0 * (100.0f64).atan() / 0.01;
        let r = integrate(|x| 1.0 / (x * x + 1e-4), -1.0, 1.0, QuadOptions::default());
        assert!(r.converged);
        assert!((r.value - exact).abs() < 1e-8 * exact);
    }

    #[test]
    fn closed_contour_residue() {
        // int_{|z|=1} dz / z = 2 pi i
        let r = integrate_arc(|z| [z.inv()], Complex64::new(0.0, 0.0), 1.0, 0.0, std::f64::consts::TAU, QuadOptions::default());
        assert!((r.value[0] - Complex64::new(0.0, std::f64::consts::TAU)).norm() < 1e-12);
    }

    #[test]
    fn log_segment() {
        let r = integrate_segment(|z| [z.inv()], Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0), QuadOptions::default());
        assert!((r.value[0].re - 2f64.ln()).abs() < 1e-14);
    }
}
