//! Floating point complex polynomials and a simultaneous root finder.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sphere::SpherePoint;

/// Relative cluster radius used to merge numerically coincident roots.
pub const EPS_CLUSTER: f64 = 1e-7;

const MAX_ITER: usize = 800;
const RESTARTS: usize = 4;

/// Complex polynomial, coefficients in ascending degree. The zero polynomial
/// has an empty coefficient vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    coeffs: Vec<Complex64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.last().is_some_and(|c| *c == Complex64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    /// Value and first derivative by Horner's scheme.
    pub fn eval_d(&self, z: Complex64) -> (Complex64, Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        let mut p = zero;
        let mut dp = zero;
        for c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * i as f64)
                .collect(),
        )
    }

    /// Coefficients of `p(c + u)` in powers of `u`.
    pub fn taylor_shift(&self, c: Complex64) -> Vec<Complex64> {
        let mut a = self.coeffs.clone();
        let n = a.len();
        for i in 0..n {
            for j in (i..n - 1).rev() {
                let t = a[j + 1] * c;
                a[j] += t;
            }
        }
        a
    }

    /// Synthetic division by `(z - r)`, dropping the remainder.
    pub fn deflate(&self, r: Complex64) -> Poly {
        let n = self.coeffs.len();
        if n <= 1 {
            return Poly::new(Vec::new());
        }
        let mut q = vec![Complex64::new(0.0, 0.0); n - 1];
        let mut acc = Complex64::new(0.0, 0.0);
        for k in (1..n).rev() {
            acc = acc * r + self.coeffs[k];
            q[k - 1] = acc;
        }
        Poly::new(q)
    }

    /// Bound on the rounding error of evaluating `p` at `z`.
    fn eval_error_bound(&self, z: Complex64) -> f64 {
        let r = z.norm();
        let s = self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm());
        4.0 * f64::EPSILON * s * (self.coeffs.len() as f64)
    }

    /// Natural scale of the `j`-th Taylor coefficient at `c`.
    fn taylor_scale(&self, c: Complex64, j: usize) -> f64 {
        let r = c.norm();
        let mut s = 0.0;
        for (i, a) in self.coeffs.iter().enumerate().skip(j) {
            s += a.norm() * binom(i, j) * r.powi((i - j) as i32);
        }
        s
    }
}

fn binom(n: usize, k: usize) -> f64 {
    let mut b = 1.0;
    for i in 0..k {
        b = b * (n - i) as f64 / (i + 1) as f64;
    }
    b
}

/// All roots of `p` counted with multiplicity, each cluster of numerically
/// coincident roots merged into one entry.
pub fn poly_roots(p: &Poly) -> Result<Vec<(SpherePoint, usize)>> {
    let deg = p.degree().ok_or(Error::ZeroFunction)?;
    if deg == 0 {
        return Ok(Vec::new());
    }
    let raw = aberth(p)?;
    let clusters = cluster(p, &raw);
    Ok(clusters
        .into_iter()
        .map(|(z, m)| (SpherePoint::Finite(z), m))
        .collect())
}

/// Roots of a polynomial known to be square-free, polished by Newton steps.
pub fn simple_roots(p: &Poly) -> Result<Vec<Complex64>> {
    let deg = p.degree().ok_or(Error::ZeroFunction)?;
    if deg == 0 {
        return Ok(Vec::new());
    }
    let mut roots = aberth(p)?;
    for z in roots.iter_mut() {
        for _ in 0..3 {
            let (v, dv) = p.eval_d(*z);
            if dv.norm() == 0.0 {
                break;
            }
            let step = v / dv;
            if !step.re.is_finite() || !step.im.is_finite() {
                break;
            }
            *z -= step;
        }
    }
    Ok(roots)
}

/// Raw Aberth-Ehrlich iteration; returns `deg p` root estimates.
pub fn aberth(p: &Poly) -> Result<Vec<Complex64>> {
    let deg = p.degree().ok_or(Error::ZeroFunction)?;
    let zero = Complex64::new(0.0, 0.0);
    // exact zero roots are split off first
    let low = p.coeffs.iter().take_while(|c| **c == zero).count();
    let lead = p.coeffs[deg];
    let monic = Poly::new(p.coeffs[low..].iter().map(|c| c / lead).collect());
    let n = deg - low;
    let mut roots = vec![zero; low];
    if n == 0 {
        return Ok(roots);
    }
    if n == 1 {
        roots.push(-monic.coeffs[0]);
        return Ok(roots);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0f_a6e47);
    let radius = initial_radius(&monic);
    let mut last_residual = f64::INFINITY;
    for attempt in 0..RESTARTS {
        let jitter = if attempt == 0 { 0.0 } else { rng.gen::<f64>() };
        let mut z: Vec<Complex64> = (0..n)
            .map(|k| {
                let theta = std::f64::consts::TAU * (k as f64 + 0.25 + jitter) / n as f64 + 0.4;
                let r = radius * (1.0 + 0.1 * jitter * rng.gen::<f64>());
                Complex64::from_polar(r, theta)
            })
            .collect();
        let mut done = vec![false; n];
        for _ in 0..MAX_ITER {
            let mut all = true;
            for i in 0..n {
                if done[i] {
                    continue;
                }
                let (v, dv) = monic.eval_d(z[i]);
                if v.norm() <= monic.eval_error_bound(z[i]) {
                    done[i] = true;
                    continue;
                }
                let ratio = v / dv;
                let mut s = zero;
                for j in 0..n {
                    if j != i {
                        s += (z[i] - z[j]).inv();
                    }
                }
                let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
                if !w.re.is_finite() || !w.im.is_finite() {
                    all = false;
                    z[i] += Complex64::new(1e-3 * radius * rng.gen::<f64>(), 1e-3 * radius * rng.gen::<f64>());
                    continue;
                }
                z[i] -= w;
                if w.norm() <= 2.0 * f64::EPSILON * z[i].norm().max(f64::MIN_POSITIVE) {
                    done[i] = true;
                } else {
                    all = false;
                }
            }
            if all && done.iter().all(|d| *d) {
                roots.extend(z);
                return Ok(roots);
            }
        }
        last_residual = z
            .iter()
            .map(|&zi| monic.eval(zi).norm() / monic.eval_error_bound(zi).max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max);
        // accept if every residual is within a modest multiple of rounding level
        if last_residual <= 1e3 {
            roots.extend(z);
            return Ok(roots);
        }
    }
    Err(Error::RootsNotConverged { iterations: MAX_ITER * RESTARTS, max_residual: last_residual })
}

fn initial_radius(monic: &Poly) -> f64 {
    // Fujiwara bound, halved; never below a tiny floor
    let n = monic.coeffs.len() - 1;
    let mut b: f64 = 0.0;
    for k in 1..=n {
        let c = monic.coeffs[n - k].norm();
        let t = if k == n { (c / 2.0).powf(1.0 / k as f64) } else { c.powf(1.0 / k as f64) };
        b = b.max(t);
    }
    (b.max(1e-3)) * 1.0
}

/// Single-linkage clustering at `EPS_CLUSTER`, followed by validated
/// widening: a wider merge is accepted only when the Taylor coefficients of
/// `p` at the cluster mean vanish to the order the merged size demands.
fn cluster(p: &Poly, raw: &[Complex64]) -> Vec<(Complex64, usize)> {
    let mut groups: Vec<Vec<Complex64>> = raw.iter().map(|z| vec![*z]).collect();
    merge_within(&mut groups, EPS_CLUSTER, |_| true);
    let mut tol = EPS_CLUSTER * 10.0;
    while tol <= 1e-2 {
        merge_within(&mut groups, tol, |pts| validate_multiplicity(p, pts));
        tol *= 10.0;
    }
    groups
        .into_iter()
        .map(|g| {
            let m = g.len();
            let mean = g.iter().sum::<Complex64>() / m as f64;
            (polish_multiple(p, mean, m), m)
        })
        .collect()
}

fn merge_within(groups: &mut Vec<Vec<Complex64>>, tol: f64, accept: impl Fn(&[Complex64]) -> bool) {
    // connected components of the closeness graph, merged whole or not at all
    let n = groups.len();
    let mut comp: Vec<usize> = (0..n).collect();
    fn root(c: &mut [usize], mut i: usize) -> usize {
        while c[i] != i {
            c[i] = c[c[i]];
            i = c[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let close = groups[i].iter().any(|a| {
                groups[j]
                    .iter()
                    .any(|b| (a - b).norm() <= tol * a.norm().max(b.norm()).max(1.0))
            });
            if close {
                let (ri, rj) = (root(&mut comp, i), root(&mut comp, j));
                comp[rj] = ri;
            }
        }
    }
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        let r = root(&mut comp, i);
        buckets[r].push(i);
    }
    let mut out = Vec::new();
    for b in buckets.into_iter().filter(|b| !b.is_empty()) {
        let pts: Vec<Complex64> = b.iter().flat_map(|&i| groups[i].iter().copied()).collect();
        if b.len() == 1 || accept(&pts) {
            out.push(pts);
        } else {
            out.extend(b.iter().map(|&i| groups[i].clone()));
        }
    }
    *groups = out;
}

/// A cluster of `m` computed roots is one `m`-fold root when its spread is
/// no larger than rounding can explain: perturbing the coefficients by
/// `eps * scale` moves an `m`-fold root by about `(eps * scale / |a_m|)^(1/m)`.
fn validate_multiplicity(p: &Poly, pts: &[Complex64]) -> bool {
    let m = pts.len();
    let c = pts.iter().sum::<Complex64>() / m as f64;
    let spread = pts.iter().map(|z| (z - c).norm()).fold(0.0, f64::max);
    let shifted = p.taylor_shift(c);
    let am = shifted.get(m).map_or(0.0, |a| a.norm());
    if am == 0.0 {
        return false;
    }
    let expected = (f64::EPSILON * p.taylor_scale(c, 0) * m as f64 / am).powf(1.0 / m as f64);
    spread <= 100.0 * expected
}

/// Newton refinement of an `m`-fold root as a simple root of `p^(m-1)`.
fn polish_multiple(p: &Poly, z0: Complex64, m: usize) -> Complex64 {
    let mut q = p.clone();
    for _ in 1..m {
        q = q.derivative();
    }
    let mut z = z0;
    for _ in 0..4 {
        let (v, dv) = q.eval_d(z);
        if dv.norm() == 0.0 {
            break;
        }
        let step = v / dv;
        if !step.re.is_finite() || step.norm() > 1e-3 * z.norm().max(1.0) {
            break;
        }
        z -= step;
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn find(roots: &[(SpherePoint, usize)], z: Complex64) -> usize {
        roots
            .iter()
            .find(|(p, _)| p.approx_eq(&SpherePoint::Finite(z), 1e-9))
            .map(|(_, m)| *m)
            .unwrap_or(0)
    }

    #[test]
    fn z_squared_plus_one() {
        let r = poly_roots(&Poly::from_real(&[1.0, 0.0, 1.0])).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(find(&r, c(0.0, 1.0)), 1);
        assert_eq!(find(&r, c(0.0, -1.0)), 1);
    }

    #[test]
    fn quartic_monomial() {
        let r = poly_roots(&Poly::from_real(&[0.0, 0.0, 0.0, 0.0, 1.0])).unwrap();
        assert_eq!(r, vec![(SpherePoint::finite(0.0, 0.0), 4)]);
    }

    #[test]
    fn double_root_is_merged() {
        // z (z-1)^2 = z^3 - 2 z^2 + z
        let r = poly_roots(&Poly::from_real(&[0.0, 1.0, -2.0, 1.0])).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(find(&r, c(0.0, 0.0)), 1);
        assert_eq!(find(&r, c(1.0, 0.0)), 2);
    }

    #[test]
    fn triple_root_needs_validated_widening() {
        // (z - 2)^3 (z + i)
        let p = Poly::new(vec![c(8.0, 0.0), c(-12.0, 0.0), c(6.0, 0.0), c(-1.0, 0.0)]);
        let q = Poly::new(vec![c(0.0, 1.0), c(1.0, 0.0)]);
        let mut prod = vec![c(0.0, 0.0); 5];
        for (i, a) in p.coeffs().iter().enumerate() {
            for (j, b) in q.coeffs().iter().enumerate() {
                prod[i + j] += a * b;
            }
        }
        let r = poly_roots(&Poly::new(prod)).unwrap();
        assert_eq!(find(&r, c(2.0, 0.0)), 3);
        assert_eq!(find(&r, c(0.0, -1.0)), 1);
    }

    #[test]
    fn close_simple_roots_stay_separate() {
        // (z - 1)(z - 1.001)
        let r = poly_roots(&Poly::from_real(&[1.001, -2.001, 1.0])).unwrap();
        assert_eq!(r.len(), 2);
    }

    #[test]
    fn taylor_shift_matches_evaluation() {
        let p = Poly::new(vec![c(1.0, 2.0), c(-3.0, 0.5), c(0.0, 1.0), c(2.0, 0.0)]);
        let s = p.taylor_shift(c(0.3, -0.7));
        let u = c(0.11, 0.2);
        let direct = p.eval(c(0.3, -0.7) + u);
        let via: Complex64 = s.iter().rev().fold(c(0.0, 0.0), |acc, a| acc * u + a);
        assert!((direct - via).norm() < 1e-13);
    }
}
