//! Random Weierstrass data on punctured spheres, shared by the integration
//! tests. Points are Gaussian rationals on a half-integer grid so fibers and
//! punctures coincide exactly or stay well apart.
#![allow(dead_code)]

use minsurf::exact::{gr_ratio, GaussRat, QPoly};
use minsurf::rational::RationalFunction;
use minsurf::{Complex64, SpherePoint, WeierstrassSurface};
use rand::seq::SliceRandom;
use rand::Rng;

/// A half-integer grid point `(a + b i) / 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridPt(pub i64, pub i64);

impl GridPt {
    pub fn exact(self) -> GaussRat {
        gr_ratio((self.0, 2), (self.1, 2))
    }
    pub fn c64(self) -> Complex64 {
        Complex64::new(self.0 as f64 / 2.0, self.1 as f64 / 2.0)
    }
}

/// Distinct grid points in `[-3, 3]^2`.
pub fn grid_points(rng: &mut impl Rng, n: usize) -> Vec<GridPt> {
    let mut all: Vec<GridPt> = (-6..=6).flat_map(|a| (-6..=6).map(move |b| GridPt(a, b))).collect();
    all.shuffle(rng);
    all.truncate(n);
    all
}

/// `c prod (z - a)^m / prod (z - b)^n`, kept as root data.
#[derive(Clone, Debug)]
pub struct RootMap {
    pub c: Complex64,
    pub zeros: Vec<(GridPt, usize)>,
    pub poles: Vec<(GridPt, usize)>,
}

impl RootMap {
    fn count(v: &[(GridPt, usize)]) -> usize {
        v.iter().map(|(_, m)| m).sum()
    }

    pub fn degree(&self) -> usize {
        Self::count(&self.zeros).max(Self::count(&self.poles))
    }

    /// Pole order at infinity (0 if finite there).
    pub fn pole_at_infinity(&self) -> usize {
        Self::count(&self.zeros).saturating_sub(Self::count(&self.poles))
    }

    pub fn function(&self) -> RationalFunction {
        let z: Vec<(GaussRat, usize)> = self.zeros.iter().map(|(p, m)| (p.exact(), *m)).collect();
        let p: Vec<(GaussRat, usize)> = self.poles.iter().map(|(p, m)| (p.exact(), *m)).collect();
        RationalFunction::from_root_data(self.c, &z, &p).unwrap()
    }

    pub fn negated(&self) -> Self {
        RootMap { c: -self.c, ..self.clone() }
    }

    pub fn reciprocal(&self) -> Self {
        RootMap { c: self.c.inv(), zeros: self.poles.clone(), poles: self.zeros.clone() }
    }
}

/// Random multiplicities summing to `total`.
fn partition(rng: &mut impl Rng, total: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut left = total;
    while left > 0 {
        let m = rng.gen_range(1..=left.min(3));
        out.push(m);
        left -= m;
    }
    out
}

/// Random nonconstant map of degree at most `max_deg`.
pub fn random_map(rng: &mut impl Rng, max_deg: usize) -> RootMap {
    let d = rng.gen_range(1..=max_deg);
    random_map_of_degree(rng, d)
}

pub fn random_map_of_degree(rng: &mut impl Rng, d: usize) -> RootMap {
    // one side has full degree, the other may fall short (the rest sits at infinity)
    let (nz, np) = if rng.gen_bool(0.5) { (d, rng.gen_range(0..=d)) } else { (rng.gen_range(0..=d), d) };
    let zm = partition(rng, nz);
    let pm = partition(rng, np);
    let nzr = zm.len();
    let pts = grid_points(rng, nzr + pm.len());
    let zeros = pts[..nzr].iter().copied().zip(zm).collect();
    let poles = pts[nzr..].iter().copied().zip(pm).collect();
    let c = Complex64::new(rng.gen_range(1..=3) as f64, rng.gen_range(-2..=2) as f64);
    RootMap { c, zeros, poles }
}

/// Random puncture set: up to four grid points, with or without infinity.
pub fn random_punctures(rng: &mut impl Rng) -> (Vec<GridPt>, bool) {
    let n = rng.gen_range(0..=4);
    let with_inf = n == 0 || rng.gen_bool(0.6);
    (grid_points(rng, n), with_inf)
}

/// Punctures drawn partly from the zeros and poles of `g`, so that values are
/// omitted or totally ramified in `M` more often than for random points.
pub fn punctures_near(rng: &mut impl Rng, g: &RootMap) -> (Vec<GridPt>, bool) {
    let mut pts: Vec<GridPt> = g.zeros.iter().chain(&g.poles).map(|(p, _)| *p).filter(|_| rng.gen_bool(0.6)).collect();
    let extra = rng.gen_range(0..=2);
    for p in grid_points(rng, extra) {
        if !pts.contains(&p) {
            pts.push(p);
        }
    }
    let with_inf = pts.is_empty() || rng.gen_bool(0.6);
    (pts, with_inf)
}

/// Regular `hdz` for `g`: double zeros over the poles of `g` in `M`, poles only
/// at punctures with random orders in `orders`. `None` when the degree count
/// at an unpunctured infinity cannot be met.
pub fn build_surface(
    rng: &mut impl Rng,
    g: &RootMap,
    finite: &[GridPt],
    with_inf: bool,
    orders: std::ops::RangeInclusive<usize>,
) -> Option<WeierstrassSurface> {
    let num_roots: Vec<(GridPt, usize)> =
        g.poles.iter().filter(|(p, _)| !finite.contains(p)).map(|(p, m)| (*p, 2 * m)).collect();
    let num_deg: usize = num_roots.iter().map(|(_, m)| m).sum();
    let mut den: Vec<usize> = finite.iter().map(|_| rng.gen_range(orders.clone())).collect();
    if !with_inf {
        // ord_inf(h dz) = deg den - deg num - 2 must equal twice the pole order of g there
        let need = num_deg + 2 + 2 * g.pole_at_infinity();
        if finite.is_empty() {
            return None;
        }
        let have: usize = den.iter().sum();
        if have > need {
            return None;
        }
        for _ in have..need {
            let i = rng.gen_range(0..den.len());
            den[i] += 1;
        }
    }
    let num = num_roots.iter().fold(QPoly::one(), |acc, (p, m)| acc.mul(&QPoly::linear(&p.exact()).pow(*m)));
    let den_poly = finite.iter().zip(&den).fold(QPoly::one(), |acc, (p, m)| acc.mul(&QPoly::linear(&p.exact()).pow(*m)));
    let h = RationalFunction::new(Complex64::new(1.0, 0.0), num, den_poly).ok()?;
    let mut punctures: Vec<SpherePoint> = finite.iter().map(|p| SpherePoint::Finite(p.c64())).collect();
    if with_inf {
        punctures.push(SpherePoint::Infinity);
    }
    WeierstrassSurface::sphere(punctures, g.function(), h).ok()
}
