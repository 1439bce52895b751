//! Numerical realization of the surface: the Weierstrass-Enneper integral on
//! grids, periods over cycles, curvature, and total curvature.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{integrate, integrate_arc, integrate_segment, QuadOptions, QuadResult};
use crate::rational::RationalFunction;
use crate::sphere::SpherePoint;
use crate::surface::{SurfaceView, WeierstrassSurface};

/// Default distance kept between integration paths and punctures.
pub const DELTA_PATH: f64 = 1e-2;

/// Per-edge quadrature tolerances.
pub fn edge_options() -> QuadOptions {
    QuadOptions { abs_tol: 1e-14, rel_tol: 1e-10, max_intervals: 400 }
}

/// The three holomorphic differentials, as coefficients of `dz`.
#[derive(Clone, Debug)]
pub enum PhiTriple {
    Rational([RationalFunction; 3]),
    /// Torus data are evaluated pointwise through the surface.
    Elliptic(Box<WeierstrassSurface>),
}

impl PhiTriple {
    pub fn eval(&self, z: Complex64) -> Result<[Complex64; 3]> {
        match self {
            PhiTriple::Rational(f) => Ok([f[0].eval(z), f[1].eval(z), f[2].eval(z)]),
            PhiTriple::Elliptic(s) => s.phi(z),
        }
    }

    /// Whether `phi_1^2 + phi_2^2 + phi_3^2` vanishes as a rational function.
    pub fn conformal_exact(&self) -> Option<bool> {
        match self {
            PhiTriple::Rational(f) => {
                let sum = f[0].powi(2).add(&f[1].powi(2)).and_then(|s| s.add(&f[2].powi(2)));
                Some(sum.map(|s| s.is_zero()).unwrap_or(false))
            }
            PhiTriple::Elliptic(_) => None,
        }
    }
}

pub fn phi_from_weierstrass(s: &WeierstrassSurface) -> Result<PhiTriple> {
    match s.view() {
        SurfaceView::Sphere { g, h, .. } => {
            let one = RationalFunction::constant(Complex64::new(1.0, 0.0));
            let g2 = g.powi(2);
            let p1 = one.sub(&g2)?.mul(h).scaled_by(Complex64::new(0.5, 0.0));
            let p2 = one.add(&g2)?.mul(h).scaled_by(Complex64::new(0.0, 0.5));
            let p3 = h.mul(g);
            Ok(PhiTriple::Rational([p1, p2, p3]))
        }
        SurfaceView::Torus { .. } => Ok(PhiTriple::Elliptic(Box::new(s.clone()))),
    }
}

/// `|sum phi_i^2| / max |phi_i|^2` at one point.
pub fn conformality_residual(phi: &[Complex64; 3]) -> f64 {
    let sum: Complex64 = phi.iter().map(|p| p * p).sum();
    let scale = phi.iter().map(|p| p.norm_sqr()).fold(0.0, f64::max);
    if scale == 0.0 {
        0.0
    } else {
        sum.norm() / scale
    }
}

/// Distance from a chart point to the nearest puncture (all lattice
/// translates on the torus). Infinity is ignored.
pub fn puncture_distance(s: &WeierstrassSurface, z: Complex64) -> f64 {
    let pts = s.puncture_coords();
    match s.torus_lattice() {
        Some(t) => pts.iter().map(|p| t.reduce(z - p).norm()).fold(f64::INFINITY, f64::min),
        None => pts.iter().map(|p| (z - p).norm()).fold(f64::INFINITY, f64::min),
    }
}

fn segment_distance(s: &WeierstrassSurface, a: Complex64, b: Complex64) -> f64 {
    // sampled; segments are short compared with the exclusion radius
    let n = 16;
    (0..=n).map(|i| puncture_distance(s, a + (b - a) * (i as f64 / n as f64))).fold(f64::INFINITY, f64::min)
}

fn phi_or_nan(s: &WeierstrassSurface, z: Complex64) -> [Complex64; 3] {
    s.phi(z).unwrap_or([Complex64::new(f64::NAN, 0.0); 3])
}

fn check_quad(r: &QuadResult<[Complex64; 3]>, location: impl FnOnce() -> String) -> Result<[Complex64; 3]> {
    if !r.converged || !r.value.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
        return Err(Error::Quadrature { location: location(), error: r.error });
    }
    Ok(r.value)
}

/// `int phi` along a polyline.
pub fn integrate_path(s: &WeierstrassSurface, path: &[Complex64]) -> Result<[Complex64; 3]> {
    let mut acc = [Complex64::new(0.0, 0.0); 3];
    for w in path.windows(2) {
        let r = integrate_segment(|z| phi_or_nan(s, z), w[0], w[1], edge_options());
        let v = check_quad(&r, || format!("segment {} -> {}", w[0], w[1]))?;
        for i in 0..3 {
            acc[i] += v[i];
        }
    }
    Ok(acc)
}

/// `x(path end) - x(path start)`.
pub fn position_along(s: &WeierstrassSurface, path: &[Complex64]) -> Result<[f64; 3]> {
    let v = integrate_path(s, path)?;
    Ok([v[0].re, v[1].re, v[2].re])
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GridSpec {
    /// Log-spaced radii in `[rmin, rmax]` around `center`, full turns in angle.
    Polar { center: Complex64, rmin: f64, rmax: f64, nr: usize, ntheta: usize },
    /// `corner + u du + v dv`, `u, v` in `[0, 1]`; `dv` must be `i du` up to a
    /// positive factor.
    Rect { corner: Complex64, du: Complex64, dv: Complex64, nu: usize, nv: usize },
}

/// Conformal grid parameters `(s, t)` with steps `hs`, `ht`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct GridParam {
    pub ns: usize,
    pub nt: usize,
    pub hs: f64,
    pub ht: f64,
    /// Whether `t` wraps around.
    pub periodic: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SurfaceMesh {
    pub vertices: Vec<[f64; 3]>,
    pub normals: Vec<[f64; 3]>,
    pub faces: Vec<Vec<usize>>,
    #[serde(skip)]
    pub chart: Vec<Complex64>,
    pub param: GridParam,
    /// Largest mismatch on non-tree edges that do not cross the seam.
    pub patch_residual: f64,
    /// Largest mismatch on the closing edges of a periodic grid; nonzero
    /// when a period is enclosed.
    pub seam_mismatch: f64,
}

impl SurfaceMesh {
    fn idx(&self, i: usize, j: usize) -> usize {
        i * self.param.nt + j
    }

    fn neighbours(&self, i: usize, j: usize) -> Option<[usize; 4]> {
        let p = &self.param;
        if i == 0 || i + 1 >= p.ns {
            return None;
        }
        let (jm, jp) = if p.periodic {
            ((j + p.nt - 1) % p.nt, (j + 1) % p.nt)
        } else {
            if j == 0 || j + 1 >= p.nt {
                return None;
            }
            (j - 1, j + 1)
        };
        Some([self.idx(i - 1, j), self.idx(i + 1, j), self.idx(i, jm), self.idx(i, jp)])
    }

    /// Max over interior vertices of the discrete Laplacian of the coordinates.
    pub fn harmonicity_residual(&self) -> f64 {
        let p = self.param;
        let mut worst: f64 = 0.0;
        for i in 0..p.ns {
            for j in 0..p.nt {
                let Some([a, b, c, d]) = self.neighbours(i, j) else { continue };
                let x = self.vertices[self.idx(i, j)];
                let mut n2 = 0.0;
                for k in 0..3 {
                    let l = (self.vertices[a][k] + self.vertices[b][k] - 2.0 * x[k]) / (p.hs * p.hs)
                        + (self.vertices[c][k] + self.vertices[d][k] - 2.0 * x[k]) / (p.ht * p.ht);
                    n2 += l * l;
                }
                worst = worst.max(n2.sqrt());
            }
        }
        worst
    }

    /// Max over interior vertices of `| |x_s| - |x_t| | / |x_s|` and
    /// `|<x_s, x_t>| / |x_s|^2`, with central differences.
    pub fn isothermal_residual(&self) -> f64 {
        let p = self.param;
        let mut worst: f64 = 0.0;
        for i in 0..p.ns {
            for j in 0..p.nt {
                let Some([a, b, c, d]) = self.neighbours(i, j) else { continue };
                let xs: Vec<f64> = (0..3).map(|k| (self.vertices[b][k] - self.vertices[a][k]) / (2.0 * p.hs)).collect();
                let xt: Vec<f64> = (0..3).map(|k| (self.vertices[d][k] - self.vertices[c][k]) / (2.0 * p.ht)).collect();
                let ns = xs.iter().map(|v| v * v).sum::<f64>();
                let nt = xt.iter().map(|v| v * v).sum::<f64>();
                let dot: f64 = xs.iter().zip(&xt).map(|(a, b)| a * b).sum();
                if ns == 0.0 {
                    continue;
                }
                worst = worst.max((ns.sqrt() - nt.sqrt()).abs() / ns.sqrt()).max(dot.abs() / ns);
            }
        }
        worst
    }
}

enum Edge {
    Segment(Complex64, Complex64),
    Arc { center: Complex64, r: f64, t0: f64, t1: f64 },
}

impl Edge {
    fn integrate(&self, s: &WeierstrassSurface) -> QuadResult<[Complex64; 3]> {
        match *self {
            Edge::Segment(a, b) => integrate_segment(|z| phi_or_nan(s, z), a, b, edge_options()),
            Edge::Arc { center, r, t0, t1 } => integrate_arc(|z| phi_or_nan(s, z), center, r, t0, t1, edge_options()),
        }
    }
}

/// Integrates `Re int phi` from `basepoint` over a grid.
///
/// Vertex positions are accumulated along a spanning tree (the first row,
/// then every column); the remaining edges measure path independence.
pub fn integrate_surface(s: &WeierstrassSurface, basepoint: Complex64, grid: &GridSpec) -> Result<SurfaceMesh> {
    let (ns, nt, periodic, hs, ht, chart): (usize, usize, bool, f64, f64, Vec<Complex64>) = match *grid {
        GridSpec::Polar { center, rmin, rmax, nr, ntheta } => {
            if !(rmin > 0.0 && rmax > rmin) || nr < 2 || ntheta < 3 {
                return Err(Error::Parameter("polar grid needs 0 < rmin < rmax, nr >= 2, ntheta >= 3".into()));
            }
            let hs = (rmax / rmin).ln() / (nr - 1) as f64;
            let ht = TAU / ntheta as f64;
            let pts = (0..nr)
                .flat_map(|i| (0..ntheta).map(move |j| center + Complex64::from_polar(rmin * (hs * i as f64).exp(), ht * j as f64)))
                .collect();
            (nr, ntheta, true, hs, ht, pts)
        }
        GridSpec::Rect { corner, du, dv, nu, nv } => {
            let q = dv / (Complex64::new(0.0, 1.0) * du);
            if nu < 1 || nv < 1 || du.norm() == 0.0 || q.re <= 0.0 || q.im.abs() > 1e-12 * q.re {
                return Err(Error::Parameter("rect grid needs nu, nv >= 1 and dv a positive multiple of i du".into()));
            }
            let pts = (0..=nu)
                .flat_map(|i| (0..=nv).map(move |j| corner + du * (i as f64 / nu as f64) + dv * (j as f64 / nv as f64)))
                .collect();
            (nu + 1, nv + 1, false, du.norm() / nu as f64, dv.norm() / nv as f64, pts)
        }
    };
    let idx = |i: usize, j: usize| i * nt + j;
    let edge_between = |i0: usize, j0: usize, i1: usize, j1: usize| -> Edge {
        match *grid {
            GridSpec::Polar { center, .. } if i0 == i1 => {
                let r = (chart[idx(i0, j0)] - center).norm();
                let t0 = ht * j0 as f64;
                Edge::Arc { center, r, t0, t1: t0 + ht }
            }
            _ => Edge::Segment(chart[idx(i0, j0)], chart[idx(i1, j1)]),
        }
    };
    // every edge: (from, to, edge, kind) with kind 0 tree, 1 patch, 2 seam
    let mut edges = Vec::new();
    for i in 0..ns {
        for j in 0..nt {
            let jn = j + 1;
            if jn < nt {
                edges.push((idx(i, j), idx(i, jn), edge_between(i, j, i, jn), if i == 0 { 0 } else { 1 }));
            } else if periodic {
                edges.push((idx(i, j), idx(i, 0), edge_between(i, j, i, 0), 2));
            }
            if i + 1 < ns {
                edges.push((idx(i, j), idx(i + 1, j), edge_between(i, j, i + 1, j), 0));
            }
        }
    }
    for (a, b, e, _) in &edges {
        let d = match e {
            Edge::Segment(..) => segment_distance(s, chart[*a], chart[*b]),
            Edge::Arc { center, r, t0, t1 } => {
                let n = 8;
                (0..=n)
                    .map(|k| puncture_distance(s, center + Complex64::from_polar(*r, t0 + (t1 - t0) * k as f64 / n as f64)))
                    .fold(f64::INFINITY, f64::min)
            }
        };
        if d < DELTA_PATH {
            return Err(Error::Parameter(format!(
                "grid cell between {} and {} passes within {:.3e} of a puncture",
                chart[*a], chart[*b], d
            )));
        }
    }
    if segment_distance(s, basepoint, chart[0]) < DELTA_PATH {
        return Err(Error::Parameter(format!("path from basepoint {basepoint} to {} meets a puncture", chart[0])));
    }
    let values: Vec<[Complex64; 3]> = edges
        .par_iter()
        .map(|(a, b, e, _)| {
            let r = e.integrate(s);
            check_quad(&r, || format!("grid cell edge {} -> {}", chart[*a], chart[*b]))
        })
        .collect::<Result<_>>()?;
    let start = integrate_path(s, &[basepoint, chart[0]])?;

    let n = ns * nt;
    let mut x = vec![[0.0f64; 3]; n];
    x[0] = [start[0].re, start[1].re, start[2].re];
    // tree edges are listed row by row, so parents precede children when
    // the first row is done before the columns
    let tree: Vec<usize> = (0..edges.len()).filter(|k| edges[*k].3 == 0).collect();
    let mut done = vec![false; n];
    done[0] = true;
    for &k in tree.iter().filter(|k| edges[**k].0 / nt == 0 && edges[**k].1 / nt == 0) {
        let (a, b, _, _) = &edges[k];
        x[*b] = std::array::from_fn(|c| x[*a][c] + values[k][c].re);
        done[*b] = true;
    }
    for i in 0..ns - 1 {
        for j in 0..nt {
            let k = tree.iter().copied().find(|k| edges[*k].0 == idx(i, j) && edges[*k].1 == idx(i + 1, j)).expect("column edge");
            let (a, b, _, _) = &edges[k];
            debug_assert!(done[*a]);
            x[*b] = std::array::from_fn(|c| x[*a][c] + values[k][c].re);
            done[*b] = true;
        }
    }
    let (mut patch, mut seam) = (0.0f64, 0.0f64);
    for (k, (a, b, _, kind)) in edges.iter().enumerate() {
        if *kind == 0 {
            continue;
        }
        let m = (0..3).map(|c| (x[*b][c] - x[*a][c] - values[k][c].re).powi(2)).sum::<f64>().sqrt();
        if *kind == 1 {
            patch = patch.max(m);
        } else {
            seam = seam.max(m);
        }
    }
    let normals = chart
        .iter()
        .map(|z| s.local(*z).map(|l| SpherePoint::Finite(l.g).to_unit_vector()))
        .collect::<Result<_>>()?;
    let mut faces = Vec::new();
    for i in 0..ns - 1 {
        for j in 0..nt {
            let jn = if j + 1 < nt { j + 1 } else if periodic { 0 } else { continue };
            faces.push(vec![idx(i, j), idx(i + 1, j), idx(i + 1, jn), idx(i, jn)]);
        }
    }
    Ok(SurfaceMesh {
        vertices: x,
        normals,
        faces,
        chart,
        param: GridParam { ns, nt, hs, ht, periodic },
        patch_residual: patch,
        seam_mismatch: seam,
    })
}

/// A closed integration path in the chart.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Cycle {
    Circle { center: Complex64, radius: f64 },
    /// Closed polyline; the last point is joined to the first if needed.
    Polyline(Vec<Complex64>),
}

impl Cycle {
    pub fn circle(center: Complex64, radius: f64) -> Self {
        Cycle::Circle { center, radius }
    }

    fn closed_points(&self) -> Vec<Complex64> {
        match self {
            Cycle::Circle { center, radius } => (0..=64).map(|k| center + Complex64::from_polar(*radius, TAU * k as f64 / 64.0)).collect(),
            Cycle::Polyline(p) => {
                let mut p = p.clone();
                if p.first() != p.last() {
                    p.push(p[0]);
                }
                p
            }
        }
    }

    /// Winding number around `z` (the cycle must avoid `z`).
    pub fn winding(&self, z: Complex64) -> i64 {
        match self {
            Cycle::Circle { center, radius } => i64::from((z - center).norm() < *radius),
            Cycle::Polyline(_) => {
                let p = self.closed_points();
                let total: f64 = p.windows(2).map(|w| ((w[1] - z) / (w[0] - z)).arg()).sum();
                (total / TAU).round() as i64
            }
        }
    }

    fn distance_to(&self, z: Complex64) -> f64 {
        match self {
            Cycle::Circle { center, radius } => ((z - center).norm() - radius).abs(),
            Cycle::Polyline(_) => self
                .closed_points()
                .windows(2)
                .map(|w| {
                    let d = w[1] - w[0];
                    let t = if d.norm_sqr() == 0.0 { 0.0 } else { (((z - w[0]) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0) };
                    (w[0] + d * t - z).norm()
                })
                .fold(f64::INFINITY, f64::min),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PeriodResult {
    /// `Re` of the contour integral.
    pub real: [f64; 3],
    pub complex: [Complex64; 3],
    /// `2 pi i` times the enclosed residues (rational data only).
    pub residue_sum: Option<[Complex64; 3]>,
}

/// Contour integral of `phi` over one cycle.
pub fn period(s: &WeierstrassSurface, cycle: &Cycle) -> Result<PeriodResult> {
    let phi = phi_from_weierstrass(s)?;
    let mut singular: Vec<Complex64> = s.puncture_coords();
    if let PhiTriple::Rational(f) = &phi {
        for fi in f {
            singular.extend(fi.finite_poles()?.into_iter().map(|(z, _)| z));
        }
    }
    match (s.torus_lattice(), cycle) {
        (Some(t), _) => {
            let pts = cycle.closed_points();
            for w in pts.windows(2) {
                let z = w[0];
                if s.puncture_coords().iter().any(|p| t.reduce(z - p).norm() < DELTA_PATH) {
                    return Err(Error::Parameter(format!("cycle passes within {DELTA_PATH} of a puncture near {z}")));
                }
            }
        }
        (None, _) => {
            if let Some(p) = singular.iter().find(|p| cycle.distance_to(**p) < DELTA_PATH) {
                return Err(Error::Parameter(format!("cycle passes within {DELTA_PATH} of the singular point {p}")));
            }
        }
    }
    let complex = match cycle {
        Cycle::Circle { center, radius } => {
            let r = integrate_arc(|z| phi_or_nan(s, z), *center, *radius, 0.0, TAU, edge_options());
            check_quad(&r, || format!("circle |z - {center}| = {radius}"))?
        }
        Cycle::Polyline(_) => integrate_path(s, &cycle.closed_points())?,
    };
    let residue_sum = match &phi {
        PhiTriple::Rational(f) => {
            let mut acc = [Complex64::new(0.0, 0.0); 3];
            for (i, fi) in f.iter().enumerate() {
                for (z, _) in fi.finite_poles()? {
                    let w = cycle.winding(z);
                    if w != 0 {
                        acc[i] += Complex64::new(0.0, TAU) * w as f64 * fi.residue(&SpherePoint::Finite(z))?;
                    }
                }
            }
            let scale = complex.iter().chain(acc.iter()).map(|v| v.norm()).fold(1.0, f64::max);
            let mismatch = (0..3).map(|i| (complex[i] - acc[i]).norm()).fold(0.0, f64::max);
            if mismatch > 1e-9 * scale {
                return Err(Error::IdentityFailed {
                    identity: "residue theorem",
                    detail: format!("contour integral and residue sum differ by {mismatch:.3e}"),
                });
            }
            Some(acc)
        }
        PhiTriple::Elliptic(_) => None,
    };
    Ok(PeriodResult { real: complex.map(|v| v.re), complex, residue_sum })
}

pub fn periods(s: &WeierstrassSurface, cycles: &[Cycle]) -> Result<Vec<PeriodResult>> {
    cycles.iter().map(|c| period(s, c)).collect()
}

/// Small circles around the finite punctures and, on the torus, the two
/// lattice cycles. Together they generate the homology of `M` (on the
/// sphere the loop around infinity is the negative sum of the others).
pub fn homology_cycles(s: &WeierstrassSurface) -> Vec<Cycle> {
    let pts = s.puncture_coords();
    let mut out = Vec::new();
    let dist = |a: Complex64, b: Complex64| match s.torus_lattice() {
        Some(t) => t.reduce(a - b).norm(),
        None => (a - b).norm(),
    };
    for (i, p) in pts.iter().enumerate() {
        let sep = pts.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, q)| dist(*p, *q)).fold(2.0, f64::min);
        out.push(Cycle::circle(*p, 0.3 * sep));
    }
    if let Some(t) = s.torus_lattice() {
        let w = t.omega1();
        let b = Complex64::new(0.173, 0.291) * w;
        out.push(Cycle::Polyline(vec![b, b + w]));
        out.push(Cycle::Polyline(vec![b, b + Complex64::new(0.0, w)]));
    }
    out
}

/// Gaussian curvature and the conformal factor `lambda^2` of `ds^2`.
pub fn curvature_at(s: &WeierstrassSurface, z: Complex64) -> Result<(f64, f64)> {
    let l = s.local(z)?;
    let lam = l.conformal_factor();
    if !(lam > 0.0 && lam.is_finite()) {
        return Err(Error::Domain(format!("metric degenerates at {z}")));
    }
    Ok((l.curvature(), lam * lam))
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum TotalCurvature {
    Finite {
        value: f64,
        error: f64,
        /// `-4 pi d`.
        expected: f64,
        /// Values over `M` minus disks of shrinking radius about the punctures.
        partial_sums: Vec<f64>,
        /// Two-step Richardson limit of `partial_sums`.
        extrapolated: f64,
    },
    /// The real periods do not vanish, so the surface lives on an infinite
    /// cover of `M`, every sheet contributing `partial_sums.last()`.
    Divergent {
        partial_sums: Vec<f64>,
        max_real_period: f64,
    },
}

impl TotalCurvature {
    pub fn value(&self) -> Option<f64> {
        match self {
            TotalCurvature::Finite { value, .. } => Some(*value),
            TotalCurvature::Divergent { .. } => None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct TotalCurvatureOptions {
    /// Integrate only over `|z| <= R` (sphere) and skip the period test.
    pub truncate: Option<f64>,
}

fn area_opts() -> QuadOptions {
    QuadOptions { abs_tol: 1e-11, rel_tol: 1e-9, max_intervals: 400 }
}

/// Inner integrals that miss their tolerance are accepted when their error,
/// weighted by the outer measure, stays within budget.
fn area_budget(value: f64) -> f64 {
    1e-8 * value.abs().max(1.0)
}

/// Integral of `f` over the disk `|z - c| <= r`, polar coordinates.
fn disk_integral(f: &(impl Fn(Complex64) -> f64 + Sync), c: Complex64, r: f64) -> Result<(f64, f64)> {
    // the inner error estimates are integrated alongside the values
    let outer = integrate(
        |rho: f64| {
            let inner = integrate(|t: f64| f(c + Complex64::from_polar(rho, t)), 0.0, TAU, area_opts());
            [inner.value * rho, inner.error * rho]
        },
        0.0,
        r,
        area_opts(),
    );
    let [value, inner_err] = outer.value;
    let error = outer.error + inner_err;
    if !outer.converged || !value.is_finite() || error > area_budget(value) {
        return Err(Error::Quadrature { location: format!("disk |z - {c}| <= {r}"), error });
    }
    Ok((value, error))
}

/// Integral over the square cell `corner + [0, w] x [0, i w]`.
fn cell_integral(f: &impl Fn(Complex64) -> f64, corner: Complex64, w: f64) -> Result<(f64, f64)> {
    let outer = integrate(
        |u: f64| {
            let inner = integrate(|v: f64| f(corner + Complex64::new(u, v)), 0.0, w, area_opts());
            [inner.value, inner.error]
        },
        0.0,
        w,
        area_opts(),
    );
    let [value, inner_err] = outer.value;
    let error = outer.error + inner_err;
    if !outer.converged || !value.is_finite() || error > area_budget(value) {
        return Err(Error::Quadrature { location: "fundamental cell".into(), error });
    }
    Ok((value, error))
}

/// `-(2|g'| / (1 + |g|^2))^2`, the curvature form density `K lambda^2`.
fn density(s: &WeierstrassSurface, z: Complex64, at_infinity: bool) -> f64 {
    let l = if at_infinity { s.local_at_infinity_chart(z) } else { s.local(z) };
    match l {
        Ok(l) if l.g.norm() <= 1.0 => -l.gauss_area_density(),
        Ok(l) => {
            // same density computed from 1/g
            let u = l.g.inv();
            let du = -l.dg * u * u;
            -(2.0 * du.norm() / (1.0 + u.norm_sqr())).powi(2)
        }
        Err(_) => f64::NAN,
    }
}

/// `int_M K dA` over an exhaustion by shrinking puncture disks, with
/// Richardson extrapolation in the disk radius.
const EXCLUSION_START: f64 = 0.08;

pub fn total_curvature(s: &WeierstrassSurface, opts: TotalCurvatureOptions) -> Result<TotalCurvature> {
    let d = s.degree()? as f64;
    let expected = -4.0 * PI * d;
    let (full, full_err, punct): (f64, f64, Vec<(Complex64, bool)>) = match s.view() {
        SurfaceView::Sphere { punctures, .. } => {
            let f = |z: Complex64| density(s, z, false);
            let fw = |w: Complex64| density(s, w, true);
            let (a, ea) = disk_integral(&f, Complex64::new(0.0, 0.0), opts.truncate.unwrap_or(1.0).min(1.0))?;
            let (b, eb) = match opts.truncate {
                Some(r) if r <= 1.0 => (0.0, 0.0),
                Some(r) => {
                    // annulus 1 <= |z| <= R is the disk |w| <= 1 minus |w| < 1/R
                    let (x, ex) = disk_integral(&fw, Complex64::new(0.0, 0.0), 1.0)?;
                    let (y, ey) = disk_integral(&fw, Complex64::new(0.0, 0.0), 1.0 / r)?;
                    (x - y, ex + ey)
                }
                None => disk_integral(&fw, Complex64::new(0.0, 0.0), 1.0)?,
            };
            let pts = punctures
                .iter()
                .map(|p| match p {
                    SpherePoint::Infinity => (Complex64::new(0.0, 0.0), true),
                    SpherePoint::Finite(z) => (*z, false),
                })
                .filter(|(z, inf)| opts.truncate.is_none_or(|r| *inf || z.norm() + EXCLUSION_START <= r))
                .filter(|(_, inf)| !(*inf && opts.truncate.is_some()))
                .collect();
            (a + b, ea + eb, pts)
        }
        SurfaceView::Torus { torus, .. } => {
            let w = torus.omega1();
            let f = |z: Complex64| density(s, z, false);
            let (a, ea) = cell_integral(&f, Complex64::new(0.0123, 0.0171) * w, w)?;
            (a, ea, s.puncture_coords().into_iter().map(|z| (z, false)).collect())
        }
    };
    let removed = |eps: f64| -> Result<f64> {
        let mut v = 0.0;
        for (c, inf) in &punct {
            v += if *inf {
                disk_integral(&|w: Complex64| density(s, w, true), *c, eps)?.0
            } else {
                disk_integral(&|z: Complex64| density(s, z, false), *c, eps)?.0
            };
        }
        Ok(v)
    };
    // shrink until the excluded disks hold little curvature, so the sums are
    // in their asymptotic eps^2 regime
    let mut eps0 = EXCLUSION_START;
    let mut first = removed(eps0)?;
    while first.abs() > 0.05 * expected.abs() && eps0 > 1e-4 {
        eps0 *= 0.5;
        first = removed(eps0)?;
    }
    let mut partial_sums = vec![full - first];
    for eps in [eps0 / 2.0, eps0 / 4.0] {
        partial_sums.push(full - removed(eps)?);
    }
    let r1 = (4.0 * partial_sums[1] - partial_sums[0]) / 3.0;
    let r2 = (4.0 * partial_sums[2] - partial_sums[1]) / 3.0;
    let extrapolated = (16.0 * r2 - r1) / 15.0;
    if opts.truncate.is_none() {
        let mut max_real: f64 = 0.0;
        let mut scale: f64 = 1.0;
        for c in homology_cycles(s) {
            let p = period(s, &c)?;
            max_real = max_real.max(p.real.iter().map(|v| v.abs()).fold(0.0, f64::max));
            scale = scale.max(p.complex.iter().map(|v| v.norm()).fold(0.0, f64::max));
        }
        if max_real > 1e-8 * scale {
            return Ok(TotalCurvature::Divergent { partial_sums, max_real_period: max_real });
        }
    }
    // punctures have measure zero, so the full integral is the limit itself
    Ok(TotalCurvature::Finite { value: full, error: full_err, expected, partial_sums, extrapolated })
}
