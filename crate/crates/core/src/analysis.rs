//! Value distribution of the Gauss map: exceptional values, totally ramified
//! values, ramification counts, and the resulting upper bounds.
//!
//! Every value of `g` that matters is collected into a [`ValueClass`]
//! holding its whole fiber over the compact surface. Classes come from two
//! sources. Values known exactly (0, infinity, and the values at punctures
//! and at the distinguished points of the chart) get exact fibers. Every
//! other critical point of `g` is grouped by its numerical value; such a
//! value is never taken at a puncture, so its fiber consists of the grouped
//! critical points plus `d - sum e` unramified points of `M`.

use std::fmt::Write as _;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};

use crate::divisor::DivisorPoint;
use crate::elliptic::{EllipticFunction, SquareTorus, TorusPoint};
use crate::error::{Error, Result};
use crate::exact::{gr_int, ExactPoint, QPoly};
use crate::poly::simple_roots;
use crate::quad::{integrate, QuadOptions};
use crate::rational::{locate_roots, RationalFunction};
use crate::sphere::{SpherePoint, EPS_PT};
use crate::surface::{SurfaceView, WeierstrassSurface};

pub(crate) fn ser_rat<S: Serializer>(r: &Rational64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_rat(r))
}

fn ser_opt_rat<S: Serializer>(r: &Option<Rational64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&fmt_rat(r)),
        None => s.serialize_none(),
    }
}

pub fn fmt_rat(r: &Rational64) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn rat(n: i64) -> Rational64 {
    Rational64::from_integer(n)
}

/// One preimage of a value.
#[derive(Clone, Debug, Serialize)]
pub struct Preimage {
    pub point: String,
    pub mult: usize,
    pub at_puncture: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValueClass {
    pub value: SpherePoint,
    pub preimages: Vec<Preimage>,
    /// Unramified preimages in `M` that were not located individually.
    pub unlocated_simple: usize,
}

impl ValueClass {
    fn in_m(&self) -> impl Iterator<Item = &Preimage> {
        self.preimages.iter().filter(|p| !p.at_puncture)
    }

    pub fn is_exceptional(&self) -> bool {
        self.unlocated_simple == 0 && self.in_m().next().is_none()
    }

    /// Minimum multiplicity over preimages in `M`, when all of them branch.
    pub fn totally_ramified(&self) -> Option<usize> {
        if self.is_exceptional() || self.unlocated_simple > 0 {
            return None;
        }
        let nu = self.in_m().map(|p| p.mult).min()?;
        (nu >= 2).then_some(nu)
    }

    pub fn ramified_in_m(&self) -> bool {
        self.in_m().any(|p| p.mult >= 2)
    }

    /// Total branching `sum (e - 1)` over the whole fiber.
    pub fn branching(&self) -> usize {
        self.preimages.iter().map(|p| p.mult - 1).sum()
    }

    fn branching_in_m(&self) -> usize {
        self.in_m().map(|p| p.mult - 1).sum()
    }

    pub fn total(&self) -> usize {
        self.preimages.iter().map(|p| p.mult).sum::<usize>() + self.unlocated_simple
    }
}

fn group_by_value<P>(points: Vec<(P, usize, SpherePoint)>) -> Vec<(SpherePoint, Vec<(P, usize)>)> {
    let mut groups: Vec<(SpherePoint, Vec<(P, usize)>)> = Vec::new();
    for (p, e, v) in points {
        match groups.iter_mut().find(|(w, _)| w.approx_eq(&v, EPS_PT)) {
            Some((_, g)) => g.push((p, e)),
            None => groups.push((v, vec![(p, e)])),
        }
    }
    groups
}

fn numeric_classes(d: usize, groups: Vec<(SpherePoint, Vec<(String, usize)>)>) -> Result<Vec<ValueClass>> {
    let mut out = Vec::new();
    for (value, pts) in groups {
        let located: usize = pts.iter().map(|(_, e)| e).sum();
        if located > d {
            return Err(Error::IdentityFailed {
                identity: "fiber cardinality",
                detail: format!("critical points over {value} have total multiplicity {located} > d = {d}"),
            });
        }
        out.push(ValueClass {
            value,
            preimages: pts.into_iter().map(|(point, mult)| Preimage { point, mult, at_puncture: false }).collect(),
            unlocated_simple: d - located,
        });
    }
    Ok(out)
}

fn sphere_classes(punctures: &[SpherePoint], g: &RationalFunction) -> Result<Vec<ValueClass>> {
    let d = g.degree();
    let finite_p: Vec<(SpherePoint, crate::exact::GaussRat)> = punctures
        .iter()
        .filter_map(|p| match ExactPoint::from_sphere(p) {
            Ok(ExactPoint::Finite(z)) => Some(Ok((*p, z))),
            Ok(ExactPoint::Infinity) => None,
            Err(e) => Some(Err(e)),
        })
        .collect::<Result<_>>()?;
    let inf_punctured = punctures.iter().any(|p| p.is_infinite());

    let mut values = vec![ExactPoint::Finite(gr_int(0, 0)), ExactPoint::Infinity, g.normalized_value(&ExactPoint::Infinity)];
    for (_, z) in &finite_p {
        values.push(g.normalized_value(&ExactPoint::Finite(z.clone())));
    }
    let mut uniq: Vec<ExactPoint> = Vec::new();
    for v in values {
        if !uniq.contains(&v) {
            uniq.push(v);
        }
    }

    let mut classes = Vec::new();
    let mut fiber_polys = Vec::new();
    for w in &uniq {
        let fib = g.fiber_exact(w)?;
        fiber_polys.push(fib.finite_poly());
        let mut pre = Vec::new();
        if fib.at_infinity > 0 {
            pre.push(Preimage { point: SpherePoint::Infinity.to_string(), mult: fib.at_infinity, at_puncture: inf_punctured });
        }
        for (f, m) in &fib.factors {
            let mut rest = f.clone();
            for (sp, z) in &finite_p {
                let (q, k) = rest.deflate(z);
                if k > 0 {
                    pre.push(Preimage { point: sp.to_string(), mult: *m, at_puncture: true });
                    rest = q;
                }
            }
            if rest.is_constant() {
                continue;
            }
            for z in simple_roots(&rest.to_poly())? {
                let pt = SpherePoint::Finite(z);
                if let Some(p) = punctures.iter().find(|p| p.approx_eq(&pt, EPS_PT)) {
                    return Err(Error::AmbiguousPuncture { point: pt, puncture: *p });
                }
                pre.push(Preimage { point: pt.to_string(), mult: *m, at_puncture: false });
            }
        }
        classes.push(ValueClass { value: g.denormalize(w), preimages: pre, unlocated_simple: 0 });
    }

    let mut w = g.wronskian();
    for fp in &fiber_polys {
        loop {
            let c = w.gcd(fp);
            if c.is_constant() {
                break;
            }
            w = w.exact_div(&c);
        }
    }
    let mut crit = Vec::new();
    if !w.is_constant() {
        for (z, m) in locate_roots(&w)? {
            crit.push((SpherePoint::Finite(z).to_string(), m + 1, SpherePoint::Finite(g.eval(z))));
        }
    }
    classes.extend(numeric_classes(d, group_by_value(crit))?);
    Ok(classes)
}

fn torus_classes(t: &SquareTorus, punctures: &[TorusPoint], g: &EllipticFunction) -> Result<Vec<ValueClass>> {
    let d = g.degree(t)?;
    let div = g.divisor(t)?;
    let is_p = |p: &TorusPoint| punctures.iter().any(|q| q.same_point(p));
    let class_of = |value: SpherePoint, pts: Vec<(TorusPoint, usize)>| ValueClass {
        value,
        preimages: pts
            .iter()
            .map(|(p, m)| Preimage { point: p.to_string(), mult: *m, at_puncture: is_p(p) })
            .collect(),
        unlocated_simple: 0,
    };
    let mut fibers: Vec<Vec<(TorusPoint, usize)>> = Vec::new();
    let mut classes = Vec::new();
    let zeros: Vec<_> = div.zeros().map(|(p, m)| (*p, *m as usize)).collect();
    let poles: Vec<_> = div.poles().map(|(p, m)| (*p, (-m) as usize)).collect();
    classes.push(class_of(SpherePoint::Finite(Complex64::zero()), zeros.clone()));
    classes.push(class_of(SpherePoint::Infinity, poles.clone()));
    fibers.push(zeros);
    fibers.push(poles);

    let mut seen: Vec<ExactPoint> = Vec::new();
    for p in TorusPoint::standard4() {
        let Some(w) = g.normalized_value_at(&p) else { continue };
        if w == ExactPoint::Infinity || w == ExactPoint::Finite(gr_int(0, 0)) || seen.contains(&w) {
            continue;
        }
        let fib = g.fiber_normalized(&w, t)?;
        classes.push(class_of(g.denormalize(&w), fib.clone()));
        fibers.push(fib);
        seen.push(w);
    }

    let crit: Vec<_> = g
        .critical_points(t)?
        .into_iter()
        .filter(|(p, _, _)| !fibers.iter().flatten().any(|(q, _)| q.same_point(p)))
        .map(|(p, e, v)| {
            if is_p(&p) {
                Err(Error::InvalidData(format!("unexpected critical puncture {p}")))
            } else {
                Ok((p.to_string(), e, v))
            }
        })
        .collect::<Result<_>>()?;
    classes.extend(numeric_classes(d, group_by_value(crit))?);
    Ok(classes)
}

/// All value classes of the Gauss map.
pub fn value_classes(s: &WeierstrassSurface) -> Result<Vec<ValueClass>> {
    match s.view() {
        SurfaceView::Sphere { punctures, g, .. } => sphere_classes(punctures, g),
        SurfaceView::Torus { torus, punctures, g, .. } => torus_classes(torus, punctures, g),
    }
}

/// Values omitted by `g` on `M`.
pub fn exceptional_values(s: &WeierstrassSurface) -> Result<Vec<SpherePoint>> {
    Ok(value_classes(s)?.into_iter().filter(|c| c.is_exceptional()).map(|c| c.value).collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct TotallyRamified {
    pub value: SpherePoint,
    /// `None` for an exceptional value (weight one).
    pub nu: Option<usize>,
}

/// Totally ramified values (exceptional ones with `nu = None`) and `nu_g`.
pub fn totally_ramified_values(s: &WeierstrassSurface) -> Result<(Vec<TotallyRamified>, Rational64)> {
    let classes = value_classes(s)?;
    let mut out = Vec::new();
    let mut nu_g = Rational64::zero();
    for c in &classes {
        if c.is_exceptional() {
            out.push(TotallyRamified { value: c.value, nu: None });
            nu_g += rat(1);
        } else if let Some(nu) = c.totally_ramified() {
            out.push(TotallyRamified { value: c.value, nu: Some(nu) });
            nu_g += rat(1) - Rational64::new(1, nu as i64);
        }
    }
    Ok((out, nu_g))
}

/// `1/R = (G - 1 + k/2) / d`.
pub fn inv_ratio(genus: i64, k: usize, d: usize) -> Rational64 {
    Rational64::new(2 * genus - 2 + k as i64, 2 * d as i64)
}

pub fn ratio_r(s: &WeierstrassSurface) -> Result<Rational64> {
    Ok(inv_ratio(s.genus(), s.k(), s.degree()?))
}

#[derive(Clone, Debug, Serialize)]
pub struct PunctureInfo {
    pub point: String,
    pub ord_g: i64,
    pub ord_hdz: i64,
    /// Pole order of `h dz`.
    pub mu_divisor: i64,
    /// Pole order of the metric `|h| (1 + |g|^2) |dz|`.
    pub mu: i64,
    /// How completeness at this end was established: "divisor" or "metric".
    pub tier: String,
}

fn puncture_orders(s: &WeierstrassSurface) -> Vec<(String, i64, i64)> {
    match s.view() {
        SurfaceView::Sphere { punctures, g, h } => punctures
            .iter()
            .map(|p| {
                let e = ExactPoint::from_sphere(p).expect("finite floats lift exactly");
                let dz = if p.is_infinite() { -2 } else { 0 };
                (p.to_string(), g.order_at(&e), h.order_at(&e) + dz)
            })
            .collect(),
        SurfaceView::Torus { torus, punctures, g, h } => punctures
            .iter()
            .map(|p| (p.to_string(), g.order_at(p, torus), h.order_at(p, torus)))
            .collect(),
    }
}

/// Pole orders at the punctures and the completeness verdict.
pub fn completeness_divisor_check(s: &WeierstrassSurface) -> Result<(Vec<PunctureInfo>, bool)> {
    let mut out = Vec::new();
    let mut pass = true;
    for (i, (point, ord_g, ord_hdz)) in puncture_orders(s).into_iter().enumerate() {
        let mu_divisor = -ord_hdz;
        let mu = mu_divisor - 2 * ord_g.min(0);
        let tier = if mu_divisor >= 1 {
            "divisor"
        } else {
            let diverges = metric_ray_diverges(s, i)?;
            if diverges != (mu >= 1) {
                return Err(Error::IdentityFailed {
                    identity: "metric completeness",
                    detail: format!("ray length at {point} disagrees with metric pole order {mu}"),
                });
            }
            "metric"
        };
        pass &= mu >= 1;
        out.push(PunctureInfo { point, ord_g, ord_hdz, mu_divisor, mu, tier: tier.into() });
    }
    Ok((out, pass))
}

/// Numerical test for infinite length of a ray into puncture `idx`: the
/// length gained between radii 1e-9 and 1e-8 is compared with that between
/// 1e-8 and 1e-7. A convergent integral shrinks tenfold per decade, a
/// divergent one does not shrink. The decades sit deep because a pole of `g`
/// with a small residue only dominates the metric very close to the end.
pub fn metric_ray_diverges(s: &WeierstrassSurface, idx: usize) -> Result<bool> {
    let (center, infinite) = match s.view() {
        SurfaceView::Sphere { punctures, .. } => match punctures[idx] {
            SpherePoint::Infinity => (Complex64::zero(), true),
            SpherePoint::Finite(z) => (z, false),
        },
        SurfaceView::Torus { torus, punctures, .. } => (punctures[idx].uniformizer(torus).expect("2-torsion puncture"), false),
    };
    let dir = Complex64::from_polar(1.0, 0.6180339887);
    let lambda = |t: f64| -> f64 {
        let z = center + dir * t;
        let l = if infinite { s.local_at_infinity_chart(z) } else { s.local(z) };
        l.map(|l| l.conformal_factor()).unwrap_or(f64::NAN)
    };
    let seg = |a: f64, b: f64| -> Result<f64> {
        // integrate in log t
        let r = integrate(|u: f64| lambda(u.exp()) * u.exp(), a.ln(), b.ln(), QuadOptions { abs_tol: 0.0, rel_tol: 1e-8, max_intervals: 200 });
        if !r.value.is_finite() {
            return Err(Error::Quadrature { location: format!("ray into puncture {idx}"), error: r.error });
        }
        Ok(r.value)
    };
    let outer = seg(1e-8, 1e-7)?;
    let inner = seg(1e-9, 1e-8)?;
    Ok(inner >= 0.5 * outer)
}

#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub point: String,
    pub ord_g: i64,
    pub ord_hdz: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RegularityReport {
    pub pass: bool,
    pub witnesses: Vec<Witness>,
}

fn strip_punctures(q: &QPoly, punctures: &[crate::exact::GaussRat]) -> QPoly {
    punctures.iter().fold(q.clone(), |acc, p| acc.deflate(p).0)
}

/// Poles of `g` of order `m` in `M` must be zeros of `h dz` of order `2m`,
/// and `h dz` has no other zeros and no poles in `M`.
pub fn regularity_check(s: &WeierstrassSurface) -> Result<RegularityReport> {
    match s.view() {
        SurfaceView::Sphere { punctures, g, h } => {
            let finite: Vec<_> = punctures
                .iter()
                .filter_map(|p| match ExactPoint::from_sphere(p) {
                    Ok(ExactPoint::Finite(z)) => Some(z),
                    _ => None,
                })
                .collect();
            let a = strip_punctures(h.num(), &finite).monic();
            let b = strip_punctures(g.den(), &finite);
            let hp = strip_punctures(h.den(), &finite);
            let mut pass = hp.is_constant() && a == b.pow(2).monic();
            let mut witnesses = Vec::new();
            if !pass {
                let za = if a.is_constant() { Vec::new() } else { locate_roots(&a)? };
                let zb = if b.is_constant() { Vec::new() } else { locate_roots(&b)? };
                let mut pts: Vec<Complex64> = za.iter().chain(zb.iter()).map(|(z, _)| *z).collect();
                if !hp.is_constant() {
                    for (z, m) in locate_roots(&hp)? {
                        witnesses.push(Witness { point: SpherePoint::Finite(z).to_string(), ord_g: 0, ord_hdz: -(m as i64) });
                    }
                }
                pts.dedup_by(|x, y| SpherePoint::Finite(*x).approx_eq(&SpherePoint::Finite(*y), EPS_PT));
                let mut done: Vec<Complex64> = Vec::new();
                for z in pts {
                    if done.iter().any(|w| (w - z).norm() <= EPS_PT * z.norm().max(1.0)) {
                        continue;
                    }
                    done.push(z);
                    let near = |v: &[(Complex64, usize)]| {
                        v.iter().filter(|(w, _)| (w - z).norm() <= EPS_PT * z.norm().max(1.0)).map(|(_, m)| *m as i64).sum::<i64>()
                    };
                    let (ma, mb) = (near(&za), near(&zb));
                    if ma != 2 * mb {
                        witnesses.push(Witness { point: SpherePoint::Finite(z).to_string(), ord_g: -mb, ord_hdz: ma });
                    }
                }
            }
            if !punctures.iter().any(|p| p.is_infinite()) {
                let og = g.order_at(&ExactPoint::Infinity);
                let oh = h.order_at(&ExactPoint::Infinity) - 2;
                if oh != -2 * og.min(0) {
                    pass = false;
                    witnesses.push(Witness { point: SpherePoint::Infinity.to_string(), ord_g: og, ord_hdz: oh });
                }
            }
            Ok(RegularityReport { pass, witnesses })
        }
        SurfaceView::Torus { torus, punctures, g, h } => {
            let dh = h.divisor(torus)?;
            let dg = g.divisor(torus)?;
            let mut pts: Vec<TorusPoint> = Vec::new();
            for (p, _) in dh.entries().iter().chain(dg.poles()) {
                if !pts.iter().any(|q| q.same_point(p)) && !punctures.iter().any(|q| q.same_point(p)) {
                    pts.push(*p);
                }
            }
            let mut witnesses = Vec::new();
            for p in pts {
                let (og, oh) = (dg.mult_at(&p), dh.mult_at(&p));
                if oh != -2 * og.min(0) {
                    witnesses.push(Witness { point: p.to_string(), ord_g: og, ord_hdz: oh });
                }
            }
            Ok(RegularityReport { pass: witnesses.is_empty(), witnesses })
        }
    }
}

/// Ramification divisor degree of `g`, computed geometrically.
fn ramification_degree(s: &WeierstrassSurface) -> Result<i64> {
    match s.view() {
        SurfaceView::Sphere { g, .. } => Ok(g.ramification_divisor()?.degree()),
        SurfaceView::Torus { torus, g, .. } => Ok(g.ramification(torus)?.degree()),
    }
}

/// Degree of the divisor of `h dz` on the compact surface.
fn differential_degree(s: &WeierstrassSurface) -> Result<i64> {
    match s.view() {
        SurfaceView::Sphere { h, .. } => Ok(h.zeros_poles()?.degree() - 2),
        SurfaceView::Torus { torus, h, .. } => Ok(h.divisor(torus)?.degree()),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Equalities {
    pub exceptional_bound: bool,
    pub exceptional_bound_with_l: bool,
    pub ramified_bound: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub d: usize,
    #[serde(rename = "G")]
    pub genus: i64,
    pub k: usize,
    pub mu: Vec<i64>,
    pub punctures: Vec<PunctureInfo>,
    pub algebraic_type: bool,
    #[serde(rename = "invR", serialize_with = "ser_rat")]
    pub inv_r: Rational64,
    #[serde(rename = "R", serialize_with = "ser_opt_rat")]
    pub r: Option<Rational64>,
    #[serde(rename = "D_g")]
    pub d_g: usize,
    pub exceptional_values: Vec<SpherePoint>,
    pub totally_ramified_values: Vec<TotallyRamified>,
    #[serde(serialize_with = "ser_rat")]
    pub nu_g: Rational64,
    pub l: usize,
    pub l_0: usize,
    pub n_r: usize,
    pub n_g: i64,
    pub n_0: i64,
    pub n_b: i64,
    /// Branching of `g` at points of `M`.
    pub interior_branching: i64,
    #[serde(serialize_with = "ser_rat")]
    pub bound: Rational64,
    #[serde(serialize_with = "ser_rat")]
    pub bound_with_l: Rational64,
    pub equalities: Equalities,
    pub regularity: RegularityReport,
    pub checks: Vec<Check>,
    #[serde(skip)]
    pub classes: Vec<ValueClass>,
}

impl AnalysisReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Human readable summary with the zero/pole table at the punctures.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let r = self.r.map_or("-".to_string(), |r| fmt_rat(&r));
        let _ = writeln!(s, "G = {}   k = {}   d = {}   1/R = {}   R = {}", self.genus, self.k, self.d, fmt_rat(&self.inv_r), r);
        let exc: Vec<String> = self.exceptional_values.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(s, "D_g = {}   exceptional: {{{}}}", self.d_g, exc.join(", "));
        let tr: Vec<String> = self
            .totally_ramified_values
            .iter()
            .filter_map(|t| t.nu.map(|nu| format!("{} (nu={nu})", t.value)))
            .collect();
        let _ = writeln!(s, "nu_g = {}   totally ramified: {{{}}}", fmt_rat(&self.nu_g), tr.join(", "));
        let _ = writeln!(s, "l = {}   n_g = {}   n_0 = {}   n_b = {}", self.l, self.n_g, self.n_0, self.n_b);
        let _ = writeln!(s, "2+2/R = {}   2+2/R-l/d = {}", fmt_rat(&self.bound), fmt_rat(&self.bound_with_l));
        let _ = writeln!(s);
        let _ = writeln!(s, "{:<28} {:>6} {:>8} {:>6} {:>4}  tier", "puncture", "ord g", "ord hdz", "mu_div", "mu");
        for p in &self.punctures {
            let _ = writeln!(s, "{:<28} {:>6} {:>8} {:>6} {:>4}  {}", p.point, p.ord_g, p.ord_hdz, p.mu_divisor, p.mu, p.tier);
        }
        let _ = writeln!(s);
        for c in &self.checks {
            let _ = writeln!(s, "[{}] {:<26} {}", if c.pass { "pass" } else { "FAIL" }, c.name, c.detail);
        }
        s
    }
}

fn check(name: &str, pass: bool, detail: String) -> Check {
    Check { name: name.into(), pass, detail }
}

/// Full analysis. Violated checks are recorded in the report, not raised.
pub fn analyze(s: &WeierstrassSurface) -> Result<AnalysisReport> {
    let d = s.degree()?;
    let genus = s.genus();
    let k = s.k();
    let classes = value_classes(s)?;
    for c in &classes {
        if c.total() != d {
            return Err(Error::IdentityFailed {
                identity: "fiber cardinality",
                detail: format!("fiber over {} has {} points with multiplicity, d = {d}", c.value, c.total()),
            });
        }
    }
    let regularity = regularity_check(s)?;
    let (punctures, complete) = completeness_divisor_check(s)?;
    let mu: Vec<i64> = punctures.iter().map(|p| p.mu).collect();
    let algebraic_type = mu.iter().all(|m| *m >= 2);

    let exceptional: Vec<&ValueClass> = classes.iter().filter(|c| c.is_exceptional()).collect();
    let d_g = exceptional.len();
    let mut totally = Vec::new();
    let mut nu_g = rat(d_g as i64);
    let (mut l, mut l_0, mut n_r) = (0, 0, 0);
    let (mut n_0, mut n_b, mut interior) = (0i64, 0i64, 0i64);
    for c in &classes {
        interior += c.branching_in_m() as i64;
        if c.is_exceptional() {
            totally.push(TotallyRamified { value: c.value, nu: None });
            n_0 += c.branching() as i64;
            continue;
        }
        n_b += c.branching() as i64;
        if c.ramified_in_m() {
            l += 1;
        }
        if let Some(nu) = c.totally_ramified() {
            totally.push(TotallyRamified { value: c.value, nu: Some(nu) });
            nu_g += rat(1) - Rational64::new(1, nu as i64);
            l_0 += 1;
            n_r += c.branching();
        }
    }
    let n_g = ramification_degree(s)?;
    let inv_r = inv_ratio(genus, k, d);
    let r = (inv_r > Rational64::zero()).then(|| inv_r.recip());
    let bound = rat(2) + rat(2) * inv_r;
    let bound_with_l = bound - Rational64::new(l as i64, d as i64);
    let dg = rat(d_g as i64);
    let d_i = d as i64;

    let mut checks = Vec::new();
    checks.push(check(
        "regularity",
        regularity.pass,
        if regularity.pass { "poles of g matched by double zeros of hdz".into() } else { format!("{} offending point(s)", regularity.witnesses.len()) },
    ));
    checks.push(check("completeness", complete, format!("mu = {mu:?}")));
    let dd = differential_degree(s)?;
    checks.push(check("differential_degree", dd == 2 * genus - 2, format!("deg(hdz) = {dd}, 2G-2 = {}", 2 * genus - 2)));
    let mu_sum: i64 = mu.iter().sum();
    checks.push(check(
        "metric_degree",
        2 * d_i - mu_sum == 2 * genus - 2,
        format!("2d - sum mu = {}, 2G-2 = {}", 2 * d_i - mu_sum, 2 * genus - 2),
    ));
    checks.push(check(
        "riemann_hurwitz",
        n_g == 2 * (d_i + genus - 1) && n_g == n_0 + n_b,
        format!("n_g = {n_g}, 2(d+G-1) = {}, n_0 + n_b = {}", 2 * (d_i + genus - 1), n_0 + n_b),
    ));
    checks.push(check(
        "puncture_count",
        k as i64 >= d_i * d_g as i64 - n_0,
        format!("k = {k} >= d r_0 - n_0 = {}", d_i * d_g as i64 - n_0),
    ));
    checks.push(check("branching_count", n_b >= l as i64, format!("n_b = {n_b} >= l = {l}")));
    checks.push(check("ratio_bound", inv_r <= rat(1), format!("1/R = {} <= 1", fmt_rat(&inv_r))));
    checks.push(check("exceptional_bound", dg <= bound, format!("D_g = {d_g} <= {}", fmt_rat(&bound))));
    checks.push(check(
        "exceptional_bound_with_l",
        dg <= bound_with_l,
        format!("D_g = {d_g} <= {}", fmt_rat(&bound_with_l)),
    ));
    checks.push(check("ramified_bound", nu_g <= bound, format!("nu_g = {} <= {}", fmt_rat(&nu_g), fmt_rat(&bound))));
    checks.push(check(
        "chain",
        dg <= nu_g && nu_g <= rat(4),
        format!("D_g = {d_g} <= nu_g = {} <= 4", fmt_rat(&nu_g)),
    ));
    if algebraic_type {
        checks.push(check("algebraic_strict", nu_g < rat(4), format!("nu_g = {} < 4", fmt_rat(&nu_g))));
    }
    let _ = Signed::abs(&inv_r);

    Ok(AnalysisReport {
        d,
        genus,
        k,
        mu,
        punctures,
        algebraic_type,
        inv_r,
        r,
        d_g,
        exceptional_values: exceptional.iter().map(|c| c.value).collect(),
        totally_ramified_values: totally,
        nu_g,
        l,
        l_0,
        n_r,
        n_g,
        n_0,
        n_b,
        interior_branching: interior,
        bound,
        bound_with_l,
        equalities: Equalities {
            exceptional_bound: dg == bound,
            exceptional_bound_with_l: dg == bound_with_l,
            ramified_bound: nu_g == bound,
        },
        regularity,
        checks,
        classes,
    })
}

const BOUND_CHECKS: [&str; 5] = ["ratio_bound", "exceptional_bound", "exceptional_bound_with_l", "ramified_bound", "chain"];

/// Analysis that fails on the first violated check.
pub fn check_bounds(s: &WeierstrassSurface) -> Result<AnalysisReport> {
    let rep = analyze(s)?;
    if let Some(c) = rep.failed().next() {
        let name: &'static str = BOUND_CHECKS
            .iter()
            .chain(["algebraic_strict"].iter())
            .find(|n| **n == c.name)
            .copied()
            .unwrap_or("");
        if !name.is_empty() {
            return Err(Error::BoundViolated { equation: name, detail: c.detail.clone() });
        }
        let identity: &'static str = match c.name.as_str() {
            "regularity" => "regularity",
            "completeness" => "completeness",
            "riemann_hurwitz" => "riemann_hurwitz",
            "differential_degree" => "differential_degree",
            "metric_degree" => "metric_degree",
            "puncture_count" => "puncture_count",
            _ => "branching_count",
        };
        return Err(Error::IdentityFailed { identity, detail: c.detail.clone() });
    }
    Ok(rep)
}

#[derive(Clone, Debug, Serialize)]
pub struct HurwitzCheck {
    pub n_g: i64,
    pub n_0: i64,
    pub n_b: i64,
    pub pass: bool,
}

pub fn riemann_hurwitz_check(s: &WeierstrassSurface) -> Result<HurwitzCheck> {
    let rep = analyze(s)?;
    let pass = ["riemann_hurwitz", "puncture_count", "branching_count"]
        .iter()
        .all(|n| rep.check(n).is_some_and(|c| c.pass));
    Ok(HurwitzCheck { n_g: rep.n_g, n_0: rep.n_0, n_b: rep.n_b, pass })
}

#[derive(Clone, Debug, Serialize)]
pub struct UnicityReport {
    pub values: Vec<SpherePoint>,
    /// Number of points of `M` over each value.
    pub delta: Vec<usize>,
    pub q: usize,
    #[serde(serialize_with = "ser_rat")]
    pub bound: Rational64,
    pub sum_delta: usize,
    pub two_d: usize,
    /// `q d <= k + sum delta + n_g`.
    pub counting_pass: bool,
    pub pass: bool,
}

fn fiber_in_m(g: &RationalFunction, c: &SpherePoint, punctures: &[SpherePoint]) -> Result<Vec<SpherePoint>> {
    Ok(g.fiber(c)?
        .into_iter()
        .map(|(p, _)| p)
        .filter(|p| !punctures.iter().any(|q| q.approx_eq(p, EPS_PT)))
        .collect())
}

fn same_set(a: &[SpherePoint], b: &[SpherePoint]) -> bool {
    a.iter().all(|p| b.iter().any(|q| q.approx_eq(p, EPS_PT))) && b.iter().all(|p| a.iter().any(|q| q.approx_eq(p, EPS_PT)))
}

/// Values whose preimages in `M` agree for two Gauss maps on one base.
pub fn unicity_scan(s1: &WeierstrassSurface, s2: &WeierstrassSurface) -> Result<UnicityReport> {
    let (SurfaceView::Sphere { punctures: p1, g: g1, .. }, SurfaceView::Sphere { punctures: p2, g: g2, .. }) = (s1.view(), s2.view())
    else {
        return Err(Error::Unsupported("unicity scan is implemented for sphere bases".into()));
    };
    if !same_set(p1, p2) {
        return Err(Error::InvalidData("the two surfaces must have the same punctures".into()));
    }
    let d = g1.degree();
    if g2.degree() != d {
        return Err(Error::InvalidData(format!("degrees differ: {d} vs {}", g2.degree())));
    }
    let diff = g1.sub(g2)?;
    if diff.is_zero() {
        return Err(Error::MapsCoincide);
    }
    let mut candidates = vec![SpherePoint::Infinity, g1.eval_sphere(&SpherePoint::Infinity)];
    if !diff.num().is_constant() {
        for (z, _) in locate_roots(diff.num())? {
            candidates.push(g1.eval_sphere(&SpherePoint::Finite(z)));
        }
    }
    let e1 = exceptional_values(s1)?;
    let e2 = exceptional_values(s2)?;
    candidates.extend(e1.iter().filter(|v| e2.iter().any(|w| w.approx_eq(v, EPS_PT))));
    let mut uniq: Vec<SpherePoint> = Vec::new();
    for c in candidates {
        if !uniq.iter().any(|u| u.approx_eq(&c, EPS_PT)) {
            uniq.push(c);
        }
    }
    let mut values = Vec::new();
    let mut delta = Vec::new();
    for c in uniq {
        let f1 = fiber_in_m(g1, &c, p1)?;
        let f2 = fiber_in_m(g2, &c, p1)?;
        if same_set(&f1, &f2) {
            values.push(c);
            delta.push(f1.len());
        }
    }
    let q = values.len();
    let k = p1.len();
    let bound = rat(4) + rat(2) * inv_ratio(0, k, d);
    let sum_delta: usize = delta.iter().sum();
    let n_g = 2 * d as i64 - 2;
    let counting_pass = (q * d) as i64 <= k as i64 + sum_delta as i64 + n_g;
    let pass = rat(q as i64) <= bound && sum_delta <= 2 * d && counting_pass;
    Ok(UnicityReport { values, delta, q, bound, sum_delta, two_d: 2 * d, counting_pass, pass })
}

#[derive(Clone, Debug, Serialize)]
pub struct Diagnosis {
    /// Whether the surface is of algebraic type, so that the clauses apply.
    pub applicable: bool,
    pub clauses: Vec<Check>,
    /// No branch point of `g` lies in `M`.
    pub branch_points_at_ends: bool,
    pub message: String,
}

impl Diagnosis {
    pub fn pass(&self) -> bool {
        self.clauses.iter().all(|c| c.pass)
    }
}

/// Consequences of the bounds for algebraic-type data: `D_g <= 2` in genus
/// zero, and in genus one `D_g = 3` forces `d = k`, no branching in `M` and
/// embedded ends.
pub fn classify_algebraic(rep: &AnalysisReport) -> Diagnosis {
    let mut clauses = Vec::new();
    let at_ends = rep.interior_branching == 0;
    if rep.algebraic_type {
        if rep.genus == 0 {
            clauses.push(check("genus0_exceptional", rep.d_g <= 2, format!("D_g = {} <= 2", rep.d_g)));
        }
        if rep.genus == 1 && rep.d_g == 3 {
            clauses.push(check("genus1_degree", rep.d == rep.k, format!("d = {} = k = {}", rep.d, rep.k)));
            clauses.push(check("genus1_unbranched", at_ends && rep.l == 0, format!("interior branching {}, l = {}", rep.interior_branching, rep.l)));
            clauses.push(check("genus1_embedded_ends", rep.mu.iter().all(|m| *m == 2), format!("mu = {:?}", rep.mu)));
        }
    }
    let message = if !rep.algebraic_type {
        "not of algebraic type; no clause applies".to_string()
    } else if at_ends {
        "all branch points of g are located at the end points".to_string()
    } else {
        format!("g branches in M (total {})", rep.interior_branching)
    };
    Diagnosis { applicable: rep.algebraic_type, clauses, branch_points_at_ends: at_ends, message }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::gr_ratio;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sp(re: f64, im: f64) -> SpherePoint {
        SpherePoint::finite(re, im)
    }

    /// g = sigma (z^2 + 2) / z^2, h = z^4 / (z^2 + 1)^2 on the sphere minus {i, -i, inf}.
    fn kawakami() -> WeierstrassSurface {
        let sigma = c(0.0, (3.0f64 / 5.0).sqrt());
        let g = RationalFunction::new(sigma, QPoly::from_ints(&[2, 0, 1]), QPoly::monomial(2)).unwrap();
        let h = RationalFunction::from_ints(&[0, 0, 0, 0, 1], &[1, 0, 2, 0, 1]);
        WeierstrassSurface::sphere(vec![sp(0.0, 1.0), sp(0.0, -1.0), SpherePoint::Infinity], g, h).unwrap()
    }

    #[test]
    fn kawakami_report() {
        let r = analyze(&kawakami()).unwrap();
        assert!(r.pass(), "{}", r.to_text());
        assert_eq!((r.d, r.k, r.genus, r.d_g, r.l, r.n_g), (2, 3, 0, 2, 1, 2));
        assert_eq!(r.inv_r, Rational64::new(1, 4));
        assert_eq!(r.nu_g, Rational64::new(5, 2));
        assert!(r.equalities.exceptional_bound_with_l && r.equalities.ramified_bound);
        assert_eq!((r.n_0, r.n_b), (1, 1));
        assert_eq!(r.mu, vec![2, 2, 2]);
        let tr: Vec<_> = r.totally_ramified_values.iter().filter(|t| t.nu.is_some()).collect();
        assert_eq!(tr.len(), 1);
        assert!(tr[0].value.is_infinite());
    }

    #[test]
    fn enneper_and_catenoid() {
        let g = RationalFunction::identity();
        let enneper = WeierstrassSurface::sphere(vec![SpherePoint::Infinity], g.clone(), RationalFunction::constant(c(1.0, 0.0))).unwrap();
        let r = analyze(&enneper).unwrap();
        assert_eq!(r.d_g, 1);
        assert_eq!(r.nu_g, rat(1));
        assert_eq!(r.exceptional_values, vec![SpherePoint::Infinity]);
        assert!(r.pass(), "{}", r.to_text());

        let cat = WeierstrassSurface::sphere(vec![sp(0.0, 0.0), SpherePoint::Infinity], g, RationalFunction::from_ints(&[1], &[0, 0, 1])).unwrap();
        let r = analyze(&cat).unwrap();
        assert!(r.pass(), "{}", r.to_text());
        assert_eq!(r.mu, vec![2, 2]);
        assert_eq!(r.punctures[1].mu_divisor, 0);
        assert_eq!(r.punctures[1].tier, "metric");
        assert_eq!(r.inv_r, rat(0));
    }

    #[test]
    fn z_squared_on_twice_punctured_sphere() {
        // g = z^2, h = 1/z^3: mu = 2 at both ends
        let s = WeierstrassSurface::sphere(
            vec![sp(0.0, 0.0), SpherePoint::Infinity],
            RationalFunction::monomial(c(1.0, 0.0), 2),
            RationalFunction::from_ints(&[1], &[0, 0, 0, 1]),
        )
        .unwrap();
        let r = analyze(&s).unwrap();
        assert_eq!(r.nu_g, rat(2));
        assert_eq!(r.n_g, 2);
        assert!(r.pass(), "{}", r.to_text());
    }

    #[test]
    fn broken_regularity_is_reported() {
        let s = WeierstrassSurface::sphere(vec![sp(0.0, 0.0)], RationalFunction::identity(), RationalFunction::constant(c(1.0, 0.0))).unwrap();
        let r = regularity_check(&s).unwrap();
        assert!(!r.pass);
        assert_eq!(r.witnesses.len(), 1);
        assert_eq!(r.witnesses[0].point, "inf");
    }

    #[test]
    fn voss_four_ends() {
        // g = z, h = 1 / (z (z - 1) (z + 1))
        let h = RationalFunction::new(c(1.0, 0.0), QPoly::one(), QPoly::from_ints(&[0, -1, 0, 1])).unwrap();
        let s = WeierstrassSurface::sphere(vec![sp(-1.0, 0.0), sp(0.0, 0.0), sp(1.0, 0.0), SpherePoint::Infinity], RationalFunction::identity(), h)
            .unwrap();
        let r = analyze(&s).unwrap();
        assert_eq!(r.d_g, 4);
        assert_eq!(r.inv_r, rat(1));
        assert_eq!(r.mu, vec![1, 1, 1, 1]);
        assert!(r.equalities.exceptional_bound);
        assert!(r.pass(), "{}", r.to_text());
    }

    #[test]
    fn unicity_worked_pairs() {
        let base = vec![sp(1.0, 0.0), sp(-1.0, 0.0), sp(2.0, 0.0), SpherePoint::Infinity];
        let h = RationalFunction::constant(c(1.0, 0.0));
        let s1 = WeierstrassSurface::sphere(base.clone(), RationalFunction::identity(), h.clone()).unwrap();
        let s2 = WeierstrassSurface::sphere(base, RationalFunction::monomial(c(-1.0, 0.0), 1), h.clone()).unwrap();
        let u = unicity_scan(&s1, &s2).unwrap();
        assert_eq!(u.q, 4);
        assert_eq!(u.bound, rat(6));
        assert!(u.pass);

        let base = vec![sp(0.0, 0.0), SpherePoint::Infinity];
        let s1 = WeierstrassSurface::sphere(base.clone(), RationalFunction::identity(), h.clone()).unwrap();
        let s2 = WeierstrassSurface::sphere(base, RationalFunction::from_ints(&[1], &[0, 1]), h).unwrap();
        let u = unicity_scan(&s1, &s2).unwrap();
        assert_eq!(u.q, 4);
        assert_eq!(u.bound, rat(4));
        assert!(u.pass);
        assert!(matches!(unicity_scan(&s1, &s1), Err(Error::MapsCoincide)));
    }

    #[test]
    fn ambiguous_puncture_is_rejected() {
        // puncture at 1 + 1e-12 while g = z - 1 vanishes at 1 exactly
        let g = RationalFunction::new(c(1.0, 0.0), QPoly::new(vec![gr_ratio((-1, 1), (0, 1)), gr_int(1, 0)]), QPoly::one()).unwrap();
        let s = WeierstrassSurface::sphere(vec![sp(1.0 + 1e-12, 0.0), SpherePoint::Infinity], g, RationalFunction::constant(c(1.0, 0.0))).unwrap();
        assert!(matches!(value_classes(&s), Err(Error::AmbiguousPuncture { .. })));
    }

    #[test]
    fn classifier_on_genus_zero() {
        let r = analyze(&kawakami()).unwrap();
        let dgn = classify_algebraic(&r);
        assert!(dgn.applicable && dgn.pass());
        assert!(!dgn.branch_points_at_ends);
    }
}
