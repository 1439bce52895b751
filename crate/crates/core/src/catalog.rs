//! Named surfaces with their expected invariants.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use num_rational::Rational64;
use serde::Serialize;

use crate::analysis::{fmt_rat, AnalysisReport};
use crate::elliptic::{EllipticFunction, SquareTorus, TorusPoint};
use crate::error::{Error, Result};
use crate::exact::{gr_from_c64, QPoly};
use crate::rational::RationalFunction;
use crate::sphere::{SpherePoint, EPS_PT};
use crate::surface::WeierstrassSurface;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `g = z`, `h = 1/z^2` on the sphere minus `{0, inf}`.
pub fn make_catenoid() -> WeierstrassSurface {
    WeierstrassSurface::sphere(
        vec![SpherePoint::finite(0.0, 0.0), SpherePoint::Infinity],
        RationalFunction::identity(),
        RationalFunction::from_ints(&[1], &[0, 0, 1]),
    )
    .expect("valid data")
}

pub fn make_helicoid() -> WeierstrassSurface {
    make_catenoid().associated(FRAC_PI_2)
}

pub fn make_enneper() -> WeierstrassSurface {
    WeierstrassSurface::sphere(vec![SpherePoint::Infinity], RationalFunction::identity(), RationalFunction::constant(c(1.0, 0.0)))
        .expect("valid data")
}

/// `sigma^2` for the three-ended family, or why `(a, t)` is not admissible.
pub fn miyaoka_sato_sigma2(a: f64, t: f64) -> Result<f64> {
    if !(a.is_finite() && t.is_finite()) {
        return Err(Error::Parameter("a and t must be finite".into()));
    }
    if (a - 1.0) * (t - 1.0) == 0.0 {
        return Err(Error::Parameter(format!("(a-1)(t-1) must be nonzero, got a = {a}, t = {t}")));
    }
    let den = a * ((t - 1.0) * a + 4.0);
    if den == 0.0 {
        return Err(Error::Parameter(format!("sigma^2 = (t+3)/(a((t-1)a+4)) is undefined at a = {a}, t = {t}")));
    }
    let s2 = (t + 3.0) / den;
    if s2 >= 0.0 {
        return Err(Error::Parameter(format!("sigma^2 = (t+3)/(a((t-1)a+4)) = {s2} must be negative")));
    }
    Ok(s2)
}

/// `g = sigma (z^2 + 1 + a(t-1)) / (z^2 + t)`,
/// `h = (z^2 + t)^2 / (z^2 + 1)^2` on the sphere minus `{i, -i, inf}`.
pub fn make_miyaoka_sato(a: f64, t: f64) -> Result<WeierstrassSurface> {
    let s2 = miyaoka_sato_sigma2(a, t)?;
    let sigma = c(0.0, (-s2).sqrt());
    let lift = |x: f64| gr_from_c64(c(x, 0.0));
    let zero = lift(0.0)?;
    let one = lift(1.0)?;
    let num = QPoly::new(vec![lift(1.0 + a * (t - 1.0))?, zero.clone(), one.clone()]);
    let den = QPoly::new(vec![lift(t)?, zero.clone(), one.clone()]);
    let g = RationalFunction::new(sigma, num, den.clone())?;
    let z21 = QPoly::from_ints(&[1, 0, 1]);
    let h = RationalFunction::new(c(1.0, 0.0), den.pow(2), z21.pow(2))?;
    WeierstrassSurface::sphere(vec![SpherePoint::finite(0.0, 1.0), SpherePoint::finite(0.0, -1.0), SpherePoint::Infinity], g, h)
}

/// `g = z`, `h = 1 / prod (z - a_j)` on the plane minus the points.
pub fn make_voss(points: &[Complex64]) -> Result<WeierstrassSurface> {
    if !(2..=3).contains(&points.len()) {
        return Err(Error::Parameter(format!("Voss data need 2 or 3 finite points, got {}", points.len())));
    }
    for (i, p) in points.iter().enumerate() {
        if !(p.re.is_finite() && p.im.is_finite()) {
            return Err(Error::Parameter(format!("point {p} is not finite")));
        }
        if points[..i].iter().any(|q| SpherePoint::Finite(*q).approx_eq(&SpherePoint::Finite(*p), EPS_PT)) {
            return Err(Error::Parameter(format!("points must be distinct, {p} repeats")));
        }
    }
    let poles = points.iter().map(|p| Ok((gr_from_c64(*p)?, 1))).collect::<Result<Vec<_>>>()?;
    let h = RationalFunction::from_root_data(c(1.0, 0.0), &[], &poles)?;
    let mut punctures: Vec<SpherePoint> = points.iter().map(|p| SpherePoint::Finite(*p)).collect();
    punctures.push(SpherePoint::Infinity);
    WeierstrassSurface::sphere(punctures, RationalFunction::identity(), h)
}

/// `g = sigma / (wp^j wp')` with `h dz = wp d wp / wp'` (case 1) or
/// `wp^(j+1) d wp / wp'` (case 2) on the square torus minus the 2-torsion
/// points.
pub fn make_costa_type(case: u8, j: u32, sigma: Complex64) -> Result<WeierstrassSurface> {
    match case {
        1 if j >= 1 => {}
        2 if j >= 2 && j % 2 == 0 => {}
        1 => return Err(Error::Parameter("case 1 needs j >= 1".into())),
        2 => return Err(Error::Parameter(format!("case 2 needs even j >= 2, got {j}"))),
        _ => return Err(Error::Parameter(format!("case must be 1 or 2, got {case}"))),
    }
    costa_data(case, j, sigma, TorusPoint::standard4())
}

/// Costa's surface: `j = 0` of case 1, with the end over `wp = 0` filled in.
pub fn make_costa(sigma: Complex64) -> Result<WeierstrassSurface> {
    costa_data(1, 0, sigma, TorusPoint::standard3())
}

fn costa_data(case: u8, j: u32, sigma: Complex64, punctures: Vec<TorusPoint>) -> Result<WeierstrassSurface> {
    if sigma == c(0.0, 0.0) || !(sigma.re.is_finite() && sigma.im.is_finite()) {
        return Err(Error::Parameter("sigma must be finite and nonzero".into()));
    }
    let t = SquareTorus::standard();
    let g = EllipticFunction::costa_gauss(&t, j, sigma)?;
    let h = EllipticFunction::wp_pow(&t, if case == 1 { 1 } else { j as i32 + 1 });
    WeierstrassSurface::torus(t, punctures, g, h)
}

/// Expected invariants of a catalog surface.
#[derive(Clone, Debug, Serialize)]
pub struct Golden {
    pub d: usize,
    #[serde(rename = "G")]
    pub genus: i64,
    pub k: usize,
    #[serde(rename = "invR")]
    pub inv_r: String,
    #[serde(rename = "D_g")]
    pub d_g: usize,
    pub nu_g: String,
    pub l: usize,
    pub n_g: i64,
    pub exceptional: Vec<SpherePoint>,
}

impl Golden {
    /// Field-by-field comparison; returns the mismatching field names.
    pub fn mismatches(&self, r: &AnalysisReport) -> Vec<String> {
        let mut out = Vec::new();
        let mut cmp = |name: &str, ok: bool| {
            if !ok {
                out.push(name.to_string());
            }
        };
        cmp("d", self.d == r.d);
        cmp("G", self.genus == r.genus);
        cmp("k", self.k == r.k);
        cmp("invR", self.inv_r == fmt_rat(&r.inv_r));
        cmp("D_g", self.d_g == r.d_g);
        cmp("nu_g", self.nu_g == fmt_rat(&r.nu_g));
        cmp("l", self.l == r.l);
        cmp("n_g", self.n_g == r.n_g);
        let same = self.exceptional.len() == r.exceptional_values.len()
            && self.exceptional.iter().all(|v| r.exceptional_values.iter().any(|w| w.approx_eq(v, 1e-8)));
        cmp("exceptional", same);
        out
    }
}

#[derive(Clone, Debug, Default)]
pub struct CatalogParams {
    pub a: Option<f64>,
    pub t: Option<f64>,
    pub j: Option<u32>,
    pub case: Option<u8>,
    pub sigma: Option<Complex64>,
    pub points: Option<Vec<Complex64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CatalogInfo {
    pub name: &'static str,
    pub description: &'static str,
    pub parameters: &'static str,
}

pub const ENTRIES: [CatalogInfo; 8] = [
    CatalogInfo { name: "catenoid", description: "g = z, h = 1/z^2 on C minus {0}", parameters: "" },
    CatalogInfo { name: "helicoid", description: "associate of the catenoid at theta = pi/2", parameters: "" },
    CatalogInfo { name: "enneper", description: "g = z, h = 1 on C", parameters: "" },
    CatalogInfo {
        name: "miyaoka_sato",
        description: "three-ended genus 0 family on P^1 minus {i, -i, inf}; alias kawakami",
        parameters: "--a (default -1), --t (default 0)",
    },
    CatalogInfo { name: "voss3", description: "g = z, h = 1/(z(z-1)) on P^1 minus {0, 1, inf}", parameters: "" },
    CatalogInfo { name: "voss4", description: "g = z, h = 1/(z(z-1)(z+1)) on P^1 minus {0, 1, -1, inf}", parameters: "" },
    CatalogInfo {
        name: "costa_type",
        description: "g = sigma/(wp^j wp') on the square torus minus the 2-torsion points",
        parameters: "--case 1|2 (default 1), --j (default 1), --sigma (default 1)",
    },
    CatalogInfo { name: "costa", description: "g = sigma/wp', h dz = wp dz on the square torus minus three points", parameters: "--sigma (default 1)" },
];

fn canonical(name: &str) -> Option<&'static str> {
    let name = name.trim_start_matches('@');
    match name {
        "kawakami" | "miyaoka-sato" => Some("miyaoka_sato"),
        "costa-type" => Some("costa_type"),
        _ => ENTRIES.iter().find(|e| e.name == name).map(|e| e.name),
    }
}

/// Builds a catalog surface by name (a leading `@` is accepted).
pub fn make(name: &str, p: &CatalogParams) -> Result<WeierstrassSurface> {
    let one = c(1.0, 0.0);
    match canonical(name) {
        Some("catenoid") => Ok(make_catenoid()),
        Some("helicoid") => Ok(make_helicoid()),
        Some("enneper") => Ok(make_enneper()),
        Some("miyaoka_sato") => make_miyaoka_sato(p.a.unwrap_or(-1.0), p.t.unwrap_or(0.0)),
        Some("voss3") => make_voss(p.points.as_deref().unwrap_or(&[c(0.0, 0.0), one])),
        Some("voss4") => make_voss(p.points.as_deref().unwrap_or(&[c(0.0, 0.0), one, -one])),
        Some("costa_type") => make_costa_type(p.case.unwrap_or(1), p.j.unwrap_or(1), p.sigma.unwrap_or(one)),
        Some("costa") => make_costa(p.sigma.unwrap_or(one)),
        _ => Err(Error::InvalidData(format!("unknown catalog entry {name:?}"))),
    }
}

/// Golden values of the default member of each entry.
pub fn golden(name: &str) -> Option<Golden> {
    let r = |n: i64, d: i64| fmt_rat(&Rational64::new(n, d));
    let zero = SpherePoint::finite(0.0, 0.0);
    let one = SpherePoint::finite(1.0, 0.0);
    let inf = SpherePoint::Infinity;
    let g = match canonical(name)? {
        "catenoid" | "helicoid" => Golden { d: 1, genus: 0, k: 2, inv_r: r(0, 1), d_g: 2, nu_g: r(2, 1), l: 0, n_g: 0, exceptional: vec![zero, inf] },
        "enneper" => Golden { d: 1, genus: 0, k: 1, inv_r: r(-1, 2), d_g: 1, nu_g: r(1, 1), l: 0, n_g: 0, exceptional: vec![inf] },
        "miyaoka_sato" => {
            let sigma = (3.0f64 / 5.0).sqrt();
            Golden {
                d: 2,
                genus: 0,
                k: 3,
                inv_r: r(1, 4),
                d_g: 2,
                nu_g: r(5, 2),
                l: 1,
                n_g: 2,
                exceptional: vec![SpherePoint::finite(0.0, sigma), SpherePoint::finite(0.0, -sigma)],
            }
        }
        "voss3" => Golden { d: 1, genus: 0, k: 3, inv_r: r(1, 2), d_g: 3, nu_g: r(3, 1), l: 0, n_g: 0, exceptional: vec![zero, one, inf] },
        "voss4" => Golden {
            d: 1,
            genus: 0,
            k: 4,
            inv_r: r(1, 1),
            d_g: 4,
            nu_g: r(4, 1),
            l: 0,
            n_g: 0,
            exceptional: vec![zero, one, SpherePoint::finite(-1.0, 0.0), inf],
        },
        "costa_type" => Golden { d: 5, genus: 1, k: 4, inv_r: r(2, 5), d_g: 2, nu_g: r(2, 1), l: 4, n_g: 10, exceptional: vec![zero, inf] },
        "costa" => Golden { d: 3, genus: 1, k: 3, inv_r: r(1, 2), d_g: 1, nu_g: r(1, 1), l: 4, n_g: 6, exceptional: vec![zero] },
        _ => return None,
    };
    Some(g)
}
