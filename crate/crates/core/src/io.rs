//! JSON description of surfaces.
//!
//! ```json
//! {"base": {"kind": "sphere", "punctures": [[0, 1], [0, -1], "inf"]},
//!  "g": {"kind": "rational", "num": [2, 0, 1], "den": [0, 0, 1], "scale": [0, 0.7745966692414834]},
//!  "h": {"kind": "rational", "num": [0, 0, 0, 0, 1], "den": [1, 0, 2, 0, 1]}}
//! ```
//!
//! Coefficients are listed in ascending degree. A scalar is a number, a
//! rational string such as `"-3/5"`, or a pair `[re, im]` of either. On the
//! torus, `{"kind": "elliptic", "case": 1, "j": 1, "sigma": [1, 0]}` gives the
//! Gauss map `sigma / (wp^j wp')` or, for `h`, the matching coefficient
//! (`wp` in case 1, `wp^(j+1)` in case 2). The general torus form is
//! `{"kind": "elliptic", "c": [re, im], "num": [...], "den": [...], "eps": 0}`,
//! meaning `c R(X) Y^eps` with `X = wp/a`, `Y = wp'/a^(3/2)`.

use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::elliptic::{EllipticFunction, SquareTorus, TorusPoint};
use crate::error::{Error, Result};
use crate::exact::{format_rational, gr_from_c64, parse_rational, GaussRat, QPoly};
use crate::rational::RationalFunction;
use crate::sphere::SpherePoint;
use crate::surface::{SurfaceView, WeierstrassSurface};

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidData(msg.into())
}

fn component(v: &Value) -> Result<BigRational> {
    match v {
        Value::Number(n) => {
            let x = n.as_f64().ok_or_else(|| bad(format!("bad number {n}")))?;
            BigRational::from_float(x).ok_or_else(|| bad(format!("non-finite number {n}")))
        }
        Value::String(s) => parse_rational(s),
        _ => Err(bad(format!("expected a number or rational string, got {v}"))),
    }
}

/// Exact scalar: number, rational string, or `[re, im]`.
pub fn parse_scalar(v: &Value) -> Result<GaussRat> {
    match v {
        Value::Array(a) if a.len() == 2 => Ok(Complex::new(component(&a[0])?, component(&a[1])?)),
        Value::Array(a) => Err(bad(format!("complex scalar needs two components, got {}", a.len()))),
        _ => Ok(Complex::new(component(v)?, BigRational::from_integer(0.into()))),
    }
}

pub fn parse_complex(v: &Value) -> Result<Complex64> {
    Ok(crate::exact::gr_to_c64(&parse_scalar(v)?))
}

fn parse_poly(v: Option<&Value>, what: &str) -> Result<QPoly> {
    let a = v.and_then(Value::as_array).ok_or_else(|| bad(format!("{what} must be an array of coefficients")))?;
    Ok(QPoly::new(a.iter().map(parse_scalar).collect::<Result<_>>()?))
}

fn parse_sphere_point(v: &Value) -> Result<SpherePoint> {
    match v {
        Value::String(s) if s == "inf" || s == "infinity" => Ok(SpherePoint::Infinity),
        _ => {
            let z = parse_complex(v)?;
            Ok(SpherePoint::Finite(z))
        }
    }
}

fn parse_torus_point(v: &Value) -> Result<TorusPoint> {
    match v.as_str() {
        Some("lattice") | Some("0") => Ok(TorusPoint::Lattice),
        Some("hp1") => Ok(TorusPoint::HalfPeriod(1)),
        Some("hp2") => Ok(TorusPoint::HalfPeriod(2)),
        Some("hp3") => Ok(TorusPoint::HalfPeriod(3)),
        _ => Err(Error::Unsupported(format!("torus punctures are named 2-torsion points (lattice, hp1, hp2, hp3), got {v}"))),
    }
}

fn parse_rational_fn(v: &Value) -> Result<RationalFunction> {
    let num = parse_poly(v.get("num"), "num")?;
    let den = match v.get("den") {
        Some(d) => parse_poly(Some(d), "den")?,
        None => QPoly::one(),
    };
    if den.is_zero() {
        return Err(bad("denominator is the zero polynomial"));
    }
    let scale = match v.get("scale") {
        Some(s) => parse_complex(s)?,
        None => Complex64::new(1.0, 0.0),
    };
    RationalFunction::new(scale, num, den)
}

fn kind(v: &Value) -> Result<&str> {
    v.get("kind").and_then(Value::as_str).ok_or_else(|| bad(format!("missing \"kind\" in {v}")))
}

fn parse_elliptic(v: &Value, t: &SquareTorus, is_g: bool) -> Result<EllipticFunction> {
    if let Some(case) = v.get("case") {
        let case = case.as_u64().ok_or_else(|| bad("case must be 1 or 2"))?;
        let j = v.get("j").and_then(Value::as_u64).ok_or_else(|| bad("j must be a nonnegative integer"))? as u32;
        if !(1..=2).contains(&case) {
            return Err(Error::Parameter(format!("case must be 1 or 2, got {case}")));
        }
        if case == 2 && (j < 2 || j % 2 != 0) {
            return Err(Error::Parameter(format!("case 2 needs even j >= 2, got {j}")));
        }
        return if is_g {
            let sigma = match v.get("sigma") {
                Some(s) => parse_complex(s)?,
                None => Complex64::new(1.0, 0.0),
            };
            if sigma == Complex64::new(0.0, 0.0) {
                return Err(Error::Parameter("sigma must be nonzero".into()));
            }
            EllipticFunction::costa_gauss(t, j, sigma)
        } else {
            Ok(EllipticFunction::wp_pow(t, if case == 1 { 1 } else { j as i32 + 1 }))
        };
    }
    let c = match v.get("c") {
        Some(c) => parse_complex(c)?,
        None => Complex64::new(1.0, 0.0),
    };
    let eps = v.get("eps").and_then(Value::as_u64).unwrap_or(0);
    if eps > 1 {
        return Err(bad(format!("eps must be 0 or 1, got {eps}")));
    }
    EllipticFunction::new(c, parse_rational_fn(v)?, eps as u8)
}

/// Reads a surface description.
pub fn surface_from_value(v: &Value) -> Result<WeierstrassSurface> {
    let base = v.get("base").ok_or_else(|| bad("missing \"base\""))?;
    let g = v.get("g").ok_or_else(|| bad("missing \"g\""))?;
    let h = v.get("h").ok_or_else(|| bad("missing \"h\""))?;
    match kind(base)? {
        "sphere" => {
            let pts = base.get("punctures").and_then(Value::as_array).ok_or_else(|| bad("sphere punctures must be an array"))?;
            let pts = pts.iter().map(parse_sphere_point).collect::<Result<Vec<_>>>()?;
            for f in [g, h] {
                if kind(f)? != "rational" {
                    return Err(bad("sphere data must be rational functions"));
                }
            }
            WeierstrassSurface::sphere(pts, parse_rational_fn(g)?, parse_rational_fn(h)?)
        }
        "torus-square" => {
            let t = match base.get("a") {
                Some(a) => SquareTorus::with_a(a.as_f64().ok_or_else(|| bad("a must be a number"))?)?,
                None => SquareTorus::standard(),
            };
            let pts = match base.get("punctures") {
                Some(Value::String(s)) if s == "standard4" => TorusPoint::standard4(),
                Some(Value::String(s)) if s == "standard3" => TorusPoint::standard3(),
                Some(Value::Array(a)) => a.iter().map(parse_torus_point).collect::<Result<_>>()?,
                other => return Err(bad(format!("torus punctures must be \"standard4\", \"standard3\" or a list, got {other:?}"))),
            };
            for f in [g, h] {
                if kind(f)? != "elliptic" {
                    return Err(bad("torus data must be elliptic functions"));
                }
            }
            WeierstrassSurface::torus(t.clone(), pts, parse_elliptic(g, &t, true)?, parse_elliptic(h, &t, false)?)
        }
        k => Err(bad(format!("unknown base kind {k:?}"))),
    }
}

pub fn surface_from_json(text: &str) -> Result<WeierstrassSurface> {
    surface_from_value(&serde_json::from_str(text)?)
}

fn scalar_json(z: &GaussRat) -> Value {
    json!([format_rational(&z.re), format_rational(&z.im)])
}

fn poly_json(q: &QPoly) -> Value {
    Value::Array(q.coeffs().iter().map(scalar_json).collect())
}

fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

/// Exact description: the floating point scale is folded into the numerator.
fn rational_json(f: &RationalFunction) -> Result<Value> {
    let num = f.num().scale(&gr_from_c64(f.scale())?);
    Ok(json!({"kind": "rational", "num": poly_json(&num), "den": poly_json(f.den())}))
}

fn elliptic_json(f: &EllipticFunction) -> Result<Value> {
    let r = f.r();
    let num = r.num().scale(&gr_from_c64(r.scale())?);
    Ok(json!({"kind": "elliptic", "c": complex_json(f.c()), "num": poly_json(&num), "den": poly_json(r.den()), "eps": f.eps()}))
}

pub fn surface_to_value(s: &WeierstrassSurface) -> Result<Value> {
    Ok(match s.view() {
        SurfaceView::Sphere { punctures, g, h } => {
            let pts: Vec<Value> = punctures
                .iter()
                .map(|p| match p {
                    SpherePoint::Infinity => json!("inf"),
                    SpherePoint::Finite(z) => complex_json(*z),
                })
                .collect();
            json!({"base": {"kind": "sphere", "punctures": pts}, "g": rational_json(g)?, "h": rational_json(h)?})
        }
        SurfaceView::Torus { torus, punctures, g, h } => {
            let pts: Vec<Value> = punctures.iter().map(|p| json!(p.to_string())).collect();
            json!({
                "base": {"kind": "torus-square", "a": torus.a(), "punctures": pts},
                "g": elliptic_json(g)?,
                "h": elliptic_json(h)?,
            })
        }
    })
}

pub fn surface_to_json(s: &WeierstrassSurface) -> Result<String> {
    Ok(serde_json::to_string_pretty(&surface_to_value(s)?)?)
}
