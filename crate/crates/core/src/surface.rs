//! Weierstrass data `(h dz, g)` on a punctured compact Riemann surface.

use num_complex::Complex64;

use crate::elliptic::{EllipticFunction, SquareTorus, TorusPoint};
use crate::error::{Error, Result};
use crate::rational::RationalFunction;
use crate::sphere::{SpherePoint, EPS_PT};

/// Borrowed view of the data, split by the compact surface.
#[derive(Clone, Copy, Debug)]
pub enum SurfaceView<'a> {
    Sphere {
        punctures: &'a [SpherePoint],
        g: &'a RationalFunction,
        h: &'a RationalFunction,
    },
    Torus {
        torus: &'a SquareTorus,
        punctures: &'a [TorusPoint],
        g: &'a EllipticFunction,
        h: &'a EllipticFunction,
    },
}

#[derive(Clone, Debug)]
enum Data {
    Sphere {
        punctures: Vec<SpherePoint>,
        g: RationalFunction,
        h: RationalFunction,
        dg: RationalFunction,
    },
    Torus {
        torus: SquareTorus,
        punctures: Vec<TorusPoint>,
        g: EllipticFunction,
        h: EllipticFunction,
        dg: EllipticFunction,
    },
}

/// A Gauss map `g` and the coefficient `h` of `h dz` in the global chart
/// (the affine coordinate on the sphere, the uniformizer on the torus).
#[derive(Clone, Debug)]
pub struct WeierstrassSurface {
    data: Data,
}

/// `g`, `g'` and `h` at one chart point.
#[derive(Clone, Copy, Debug)]
pub struct LocalData {
    pub g: Complex64,
    pub dg: Complex64,
    pub h: Complex64,
}

impl LocalData {
    /// `(phi_1, phi_2, phi_3)` as coefficients of `dz`.
    pub fn phi(&self) -> [Complex64; 3] {
        let (g, h) = (self.g, self.h);
        let i = Complex64::new(0.0, 1.0);
        [h / 2.0 * (1.0 - g * g), i * h / 2.0 * (1.0 + g * g), h * g]
    }

    /// Conformal factor `lambda` with `ds = lambda |dz|`.
    pub fn conformal_factor(&self) -> f64 {
        self.h.norm() * (1.0 + self.g.norm_sqr()) / 2.0
    }

    /// Gaussian curvature.
    pub fn curvature(&self) -> f64 {
        let k = 4.0 * self.dg.norm() / (self.h.norm() * (1.0 + self.g.norm_sqr()).powi(2));
        -k * k
    }

    /// Density of the pulled back spherical area, `(2|g'| / (1 + |g|^2))^2`.
    pub fn gauss_area_density(&self) -> f64 {
        (2.0 * self.dg.norm() / (1.0 + self.g.norm_sqr())).powi(2)
    }
}

fn distinct<P>(pts: &[P], same: impl Fn(&P, &P) -> bool) -> bool {
    (0..pts.len()).all(|i| (i + 1..pts.len()).all(|j| !same(&pts[i], &pts[j])))
}

impl WeierstrassSurface {
    pub fn sphere(punctures: Vec<SpherePoint>, g: RationalFunction, h: RationalFunction) -> Result<Self> {
        if punctures.is_empty() {
            return Err(Error::InvalidData("at least one puncture is required".into()));
        }
        if !distinct(&punctures, |a, b| a.approx_eq(b, EPS_PT)) {
            return Err(Error::InvalidData("punctures must be pairwise distinct".into()));
        }
        if g.is_constant() {
            return Err(Error::ConstantMap);
        }
        if h.is_zero() {
            return Err(Error::ZeroFunction);
        }
        let dg = g.derivative();
        Ok(WeierstrassSurface { data: Data::Sphere { punctures, g, h, dg } })
    }

    pub fn torus(torus: SquareTorus, punctures: Vec<TorusPoint>, g: EllipticFunction, h: EllipticFunction) -> Result<Self> {
        if punctures.is_empty() {
            return Err(Error::InvalidData("at least one puncture is required".into()));
        }
        if punctures.iter().any(|p| matches!(p, TorusPoint::Generic { .. })) {
            return Err(Error::Unsupported("torus punctures must be 2-torsion points".into()));
        }
        if !distinct(&punctures, |a, b| a == b) {
            return Err(Error::InvalidData("punctures must be pairwise distinct".into()));
        }
        if g.is_constant() {
            return Err(Error::ConstantMap);
        }
        if h.is_zero() {
            return Err(Error::ZeroFunction);
        }
        let dg = g.derivative(&torus);
        Ok(WeierstrassSurface { data: Data::Torus { torus, punctures, g, h, dg } })
    }

    pub fn view(&self) -> SurfaceView<'_> {
        match &self.data {
            Data::Sphere { punctures, g, h, .. } => SurfaceView::Sphere { punctures, g, h },
            Data::Torus { torus, punctures, g, h, .. } => SurfaceView::Torus { torus, punctures, g, h },
        }
    }

    pub fn genus(&self) -> i64 {
        match self.data {
            Data::Sphere { .. } => 0,
            Data::Torus { .. } => 1,
        }
    }

    pub fn k(&self) -> usize {
        match &self.data {
            Data::Sphere { punctures, .. } => punctures.len(),
            Data::Torus { punctures, .. } => punctures.len(),
        }
    }

    /// Degree of `g` on the compact surface.
    pub fn degree(&self) -> Result<usize> {
        match &self.data {
            Data::Sphere { g, .. } => Ok(g.degree()),
            Data::Torus { torus, g, .. } => g.degree(torus),
        }
    }

    pub fn torus_lattice(&self) -> Option<&SquareTorus> {
        match &self.data {
            Data::Torus { torus, .. } => Some(torus),
            Data::Sphere { .. } => None,
        }
    }

    /// Same `g`, `h` rotated by `e^{i theta}`.
    pub fn associated(&self, theta: f64) -> Self {
        let rot = Complex64::from_polar(1.0, theta);
        let data = match &self.data {
            Data::Sphere { punctures, g, h, dg } => Data::Sphere {
                punctures: punctures.clone(),
                g: g.clone(),
                h: h.scaled_by(rot),
                dg: dg.clone(),
            },
            Data::Torus { torus, punctures, g, h, dg } => Data::Torus {
                torus: torus.clone(),
                punctures: punctures.clone(),
                g: g.clone(),
                h: h.scaled_by(rot),
                dg: dg.clone(),
            },
        };
        WeierstrassSurface { data }
    }

    /// `g`, `g'`, `h` at a finite chart point.
    pub fn local(&self, z: Complex64) -> Result<LocalData> {
        let out = match &self.data {
            Data::Sphere { g, h, dg, .. } => LocalData { g: g.eval(z), dg: dg.eval(z), h: h.eval(z) },
            Data::Torus { torus, g, h, dg, .. } => {
                let (x, y) = torus.xy(z)?;
                LocalData { g: g.eval_xy(x, y), dg: dg.eval_xy(x, y), h: h.eval_xy(x, y) }
            }
        };
        let finite = |c: Complex64| c.re.is_finite() && c.im.is_finite();
        if !(finite(out.g) && finite(out.dg) && finite(out.h)) {
            return Err(Error::Pole(format!("Weierstrass data singular at {z}")));
        }
        Ok(out)
    }

    /// The sphere data in the chart `w = 1/z`: `g(1/w)` and the coefficient
    /// of `dw`, `-h(1/w) / w^2`.
    pub fn local_at_infinity_chart(&self, w: Complex64) -> Result<LocalData> {
        match &self.data {
            Data::Sphere { .. } => {
                let z = w.inv();
                let l = self.local(z)?;
                Ok(LocalData { g: l.g, dg: -l.dg * z * z, h: -l.h * z * z })
            }
            Data::Torus { .. } => Err(Error::Unsupported("the torus has a single global chart".into())),
        }
    }

    /// `(phi_1, phi_2, phi_3)` at a chart point, as coefficients of `dz`.
    pub fn phi(&self, z: Complex64) -> Result<[Complex64; 3]> {
        Ok(self.local(z)?.phi())
    }

    /// Chart coordinates of the finite punctures (for the torus, of their
    /// representatives in the fundamental cell).
    pub fn puncture_coords(&self) -> Vec<Complex64> {
        match &self.data {
            Data::Sphere { punctures, .. } => punctures.iter().filter_map(|p| p.as_finite()).collect(),
            Data::Torus { torus, punctures, .. } => punctures.iter().filter_map(|p| p.uniformizer(torus)).collect(),
        }
    }

    /// Whether infinity is a puncture (sphere only).
    pub fn punctured_at_infinity(&self) -> bool {
        match &self.data {
            Data::Sphere { punctures, .. } => punctures.iter().any(|p| p.is_infinite()),
            Data::Torus { .. } => false,
        }
    }

    pub fn is_torus(&self) -> bool {
        matches!(self.data, Data::Torus { .. })
    }
}
