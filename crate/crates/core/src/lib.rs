//! Gauss map analysis for pseudo-algebraic minimal surfaces.
//!
//! The crate works with Weierstrass data `(h dz, g)` defined on a compact
//! Riemann surface of genus 0 (the sphere) or 1 (the square torus) with
//! finitely many punctures. It computes degrees, ramification, exceptional
//! values and the totally ramified value number of `g`, checks the
//! resulting upper bounds in exact rational arithmetic, and realizes the
//! surfaces numerically through the Weierstrass-Enneper formula.

pub mod analysis;
pub mod builder;
pub mod catalog;
pub mod covering;
pub mod divisor;
pub mod elliptic;
pub mod error;
pub mod exact;
pub mod io;
pub mod mesh;
pub mod nevanlinna;
pub mod poly;
pub mod quad;
pub mod rational;
pub mod sphere;
pub mod surface;

pub use num_complex::Complex64;
pub use num_rational::Rational64;

pub use error::{Error, Result};
pub use sphere::SpherePoint;
pub use surface::WeierstrassSurface;
