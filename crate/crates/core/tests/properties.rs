mod common;

use std::f64::consts::PI;

use common::{build_surface, punctures_near, random_map, random_punctures};
use minsurf::analysis::analyze;
use minsurf::covering::{cover_pushforward, CoverSpec};
use minsurf::elliptic::SquareTorus;
use minsurf::exact::{gr_int, QPoly};
use minsurf::io::{surface_from_json, surface_to_json};
use minsurf::nevanlinna::modular_lambda;
use minsurf::poly::{poly_roots, Poly};
use minsurf::{Complex64, Error, Rational64, SpherePoint, WeierstrassSurface};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// A valid random surface from a seed; `None` when the draw is rejected.
fn surface_from_seed(seed: u64, max_deg: usize) -> Option<WeierstrassSurface> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = random_map(&mut rng, max_deg);
    let (pts, inf) = if rng.gen_bool(0.5) { punctures_near(&mut rng, &g) } else { random_punctures(&mut rng) };
    let s = build_surface(&mut rng, &g, &pts, inf, 0..=3)?;
    analyze(&s).ok().filter(|r| r.regularity.pass).map(|_| s)
}

fn finite_point() -> impl Strategy<Value = Complex64> {
    (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(a, b)| c(a, b))
}

fn int_poly() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-5i64..=5, 2..=9).prop_filter("nonconstant", |v| v.iter().skip(1).any(|&x| x != 0))
}

fn qpoly(v: &[i64]) -> QPoly {
    QPoly::new(v.iter().map(|&x| gr_int(x, 0)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn root_multiplicities_sum_to_degree(coeffs in int_poly()) {
        let p = Poly::new(coeffs.iter().map(|&x| c(x as f64, 0.0)).collect());
        let deg = p.degree().unwrap();
        let roots = poly_roots(&p).unwrap();
        prop_assert_eq!(roots.iter().map(|(_, m)| m).sum::<usize>(), deg);
    }

    #[test]
    fn exact_division_identity(a in int_poly(), b in int_poly()) {
        let (a, b) = (qpoly(&a), qpoly(&b));
        let (q, r) = a.divrem(&b);
        prop_assert_eq!(q.mul(&b).add(&r), a.clone());
        prop_assert!(r.is_zero() || r.deg() < b.deg());
        let g = a.gcd(&b);
        prop_assert!(a.divrem(&g).1.is_zero() && b.divrem(&g).1.is_zero());
    }

    #[test]
    fn rational_divisors(seed in any::<u64>(), b in finite_point(), p in finite_point()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_map(&mut rng, 6);
        let f = m.function();
        let d = f.degree();
        prop_assert_eq!(f.zeros_poles().unwrap().degree(), 0);
        prop_assert_eq!(f.ramification_divisor().unwrap().degree(), 2 * d as i64 - 2);
        let fiber = f.fiber(&SpherePoint::Finite(b)).unwrap();
        prop_assert_eq!(fiber.iter().map(|(_, m)| m).sum::<usize>(), d);
        if m.poles.iter().all(|(q, _)| (q.c64() - p).norm() > 0.05) {
            let back = f.fiber(&f.eval_sphere(&SpherePoint::Finite(p))).unwrap();
            prop_assert!(back.iter().any(|(q, _)| q.approx_eq(&SpherePoint::Finite(p), 1e-6)));
        }
    }

    #[test]
    fn residues_sum_to_zero(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_map(&mut rng, 5).function();
        let mut poles: Vec<SpherePoint> = f.finite_poles().unwrap().into_iter().map(|(z, _)| SpherePoint::Finite(z)).collect();
        poles.push(SpherePoint::Infinity);
        let res: Vec<Complex64> = poles.iter().map(|p| f.residue(p).unwrap()).collect();
        let scale = res.iter().map(|r| r.norm()).fold(1.0, f64::max);
        prop_assert!(res.iter().sum::<Complex64>().norm() < 1e-9 * scale);
    }

    #[test]
    fn report_inequalities_hold(seed in any::<u64>()) {
        let Some(s) = surface_from_seed(seed, 5) else { return Ok(()) };
        let r = analyze(&s).unwrap();
        prop_assert!(Rational64::from_integer(r.d_g as i64) <= r.nu_g);
        prop_assert_eq!(r.n_g, 2 * (r.d as i64 + r.genus - 1));
        if r.mu.iter().all(|&m| m >= 1) {
            prop_assert!(r.inv_r <= Rational64::from_integer(1), "1/R = {}", r.inv_r);
            prop_assert!(r.nu_g <= r.bound);
            prop_assert!(Rational64::from_integer(r.d_g as i64) <= r.bound_with_l);
            prop_assert!(r.pass(), "failed: {:?}", r.failed().collect::<Vec<_>>());
        }
    }

    #[test]
    fn associated_family_keeps_invariants(seed in any::<u64>(), theta in 0.0..(2.0 * PI), z in finite_point()) {
        let Some(s) = surface_from_seed(seed, 4) else { return Ok(()) };
        let t = s.associated(theta);
        let (a, b) = (analyze(&s).unwrap(), analyze(&t).unwrap());
        prop_assert_eq!((a.d, a.d_g, a.nu_g, a.inv_r), (b.d, b.d_g, b.nu_g, b.inv_r));
        if let (Ok(l1), Ok(l2)) = (s.local(z), t.local(z)) {
            let (f1, f2) = (l1.conformal_factor(), l2.conformal_factor());
            prop_assert!((f1 - f2).abs() <= 1e-12 * f1.max(1.0));
            prop_assert!(l1.curvature() <= 0.0);
        }
    }

    #[test]
    fn surface_json_round_trip(seed in any::<u64>()) {
        let Some(s) = surface_from_seed(seed, 5) else { return Ok(()) };
        let back = surface_from_json(&surface_to_json(&s).unwrap()).unwrap();
        let (a, b) = (analyze(&s).unwrap(), analyze(&back).unwrap());
        prop_assert_eq!((a.d, a.k, a.d_g, a.nu_g, a.n_g, a.l), (b.d, b.k, b.d_g, b.nu_g, b.n_g, b.l));
        prop_assert_eq!(a.mu, b.mu);
    }

    #[test]
    fn wp_periodic_and_on_curve(x in 0.01..0.99f64, y in 0.01..0.99f64) {
        let t = SquareTorus::standard();
        let w = t.omega1();
        let z = c(x, y) * w;
        let (p, dp) = t.wp(z).unwrap();
        let (p1, _) = t.wp(z + w).unwrap();
        let (p2, _) = t.wp(z + c(0.0, w)).unwrap();
        prop_assert!((p1 - p).norm() < 1e-9 * p.norm().max(1.0));
        prop_assert!((p2 - p).norm() < 1e-9 * p.norm().max(1.0));
        let a = t.a();
        let rhs = 4.0 * p * (p * p - a * a);
        prop_assert!((dp * dp - rhs).norm() < 1e-8 * rhs.norm().max(dp.norm_sqr()).max(1.0));
    }

    #[test]
    fn lambda_functional_equations(re in -1.0..1.0f64, im in 0.3..2.0f64) {
        let tau = c(re, im);
        let l = modular_lambda(tau).unwrap();
        prop_assert!((modular_lambda(tau + 2.0).unwrap() - l).norm() < 1e-10);
        prop_assert!((modular_lambda(-tau.inv()).unwrap() + l - 1.0).norm() < 1e-10);
    }

    #[test]
    fn cover_arithmetic(genus in 0i64..3, k in 1usize..5, d in 1usize..6, m in 1u32..6, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fibers = (0..k)
            .map(|_| {
                let mut left = m;
                let mut f = Vec::new();
                while left > 0 {
                    let x = rng.gen_range(1..=left);
                    f.push(x);
                    left -= x;
                }
                f
            })
            .collect();
        let spec = CoverSpec { m, fibers };
        match cover_pushforward(genus, k, d, &spec) {
            Ok(out) => {
                prop_assert_eq!(out.d, m as usize * d);
                prop_assert_eq!(out.inv_r, Rational64::new(2 * genus - 2 + k as i64, 2 * d as i64));
                if 2 - 2 * genus - (k as i64) < 0 {
                    prop_assert!(out.genus >= genus);
                }
            }
            Err(Error::NotEulerConsistent(_)) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }
}
