//! Randomized invariants of the ambient geometry, the natural charts and the
//! quadrature.

use std::f64::consts::PI;

use bcvhelix::bcv::{AmbientPoint, BcvSpace};
use bcvhelix::bour::{build_chart, BourSeed};
use bcvhelix::numerics::{quad_adaptive, Interval, Tolerances};
use bcvhelix::oracle::{natural_form_deviation, param_grid, SurfaceChart};
use bcvhelix::profile::MetricProfile;
use proptest::prelude::*;

fn space() -> impl Strategy<Value = BcvSpace> {
    (-2.0f64..2.0, -1.0f64..1.0).prop_map(|(k, t)| BcvSpace::new(k, t).unwrap())
}

/// A point inside the domain of `sp`, given polar coordinates in the unit square.
fn point(sp: &BcvSpace, s: f64, th: f64, z: f64) -> AmbientPoint {
    let rmax = if sp.kappa < 0.0 { 1.8 / (-sp.kappa).sqrt() } else { 2.0 };
    let r = s * rmax;
    AmbientPoint::new(r * th.cos(), r * th.sin(), z)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn frame_is_orthonormal(sp in space(), s in 0.0f64..1.0, th in 0.0f64..(2.0 * PI), z in -3.0f64..3.0) {
        let p = point(&sp, s, th, z);
        let f = sp.orthonormal_frame(p).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                let g = sp.inner(p, &f[i], &f[j]).unwrap();
                prop_assert!((g - want).abs() < 1e-12, "<e{i}, e{j}> = {g}");
            }
        }
    }

    #[test]
    fn killing_fields_preserve_metric(sp in space(), s in 0.0f64..1.0, th in 0.0f64..(2.0 * PI), z in -3.0f64..3.0, a in -2.0f64..2.0) {
        let p = point(&sp, s, th, z);
        for k in 0..4 {
            let d = sp.killing_defect(|q| sp.killing_basis(q).map(|b| b[k]), p, 1e-3).unwrap();
            prop_assert!(d < 1e-6, "basis field {k}: {d}");
        }
        let d = sp.killing_defect(|q| Ok(sp.helicoidal_field(a, q)), p, 1e-3).unwrap();
        prop_assert!(d < 1e-6, "helicoidal field: {d}");
    }

    #[test]
    fn quadrature_is_additive(lo in -2.0f64..0.0, mid in 0.0f64..1.0, hi in 1.0f64..3.0, w in 0.5f64..4.0) {
        let f = |x: f64| Ok((w * x).sin() + x * x);
        let q = |a, b| quad_adaptive(&f, a, b, 1e-12, 1e-12).unwrap().value;
        prop_assert!((q(lo, mid) + q(mid, hi) - q(lo, hi)).abs() < 1e-10);
        prop_assert!((q(lo, hi) + q(hi, lo)).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn natural_chart_pulls_back_metric(
        kt in prop::sample::select(vec![(0.0, 0.0), (0.0, 0.5), (1.0, 0.25), (-1.0, 0.0)]),
        m in 0.7f64..1.3,
        a in -0.4f64..0.4,
    ) {
        let sp = BcvSpace::new(kt.0, kt.1).unwrap();
        let profile = MetricProfile::catenoid(1.0);
        let tol = Tolerances::default();
        let seed = BourSeed::new(profile.clone(), m, a, Interval::new(-0.8, 0.8).unwrap()).unwrap();
        let chart = build_chart(&sp, &seed, &tol);
        prop_assume!(chart.is_ok());
        let chart = chart.unwrap();
        let u = chart.domain().inset(0.05).unwrap();
        let grid = param_grid(u, Interval::new(-PI, PI).unwrap(), 9, 9);
        let sc = SurfaceChart::natural(chart, Some(u), Interval::new(-PI, PI).unwrap()).unwrap();
        let d = natural_form_deviation(&sc, &profile, &grid, &tol).unwrap();
        prop_assert!(d < 1e-6, "first form deviation {d}");
    }
}
