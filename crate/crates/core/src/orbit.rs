//! Orbit space of the helicoidal action `X = ∂θ + a∂z`.
//!
//! A profile curve `u ↦ (ξ₁(u), ξ₂(u))` in the orbit space sweeps out the
//! surface `(r, θ, z) = (ξ₁, θ, ξ₂ + aθ)`. Everything here is expressed
//! through the orbit metric `g̃ = dξ₁²/B² + ξ₁²/Q dξ₂²` with
//! `Q = ξ₁² + (aB − τξ₁²)²` and the volume function `ω = √Q / B`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bcv::BcvSpace;
use crate::error::{GeomError, Result};
use crate::numerics::{diff_central_within, Interval, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HelicoidalAction {
    pub space: BcvSpace,
    pub a: f64,
}

/// Position and first derivatives of a profile curve at one abscissa.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub xi1: f64,
    pub xi2: f64,
    pub dxi1: f64,
    pub dxi2: f64,
}

type CurveFn = Arc<dyn Fn(f64) -> Result<CurvePoint> + Send + Sync>;

#[derive(Clone)]
enum Source {
    Analytic(CurveFn),
    /// Cubic Hermite through position and derivative samples.
    Sampled { u: Vec<f64>, pts: Vec<CurvePoint> },
}

/// Arc-length parametrized curve in the orbit space.
#[derive(Clone)]
pub struct ProfileCurve {
    source: Source,
    domain: Interval,
}

impl fmt::Debug for ProfileCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.source {
            Source::Analytic(_) => "analytic".to_string(),
            Source::Sampled { u, .. } => format!("{} samples", u.len()),
        };
        f.debug_struct("ProfileCurve").field("domain", &self.domain).field("source", &kind).finish()
    }
}

/// Number of abscissae at which analytic curves are checked on construction.
const ANALYTIC_CHECKS: usize = 101;

impl HelicoidalAction {
    pub fn new(space: BcvSpace, a: f64) -> Result<Self> {
        if !a.is_finite() {
            return Err(GeomError::InvalidInput(format!("non-finite pitch {a}")));
        }
        Ok(Self { space, a })
    }

    pub fn rotational(space: BcvSpace) -> Self {
        Self { space, a: 0.0 }
    }

    pub fn scaling(&self, xi1: f64) -> Result<f64> {
        self.space.scaling_factor(xi1 * xi1)
    }

    /// `aB − τξ₁²`, the part of `X` not absorbed by the rotation.
    pub fn twist(&self, xi1: f64) -> Result<f64> {
        Ok(self.a * self.scaling(xi1)? - self.space.tau * xi1 * xi1)
    }

    /// `Q = ξ₁² + (aB − τξ₁²)²`.
    pub fn orbit_q(&self, xi1: f64) -> Result<f64> {
        let w = self.twist(xi1)?;
        Ok(xi1 * xi1 + w * w)
    }

    /// `(g̃₁₁, g̃₂₂)` of the orbit metric.
    pub fn orbital_metric(&self, xi1: f64) -> Result<(f64, f64)> {
        let b = self.scaling(xi1)?;
        let q = self.orbit_q(xi1)?;
        if q <= 0.0 {
            return Err(GeomError::DegenerateOrbit { u: f64::NAN });
        }
        Ok((1.0 / (b * b), xi1 * xi1 / q))
    }

    /// `∂g̃₂₂/∂ξ₁`.
    pub fn dg22_dxi1(&self, xi1: f64) -> Result<f64> {
        let w = self.twist(xi1)?;
        let q = xi1 * xi1 + w * w;
        let db = 0.5 * self.space.kappa * xi1;
        let dq = 2.0 * xi1 + 2.0 * w * (self.a * db - 2.0 * self.space.tau * xi1);
        Ok((2.0 * xi1 * q - xi1 * xi1 * dq) / (q * q))
    }

    /// Length of the Killing field along the orbit through radius `ξ₁`.
    pub fn volume_omega(&self, xi1: f64) -> Result<f64> {
        let b = self.scaling(xi1)?;
        let k = self.a - self.space.tau * xi1 * xi1 / b;
        Ok((xi1 * xi1 / (b * b) + k * k).sqrt())
    }

    /// `ξ₁′²/B² + ξ₁²ξ₂′²/Q − 1`.
    pub fn arclength_residual(&self, curve: &ProfileCurve, u: f64) -> Result<f64> {
        let p = curve.point(u)?;
        self.point_residual(&p)
    }

    fn point_residual(&self, p: &CurvePoint) -> Result<f64> {
        let b = self.scaling(p.xi1)?;
        let q = self.orbit_q(p.xi1)?;
        Ok(p.dxi1 * p.dxi1 / (b * b) + p.xi1 * p.xi1 * p.dxi2 * p.dxi2 / q - 1.0)
    }

    /// Coefficients `(E, F, G)` of the induced metric in the `(u, θ)` chart.
    pub fn induced_metric(&self, curve: &ProfileCurve, u: f64) -> Result<(f64, f64, f64)> {
        let p = curve.point(u)?;
        let b = self.scaling(p.xi1)?;
        let w = self.twist(p.xi1)?;
        let omega = self.volume_omega(p.xi1)?;
        if omega <= 0.0 {
            return Err(GeomError::DegenerateOrbit { u });
        }
        let k = w / (b * omega);
        let e = 1.0 + p.dxi2 * p.dxi2 * k * k;
        let f = p.dxi2 * w / b;
        Ok((e, f, omega * omega))
    }

    /// Principal value of the angle `σ` with `ξ₁′ = B cos σ` and
    /// `ξ₂′ = √Q sin σ / ξ₁`.
    pub fn sigma_angle(&self, curve: &ProfileCurve, u: f64, tol: &Tolerances) -> Result<f64> {
        let p = curve.point(u)?;
        self.sigma_at(&p, u, tol)
    }

    fn sigma_at(&self, p: &CurvePoint, u: f64, tol: &Tolerances) -> Result<f64> {
        if p.xi1 <= 0.0 {
            return Err(GeomError::DegenerateRadius { u });
        }
        let b = self.scaling(p.xi1)?;
        let q = self.orbit_q(p.xi1)?;
        let c = p.dxi1 / b;
        let s = p.dxi2 * p.xi1 / q.sqrt();
        let mismatch = c * c + s * s - 1.0;
        if mismatch.abs() > tol.sigma_consistency {
            return Err(GeomError::InconsistentCurve {
                u,
                reason: format!("cos²σ + sin²σ − 1 = {mismatch:e}"),
            });
        }
        Ok(s.atan2(c))
    }

    /// `σ` on a grid, unwrapped so consecutive values differ by less than π.
    pub fn sigma_along(&self, curve: &ProfileCurve, grid: &[f64], tol: &Tolerances) -> Result<Vec<f64>> {
        let mut out: Vec<f64> = Vec::with_capacity(grid.len());
        for &u in grid {
            let mut s = self.sigma_angle(curve, u, tol)?;
            if let Some(&prev) = out.last() {
                s = unwrap_near(s, prev);
            }
            out.push(s);
        }
        Ok(out)
    }

    /// `σ′` by central differences of the locally unwrapped angle.
    pub fn sigma_prime(&self, curve: &ProfileCurve, u: f64, tol: &Tolerances) -> Result<f64> {
        let centre = self.sigma_angle(curve, u, tol)?;
        let h = curve.fd_step(tol);
        diff_central_within(
            |x| Ok(unwrap_near(self.sigma_angle(curve, x, tol)?, centre)),
            u,
            1,
            h,
            curve.domain,
            tol.fd_h_min,
        )
    }

    /// Geodesic curvature of the profile curve in the orbit metric.
    pub fn geodesic_curvature(&self, curve: &ProfileCurve, u: f64, tol: &Tolerances) -> Result<f64> {
        let p = curve.point(u)?;
        let sigma = self.sigma_at(&p, u, tol)?;
        let b = self.scaling(p.xi1)?;
        let q = self.orbit_q(p.xi1)?;
        let dg22 = self.dg22_dxi1(p.xi1)?;
        Ok(b * q * dg22 * sigma.sin() / (2.0 * p.xi1 * p.xi1) + self.sigma_prime(curve, u, tol)?)
    }

    /// Mean curvature (trace of the shape operator) of the swept surface,
    /// `H = σ′ + (1/ξ₁ − κξ₁/4) sin σ`.
    pub fn mean_curvature_reduced(&self, curve: &ProfileCurve, u: f64, tol: &Tolerances) -> Result<f64> {
        let p = curve.point(u)?;
        let sigma = self.sigma_at(&p, u, tol)?;
        let bracket = 1.0 / p.xi1 - 0.25 * self.space.kappa * p.xi1;
        Ok(self.sigma_prime(curve, u, tol)? + bracket * sigma.sin())
    }

    /// `D_n ln ω` for the unit normal `n` obtained by turning the tangent a
    /// quarter turn counter-clockwise in the orbit metric. The derivative of
    /// `ln ω` is taken by finite differences.
    pub fn normal_log_omega_derivative(&self, curve: &ProfileCurve, u: f64, tol: &Tolerances) -> Result<f64> {
        let p = curve.point(u)?;
        let sigma = self.sigma_at(&p, u, tol)?;
        let b = self.scaling(p.xi1)?;
        let h = tol.fd_h1.min(0.5 * p.xi1);
        let dlog = crate::numerics::diff_central(|x| Ok(self.volume_omega(x)?.ln()), p.xi1, 1, h)?;
        // n = −sin σ · B∂ξ₁ + cos σ · (√Q/ξ₁)∂ξ₂ and ω depends on ξ₁ only
        Ok(-b * sigma.sin() * dlog)
    }
}

fn unwrap_near(s: f64, reference: f64) -> f64 {
    let turns = ((reference - s) / (2.0 * PI)).round();
    s + 2.0 * PI * turns
}

impl ProfileCurve {
    /// Curve given in closed form. Checked for `ξ₁ > 0` and the arc-length
    /// condition at evenly spaced abscissae.
    pub fn analytic<F>(act: &HelicoidalAction, domain: Interval, f: F, tol: &Tolerances) -> Result<Self>
    where
        F: Fn(f64) -> Result<CurvePoint> + Send + Sync + 'static,
    {
        let curve = Self { source: Source::Analytic(Arc::new(f)), domain };
        for u in domain.linspace(ANALYTIC_CHECKS) {
            let p = curve.point(u)?;
            validate_point(act, &p, u, tol)?;
        }
        Ok(curve)
    }

    /// Curve given by samples on a strictly increasing grid. Every sample is
    /// checked; evaluation in between is cubic Hermite.
    pub fn from_samples(
        act: &HelicoidalAction,
        u: Vec<f64>,
        pts: Vec<CurvePoint>,
        tol: &Tolerances,
    ) -> Result<Self> {
        if u.len() < 2 || u.len() != pts.len() {
            return Err(GeomError::InvalidInput(format!(
                "need at least two samples with matching lengths (got {} and {})",
                u.len(),
                pts.len()
            )));
        }
        if u.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(GeomError::InvalidInput("sample abscissae must increase strictly".into()));
        }
        for (x, p) in u.iter().zip(&pts) {
            validate_point(act, p, *x, tol)?;
        }
        let domain = Interval::new(u[0], u[u.len() - 1])?;
        Ok(Self { source: Source::Sampled { u, pts }, domain })
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn point(&self, u: f64) -> Result<CurvePoint> {
        if !self.domain.contains(u) {
            return Err(GeomError::InvalidInput(format!(
                "u = {u} outside the curve domain [{}, {}]",
                self.domain.lo, self.domain.hi
            )));
        }
        match &self.source {
            Source::Analytic(f) => f(u),
            Source::Sampled { u: grid, pts } => Ok(hermite(grid, pts, u)),
        }
    }

    /// Step for finite differences along the curve: the shared second-order
    /// step for analytic curves, the grid spacing for sampled ones.
    fn fd_step(&self, tol: &Tolerances) -> f64 {
        match &self.source {
            Source::Analytic(_) => tol.fd_h2,
            Source::Sampled { u, .. } => (u[u.len() - 1] - u[0]) / (u.len() - 1) as f64,
        }
    }
}

fn validate_point(act: &HelicoidalAction, p: &CurvePoint, u: f64, tol: &Tolerances) -> Result<()> {
    if !(p.xi1 > 0.0) {
        return Err(GeomError::InconsistentCurve { u, reason: format!("ξ₁ = {} is not positive", p.xi1) });
    }
    let r = act.point_residual(p)?;
    if !(r.abs() < tol.arclength) {
        return Err(GeomError::InconsistentCurve { u, reason: format!("arc-length residual {r:e}") });
    }
    Ok(())
}

fn hermite(grid: &[f64], pts: &[CurvePoint], u: f64) -> CurvePoint {
    let k = grid.partition_point(|&x| x <= u).clamp(1, grid.len() - 1) - 1;
    let (u0, u1) = (grid[k], grid[k + 1]);
    let h = u1 - u0;
    let s = (u - u0) / h;
    let (p0, p1) = (&pts[k], &pts[k + 1]);
    let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
    let h10 = s * (1.0 - s) * (1.0 - s);
    let h01 = s * s * (3.0 - 2.0 * s);
    let h11 = s * s * (s - 1.0);
    let d00 = 6.0 * s * (s - 1.0) / h;
    let d10 = (1.0 - s) * (1.0 - 3.0 * s);
    let d01 = -d00;
    let d11 = s * (3.0 * s - 2.0);
    let val = |y0: f64, m0: f64, y1: f64, m1: f64| h00 * y0 + h10 * h * m0 + h01 * y1 + h11 * h * m1;
    let der = |y0: f64, m0: f64, y1: f64, m1: f64| d00 * y0 + d10 * m0 + d01 * y1 + d11 * m1;
    CurvePoint {
        xi1: val(p0.xi1, p0.dxi1, p1.xi1, p1.dxi1),
        xi2: val(p0.xi2, p0.dxi2, p1.xi2, p1.dxi2),
        dxi1: der(p0.xi1, p0.dxi1, p1.xi1, p1.dxi1),
        dxi2: der(p0.xi2, p0.dxi2, p1.xi2, p1.dxi2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn act(kappa: f64, tau: f64, a: f64) -> HelicoidalAction {
        HelicoidalAction::new(BcvSpace::new(kappa, tau).unwrap(), a).unwrap()
    }

    fn catenoid(d: f64) -> impl Fn(f64) -> Result<CurvePoint> {
        move |u: f64| {
            let r = (u * u + d * d).sqrt();
            Ok(CurvePoint { xi1: r, xi2: d * (r / d).acosh(), dxi1: u / r, dxi2: d / r })
        }
    }

    /// Helicoidal catenoid of the Heisenberg group, pitch 1/2.
    fn nil_catenoid(u: f64) -> Result<CurvePoint> {
        let r = (u * u + 1.0).sqrt();
        Ok(CurvePoint {
            xi1: r,
            xi2: 0.5 * (u + u.atan()),
            dxi1: u / r,
            dxi2: 0.5 * (1.0 + 1.0 / (1.0 + u * u)),
        })
    }

    fn vertical(r: f64) -> impl Fn(f64) -> Result<CurvePoint> {
        move |u| Ok(CurvePoint { xi1: r, xi2: u, dxi1: 0.0, dxi2: 1.0 })
    }

    fn dom(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn orbital_metric_examples() {
        assert_eq!(act(0.0, 0.0, 0.0).orbital_metric(3.0).unwrap(), (1.0, 1.0));
        assert_eq!(act(0.0, 0.5, 0.5).orbital_metric(1.0).unwrap(), (1.0, 1.0));
        let (g11, g22) = act(0.0, 0.0, 1.0).orbital_metric(2.0).unwrap();
        assert_eq!(g11, 1.0);
        assert!((g22 - 0.8).abs() < 1e-15);
        assert!(act(-1.0, 0.0, 0.0).orbital_metric(3.0).is_err());
    }

    #[test]
    fn omega_examples() {
        assert!((act(0.0, 0.0, 0.0).volume_omega(2.5).unwrap() - 2.5).abs() < 1e-15);
        assert!((act(0.0, 0.0, 1.0).volume_omega(1e-9).unwrap() - 1.0).abs() < 1e-12);
        assert!((act(0.0, 0.5, 0.5).volume_omega(1.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn omega_squared_is_q_over_b_squared() {
        let g = act(1.3, -0.4, 0.7);
        for &x in &[0.2, 0.9, 1.7] {
            let b = g.scaling(x).unwrap();
            let w = g.volume_omega(x).unwrap();
            assert!((w * w - g.orbit_q(x).unwrap() / (b * b)).abs() < 1e-13);
        }
    }

    #[test]
    fn dg22_matches_difference_quotient() {
        let g = act(-0.6, 0.8, 0.3);
        for &x in &[0.3, 1.0, 1.2] {
            let fd = crate::numerics::diff_central(|y| Ok(g.orbital_metric(y)?.1), x, 1, 1e-4).unwrap();
            assert!((g.dg22_dxi1(x).unwrap() - fd).abs() < 1e-10);
        }
    }

    #[test]
    fn induced_metric_rotational_catenoid() {
        let a = act(0.0, 0.0, 0.0);
        let tol = Tolerances::default();
        let c = ProfileCurve::analytic(&a, dom(-2.0, 2.0), catenoid(1.0), &tol).unwrap();
        let (e, f, g) = a.induced_metric(&c, 0.7).unwrap();
        assert!((e - 1.0).abs() < 1e-15);
        assert_eq!(f, 0.0);
        assert!((g - 1.49).abs() < 1e-14);
    }

    #[test]
    fn induced_metric_nil_catenoid_waist() {
        let a = act(0.0, 0.5, 0.5);
        let tol = Tolerances::default();
        let c = ProfileCurve::analytic(&a, dom(-3.0, 3.0), nil_catenoid, &tol).unwrap();
        let (e, f, g) = a.induced_metric(&c, 0.0).unwrap();
        assert!((e - 1.0).abs() < 1e-15 && f.abs() < 1e-15 && (g - 1.0).abs() < 1e-15);
        for u in dom(-3.0, 3.0).linspace(31) {
            let (e, f, g) = a.induced_metric(&c, u).unwrap();
            assert!(e * g - f * f > 0.0);
        }
    }

    #[test]
    fn arclength_residuals() {
        let a = act(0.0, 0.0, 0.0);
        let tol = Tolerances::default();
        let c = ProfileCurve::analytic(&a, dom(-2.0, 2.0), catenoid(0.8), &tol).unwrap();
        for u in dom(-2.0, 2.0).linspace(21) {
            assert!(a.arclength_residual(&c, u).unwrap().abs() < 1e-10);
        }
        let doubled = move |u: f64| {
            let mut p = catenoid(0.8)(u)?;
            p.dxi2 *= 2.0;
            Ok(p)
        };
        let err = ProfileCurve::analytic(&a, dom(-2.0, 2.0), doubled, &tol).unwrap_err();
        assert!(matches!(err, GeomError::InconsistentCurve { .. }));
    }

    #[test]
    fn sigma_examples() {
        let a = act(0.0, 0.0, 0.0);
        let tol = Tolerances::default();
        let v = ProfileCurve::analytic(&a, dom(0.0, 1.0), vertical(1.0), &tol).unwrap();
        assert!((a.sigma_angle(&v, 0.5, &tol).unwrap() - PI / 2.0).abs() < 1e-15);
        let horiz = |u: f64| Ok(CurvePoint { xi1: 1.0 + u, xi2: 0.0, dxi1: 1.0, dxi2: 0.0 });
        let h = ProfileCurve::analytic(&a, dom(0.0, 1.0), horiz, &tol).unwrap();
        assert_eq!(a.sigma_angle(&h, 0.5, &tol).unwrap(), 0.0);
        let c = ProfileCurve::analytic(&a, dom(-1.0, 1.0), catenoid(1.0), &tol).unwrap();
        assert!((a.sigma_angle(&c, 0.0, &tol).unwrap() - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn geodesic_curvature_of_straight_lines() {
        let a = act(0.0, 0.0, 0.0);
        let tol = Tolerances::default();
        let horiz = |u: f64| Ok(CurvePoint { xi1: 1.0 + u, xi2: 0.3, dxi1: 1.0, dxi2: 0.0 });
        let h = ProfileCurve::analytic(&a, dom(0.0, 1.0), horiz, &tol).unwrap();
        assert!(a.geodesic_curvature(&h, 0.5, &tol).unwrap().abs() < 1e-12);
        let v = ProfileCurve::analytic(&a, dom(0.0, 1.0), vertical(2.0), &tol).unwrap();
        assert!(a.geodesic_curvature(&v, 0.5, &tol).unwrap().abs() < 1e-12);
    }

    #[test]
    fn cylinder_calibrates_trace_convention() {
        let a = act(0.0, 0.0, 0.0);
        let tol = Tolerances::default();
        for &r in &[0.5, 1.0, 2.0] {
            let v = ProfileCurve::analytic(&a, dom(0.0, 1.0), vertical(r), &tol).unwrap();
            assert!((a.mean_curvature_reduced(&v, 0.5, &tol).unwrap() - 1.0 / r).abs() < 1e-12);
        }
    }

    #[test]
    fn named_profiles_are_minimal() {
        let tol = Tolerances::default();
        let e = act(0.0, 0.0, 0.0);
        let c = ProfileCurve::analytic(&e, dom(-2.0, 2.0), catenoid(1.0), &tol).unwrap();
        let n = act(0.0, 0.5, 0.5);
        let hc = ProfileCurve::analytic(&n, dom(-3.0, 3.0), nil_catenoid, &tol).unwrap();
        for u in dom(-1.9, 1.9).linspace(20) {
            assert!(e.mean_curvature_reduced(&c, u, &tol).unwrap().abs() < 1e-8);
        }
        for u in dom(-2.9, 2.9).linspace(30) {
            assert!(n.mean_curvature_reduced(&hc, u, &tol).unwrap().abs() < 1e-8);
        }
    }

    #[test]
    fn reduction_identity_on_nil_catenoid() {
        let tol = Tolerances::default();
        let n = act(0.0, 0.5, 0.5);
        let hc = ProfileCurve::analytic(&n, dom(-3.0, 3.0), nil_catenoid, &tol).unwrap();
        for u in dom(-2.5, 2.5).linspace(11) {
            let h = n.mean_curvature_reduced(&hc, u, &tol).unwrap();
            let k = n.geodesic_curvature(&hc, u, &tol).unwrap();
            let d = n.normal_log_omega_derivative(&hc, u, &tol).unwrap();
            assert!((h - (k - d)).abs() < 1e-6, "{h} {k} {d}");
        }
    }

    #[test]
    fn hermite_interpolates_smooth_samples() {
        let a = act(0.0, 0.0, 0.0);
        let tol = Tolerances::default();
        let grid = dom(-1.0, 1.0).linspace(41);
        let pts: Vec<_> = grid.iter().map(|&u| catenoid(1.0)(u).unwrap()).collect();
        let c = ProfileCurve::from_samples(&a, grid, pts, &tol).unwrap();
        let p = c.point(0.3137).unwrap();
        let exact = catenoid(1.0)(0.3137).unwrap();
        // cubic Hermite on h = 0.05: error ≲ h⁴/384 · max|f⁗|
        assert!((p.xi1 - exact.xi1).abs() < 1e-7);
        assert!((p.xi2 - exact.xi2).abs() < 1e-7);
        assert!((p.dxi1 - exact.dxi1).abs() < 1e-5);
        let h = a.mean_curvature_reduced(&c, 0.3, &tol).unwrap();
        assert!(h.abs() < 1e-3, "{h}");
    }

    #[test]
    fn sampled_curve_rejects_bad_input() {
        let a = act(0.0, 0.0, 0.0);
        let tol = Tolerances::default();
        let p = vertical(1.0)(0.0).unwrap();
        assert!(ProfileCurve::from_samples(&a, vec![0.0, 0.0], vec![p, p], &tol).is_err());
        assert!(ProfileCurve::from_samples(&a, vec![0.0], vec![p], &tol).is_err());
        let bad = CurvePoint { xi1: -1.0, ..p };
        assert!(ProfileCurve::from_samples(&a, vec![0.0, 1.0], vec![p, bad], &tol).is_err());
    }

    #[test]
    fn sigma_unwraps_along_a_loop() {
        // closed-ish loop in the flat orbit space of rotations in ℝ³
        let a = act(0.0, 0.0, 0.0);
        let tol = Tolerances::default();
        let circle = |u: f64| Ok(CurvePoint { xi1: 2.0 + u.cos(), xi2: u.sin(), dxi1: -u.sin(), dxi2: u.cos() });
        let c = ProfileCurve::analytic(&a, dom(0.0, 4.0 * PI), circle, &tol).unwrap();
        let s = a.sigma_along(&c, &dom(0.0, 4.0 * PI).linspace(200), &tol).unwrap();
        assert!(s.windows(2).all(|w| (w[1] - w[0]).abs() < 0.2));
        assert!((s[199] - s[0] - 4.0 * PI).abs() < 1e-9);
    }
}
