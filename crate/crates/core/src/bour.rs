//! Natural parametrizations of helicoidal surfaces.
//!
//! A seed `(U, m, a)` determines a helicoidal surface with pitch `a` whose
//! first fundamental form is `du² + U(u)² dt²`. Every seed with the same `U`
//! gives an isometric surface. The profile is
//!
//! ```text
//! ξ₁ = 2 √((m²U² − a²) / ((1 + √Δ)² − 4τ²m²U²))
//! ξ₂′ = m U B √R / ξ₁²
//! θ = t/m + θ₀(u),   θ₀′ = ((4τ − aκ)ξ₁² − 4a) √R / (4 m U ξ₁²)
//! ```
//!
//! with `Δ = (1 − 2aτ)² + (m²U² − a²)(4τ² − κ)` and
//! `R = ξ₁² − m⁴U²U′²(4 + κξ₁²)²/(16Δ)`.

use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::bcv::{AmbientPoint, BcvSpace, CylPoint, CLASS_EPS};
use crate::error::{GeomError, Result};
use crate::numerics::{bracket_flip, quad_adaptive_capped, CumulativeIntegral, Interval, Tolerances};
use crate::orbit::{CurvePoint, HelicoidalAction, ProfileCurve};
use crate::profile::{MetricProfile, ProfileJet};

/// Number of scan steps per side used to locate the validity domain before
/// bisection.
const SCAN_STEPS: usize = 1000;

#[derive(Debug, Clone)]
pub struct BourSeed {
    pub profile: MetricProfile,
    pub m: f64,
    pub a: f64,
    pub u_domain: Interval,
}

impl BourSeed {
    pub fn new(profile: MetricProfile, m: f64, a: f64, u_domain: Interval) -> Result<Self> {
        if !(m.is_finite() && m != 0.0) {
            return Err(GeomError::InvalidInput(format!("m must be finite and nonzero, got {m}")));
        }
        if !a.is_finite() {
            return Err(GeomError::InvalidInput(format!("non-finite pitch {a}")));
        }
        if u_domain.is_empty() {
            return Err(GeomError::EmptyDomain(format!("seed domain [{}, {}]", u_domain.lo, u_domain.hi)));
        }
        Ok(Self { profile, m, a, u_domain })
    }
}

/// Which closed form produces the chart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChartFormula {
    /// The two-parameter helicoidal family.
    Helicoidal,
    /// The same family with `κ = τ = 0` substituted by hand.
    Euclidean,
    /// The rotation family (`a = 0`) in its general form.
    Rotation,
    /// The rotation family in the reduced form for `κ = 4τ²`, `τ = 0` or
    /// `κ = 0`; the general form elsewhere.
    RotationReduced,
}

/// Pointwise quantities of a chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartLocal {
    pub delta: f64,
    pub xi1: f64,
    /// `ξ₂′`
    pub xi2_rate: f64,
    /// `θ₀′`
    pub theta_rate: f64,
}

/// `Δ(u) = (1 − 2aτ)² + (m²U² − a²)(4τ² − κ)`.
pub fn delta(space: &BcvSpace, seed: &BourSeed, u: f64) -> Result<f64> {
    let uu = seed.profile.value(u)?;
    delta_from(space, seed.m.abs(), seed.a, uu, u)
}

fn delta_from(space: &BcvSpace, m: f64, a: f64, uu: f64, u: f64) -> Result<f64> {
    let (k, t) = (space.kappa, space.tau);
    let d = (1.0 - 2.0 * a * t).powi(2) + (m * m * uu * uu - a * a) * (4.0 * t * t - k);
    if d < 0.0 {
        return Err(GeomError::NegativeDiscriminant { u, value: d });
    }
    Ok(d)
}

/// `ξ₁(u)` of the seed.
pub fn xi1_from_seed(space: &BcvSpace, seed: &BourSeed, u: f64) -> Result<f64> {
    let uu = seed.profile.value(u)?;
    xi1_helicoidal(space, seed.m.abs(), seed.a, uu, u)
}

fn xi1_helicoidal(space: &BcvSpace, m: f64, a: f64, uu: f64, u: f64) -> Result<f64> {
    let d = delta_from(space, m, a, uu, u)?;
    let num = m * m * uu * uu - a * a;
    let den = (1.0 + d.sqrt()).powi(2) - 4.0 * space.tau * space.tau * m * m * uu * uu;
    if num == 0.0 && den == 0.0 {
        return Err(GeomError::DegenerateRadius { u });
    }
    if num < 0.0 {
        return Err(GeomError::NegativeRadicand { u, value: num });
    }
    if den <= 0.0 {
        return Err(GeomError::NegativeRadicand { u, value: den });
    }
    Ok(2.0 * (num / den).sqrt())
}

/// A radicand within `ε·scale` of zero is cancellation noise (or a genuine
/// boundary value) and counts as zero; `scale` is the size of its leading
/// term.
fn clamp_radicand(r: f64, scale: f64, u: f64, eps: f64) -> Result<f64> {
    let band = eps * scale.abs().max(f64::MIN_POSITIVE);
    if r.abs() <= band {
        Ok(0.0)
    } else if r > 0.0 {
        Ok(r)
    } else {
        Err(GeomError::NegativeRadicand { u, value: r })
    }
}

fn local_helicoidal(space: &BcvSpace, m: f64, a: f64, jet: ProfileJet, u: f64, eps: f64) -> Result<ChartLocal> {
    let (k, t) = (space.kappa, space.tau);
    let (uu, du) = (jet.value, jet.d1);
    let d = delta_from(space, m, a, uu, u)?;
    let xi1 = xi1_helicoidal(space, m, a, uu, u)?;
    let x2 = xi1 * xi1;
    let b = space.scaling_factor(x2)?;
    let four_b = 4.0 + k * x2;
    let r = x2 - m.powi(4) * uu * uu * du * du * four_b * four_b / (16.0 * d);
    let r = clamp_radicand(r, x2, u, eps)?;
    if r == 0.0 {
        return Ok(ChartLocal { delta: d, xi1, xi2_rate: 0.0, theta_rate: 0.0 });
    }
    let sr = r.sqrt();
    Ok(ChartLocal {
        delta: d,
        xi1,
        xi2_rate: m * uu * b * sr / x2,
        theta_rate: ((4.0 * t - a * k) * x2 - 4.0 * a) * sr / (4.0 * m * uu * x2),
    })
}

fn local_euclidean(m: f64, a: f64, jet: ProfileJet, u: f64, eps: f64) -> Result<ChartLocal> {
    let (uu, du) = (jet.value, jet.d1);
    let n = m * m * uu * uu - a * a;
    if n < 0.0 {
        return Err(GeomError::NegativeRadicand { u, value: n });
    }
    if n == 0.0 {
        return Err(GeomError::DegenerateRadius { u });
    }
    let r = clamp_radicand(n - m.powi(4) * uu * uu * du * du, n, u, eps)?;
    let sr = r.sqrt();
    Ok(ChartLocal {
        delta: 1.0,
        xi1: n.sqrt(),
        xi2_rate: m * uu / n * sr,
        theta_rate: -a / m * sr / (uu * n),
    })
}

fn local_rotation(space: &BcvSpace, n: f64, jet: ProfileJet, u: f64, eps: f64) -> Result<ChartLocal> {
    let (k, t) = (space.kappa, space.tau);
    let (uu, du) = (jet.value, jet.d1);
    let n2u2 = n * n * uu * uu;
    let d = 1.0 + (4.0 * t * t - k) * n2u2;
    if d < 0.0 {
        return Err(GeomError::NegativeDiscriminant { u, value: d });
    }
    let s = d.sqrt();
    let den = 2.0 * (1.0 + s) - k * n2u2;
    if den <= 0.0 {
        return Err(GeomError::NegativeRadicand { u, value: den });
    }
    let tail = n * n * (1.0 + s).powi(2) * du * du / (d * den * den);
    let r2 = clamp_radicand((1.0 + s).powi(2) / den - tail * (1.0 + s).powi(2), (1.0 + s).powi(2) / den, u, eps)?;
    let rt = clamp_radicand(1.0 / den - tail, 1.0 / den, u, eps)?;
    Ok(ChartLocal {
        delta: d,
        xi1: 2.0 * n * uu / den.sqrt(),
        xi2_rate: r2.sqrt(),
        theta_rate: 2.0 * t * rt.sqrt(),
    })
}

fn local_rotation_reduced(space: &BcvSpace, n: f64, jet: ProfileJet, u: f64, eps: f64) -> Result<ChartLocal> {
    let (k, t) = (space.kappa, space.tau);
    let (uu, du) = (jet.value, jet.d1);
    let n2 = n * n;
    if t != 0.0 && (k - 4.0 * t * t).abs() <= CLASS_EPS {
        let w = 1.0 - t * t * n2 * uu * uu;
        if w <= 0.0 {
            return Err(GeomError::NegativeRadicand { u, value: w });
        }
        let r = clamp_radicand(1.0 - n2 * (t * t * uu * uu + du * du), 1.0, u, eps)?;
        let rate = r.sqrt() / w;
        return Ok(ChartLocal { delta: 1.0, xi1: n * uu / w.sqrt(), xi2_rate: rate, theta_rate: t * rate });
    }
    if t == 0.0 {
        let w = 1.0 - k * n2 * uu * uu;
        if w <= 0.0 {
            return Err(GeomError::NegativeRadicand { u, value: w });
        }
        let r = clamp_radicand((1.0 - n2 * (k * uu * uu + du * du)) / w, 1.0 / w, u, eps)?;
        return Ok(ChartLocal { delta: w, xi1: 2.0 * n * uu / (1.0 + w.sqrt()), xi2_rate: r.sqrt(), theta_rate: 0.0 });
    }
    if k == 0.0 {
        let d = 1.0 + 4.0 * t * t * n2 * uu * uu;
        let s = d.sqrt();
        let r = clamp_radicand(2.0 / (1.0 + s) - n2 * du * du / d, 2.0 / (1.0 + s), u, eps)?;
        return Ok(ChartLocal {
            delta: d,
            xi1: std::f64::consts::SQRT_2 * n * uu / (1.0 + s).sqrt(),
            xi2_rate: 0.5 * (1.0 + s) * r.sqrt(),
            theta_rate: t * r.sqrt(),
        });
    }
    local_rotation(space, n, jet, u, eps)
}

/// Evaluates the chart formula at `u`. `m` must be positive.
pub fn chart_local(
    space: &BcvSpace,
    formula: ChartFormula,
    m: f64,
    a: f64,
    jet: ProfileJet,
    u: f64,
    eps: f64,
) -> Result<ChartLocal> {
    if !(jet.value > 0.0) {
        return Err(GeomError::NegativeRadicand { u, value: jet.value });
    }
    let local = match formula {
        ChartFormula::Helicoidal => local_helicoidal(space, m, a, jet, u, eps)?,
        ChartFormula::Euclidean => local_euclidean(m, a, jet, u, eps)?,
        ChartFormula::Rotation => local_rotation(space, m, jet, u, eps)?,
        ChartFormula::RotationReduced => local_rotation_reduced(space, m, jet, u, eps)?,
    };
    space.scaling_factor(local.xi1 * local.xi1)?;
    Ok(local)
}

/// `ξ₂(u) = ∫_{u₀}^{u} ξ₂′` with `u₀` the midpoint of the seed domain.
pub fn xi2(space: &BcvSpace, seed: &BourSeed, u: f64, tol: &Tolerances) -> Result<f64> {
    integrate_rate(space, seed, u, tol, |l| l.xi2_rate)
}

/// `θ₀(u) = ∫_{u₀}^{u} θ₀′` with `u₀` the midpoint of the seed domain.
pub fn theta0(space: &BcvSpace, seed: &BourSeed, u: f64, tol: &Tolerances) -> Result<f64> {
    integrate_rate(space, seed, u, tol, |l| l.theta_rate)
}

fn integrate_rate<P>(space: &BcvSpace, seed: &BourSeed, u: f64, tol: &Tolerances, pick: P) -> Result<f64>
where
    P: Fn(&ChartLocal) -> f64,
{
    let f = |x: f64| -> Result<f64> {
        let jet = seed.profile.jet(x)?;
        let l = chart_local(space, ChartFormula::Helicoidal, seed.m.abs(), seed.a, jet, x, tol.radicand_eps)?;
        Ok(pick(&l))
    };
    let q = quad_adaptive_capped(&f, seed.u_domain.mid(), u, tol.quad_abs, tol.quad_rel, tol.quad_max_panels)?;
    Ok(q.value)
}

/// Maximal subinterval of the seed domain around its midpoint on which the
/// chart formula can be evaluated.
pub fn domain_of_validity(space: &BcvSpace, seed: &BourSeed, tol: &Tolerances) -> Result<Interval> {
    validity_for(space, seed, ChartFormula::Helicoidal, tol)
}

fn validity_for(space: &BcvSpace, seed: &BourSeed, formula: ChartFormula, tol: &Tolerances) -> Result<Interval> {
    let m = seed.m.abs();
    let ok = |u: f64| -> bool {
        seed.profile
            .jet(u)
            .and_then(|jet| chart_local(space, formula, m, seed.a, jet, u, tol.radicand_eps))
            .map(|l| l.xi1.is_finite() && l.xi2_rate.is_finite() && l.theta_rate.is_finite())
            .unwrap_or(false)
    };
    let dom = seed.u_domain;
    let u0 = dom.mid();
    if !ok(u0) {
        return Err(GeomError::EmptyDomain(format!("chart not defined at the reference point u = {u0}")));
    }
    let edge = |end: f64| -> Result<f64> {
        let step = (end - u0) / SCAN_STEPS as f64;
        let mut prev = u0;
        for i in 1..=SCAN_STEPS {
            let x = if i == SCAN_STEPS { end } else { u0 + step * i as f64 };
            if !ok(x) {
                return bracket_flip(ok, prev, x, tol.bisect_tol);
            }
            prev = x;
        }
        Ok(end)
    };
    let lo = edge(dom.lo)?;
    let hi = edge(dom.hi)?;
    Interval::new(lo, hi)
}

/// A computed natural chart `(u, t) ↦ (ξ₁(u), t/m + θ₀(u), ξ₂(u) + aθ)`.
#[derive(Debug, Clone)]
pub struct NaturalChart {
    space: BcvSpace,
    seed: BourSeed,
    formula: ChartFormula,
    /// `|m|`
    m: f64,
    /// `−1` when the seed had `m < 0` (handled as `t ↦ −t`).
    t_sign: f64,
    u0: f64,
    domain: Interval,
    xi2: CumulativeIntegral,
    theta0: CumulativeIntegral,
    tol: Tolerances,
}

/// Builds the natural chart of a seed.
pub fn build_chart(space: &BcvSpace, seed: &BourSeed, tol: &Tolerances) -> Result<NaturalChart> {
    NaturalChart::with_formula(space, seed, ChartFormula::Helicoidal, tol)
}

/// Chart of a rotation surface (`a = 0`) with parameter `n`.
pub fn rotation_chart(
    space: &BcvSpace,
    n: f64,
    profile: MetricProfile,
    u_domain: Interval,
    tol: &Tolerances,
) -> Result<NaturalChart> {
    let seed = BourSeed::new(profile, n, 0.0, u_domain)?;
    NaturalChart::with_formula(space, &seed, ChartFormula::Rotation, tol)
}

/// [`rotation_chart`] through the reduced formulas of the space's class.
pub fn rotation_chart_reduced(
    space: &BcvSpace,
    n: f64,
    profile: MetricProfile,
    u_domain: Interval,
    tol: &Tolerances,
) -> Result<NaturalChart> {
    let seed = BourSeed::new(profile, n, 0.0, u_domain)?;
    NaturalChart::with_formula(space, &seed, ChartFormula::RotationReduced, tol)
}

impl NaturalChart {
    pub fn with_formula(space: &BcvSpace, seed: &BourSeed, formula: ChartFormula, tol: &Tolerances) -> Result<Self> {
        match formula {
            ChartFormula::Euclidean if space.kappa != 0.0 || space.tau != 0.0 => {
                return Err(GeomError::InvalidInput("the Euclidean formula needs κ = τ = 0".into()));
            }
            ChartFormula::Rotation | ChartFormula::RotationReduced if seed.a != 0.0 => {
                return Err(GeomError::InvalidInput("rotation charts need a = 0".into()));
            }
            _ => {}
        }
        let domain = validity_for(space, seed, formula, tol)?;
        let m = seed.m.abs();
        let u0 = seed.u_domain.mid();
        let rate = |pick: fn(&ChartLocal) -> f64| -> crate::numerics::Integrand {
            let (space, profile, a, eps) = (*space, seed.profile.clone(), seed.a, tol.radicand_eps);
            Arc::new(move |x| {
                let jet = profile.jet(x)?;
                Ok(pick(&chart_local(&space, formula, m, a, jet, x, eps)?))
            })
        };
        let xi2 = CumulativeIntegral::new(rate(|l| l.xi2_rate), domain, u0, tol)?;
        let theta0 = CumulativeIntegral::new(rate(|l| l.theta_rate), domain, u0, tol)?;
        Ok(Self {
            space: *space,
            seed: seed.clone(),
            formula,
            m,
            t_sign: seed.m.signum(),
            u0,
            domain,
            xi2,
            theta0,
            tol: *tol,
        })
    }

    pub fn space(&self) -> BcvSpace {
        self.space
    }

    pub fn seed(&self) -> &BourSeed {
        &self.seed
    }

    pub fn formula(&self) -> ChartFormula {
        self.formula
    }

    pub fn a(&self) -> f64 {
        self.seed.a
    }

    /// `|m|`
    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn u0(&self) -> f64 {
        self.u0
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn action(&self) -> HelicoidalAction {
        HelicoidalAction { space: self.space, a: self.seed.a }
    }

    fn check(&self, u: f64) -> Result<()> {
        if self.domain.contains(u) {
            Ok(())
        } else {
            Err(GeomError::InvalidInput(format!(
                "u = {u} outside the chart domain [{}, {}]",
                self.domain.lo, self.domain.hi
            )))
        }
    }

    pub fn local(&self, u: f64) -> Result<ChartLocal> {
        self.check(u)?;
        let jet = self.seed.profile.jet(u)?;
        chart_local(&self.space, self.formula, self.m, self.seed.a, jet, u, self.tol.radicand_eps)
    }

    pub fn u_value(&self, u: f64) -> Result<f64> {
        self.seed.profile.value(u)
    }

    pub fn xi1(&self, u: f64) -> Result<f64> {
        Ok(self.local(u)?.xi1)
    }

    /// `ξ₁′` differentiated in closed form from `U` and `U′`.
    pub fn xi1_prime(&self, u: f64) -> Result<f64> {
        self.check(u)?;
        let jet = self.seed.profile.jet(u)?;
        let (k, t, m, a) = (self.space.kappa, self.space.tau, self.m, self.seed.a);
        let (uu, du) = (jet.value, jet.d1);
        let d = delta_from(&self.space, m, a, uu, u)?;
        let s = d.sqrt();
        let dd = 2.0 * m * m * uu * du * (4.0 * t * t - k);
        let ds = if s > 0.0 { dd / (2.0 * s) } else { 0.0 };
        let num = m * m * uu * uu - a * a;
        let dnum = 2.0 * m * m * uu * du;
        let den = (1.0 + s).powi(2) - 4.0 * t * t * m * m * uu * uu;
        let dden = 2.0 * (1.0 + s) * ds - 8.0 * t * t * m * m * uu * du;
        let xi1 = self.xi1(u)?;
        if xi1 <= 0.0 {
            return Err(GeomError::DegenerateRadius { u });
        }
        let dsq = 4.0 * (dnum * den - num * dden) / (den * den);
        Ok(dsq / (2.0 * xi1))
    }

    pub fn xi2(&self, u: f64) -> Result<f64> {
        self.check(u)?;
        self.xi2.eval(u)
    }

    pub fn xi2_prime(&self, u: f64) -> Result<f64> {
        Ok(self.local(u)?.xi2_rate)
    }

    pub fn theta0(&self, u: f64) -> Result<f64> {
        self.check(u)?;
        self.theta0.eval(u)
    }

    pub fn theta(&self, u: f64, t: f64) -> Result<f64> {
        Ok(self.t_sign * t / self.m + self.theta0(u)?)
    }

    /// Image of `(u, t)` in cylindrical coordinates.
    pub fn cylindrical(&self, u: f64, t: f64) -> Result<CylPoint> {
        let theta = self.theta(u, t)?;
        Ok(CylPoint::new(self.xi1(u)?, theta, self.xi2(u)? + self.seed.a * theta))
    }

    pub fn embed(&self, u: f64, t: f64) -> Result<AmbientPoint> {
        Ok(self.cylindrical(u, t)?.to_cartesian())
    }

    pub fn profile_point(&self, u: f64) -> Result<CurvePoint> {
        Ok(CurvePoint { xi1: self.xi1(u)?, xi2: self.xi2(u)?, dxi1: self.xi1_prime(u)?, dxi2: self.xi2_prime(u)? })
    }

    /// The profile curve `(ξ₁, ξ₂)` over `domain` (the chart domain when
    /// `None`), checked as an arc-length curve of the orbit space.
    pub fn profile_curve(&self, domain: Option<Interval>) -> Result<ProfileCurve> {
        let domain = domain.unwrap_or(self.domain);
        let chart = self.clone();
        ProfileCurve::analytic(&self.action(), domain, move |u| chart.profile_point(u), &self.tol)
    }
}

/// Natural reparametrization of a helicoidal surface given by its profile.
#[derive(Debug, Clone)]
pub struct NaturalReparam {
    /// `U(u) = ω(ξ₁(u))`
    pub profile: MetricProfile,
    /// `∫ ξ₂′(aB − τξ₁²)/(Bω²) du`; the natural parameter is `t = θ + gauge(u)`.
    pub gauge: CumulativeIntegral,
}

/// Recovers `U` and the `t`-gauge from an arc-length profile curve, so that
/// the surface reads `du² + U² dt²`.
pub fn natural_from_helicoidal(act: &HelicoidalAction, curve: &ProfileCurve, tol: &Tolerances) -> Result<NaturalReparam> {
    let domain = curve.domain();
    for u in domain.linspace(101) {
        let p = curve.point(u)?;
        if !(act.volume_omega(p.xi1)? > 0.0) {
            return Err(GeomError::DegenerateOrbit { u });
        }
    }
    let (a1, c1) = (*act, curve.clone());
    let profile = MetricProfile::from_values("orbit volume", tol.profile_h, move |u| {
        let p = c1.point(u)?;
        let w = a1.volume_omega(p.xi1)?;
        if w <= 0.0 {
            return Err(GeomError::DegenerateOrbit { u });
        }
        Ok(w)
    });
    let (a2, c2) = (*act, curve.clone());
    let integrand: crate::numerics::Integrand = Arc::new(move |u| {
        let p = c2.point(u)?;
        let b = a2.scaling(p.xi1)?;
        let w = a2.volume_omega(p.xi1)?;
        if w <= 0.0 {
            return Err(GeomError::DegenerateOrbit { u });
        }
        Ok(p.dxi2 * a2.twist(p.xi1)? / (b * w * w))
    });
    let gauge = CumulativeIntegral::new(integrand, domain, domain.mid(), tol)?;
    Ok(NaturalReparam { profile, gauge })
}
