//! Helicoidal surfaces of constant mean curvature.
//!
//! A seed `(U, m, a)` has constant mean curvature `H` exactly when `U`
//! solves
//!
//! ```text
//! H √(ξ₁² − m⁴B²U²U′²/Δ) = 2 − B − m²B (UU′/√Δ)′
//! ```
//!
//! with `B = 2(1 − 2aτ + √Δ)/((1 + √Δ)² − 4τ²m²U²)`. The solutions form
//! one-parameter families `U_c` in closed form; this module evaluates them
//! together with `U′`, `U″`, the residual of the equation and the first
//! integral used to solve it.

use serde::{Deserialize, Serialize};

use crate::bcv::{BcvSpace, SpaceClass};
use crate::bour::BourSeed;
use crate::error::{GeomError, Result};
use crate::numerics::{bracket_flip, Interval, Tolerances};
use crate::profile::MetricProfile;

/// Samples used to locate the positivity runs of a family inside its window.
const DOMAIN_SCAN: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CmcConstants {
    pub b: f64,
    pub b1: f64,
    /// `−b/(2b₁)`; absent when `b₁ = 0`.
    pub b2: Option<f64>,
    pub b3: f64,
    pub c1: f64,
    pub c2: f64,
    pub c: f64,
    pub h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CmcCase {
    EuclideanMinimal,
    SpaceFormGeneric,
    CriticalKappa,
    Oscillatory,
    HyperbolicSinh,
    HyperbolicCosh,
}

impl std::fmt::Display for CmcCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Debug::fmt(self, f)
    }
}

/// Which closed form a family evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "label", rename_all = "kebab-case")]
pub enum FamilyFormula {
    Cmc(CmcCase),
    Minimal(SpaceClass),
}

pub fn cmc_constants(space: &BcvSpace, a: f64, h: f64, c: f64) -> CmcConstants {
    let (k, t) = (space.kappa, space.tau);
    let p = 1.0 - 2.0 * a * t;
    let b = p * (k * (1.0 + 2.0 * a * t) - 8.0 * t * t) - c * c;
    let b1 = 4.0 * t * t - 2.0 * a * k * t - c * h;
    CmcConstants {
        b,
        b1,
        b2: (b1 != 0.0).then(|| -b / (2.0 * b1)),
        b3: 4.0 * a * t - a * a * k - 1.0,
        c1: 1.0 + p * p - c * h,
        c2: -c * c - 4.0 * a * a * (1.0 - a * t).powi(2),
        c,
        h,
    }
}

/// Case of the solution family for `(κ, τ, H)`; the hyperbolic sub-branch
/// also depends on `a` and `c` through `b₁² + b(H² + κ)`.
pub fn select_case(space: &BcvSpace, a: f64, h: f64, c: f64, eps: f64) -> Result<CmcCase> {
    let (k, t) = (space.kappa, space.tau);
    if (k - 4.0 * t * t).abs() <= eps {
        if k.abs() <= eps && t.abs() <= eps && h.abs() <= eps {
            return Ok(CmcCase::EuclideanMinimal);
        }
        return Ok(CmcCase::SpaceFormGeneric);
    }
    let kk = h * h + k;
    if kk.abs() <= eps {
        return Ok(CmcCase::CriticalKappa);
    }
    if kk > 0.0 {
        return Ok(CmcCase::Oscillatory);
    }
    let cs = cmc_constants(space, a, h, c);
    let disc = cs.b1 * cs.b1 + cs.b * kk;
    if disc.abs() <= eps {
        return Err(GeomError::DegenerateFamily(format!(
            "b₁² + b(H² + κ) = {disc:e}: constant √Δ is not a closed-form family"
        )));
    }
    Ok(if disc < 0.0 { CmcCase::HyperbolicSinh } else { CmcCase::HyperbolicCosh })
}

/// A closed-form family member `U_c` with its domain.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CmcFamily {
    pub space: BcvSpace,
    pub m: f64,
    pub a: f64,
    pub h: f64,
    pub c: f64,
    pub formula: FamilyFormula,
    pub constants: CmcConstants,
    pub window: Interval,
    pub domain: Interval,
}

/// `(U², (U²)′, (U²)″)`.
pub type SquareJet = (f64, f64, f64);

/// CMC family of the closed-form solution for `(m, a, H, c)`, restricted to
/// a maximal run inside `window`.
pub fn cmc_u(space: &BcvSpace, m: f64, a: f64, h: f64, c: f64, window: Interval, tol: &Tolerances) -> Result<CmcFamily> {
    check_common(m, a, h, c)?;
    let case = select_case(space, a, h, c, tol.case_eps)?;
    let cs = cmc_constants(space, a, h, c);
    let kk = h * h + space.kappa;
    match case {
        CmcCase::SpaceFormGeneric => {
            if 1.0 - 2.0 * a * space.tau <= 0.0 {
                return Err(GeomError::ParameterOutOfRange(format!(
                    "the κ = 4τ² families need 1 − 2aτ > 0, got {}",
                    1.0 - 2.0 * a * space.tau
                )));
            }
            let w2 = h * h + 4.0 * space.tau * space.tau;
            let disc = cs.c1 * cs.c1 + cs.c2 * w2;
            if disc < 0.0 {
                return Err(GeomError::NoRealFamily(format!("c₁² + c₂(H² + 4τ²) = {disc:e} < 0")));
            }
        }
        CmcCase::CriticalKappa => {
            if cs.b2.is_none() || cs.b1.abs() <= tol.case_eps {
                return Err(GeomError::DegenerateFamily("b₁ = 0 leaves b₂ undefined".into()));
            }
        }
        CmcCase::Oscillatory => {
            let disc = cs.b1 * cs.b1 + cs.b * kk;
            if disc < 0.0 {
                return Err(GeomError::NoRealFamily(format!("b₁² + b(H² + κ) = {disc:e} < 0")));
            }
        }
        _ => {}
    }
    finish(space, m, a, h, c, FamilyFormula::Cmc(case), cs, window, tol)
}

/// Minimal family (`H = 0`) of the space's class.
pub fn minimal_u(space: &BcvSpace, m: f64, a: f64, c: f64, window: Interval, tol: &Tolerances) -> Result<CmcFamily> {
    check_common(m, a, 0.0, c)?;
    let class = space.classify();
    let (k, t) = (space.kappa, space.tau);
    let out_of_range = |what: String| Err(GeomError::ParameterOutOfRange(what));
    match class {
        SpaceClass::Sphere => {
            if 1.0 - 2.0 * a * t <= 0.0 {
                return out_of_range(format!("need 1 − 2aτ > 0, got {}", 1.0 - 2.0 * a * t));
            }
            if !(c.abs() < (1.0 / t - 2.0 * a).abs()) {
                return out_of_range(format!("need |c| < |1/τ − 2a| = {}", (1.0 / t - 2.0 * a).abs()));
            }
        }
        SpaceClass::SphereProduct => {
            if !(c.abs() < k.sqrt()) {
                return out_of_range(format!("need |c| < √κ = {}", k.sqrt()));
            }
        }
        SpaceClass::Su2 => {
            let bound = (4.0 * t * t - k).abs() / k.sqrt();
            if !(c.abs() < bound) {
                return out_of_range(format!("need |c| < |4τ² − κ|/√κ = {bound}"));
            }
        }
        _ => {}
    }
    let cs = cmc_constants(space, a, 0.0, c);
    finish(space, m, a, 0.0, c, FamilyFormula::Minimal(class), cs, window, tol)
}

fn check_common(m: f64, a: f64, h: f64, c: f64) -> Result<()> {
    if !(m.is_finite() && m != 0.0) {
        return Err(GeomError::InvalidInput(format!("m must be finite and nonzero, got {m}")));
    }
    if !(a.is_finite() && h.is_finite() && c.is_finite()) {
        return Err(GeomError::InvalidInput("non-finite family parameter".into()));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn finish(
    space: &BcvSpace,
    m: f64,
    a: f64,
    h: f64,
    c: f64,
    formula: FamilyFormula,
    constants: CmcConstants,
    window: Interval,
    tol: &Tolerances,
) -> Result<CmcFamily> {
    let mut fam = CmcFamily { space: *space, m, a, h, c, formula, constants, window, domain: window };
    fam.domain = fam.locate_domain(tol)?;
    Ok(fam)
}

impl CmcFamily {
    fn den(&self) -> f64 {
        self.m * self.m * (4.0 * self.space.tau * self.space.tau - self.space.kappa)
    }

    /// `U²` and its first two derivatives from the closed form.
    pub fn u_square(&self, u: f64) -> SquareJet {
        let (k, t, m, a, c) = (self.space.kappa, self.space.tau, self.m, self.a, self.c);
        let m2 = m * m;
        match self.formula {
            FamilyFormula::Cmc(CmcCase::EuclideanMinimal) | FamilyFormula::Minimal(SpaceClass::Euclidean) => {
                ((u * u + a * a + 0.25 * c * c) / m2, 2.0 * u / m2, 2.0 / m2)
            }
            FamilyFormula::Cmc(CmcCase::SpaceFormGeneric) | FamilyFormula::Minimal(SpaceClass::Sphere) => {
                let cs = &self.constants;
                let w2 = self.h * self.h + 4.0 * t * t;
                let w = w2.sqrt();
                let amp = (cs.c1 * cs.c1 + cs.c2 * w2).max(0.0).sqrt();
                let (sn, cn) = (w * u).sin_cos();
                let d = m2 * w2;
                ((cs.c1 + amp * sn) / d, amp * w * cn / d, -amp * w2 * sn / d)
            }
            FamilyFormula::Minimal(SpaceClass::SphereProduct) => {
                let r = k.sqrt();
                let (sn, cn) = (r * u).sin_cos();
                let d = m2 * k * k;
                let g = c * c - k;
                (
                    (k * (a * a * k + 1.0) + g * sn * sn) / d,
                    2.0 * g * r * sn * cn / d,
                    2.0 * g * k * (cn * cn - sn * sn) / d,
                )
            }
            FamilyFormula::Minimal(SpaceClass::HyperbolicProduct) => {
                let r = (-k).sqrt();
                let (sh, ch) = ((r * u).sinh(), (r * u).cosh());
                let d = m2 * k * k;
                let g = c * c - k;
                (
                    (k * (a * a * k + 1.0) + g * ch * ch) / d,
                    2.0 * g * r * sh * ch / d,
                    2.0 * g * (-k) * (ch * ch + sh * sh) / d,
                )
            }
            FamilyFormula::Minimal(SpaceClass::Heisenberg) => {
                let s = 2.0 * t * t * u * u + 1.0 - 2.0 * a * t + c * c / (8.0 * t * t);
                let (ds, dds) = (4.0 * t * t * u, 4.0 * t * t);
                let d = 4.0 * m2 * t * t;
                ((s * s + 4.0 * a * t - 1.0) / d, 2.0 * s * ds / d, 2.0 * (ds * ds + s * dds) / d)
            }
            FamilyFormula::Minimal(SpaceClass::Su2) | FamilyFormula::Minimal(SpaceClass::Sl2rCover) => {
                let e = 4.0 * t * t - k;
                let amp = (e * e - c * c * k).max(0.0).sqrt();
                let r = k.abs().sqrt();
                let b1 = 4.0 * t * t - 2.0 * a * k * t;
                let (g, dg, ddg) = if k > 0.0 {
                    let (sn, cn) = (r * u).sin_cos();
                    (b1 + amp * sn, amp * r * cn, -amp * k * sn)
                } else {
                    let (sh, ch) = ((r * u).sinh(), (r * u).cosh());
                    (b1 - amp * ch, -amp * r * sh, -amp * r * r * ch)
                };
                let d = m2 * k * k * e;
                (
                    (k * k * (4.0 * a * t - a * a * k - 1.0) + g * g) / d,
                    2.0 * g * dg / d,
                    2.0 * (dg * dg + g * ddg) / d,
                )
            }
            _ => {
                let (s, ds, dds) = self.sqrt_delta_closed(u).unwrap_or((f64::NAN, f64::NAN, f64::NAN));
                let b3 = match self.formula {
                    // the proof's form of b₃, identical to the table's when κ = −H²
                    FamilyFormula::Cmc(CmcCase::CriticalKappa) => a * a * self.h * self.h + 4.0 * a * t - 1.0,
                    _ => self.constants.b3,
                };
                let d = self.den();
                ((s * s + b3) / d, 2.0 * s * ds / d, 2.0 * (ds * ds + s * dds) / d)
            }
        }
    }

    /// Closed form of `√Δ` with two derivatives, for `κ ≠ 4τ²`.
    pub fn sqrt_delta_closed(&self, u: f64) -> Option<SquareJet> {
        let cs = &self.constants;
        let kk = self.h * self.h + self.space.kappa;
        let case = match self.formula {
            FamilyFormula::Cmc(case) => case,
            FamilyFormula::Minimal(SpaceClass::Heisenberg) => CmcCase::CriticalKappa,
            FamilyFormula::Minimal(SpaceClass::SphereProduct | SpaceClass::Su2) => CmcCase::Oscillatory,
            FamilyFormula::Minimal(SpaceClass::HyperbolicProduct | SpaceClass::Sl2rCover) => CmcCase::HyperbolicCosh,
            FamilyFormula::Minimal(_) => return None,
        };
        match case {
            CmcCase::CriticalKappa => {
                let b2 = cs.b2?;
                Some((0.5 * cs.b1 * u * u + b2, cs.b1 * u, cs.b1))
            }
            CmcCase::Oscillatory => {
                let amp = (cs.b1 * cs.b1 + cs.b * kk).max(0.0).sqrt();
                let r = kk.sqrt();
                let (sn, cn) = (r * u).sin_cos();
                Some(((cs.b1 + amp * sn) / kk, amp * r * cn / kk, -amp * sn))
            }
            CmcCase::HyperbolicCosh => {
                let amp = (cs.b1 * cs.b1 + cs.b * kk).max(0.0).sqrt();
                let r = (-kk).sqrt();
                let (sh, ch) = ((r * u).sinh(), (r * u).cosh());
                Some(((cs.b1 - amp * ch) / kk, -amp * r * sh / kk, amp * ch))
            }
            CmcCase::HyperbolicSinh => {
                let amp = (-cs.b1 * cs.b1 - cs.b * kk).max(0.0).sqrt();
                let r = (-kk).sqrt();
                let (sh, ch) = ((r * u).sinh(), (r * u).cosh());
                Some(((cs.b1 - amp * sh) / kk, -amp * r * ch / kk, amp * sh))
            }
            CmcCase::EuclideanMinimal | CmcCase::SpaceFormGeneric => None,
        }
    }

    /// `y` of the first integral, `(H x² + c)/(2√Δ)` for `κ = 4τ²` and
    /// `(H√Δ + c)/(4τ² − κ)` otherwise, with `x = mU`.
    pub fn y_solution(&self, u: f64) -> Result<f64> {
        let (p, _, _) = self.u_square(u);
        let x2 = self.m * self.m * p;
        y_solution_at(&self.space, self.a, self.h, self.c, x2, u)
    }

    /// `m²U² − a²` and its derivative.
    fn axis_gap(&self, u: f64) -> (f64, f64) {
        let (p, dp, _) = self.u_square(u);
        let m2 = self.m * self.m;
        (m2 * p - self.a * self.a, m2 * dp)
    }

    fn admissible(&self, u: f64, floor: f64) -> bool {
        let (p, dp, ddp) = self.u_square(u);
        if !(p > 0.0 && dp.is_finite() && ddp.is_finite()) {
            return false;
        }
        if !(self.axis_gap(u).0 > floor) {
            return false;
        }
        if let Some((s, _, _)) = self.sqrt_delta_closed(u) {
            if !(s > 0.0) {
                return false;
            }
        }
        if self.h != 0.0 {
            match self.y_solution(u) {
                Ok(y) if y >= 0.0 => {}
                _ => return false,
            }
        }
        true
    }

    /// Where the scan steps over a dip of `m²U² − a²` below the floor
    /// between two admissible samples (a double zero of `U²`, say), the
    /// interval `[lo, hi]` of the dip.
    fn dip(&self, x0: f64, x1: f64, tol: &Tolerances) -> Result<Option<(f64, f64)>> {
        let slope = |u: f64| self.axis_gap(u).1;
        if !(slope(x0) < 0.0 && slope(x1) > 0.0) {
            return Ok(None);
        }
        let bottom = bracket_flip(|u| slope(u) < 0.0, x0, x1, tol.bisect_tol)?;
        let ok = |u: f64| self.admissible(u, tol.axis_floor);
        if ok(bottom) {
            return Ok(None);
        }
        Ok(Some((bracket_flip(ok, x0, bottom, tol.bisect_tol)?, bracket_flip(ok, x1, bottom, tol.bisect_tol)?)))
    }

    fn locate_domain(&self, tol: &Tolerances) -> Result<Interval> {
        let w = self.window;
        let ok = |u: f64| self.admissible(u, tol.axis_floor);
        let xs = w.linspace(DOMAIN_SCAN + 1);
        let flags: Vec<bool> = xs.iter().map(|&u| ok(u)).collect();
        let last = xs.len() - 1;
        // Endpoints of admissible runs: scan ends, bisected flips and dips.
        let mut runs: Vec<(f64, f64)> = Vec::new();
        let mut start: Option<f64> = None;
        for i in 0..=last {
            if !flags[i] {
                continue;
            }
            let lo = match start {
                Some(lo) => lo,
                None if i == 0 => xs[0],
                None => bracket_flip(ok, xs[i], xs[i - 1], tol.bisect_tol)?,
            };
            if i == last {
                runs.push((lo, xs[i]));
                break;
            }
            if !flags[i + 1] {
                runs.push((lo, bracket_flip(ok, xs[i], xs[i + 1], tol.bisect_tol)?));
                start = None;
            } else if let Some((a, b)) = self.dip(xs[i], xs[i + 1], tol)? {
                runs.push((lo, a));
                start = Some(b);
            } else {
                start = Some(lo);
            }
        }
        let mid = w.mid();
        let (lo, hi) = runs
            .iter()
            .copied()
            .find(|&(lo, hi)| lo <= mid && mid <= hi)
            .or_else(|| runs.iter().copied().max_by(|x, y| (x.1 - x.0).total_cmp(&(y.1 - y.0)).then(y.0.total_cmp(&x.0))))
            .ok_or_else(|| GeomError::EmptyDomain(format!("family is nowhere admissible on [{}, {}]", w.lo, w.hi)))?;
        if !(hi > lo) {
            return Err(GeomError::EmptyDomain(format!("admissible run degenerates to u = {lo}")));
        }
        Interval::new(lo, hi)
    }

    pub fn case(&self) -> Option<CmcCase> {
        match self.formula {
            FamilyFormula::Cmc(c) => Some(c),
            FamilyFormula::Minimal(_) => None,
        }
    }

    /// `U` with analytic derivatives.
    pub fn profile(&self) -> MetricProfile {
        let fam = self.clone();
        let label = match self.formula {
            FamilyFormula::Cmc(c) => format!("cmc {c} H={} c={} m={} a={}", self.h, self.c, self.m, self.a),
            FamilyFormula::Minimal(s) => format!("minimal {s} c={} m={} a={}", self.c, self.m, self.a),
        };
        MetricProfile::from_square(label, move |u| fam.u_square(u))
    }

    /// Bour seed over `domain` (the family domain when `None`).
    pub fn seed(&self, domain: Option<Interval>) -> Result<BourSeed> {
        BourSeed::new(self.profile(), self.m, self.a, domain.unwrap_or(self.domain))
    }

    /// Residual of `z′² = −(H² + 4τ²)z² + 2c₁z + c₂` for `z = m²U²`.
    pub fn eq_z_residual(&self, u: f64) -> f64 {
        let (p, dp, _) = self.u_square(u);
        let m2 = self.m * self.m;
        let (z, dz) = (m2 * p, m2 * dp);
        let w2 = self.h * self.h + 4.0 * self.space.tau * self.space.tau;
        dz * dz - (-w2 * z * z + 2.0 * self.constants.c1 * z + self.constants.c2)
    }

    /// Residual of `(√Δ)′² = −(H² + κ)Δ + 2b₁√Δ + b`, with `Δ` computed from
    /// `U` (not from the closed form of `√Δ`).
    pub fn eq_sqrt_delta_residual(&self, u: f64) -> Result<f64> {
        let (p, dp, _) = self.u_square(u);
        let (k, t, a, m) = (self.space.kappa, self.space.tau, self.a, self.m);
        let e = 4.0 * t * t - k;
        let d = (1.0 - 2.0 * a * t).powi(2) + (m * m * p - a * a) * e;
        if !(d > 0.0) {
            return Err(GeomError::NegativeDiscriminant { u, value: d });
        }
        let s = d.sqrt();
        let ds = m * m * dp * e / (2.0 * s);
        let kk = self.h * self.h + k;
        Ok(ds * ds - (-kk * d + 2.0 * self.constants.b1 * s + self.constants.b))
    }
}

fn y_solution_at(space: &BcvSpace, a: f64, h: f64, c: f64, x2: f64, u: f64) -> Result<f64> {
    let (k, t) = (space.kappa, space.tau);
    let e = 4.0 * t * t - k;
    let d = (1.0 - 2.0 * a * t).powi(2) + (x2 - a * a) * e;
    if !(d >= 0.0) {
        return Err(GeomError::NegativeDiscriminant { u, value: d });
    }
    let s = d.sqrt();
    if e.abs() <= crate::bcv::CLASS_EPS {
        Ok((h * x2 + c) / (2.0 * s))
    } else {
        Ok((h * s + c) / e)
    }
}

struct OdeTerms {
    delta: f64,
    s: f64,
    num: f64,
    den: f64,
    b: f64,
}

fn ode_terms(space: &BcvSpace, seed: &BourSeed, uu: f64, u: f64) -> Result<OdeTerms> {
    let (k, t, m, a) = (space.kappa, space.tau, seed.m, seed.a);
    let delta = (1.0 - 2.0 * a * t).powi(2) + (m * m * uu * uu - a * a) * (4.0 * t * t - k);
    if !(delta > 0.0) {
        return Err(GeomError::NegativeDiscriminant { u, value: delta });
    }
    let s = delta.sqrt();
    let num = m * m * uu * uu - a * a;
    let den = (1.0 + s).powi(2) - 4.0 * t * t * m * m * uu * uu;
    if !(den > 0.0) {
        return Err(GeomError::NegativeRadicand { u, value: den });
    }
    let b = 2.0 * (1.0 - 2.0 * a * t + s) / den;
    Ok(OdeTerms { delta, s, num, den, b })
}

/// Left side minus right side of the mean curvature equation at `u`.
pub fn cmc_residual(space: &BcvSpace, seed: &BourSeed, h: f64, u: f64, tol: &Tolerances) -> Result<f64> {
    let jet = seed.profile.jet(u)?;
    let (uu, du, ddu) = (jet.value, jet.d1, jet.d2);
    let (k, t, m) = (space.kappa, space.tau, seed.m);
    let o = ode_terms(space, seed, uu, u)?;
    let m2 = m * m;
    let rad = 4.0 * o.num / o.den - m2 * m2 * o.b * o.b * uu * uu * du * du / o.delta;
    let rad = if rad < 0.0 && rad > -tol.radicand_eps { 0.0 } else { rad };
    if rad < 0.0 {
        return Err(GeomError::NegativeRadicand { u, value: rad });
    }
    let flux = (du * du + uu * ddu) / o.s - m2 * (4.0 * t * t - k) * uu * uu * du * du / (o.delta * o.s);
    Ok(h * rad.sqrt() - (2.0 - o.b - m2 * o.b * flux))
}

/// `y` from the change of variables minus `y` from the first integral.
/// For `H = 0` the equation only fixes `y²`, so the magnitude is compared.
pub fn first_integral_check(space: &BcvSpace, seed: &BourSeed, h: f64, c: f64, u: f64, tol: &Tolerances) -> Result<f64> {
    let (uu, du) = seed.profile.value_d1(u)?;
    let (m, a, t) = (seed.m, seed.a, space.tau);
    let (x, dx) = (m * uu, m * du);
    let o = ode_terms(space, seed, uu, u)?;
    let rad = (x * x - a * a) * ((1.0 + o.s).powi(2) - 4.0 * t * t * x * x) / (1.0 - 2.0 * a * t + o.s).powi(2)
        - x * x * dx * dx / o.delta;
    let rad = if rad < 0.0 && rad > -tol.radicand_eps { 0.0 } else { rad };
    if rad < 0.0 {
        return Err(GeomError::NegativeRadicand { u, value: rad });
    }
    let y_sol = y_solution_at(space, a, h, c, x * x, u)?;
    let y_sol = if h == 0.0 { y_sol.abs() } else { y_sol };
    Ok(rad.sqrt() - y_sol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(k: f64, t: f64) -> BcvSpace {
        BcvSpace::new(k, t).unwrap()
    }

    fn win(l: f64) -> Interval {
        Interval::new(-l, l).unwrap()
    }

    fn interior(d: Interval, n: usize) -> Vec<f64> {
        let margin = 0.02 * d.len();
        Interval::new(d.lo + margin, d.hi - margin).unwrap().linspace(n)
    }

    fn max_residual(f: &CmcFamily, tol: &Tolerances) -> f64 {
        let seed = f.seed(None).unwrap();
        interior(f.domain, 50)
            .into_iter()
            .map(|u| cmc_residual(&f.space, &seed, f.h, u, tol).unwrap().abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn constants_examples() {
        let c = cmc_constants(&sp(0.0, 0.0), 0.0, 1.0, 0.0);
        assert_eq!((c.c1, c.c2, c.b1, c.b, c.b3), (2.0, 0.0, 0.0, 0.0, -1.0));
        assert!(c.b2.is_none());
        let c = cmc_constants(&sp(0.0, 0.5), 0.5, 0.0, 1.0);
        assert_eq!((c.b1, c.b, c.b2, c.b3), (1.0, -2.0, Some(1.0), 0.0));
    }

    #[test]
    fn critical_b1_forms_agree() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let (h, t, a, c): (f64, f64, f64, f64) =
                (rng.gen_range(-2.0..2.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-2.0..2.0));
            let s = sp(-h * h, t);
            let cs = cmc_constants(&s, a, h, c);
            let proof = 2.0 * a * t * h * h + 4.0 * t * t - c * h;
            assert!((cs.b1 - proof).abs() < 1e-12);
            assert!((cs.b3 - (a * a * h * h + 4.0 * a * t - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn case_dispatch() {
        let e = 1e-9;
        assert_eq!(select_case(&sp(0.0, 0.0), 0.0, 0.0, 1.0, e).unwrap(), CmcCase::EuclideanMinimal);
        assert_eq!(select_case(&sp(1.0, 0.5), 0.0, 1.0, 1.0, e).unwrap(), CmcCase::SpaceFormGeneric);
        assert_eq!(select_case(&sp(-1.0, 0.0), 0.0, 1.0, 1.0, e).unwrap(), CmcCase::CriticalKappa);
        assert_eq!(select_case(&sp(1.0, 0.0), 0.0, 1.0, 1.0, e).unwrap(), CmcCase::Oscillatory);
        assert_eq!(select_case(&sp(-4.0, 0.0), 0.3, 1.0, 0.5, e).unwrap(), CmcCase::HyperbolicCosh);
        assert_eq!(select_case(&sp(0.0, 0.0), 0.0, 1.0, 0.0, e).unwrap(), CmcCase::SpaceFormGeneric);
    }

    #[test]
    fn representative_families_solve_the_equation() {
        let tol = Tolerances::default();
        let cases = [
            ((0.0, 0.0, 0.0), (0.5, 1.0, 1.0), CmcCase::EuclideanMinimal),
            ((1.0, 0.5, 1.0), (0.25, 0.2, 1.0), CmcCase::SpaceFormGeneric),
            ((-1.0, 0.0, 1.0), (1.0 / 3.0, -0.5, 1.0), CmcCase::CriticalKappa),
            ((1.0, 0.0, 1.0), (1.0 / 3.0, -1.0, 1.0), CmcCase::Oscillatory),
            ((-4.0, 0.0, 1.0), (1.0 / 3.0, 0.5, 1.0), CmcCase::HyperbolicCosh),
            ((-4.0, 0.0, 1.0), (1.0 / 3.0, -0.5, 1.0), CmcCase::HyperbolicCosh),
            ((0.0, 0.0, 1.0), (0.0, 0.0, 1.0), CmcCase::SpaceFormGeneric),
        ];
        for ((k, t, h), (a, c, m), want) in cases {
            let f = cmc_u(&sp(k, t), m, a, h, c, win(4.0), &tol).unwrap();
            assert_eq!(f.case(), Some(want));
            let r = max_residual(&f, &tol);
            assert!(r < 1e-8, "({k},{t},{h}) a={a} c={c}: {r:e} on {:?}", f.domain);
        }
    }

    #[test]
    fn minimal_families_solve_the_equation() {
        let tol = Tolerances::default();
        let cases = [
            ((0.0, 0.0), (0.5, 1.0)),
            ((1.0, 0.5), (0.25, 0.2)),
            ((1.0, 0.0), (1.0 / 3.0, 0.5)),
            ((-1.0, 0.0), (1.0 / 3.0, 0.5)),
            ((0.0, 0.5), (0.5, 1.0)),
            ((2.0, 0.5), (0.2, 1.0 / 3.0)),
            ((-1.0, 0.5), (0.2, 1.0 / 3.0)),
        ];
        for ((k, t), (a, c)) in cases {
            let f = minimal_u(&sp(k, t), 1.0, a, c, win(4.0), &tol).unwrap();
            let r = max_residual(&f, &tol);
            assert!(r < 1e-8, "({k},{t}) a={a} c={c}: {r:e} on {:?}", f.domain);
        }
    }

    #[test]
    fn nil_helicoidal_catenoid_profile() {
        let tol = Tolerances::default();
        let f = minimal_u(&sp(0.0, 0.5), 1.0, 0.5, 1.0, win(3.0), &tol).unwrap();
        for u in win(3.0).linspace(13) {
            let (p, _, _) = f.u_square(u);
            assert!((p.sqrt() - 0.5 * (u * u + 2.0)).abs() < 1e-13);
        }
        assert_eq!(f.domain, win(3.0));
    }

    #[test]
    fn do_carmo_formula() {
        let tol = Tolerances::default();
        let (h, a, c, m) = (0.8, 0.3, 0.4, 1.2);
        let f = cmc_u(&sp(0.0, 0.0), m, a, h, c, win(3.0), &tol).unwrap();
        for u in f.domain.linspace(9) {
            let want = (2.0 - c * h + 2.0 * (1.0 - c * h - a * a * h * h).sqrt() * (h * u).sin()) / (m * m * h * h);
            assert!((f.u_square(u).0 - want).abs() < 1e-13);
        }
    }

    #[test]
    fn minimal_corollary_matches_theorem_at_zero_curvature() {
        let tol = Tolerances::default();
        for &(k, t, a, c) in &[(1.0, 0.0, 0.3, 0.5), (-1.0, 0.0, 0.3, 0.5), (2.0, 0.5, 0.2, 0.3), (-1.0, 0.5, 0.2, 0.3), (0.0, 0.5, 0.5, 1.0)] {
            let s = sp(k, t);
            let mf = minimal_u(&s, 1.0, a, c, win(3.0), &tol).unwrap();
            let tf = cmc_u(&s, 1.0, a, 0.0, c, win(3.0), &tol).unwrap();
            for u in win(3.0).linspace(25) {
                assert!((mf.u_square(u).0 - tf.u_square(u).0).abs() < 1e-12, "({k},{t}) u={u}");
            }
        }
    }

    #[test]
    fn constraint_violations() {
        let tol = Tolerances::default();
        let e = minimal_u(&sp(1.0, 0.5), 1.0, 0.25, 1.6, win(3.0), &tol).unwrap_err();
        assert!(matches!(e, GeomError::ParameterOutOfRange(_)));
        let e = minimal_u(&sp(1.0, 0.0), 1.0, 0.25, 1.0, win(3.0), &tol).unwrap_err();
        assert!(matches!(e, GeomError::ParameterOutOfRange(_)));
        let e = minimal_u(&sp(2.0, 0.5), 1.0, 0.25, 0.8, win(3.0), &tol).unwrap_err();
        assert!(matches!(e, GeomError::ParameterOutOfRange(_)));
        let e = cmc_u(&sp(1.0, 0.5), 1.0, 1.5, 1.0, 0.0, win(3.0), &tol).unwrap_err();
        assert!(matches!(e, GeomError::ParameterOutOfRange(_)));
        // b₁ = 0 in the critical case: τ = 0, a anything, c = 0
        let e = cmc_u(&sp(-1.0, 0.0), 1.0, 0.3, 1.0, 0.0, win(3.0), &tol).unwrap_err();
        assert!(matches!(e, GeomError::DegenerateFamily(_)));
    }

    #[test]
    fn perturbation_is_detected() {
        let tol = Tolerances::default();
        let f = minimal_u(&sp(0.0, 0.5), 1.0, 0.5, 1.0, win(3.0), &tol).unwrap();
        let p = crate::profile::MetricProfile::analytic("perturbed", |u| {
            // a shift in u is another minimal member, so bend the profile instead
            Ok(crate::profile::ProfileJet {
                value: 0.5 * (u * u + 2.0) + 0.05 * u.sin(),
                d1: u + 0.05 * u.cos(),
                d2: 1.0 - 0.05 * u.sin(),
            })
        });
        let seed = BourSeed::new(p, 1.0, 0.5, f.domain).unwrap();
        let worst = interior(f.domain, 50)
            .into_iter()
            .map(|u| cmc_residual(&f.space, &seed, 0.0, u, &tol).unwrap().abs())
            .fold(0.0, f64::max);
        assert!(worst > 1e-3, "{worst}");
    }

    #[test]
    fn first_integral_and_auxiliary_odes() {
        let tol = Tolerances::default();
        let f = minimal_u(&sp(0.0, 0.5), 1.0, 0.5, 1.0, win(3.0), &tol).unwrap();
        let seed = f.seed(None).unwrap();
        for u in win(3.0).linspace(31) {
            assert!(first_integral_check(&f.space, &seed, 0.0, 1.0, u, &tol).unwrap().abs() < 1e-8);
            assert!(f.eq_sqrt_delta_residual(u).unwrap().abs() < 1e-8);
        }
        let g = cmc_u(&sp(1.0, 0.5), 1.0, 0.25, 1.0, 0.2, win(4.0), &tol).unwrap();
        for u in interior(g.domain, 31) {
            assert!(g.eq_z_residual(u).abs() < 1e-8);
        }
        let e = cmc_u(&sp(0.0, 0.0), 1.0, 0.5, 0.0, 1.0, win(3.0), &tol).unwrap();
        let seed = e.seed(None).unwrap();
        for u in interior(e.domain, 11) {
            assert!(first_integral_check(&e.space, &seed, 0.0, 1.0, u, &tol).unwrap().abs() < 1e-8);
        }
    }
}
