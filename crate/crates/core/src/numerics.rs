//! Shared numerical kernels: Gauss–Kronrod quadrature, Richardson-extrapolated
//! central differences and bisection.
//!
//! Everything here is deterministic: the same inputs always produce
//! bit-identical outputs.

use std::collections::BinaryHeap;
use std::cmp::Ordering;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || hi < lo {
            return Err(GeomError::InvalidInput(format!("bad interval [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi <= self.lo
    }

    /// Shrinks both ends by `margin`.
    pub fn inset(&self, margin: f64) -> Result<Self> {
        Self::new(self.lo + margin, self.hi - margin)
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (hi >= lo).then_some(Interval { lo, hi })
    }

    /// `n` equally spaced samples including both endpoints (`n >= 2`), or the
    /// midpoint when `n == 1`.
    pub fn linspace(&self, n: usize) -> Vec<f64> {
        linspace(self.lo, self.hi, n)
    }
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.5 * (lo + hi)],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
                .collect()
        }
    }
}

/// Numerical tolerances and step sizes, threaded through every module.
///
/// The acceptance thresholds in the test suite assume the defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub quad_abs: f64,
    pub quad_rel: f64,
    pub quad_max_panels: usize,
    /// Knot spacing of the cumulative integrals behind natural charts.
    pub quad_knot_spacing: f64,
    /// First-derivative step of the extrinsic oracle.
    pub fd_h1: f64,
    /// Second-derivative step of the extrinsic oracle and of Christoffel symbols.
    pub fd_h2: f64,
    /// Smallest step the oracle may shrink to near a domain edge.
    pub fd_h_min: f64,
    /// Step of the Brioschi sub-grid.
    pub brioschi_h: f64,
    /// Step used when a metric profile has no analytic derivatives.
    pub profile_h: f64,
    pub bisect_tol: f64,
    /// Smallest `m²U² − a²` admitted in a CMC family domain. Closer to the
    /// axis the chart formulas are dominated by rounding.
    pub axis_floor: f64,
    /// Radicands within `radicand_eps` of zero, relative to their leading
    /// term, are read as zero.
    pub radicand_eps: f64,
    /// Band around case boundaries of the CMC dispatch.
    pub case_eps: f64,
    /// Admissible arc-length residual of a profile curve sample.
    pub arclength: f64,
    /// Admissible disagreement of the two relations defining σ.
    pub sigma_consistency: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            quad_abs: 1e-10,
            quad_rel: 1e-10,
            quad_max_panels: 4000,
            quad_knot_spacing: 0.05,
            fd_h1: 1e-5,
            fd_h2: 1e-4,
            fd_h_min: 1e-7,
            brioschi_h: 1e-2,
            profile_h: 1e-3,
            bisect_tol: 1e-10,
            axis_floor: 1e-6,
            radicand_eps: 1e-12,
            case_eps: 1e-9,
            arclength: 1e-6,
            sigma_consistency: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub panel_count: usize,
}

#[allow(clippy::excessive_precision)]
const XGK21: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG10: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK21: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// One 21-point Kronrod panel: `(value, error estimate)`.
fn gk21<F>(f: &F, lo: f64, hi: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64> + ?Sized,
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center)?;
    let mut res_k = fc * WGK21[10];
    let mut res_g = 0.0;
    let mut res_abs = fc.abs() * WGK21[10];
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK21[j];
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK21[j] * (f1 + f2);
        res_abs += WGK21[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG10[j / 2] * (f1 + f2);
        }
    }
    let mean = res_k * 0.5;
    let mut res_asc = WGK21[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK21[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    if !value.is_finite() {
        return Err(GeomError::QuadratureFailure { lo, hi, estimate: f64::INFINITY, panels: 1 });
    }
    Ok((value, err))
}

/// Value of the 21-point Kronrod rule on `[lo, hi]` without refinement.
///
/// This is a smooth function of both endpoints, which is what the
/// finite-difference oracle needs when it differentiates an integral.
pub fn kronrod_panel<F>(f: &F, lo: f64, hi: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64> + ?Sized,
{
    if lo == hi {
        return Ok(0.0);
    }
    gk21(f, lo, hi).map(|(v, _)| v)
}

struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err).then(other.lo.total_cmp(&self.lo))
    }
}

/// Globally adaptive Gauss–Kronrod (10/21) quadrature. The panel with the
/// largest error estimate is bisected until the summed estimate drops below
/// `max(abs_tol, rel_tol·|value|)`.
///
/// The interval is first mapped from `[0, 1]` by `x = lo + (hi − lo)(3s² − 2s³)`,
/// whose derivative vanishes linearly at both ends. That turns integrable
/// square-root endpoint singularities into smooth integrands and leaves
/// smooth ones smooth.
pub fn quad_adaptive<F>(f: &F, lo: f64, hi: f64, abs_tol: f64, rel_tol: f64) -> Result<QuadResult>
where
    F: Fn(f64) -> Result<f64> + ?Sized,
{
    quad_adaptive_capped(f, lo, hi, abs_tol, rel_tol, Tolerances::default().quad_max_panels)
}

pub fn quad_adaptive_capped<F>(
    f: &F,
    lo: f64,
    hi: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> Result<QuadResult>
where
    F: Fn(f64) -> Result<f64> + ?Sized,
{
    if lo == hi {
        return Ok(QuadResult { value: 0.0, abs_error_estimate: 0.0, panel_count: 1 });
    }
    let (sign, lo0, hi0) = if lo < hi { (1.0, lo, hi) } else { (-1.0, hi, lo) };
    let w = hi0 - lo0;
    let g = |s: f64| -> Result<f64> {
        let d = 6.0 * w * s * (1.0 - s);
        if d == 0.0 {
            return Ok(0.0);
        }
        let x = lo0 + w * s * s * (3.0 - 2.0 * s);
        Ok(f(x.clamp(lo0, hi0))? * d)
    };
    let f = &g;
    let (a, b) = (0.0, 1.0);
    let (v0, e0) = gk21(f, a, b)?;
    let mut heap = BinaryHeap::new();
    heap.push(Panel { lo: a, hi: b, value: v0, err: e0 });
    let mut total = v0;
    let mut total_err = e0;
    let mut panels = 1usize;
    loop {
        if total_err <= abs_tol.max(rel_tol * total.abs()) {
            break;
        }
        if panels >= max_panels {
            return Err(GeomError::QuadratureFailure { lo, hi, estimate: total_err, panels });
        }
        let worst = heap.pop().expect("heap holds at least one panel");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // Panel can no longer be split in floating point.
            heap.push(worst);
            return Err(GeomError::QuadratureFailure { lo, hi, estimate: total_err, panels });
        }
        let (vl, el) = gk21(f, worst.lo, mid)?;
        let (vr, er) = gk21(f, mid, worst.hi)?;
        total += vl + vr - worst.value;
        total_err += el + er - worst.err;
        heap.push(Panel { lo: worst.lo, hi: mid, value: vl, err: el });
        heap.push(Panel { lo: mid, hi: worst.hi, value: vr, err: er });
        panels += 1;
        if panels.is_multiple_of(64) {
            // Re-sum to keep the running totals free of drift.
            total = heap.iter().map(|p| p.value).sum();
            total_err = heap.iter().map(|p| p.err).sum();
        }
    }
    let value: f64 = heap.iter().map(|p| p.value).sum();
    let err: f64 = heap.iter().map(|p| p.err).sum();
    Ok(QuadResult { value: sign * value, abs_error_estimate: err, panel_count: panels })
}

pub type Integrand = Arc<dyn Fn(f64) -> Result<f64> + Send + Sync>;

/// Antiderivative `F(u) = ∫_{origin}^{u} f` over a fixed domain.
///
/// Panel sums between knots are computed once, adaptively. Evaluating at `u`
/// adds a single Kronrod panel from the knot below `u`, so `F` is smooth in
/// `u` and a whole grid costs one sweep.
#[derive(Clone)]
pub struct CumulativeIntegral {
    integrand: Integrand,
    domain: Interval,
    origin: f64,
    knots: Vec<f64>,
    values: Vec<f64>,
}

impl std::fmt::Debug for CumulativeIntegral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CumulativeIntegral")
            .field("domain", &self.domain)
            .field("origin", &self.origin)
            .field("knots", &self.knots.len())
            .finish()
    }
}

impl CumulativeIntegral {
    pub fn new(integrand: Integrand, domain: Interval, origin: f64, tol: &Tolerances) -> Result<Self> {
        if !domain.contains(origin) {
            return Err(GeomError::InvalidInput(format!(
                "integration origin {origin} outside [{}, {}]",
                domain.lo, domain.hi
            )));
        }
        let spacing = tol.quad_knot_spacing;
        let n_left = ((origin - domain.lo) / spacing).ceil() as usize;
        let n_right = ((domain.hi - origin) / spacing).ceil() as usize;
        let mut knots = Vec::with_capacity(n_left + n_right + 1);
        for i in (1..=n_left).rev() {
            knots.push(origin - (origin - domain.lo) * i as f64 / n_left as f64);
        }
        knots.push(origin);
        for i in 1..=n_right {
            knots.push(origin + (domain.hi - origin) * i as f64 / n_right as f64);
        }
        let mut values = vec![0.0; knots.len()];
        for k in n_left + 1..knots.len() {
            let q = quad_adaptive_capped(
                integrand.as_ref(),
                knots[k - 1],
                knots[k],
                tol.quad_abs,
                tol.quad_rel,
                tol.quad_max_panels,
            )?;
            values[k] = values[k - 1] + q.value;
        }
        for k in (0..n_left).rev() {
            let q = quad_adaptive_capped(
                integrand.as_ref(),
                knots[k],
                knots[k + 1],
                tol.quad_abs,
                tol.quad_rel,
                tol.quad_max_panels,
            )?;
            values[k] = values[k + 1] - q.value;
        }
        Ok(Self { integrand, domain, origin, knots, values })
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn integrand(&self, u: f64) -> Result<f64> {
        (self.integrand)(u)
    }

    pub fn eval(&self, u: f64) -> Result<f64> {
        if !self.domain.contains(u) {
            return Err(GeomError::InvalidInput(format!(
                "u = {u} outside [{}, {}]",
                self.domain.lo, self.domain.hi
            )));
        }
        let k = match self.knots.partition_point(|&x| x <= u) {
            0 => 0,
            p => (p - 1).min(self.knots.len() - 1),
        };
        if self.knots[k] == u {
            return Ok(self.values[k]);
        }
        Ok(self.values[k] + kronrod_panel(self.integrand.as_ref(), self.knots[k], u)?)
    }
}

/// Central difference of order 1 or 2 with one Richardson level (error O(h⁴)).
pub fn diff_central<F>(f: F, u: f64, order: u8, h: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let d = |h: f64| -> Result<f64> {
        match order {
            1 => Ok((f(u + h)? - f(u - h)?) / (2.0 * h)),
            2 => Ok((f(u + h)? - 2.0 * f(u)? + f(u - h)?) / (h * h)),
            _ => Err(GeomError::InvalidInput(format!("derivative order {order} not supported"))),
        }
    };
    let coarse = d(h)?;
    let fine = d(0.5 * h)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// [`diff_central`] with the step shrunk so the stencil stays inside
/// `domain`. Fails with `StencilOutOfDomain` when the step would drop below
/// `h_min`.
pub fn diff_central_within<F>(f: F, u: f64, order: u8, h: f64, domain: Interval, h_min: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let room = (u - domain.lo).min(domain.hi - u);
    let h = h.min(room);
    if !(h >= h_min) {
        return Err(GeomError::StencilOutOfDomain { u, t: f64::NAN });
    }
    diff_central(f, u, order, h)
}

/// Root of `f` on `[lo, hi]` by bisection, assuming a sign change.
pub fn bracket_root<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let (fa, fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(GeomError::NoBracket { lo, hi });
    }
    let neg_at_a = fa < 0.0;
    while (b - a).abs() > tol {
        let m = 0.5 * (a + b);
        if m <= a.min(b) || m >= a.max(b) {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if (fm < 0.0) == neg_at_a {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Abscissa where a boolean predicate flips on `[lo, hi]`, by bisection.
/// Returns the end of the final bracket on the side where the predicate
/// agrees with `pred(lo)`.
pub fn bracket_flip<P>(pred: P, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    P: Fn(f64) -> bool,
{
    let start = pred(lo);
    if pred(hi) == start {
        return Err(GeomError::NoBracket { lo, hi });
    }
    let (mut a, mut b) = (lo, hi);
    while (b - a).abs() > tol {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        if pred(m) == start {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(a)
}
