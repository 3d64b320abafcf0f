//! Extrinsic measurements of helicoidal surfaces.
//!
//! Everything here works from the embedding `(u, t) ↦ ℝ³` and the ambient
//! metric alone: tangents and second derivatives by central differences,
//! the normal and second fundamental form from `g` and its Christoffel
//! symbols. None of the profile-curve or Bour formulas enter, which makes
//! these functions an independent check of both.

use nalgebra::{Matrix2, Matrix3, Vector3};
use rayon::prelude::*;
use serde::Serialize;

use crate::bcv::{AmbientPoint, BcvSpace, CylPoint};
use crate::bour::NaturalChart;
use crate::error::{GeomError, Result};
use crate::numerics::{Interval, Tolerances};
use crate::orbit::{HelicoidalAction, ProfileCurve};
use crate::profile::MetricProfile;

/// Smallest sub-grid spacing for the Brioschi stencil near domain edges.
const BRIOSCHI_H_MIN: f64 = 1e-4;

#[derive(Debug, Clone)]
pub enum ChartSource {
    Natural(Box<NaturalChart>),
    /// A profile curve swept by the helicoidal action, in `(u, θ)`.
    Raw { action: HelicoidalAction, curve: ProfileCurve },
}

/// A parametrized helicoidal surface over `u_range × t_range`.
#[derive(Debug, Clone)]
pub struct SurfaceChart {
    pub source: ChartSource,
    pub u_range: Interval,
    pub t_range: Interval,
}

/// Values at `(u, t)` of the first fundamental form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FirstForm {
    pub e: f64,
    pub f: f64,
    pub g: f64,
}

impl SurfaceChart {
    pub fn natural(chart: NaturalChart, u_range: Option<Interval>, t_range: Interval) -> Result<Self> {
        let u_range = clip(chart.domain(), u_range)?;
        Ok(Self { source: ChartSource::Natural(Box::new(chart)), u_range, t_range })
    }

    pub fn raw(action: HelicoidalAction, curve: ProfileCurve, u_range: Option<Interval>, t_range: Interval) -> Result<Self> {
        let u_range = clip(curve.domain(), u_range)?;
        Ok(Self { source: ChartSource::Raw { action, curve }, u_range, t_range })
    }

    pub fn space(&self) -> BcvSpace {
        match &self.source {
            ChartSource::Natural(c) => c.space(),
            ChartSource::Raw { action, .. } => action.space,
        }
    }

    /// Interval on which the parametrization itself is defined (may exceed
    /// `u_range`); finite-difference stencils must stay inside it.
    pub fn u_domain(&self) -> Interval {
        match &self.source {
            ChartSource::Natural(c) => c.domain(),
            ChartSource::Raw { curve, .. } => curve.domain(),
        }
    }

    pub fn cylindrical(&self, u: f64, t: f64) -> Result<CylPoint> {
        match &self.source {
            ChartSource::Natural(c) => c.cylindrical(u, t),
            ChartSource::Raw { action, curve } => {
                let p = curve.point(u)?;
                Ok(CylPoint::new(p.xi1, t, p.xi2 + action.a * t))
            }
        }
    }

    /// The surface point in `(u, θ)` coordinates, whatever the chart's own
    /// second parameter is.
    pub fn cylindrical_raw(&self, u: f64, theta: f64) -> Result<CylPoint> {
        match &self.source {
            ChartSource::Natural(c) => Ok(CylPoint::new(c.xi1(u)?, theta, c.xi2(u)? + c.a() * theta)),
            ChartSource::Raw { .. } => self.cylindrical(u, theta),
        }
    }

    pub fn embed(&self, u: f64, t: f64) -> Result<AmbientPoint> {
        Ok(self.cylindrical(u, t)?.to_cartesian())
    }

    fn embed_v(&self, u: f64, t: f64) -> Result<Vector3<f64>> {
        Ok(self.embed(u, t)?.to_vector())
    }

    /// Step in `u` shrunk so that `u ± h` stays in the parametrization domain.
    fn u_step(&self, u: f64, t: f64, h: f64, tol: &Tolerances) -> Result<f64> {
        let d = self.u_domain();
        let room = (u - d.lo).min(d.hi - u);
        let h = h.min(room);
        if !(h >= tol.fd_h_min) {
            return Err(GeomError::StencilOutOfDomain { u, t });
        }
        Ok(h)
    }
}

fn clip(domain: Interval, range: Option<Interval>) -> Result<Interval> {
    match range {
        None => Ok(domain),
        Some(r) => r
            .intersect(&domain)
            .ok_or_else(|| GeomError::EmptyDomain(format!("[{}, {}] misses the chart domain", r.lo, r.hi))),
    }
}

/// First and second partial derivatives of the embedding.
#[derive(Debug, Clone, Copy)]
pub struct Jet2 {
    pub p: Vector3<f64>,
    pub pu: Vector3<f64>,
    pub pt: Vector3<f64>,
    pub puu: Vector3<f64>,
    pub put: Vector3<f64>,
    pub ptt: Vector3<f64>,
}

fn richardson(coarse: Vector3<f64>, fine: Vector3<f64>) -> Vector3<f64> {
    (fine * 4.0 - coarse) / 3.0
}

/// `ψ_u` and `ψ_t` by central differences with one Richardson level.
pub fn tangents(chart: &SurfaceChart, u: f64, t: f64, tol: &Tolerances) -> Result<(Vector3<f64>, Vector3<f64>)> {
    let hu = chart.u_step(u, t, tol.fd_h1, tol)?;
    let ht = tol.fd_h1;
    let du = |h: f64| -> Result<Vector3<f64>> { Ok((chart.embed_v(u + h, t)? - chart.embed_v(u - h, t)?) / (2.0 * h)) };
    let dt = |h: f64| -> Result<Vector3<f64>> { Ok((chart.embed_v(u, t + h)? - chart.embed_v(u, t - h)?) / (2.0 * h)) };
    Ok((richardson(du(hu)?, du(0.5 * hu)?), richardson(dt(ht)?, dt(0.5 * ht)?)))
}

pub fn second_jet(chart: &SurfaceChart, u: f64, t: f64, tol: &Tolerances) -> Result<Jet2> {
    let (pu, pt) = tangents(chart, u, t, tol)?;
    let hu = chart.u_step(u, t, tol.fd_h2, tol)?;
    let ht = tol.fd_h2;
    let p = chart.embed_v(u, t)?;
    let duu = |h: f64| -> Result<Vector3<f64>> {
        Ok((chart.embed_v(u + h, t)? - p * 2.0 + chart.embed_v(u - h, t)?) / (h * h))
    };
    let dtt = |h: f64| -> Result<Vector3<f64>> {
        Ok((chart.embed_v(u, t + h)? - p * 2.0 + chart.embed_v(u, t - h)?) / (h * h))
    };
    let dut = |h: f64, k: f64| -> Result<Vector3<f64>> {
        Ok((chart.embed_v(u + h, t + k)? - chart.embed_v(u + h, t - k)? - chart.embed_v(u - h, t + k)?
            + chart.embed_v(u - h, t - k)?)
            / (4.0 * h * k))
    };
    Ok(Jet2 {
        p,
        pu,
        pt,
        puu: richardson(duu(hu)?, duu(0.5 * hu)?),
        put: richardson(dut(hu, ht)?, dut(0.5 * hu, 0.5 * ht)?),
        ptt: richardson(dtt(ht)?, dtt(0.5 * ht)?),
    })
}

/// `(E, F, G)` measured with the ambient metric.
pub fn first_form_numeric(chart: &SurfaceChart, u: f64, t: f64, tol: &Tolerances) -> Result<FirstForm> {
    let (pu, pt) = tangents(chart, u, t, tol)?;
    let g = chart.space().metric_cartesian(chart.embed(u, t)?)?;
    Ok(FirstForm { e: pu.dot(&(g * pu)), f: pu.dot(&(g * pt)), g: pt.dot(&(g * pt)) })
}

/// Unit normal `g⁻¹(ψ_u × ψ_t)`, normalized; `(ψ_u, ψ_t, n)` is positively
/// oriented.
pub fn unit_normal(g: &Matrix3<f64>, pu: &Vector3<f64>, pt: &Vector3<f64>) -> Result<Vector3<f64>> {
    let g_inv = g.try_inverse().ok_or_else(|| GeomError::InvalidInput("singular metric".into()))?;
    let n = g_inv * pu.cross(pt);
    let len2 = n.dot(&(g * n));
    if !(len2 > 0.0) {
        return Err(GeomError::DegenerateImmersion { u: f64::NAN, t: f64::NAN, det: len2 });
    }
    Ok(n / len2.sqrt())
}

/// Fundamental forms at a point.
#[derive(Debug, Clone, Copy)]
pub struct Forms {
    pub first: Matrix2<f64>,
    pub second: Matrix2<f64>,
    pub normal: Vector3<f64>,
    pub metric: Matrix3<f64>,
    pub jet: Jet2,
}

pub fn fundamental_forms(chart: &SurfaceChart, u: f64, t: f64, tol: &Tolerances) -> Result<Forms> {
    let space = chart.space();
    let jet = second_jet(chart, u, t, tol)?;
    let p = AmbientPoint::from_vector(&jet.p);
    let g = space.metric_cartesian(p)?;
    let first = Matrix2::new(
        jet.pu.dot(&(g * jet.pu)),
        jet.pu.dot(&(g * jet.pt)),
        jet.pu.dot(&(g * jet.pt)),
        jet.pt.dot(&(g * jet.pt)),
    );
    let det = first.determinant();
    if !(det > 0.0) {
        return Err(GeomError::DegenerateImmersion { u, t, det });
    }
    let n = unit_normal(&g, &jet.pu, &jet.pt).map_err(|_| GeomError::DegenerateImmersion { u, t, det })?;
    let gam = space.christoffels(p, tol.fd_h2)?;
    let gn = g * n;
    let ii = |d2: &Vector3<f64>, a: &Vector3<f64>, b: &Vector3<f64>| (d2 + gam.contract(a, b)).dot(&gn);
    let l = ii(&jet.puu, &jet.pu, &jet.pu);
    let m = ii(&jet.put, &jet.pu, &jet.pt);
    let nn = ii(&jet.ptt, &jet.pt, &jet.pt);
    Ok(Forms { first, second: Matrix2::new(l, m, m, nn), normal: n, metric: g, jet })
}

/// Trace of the shape operator, `tr(I⁻¹ II)`, for the normal of
/// [`unit_normal`].
pub fn mean_curvature_extrinsic(chart: &SurfaceChart, u: f64, t: f64, tol: &Tolerances) -> Result<f64> {
    let f = fundamental_forms(chart, u, t, tol)?;
    let (e, ff, g) = (f.first[(0, 0)], f.first[(0, 1)], f.first[(1, 1)]);
    let (l, m, n) = (f.second[(0, 0)], f.second[(0, 1)], f.second[(1, 1)]);
    Ok((g * l - 2.0 * ff * m + e * n) / (e * g - ff * ff))
}

/// `K = −U″/U`.
pub fn gauss_intrinsic(profile: &MetricProfile, u: f64) -> Result<f64> {
    let j = profile.jet(u)?;
    if !(j.value > 0.0) {
        return Err(GeomError::NegativeRadicand { u, value: j.value });
    }
    Ok(-j.d2 / j.value)
}

fn d5(f: [f64; 5], h: f64) -> f64 {
    (f[0] - 8.0 * f[1] + 8.0 * f[3] - f[4]) / (12.0 * h)
}

fn dd5(f: [f64; 5], h: f64) -> f64 {
    (-f[0] + 16.0 * f[1] - 30.0 * f[2] + 16.0 * f[3] - f[4]) / (12.0 * h * h)
}

/// Gaussian curvature from the first fundamental form alone (Brioschi),
/// sampled on a 5 × 5 sub-grid around `(u, t)`.
pub fn gauss_numeric(chart: &SurfaceChart, u: f64, t: f64, tol: &Tolerances) -> Result<f64> {
    let d = chart.u_domain();
    let room = (u - d.lo).min(d.hi - u) - tol.fd_h1;
    let hu = tol.brioschi_h.min(0.5 * room);
    if !(hu >= BRIOSCHI_H_MIN) {
        return Err(GeomError::StencilOutOfDomain { u, t });
    }
    let ht = tol.brioschi_h;
    let mut e = [[0.0; 5]; 5];
    let mut f = [[0.0; 5]; 5];
    let mut g = [[0.0; 5]; 5];
    for i in 0..5 {
        for j in 0..5 {
            let ff = first_form_numeric(chart, u + (i as f64 - 2.0) * hu, t + (j as f64 - 2.0) * ht, tol)?;
            e[i][j] = ff.e;
            f[i][j] = ff.f;
            g[i][j] = ff.g;
        }
    }
    let col = |a: &[[f64; 5]; 5], j: usize| [a[0][j], a[1][j], a[2][j], a[3][j], a[4][j]];
    let du = |a: &[[f64; 5]; 5]| d5(col(a, 2), hu);
    let dv = |a: &[[f64; 5]; 5]| d5(a[2], ht);
    let duu = |a: &[[f64; 5]; 5]| dd5(col(a, 2), hu);
    let dvv = |a: &[[f64; 5]; 5]| dd5(a[2], ht);
    let duv = |a: &[[f64; 5]; 5]| {
        let rows: [f64; 5] = std::array::from_fn(|i| d5(a[i], ht));
        d5(rows, hu)
    };
    let (e0, f0, g0) = (e[2][2], f[2][2], g[2][2]);
    let (eu, ev, evv) = (du(&e), dv(&e), dvv(&e));
    let (fu, fv, fuv) = (du(&f), dv(&f), duv(&f));
    let (gu, gv, guu) = (du(&g), dv(&g), duu(&g));
    let m1 = Matrix3::new(
        -0.5 * evv + fuv - 0.5 * guu, 0.5 * eu, fu - 0.5 * ev,
        fv - 0.5 * gu, e0, f0,
        0.5 * gv, f0, g0,
    );
    let m2 = Matrix3::new(
        0.0, 0.5 * ev, 0.5 * gu,
        0.5 * ev, e0, f0,
        0.5 * gu, f0, g0,
    );
    let w = e0 * g0 - f0 * f0;
    if !(w > 0.0) {
        return Err(GeomError::DegenerateImmersion { u, t, det: w });
    }
    Ok((m1.determinant() - m2.determinant()) / (w * w))
}

/// Largest componentwise difference of the measured first fundamental forms
/// of two charts over a shared set of parameter points.
pub fn isometry_deviation(a: &SurfaceChart, b: &SurfaceChart, grid: &[(f64, f64)], tol: &Tolerances) -> Result<f64> {
    let devs: Result<Vec<f64>> = grid
        .par_iter()
        .map(|&(u, t)| {
            let (x, y) = (first_form_numeric(a, u, t, tol)?, first_form_numeric(b, u, t, tol)?);
            Ok((x.e - y.e).abs().max((x.f - y.f).abs()).max((x.g - y.g).abs()))
        })
        .collect();
    Ok(devs?.into_iter().fold(0.0, f64::max))
}

/// Largest deviation of the measured first fundamental form from
/// `(1, 0, U²)`.
pub fn natural_form_deviation(chart: &SurfaceChart, profile: &MetricProfile, grid: &[(f64, f64)], tol: &Tolerances) -> Result<f64> {
    let devs: Result<Vec<f64>> = grid
        .par_iter()
        .map(|&(u, t)| {
            let ff = first_form_numeric(chart, u, t, tol)?;
            let uu = profile.value(u)?;
            Ok((ff.e - 1.0).abs().max(ff.f.abs()).max((ff.g - uu * uu).abs()))
        })
        .collect();
    Ok(devs?.into_iter().fold(0.0, f64::max))
}

/// Tensor grid `linspace(u) × linspace(t)`.
pub fn param_grid(u: Interval, t: Interval, nu: usize, nt: usize) -> Vec<(f64, f64)> {
    let ts = t.linspace(nt);
    u.linspace(nu).into_iter().flat_map(|x| ts.iter().map(move |&y| (x, y))).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeshVertex {
    pub u: f64,
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    /// NaN where the stencil does not fit.
    pub h_ext: f64,
    pub k: f64,
    pub cmc_residual: f64,
}

/// Sampled surface. Rows whose `u` lies outside the chart are dropped, so
/// `vertices.len() == row_index.len() * nt`.
#[derive(Debug, Clone, Serialize)]
pub struct MeshGrid {
    pub nu: usize,
    pub nt: usize,
    /// Index in the requested `u` grid of every kept row.
    pub row_index: Vec<usize>,
    pub dropped_rows: usize,
    pub vertices: Vec<MeshVertex>,
    /// Vertices whose curvature diagnostics could not be evaluated.
    pub missing_diagnostics: usize,
}

/// How the second parameter of a mesh is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MeshParam {
    /// The chart's own parameter (`t` for natural charts).
    #[default]
    Chart,
    /// The rotation angle `θ`.
    Raw,
}

pub struct MeshOptions<'a> {
    pub diagnostics: bool,
    pub param: MeshParam,
    /// Per-`u` residual of the mean curvature equation, if known.
    pub residual: Option<&'a (dyn Fn(f64) -> Result<f64> + Sync)>,
}

impl Default for MeshOptions<'_> {
    fn default() -> Self {
        Self { diagnostics: true, param: MeshParam::Chart, residual: None }
    }
}

pub fn sample_mesh(chart: &SurfaceChart, nu: usize, nt: usize, opts: &MeshOptions<'_>, tol: &Tolerances) -> Result<MeshGrid> {
    if nu < 2 || nt < 2 {
        return Err(GeomError::InvalidInput(format!("mesh needs nu, nt ≥ 2 (got {nu}, {nt})")));
    }
    let us = chart.u_range.linspace(nu);
    let ts = chart.t_range.linspace(nt);
    let rows: Vec<Option<Vec<MeshVertex>>> = us
        .par_iter()
        .map(|&u| {
            let res = opts.residual.map(|f| f(u).unwrap_or(f64::NAN)).unwrap_or(f64::NAN);
            let mut row = Vec::with_capacity(nt);
            for &t in &ts {
                let cyl = match opts.param {
                    MeshParam::Chart => chart.cylindrical(u, t),
                    MeshParam::Raw => chart.cylindrical_raw(u, t),
                };
                let p = match cyl {
                    Ok(c) => c.to_cartesian(),
                    Err(_) => return None,
                };
                if chart.space().scaling_factor(p.rsq()).is_err() {
                    return None;
                }
                let (h_ext, k) = if opts.diagnostics && opts.param == MeshParam::Chart {
                    (
                        mean_curvature_extrinsic(chart, u, t, tol).unwrap_or(f64::NAN),
                        gauss_numeric(chart, u, t, tol).unwrap_or(f64::NAN),
                    )
                } else {
                    (f64::NAN, f64::NAN)
                };
                row.push(MeshVertex { u, t, x: p.x, y: p.y, z: p.z, h_ext, k, cmc_residual: res });
            }
            Some(row)
        })
        .collect();
    let mut row_index = Vec::new();
    let mut vertices = Vec::new();
    for (i, r) in rows.into_iter().enumerate() {
        if let Some(r) = r {
            row_index.push(i);
            vertices.extend(r);
        }
    }
    let missing = if opts.diagnostics {
        vertices.iter().filter(|v| v.h_ext.is_nan() || v.k.is_nan()).count()
    } else {
        0
    };
    Ok(MeshGrid { nu, nt, dropped_rows: nu - row_index.len(), row_index, vertices, missing_diagnostics: missing })
}

impl MeshGrid {
    /// Triangles (0-based vertex indices) of quads between adjacent kept
    /// rows.
    pub fn triangles(&self) -> Vec<[usize; 3]> {
        let mut out = Vec::new();
        for r in 0..self.row_index.len().saturating_sub(1) {
            if self.row_index[r + 1] != self.row_index[r] + 1 {
                continue;
            }
            for j in 0..self.nt - 1 {
                let a = r * self.nt + j;
                let b = a + 1;
                let c = a + self.nt;
                let d = c + 1;
                out.push([a, c, d]);
                out.push([a, d, b]);
            }
        }
        out
    }

    pub fn max_abs_h(&self) -> f64 {
        self.vertices.iter().map(|v| v.h_ext.abs()).filter(|x| x.is_finite()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bour::{build_chart, BourSeed};
    use crate::orbit::CurvePoint;
    use crate::profile::ProfileJet;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    fn euclid() -> BcvSpace {
        BcvSpace::euclidean()
    }

    fn catenoid_chart(a: f64, dom: Interval) -> SurfaceChart {
        let tol = Tolerances::default();
        let seed = BourSeed::new(MetricProfile::catenoid(1.0), 1.0, a, dom).unwrap();
        SurfaceChart::natural(build_chart(&euclid(), &seed, &tol).unwrap(), None, iv(-1.0, 1.0)).unwrap()
    }

    fn cylinder(r: f64) -> SurfaceChart {
        let act = HelicoidalAction::rotational(euclid());
        let curve = ProfileCurve::analytic(
            &act,
            iv(-1.0, 1.0),
            move |u| Ok(CurvePoint { xi1: r, xi2: u, dxi1: 0.0, dxi2: 1.0 }),
            &Tolerances::default(),
        )
        .unwrap();
        SurfaceChart::raw(act, curve, None, iv(0.0, 6.0)).unwrap()
    }

    #[test]
    fn embed_examples() {
        let c = catenoid_chart(0.0, iv(-1.0, 1.0));
        let p = c.embed(0.0, 0.0).unwrap();
        assert!((p.x - 1.0).abs() < 1e-15 && p.y.abs() < 1e-15 && p.z.abs() < 1e-15);
        let h = catenoid_chart(1.0, iv(0.2, 2.0));
        let p = h.embed(1.3, 0.7).unwrap();
        let q = CylPoint::new(1.3, 0.7, 0.7).to_cartesian();
        assert!((p.x - q.x).abs() < 1e-12 && (p.y - q.y).abs() < 1e-12 && (p.z - q.z).abs() < 1e-12);
    }

    #[test]
    fn natural_first_form() {
        let tol = Tolerances::default();
        for &a in &[0.0, 0.5, 0.9] {
            let c = catenoid_chart(a, iv(-2.0, 2.0));
            for &(u, t) in &[(-1.5, 0.3), (0.0, -0.9), (1.2, 2.0)] {
                let f = first_form_numeric(&c, u, t, &tol).unwrap();
                assert!((f.e - 1.0).abs() < 1e-8 && f.f.abs() < 1e-8 && (f.g - (u * u + 1.0)).abs() < 1e-8, "{f:?}");
            }
        }
    }

    #[test]
    fn normal_is_unit_and_orthogonal() {
        let tol = Tolerances::default();
        let sp = BcvSpace::new(0.0, 0.5).unwrap();
        let p = MetricProfile::analytic("nil", |u| Ok(ProfileJet { value: 0.5 * (u * u + 2.0), d1: u, d2: 1.0 }));
        let seed = BourSeed::new(p, 1.0, 0.25, iv(-2.0, 2.0)).unwrap();
        let c = SurfaceChart::natural(build_chart(&sp, &seed, &tol).unwrap(), None, iv(0.0, 1.0)).unwrap();
        let f = fundamental_forms(&c, 0.7, 0.4, &tol).unwrap();
        let gn = f.metric * f.normal;
        assert!(gn.dot(&f.jet.pu).abs() < 1e-10);
        assert!(gn.dot(&f.jet.pt).abs() < 1e-10);
        assert!((gn.dot(&f.normal) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn cylinder_mean_curvature() {
        let tol = Tolerances::default();
        for &r in &[0.5, 1.0, 2.0] {
            let h = mean_curvature_extrinsic(&cylinder(r), 0.1, 0.8, &tol).unwrap();
            assert!((h - 1.0 / r).abs() < 1e-6, "{h}");
        }
    }

    #[test]
    fn catenoid_and_helicoid_are_minimal() {
        let tol = Tolerances::default();
        let c = catenoid_chart(0.0, iv(-2.0, 2.0));
        let h = catenoid_chart(1.0, iv(0.1, 2.0));
        for &(u, t) in &[(-1.0, 0.2), (0.5, 1.0)] {
            assert!(mean_curvature_extrinsic(&c, u, t, &tol).unwrap().abs() < 1e-5);
        }
        for &(u, t) in &[(0.5, 0.2), (1.5, 1.0)] {
            assert!(mean_curvature_extrinsic(&h, u, t, &tol).unwrap().abs() < 1e-5);
        }
    }

    #[test]
    fn gauss_examples() {
        let tol = Tolerances::default();
        let cst = MetricProfile::analytic("1", |_| Ok(ProfileJet { value: 1.0, d1: 0.0, d2: 0.0 }));
        assert_eq!(gauss_intrinsic(&cst, 0.3).unwrap(), 0.0);
        let cos = MetricProfile::analytic("cos", |u: f64| Ok(ProfileJet { value: u.cos(), d1: -u.sin(), d2: -u.cos() }));
        assert!((gauss_intrinsic(&cos, 0.4).unwrap() - 1.0).abs() < 1e-15);
        let cat = MetricProfile::catenoid(1.0);
        assert!((gauss_intrinsic(&cat, 0.5).unwrap() + 1.0 / 1.25f64.powi(2)).abs() < 1e-14);
        let c = catenoid_chart(0.0, iv(-2.0, 2.0));
        assert!((gauss_numeric(&c, 0.0, 0.0, &tol).unwrap() + 1.0).abs() < 1e-4);
        assert!(gauss_numeric(&cylinder(1.0), 0.0, 1.0, &tol).unwrap().abs() < 1e-6);
    }

    #[test]
    fn isometry_of_catenoid_and_helicoid() {
        let tol = Tolerances::default();
        let c = catenoid_chart(0.0, iv(0.1, 2.0));
        let h = catenoid_chart(1.0, iv(0.1, 2.0));
        let grid = param_grid(iv(0.2, 1.9), iv(-1.0, 1.0), 9, 5);
        assert_eq!(isometry_deviation(&c, &c, &grid, &tol).unwrap(), 0.0);
        assert!(isometry_deviation(&c, &h, &grid, &tol).unwrap() < 1e-6);
    }

    #[test]
    fn tiny_mesh() {
        let tol = Tolerances::default();
        let h = catenoid_chart(1.0, iv(0.1, 2.0));
        let m = sample_mesh(&h, 2, 2, &MeshOptions::default(), &tol).unwrap();
        assert_eq!(m.vertices.len(), 4);
        assert_eq!(m.triangles().len(), 2);
        assert_eq!(m.dropped_rows, 0);
    }

    #[test]
    fn stencil_leaving_domain_is_an_error() {
        let tol = Tolerances::default();
        let c = catenoid_chart(0.0, iv(-1.0, 1.0));
        assert!(matches!(gauss_numeric(&c, 1.0, 0.0, &tol), Err(GeomError::StencilOutOfDomain { .. })));
        assert!(matches!(first_form_numeric(&c, 1.0, 0.0, &tol), Err(GeomError::StencilOutOfDomain { .. })));
    }
}
