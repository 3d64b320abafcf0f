//! BCV spaces: metric in Cartesian and cylindrical coordinates, the global
//! orthonormal frame, the Killing basis and Christoffel symbols.
//!
//! Tangent vectors are stored as coordinate components in `(x, y, z)`.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};

/// Smallest admissible scaling factor `B`; closer to the boundary of the
/// domain (κ < 0 only) evaluation fails instead of clamping.
pub const DOMAIN_GUARD: f64 = 1e-9;

/// Band used when deciding `κ = 0`, `τ = 0` or `κ = 4τ²`.
pub const CLASS_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BcvSpace {
    pub kappa: f64,
    pub tau: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmbientPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl AmbientPoint {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn to_vector(self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }

    pub fn from_vector(v: &Vector3<f64>) -> Self {
        Self::new(v[0], v[1], v[2])
    }

    pub fn rsq(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylPoint {
    pub r: f64,
    pub theta: f64,
    pub z: f64,
}

impl CylPoint {
    pub fn new(r: f64, theta: f64, z: f64) -> Self {
        Self { r, theta, z }
    }

    pub fn to_cartesian(self) -> AmbientPoint {
        AmbientPoint::new(self.r * self.theta.cos(), self.r * self.theta.sin(), self.z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpaceClass {
    Euclidean,
    Sphere,
    SphereProduct,
    HyperbolicProduct,
    Heisenberg,
    #[serde(rename = "SU2")]
    Su2,
    #[serde(rename = "SL2R-cover")]
    Sl2rCover,
}

impl std::fmt::Display for SpaceClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SpaceClass::Euclidean => "Euclidean",
            SpaceClass::Sphere => "Sphere",
            SpaceClass::SphereProduct => "SphereProduct",
            SpaceClass::HyperbolicProduct => "HyperbolicProduct",
            SpaceClass::Heisenberg => "Heisenberg",
            SpaceClass::Su2 => "SU2",
            SpaceClass::Sl2rCover => "SL2R-cover",
        };
        f.write_str(s)
    }
}

/// `Γ^k_{ij}` stored as `gamma[k][(i, j)]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Christoffel(pub [Matrix3<f64>; 3]);

impl Christoffel {
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.0[k][(i, j)]
    }

    /// `Γ(v, w)^k = Γ^k_{ij} v^i w^j`.
    pub fn contract(&self, v: &Vector3<f64>, w: &Vector3<f64>) -> Vector3<f64> {
        Vector3::new(
            v.dot(&(self.0[0] * w)),
            v.dot(&(self.0[1] * w)),
            v.dot(&(self.0[2] * w)),
        )
    }
}

impl BcvSpace {
    pub fn new(kappa: f64, tau: f64) -> Result<Self> {
        if !(kappa.is_finite() && tau.is_finite()) {
            return Err(GeomError::InvalidInput(format!("non-finite (κ, τ) = ({kappa}, {tau})")));
        }
        Ok(Self { kappa, tau })
    }

    pub fn euclidean() -> Self {
        Self { kappa: 0.0, tau: 0.0 }
    }

    /// `B = 1 + κ/4 · (x² + y²)`.
    pub fn scaling_factor(&self, rsq: f64) -> Result<f64> {
        let b = 1.0 + 0.25 * self.kappa * rsq;
        if !(b >= DOMAIN_GUARD) {
            return Err(GeomError::Domain { scale: b });
        }
        Ok(b)
    }

    /// Metric components in `(x, y, z)`.
    pub fn metric_cartesian(&self, p: AmbientPoint) -> Result<Matrix3<f64>> {
        let b = self.scaling_factor(p.rsq())?;
        // g = (dx² + dy²)/B² + w⊗w with w = dz + τ(y dx − x dy)/B
        let w = Vector3::new(self.tau * p.y / b, -self.tau * p.x / b, 1.0);
        let flat = Matrix3::from_diagonal(&Vector3::new(1.0 / (b * b), 1.0 / (b * b), 0.0));
        Ok(flat + w * w.transpose())
    }

    /// Metric components in `(r, θ, z)`. Degenerate (`g_θθ = 0`) on the axis.
    pub fn metric_cylindrical(&self, p: CylPoint) -> Result<Matrix3<f64>> {
        if p.r < 0.0 {
            return Err(GeomError::InvalidInput(format!("negative radius {}", p.r)));
        }
        let r2 = p.r * p.r;
        let b = self.scaling_factor(r2)?;
        let t = self.tau;
        let g_tz = -t * r2 / b;
        Ok(Matrix3::new(
            1.0 / (b * b), 0.0, 0.0,
            0.0, r2 * (1.0 + t * t * r2) / (b * b), g_tz,
            0.0, g_tz, 1.0,
        ))
    }

    pub fn inner(&self, p: AmbientPoint, v: &Vector3<f64>, w: &Vector3<f64>) -> Result<f64> {
        Ok(v.dot(&(self.metric_cartesian(p)? * w)))
    }

    /// `E₁ = B∂x − τy∂z`, `E₂ = B∂y + τx∂z`, `E₃ = ∂z`.
    pub fn orthonormal_frame(&self, p: AmbientPoint) -> Result<[Vector3<f64>; 3]> {
        let b = self.scaling_factor(p.rsq())?;
        let t = self.tau;
        Ok([
            Vector3::new(b, 0.0, -t * p.y),
            Vector3::new(0.0, b, t * p.x),
            Vector3::new(0.0, 0.0, 1.0),
        ])
    }

    /// Killing basis `X₁ … X₄`, built from frame components and returned in
    /// coordinates. `X₃` is the rotation `−y∂x + x∂y`, `X₄ = E₃`.
    pub fn killing_basis(&self, p: AmbientPoint) -> Result<[Vector3<f64>; 4]> {
        let [e1, e2, e3] = self.orthonormal_frame(p)?;
        let b = self.scaling_factor(p.rsq())?;
        let (k, t, x, y) = (self.kappa, self.tau, p.x, p.y);
        let x1 = e1 * (1.0 - k * y * y / (2.0 * b)) + e2 * (k * x * y / (2.0 * b)) + e3 * (2.0 * t * y / b);
        let x2 = e1 * (k * x * y / (2.0 * b)) + e2 * (1.0 - k * x * x / (2.0 * b)) - e3 * (2.0 * t * x / b);
        let x3 = e1 * (-y / b) + e2 * (x / b) - e3 * (t * (x * x + y * y) / b);
        Ok([x1, x2, x3, e3])
    }

    /// Generator `X = −y∂x + x∂y + a∂z` of the helicoidal group with pitch `a`.
    pub fn helicoidal_field(&self, a: f64, p: AmbientPoint) -> Vector3<f64> {
        Vector3::new(-p.y, p.x, a)
    }

    /// Christoffel symbols from central differences (step `h`, one
    /// Richardson level) of [`Self::metric_cartesian`].
    pub fn christoffels(&self, p: AmbientPoint, h: f64) -> Result<Christoffel> {
        let centre = p.to_vector();
        let eval = |v: Vector3<f64>| self.metric_cartesian(AmbientPoint::from_vector(&v));
        let g = eval(centre)?;
        let g_inv = g
            .try_inverse()
            .ok_or_else(|| GeomError::InvalidInput("singular metric".into()))?;
        // dg[l] = ∂_l g
        let mut dg = [Matrix3::zeros(); 3];
        for (l, d) in dg.iter_mut().enumerate() {
            let e = Vector3::ith(l, 1.0);
            let diff = |s: f64| -> Result<Matrix3<f64>> { Ok((eval(centre + e * s)? - eval(centre - e * s)?) / (2.0 * s)) };
            let coarse = diff(h)?;
            let fine = diff(0.5 * h)?;
            *d = (fine * 4.0 - coarse) / 3.0;
        }
        let mut gamma = [Matrix3::zeros(); 3];
        for (k, gk) in gamma.iter_mut().enumerate() {
            for i in 0..3 {
                for j in i..3 {
                    let mut s = 0.0;
                    for l in 0..3 {
                        s += g_inv[(k, l)] * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]);
                    }
                    gk[(i, j)] = 0.5 * s;
                    gk[(j, i)] = 0.5 * s;
                }
            }
        }
        Ok(Christoffel(gamma))
    }

    /// Largest component of `∇_i X_j + ∇_j X_i` for a vector field `X`,
    /// with derivatives by central differences of step `h`. Zero for Killing
    /// fields.
    pub fn killing_defect<F>(&self, field: F, p: AmbientPoint, h: f64) -> Result<f64>
    where
        F: Fn(AmbientPoint) -> Result<Vector3<f64>>,
    {
        let lowered = |q: Vector3<f64>| -> Result<Vector3<f64>> {
            let pt = AmbientPoint::from_vector(&q);
            Ok(self.metric_cartesian(pt)? * field(pt)?)
        };
        let centre = p.to_vector();
        let x_low = lowered(centre)?;
        let gam = self.christoffels(p, h)?;
        // d[i] = ∂_i X_♭
        let mut d = [Vector3::zeros(); 3];
        for (i, di) in d.iter_mut().enumerate() {
            let e = Vector3::ith(i, 1.0);
            let diff = |s: f64| -> Result<Vector3<f64>> { Ok((lowered(centre + e * s)? - lowered(centre - e * s)?) / (2.0 * s)) };
            *di = (diff(0.5 * h)? * 4.0 - diff(h)?) / 3.0;
        }
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let mut cov = d[i][j] + d[j][i];
                for k in 0..3 {
                    cov -= 2.0 * gam.get(k, i, j) * x_low[k];
                }
                worst = worst.max(cov.abs());
            }
        }
        Ok(worst)
    }

    pub fn classify(&self) -> SpaceClass {
        let zero = |v: f64| v.abs() <= CLASS_EPS;
        let (k, t) = (self.kappa, self.tau);
        if zero(k) && zero(t) {
            SpaceClass::Euclidean
        } else if zero(k - 4.0 * t * t) {
            SpaceClass::Sphere
        } else if zero(t) {
            if k > 0.0 {
                SpaceClass::SphereProduct
            } else {
                SpaceClass::HyperbolicProduct
            }
        } else if zero(k) {
            SpaceClass::Heisenberg
        } else if k > 0.0 {
            SpaceClass::Su2
        } else {
            SpaceClass::Sl2rCover
        }
    }
}
