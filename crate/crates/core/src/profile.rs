//! Metric profiles `U(u)`: the function in the natural first fundamental
//! form `du² + U(u)² dt²`, carried together with `U′` and `U″`.

use std::fmt;
use std::sync::Arc;

use crate::error::{GeomError, Result};

/// `U`, `U′`, `U″` at one abscissa.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileJet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

type JetFn = Arc<dyn Fn(f64) -> Result<ProfileJet> + Send + Sync>;
type ValueFn = Arc<dyn Fn(f64) -> Result<f64> + Send + Sync>;

#[derive(Clone)]
enum Source {
    Jet(JetFn),
    /// Values only; derivatives by Richardson central differences of step `h`.
    Values { f: ValueFn, h: f64 },
}

#[derive(Clone)]
pub struct MetricProfile {
    source: Source,
    label: String,
}

impl fmt::Debug for MetricProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.source {
            Source::Jet(_) => "analytic",
            Source::Values { .. } => "finite-difference",
        };
        f.debug_struct("MetricProfile").field("label", &self.label).field("derivatives", &kind).finish()
    }
}

impl MetricProfile {
    /// Profile with analytic `U′` and `U″`.
    pub fn analytic<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64) -> Result<ProfileJet> + Send + Sync + 'static,
    {
        Self { source: Source::Jet(Arc::new(f)), label: label.into() }
    }

    /// Profile given through `P = U²` and its first two derivatives.
    /// Fails where `P ≤ 0`.
    pub fn from_square<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64) -> (f64, f64, f64) + Send + Sync + 'static,
    {
        Self::analytic(label, move |u| {
            let (p, dp, ddp) = f(u);
            if !(p > 0.0) {
                return Err(GeomError::NegativeRadicand { u, value: p });
            }
            let value = p.sqrt();
            let d1 = dp / (2.0 * value);
            let d2 = (ddp - 2.0 * d1 * d1) / (2.0 * value);
            Ok(ProfileJet { value, d1, d2 })
        })
    }

    /// Profile known through values only. `U′` and `U″` come from central
    /// differences with step `h` and one Richardson level.
    pub fn from_values<F>(label: impl Into<String>, h: f64, f: F) -> Self
    where
        F: Fn(f64) -> Result<f64> + Send + Sync + 'static,
    {
        Self { source: Source::Values { f: Arc::new(f), h }, label: label.into() }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn has_analytic_derivatives(&self) -> bool {
        matches!(self.source, Source::Jet(_))
    }

    pub fn jet(&self, u: f64) -> Result<ProfileJet> {
        match &self.source {
            Source::Jet(f) => f(u),
            Source::Values { f, h } => {
                let value = f(u)?;
                let d1 = crate::numerics::diff_central(|x| f(x), u, 1, *h)?;
                let d2 = crate::numerics::diff_central(|x| f(x), u, 2, *h)?;
                Ok(ProfileJet { value, d1, d2 })
            }
        }
    }

    pub fn value(&self, u: f64) -> Result<f64> {
        match &self.source {
            Source::Jet(f) => f(u).map(|j| j.value),
            Source::Values { f, .. } => f(u),
        }
    }

    /// `U(u)` and `U′(u)`.
    pub fn value_d1(&self, u: f64) -> Result<(f64, f64)> {
        match &self.source {
            Source::Jet(f) => f(u).map(|j| (j.value, j.d1)),
            Source::Values { f, h } => Ok((f(u)?, crate::numerics::diff_central(|x| f(x), u, 1, *h)?)),
        }
    }

    /// `U(u) = √(u² + d²)`, the catenoid/helicoid profile of ℝ³.
    pub fn catenoid(d: f64) -> Self {
        Self::from_square(format!("sqrt(u^2+{d}^2)"), move |u| (u * u + d * d, 2.0 * u, 2.0))
    }
}
