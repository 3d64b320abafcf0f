//! Helicoidal surfaces in the Bianchi–Cartan–Vranceanu (BCV) spaces.
//!
//! The BCV metrics
//!
//! ```text
//! g = (dx² + dy²)/B² + (dz + τ (y dx − x dy)/B)²,   B = 1 + κ/4 (x² + y²)
//! ```
//!
//! cover every simply connected homogeneous 3-geometry with a 4- or
//! 6-dimensional isometry group except hyperbolic space. This crate builds
//! helicoidal surfaces in them from a metric profile `U(u)`: every pair
//! `(m, a)` gives an isometric member of the same family with first
//! fundamental form `du² + U(u)² dt²`. On top of that it provides the
//! closed-form profiles of constant mean curvature and an independent
//! extrinsic oracle that measures curvature straight from the ambient metric.
//!
//! Module map:
//!
//! - [`numerics`]: quadrature, finite differences, bisection.
//! - [`bcv`]: the ambient spaces, frames, Killing fields, Christoffel symbols.
//! - [`orbit`]: orbit space of the helicoidal action and the reduced mean curvature.
//! - [`profile`]: metric profiles `U(u)` with derivatives.
//! - [`bour`]: natural charts from `(U, m, a)` and back.
//! - [`cmc`]: constant mean curvature families.
//! - [`oracle`]: embedding, numerically measured fundamental forms, meshes.
//! - [`expr`]: the small expression language of explicit profiles.
//! - [`cli`]: job configuration, reports and file formats behind the `bcvhelix` binary.

// `!(x > 0.0)` is how NaN is rejected together with the bad range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bcv;
pub mod bour;
pub mod cli;
pub mod cmc;
pub mod error;
pub mod expr;
pub mod numerics;
pub mod oracle;
pub mod orbit;
pub mod profile;

pub use bcv::{AmbientPoint, BcvSpace, CylPoint, SpaceClass};
pub use bour::{BourSeed, NaturalChart};
pub use cmc::{CmcCase, CmcConstants, CmcFamily};
pub use error::{GeomError, Result};
pub use numerics::{Interval, Tolerances};
pub use orbit::{HelicoidalAction, ProfileCurve};
pub use profile::MetricProfile;
