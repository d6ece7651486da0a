//! Numerical verification of Riemannian submersions from three-dimensional
//! homogeneous spaces onto surfaces.
//!
//! The crate evaluates everything through exact jets (nested dual numbers),
//! so curvature tensors, frame data, and their derivatives come out at
//! rounding accuracy rather than finite-difference accuracy. The pieces:
//!
//! * [`expr`] builds coordinate expressions; [`real`] supplies the scalar
//!   abstraction that lets one expression evaluate at any jet depth.
//! * [`chart`], [`metric`], and [`field`] describe where things live: a
//!   sampling domain, a metric on it, and scalar/vector fields over it.
//! * [`connection`], [`curvature`], and [`invariants`] compute structure
//!   functions, the Levi-Civita connection, the Riemann tensor, and the
//!   scalar data attached to the frame of a submersion, together with the
//!   identities that data must satisfy.
//! * [`submersion`] packages a map with its expectations and grades
//!   harmonicity from the fiber curvature scalars.
//! * [`spaces`] carries the explicit model geometries and the catalog of
//!   example maps, each with independently derived closed-form tables.
//! * [`verify`] runs seeded batch checks and emits deterministic reports;
//!   [`fd`] supplies the finite-difference oracle used to cross-check the
//!   jet machinery.

// Tensor arithmetic reads as indexed loops; iterator rewrites would obscure
// the index symmetry the formulas are written in.
#![allow(clippy::needless_range_loop)]

pub mod chart;
pub mod connection;
pub mod curvature;
pub mod error;
pub mod expr;
pub mod fd;
pub mod field;
pub mod invariants;
pub mod linalg;
pub mod metric;
pub mod real;
pub mod spaces;
pub mod submersion;
pub mod verify;

pub use chart::{Chart, ChartPoint};
pub use error::{GeoError, Result};
pub use expr::Expr;
pub use field::{ScalarField, VectorField};
pub use metric::{FrameField, MetricField};
pub use submersion::{
    harmonic_verdict, BaseSurface, SpecParams, SubmersionSpec, Verdict, KAPPA_RESOLUTION,
    NON_HARMONIC_THRESHOLD,
};
pub use verify::{
    emit_report, parse_report, run_check, run_sweep, run_tables, OutputFormat, ReportBody,
    RunConfig, RunOutcome, Tolerances,
};
