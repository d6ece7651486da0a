//! Squashed 3-spheres: the unit sphere in 4-space with the round metric
//! rescaled by `eps^2` along one leg of its invariant parallelization.
//!
//! The three linear fields
//!
//! ```text
//!   X1 = (-x2,  x1, -x4,  x3)
//!   X2 = (-x4, -x3,  x2,  x1)
//!   X3 = (-x3,  x4,  x1, -x2)
//! ```
//!
//! are tangent to every centered sphere, mutually orthogonal, and satisfy
//! `[X1,X2] = 2 X3` cyclically. The squashed metric is
//! `G = I + (eps^2 - 1) X1 X1^T`, which keeps `{X2, X3, X1/eps}` orthonormal.
//! The circle fibration along `X1` projects onto a round 2-sphere of radius
//! 1/2; composing with stereographic projection expresses that target as a
//! plane chart with conformal factor `4 / (1 + 4(u^2+v^2))^2`, Gauss
//! curvature 4.

use crate::chart::{Chart, Constraint};
use crate::error::{GeoError, Result};
use crate::expr::Expr;
use crate::field::{ScalarField, VectorField};
use crate::metric::{FrameField, MetricField};
use crate::submersion::{BaseSurface, SpecParams, SubmersionSpec};

use super::{SpaceDescriptor, SpaceKind};

/// Squashing parameter; the round sphere is `eps = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BergerParams {
    pub eps: f64,
}

impl BergerParams {
    pub fn new(eps: f64) -> Result<Self> {
        if !eps.is_finite() || eps == 0.0 {
            return Err(GeoError::InvalidParameter(format!(
                "squashing parameter must be finite and nonzero, got {eps}"
            )));
        }
        Ok(BergerParams { eps })
    }
}

/// The squashing values exercised by the closed-form table acceptance run.
pub const BERGER_SURVEY: [f64; 4] = [0.3, 0.7, 1.0, 1.5];

/// Fiber-circle clearance floors for the stereographic chart: the projection
/// denominator is `2 (x1^2 + x2^2)` on the sphere.
const POLE_FLOOR: f64 = 1e-6;
const POLE_GUARD: f64 = 0.3;

fn ambient_chart() -> Chart {
    Chart::builder("s3.ambient", 4).unit_sphere().build()
}

fn hopf_chart() -> Chart {
    Chart::builder("s3.hopf", 4)
        .unit_sphere()
        .constraint(Constraint::SquaredPairAtLeast {
            i: 0,
            j: 1,
            min: POLE_FLOOR,
        })
        .guard(Constraint::SquaredPairAtLeast {
            i: 0,
            j: 1,
            min: POLE_GUARD,
        })
        .build()
}

fn x1_components() -> [Expr; 4] {
    [
        -Expr::coord(1),
        Expr::coord(0),
        -Expr::coord(3),
        Expr::coord(2),
    ]
}

fn x2_components() -> [Expr; 4] {
    [
        -Expr::coord(3),
        -Expr::coord(2),
        Expr::coord(1),
        Expr::coord(0),
    ]
}

fn x3_components() -> [Expr; 4] {
    [
        -Expr::coord(2),
        Expr::coord(3),
        Expr::coord(0),
        -Expr::coord(1),
    ]
}

fn field(name: &str, chart: &Chart, comps: [Expr; 4]) -> VectorField {
    VectorField::new(name, chart.clone(), comps)
}

fn berger_metric(chart: Chart, eps: f64) -> MetricField {
    let x1 = x1_components();
    let scale = Expr::constant(eps * eps - 1.0);
    let entries: [[Expr; 4]; 4] = std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let quad = &scale * (&x1[i] * &x1[j]);
            if i == j {
                Expr::one() + quad
            } else {
                quad
            }
        })
    });
    MetricField::from_matrix(chart, entries)
}

fn berger_legs(chart: &Chart, eps: f64) -> [VectorField; 3] {
    let e3_comps = x1_components().map(|c| Expr::constant(1.0 / eps) * c);
    [
        field("E1", chart, x2_components()),
        field("E2", chart, x3_components()),
        field("E3", chart, e3_comps),
    ]
}

/// Total space descriptor for the squashed sphere with its invariant
/// orthonormal frame `{X2, X3, X1/eps}`.
pub fn berger_space(params: BergerParams) -> Result<SpaceDescriptor> {
    let eps = params.eps;
    let chart = ambient_chart();
    let metric = berger_metric(chart.clone(), eps);
    let frame = FrameField::explicit(metric, berger_legs(&chart, eps))?;
    Ok(SpaceDescriptor::new(
        format!("berger(eps={eps})"),
        SpaceKind::Berger { eps },
        frame,
    ))
}

/// The ambient form of the fibration: three quadratic components mapping the
/// unit sphere onto the radius-1/2 sphere in 3-space.
pub fn hopf_ambient_map(chart: &Chart) -> [ScalarField; 3] {
    let (c0, c1, c2, c3) = (
        Expr::coord(0),
        Expr::coord(1),
        Expr::coord(2),
        Expr::coord(3),
    );
    let w1 = &c0 * &c2 + &c1 * &c3;
    let w2 = &c1 * &c2 - &c0 * &c3;
    let w3 = Expr::constant(0.5) * (&c0 * &c0 + &c1 * &c1 - &c2 * &c2 - &c3 * &c3);
    [
        ScalarField::new("w1", chart.clone(), w1),
        ScalarField::new("w2", chart.clone(), w2),
        ScalarField::new("w3", chart.clone(), w3),
    ]
}

/// The circle fibration of the squashed sphere, written in a stereographic
/// chart of the target: `u = w1 / (1 + 2 w3)`, `v = w2 / (1 + 2 w3)`. The
/// chart excludes the fiber circle `x1 = x2 = 0` where the denominator
/// vanishes.
pub fn hopf_spec(params: BergerParams) -> Result<SubmersionSpec> {
    let eps = params.eps;
    let chart = hopf_chart();
    let metric = berger_metric(chart.clone(), eps);
    let ambient = hopf_ambient_map(&chart);
    let denom = Expr::one() + Expr::constant(2.0) * ambient[2].expr();
    let map = [
        ScalarField::new("u", chart.clone(), ambient[0].expr() / &denom),
        ScalarField::new("v", chart.clone(), ambient[1].expr() / &denom),
    ];

    let base_chart = Chart::builder("s2.stereographic", 2).build();
    let u = Expr::coord(0);
    let v = Expr::coord(1);
    let conf =
        Expr::constant(4.0) / (Expr::one() + Expr::constant(4.0) * (&u * &u + &v * &v)).powi(2);
    let base_metric = MetricField::diagonal(base_chart.clone(), &[conf.clone(), conf]);
    let base = BaseSurface::new(base_chart, base_metric);

    let hint = field("X1", &chart, x1_components());
    SubmersionSpec::builder(
        "berger.hopf",
        "circle fibration of the squashed 3-sphere over the round 2-sphere",
        metric,
        map,
        hint,
        base,
    )
    .explicit_frame(berger_legs(&chart, eps))
    .expect_harmonic(true)
    .expect_constant_kn(4.0)
    .expect_rc0(true)
    .params(SpecParams::Berger { eps })
    .build()
}
