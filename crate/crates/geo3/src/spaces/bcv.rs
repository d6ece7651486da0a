//! The two-parameter family of homogeneous 3-spaces fibered over a surface
//! of constant curvature `4m`, with bundle curvature `l`.
//!
//! The total space lives on the chart region `F = 1 + m (x^2 + y^2) > 0`
//! with metric pulled back from the conformally flat base plus a connection
//! term: in the distinguished frame
//!
//! ```text
//!   E1 = F dx - (l y / 2) dz,   E2 = F dy + (l x / 2) dz,   E3 = dz
//! ```
//!
//! (written as coordinate vector components) the brackets, connection, and
//! curvature all have polynomial closed forms, recorded in
//! [`SpaceDescriptor`]. Every member fibers over the curvature-`4m` surface
//! by dropping the `z` coordinate; that projection is the family's canonical
//! submersion and is harmonic for every parameter choice.

use crate::chart::{Chart, Constraint};
use crate::error::{GeoError, Result};
use crate::expr::Expr;
use crate::field::{ScalarField, VectorField};
use crate::metric::{FrameField, MetricField};
use crate::submersion::{BaseSurface, SpecParams, SubmersionSpec};

use super::{SpaceDescriptor, SpaceKind};

/// Parameters of the family: base curvature `4m`, bundle curvature `l`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BcvParams {
    pub m: f64,
    pub l: f64,
}

impl BcvParams {
    pub fn new(m: f64, l: f64) -> Result<Self> {
        if !(m.is_finite() && l.is_finite()) {
            return Err(GeoError::InvalidParameter(format!(
                "family parameters must be finite, got m = {m}, l = {l}"
            )));
        }
        Ok(BcvParams { m, l })
    }
}

/// Hard positivity floor for the conformal factor; points below it are
/// outside the chart.
const F_FLOOR: f64 = 1e-6;
/// Sampling guard: verification points keep `F` clear of the floor. Metric
/// entries scale like `1/F^2` and their finite-difference hessians carry a
/// relative truncation error of order `h^2 / F^2` (measured 1.1e-5 at
/// F = 0.16), so the guard must hold `F` high enough for the 1e-5
/// cross-check against the jet engine, not merely away from the singular
/// set. 0.3 leaves a factor ~3 of margin.
const F_GUARD: f64 = 0.3;

fn conformal_factor(m: f64) -> Expr {
    let x = Expr::coord(0);
    let y = Expr::coord(1);
    Expr::one() + Expr::constant(m) * (&x * &x + &y * &y)
}

pub(crate) fn bcv_chart(params: BcvParams) -> Chart {
    Chart::builder(format!("bcv(m={},l={})", params.m, params.l), 3)
        .constraint(Constraint::ConformalFactor {
            m: params.m,
            floor: F_FLOOR,
        })
        .guard(Constraint::ConformalFactor {
            m: params.m,
            floor: F_GUARD,
        })
        .build()
}

pub(crate) fn bcv_metric(chart: Chart, params: BcvParams) -> MetricField {
    let (m, l) = (params.m, params.l);
    let f = conformal_factor(m);
    let inv_f2 = Expr::one() / (&f * &f);
    // Connection one-form components: the dz-duals of E1, E2 are
    // alpha = l y / (2F) and beta = -l x / (2F).
    let alpha = Expr::constant(0.5 * l) * Expr::coord(1) / &f;
    let beta = Expr::constant(-0.5 * l) * Expr::coord(0) / &f;
    let z = Expr::zero;
    let g = [
        [
            &inv_f2 + &alpha * &alpha,
            &alpha * &beta,
            alpha.clone(),
            z(),
        ],
        [z(), &inv_f2 + &beta * &beta, beta.clone(), z()],
        [z(), z(), Expr::one(), z()],
        [z(), z(), z(), Expr::one()],
    ];
    MetricField::from_matrix(chart, g)
}

pub(crate) fn bcv_frame_legs(chart: &Chart, params: BcvParams) -> [VectorField; 3] {
    let (m, l) = (params.m, params.l);
    let f = conformal_factor(m);
    let e1 = VectorField::from_components(
        "E1",
        chart.clone(),
        &[
            f.clone(),
            Expr::zero(),
            Expr::constant(-0.5 * l) * Expr::coord(1),
        ],
    );
    let e2 = VectorField::from_components(
        "E2",
        chart.clone(),
        &[Expr::zero(), f, Expr::constant(0.5 * l) * Expr::coord(0)],
    );
    let e3 = VectorField::from_components(
        "E3",
        chart.clone(),
        &[Expr::zero(), Expr::zero(), Expr::one()],
    );
    [e1, e2, e3]
}

/// The base surface of constant curvature `4m`: conformally flat metric
/// `(du^2 + dv^2) / (1 + m (u^2 + v^2))^2`.
pub(crate) fn bcv_base(params: BcvParams) -> BaseSurface {
    let chart = Chart::builder(format!("bcv.base(m={})", params.m), 2)
        .constraint(Constraint::ConformalFactor {
            m: params.m,
            floor: F_FLOOR,
        })
        .build();
    let f = conformal_factor(params.m);
    let inv_f2 = Expr::one() / (&f * &f);
    let metric = MetricField::diagonal(chart, &[inv_f2.clone(), inv_f2]);
    BaseSurface::new(metric.chart().clone(), metric)
}

/// Total space descriptor with the distinguished orthonormal frame and its
/// closed-form geometry tables.
pub fn bcv_space(params: BcvParams) -> Result<SpaceDescriptor> {
    let chart = bcv_chart(params);
    let metric = bcv_metric(chart.clone(), params);
    let legs = bcv_frame_legs(&chart, params);
    let frame = FrameField::explicit(metric, legs)?;
    Ok(SpaceDescriptor::new(
        chart.id().to_string(),
        SpaceKind::Bcv {
            m: params.m,
            l: params.l,
        },
        frame,
    ))
}

pub(crate) fn projection_spec_with_id(
    id: &str,
    description: &str,
    params: BcvParams,
    explicit_frame: bool,
    spec_params: SpecParams,
) -> Result<SubmersionSpec> {
    let chart = bcv_chart(params);
    let metric = bcv_metric(chart.clone(), params);
    let map = [
        ScalarField::new("u", chart.clone(), Expr::coord(0)),
        ScalarField::new("v", chart.clone(), Expr::coord(1)),
    ];
    let hint = VectorField::from_components(
        "dz",
        chart.clone(),
        &[Expr::zero(), Expr::zero(), Expr::one()],
    );
    let mut builder = SubmersionSpec::builder(id, description, metric, map, hint, bcv_base(params))
        .expect_harmonic(true)
        .expect_constant_kn(4.0 * params.m)
        .expect_rc0(true)
        .params(spec_params);
    if explicit_frame {
        builder = builder.explicit_frame(bcv_frame_legs(&chart, params));
    }
    builder.build()
}

/// The canonical vertical projection of the `(m, l)`-space onto its base
/// surface of curvature `4m`. The adapted frame is synthesized from the map,
/// exercising the frame-construction path end to end.
pub fn projection_spec(params: BcvParams) -> Result<SubmersionSpec> {
    projection_spec_with_id(
        "bcv.projection",
        "vertical projection of the (m,l)-space onto its curvature-4m base",
        params,
        false,
        SpecParams::Bcv {
            m: params.m,
            l: params.l,
        },
    )
}

/// Isometry classes of the family, keyed by the signs of `m`, `l`, and the
/// degeneracy `4m = l^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BcvClass {
    EuclideanSpace,
    RoundSphere,
    SphereProduct,
    HyperbolicProduct,
    SpecialUnitary,
    SpecialLinearCover,
    Heisenberg,
}

impl BcvClass {
    pub fn label(&self) -> &'static str {
        match self {
            BcvClass::EuclideanSpace => "R^3",
            BcvClass::RoundSphere => "S^3",
            BcvClass::SphereProduct => "S^2 x R",
            BcvClass::HyperbolicProduct => "H^2 x R",
            BcvClass::SpecialUnitary => "SU(2)",
            BcvClass::SpecialLinearCover => "SL~(2,R)",
            BcvClass::Heisenberg => "Nil",
        }
    }
}

impl std::fmt::Display for BcvClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Classify `(m, l)` into one of the seven isometry classes. Comparisons are
/// exact; the degenerate round-sphere condition `4m = l^2 > 0` takes
/// precedence over the generic `m > 0, l != 0` class.
pub fn classify_bcv(m: f64, l: f64) -> BcvClass {
    if m == 0.0 && l == 0.0 {
        BcvClass::EuclideanSpace
    } else if 4.0 * m == l * l && m > 0.0 {
        BcvClass::RoundSphere
    } else if m > 0.0 && l == 0.0 {
        BcvClass::SphereProduct
    } else if m < 0.0 && l == 0.0 {
        BcvClass::HyperbolicProduct
    } else if m > 0.0 {
        BcvClass::SpecialUnitary
    } else if m < 0.0 {
        BcvClass::SpecialLinearCover
    } else {
        BcvClass::Heisenberg
    }
}

/// Twenty `(m, l)` pairs covering every isometry class, including four exact
/// `4m = l^2` degeneracies. The values are dyadic so the degeneracy test is
/// exact in floating point.
pub const CLASSIFICATION_SURVEY: [(f64, f64); 20] = [
    (0.0, 0.0),
    (0.25, 1.0),
    (1.0, 2.0),
    (2.25, 3.0),
    (4.0, 4.0),
    (0.25, 0.0),
    (1.0, 0.0),
    (2.0, 0.0),
    (-0.25, 0.0),
    (-1.0, 0.0),
    (-2.0, 0.0),
    (1.0, 1.0),
    (0.5, 1.0),
    (2.0, 3.0),
    (-1.0, 1.0),
    (-0.5, 2.0),
    (-2.0, 1.0),
    (0.0, 1.0),
    (0.0, 2.0),
    (0.0, 0.5),
];
