//! Metric tensors and orthonormal frame fields on a chart.
//!
//! A `FrameField` is either written down explicitly, synthesized from a
//! submersion map by metric Gram-Schmidt, or obtained by rotating another
//! frame with a constant orthogonal matrix. All three evaluate through the
//! same generic entry point so the jet engine can differentiate them.

use std::sync::Arc;

use crate::chart::{Chart, ChartPoint};
use crate::error::{GeoError, Result};
use crate::expr::Expr;
use crate::field::{ScalarField, VectorField};
use crate::linalg::{cholesky, cross3, det3, matvec, quadratic_form, solve3};
use crate::real::{seed, Dual, Real, DIM};

/// Pivot floor below which the metric is treated as degenerate.
pub const SPD_FLOOR: f64 = 1e-10;

/// Determinant/norm floor for the frame synthesis solves.
const RANK_FLOOR: f64 = 1e-12;

/// A squared norm passes the rank test only when it is finite and clearly
/// positive; NaN fails.
fn rank_ok(n: f64) -> bool {
    n > RANK_FLOOR
}

#[derive(Clone)]
pub struct MetricField {
    chart: Chart,
    g: [[Expr; DIM]; DIM],
}

impl MetricField {
    /// Builds a metric from explicit entries. Only the upper triangle of the
    /// leading `dim x dim` block is read; it is mirrored so the stored tensor
    /// is exactly symmetric. Slots beyond the chart dimension are identity.
    pub fn from_matrix(chart: Chart, entries: [[Expr; DIM]; DIM]) -> Self {
        let dim = chart.dim();
        let mut g: [[Expr; DIM]; DIM] =
            std::array::from_fn(|_| std::array::from_fn(|_| Expr::zero()));
        for i in 0..DIM {
            for j in 0..DIM {
                if i >= dim || j >= dim {
                    g[i][j] = if i == j { Expr::one() } else { Expr::zero() };
                } else if i <= j {
                    g[i][j] = entries[i][j].clone();
                } else {
                    g[i][j] = entries[j][i].clone();
                }
            }
        }
        MetricField { chart, g }
    }

    pub fn diagonal(chart: Chart, diag: &[Expr]) -> Self {
        assert_eq!(diag.len(), chart.dim(), "one diagonal entry per coordinate");
        let mut entries: [[Expr; DIM]; DIM] =
            std::array::from_fn(|_| std::array::from_fn(|_| Expr::zero()));
        for (i, d) in diag.iter().enumerate() {
            entries[i][i] = d.clone();
        }
        MetricField::from_matrix(chart, entries)
    }

    pub fn euclidean(chart: Chart) -> Self {
        let diag: Vec<Expr> = (0..chart.dim()).map(|_| Expr::one()).collect();
        MetricField::diagonal(chart, &diag)
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn entry(&self, i: usize, j: usize) -> &Expr {
        &self.g[i][j]
    }

    /// Metric components at a point, generic over the scalar.
    pub fn at<T: Real>(&self, x: &[T; DIM]) -> [[T; DIM]; DIM] {
        std::array::from_fn(|i| std::array::from_fn(|j| self.g[i][j].eval(x)))
    }

    pub fn inner<T: Real>(&self, x: &[T; DIM], a: &[T; DIM], b: &[T; DIM]) -> T {
        let g = self.at(x);
        quadratic_form(&g, a, b)
    }

    pub fn inner_values(&self, p: &ChartPoint, a: &[f64; DIM], b: &[f64; DIM]) -> Result<f64> {
        self.chart.expect_same(p.chart())?;
        Ok(self.inner(p.coords(), a, b))
    }

    /// Checks positive definiteness of the coordinate metric at `p`.
    pub fn check_spd(&self, p: &ChartPoint) -> Result<()> {
        self.chart.expect_same(p.chart())?;
        let g = self.at(p.coords());
        cholesky(&g, self.chart.dim(), SPD_FLOOR).map_err(|pivot| GeoError::DegenerateMetric {
            coords: p.coords_vec(),
            pivot,
            floor: SPD_FLOOR,
        })?;
        Ok(())
    }
}

/// Inputs for the synthesized frame: the submersion map, plus a hint field
/// whose metric pairing with the fiber direction fixes the orientation.
pub struct NaturalFrameData {
    map: [ScalarField; 2],
    vertical_hint: VectorField,
}

#[derive(Clone)]
enum FrameKind {
    Explicit([VectorField; 3]),
    Natural(Arc<NaturalFrameData>),
    Rotated {
        inner: Box<FrameKind>,
        rot: [[f64; 3]; 3],
    },
}

#[derive(Clone)]
pub struct FrameField {
    metric: MetricField,
    kind: FrameKind,
}

impl std::fmt::Debug for FrameField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let kind = match &self.kind {
            FrameKind::Explicit(_) => "explicit",
            FrameKind::Natural(_) => "natural",
            FrameKind::Rotated { .. } => "rotated",
        };
        write!(f, "FrameField({kind} on `{}`)", self.metric.chart().id())
    }
}

impl FrameField {
    pub fn explicit(metric: MetricField, vectors: [VectorField; 3]) -> Result<Self> {
        for v in &vectors {
            metric.chart().expect_same(v.chart())?;
        }
        Ok(FrameField {
            metric,
            kind: FrameKind::Explicit(vectors),
        })
    }

    /// Frame synthesized from the submersion map by Gram-Schmidt: the third
    /// leg spans the kernel of the differential, the first two lift the base
    /// coordinate directions and are orthonormalized in the metric.
    pub fn natural(
        metric: MetricField,
        map: [ScalarField; 2],
        vertical_hint: VectorField,
    ) -> Result<Self> {
        for f in &map {
            metric.chart().expect_same(f.chart())?;
        }
        metric.chart().expect_same(vertical_hint.chart())?;
        if metric.chart().dim() != 3 {
            return Err(GeoError::Unsupported(format!(
                "frame synthesis needs a 3-coordinate chart; chart `{}` has {} \
                 (higher-dimensional ambients must supply an explicit frame)",
                metric.chart().id(),
                metric.chart().dim()
            )));
        }
        Ok(FrameField {
            metric,
            kind: FrameKind::Natural(Arc::new(NaturalFrameData { map, vertical_hint })),
        })
    }

    /// Applies a constant rotation: the new legs are `f_i = sum_j a[i][j] e_j`.
    /// The matrix must be orthogonal to keep the frame orthonormal.
    pub fn rotated(&self, a: [[f64; 3]; 3]) -> Result<Self> {
        let mut dev = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                let mut s = 0.0;
                for k in 0..3 {
                    s += a[i][k] * a[j][k];
                }
                let target = if i == j { 1.0 } else { 0.0 };
                dev = dev.max((s - target).abs());
            }
        }
        if dev > 1e-12 {
            return Err(GeoError::InvalidParameter(format!(
                "rotation matrix is not orthogonal: max |a a^T - id| = {dev:.3e}"
            )));
        }
        Ok(FrameField {
            metric: self.metric.clone(),
            kind: FrameKind::Rotated {
                inner: Box::new(self.kind.clone()),
                rot: a,
            },
        })
    }

    pub fn metric(&self) -> &MetricField {
        &self.metric
    }

    pub fn chart(&self) -> &Chart {
        self.metric.chart()
    }

    /// Component arrays of the three frame legs at `x`.
    pub fn vectors_at<T: Real>(&self, x: &[T; DIM]) -> Result<[[T; DIM]; 3]> {
        kind_vectors_at(&self.kind, &self.metric, x)
    }

    pub fn vector_values(&self, p: &ChartPoint) -> Result<[[f64; DIM]; 3]> {
        self.chart().expect_same(p.chart())?;
        self.vectors_at(p.coords())
    }

    /// Largest deviation of the frame Gram matrix from the identity.
    pub fn orthonormality_defect(&self, p: &ChartPoint) -> Result<f64> {
        self.chart().expect_same(p.chart())?;
        let x = p.coords();
        let g = self.metric.at(x);
        let v = self.vectors_at(x)?;
        let mut dev = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                let target = if i == j { 1.0 } else { 0.0 };
                dev = dev.max((quadratic_form(&g, &v[i], &v[j]) - target).abs());
            }
        }
        Ok(dev)
    }

    pub fn check_orthonormal(&self, p: &ChartPoint, tol: f64) -> Result<()> {
        let dev = self.orthonormality_defect(p)?;
        if dev > tol {
            return Err(GeoError::NotOrthonormal {
                coords: p.coords_vec(),
                dev,
            });
        }
        Ok(())
    }

    /// Sign of the coordinate determinant of the three legs. Only meaningful
    /// on 3-coordinate charts, where it distinguishes the two orientations.
    pub fn orientation(&self, p: &ChartPoint) -> Result<f64> {
        self.chart().expect_same(p.chart())?;
        if self.chart().dim() != 3 {
            return Err(GeoError::Unsupported(
                "orientation sign is defined for 3-coordinate charts only".into(),
            ));
        }
        let v = self.vector_values(p)?;
        let m = [
            [v[0][0], v[0][1], v[0][2]],
            [v[1][0], v[1][1], v[1][2]],
            [v[2][0], v[2][1], v[2][2]],
        ];
        Ok(det3(&m).signum())
    }
}

fn kind_vectors_at<T: Real>(
    kind: &FrameKind,
    metric: &MetricField,
    x: &[T; DIM],
) -> Result<[[T; DIM]; 3]> {
    match kind {
        FrameKind::Explicit(vs) => Ok([vs[0].eval(x), vs[1].eval(x), vs[2].eval(x)]),
        FrameKind::Natural(data) => gs_frame_at(data, metric, x),
        FrameKind::Rotated { inner, rot } => {
            let base = kind_vectors_at(inner, metric, x)?;
            Ok(std::array::from_fn(|i| {
                std::array::from_fn(|k| {
                    let mut acc = T::zero();
                    for j in 0..3 {
                        acc = acc + T::from_f64(rot[i][j]) * base[j][k];
                    }
                    acc
                })
            }))
        }
    }
}

/// Gram-Schmidt synthesis of the frame adapted to the submersion map.
///
/// Runs at any jet order: asking for the frame one dual level up yields its
/// coordinate derivatives, which is how brackets and curvature of synthesized
/// frames are produced without any hand-written differentiation.
fn gs_frame_at<T: Real>(
    data: &NaturalFrameData,
    metric: &MetricField,
    x: &[T; DIM],
) -> Result<[[T; DIM]; 3]> {
    let dim = metric.chart().dim();
    let coords = || -> Vec<f64> { x[..dim].iter().map(|c| c.value()).collect() };

    // Jacobian of the map, one dual level up from T.
    let xs: [Dual<T>; DIM] = seed(x, dim);
    let jac: [[T; DIM]; 2] = std::array::from_fn(|a| {
        let v = data.map[a].eval(&xs);
        std::array::from_fn(|j| v.eps[j])
    });

    let g = metric.at(x);

    // Fiber direction: the kernel of the differential.
    let v = cross3(&jac[0], &jac[1]);
    let vn2 = quadratic_form(&g, &v, &v);
    if !rank_ok(vn2.value()) {
        return Err(GeoError::RankDeficient {
            coords: coords(),
            detail: "map differential has rank below 2".into(),
        });
    }
    let mut e3: [T; DIM] = std::array::from_fn(|k| v[k] / vn2.sqrt());

    let hint = data.vertical_hint.eval(x);
    let orient = quadratic_form(&g, &e3, &hint).value();
    if orient.abs() <= 1e-12 {
        return Err(GeoError::RankDeficient {
            coords: coords(),
            detail: "vertical hint fails to orient the fiber".into(),
        });
    }
    if orient < 0.0 {
        e3 = std::array::from_fn(|k| -e3[k]);
    }

    // Horizontal lifts of the base coordinate directions: solve the rows
    // (d map) h = unit and g(e3, h) = 0 on the three chart coordinates.
    let ge3 = matvec(&g, &e3);
    let rows = [
        [jac[0][0], jac[0][1], jac[0][2]],
        [jac[1][0], jac[1][1], jac[1][2]],
        [ge3[0], ge3[1], ge3[2]],
    ];
    let lift = |a: usize| -> Result<[T; DIM]> {
        let rhs = [
            if a == 0 { T::one() } else { T::zero() },
            if a == 1 { T::one() } else { T::zero() },
            T::zero(),
        ];
        let h = solve3(&rows, &rhs, RANK_FLOOR).ok_or_else(|| GeoError::RankDeficient {
            coords: coords(),
            detail: "horizontal lift system is singular".into(),
        })?;
        Ok([h[0], h[1], h[2], T::zero()])
    };
    let h0 = lift(0)?;
    let h1 = lift(1)?;

    let n0 = quadratic_form(&g, &h0, &h0);
    if !rank_ok(n0.value()) {
        return Err(GeoError::RankDeficient {
            coords: coords(),
            detail: "first horizontal lift degenerates".into(),
        });
    }
    let e1: [T; DIM] = std::array::from_fn(|k| h0[k] / n0.sqrt());

    let proj = quadratic_form(&g, &h1, &e1);
    let w: [T; DIM] = std::array::from_fn(|k| h1[k] - proj * e1[k]);
    let n1 = quadratic_form(&g, &w, &w);
    if !rank_ok(n1.value()) {
        return Err(GeoError::RankDeficient {
            coords: coords(),
            detail: "second horizontal lift degenerates".into(),
        });
    }
    let e2: [T; DIM] = std::array::from_fn(|k| w[k] / n1.sqrt());

    Ok([e1, e2, e3])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Chart;

    fn cylinder_chart() -> Chart {
        Chart::builder("cyl-test", 3)
            .sample_box([0.1, -1.0, -1.0, 0.0], [1.0, 1.0, 1.0, 0.0])
            .build()
    }

    /// diag(1, 1, rho^2) on (rho, z, theta).
    fn cylinder_metric(chart: &Chart) -> MetricField {
        MetricField::diagonal(
            chart.clone(),
            &[Expr::one(), Expr::one(), Expr::coord(0).powi(2)],
        )
    }

    #[test]
    fn metric_entries_are_mirrored_exactly() {
        let chart = cylinder_chart();
        let mut entries: [[Expr; DIM]; DIM] =
            std::array::from_fn(|_| std::array::from_fn(|_| Expr::zero()));
        entries[0][0] = Expr::one();
        entries[0][1] = Expr::coord(0) * Expr::coord(1);
        entries[1][1] = Expr::one();
        entries[2][2] = Expr::one();
        let m = MetricField::from_matrix(chart.clone(), entries);
        let x = [0.3, -0.7, 0.2, 0.0];
        let g = m.at(&x);
        assert_eq!(g[0][1], g[1][0]);
        assert_eq!(g[0][1], 0.3 * -0.7);
        assert_eq!(g[3][3], 1.0);
    }

    #[test]
    fn spd_check_flags_degenerate_metric() {
        let chart = Chart::builder("deg-test", 3).build();
        // x-dependent first entry turns negative left of the origin.
        let m = MetricField::diagonal(chart.clone(), &[Expr::coord(0), Expr::one(), Expr::one()]);
        let good = chart.point(&[1.0, 0.0, 0.0]).unwrap();
        assert!(m.check_spd(&good).is_ok());
        let bad = chart.point(&[-1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            m.check_spd(&bad).unwrap_err(),
            GeoError::DegenerateMetric { .. }
        ));
    }

    #[test]
    fn explicit_cylinder_frame_is_orthonormal() {
        let chart = cylinder_chart();
        let metric = cylinder_metric(&chart);
        let e1 = VectorField::from_components("e1", chart.clone(), &[Expr::one()]);
        let e2 = VectorField::from_components("e2", chart.clone(), &[Expr::zero(), Expr::one()]);
        let e3 = VectorField::from_components(
            "e3",
            chart.clone(),
            &[Expr::zero(), Expr::zero(), Expr::one() / Expr::coord(0)],
        );
        let frame = FrameField::explicit(metric, [e1, e2, e3]).unwrap();
        let p = chart.point(&[0.5, 0.2, 1.0]).unwrap();
        frame.check_orthonormal(&p, 1e-12).unwrap();
        assert_eq!(frame.orientation(&p).unwrap(), 1.0);
    }

    #[test]
    fn synthesized_frame_matches_hand_frame_on_cylinder() {
        // Map (rho, z, theta) -> (rho, z): fiber is the theta circle, and the
        // synthesized frame must be d_rho, d_z, d_theta / rho.
        let chart = cylinder_chart();
        let metric = cylinder_metric(&chart);
        let map = [
            ScalarField::new("u", chart.clone(), Expr::coord(0)),
            ScalarField::new("v", chart.clone(), Expr::coord(1)),
        ];
        let hint = VectorField::from_components(
            "hint",
            chart.clone(),
            &[Expr::zero(), Expr::zero(), Expr::one()],
        );
        let frame = FrameField::natural(metric, map, hint).unwrap();
        let p = chart.point(&[2.0, 0.3, 0.7]).unwrap();
        let v = frame.vector_values(&p).unwrap();
        let expect = [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 0.5, 0.0],
        ];
        for i in 0..3 {
            for k in 0..DIM {
                assert!(
                    (v[i][k] - expect[i][k]).abs() < 1e-14,
                    "leg {i} component {k}: {} vs {}",
                    v[i][k],
                    expect[i][k]
                );
            }
        }
        frame.check_orthonormal(&p, 1e-12).unwrap();
    }

    #[test]
    fn hint_opposing_fiber_flips_the_sign() {
        let chart = cylinder_chart();
        let metric = cylinder_metric(&chart);
        let map = [
            ScalarField::new("u", chart.clone(), Expr::coord(0)),
            ScalarField::new("v", chart.clone(), Expr::coord(1)),
        ];
        let hint = VectorField::from_components(
            "hint",
            chart.clone(),
            &[Expr::zero(), Expr::zero(), -Expr::one()],
        );
        let frame = FrameField::natural(metric, map, hint).unwrap();
        let p = chart.point(&[2.0, 0.0, 0.0]).unwrap();
        let v = frame.vector_values(&p).unwrap();
        assert!((v[2][2] + 0.5).abs() < 1e-14);
    }

    #[test]
    fn rotation_must_be_orthogonal() {
        let chart = cylinder_chart();
        let metric = cylinder_metric(&chart);
        let e1 = VectorField::from_components("e1", chart.clone(), &[Expr::one()]);
        let e2 = VectorField::from_components("e2", chart.clone(), &[Expr::zero(), Expr::one()]);
        let e3 = VectorField::from_components(
            "e3",
            chart.clone(),
            &[Expr::zero(), Expr::zero(), Expr::one() / Expr::coord(0)],
        );
        let frame = FrameField::explicit(metric, [e1, e2, e3]).unwrap();
        let bad = [[1.0, 0.1, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        assert!(frame.rotated(bad).is_err());

        let (c, s) = (0.6f64, 0.8f64);
        let rot = [[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]];
        let rotated = frame.rotated(rot).unwrap();
        let p = chart.point(&[0.5, 0.2, 1.0]).unwrap();
        rotated.check_orthonormal(&p, 1e-12).unwrap();
        let v = rotated.vector_values(&p).unwrap();
        assert!((v[0][0] - c).abs() < 1e-15);
        assert!((v[0][1] - s).abs() < 1e-15);
    }

    #[test]
    fn four_coordinate_chart_requires_explicit_frame() {
        let chart = Chart::builder("amb4", 4).unit_sphere().build();
        let metric = MetricField::euclidean(chart.clone());
        let map = [
            ScalarField::new("u", chart.clone(), Expr::coord(0)),
            ScalarField::new("v", chart.clone(), Expr::coord(1)),
        ];
        let hint = VectorField::from_components("hint", chart.clone(), &[Expr::one()]);
        assert!(matches!(
            FrameField::natural(metric, map, hint).unwrap_err(),
            GeoError::Unsupported(_)
        ));
    }
}
