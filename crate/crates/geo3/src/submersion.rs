//! Submersion setups: a total space, a two-component map onto a surface,
//! and everything needed to decide whether the map is harmonic.

use rand::Rng;

use crate::chart::{Chart, ChartPoint};
use crate::error::{GeoError, Result};
use crate::field::{ScalarField, VectorField};
use crate::invariants::data_values;
use crate::linalg::quadratic_form;
use crate::metric::{FrameField, MetricField};
use crate::real::{seed, DIM};

/// Tension bound below which a map can never be declared non-harmonic.
pub const NON_HARMONIC_THRESHOLD: f64 = 1e-4;

/// Measurement resolution of the tension scalars. A computed value of zero
/// only means "below this", so harmonic certificates at tolerances under
/// the resolution are refused rather than granted.
pub const KAPPA_RESOLUTION: f64 = 1e-14;

/// Internal tolerance for the structural submersion checks.
pub const SUBMERSION_TOL: f64 = 1e-9;

/// Target surface with its own chart and metric.
#[derive(Clone)]
pub struct BaseSurface {
    chart: Chart,
    metric: MetricField,
}

impl BaseSurface {
    pub fn new(chart: Chart, metric: MetricField) -> Self {
        assert_eq!(chart.dim(), 2, "base surface charts are two-dimensional");
        assert!(
            chart == *metric.chart(),
            "base metric lives on the base chart"
        );
        BaseSurface { chart, metric }
    }

    pub fn euclidean(chart: Chart) -> Self {
        let metric = MetricField::euclidean(chart.clone());
        BaseSurface::new(chart, metric)
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn metric(&self) -> &MetricField {
        &self.metric
    }
}

/// Which parameters a catalog entry exposes for overriding.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpecParams {
    Bcv { m: f64, l: f64 },
    Berger { eps: f64 },
    Fixed,
}

/// A fully assembled submersion: total space, map, base, frame, and the
/// catalog's expectations about its behavior.
#[derive(Clone)]
pub struct SubmersionSpec {
    id: String,
    description: String,
    metric: MetricField,
    map: [ScalarField; 2],
    base: BaseSurface,
    frame: FrameField,
    expected_harmonic: Option<bool>,
    expected_kn: Option<f64>,
    kn_constant: bool,
    rc0_expected: Option<bool>,
    params: SpecParams,
}

pub struct SubmersionSpecBuilder {
    id: String,
    description: String,
    metric: MetricField,
    map: [ScalarField; 2],
    vertical_hint: VectorField,
    base: BaseSurface,
    explicit_frame: Option<[VectorField; 3]>,
    expected_harmonic: Option<bool>,
    expected_kn: Option<f64>,
    kn_constant: bool,
    rc0_expected: Option<bool>,
    params: SpecParams,
}

impl std::fmt::Debug for SubmersionSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SubmersionSpec(`{}`)", self.id)
    }
}

impl SubmersionSpec {
    pub fn builder(
        id: impl Into<String>,
        description: impl Into<String>,
        metric: MetricField,
        map: [ScalarField; 2],
        vertical_hint: VectorField,
        base: BaseSurface,
    ) -> SubmersionSpecBuilder {
        SubmersionSpecBuilder {
            id: id.into(),
            description: description.into(),
            metric,
            map,
            vertical_hint,
            base,
            explicit_frame: None,
            expected_harmonic: None,
            expected_kn: None,
            kn_constant: false,
            rc0_expected: None,
            params: SpecParams::Fixed,
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn chart(&self) -> &Chart {
        self.metric.chart()
    }

    pub fn metric(&self) -> &MetricField {
        &self.metric
    }

    pub fn map(&self) -> &[ScalarField; 2] {
        &self.map
    }

    pub fn base(&self) -> &BaseSurface {
        &self.base
    }

    pub fn frame(&self) -> &FrameField {
        &self.frame
    }

    pub fn expected_harmonic(&self) -> Option<bool> {
        self.expected_harmonic
    }

    pub fn expected_kn(&self) -> Option<f64> {
        self.expected_kn
    }

    pub fn kn_constant(&self) -> bool {
        self.kn_constant
    }

    pub fn rc0_expected(&self) -> Option<bool> {
        self.rc0_expected
    }

    pub fn params(&self) -> SpecParams {
        self.params
    }

    pub fn sample<R: Rng>(&self, rng: &mut R, n: usize) -> Vec<ChartPoint> {
        self.chart().sample(rng, n)
    }

    /// Differential of the map applied to a tangent vector at `p`.
    pub fn push_forward(&self, p: &ChartPoint, v: &[f64; DIM]) -> Result<[f64; 2]> {
        self.chart().expect_same(p.chart())?;
        let dim = self.chart().dim();
        let xs = seed(p.coords(), dim);
        Ok(std::array::from_fn(|a| {
            let mv = self.map[a].eval(&xs);
            let mut acc = 0.0;
            for j in 0..dim {
                acc += mv.eps[j] * v[j];
            }
            acc
        }))
    }

    /// Image of `p` under the map, as a point of the base chart.
    pub fn base_point(&self, p: &ChartPoint) -> Result<ChartPoint> {
        self.chart().expect_same(p.chart())?;
        let u = [
            self.map[0].value_at(p.coords()),
            self.map[1].value_at(p.coords()),
        ];
        self.base.chart.point(&u)
    }

    /// Structural checks that make the map a Riemannian submersion at `p`:
    /// full-rank differential, orthonormal frame, fiber direction in the
    /// kernel, and horizontal legs carried isometrically to the base.
    pub fn validate(&self, p: &ChartPoint, tol: f64) -> Result<ValidationSummary> {
        self.chart().expect_same(p.chart())?;
        self.metric.check_spd(p)?;
        let q = self.base_point(p)?;
        self.base.metric.check_spd(&q)?;

        let dim = self.chart().dim();
        let xs = seed(p.coords(), dim);
        let jac: [[f64; DIM]; 2] = std::array::from_fn(|a| {
            let mv = self.map[a].eval(&xs);
            std::array::from_fn(|j| mv.eps[j])
        });
        // Rank check on the raw differential, scale-relative.
        let n0: f64 = jac[0].iter().map(|v| v * v).sum();
        let n1: f64 = jac[1].iter().map(|v| v * v).sum();
        let mut cross_sq = 0.0;
        for i in 0..dim {
            for j in (i + 1)..dim {
                let minor = jac[0][i] * jac[1][j] - jac[0][j] * jac[1][i];
                cross_sq += minor * minor;
            }
        }
        // A NaN cross product must fail the test, so the negation stays
        // outside the comparison.
        let full_rank = cross_sq > 1e-20 * n0.max(1e-30) * n1.max(1e-30);
        if !full_rank {
            return Err(GeoError::RankDeficient {
                coords: p.coords_vec(),
                detail: "map differential has rank below 2".into(),
            });
        }

        let orthonormality_defect = self.frame.orthonormality_defect(p)?;
        let legs = self.frame.vector_values(p)?;
        let h = self.base.metric.at(q.coords());
        let push = |v: &[f64; DIM]| -> [f64; DIM] {
            let mut out = [0.0; DIM];
            for a in 0..2 {
                for j in 0..dim {
                    out[a] += jac[a][j] * v[j];
                }
            }
            out
        };
        let d1 = push(&legs[0]);
        let d2 = push(&legs[1]);
        let d3 = push(&legs[2]);
        let kernel_leak = quadratic_form(&h, &d3, &d3).max(0.0).sqrt();
        let mut isometry_defect = 0.0f64;
        for (a, da) in [&d1, &d2].into_iter().enumerate() {
            for (b, db) in [&d1, &d2].into_iter().enumerate() {
                let target = if a == b { 1.0 } else { 0.0 };
                isometry_defect = isometry_defect.max((quadratic_form(&h, da, db) - target).abs());
            }
        }

        let summary = ValidationSummary {
            orthonormality_defect,
            kernel_leak,
            isometry_defect,
        };
        if summary.max_defect() > tol {
            let detail = if orthonormality_defect >= kernel_leak.max(isometry_defect) {
                "frame is not orthonormal"
            } else if kernel_leak >= isometry_defect {
                "third frame leg leaks out of the kernel"
            } else {
                "horizontal legs are not carried isometrically"
            };
            return Err(GeoError::NotRiemannianSubmersion {
                coords: p.coords_vec(),
                detail: detail.into(),
                defect: summary.max_defect(),
            });
        }
        Ok(summary)
    }

    /// `sum_i |d map(e_i)|^2 / 2` in the base metric; equals 1 for a
    /// Riemannian submersion from three dimensions onto a surface.
    pub fn energy_density(&self, p: &ChartPoint) -> Result<f64> {
        let q = self.base_point(p)?;
        let h = self.base.metric.at(q.coords());
        let legs = self.frame.vector_values(p)?;
        let mut total = 0.0;
        for leg in &legs {
            let d = self.push_forward(p, leg)?;
            let dv = [d[0], d[1], 0.0, 0.0];
            total += quadratic_form(&h, &dv, &dv);
        }
        Ok(0.5 * total)
    }

    /// Tension of the map at `p`, expressed through the frame data.
    pub fn tension(&self, p: &ChartPoint) -> Result<TensionReport> {
        let d = data_values(&self.frame, p)?;
        let legs = self.frame.vector_values(p)?;
        let x: [f64; DIM] = std::array::from_fn(|c| d.k1 * legs[0][c] + d.k2 * legs[1][c]);
        let pushed = self.push_forward(p, &x)?;
        let tau = [-pushed[0], -pushed[1]];
        let q = self.base_point(p)?;
        let h = self.base.metric.at(q.coords());
        let tv = [tau[0], tau[1], 0.0, 0.0];
        let norm_sq = quadratic_form(&h, &tv, &tv);
        let kappa_sq = d.k1 * d.k1 + d.k2 * d.k2;
        Ok(TensionReport {
            kappa: [d.k1, d.k2],
            max_kappa: d.k1.abs().max(d.k2.abs()),
            tau_base: tau,
            norm_sq,
            identity_defect: (norm_sq - kappa_sq).abs(),
        })
    }
}

impl SubmersionSpecBuilder {
    /// Uses the given frame instead of synthesizing one from the map.
    pub fn explicit_frame(mut self, legs: [VectorField; 3]) -> Self {
        self.explicit_frame = Some(legs);
        self
    }

    pub fn expect_harmonic(mut self, harmonic: bool) -> Self {
        self.expected_harmonic = Some(harmonic);
        self
    }

    /// Declares the base curvature constant and equal to `kn`.
    pub fn expect_constant_kn(mut self, kn: f64) -> Self {
        self.expected_kn = Some(kn);
        self.kn_constant = true;
        self
    }

    /// Declares the base curvature constant without pinning its value.
    pub fn expect_kn_constant(mut self) -> Self {
        self.kn_constant = true;
        self
    }

    pub fn expect_rc0(mut self, holds: bool) -> Self {
        self.rc0_expected = Some(holds);
        self
    }

    pub fn params(mut self, params: SpecParams) -> Self {
        self.params = params;
        self
    }

    pub fn build(self) -> Result<SubmersionSpec> {
        let frame = match self.explicit_frame {
            Some(legs) => FrameField::explicit(self.metric.clone(), legs)?,
            None => FrameField::natural(
                self.metric.clone(),
                self.map.clone(),
                self.vertical_hint.clone(),
            )?,
        };
        for f in &self.map {
            self.metric.chart().expect_same(f.chart())?;
        }
        self.metric
            .chart()
            .expect_same(self.vertical_hint.chart())?;
        Ok(SubmersionSpec {
            id: self.id,
            description: self.description,
            metric: self.metric,
            map: self.map,
            base: self.base,
            frame,
            expected_harmonic: self.expected_harmonic,
            expected_kn: self.expected_kn,
            kn_constant: self.kn_constant,
            rc0_expected: self.rc0_expected,
            params: self.params,
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ValidationSummary {
    pub orthonormality_defect: f64,
    pub kernel_leak: f64,
    pub isometry_defect: f64,
}

impl ValidationSummary {
    pub fn max_defect(&self) -> f64 {
        self.orthonormality_defect
            .max(self.kernel_leak)
            .max(self.isometry_defect)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct TensionReport {
    /// The two principal curvature scalars `(k1, k2)` of the fibers.
    pub kappa: [f64; 2],
    pub max_kappa: f64,
    /// Tension vector in base coordinates.
    pub tau_base: [f64; 2],
    /// `|tau|^2` in the base metric.
    pub norm_sq: f64,
    /// `| |tau|^2 - (k1^2 + k2^2) |`, a consistency check.
    pub identity_defect: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Harmonic,
    NonHarmonic,
}

impl Verdict {
    pub fn is_harmonic(&self) -> bool {
        matches!(self, Verdict::Harmonic)
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Harmonic => write!(f, "harmonic"),
            Verdict::NonHarmonic => write!(f, "non-harmonic"),
        }
    }
}

/// Decides harmonicity from the worst tension scalar seen over a sample.
///
/// Values at most `tol` count as harmonic; values past the fixed
/// `NON_HARMONIC_THRESHOLD` count as non-harmonic; the band between is
/// refused rather than guessed at. The harmonic branch additionally
/// requires `tol >= KAPPA_RESOLUTION`: the scalars carry rounding error of
/// that order, so a certificate at finer precision would claim more than
/// the computation can know, even when the computed maximum is exactly
/// zero.
pub fn harmonic_verdict(max_kappa: f64, tol: f64) -> Result<Verdict> {
    if max_kappa <= tol {
        // The tolerance is checked first so a generous user override beats
        // the fixed threshold.
        if tol >= KAPPA_RESOLUTION {
            Ok(Verdict::Harmonic)
        } else {
            Err(GeoError::UnattainableTolerance {
                tol,
                resolution: KAPPA_RESOLUTION,
            })
        }
    } else if max_kappa >= NON_HARMONIC_THRESHOLD {
        Ok(Verdict::NonHarmonic)
    } else {
        Err(GeoError::Inconclusive {
            max_kappa,
            tol,
            threshold: NON_HARMONIC_THRESHOLD,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;

    fn cylinder_spec() -> SubmersionSpec {
        let chart = Chart::builder("cyl-sub", 3)
            .sample_box([1.0, -1.0, -1.0, 0.0], [10.0, 1.0, 1.0, 0.0])
            .build();
        let metric = MetricField::diagonal(
            chart.clone(),
            &[Expr::one(), Expr::one(), Expr::coord(0).powi(2)],
        );
        let map = [
            ScalarField::new("u", chart.clone(), Expr::coord(0)),
            ScalarField::new("v", chart.clone(), Expr::coord(1)),
        ];
        let hint = VectorField::from_components(
            "hint",
            chart.clone(),
            &[Expr::zero(), Expr::zero(), Expr::one()],
        );
        let base_chart = Chart::builder("cyl-sub-base", 2).build();
        SubmersionSpec::builder(
            "cyl.test",
            "cylinder radius-axis projection",
            metric,
            map,
            hint,
            BaseSurface::euclidean(base_chart),
        )
        .expect_harmonic(false)
        .build()
        .unwrap()
    }

    /// Plane map (x, y) -> (x, 2y): full rank but not metric-preserving.
    fn stretched_plane_spec() -> SubmersionSpec {
        let chart = Chart::builder("flat-sub", 3).build();
        let metric = MetricField::euclidean(chart.clone());
        let map = [
            ScalarField::new("u", chart.clone(), Expr::coord(0)),
            ScalarField::new("v", chart.clone(), Expr::coord(1) * 2.0),
        ];
        let hint = VectorField::from_components(
            "hint",
            chart.clone(),
            &[Expr::zero(), Expr::zero(), Expr::one()],
        );
        let base_chart = Chart::builder("flat-sub-base", 2).build();
        SubmersionSpec::builder(
            "flat.stretched",
            "anisotropic scaling of the plane",
            metric,
            map,
            hint,
            BaseSurface::euclidean(base_chart),
        )
        .build()
        .unwrap()
    }

    #[test]
    fn cylinder_validates_and_has_unit_energy() {
        let spec = cylinder_spec();
        let p = spec.chart().point(&[2.0, 0.3, 0.5]).unwrap();
        let summary = spec.validate(&p, SUBMERSION_TOL).unwrap();
        assert!(summary.max_defect() < 1e-12);
        let e = spec.energy_density(&p).unwrap();
        assert!((e - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cylinder_tension_matches_fiber_curvature() {
        let spec = cylinder_spec();
        let p = spec.chart().point(&[2.0, -0.4, 0.9]).unwrap();
        let t = spec.tension(&p).unwrap();
        assert!((t.kappa[0] + 0.5).abs() < 1e-13);
        assert!(t.kappa[1].abs() < 1e-13);
        assert!((t.tau_base[0] - 0.5).abs() < 1e-13);
        assert!((t.norm_sq - 0.25).abs() < 1e-13);
        assert!(t.identity_defect < 1e-13);
        assert_eq!(
            harmonic_verdict(t.max_kappa, 1e-8).unwrap(),
            Verdict::NonHarmonic
        );
    }

    #[test]
    fn stretched_plane_fails_isometry_with_energy_five_halves() {
        let spec = stretched_plane_spec();
        let p = spec.chart().point(&[0.1, 0.2, 0.3]).unwrap();
        let err = spec.validate(&p, SUBMERSION_TOL).unwrap_err();
        match err {
            GeoError::NotRiemannianSubmersion { defect, .. } => {
                assert!((defect - 3.0).abs() < 1e-12, "defect = {defect}");
            }
            other => panic!("unexpected error: {other}"),
        }
        let e = spec.energy_density(&p).unwrap();
        assert!((e - 2.5).abs() < 1e-12);
    }

    #[test]
    fn verdict_bands() {
        assert_eq!(harmonic_verdict(5e-9, 1e-8).unwrap(), Verdict::Harmonic);
        assert_eq!(harmonic_verdict(2e-3, 1e-8).unwrap(), Verdict::NonHarmonic);
        assert!(matches!(
            harmonic_verdict(1e-6, 1e-8).unwrap_err(),
            GeoError::Inconclusive { .. }
        ));
        // A caller-widened tolerance wins over the fixed threshold.
        assert_eq!(harmonic_verdict(2e-3, 1e-2).unwrap(), Verdict::Harmonic);
        // Below the measurement resolution no certificate is granted, even
        // for an exactly-zero maximum; a decisive non-harmonic reading
        // still gets its verdict.
        assert!(matches!(
            harmonic_verdict(0.0, 1e-20).unwrap_err(),
            GeoError::UnattainableTolerance { .. }
        ));
        assert_eq!(harmonic_verdict(0.5, 1e-20).unwrap(), Verdict::NonHarmonic);
    }

    #[test]
    fn base_point_respects_base_domain() {
        let chart = Chart::builder("dom-sub", 3).build();
        let metric = MetricField::euclidean(chart.clone());
        let map = [
            ScalarField::new("u", chart.clone(), Expr::coord(0)),
            ScalarField::new("v", chart.clone(), Expr::coord(1)),
        ];
        let hint = VectorField::from_components(
            "hint",
            chart.clone(),
            &[Expr::zero(), Expr::zero(), Expr::one()],
        );
        let base_chart = Chart::builder("dom-sub-base", 2)
            .constraint(crate::chart::Constraint::CoordAtLeast { idx: 0, min: 0.5 })
            .reference([1.0, 0.0, 0.0, 0.0])
            .build();
        let spec = SubmersionSpec::builder(
            "dom.test",
            "domain propagation check",
            metric,
            map,
            hint,
            BaseSurface::euclidean(base_chart),
        )
        .build()
        .unwrap();
        let inside = spec.chart().point(&[1.0, 0.0, 0.0]).unwrap();
        assert!(spec.base_point(&inside).is_ok());
        let outside = spec.chart().point(&[0.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            spec.base_point(&outside).unwrap_err(),
            GeoError::OutsideDomain { .. }
        ));
    }
}
