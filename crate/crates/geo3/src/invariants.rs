//! Scalar data attached to a natural frame and the curvature identities
//! that data must satisfy.
//!
//! A natural frame's three brackets have a constrained shape:
//!
//! ```text
//! [e1, e2] = f1 e1 + f2 e2 - 2 sigma e3
//! [e1, e3] =          f3 e2 + k1 e3
//! [e2, e3] = -f3 e1         + k2 e3
//! ```
//!
//! `data_at` reads the six scalars off the brackets by least squares and
//! reports how far the brackets deviate from that shape; the deviation is a
//! hard error past `NATURAL_FRAME_TOL` because every downstream formula
//! assumes it vanishes.

use crate::chart::ChartPoint;
use crate::connection::frame_brackets_at;
use crate::curvature::riemann_at;
use crate::error::{GeoError, Result};
use crate::linalg::quadratic_form;
use crate::metric::FrameField;
use crate::real::{seed, Dual, Real, DIM};

/// Largest tolerated bracket-shape residual for a natural frame.
pub const NATURAL_FRAME_TOL: f64 = 1e-8;

/// Below this, the frame counts as adapted and the `f3 sigma` cross term is
/// dropped from the base curvature formula.
pub const ADAPTED_F3_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug)]
pub struct IntegrabilityData<T> {
    pub f1: T,
    pub f2: T,
    pub f3: T,
    pub k1: T,
    pub k2: T,
    pub sigma: T,
    /// Squared bracket-shape residual; zero for an exact natural frame.
    pub residual_sq: T,
}

impl<T: Copy> IntegrabilityData<T> {
    fn map_fields<U>(&self, mut f: impl FnMut(T) -> U) -> IntegrabilityData<U> {
        IntegrabilityData {
            f1: f(self.f1),
            f2: f(self.f2),
            f3: f(self.f3),
            k1: f(self.k1),
            k2: f(self.k2),
            sigma: f(self.sigma),
            residual_sq: f(self.residual_sq),
        }
    }
}

impl IntegrabilityData<f64> {
    pub fn residual(&self) -> f64 {
        self.residual_sq.max(0.0).sqrt()
    }
}

/// Reads the frame data off the brackets at `x`, at any jet level.
pub fn data_at<T: Real>(frame: &FrameField, x: &[T; DIM]) -> Result<IntegrabilityData<T>> {
    let dim = frame.chart().dim();
    let g = frame.metric().at(x);
    let e = frame.vectors_at(x)?;
    let b = frame_brackets_at(frame, x)?;

    // comp[p][k] = g(b_p, e_k) for the pairs (1,2), (1,3), (2,3).
    let comp: [[T; 3]; 3] =
        std::array::from_fn(|p| std::array::from_fn(|k| quadratic_form(&g, &b[p], &e[k])));

    let f1 = comp[0][0];
    let f2 = comp[0][1];
    let sigma = -comp[0][2] / T::from_f64(2.0);
    let r1 = comp[1][0];
    let f3a = comp[1][1];
    let k1 = comp[1][2];
    let f3b = -comp[2][0];
    let r2 = comp[2][1];
    let k2 = comp[2][2];
    let f3 = (f3a + f3b) / T::from_f64(2.0);

    // Shape residual: the two forbidden components, the disagreement of the
    // two f3 readings, and whatever part of each bracket escapes the frame.
    let mut residual_sq = r1 * r1 + r2 * r2 + (f3a - f3b) * (f3a - f3b) / T::from_f64(2.0);
    for p in 0..3 {
        let off: [T; DIM] = std::array::from_fn(|c| {
            let mut acc = b[p][c];
            for k in 0..3 {
                acc = acc - comp[p][k] * e[k][c];
            }
            acc
        });
        residual_sq = residual_sq + quadratic_form(&g, &off, &off);
    }

    let res = residual_sq.value().max(0.0).sqrt();
    if res > NATURAL_FRAME_TOL {
        return Err(GeoError::FrameNotNatural {
            coords: x[..dim].iter().map(|c| c.value()).collect(),
            residual: res,
        });
    }

    Ok(IntegrabilityData {
        f1,
        f2,
        f3,
        k1,
        k2,
        sigma,
        residual_sq,
    })
}

/// Frame data together with its derivatives along the frame legs.
pub struct DataJet<T> {
    pub value: IntegrabilityData<T>,
    /// `dir[a]` holds `e_a` applied to each scalar.
    pub dir: [IntegrabilityData<T>; 3],
}

pub fn data_jet_at<T: Real>(frame: &FrameField, x: &[T; DIM]) -> Result<DataJet<T>> {
    let dim = frame.chart().dim();
    let xs: [Dual<T>; DIM] = seed(x, dim);
    let d = data_at(frame, &xs)?;
    let e = frame.vectors_at(x)?;
    let value = d.map_fields(|q| q.re);
    let dir = std::array::from_fn(|a| {
        d.map_fields(|q| {
            let mut acc = T::zero();
            for c in 0..dim {
                acc = acc + e[a][c] * q.eps[c];
            }
            acc
        })
    });
    Ok(DataJet { value, dir })
}

pub fn data_values(frame: &FrameField, p: &ChartPoint) -> Result<IntegrabilityData<f64>> {
    frame.chart().expect_same(p.chart())?;
    data_at(frame, p.coords())
}

/// Gauss curvature of the base surface, read through the frame data:
/// `K = e1(f2) - e2(f1) - f1^2 - f2^2 (+ 2 f3 sigma when the frame is not
/// adapted)`.
pub fn gauss_at<T: Real>(frame: &FrameField, x: &[T; DIM]) -> Result<T> {
    let jet = data_jet_at(frame, x)?;
    let d = &jet.value;
    let mut kn = jet.dir[0].f2 - jet.dir[1].f1 - d.f1 * d.f1 - d.f2 * d.f2;
    if d.f3.value().abs() > ADAPTED_F3_FLOOR {
        kn = kn + T::from_f64(2.0) * d.f3 * d.sigma;
    }
    Ok(kn)
}

pub fn base_gauss_curvature(frame: &FrameField, p: &ChartPoint) -> Result<f64> {
    frame.chart().expect_same(p.chart())?;
    gauss_at(frame, p.coords())
}

/// Residuals of the seven curvature identities linking the Riemann
/// components to the frame data and its first derivatives.
#[derive(Clone, Copy, Debug)]
pub struct IdentityReport {
    pub lhs: [f64; 7],
    pub rhs: [f64; 7],
}

impl IdentityReport {
    pub fn residuals(&self) -> [f64; 7] {
        std::array::from_fn(|i| (self.lhs[i] - self.rhs[i]).abs())
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals().iter().fold(0.0f64, |m, &q| m.max(q))
    }
}

pub fn curvature_identity_report(frame: &FrameField, p: &ChartPoint) -> Result<IdentityReport> {
    frame.chart().expect_same(p.chart())?;
    let x = p.coords();
    let r = riemann_at(frame, x)?;
    let jet = data_jet_at(frame, x)?;
    let d = &jet.value;
    let (e1, e2, e3) = (&jet.dir[0], &jet.dir[1], &jet.dir[2]);

    let lhs = [
        r[0][2][0][1],
        r[0][2][0][2],
        r[0][2][1][2],
        r[0][1][0][1],
        r[0][1][1][2],
        r[1][2][0][2],
        r[1][2][1][2],
    ];
    let s2 = d.sigma * d.sigma;
    let rhs = [
        -e1.sigma + 2.0 * d.k1 * d.sigma,
        e1.k1 + s2 - d.k1 * d.k1 + d.k2 * d.f1,
        e1.k2 - e3.sigma - d.k1 * d.f1 - d.k1 * d.k2,
        e1.f2 - e2.f1 - d.f1 * d.f1 - d.f2 * d.f2 + 2.0 * d.f3 * d.sigma - 3.0 * s2,
        -e2.sigma + 2.0 * d.k2 * d.sigma,
        e2.k1 + e3.sigma + d.k2 * d.f2 - d.k1 * d.k2,
        s2 + e2.k2 - d.k1 * d.f2 - d.k2 * d.k2,
    ];
    Ok(IdentityReport { lhs, rhs })
}

/// Residuals of the curvature system that a harmonic structure satisfies.
///
/// All eight vanish for the harmonic examples; they may also vanish for
/// non-harmonic ones, which is exactly what makes the system too weak to
/// certify harmonicity on its own.
#[derive(Clone, Copy, Debug)]
pub struct HarmonicSystemReport {
    pub residuals: [f64; 8],
}

impl HarmonicSystemReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0f64, |m, &q| m.max(q))
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.max_residual() <= tol
    }
}

pub fn harmonic_system_report(frame: &FrameField, p: &ChartPoint) -> Result<HarmonicSystemReport> {
    frame.chart().expect_same(p.chart())?;
    let x = p.coords();
    let r = riemann_at(frame, x)?;
    let jet = data_jet_at(frame, x)?;
    let sigma = jet.value.sigma;
    let s2 = sigma * sigma;
    let (e1s, e2s, e3s) = (jet.dir[0].sigma, jet.dir[1].sigma, jet.dir[2].sigma);
    let kn = gauss_at(frame, x)?;

    let residuals = [
        (r[0][2][0][1] + e1s).abs(),
        (r[0][2][0][2] - s2).abs(),
        (r[0][2][1][2] + e3s).abs(),
        (r[0][1][0][1] - (kn - 3.0 * s2)).abs(),
        (r[0][1][1][2] + e2s).abs(),
        (r[1][2][0][2] - e3s).abs(),
        (r[1][2][1][2] - s2).abs(),
        e3s.abs(),
    ];
    Ok(HarmonicSystemReport { residuals })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Chart;
    use crate::expr::Expr;
    use crate::field::VectorField;
    use crate::metric::MetricField;

    fn cylinder_frame() -> (Chart, FrameField) {
        let chart = Chart::builder("cyl-inv", 3)
            .sample_box([0.1, -1.0, -1.0, 0.0], [1.0, 1.0, 1.0, 0.0])
            .build();
        let metric = MetricField::diagonal(
            chart.clone(),
            &[Expr::one(), Expr::one(), Expr::coord(0).powi(2)],
        );
        let e1 = VectorField::from_components("e1", chart.clone(), &[Expr::one()]);
        let e2 = VectorField::from_components("e2", chart.clone(), &[Expr::zero(), Expr::one()]);
        let e3 = VectorField::from_components(
            "e3",
            chart.clone(),
            &[Expr::zero(), Expr::zero(), Expr::one() / Expr::coord(0)],
        );
        (
            chart.clone(),
            FrameField::explicit(metric, [e1, e2, e3]).unwrap(),
        )
    }

    /// Heisenberg frame: dx^2 + dy^2 + (dz - x dy)^2 with e2 = d_y + x d_z.
    fn heisenberg_frame() -> (Chart, FrameField) {
        let chart = Chart::builder("heis-inv", 3)
            .sample_box([-1.0, -1.0, -1.0, 0.0], [1.0, 1.0, 1.0, 0.0])
            .build();
        let x = Expr::coord(0);
        let mut entries: [[Expr; DIM]; DIM] =
            std::array::from_fn(|_| std::array::from_fn(|_| Expr::zero()));
        entries[0][0] = Expr::one();
        entries[1][1] = Expr::one() + x.powi(2);
        entries[1][2] = -x.clone();
        entries[2][2] = Expr::one();
        let metric = MetricField::from_matrix(chart.clone(), entries);
        let e1 = VectorField::from_components("e1", chart.clone(), &[Expr::one()]);
        let e2 = VectorField::from_components("e2", chart.clone(), &[Expr::zero(), Expr::one(), x]);
        let e3 = VectorField::from_components(
            "e3",
            chart.clone(),
            &[Expr::zero(), Expr::zero(), Expr::one()],
        );
        (
            chart.clone(),
            FrameField::explicit(metric, [e1, e2, e3]).unwrap(),
        )
    }

    fn hyperbolic_frame() -> (Chart, FrameField) {
        let chart = Chart::builder("hyp-inv", 3)
            .sample_box([-1.0, -1.0, -1.0, 0.0], [1.0, 1.0, 1.0, 0.0])
            .build();
        let metric = MetricField::diagonal(
            chart.clone(),
            &[
                Expr::one(),
                (Expr::coord(0) * 2.0).exp(),
                (Expr::coord(0) * 2.0).exp(),
            ],
        );
        let e1 = VectorField::from_components("e1", chart.clone(), &[Expr::one()]);
        let e2 = VectorField::from_components(
            "e2",
            chart.clone(),
            &[Expr::zero(), (-Expr::coord(0)).exp()],
        );
        let e3 = VectorField::from_components(
            "e3",
            chart.clone(),
            &[Expr::zero(), Expr::zero(), (-Expr::coord(0)).exp()],
        );
        (
            chart.clone(),
            FrameField::explicit(metric, [e1, e2, e3]).unwrap(),
        )
    }

    #[test]
    fn cylinder_data_and_first_derivative() {
        let (chart, frame) = cylinder_frame();
        let p = chart.point(&[2.0, 0.1, -0.3]).unwrap();
        let d = data_values(&frame, &p).unwrap();
        assert!((d.k1 + 0.5).abs() < 1e-14);
        assert!(d.k2.abs() < 1e-14);
        assert!(d.f1.abs() < 1e-14);
        assert!(d.f2.abs() < 1e-14);
        assert!(d.f3.abs() < 1e-14);
        assert!(d.sigma.abs() < 1e-14);
        assert!(d.residual() < 1e-14);
        // e1(k1) = d/drho (-1/rho) = 1/rho^2 = 1/4 at rho = 2.
        let jet = data_jet_at(&frame, p.coords()).unwrap();
        assert!((jet.dir[0].k1 - 0.25).abs() < 1e-13);
    }

    #[test]
    fn heisenberg_data_matches_hand_values() {
        let (chart, frame) = heisenberg_frame();
        let p = chart.point(&[0.7, -0.2, 0.4]).unwrap();
        let d = data_values(&frame, &p).unwrap();
        assert!((d.sigma + 0.5).abs() < 1e-13);
        for q in [d.f1, d.f2, d.f3, d.k1, d.k2] {
            assert!(q.abs() < 1e-13);
        }
        let kn = base_gauss_curvature(&frame, &p).unwrap();
        assert!(kn.abs() < 1e-12);
    }

    #[test]
    fn heisenberg_identities_and_harmonic_system_hold() {
        let (chart, frame) = heisenberg_frame();
        for coords in [[0.0, 0.0, 0.0], [0.7, -0.2, 0.4], [-0.9, 0.8, -0.5]] {
            let p = chart.point(&coords).unwrap();
            let rep = curvature_identity_report(&frame, &p).unwrap();
            assert!(
                rep.max_residual() < 1e-12,
                "identities at {coords:?}: {:?}",
                rep.residuals()
            );
            // Sectional values of the model: K12 = -3/4, K13 = K23 = 1/4.
            assert!((rep.lhs[3] + 0.75).abs() < 1e-12);
            assert!((rep.lhs[1] - 0.25).abs() < 1e-12);
            assert!((rep.lhs[6] - 0.25).abs() < 1e-12);
            let sys = harmonic_system_report(&frame, &p).unwrap();
            assert!(
                sys.holds(1e-12),
                "system at {coords:?}: {:?}",
                sys.residuals
            );
        }
    }

    #[test]
    fn hyperbolic_identities_hold_but_harmonic_system_fails() {
        let (chart, frame) = hyperbolic_frame();
        let p = chart.point(&[0.3, 0.5, -0.7]).unwrap();
        let d = data_values(&frame, &p).unwrap();
        assert!((d.f2 + 1.0).abs() < 1e-13);
        assert!((d.k1 + 1.0).abs() < 1e-13);
        let rep = curvature_identity_report(&frame, &p).unwrap();
        assert!(rep.max_residual() < 1e-12);
        let kn = base_gauss_curvature(&frame, &p).unwrap();
        assert!((kn + 1.0).abs() < 1e-12);
        let sys = harmonic_system_report(&frame, &p).unwrap();
        // Nonzero k1 forces r[0][2][0][2] away from sigma^2 = 0.
        assert!((sys.residuals[1] - 1.0).abs() < 1e-12);
        assert!(!sys.holds(1e-8));
    }

    #[test]
    fn cylinder_harmonic_system_holds_despite_nonzero_tension() {
        let (chart, frame) = cylinder_frame();
        let p = chart.point(&[0.5, 0.0, 0.2]).unwrap();
        let d = data_values(&frame, &p).unwrap();
        assert!((d.k1 + 2.0).abs() < 1e-13);
        let sys = harmonic_system_report(&frame, &p).unwrap();
        assert!(sys.holds(1e-12), "residuals: {:?}", sys.residuals);
    }

    #[test]
    fn permuted_frame_is_not_natural() {
        let (chart, frame) = hyperbolic_frame();
        let swap = [[0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0]];
        let permuted = frame.rotated(swap).unwrap();
        let p = chart.point(&[0.2, 0.1, 0.0]).unwrap();
        assert!(matches!(
            data_values(&permuted, &p).unwrap_err(),
            GeoError::FrameNotNatural { .. }
        ));
    }
}
