//! Structure functions of an orthonormal frame and the Levi-Civita
//! connection coefficients they determine.
//!
//! For an orthonormal frame the Koszul formula collapses to an algebraic
//! expression in the structure functions, so no metric derivatives are
//! needed: all differentiation happens when the frame legs themselves are
//! evaluated one jet level up.

use crate::error::{GeoError, Result};
use crate::linalg::quadratic_form;
use crate::metric::FrameField;
use crate::real::{seed, Real, DIM};

/// Orthonormality tolerance gating every connection computation.
pub const FRAME_ORTHO_TOL: f64 = 1e-9;

/// Index pairs of the three independent brackets: `[e1,e2]`, `[e1,e3]`, `[e2,e3]`.
pub const BRACKET_PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

/// `c[i][j][k]` with `[e_i, e_j] = sum_k c[i][j][k] e_k`; antisymmetric in `i, j`.
pub type StructureFunctions<T> = [[[T; 3]; 3]; 3];

/// `gamma[i][j][k]` with `nabla_{e_i} e_j = sum_k gamma[i][j][k] e_k`.
pub type ConnectionCoefficients<T> = [[[T; 3]; 3]; 3];

/// Coordinate components of the three frame brackets, in `BRACKET_PAIRS` order.
pub fn frame_brackets_at<T: Real>(frame: &FrameField, x: &[T; DIM]) -> Result<[[T; DIM]; 3]> {
    let dim = frame.chart().dim();
    let xs = seed(x, dim);
    let v = frame.vectors_at(&xs)?;
    Ok(std::array::from_fn(|p| {
        let (i, j) = BRACKET_PAIRS[p];
        std::array::from_fn(|k| {
            let mut acc = T::zero();
            for m in 0..dim {
                acc = acc + v[i][m].re * v[j][k].eps[m] - v[j][m].re * v[i][k].eps[m];
            }
            acc
        })
    }))
}

/// Structure functions `c[i][j][k] = g([e_i, e_j], e_k)`.
///
/// The mirror entries are stored as exact negations, so downstream
/// cancellations (torsion, metric compatibility) stay at rounding level.
/// Fails with `NotOrthonormal` when the frame Gram matrix drifts.
pub fn structure_at<T: Real>(frame: &FrameField, x: &[T; DIM]) -> Result<StructureFunctions<T>> {
    let dim = frame.chart().dim();
    let g = frame.metric().at(x);
    let e = frame.vectors_at(x)?;

    let mut dev = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            let target = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((quadratic_form(&g, &e[i], &e[j]).value() - target).abs());
        }
    }
    if dev > FRAME_ORTHO_TOL {
        return Err(GeoError::NotOrthonormal {
            coords: x[..dim].iter().map(|c| c.value()).collect(),
            dev,
        });
    }

    let b = frame_brackets_at(frame, x)?;
    let mut c: StructureFunctions<T> = [[[T::zero(); 3]; 3]; 3];
    for (p, &(i, j)) in BRACKET_PAIRS.iter().enumerate() {
        for k in 0..3 {
            let v = quadratic_form(&g, &b[p], &e[k]);
            c[i][j][k] = v;
            c[j][i][k] = -v;
        }
    }
    Ok(c)
}

/// Koszul formula in an orthonormal frame:
/// `gamma_{ij}^k = (c_{ij}^k - c_{jk}^i + c_{ki}^j) / 2`.
pub fn koszul_gamma<T: Real>(c: &StructureFunctions<T>) -> ConnectionCoefficients<T> {
    let half = T::from_f64(0.5);
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            std::array::from_fn(|k| (c[i][j][k] - c[j][k][i] + c[k][i][j]) * half)
        })
    })
}

pub fn gamma_at<T: Real>(frame: &FrameField, x: &[T; DIM]) -> Result<ConnectionCoefficients<T>> {
    Ok(koszul_gamma(&structure_at(frame, x)?))
}

pub fn structure_values(
    frame: &FrameField,
    p: &crate::chart::ChartPoint,
) -> Result<StructureFunctions<f64>> {
    frame.chart().expect_same(p.chart())?;
    structure_at(frame, p.coords())
}

pub fn gamma_values(
    frame: &FrameField,
    p: &crate::chart::ChartPoint,
) -> Result<ConnectionCoefficients<f64>> {
    frame.chart().expect_same(p.chart())?;
    gamma_at(frame, p.coords())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Chart;
    use crate::expr::Expr;
    use crate::field::VectorField;
    use crate::metric::MetricField;

    fn cylinder_frame() -> (Chart, FrameField) {
        let chart = Chart::builder("cyl-conn", 3)
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
        let frame = FrameField::explicit(metric, [e1, e2, e3]).unwrap();
        (chart, frame)
    }

    /// Constant-curvature frame with brackets [e1,e2] = -e2, [e1,e3] = -e3.
    fn hyperbolic_frame() -> (Chart, FrameField) {
        let chart = Chart::builder("hyp-conn", 3)
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
        let frame = FrameField::explicit(metric, [e1, e2, e3]).unwrap();
        (chart, frame)
    }

    #[test]
    fn cylinder_structure_functions_match_hand_values() {
        let (chart, frame) = cylinder_frame();
        let p = chart.point(&[2.0, 0.3, 0.7]).unwrap();
        let c = structure_values(&frame, &p).unwrap();
        // [e1, e3] = -(1/rho) e3, everything else vanishes.
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let expect = match (i, j, k) {
                        (0, 2, 2) => -0.5,
                        (2, 0, 2) => 0.5,
                        _ => 0.0,
                    };
                    assert!(
                        (c[i][j][k] - expect).abs() < 1e-14,
                        "c[{i}][{j}][{k}] = {}",
                        c[i][j][k]
                    );
                }
            }
        }
    }

    #[test]
    fn cylinder_connection_matches_hand_values() {
        let (chart, frame) = cylinder_frame();
        let p = chart.point(&[2.0, -0.1, 0.4]).unwrap();
        let gamma = gamma_values(&frame, &p).unwrap();
        // nabla_{e3} e3 = -(1/rho) e1 and nabla_{e3} e1 = (1/rho) e3.
        assert!((gamma[2][2][0] + 0.5).abs() < 1e-14);
        assert!((gamma[2][0][2] - 0.5).abs() < 1e-14);
        assert!(gamma[0][2][2].abs() < 1e-14);
        assert!(gamma[0][0][1].abs() < 1e-14);
    }

    #[test]
    fn torsion_and_compatibility_cancel_to_rounding() {
        let (chart, frame) = hyperbolic_frame();
        let p = chart.point(&[0.4, -0.2, 0.9]).unwrap();
        let c = structure_values(&frame, &p).unwrap();
        let gamma = koszul_gamma(&c);
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let torsion = gamma[i][j][k] - gamma[j][i][k] - c[i][j][k];
                    assert!(torsion.abs() < 1e-12, "torsion [{i}{j}{k}] = {torsion:.3e}");
                    let compat = gamma[i][j][k] + gamma[i][k][j];
                    assert!(compat.abs() < 1e-12, "compat [{i}{j}{k}] = {compat:.3e}");
                }
            }
        }
    }

    #[test]
    fn hyperbolic_structure_functions_are_constant() {
        let (chart, frame) = hyperbolic_frame();
        for coords in [[0.0, 0.0, 0.0], [0.5, -0.3, 0.8], [-0.9, 0.2, -0.4]] {
            let p = chart.point(&coords).unwrap();
            let c = structure_values(&frame, &p).unwrap();
            assert!((c[0][1][1] + 1.0).abs() < 1e-13);
            assert!((c[0][2][2] + 1.0).abs() < 1e-13);
            assert!(c[1][2][0].abs() < 1e-13);
            assert!(c[1][2][1].abs() < 1e-13);
            assert!(c[1][2][2].abs() < 1e-13);
        }
    }

    #[test]
    fn non_orthonormal_frame_is_rejected() {
        let chart = Chart::builder("bad-frame", 3).build();
        let metric = MetricField::euclidean(chart.clone());
        let e1 = VectorField::from_components("e1", chart.clone(), &[Expr::constant(2.0)]);
        let e2 = VectorField::from_components("e2", chart.clone(), &[Expr::zero(), Expr::one()]);
        let e3 = VectorField::from_components(
            "e3",
            chart.clone(),
            &[Expr::zero(), Expr::zero(), Expr::one()],
        );
        let frame = FrameField::explicit(metric, [e1, e2, e3]).unwrap();
        let p = chart.point(&[0.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            structure_values(&frame, &p).unwrap_err(),
            GeoError::NotOrthonormal { .. }
        ));
    }
}
