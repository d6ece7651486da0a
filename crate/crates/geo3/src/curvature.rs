//! Frame components of the Riemann tensor and its contractions.
//!
//! Sign conventions, fixed once here and relied on everywhere else:
//! the curvature operator is `R(X,Y)Z = [nabla_X, nabla_Y] Z - nabla_{[X,Y]} Z`
//! and the four-tensor is stored as `r[i][j][k][l] = g(R(e_k, e_l) e_j, e_i)`,
//! so `r[i][j][i][j]` is the sectional curvature of the `(e_i, e_j)` plane.

use crate::chart::ChartPoint;
use crate::connection::{koszul_gamma, structure_at};
use crate::error::Result;
use crate::metric::FrameField;
use crate::real::{seed, Real, DIM};

pub type RiemannComponents<T> = [[[[T; 3]; 3]; 3]; 3];

/// Riemann components in the frame at `x`, generic over the jet level.
pub fn riemann_at<T: Real>(frame: &FrameField, x: &[T; DIM]) -> Result<RiemannComponents<T>> {
    let dim = frame.chart().dim();

    // Connection coefficients one level up carry their coordinate gradients.
    let xs = seed(x, dim);
    let cs = structure_at(frame, &xs)?;
    let gs = koszul_gamma(&cs);

    let e = frame.vectors_at(x)?;
    let c0: [[[T; 3]; 3]; 3] =
        std::array::from_fn(|i| std::array::from_fn(|j| std::array::from_fn(|k| cs[i][j][k].re)));
    let g0: [[[T; 3]; 3]; 3] =
        std::array::from_fn(|i| std::array::from_fn(|j| std::array::from_fn(|k| gs[i][j][k].re)));

    // dg[k][l][j][m] = e_k(gamma_{lj}^m)
    let dg: [[[[T; 3]; 3]; 3]; 3] = std::array::from_fn(|k| {
        std::array::from_fn(|l| {
            std::array::from_fn(|j| {
                std::array::from_fn(|m| {
                    let mut acc = T::zero();
                    for c in 0..dim {
                        acc = acc + e[k][c] * gs[l][j][m].eps[c];
                    }
                    acc
                })
            })
        })
    });

    let mut r: RiemannComponents<T> = [[[[T::zero(); 3]; 3]; 3]; 3];
    for k in 0..3 {
        for l in 0..3 {
            for j in 0..3 {
                for m in 0..3 {
                    let mut acc = dg[k][l][j][m] - dg[l][k][j][m];
                    for a in 0..3 {
                        acc = acc + g0[l][j][a] * g0[k][a][m] - g0[k][j][a] * g0[l][a][m];
                        acc = acc - c0[k][l][a] * g0[a][j][m];
                    }
                    // g(R(e_k, e_l) e_j, e_m) lands in slot [m][j][k][l].
                    r[m][j][k][l] = acc;
                }
            }
        }
    }
    Ok(r)
}

#[derive(Clone, Debug)]
pub struct CurvatureTensor {
    r: RiemannComponents<f64>,
}

impl CurvatureTensor {
    pub fn from_components(r: RiemannComponents<f64>) -> Self {
        CurvatureTensor { r }
    }

    /// `g(R(e_k, e_l) e_j, e_i)`.
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.r[i][j][k][l]
    }

    /// Sectional curvature of the coordinate plane spanned by `e_i, e_j`.
    pub fn sectional(&self, i: usize, j: usize) -> f64 {
        assert!(i != j);
        self.r[i][j][i][j]
    }

    pub fn components(&self) -> &RiemannComponents<f64> {
        &self.r
    }

    /// Worst violation of the antisymmetries and the pair symmetry.
    pub fn symmetry_defect(&self) -> f64 {
        let mut dev = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        dev = dev.max((self.r[i][j][k][l] + self.r[j][i][k][l]).abs());
                        dev = dev.max((self.r[i][j][k][l] + self.r[i][j][l][k]).abs());
                        dev = dev.max((self.r[i][j][k][l] - self.r[k][l][i][j]).abs());
                    }
                }
            }
        }
        dev
    }

    /// Worst violation of the first Bianchi identity.
    pub fn bianchi_defect(&self) -> f64 {
        let mut dev = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        let cyc = self.r[i][j][k][l] + self.r[i][k][l][j] + self.r[i][l][j][k];
                        dev = dev.max(cyc.abs());
                    }
                }
            }
        }
        dev
    }

    /// Frame Ricci tensor, `ric[a][b] = Ric(e_a, e_b)`.
    pub fn ricci(&self) -> [[f64; 3]; 3] {
        std::array::from_fn(|a| {
            std::array::from_fn(|b| {
                let mut acc = 0.0;
                for i in 0..3 {
                    acc += self.r[b][i][a][i];
                }
                acc
            })
        })
    }

    pub fn scalar(&self) -> f64 {
        let ric = self.ricci();
        ric[0][0] + ric[1][1] + ric[2][2]
    }
}

pub fn riemann_frame(frame: &FrameField, p: &ChartPoint) -> Result<CurvatureTensor> {
    frame.chart().expect_same(p.chart())?;
    Ok(CurvatureTensor::from_components(riemann_at(
        frame,
        p.coords(),
    )?))
}

/// Convenience used by reports: Ricci components straight from a point.
pub fn ricci_frame(frame: &FrameField, p: &ChartPoint) -> Result<[[f64; 3]; 3]> {
    Ok(riemann_frame(frame, p)?.ricci())
}
