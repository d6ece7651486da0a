//! Curvature of the homogeneous spaces in arbitrarily rotated frames.
//!
//! Both model families have curvature tensors determined by two constants:
//! the plane curvature gap `R = K12 - K13` and the mixed-plane curvature
//! `cK = K13 = K23`. For any orthogonal change of frame `f_i = sum_j a_ij
//! e_j`, the seven independent curvature components in the new frame are
//! quadratic in the third column `(a_13, a_23, a_33)` alone:
//!
//! ```text
//!   R(f1,f3,f1,f2) = -a23 a33 R          R(f1,f3,f1,f3) = a23^2 R + cK
//!   R(f1,f3,f2,f3) = -a13 a23 R          R(f1,f2,f1,f2) = a33^2 R + cK
//!   R(f1,f2,f2,f3) =  a13 a33 R          R(f2,f3,f1,f3) = -a13 a23 R
//!   R(f2,f3,f2,f3) =  a13^2 R + cK
//! ```
//!
//! Checking the engine's frame-curvature path against these closed forms
//! exercises the full pipeline (brackets of rotated fields, connection,
//! curvature) on inputs where nothing about the computation is axis-aligned.

use crate::chart::ChartPoint;
use crate::curvature::riemann_frame;
use crate::error::{GeoError, Result};
use rand::Rng;
use rand_distr::StandardNormal;

use super::SpaceDescriptor;

/// Orthogonal frame change `f_i = sum_j a[i][j] e_j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameRotation {
    a: [[f64; 3]; 3],
}

/// The seven checked component slots `(i, j, k, l)` of `R(f_i,f_j,f_k,f_l)`.
const SLOTS: [(usize, usize, usize, usize); 7] = [
    (0, 2, 0, 1),
    (0, 2, 0, 2),
    (0, 2, 1, 2),
    (0, 1, 0, 1),
    (0, 1, 1, 2),
    (1, 2, 0, 2),
    (1, 2, 1, 2),
];

impl FrameRotation {
    pub fn identity() -> Self {
        let mut a = [[0.0; 3]; 3];
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        FrameRotation { a }
    }

    /// Rotation by `theta` in the `(e_i, e_j)` coordinate plane.
    pub fn plane(i: usize, j: usize, theta: f64) -> Self {
        assert!(i < 3 && j < 3 && i != j, "plane indices out of range");
        let mut rot = FrameRotation::identity();
        let (s, c) = theta.sin_cos();
        rot.a[i][i] = c;
        rot.a[i][j] = s;
        rot.a[j][i] = -s;
        rot.a[j][j] = c;
        rot
    }

    /// Validates orthogonality (`a a^T = I` within 1e-12).
    pub fn from_matrix(a: [[f64; 3]; 3]) -> Result<Self> {
        let defect = orthogonality_defect(&a);
        if defect > 1e-12 {
            return Err(GeoError::InvalidParameter(format!(
                "rotation matrix is not orthogonal (defect {defect:.3e})"
            )));
        }
        Ok(FrameRotation { a })
    }

    /// Uniformly random rotation (unit-quaternion construction).
    pub fn random<R: Rng>(rng: &mut R) -> Self {
        let q: [f64; 4] = loop {
            let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
            let n: f64 = q.iter().map(|c| c * c).sum::<f64>().sqrt();
            if n > 1e-6 {
                break q.map(|c| c / n);
            }
        };
        let (w, x, y, z) = (q[0], q[1], q[2], q[3]);
        FrameRotation {
            a: [
                [
                    1.0 - 2.0 * (y * y + z * z),
                    2.0 * (x * y - w * z),
                    2.0 * (x * z + w * y),
                ],
                [
                    2.0 * (x * y + w * z),
                    1.0 - 2.0 * (x * x + z * z),
                    2.0 * (y * z - w * x),
                ],
                [
                    2.0 * (x * z - w * y),
                    2.0 * (y * z + w * x),
                    1.0 - 2.0 * (x * x + y * y),
                ],
            ],
        }
    }

    pub fn matrix(&self) -> [[f64; 3]; 3] {
        self.a
    }

    /// Third-column entries `(a13, a23, a33)`: the only data the rotated
    /// curvature depends on.
    pub fn vertical_components(&self) -> [f64; 3] {
        [self.a[0][2], self.a[1][2], self.a[2][2]]
    }
}

fn orthogonality_defect(a: &[[f64; 3]; 3]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            let dot: f64 = (0..3).map(|k| a[i][k] * a[j][k]).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot - target).abs());
        }
    }
    worst
}

/// Per-slot maxima of |engine - closed form| over the given points.
#[derive(Clone, Copy, Debug)]
pub struct RotationCheck {
    pub residuals: [f64; 7],
}

impl RotationCheck {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, r| m.max(*r))
    }
}

/// Computes the seven curvature components of the rotated frame through the
/// engine and compares them with the closed forms above.
pub fn rotated_frame_check(
    space: &SpaceDescriptor,
    rot: &FrameRotation,
    points: &[ChartPoint],
) -> Result<RotationCheck> {
    let rotated = space.frame().rotated(rot.matrix())?;
    let gap = space.curvature_gap();
    let ck = space.mixed_sectional();
    let [a13, a23, a33] = rot.vertical_components();
    let expected = [
        -a23 * a33 * gap,
        a23 * a23 * gap + ck,
        -a13 * a23 * gap,
        a33 * a33 * gap + ck,
        a13 * a33 * gap,
        -a13 * a23 * gap,
        a13 * a13 * gap + ck,
    ];
    let mut residuals = [0.0f64; 7];
    for p in points {
        let r = riemann_frame(&rotated, p)?;
        for (slot, &(i, j, k, l)) in SLOTS.iter().enumerate() {
            residuals[slot] = residuals[slot].max((r.get(i, j, k, l) - expected[slot]).abs());
        }
    }
    Ok(RotationCheck { residuals })
}
