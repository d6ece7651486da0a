//! Model three-dimensional geometries with closed-form curvature tables,
//! the submersion catalog, rotated-frame identities, and the
//! vertical-direction rigidity search.
//!
//! Two families of homogeneous total spaces are described in closed form: the
//! two-parameter family of conformally-flat-base spaces (parameters `m`, `l`)
//! and the one-parameter family of squashed 3-spheres (parameter `eps`). Both
//! carry a distinguished orthonormal frame in which the Lie brackets,
//! connection coefficients, curvature components, and Ricci tensor are
//! polynomial in the parameters. The descriptors here store those closed
//! forms so the differential-geometry engine can be checked against them
//! entry by entry.

pub mod bcv;
pub mod berger;
pub mod catalog;
pub mod rotation;
pub mod solver;

pub use bcv::{
    bcv_space, classify_bcv, projection_spec, BcvClass, BcvParams, CLASSIFICATION_SURVEY,
};
pub use berger::{berger_space, hopf_ambient_map, hopf_spec, BergerParams, BERGER_SURVEY};
pub use catalog::{catalog, find, flat_product_spec, warped_product_spec, with_params};
pub use rotation::{rotated_frame_check, FrameRotation, RotationCheck};
pub use solver::{vertical_direction_solver, SolverOutcome};

use crate::chart::{Chart, ChartPoint};
use crate::connection::{ConnectionCoefficients, StructureFunctions};
use crate::curvature::RiemannComponents;
use crate::metric::{FrameField, MetricField};

/// Which closed-form family a descriptor belongs to, with its parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpaceKind {
    Bcv { m: f64, l: f64 },
    Berger { eps: f64 },
}

/// A homogeneous total space together with the closed-form geometry tables
/// of its distinguished orthonormal frame.
#[derive(Clone)]
pub struct SpaceDescriptor {
    id: String,
    kind: SpaceKind,
    frame: FrameField,
}

impl SpaceDescriptor {
    pub(crate) fn new(id: String, kind: SpaceKind, frame: FrameField) -> Self {
        SpaceDescriptor { id, kind, frame }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn chart(&self) -> &Chart {
        self.frame.chart()
    }

    pub fn metric(&self) -> &MetricField {
        self.frame.metric()
    }

    pub fn frame(&self) -> &FrameField {
        &self.frame
    }

    /// Closed-form sectional curvatures `[K12, K13, K23]` of the coordinate
    /// planes of the distinguished frame.
    pub fn sectionals(&self) -> [f64; 3] {
        match self.kind {
            SpaceKind::Bcv { m, l } => [4.0 * m - 0.75 * l * l, 0.25 * l * l, 0.25 * l * l],
            SpaceKind::Berger { eps } => {
                let e2 = eps * eps;
                [4.0 - 3.0 * e2, e2, e2]
            }
        }
    }

    /// `K12 - K13`: the curvature gap that drives vertical-direction
    /// rigidity. Zero exactly on constant-curvature members.
    pub fn curvature_gap(&self) -> f64 {
        let k = self.sectionals();
        k[0] - k[1]
    }

    /// The common sectional curvature of the two mixed planes.
    pub fn mixed_sectional(&self) -> f64 {
        self.sectionals()[1]
    }

    /// Closed-form structure functions `c[i][j][k]` of the distinguished
    /// frame at `p` (the coefficient of `e_k` in `[e_i, e_j]`).
    pub fn expected_structure_at(&self, p: &ChartPoint) -> StructureFunctions<f64> {
        let mut c = [[[0.0; 3]; 3]; 3];
        match self.kind {
            SpaceKind::Bcv { m, l } => {
                let q = p.coords();
                set_bracket(&mut c, 0, 1, [-2.0 * m * q[1], 2.0 * m * q[0], l]);
            }
            SpaceKind::Berger { eps } => {
                set_bracket(&mut c, 0, 1, [0.0, 0.0, 2.0 * eps]);
                set_bracket(&mut c, 1, 2, [2.0 / eps, 0.0, 0.0]);
                set_bracket(&mut c, 2, 0, [0.0, 2.0 / eps, 0.0]);
            }
        }
        c
    }

    /// Closed-form connection coefficients `G[i][j][k]` at `p` (the `e_k`
    /// component of the covariant derivative of `e_j` along `e_i`).
    pub fn expected_gamma_at(&self, p: &ChartPoint) -> ConnectionCoefficients<f64> {
        let mut g = [[[0.0; 3]; 3]; 3];
        match self.kind {
            SpaceKind::Bcv { m, l } => {
                let q = p.coords();
                let (mx, my, hl) = (2.0 * m * q[0], 2.0 * m * q[1], 0.5 * l);
                g[0][0][1] = my;
                g[0][1][0] = -my;
                g[1][1][0] = mx;
                g[1][0][1] = -mx;
                g[0][1][2] = hl;
                g[0][2][1] = -hl;
                g[1][0][2] = -hl;
                g[1][2][0] = hl;
                g[2][0][1] = -hl;
                g[2][1][0] = hl;
            }
            SpaceKind::Berger { eps } => {
                let w = (2.0 - eps * eps) / eps;
                g[0][1][2] = eps;
                g[0][2][1] = -eps;
                g[1][0][2] = -eps;
                g[1][2][0] = eps;
                g[2][0][1] = w;
                g[2][1][0] = -w;
            }
        }
        g
    }

    /// Closed-form curvature components `r[i][j][k][l]` (constant over the
    /// chart): the full tensor generated from the three plane curvatures.
    pub fn expected_riemann(&self) -> RiemannComponents<f64> {
        pair_curvature_table(self.sectionals())
    }

    /// Closed-form Ricci tensor in the distinguished frame (diagonal).
    pub fn expected_ricci(&self) -> [[f64; 3]; 3] {
        let d = match self.kind {
            SpaceKind::Bcv { m, l } => {
                let h = 0.5 * l * l;
                [4.0 * m - h, 4.0 * m - h, h]
            }
            SpaceKind::Berger { eps } => {
                let e2 = eps * eps;
                [4.0 - 2.0 * e2, 4.0 - 2.0 * e2, 2.0 * e2]
            }
        };
        let mut ric = [[0.0; 3]; 3];
        for i in 0..3 {
            ric[i][i] = d[i];
        }
        ric
    }
}

fn set_bracket(c: &mut StructureFunctions<f64>, i: usize, j: usize, v: [f64; 3]) {
    for (k, vk) in v.iter().enumerate() {
        c[i][j][k] = *vk;
        c[j][i][k] = -vk;
    }
}

/// The curvature tensor whose only nonzero components are the three plane
/// curvatures: `r[i][j][k][l] = s(i,j) s(k,l) K_P` when `{i,j} = {k,l} = P`
/// with `s` the orientation sign, zero otherwise.
pub(crate) fn pair_curvature_table(k: [f64; 3]) -> RiemannComponents<f64> {
    // Plane index of an unordered pair: (0,1) -> 0, (0,2) -> 1, (1,2) -> 2.
    let plane = |a: usize, b: usize| a + b - 1;
    let mut r = [[[[0.0; 3]; 3]; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            if i == j {
                continue;
            }
            for kk in 0..3 {
                for l in 0..3 {
                    if kk == l || (i.min(j), i.max(j)) != (kk.min(l), kk.max(l)) {
                        continue;
                    }
                    let s = |a: usize, b: usize| if a < b { 1.0 } else { -1.0 };
                    r[i][j][kk][l] = s(i, j) * s(kk, l) * k[plane(i, j)];
                }
            }
        }
    }
    r
}
