//! Charts, chart points, and deterministic sampling.
//!
//! A chart fixes the coordinate dimension, the hard domain constraints
//! (conditions under which the metric and frames are defined at all), and a
//! sampling region used by the verification runs. Sampling guards are
//! soft: they keep sampled points away from places where closed-form
//! comparisons lose conditioning, but points outside a guard are still valid
//! chart points.

use crate::error::{GeoError, Result};
use crate::real::DIM;
use rand::Rng;
use rand_distr::StandardNormal;
use std::sync::Arc;

#[derive(Clone, Debug)]
pub enum Constraint {
    /// `1 + m (x0^2 + x1^2) >= floor`, the conformal-factor domain of the
    /// two-parameter family of homogeneous 3-spaces.
    ConformalFactor { m: f64, floor: f64 },
    /// `x_idx >= min`.
    CoordAtLeast { idx: usize, min: f64 },
    /// `|x_idx| >= min`.
    AbsCoordAtLeast { idx: usize, min: f64 },
    /// `x_i^2 + x_j^2 >= min`, keeping sphere points away from a coordinate
    /// circle (where a stereographic base chart degenerates).
    SquaredPairAtLeast { i: usize, j: usize, min: f64 },
}

impl Constraint {
    fn holds(&self, coords: &[f64; DIM]) -> bool {
        match *self {
            Constraint::ConformalFactor { m, floor } => {
                1.0 + m * (coords[0] * coords[0] + coords[1] * coords[1]) >= floor
            }
            Constraint::CoordAtLeast { idx, min } => coords[idx] >= min,
            Constraint::AbsCoordAtLeast { idx, min } => coords[idx].abs() >= min,
            Constraint::SquaredPairAtLeast { i, j, min } => {
                coords[i] * coords[i] + coords[j] * coords[j] >= min
            }
        }
    }

    fn describe(&self) -> String {
        match *self {
            Constraint::ConformalFactor { m, floor } => {
                format!("1 + {m} * (x0^2 + x1^2) >= {floor}")
            }
            Constraint::CoordAtLeast { idx, min } => format!("x{idx} >= {min}"),
            Constraint::AbsCoordAtLeast { idx, min } => format!("|x{idx}| >= {min}"),
            Constraint::SquaredPairAtLeast { i, j, min } => {
                format!("x{i}^2 + x{j}^2 >= {min}")
            }
        }
    }
}

#[derive(Clone, Debug)]
enum SampleRegion {
    /// Axis-aligned box, rejection-sampled against constraints and guards.
    Box { lo: [f64; DIM], hi: [f64; DIM] },
    /// Uniform on the unit sphere of the chart dimension (ambient charts).
    UnitSphere,
}

#[derive(Debug)]
struct ChartData {
    id: String,
    dim: usize,
    region: SampleRegion,
    /// Hard domain constraints; membership requires all of them.
    constraints: Vec<Constraint>,
    /// Sampling-only exclusions.
    guards: Vec<Constraint>,
    /// `Some(r)`: points must lie on the sphere `|x| = r` (within 1e-12).
    sphere_radius: Option<f64>,
    reference: [f64; DIM],
}

/// Shared, immutable chart handle. Equality is by chart id; builders bake the
/// defining parameters into the id so equal ids mean identical charts.
#[derive(Clone, Debug)]
pub struct Chart(Arc<ChartData>);

impl PartialEq for Chart {
    fn eq(&self, other: &Self) -> bool {
        self.0.id == other.0.id
    }
}
impl Eq for Chart {}

pub struct ChartBuilder {
    data: ChartData,
}

impl Chart {
    pub fn builder(id: impl Into<String>, dim: usize) -> ChartBuilder {
        assert!((2..=DIM).contains(&dim), "chart dimension out of range");
        ChartBuilder {
            data: ChartData {
                id: id.into(),
                dim,
                region: SampleRegion::Box {
                    lo: [-1.0; DIM],
                    hi: [1.0; DIM],
                },
                constraints: Vec::new(),
                guards: Vec::new(),
                sphere_radius: None,
                reference: [0.0; DIM],
            },
        }
    }

    pub fn id(&self) -> &str {
        &self.0.id
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    /// Reference point used for one-off orientation and sanity probes.
    pub fn reference(&self) -> [f64; DIM] {
        self.0.reference
    }

    pub fn domain_ok(&self, coords: &[f64; DIM]) -> std::result::Result<(), String> {
        for i in self.0.dim..DIM {
            if coords[i] != 0.0 {
                return Err(format!("coordinate x{i} beyond chart dimension is nonzero"));
            }
        }
        if let Some(r) = self.0.sphere_radius {
            let n = norm_prefix(coords, self.0.dim);
            if (n - r).abs() > 1e-12 {
                return Err(format!("|x| = {n} differs from sphere radius {r}"));
            }
        }
        for c in &self.0.constraints {
            if !c.holds(coords) {
                return Err(format!("constraint violated: {}", c.describe()));
            }
        }
        Ok(())
    }

    pub fn point(&self, coords: &[f64]) -> Result<ChartPoint> {
        if coords.len() != self.0.dim {
            return Err(GeoError::InvalidParameter(format!(
                "chart `{}` expects {} coordinates, got {}",
                self.0.id,
                self.0.dim,
                coords.len()
            )));
        }
        let mut full = [0.0; DIM];
        full[..coords.len()].copy_from_slice(coords);
        self.domain_ok(&full)
            .map_err(|reason| GeoError::OutsideDomain {
                chart: self.0.id.clone(),
                coords: coords.to_vec(),
                reason,
            })?;
        Ok(ChartPoint {
            chart: self.clone(),
            coords: full,
        })
    }

    /// Deterministic rejection sampling from the chart's region.
    pub fn sample<R: Rng>(&self, rng: &mut R, n: usize) -> Vec<ChartPoint> {
        let mut out = Vec::with_capacity(n);
        let mut attempts = 0usize;
        while out.len() < n {
            attempts += 1;
            assert!(
                attempts < 10_000 * (n + 1),
                "sampling region of chart `{}` rejects too often",
                self.0.id
            );
            let coords = match self.0.region {
                SampleRegion::Box { lo, hi } => {
                    let mut c = [0.0; DIM];
                    for (i, slot) in c.iter_mut().enumerate().take(self.0.dim) {
                        *slot = rng.gen_range(lo[i]..=hi[i]);
                    }
                    c
                }
                SampleRegion::UnitSphere => {
                    let mut c = [0.0; DIM];
                    loop {
                        let mut norm_sq = 0.0;
                        for slot in c.iter_mut().take(self.0.dim) {
                            let g: f64 = rng.sample(StandardNormal);
                            *slot = g;
                            norm_sq += g * g;
                        }
                        if norm_sq > 1e-12 {
                            let inv = norm_sq.sqrt().recip();
                            for slot in c.iter_mut().take(self.0.dim) {
                                *slot *= inv;
                            }
                            break;
                        }
                    }
                    c
                }
            };
            if self.domain_ok(&coords).is_err() {
                continue;
            }
            if self.0.guards.iter().any(|g| !g.holds(&coords)) {
                continue;
            }
            out.push(ChartPoint {
                chart: self.clone(),
                coords,
            });
        }
        out
    }

    pub(crate) fn expect_same(&self, other: &Chart) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(GeoError::ChartMismatch {
                expected: self.0.id.clone(),
                found: other.0.id.clone(),
            })
        }
    }
}

impl ChartBuilder {
    pub fn sample_box(mut self, lo: [f64; DIM], hi: [f64; DIM]) -> Self {
        self.data.region = SampleRegion::Box { lo, hi };
        self
    }

    /// Unit-sphere chart: membership pinned to `|x| = 1`, sampling uniform.
    pub fn unit_sphere(mut self) -> Self {
        self.data.region = SampleRegion::UnitSphere;
        self.data.sphere_radius = Some(1.0);
        let mut r = [0.0; DIM];
        r[0] = 1.0;
        self.data.reference = r;
        self
    }

    /// Sphere-membership constraint without sphere sampling (base surfaces).
    pub fn sphere_radius(mut self, r: f64) -> Self {
        self.data.sphere_radius = Some(r);
        let mut p = [0.0; DIM];
        p[0] = r;
        self.data.reference = p;
        self
    }

    pub fn constraint(mut self, c: Constraint) -> Self {
        self.data.constraints.push(c);
        self
    }

    pub fn guard(mut self, c: Constraint) -> Self {
        self.data.guards.push(c);
        self
    }

    pub fn reference(mut self, p: [f64; DIM]) -> Self {
        self.data.reference = p;
        self
    }

    pub fn build(self) -> Chart {
        debug_assert!(
            self.data.domain_ok_ref(),
            "chart `{}` reference point violates its own domain",
            self.data.id
        );
        Chart(Arc::new(self.data))
    }
}

impl ChartData {
    fn domain_ok_ref(&self) -> bool {
        if let Some(r) = self.sphere_radius {
            if (norm_prefix(&self.reference, self.dim) - r).abs() > 1e-12 {
                return false;
            }
        }
        self.constraints.iter().all(|c| c.holds(&self.reference))
    }
}

fn norm_prefix(coords: &[f64; DIM], dim: usize) -> f64 {
    coords[..dim].iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// A validated point of a chart. Coordinates beyond the chart dimension are
/// zero by construction.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartPoint {
    chart: Chart,
    coords: [f64; DIM],
}

impl ChartPoint {
    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn coords(&self) -> &[f64; DIM] {
        &self.coords
    }

    /// Coordinates trimmed to the chart dimension.
    pub fn coords_vec(&self) -> Vec<f64> {
        self.coords[..self.chart.dim()].to_vec()
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn box_chart() -> Chart {
        Chart::builder("test-box", 3)
            .constraint(Constraint::ConformalFactor {
                m: -1.0,
                floor: 0.05,
            })
            .build()
    }

    #[test]
    fn rejects_points_outside_domain() {
        let chart = box_chart();
        // 1 - (0.9^2 + 0.9^2) = -0.62 < 0.05
        let err = chart.point(&[0.9, 0.9, 0.0]).unwrap_err();
        assert!(matches!(err, GeoError::OutsideDomain { .. }));
        assert!(chart.point(&[0.1, 0.2, 0.9]).is_ok());
    }

    #[test]
    fn sampling_is_deterministic_and_in_domain() {
        let chart = box_chart();
        let mut r1 = ChaCha8Rng::seed_from_u64(7);
        let mut r2 = ChaCha8Rng::seed_from_u64(7);
        let a = chart.sample(&mut r1, 50);
        let b = chart.sample(&mut r2, 50);
        for (p, q) in a.iter().zip(&b) {
            assert_eq!(p.coords(), q.coords());
            assert!(chart.domain_ok(p.coords()).is_ok());
        }
    }

    #[test]
    fn unit_sphere_points_have_unit_norm() {
        let chart = Chart::builder("test-sphere", 4).unit_sphere().build();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for p in chart.sample(&mut rng, 100) {
            let n: f64 = p.coords().iter().map(|c| c * c).sum::<f64>();
            assert!((n - 1.0).abs() < 1e-12);
        }
        // An off-sphere point is rejected.
        assert!(chart.point(&[0.5, 0.5, 0.5, 0.0]).is_err());
    }

    #[test]
    fn wrong_arity_is_a_parameter_error() {
        let chart = box_chart();
        assert!(matches!(
            chart.point(&[0.0, 0.0]).unwrap_err(),
            GeoError::InvalidParameter(_)
        ));
    }
}
