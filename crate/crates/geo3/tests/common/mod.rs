//! Helpers shared by the oracle and acceptance suites.

use geo3::chart::Chart;
use geo3::field::{Jet2, ScalarField};
use geo3::submersion::SubmersionSpec;

/// Every scalar field an entry exposes (map components and metric entries),
/// rebuilt on an unconstrained copy of its chart so finite-difference
/// stencils never trip a domain boundary. Sample points still come from the
/// original guarded chart, so stencils stay in well-conditioned territory.
pub fn relaxed_fields(spec: &SubmersionSpec) -> (Chart, Vec<ScalarField>) {
    let dim = spec.chart().dim();
    let relaxed = Chart::builder(format!("oracle.{}", spec.id()), dim).build();
    let mut fields = Vec::new();
    for f in spec.map() {
        fields.push(ScalarField::new(
            format!("map.{}", f.name()),
            relaxed.clone(),
            f.expr().clone(),
        ));
    }
    for i in 0..dim {
        for j in i..dim {
            fields.push(ScalarField::new(
                format!("g{i}{j}"),
                relaxed.clone(),
                spec.metric().entry(i, j).clone(),
            ));
        }
    }
    (relaxed, fields)
}

/// Worst componentwise difference between two jets, relative to the larger
/// of 1 and the analytic jet's own magnitudes.
pub fn relative_gap(jet: &Jet2, fd: &Jet2) -> f64 {
    let dim = jet.dim();
    let mut scale = 1.0f64.max(jet.value().abs());
    for i in 0..dim {
        scale = scale.max(jet.gradient()[i].abs());
        for j in 0..dim {
            scale = scale.max(jet.hessian(i, j).abs());
        }
    }
    let mut gap = (jet.value() - fd.value()).abs();
    for i in 0..dim {
        gap = gap.max((jet.gradient()[i] - fd.gradient()[i]).abs());
        for j in 0..dim {
            gap = gap.max((jet.hessian(i, j) - fd.hessian(i, j)).abs());
        }
    }
    gap / scale
}
