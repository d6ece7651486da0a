//! The catalog of stock submersions, addressable by stable string ids.
//!
//! Eleven entries cover the harmonic and non-harmonic behaviors the engine
//! is tested against: two projections of a shared warped-product metric (one
//! harmonic, one not), the nilpotent model geometry, two projections of flat
//! space in cylindrical coordinates, five members of the two-parameter
//! homogeneous family, and the squashed-sphere circle fibration. Entries
//! with `SpecParams::Fixed` are immutable; the two parametric entries can be
//! rebuilt at other parameter values through [`with_params`].

use crate::chart::{Chart, Constraint};
use crate::error::{GeoError, Result};
use crate::expr::Expr;
use crate::field::{ScalarField, VectorField};
use crate::metric::MetricField;
use crate::submersion::{BaseSurface, SpecParams, SubmersionSpec, SubmersionSpecBuilder};

use super::bcv::{projection_spec, projection_spec_with_id, BcvParams};
use super::berger::{hopf_spec, BergerParams};

/// Projection of the warped product `exp(2 p(y)) dx^2 + dy^2 + dz^2` along
/// `z` onto its `(x, y)` leaf. Harmonic for every warping profile `p`; the
/// base curvature is `-p'' - (p')^2`.
fn warped_builder(id: &str, description: &str, p: &Expr) -> SubmersionSpecBuilder {
    let chart = Chart::builder(format!("warped(p={p:?})"), 3).build();
    let e2p = (Expr::constant(2.0) * p).exp();
    let metric = MetricField::diagonal(chart.clone(), &[e2p.clone(), Expr::one(), Expr::one()]);
    let map = [
        ScalarField::new("u", chart.clone(), Expr::coord(0)),
        ScalarField::new("v", chart.clone(), Expr::coord(1)),
    ];
    let hint = VectorField::from_components(
        "dz",
        chart.clone(),
        &[Expr::zero(), Expr::zero(), Expr::one()],
    );
    let legs = [
        VectorField::from_components("e1", chart.clone(), &[(-p).exp()]),
        VectorField::from_components("e2", chart.clone(), &[Expr::zero(), Expr::one()]),
        VectorField::from_components(
            "e3",
            chart.clone(),
            &[Expr::zero(), Expr::zero(), Expr::one()],
        ),
    ];
    let base_chart = Chart::builder(format!("warped.base(p={p:?})"), 2).build();
    let base_metric = MetricField::diagonal(
        base_chart.clone(),
        &[(Expr::constant(2.0) * p).exp(), Expr::one()],
    );
    SubmersionSpec::builder(
        id,
        description,
        metric,
        map,
        hint,
        BaseSurface::new(base_chart, base_metric),
    )
    .explicit_frame(legs)
    .expect_harmonic(true)
    .expect_rc0(true)
}

/// Injection point for other warping profiles: `p` is an expression in the
/// second coordinate only. No constant-curvature expectation is attached
/// since `-p'' - (p')^2` varies with `p`.
pub fn warped_product_spec(id: &str, p: &Expr) -> Result<SubmersionSpec> {
    warped_builder(
        id,
        "leaf projection of a warped product with an injected warping profile",
        p,
    )
    .build()
}

/// The unwarped (`p = 0`) member: flat total space, flat base.
pub fn flat_product_spec() -> Result<SubmersionSpec> {
    warped_builder(
        "ex21.flat",
        "leaf projection of the trivial product of the plane with a line",
        &Expr::zero(),
    )
    .expect_constant_kn(0.0)
    .build()
}

fn ex21_product() -> Result<SubmersionSpec> {
    warped_builder(
        "ex21.product",
        "leaf projection of the warped product with profile p = y",
        &Expr::coord(1),
    )
    .expect_constant_kn(-1.0)
    .build()
}

/// The `(y, z)` projection of the same warped total space (profile `p = y`).
/// The leftover horizontal direction curves the fibers: not harmonic.
fn ex22_transverse() -> Result<SubmersionSpec> {
    let chart = Chart::builder("warped.transverse", 3).build();
    let e2y = (Expr::constant(2.0) * Expr::coord(1)).exp();
    let metric = MetricField::diagonal(chart.clone(), &[e2y, Expr::one(), Expr::one()]);
    let map = [
        ScalarField::new("u", chart.clone(), Expr::coord(1)),
        ScalarField::new("v", chart.clone(), Expr::coord(2)),
    ];
    let hint = VectorField::from_components("dx", chart.clone(), &[Expr::one()]);
    let legs = [
        VectorField::from_components("e1", chart.clone(), &[Expr::zero(), Expr::one()]),
        VectorField::from_components(
            "e2",
            chart.clone(),
            &[Expr::zero(), Expr::zero(), Expr::one()],
        ),
        VectorField::from_components("e3", chart.clone(), &[(-Expr::coord(1)).exp()]),
    ];
    let base = BaseSurface::euclidean(Chart::builder("plane", 2).build());
    SubmersionSpec::builder(
        "ex22.h2xr",
        "transverse projection of the p = y warped product; fibers bend",
        metric,
        map,
        hint,
        base,
    )
    .explicit_frame(legs)
    .expect_harmonic(false)
    .expect_constant_kn(0.0)
    .expect_rc0(false)
    .params(SpecParams::Fixed)
    .build()
}

/// The nilpotent model geometry `dx^2 + dy^2 + (dz - x dy)^2` projected onto
/// `(x, z)`. The fiber curvature `kappa_1 = -x / (1 + x^2)` vanishes on the
/// plane `x = 0`, so sampling keeps `|x| >= 0.05`.
fn nil_example() -> Result<SubmersionSpec> {
    let chart = Chart::builder("nil", 3)
        .guard(Constraint::AbsCoordAtLeast { idx: 0, min: 0.05 })
        .build();
    let x = Expr::coord(0);
    let one = Expr::one;
    let z = Expr::zero;
    let entries = [
        [one(), z(), z(), z()],
        [z(), one() + &x * &x, -&x, z()],
        [z(), z(), one(), z()],
        [z(), z(), z(), one()],
    ];
    let metric = MetricField::from_matrix(chart.clone(), entries);
    let map = [
        ScalarField::new("u", chart.clone(), Expr::coord(0)),
        ScalarField::new("v", chart.clone(), Expr::coord(2)),
    ];
    let hint = VectorField::from_components("dy", chart.clone(), &[Expr::zero(), Expr::one()]);
    let s = (one() + &x * &x).sqrt();
    let legs = [
        VectorField::from_components("e1", chart.clone(), &[Expr::one()]),
        VectorField::from_components("e2", chart.clone(), &[Expr::zero(), -(&x / &s), -s.clone()]),
        VectorField::from_components("e3", chart.clone(), &[Expr::zero(), Expr::one() / &s]),
    ];
    let base_chart = Chart::builder("nil.base", 2).build();
    let u = Expr::coord(0);
    let base_metric = MetricField::diagonal(
        base_chart.clone(),
        &[Expr::one(), Expr::one() / (Expr::one() + &u * &u)],
    );
    SubmersionSpec::builder(
        "nil.example23",
        "projection of the nilpotent model geometry onto a non-flat base",
        metric,
        map,
        hint,
        BaseSurface::new(base_chart, base_metric),
    )
    .explicit_frame(legs)
    .expect_harmonic(false)
    .expect_rc0(false)
    .params(SpecParams::Fixed)
    .build()
}

fn cylindrical_chart() -> Chart {
    // Coordinates (rho, z, theta); the chart degenerates at rho = 0.
    Chart::builder("cyl", 3)
        .sample_box([0.1, -1.0, -1.0, 0.0], [1.0, 1.0, 1.0, 0.0])
        .constraint(Constraint::CoordAtLeast { idx: 0, min: 0.01 })
        .reference([0.5, 0.0, 0.0, 0.0])
        .build()
}

fn cylindrical_metric(chart: Chart) -> MetricField {
    let rho = Expr::coord(0);
    MetricField::diagonal(chart, &[Expr::one(), Expr::one(), &rho * &rho])
}

/// The `(rho, z)` projection of flat 3-space in cylindrical coordinates:
/// fibers are circles whose radius varies with rho, so the map is not
/// harmonic even though every curvature identity of the flat total space
/// holds.
fn cyl_axial() -> Result<SubmersionSpec> {
    let chart = cylindrical_chart();
    let metric = cylindrical_metric(chart.clone());
    let map = [
        ScalarField::new("u", chart.clone(), Expr::coord(0)),
        ScalarField::new("v", chart.clone(), Expr::coord(1)),
    ];
    let hint = VectorField::from_components(
        "dtheta",
        chart.clone(),
        &[Expr::zero(), Expr::zero(), Expr::one()],
    );
    let legs = [
        VectorField::from_components("e1", chart.clone(), &[Expr::one()]),
        VectorField::from_components("e2", chart.clone(), &[Expr::zero(), Expr::one()]),
        VectorField::from_components(
            "e3",
            chart.clone(),
            &[Expr::zero(), Expr::zero(), Expr::one() / Expr::coord(0)],
        ),
    ];
    let base = BaseSurface::euclidean(Chart::builder("plane", 2).build());
    SubmersionSpec::builder(
        "cyl.remark21a",
        "(rho, z) projection of flat space in cylindrical coordinates",
        metric,
        map,
        hint,
        base,
    )
    .explicit_frame(legs)
    .expect_harmonic(false)
    .expect_constant_kn(0.0)
    .expect_rc0(true)
    .params(SpecParams::Fixed)
    .build()
}

/// The `(rho, theta)` projection of the same flat space onto the punctured
/// plane in polar coordinates: harmonic.
fn cyl_polar() -> Result<SubmersionSpec> {
    let chart = cylindrical_chart();
    let metric = cylindrical_metric(chart.clone());
    let map = [
        ScalarField::new("u", chart.clone(), Expr::coord(0)),
        ScalarField::new("v", chart.clone(), Expr::coord(2)),
    ];
    let hint = VectorField::from_components("dz", chart.clone(), &[Expr::zero(), Expr::one()]);
    let legs = [
        VectorField::from_components("e1", chart.clone(), &[Expr::one()]),
        VectorField::from_components(
            "e2",
            chart.clone(),
            &[Expr::zero(), Expr::zero(), Expr::one() / Expr::coord(0)],
        ),
        VectorField::from_components("e3", chart.clone(), &[Expr::zero(), Expr::one()]),
    ];
    let base_chart = Chart::builder("polar.base", 2)
        .constraint(Constraint::CoordAtLeast { idx: 0, min: 0.05 })
        .reference([1.0, 0.0, 0.0, 0.0])
        .build();
    let u = Expr::coord(0);
    let base_metric = MetricField::diagonal(base_chart.clone(), &[Expr::one(), &u * &u]);
    SubmersionSpec::builder(
        "cyl.remark21b",
        "(rho, theta) projection of flat space onto the punctured polar plane",
        metric,
        map,
        hint,
        BaseSurface::new(base_chart, base_metric),
    )
    .explicit_frame(legs)
    .expect_harmonic(true)
    .expect_constant_kn(0.0)
    .expect_rc0(true)
    .params(SpecParams::Fixed)
    .build()
}

fn fixed_bcv(id: &str, description: &str, m: f64, l: f64) -> Result<SubmersionSpec> {
    let params = BcvParams::new(m, l)?;
    projection_spec_with_id(id, description, params, true, SpecParams::Fixed)
}

/// All eleven stock submersions, in stable order.
pub fn catalog() -> Result<Vec<SubmersionSpec>> {
    Ok(vec![
        ex21_product()?,
        ex22_transverse()?,
        nil_example()?,
        cyl_axial()?,
        cyl_polar()?,
        projection_spec(BcvParams::new(1.0, 2.0)?)?,
        fixed_bcv(
            "bcv.s2xr",
            "vertical projection of the round-sphere product member (m=1, l=0)",
            1.0,
            0.0,
        )?,
        fixed_bcv(
            "bcv.h2xr",
            "vertical projection of the hyperbolic product member (m=-1, l=0)",
            -1.0,
            0.0,
        )?,
        fixed_bcv(
            "bcv.su2",
            "vertical projection of the generic positively curved member (m=1, l=1)",
            1.0,
            1.0,
        )?,
        fixed_bcv(
            "bcv.sl2r",
            "vertical projection of the generic negatively curved member (m=-1, l=1)",
            -1.0,
            1.0,
        )?,
        hopf_spec(BergerParams::new(0.5)?)?,
    ])
}

/// Looks up a catalog entry by id.
pub fn find(id: &str) -> Result<SubmersionSpec> {
    catalog()?
        .into_iter()
        .find(|s| s.id() == id)
        .ok_or_else(|| GeoError::UnknownId(id.to_string()))
}

/// Rebuilds a catalog entry at overridden parameter values. Only the two
/// parametric entries accept overrides, and only for the parameters of
/// their own family; anything else is a configuration error.
pub fn with_params(
    id: &str,
    m: Option<f64>,
    l: Option<f64>,
    eps: Option<f64>,
) -> Result<SubmersionSpec> {
    let spec = find(id)?;
    match spec.params() {
        SpecParams::Bcv { m: m0, l: l0 } => {
            if eps.is_some() {
                return Err(GeoError::InvalidConfig(format!(
                    "entry `{id}` takes --m/--l, not --eps"
                )));
            }
            if m.is_none() && l.is_none() {
                return Ok(spec);
            }
            projection_spec(BcvParams::new(m.unwrap_or(m0), l.unwrap_or(l0))?)
        }
        SpecParams::Berger { .. } => {
            if m.is_some() || l.is_some() {
                return Err(GeoError::InvalidConfig(format!(
                    "entry `{id}` takes --eps, not --m/--l"
                )));
            }
            match eps {
                None => Ok(spec),
                Some(e) => hopf_spec(BergerParams::new(e)?),
            }
        }
        SpecParams::Fixed => {
            if m.is_some() || l.is_some() || eps.is_some() {
                Err(GeoError::InvalidConfig(format!(
                    "entry `{id}` has fixed parameters"
                )))
            } else {
                Ok(spec)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::{base_gauss_curvature, data_values, harmonic_system_report};
    use crate::submersion::{harmonic_verdict, SUBMERSION_TOL};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn catalog_has_eleven_uniquely_named_entries() {
        let entries = catalog().unwrap();
        assert_eq!(entries.len(), 11);
        let mut ids: Vec<&str> = entries.iter().map(|s| s.id()).collect();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), 11, "duplicate catalog ids");
    }

    #[test]
    fn unknown_id_is_a_usage_error() {
        let err = find("no.such.entry").unwrap_err();
        assert!(matches!(err, GeoError::UnknownId(_)));
        assert!(err.is_usage());
    }

    #[test]
    fn every_entry_validates_and_matches_its_verdict() {
        for spec in catalog().unwrap() {
            let mut rng = ChaCha8Rng::seed_from_u64(67);
            let mut max_kappa = 0.0f64;
            let mut rc0_max = 0.0f64;
            for p in spec.sample(&mut rng, 15) {
                spec.validate(&p, SUBMERSION_TOL)
                    .unwrap_or_else(|e| panic!("{} fails validation: {e}", spec.id()));
                let t = spec.tension(&p).unwrap();
                max_kappa = max_kappa.max(t.max_kappa);
                rc0_max = rc0_max.max(
                    harmonic_system_report(spec.frame(), &p)
                        .unwrap()
                        .max_residual(),
                );
            }
            let verdict = harmonic_verdict(max_kappa, 1e-8).unwrap();
            assert_eq!(
                verdict.is_harmonic(),
                spec.expected_harmonic().unwrap(),
                "verdict mismatch for {}",
                spec.id()
            );
            let rc0_holds = rc0_max <= 1e-8;
            assert_eq!(
                rc0_holds,
                spec.rc0_expected().unwrap(),
                "residual-system mismatch for {} (max {rc0_max:.3e})",
                spec.id()
            );
        }
    }

    #[test]
    fn declared_constant_base_curvatures_hold() {
        for spec in catalog().unwrap() {
            let Some(expected) = spec.expected_kn() else {
                continue;
            };
            assert!(spec.kn_constant());
            let mut rng = ChaCha8Rng::seed_from_u64(71);
            for p in spec.sample(&mut rng, 10) {
                let kn = base_gauss_curvature(spec.frame(), &p).unwrap();
                assert!(
                    (kn - expected).abs() < 1e-9,
                    "{}: K^N = {kn} vs {expected}",
                    spec.id()
                );
            }
        }
    }

    #[test]
    fn nil_fiber_curvature_matches_closed_form() {
        let spec = find("nil.example23").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(73);
        for p in spec.sample(&mut rng, 40) {
            let x = p.coords()[0];
            let data = data_values(spec.frame(), &p).unwrap();
            assert!((data.k1 - (-x / (1.0 + x * x))).abs() < 1e-11);
            assert!((data.f2 - x / (1.0 + x * x)).abs() < 1e-11);
            let sigma = (1.0 - x * x) / (2.0 * (1.0 + x * x));
            assert!((data.sigma - sigma).abs() < 1e-11);
            let kn = base_gauss_curvature(spec.frame(), &p).unwrap();
            let expected = (1.0 - 2.0 * x * x) / ((1.0 + x * x) * (1.0 + x * x));
            assert!((kn - expected).abs() < 1e-10);
        }
    }

    #[test]
    fn parameter_overrides_respect_entry_families() {
        // Fixed entries refuse overrides.
        let err = with_params("nil.example23", Some(1.0), None, None).unwrap_err();
        assert!(matches!(err, GeoError::InvalidConfig(_)));
        // Cross-family flags are refused.
        assert!(with_params("bcv.projection", None, None, Some(1.0)).is_err());
        assert!(with_params("berger.hopf", Some(1.0), None, None).is_err());
        // No overrides: the stock entry comes back.
        let stock = with_params("bcv.projection", None, None, None).unwrap();
        assert_eq!(stock.params(), SpecParams::Bcv { m: 1.0, l: 2.0 });
        // Partial override keeps the stock value for the other parameter.
        let rebuilt = with_params("bcv.projection", Some(-1.0), None, None).unwrap();
        assert_eq!(rebuilt.params(), SpecParams::Bcv { m: -1.0, l: 2.0 });
        let hopf = with_params("berger.hopf", None, None, Some(2.0)).unwrap();
        assert_eq!(hopf.params(), SpecParams::Berger { eps: 2.0 });
        assert!(hopf.expected_harmonic().unwrap());
    }

    #[test]
    fn injected_warping_profiles_stay_harmonic() {
        // p = y^2: K^N = -p'' - (p')^2 = -2 - 4 y^2, position dependent.
        let p_expr = Expr::coord(1).powi(2);
        let spec = warped_product_spec("warped.custom", &p_expr).unwrap();
        assert_eq!(spec.params(), SpecParams::Fixed);
        let mut rng = ChaCha8Rng::seed_from_u64(79);
        let mut max_kappa = 0.0f64;
        for p in spec.sample(&mut rng, 20) {
            spec.validate(&p, SUBMERSION_TOL).unwrap();
            let t = spec.tension(&p).unwrap();
            max_kappa = max_kappa.max(t.max_kappa);
            let y = p.coords()[1];
            let kn = base_gauss_curvature(spec.frame(), &p).unwrap();
            assert!((kn - (-2.0 - 4.0 * y * y)).abs() < 1e-9);
        }
        assert!(harmonic_verdict(max_kappa, 1e-8).unwrap().is_harmonic());

        let flat = flat_product_spec().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(83);
        for p in flat.sample(&mut rng, 10) {
            let kn = base_gauss_curvature(flat.frame(), &p).unwrap();
            assert!(kn.abs() < 1e-12);
        }
    }
}
