//! Central finite differences, kept as an independent oracle.
//!
//! This module deliberately never touches the dual-number machinery: it only
//! evaluates plain `f64` values of a field. Tests use it to cross-check the
//! jet engine; it is not meant to be the production derivative path.

use crate::chart::ChartPoint;
use crate::error::{GeoError, Result};
use crate::field::{Jet2, ScalarField};
use crate::real::DIM;

/// Default relative step used by oracle sweeps.
pub const DEFAULT_STEP: f64 = 1e-4;

/// Second-order central differences of `field` at `p`.
///
/// The step in coordinate `i` is `h * (1 + |p_i|)`. Every stencil point must
/// satisfy the chart's hard domain constraints; a stencil that leaves the
/// domain is reported as an `OutsideDomain` error rather than evaluated.
pub fn fd_oracle(field: &ScalarField, p: &ChartPoint, h: f64) -> Result<Jet2> {
    field.chart().expect_same(p.chart())?;
    if !(h.is_finite() && h > 0.0) {
        return Err(GeoError::InvalidParameter(format!(
            "finite-difference step must be positive, got {h}"
        )));
    }
    let dim = p.dim();
    let c = *p.coords();
    let steps: [f64; DIM] = std::array::from_fn(|i| h * (1.0 + c[i].abs()));

    let probe = |offsets: &[(usize, f64)]| -> Result<f64> {
        let mut q = c;
        for &(i, d) in offsets {
            q[i] += d;
        }
        p.chart()
            .domain_ok(&q)
            .map_err(|reason| GeoError::OutsideDomain {
                chart: p.chart().id().to_string(),
                coords: q[..dim].to_vec(),
                reason: format!("finite-difference stencil leaves the domain: {reason}"),
            })?;
        Ok(field.value_at(&q))
    };

    // Margin check: every probe axis needs 2h of in-domain clearance.
    for i in 0..dim {
        probe(&[(i, 2.0 * steps[i])])?;
        probe(&[(i, -2.0 * steps[i])])?;
    }

    let f0 = field.value_at(&c);
    let mut gradient = [0.0; DIM];
    let mut hessian = [[0.0; DIM]; DIM];

    for i in 0..dim {
        let hi = steps[i];
        let fp = probe(&[(i, hi)])?;
        let fm = probe(&[(i, -hi)])?;
        gradient[i] = (fp - fm) / (2.0 * hi);
        hessian[i][i] = (fp - 2.0 * f0 + fm) / (hi * hi);
        for j in (i + 1)..dim {
            let hj = steps[j];
            let fpp = probe(&[(i, hi), (j, hj)])?;
            let fpm = probe(&[(i, hi), (j, -hj)])?;
            let fmp = probe(&[(i, -hi), (j, hj)])?;
            let fmm = probe(&[(i, -hi), (j, -hj)])?;
            let mixed = (fpp - fpm - fmp + fmm) / (4.0 * hi * hj);
            hessian[i][j] = mixed;
            hessian[j][i] = mixed;
        }
    }

    Ok(Jet2::new(f0, gradient, hessian, dim))
}
