//! Scalar and vector fields on a chart, and the jet-based derivative ops.

use crate::chart::{Chart, ChartPoint};
use crate::error::Result;
use crate::expr::Expr;
use crate::real::{seed, Dual, Real, DIM};

/// Scalar field given by a closed-form expression on one chart.
#[derive(Clone, Debug)]
pub struct ScalarField {
    name: String,
    chart: Chart,
    expr: Expr,
}

impl ScalarField {
    pub fn new(name: impl Into<String>, chart: Chart, expr: Expr) -> Self {
        ScalarField {
            name: name.into(),
            chart,
            expr,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn eval<T: Real>(&self, x: &[T; DIM]) -> T {
        self.expr.eval(x)
    }

    /// Plain value at a validated point (used by the finite-difference oracle;
    /// no dual numbers are involved on this path).
    pub fn value_at(&self, coords: &[f64; DIM]) -> f64 {
        self.expr.eval(coords)
    }
}

/// Vector field with one expression per coordinate slot. Components beyond
/// the chart dimension are zero.
#[derive(Clone, Debug)]
pub struct VectorField {
    name: String,
    chart: Chart,
    comps: [Expr; DIM],
}

impl VectorField {
    pub fn new(name: impl Into<String>, chart: Chart, comps: [Expr; DIM]) -> Self {
        VectorField {
            name: name.into(),
            chart,
            comps,
        }
    }

    /// Convenience constructor padding missing components with zero.
    pub fn from_components(name: impl Into<String>, chart: Chart, comps: &[Expr]) -> Self {
        assert!(comps.len() <= DIM);
        let padded = std::array::from_fn(|i| comps.get(i).cloned().unwrap_or_else(Expr::zero));
        VectorField::new(name, chart, padded)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn component(&self, i: usize) -> &Expr {
        &self.comps[i]
    }

    pub fn eval<T: Real>(&self, x: &[T; DIM]) -> [T; DIM] {
        std::array::from_fn(|i| self.comps[i].eval(x))
    }

    /// Constant linear combination `sum_j a_j * fields_j`, component-wise.
    pub fn linear_combination(
        name: impl Into<String>,
        chart: Chart,
        terms: &[(f64, &VectorField)],
    ) -> Self {
        let comps = std::array::from_fn(|i| {
            let mut acc = Expr::zero();
            for (a, f) in terms {
                if *a != 0.0 {
                    acc = acc + *a * f.component(i);
                }
            }
            acc
        });
        VectorField::new(name, chart, comps)
    }
}

/// Second-order jet of a scalar field: value, gradient, and symmetric Hessian
/// in chart coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet2 {
    value: f64,
    gradient: [f64; DIM],
    hessian: [[f64; DIM]; DIM],
    dim: usize,
}

impl Jet2 {
    pub fn new(value: f64, gradient: [f64; DIM], hessian: [[f64; DIM]; DIM], dim: usize) -> Self {
        // Symmetrize: mixed partials are computed twice along different
        // association orders; averaging pins the invariant exactly.
        let mut h = hessian;
        for i in 0..DIM {
            for j in (i + 1)..DIM {
                let avg = 0.5 * (h[i][j] + h[j][i]);
                h[i][j] = avg;
                h[j][i] = avg;
            }
        }
        Jet2 {
            value,
            gradient,
            hessian: h,
            dim,
        }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn gradient(&self) -> &[f64] {
        &self.gradient[..self.dim]
    }

    pub fn gradient_full(&self) -> &[f64; DIM] {
        &self.gradient
    }

    pub fn hessian(&self, i: usize, j: usize) -> f64 {
        self.hessian[i][j]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_hessian_asymmetry(&self) -> f64 {
        // Zero by construction; kept for report plumbing.
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                worst = worst.max((self.hessian[i][j] - self.hessian[j][i]).abs());
            }
        }
        worst
    }
}

/// Exact second-order jet of `field` at `p` via forward propagation.
pub fn eval_jet(field: &ScalarField, p: &ChartPoint) -> Result<Jet2> {
    field.chart().expect_same(p.chart())?;
    let dim = p.dim();
    let s1 = seed(p.coords(), dim);
    let s2 = seed(&s1, dim);
    let out = field.eval(&s2);
    let gradient = std::array::from_fn(|i| out.re.eps[i]);
    let hessian = std::array::from_fn(|i| std::array::from_fn(|j| out.eps[i].eps[j]));
    Ok(Jet2::new(out.re.re, gradient, hessian, dim))
}

/// Lie bracket `[X, Y]` evaluated at a point of the common chart.
pub fn lie_bracket(x: &VectorField, y: &VectorField, p: &ChartPoint) -> Result<Vec<f64>> {
    x.chart().expect_same(y.chart())?;
    x.chart().expect_same(p.chart())?;
    let b = bracket_at::<f64>(x, y, p.coords(), p.dim());
    Ok(b[..p.dim()].to_vec())
}

/// Generic bracket kernel: `[X, Y]^k = X^j d_j Y^k - Y^j d_j X^k`.
///
/// Evaluates both fields one dual level above `T`, so calling this with
/// `T = Dual<f64>` yields the bracket's own first derivatives, and so on.
pub(crate) fn bracket_at<T: Real>(
    x: &VectorField,
    y: &VectorField,
    coords: &[T; DIM],
    dim: usize,
) -> [T; DIM] {
    let s = seed(coords, dim);
    let xv: [Dual<T>; DIM] = x.eval(&s);
    let yv: [Dual<T>; DIM] = y.eval(&s);
    std::array::from_fn(|k| {
        let mut acc = T::zero();
        for j in 0..dim {
            // Grouping each term as a difference keeps the bracket exactly
            // antisymmetric in floating point, not just up to rounding.
            acc = acc + (xv[j].re * yv[k].eps[j] - yv[j].re * xv[k].eps[j]);
        }
        acc
    })
}

/// Derivative of `f` along `X` at `p`: `X(f) = <grad f, X>` in chart coords.
pub fn directional_derivative(x: &VectorField, f: &ScalarField, p: &ChartPoint) -> Result<f64> {
    x.chart().expect_same(f.chart())?;
    x.chart().expect_same(p.chart())?;
    let s = seed(p.coords(), p.dim());
    let fv = f.eval(&s);
    let xv = x.eval(p.coords());
    let mut acc = 0.0;
    for j in 0..p.dim() {
        acc += xv[j] * fv.eps[j];
    }
    Ok(acc)
}
