//! Forward-mode scalar types.
//!
//! Everything in this crate that evaluates a field is written once, generically
//! over [`Real`]. Instantiating at `f64` gives plain evaluation; instantiating
//! at [`Dual<f64>`] propagates first derivatives; nesting (`Dual<Dual<f64>>`,
//! three levels deep where needed) propagates exact higher-order truncated
//! Taylor coefficients. There is no truncation error: derivatives of the
//! rational/exponential/trigonometric fields used here are exact to rounding.
//!
//! Derived quantities (brackets, connection coefficients, integrability data)
//! are ordinary generic functions of the evaluation point; differentiating one
//! means re-running it with the point seeded one dual level deeper. That is
//! what makes frame-derivative formulas (which need second derivatives of
//! frame components, hence third derivatives of map components for synthesized
//! frames) come out exact instead of approximated.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Number of coordinate slots carried by every point and every dual number.
/// Charts of dimension 2 and 3 use a prefix and leave the rest at zero.
pub const DIM: usize = 4;

/// Scalar admitting the operations field expressions are built from.
pub trait Real:
    Copy
    + Send
    + Sync
    + std::fmt::Debug
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(c: f64) -> Self;
    /// Principal (derivative-free) part. Branch decisions (signs, pivots,
    /// tolerance tests) must go through this so they stay locally constant
    /// under differentiation.
    fn value(&self) -> f64;
    fn zero() -> Self {
        Self::from_f64(0.0)
    }
    fn one() -> Self {
        Self::from_f64(1.0)
    }
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn powi(self, n: i32) -> Self;
}

impl Real for f64 {
    fn from_f64(c: f64) -> Self {
        c
    }
    fn value(&self) -> f64 {
        *self
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
}

/// First-order dual number over `T` with [`DIM`] infinitesimal slots.
#[derive(Copy, Clone, Debug)]
pub struct Dual<T> {
    pub re: T,
    pub eps: [T; DIM],
}

impl<T: Real> Dual<T> {
    pub fn constant(c: T) -> Self {
        Dual {
            re: c,
            eps: [T::zero(); DIM],
        }
    }

    /// Coordinate variable: value `c`, unit derivative in slot `slot`.
    pub fn variable(c: T, slot: usize) -> Self {
        let mut eps = [T::zero(); DIM];
        eps[slot] = T::one();
        Dual { re: c, eps }
    }

    fn map_eps(self, re: T, f: impl Fn(T) -> T) -> Self {
        Dual {
            re,
            eps: self.eps.map(f),
        }
    }
}

/// Seed the first `dim` coordinates of `p` as independent variables.
///
/// Composing with itself raises the derivative order: `seed(&seed(&p, d), d)`
/// yields second-order jets, and so on.
pub fn seed<T: Real>(p: &[T; DIM], dim: usize) -> [Dual<T>; DIM] {
    std::array::from_fn(|i| {
        if i < dim {
            Dual::variable(p[i], i)
        } else {
            Dual::constant(p[i])
        }
    })
}

impl<T: Real> Add for Dual<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Dual {
            re: self.re + rhs.re,
            eps: std::array::from_fn(|i| self.eps[i] + rhs.eps[i]),
        }
    }
}

impl<T: Real> Sub for Dual<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Dual {
            re: self.re - rhs.re,
            eps: std::array::from_fn(|i| self.eps[i] - rhs.eps[i]),
        }
    }
}

// The product and quotient rules mix operators by definition.
#[allow(clippy::suspicious_arithmetic_impl)]
impl<T: Real> Mul for Dual<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Dual {
            re: self.re * rhs.re,
            eps: std::array::from_fn(|i| self.eps[i] * rhs.re + self.re * rhs.eps[i]),
        }
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl<T: Real> Div for Dual<T> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let re = self.re / rhs.re;
        Dual {
            re,
            eps: std::array::from_fn(|i| (self.eps[i] - re * rhs.eps[i]) / rhs.re),
        }
    }
}

impl<T: Real> Neg for Dual<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual {
            re: -self.re,
            eps: self.eps.map(|e| -e),
        }
    }
}

impl<T: Real> Real for Dual<T> {
    fn from_f64(c: f64) -> Self {
        Dual::constant(T::from_f64(c))
    }

    fn value(&self) -> f64 {
        self.re.value()
    }

    fn sqrt(self) -> Self {
        let r = self.re.sqrt();
        let half_inv = T::from_f64(0.5) / r;
        self.map_eps(r, |e| e * half_inv)
    }

    fn exp(self) -> Self {
        let r = self.re.exp();
        self.map_eps(r, |e| e * r)
    }

    fn ln(self) -> Self {
        let r = self.re.ln();
        let inv = T::one() / self.re;
        self.map_eps(r, |e| e * inv)
    }

    fn sin(self) -> Self {
        let r = self.re.sin();
        let c = self.re.cos();
        self.map_eps(r, |e| e * c)
    }

    fn cos(self) -> Self {
        let r = self.re.cos();
        let ms = -self.re.sin();
        self.map_eps(r, |e| e * ms)
    }

    fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Self::one();
        }
        let dm1 = self.re.powi(n - 1);
        let scale = T::from_f64(f64::from(n)) * dm1;
        Dual {
            re: self.re * dm1,
            eps: self.eps.map(|e| e * scale),
        }
    }
}
