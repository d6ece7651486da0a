//! Closed-form scalar expressions over chart coordinates.
//!
//! Fields are small expression trees interpreted generically over [`Real`],
//! so the same definition serves plain evaluation, the jet engine (via nested
//! duals), and the finite-difference oracle (which only ever calls the `f64`
//! instantiation). Trees are immutable and cheaply cloneable.

use crate::real::{Real, DIM};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

#[derive(Clone)]
pub struct Expr(Arc<Node>);

enum Node {
    Const(f64),
    Coord(usize),
    Add(Expr, Expr),
    Sub(Expr, Expr),
    Mul(Expr, Expr),
    Div(Expr, Expr),
    Neg(Expr),
    Powi(Expr, i32),
    Sqrt(Expr),
    Exp(Expr),
    Ln(Expr),
    Sin(Expr),
    Cos(Expr),
}

impl Expr {
    pub fn constant(c: f64) -> Self {
        Expr(Arc::new(Node::Const(c)))
    }

    pub fn zero() -> Self {
        Expr::constant(0.0)
    }

    pub fn one() -> Self {
        Expr::constant(1.0)
    }

    /// Coordinate `x_i` of the owning chart, `i < DIM`.
    pub fn coord(i: usize) -> Self {
        assert!(i < DIM, "coordinate index {i} out of range");
        Expr(Arc::new(Node::Coord(i)))
    }

    pub fn powi(&self, n: i32) -> Self {
        Expr(Arc::new(Node::Powi(self.clone(), n)))
    }

    pub fn sqrt(&self) -> Self {
        Expr(Arc::new(Node::Sqrt(self.clone())))
    }

    pub fn exp(&self) -> Self {
        Expr(Arc::new(Node::Exp(self.clone())))
    }

    pub fn ln(&self) -> Self {
        Expr(Arc::new(Node::Ln(self.clone())))
    }

    pub fn sin(&self) -> Self {
        Expr(Arc::new(Node::Sin(self.clone())))
    }

    pub fn cos(&self) -> Self {
        Expr(Arc::new(Node::Cos(self.clone())))
    }

    pub fn eval<T: Real>(&self, x: &[T; DIM]) -> T {
        match &*self.0 {
            Node::Const(c) => T::from_f64(*c),
            Node::Coord(i) => x[*i],
            Node::Add(a, b) => a.eval(x) + b.eval(x),
            Node::Sub(a, b) => a.eval(x) - b.eval(x),
            Node::Mul(a, b) => a.eval(x) * b.eval(x),
            Node::Div(a, b) => a.eval(x) / b.eval(x),
            Node::Neg(a) => -a.eval(x),
            Node::Powi(a, n) => a.eval(x).powi(*n),
            Node::Sqrt(a) => a.eval(x).sqrt(),
            Node::Exp(a) => a.eval(x).exp(),
            Node::Ln(a) => a.eval(x).ln(),
            Node::Sin(a) => a.eval(x).sin(),
            Node::Cos(a) => a.eval(x).cos(),
        }
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            Node::Const(c) => write!(f, "{c}"),
            Node::Coord(i) => write!(f, "x{i}"),
            Node::Add(a, b) => write!(f, "({a:?} + {b:?})"),
            Node::Sub(a, b) => write!(f, "({a:?} - {b:?})"),
            Node::Mul(a, b) => write!(f, "({a:?} * {b:?})"),
            Node::Div(a, b) => write!(f, "({a:?} / {b:?})"),
            Node::Neg(a) => write!(f, "-{a:?}"),
            Node::Powi(a, n) => write!(f, "{a:?}^{n}"),
            Node::Sqrt(a) => write!(f, "sqrt({a:?})"),
            Node::Exp(a) => write!(f, "exp({a:?})"),
            Node::Ln(a) => write!(f, "ln({a:?})"),
            Node::Sin(a) => write!(f, "sin({a:?})"),
            Node::Cos(a) => write!(f, "cos({a:?})"),
        }
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $node:ident) => {
        impl $trait for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr(Arc::new(Node::$node(self, rhs)))
            }
        }
        impl $trait<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                Expr(Arc::new(Node::$node(self, rhs.clone())))
            }
        }
        impl $trait<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr(Arc::new(Node::$node(self.clone(), rhs)))
            }
        }
        impl $trait<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                Expr(Arc::new(Node::$node(self.clone(), rhs.clone())))
            }
        }
        impl $trait<f64> for Expr {
            type Output = Expr;
            fn $method(self, rhs: f64) -> Expr {
                Expr(Arc::new(Node::$node(self, Expr::constant(rhs))))
            }
        }
        impl $trait<f64> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: f64) -> Expr {
                Expr(Arc::new(Node::$node(self.clone(), Expr::constant(rhs))))
            }
        }
        impl $trait<Expr> for f64 {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr(Arc::new(Node::$node(Expr::constant(self), rhs)))
            }
        }
        impl $trait<&Expr> for f64 {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                Expr(Arc::new(Node::$node(Expr::constant(self), rhs.clone())))
            }
        }
    };
}

binop!(Add, add, Add);
binop!(Sub, sub, Sub);
binop!(Mul, mul, Mul);
binop!(Div, div, Div);

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr(Arc::new(Node::Neg(self)))
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr(Arc::new(Node::Neg(self.clone())))
    }
}
