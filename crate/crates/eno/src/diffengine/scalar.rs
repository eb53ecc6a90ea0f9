//! Scalar rings the engine evaluates in.
//!
//! Network and energy-density code is written once against [`Scalar`] and
//! runs unchanged over plain `f64`, tape variables, tangent bundles
//! ([`Grad`](super::Grad)) and truncated Taylor jets ([`Jet`](super::Jet)),
//! in any nesting. The supported primitive registry is the method set below:
//! affine maps, products, integer powers, tanh, and sin/cos.

use super::tape::Var;

pub trait Scalar: Clone {
    /// A constant in the same evaluation context as `self` (same tape, same
    /// tangent count, same truncation order).
    fn constant_like(&self, c: f64) -> Self;

    /// The underlying primal value (order-zero, tangent-free part).
    fn value(&self) -> f64;

    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;

    /// Multiplication by a plain constant.
    fn scale(&self, c: f64) -> Self;

    /// Addition of a plain constant.
    fn add_const(&self, c: f64) -> Self;

    /// `self + c * o` (fused where the ring supports it).
    fn mul_const_add(&self, c: f64, o: &Self) -> Self {
        self.add(&o.scale(c))
    }

    fn tanh(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;

    fn powi(&self, n: u32) -> Self {
        match n {
            0 => self.constant_like(1.0),
            _ => {
                let mut acc = self.clone();
                for _ in 1..n {
                    acc = acc.mul(self);
                }
                acc
            }
        }
    }

    fn is_finite(&self) -> bool;
}

impl Scalar for f64 {
    fn constant_like(&self, c: f64) -> Self {
        c
    }

    fn value(&self) -> f64 {
        *self
    }

    fn add(&self, o: &Self) -> Self {
        self + o
    }

    fn sub(&self, o: &Self) -> Self {
        self - o
    }

    fn mul(&self, o: &Self) -> Self {
        self * o
    }

    fn neg(&self) -> Self {
        -self
    }

    fn scale(&self, c: f64) -> Self {
        self * c
    }

    fn add_const(&self, c: f64) -> Self {
        self + c
    }

    fn mul_const_add(&self, c: f64, o: &Self) -> Self {
        self + c * o
    }

    fn tanh(&self) -> Self {
        f64::tanh(*self)
    }

    fn sin(&self) -> Self {
        f64::sin(*self)
    }

    fn cos(&self) -> Self {
        f64::cos(*self)
    }

    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

impl<'t> Scalar for Var<'t> {
    fn constant_like(&self, c: f64) -> Self {
        self.constant(c)
    }

    fn value(&self) -> f64 {
        Var::value(*self)
    }

    fn add(&self, o: &Self) -> Self {
        Var::add(*self, *o)
    }

    fn sub(&self, o: &Self) -> Self {
        Var::sub(*self, *o)
    }

    fn mul(&self, o: &Self) -> Self {
        Var::mul(*self, *o)
    }

    fn neg(&self) -> Self {
        Var::neg(*self)
    }

    fn scale(&self, c: f64) -> Self {
        Var::scale(*self, c)
    }

    fn add_const(&self, c: f64) -> Self {
        Var::add_const(*self, c)
    }

    fn mul_const_add(&self, c: f64, o: &Self) -> Self {
        Var::mul_const_add(*self, c, *o)
    }

    fn tanh(&self) -> Self {
        Var::tanh(*self)
    }

    fn sin(&self) -> Self {
        Var::sin(*self)
    }

    fn cos(&self) -> Self {
        Var::cos(*self)
    }

    fn powi(&self, n: u32) -> Self {
        Var::powi(*self, n)
    }

    fn is_finite(&self) -> bool {
        self.value().is_finite()
    }
}

/// Scalars that can consume network parameters of base type `V` without first
/// promoting them to the full ring.
///
/// A weight is constant in the coordinates, so `weight * activation` only
/// touches each jet coefficient / tangent once. Going through a promoted
/// constant would pay the full product rule for entries known to be zero.
pub trait NetScalar<V: Copy>: Scalar {
    /// Promotes a parameter into this ring (used for layer inputs that are
    /// precomputed at parameter level).
    fn from_param(p: V, like: &Self) -> Self;

    /// `self * p` with `p` a coordinate-constant parameter.
    fn mul_param(&self, p: V) -> Self;

    /// `self + p` with `p` a coordinate-constant parameter.
    fn add_param(&self, p: V) -> Self;
}

/// Parameter base rings: scalars that can serve as both the parameter type
/// and an evaluation ring (`f64`, and tape variables).
pub trait BaseScalar: Copy + Scalar + NetScalar<Self> {}
impl<T: Copy + Scalar + NetScalar<T>> BaseScalar for T {}

impl NetScalar<f64> for f64 {
    fn from_param(p: f64, _like: &Self) -> Self {
        p
    }

    fn mul_param(&self, p: f64) -> Self {
        self * p
    }

    fn add_param(&self, p: f64) -> Self {
        self + p
    }
}

impl<'t> NetScalar<Var<'t>> for Var<'t> {
    fn from_param(p: Var<'t>, _like: &Self) -> Self {
        p
    }

    fn mul_param(&self, p: Var<'t>) -> Self {
        Var::mul(*self, p)
    }

    fn add_param(&self, p: Var<'t>) -> Self {
        Var::add(*self, p)
    }
}
