//! First-order tangent bundles.
//!
//! `Grad<S>` carries a value plus a small set of directional derivatives
//! (tangents). One tangent tracks the time derivative of an operator output;
//! several tangents at once give the partial derivatives of an energy density
//! with respect to its inputs, which is how the variational derivative is
//! assembled.

use arrayvec::ArrayVec;

use super::scalar::{NetScalar, Scalar};

/// Most tangents carried at once: `M * (diff_order + 1)` density inputs with
/// M <= 2 and diff_order <= 2.
pub const MAX_TANGENTS: usize = 6;

#[derive(Clone, Debug)]
pub struct Grad<S> {
    pub re: S,
    pub tangents: ArrayVec<S, MAX_TANGENTS>,
}

impl<S: Scalar> Grad<S> {
    pub fn new(re: S, tangents: ArrayVec<S, MAX_TANGENTS>) -> Self {
        Self { re, tangents }
    }

    /// Value with every tangent zero.
    pub fn constant(re: S, n_tangents: usize) -> Self {
        let zero = re.constant_like(0.0);
        let tangents = (0..n_tangents).map(|_| zero.clone()).collect();
        Self { re, tangents }
    }

    /// Value whose `k`-th tangent is one: a seed for d/d(input_k).
    pub fn seed(re: S, n_tangents: usize, k: usize) -> Self {
        let mut g = Self::constant(re, n_tangents);
        g.tangents[k] = g.re.constant_like(1.0);
        g
    }

    pub fn tangent(&self, k: usize) -> &S {
        &self.tangents[k]
    }

    fn zip(&self, o: &Self, f: impl Fn(&S, &S) -> S) -> Self {
        debug_assert_eq!(self.tangents.len(), o.tangents.len());
        Self {
            re: f(&self.re, &o.re),
            tangents: self
                .tangents
                .iter()
                .zip(o.tangents.iter())
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    fn map(&self, f: impl Fn(&S) -> S) -> Self {
        Self {
            re: f(&self.re),
            tangents: self.tangents.iter().map(f).collect(),
        }
    }

    /// Applies a univariate primitive given its value and first derivative at
    /// the primal point: tangents obey the chain rule `t -> t * d`.
    fn lift(&self, value: S, deriv: &S) -> Self {
        Self {
            re: value,
            tangents: self.tangents.iter().map(|t| t.mul(deriv)).collect(),
        }
    }
}

impl<S: Scalar> Scalar for Grad<S> {
    fn constant_like(&self, c: f64) -> Self {
        Self::constant(self.re.constant_like(c), self.tangents.len())
    }

    fn value(&self) -> f64 {
        self.re.value()
    }

    fn add(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.add(b))
    }

    fn sub(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.sub(b))
    }

    fn mul(&self, o: &Self) -> Self {
        debug_assert_eq!(self.tangents.len(), o.tangents.len());
        Self {
            re: self.re.mul(&o.re),
            tangents: self
                .tangents
                .iter()
                .zip(o.tangents.iter())
                .map(|(da, db)| da.mul(&o.re).add(&self.re.mul(db)))
                .collect(),
        }
    }

    fn neg(&self) -> Self {
        self.map(|a| a.neg())
    }

    fn scale(&self, c: f64) -> Self {
        self.map(|a| a.scale(c))
    }

    fn add_const(&self, c: f64) -> Self {
        Self {
            re: self.re.add_const(c),
            tangents: self.tangents.clone(),
        }
    }

    fn tanh(&self) -> Self {
        let t = self.re.tanh();
        let d = t.mul(&t).neg().add_const(1.0);
        self.lift(t, &d)
    }

    fn sin(&self) -> Self {
        self.lift(self.re.sin(), &self.re.cos())
    }

    fn cos(&self) -> Self {
        self.lift(self.re.cos(), &self.re.sin().neg())
    }

    fn powi(&self, n: u32) -> Self {
        match n {
            0 => self.constant_like(1.0),
            _ => {
                let value = self.re.powi(n);
                let d = self.re.powi(n - 1).scale(f64::from(n));
                self.lift(value, &d)
            }
        }
    }

    fn is_finite(&self) -> bool {
        self.re.is_finite() && self.tangents.iter().all(Scalar::is_finite)
    }
}

impl<V: Copy, S: NetScalar<V>> NetScalar<V> for Grad<S> {
    fn from_param(p: V, like: &Self) -> Self {
        Self::constant(S::from_param(p, &like.re), like.tangents.len())
    }

    fn mul_param(&self, p: V) -> Self {
        Self {
            re: self.re.mul_param(p),
            tangents: self.tangents.iter().map(|t| t.mul_param(p)).collect(),
        }
    }

    fn add_param(&self, p: V) -> Self {
        Self {
            re: self.re.add_param(p),
            tangents: self.tangents.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn dual(x: f64) -> Grad<f64> {
        Grad::seed(x, 1, 0)
    }

    #[test]
    fn product_rule() {
        let x = dual(1.3);
        let y = x.mul(&x).mul(&x); // x^3
        assert_relative_eq!(y.re, 1.3_f64.powi(3));
        assert_relative_eq!(*y.tangent(0), 3.0 * 1.3_f64.powi(2), epsilon = 1e-14);
    }

    #[test]
    fn tanh_derivative_matches_identity() {
        // d tanh / dx = 1 - tanh^2
        let x = dual(0.5);
        let y = x.tanh();
        let t = 0.5_f64.tanh();
        assert_relative_eq!(*y.tangent(0), 1.0 - t * t, epsilon = 1e-15);
    }

    #[test]
    fn multi_tangent_partials() {
        // f(a, b) = a^2 b + sin(b); df/da = 2ab, df/db = a^2 + cos(b)
        let (a0, b0) = (0.7, -0.4);
        let a = Grad::seed(a0, 2, 0);
        let b = Grad::seed(b0, 2, 1);
        let f = a.powi(2).mul(&b).add(&b.sin());
        assert_relative_eq!(*f.tangent(0), 2.0 * a0 * b0, epsilon = 1e-14);
        assert_relative_eq!(*f.tangent(1), a0 * a0 + b0.cos(), epsilon = 1e-14);
    }

    #[test]
    fn constants_carry_zero_tangents() {
        let x = dual(2.0);
        let c = x.constant_like(5.0);
        assert_eq!(c.re, 5.0);
        assert_eq!(*c.tangent(0), 0.0);
    }
}
