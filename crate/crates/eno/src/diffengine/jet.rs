//! Truncated univariate Taylor jets.
//!
//! A `Jet<S>` holds the Taylor coefficients `c_0..c_J` of a function of one
//! spatial variable around the evaluation point, with coefficients drawn from
//! any [`Scalar`] ring. Products are truncated Cauchy convolutions; tanh and
//! sin/cos propagate through the standard power-series recurrences, so every
//! coefficient is exact for the recorded expression.

use arrayvec::ArrayVec;

use super::scalar::{NetScalar, Scalar};

/// Highest coefficient count (spatial order 8) the engine ever carries:
/// a second-order density pushed through a second-derivative operator.
pub const MAX_JET_LEN: usize = 9;

#[derive(Clone, Debug)]
pub struct Jet<S> {
    coeffs: ArrayVec<S, MAX_JET_LEN>,
}

impl<S: Scalar> Jet<S> {
    /// Constant field: `c` at order zero, zeros above.
    pub fn constant(c: S, order: usize) -> Self {
        assert!(order + 1 <= MAX_JET_LEN, "jet order {order} too high");
        let zero = c.constant_like(0.0);
        let mut coeffs = ArrayVec::new();
        coeffs.push(c);
        for _ in 0..order {
            coeffs.push(zero.clone());
        }
        Self { coeffs }
    }

    /// The identity field `x` expanded at `x0`: coefficients `[x0, 1, 0, ..]`.
    pub fn variable(x0: S, order: usize) -> Self {
        let one = x0.constant_like(1.0);
        let mut jet = Self::constant(x0, order);
        if order >= 1 {
            jet.coeffs[1] = one;
        }
        jet
    }

    pub fn from_coeffs(coeffs: impl IntoIterator<Item = S>) -> Self {
        let coeffs: ArrayVec<S, MAX_JET_LEN> = coeffs.into_iter().collect();
        assert!(!coeffs.is_empty(), "jet needs at least the order-0 coefficient");
        Self { coeffs }
    }

    /// Truncation order J (coefficients run 0..=J).
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &S {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    /// Taylor coefficients of the derivative field: one order lower.
    pub fn derivative(&self) -> Self {
        assert!(self.order() >= 1, "cannot differentiate an order-0 jet");
        Self {
            coeffs: self
                .coeffs
                .iter()
                .skip(1)
                .enumerate()
                .map(|(k, c)| c.scale((k + 1) as f64))
                .collect(),
        }
    }

    /// Drops coefficients above `order`.
    pub fn truncated(&self, order: usize) -> Self {
        assert!(order <= self.order());
        Self {
            coeffs: self.coeffs.iter().take(order + 1).cloned().collect(),
        }
    }

    /// The k-th derivative value at the expansion point: `k! * c_k`.
    pub fn derivative_value(&self, k: usize) -> S {
        self.coeffs[k].scale(factorial(k))
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Jet<T> {
        Jet {
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    fn zip(&self, o: &Self, f: impl Fn(&S, &S) -> S) -> Self {
        debug_assert_eq!(self.coeffs.len(), o.coeffs.len(), "jet order mismatch");
        Self {
            coeffs: self
                .coeffs
                .iter()
                .zip(o.coeffs.iter())
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    /// sin and cos share one recurrence, so compute them jointly:
    /// `s' = u' cos(u)`, `c' = -u' sin(u)`.
    fn sincos(&self) -> (Self, Self) {
        let n = self.coeffs.len();
        let mut s: ArrayVec<S, MAX_JET_LEN> = ArrayVec::new();
        let mut c: ArrayVec<S, MAX_JET_LEN> = ArrayVec::new();
        s.push(self.coeffs[0].sin());
        c.push(self.coeffs[0].cos());
        for k in 0..n - 1 {
            let mut ds = s[0].constant_like(0.0);
            let mut dc = ds.clone();
            for m in 0..=k {
                let du = self.coeffs[m + 1].scale((m + 1) as f64);
                ds = ds.add(&du.mul(&c[k - m]));
                dc = dc.sub(&du.mul(&s[k - m]));
            }
            let inv = 1.0 / (k + 1) as f64;
            s.push(ds.scale(inv));
            c.push(dc.scale(inv));
        }
        (Self { coeffs: s }, Self { coeffs: c })
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

impl<S: Scalar> Scalar for Jet<S> {
    fn constant_like(&self, c: f64) -> Self {
        Self::constant(self.coeffs[0].constant_like(c), self.order())
    }

    fn value(&self) -> f64 {
        self.coeffs[0].value()
    }

    fn add(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.add(b))
    }

    fn sub(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.sub(b))
    }

    fn mul(&self, o: &Self) -> Self {
        debug_assert_eq!(self.coeffs.len(), o.coeffs.len(), "jet order mismatch");
        let n = self.coeffs.len();
        let mut out: ArrayVec<S, MAX_JET_LEN> = ArrayVec::new();
        for k in 0..n {
            let mut acc = self.coeffs[0].mul(&o.coeffs[k]);
            for m in 1..=k {
                acc = acc.add(&self.coeffs[m].mul(&o.coeffs[k - m]));
            }
            out.push(acc);
        }
        Self { coeffs: out }
    }

    fn neg(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|a| a.neg()).collect(),
        }
    }

    fn scale(&self, c: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|a| a.scale(c)).collect(),
        }
    }

    fn add_const(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.coeffs[0] = out.coeffs[0].add_const(c);
        out
    }

    /// Power-series tanh: with `y = tanh(u)` and `w = 1 - y^2`,
    /// `(k+1) y_{k+1} = sum_{m<=k} (m+1) u_{m+1} w_{k-m}`.
    fn tanh(&self) -> Self {
        let n = self.coeffs.len();
        let mut y: ArrayVec<S, MAX_JET_LEN> = ArrayVec::new();
        let mut w: ArrayVec<S, MAX_JET_LEN> = ArrayVec::new();
        y.push(self.coeffs[0].tanh());
        for k in 0..n - 1 {
            let mut sq = y[0].mul(&y[k]);
            for a in 1..=k {
                sq = sq.add(&y[a].mul(&y[k - a]));
            }
            w.push(if k == 0 { sq.neg().add_const(1.0) } else { sq.neg() });

            let mut acc = y[0].constant_like(0.0);
            for m in 0..=k {
                let du = self.coeffs[m + 1].scale((m + 1) as f64);
                acc = acc.add(&du.mul(&w[k - m]));
            }
            y.push(acc.scale(1.0 / (k + 1) as f64));
        }
        Self { coeffs: y }
    }

    fn sin(&self) -> Self {
        self.sincos().0
    }

    fn cos(&self) -> Self {
        self.sincos().1
    }

    fn is_finite(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_finite)
    }
}

impl<V: Copy, S: NetScalar<V>> NetScalar<V> for Jet<S> {
    fn from_param(p: V, like: &Self) -> Self {
        Self::constant(S::from_param(p, &like.coeffs[0]), like.order())
    }

    fn mul_param(&self, p: V) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c.mul_param(p)).collect(),
        }
    }

    fn add_param(&self, p: V) -> Self {
        let mut out = self.clone();
        out.coeffs[0] = out.coeffs[0].add_param(p);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn var(x0: f64, order: usize) -> Jet<f64> {
        Jet::variable(x0, order)
    }

    #[test]
    fn polynomial_taylor_coefficients() {
        // f(x) = x^2 at x0 = 3: value 9, f' = 6, f'' = 2
        let x = var(3.0, 2);
        let f = x.mul(&x);
        assert_relative_eq!(*f.coeff(0), 9.0);
        assert_relative_eq!(f.derivative_value(1), 6.0);
        assert_relative_eq!(f.derivative_value(2), 2.0);
    }

    #[test]
    fn constant_field_has_zero_higher_coefficients() {
        let x = var(1.7, 4);
        let c = x.constant_like(4.2);
        for k in 1..=4 {
            assert_eq!(*c.coeff(k), 0.0);
        }
    }

    #[test]
    fn tanh_series_at_origin() {
        // tanh(x) = x - x^3/3 + 2 x^5/15 ...
        let x = var(0.0, 4);
        let y = x.tanh();
        let expect = [0.0, 1.0, 0.0, -1.0 / 3.0, 0.0];
        for (k, e) in expect.iter().enumerate() {
            assert_relative_eq!(*y.coeff(k), *e, epsilon = 1e-15);
        }
    }

    #[test]
    fn sin_cos_series() {
        let x = var(0.0, 4);
        let s = x.sin();
        let c = x.cos();
        let es = [0.0, 1.0, 0.0, -1.0 / 6.0, 0.0];
        let ec = [1.0, 0.0, -0.5, 0.0, 1.0 / 24.0];
        for k in 0..=4 {
            assert_relative_eq!(*s.coeff(k), es[k], epsilon = 1e-15);
            assert_relative_eq!(*c.coeff(k), ec[k], epsilon = 1e-15);
        }
    }

    #[test]
    fn derivative_shifts_coefficients() {
        // f = x^3 at x0=2: coeffs [8, 12, 6, 1]; f' coeffs [12, 12, 3]
        let x = var(2.0, 3);
        let f = x.powi(3);
        let d = f.derivative();
        assert_relative_eq!(*d.coeff(0), 12.0);
        assert_relative_eq!(*d.coeff(1), 12.0);
        assert_relative_eq!(*d.coeff(2), 3.0);
    }

    #[test]
    fn tanh_composition_matches_closed_form() {
        // y = tanh(x^2) at x0 = 0.6; compare against analytic derivatives.
        let x0 = 0.6_f64;
        let x = var(x0, 3);
        let y = x.mul(&x).tanh();
        let t = (x0 * x0).tanh();
        let dt = 1.0 - t * t;
        assert_relative_eq!(*y.coeff(0), t, epsilon = 1e-14);
        assert_relative_eq!(y.derivative_value(1), 2.0 * x0 * dt, epsilon = 1e-13);
        // y'' = 2 dt + 4 x0^2 * (-2 t dt)
        let y2 = 2.0 * dt + 4.0 * x0 * x0 * (-2.0 * t * dt);
        assert_relative_eq!(y.derivative_value(2), y2, epsilon = 1e-12);
    }
}
