//! Coordinate jets of scalar fields and parameter gradients of losses.

use thiserror::Error;

use super::grad::Grad;
use super::jet::{Jet, MAX_JET_LEN};
use super::scalar::Scalar;
use super::tape::{Backprop, Tape, Var};

#[derive(Debug, Error)]
pub enum DiffError {
    #[error("unsupported primitive: {0}")]
    UnsupportedPrimitive(String),
    #[error("non-finite value encountered in {0}")]
    NumericalOverflow(&'static str),
    #[error("requested jet orders (t={t}, x={x}) exceed the supported range (t <= 1, x <= {max_x})")]
    OrderTooHigh { t: usize, x: usize, max_x: usize },
}

/// Scalar ring used when a field is expanded in the coordinates: an x-jet
/// whose coefficients carry a first-order time tangent, over tape variables.
pub type CoordScalar<'t> = Jet<Grad<Var<'t>>>;

/// Builds the coordinate inputs handed to a field expression: `t` constant in
/// x with unit time tangent (when `t_order == 1`), `x` the jet variable.
pub fn coordinate_inputs(
    tape: &Tape,
    point: (f64, f64),
    t_order: usize,
    x_order: usize,
) -> (CoordScalar<'_>, CoordScalar<'_>) {
    let n_tangents = t_order;
    let t_leaf = tape.leaf(point.0);
    let x_leaf = tape.leaf(point.1);
    let t = if t_order == 1 {
        Grad::seed(t_leaf, 1, 0)
    } else {
        Grad::constant(t_leaf, n_tangents)
    };
    let x = Grad::constant(x_leaf, n_tangents);
    (Jet::constant(t, x_order), Jet::variable(x, x_order))
}

/// Value of a scalar field together with its partial derivatives in (t, x):
/// entry `(i, j)` is `d^{i+j} f / dt^i dx^j` at the evaluation point, with
/// `i <= t_order <= 1` and `j <= x_order`. Entries stay attached to the tape,
/// so losses built from them backpropagate to network parameters.
pub struct CoordinateJet<'t> {
    t_order: usize,
    x_order: usize,
    vars: Vec<Var<'t>>,
}

impl<'t> CoordinateJet<'t> {
    pub fn t_order(&self) -> usize {
        self.t_order
    }

    pub fn x_order(&self) -> usize {
        self.x_order
    }

    /// Field value at the point: entry (0, 0).
    pub fn value(&self) -> f64 {
        self.coeff(0, 0)
    }

    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        self.var(i, j).value()
    }

    pub fn var(&self, i: usize, j: usize) -> Var<'t> {
        assert!(i <= self.t_order && j <= self.x_order, "jet entry out of range");
        self.vars[i * (self.x_order + 1) + j]
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Expands `field` around `point` to the requested orders.
///
/// The field is any expression over [`CoordScalar`] values; the result holds
/// exact truncated Taylor data and remains connected to the parameter tape.
pub fn coordinate_jet<'t, F>(
    tape: &'t Tape,
    field: F,
    point: (f64, f64),
    t_order: usize,
    x_order: usize,
) -> Result<CoordinateJet<'t>, DiffError>
where
    F: FnOnce(CoordScalar<'t>, CoordScalar<'t>) -> CoordScalar<'t>,
{
    if t_order > 1 || x_order >= MAX_JET_LEN {
        return Err(DiffError::OrderTooHigh {
            t: t_order,
            x: x_order,
            max_x: MAX_JET_LEN - 1,
        });
    }
    let (t, x) = coordinate_inputs(tape, point, t_order, x_order);
    let out = field(t, x);
    if !out.is_finite() {
        return Err(DiffError::NumericalOverflow("coordinate_jet"));
    }

    let mut vars = Vec::with_capacity((t_order + 1) * (x_order + 1));
    for i in 0..=t_order {
        for j in 0..=x_order {
            let coeff = match i {
                0 => out.coeff(j).re,
                _ => *out.coeff(j).tangent(0),
            };
            let fac = factorial(j);
            vars.push(if fac == 1.0 { coeff } else { coeff.scale(fac) });
        }
    }
    Ok(CoordinateJet {
        t_order,
        x_order,
        vars,
    })
}

/// Contiguous span of parameter leaves on a tape.
#[derive(Clone, Copy, Debug)]
pub struct ParamSpan {
    pub start: usize,
    pub len: usize,
}

/// Gradient of a scalar loss with respect to one network's parameters, laid
/// out to match the network's flat parameter vector.
#[derive(Clone, Debug)]
pub struct ParameterGradient {
    entries: Vec<f64>,
    norm: f64,
    disconnected: bool,
}

impl ParameterGradient {
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// True when the loss had no structural path to the parameters; the
    /// gradient is then the zero vector.
    pub fn disconnected(&self) -> bool {
        self.disconnected
    }
}

/// Exact gradient of `loss` with respect to the parameter span, including
/// paths through coordinate-jet coefficients.
pub fn parameter_gradient(
    tape: &Tape,
    loss: Var<'_>,
    params: ParamSpan,
) -> Result<ParameterGradient, DiffError> {
    if !loss.value().is_finite() {
        return Err(DiffError::NumericalOverflow("parameter_gradient loss"));
    }
    let mut entries = vec![0.0; params.len];
    let mut bp = Backprop::new();
    let connected = bp.accumulate(tape, loss, 1.0, params.start, &mut entries);
    if entries.iter().any(|g| !g.is_finite()) {
        return Err(DiffError::NumericalOverflow("parameter_gradient entries"));
    }
    let norm = entries.iter().map(|g| g * g).sum::<f64>().sqrt();
    Ok(ParameterGradient {
        entries,
        norm,
        disconnected: !connected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn squared_coordinate_field() {
        // f(t, x) = x^2 at (0, 3), orders (0, 2): {(0,0): 9, (0,1): 6, (0,2): 2}
        let tape = Tape::new();
        let jet = coordinate_jet(&tape, |_t, x| x.mul(&x), (0.0, 3.0), 0, 2).unwrap();
        assert_relative_eq!(jet.value(), 9.0);
        assert_relative_eq!(jet.coeff(0, 1), 6.0);
        assert_relative_eq!(jet.coeff(0, 2), 2.0);
    }

    #[test]
    fn constant_field_has_zero_derivatives() {
        let tape = Tape::new();
        let jet = coordinate_jet(&tape, |t, _x| t.constant_like(4.25), (0.3, -1.2), 1, 4).unwrap();
        assert_relative_eq!(jet.value(), 4.25);
        for i in 0..=1 {
            for j in 0..=4 {
                if i + j >= 1 {
                    assert_eq!(jet.coeff(i, j), 0.0, "({i},{j})");
                }
            }
        }
    }

    #[test]
    fn mixed_time_space_derivatives() {
        // f(t, x) = t * x^2: f_t = x^2, f_tx = 2x, f_txx = 2
        let tape = Tape::new();
        let jet = coordinate_jet(&tape, |t, x| t.mul(&x.mul(&x)), (0.5, 3.0), 1, 2).unwrap();
        assert_relative_eq!(jet.value(), 4.5);
        assert_relative_eq!(jet.coeff(1, 0), 9.0);
        assert_relative_eq!(jet.coeff(1, 1), 6.0);
        assert_relative_eq!(jet.coeff(1, 2), 2.0);
        assert_relative_eq!(jet.coeff(0, 1), 3.0);
    }

    #[test]
    fn order_limit_enforced() {
        let tape = Tape::new();
        let r = coordinate_jet(&tape, |t, _x| t, (0.0, 0.0), 2, 0);
        assert!(matches!(r, Err(DiffError::OrderTooHigh { .. })));
    }

    #[test]
    fn gradient_of_w_squared() {
        let tape = Tape::new();
        let w = tape.leaf(3.0);
        let loss = w.mul(w);
        let g = parameter_gradient(&tape, loss, ParamSpan { start: 0, len: 1 }).unwrap();
        assert_relative_eq!(g.entries()[0], 6.0);
        assert!(!g.disconnected());
        assert_relative_eq!(g.norm(), 6.0);
    }

    #[test]
    fn zero_loss_zero_gradient() {
        let tape = Tape::new();
        let w = tape.leaf(3.0);
        let loss = w.sub(w);
        let g = parameter_gradient(&tape, loss, ParamSpan { start: 0, len: 1 }).unwrap();
        assert_eq!(g.entries()[0], 0.0);
        assert!(!g.disconnected());
    }

    #[test]
    fn unrelated_loss_is_disconnected() {
        let tape = Tape::new();
        let _w = tape.leaf(3.0);
        let c = tape.leaf(2.0);
        let loss = c.mul(c);
        let g = parameter_gradient(&tape, loss, ParamSpan { start: 0, len: 1 }).unwrap();
        assert!(g.disconnected());
        assert_eq!(g.entries(), &[0.0]);
    }

    #[test]
    fn jet_coefficients_backpropagate_to_parameters() {
        // f(t, x) = w * x^2: the loss f_xx(= 2w) has gradient 2 w.r.t. w.
        use super::super::scalar::NetScalar;
        let tape = Tape::new();
        let w = tape.leaf(1.5);
        let jet = coordinate_jet(&tape, |_t, x| x.mul(&x).mul_param(w), (0.0, 3.0), 0, 2).unwrap();
        let loss = jet.var(0, 2);
        assert_relative_eq!(loss.value(), 3.0);
        let g = parameter_gradient(&tape, loss, ParamSpan { start: 0, len: 1 }).unwrap();
        assert_relative_eq!(g.entries()[0], 2.0);
        assert!(!g.disconnected());
    }
}
