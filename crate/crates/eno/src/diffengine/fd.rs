//! Central finite-difference checks against engine derivatives.
//!
//! The comparisons here are the project's standing cross-check: everything
//! the jets and the tape produce must agree with difference quotients of the
//! plain `f64` evaluation path.

use super::coord::CoordinateJet;

/// Central 5-point stencils for derivative orders 0..=4.
pub fn central_derivative(f: impl Fn(f64) -> f64, x: f64, order: usize, h: f64) -> f64 {
    assert!(h > 0.0, "finite-difference step must be positive");
    let fm2 = f(x - 2.0 * h);
    let fm1 = f(x - h);
    let f0 = f(x);
    let fp1 = f(x + h);
    let fp2 = f(x + 2.0 * h);
    match order {
        0 => f0,
        1 => (-fp2 + 8.0 * fp1 - 8.0 * fm1 + fm2) / (12.0 * h),
        2 => (-fp2 + 16.0 * fp1 - 30.0 * f0 + 16.0 * fm1 - fm2) / (12.0 * h * h),
        3 => (fp2 - 2.0 * fp1 + 2.0 * fm1 - fm2) / (2.0 * h * h * h),
        4 => (fp2 - 4.0 * fp1 + 6.0 * f0 - 4.0 * fm1 + fm2) / (h * h * h * h),
        _ => panic!("central stencils implemented up to order 4"),
    }
}

/// |a - b| relative to |b|, floored so near-zero references compare absolutely.
pub fn relative_deviation(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / b.abs().max(floor)
}

/// Report from one finite-difference sweep.
#[derive(Clone, Copy, Debug)]
pub struct FdReport {
    pub max_rel: f64,
    pub worst_entry: (usize, usize),
}

/// Steps for [`fd_jet_check`]. Spatial orders >= 4 need a wider stencil:
/// at step 1e-3 the fourth difference quotient loses ~3 decimal digits to
/// rounding, so `h_x_high` trades truncation error for roundoff.
#[derive(Clone, Copy, Debug)]
pub struct FdSteps {
    pub h_t: f64,
    pub h_x: f64,
    pub h_x_high: f64,
}

impl Default for FdSteps {
    fn default() -> Self {
        Self {
            h_t: 1e-3,
            h_x: 1e-3,
            h_x_high: 5e-3,
        }
    }
}

/// Compares a coordinate jet against central finite differences of the plain
/// evaluation `f(t, x)` on the entries the gradient flow consumes: the time
/// derivative `(1, 0)` and every pure spatial derivative `(0, j)`.
///
/// Mixed entries `(1, j >= 1)` are excluded on purpose: nested difference
/// quotients cannot resolve them to the tolerances this harness certifies,
/// and the jet algebra tests pin them exactly on polynomial fields.
pub fn fd_jet_check(
    f: impl Fn(f64, f64) -> f64,
    point: (f64, f64),
    jet: &CoordinateJet<'_>,
    steps: FdSteps,
) -> FdReport {
    let mut report = FdReport {
        max_rel: 0.0,
        worst_entry: (0, 0),
    };
    let mut record = |entry: (usize, usize), engine: f64, fd: f64| {
        let rel = relative_deviation(engine, fd, 1.0);
        if rel > report.max_rel {
            report.max_rel = rel;
            report.worst_entry = entry;
        }
    };
    for j in 0..=jet.x_order() {
        let h = if j >= 4 { steps.h_x_high } else { steps.h_x };
        let fd = central_derivative(|x| f(point.0, x), point.1, j, h);
        record((0, j), jet.coeff(0, j), fd);
    }
    if jet.t_order() >= 1 {
        let fd = central_derivative(|t| f(t, point.1), point.0, 1, steps.h_t);
        record((1, 0), jet.coeff(1, 0), fd);
    }
    report
}

/// Per-parameter central differences of a scalar loss.
pub fn fd_gradient(loss: impl Fn(&[f64]) -> f64, params: &[f64], h: f64) -> Vec<f64> {
    assert!(h > 0.0, "finite-difference step must be positive");
    let mut scratch = params.to_vec();
    (0..params.len())
        .map(|i| {
            let p0 = params[i];
            scratch[i] = p0 + h;
            let up = loss(&scratch);
            scratch[i] = p0 - h;
            let down = loss(&scratch);
            scratch[i] = p0;
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// Maximum relative deviation between an engine gradient and its
/// finite-difference counterpart.
pub fn max_gradient_deviation(engine: &[f64], fd: &[f64], floor: f64) -> f64 {
    assert_eq!(engine.len(), fd.len());
    engine
        .iter()
        .zip(fd.iter())
        .map(|(&a, &b)| relative_deviation(a, b, floor))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::super::coord::coordinate_jet;
    use super::super::scalar::Scalar;
    use super::super::tape::Tape;
    use super::*;

    #[test]
    fn tanh_first_derivative() {
        // tanh'(0.5) = 1 - tanh(0.5)^2; analytic value of tanh(0.5) frozen below.
        let t = 0.46211715726000975850_f64;
        let fd = central_derivative(f64::tanh, 0.5, 1, 1e-4);
        assert!(relative_deviation(fd, 1.0 - t * t, 1.0) <= 1e-7);
    }

    #[test]
    fn linear_field_is_exact() {
        let fd = central_derivative(|x| 3.0 * x + 1.0, 0.3, 1, 1e-4);
        assert!((fd - 3.0).abs() <= 1e-10);
    }

    #[test]
    fn jet_check_on_product_field() {
        let tape = Tape::new();
        let f = |t: f64, x: f64| (t * x).tanh() + x * x;
        let jet = coordinate_jet(
            &tape,
            |t, x| t.mul(&x).tanh().add(&x.mul(&x)),
            (0.4, 0.8),
            1,
            3,
        )
        .unwrap();
        let report = fd_jet_check(f, (0.4, 0.8), &jet, FdSteps::default());
        assert!(report.max_rel <= 1e-7, "max_rel = {}", report.max_rel);
    }

    #[test]
    fn fd_gradient_of_quadratic() {
        let grad = fd_gradient(|p| p[0] * p[0] + 2.0 * p[1], &[3.0, 1.0], 1e-6);
        assert!((grad[0] - 6.0).abs() < 1e-8);
        assert!((grad[1] - 2.0).abs() < 1e-8);
    }
}
