//! Reverse-accumulation tape for parameter gradients.
//!
//! The tape is a Wengert list: every scalar operation appends one node
//! recording its parents and the local partial derivatives. A [`Var`] is a
//! copyable handle carrying its own primal value, so forward arithmetic never
//! reads the tape back; the tape is written once on the way forward and read
//! once on the way back. One tape is confined to one thread; parallel work
//! uses one tape per worker.

use std::cell::RefCell;

const NONE: u32 = u32::MAX;

#[derive(Clone, Copy)]
struct Node {
    parents: [u32; 2],
    partials: [f64; 2],
}

/// Recording context for one forward/backward pass.
#[derive(Default)]
pub struct Tape {
    nodes: RefCell<Vec<Node>>,
}

/// Handle to a recorded scalar on a [`Tape`].
#[derive(Clone, Copy)]
pub struct Var<'t> {
    tape: &'t Tape,
    idx: u32,
    value: f64,
}

/// Position marker used to rewind the tape between loss terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TapeMark(usize);

impl Tape {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(n: usize) -> Self {
        Self {
            nodes: RefCell::new(Vec::with_capacity(n)),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.borrow().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Records an input leaf (parameter or constant).
    pub fn leaf(&self, value: f64) -> Var<'_> {
        let idx = self.push([NONE, NONE], [0.0, 0.0]);
        Var {
            tape: self,
            idx,
            value,
        }
    }

    /// Records one leaf per entry of `values`, in order.
    pub fn leaves(&self, values: &[f64]) -> Vec<Var<'_>> {
        values.iter().map(|&v| self.leaf(v)).collect()
    }

    pub fn mark(&self) -> TapeMark {
        TapeMark(self.len())
    }

    /// Drops every node recorded after `mark`. Handles taken after the mark
    /// keep their values but must not be fed into further tape arithmetic;
    /// callers only rewind past throwaway subgraphs.
    pub fn rewind(&self, mark: TapeMark) {
        self.nodes.borrow_mut().truncate(mark.0);
    }

    pub fn value(&self, var: Var<'_>) -> f64 {
        var.value
    }

    #[inline]
    fn push(&self, parents: [u32; 2], partials: [f64; 2]) -> u32 {
        let mut nodes = self.nodes.borrow_mut();
        let idx = nodes.len() as u32;
        nodes.push(Node { parents, partials });
        idx
    }
}

impl<'t> Var<'t> {
    #[inline]
    pub fn value(self) -> f64 {
        self.value
    }

    pub fn index(self) -> usize {
        self.idx as usize
    }

    pub fn tape(self) -> &'t Tape {
        self.tape
    }

    pub fn constant(self, c: f64) -> Var<'t> {
        self.tape.leaf(c)
    }

    #[inline]
    fn unary(self, value: f64, da: f64) -> Var<'t> {
        let idx = self.tape.push([self.idx, NONE], [da, 0.0]);
        Var {
            tape: self.tape,
            idx,
            value,
        }
    }

    #[inline]
    fn binary(self, o: Var<'t>, value: f64, da: f64, db: f64) -> Var<'t> {
        let idx = self.tape.push([self.idx, o.idx], [da, db]);
        Var {
            tape: self.tape,
            idx,
            value,
        }
    }

    #[inline]
    pub fn add(self, o: Var<'t>) -> Var<'t> {
        self.binary(o, self.value + o.value, 1.0, 1.0)
    }

    #[inline]
    pub fn sub(self, o: Var<'t>) -> Var<'t> {
        self.binary(o, self.value - o.value, 1.0, -1.0)
    }

    #[inline]
    pub fn mul(self, o: Var<'t>) -> Var<'t> {
        self.binary(o, self.value * o.value, o.value, self.value)
    }

    /// Fused multiply-accumulate with a coordinate-constant coefficient:
    /// `self + c * o` in one node.
    #[inline]
    pub fn mul_const_add(self, c: f64, o: Var<'t>) -> Var<'t> {
        self.binary(o, self.value + c * o.value, 1.0, c)
    }

    #[inline]
    pub fn neg(self) -> Var<'t> {
        self.unary(-self.value, -1.0)
    }

    /// Multiplication by a plain constant (single-parent node).
    #[inline]
    pub fn scale(self, c: f64) -> Var<'t> {
        self.unary(self.value * c, c)
    }

    #[inline]
    pub fn add_const(self, c: f64) -> Var<'t> {
        self.unary(self.value + c, 1.0)
    }

    pub fn tanh(self) -> Var<'t> {
        let t = self.value.tanh();
        self.unary(t, 1.0 - t * t)
    }

    pub fn sin(self) -> Var<'t> {
        self.unary(self.value.sin(), self.value.cos())
    }

    pub fn cos(self) -> Var<'t> {
        self.unary(self.value.cos(), -self.value.sin())
    }

    pub fn powi(self, n: u32) -> Var<'t> {
        match n {
            0 => self.tape.leaf(1.0),
            _ => self.unary(
                self.value.powi(n as i32),
                f64::from(n) * self.value.powi(n as i32 - 1),
            ),
        }
    }
}

/// Reusable buffers for reverse sweeps.
///
/// Gradients of many small loss terms are accumulated one backward pass at a
/// time; reusing the adjoint buffer keeps each pass allocation-free.
#[derive(Default)]
pub struct Backprop {
    adjoints: Vec<f64>,
    visited: Vec<bool>,
}

impl Backprop {
    pub fn new() -> Self {
        Self::default()
    }

    fn sweep(&mut self, tape: &Tape, seed: Var<'_>) {
        let nodes = tape.nodes.borrow();
        let n = seed.idx as usize + 1;
        debug_assert!(n <= nodes.len());

        self.adjoints.clear();
        self.adjoints.resize(n, 0.0);
        self.visited.clear();
        self.visited.resize(n, false);
        self.adjoints[n - 1] = 1.0;
        self.visited[n - 1] = true;

        for i in (0..n).rev() {
            if !self.visited[i] {
                continue;
            }
            let a = self.adjoints[i];
            let node = nodes[i];
            for k in 0..2 {
                let p = node.parents[k];
                if p != NONE {
                    let p = p as usize;
                    self.visited[p] = true;
                    self.adjoints[p] += node.partials[k] * a;
                }
            }
        }
    }

    fn extract(&self, scale: f64, start: usize, grad_out: &mut [f64]) -> bool {
        let n = self.adjoints.len();
        let mut connected = false;
        for (i, g) in grad_out.iter_mut().enumerate() {
            let idx = start + i;
            if idx < n {
                connected |= self.visited[idx];
                *g += scale * self.adjoints[idx];
            }
        }
        connected
    }

    /// Runs one reverse sweep from `seed` and adds `scale * d(seed)/d(node_{start+i})`
    /// into `grad_out[i]`. The target nodes are the lifted parameters, recorded
    /// as a contiguous span. Returns `true` when the sweep structurally reached
    /// at least one node in that span.
    pub fn accumulate(
        &mut self,
        tape: &Tape,
        seed: Var<'_>,
        scale: f64,
        start: usize,
        grad_out: &mut [f64],
    ) -> bool {
        self.sweep(tape, seed);
        self.extract(scale, start, grad_out)
    }

    /// One sweep feeding two parameter spans (both trained networks at once).
    pub fn accumulate_pair(
        &mut self,
        tape: &Tape,
        seed: Var<'_>,
        scale: f64,
        first: (usize, &mut [f64]),
        second: (usize, &mut [f64]),
    ) {
        self.sweep(tape, seed);
        self.extract(scale, first.0, first.1);
        self.extract(scale, second.0, second.1);
    }

    /// Full adjoint vector of `seed` with respect to every node at or below
    /// it. Mostly useful in tests and diagnostics.
    pub fn adjoints(&mut self, tape: &Tape, seed: Var<'_>) -> Vec<f64> {
        let len = tape.len();
        let mut out = vec![0.0; len];
        self.accumulate(tape, seed, 1.0, 0, &mut out);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn records_and_evaluates() {
        let tape = Tape::new();
        let x = tape.leaf(3.0);
        let y = x.mul(x);
        assert_eq!(y.value(), 9.0);
        assert_eq!(tape.len(), 2);
    }

    #[test]
    fn gradient_of_square() {
        // d(w^2)/dw = 2w = 6 at w = 3
        let tape = Tape::new();
        let w = tape.leaf(3.0);
        let loss = w.mul(w);
        let mut bp = Backprop::new();
        let mut grad = vec![0.0];
        let connected = bp.accumulate(&tape, loss, 1.0, 0, &mut grad);
        assert!(connected);
        assert_relative_eq!(grad[0], 6.0);
    }

    #[test]
    fn gradient_through_tanh_chain() {
        let tape = Tape::new();
        let w = tape.leaf(0.5);
        let y = w.tanh().mul(w);
        let mut bp = Backprop::new();
        let mut grad = vec![0.0];
        bp.accumulate(&tape, y, 1.0, 0, &mut grad);
        let t = 0.5_f64.tanh();
        assert_relative_eq!(grad[0], t + 0.5 * (1.0 - t * t), epsilon = 1e-14);
    }

    #[test]
    fn disconnected_loss_flagged() {
        let tape = Tape::new();
        let _w = tape.leaf(2.0);
        let c = tape.leaf(1.0);
        let loss = c.mul(c);
        let mut bp = Backprop::new();
        let mut grad = vec![0.0];
        let connected = bp.accumulate(&tape, loss, 1.0, 0, &mut grad);
        assert!(!connected);
        assert_eq!(grad[0], 0.0);
    }

    #[test]
    fn rewind_discards_scratch_nodes() {
        let tape = Tape::new();
        let w = tape.leaf(1.5);
        let mark = tape.mark();
        for _ in 0..10 {
            let y = w.tanh().mul(w);
            let mut bp = Backprop::new();
            let mut grad = vec![0.0];
            bp.accumulate(&tape, y, 1.0, 0, &mut grad);
            tape.rewind(mark);
        }
        assert_eq!(tape.len(), 1);
    }

    #[test]
    fn scale_accumulates_weighted_gradients() {
        let tape = Tape::new();
        let w = tape.leaf(2.0);
        let mut grad = vec![0.0];
        let mut bp = Backprop::new();
        let y1 = w.mul(w);
        bp.accumulate(&tape, y1, 0.5, 0, &mut grad);
        let y2 = w.scale(3.0);
        bp.accumulate(&tape, y2, 1.0, 0, &mut grad);
        // 0.5 * 2w + 3 = 5 at w = 2
        assert_relative_eq!(grad[0], 5.0);
    }

    #[test]
    fn fused_mul_const_add_matches_separate_ops() {
        let tape = Tape::new();
        let a = tape.leaf(1.5);
        let x = tape.leaf(-0.7);
        let fused = a.mul_const_add(2.5, x);
        assert_relative_eq!(fused.value(), 1.5 + 2.5 * -0.7);
        let mut bp = Backprop::new();
        let mut grad = vec![0.0, 0.0];
        bp.accumulate(&tape, fused, 1.0, 0, &mut grad);
        assert_relative_eq!(grad[0], 1.0);
        assert_relative_eq!(grad[1], 2.5);
    }

    #[test]
    fn pair_accumulation_matches_two_sweeps() {
        let tape = Tape::new();
        let w1 = tape.leaf(0.8);
        let w2 = tape.leaf(-1.2);
        let loss = w1.mul(w2).tanh();
        let mut bp = Backprop::new();
        let (mut a1, mut a2) = (vec![0.0], vec![0.0]);
        bp.accumulate_pair(&tape, loss, 2.0, (0, &mut a1), (1, &mut a2));
        let (mut b1, mut b2) = (vec![0.0], vec![0.0]);
        bp.accumulate(&tape, loss, 2.0, 0, &mut b1);
        bp.accumulate(&tape, loss, 2.0, 1, &mut b2);
        assert_eq!(a1, b1);
        assert_eq!(a2, b2);
    }
}
