use rand::Rng;

use super::{axpy, dot, sigmoid, NnError, Scalar, Tensor2};

/// One LSTM layer. The four gate blocks (input, forget, cell, output) are
/// stacked row-wise into a single 4H × (D + H) matrix acting on `[x; h]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmCell<S> {
    pub w: Tensor2<S>,
    pub b: Vec<S>,
    input: usize,
    hidden: usize,
}

/// Forward values of one unrolled sequence, kept for backpropagation.
#[derive(Debug, Clone, Default)]
pub struct LstmTrace<S> {
    steps: usize,
    /// `[x_t; h_{t-1}]` per step.
    z: Vec<S>,
    /// Activated gates `i, f, g, o` per step.
    gates: Vec<S>,
    c: Vec<S>,
    tanh_c: Vec<S>,
    h: Vec<S>,
}

impl<S: Scalar> LstmTrace<S> {
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn h(&self, t: usize, hidden: usize) -> &[S] {
        &self.h[t * hidden..(t + 1) * hidden]
    }

    pub fn h_all(&self) -> &[S] {
        &self.h
    }

    pub fn c(&self, t: usize, hidden: usize) -> &[S] {
        &self.c[t * hidden..(t + 1) * hidden]
    }
}

impl<S: Scalar> LstmCell<S> {
    /// Fan-in scaled uniform weights; forget-gate bias 1, other biases 0.
    pub fn new<R: Rng>(input: usize, hidden: usize, rng: &mut R) -> Self {
        let limit = 1.0 / (hidden as f64).sqrt();
        let mut b = vec![S::zero(); 4 * hidden];
        b[hidden..2 * hidden].iter_mut().for_each(|v| *v = S::one());
        LstmCell { w: Tensor2::uniform(4 * hidden, input + hidden, limit, rng), b, input, hidden }
    }

    pub fn from_parts(input: usize, hidden: usize, w: Tensor2<S>, b: Vec<S>) -> Result<Self, NnError> {
        if w.shape() != (4 * hidden, input + hidden) {
            return Err(NnError::ShapeMismatch {
                what: "lstm weights",
                expected: 4 * hidden * (input + hidden),
                found: w.rows() * w.cols(),
            });
        }
        if b.len() != 4 * hidden {
            return Err(NnError::ShapeMismatch { what: "lstm bias", expected: 4 * hidden, found: b.len() });
        }
        Ok(LstmCell { w, b, input, hidden })
    }

    pub fn input_size(&self) -> usize {
        self.input
    }

    pub fn hidden_size(&self) -> usize {
        self.hidden
    }

    pub fn zeros_like(&self) -> Self {
        LstmCell {
            w: Tensor2::zeros(self.w.rows(), self.w.cols()),
            b: vec![S::zero(); self.b.len()],
            input: self.input,
            hidden: self.hidden,
        }
    }

    /// A single step: returns `(h_t, c_t)`.
    pub fn step(&self, x: &[S], h_prev: &[S], c_prev: &[S]) -> Result<(Vec<S>, Vec<S>), NnError> {
        let h = self.hidden;
        for (what, v, n) in [("lstm input", x, self.input), ("lstm h_prev", h_prev, h), ("lstm c_prev", c_prev, h)] {
            if v.len() != n {
                return Err(NnError::ShapeMismatch { what, expected: n, found: v.len() });
            }
        }
        let mut z = x.to_vec();
        z.extend_from_slice(h_prev);
        let mut gates = vec![S::zero(); 4 * h];
        let mut c = vec![S::zero(); h];
        let mut tanh_c = vec![S::zero(); h];
        let mut h_out = vec![S::zero(); h];
        self.cell(&z, c_prev, &mut gates, &mut c, &mut tanh_c, &mut h_out);
        Ok((h_out, c))
    }

    #[inline]
    fn cell(&self, z: &[S], c_prev: &[S], gates: &mut [S], c: &mut [S], tanh_c: &mut [S], h_out: &mut [S]) {
        let h = self.hidden;
        for (r, g) in gates.iter_mut().enumerate() {
            let a = dot(self.w.row(r), z) + self.b[r];
            *g = if r / h == 2 { a.tanh() } else { sigmoid(a) };
        }
        for k in 0..h {
            let (i, f, g, o) = (gates[k], gates[h + k], gates[2 * h + k], gates[3 * h + k]);
            c[k] = f * c_prev[k] + i * g;
            tanh_c[k] = c[k].tanh();
            h_out[k] = o * tanh_c[k];
        }
    }

    /// Runs the layer over `xs` (steps × D, row-major) from a zero state.
    pub fn unroll(&self, xs: &[S], trace: &mut LstmTrace<S>) {
        let (d, h) = (self.input, self.hidden);
        let steps = xs.len() / d;
        debug_assert_eq!(steps * d, xs.len());
        trace.steps = steps;
        trace.z.resize(steps * (d + h), S::zero());
        trace.gates.resize(steps * 4 * h, S::zero());
        trace.c.resize(steps * h, S::zero());
        trace.tanh_c.resize(steps * h, S::zero());
        trace.h.resize(steps * h, S::zero());
        let zero = vec![S::zero(); h];
        for t in 0..steps {
            let z = &mut trace.z[t * (d + h)..(t + 1) * (d + h)];
            z[..d].copy_from_slice(&xs[t * d..(t + 1) * d]);
            if t == 0 {
                z[d..].copy_from_slice(&zero);
            } else {
                z[d..].copy_from_slice(&trace.h[(t - 1) * h..t * h]);
            }
            let (c_before, c_rest) = trace.c.split_at_mut(t * h);
            let c_prev: &[S] = if t == 0 { &zero } else { &c_before[(t - 1) * h..] };
            self.cell(
                &trace.z[t * (d + h)..(t + 1) * (d + h)],
                c_prev,
                &mut trace.gates[t * 4 * h..(t + 1) * 4 * h],
                &mut c_rest[..h],
                &mut trace.tanh_c[t * h..(t + 1) * h],
                &mut trace.h[t * h..(t + 1) * h],
            );
        }
    }

    /// Backpropagation through time. `dh_out` holds the loss gradient with
    /// respect to each step's output (steps × H); parameter gradients are
    /// accumulated into `grad`, and input gradients written to `dx` when given.
    pub fn backprop(&self, trace: &LstmTrace<S>, dh_out: &[S], mut dx: Option<&mut [S]>, grad: &mut LstmCell<S>) {
        let (d, h) = (self.input, self.hidden);
        let mut dh_next = vec![S::zero(); h];
        let mut dc_next = vec![S::zero(); h];
        let mut da = vec![S::zero(); 4 * h];
        let mut dz = vec![S::zero(); d + h];
        let one = S::one();
        for t in (0..trace.steps).rev() {
            let gates = &trace.gates[t * 4 * h..(t + 1) * 4 * h];
            let tanh_c = &trace.tanh_c[t * h..(t + 1) * h];
            for k in 0..h {
                let (i, f, g, o) = (gates[k], gates[h + k], gates[2 * h + k], gates[3 * h + k]);
                let c_prev = if t == 0 { S::zero() } else { trace.c[(t - 1) * h + k] };
                let dh = dh_out[t * h + k] + dh_next[k];
                let dc = dh * o * (one - tanh_c[k] * tanh_c[k]) + dc_next[k];
                da[k] = dc * g * i * (one - i);
                da[h + k] = dc * c_prev * f * (one - f);
                da[2 * h + k] = dc * i * (one - g * g);
                da[3 * h + k] = dh * tanh_c[k] * o * (one - o);
                dc_next[k] = dc * f;
            }
            let z = &trace.z[t * (d + h)..(t + 1) * (d + h)];
            dz.iter_mut().for_each(|v| *v = S::zero());
            for (r, &a) in da.iter().enumerate() {
                axpy(a, z, grad.w.row_mut(r));
                grad.b[r] += a;
                axpy(a, self.w.row(r), &mut dz);
            }
            dh_next.copy_from_slice(&dz[d..]);
            if let Some(dx) = dx.as_deref_mut() {
                dx[t * d..(t + 1) * d].copy_from_slice(&dz[..d]);
            }
        }
    }

    pub fn cast<T: Scalar>(&self) -> LstmCell<T> {
        LstmCell {
            w: self.w.cast(),
            b: self.b.iter().map(|v| T::lit(v.as_f64())).collect(),
            input: self.input,
            hidden: self.hidden,
        }
    }
}
