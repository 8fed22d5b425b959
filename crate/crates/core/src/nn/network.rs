use rand::Rng;
use serde::{Deserialize, Serialize};

use super::dense::{Activation, Dense};
use super::loss::{softmax_into, softmax_xent_into};
use super::lstm::{LstmCell, LstmTrace};
use super::{NnError, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Topology {
    /// Dense head on the current context vector only.
    FeedForward,
    /// Stacked LSTM over the sequence, dense head on the final hidden state.
    Lstm,
    /// As `Lstm`, with the auxiliary vector appended to the final hidden state.
    PersonalizedLstm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetShape {
    pub context: usize,
    pub aux: usize,
    pub hidden: usize,
    pub layers: usize,
    pub head: usize,
    pub classes: usize,
}

impl NetShape {
    pub fn head_input(&self, topology: Topology) -> usize {
        match topology {
            Topology::FeedForward => self.context,
            Topology::Lstm => self.hidden,
            Topology::PersonalizedLstm => self.hidden + self.aux,
        }
    }
}

/// One input: the unmasked steps of a sequence (oldest first, current last)
/// and the auxiliary vector.
#[derive(Debug, Clone, Copy)]
pub struct NetInput<'a, S> {
    pub steps: &'a [S],
    pub aux: &'a [S],
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network<S> {
    pub topology: Topology,
    pub shape: NetShape,
    pub lstm: Vec<LstmCell<S>>,
    pub head: Vec<Dense<S>>,
}

/// Reusable buffers for forward and backward passes.
#[derive(Debug, Clone, Default)]
pub struct Workspace<S> {
    traces: Vec<LstmTrace<S>>,
    head_in: Vec<S>,
    acts: Vec<Vec<S>>,
    probs: Vec<S>,
    grad_a: Vec<S>,
    grad_b: Vec<S>,
    dh: Vec<S>,
    dx: Vec<S>,
}

impl<S: Scalar> Network<S> {
    /// Two ReLU layers of width `shape.head` and a linear output layer.
    pub fn new<R: Rng>(topology: Topology, shape: NetShape, rng: &mut R) -> Self {
        let lstm = match topology {
            Topology::FeedForward => Vec::new(),
            _ => (0..shape.layers)
                .map(|l| LstmCell::new(if l == 0 { shape.context } else { shape.hidden }, shape.hidden, rng))
                .collect(),
        };
        let head = vec![
            Dense::new(shape.head_input(topology), shape.head, Activation::Relu, rng),
            Dense::new(shape.head, shape.head, Activation::Relu, rng),
            Dense::new(shape.head, shape.classes, Activation::Identity, rng),
        ];
        Network { topology, shape, lstm, head }
    }

    pub fn zeros_like(&self) -> Self {
        Network {
            topology: self.topology,
            shape: self.shape,
            lstm: self.lstm.iter().map(LstmCell::zeros_like).collect(),
            head: self.head.iter().map(Dense::zeros_like).collect(),
        }
    }

    /// Parameter blocks in a fixed order with stable names.
    pub fn blocks(&self) -> Vec<(String, &[S])> {
        let mut out: Vec<(String, &[S])> = Vec::new();
        for (l, c) in self.lstm.iter().enumerate() {
            out.push((format!("lstm{l}.w"), c.w.data()));
            out.push((format!("lstm{l}.b"), &c.b));
        }
        for (j, d) in self.head.iter().enumerate() {
            out.push((format!("dense{j}.w"), d.w.data()));
            out.push((format!("dense{j}.b"), &d.b));
        }
        out
    }

    pub fn blocks_mut(&mut self) -> Vec<&mut [S]> {
        let mut out: Vec<&mut [S]> = Vec::new();
        for c in self.lstm.iter_mut() {
            out.push(c.w.data_mut());
            out.push(&mut c.b);
        }
        for d in self.head.iter_mut() {
            out.push(d.w.data_mut());
            out.push(&mut d.b);
        }
        out
    }

    pub fn parameter_count(&self) -> usize {
        self.blocks().iter().map(|(_, b)| b.len()).sum()
    }

    pub fn fill_zero(&mut self) {
        for b in self.blocks_mut() {
            b.iter_mut().for_each(|v| *v = S::zero());
        }
    }

    pub fn all_finite(&self) -> bool {
        self.blocks().iter().all(|(_, b)| b.iter().all(|v| v.is_finite()))
    }

    pub fn cast<T: Scalar>(&self) -> Network<T> {
        Network {
            topology: self.topology,
            shape: self.shape,
            lstm: self.lstm.iter().map(LstmCell::cast).collect(),
            head: self.head.iter().map(Dense::cast).collect(),
        }
    }

    pub fn check_input(&self, input: &NetInput<'_, S>) -> Result<(), NnError> {
        let c = self.shape.context;
        if input.steps.is_empty() || input.steps.len() % c != 0 {
            return Err(NnError::ShapeMismatch { what: "sequence steps", expected: c, found: input.steps.len() });
        }
        if self.topology == Topology::PersonalizedLstm && input.aux.len() != self.shape.aux {
            return Err(NnError::ShapeMismatch { what: "aux vector", expected: self.shape.aux, found: input.aux.len() });
        }
        Ok(())
    }

    fn forward(&self, input: &NetInput<'_, S>, ws: &mut Workspace<S>) {
        let (c, h) = (self.shape.context, self.shape.hidden);
        let steps = input.steps.len() / c;
        ws.head_in.clear();
        match self.topology {
            Topology::FeedForward => ws.head_in.extend_from_slice(&input.steps[(steps - 1) * c..]),
            Topology::Lstm | Topology::PersonalizedLstm => {
                ws.traces.resize_with(self.lstm.len(), LstmTrace::default);
                for (l, cell) in self.lstm.iter().enumerate() {
                    let (below, here) = ws.traces.split_at_mut(l);
                    let xs = if l == 0 { input.steps } else { below[l - 1].h_all() };
                    cell.unroll(xs, &mut here[0]);
                }
                let top = ws.traces.last().expect("at least one layer");
                ws.head_in.extend_from_slice(top.h(steps - 1, h));
                if self.topology == Topology::PersonalizedLstm {
                    ws.head_in.extend_from_slice(input.aux);
                }
            }
        }
        ws.acts.resize_with(self.head.len(), Vec::new);
        for (j, layer) in self.head.iter().enumerate() {
            let (before, here) = ws.acts.split_at_mut(j);
            let x = if j == 0 { &ws.head_in } else { &before[j - 1] };
            here[0].resize(layer.outputs(), S::zero());
            layer.forward_into(x, &mut here[0]);
        }
    }

    /// Raw class scores.
    pub fn logits(&self, input: &NetInput<'_, S>, ws: &mut Workspace<S>) -> Result<Vec<S>, NnError> {
        self.check_input(input)?;
        self.forward(input, ws);
        Ok(ws.acts.last().expect("head layers").clone())
    }

    /// Class probabilities in working precision.
    pub fn probabilities(&self, input: &NetInput<'_, S>, ws: &mut Workspace<S>) -> Result<Vec<S>, NnError> {
        let logits = self.logits(input, ws)?;
        let mut p = vec![S::zero(); logits.len()];
        softmax_into(&logits, &mut p);
        Ok(p)
    }

    /// Cross-entropy loss of one input; its gradients are added into `grad`.
    pub fn accumulate_gradient(
        &self,
        input: &NetInput<'_, S>,
        target: usize,
        ws: &mut Workspace<S>,
        grad: &mut Network<S>,
    ) -> Result<S, NnError> {
        self.check_input(input)?;
        self.forward(input, ws);
        let classes = self.shape.classes;
        ws.probs.resize(classes, S::zero());
        ws.grad_a.resize(classes, S::zero());
        let loss = softmax_xent_into(ws.acts.last().expect("head layers"), target, &mut ws.probs, &mut ws.grad_a);

        let need_head_dx = self.topology != Topology::FeedForward;
        for j in (0..self.head.len()).rev() {
            let x = if j == 0 { &ws.head_in } else { &ws.acts[j - 1] };
            let want_dx = j > 0 || need_head_dx;
            ws.grad_b.clear();
            ws.grad_b.resize(if want_dx { x.len() } else { 0 }, S::zero());
            let dx = if want_dx { Some(&mut ws.grad_b[..]) } else { None };
            self.head[j].backward_into(x, &ws.acts[j], &mut ws.grad_a, dx, &mut grad.head[j]);
            std::mem::swap(&mut ws.grad_a, &mut ws.grad_b);
        }
        if need_head_dx {
            // ws.grad_a now holds the gradient with respect to the head input
            let (c, h) = (self.shape.context, self.shape.hidden);
            let steps = input.steps.len() / c;
            ws.dh.clear();
            ws.dh.resize(steps * h, S::zero());
            ws.dh[(steps - 1) * h..].copy_from_slice(&ws.grad_a[..h]);
            for l in (0..self.lstm.len()).rev() {
                let trace = &ws.traces[l];
                if l > 0 {
                    ws.dx.clear();
                    ws.dx.resize(steps * self.lstm[l].input_size(), S::zero());
                    self.lstm[l].backprop(trace, &ws.dh, Some(&mut ws.dx), &mut grad.lstm[l]);
                    std::mem::swap(&mut ws.dh, &mut ws.dx);
                } else {
                    self.lstm[l].backprop(trace, &ws.dh, None, &mut grad.lstm[l]);
                }
            }
        }
        Ok(loss)
    }

    /// Loss only, without touching gradients.
    pub fn loss(&self, input: &NetInput<'_, S>, target: usize, ws: &mut Workspace<S>) -> Result<S, NnError> {
        self.check_input(input)?;
        self.forward(input, ws);
        let classes = self.shape.classes;
        ws.probs.resize(classes, S::zero());
        ws.grad_a.resize(classes, S::zero());
        Ok(softmax_xent_into(ws.acts.last().expect("head layers"), target, &mut ws.probs, &mut ws.grad_a))
    }
}
