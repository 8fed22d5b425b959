use serde::Serialize;

use super::dense::Dense;
use super::lstm::{LstmCell, LstmTrace};
use super::network::{NetInput, Network, Workspace};

/// A scalar function of named parameter blocks with an analytic gradient.
pub trait Objective {
    fn blocks(&self) -> Vec<(String, usize)>;
    fn param_mut(&mut self, block: usize, index: usize) -> &mut f64;
    fn loss(&self) -> f64;
    /// Analytic gradient, one vector per block in `blocks()` order.
    fn gradient(&self) -> Vec<Vec<f64>>;
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockCheck {
    pub name: String,
    pub checked: usize,
    pub max_rel_error: f64,
    pub max_abs_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradCheckReport {
    pub epsilon: f64,
    pub tolerance: f64,
    pub max_rel_error: f64,
    pub blocks: Vec<BlockCheck>,
    /// Blocks whose error exceeds the tolerance.
    pub failing: Vec<String>,
}

impl GradCheckReport {
    pub fn passed(&self) -> bool {
        self.failing.is_empty()
    }

    pub fn checked(&self) -> usize {
        self.blocks.iter().map(|b| b.checked).sum()
    }
}

/// Gradients smaller than this are compared on an absolute scale.
pub const REL_ERROR_FLOOR: f64 = 1e-5;

pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(REL_ERROR_FLOOR)
}

/// Compares analytic gradients against central differences. With
/// `per_block = Some(k)`, at most `k` evenly strided entries of each block are
/// checked; otherwise every entry is.
pub fn gradient_check<O: Objective>(obj: &mut O, epsilon: f64, tolerance: f64, per_block: Option<usize>) -> GradCheckReport {
    let analytic = obj.gradient();
    let mut blocks = Vec::new();
    for (bi, (name, len)) in obj.blocks().into_iter().enumerate() {
        let stride = match per_block {
            Some(k) if k > 0 && len > k => len.div_ceil(k),
            _ => 1,
        };
        let mut check = BlockCheck { name, checked: 0, max_rel_error: 0.0, max_abs_error: 0.0 };
        for i in (0..len).step_by(stride) {
            let orig = *obj.param_mut(bi, i);
            *obj.param_mut(bi, i) = orig + epsilon;
            let up = obj.loss();
            *obj.param_mut(bi, i) = orig - epsilon;
            let down = obj.loss();
            *obj.param_mut(bi, i) = orig;
            let numeric = (up - down) / (2.0 * epsilon);
            let a = analytic[bi][i];
            check.checked += 1;
            check.max_abs_error = check.max_abs_error.max((a - numeric).abs());
            check.max_rel_error = check.max_rel_error.max(relative_error(a, numeric));
        }
        blocks.push(check);
    }
    let max_rel_error = blocks.iter().map(|b| b.max_rel_error).fold(0.0, f64::max);
    let failing = blocks.iter().filter(|b| !(b.max_rel_error < tolerance)).map(|b| b.name.clone()).collect();
    GradCheckReport { epsilon, tolerance, max_rel_error, blocks, failing }
}

/// A dense layer under the loss `r · layer(x)`, with `x` as a block too.
pub struct DenseObjective {
    pub layer: Dense<f64>,
    pub x: Vec<f64>,
    pub r: Vec<f64>,
}

impl Objective for DenseObjective {
    fn blocks(&self) -> Vec<(String, usize)> {
        vec![("w".into(), self.layer.w.data().len()), ("b".into(), self.layer.b.len()), ("x".into(), self.x.len())]
    }

    fn param_mut(&mut self, block: usize, index: usize) -> &mut f64 {
        match block {
            0 => &mut self.layer.w.data_mut()[index],
            1 => &mut self.layer.b[index],
            _ => &mut self.x[index],
        }
    }

    fn loss(&self) -> f64 {
        let y = self.layer.forward(&self.x).expect("shapes fixed at construction");
        y.iter().zip(&self.r).map(|(a, b)| a * b).sum()
    }

    fn gradient(&self) -> Vec<Vec<f64>> {
        let g = self.layer.backward(&self.x, &self.r).expect("shapes fixed at construction");
        vec![g.dw.data().to_vec(), g.db, g.dx]
    }
}

/// An LSTM layer unrolled over `xs` under the loss `Σ_t r_t · h_t`.
pub struct LstmObjective {
    pub cell: LstmCell<f64>,
    pub xs: Vec<f64>,
    pub r: Vec<f64>,
}

impl Objective for LstmObjective {
    fn blocks(&self) -> Vec<(String, usize)> {
        vec![("w".into(), self.cell.w.data().len()), ("b".into(), self.cell.b.len()), ("x".into(), self.xs.len())]
    }

    fn param_mut(&mut self, block: usize, index: usize) -> &mut f64 {
        match block {
            0 => &mut self.cell.w.data_mut()[index],
            1 => &mut self.cell.b[index],
            _ => &mut self.xs[index],
        }
    }

    fn loss(&self) -> f64 {
        let mut trace = LstmTrace::default();
        self.cell.unroll(&self.xs, &mut trace);
        trace.h_all().iter().zip(&self.r).map(|(a, b)| a * b).sum()
    }

    fn gradient(&self) -> Vec<Vec<f64>> {
        let mut trace = LstmTrace::default();
        self.cell.unroll(&self.xs, &mut trace);
        let mut grad = self.cell.zeros_like();
        let mut dx = vec![0.0; self.xs.len()];
        self.cell.backprop(&trace, &self.r, Some(&mut dx), &mut grad);
        vec![grad.w.data().to_vec(), grad.b, dx]
    }
}

/// One training example in network input form.
#[derive(Debug, Clone)]
pub struct Example {
    pub steps: Vec<f64>,
    pub aux: Vec<f64>,
    pub target: usize,
}

/// Mean cross-entropy of a network over a batch.
pub struct NetworkObjective {
    pub net: Network<f64>,
    pub batch: Vec<Example>,
}

impl Objective for NetworkObjective {
    fn blocks(&self) -> Vec<(String, usize)> {
        self.net.blocks().into_iter().map(|(n, b)| (n, b.len())).collect()
    }

    fn param_mut(&mut self, block: usize, index: usize) -> &mut f64 {
        &mut self.net.blocks_mut().swap_remove(block)[index]
    }

    fn loss(&self) -> f64 {
        let mut ws = Workspace::default();
        let total: f64 = self
            .batch
            .iter()
            .map(|e| {
                self.net
                    .loss(&NetInput { steps: &e.steps, aux: &e.aux }, e.target, &mut ws)
                    .expect("example shapes match the network")
            })
            .sum();
        total / self.batch.len() as f64
    }

    fn gradient(&self) -> Vec<Vec<f64>> {
        let mut ws = Workspace::default();
        let mut grad = self.net.zeros_like();
        for e in &self.batch {
            self.net
                .accumulate_gradient(&NetInput { steps: &e.steps, aux: &e.aux }, e.target, &mut ws, &mut grad)
                .expect("example shapes match the network");
        }
        let n = self.batch.len() as f64;
        grad.blocks().into_iter().map(|(_, b)| b.iter().map(|v| v / n).collect()).collect()
    }
}
