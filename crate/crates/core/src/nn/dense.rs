use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{axpy, dot, NnError, Scalar, Tensor2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Activation {
    Identity,
    Relu,
    Tanh,
}

impl Activation {
    #[inline]
    fn apply<S: Scalar>(self, z: S) -> S {
        match self {
            Activation::Identity => z,
            Activation::Relu => z.max(S::zero()),
            Activation::Tanh => z.tanh(),
        }
    }

    /// Derivative expressed through the activation's output.
    #[inline]
    fn slope<S: Scalar>(self, y: S) -> S {
        match self {
            Activation::Identity => S::one(),
            Activation::Relu => {
                if y > S::zero() {
                    S::one()
                } else {
                    S::zero()
                }
            }
            Activation::Tanh => S::one() - y * y,
        }
    }

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(c: u8) -> Option<Self> {
        [Activation::Identity, Activation::Relu, Activation::Tanh].get(c as usize).copied()
    }
}

/// `y = act(W x + b)` with `W` of shape out × in.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense<S> {
    pub w: Tensor2<S>,
    pub b: Vec<S>,
    pub act: Activation,
}

/// Gradients of one dense layer for a single input.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseGrads<S> {
    pub dx: Vec<S>,
    pub dw: Tensor2<S>,
    pub db: Vec<S>,
}

impl<S: Scalar> Dense<S> {
    /// Weights and biases uniform in ±1/√fan-in.
    pub fn new<R: Rng>(inputs: usize, outputs: usize, act: Activation, rng: &mut R) -> Self {
        let limit = 1.0 / (inputs as f64).sqrt();
        let w = Tensor2::uniform(outputs, inputs, limit, rng);
        let b = Tensor2::uniform(outputs, 1, limit, rng).data().to_vec();
        Dense { w, b, act }
    }

    pub fn from_parts(w: Tensor2<S>, b: Vec<S>, act: Activation) -> Result<Self, NnError> {
        if b.len() != w.rows() {
            return Err(NnError::ShapeMismatch { what: "dense bias", expected: w.rows(), found: b.len() });
        }
        Ok(Dense { w, b, act })
    }

    pub fn inputs(&self) -> usize {
        self.w.cols()
    }

    pub fn outputs(&self) -> usize {
        self.w.rows()
    }

    pub fn zeros_like(&self) -> Self {
        Dense {
            w: Tensor2::zeros(self.outputs(), self.inputs()),
            b: vec![S::zero(); self.outputs()],
            act: self.act,
        }
    }

    fn check_input(&self, x: &[S]) -> Result<(), NnError> {
        if x.len() != self.inputs() {
            return Err(NnError::ShapeMismatch { what: "dense input", expected: self.inputs(), found: x.len() });
        }
        Ok(())
    }

    pub fn forward(&self, x: &[S]) -> Result<Vec<S>, NnError> {
        self.check_input(x)?;
        let mut y = vec![S::zero(); self.outputs()];
        self.forward_into(x, &mut y);
        Ok(y)
    }

    #[inline]
    pub(crate) fn forward_into(&self, x: &[S], y: &mut [S]) {
        for (j, yj) in y.iter_mut().enumerate() {
            *yj = self.act.apply(dot(self.w.row(j), x) + self.b[j]);
        }
    }

    /// Analytic gradients for input `x` and upstream gradient `dy` with respect
    /// to the layer output.
    pub fn backward(&self, x: &[S], dy: &[S]) -> Result<DenseGrads<S>, NnError> {
        self.check_input(x)?;
        if dy.len() != self.outputs() {
            return Err(NnError::ShapeMismatch { what: "dense output gradient", expected: self.outputs(), found: dy.len() });
        }
        let y = self.forward(x)?;
        let mut grads = self.zeros_like();
        let mut dx = vec![S::zero(); self.inputs()];
        let mut dz = dy.to_vec();
        self.backward_into(x, &y, &mut dz, Some(&mut dx), &mut grads);
        Ok(DenseGrads { dx, dw: grads.w, db: grads.b })
    }

    /// Accumulates parameter gradients into `grad` and, if asked, the input
    /// gradient into `dx`. `dz` holds the output gradient on entry and is
    /// overwritten with the pre-activation gradient.
    #[inline]
    pub(crate) fn backward_into(&self, x: &[S], y: &[S], dz: &mut [S], dx: Option<&mut [S]>, grad: &mut Dense<S>) {
        for (d, &yj) in dz.iter_mut().zip(y) {
            *d *= self.act.slope(yj);
        }
        for (j, &d) in dz.iter().enumerate() {
            if d != S::zero() {
                axpy(d, x, grad.w.row_mut(j));
                grad.b[j] += d;
            }
        }
        if let Some(dx) = dx {
            for (j, &d) in dz.iter().enumerate() {
                if d != S::zero() {
                    axpy(d, self.w.row(j), dx);
                }
            }
        }
    }

    pub fn cast<T: Scalar>(&self) -> Dense<T> {
        Dense {
            w: self.w.cast(),
            b: self.b.iter().map(|v| T::lit(v.as_f64())).collect(),
            act: self.act,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_layer_passes_input_through() {
        let layer = Dense::from_parts(Tensor2::<f64>::identity(3), vec![0.0; 3], Activation::Identity).unwrap();
        assert_eq!(layer.forward(&[1.5, -2.0, 0.25]).unwrap(), vec![1.5, -2.0, 0.25]);
    }

    #[test]
    fn relu_dead_region() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut layer = Dense::<f64>::new(4, 3, Activation::Relu, &mut rng);
        layer.b = vec![-100.0; 3];
        let x = [0.1, 0.2, -0.3, 0.4];
        assert_eq!(layer.forward(&x).unwrap(), vec![0.0; 3]);
        let g = layer.backward(&x, &[1.0, 1.0, 1.0]).unwrap();
        assert!(g.dx.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn shape_mismatch() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let layer = Dense::<f32>::new(4, 3, Activation::Tanh, &mut rng);
        assert!(matches!(layer.forward(&[1.0; 5]), Err(NnError::ShapeMismatch { .. })));
        assert!(layer.backward(&[1.0; 4], &[1.0; 2]).is_err());
    }
}
