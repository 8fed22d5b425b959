use serde::{Deserialize, Serialize};

use super::{NnError, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig { lr: 1e-3, beta1: 0.9, beta2: 0.999, eps: 1e-8 }
    }
}

/// Adaptive-moment optimizer with bias correction.
#[derive(Debug, Clone)]
pub struct Adam<S> {
    pub config: AdamConfig,
    step: u64,
    m: Vec<Vec<S>>,
    v: Vec<Vec<S>>,
}

impl<S: Scalar> Adam<S> {
    pub fn new(config: AdamConfig, sizes: &[usize]) -> Self {
        Adam {
            config,
            step: 0,
            m: sizes.iter().map(|&n| vec![S::zero(); n]).collect(),
            v: sizes.iter().map(|&n| vec![S::zero(); n]).collect(),
        }
    }

    pub fn steps(&self) -> u64 {
        self.step
    }

    pub fn step(&mut self, params: &mut [&mut [S]], grads: &[&[S]]) -> Result<(), NnError> {
        if params.len() != self.m.len() || grads.len() != self.m.len() {
            return Err(NnError::ShapeMismatch { what: "optimizer blocks", expected: self.m.len(), found: params.len().min(grads.len()) });
        }
        for (k, (p, g)) in params.iter().zip(grads).enumerate() {
            if p.len() != self.m[k].len() || g.len() != self.m[k].len() {
                return Err(NnError::ShapeMismatch { what: "optimizer block", expected: self.m[k].len(), found: p.len() });
            }
        }
        self.step += 1;
        let c = &self.config;
        let (b1, b2) = (S::lit(c.beta1), S::lit(c.beta2));
        let (one_b1, one_b2) = (S::one() - b1, S::one() - b2);
        let bc1 = 1.0 - c.beta1.powi(self.step as i32);
        let bc2 = 1.0 - c.beta2.powi(self.step as i32);
        let lr_t = S::lit(c.lr * bc2.sqrt() / bc1);
        let eps = S::lit(c.eps * bc2.sqrt());
        for (k, (p, g)) in params.iter_mut().zip(grads).enumerate() {
            let (m, v) = (&mut self.m[k], &mut self.v[k]);
            for i in 0..p.len() {
                let gi = g[i];
                m[i] = b1 * m[i] + one_b1 * gi;
                v[i] = b2 * v[i] + one_b2 * gi * gi;
                p[i] -= lr_t * m[i] / (v[i].sqrt() + eps);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_leaves_parameters() {
        let mut p = vec![0.5f64, -1.25, 3.0];
        let before = p.clone();
        let mut opt = Adam::new(AdamConfig::default(), &[3]);
        for _ in 0..10 {
            opt.step(&mut [&mut p], &[&[0.0; 3]]).unwrap();
        }
        assert_eq!(p, before);
    }

    #[test]
    fn constant_gradient_step_approaches_lr() {
        let mut p = vec![0.0f64];
        let mut opt = Adam::new(AdamConfig { lr: 0.01, ..Default::default() }, &[1]);
        let mut last = 0.0;
        for _ in 0..500 {
            let before = p[0];
            opt.step(&mut [&mut p], &[&[2.5]]).unwrap();
            last = before - p[0];
        }
        assert!((last - 0.01).abs() < 1e-6, "{last}");
    }

    #[test]
    fn shape_checked() {
        let mut p = vec![0.0f32; 2];
        let mut opt = Adam::new(AdamConfig::default(), &[3]);
        assert!(opt.step(&mut [&mut p], &[&[0.0; 2]]).is_err());
    }
}
