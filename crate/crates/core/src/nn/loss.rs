use super::Scalar;

/// Max-subtracted softmax written into `probs`.
pub fn softmax_into<S: Scalar>(logits: &[S], probs: &mut [S]) {
    let m = logits.iter().copied().fold(S::neg_infinity(), S::max);
    let mut sum = S::zero();
    for (p, &z) in probs.iter_mut().zip(logits) {
        *p = (z - m).exp();
        sum += *p;
    }
    for p in probs.iter_mut() {
        *p /= sum;
    }
}

/// Cross-entropy of a softmax against a class index. Returns the loss, the
/// probabilities and the gradient with respect to the logits.
pub fn softmax_xent<S: Scalar>(logits: &[S], target: usize) -> (S, Vec<S>, Vec<S>) {
    let mut probs = vec![S::zero(); logits.len()];
    let mut grad = vec![S::zero(); logits.len()];
    let loss = softmax_xent_into(logits, target, &mut probs, &mut grad);
    (loss, probs, grad)
}

pub(crate) fn softmax_xent_into<S: Scalar>(logits: &[S], target: usize, probs: &mut [S], grad: &mut [S]) -> S {
    assert!(target < logits.len(), "target {target} outside {} classes", logits.len());
    let m = logits.iter().copied().fold(S::neg_infinity(), S::max);
    let mut sum = S::zero();
    for (p, &z) in probs.iter_mut().zip(logits) {
        *p = (z - m).exp();
        sum += *p;
    }
    for (p, g) in probs.iter_mut().zip(grad.iter_mut()) {
        *p /= sum;
        *g = *p;
    }
    grad[target] -= S::one();
    // log-sum-exp form stays finite even when probs[target] underflows
    sum.ln() - (logits[target] - m)
}
