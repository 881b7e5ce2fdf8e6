//! Scale-invariant parameter-free learner with a restart scheme against the
//! range-ratio problem. Euclidean norm only; usable directly in d dimensions
//! without the dimension-free reduction.

use crate::linalg;

/// FreeGrad-style potential bettor wrapped in a restart rule: whenever the
/// current hint outgrows the base hint by more than the accumulated ratio
/// budget `R`, the state resets with the new hint as the base. Predictions
/// are invariant to jointly rescaling all gradients and the initial hint.
#[derive(Debug, Clone)]
pub struct FreeRange {
    grad_sum: Vec<f64>,
    v: f64,
    ratio_budget: f64,
    base_hint: f64,
    hint: f64,
}

impl FreeRange {
    pub fn new(dim: usize, initial_hint: f64) -> Self {
        assert!(initial_hint > 0.0, "initial hint must be positive");
        FreeRange {
            grad_sum: vec![0.0; dim],
            v: initial_hint * initial_hint,
            ratio_budget: 2.0,
            base_hint: initial_hint,
            hint: initial_hint,
        }
    }

    pub fn play(&self, out: &mut Vec<f64>) {
        let g_norm = linalg::norm(&self.grad_sum);
        let h = self.hint;
        let v = self.v;
        let coeff = (2.0 * v + h * g_norm) * self.base_hint * self.base_hint
            / (2.0 * (v + h * g_norm).powi(2) * v.sqrt())
            * (g_norm * g_norm / (2.0 * v + 2.0 * h * g_norm)).exp();
        out.clear();
        out.extend(self.grad_sum.iter().map(|g| -g * coeff));
    }

    pub fn update(&mut self, grad: &[f64], next_hint: f64) {
        debug_assert_eq!(grad.len(), self.grad_sum.len());
        let g_norm = linalg::norm(grad);
        linalg::axpy(1.0, grad, &mut self.grad_sum);
        self.v += g_norm * g_norm;
        self.ratio_budget += g_norm / self.hint;
        self.hint = self.hint.max(next_hint);
        // Reset check for the next round's play.
        if self.hint / self.base_hint > self.ratio_budget {
            self.base_hint = self.hint;
            self.v = self.base_hint * self.base_hint;
            self.grad_sum.iter_mut().for_each(|g| *g = 0.0);
            self.ratio_budget = 2.0;
        }
    }

    pub fn base_hint(&self) -> f64 {
        self.base_hint
    }

    pub fn grad_sum(&self) -> &[f64] {
        &self.grad_sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn drive(scale: f64, steps: usize) -> Vec<Vec<f64>> {
        // A fixed pseudo-random-ish gradient stream, scaled by `scale`.
        let mut fr = FreeRange::new(2, scale);
        let mut plays = Vec::new();
        let mut hint = scale;
        for t in 0..steps {
            let mut w = Vec::new();
            fr.play(&mut w);
            plays.push(w);
            let a = ((t * 37 + 11) % 23) as f64 / 23.0 - 0.5;
            let b = ((t * 53 + 7) % 19) as f64 / 19.0 - 0.5;
            let g = [a * scale, b * scale];
            hint = hint.max(linalg::norm(&g));
            fr.update(&g, hint);
        }
        plays
    }

    #[test]
    fn zero_gradient_sum_plays_zero() {
        let fr = FreeRange::new(3, 1.0);
        let mut w = Vec::new();
        fr.play(&mut w);
        assert_eq!(w, vec![0.0; 3]);
    }

    #[test]
    fn joint_rescaling_leaves_iterates_unchanged() {
        // Scale invariance: multiplying every gradient and the initial hint
        // by c > 0 must not move the predictions.
        let base = drive(1.0, 200);
        for c in [1e-3, 1e3] {
            let scaled = drive(c, 200);
            for (w0, w1) in base.iter().zip(&scaled) {
                // Component-wise cancellation in the gradient sum leaves
                // ulp-level noise, so measure error relative to the iterate
                // magnitude.
                let scale_ref = linalg::norm(w0).max(linalg::norm(w1)).max(1e-300);
                for (a, b) in w0.iter().zip(w1) {
                    assert!(
                        (a - b).abs() <= 1e-9 * scale_ref,
                        "iterates moved under joint rescaling: {a} vs {b} (c = {c})"
                    );
                }
            }
        }
    }

    #[test]
    fn hint_jump_triggers_reset() {
        // With a fresh ratio budget of 2, a hint of 3 over base 1 resets.
        let mut fr = FreeRange::new(1, 1.0);
        fr.update(&[0.0], 3.0);
        assert_eq!(fr.base_hint(), 3.0);

        let mut fr = FreeRange::new(1, 1.0);
        fr.update(&[0.5], 1.0);
        assert_eq!(fr.base_hint(), 1.0);
        // Budget is 2.6 after this step; 4/1 exceeds it.
        fr.update(&[0.1], 4.0);
        assert_eq!(fr.base_hint(), 4.0);
        assert_eq!(fr.grad_sum(), &[0.0]);
        let mut w = Vec::new();
        fr.play(&mut w);
        assert_eq!(w, vec![0.0]);
    }
}
