//! Running Lipschitz hints: a monotone estimate of the largest subgradient
//! seen so far, kept either as a single scalar (Euclidean norm) or one value
//! per coordinate.

use serde::Serialize;

use crate::linalg;

/// Monotone subgradient-magnitude hint. The scalar mode tracks
/// `max(eps, max_t ||g_t||)`, the vector mode tracks the running maximum of
/// `|g_{t,i}|` per coordinate. The value never decreases and never drops
/// below the initial guess.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum HintState {
    Scalar { value: f64, initial: f64 },
    Vector { values: Vec<f64>, initial: f64 },
}

impl HintState {
    pub fn scalar(initial_guess: f64) -> Self {
        assert!(initial_guess > 0.0, "initial hint guess must be positive");
        HintState::Scalar { value: initial_guess, initial: initial_guess }
    }

    pub fn vector(initial_guess: f64, dim: usize) -> Self {
        assert!(initial_guess > 0.0, "initial hint guess must be positive");
        HintState::Vector { values: vec![initial_guess; dim], initial: initial_guess }
    }

    pub fn is_vector(&self) -> bool {
        matches!(self, HintState::Vector { .. })
    }

    pub fn initial_guess(&self) -> f64 {
        match self {
            HintState::Scalar { initial, .. } | HintState::Vector { initial, .. } => *initial,
        }
    }

    /// Scalar hint value; panics in vector mode.
    pub fn scalar_value(&self) -> f64 {
        match self {
            HintState::Scalar { value, .. } => *value,
            HintState::Vector { .. } => panic!("hint is in vector mode"),
        }
    }

    /// Per-coordinate hint values; panics in scalar mode.
    pub fn vector_values(&self) -> &[f64] {
        match self {
            HintState::Vector { values, .. } => values,
            HintState::Scalar { .. } => panic!("hint is in scalar mode"),
        }
    }

    /// Euclidean magnitude of the hint: the value itself in scalar mode, the
    /// norm of the hint vector otherwise.
    pub fn magnitude(&self) -> f64 {
        match self {
            HintState::Scalar { value, .. } => *value,
            HintState::Vector { values, .. } => linalg::norm(values),
        }
    }

    /// Clips `raw` against the hint currently in force. Scalar mode shrinks
    /// the whole vector onto the hint sphere; vector mode truncates each
    /// coordinate independently. Does not modify the hint.
    pub fn clip(&self, raw: &[f64], out: &mut Vec<f64>) {
        out.clear();
        match self {
            HintState::Scalar { value: h, .. } => {
                let n = linalg::norm(raw);
                if n > *h {
                    out.extend(raw.iter().map(|g| g * (h / n)));
                } else {
                    out.extend_from_slice(raw);
                }
            }
            HintState::Vector { values, .. } => {
                debug_assert_eq!(values.len(), raw.len());
                out.extend(raw.iter().zip(values).map(|(g, h)| g.clamp(-h, *h)));
            }
        }
    }

    /// Folds the observed raw subgradient into the running maximum.
    pub fn absorb(&mut self, raw: &[f64]) {
        match self {
            HintState::Scalar { value, .. } => {
                *value = value.max(linalg::norm(raw));
            }
            HintState::Vector { values, .. } => {
                debug_assert_eq!(values.len(), raw.len());
                for (h, g) in values.iter_mut().zip(raw) {
                    *h = h.max(g.abs());
                }
            }
        }
    }
}

/// Gradient clipping step: clip `raw` against the hint in force, then advance
/// the hint. Returns the clipped gradient and the updated hint.
pub fn gradient_clip(hint: &HintState, raw: &[f64]) -> (Vec<f64>, HintState) {
    let mut clipped = Vec::new();
    hint.clip(raw, &mut clipped);
    let mut next = hint.clone();
    next.absorb(raw);
    (clipped, next)
}
