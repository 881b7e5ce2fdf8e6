//! Symmetric mean absolute percentage error and offline discounted returns.

use crate::Error;

/// `(1/T) * sum |v - g| / (|g| + |v|)`, with `0/0` terms contributing zero
/// (a perfect prediction of a zero return is not penalized). Always in
/// `[0, 1]`.
pub fn smape(predictions: &[f64], returns: &[f64]) -> Result<f64, Error> {
    if predictions.is_empty() || returns.is_empty() {
        return Err(Error::InvalidConfig("SMAPE needs non-empty streams".into()));
    }
    if predictions.len() != returns.len() {
        return Err(Error::Dimension { expected: returns.len(), got: predictions.len() });
    }
    let total: f64 = predictions
        .iter()
        .zip(returns)
        .map(|(v, g)| {
            let denom = v.abs() + g.abs();
            if denom == 0.0 {
                0.0
            } else {
                (v - g).abs() / denom
            }
        })
        .sum();
    Ok(total / predictions.len() as f64)
}

/// Discounted returns of a reward stream, with per-element truncation bounds.
#[derive(Debug, Clone)]
pub struct TrueReturns {
    pub values: Vec<f64>,
    /// Upper bound on the truncation error of each element:
    /// `gamma^(T-t) * r_max / (1 - gamma)` (infinite when `gamma = 1`).
    pub tail_bound: Vec<f64>,
}

/// Offline backward pass `G_t = r_t + gamma * G_{t+1}` over the full stream.
pub fn true_returns(rewards: &[f64], gamma: f64) -> TrueReturns {
    let t_len = rewards.len();
    let mut values = vec![0.0; t_len];
    let mut acc = 0.0;
    for t in (0..t_len).rev() {
        acc = rewards[t] + gamma * acc;
        values[t] = acc;
    }
    let r_max = rewards.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let scale = if gamma < 1.0 { r_max / (1.0 - gamma) } else { f64::INFINITY };
    let tail_bound = (0..t_len).map(|t| gamma.powi((t_len - t) as i32) * scale).collect();
    TrueReturns { values, tail_bound }
}
