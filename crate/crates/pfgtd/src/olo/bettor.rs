//! One-dimensional coin betting driven by Online Newton Step on the
//! log-wealth losses, with running Lipschitz hints.

use super::CONTRACT_SLACK;

/// ONS learning rate `2 / (2 - ln 3)`.
const ONS_RATE: f64 = 2.0 / (2.0 - 1.0986122886681098);

/// Coin-betting state: at each round the learner bets `beta * wealth` on the
/// coin `-g_t`. The betting fraction is updated by ONS on the loss
/// `-ln(1 - beta * g)` and clamped to `|beta| <= 1/(2 h)` for the next hint
/// `h`, which keeps the wealth positive for any in-hint loss sequence.
#[derive(Debug, Clone)]
pub struct OnsBettor {
    beta: f64,
    wealth: f64,
    /// ONS curvature accumulator `A_t = 1 + sum of m_tau^2`.
    curvature_sum: f64,
    /// Hint in force for the next incoming loss.
    hint: f64,
}

impl OnsBettor {
    pub fn new(initial_wealth: f64, initial_hint: f64) -> Self {
        Self::with_bet(0.0, initial_wealth, initial_hint)
    }

    /// Warm start with a chosen betting fraction (used by the Baird
    /// initialization trick). `beta` must respect the initial hint clamp.
    pub fn with_bet(beta: f64, initial_wealth: f64, initial_hint: f64) -> Self {
        assert!(initial_wealth > 0.0, "initial wealth must be positive");
        assert!(initial_hint > 0.0, "initial hint must be positive");
        assert!(
            beta.abs() <= 0.5 / initial_hint * (1.0 + CONTRACT_SLACK),
            "initial betting fraction violates the hint clamp"
        );
        OnsBettor { beta, wealth: initial_wealth, curvature_sum: 1.0, hint: initial_hint }
    }

    /// The bet for the upcoming round.
    pub fn bet(&self) -> f64 {
        self.beta * self.wealth
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn wealth(&self) -> f64 {
        self.wealth
    }

    pub fn curvature_sum(&self) -> f64 {
        self.curvature_sum
    }

    pub fn hint(&self) -> f64 {
        self.hint
    }

    /// Lifts the hint in force without a betting round. The iterate-adding
    /// combiner hands its scale bettor `||h_1|| / sqrt(d)` as the initial
    /// hint but `||h_t||` afterwards, so the first combined gradient can
    /// legitimately exceed the recorded hint; the hint plays no role in the
    /// wealth arithmetic, only in the precondition, so raising it implements
    /// that wiring as written.
    pub fn raise_hint(&mut self, hint: f64) {
        self.hint = self.hint.max(hint);
    }

    /// One betting round. `loss` is the coefficient of the linear loss on the
    /// bet just played; callers must have clipped it to the hint in force.
    /// `next_hint` is the (non-decreasing) hint for the following round.
    pub fn step(&mut self, loss: f64, next_hint: f64) {
        assert!(
            loss.abs() <= self.hint * (1.0 + CONTRACT_SLACK),
            "loss {} exceeds hint {}; clip before betting",
            loss,
            self.hint
        );
        assert!(
            next_hint >= self.hint * (1.0 - CONTRACT_SLACK),
            "hints must be non-decreasing ({} -> {})",
            self.hint,
            next_hint
        );

        self.wealth -= loss * self.bet();

        let denom = 1.0 - self.beta * loss;
        // |beta| <= 1/(2h) and |loss| <= h give |beta * loss| <= 1/2.
        assert!(denom > 0.0, "coin-betting denominator collapsed");
        let m = loss / denom;
        self.curvature_sum += m * m;
        let unclipped = self.beta - ONS_RATE * m / self.curvature_sum;
        let bound = 0.5 / next_hint;
        self.beta = unclipped.clamp(-bound, bound);
        self.hint = next_hint;
    }
}

/// Regret upper bound for the hinted coin bettor after `T` rounds, as a
/// function of the comparator magnitude, the initial wealth, the terminal
/// hint, and the accumulated squared losses. Used as a test oracle for
/// empirical one-dimensional regret.
pub fn ons_regret_bound(
    comparator_mag: f64,
    initial_wealth: f64,
    terminal_hint: f64,
    grad_sq_sum: f64,
) -> f64 {
    let u = comparator_mag.abs();
    if u == 0.0 {
        return initial_wealth;
    }
    let h = terminal_hint;
    let g2 = grad_sq_sum;
    let slow = 8.0 * h * (16.0 * u * h * (0.25 / (h * h)).exp() * (1.0 + g2).powf(4.5)).ln();
    let fast = 2.0
        * (g2
            * (4.0 * g2.powi(10) * (0.5 / (h * h)).exp() * u * u
                / (initial_wealth * initial_wealth)
                + 1.0)
                .ln())
        .sqrt();
    initial_wealth + u * slow.max(fast)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_coin_leaves_state_unchanged() {
        let mut b = OnsBettor::new(1.0, 1.0);
        b.step(0.0, 1.0);
        assert_eq!(b.beta(), 0.0);
        assert_eq!(b.wealth(), 1.0);
        assert_eq!(b.curvature_sum(), 1.0);
    }

    #[test]
    fn first_unit_loss_clips_beta_to_half() {
        // W0 = 1, h1 = h2 = 1, beta1 = 0, loss = 1: the wealth is untouched
        // (the bet was zero) and the raw ONS step -1/(2 - ln 3) ~ -1.109 is
        // clamped to -1/2.
        let mut b = OnsBettor::new(1.0, 1.0);
        b.step(1.0, 1.0);
        assert_eq!(b.wealth(), 1.0);
        assert_eq!(b.beta(), -0.5);
        assert_eq!(b.curvature_sum(), 2.0);
        let unclipped = -2.0 / ((2.0 - 3.0f64.ln()) * 2.0);
        assert!((unclipped + 1.109).abs() < 1e-3);
    }

    #[test]
    fn clamp_respects_next_hint() {
        let mut b = OnsBettor::new(1.0, 1.0);
        b.step(1.0, 4.0);
        assert!(b.beta() >= -0.125 && b.beta() <= 0.125);
        assert_eq!(b.beta(), -0.125);
    }

    #[test]
    #[should_panic(expected = "exceeds hint")]
    fn oversized_loss_is_a_contract_error() {
        let mut b = OnsBettor::new(1.0, 1.0);
        b.step(1.5, 2.0);
    }

    #[test]
    #[should_panic(expected = "non-decreasing")]
    fn decreasing_hint_is_a_contract_error() {
        let mut b = OnsBettor::new(1.0, 2.0);
        b.step(0.5, 1.0);
    }

    #[test]
    fn regret_bound_degenerate_and_monotone() {
        assert_eq!(ons_regret_bound(0.0, 1.0, 1.0, 100.0), 1.0);
        let v = ons_regret_bound(1.0, 1.0, 1.0, 100.0);
        assert!(v.is_finite() && v > 0.0);
        let mut prev = 0.0;
        for g2 in [1.0, 10.0, 100.0, 1e4, 1e8] {
            let b = ons_regret_bound(3.0, 1.0, 1.0, g2);
            assert!(b >= prev, "bound must be non-decreasing in grad_sq_sum");
            prev = b;
        }
    }
}
