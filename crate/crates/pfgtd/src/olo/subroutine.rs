//! The three parameter-free subroutines: PF (dimension-free reduction of a
//! scale bettor and a direction learner), CW-PF (one bettor per coordinate),
//! and PF+ (the sum of both).

use super::{HintState, OnsBettor, UnitBallGd, CONTRACT_SLACK};
use crate::linalg;

/// Dimension-free parameter-free learner: plays `v_t * u_t` where the scale
/// `v_t` comes from a hinted coin bettor and the direction `u_t` from
/// adaptive gradient descent on the unit ball. The feedback routing sends the
/// scalar loss `<g, u_t>` to the bettor (valid since `|<g, u>| <= ||g||`) and
/// the full gradient to the direction learner.
#[derive(Debug, Clone)]
pub struct PfCore {
    scale: OnsBettor,
    direction: UnitBallGd,
}

impl PfCore {
    pub fn new(dim: usize, initial_wealth: f64, initial_hint: f64) -> Self {
        PfCore {
            scale: OnsBettor::new(initial_wealth, initial_hint),
            direction: UnitBallGd::new(dim),
        }
    }

    /// Warm start playing exactly `theta1` on the first round: bets half the
    /// wealth `2 ||theta1||` along the direction `theta1 / ||theta1||`.
    pub fn warm_start(theta1: &[f64], initial_hint: f64) -> Self {
        let n = linalg::norm(theta1);
        assert!(n > 0.0, "warm start requires a nonzero initial point");
        let direction: Vec<f64> = theta1.iter().map(|t| t / n).collect();
        PfCore {
            scale: OnsBettor::with_bet(0.5, 2.0 * n, initial_hint),
            direction: UnitBallGd::with_point(direction),
        }
    }

    pub fn play(&self, out: &mut Vec<f64>) {
        let v = self.scale.bet();
        out.clear();
        out.extend(self.direction.point().iter().map(|u| v * u));
    }

    pub fn update(&mut self, fed: &[f64], next_hint: f64) {
        assert!(
            linalg::norm(fed) <= self.scale.hint() * (1.0 + CONTRACT_SLACK),
            "fed subgradient exceeds the scalar hint in force"
        );
        self.update_inner(fed, next_hint);
    }

    /// Update path for the iterate-adding combiner, whose scalar hints start
    /// at `||h_1|| / sqrt(d)` and may undershoot the first combined
    /// gradient's norm; the recorded hint is lifted to cover it.
    pub(crate) fn update_combined(&mut self, fed: &[f64], next_hint: f64) {
        self.scale.raise_hint(linalg::norm(fed));
        self.update_inner(fed, next_hint.max(self.scale.hint()));
    }

    fn update_inner(&mut self, fed: &[f64], next_hint: f64) {
        let s = linalg::dot(fed, self.direction.point());
        self.scale.step(s, next_hint);
        self.direction.step(fed);
    }

    pub fn scale(&self) -> &OnsBettor {
        &self.scale
    }

    pub fn direction(&self) -> &UnitBallGd {
        &self.direction
    }
}

/// Coordinate-wise parameter-free learner: an independent hinted bettor per
/// dimension, each with its own hint stream.
#[derive(Debug, Clone)]
pub struct CwPfCore {
    bettors: Vec<OnsBettor>,
    /// Times the stack guard had to shrink a coordinate of the surrogate
    /// gradient to the hint in force (see `update_guarded`).
    guard_hits: u64,
}

impl CwPfCore {
    pub fn new(dim: usize, initial_wealth_per_coord: f64, initial_hint: f64) -> Self {
        Self::with_hints(initial_wealth_per_coord, &vec![initial_hint; dim])
    }

    pub fn with_hints(initial_wealth_per_coord: f64, initial_hints: &[f64]) -> Self {
        CwPfCore {
            bettors: initial_hints
                .iter()
                .map(|&h| OnsBettor::new(initial_wealth_per_coord, h))
                .collect(),
            guard_hits: 0,
        }
    }

    /// Warm start playing exactly `theta1` on the first round: coordinate `i`
    /// bets half of the wealth `2 theta1[i]`. Every component must be
    /// positive, since wealth is.
    pub fn warm_start(theta1: &[f64], initial_hint: f64) -> Result<Self, crate::Error> {
        for (i, &t) in theta1.iter().enumerate() {
            if t <= 0.0 {
                return Err(crate::Error::InvalidConfig(format!(
                    "coordinate-wise warm start needs positive components; theta1[{i}] = {t}"
                )));
            }
        }
        Ok(CwPfCore {
            bettors: theta1.iter().map(|&t| OnsBettor::with_bet(0.5, 2.0 * t, initial_hint)).collect(),
            guard_hits: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.bettors.len()
    }

    pub fn play(&self, out: &mut Vec<f64>) {
        out.clear();
        out.extend(self.bettors.iter().map(|b| b.bet()));
    }

    /// Strict coordinate-wise update; a per-coordinate hint violation is a
    /// contract error.
    pub fn update(&mut self, fed: &[f64], next_hint: &[f64]) {
        debug_assert_eq!(fed.len(), self.bettors.len());
        debug_assert_eq!(next_hint.len(), self.bettors.len());
        for ((b, &g), &h) in self.bettors.iter_mut().zip(fed).zip(next_hint) {
            b.step(g, h);
        }
    }

    /// Update with a per-coordinate safety clamp. The constraint-set penalty
    /// subtracts a multiple of the outward direction from the clipped
    /// gradient, which under lopsided per-coordinate hints can push a single
    /// component past the hint that coordinate's bettor was clamped for.
    /// Feeding that loss raw would break the wealth-positivity contract, so
    /// the composed stack shrinks the offending component to the hint in
    /// force and counts the event.
    pub fn update_guarded(&mut self, fed: &[f64], next_hint: &[f64]) {
        debug_assert_eq!(fed.len(), self.bettors.len());
        for ((b, &g), &h) in self.bettors.iter_mut().zip(fed).zip(next_hint) {
            let cap = b.hint();
            let loss = if g.abs() > cap {
                self.guard_hits += 1;
                g.clamp(-cap, cap)
            } else {
                g
            };
            b.step(loss, h.max(cap));
        }
    }

    pub fn guard_hits(&self) -> u64 {
        self.guard_hits
    }

    pub fn bettors(&self) -> &[OnsBettor] {
        &self.bettors
    }
}

/// Iterate-adding combiner: plays the exact sum of a PF and a CW-PF iterate,
/// guaranteeing the better regret bound of the two up to a constant. The
/// internal wealth split gives PF `d/2 * W0` and each CW-PF coordinate
/// `W0 / 2`; PF receives `||h|| / sqrt(d)` as its initial scalar hint and
/// `||h_{t+1}||` afterwards, while CW-PF sees the full hint vector.
#[derive(Debug, Clone)]
pub struct PfPlusCore {
    pf: PfCore,
    cwpf: CwPfCore,
    pf_play: Vec<f64>,
    cw_play: Vec<f64>,
}

impl PfPlusCore {
    pub fn new(dim: usize, total_wealth: f64, initial_hint_vec: &HintState) -> Self {
        let h = initial_hint_vec.vector_values();
        assert_eq!(h.len(), dim);
        let d = dim as f64;
        let pf_hint = linalg::norm(h) / d.sqrt();
        PfPlusCore {
            pf: PfCore::new(dim, 0.5 * d * total_wealth, pf_hint),
            cwpf: CwPfCore::with_hints(0.5 * total_wealth, h),
            pf_play: Vec::new(),
            cw_play: Vec::new(),
        }
    }

    /// Warm start playing exactly `theta1`: each component contributes half.
    pub fn warm_start(theta1: &[f64], initial_hint_vec: &HintState) -> Result<Self, crate::Error> {
        let h = initial_hint_vec.vector_values();
        let d = theta1.len() as f64;
        let half: Vec<f64> = theta1.iter().map(|t| 0.5 * t).collect();
        let pf_hint = linalg::norm(h) / d.sqrt();
        Ok(PfPlusCore {
            pf: PfCore::warm_start(&half, pf_hint),
            cwpf: CwPfCore::warm_start(&half, initial_hint_vec.initial_guess())?,
            pf_play: Vec::new(),
            cw_play: Vec::new(),
        })
    }

    pub fn play(&mut self, out: &mut Vec<f64>) {
        self.pf.play(&mut self.pf_play);
        self.cwpf.play(&mut self.cw_play);
        out.clear();
        out.extend(self.pf_play.iter().zip(&self.cw_play).map(|(a, b)| a + b));
    }

    pub fn update(&mut self, fed: &[f64], next_hint: &[f64]) {
        self.pf.update_combined(fed, linalg::norm(next_hint));
        self.cwpf.update_guarded(fed, next_hint);
    }

    pub fn pf(&self) -> &PfCore {
        &self.pf
    }

    pub fn cwpf(&self) -> &CwPfCore {
        &self.cwpf
    }

    /// Component plays from the most recent `play` call.
    pub fn component_plays(&self) -> (&[f64], &[f64]) {
        (&self.pf_play, &self.cw_play)
    }
}

/// The unconstrained learner sitting inside the constrained-clipping stack.
#[derive(Debug, Clone)]
pub enum Subroutine {
    Pf(PfCore),
    CwPf(CwPfCore),
    PfPlus(PfPlusCore),
    #[cfg(feature = "free-range")]
    FreeRange(super::FreeRange),
}

impl Subroutine {
    pub fn play(&mut self, out: &mut Vec<f64>) {
        match self {
            Subroutine::Pf(pf) => pf.play(out),
            Subroutine::CwPf(cw) => cw.play(out),
            Subroutine::PfPlus(pp) => pp.play(out),
            #[cfg(feature = "free-range")]
            Subroutine::FreeRange(fr) => fr.play(out),
        }
    }

    pub fn update(&mut self, fed: &[f64], next_hint: &HintState) {
        match (self, next_hint) {
            (Subroutine::Pf(pf), HintState::Scalar { value, .. }) => pf.update(fed, *value),
            (Subroutine::CwPf(cw), HintState::Vector { values, .. }) => {
                cw.update_guarded(fed, values)
            }
            (Subroutine::PfPlus(pp), HintState::Vector { values, .. }) => pp.update(fed, values),
            #[cfg(feature = "free-range")]
            (Subroutine::FreeRange(fr), HintState::Scalar { value, .. }) => fr.update(fed, *value),
            _ => panic!("hint mode does not match the subroutine"),
        }
    }

    /// Whether this subroutine consumes vector hints.
    pub fn wants_vector_hints(&self) -> bool {
        matches!(self, Subroutine::CwPf(_) | Subroutine::PfPlus(_))
    }
}
