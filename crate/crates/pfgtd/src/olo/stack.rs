//! The constrained-clipping stack: projection onto the feasible set, running
//! Lipschitz hints with gradient clipping, and the constraint-set surrogate,
//! wrapped around an unconstrained parameter-free subroutine.

use std::io::Write;

use super::{constraint_feedback, HintState, L2Ball, Subroutine};

/// Snapshot of one reduction round, emitted on the debug trace.
#[derive(Debug, Clone)]
pub struct OloIterateRecord {
    pub step: u64,
    pub played: Vec<f64>,
    pub fed: Vec<f64>,
    pub hint_after: HintState,
}

impl OloIterateRecord {
    /// CSV row: step, played components, fed components, hint value(s).
    pub fn csv_line(&self) -> String {
        let mut cols: Vec<String> = Vec::with_capacity(1 + 2 * self.played.len() + 1);
        cols.push(self.step.to_string());
        cols.extend(self.played.iter().map(|v| v.to_string()));
        cols.extend(self.fed.iter().map(|v| v.to_string()));
        match &self.hint_after {
            HintState::Scalar { value, .. } => cols.push(value.to_string()),
            HintState::Vector { values, .. } => cols.extend(values.iter().map(|v| v.to_string())),
        }
        cols.join(",")
    }
}

/// A constrained online linear learner. Each round:
///
/// 1. `play` pulls the unconstrained proposal from the subroutine and plays
///    its projection onto the feasible ball;
/// 2. `observe` clips the incoming subgradient against the hint in force,
///    advances the hint with the raw magnitude, applies the constraint-set
///    surrogate at the proposal, and feeds the result (with the new hint)
///    back to the subroutine.
pub struct ConstrainedLearner {
    set: L2Ball,
    hint: HintState,
    inner: Subroutine,
    proposed: Vec<f64>,
    played: Vec<f64>,
    clipped: Vec<f64>,
    fed: Vec<f64>,
    step: u64,
    in_round: bool,
    trace: Option<Box<dyn Write + Send>>,
}

impl std::fmt::Debug for ConstrainedLearner {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ConstrainedLearner")
            .field("set", &self.set)
            .field("hint", &self.hint)
            .field("step", &self.step)
            .finish()
    }
}

impl ConstrainedLearner {
    pub fn new(set: L2Ball, hint: HintState, inner: Subroutine) -> Self {
        assert_eq!(
            inner.wants_vector_hints(),
            hint.is_vector(),
            "hint mode must match the subroutine's clipping map"
        );
        let d = set.dim();
        ConstrainedLearner {
            set,
            hint,
            inner,
            proposed: vec![0.0; d],
            played: vec![0.0; d],
            clipped: Vec::with_capacity(d),
            fed: Vec::with_capacity(d),
            step: 0,
            in_round: false,
            trace: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.set.dim()
    }

    /// The projected point for this round.
    pub fn play(&mut self) -> &[f64] {
        self.inner.play(&mut self.proposed);
        self.played.clone_from(&self.proposed);
        self.set.project_in_place(&mut self.played);
        self.in_round = true;
        &self.played
    }

    /// Point played on the most recent round (without advancing the round).
    pub fn current_play(&mut self) -> &[f64] {
        if !self.in_round {
            self.play();
        }
        &self.played
    }

    /// Feed the raw subgradient observed at the played point.
    pub fn observe(&mut self, raw: &[f64]) {
        debug_assert_eq!(raw.len(), self.dim());
        if !self.in_round {
            self.play();
        }
        self.hint.clip(raw, &mut self.clipped);
        let (set, proposed, played, clipped) =
            (&self.set, &self.proposed, &self.played, &self.clipped);
        constraint_feedback(set, proposed, played, clipped, &mut self.fed);
        self.hint.absorb(raw);
        self.inner.update(&self.fed, &self.hint);
        self.step += 1;
        self.in_round = false;
        if self.trace.is_some() {
            let line = self.record().csv_line();
            if let Some(w) = self.trace.as_mut() {
                let _ = writeln!(w, "{line}");
            }
        }
    }

    /// Snapshot of the most recent completed round.
    pub fn record(&self) -> OloIterateRecord {
        OloIterateRecord {
            step: self.step,
            played: self.played.clone(),
            fed: self.fed.clone(),
            hint_after: self.hint.clone(),
        }
    }

    /// Emit one CSV record per round to `sink`.
    pub fn enable_trace(&mut self, sink: Box<dyn Write + Send>) {
        self.trace = Some(sink);
    }

    pub fn hint(&self) -> &HintState {
        &self.hint
    }

    pub fn set(&self) -> &L2Ball {
        &self.set
    }

    pub fn inner(&self) -> &Subroutine {
        &self.inner
    }

    pub fn steps(&self) -> u64 {
        self.step
    }

    /// Safety-clamp activations inside a coordinate-wise subroutine, if any.
    pub fn guard_hits(&self) -> u64 {
        match &self.inner {
            Subroutine::CwPf(cw) => cw.guard_hits(),
            Subroutine::PfPlus(pp) => pp.cwpf().guard_hits(),
            _ => 0,
        }
    }
}
