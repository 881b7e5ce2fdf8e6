//! Parameter-free online linear optimization: coin betting with hints and
//! the black-box reductions that compose it into constrained, Lipschitz-free,
//! dimension-free learners.

mod bettor;
mod direction;
#[cfg(feature = "free-range")]
mod free_range;
mod hint;
mod reduction;
mod stack;
mod subroutine;

pub use bettor::{ons_regret_bound, OnsBettor};
pub use direction::UnitBallGd;
#[cfg(feature = "free-range")]
pub use free_range::FreeRange;
pub use hint::{gradient_clip, HintState};
pub use reduction::{constraint_feedback, constraint_set_reduce, L2Ball};
pub use stack::{ConstrainedLearner, OloIterateRecord};
pub use subroutine::{CwPfCore, PfCore, PfPlusCore, Subroutine};

/// Relative slack used by contract assertions to absorb floating-point
/// round-off in norm and inner-product computations.
pub(crate) const CONTRACT_SLACK: f64 = 1e-9;
