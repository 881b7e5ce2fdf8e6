//! Ground-truth metrics: closed-form `A`, `b`, `C`, the saddle point, the
//! projected-Bellman-error norm, the duality gap, and the scale-free SMAPE.

mod gap;
mod model;
mod smape;

pub use gap::{duality_gap, GapReport};
pub use model::{build_exact_model, exact_values, ExactModel, ModelDump};
pub use smape::{smape, true_returns, TrueReturns};
