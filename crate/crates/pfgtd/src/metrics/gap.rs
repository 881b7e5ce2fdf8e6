//! Duality gap of the saddle objective
//! `L(theta, y) = <b - A theta, y> - 1/2 ||y||^2_M` over a pair of radius-`D`
//! balls, together with the comparators achieving it.

use nalgebra::DVector;

use super::ExactModel;

const NEGATIVE_GAP_CLAMP: f64 = 1e-9;
const ASCENT_GRAD_TOL: f64 = 1e-8;

/// The gap value and the best responses that realize it. The witnesses are
/// the comparators for which the online-to-batch inequality
/// `gap <= (R_theta + R_y) / T` holds deterministically.
#[derive(Debug, Clone)]
pub struct GapReport {
    pub gap: f64,
    /// Maximizer of `L(theta, .)` over the dual ball.
    pub y_witness: Vec<f64>,
    /// Minimizer of `L(., y)` over the primal ball.
    pub theta_witness: Vec<f64>,
}

/// Computes `max_y L(theta, y) - min_theta' L(theta', y)` over balls of
/// radius `radius`. The inner maximum is closed-form when the unconstrained
/// maximizer `M^{-1}(b - A theta)` is feasible and otherwise found by
/// projected gradient ascent on the strongly concave quadratic; the minimum
/// over the primal ball is closed-form. Tiny negative values (above -1e-9)
/// are clamped to zero; anything more negative indicates a bug and panics.
pub fn duality_gap(model: &ExactModel, theta: &[f64], y: &[f64], radius: f64) -> GapReport {
    let th = DVector::from_column_slice(theta);
    let yv = DVector::from_column_slice(y);
    assert!(
        th.norm() <= radius * (1.0 + 1e-6) && yv.norm() <= radius * (1.0 + 1e-6),
        "duality gap queried outside the feasible sets"
    );

    // max over the dual ball of <r, y> - 1/2 y^T M y with r = b - A theta.
    let r = &model.b - &model.a * &th;
    let unconstrained = model.m_inv(&r);
    let (max_val, y_witness) = if unconstrained.norm() <= radius {
        (0.5 * r.dot(&unconstrained), unconstrained)
    } else {
        let y_opt = projected_ascent(model, &r, radius, &unconstrained);
        let val = r.dot(&y_opt) - 0.5 * (&model.m * &y_opt).dot(&y_opt);
        (val, y_opt)
    };

    // min over the primal ball: <b, y> - 1/2 ||y||^2_M - D ||A^T y||, at
    // theta = D * A^T y / ||A^T y||.
    let at_y = model.a.transpose() * &yv;
    let at_norm = at_y.norm();
    let min_val = model.b.dot(&yv) - 0.5 * (&model.m * &yv).dot(&yv) - radius * at_norm;
    let theta_witness = if at_norm > 0.0 {
        (radius / at_norm) * at_y
    } else {
        DVector::zeros(model.dim())
    };

    let mut gap = max_val - min_val;
    if gap < 0.0 {
        assert!(
            gap >= -NEGATIVE_GAP_CLAMP,
            "duality gap is negative beyond round-off: {gap}"
        );
        gap = 0.0;
    }
    GapReport {
        gap,
        y_witness: y_witness.as_slice().to_vec(),
        theta_witness: theta_witness.as_slice().to_vec(),
    }
}

/// Projected gradient ascent on `f(y) = <r, y> - 1/2 y^T M y` over the ball,
/// run to a projected-gradient norm of 1e-8.
fn projected_ascent(
    model: &ExactModel,
    r: &DVector<f64>,
    radius: f64,
    warm: &DVector<f64>,
) -> DVector<f64> {
    let step = 1.0 / model.lambda_max_m.max(f64::MIN_POSITIVE);
    let mut y = warm.clone();
    project(&mut y, radius);
    for _ in 0..100_000 {
        let grad = r - &model.m * &y;
        let mut next = &y + step * &grad;
        project(&mut next, radius);
        let movement = (&next - &y).norm() / step;
        y = next;
        if movement <= ASCENT_GRAD_TOL {
            break;
        }
    }
    y
}

fn project(y: &mut DVector<f64>, radius: f64) {
    let n = y.norm();
    if n > radius {
        *y *= radius / n;
    }
}
