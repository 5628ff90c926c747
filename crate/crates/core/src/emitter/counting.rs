//! Photon counting: Bernoulli jump test plus the exact no-jump population map.

use super::ModelError;

/// Largest step accepted by [`photon_counting_step`]; the jump test needs `c·dt ≪ 1`.
pub const MAX_COUNTING_DT: f64 = 1e-3;

/// Population after `t` of uninterrupted no-jump evolution from `c`.
#[inline]
pub fn no_jump_population(c: f64, t: f64) -> f64 {
    let decayed = c * (-t).exp();
    decayed / (1.0 - c + decayed)
}

/// Returns `(c_next, jumped)`. A jump happens when `u < c·dt` and sends the
/// emitter to the ground state.
pub fn photon_counting_step(c: f64, u: f64, dt: f64) -> Result<(f64, bool), ModelError> {
    if !(dt > 0.0 && dt <= MAX_COUNTING_DT) {
        return Err(ModelError::CountingStepTooLarge { dt, max: MAX_COUNTING_DT });
    }
    Ok(counting_step_unchecked(c, u, dt))
}

#[inline]
pub(crate) fn counting_step_unchecked(c: f64, u: f64, dt: f64) -> (f64, bool) {
    if u < c * dt {
        (0.0, true)
    } else {
        (no_jump_population(c, dt), false)
    }
}
