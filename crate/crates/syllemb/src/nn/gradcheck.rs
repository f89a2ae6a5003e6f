use alloc::vec::Vec;

use crate::math;

/// Compare analytic gradients against central finite differences.
///
/// `f` evaluates the scalar loss at a parameter vector; `analytic` is the
/// gradient to verify, one entry per parameter. Returns the maximum over
/// coordinates of `|analytic - numeric| / (|analytic| + |numeric| + 1e-12)`.
pub fn check_gradient(
    mut f: impl FnMut(&[f64]) -> f64,
    params: &[f64],
    analytic: &[f64],
) -> f64 {
    assert_eq!(params.len(), analytic.len(), "one gradient entry per parameter");
    const STEP: f64 = 1e-5;
    let mut work: Vec<f64> = params.to_vec();
    let mut worst = 0.0f64;
    for i in 0..params.len() {
        let orig = work[i];
        work[i] = orig + STEP;
        let plus = f(&work);
        work[i] = orig - STEP;
        let minus = f(&work);
        work[i] = orig;
        let numeric = (plus - minus) / (2.0 * STEP);
        let err = math::abs(analytic[i] - numeric)
            / (math::abs(analytic[i]) + math::abs(numeric) + 1e-12);
        if err > worst {
            worst = err;
        }
    }
    worst
}
