use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::estimators::FactoredCorrelation;

/// Applies the `alpha`-th matrix power of the shrunk correlation
/// `gamma * I + (1 - gamma) * U diag(d) U^T` to `v` without forming any p × p
/// matrix.
///
/// Writing the matrix as `gamma * Z` with `Z = I + U M U^T` and
/// `M = (1 - gamma) / gamma * diag(d)`, the power is
/// `gamma^alpha * (I - U (I - (I + M)^alpha) U^T)`. `I + M` is diagonal, so the
/// cost is two passes over `U`: O(p·m).
pub fn factored_power_apply(
    corr: &FactoredCorrelation,
    alpha: f64,
    v: &DVector<f64>,
) -> Result<DVector<f64>> {
    if !alpha.is_finite() {
        return Err(Error::invalid(format!("exponent {alpha} is not finite")));
    }
    if v.len() != corr.dim() {
        return Err(Error::DimensionMismatch {
            expected: corr.dim(),
            actual: v.len(),
        });
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("vector has non-finite entries"));
    }
    let gamma = corr.gamma();
    let ratio = (1.0 - gamma) / gamma;
    let scale = gamma.powf(alpha);
    let u = corr.basis();

    // gamma^alpha * (I_m - (I_m + M)^alpha), diagonal.
    let inner = corr
        .eigenvalues()
        .map(|d| scale * (1.0 - (1.0 + ratio * d).powf(alpha)));
    let projected = u.tr_mul(v).component_mul(&inner);
    let mut out = v * scale;
    out.gemv(-1.0, u, &projected, 1.0);
    Ok(out)
}
