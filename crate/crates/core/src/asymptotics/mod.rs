//! Asymptotic forms of `Z_{n,k}`: the Gaussian approximation through the
//! unconditional log-affine fit, and three forms along the GFC curve.

mod ips;
mod mittag_leffler;

pub use ips::{
    gale_matrix, gaussian_approx_log_z, gaussian_approx_log_z_base, gaussian_exponent, ips_fit, LogAffineFit, IPS_MAX_ITER,
    IPS_TOL,
};
pub use mittag_leffler::{
    ln_gamma, mittag_leffler_log_density, mittag_leffler_log_integral, mittag_leffler_series, SERIES_MAX_TERMS,
    SERIES_REL_TOL,
};

use crate::error::{domain, Result};
use crate::partition::ProblemSpec;
use crate::DoubleDouble;
use libm::lgamma;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AsymptoticForm {
    /// `k` fixed, `α > 0`.
    FixedKPos,
    /// `k` fixed, `α < 0`.
    FixedKNeg,
    /// `k ~ u n^α`, `0 < α < 1`.
    MittagLeffler,
}

/// `ln Z_{n,k}` at `x_i = (1-α)_{i-1}/i!` from the chosen asymptotic form.
pub fn gfc_asymptotic_log_z(spec: &ProblemSpec, alpha: f64, form: AsymptoticForm) -> Result<f64> {
    if spec.is_restricted() {
        return domain("asymptotic forms are for the unrestricted support");
    }
    let (n, k) = (spec.n as f64, spec.k as f64);
    let ln_kfact = lgamma(k);
    match form {
        AsymptoticForm::FixedKPos => {
            if !(alpha > 0.0 && alpha < 1.0) {
                return domain(format!("fixed-k form for alpha > 0 needs 0 < alpha < 1, got {alpha}"));
            }
            Ok((-1.0 - alpha) * n.ln() - ln_kfact - (k - 1.0) * alpha.ln() - lgamma(1.0 - alpha))
        }
        AsymptoticForm::FixedKNeg => {
            if !(alpha < 0.0) {
                return domain(format!("fixed-k form for alpha < 0 needs alpha < 0, got {alpha}"));
            }
            Ok((-1.0 - k * alpha) * n.ln() - ln_kfact - (k - 1.0) * (-alpha).ln() - lgamma(1.0 - k * alpha))
        }
        AsymptoticForm::MittagLeffler => {
            if !(alpha > 0.0 && alpha < 1.0) {
                return domain(format!("Mittag-Leffler form needs 0 < alpha < 1, got {alpha}"));
            }
            let u = k / n.powf(alpha);
            let g = mittag_leffler_log_density::<DoubleDouble>(alpha, u)?;
            Ok((-1.0 - alpha) * n.ln() - ln_kfact - (k - 1.0) * alpha.ln() + g)
        }
    }
}
