//! Inverse-square-root concavity of V=0 eigenvalues under deformation.

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::bm::BMReport;

#[derive(Debug, Clone, Copy)]
pub struct HomogeneityCheck<T> {
    pub passed: bool,
    /// Smallest margin `lambda_t^{-1/2} - (1-t) lambda_0^{-1/2} - t lambda_1^{-1/2}`.
    pub worst_margin: T,
}

/// For V=0 the eigenvalue scaling in the domain size upgrades the chord
/// inequality to `lambda_t^{-1/2} >= (1-t) lambda_0^{-1/2} + t lambda_1^{-1/2}`;
/// checks every report row within the `C*h` allowance.
pub fn homogeneity_check<T: Real>(report: &BMReport<T>) -> Result<HomogeneityCheck<T>> {
    if !report.potential_is_zero {
        return Err(Error::PreconditionViolated(
            "homogeneity only holds for the zero potential".into(),
        ));
    }
    let mut worst = T::infinity();
    let mut passed = true;
    for r in &report.rows {
        if !(r.lambda0 > T::zero() && r.lambda1 > T::zero() && r.lambda_t > T::zero()) {
            return Err(Error::PreconditionViolated("eigenvalues must be positive".into()));
        }
        let lhs = r.lambda_t.sqrt().recip();
        let rhs = (T::one() - r.t) * r.lambda0.sqrt().recip() + r.t * r.lambda1.sqrt().recip();
        let margin = lhs - rhs;
        worst = worst.min(margin);
        if margin < -report.inv_sqrt_allowance * r.h {
            passed = false;
        }
    }
    Ok(HomogeneityCheck { passed, worst_margin: worst })
}
