//! Potentials `V` with convexity validation.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Convex potential evaluated at cell centers. Non-convex parameterizations
/// are rejected by [`PotentialSpec::validate`], which gates operator assembly.
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialSpec<T> {
    Zero,
    Constant { c: T },
    /// `c * |x - center|^2` with `c >= 0`.
    Quadratic { center: [T; 2], coeff: T },
    /// `(x - center)^T Q (x - center)` with positive semidefinite
    /// `Q = [[qxx, qxy], [qxy, qyy]]`.
    AnisotropicQuadratic { center: [T; 2], qxx: T, qxy: T, qyy: T },
}

impl<T: Real> PotentialSpec<T> {
    pub fn validate(&self) -> Result<()> {
        match self {
            PotentialSpec::Zero | PotentialSpec::Constant { .. } => Ok(()),
            PotentialSpec::Quadratic { coeff, .. } => {
                if *coeff >= T::zero() {
                    Ok(())
                } else {
                    Err(Error::PotentialNotConvex)
                }
            }
            PotentialSpec::AnisotropicQuadratic { qxx, qxy, qyy, .. } => {
                if *qxx >= T::zero() && *qyy >= T::zero() && *qxx * *qyy - *qxy * *qxy >= T::zero()
                {
                    Ok(())
                } else {
                    Err(Error::PotentialNotConvex)
                }
            }
        }
    }

    pub fn declared_convex(&self) -> bool {
        self.validate().is_ok()
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, PotentialSpec::Zero)
    }

    #[inline]
    pub fn eval(&self, p: [T; 2]) -> T {
        match self {
            PotentialSpec::Zero => T::zero(),
            PotentialSpec::Constant { c } => *c,
            PotentialSpec::Quadratic { center, coeff } => {
                let dx = p[0] - center[0];
                let dy = p[1] - center[1];
                *coeff * (dx * dx + dy * dy)
            }
            PotentialSpec::AnisotropicQuadratic { center, qxx, qxy, qyy } => {
                let dx = p[0] - center[0];
                let dy = p[1] - center[1];
                *qxx * dx * dx + T::of(2.0) * *qxy * dx * dy + *qyy * dy * dy
            }
        }
    }
}

impl<T: Real> fmt::Display for PotentialSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PotentialSpec::Zero => write!(f, "V=0"),
            PotentialSpec::Constant { c } => write!(f, "V={c}"),
            PotentialSpec::Quadratic { center, coeff } => {
                write!(f, "V={coeff}|x-({},{})|^2", center[0], center[1])
            }
            PotentialSpec::AnisotropicQuadratic { qxx, qxy, qyy, .. } => {
                write!(f, "V=quad({qxx},{qxy},{qyy})")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn convexity_gate() {
        assert!(PotentialSpec::<f64>::Zero.validate().is_ok());
        assert!(PotentialSpec::Constant { c: -3.0 }.validate().is_ok());
        assert!(PotentialSpec::Quadratic { center: [0.0, 0.0], coeff: 2.0 }.validate().is_ok());
        assert!(PotentialSpec::Quadratic { center: [0.0, 0.0], coeff: -0.1 }.validate().is_err());
        let saddle =
            PotentialSpec::AnisotropicQuadratic { center: [0.0, 0.0], qxx: 1.0, qxy: 2.0, qyy: 1.0 };
        assert!(saddle.validate().is_err());
        let ok =
            PotentialSpec::AnisotropicQuadratic { center: [0.0, 0.0], qxx: 2.0, qxy: 0.5, qyy: 1.0 };
        assert!(ok.validate().is_ok());
    }

    #[test]
    fn eval_quadratic() {
        let v = PotentialSpec::Quadratic { center: [1.0, 0.0], coeff: 3.0 };
        assert_eq!(v.eval([2.0, 0.0]), 3.0);
        assert_eq!(v.eval([1.0, 2.0]), 12.0);
    }
}
