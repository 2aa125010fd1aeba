//! Deformation scan for eigenvalue discontinuities on a nonconvex pair.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geometry::{Grid, ShapeSpec};
use crate::scalar::Real;
use crate::spectral::PotentialSpec;
use crate::verify::{verify_bm, BMReport, VerifyParams};

/// Eigenvalues along a deformation grid with adjacent-difference statistics.
#[derive(Debug, Clone)]
pub struct JumpReport<T> {
    pub ts: Vec<T>,
    pub lambdas: Vec<T>,
    /// `lambda_{i+1} - lambda_i`.
    pub diffs: Vec<T>,
    /// `max |diff| / median |diff|`: scale-free jump detection.
    pub max_jump_ratio: T,
    /// Midpoint of the adjacent pair with the largest difference.
    pub jump_location: T,
    pub lambda0: T,
    pub lambda1: T,
}

impl<T: Real> JumpReport<T> {
    pub const CSV_HEADER: &'static str = "t,lambda_t,adjacent_diff";

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(Self::CSV_HEADER);
        out.push('\n');
        for (k, (&t, &l)) in self.ts.iter().zip(&self.lambdas).enumerate() {
            let d = if k == 0 { T::zero() } else { self.diffs[k - 1] };
            writeln!(out, "{t},{l},{d}").unwrap();
        }
        out
    }
}

/// Scans the deformation of the smoothed slit annulus (inner radius 1, outer
/// radius 2, angular gap `epsilon`, smoothing `rho`) into the disk of radius
/// 2. The chord inequality is still asserted at every `t`; the scan reports
/// where adjacent eigenvalue differences spike (the interpolant's hole
/// closing), without asserting any structure of `t -> lambda_t`.
pub fn counterexample_scan<T: Real>(
    epsilon: T,
    rho: T,
    t_grid: &[T],
    grid: &Grid<T>,
    params: &VerifyParams<T>,
) -> Result<(BMReport<T>, JumpReport<T>)> {
    if t_grid.len() < 20 {
        return Err(Error::InvalidParameter(format!(
            "the scan needs at least 20 deformation samples, got {}",
            t_grid.len()
        )));
    }
    for w in t_grid.windows(2) {
        if !(w[0] < w[1]) {
            return Err(Error::InvalidParameter(
                "deformation grid must be strictly increasing".into(),
            ));
        }
    }
    let spec0 =
        ShapeSpec::AnnulusSector { r_inner: T::one(), r_outer: T::of(2.0), gap: epsilon, smoothing: rho };
    let spec1 = ShapeSpec::Disk { center: [T::zero(), T::zero()], radius: T::of(2.0) };
    let report = verify_bm(&spec0, &spec1, &PotentialSpec::Zero, t_grid, grid, params)?;
    let jump = jump_statistics(&report);
    Ok((report, jump))
}

pub(crate) fn jump_statistics<T: Real>(report: &BMReport<T>) -> JumpReport<T> {
    let ts: Vec<T> = report.rows.iter().map(|r| r.t).collect();
    let lambdas: Vec<T> = report.rows.iter().map(|r| r.lambda_t).collect();
    let diffs: Vec<T> = lambdas.windows(2).map(|w| w[1] - w[0]).collect();
    let mut mags: Vec<T> = diffs.iter().map(|d| d.abs()).collect();
    mags.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = if mags.is_empty() {
        T::zero()
    } else if mags.len() % 2 == 1 {
        mags[mags.len() / 2]
    } else {
        (mags[mags.len() / 2 - 1] + mags[mags.len() / 2]) / T::of(2.0)
    };
    let (mut max_ratio, mut loc) = (T::zero(), T::nan());
    for (k, d) in diffs.iter().enumerate() {
        let ratio = if median > T::zero() { d.abs() / median } else { T::infinity() };
        if ratio > max_ratio {
            max_ratio = ratio;
            loc = (ts[k] + ts[k + 1]) / T::of(2.0);
        }
    }
    JumpReport {
        ts,
        lambdas,
        diffs,
        max_jump_ratio: max_ratio,
        jump_location: loc,
        lambda0: report.rows.first().map(|r| r.lambda0).unwrap_or_else(T::nan),
        lambda1: report.rows.first().map(|r| r.lambda1).unwrap_or_else(T::nan),
    }
}
