//! The eigenvalue chord inequality chain.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geometry::{minkowski_interpolate, rasterize, DeformationParam, Grid, ShapeSpec};
use crate::scalar::Real;
use crate::spectral::{assemble, rayleigh_quotient, smallest_eigenpair, EigenPair, PotentialSpec};
use crate::supconv::sup_convolve;
use crate::tolerances;

/// Knobs shared by the verification pipelines.
#[derive(Debug, Clone, Copy)]
pub struct VerifyParams<T> {
    pub solver_tol: T,
    pub max_iter: usize,
    /// `C` in the discretization allowance `slack2 >= -C*h`.
    pub chord_allowance: T,
    /// Allowance constant for the inverse-square-root concavity margin.
    pub inv_sqrt_allowance: T,
    pub seed: u64,
}

impl<T: Real> Default for VerifyParams<T> {
    fn default() -> Self {
        VerifyParams {
            solver_tol: T::of(tolerances::DEFAULT_SOLVER_TOL),
            max_iter: tolerances::DEFAULT_MAX_ITER,
            chord_allowance: T::of(tolerances::DEFAULT_CHORD_ALLOWANCE),
            inv_sqrt_allowance: T::of(tolerances::DEFAULT_INV_SQRT_ALLOWANCE),
            seed: 0,
        }
    }
}

/// One row of the chain `lambda_t <= R(ubar) <= (1-t) lambda_0 + t lambda_1`.
#[derive(Debug, Clone)]
pub struct BmRow<T> {
    pub t: T,
    pub lambda0: T,
    pub lambda1: T,
    pub lambda_t: T,
    pub rayleigh_ubar: T,
    pub chord: T,
    /// `rayleigh_ubar - lambda_t`; nonnegative up to solver tolerance by the
    /// discrete variational principle.
    pub slack1: T,
    /// `chord - rayleigh_ubar`; nonnegative up to the O(h) allowance.
    pub slack2: T,
    pub h: T,
    pub flags: String,
}

#[derive(Debug, Clone)]
pub struct BMReport<T> {
    pub rows: Vec<BmRow<T>>,
    pub potential_is_zero: bool,
    pub solver_tol: T,
    pub chord_allowance: T,
    pub inv_sqrt_allowance: T,
}

impl<T: Real> BMReport<T> {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.flags == "ok")
    }

    pub const CSV_HEADER: &'static str =
        "t,lambda0,lambda1,lambda_t,rayleigh_ubar,chord,slack1,slack2,h,flags";

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                r.t,
                r.lambda0,
                r.lambda1,
                r.lambda_t,
                r.rayleigh_ubar,
                r.chord,
                r.slack1,
                r.slack2,
                r.h,
                r.flags
            )
            .unwrap();
        }
        out
    }
}

/// Runs the full chain at every `t`: rasterize the operands once, solve their
/// eigenpairs, then per `t` build the interpolant, solve its eigenpair, build
/// the sup-convolution and record both slacks. `slack1 >= -tol` is exact at
/// the discrete level; `slack2 >= -C*h` allows for rasterization error.
pub fn verify_bm<T: Real>(
    spec0: &ShapeSpec<T>,
    spec1: &ShapeSpec<T>,
    v: &PotentialSpec<T>,
    t_list: &[T],
    grid: &Grid<T>,
    params: &VerifyParams<T>,
) -> Result<BMReport<T>> {
    for &t in t_list {
        if !(t > T::zero() && t < T::one()) {
            return Err(Error::InvalidParameter(format!(
                "deformation values must lie strictly inside (0,1), got {t}"
            )));
        }
    }
    let d0 = rasterize(spec0, grid)?;
    let d1 = rasterize(spec1, grid)?;
    let e0 = smallest_eigenpair(&assemble(&d0, v)?, params.solver_tol, params.max_iter)?;
    let e1 = smallest_eigenpair(&assemble(&d1, v)?, params.solver_tol, params.max_iter)?;

    let mut ts: Vec<T> = t_list.to_vec();
    ts.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut rows = Vec::with_capacity(ts.len());
    for &tv in &ts {
        let row = chain_row(&d0, &e0, &d1, &e1, v, tv, params)
            .map_err(|e| e.at_param(tv.as_f64()))?;
        rows.push(row);
    }
    Ok(BMReport {
        rows,
        potential_is_zero: v.is_zero(),
        solver_tol: params.solver_tol,
        chord_allowance: params.chord_allowance,
        inv_sqrt_allowance: params.inv_sqrt_allowance,
    })
}

fn chain_row<T: Real>(
    d0: &crate::geometry::GridDomain<T>,
    e0: &EigenPair<T>,
    d1: &crate::geometry::GridDomain<T>,
    e1: &EigenPair<T>,
    v: &PotentialSpec<T>,
    tv: T,
    params: &VerifyParams<T>,
) -> Result<BmRow<T>> {
    let h = d0.grid.h;
    let t = DeformationParam::new(tv)?;
    let dt = minkowski_interpolate(d0, d1, t)?;
    let et = smallest_eigenpair(&assemble(&dt, v)?, params.solver_tol, params.max_iter)?;
    let ubar = sup_convolve(d0, e0, d1, e1, t, &dt)?;
    let r = rayleigh_quotient(&ubar.ubar, &dt, v)?;
    let chord = (T::one() - tv) * e0.lambda + tv * e1.lambda;
    let slack1 = r - et.lambda;
    let slack2 = chord - r;
    let mut flags = Vec::new();
    if slack1 < -params.solver_tol {
        flags.push("slack1_violation");
    }
    if slack2 < -params.chord_allowance * h {
        flags.push("slack2_deficit");
    }
    let flags = if flags.is_empty() { "ok".to_string() } else { flags.join(";") };
    Ok(BmRow {
        t: tv,
        lambda0: e0.lambda,
        lambda1: e1.lambda,
        lambda_t: et.lambda,
        rayleigh_ubar: r,
        chord,
        slack1,
        slack2,
        h,
        flags,
    })
}
