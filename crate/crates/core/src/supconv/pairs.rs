//! Optimal decompositions and the first-derivative identity residual.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::{gradient_field, EigenPair};

use super::field::SupConvField;

/// An admissible decomposition `z = (1-t) x0 + t x1` attaining the supremum.
#[derive(Debug, Clone, Copy)]
pub struct OptimalPair<T> {
    pub z: [T; 2],
    pub x0: [T; 2],
    pub x1: [T; 2],
    pub value: T,
}

/// Residuals of the logarithmic-derivative identity at an optimal pair:
/// `pair` compares `grad u0 / u0 (x0)` against `grad u1 / u1 (x1)`, `full`
/// additionally compares both against `grad ubar / ubar (z)`.
#[derive(Debug, Clone, Copy)]
pub struct IdentityResidual<T> {
    pub pair: T,
    pub full: T,
}

/// Returns the stored optimal decompositions for cells of the interior core,
/// asserting discrete interiority of both endpoints (signed distance at most
/// `-h` to the respective boundary).
pub fn optimal_pairs<T: Real>(
    f: &SupConvField<T>,
    samples: &[(u32, u32)],
) -> Result<Vec<OptimalPair<T>>> {
    let grid = f.domain.grid;
    let h = grid.h;
    let tv = f.t.value();
    let mut out = Vec::with_capacity(samples.len());
    for &(i, j) in samples {
        let (i, j) = (i as usize, j as usize);
        let k = grid.idx(i, j);
        if f.domain.phi[k] > -f.core_margin {
            return Err(Error::PreconditionViolated(format!(
                "sampled cell ({i},{j}) lies outside the interior core"
            )));
        }
        let (x0, x1) = f.decomposition(i, j).ok_or_else(|| {
            Error::InteriorityViolation(format!("core cell ({i},{j}) has no stored optimal pair"))
        })?;
        if tv < T::one() && f.d0.phi_at(x0) > -h {
            return Err(Error::InteriorityViolation(format!(
                "x0 = ({}, {}) too close to the first boundary",
                x0[0], x0[1]
            )));
        }
        if tv > T::zero() && f.d1.phi_at(x1) > -h {
            return Err(Error::InteriorityViolation(format!(
                "x1 = ({}, {}) too close to the second boundary",
                x1[0], x1[1]
            )));
        }
        out.push(OptimalPair { z: grid.pos(i, j), x0, x1, value: f.ubar.data[k] });
    }
    Ok(out)
}

/// Batch residual evaluation; gradients are assembled once.
pub fn identity_residuals<T: Real>(
    f: &SupConvField<T>,
    e0: &EigenPair<T>,
    e1: &EigenPair<T>,
    pairs: &[OptimalPair<T>],
) -> Result<Vec<IdentityResidual<T>>> {
    let g0 = gradient_field(&e0.u, &e0.u.grid);
    let g1 = gradient_field(&e1.u, &e1.u.grid);
    let gb = gradient_field(&f.ubar, &f.ubar.grid);
    let guard = T::of(crate::tolerances::RESIDUAL_GUARD_FACTOR) * f.value_floor;
    let mut out = Vec::with_capacity(pairs.len());
    for p in pairs {
        let u0v = e0.u.sample(p.x0);
        let u1v = e1.u.sample(p.x1);
        if u0v < guard || u1v < guard {
            return Err(Error::ResidualUnreliable {
                value: u0v.min(u1v).as_f64(),
                floor: f.value_floor.as_f64(),
            });
        }
        let l0 = div(g0.sample(p.x0), u0v);
        let l1 = div(g1.sample(p.x1), u1v);
        let scale = T::one() + norm(l0);
        let pair = norm(sub(l0, l1)) / scale;
        let ubv = f.ubar.sample(p.z);
        let full = if ubv > T::zero() {
            let lb = div(gb.sample(p.z), ubv);
            (norm(sub(lb, l0)).max(norm(sub(lb, l1)))) / scale
        } else {
            T::infinity()
        };
        out.push(IdentityResidual { pair, full });
    }
    Ok(out)
}

/// Single-pair wrapper around [`identity_residuals`].
pub fn gradient_identity_residual<T: Real>(
    f: &SupConvField<T>,
    p: &OptimalPair<T>,
    e0: &EigenPair<T>,
    e1: &EigenPair<T>,
) -> Result<IdentityResidual<T>> {
    Ok(identity_residuals(f, e0, e1, std::slice::from_ref(p))?[0])
}

#[inline]
fn div<T: Real>(v: [T; 2], s: T) -> [T; 2] {
    [v[0] / s, v[1] / s]
}

#[inline]
fn sub<T: Real>(a: [T; 2], b: [T; 2]) -> [T; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
fn norm<T: Real>(v: [T; 2]) -> T {
    v[0].hypot(v[1])
}
