//! Construction of the sup-convolution field.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::geometry::{DeformationParam, GridDomain};
use crate::scalar::Real;
use crate::spectral::EigenPair;
use crate::tolerances::CORE_MARGIN_CELLS;

/// Sampled sup-convolution
/// `ubar(z) = max_{x0} u0(x0)^{1-t} * u1((z - (1-t) x0)/t)^t`
/// over the interpolated domain, with the optimal `x0` recorded per cell.
///
/// `x0` ranges over the grid cells of the first domain; `u1` is sampled
/// bilinearly and extended by zero, which never overestimates the supremum.
#[derive(Debug, Clone)]
pub struct SupConvField<T> {
    /// The interpolant the field lives on.
    pub domain: GridDomain<T>,
    pub d0: GridDomain<T>,
    pub d1: GridDomain<T>,
    pub t: DeformationParam<T>,
    pub ubar: ScalarField<T>,
    /// Per-cell optimal `x0` (NaN outside the mask and on flagged cells).
    pub argmax: Vec<[T; 2]>,
    /// `delta`: minimum of `ubar` over the interior core.
    pub value_floor: T,
    /// `M`: larger of the two eigenfunction sup norms.
    pub value_ceiling: T,
    /// Inside cells with no admissible pair of positive value; expected only
    /// within one cell of the mask boundary, never in the interior core.
    pub flagged: Vec<(u32, u32)>,
    /// Core margin (length units) used for the value floor.
    pub core_margin: T,
}

#[derive(Clone)]
struct Candidate<T> {
    ix: u32,
    iy: u32,
    px: T,
    py: T,
    /// `px * (1-t)/t`, so that `x1 = z/t - q` needs no division per pair.
    qx: T,
    qy: T,
    u0: T,
    ln_pow: T,
    bound: T,
}

/// Shared per-build search state: the second eigenfunction, its support
/// bounds, and tiled upper bounds of `ln u1` for exact pruning.
struct SearchCtx<'a, T> {
    grid: crate::geometry::Grid<T>,
    u1: &'a [T],
    t: T,
    inv_h: T,
    tiles_x: usize,
    /// `ln` of the max of `u1` over each 4x4 tile expanded by one cell.
    tile_ln: Vec<T>,
}

const TILE: usize = 4;

impl<'a, T: Real> SearchCtx<'a, T> {
    fn new(grid: crate::geometry::Grid<T>, u1: &'a [T], t: T) -> Self {
        let tiles_x = grid.nx.div_ceil(TILE);
        let tiles_y = grid.ny.div_ceil(TILE);
        let mut tile_ln = vec![T::neg_infinity(); tiles_x * tiles_y];
        for (ty, row) in tile_ln.chunks_mut(tiles_x).enumerate() {
            for (tx, out) in row.iter_mut().enumerate() {
                let i0 = (tx * TILE).saturating_sub(1);
                let j0 = (ty * TILE).saturating_sub(1);
                let i1 = ((tx + 1) * TILE + 1).min(grid.nx);
                let j1 = ((ty + 1) * TILE + 1).min(grid.ny);
                let mut m = T::zero();
                for j in j0..j1 {
                    for i in i0..i1 {
                        m = m.max(u1[j * grid.nx + i]);
                    }
                }
                *out = if m > T::zero() { m.ln() } else { T::neg_infinity() };
            }
        }
        SearchCtx { grid, u1, t, inv_h: T::one() / grid.h, tiles_x, tile_ln }
    }

    /// Best candidate at `z`, scanning in bound order with exact pruning.
    /// Ties resolve to the lexicographically smallest `x0`.
    #[inline]
    fn scan(&self, z: [T; 2], cands: &[Candidate<T>]) -> Option<(T, [T; 2])> {
        let zt = [z[0] / self.t, z[1] / self.t];
        let nx = self.grid.nx;
        let ny = self.grid.ny;
        let mut best = T::neg_infinity();
        let mut arg = [T::nan(); 2];
        let mut have = false;
        for c in cands {
            if c.bound < best {
                break;
            }
            let x1x = zt[0] - c.qx;
            let x1y = zt[1] - c.qy;
            let cx = (x1x - self.grid.origin[0]) * self.inv_h;
            let cy = (x1y - self.grid.origin[1]) * self.inv_h;
            if !(cx > -T::one()) || !(cy > -T::one()) {
                continue;
            }
            let fx = cx.floor();
            let fy = cy.floor();
            let i0 = fx.to_isize().unwrap_or(isize::MAX);
            let j0 = fy.to_isize().unwrap_or(isize::MAX);
            if i0 >= nx as isize || j0 >= ny as isize {
                continue;
            }
            // exact upper bound from the tile maxima
            let ti = (i0.max(0) as usize) / TILE;
            let tj = (j0.max(0) as usize) / TILE;
            let tile = self.tile_ln[tj * self.tiles_x + ti];
            if c.ln_pow + self.t * tile < best {
                continue;
            }
            let tx = cx - fx;
            let ty = cy - fy;
            let one = T::one();
            let sample = |i: isize, j: isize| -> T {
                if i < 0 || j < 0 || i >= nx as isize || j >= ny as isize {
                    T::zero()
                } else {
                    self.u1[j as usize * nx + i as usize]
                }
            };
            let u1v = sample(i0, j0) * (one - tx) * (one - ty)
                + sample(i0 + 1, j0) * tx * (one - ty)
                + sample(i0, j0 + 1) * (one - tx) * ty
                + sample(i0 + 1, j0 + 1) * tx * ty;
            if !(u1v > T::zero()) {
                continue;
            }
            let v = c.ln_pow + self.t * u1v.ln();
            if v > best || (have && v == best && (c.px, c.py) < (arg[0], arg[1])) {
                best = v;
                arg = [c.px, c.py];
                have = true;
            }
        }
        if have {
            Some((best, arg))
        } else {
            None
        }
    }
}

/// Thresholded sup-convolution: a coarse first pass estimates the core floor
/// `delta`, then the full pass skips candidates that provably stay below it.
pub fn sup_convolve<T: Real>(
    d0: &GridDomain<T>,
    e0: &EigenPair<T>,
    d1: &GridDomain<T>,
    e1: &EigenPair<T>,
    t: DeformationParam<T>,
    dt: &GridDomain<T>,
) -> Result<SupConvField<T>> {
    build(d0, e0, d1, e1, t, dt, true)
}

/// Reference search without the threshold pruning; identical values on the
/// interior core by construction.
pub fn sup_convolve_reference<T: Real>(
    d0: &GridDomain<T>,
    e0: &EigenPair<T>,
    d1: &GridDomain<T>,
    e1: &EigenPair<T>,
    t: DeformationParam<T>,
    dt: &GridDomain<T>,
) -> Result<SupConvField<T>> {
    build(d0, e0, d1, e1, t, dt, false)
}

fn build<T: Real>(
    d0: &GridDomain<T>,
    e0: &EigenPair<T>,
    d1: &GridDomain<T>,
    e1: &EigenPair<T>,
    t: DeformationParam<T>,
    dt: &GridDomain<T>,
    thresholded: bool,
) -> Result<SupConvField<T>> {
    if d0.grid != d1.grid || d0.grid != dt.grid {
        return Err(Error::GridMismatch);
    }
    if e0.u.grid != d0.grid || e1.u.grid != d1.grid {
        return Err(Error::GridMismatch);
    }
    let grid = dt.grid;
    let tv = t.value();
    let margin = T::of(CORE_MARGIN_CELLS) * grid.h;

    // endpoints are literal copies; the exponents degenerate there
    if tv == T::zero() || tv == T::one() {
        let src = if tv == T::zero() { e0 } else { e1 };
        let mut ubar = ScalarField::zeros(grid);
        let mut argmax = vec![[T::nan(); 2]; grid.len()];
        for &(i, j) in dt.inside_cells() {
            let (i, j) = (i as usize, j as usize);
            let k = grid.idx(i, j);
            ubar.data[k] = src.u.data[k];
            argmax[k] = grid.pos(i, j);
        }
        let m = e0.u.max_abs().max(e1.u.max_abs());
        let floor = core_floor(dt, &ubar, margin);
        return Ok(SupConvField {
            domain: dt.clone(),
            d0: d0.clone(),
            d1: d1.clone(),
            t,
            ubar,
            argmax,
            value_floor: floor,
            value_ceiling: m,
            flagged: Vec::new(),
            core_margin: margin,
        });
    }

    let one_m_t = T::one() - tv;
    let m0 = e0.u.max_abs();
    let m1 = e1.u.max_abs();
    let m = m0.max(m1);
    let ln_m1_t = tv * m1.ln();

    // candidates sorted by u0 descending, ties by lexicographic position,
    // so a bound below the current best ends the scan without missing ties
    let factor = one_m_t / tv;
    let mut candidates: Vec<Candidate<T>> = d0
        .inside_cells()
        .iter()
        .map(|&(i, j)| {
            let p = grid.pos(i as usize, j as usize);
            let u0 = e0.u.data[grid.idx(i as usize, j as usize)];
            let ln_pow = one_m_t * u0.ln();
            Candidate {
                ix: i,
                iy: j,
                px: p[0],
                py: p[1],
                qx: p[0] * factor,
                qy: p[1] * factor,
                u0,
                ln_pow,
                bound: ln_pow + ln_m1_t,
            }
        })
        .collect();
    candidates.sort_by(|a, b| {
        b.u0.partial_cmp(&a.u0).unwrap().then_with(|| (a.ix, a.iy).cmp(&(b.ix, b.iy)))
    });

    let core = dt.core_cells(margin);
    let ctx = SearchCtx::new(grid, &e1.u.data, tv);

    let active: &[Candidate<T>] = if thresholded && !core.is_empty() {
        // coarse pass on a strided candidate subset lower-bounds ubar on the
        // core, hence lower-bounds delta = min_core ubar
        let coarse: Vec<Candidate<T>> = {
            let strided: Vec<Candidate<T>> = candidates
                .iter()
                .filter(|c| c.ix % 4 == 0 && c.iy % 4 == 0)
                .cloned()
                .collect();
            if strided.is_empty() {
                candidates.clone()
            } else {
                strided
            }
        };
        let delta_coarse = core
            .par_iter()
            .map(|&(i, j)| {
                let z = grid.pos(i as usize, j as usize);
                ctx.scan(z, &coarse).map(|(v, _)| v).unwrap_or(T::neg_infinity())
            })
            .reduce(|| T::infinity(), |a, b| a.min(b));
        if delta_coarse.is_finite() {
            let delta = delta_coarse.exp();
            // candidates with u0 below this cannot contribute a value >= delta
            // anywhere; the exponent guard stays sound when M < 1
            let denom = m.max(m.powf(tv));
            let cut = (delta / denom).powf(T::one() / one_m_t);
            let end = candidates.partition_point(|c| c.u0 >= cut);
            &candidates[..end]
        } else {
            &candidates[..]
        }
    } else {
        &candidates[..]
    };

    // full pass over every inside cell
    let results: Vec<(T, [T; 2])> = dt
        .inside_cells()
        .par_iter()
        .map(|&(i, j)| {
            let z = grid.pos(i as usize, j as usize);
            match ctx.scan(z, active) {
                Some((best, arg)) => (best.exp(), arg),
                None => (T::zero(), [T::nan(); 2]),
            }
        })
        .collect();

    let mut ubar = ScalarField::zeros(grid);
    let mut argmax = vec![[T::nan(); 2]; grid.len()];
    let mut flagged = Vec::new();
    for (&(i, j), (val, arg)) in dt.inside_cells().iter().zip(results) {
        let k = grid.idx(i as usize, j as usize);
        ubar.data[k] = val;
        argmax[k] = arg;
        if !(val > T::zero()) {
            flagged.push((i, j));
        }
    }
    let floor = core_floor(dt, &ubar, margin);
    Ok(SupConvField {
        domain: dt.clone(),
        d0: d0.clone(),
        d1: d1.clone(),
        t,
        ubar,
        argmax,
        value_floor: floor,
        value_ceiling: m,
        flagged,
        core_margin: margin,
    })
}

fn core_floor<T: Real>(dt: &GridDomain<T>, ubar: &ScalarField<T>, margin: T) -> T {
    let mut floor = T::infinity();
    let mut any = false;
    for (i, j) in dt.core_cells(margin) {
        floor = floor.min(ubar.get(i as usize, j as usize));
        any = true;
    }
    if any {
        floor
    } else {
        T::zero()
    }
}

impl<T: Real> SupConvField<T> {
    /// Optimal position stored for an inside cell, if the cell is not flagged.
    pub fn argmax_at(&self, i: usize, j: usize) -> Option<[T; 2]> {
        let a = self.argmax[self.domain.grid.idx(i, j)];
        if a[0].is_nan() {
            None
        } else {
            Some(a)
        }
    }

    /// The induced second point `x1 = (z - (1-t) x0) / t` for a cell's stored
    /// decomposition (`z` itself at the endpoints).
    pub fn decomposition(&self, i: usize, j: usize) -> Option<([T; 2], [T; 2])> {
        let z = self.domain.grid.pos(i, j);
        let tv = self.t.value();
        let x0 = self.argmax_at(i, j)?;
        if tv == T::zero() {
            return Some((x0, z));
        }
        if tv == T::one() {
            return Some((z, x0));
        }
        let one_m_t = T::one() - tv;
        let x1 = [(z[0] - one_m_t * x0[0]) / tv, (z[1] - one_m_t * x0[1]) / tv];
        Some((x0, x1))
    }
}
