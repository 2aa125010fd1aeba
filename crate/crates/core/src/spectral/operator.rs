//! Matrix-free 5-point Dirichlet operator with diagonal potential.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::geometry::GridDomain;
use crate::scalar::{comp_sum, Real};

use super::potential::PotentialSpec;

/// `(-Δ_h + V)` on the inside cells of a domain, Dirichlet data imposed by
/// zero extension: neighbors outside the mask contribute nothing. Symmetric
/// and diagonally dominant for `V >= 0`.
pub struct DiscreteOperator<T> {
    pub domain: GridDomain<T>,
    /// Interior cell -> flat grid index.
    cells: Vec<u32>,
    /// For each interior cell, the interior indices of its 4 neighbors
    /// (`-1` when the neighbor is outside the mask).
    nbrs: Vec<[i32; 4]>,
    diag: Vec<T>,
    inv_h2: T,
}

/// Assembles the discrete operator; rejects non-convex potentials.
pub fn assemble<T: Real>(d: &GridDomain<T>, v: &PotentialSpec<T>) -> Result<DiscreteOperator<T>> {
    v.validate()?;
    if !v.declared_convex() {
        return Err(Error::PotentialNotConvex);
    }
    let grid = d.grid;
    let n = d.cell_count();
    let mut index_map = vec![-1i32; grid.len()];
    for (k, &(i, j)) in d.inside_cells().iter().enumerate() {
        index_map[grid.idx(i as usize, j as usize)] = k as i32;
    }
    let inv_h2 = T::one() / (grid.h * grid.h);
    let mut cells = Vec::with_capacity(n);
    let mut nbrs = Vec::with_capacity(n);
    let mut diag = Vec::with_capacity(n);
    for &(i, j) in d.inside_cells() {
        let (i, j) = (i as usize, j as usize);
        cells.push(grid.idx(i, j) as u32);
        let nb = [
            if i > 0 { index_map[grid.idx(i - 1, j)] } else { -1 },
            if i + 1 < grid.nx { index_map[grid.idx(i + 1, j)] } else { -1 },
            if j > 0 { index_map[grid.idx(i, j - 1)] } else { -1 },
            if j + 1 < grid.ny { index_map[grid.idx(i, j + 1)] } else { -1 },
        ];
        nbrs.push(nb);
        diag.push(T::of(4.0) * inv_h2 + v.eval(grid.pos(i, j)));
    }
    Ok(DiscreteOperator { domain: d.clone(), cells, nbrs, diag, inv_h2 })
}

impl<T: Real> DiscreteOperator<T> {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn h(&self) -> T {
        self.domain.grid.h
    }

    /// `out = A w`.
    pub fn apply(&self, w: &[T], out: &mut [T]) {
        debug_assert_eq!(w.len(), self.dim());
        debug_assert_eq!(out.len(), self.dim());
        let inv_h2 = self.inv_h2;
        out.par_iter_mut().enumerate().for_each(|(k, o)| {
            let nb = &self.nbrs[k];
            let mut s = T::zero();
            for &n in nb {
                if n >= 0 {
                    s += w[n as usize];
                }
            }
            *o = self.diag[k] * w[k] - inv_h2 * s;
        });
    }

    /// Gershgorin bounds `(lower, upper)` on the spectrum.
    pub fn gershgorin_bounds(&self) -> (T, T) {
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for (k, nb) in self.nbrs.iter().enumerate() {
            let m = nb.iter().filter(|&&n| n >= 0).count();
            let off = T::from_usize(m).unwrap() * self.inv_h2;
            lo = lo.min(self.diag[k] - off);
            hi = hi.max(self.diag[k] + off);
        }
        (lo, hi)
    }

    /// Expands an interior vector into a full-grid field (zeros outside).
    pub fn to_field(&self, w: &[T]) -> ScalarField<T> {
        let mut f = ScalarField::zeros(self.domain.grid);
        for (k, &c) in self.cells.iter().enumerate() {
            f.data[c as usize] = w[k];
        }
        f
    }

    /// Restricts a full-grid field to the interior vector.
    pub fn from_field(&self, f: &ScalarField<T>) -> Vec<T> {
        self.cells.iter().map(|&c| f.data[c as usize]).collect()
    }
}

const DOT_CHUNK: usize = 4096;

/// Deterministic dot product: fixed-size chunk partials combined by
/// compensated summation, independent of thread count.
pub fn det_dot<T: Real>(a: &[T], b: &[T]) -> T {
    let partials: Vec<T> = a
        .par_chunks(DOT_CHUNK)
        .zip(b.par_chunks(DOT_CHUNK))
        .map(|(ca, cb)| {
            let mut s = T::zero();
            for (x, y) in ca.iter().zip(cb) {
                s += *x * *y;
            }
            s
        })
        .collect();
    comp_sum(&partials)
}

pub fn det_norm<T: Real>(a: &[T]) -> T {
    det_dot(a, a).sqrt()
}
