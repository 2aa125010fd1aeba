//! Minkowski interpolation of rasterized domains by mask dilation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::grid::{
    distance_transform, signed_distance_to_mask, BitMask, DeformationParam, GridDomain,
};

/// Interpolates two domains on a shared grid. The scaled operands are
/// rasterized on a half-spacing lattice, their cell sums are marked there,
/// and the interpolant reads off the even sublattice (the original cell
/// centers). Halving the lattice keeps the sum's staircase bias at the same
/// sub-cell scale as direct rasterization, so grid-aligned rectangles come
/// out exactly and disks carry no extra boundary offset. Endpoints return
/// the operands bit-exactly.
pub fn minkowski_interpolate<T: Real>(
    d0: &GridDomain<T>,
    d1: &GridDomain<T>,
    t: DeformationParam<T>,
) -> Result<GridDomain<T>> {
    if d0.grid != d1.grid {
        return Err(Error::GridMismatch);
    }
    let tv = t.value();
    if tv == T::zero() {
        return Ok(d0.clone());
    }
    if tv == T::one() {
        return Ok(d1.clone());
    }
    let grid = d0.grid;
    let fine = Lattice {
        origin: grid.origin,
        h: grid.h / T::of(2.0),
        nx: 2 * grid.nx - 1,
        ny: 2 * grid.ny - 1,
    };
    let a = scaled_mask(d0, T::one() - tv, &fine);
    let b = scaled_mask(d1, tv, &fine);
    let (small, big) = if a.count() <= b.count() { (&a, &b) } else { (&b, &a) };
    let kx = (fine.origin[0] / fine.h).round().to_isize().unwrap();
    let ky = (fine.origin[1] / fine.h).round().to_isize().unwrap();
    let (jlo, jhi) = big.row_span();
    let mut sum = BitMask::new(fine.nx, fine.ny);
    for (i, j) in small.iter_set() {
        sum.or_shifted_rows(big, i as isize + kx, j as isize + ky, jlo, jhi);
    }
    let mut mask = BitMask::new(grid.nx, grid.ny);
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            if sum.get(2 * i, 2 * j) {
                mask.set(i, j, true);
            }
        }
    }
    let phi = signed_distance_to_mask(&mask, grid.h);
    GridDomain::from_parts(grid, mask, phi, None)
}

/// Target lattice for scaled-operand rasterization.
struct Lattice<T> {
    origin: [T; 2],
    h: T,
    nx: usize,
    ny: usize,
}

impl<T: Real> Lattice<T> {
    #[inline]
    fn pos(&self, i: usize, j: usize) -> [T; 2] {
        [
            self.origin[0] + T::from_usize(i).unwrap() * self.h,
            self.origin[1] + T::from_usize(j).unwrap() * self.h,
        ]
    }

    #[inline]
    fn coords(&self, p: [T; 2]) -> [T; 2] {
        [(p[0] - self.origin[0]) / self.h, (p[1] - self.origin[1]) / self.h]
    }
}

/// Rasterizes `s * d` on the target lattice: scales the analytic source when
/// one is attached, otherwise resamples the mask by nearest cell. A scaled
/// set smaller than one lattice cell snaps to the point nearest its centroid.
fn scaled_mask<T: Real>(d: &GridDomain<T>, s: T, lat: &Lattice<T>) -> BitMask {
    let grid = d.grid;
    let mut mask = BitMask::new(lat.nx, lat.ny);
    let centroid;
    if let Some(spec) = &d.source {
        let scaled = spec.scaled(s);
        if s > T::zero() {
            let snap = lat.h * T::of(1e-9);
            for j in 0..lat.ny {
                for i in 0..lat.nx {
                    if scaled.signed_distance(lat.pos(i, j)) < -snap {
                        mask.set(i, j, true);
                    }
                }
            }
        }
        let bb = scaled.bounding_box();
        centroid = [(bb[0] + bb[2]) / T::of(2.0), (bb[1] + bb[3]) / T::of(2.0)];
    } else {
        let mut sum = [T::zero(); 2];
        for &(i, j) in d.inside_cells() {
            let p = grid.pos(i as usize, j as usize);
            sum[0] += p[0];
            sum[1] += p[1];
        }
        let n = T::from_usize(d.cell_count()).unwrap();
        centroid = [sum[0] / n * s, sum[1] / n * s];
        if s > T::zero() {
            for j in 0..lat.ny {
                for i in 0..lat.nx {
                    let p = lat.pos(i, j);
                    let q = [p[0] / s, p[1] / s];
                    let c = grid.to_cell_coords(q);
                    let si = c[0].round().to_isize().unwrap_or(-1);
                    let sj = c[1].round().to_isize().unwrap_or(-1);
                    if si >= 0
                        && sj >= 0
                        && (si as usize) < grid.nx
                        && (sj as usize) < grid.ny
                        && d.inside.get(si as usize, sj as usize)
                    {
                        mask.set(i, j, true);
                    }
                }
            }
        }
    }
    if mask.count() == 0 {
        let c = lat.coords(centroid);
        let i = c[0].round().to_f64().unwrap_or(0.0).clamp(0.0, (lat.nx - 1) as f64) as usize;
        let j = c[1].round().to_f64().unwrap_or(0.0).clamp(0.0, (lat.ny - 1) as f64) as usize;
        mask.set(i, j, true);
    }
    mask
}

fn boundary_of(mask: &BitMask) -> BitMask {
    let (nx, ny) = (mask.nx(), mask.ny());
    let mut out = BitMask::new(nx, ny);
    for (i, j) in mask.iter_set() {
        let edge = i == 0
            || j == 0
            || i + 1 == nx
            || j + 1 == ny
            || !mask.get(i - 1, j)
            || !mask.get(i + 1, j)
            || !mask.get(i, j - 1)
            || !mask.get(i, j + 1);
        if edge {
            out.set(i, j, true);
        }
    }
    out
}

/// Maximum distance from a boundary cell of the interpolant to the Minkowski
/// sum of the two scaled operand boundaries. The continuum inclusion
/// `bdry(O_t) <= bdry((1-t)O_0) + bdry(t O_1)` predicts this is O(h).
pub fn boundary_inclusion_check<T: Real>(
    d0: &GridDomain<T>,
    d1: &GridDomain<T>,
    t: DeformationParam<T>,
) -> Result<T> {
    if d0.grid != d1.grid {
        return Err(Error::GridMismatch);
    }
    let interp = minkowski_interpolate(d0, d1, t)?;
    let grid = d0.grid;
    let tv = t.value();
    let coarse = Lattice { origin: grid.origin, h: grid.h, nx: grid.nx, ny: grid.ny };
    let b0 = boundary_of(&scaled_mask(d0, T::one() - tv, &coarse));
    let b1 = boundary_of(&scaled_mask(d1, tv, &coarse));
    let (small, big) = if b0.count() <= b1.count() { (&b0, &b1) } else { (&b1, &b0) };
    let kx = (grid.origin[0] / grid.h).round().to_isize().unwrap();
    let ky = (grid.origin[1] / grid.h).round().to_isize().unwrap();
    let mut sums = BitMask::new(grid.nx, grid.ny);
    for (i, j) in small.iter_set() {
        sums.or_shifted(big, i as isize + kx, j as isize + ky);
    }
    if sums.count() == 0 {
        return Err(Error::PreconditionViolated("boundary sum set is empty".into()));
    }
    let dist2 = distance_transform::<T>(&sums);
    let mut worst = T::zero();
    for (i, j) in boundary_of(&interp.inside).iter_set() {
        worst = worst.max(dist2[grid.idx(i, j)].sqrt() * grid.h);
    }
    Ok(worst)
}

/// Midpoint-based convexity test on the inside mask: for pairs of inside
/// cells whose index sums are even in both axes, the midpoint cell must be
/// inside. Exhaustive below 10^4 inside cells, otherwise 10^6 seeded random
/// pairs.
pub fn is_convex<T: Real>(d: &GridDomain<T>) -> bool {
    let cells = d.inside_cells();
    let n = cells.len();
    let check = |a: (u32, u32), b: (u32, u32)| -> bool {
        let (ia, ja) = a;
        let (ib, jb) = b;
        if (ia + ib) % 2 != 0 || (ja + jb) % 2 != 0 {
            return true;
        }
        d.inside.get(((ia + ib) / 2) as usize, ((ja + jb) / 2) as usize)
    };
    if n < 10_000 {
        for x in 0..n {
            for y in x + 1..n {
                if !check(cells[x], cells[y]) {
                    return false;
                }
            }
        }
        true
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_cafe);
        for _ in 0..1_000_000 {
            let x = rng.gen_range(0..n);
            let y = rng.gen_range(0..n);
            if !check(cells[x], cells[y]) {
                return false;
            }
        }
        true
    }
}
