//! Regularity probes: Lipschitz estimate, semiconvexity second differences,
//! mollification, and the integration-by-parts diagnostic.

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::scalar::{comp_sum, Real};

use super::field::SupConvField;

/// Discrete Lipschitz constant of `ubar`: the largest difference quotient
/// over adjacent cells, including the drop across the zero exterior.
pub fn lipschitz_estimate<T: Real>(f: &SupConvField<T>) -> T {
    f.ubar.discrete_lipschitz()
}

/// Result of the centered-second-difference scan on the interior core.
#[derive(Debug, Clone)]
pub struct SemiconvexityProbe<T> {
    /// Negated worst (most negative) centered second difference; zero when
    /// all second differences are nonnegative.
    pub lambda_probe: T,
    /// Step offsets scanned (axis and diagonal directions).
    pub directions: Vec<[i32; 2]>,
    pub core_margin: T,
    pub core_cells: usize,
}

/// Scans `[ubar(z+d) + ubar(z-d) - 2 ubar(z)] / |d|^2` over axis and diagonal
/// steps on the core at the given margin. A semiconvex field keeps the probe
/// bounded as the grid refines.
pub fn semiconvexity_probe<T: Real>(
    f: &SupConvField<T>,
    margin: T,
) -> Result<SemiconvexityProbe<T>> {
    let grid = f.domain.grid;
    let h = grid.h;
    if margin < T::of(3.0) * h {
        return Err(Error::InvalidParameter(format!(
            "semiconvexity margin must be at least 3h = {}, got {margin}",
            T::of(3.0) * h
        )));
    }
    let core = f.domain.core_cells(margin);
    if core.is_empty() {
        return Err(Error::CoreEmpty);
    }
    let directions = vec![[1i32, 0], [0, 1], [1, 1], [1, -1]];
    let mut worst = T::zero();
    for &(i, j) in &core {
        let (i, j) = (i as i64, j as i64);
        let at = |ii: i64, jj: i64| f.ubar.data[jj as usize * grid.nx + ii as usize];
        let center = at(i, j);
        for d in &directions {
            let (di, dj) = (d[0] as i64, d[1] as i64);
            let plus = at(i + di, j + dj);
            let minus = at(i - di, j - dj);
            let len2 = T::from_i64(di * di + dj * dj).unwrap() * h * h;
            let dd = (plus + minus - T::of(2.0) * center) / len2;
            worst = worst.min(dd);
        }
    }
    Ok(SemiconvexityProbe {
        lambda_probe: (-worst).max(T::zero()),
        directions,
        core_margin: margin,
        core_cells: core.len(),
    })
}

/// Gaussian-mollified copy of a sup-convolution field.
#[derive(Debug, Clone)]
pub struct MollifiedField<T> {
    pub epsilon: T,
    pub values: ScalarField<T>,
}

/// Discrete mollification: separable truncated Gaussian with support radius
/// `epsilon` (sigma = epsilon/2), normalized to unit mass so the Lipschitz
/// constant is preserved.
pub fn mollify<T: Real>(f: &SupConvField<T>, epsilon: T) -> Result<MollifiedField<T>> {
    let grid = f.ubar.grid;
    let h = grid.h;
    if epsilon < h {
        return Err(Error::InvalidParameter(format!(
            "mollification radius must be at least h, got {epsilon}"
        )));
    }
    let radius = (epsilon / h).ceil().to_usize().unwrap();
    let sigma = epsilon / T::of(2.0);
    let mut weights = Vec::with_capacity(2 * radius + 1);
    for k in 0..=2 * radius {
        let x = T::from_isize(k as isize - radius as isize).unwrap() * h;
        weights.push((-(x * x) / (T::of(2.0) * sigma * sigma)).exp());
    }
    let total = comp_sum(&weights);
    for w in &mut weights {
        *w /= total;
    }
    // two 1-D passes with zero extension
    let pass = |src: &[T], along_x: bool| -> Vec<T> {
        let mut out = vec![T::zero(); src.len()];
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let mut acc = T::zero();
                for (k, &w) in weights.iter().enumerate() {
                    let off = k as isize - radius as isize;
                    let (si, sj) = if along_x {
                        (i as isize + off, j as isize)
                    } else {
                        (i as isize, j as isize + off)
                    };
                    if si >= 0 && sj >= 0 && (si as usize) < grid.nx && (sj as usize) < grid.ny {
                        acc += w * src[sj as usize * grid.nx + si as usize];
                    }
                }
                out[j * grid.nx + i] = acc;
            }
        }
        out
    };
    let tmp = pass(&f.ubar.data, true);
    let data = pass(&tmp, false);
    Ok(MollifiedField { epsilon, values: ScalarField { grid, data } })
}

/// Integration-by-parts diagnostic on the mollified field.
#[derive(Debug, Clone, Copy)]
pub struct IbpReport<T> {
    /// `sum |grad_h ubar_eps|^2 h^2` over the core.
    pub lhs: T,
    /// `-sum ubar_eps * Lap_h ubar_eps * h^2` over the core.
    pub rhs: T,
    /// Boundary-flux surrogate: Lipschitz constant times the sup of the
    /// mollified field on the core rim times the rim length (with a factor
    /// covering the crossing-edge count).
    pub flux_bound: T,
    pub core_cells: usize,
}

/// Computes both sides of the inequality `lhs <= rhs + flux` on an interior
/// core shrunk far enough that the mollifier never sees exterior zeros
/// (`epsilon` plus two cells).
pub fn ibp_check<T: Real>(f: &SupConvField<T>, epsilon: T) -> Result<IbpReport<T>> {
    let grid = f.ubar.grid;
    let h = grid.h;
    if epsilon < T::of(2.0) * h {
        return Err(Error::InvalidParameter(format!(
            "mollification radius must be at least 2h, got {epsilon}"
        )));
    }
    let smooth = mollify(f, epsilon)?.values;
    let radius = (epsilon / h).ceil();
    let margin = (radius + T::of(2.0)) * h;
    let core = f.domain.core_cells(margin);
    if core.is_empty() {
        return Err(Error::CoreEmpty);
    }
    let mut in_core = vec![false; grid.len()];
    for &(i, j) in &core {
        in_core[grid.idx(i as usize, j as usize)] = true;
    }
    let at = |i: i64, j: i64| -> T {
        if i < 0 || j < 0 || i as usize >= grid.nx || j as usize >= grid.ny {
            T::zero()
        } else {
            smooth.data[j as usize * grid.nx + i as usize]
        }
    };
    let mut lhs = T::zero();
    let mut rhs = T::zero();
    let mut rim_sup = T::zero();
    let mut rim_cells = 0usize;
    for &(iu, ju) in &core {
        let (i, j) = (iu as i64, ju as i64);
        let v = at(i, j);
        let right = at(i + 1, j);
        let up = at(i, j + 1);
        lhs += (right - v) * (right - v) + (up - v) * (up - v);
        let sum_nb = right + up + at(i - 1, j) + at(i, j - 1);
        rhs += v * (T::of(4.0) * v - sum_nb);
        let rim = [(1i64, 0i64), (-1, 0), (0, 1), (0, -1)].iter().any(|&(di, dj)| {
            let (ni, nj) = (i + di, j + dj);
            ni < 0
                || nj < 0
                || ni as usize >= grid.nx
                || nj as usize >= grid.ny
                || !in_core[nj as usize * grid.nx + ni as usize]
        });
        if rim {
            rim_cells += 1;
            rim_sup = rim_sup.max(v.abs());
        }
    }
    let lipschitz = super::probes::lipschitz_estimate(f);
    let rim_len = T::from_usize(rim_cells).unwrap() * h;
    let flux_bound = T::of(4.0) * lipschitz * rim_sup * rim_len;
    Ok(IbpReport { lhs, rhs, flux_bound, core_cells: core.len() })
}
