//! Discrete Rayleigh quotients and gradient fields.

use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::geometry::{Grid, GridDomain};
use crate::scalar::{comp_sum, Real};

use super::potential::PotentialSpec;

/// Discrete Rayleigh quotient
/// `[sum |grad_h w|^2 h^2 + sum V w^2 h^2] / [sum w^2 h^2]`
/// with forward differences and zero extension, so it is exactly the
/// quadratic form of the assembled operator: every admissible trial field
/// bounds the first discrete eigenvalue from above.
///
/// Values outside the inside mask are ignored (the trial function is taken
/// as `w * 1_inside`).
pub fn rayleigh_quotient<T: Real>(
    w: &ScalarField<T>,
    d: &GridDomain<T>,
    v: &PotentialSpec<T>,
) -> Result<T> {
    if w.grid != d.grid {
        return Err(Error::GridMismatch);
    }
    let grid = d.grid;
    let masked = |i: usize, j: usize| -> T {
        if d.inside.get(i, j) {
            w.data[grid.idx(i, j)]
        } else {
            T::zero()
        }
    };
    let h2 = grid.h * grid.h;
    let mut grad_rows = Vec::with_capacity(grid.ny);
    let mut pot_rows = Vec::with_capacity(grid.ny);
    let mut mass_rows = Vec::with_capacity(grid.ny);
    for j in 0..grid.ny {
        let mut grad = T::zero();
        let mut pot = T::zero();
        let mut mass = T::zero();
        for i in 0..grid.nx {
            let wv = masked(i, j);
            let right = if i + 1 < grid.nx { masked(i + 1, j) } else { T::zero() };
            let up = if j + 1 < grid.ny { masked(i, j + 1) } else { T::zero() };
            let dxr = right - wv;
            let dyu = up - wv;
            grad += dxr * dxr + dyu * dyu;
            if wv != T::zero() {
                pot += v.eval(grid.pos(i, j)) * wv * wv;
                mass += wv * wv;
            }
        }
        grad_rows.push(grad);
        pot_rows.push(pot);
        mass_rows.push(mass);
    }
    let grad = comp_sum(&grad_rows);
    let pot = comp_sum(&pot_rows) * h2;
    let mass = comp_sum(&mass_rows) * h2;
    if mass == T::zero() {
        return Err(Error::ZeroTrialFunction);
    }
    Ok((grad + pot) / mass)
}

/// Discrete gradient of a zero-extended field: central differences wherever
/// both axis neighbors are on the grid (the zero across a domain boundary is
/// the correct Dirichlet datum), second-order one-sided at the grid edge.
/// Exact on sampled linear functions.
pub fn gradient_field<T: Real>(w: &ScalarField<T>, grid: &Grid<T>) -> VectorField<T> {
    assert_eq!(w.grid, *grid);
    let mut out = VectorField::zeros(*grid);
    let h = grid.h;
    let two_h = T::of(2.0) * h;
    let axis = |m: usize, n: usize, get: &dyn Fn(usize) -> T| -> T {
        if m > 0 && m + 1 < n {
            (get(m + 1) - get(m - 1)) / two_h
        } else if m == 0 && n >= 3 {
            (T::of(4.0) * get(1) - T::of(3.0) * get(0) - get(2)) / two_h
        } else if m + 1 == n && n >= 3 {
            (T::of(3.0) * get(m) - T::of(4.0) * get(m - 1) + get(m - 2)) / two_h
        } else if n == 2 {
            (get(1) - get(0)) / h
        } else {
            T::zero()
        }
    };
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let k = j * grid.nx + i;
            out.dx[k] = axis(i, grid.nx, &|ii| w.data[j * grid.nx + ii]);
            out.dy[k] = axis(j, grid.ny, &|jj| w.data[jj * grid.nx + i]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{rasterize, ShapeSpec};

    fn unit_square(n: usize) -> GridDomain<f64> {
        let h = 1.0 / n as f64;
        let g = Grid::covering([0.0, 0.0, 1.0, 1.0], h, 2).unwrap();
        rasterize(&ShapeSpec::Rectangle { corner: [0.0, 0.0], width: 1.0, height: 1.0 }, &g)
            .unwrap()
    }

    #[test]
    fn gradient_exact_on_linear() {
        let g = Grid::new([0.0, 0.0], 0.125, 17, 17).unwrap();
        let w: ScalarField<f64> = ScalarField::from_fn(g, |p| 3.0 * p[0] - p[1]);
        let grad = gradient_field(&w, &g);
        for j in 0..g.ny {
            for i in 0..g.nx {
                let v = grad.get(i, j);
                assert!((v[0] - 3.0).abs() < 1e-11, "dx at ({i},{j}) = {}", v[0]);
                assert!((v[1] + 1.0).abs() < 1e-11, "dy at ({i},{j}) = {}", v[1]);
            }
        }
    }

    #[test]
    fn gradient_of_constant_is_zero() {
        let g = Grid::new([0.0, 0.0], 0.5, 9, 9).unwrap();
        let w = ScalarField::from_fn(g, |_| 7.0);
        let grad = gradient_field(&w, &g);
        assert_eq!(grad.max_norm(), 0.0);
    }

    #[test]
    fn gradient_taylor_bound_on_sine() {
        let n = 128;
        let d = unit_square(n);
        let g = d.grid;
        let pi = std::f64::consts::PI;
        let mut w = ScalarField::zeros(g);
        for &(i, j) in d.inside_cells() {
            let p = g.pos(i as usize, j as usize);
            w.set(i as usize, j as usize, (pi * p[0]).sin() * (pi * p[1]).sin());
        }
        let grad = gradient_field(&w, &g);
        let h = g.h;
        let mut worst = 0.0f64;
        for &(i, j) in d.inside_cells() {
            let p = g.pos(i as usize, j as usize);
            let gx = pi * (pi * p[0]).cos() * (pi * p[1]).sin();
            let gy = pi * (pi * p[0]).sin() * (pi * p[1]).cos();
            let v = grad.get(i as usize, j as usize);
            worst = worst.max((v[0] - gx).abs()).max((v[1] - gy).abs());
        }
        assert!(worst <= (pi * h) * (pi * h), "max gradient error {worst}");
    }

    #[test]
    fn quotient_scale_invariant_and_zero_rejected() {
        let d = unit_square(32);
        let g = d.grid;
        let mut w = ScalarField::zeros(g);
        for &(i, j) in d.inside_cells() {
            let p = g.pos(i as usize, j as usize);
            w.set(i as usize, j as usize, p[0] * (1.0 - p[0]) * p[1] * (1.0 - p[1]));
        }
        let q1 = rayleigh_quotient(&w, &d, &PotentialSpec::Zero).unwrap();
        let mut w7 = w.clone();
        w7.data.iter_mut().for_each(|v| *v *= 7.0);
        let q7 = rayleigh_quotient(&w7, &d, &PotentialSpec::Zero).unwrap();
        assert!((q1 - q7).abs() < 1e-10 * q1.abs());
        let z = ScalarField::zeros(g);
        assert!(matches!(
            rayleigh_quotient(&z, &d, &PotentialSpec::Zero),
            Err(Error::ZeroTrialFunction)
        ));
    }
}
