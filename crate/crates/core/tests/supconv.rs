//! Sup-convolution behavior on the disk and mixed-potential benchmarks.

use std::sync::OnceLock;

use proptest::prelude::*;

use bmeig::geometry::{minkowski_interpolate, rasterize, DeformationParam, Grid, ShapeSpec};
use bmeig::spectral::{assemble, smallest_eigenpair, EigenPair, PotentialSpec};
use bmeig::supconv::{identity_residuals, optimal_pairs, sup_convolve, SupConvField};
use bmeig::Domain64;

fn solve(d: &Domain64, v: &PotentialSpec<f64>) -> EigenPair<f64> {
    smallest_eigenpair(&assemble(d, v).unwrap(), 1e-8, 500).unwrap()
}

#[test]
fn disk_with_itself_is_a_fixed_point() {
    let h = 1.0 / 64.0;
    let g = Grid::covering([-1.0, -1.0, 1.0, 1.0], h, 3).unwrap();
    let d = rasterize(&ShapeSpec::Disk { center: [0.0, 0.0], radius: 1.0 }, &g).unwrap();
    let e = solve(&d, &PotentialSpec::Zero);
    let t = DeformationParam::new(0.5).unwrap();
    let dt = minkowski_interpolate(&d, &d, t).unwrap();
    let f = sup_convolve(&d, &e, &d, &e, t, &dt).unwrap();
    let umax = e.u.max_abs();
    let mut worst = 0.0f64;
    for &(i, j) in dt.inside_cells() {
        if d.inside.get(i as usize, j as usize) {
            worst = worst
                .max((f.ubar.get(i as usize, j as usize) - e.u.get(i as usize, j as usize)).abs());
        }
    }
    assert!(worst / umax <= 10.0 * h * h, "disk fixed point off by {}", worst / umax);
    // exact equality at the center cell
    let c = g.to_cell_coords([0.0, 0.0]);
    let (ci, cj) = (c[0].round() as usize, c[1].round() as usize);
    assert_eq!(f.ubar.get(ci, cj), e.u.get(ci, cj));
}

/// Distinct eigenfunctions on the same square: optimal pairs genuinely split
/// and the first-derivative identity holds to O(h).
#[test]
fn mixed_potential_identity_residuals_shrink() {
    let mut medians = Vec::new();
    for n in [64usize, 128] {
        let h = 1.0 / n as f64;
        let g = Grid::covering([0.0, 0.0, 1.0, 1.0], h, 3).unwrap();
        let d = rasterize(
            &ShapeSpec::Rectangle { corner: [0.0, 0.0], width: 1.0, height: 1.0 },
            &g,
        )
        .unwrap();
        let e0 = solve(&d, &PotentialSpec::Zero);
        let e1 = solve(&d, &PotentialSpec::Quadratic { center: [0.5, 0.5], coeff: 30.0 });
        let t = DeformationParam::new(0.5).unwrap();
        let dt = minkowski_interpolate(&d, &d, t).unwrap();
        let f = sup_convolve(&d, &e0, &d, &e1, t, &dt).unwrap();
        let guard = 10.0 * f.value_floor;
        let samples: Vec<(u32, u32)> = f
            .domain
            .core_cells(3.0 * h)
            .into_iter()
            .filter(|&(i, j)| f.ubar.get(i as usize, j as usize) >= 2.0 * guard)
            .collect();
        let step = (samples.len() / 60).max(1);
        let sub: Vec<(u32, u32)> = samples.iter().step_by(step).copied().collect();
        assert!(sub.len() >= 50);
        let pairs = optimal_pairs(&f, &sub).unwrap();
        let res = identity_residuals(&f, &e0, &e1, &pairs).unwrap();
        let mut rs: Vec<f64> = res.iter().map(|r| r.pair).collect();
        rs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        medians.push(rs[rs.len() / 2]);
    }
    assert!(medians[1] <= 0.05, "median residual {} above 0.05", medians[1]);
    assert!(medians[1] < medians[0], "residuals did not shrink: {medians:?}");
}

#[test]
fn argmax_interiority_clean_on_benchmark_pairs() {
    let h = 1.0 / 64.0;
    let g = Grid::covering([0.0, 0.0, 2.0, 2.0], h, 3).unwrap();
    let r0 = ShapeSpec::Rectangle { corner: [0.0, 0.0], width: 2.0, height: 1.0 };
    let r1 = ShapeSpec::Rectangle { corner: [0.0, 0.0], width: 1.0, height: 2.0 };
    let d0 = rasterize(&r0, &g).unwrap();
    let d1 = rasterize(&r1, &g).unwrap();
    let e0 = solve(&d0, &PotentialSpec::Zero);
    let e1 = solve(&d1, &PotentialSpec::Zero);
    let t = DeformationParam::new(0.5).unwrap();
    let dt = minkowski_interpolate(&d0, &d1, t).unwrap();
    let f = sup_convolve(&d0, &e0, &d1, &e1, t, &dt).unwrap();
    let core = f.domain.core_cells(f.core_margin);
    // every core decomposition is strictly interior: no violations at all
    let pairs = optimal_pairs(&f, &core).unwrap();
    assert_eq!(pairs.len(), core.len());
    assert!(f.flagged.iter().all(|&(i, j)| {
        f.domain.phi[g.idx(i as usize, j as usize)] > -f.core_margin
    }));
}

fn shared_small_field() -> &'static (Domain64, EigenPair<f64>, SupConvField<f64>) {
    static FIELD: OnceLock<(Domain64, EigenPair<f64>, SupConvField<f64>)> = OnceLock::new();
    FIELD.get_or_init(|| {
        let h = 1.0 / 16.0;
        let g = Grid::covering([0.0, 0.0, 1.0, 1.0], h, 3).unwrap();
        let d = rasterize(
            &ShapeSpec::Rectangle { corner: [0.0, 0.0], width: 1.0, height: 1.0 },
            &g,
        )
        .unwrap();
        let e = solve(&d, &PotentialSpec::Zero);
        let t = DeformationParam::new(0.4).unwrap();
        let dt = minkowski_interpolate(&d, &d, t).unwrap();
        let f = sup_convolve(&d, &e, &d, &e, t, &dt).unwrap();
        (d, e, f)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// Scaling both inputs multiplies the field by a^(1-t) b^t, cell by cell.
    #[test]
    fn scaling_covariance(a in 0.1f64..10.0, b in 0.1f64..10.0) {
        let (d, e, f) = shared_small_field();
        let mut ea = e.clone();
        ea.u.data.iter_mut().for_each(|v| *v *= a);
        let mut eb = e.clone();
        eb.u.data.iter_mut().for_each(|v| *v *= b);
        let g = sup_convolve(d, &ea, d, &eb, f.t, &f.domain).unwrap();
        let tv = f.t.value();
        let factor = a.powf(1.0 - tv) * b.powf(tv);
        for &(i, j) in f.domain.inside_cells() {
            let x = f.ubar.get(i as usize, j as usize);
            let y = g.ubar.get(i as usize, j as usize);
            prop_assert!((y - factor * x).abs() <= 1e-12 * y.abs().max(1.0));
        }
    }

    /// The stored optimum dominates random admissible decompositions.
    #[test]
    fn stored_value_dominates_admissible_pairs(seed in 0u64..1000) {
        let (d, e, f) = shared_small_field();
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let cells = d.inside_cells();
        let g = d.grid;
        let tv = f.t.value();
        for _ in 0..200 {
            let (i0, j0) = cells[rng.gen_range(0..cells.len())];
            let x0 = g.pos(i0 as usize, j0 as usize);
            let (zi, zj) = cells[rng.gen_range(0..cells.len())];
            if !f.domain.inside.get(zi as usize, zj as usize) {
                continue;
            }
            let z = g.pos(zi as usize, zj as usize);
            let x1 = [
                (z[0] - (1.0 - tv) * x0[0]) / tv,
                (z[1] - (1.0 - tv) * x0[1]) / tv,
            ];
            let u1v = e.u.sample(x1);
            if u1v <= 0.0 {
                continue;
            }
            let u0v = e.u.get(i0 as usize, j0 as usize);
            let val = u0v.powf(1.0 - tv) * u1v.powf(tv);
            let stored = f.ubar.get(zi as usize, zj as usize);
            prop_assert!(
                stored >= val - 1e-12 * val.max(1.0),
                "stored {stored} beaten by admissible {val}"
            );
        }
    }
}
