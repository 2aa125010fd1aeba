//! Eigensolver and quotient checks against analytic oracles.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bmeig::field::ScalarField;
use bmeig::geometry::{rasterize, Grid, GridDomain, ShapeSpec};
use bmeig::spectral::{assemble, rayleigh_quotient, smallest_eigenpair, PotentialSpec};

const PI: f64 = std::f64::consts::PI;
const J01: f64 = 2.404825557695773;

fn unit_square(n: usize) -> GridDomain<f64> {
    let h = 1.0 / n as f64;
    let g = Grid::covering([0.0, 0.0, 1.0, 1.0], h, 3).unwrap();
    rasterize(&ShapeSpec::Rectangle { corner: [0.0, 0.0], width: 1.0, height: 1.0 }, &g).unwrap()
}

fn lambda(d: &GridDomain<f64>, v: &PotentialSpec<f64>) -> f64 {
    smallest_eigenpair(&assemble(d, v).unwrap(), 1e-8, 500).unwrap().lambda
}

#[test]
fn disk_eigenvalue_bessel_oracle() {
    let h = 1.0 / 128.0;
    let g = Grid::covering([-1.0, -1.0, 1.0, 1.0], h, 3).unwrap();
    let d = rasterize(&ShapeSpec::Disk { center: [0.0, 0.0], radius: 1.0 }, &g).unwrap();
    let l = lambda(&d, &PotentialSpec::Zero);
    let exact = J01 * J01;
    assert!((l - exact).abs() / exact < 0.01, "disk lambda {l} vs {exact}");
}

#[test]
fn constant_potential_shifts_square_eigenvalue() {
    let d = unit_square(128);
    let l = lambda(&d, &PotentialSpec::Constant { c: 5.0 });
    let exact = 2.0 * PI * PI + 5.0;
    assert!((l - exact).abs() / exact < 0.005, "shifted lambda {l} vs {exact}");
}

#[test]
fn variational_principle_over_random_fields() {
    let d = unit_square(64);
    let g = d.grid;
    let op = assemble(&d, &PotentialSpec::Zero).unwrap();
    let e = smallest_eigenpair(&op, 1e-8, 500).unwrap();
    // the eigenfunction itself gives back lambda
    let q = rayleigh_quotient(&e.u, &d, &PotentialSpec::Zero).unwrap();
    assert!((q - e.lambda).abs() <= 1e-8, "eigenfunction quotient {q} vs {}", e.lambda);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let mut w = ScalarField::zeros(g);
        for &(i, j) in d.inside_cells() {
            w.set(i as usize, j as usize, rng.gen_range(-1.0..1.0));
        }
        let q = rayleigh_quotient(&w, &d, &PotentialSpec::Zero).unwrap();
        assert!(q >= e.lambda - 1e-6, "quotient {q} undercuts lambda {}", e.lambda);
    }
}

#[test]
fn single_cell_indicator_bounds_lambda_from_above() {
    let d = unit_square(128);
    let g = d.grid;
    let mut w = ScalarField::zeros(g);
    let c = g.to_cell_coords([0.5, 0.5]);
    w.set(c[0].round() as usize, c[1].round() as usize, 1.0);
    let q = rayleigh_quotient(&w, &d, &PotentialSpec::Zero).unwrap();
    assert!(q >= 2.0 * PI * PI * (1.0 - 0.005));
}

#[test]
fn domain_monotonicity_on_nested_rectangles() {
    let h = 1.0 / 64.0;
    let g = Grid::covering([0.0, 0.0, 1.5, 1.5], h, 3).unwrap();
    let inner =
        rasterize(&ShapeSpec::Rectangle { corner: [0.0, 0.0], width: 1.0, height: 1.0 }, &g)
            .unwrap();
    let outer =
        rasterize(&ShapeSpec::Rectangle { corner: [0.0, 0.0], width: 1.5, height: 1.25 }, &g)
            .unwrap();
    let li = lambda(&inner, &PotentialSpec::Zero);
    let lo = lambda(&outer, &PotentialSpec::Zero);
    assert!(lo <= li + 1e-8, "enlarging the domain raised lambda: {lo} > {li}");
}

#[test]
fn potential_monotonicity() {
    let d = unit_square(64);
    let low = lambda(&d, &PotentialSpec::Quadratic { center: [0.5, 0.5], coeff: 1.0 });
    let high = lambda(&d, &PotentialSpec::Quadratic { center: [0.5, 0.5], coeff: 3.0 });
    assert!(low <= high + 1e-8);
}

#[test]
fn operator_symmetry_on_random_vectors() {
    let h = 1.0 / 48.0;
    let g = Grid::covering([-1.0, -1.0, 1.0, 1.0], h, 3).unwrap();
    let d = rasterize(&ShapeSpec::Disk { center: [0.0, 0.0], radius: 1.0 }, &g).unwrap();
    let op = assemble(&d, &PotentialSpec::Quadratic { center: [0.2, -0.1], coeff: 2.0 }).unwrap();
    let n = op.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5 {
        let w: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut aw = vec![0.0; n];
        let mut av = vec![0.0; n];
        op.apply(&w, &mut aw);
        op.apply(&v, &mut av);
        let awv: f64 = aw.iter().zip(&v).map(|(a, b)| a * b).sum();
        let wav: f64 = w.iter().zip(&av).map(|(a, b)| a * b).sum();
        let scale = awv.abs().max(wav.abs()).max(1.0);
        assert!(
            (awv - wav).abs() / scale < 1e-12,
            "asymmetry: <Aw,v>={awv} <w,Av>={wav}"
        );
    }
}
