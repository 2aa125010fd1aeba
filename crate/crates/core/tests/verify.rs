//! Cross-cutting verification pipeline checks.

use bmeig::geometry::{Grid, ShapeSpec};
use bmeig::spectral::PotentialSpec;
use bmeig::verify::{verify_bm, verify_logconcavity, VerifyParams};

const PI: f64 = std::f64::consts::PI;

#[test]
fn bm_is_symmetric_under_operand_swap() {
    let h = 1.0 / 32.0;
    let g = Grid::covering([0.0, 0.0, 2.0, 2.0], h, 3).unwrap();
    let r0 = ShapeSpec::Rectangle { corner: [0.0, 0.0], width: 2.0, height: 1.0 };
    let r1 = ShapeSpec::Rectangle { corner: [0.0, 0.0], width: 1.0, height: 2.0 };
    let params = VerifyParams::default();
    let fwd = verify_bm(&r0, &r1, &PotentialSpec::Zero, &[0.3], &g, &params).unwrap();
    let bwd = verify_bm(&r1, &r0, &PotentialSpec::Zero, &[0.7], &g, &params).unwrap();
    let a = &fwd.rows[0];
    let b = &bwd.rows[0];
    assert!(
        (a.lambda_t - b.lambda_t).abs() <= 1e-8,
        "lambda_t asymmetry: {} vs {}",
        a.lambda_t,
        b.lambda_t
    );
    assert!((a.chord - b.chord).abs() <= 1e-8);
}

#[test]
fn logconcavity_disk() {
    let h = 1.0 / 64.0;
    let g = Grid::covering([-1.0, -1.0, 1.0, 1.0], h, 3).unwrap();
    let r = verify_logconcavity(
        &ShapeSpec::Disk { center: [0.0, 0.0], radius: 1.0 },
        &PotentialSpec::Zero,
        &g,
        50_000,
        &VerifyParams::default(),
    )
    .unwrap();
    assert!(r.passed(), "disk deficit {} vs tol {}", r.worst_deficit, r.tol);
}

#[test]
fn logconcavity_square_with_quadratic_potential() {
    let h = 1.0 / 64.0;
    let g = Grid::covering([0.0, 0.0, 1.0, 1.0], h, 3).unwrap();
    let r = verify_logconcavity(
        &ShapeSpec::Rectangle { corner: [0.0, 0.0], width: 1.0, height: 1.0 },
        &PotentialSpec::Quadratic { center: [0.5, 0.5], coeff: 4.0 },
        &g,
        50_000,
        &VerifyParams::default(),
    )
    .unwrap();
    assert!(r.passed(), "deficit {} vs tol {}", r.worst_deficit, r.tol);
}

#[test]
fn rectangle_pair_analytic_chain() {
    // lambda_0 = lambda_1 = 5 pi^2/4, Omega_1/2 = square(1.5),
    // lambda_1/2 = 2 pi^2/2.25 <= chord = 5 pi^2/4
    let h = 1.0 / 64.0;
    let g = Grid::covering([0.0, 0.0, 2.0, 2.0], h, 3).unwrap();
    let r0 = ShapeSpec::Rectangle { corner: [0.0, 0.0], width: 2.0, height: 1.0 };
    let r1 = ShapeSpec::Rectangle { corner: [0.0, 0.0], width: 1.0, height: 2.0 };
    let rep =
        verify_bm(&r0, &r1, &PotentialSpec::Zero, &[0.5], &g, &VerifyParams::default()).unwrap();
    assert!(rep.passed());
    let row = &rep.rows[0];
    let exact_ends = 5.0 * PI * PI / 4.0;
    let exact_mid = 2.0 * PI * PI / 2.25;
    assert!((row.lambda0 - exact_ends).abs() / exact_ends < 0.005);
    assert!((row.lambda1 - exact_ends).abs() / exact_ends < 0.005);
    assert!((row.lambda_t - exact_mid).abs() / exact_mid < 0.01);
    assert!((row.chord - exact_ends).abs() / exact_ends < 0.005);
    assert!(row.lambda_t <= row.rayleigh_ubar + 1e-8);
    assert!(row.rayleigh_ubar <= row.chord);
}
