//! Smallest eigenpair by shifted inverse iteration with conjugate-gradient
//! inner solves. Matrix-free and deterministic for a fixed configuration.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::scalar::Real;

use super::operator::{det_dot, det_norm, DiscreteOperator};

/// First Dirichlet eigenpair: positive eigenfunction normalized so that
/// `sum u^2 h^2 = 1`, with the final residual `||A u - lambda u||_h`.
#[derive(Debug, Clone)]
pub struct EigenPair<T> {
    pub lambda: T,
    pub u: ScalarField<T>,
    pub residual: T,
    pub iterations: usize,
}

/// Computes the minimal eigenvalue and positive normalized eigenvector.
///
/// The shift sits slightly below the Gershgorin lower bound so the shifted
/// operator stays positive definite for the CG solves; the all-ones start
/// vector overlaps the (positive) ground state, so no randomness is needed.
pub fn smallest_eigenpair<T: Real>(
    op: &DiscreteOperator<T>,
    tol: T,
    max_iter: usize,
) -> Result<EigenPair<T>> {
    if tol <= T::zero() {
        return Err(Error::InvalidParameter(format!("solver tolerance must be positive, got {tol}")));
    }
    let n = op.dim();
    if n == 0 {
        return Err(Error::DomainEmpty);
    }
    let h = op.h();
    let (lo, hi) = op.gershgorin_bounds();
    let span = (hi - lo).max(T::one());
    let sigma = lo - span * T::of(1e-4);

    // normalized all-ones start
    let mut x = vec![T::one(); n];
    let nrm = det_norm(&x) * h;
    x.par_iter_mut().for_each(|v| *v /= nrm);

    let mut ax = vec![T::zero(); n];
    op.apply(&x, &mut ax);
    let mut lambda = det_dot(&ax, &x) * h * h;
    let mut residual = resid_norm(&ax, &x, lambda, h);

    let mut y = vec![T::zero(); n];
    let mut cg = CgWorkspace::new(n);
    let mut iterations = 0usize;
    while residual > tol {
        if iterations >= max_iter {
            return Err(Error::SolverDiverged {
                residual: residual.as_f64(),
                iterations,
            });
        }
        iterations += 1;
        // warm start: for x near the eigenvector the solution is x/(lambda-sigma)
        let scale = T::one() / (lambda - sigma);
        y.par_iter_mut().zip(x.par_iter()).for_each(|(yv, &xv)| *yv = xv * scale);
        let inner_tol = (residual / (lambda - sigma) * T::of(0.05))
            .min(T::of(1e-2))
            .max(T::of(1e-14));
        cg.solve(op, sigma, &x, &mut y, inner_tol, 200_000);
        let nrm = det_norm(&y) * h;
        if !(nrm > T::zero()) || !nrm.is_finite() {
            return Err(Error::SolverDiverged { residual: residual.as_f64(), iterations });
        }
        let inv = T::one() / nrm;
        x.par_iter_mut().zip(y.par_iter()).for_each(|(xv, &yv)| *xv = yv * inv);
        op.apply(&x, &mut ax);
        lambda = det_dot(&ax, &x) * h * h;
        residual = resid_norm(&ax, &x, lambda, h);
    }

    // fix the sign to positive; the shifted operator is an M-matrix on a
    // connected mask, so the converged vector has one strict sign
    let total: T = det_dot(&x, &vec![T::one(); n]);
    if total < T::zero() {
        x.par_iter_mut().for_each(|v| *v = -*v);
    }
    if x.iter().any(|&v| !(v > T::zero())) {
        return Err(Error::SolverDiverged { residual: residual.as_f64(), iterations });
    }
    Ok(EigenPair { lambda, u: op.to_field(&x), residual, iterations })
}

fn resid_norm<T: Real>(ax: &[T], x: &[T], lambda: T, h: T) -> T {
    let mut partial = vec![T::zero(); ax.len().div_ceil(4096)];
    partial
        .par_iter_mut()
        .zip(ax.par_chunks(4096).zip(x.par_chunks(4096)))
        .for_each(|(p, (ca, cx))| {
            let mut s = T::zero();
            for (a, xv) in ca.iter().zip(cx) {
                let r = *a - lambda * *xv;
                s += r * r;
            }
            *p = s;
        });
    crate::scalar::comp_sum(&partial).sqrt() * h
}

/// Conjugate gradients on `(A - sigma I) y = b` with reusable buffers.
struct CgWorkspace<T> {
    r: Vec<T>,
    p: Vec<T>,
    ap: Vec<T>,
}

impl<T: Real> CgWorkspace<T> {
    fn new(n: usize) -> Self {
        CgWorkspace { r: vec![T::zero(); n], p: vec![T::zero(); n], ap: vec![T::zero(); n] }
    }

    /// Relative-residual CG starting from the current contents of `y`.
    fn solve(
        &mut self,
        op: &DiscreteOperator<T>,
        sigma: T,
        b: &[T],
        y: &mut [T],
        rel_tol: T,
        max_iter: usize,
    ) {
        let apply_shifted = |w: &[T], out: &mut [T], ws: &mut Vec<T>| {
            // out = (A - sigma) w
            op.apply(w, ws);
            out.par_iter_mut()
                .zip(ws.par_iter().zip(w.par_iter()))
                .for_each(|(o, (&aw, &wv))| *o = aw - sigma * wv);
        };
        let mut scratch = vec![T::zero(); b.len()];
        apply_shifted(y, &mut self.ap, &mut scratch);
        self.r
            .par_iter_mut()
            .zip(b.par_iter().zip(self.ap.par_iter()))
            .for_each(|(r, (&bv, &av))| *r = bv - av);
        let b_norm = det_norm(b).max(T::min_positive_value());
        let mut rho = det_dot(&self.r, &self.r);
        if rho.sqrt() <= rel_tol * b_norm {
            return;
        }
        self.p.copy_from_slice(&self.r);
        for _ in 0..max_iter {
            apply_shifted(&self.p, &mut self.ap, &mut scratch);
            let denom = det_dot(&self.p, &self.ap);
            if !(denom > T::zero()) {
                break; // shifted operator should be SPD; bail on round-off
            }
            let alpha = rho / denom;
            y.par_iter_mut().zip(self.p.par_iter()).for_each(|(yv, &pv)| *yv += alpha * pv);
            self.r
                .par_iter_mut()
                .zip(self.ap.par_iter())
                .for_each(|(rv, &av)| *rv -= alpha * av);
            let rho_new = det_dot(&self.r, &self.r);
            if rho_new.sqrt() <= rel_tol * b_norm {
                break;
            }
            let beta = rho_new / rho;
            rho = rho_new;
            self.p
                .par_iter_mut()
                .zip(self.r.par_iter())
                .for_each(|(pv, &rv)| *pv = rv + beta * *pv);
        }
    }
}
