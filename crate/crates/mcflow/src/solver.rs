//! Matrix-free BiCGStab for the lagged-coefficient implicit steps.
//!
//! The operator I − dt·L̃ is nonsymmetric (mixed-derivative stencils and the
//! interpolation rows near curved boundaries), mildly non-normal, and well
//! conditioned for the step sizes the engine uses, so unpreconditioned
//! BiCGStab with a fixed iteration cap is enough. Everything runs in a fixed
//! order: identical inputs give identical iterates.

use crate::error::{Error, Result};

pub struct SolveStats {
    pub iters: usize,
    pub residual: f64,
}

/// Solve A x = b to relative residual `tol` (measured against ‖b‖).
/// `apply` computes y = A x. `x` carries the initial guess.
pub fn bicgstab(
    mut apply: impl FnMut(&[f64], &mut [f64]),
    b: &[f64],
    x: &mut [f64],
    tol: f64,
    max_iters: usize,
) -> Result<SolveStats> {
    let n = b.len();
    let bnorm = norm(b);
    if bnorm == 0.0 {
        x.fill(0.0);
        return Ok(SolveStats { iters: 0, residual: 0.0 });
    }
    let target = tol * bnorm;

    let mut r = vec![0.0; n];
    apply(x, &mut r);
    for i in 0..n {
        r[i] = b[i] - r[i];
    }
    let mut rnorm = norm(&r);
    if rnorm <= target {
        return Ok(SolveStats { iters: 0, residual: rnorm / bnorm });
    }

    let r_hat = r.clone();
    let mut p = r.clone();
    let mut v = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut t = vec![0.0; n];
    let mut rho = dot(&r_hat, &r);

    for it in 1..=max_iters {
        apply(&p, &mut v);
        let denom = dot(&r_hat, &v);
        if denom == 0.0 || !denom.is_finite() {
            return Err(Error::SolverDiverged { achieved: rnorm / bnorm, wanted: tol, iters: it });
        }
        let alpha = rho / denom;
        for i in 0..n {
            s[i] = r[i] - alpha * v[i];
        }
        if norm(&s) <= target {
            for i in 0..n {
                x[i] += alpha * p[i];
            }
            apply(x, &mut t);
            for i in 0..n {
                t[i] = b[i] - t[i];
            }
            return Ok(SolveStats { iters: it, residual: norm(&t) / bnorm });
        }
        apply(&s, &mut t);
        let tt = dot(&t, &t);
        if tt == 0.0 || !tt.is_finite() {
            return Err(Error::SolverDiverged { achieved: rnorm / bnorm, wanted: tol, iters: it });
        }
        let omega = dot(&t, &s) / tt;
        for i in 0..n {
            x[i] += alpha * p[i] + omega * s[i];
            r[i] = s[i] - omega * t[i];
        }
        rnorm = norm(&r);
        if rnorm <= target {
            return Ok(SolveStats { iters: it, residual: rnorm / bnorm });
        }
        let rho_new = dot(&r_hat, &r);
        if rho_new == 0.0 || omega == 0.0 || !rho_new.is_finite() {
            return Err(Error::SolverDiverged { achieved: rnorm / bnorm, wanted: tol, iters: it });
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
    }
    Err(Error::SolverDiverged { achieved: rnorm / bnorm, wanted: tol, iters: max_iters })
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
