//! Deterministic singular value decomposition for matrices up to 4×4.
//!
//! One-sided Jacobi on the tall orientation: rotate column pairs until they
//! are mutually orthogonal, read singular values off the column norms. This
//! keeps small singular values at high relative accuracy and needs no
//! branching heuristics, so identical inputs give identical frames on every
//! platform. Ties are resolved by descending value then by a fixed sign
//! convention (first non-negligible component of each right vector positive).

use crate::error::{Error, Result};
use crate::linalg::{SmallMat, MAX_DIM};

const SWEEP_LIMIT: usize = 60;
const ORTHO_EPS: f64 = 1e-15;
/// Components below this (columns are unit norm) are treated as zero when
/// picking the sign-fixing component.
const SIGN_EPS: f64 = 1e-12;

/// Full decomposition M = left · diag(values) · rightᵀ with orthonormal
/// square factors; `M · right.col(i) = values[i] · left.col(i)` for
/// `i < min(m, n)`.
#[derive(Clone, Copy, Debug)]
pub struct Svd {
    pub m: usize,
    pub n: usize,
    /// min(m, n) singular values, descending; padded with zeros.
    pub values: [f64; MAX_DIM],
    /// n×n; columns are the right singular vectors a_i.
    pub right: SmallMat,
    /// m×m; columns are the left singular vectors.
    pub left: SmallMat,
}

impl Svd {
    pub fn rank_count(&self) -> usize {
        self.m.min(self.n)
    }
}

/// Largest singular value of `mat`.
pub fn operator_norm(mat: &SmallMat) -> Result<f64> {
    Ok(svd_small(mat)?.values[0])
}

/// SVD of an m×n matrix with m, n ≤ 4.
pub fn svd_small(mat: &SmallMat) -> Result<Svd> {
    if !mat.is_finite() {
        return Err(Error::NonFinite("svd input".into()));
    }
    let (m, n) = (mat.rows, mat.cols);
    if m >= n {
        let (vals, u, v) = jacobi_tall(mat);
        Ok(finish(m, n, vals, u, v))
    } else {
        // Wide: decompose the transpose and swap factors.
        let t = mat.transpose();
        let (vals, u, v) = jacobi_tall(&t);
        Ok(finish(m, n, vals, v, u))
    }
}

/// One-sided Jacobi for rows ≥ cols. Returns (values, left r×r, right c×c),
/// unsorted and unsigned.
fn jacobi_tall(a: &SmallMat) -> ([f64; MAX_DIM], SmallMat, SmallMat) {
    let (r, c) = (a.rows, a.cols);
    let mut b = *a;
    let mut v = SmallMat::identity(c);

    for _ in 0..SWEEP_LIMIT {
        let mut rotated = false;
        for p in 0..c {
            for q in p + 1..c {
                let mut app = 0.0;
                let mut aqq = 0.0;
                let mut apq = 0.0;
                for i in 0..r {
                    let bp = b.get(i, p);
                    let bq = b.get(i, q);
                    app += bp * bp;
                    aqq += bq * bq;
                    apq += bp * bq;
                }
                if apq.abs() <= ORTHO_EPS * (app * aqq).sqrt() || apq == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (aqq - app) / (2.0 * apq);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                for i in 0..r {
                    let bp = b.get(i, p);
                    let bq = b.get(i, q);
                    b.set(i, p, cs * bp - sn * bq);
                    b.set(i, q, sn * bp + cs * bq);
                }
                for i in 0..c {
                    let vp = v.get(i, p);
                    let vq = v.get(i, q);
                    v.set(i, p, cs * vp - sn * vq);
                    v.set(i, q, sn * vp + cs * vq);
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut vals = [0.0; MAX_DIM];
    let mut u = SmallMat::zeros(r, r);
    for j in 0..c {
        let mut s = 0.0;
        for i in 0..r {
            s += b.get(i, j) * b.get(i, j);
        }
        let sigma = s.sqrt();
        vals[j] = sigma;
        if sigma > 0.0 {
            for i in 0..r {
                u.set(i, j, b.get(i, j) / sigma);
            }
        }
    }
    (vals, u, v)
}

/// Sort descending, fix signs, complete null columns of both factors.
fn finish(m: usize, n: usize, vals: [f64; MAX_DIM], left: SmallMat, right: SmallMat) -> Svd {
    let k = m.min(n);
    // In `jacobi_tall` output the paired columns count equals min dimension.
    let mut order: [usize; MAX_DIM] = [0, 1, 2, 3];
    order[..k].sort_by(|&i, &j| vals[j].partial_cmp(&vals[i]).unwrap().then(i.cmp(&j)));

    let mut values = [0.0; MAX_DIM];
    let mut l = SmallMat::zeros(m, m);
    let mut r = SmallMat::zeros(n, n);
    for slot in 0..k {
        let src = order[slot];
        values[slot] = vals[src];
        for i in 0..m {
            l.set(i, slot, left.get(i, src));
        }
        for i in 0..n {
            r.set(i, slot, right.get(i, src));
        }
    }

    let degen_r = degenerate_cols(&r, k);
    complete_basis(&mut r, degen_r);
    let degen_l = degenerate_cols(&l, k);
    complete_basis(&mut l, degen_l);

    // Sign convention: first non-negligible component of each right vector
    // positive; paired left vector flips along with it.
    for j in 0..n {
        if let Some(i) = first_significant(&r, j) {
            if r.get(i, j) < 0.0 {
                flip_col(&mut r, j);
                if j < k && values[j] > 0.0 {
                    flip_col(&mut l, j);
                }
            }
        }
    }
    for j in 0..m {
        // Left columns not tied to a nonzero singular value get their own fix.
        let tied = j < k && values[j] > 0.0;
        if !tied {
            if let Some(i) = first_significant(&l, j) {
                if l.get(i, j) < 0.0 {
                    flip_col(&mut l, j);
                }
            }
        }
    }

    Svd { m, n, values, right: r, left: l }
}

fn degenerate_cols(mat: &SmallMat, k: usize) -> [bool; MAX_DIM] {
    let dim = mat.rows;
    let mut degen = [false; MAX_DIM];
    for j in 0..dim {
        if j >= k {
            degen[j] = true;
        } else {
            let mut s = 0.0;
            for i in 0..dim {
                s += mat.get(i, j) * mat.get(i, j);
            }
            degen[j] = s < 0.25; // zero columns from vanished singular values
        }
    }
    degen
}

/// Fill flagged columns by Gram-Schmidt of canonical vectors against every
/// column already in place, trying candidates in canonical order.
fn complete_basis(mat: &mut SmallMat, degen: [bool; MAX_DIM]) {
    let dim = mat.rows;
    let mut next_canon = 0usize;
    for j in 0..dim {
        if !degen[j] {
            continue;
        }
        loop {
            assert!(next_canon < 2 * dim, "basis completion exhausted candidates");
            let mut cand = [0.0; MAX_DIM];
            cand[next_canon % dim] = 1.0;
            next_canon += 1;
            for jj in 0..dim {
                // valid columns: kept ones, plus degenerate slots already filled
                let valid = jj != j && (!degen[jj] || jj < j);
                if !valid {
                    continue;
                }
                let mut d = 0.0;
                for i in 0..dim {
                    d += cand[i] * mat.get(i, jj);
                }
                for i in 0..dim {
                    cand[i] -= d * mat.get(i, jj);
                }
            }
            let nrm = cand[..dim].iter().map(|v| v * v).sum::<f64>().sqrt();
            if nrm > 1e-6 {
                for i in 0..dim {
                    mat.set(i, j, cand[i] / nrm);
                }
                break;
            }
        }
    }
}

fn first_significant(mat: &SmallMat, j: usize) -> Option<usize> {
    (0..mat.rows).find(|&i| mat.get(i, j).abs() > SIGN_EPS)
}

fn flip_col(mat: &mut SmallMat, j: usize) {
    for i in 0..mat.rows {
        let v = mat.get(i, j);
        mat.set(i, j, -v);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_factorization(mat: &SmallMat, tol: f64) {
        let s = svd_small(mat).unwrap();
        let (m, n) = (mat.rows, mat.cols);
        // M a_i = sigma_i u_i
        for i in 0..m.min(n) {
            let ai = s.right.column(i);
            let mai = mat.mulvec(&ai);
            for r in 0..m {
                let want = s.values[i] * s.left.get(r, i);
                assert!(
                    (mai[r] - want).abs() <= tol,
                    "column {i}: {} vs {}",
                    mai[r],
                    want
                );
            }
        }
        // Orthonormality of both factors
        for (q, d) in [(&s.right, n), (&s.left, m)] {
            for i in 0..d {
                for j in 0..d {
                    let mut dot = 0.0;
                    for r in 0..d {
                        dot += q.get(r, i) * q.get(r, j);
                    }
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((dot - want).abs() < 1e-12, "orthonormality ({i},{j})");
                }
            }
        }
        // Descending values
        for i in 1..m.min(n) {
            assert!(s.values[i - 1] >= s.values[i]);
        }
    }

    #[test]
    fn identity_and_diag() {
        assert_eq!(operator_norm(&SmallMat::identity(2)).unwrap(), 1.0);
        let d = SmallMat::from_rows(&[&[3.0, 0.0], &[0.0, 4.0]]);
        let s = svd_small(&d).unwrap();
        assert!((s.values[0] - 4.0).abs() < 1e-14);
        assert!((s.values[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn nilpotent_shift() {
        // [[0,1],[0,0]] has operator norm 1
        let mut m = SmallMat::zeros(2, 2);
        m.set(0, 1, 1.0);
        assert!((operator_norm(&m).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn antidiagonal_swap() {
        let m = SmallMat::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let s = svd_small(&m).unwrap();
        assert!((s.values[0] - 1.0).abs() < 1e-14);
        assert!((s.values[1] - 1.0).abs() < 1e-14);
        check_factorization(&m, 1e-13);
    }

    #[test]
    fn zero_matrix_full_frames() {
        let m = SmallMat::zeros(3, 4);
        let s = svd_small(&m).unwrap();
        assert_eq!(s.values[0], 0.0);
        check_factorization(&m, 1e-15);
    }

    #[test]
    fn transpose_and_scaling_invariance() {
        let m = SmallMat::from_rows(&[&[1.0, -2.0, 0.5], &[0.25, 3.0, -1.0]]);
        let a = operator_norm(&m).unwrap();
        let b = operator_norm(&m.transpose()).unwrap();
        assert!((a - b).abs() <= 1e-12 * a);
        let c = operator_norm(&m.scale(-2.5)).unwrap();
        assert!((c - 2.5 * a).abs() <= 1e-12 * c);
    }

    #[test]
    fn random_factorizations_all_shapes() {
        // Deterministic xorshift; no external RNG needed here.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 * 4.0 - 2.0
        };
        for m in 1..=4 {
            for n in 1..=4 {
                for _ in 0..50 {
                    let mat = SmallMat::from_fn(m, n, |_, _| next());
                    check_factorization(&mat, 1e-10 * (1.0 + mat.max_abs()));
                }
            }
        }
    }

    #[test]
    fn rejects_non_finite() {
        let mut m = SmallMat::zeros(2, 2);
        m.set(0, 0, f64::NAN);
        assert!(svd_small(&m).is_err());
        assert!(operator_norm(&m).is_err());
    }

    #[test]
    fn sign_convention_first_significant_positive() {
        let m = SmallMat::from_rows(&[&[-2.0, 0.0], &[0.0, 1.0]]);
        let s = svd_small(&m).unwrap();
        // right vectors have their first significant component positive
        for j in 0..2 {
            let i = (0..2).find(|&i| s.right.get(i, j).abs() > 1e-12).unwrap();
            assert!(s.right.get(i, j) > 0.0);
        }
        check_factorization(&m, 1e-13);
    }
}
