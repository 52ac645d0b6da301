//! Stack-allocated dense matrices and vectors for dimensions up to 4 (base)
//! and 8 (ambient, base + fiber). All hot-path geometry runs on these; no
//! heap traffic per node.

use crate::error::{Error, Result};

/// Maximum base or fiber dimension.
pub const MAX_DIM: usize = 4;
/// Maximum ambient dimension (n + m).
pub const MAX_AMB: usize = 2 * MAX_DIM;

/// Row-major matrix with at most 4 rows and 4 columns.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmallMat {
    pub rows: usize,
    pub cols: usize,
    a: [[f64; MAX_DIM]; MAX_DIM],
}

impl SmallMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows <= MAX_DIM && cols <= MAX_DIM);
        SmallMat { rows, cols, a: [[0.0; MAX_DIM]; MAX_DIM] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = SmallMat::zeros(n, n);
        for i in 0..n {
            m.a[i][i] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = SmallMat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.a[i][j] = f(i, j);
            }
        }
        m
    }

    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows[0].len();
        SmallMat::from_fn(r, c, |i, j| rows[i][j])
    }

    #[inline(always)]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.a[i][j]
    }

    #[inline(always)]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.rows && j < self.cols);
        self.a[i][j] = v;
    }

    pub fn transpose(&self) -> SmallMat {
        SmallMat::from_fn(self.cols, self.rows, |i, j| self.a[j][i])
    }

    pub fn mul(&self, rhs: &SmallMat) -> SmallMat {
        assert_eq!(self.cols, rhs.rows);
        let mut out = SmallMat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut s = 0.0;
                for k in 0..self.cols {
                    s += self.a[i][k] * rhs.a[k][j];
                }
                out.a[i][j] = s;
            }
        }
        out
    }

    pub fn scale(&self, c: f64) -> SmallMat {
        SmallMat::from_fn(self.rows, self.cols, |i, j| c * self.a[i][j])
    }

    /// y = M x over the leading `cols` entries of `x`.
    pub fn mulvec(&self, x: &[f64]) -> [f64; MAX_DIM] {
        let mut y = [0.0; MAX_DIM];
        for i in 0..self.rows {
            let mut s = 0.0;
            for j in 0..self.cols {
                s += self.a[i][j] * x[j];
            }
            y[i] = s;
        }
        y
    }

    /// Gram matrix Mᵀ M (cols × cols).
    pub fn gram(&self) -> SmallMat {
        let mut g = SmallMat::zeros(self.cols, self.cols);
        for i in 0..self.cols {
            for j in 0..self.cols {
                let mut s = 0.0;
                for k in 0..self.rows {
                    s += self.a[k][i] * self.a[k][j];
                }
                g.a[i][j] = s;
            }
        }
        g
    }

    pub fn column(&self, j: usize) -> [f64; MAX_DIM] {
        let mut c = [0.0; MAX_DIM];
        for i in 0..self.rows {
            c[i] = self.a[i][j];
        }
        c
    }

    pub fn is_finite(&self) -> bool {
        for i in 0..self.rows {
            for j in 0..self.cols {
                if !self.a[i][j].is_finite() {
                    return false;
                }
            }
        }
        true
    }

    pub fn max_abs(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..self.rows {
            for j in 0..self.cols {
                m = m.max(self.a[i][j].abs());
            }
        }
        m
    }

    /// Inverse by Gauss-Jordan with partial pivoting. Square matrices only.
    pub fn inverse(&self) -> Result<SmallMat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.a;
        let mut inv = SmallMat::identity(n).a;
        for col in 0..n {
            let mut piv = col;
            for r in col + 1..n {
                if a[r][col].abs() > a[piv][col].abs() {
                    piv = r;
                }
            }
            if a[piv][col] == 0.0 || !a[piv][col].is_finite() {
                return Err(Error::NonFinite(format!(
                    "singular or non-finite pivot in {n}x{n} inverse"
                )));
            }
            a.swap(col, piv);
            inv.swap(col, piv);
            let d = a[col][col];
            for j in 0..n {
                a[col][j] /= d;
                inv[col][j] /= d;
            }
            for r in 0..n {
                if r != col {
                    let f = a[r][col];
                    if f != 0.0 {
                        for j in 0..n {
                            a[r][j] -= f * a[col][j];
                            inv[r][j] -= f * inv[col][j];
                        }
                    }
                }
            }
        }
        Ok(SmallMat { rows: n, cols: n, a: inv })
    }

    /// Determinant by LU with partial pivoting.
    pub fn det(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.a;
        let mut d = 1.0;
        for col in 0..n {
            let mut piv = col;
            for r in col + 1..n {
                if a[r][col].abs() > a[piv][col].abs() {
                    piv = r;
                }
            }
            if piv != col {
                a.swap(col, piv);
                d = -d;
            }
            if a[col][col] == 0.0 {
                return 0.0;
            }
            d *= a[col][col];
            for r in col + 1..n {
                let f = a[r][col] / a[col][col];
                for j in col..n {
                    a[r][j] -= f * a[col][j];
                }
            }
        }
        d
    }
}

/// Euclidean norm of the leading `len` entries.
pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Compensated (Kahan) accumulator. Reductions that feed the energy-budget
/// comparison must not lose signal to summation error; the per-node terms are
/// O(1) while the signal sits many digits down.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    c: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        KahanSum { sum: 0.0, c: 0.0 }
    }

    #[inline(always)]
    pub fn add(&mut self, v: f64) {
        let y = v - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}
