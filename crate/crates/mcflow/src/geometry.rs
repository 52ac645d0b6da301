//! Pointwise geometry of the graph Σ = {(x, f(x))}.
//!
//! Everything is organized around the singular value decomposition of Df:
//! with Df·aᵢ = λᵢ·a_{n+i}, the vectors eᵢ = (aᵢ + λᵢa_{n+i})/√(1+λᵢ²) and
//! e_{n+i} = (a_{n+i} − λᵢaᵢ)/√(1+λᵢ²) are orthonormal tangent and normal
//! frames, the induced metric is diagonal on {aᵢ} with entries 1+λᵢ², the
//! projection gauge is *Ω₁ = 1/√∏(1+λᵢ²), and the ambient form
//! P(X,Y) = ⟨π₁X,π₁Y⟩ − ⟨π₂X,π₂Y⟩ restricts to ±(1−λᵢ²)/(1+λᵢ²) on the two
//! frames. Unmatched dimensions (m ≠ n) carry λ = 0 and canonical basis
//! completions.

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::linalg::{SmallMat, MAX_AMB, MAX_DIM};
use crate::svd::{svd_small, Svd};

/// Induced metric g = I + (Df)ᵀDf with its inverse and determinant.
pub fn induced_metric(jet: &Jet) -> Result<(SmallMat, SmallMat, f64)> {
    if !jet.df.is_finite() {
        return Err(Error::NonFinite("Df in induced_metric".into()));
    }
    let n = jet.n;
    let mut g = jet.df.gram();
    for i in 0..n {
        g.set(i, i, g.get(i, i) + 1.0);
    }
    let det = g.det();
    let g_inv = g.inverse()?;
    Ok((g, g_inv, det))
}

/// Singular values and bases of Df (descending, deterministic frames).
pub fn singular_values(df: &SmallMat) -> Result<Svd> {
    svd_small(df)
}

/// *Ω₁ = 1/√∏(1+λᵢ²); padded zero singular values contribute factors of 1.
pub fn star_omega1(lambda: &[f64]) -> f64 {
    let mut p = 1.0;
    for &l in lambda {
        p *= 1.0 + l * l;
    }
    1.0 / p.sqrt()
}

/// Eigenvalues of P restricted to the tangent space ((1−λᵢ²)/(1+λᵢ²), one per
/// base dimension) and to the normal space (the exact negatives on matched
/// indices, −1 on unmatched fiber directions).
pub fn p_form_eigen(lambda: &[f64], n: usize, m: usize) -> ([f64; MAX_DIM], [f64; MAX_DIM]) {
    let k = n.min(m);
    let mut tangent = [1.0; MAX_DIM];
    let mut normal = [-1.0; MAX_DIM];
    for i in 0..n {
        let l = if i < k { lambda[i] } else { 0.0 };
        tangent[i] = (1.0 - l * l) / (1.0 + l * l);
    }
    for al in 0..m {
        normal[al] = if al < k { -tangent[al] } else { -1.0 };
    }
    (tangent, normal)
}

/// √det(I + (Df)ᵀDf) ≥ 1.
pub fn area_density(df: &SmallMat) -> f64 {
    let n = df.cols;
    let mut g = df.gram();
    for i in 0..n {
        g.set(i, i, g.get(i, i) + 1.0);
    }
    g.det().sqrt()
}

/// Right side of the nonparametric system: component α is g^{ij} D²f^α_{ij}.
pub fn system_residual(jet: &Jet) -> Result<[f64; MAX_DIM]> {
    let (_, g_inv, _) = induced_metric(jet)?;
    let n = jet.n;
    let mut r = [0.0; MAX_DIM];
    for al in 0..jet.m {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += g_inv.get(i, j) * jet.d2[al].get(i, j);
            }
        }
        r[al] = s;
    }
    Ok(r)
}

/// Euclidean norm of the residual vector.
pub fn residual_norm(jet: &Jet) -> Result<f64> {
    let r = system_residual(jet)?;
    Ok(r[..jet.m].iter().map(|v| v * v).sum::<f64>().sqrt())
}

/// Orthonormal ambient frames adapted to the SVD of Df.
#[derive(Clone, Copy, Debug)]
pub struct Frames {
    pub n: usize,
    pub m: usize,
    /// Padded singular values: lambda[i] for i < min(n,m), else 0.
    pub lambda: [f64; MAX_DIM],
    /// Tangent frame vectors e_i, ambient components.
    pub tangent: [[f64; MAX_AMB]; MAX_DIM],
    /// Normal frame vectors e_{n+α}.
    pub normal: [[f64; MAX_AMB]; MAX_DIM],
    pub svd: Svd,
}

pub fn frames(df: &SmallMat) -> Result<Frames> {
    let svd = svd_small(df)?;
    let (m, n) = (df.rows, df.cols);
    let k = n.min(m);
    let mut lambda = [0.0; MAX_DIM];
    lambda[..k].copy_from_slice(&svd.values[..k]);

    let mut tangent = [[0.0; MAX_AMB]; MAX_DIM];
    for i in 0..n {
        let l = if i < k { lambda[i] } else { 0.0 };
        let norm = (1.0 + l * l).sqrt();
        for a in 0..n {
            tangent[i][a] = svd.right.get(a, i) / norm;
        }
        if i < k {
            for b in 0..m {
                tangent[i][n + b] = l * svd.left.get(b, i) / norm;
            }
        }
    }
    let mut normal = [[0.0; MAX_AMB]; MAX_DIM];
    for al in 0..m {
        let l = if al < k { lambda[al] } else { 0.0 };
        let norm = (1.0 + l * l).sqrt();
        if al < k {
            for a in 0..n {
                normal[al][a] = -l * svd.right.get(a, al) / norm;
            }
        }
        for b in 0..m {
            normal[al][n + b] = svd.left.get(b, al) / norm;
        }
    }
    Ok(Frames { n, m, lambda, tangent, normal, svd })
}

/// Second fundamental form in the adapted frames, with the mean curvature
/// vector and |A|².
#[derive(Clone, Copy, Debug)]
pub struct SecondFundamental {
    pub n: usize,
    pub m: usize,
    /// h[α][i][k]: normal frame index α, orthonormal tangent indices i, k.
    pub h: [[[f64; MAX_DIM]; MAX_DIM]; MAX_DIM],
    /// H_α = Σᵢ h[α][i][i].
    pub h_alpha: [f64; MAX_DIM],
    /// Mean curvature vector in ambient coordinates.
    pub mean: [f64; MAX_AMB],
    pub a2: f64,
}

pub fn second_fundamental_form(jet: &Jet) -> Result<(SecondFundamental, Frames)> {
    let fr = frames(&jet.df)?;
    let (n, m) = (jet.n, jet.m);
    let k = n.min(m);

    // W_α(a,b) = Σ_β left[β][α] · D²f^β(a,b): fiber components rotated into
    // the left singular basis.
    let mut w = [[[0.0; MAX_DIM]; MAX_DIM]; MAX_DIM];
    for al in 0..m {
        for a in 0..n {
            for b in a..n {
                let mut s = 0.0;
                for be in 0..m {
                    s += fr.svd.left.get(be, al) * jet.d2[be].get(a, b);
                }
                w[al][a][b] = s;
                w[al][b][a] = s;
            }
        }
    }

    let lam = |i: usize| if i < k { fr.lambda[i] } else { 0.0 };
    let mut h = [[[0.0; MAX_DIM]; MAX_DIM]; MAX_DIM];
    let mut a2 = 0.0;
    let mut h_alpha = [0.0; MAX_DIM];
    for al in 0..m {
        let nal = (1.0 + lam(al) * lam(al)).sqrt();
        for i in 0..n {
            let ni = (1.0 + lam(i) * lam(i)).sqrt();
            for kk in i..n {
                let nk = (1.0 + lam(kk) * lam(kk)).sqrt();
                // aᵢᵀ W_α a_k in the right singular basis
                let mut s = 0.0;
                for a in 0..n {
                    let ria = fr.svd.right.get(a, i);
                    if ria == 0.0 {
                        continue;
                    }
                    let mut row = 0.0;
                    for b in 0..n {
                        row += w[al][a][b] * fr.svd.right.get(b, kk);
                    }
                    s += ria * row;
                }
                let v = s / (nal * ni * nk);
                h[al][i][kk] = v;
                h[al][kk][i] = v;
                a2 += if i == kk { v * v } else { 2.0 * v * v };
            }
            h_alpha[al] += h[al][i][i];
        }
    }

    let mut mean = [0.0; MAX_AMB];
    for al in 0..m {
        for a in 0..n + m {
            mean[a] += h_alpha[al] * fr.normal[al][a];
        }
    }
    Ok((SecondFundamental { n, m, h, h_alpha, mean, a2 }, fr))
}

/// The quadratic form Σh² + Σλᵢ²h²_{(i),ik} + 2Σ_{i<j}λᵢλⱼh_{(i),jk}h_{(j),ik}
/// in the adapted frames; nonnegative whenever max_{i≠j}|λᵢλⱼ| ≤ 1.
pub fn stability_bracket(
    lambda: &[f64; MAX_DIM],
    h: &[[[f64; MAX_DIM]; MAX_DIM]; MAX_DIM],
    n: usize,
    m: usize,
) -> f64 {
    let k = n.min(m);
    let mut s = 0.0;
    for al in 0..m {
        for l in 0..n {
            for kk in 0..n {
                s += h[al][l][kk] * h[al][l][kk];
            }
        }
    }
    for i in 0..k {
        for kk in 0..n {
            s += lambda[i] * lambda[i] * h[i][i][kk] * h[i][i][kk];
        }
    }
    for i in 0..k {
        for j in i + 1..k {
            for kk in 0..n {
                s += 2.0 * lambda[i] * lambda[j] * h[i][j][kk] * h[j][i][kk];
            }
        }
    }
    s
}

/// Largest |λᵢλⱼ| over distinct index pairs (0 when fewer than two).
pub fn max_pair_product(lambda: &[f64], count: usize) -> f64 {
    let mut best = 0.0f64;
    for i in 0..count {
        for j in i + 1..count {
            best = best.max((lambda[i] * lambda[j]).abs());
        }
    }
    best
}

/// v minus its projection onto the tangent space of the graph; idempotent.
pub fn normal_projection(v: &[f64; MAX_AMB], df: &SmallMat) -> Result<[f64; MAX_AMB]> {
    let (m, n) = (df.rows, df.cols);
    let mut g = df.gram();
    for i in 0..n {
        g.set(i, i, g.get(i, i) + 1.0);
    }
    let g_inv = g.inverse()?;
    // w = Tᵀ v with T_a = (e_a, Df e_a)
    let mut w = [0.0; MAX_DIM];
    for a in 0..n {
        let mut s = v[a];
        for be in 0..m {
            s += df.get(be, a) * v[n + be];
        }
        w[a] = s;
    }
    let u = g_inv.mulvec(&w);
    let mut out = *v;
    for a in 0..n {
        out[a] -= u[a];
    }
    for be in 0..m {
        let mut s = 0.0;
        for a in 0..n {
            s += df.get(be, a) * u[a];
        }
        out[n + be] -= s;
    }
    Ok(out)
}

/// Everything the monitors need at one node.
#[derive(Clone, Debug)]
pub struct GeomSample {
    pub n: usize,
    pub m: usize,
    pub g: SmallMat,
    pub g_inv: SmallMat,
    pub det_g: f64,
    pub lambda: [f64; MAX_DIM],
    pub star_omega1: f64,
    pub residual: [f64; MAX_DIM],
    pub mean: [f64; MAX_AMB],
    pub h_alpha: [f64; MAX_DIM],
    pub a2: f64,
    pub sff: [[[f64; MAX_DIM]; MAX_DIM]; MAX_DIM],
    pub p_tangent: [f64; MAX_DIM],
    pub p_normal: [f64; MAX_DIM],
    pub max_pair_product: f64,
}

pub fn geom_sample(jet: &Jet) -> Result<GeomSample> {
    let (g, g_inv, det_g) = induced_metric(jet)?;
    let (sff, fr) = second_fundamental_form(jet)?;
    let k = jet.n.min(jet.m);
    let (p_tangent, p_normal) = p_form_eigen(&fr.lambda, jet.n, jet.m);
    let mut residual = [0.0; MAX_DIM];
    for al in 0..jet.m {
        let mut s = 0.0;
        for i in 0..jet.n {
            for j in 0..jet.n {
                s += g_inv.get(i, j) * jet.d2[al].get(i, j);
            }
        }
        residual[al] = s;
    }
    Ok(GeomSample {
        n: jet.n,
        m: jet.m,
        g,
        g_inv,
        det_g,
        lambda: fr.lambda,
        star_omega1: star_omega1(&fr.lambda[..k]),
        residual,
        mean: sff.mean,
        h_alpha: sff.h_alpha,
        a2: sff.a2,
        sff: sff.h,
        p_tangent,
        p_normal,
        max_pair_product: max_pair_product(&fr.lambda, k),
    })
}
