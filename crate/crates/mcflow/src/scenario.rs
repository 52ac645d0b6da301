//! Built-in boundary/initial data ψ with analytic first and second
//! derivatives, plus the Hopf-map cone family evaluated on annuli.
//!
//! Real coordinates for the Hopf data follow z₁ = x₁ + i·x₂, z₂ = x₃ + i·x₄,
//! with 2z₁z̄₂ split into real and imaginary parts; under this convention the
//! quadratic extension q satisfies |q(x)| = |x|² identically.

use crate::domain::{DomainKind, DomainSpec};
use crate::error::{Error, Result};
use crate::linalg::{SmallMat, MAX_DIM};

/// Margin kept between a Scherk domain and the poles of ln(cos).
const SCHERK_MARGIN: f64 = 0.05;

#[derive(Clone, Debug, PartialEq)]
pub enum Scenario {
    /// ψ(x) = A·x + b; stationary for every slope.
    Affine { a: SmallMat, b: [f64; MAX_DIM] },
    /// ψ(x, y) = (x² − y², 2xy); a calibrated stationary graph (n = m = 2).
    HolomorphicSquare,
    /// ψ = ln(cos x / cos y); classical stationary hypersurface (n = 2, m = 1).
    Scherk,
    /// ψ_R(x) = R·q(x), the degree-2 homogeneous extension of the Hopf map
    /// scaled by R (n = 4, m = 3, unit concentric ball).
    HopfQuadratic { r: f64 },
    /// f(x) = R·q(x)/|x| away from the vertex; evaluation only (n = 4, m = 3).
    LawsonOssermanCone { r: f64, r_min: f64 },
}

/// Hopf quadratic q: ℝ⁴ → ℝ³.
pub fn hopf_q(x: &[f64; MAX_DIM]) -> [f64; MAX_DIM] {
    let (x1, x2, x3, x4) = (x[0], x[1], x[2], x[3]);
    [
        x1 * x1 + x2 * x2 - x3 * x3 - x4 * x4,
        2.0 * (x1 * x3 + x2 * x4),
        2.0 * (x2 * x3 - x1 * x4),
        0.0,
    ]
}

fn hopf_dq(x: &[f64; MAX_DIM]) -> SmallMat {
    let (x1, x2, x3, x4) = (x[0], x[1], x[2], x[3]);
    SmallMat::from_rows(&[
        &[2.0 * x1, 2.0 * x2, -2.0 * x3, -2.0 * x4],
        &[2.0 * x3, 2.0 * x4, 2.0 * x1, 2.0 * x2],
        &[-2.0 * x4, 2.0 * x3, 2.0 * x2, -2.0 * x1],
    ])
}

fn hopf_hessians() -> [SmallMat; MAX_DIM] {
    let mut h1 = SmallMat::zeros(4, 4);
    h1.set(0, 0, 2.0);
    h1.set(1, 1, 2.0);
    h1.set(2, 2, -2.0);
    h1.set(3, 3, -2.0);
    let mut h2 = SmallMat::zeros(4, 4);
    h2.set(0, 2, 2.0);
    h2.set(2, 0, 2.0);
    h2.set(1, 3, 2.0);
    h2.set(3, 1, 2.0);
    let mut h3 = SmallMat::zeros(4, 4);
    h3.set(1, 2, 2.0);
    h3.set(2, 1, 2.0);
    h3.set(0, 3, -2.0);
    h3.set(3, 0, -2.0);
    [h1, h2, h3, SmallMat::zeros(4, 4)]
}

pub fn affine(a: SmallMat, b: [f64; MAX_DIM]) -> Scenario {
    Scenario::Affine { a, b }
}

pub fn holomorphic_square() -> Scenario {
    Scenario::HolomorphicSquare
}

pub fn scherk() -> Scenario {
    Scenario::Scherk
}

pub fn hopf_quadratic(r: f64) -> Scenario {
    Scenario::HopfQuadratic { r }
}

pub fn lawson_osserman_cone(r: f64, r_min: f64) -> Scenario {
    Scenario::LawsonOssermanCone { r, r_min }
}

impl Scenario {
    pub fn n(&self) -> usize {
        match self {
            Scenario::Affine { a, .. } => a.cols,
            Scenario::HolomorphicSquare | Scenario::Scherk => 2,
            Scenario::HopfQuadratic { .. } | Scenario::LawsonOssermanCone { .. } => 4,
        }
    }

    pub fn m(&self) -> usize {
        match self {
            Scenario::Affine { a, .. } => a.rows,
            Scenario::HolomorphicSquare => 2,
            Scenario::Scherk => 1,
            Scenario::HopfQuadratic { .. } | Scenario::LawsonOssermanCone { .. } => 3,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Affine { .. } => "affine",
            Scenario::HolomorphicSquare => "holomorphic_square",
            Scenario::Scherk => "scherk",
            Scenario::HopfQuadratic { .. } => "hopf_quadratic",
            Scenario::LawsonOssermanCone { .. } => "lawson_osserman_cone",
        }
    }

    /// Continuum system residual vanishes identically.
    pub fn exact_solution(&self) -> bool {
        matches!(
            self,
            Scenario::Affine { .. } | Scenario::HolomorphicSquare | Scenario::Scherk
        )
    }

    /// Cannot serve as flow data (singular vertex); residual evaluation only.
    pub fn evaluation_only(&self) -> bool {
        matches!(self, Scenario::LawsonOssermanCone { .. })
    }

    pub fn psi(&self, x: &[f64; MAX_DIM]) -> Result<[f64; MAX_DIM]> {
        match self {
            Scenario::Affine { a, b } => {
                let mut y = a.mulvec(x);
                for i in 0..a.rows {
                    y[i] += b[i];
                }
                Ok(y)
            }
            Scenario::HolomorphicSquare => {
                Ok([x[0] * x[0] - x[1] * x[1], 2.0 * x[0] * x[1], 0.0, 0.0])
            }
            Scenario::Scherk => {
                let (cx, cy) = (x[0].cos(), x[1].cos());
                if cx <= 0.0 || cy <= 0.0 {
                    return Err(Error::ScenarioDomain(format!(
                        "scherk data undefined at ({}, {})",
                        x[0], x[1]
                    )));
                }
                Ok([(cx / cy).ln(), 0.0, 0.0, 0.0])
            }
            Scenario::HopfQuadratic { r } => {
                let q = hopf_q(x);
                Ok([r * q[0], r * q[1], r * q[2], 0.0])
            }
            Scenario::LawsonOssermanCone { r, r_min } => {
                let rad = cone_radius(x, *r_min)?;
                let q = hopf_q(x);
                Ok([r * q[0] / rad, r * q[1] / rad, r * q[2] / rad, 0.0])
            }
        }
    }

    pub fn d_psi(&self, x: &[f64; MAX_DIM]) -> Result<SmallMat> {
        match self {
            Scenario::Affine { a, .. } => Ok(*a),
            Scenario::HolomorphicSquare => Ok(SmallMat::from_rows(&[
                &[2.0 * x[0], -2.0 * x[1]],
                &[2.0 * x[1], 2.0 * x[0]],
            ])),
            Scenario::Scherk => Ok(SmallMat::from_rows(&[&[-x[0].tan(), x[1].tan()]])),
            Scenario::HopfQuadratic { r } => Ok(hopf_dq(x).scale(*r)),
            Scenario::LawsonOssermanCone { r, r_min } => {
                let rad = cone_radius(x, *r_min)?;
                let q = hopf_q(x);
                let dq = hopf_dq(x);
                let r3 = rad * rad * rad;
                Ok(SmallMat::from_fn(3, 4, |al, i| {
                    r * (dq.get(al, i) / rad - q[al] * x[i] / r3)
                }))
            }
        }
    }

    /// Per-component Hessians D²ψ^α.
    pub fn d2_psi(&self, x: &[f64; MAX_DIM]) -> Result<[SmallMat; MAX_DIM]> {
        match self {
            Scenario::Affine { a, .. } => {
                Ok([SmallMat::zeros(a.cols, a.cols); MAX_DIM])
            }
            Scenario::HolomorphicSquare => {
                let mut h1 = SmallMat::zeros(2, 2);
                h1.set(0, 0, 2.0);
                h1.set(1, 1, -2.0);
                let mut h2 = SmallMat::zeros(2, 2);
                h2.set(0, 1, 2.0);
                h2.set(1, 0, 2.0);
                Ok([h1, h2, SmallMat::zeros(2, 2), SmallMat::zeros(2, 2)])
            }
            Scenario::Scherk => {
                let (sx, sy) = (1.0 / x[0].cos(), 1.0 / x[1].cos());
                let mut h = SmallMat::zeros(2, 2);
                h.set(0, 0, -sx * sx);
                h.set(1, 1, sy * sy);
                Ok([h, SmallMat::zeros(2, 2), SmallMat::zeros(2, 2), SmallMat::zeros(2, 2)])
            }
            Scenario::HopfQuadratic { r } => {
                let hs = hopf_hessians();
                Ok([hs[0].scale(*r), hs[1].scale(*r), hs[2].scale(*r), SmallMat::zeros(4, 4)])
            }
            Scenario::LawsonOssermanCone { r, r_min } => {
                let rad = cone_radius(x, *r_min)?;
                let q = hopf_q(x);
                let dq = hopf_dq(x);
                let hs = hopf_hessians();
                let r3 = rad * rad * rad;
                let r5 = r3 * rad * rad;
                let mut out = [SmallMat::zeros(4, 4); MAX_DIM];
                for al in 0..3 {
                    out[al] = SmallMat::from_fn(4, 4, |i, j| {
                        let delta = if i == j { 1.0 } else { 0.0 };
                        r * (hs[al].get(i, j) / rad
                            - (dq.get(al, i) * x[j] + dq.get(al, j) * x[i]) / r3
                            - q[al] * delta / r3
                            + 3.0 * q[al] * x[i] * x[j] / r5)
                    });
                }
                Ok(out)
            }
        }
    }

    /// Validate that the scenario can live on the given domain.
    pub fn check_domain(&self, spec: &DomainSpec) -> Result<()> {
        if spec.n != self.n() {
            return Err(Error::ScenarioDomain(format!(
                "scenario {} needs n = {}, domain has n = {}",
                self.name(),
                self.n(),
                spec.n
            )));
        }
        match self {
            Scenario::Scherk => {
                let lim = std::f64::consts::FRAC_PI_2 - SCHERK_MARGIN;
                let ok = match spec.kind {
                    DomainKind::Box { min, max } => {
                        (0..2).all(|i| min[i] > -lim && max[i] < lim)
                    }
                    DomainKind::Ball { center, radius } => {
                        (0..2).all(|i| center[i] - radius > -lim && center[i] + radius < lim)
                    }
                };
                if !ok {
                    return Err(Error::ScenarioDomain(format!(
                        "scherk domain must stay inside |x_i| < {lim:.4}"
                    )));
                }
            }
            Scenario::LawsonOssermanCone { .. } => {
                return Err(Error::ScenarioDomain(
                    "lawson_osserman_cone is evaluation-only; use cone-analyze".into(),
                ));
            }
            _ => {}
        }
        Ok(())
    }
}

fn cone_radius(x: &[f64; MAX_DIM], r_min: f64) -> Result<f64> {
    let rad = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3]).sqrt();
    if rad < r_min {
        return Err(Error::ScenarioDomain(format!(
            "cone evaluated at |x| = {rad:.6} < r_min = {r_min}"
        )));
    }
    Ok(rad)
}

/// Metadata for `list-scenarios`.
pub struct ScenarioInfo {
    pub name: &'static str,
    pub n: &'static str,
    pub m: &'static str,
    pub params: &'static str,
}

pub fn catalog() -> Vec<ScenarioInfo> {
    vec![
        ScenarioInfo {
            name: "affine",
            n: "2..4 (from slope)",
            m: "1..4 (from slope)",
            params: "slope = m x n matrix, rows ';', entries ','; offset = m entries (optional)",
        },
        ScenarioInfo { name: "holomorphic_square", n: "2", m: "2", params: "none" },
        ScenarioInfo { name: "scherk", n: "2", m: "1", params: "none" },
        ScenarioInfo { name: "hopf_quadratic", n: "4", m: "3", params: "R > 0" },
        ScenarioInfo {
            name: "lawson_osserman_cone",
            n: "4",
            m: "3",
            params: "R > 0, rmin in (0, 1); evaluation only",
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sample_scenarios() -> Vec<(Scenario, [f64; MAX_DIM], f64)> {
        // (scenario, sampling center, sampling radius) with points valid
        let a = SmallMat::from_rows(&[&[0.5, 0.0], &[0.25, -0.5]]);
        vec![
            (affine(a, [1.0, -2.0, 0.0, 0.0]), [0.0; MAX_DIM], 1.0),
            (holomorphic_square(), [0.0; MAX_DIM], 1.0),
            (scherk(), [0.0; MAX_DIM], 0.9),
            (hopf_quadratic(0.7), [0.0; MAX_DIM], 1.0),
            (lawson_osserman_cone(1.0, 0.3), [0.6, 0.0, 0.0, 0.0], 0.15),
        ]
    }

    #[test]
    fn hopf_q_norm_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1_000_000 {
            let mut x = [0.0; MAX_DIM];
            for v in &mut x {
                *v = rng.random_range(-2.0..2.0);
            }
            let q = hopf_q(&x);
            let qn = (q[0] * q[0] + q[1] * q[1] + q[2] * q[2]).sqrt();
            let xn2 = x.iter().map(|v| v * v).sum::<f64>();
            assert!((qn - xn2).abs() <= 1e-12 * (1.0 + xn2));
        }
    }

    #[test]
    fn hopf_boundary_norm_is_r() {
        let scn = hopf_quadratic(0.25);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..1000 {
            let mut x = [0.0; MAX_DIM];
            let mut n2 = 0.0;
            for v in &mut x {
                *v = rng.random_range(-1.0..1.0f64);
                n2 += *v * *v;
            }
            let n = n2.sqrt();
            for v in &mut x {
                *v /= n;
            }
            let p = scn.psi(&x).unwrap();
            let pn = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
            assert!((pn - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn callbacks_match_finite_differences() {
        // centered differences of psi agree with d_psi to 10 h^2
        let h = 1e-4;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for (scn, center, rad) in sample_scenarios() {
            let n = scn.n();
            let m = scn.m();
            for _ in 0..100 {
                let mut x = center;
                for i in 0..n {
                    x[i] += rng.random_range(-rad..rad);
                }
                let d = scn.d_psi(&x).unwrap();
                let d2 = scn.d2_psi(&x).unwrap();
                for i in 0..n {
                    let mut xp = x;
                    xp[i] += h;
                    let mut xm = x;
                    xm[i] -= h;
                    let fp = scn.psi(&xp).unwrap();
                    let fm = scn.psi(&xm).unwrap();
                    for al in 0..m {
                        let fd = (fp[al] - fm[al]) / (2.0 * h);
                        assert!(
                            (fd - d.get(al, i)).abs() <= 10.0 * h * h + 1e-10,
                            "{} dpsi[{al}][{i}]",
                            scn.name()
                        );
                        let f0 = scn.psi(&x).unwrap();
                        let sd = (fp[al] - 2.0 * f0[al] + fm[al]) / (h * h);
                        assert!(
                            (sd - d2[al].get(i, i)).abs() <= 10.0 * h + 1e-6,
                            "{} d2psi[{al}][{i}][{i}]",
                            scn.name()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn cone_homogeneity_and_vertex_error() {
        let scn = lawson_osserman_cone(1.118, 0.3);
        let x = [0.5, 0.2, -0.4, 0.3];
        let f1 = scn.psi(&x).unwrap();
        let c = 1.5;
        let xc = [c * x[0], c * x[1], c * x[2], c * x[3]];
        let fc = scn.psi(&xc).unwrap();
        for al in 0..3 {
            assert!((fc[al] - c * f1[al]).abs() < 1e-12);
        }
        assert!(scn.psi(&[0.1, 0.0, 0.0, 0.0]).is_err());
        assert!(scn.d_psi(&[0.0; 4]).is_err());
    }

    #[test]
    fn scherk_values_and_domain_guard() {
        let scn = scherk();
        assert_eq!(scn.psi(&[0.0; 4]).unwrap()[0], 0.0);
        let ok = DomainSpec::boxed(2, [-0.8, -0.8, 0.0, 0.0], [0.8, 0.8, 0.0, 0.0], 0.1).unwrap();
        assert!(scn.check_domain(&ok).is_ok());
        let too_big =
            DomainSpec::boxed(2, [-1.55, -1.55, 0.0, 0.0], [1.55, 1.55, 0.0, 0.0], 0.31).unwrap();
        assert!(scn.check_domain(&too_big).is_err());
    }

    #[test]
    fn cone_rejected_for_flow_domains() {
        let scn = lawson_osserman_cone(1.0, 0.3);
        let ball = DomainSpec::ball(4, [0.0; 4], 1.0, 0.25).unwrap();
        assert!(scn.check_domain(&ball).is_err());
    }
}
