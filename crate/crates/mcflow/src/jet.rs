//! Discrete first and second derivatives of lattice fields, and the
//! pointwise derivative norms |Dψ| = sup_{|v|=1}|Dψ(v)| and
//! |D²ψ| = sup_{|v|=1}|D²ψ(v,v)| with their suprema over a region.
//!
//! Axis derivatives use three-point stencils that honor the exact boundary
//! intersection distances (exact on polynomials of degree ≤ 2); mixed
//! derivatives use the four-point cross stencil where all diagonals stay in
//! Ω̄ and deterministic one-sided fallbacks where they do not.

use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::domain::{Lattice, Link, MixedPlan, NodeClass};
use crate::error::{Error, Result};
use crate::linalg::{SmallMat, MAX_DIM};
use crate::scenario::Scenario;
pub use crate::svd::operator_norm;

/// Direction samples used per point when maximizing |D²ψ(v,v)|.
pub const D2_DIRECTION_SAMPLES: usize = 12_000;

/// The map f: Ω → ℝᵐ at one time. Values live on every lattice node
/// (exterior slots are zero and never read) plus the exact boundary
/// intersection points; the latter carry the Dirichlet data.
#[derive(Clone, Debug)]
pub struct GraphField {
    pub m: usize,
    pub t: f64,
    pub lattice: Arc<Lattice>,
    pub values: Vec<f64>,
    pub bvalues: Vec<f64>,
}

impl GraphField {
    pub fn from_scenario(lattice: Arc<Lattice>, scn: &Scenario) -> Result<GraphField> {
        scn.check_domain(&lattice.spec)?;
        Self::sample(lattice, scn.m(), |x| scn.psi(x))
    }

    /// Sample an arbitrary map onto the lattice (used by tests and by the
    /// evaluation-only scenarios).
    pub fn sample(
        lattice: Arc<Lattice>,
        m: usize,
        mut f: impl FnMut(&[f64; MAX_DIM]) -> Result<[f64; MAX_DIM]>,
    ) -> Result<GraphField> {
        let mut values = vec![0.0; lattice.node_count() * m];
        for node in lattice.non_exterior() {
            let y = f(&lattice.coord(node))?;
            values[node as usize * m..node as usize * m + m].copy_from_slice(&y[..m]);
        }
        let mut bvalues = vec![0.0; lattice.bpoints.len() * m];
        for (k, p) in lattice.bpoints.iter().enumerate() {
            let y = f(p)?;
            bvalues[k * m..k * m + m].copy_from_slice(&y[..m]);
        }
        Ok(GraphField { m, t: 0.0, lattice, values, bvalues })
    }

    #[inline(always)]
    pub fn value(&self, node: u32) -> &[f64] {
        &self.values[node as usize * self.m..node as usize * self.m + self.m]
    }

    #[inline(always)]
    pub fn bvalue(&self, bp: u32) -> &[f64] {
        &self.bvalues[bp as usize * self.m..bp as usize * self.m + self.m]
    }

    #[inline(always)]
    pub fn link_value(&self, link: &Link) -> &[f64] {
        match link {
            Link::Node(nd) => self.value(*nd),
            Link::Cut { bpoint, .. } => self.bvalue(*bpoint),
        }
    }

    /// First non-finite value over Ω̄ (nodes and boundary points), if any.
    pub fn first_non_finite(&self) -> Option<usize> {
        for node in self.lattice.non_exterior() {
            if self.value(node).iter().any(|v| !v.is_finite()) {
                return Some(node as usize);
            }
        }
        (0..self.lattice.bpoints.len())
            .find(|&k| self.bvalue(k as u32).iter().any(|v| !v.is_finite()))
            .map(|k| self.lattice.node_count() + k)
    }

    /// Per-component max and min over Ω̄ (nodes and boundary points).
    pub fn component_range(&self) -> (Vec<f64>, Vec<f64>) {
        let mut hi = vec![f64::NEG_INFINITY; self.m];
        let mut lo = vec![f64::INFINITY; self.m];
        for node in self.lattice.non_exterior() {
            for (al, &v) in self.value(node).iter().enumerate() {
                hi[al] = hi[al].max(v);
                lo[al] = lo[al].min(v);
            }
        }
        for k in 0..self.lattice.bpoints.len() {
            for (al, &v) in self.bvalue(k as u32).iter().enumerate() {
                hi[al] = hi[al].max(v);
                lo[al] = lo[al].min(v);
            }
        }
        (hi, lo)
    }
}

/// Df and D²f at one node; d2[α] is symmetric by construction.
#[derive(Clone, Copy, Debug)]
pub struct Jet {
    pub n: usize,
    pub m: usize,
    pub df: SmallMat,
    pub d2: [SmallMat; MAX_DIM],
    /// True when some mixed derivative used a fallback stencil.
    pub fallback: bool,
}

/// Jet at an interior node.
pub fn jet_at(field: &GraphField, node: u32) -> Result<Jet> {
    let lat = &field.lattice;
    if node as usize >= lat.node_count() || lat.class[node as usize] != NodeClass::Interior {
        return Err(Error::NotInterior { node: node as usize });
    }
    Ok(jet_at_slot(field, lat.interior_slot[node as usize] as usize))
}

/// Jet at interior slot `slot`; hot path, no validation.
pub fn jet_at_slot(field: &GraphField, slot: usize) -> Jet {
    let lat = &field.lattice;
    let n = lat.n();
    let m = field.m;
    let h = lat.spec.h;
    let node = lat.interior[slot];
    let v0 = field.value(node);
    let links = &lat.links[slot];

    let mut df = SmallMat::zeros(m, n);
    let mut d2 = [SmallMat::zeros(n, n); MAX_DIM];

    for axis in 0..n {
        let lm = &links[2 * axis];
        let lp = &links[2 * axis + 1];
        let (tm, tp) = (lm.frac(), lp.frac());
        let vm = field.link_value(lm);
        let vp = field.link_value(lp);
        let denom1 = tm * tp * (tm + tp) * h;
        let denom2 = denom1 * h;
        for al in 0..m {
            let d = (tm * tm * vp[al] - tp * tp * vm[al] - (tm * tm - tp * tp) * v0[al]) / denom1;
            df.set(al, axis, d);
            let s = 2.0 * (tm * vp[al] + tp * vm[al] - (tm + tp) * v0[al]) / denom2;
            d2[al].set(axis, axis, s);
        }
    }

    let mi = lat.multi(node);
    let mut fallback = false;
    for i in 0..n {
        for j in i + 1..n {
            let plan = lat.mixed[slot][Lattice::pair_index(i, j)];
            if plan != MixedPlan::Cross {
                fallback = true;
            }
            let at = |di: i64, dj: i64| -> &[f64] {
                let mut mm = mi;
                mm[i] = (mm[i] as i64 + di) as usize;
                mm[j] = (mm[j] as i64 + dj) as usize;
                field.value(lat.index(&mm))
            };
            for al in 0..m {
                let v = match plan {
                    MixedPlan::Cross => {
                        (at(1, 1)[al] - at(1, -1)[al] - at(-1, 1)[al] + at(-1, -1)[al])
                            / (4.0 * h * h)
                    }
                    MixedPlan::SidedJ(s) => {
                        let s = s as i64;
                        s as f64 * ((at(1, s)[al] - at(-1, s)[al]) - (at(1, 0)[al] - at(-1, 0)[al]))
                            / (2.0 * h * h)
                    }
                    MixedPlan::SidedI(s) => {
                        let s = s as i64;
                        s as f64 * ((at(s, 1)[al] - at(s, -1)[al]) - (at(0, 1)[al] - at(0, -1)[al]))
                            / (2.0 * h * h)
                    }
                    MixedPlan::Corner(si, sj) => {
                        let (si, sj) = (si as i64, sj as i64);
                        (si * sj) as f64
                            * (at(si, sj)[al] - at(si, 0)[al] - at(0, sj)[al] + v0[al])
                            / (h * h)
                    }
                    MixedPlan::Unavailable => 0.0,
                };
                d2[al].set(i, j, v);
                d2[al].set(j, i, v);
            }
        }
    }

    Jet { n, m, df, d2, fallback }
}

/// Jet of an analytic map by uniform central stencils around `x` (no
/// lattice); the sampling points must all be admissible for the map.
pub fn jet_of_map(
    n: usize,
    m: usize,
    x: &[f64; MAX_DIM],
    h: f64,
    mut f: impl FnMut(&[f64; MAX_DIM]) -> Result<[f64; MAX_DIM]>,
) -> Result<Jet> {
    let f0 = f(x)?;
    let mut df = SmallMat::zeros(m, n);
    let mut d2 = [SmallMat::zeros(n, n); MAX_DIM];
    let mut plus = [[0.0; MAX_DIM]; MAX_DIM];
    let mut minus = [[0.0; MAX_DIM]; MAX_DIM];
    for i in 0..n {
        let mut xp = *x;
        xp[i] += h;
        let mut xm = *x;
        xm[i] -= h;
        plus[i] = f(&xp)?;
        minus[i] = f(&xm)?;
        for al in 0..m {
            df.set(al, i, (plus[i][al] - minus[i][al]) / (2.0 * h));
            d2[al].set(i, i, (plus[i][al] - 2.0 * f0[al] + minus[i][al]) / (h * h));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let mut xpp = *x;
            xpp[i] += h;
            xpp[j] += h;
            let mut xpm = *x;
            xpm[i] += h;
            xpm[j] -= h;
            let mut xmp = *x;
            xmp[i] -= h;
            xmp[j] += h;
            let mut xmm = *x;
            xmm[i] -= h;
            xmm[j] -= h;
            let (fpp, fpm, fmp, fmm) = (f(&xpp)?, f(&xpm)?, f(&xmp)?, f(&xmm)?);
            for al in 0..m {
                let v = (fpp[al] - fpm[al] - fmp[al] + fmm[al]) / (4.0 * h * h);
                d2[al].set(i, j, v);
                d2[al].set(j, i, v);
            }
        }
    }
    Ok(Jet { n, m, df, d2, fallback: false })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    Closure,
    Boundary,
}

fn region_points(lat: &Lattice, region: Region) -> Vec<[f64; MAX_DIM]> {
    match region {
        Region::Closure => {
            let mut pts: Vec<[f64; MAX_DIM]> =
                lat.non_exterior().map(|nd| lat.coord(nd)).collect();
            pts.extend(lat.bpoints.iter().copied());
            pts
        }
        Region::Boundary => lat.boundary_sample_coords(),
    }
}

/// sup over the region of the operator norm of the analytic Dψ.
pub fn sup_norm_d(scn: &Scenario, lat: &Lattice, region: Region) -> Result<f64> {
    let pts = region_points(lat, region);
    if pts.is_empty() {
        return Err(Error::Empty("region has no sample points".into()));
    }
    let mut best = 0.0f64;
    for p in &pts {
        best = best.max(operator_norm(&scn.d_psi(p)?)?);
    }
    Ok(best)
}

/// sup over the region of |D²ψ|(x) = sup_{|v|=1} ‖D²ψ(x)(v,v)‖, by shared
/// direction sampling followed by projected-ascent refinement at the best
/// point. Deterministic for a fixed seed.
pub fn sup_norm_d2(scn: &Scenario, lat: &Lattice, region: Region, seed: u64) -> Result<f64> {
    let pts = region_points(lat, region);
    if pts.is_empty() {
        return Err(Error::Empty("region has no sample points".into()));
    }
    let n = scn.n();
    let m = scn.m();
    let dirs = unit_directions(n, D2_DIRECTION_SAMPLES, seed);

    let mut best = 0.0f64;
    let mut best_x = pts[0];
    let mut best_v = dirs[0];
    for p in &pts {
        let hess = scn.d2_psi(p)?;
        for v in &dirs {
            let val = d2_vv_norm2(&hess, v, n, m);
            if val > best {
                best = val;
                best_x = *p;
                best_v = *v;
            }
        }
    }
    let hess = scn.d2_psi(&best_x)?;
    let refined = ascend(&hess, best_v, n, m);
    Ok(refined.max(best.sqrt()))
}

/// ‖D²ψ(v,v)‖² for per-component Hessians.
fn d2_vv_norm2(hess: &[SmallMat; MAX_DIM], v: &[f64; MAX_DIM], n: usize, m: usize) -> f64 {
    let mut s = 0.0;
    for h in hess.iter().take(m) {
        let mut q = 0.0;
        for i in 0..n {
            let mut row = 0.0;
            for j in 0..n {
                row += h.get(i, j) * v[j];
            }
            q += v[i] * row;
        }
        s += q * q;
    }
    s
}

/// Projected gradient ascent for sqrt(d2_vv_norm2) on the unit sphere.
fn ascend(hess: &[SmallMat; MAX_DIM], mut v: [f64; MAX_DIM], n: usize, m: usize) -> f64 {
    let mut phi2 = d2_vv_norm2(hess, &v, n, m);
    let scale: f64 = (0..m).map(|al| hess[al].max_abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    let mut step = 0.05 / (scale * scale);
    for _ in 0..400 {
        // grad of phi^2: 4 * sum_al (v'Hv) Hv
        let mut grad = [0.0; MAX_DIM];
        for h in hess.iter().take(m) {
            let mut hv = [0.0; MAX_DIM];
            let mut q = 0.0;
            for i in 0..n {
                let mut row = 0.0;
                for j in 0..n {
                    row += h.get(i, j) * v[j];
                }
                hv[i] = row;
            }
            for i in 0..n {
                q += v[i] * hv[i];
            }
            for (gi, hvi) in grad.iter_mut().zip(hv.iter()).take(n) {
                *gi += 4.0 * q * hvi;
            }
        }
        let mut cand = [0.0; MAX_DIM];
        let mut norm2 = 0.0;
        for i in 0..n {
            cand[i] = v[i] + step * grad[i];
            norm2 += cand[i] * cand[i];
        }
        let norm = norm2.sqrt();
        for c in cand.iter_mut().take(n) {
            *c /= norm;
        }
        let cand_phi2 = d2_vv_norm2(hess, &cand, n, m);
        if cand_phi2 > phi2 {
            let rel = (cand_phi2 - phi2) / phi2.max(f64::MIN_POSITIVE);
            v = cand;
            phi2 = cand_phi2;
            step *= 1.3;
            if rel < 1e-14 {
                break;
            }
        } else {
            step *= 0.5;
            if step * scale * scale < 1e-18 {
                break;
            }
        }
    }
    phi2.sqrt()
}

/// Deterministic quasi-uniform unit vectors in ℝⁿ (Gaussian normalize).
pub fn unit_directions(n: usize, count: usize, seed: u64) -> Vec<[f64; MAX_DIM]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_d1f5_u64);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut v = [0.0; MAX_DIM];
        let mut norm2 = 0.0;
        for vi in v.iter_mut().take(n) {
            // Box-Muller
            let u1: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
            let u2: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            *vi = (-2.0 * u1.ln()).sqrt() * u2.cos();
            norm2 += *vi * *vi;
        }
        if norm2 < 1e-12 {
            continue;
        }
        let norm = norm2.sqrt();
        for vi in v.iter_mut().take(n) {
            *vi /= norm;
        }
        out.push(v);
    }
    out
}
