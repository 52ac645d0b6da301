//! Convex domains (boxes and balls) discretized as uniform lattices.
//!
//! Box faces coincide with lattice planes, so every stencil there is regular.
//! Ball boundaries are resolved by exact axis intersections with the sphere
//! (Shortley-Weller): an interior node whose axis neighbor falls outside
//! carries the fraction θ ∈ (0,1] of the spacing at which the ray meets ∂Ω,
//! and Dirichlet data is imposed at that exact point. Interior nodes closer
//! than half a spacing to the boundary along some axis are not time-stepped;
//! they are slaved to a linear interpolation between the exact boundary
//! intersection and the opposite neighbor, which removes the 1/θ stiffness
//! of the cut cells from the explicit scheme without moving the boundary.

use crate::error::{Error, Result};
use crate::linalg::MAX_DIM;

/// Interior nodes with a cut fraction below this along some axis are slaved
/// to interpolation instead of the PDE update.
pub const MIN_STEPPED_CUT: f64 = 0.5;

const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DomainKind {
    Box { min: [f64; MAX_DIM], max: [f64; MAX_DIM] },
    Ball { center: [f64; MAX_DIM], radius: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DomainSpec {
    pub n: usize,
    pub kind: DomainKind,
    pub h: f64,
}

impl DomainSpec {
    pub fn boxed(n: usize, min: [f64; MAX_DIM], max: [f64; MAX_DIM], h: f64) -> Result<Self> {
        let spec = DomainSpec { n, kind: DomainKind::Box { min, max }, h };
        spec.validate()?;
        Ok(spec)
    }

    pub fn ball(n: usize, center: [f64; MAX_DIM], radius: f64, h: f64) -> Result<Self> {
        let spec = DomainSpec { n, kind: DomainKind::Ball { center, radius }, h };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=MAX_DIM).contains(&self.n) {
            return Err(Error::InvalidDomain(format!("n = {} not in 2..=4", self.n)));
        }
        if !(self.h.is_finite() && self.h > 0.0) {
            return Err(Error::InvalidDomain(format!("h = {} must be positive", self.h)));
        }
        match self.kind {
            DomainKind::Box { min, max } => {
                for i in 0..self.n {
                    let side = max[i] - min[i];
                    if !(side.is_finite() && side > 0.0) {
                        return Err(Error::InvalidDomain(format!(
                            "box side {i} has nonpositive length {side}"
                        )));
                    }
                    let cells = side / self.h;
                    if (cells - cells.round()).abs() > 1e-9 * cells.max(1.0) || cells.round() < 1.0 {
                        return Err(Error::InvalidDomain(format!(
                            "h = {} does not divide box side {i} of length {side}",
                            self.h
                        )));
                    }
                }
            }
            DomainKind::Ball { center, radius } => {
                if !(radius.is_finite() && radius > 0.0) {
                    return Err(Error::InvalidDomain(format!("ball radius {radius} must be positive")));
                }
                for &c in &center[..self.n] {
                    if !c.is_finite() {
                        return Err(Error::InvalidDomain("ball center must be finite".into()));
                    }
                }
            }
        }
        Ok(())
    }

    /// Exact diameter δ of Ω.
    pub fn diameter(&self) -> f64 {
        match self.kind {
            DomainKind::Box { min, max } => {
                (0..self.n).map(|i| (max[i] - min[i]).powi(2)).sum::<f64>().sqrt()
            }
            DomainKind::Ball { radius, .. } => 2.0 * radius,
        }
    }

    /// Signed distance to ∂Ω along no particular direction: negative inside.
    /// Only the sign and rough magnitude are used for classification.
    fn boundary_gap(&self, x: &[f64; MAX_DIM]) -> f64 {
        match self.kind {
            DomainKind::Box { min, max } => {
                let mut worst = f64::NEG_INFINITY;
                for i in 0..self.n {
                    worst = worst.max(min[i] - x[i]).max(x[i] - max[i]);
                }
                worst
            }
            DomainKind::Ball { center, radius } => {
                let mut s = 0.0;
                for i in 0..self.n {
                    let d = x[i] - center[i];
                    s += d * d;
                }
                s.sqrt() - radius
            }
        }
    }

    pub fn contains(&self, x: &[f64; MAX_DIM]) -> bool {
        self.boundary_gap(x) <= BOUNDARY_TOL * self.diameter()
    }
}

/// Exact diameter of the domain (free-function form).
pub fn diameter(spec: &DomainSpec) -> f64 {
    spec.diameter()
}

/// A supporting hyperplane at a boundary point p: the affine function
/// d_P(y) = n̂·(y − p) with inward unit normal n̂, nonnegative on Ω̄.
#[derive(Clone, Copy, Debug)]
pub struct Hyperplane {
    pub point: [f64; MAX_DIM],
    pub normal: [f64; MAX_DIM],
    pub n: usize,
}

impl Hyperplane {
    pub fn dist(&self, y: &[f64; MAX_DIM]) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            s += self.normal[i] * (y[i] - self.point[i]);
        }
        s
    }
}

/// Supporting hyperplane at p ∈ ∂Ω. For boxes the face normal is used
/// (lowest axis first, min face before max, deterministic at edges and
/// corners); for balls the inward radial direction.
pub fn supporting_hyperplane(spec: &DomainSpec, p: &[f64; MAX_DIM]) -> Result<Hyperplane> {
    let tol = BOUNDARY_TOL * spec.diameter();
    match spec.kind {
        DomainKind::Box { min, max } => {
            for i in 0..spec.n {
                if p[i] < min[i] - tol || p[i] > max[i] + tol {
                    return Err(Error::NotOnBoundary {
                        dist: (p[i] - min[i]).abs().min((p[i] - max[i]).abs()),
                        tol,
                    });
                }
            }
            for i in 0..spec.n {
                if (p[i] - min[i]).abs() <= tol {
                    let mut normal = [0.0; MAX_DIM];
                    normal[i] = 1.0;
                    return Ok(Hyperplane { point: *p, normal, n: spec.n });
                }
                if (p[i] - max[i]).abs() <= tol {
                    let mut normal = [0.0; MAX_DIM];
                    normal[i] = -1.0;
                    return Ok(Hyperplane { point: *p, normal, n: spec.n });
                }
            }
            let dist = (0..spec.n)
                .map(|i| (p[i] - min[i]).abs().min((p[i] - max[i]).abs()))
                .fold(f64::INFINITY, f64::min);
            Err(Error::NotOnBoundary { dist, tol })
        }
        DomainKind::Ball { center, radius } => {
            let mut d = [0.0; MAX_DIM];
            let mut r2 = 0.0;
            for i in 0..spec.n {
                d[i] = center[i] - p[i];
                r2 += d[i] * d[i];
            }
            let r = r2.sqrt();
            if (r - radius).abs() > tol {
                return Err(Error::NotOnBoundary { dist: (r - radius).abs(), tol });
            }
            let mut normal = [0.0; MAX_DIM];
            for i in 0..spec.n {
                normal[i] = d[i] / r;
            }
            Ok(Hyperplane { point: *p, normal, n: spec.n })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeClass {
    Interior,
    Boundary,
    Exterior,
}

/// One axis link of an interior node: a full step to a lattice node, or a
/// cut step of fraction `frac` ending at boundary intersection `bpoint`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Link {
    Node(u32),
    Cut { frac: f64, bpoint: u32 },
}

impl Link {
    #[inline(always)]
    pub fn frac(&self) -> f64 {
        match self {
            Link::Node(_) => 1.0,
            Link::Cut { frac, .. } => *frac,
        }
    }
}

/// Mixed-derivative stencil selection for an axis pair (i, j), i < j.
/// `Cross` is the symmetric four-point stencil; the others are first-order
/// fallbacks used where diagonals leave Ω̄ near a curved boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MixedPlan {
    Cross,
    /// Central in axis i, one-sided (sign) in axis j.
    SidedJ(i8),
    /// Central in axis j, one-sided (sign) in axis i.
    SidedI(i8),
    /// One-sided in both axes.
    Corner(i8, i8),
    Unavailable,
}

/// Interpolation rule for an interior node too close to the boundary: the
/// node value is (θ·v_opposite + ψ(cut point)) / (1 + θ) along `axis`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterpRule {
    pub slot: u32,
    pub axis: u8,
    /// Direction of the governing cut: 0 = minus, 1 = plus.
    pub dir: u8,
    pub frac: f64,
    pub cut_bpoint: u32,
    /// Link on the opposite side of the cut.
    pub opposite: Link,
}

#[derive(Clone, Debug)]
pub struct Lattice {
    pub spec: DomainSpec,
    pub dims: [usize; MAX_DIM],
    pub strides: [usize; MAX_DIM],
    pub origin: [f64; MAX_DIM],
    pub class: Vec<NodeClass>,
    /// Interior node ids in ascending order; "slot" indexes this list.
    pub interior: Vec<u32>,
    pub boundary_nodes: Vec<u32>,
    /// node id -> slot, or u32::MAX.
    pub interior_slot: Vec<u32>,
    /// Per slot: links[2*axis + dir], dir 0 = minus, 1 = plus.
    pub links: Vec<[Link; 2 * MAX_DIM]>,
    /// Exact boundary intersection coordinates.
    pub bpoints: Vec<[f64; MAX_DIM]>,
    /// Mixed-derivative plans per slot, pairs (i,j) i<j in lexicographic order.
    pub mixed: Vec<[MixedPlan; 6]>,
    /// True where any mixed plan fell back from the cross stencil.
    pub fallback_flag: Vec<bool>,
    /// Interpolation-slaved nodes (subset of interior).
    pub interp: Vec<InterpRule>,
    /// Per slot: index into `interp` + 1, or 0.
    pub interp_of_slot: Vec<u32>,
    /// Per slot: dual-cell quadrature weight hⁿ·∏((θ₋+θ₊)/2).
    pub weight: Vec<f64>,
    /// Slots adjacent to the boundary (any cut link or boundary-node link).
    pub boundary_adjacent: Vec<u32>,
}

impl Lattice {
    #[inline(always)]
    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn node_count(&self) -> usize {
        self.class.len()
    }

    #[inline(always)]
    pub fn coord(&self, node: u32) -> [f64; MAX_DIM] {
        let mi = self.multi(node);
        let mut x = [0.0; MAX_DIM];
        for i in 0..self.spec.n {
            x[i] = self.origin[i] + self.spec.h * mi[i] as f64;
        }
        x
    }

    #[inline(always)]
    pub fn multi(&self, node: u32) -> [usize; MAX_DIM] {
        let mut rest = node as usize;
        let mut mi = [0usize; MAX_DIM];
        for i in 0..self.spec.n {
            mi[i] = rest / self.strides[i];
            rest %= self.strides[i];
        }
        mi
    }

    #[inline(always)]
    pub fn index(&self, mi: &[usize; MAX_DIM]) -> u32 {
        let mut idx = 0usize;
        for i in 0..self.spec.n {
            idx += mi[i] * self.strides[i];
        }
        idx as u32
    }

    /// Class of the node at `mi` shifted by `off` on axes (ai, aj);
    /// out-of-range counts as exterior.
    fn class_at(&self, mi: &[usize; MAX_DIM], ai: usize, di: i64, aj: usize, dj: i64) -> NodeClass {
        let mut m = *mi;
        let ni = mi[ai] as i64 + di;
        let nj = mi[aj] as i64 + dj;
        if ni < 0 || nj < 0 || ni >= self.dims[ai] as i64 || nj >= self.dims[aj] as i64 {
            return NodeClass::Exterior;
        }
        m[ai] = ni as usize;
        m[aj] = nj as usize;
        self.class[self.index(&m) as usize]
    }

    pub fn pair_index(i: usize, j: usize) -> usize {
        debug_assert!(i < j);
        // (0,1)=0 (0,2)=1 (0,3)=2 (1,2)=3 (1,3)=4 (2,3)=5
        match (i, j) {
            (0, 1) => 0,
            (0, 2) => 1,
            (0, 3) => 2,
            (1, 2) => 3,
            (1, 3) => 4,
            (2, 3) => 5,
            _ => unreachable!(),
        }
    }

    /// All nodes of Ω̄: interior then boundary.
    pub fn non_exterior(&self) -> impl Iterator<Item = u32> + '_ {
        self.interior.iter().chain(self.boundary_nodes.iter()).copied()
    }

    /// Exact boundary sample points: boundary lattice nodes plus all
    /// recorded axis intersections.
    pub fn boundary_sample_coords(&self) -> Vec<[f64; MAX_DIM]> {
        let mut pts: Vec<[f64; MAX_DIM]> =
            self.boundary_nodes.iter().map(|&b| self.coord(b)).collect();
        pts.extend(self.bpoints.iter().copied());
        pts
    }

    pub fn interp_rule(&self, slot: usize) -> Option<&InterpRule> {
        let k = self.interp_of_slot[slot];
        if k == 0 {
            None
        } else {
            Some(&self.interp[(k - 1) as usize])
        }
    }
}

/// Build the lattice for a validated domain spec.
pub fn build_lattice(spec: &DomainSpec) -> Result<Lattice> {
    spec.validate()?;
    let n = spec.n;
    let h = spec.h;

    let (origin, dims) = match spec.kind {
        DomainKind::Box { min, max } => {
            let mut dims = [1usize; MAX_DIM];
            for i in 0..n {
                dims[i] = ((max[i] - min[i]) / h).round() as usize + 1;
            }
            (min, dims)
        }
        DomainKind::Ball { center, radius } => {
            let k = (radius / h + BOUNDARY_TOL).floor() as usize + 1;
            let mut origin = [0.0; MAX_DIM];
            let mut dims = [1usize; MAX_DIM];
            for i in 0..n {
                origin[i] = center[i] - k as f64 * h;
                dims[i] = 2 * k + 1;
            }
            (origin, dims)
        }
    };

    let mut strides = [1usize; MAX_DIM];
    for i in (0..n.saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let total: usize = dims[..n].iter().product();
    if total > (u32::MAX as usize) {
        return Err(Error::InvalidDomain(format!("lattice too large: {total} nodes")));
    }

    let mut lat = Lattice {
        spec: *spec,
        dims,
        strides,
        origin,
        class: vec![NodeClass::Exterior; total],
        interior: Vec::new(),
        boundary_nodes: Vec::new(),
        interior_slot: vec![u32::MAX; total],
        links: Vec::new(),
        bpoints: Vec::new(),
        mixed: Vec::new(),
        fallback_flag: Vec::new(),
        interp: Vec::new(),
        interp_of_slot: Vec::new(),
        weight: Vec::new(),
        boundary_adjacent: Vec::new(),
    };

    classify(&mut lat);
    if lat.interior.is_empty() {
        return Err(Error::TooCoarse(format!(
            "h = {h} leaves no interior node in the domain"
        )));
    }
    build_links(&mut lat)?;
    build_mixed_plans(&mut lat);
    build_interp_rules(&mut lat);
    Ok(lat)
}

fn classify(lat: &mut Lattice) {
    let n = lat.spec.n;
    match lat.spec.kind {
        DomainKind::Box { .. } => {
            // Exact index-based classification: faces are lattice planes.
            for node in 0..lat.node_count() as u32 {
                let mi = lat.multi(node);
                let mut on_face = false;
                for i in 0..n {
                    if mi[i] == 0 || mi[i] == lat.dims[i] - 1 {
                        on_face = true;
                    }
                }
                lat.class[node as usize] =
                    if on_face { NodeClass::Boundary } else { NodeClass::Interior };
            }
        }
        DomainKind::Ball { center, radius } => {
            let tol = BOUNDARY_TOL * radius.max(1.0);
            for node in 0..lat.node_count() as u32 {
                let x = lat.coord(node);
                let mut r2 = 0.0;
                for i in 0..n {
                    let d = x[i] - center[i];
                    r2 += d * d;
                }
                let r = r2.sqrt();
                lat.class[node as usize] = if (r - radius).abs() <= tol {
                    NodeClass::Boundary
                } else if r < radius {
                    NodeClass::Interior
                } else {
                    NodeClass::Exterior
                };
            }
        }
    }
    for node in 0..lat.node_count() as u32 {
        match lat.class[node as usize] {
            NodeClass::Interior => {
                lat.interior_slot[node as usize] = lat.interior.len() as u32;
                lat.interior.push(node);
            }
            NodeClass::Boundary => lat.boundary_nodes.push(node),
            NodeClass::Exterior => {}
        }
    }
}

fn build_links(lat: &mut Lattice) -> Result<()> {
    let n = lat.spec.n;
    let h = lat.spec.h;
    let mut links = Vec::with_capacity(lat.interior.len());
    let mut weight = Vec::with_capacity(lat.interior.len());
    let mut boundary_adjacent = Vec::new();

    for (slot, &node) in lat.interior.iter().enumerate() {
        let mi = lat.multi(node);
        let x = lat.coord(node);
        let mut row = [Link::Node(0); 2 * MAX_DIM];
        let mut w = h.powi(n as i32);
        let mut adjacent = false;

        for axis in 0..n {
            for dir in 0..2usize {
                let step: i64 = if dir == 0 { -1 } else { 1 };
                let neighbor = {
                    let ni = mi[axis] as i64 + step;
                    if ni < 0 || ni >= lat.dims[axis] as i64 {
                        None
                    } else {
                        let mut m = mi;
                        m[axis] = ni as usize;
                        Some(lat.index(&m))
                    }
                };
                let link = match neighbor {
                    Some(nb) if lat.class[nb as usize] != NodeClass::Exterior => {
                        if lat.class[nb as usize] == NodeClass::Boundary {
                            adjacent = true;
                        }
                        Link::Node(nb)
                    }
                    _ => {
                        adjacent = true;
                        let (frac, point) = cut_fraction(&lat.spec, &x, axis, step as f64)?;
                        let bp = lat.bpoints.len() as u32;
                        lat.bpoints.push(point);
                        Link::Cut { frac, bpoint: bp }
                    }
                };
                row[2 * axis + dir] = link;
            }
            w *= 0.5 * (row[2 * axis].frac() + row[2 * axis + 1].frac());
        }
        links.push(row);
        weight.push(w);
        if adjacent {
            boundary_adjacent.push(slot as u32);
        }
    }
    lat.links = links;
    lat.weight = weight;
    lat.boundary_adjacent = boundary_adjacent;
    Ok(())
}

/// Fraction of the spacing at which the ray x + t·step·e_axis leaves Ω,
/// together with the exact intersection point.
fn cut_fraction(
    spec: &DomainSpec,
    x: &[f64; MAX_DIM],
    axis: usize,
    step: f64,
) -> Result<(f64, [f64; MAX_DIM])> {
    match spec.kind {
        DomainKind::Box { .. } => Err(Error::InvalidDomain(
            "interior box node lost its lattice neighbor".into(),
        )),
        DomainKind::Ball { center, radius } => {
            let mut r2 = 0.0;
            for i in 0..spec.n {
                let d = x[i] - center[i];
                r2 += d * d;
            }
            let xi = x[axis] - center[axis];
            let b = step * xi;
            let disc = b * b + radius * radius - r2;
            debug_assert!(disc >= 0.0);
            let t = -b + disc.max(0.0).sqrt();
            let frac = (t / spec.h).clamp(f64::MIN_POSITIVE, 1.0);
            let mut p = *x;
            p[axis] += t * step;
            Ok((frac, p))
        }
    }
}

fn build_mixed_plans(lat: &mut Lattice) {
    let n = lat.spec.n;
    let mut mixed = Vec::with_capacity(lat.interior.len());
    let mut flags = Vec::with_capacity(lat.interior.len());

    for &node in &lat.interior {
        let mi = lat.multi(node);
        let mut plans = [MixedPlan::Cross; 6];
        let mut flagged = false;
        for i in 0..n {
            for j in i + 1..n {
                let plan = choose_mixed_plan(lat, &mi, i, j);
                plans[Lattice::pair_index(i, j)] = plan;
                if plan != MixedPlan::Cross {
                    flagged = true;
                }
            }
        }
        mixed.push(plans);
        flags.push(flagged);
    }
    lat.mixed = mixed;
    lat.fallback_flag = flags;
}

fn choose_mixed_plan(lat: &Lattice, mi: &[usize; MAX_DIM], i: usize, j: usize) -> MixedPlan {
    let ok = |di: i64, dj: i64| lat.class_at(mi, i, di, j, dj) != NodeClass::Exterior;
    if ok(1, 1) && ok(1, -1) && ok(-1, 1) && ok(-1, -1) {
        return MixedPlan::Cross;
    }
    for s in [1i8, -1] {
        if ok(1, s as i64) && ok(-1, s as i64) && ok(1, 0) && ok(-1, 0) {
            return MixedPlan::SidedJ(s);
        }
    }
    for s in [1i8, -1] {
        if ok(s as i64, 1) && ok(s as i64, -1) && ok(0, 1) && ok(0, -1) {
            return MixedPlan::SidedI(s);
        }
    }
    for (si, sj) in [(1i8, 1i8), (1, -1), (-1, 1), (-1, -1)] {
        if ok(si as i64, 0) && ok(0, sj as i64) && ok(si as i64, sj as i64) {
            return MixedPlan::Corner(si, sj);
        }
    }
    MixedPlan::Unavailable
}

fn build_interp_rules(lat: &mut Lattice) {
    let n = lat.spec.n;
    let mut interp = Vec::new();
    let mut interp_of_slot = vec![0u32; lat.interior.len()];

    for slot in 0..lat.interior.len() {
        let mut best: Option<(f64, usize, usize)> = None; // (frac, axis, dir)
        for axis in 0..n {
            for dir in 0..2usize {
                if let Link::Cut { frac, .. } = lat.links[slot][2 * axis + dir] {
                    if frac < MIN_STEPPED_CUT {
                        let better = match best {
                            None => true,
                            Some((bf, _, _)) => frac < bf,
                        };
                        if better {
                            best = Some((frac, axis, dir));
                        }
                    }
                }
            }
        }
        if let Some((frac, axis, dir)) = best {
            let cut_bpoint = match lat.links[slot][2 * axis + dir] {
                Link::Cut { bpoint, .. } => bpoint,
                Link::Node(_) => unreachable!(),
            };
            let opposite = lat.links[slot][2 * axis + (1 - dir)];
            interp_of_slot[slot] = interp.len() as u32 + 1;
            interp.push(InterpRule {
                slot: slot as u32,
                axis: axis as u8,
                dir: dir as u8,
                frac,
                cut_bpoint,
                opposite,
            });
        }
    }
    lat.interp = interp;
    lat.interp_of_slot = interp_of_slot;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_box2(h: f64) -> DomainSpec {
        DomainSpec::boxed(2, [0.0; 4], [1.0, 1.0, 0.0, 0.0], h).unwrap()
    }

    #[test]
    fn box_counts_5x5() {
        let lat = build_lattice(&unit_box2(0.25)).unwrap();
        assert_eq!(lat.node_count(), 25);
        assert_eq!(lat.interior.len(), 9);
        assert_eq!(lat.boundary_nodes.len(), 16);
        assert!(lat.bpoints.is_empty());
        assert!(lat.interp.is_empty());
        assert!(lat.fallback_flag.iter().all(|f| !f));
    }

    #[test]
    fn diameters() {
        assert!((unit_box2(0.25).diameter() - 2f64.sqrt()).abs() < 1e-15);
        let tall = DomainSpec::boxed(2, [0.0; 4], [1.0, 3.0, 0.0, 0.0], 0.25).unwrap();
        assert!((tall.diameter() - 10f64.sqrt()).abs() < 1e-15);
        let ball = DomainSpec::ball(2, [0.0; 4], 1.0, 0.5).unwrap();
        assert_eq!(ball.diameter(), 2.0);
    }

    #[test]
    fn ball_center_node_regular() {
        let spec = DomainSpec::ball(2, [0.0; 4], 1.0, 0.5).unwrap();
        let lat = build_lattice(&spec).unwrap();
        // locate (0,0)
        let center = lat
            .interior
            .iter()
            .copied()
            .find(|&nd| {
                let x = lat.coord(nd);
                x[0].abs() < 1e-12 && x[1].abs() < 1e-12
            })
            .expect("center node");
        let slot = lat.interior_slot[center as usize] as usize;
        for l in &lat.links[slot][..4] {
            assert!(matches!(l, Link::Node(_)), "center neighbors must be lattice nodes");
        }
    }

    #[test]
    fn ball_cut_fraction_two_thirds() {
        let spec = DomainSpec::ball(2, [0.0; 4], 1.0, 0.6).unwrap();
        let lat = build_lattice(&spec).unwrap();
        let node = lat
            .interior
            .iter()
            .copied()
            .find(|&nd| {
                let x = lat.coord(nd);
                (x[0] - 0.6).abs() < 1e-12 && x[1].abs() < 1e-12
            })
            .expect("node (0.6, 0)");
        let slot = lat.interior_slot[node as usize] as usize;
        match lat.links[slot][1] {
            // +x link
            Link::Cut { frac, bpoint } => {
                assert!((frac - 2.0 / 3.0).abs() < 1e-12);
                let p = lat.bpoints[bpoint as usize];
                assert!((p[0] - 1.0).abs() < 1e-12 && p[1].abs() < 1e-12);
            }
            Link::Node(_) => panic!("expected a cut link east of (0.6, 0)"),
        }
    }

    #[test]
    fn too_coarse_rejected() {
        // h equal to the side length leaves only face nodes
        let spec = DomainSpec::boxed(2, [0.0; 4], [1.0, 1.0, 0.0, 0.0], 1.0).unwrap();
        match build_lattice(&spec) {
            Err(Error::TooCoarse(_)) => {}
            other => panic!("expected TooCoarse, got {other:?}"),
        }
    }

    #[test]
    fn tiny_ball_center_survives_as_interp_node() {
        // the centered node is interior even when every link is a cut
        let spec = DomainSpec::ball(2, [0.0; 4], 0.3, 1.0).unwrap();
        let lat = build_lattice(&spec).unwrap();
        assert_eq!(lat.interior.len(), 1);
        assert_eq!(lat.interp.len(), 1);
        assert!(matches!(lat.interp[0].opposite, Link::Cut { .. }));
    }

    #[test]
    fn bad_spacing_rejected() {
        assert!(DomainSpec::boxed(2, [0.0; 4], [1.0, 1.0, 0.0, 0.0], 0.3).is_err());
        assert!(DomainSpec::boxed(5, [0.0; 4], [1.0; 4], 0.25).is_err());
        assert!(DomainSpec::ball(3, [0.0; 4], -1.0, 0.1).is_err());
    }

    #[test]
    fn hyperplanes_box_and_ball() {
        let spec = unit_box2(0.25);
        let hp = supporting_hyperplane(&spec, &[0.0, 0.5, 0.0, 0.0]).unwrap();
        assert!((hp.dist(&[0.3, 0.9, 0.0, 0.0]) - 0.3).abs() < 1e-15); // d_P(y) = y_1

        let ball = DomainSpec::ball(2, [0.0; 4], 1.0, 0.5).unwrap();
        let hp = supporting_hyperplane(&ball, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!((hp.dist(&[0.2, 0.0, 0.0, 0.0]) - 0.8).abs() < 1e-15); // 1 - y_1

        assert!(matches!(
            supporting_hyperplane(&ball, &[0.5, 0.0, 0.0, 0.0]),
            Err(Error::NotOnBoundary { .. })
        ));
    }

    #[test]
    fn hyperplane_distance_bounded_by_diameter() {
        // convexity: 0 <= d_P(y) <= delta for all nodes y and boundary p
        for spec in [
            unit_box2(0.25),
            DomainSpec::ball(3, [0.2, -0.1, 0.0, 0.0], 0.8, 0.25).unwrap(),
        ] {
            let lat = build_lattice(&spec).unwrap();
            let delta = spec.diameter();
            for p in lat.boundary_sample_coords() {
                let hp = supporting_hyperplane(&spec, &p).unwrap();
                for node in lat.non_exterior() {
                    let d = hp.dist(&lat.coord(node));
                    assert!(d >= -1e-12 * delta, "d_P must be nonnegative on the closure");
                    assert!(d <= delta * (1.0 + 1e-12), "d_P must not exceed the diameter");
                }
            }
        }
    }

    #[test]
    fn build_is_idempotent_and_axis_symmetric() {
        let spec = DomainSpec::ball(2, [0.0; 4], 1.0, 0.3).unwrap();
        let a = build_lattice(&spec).unwrap();
        let b = build_lattice(&spec).unwrap();
        assert_eq!(a.class, b.class);
        assert_eq!(a.links, b.links);
        assert_eq!(a.bpoints, b.bpoints);
        assert_eq!(a.interp, b.interp);

        // axis-permutation symmetry of classification on a symmetric domain
        for node in 0..a.node_count() as u32 {
            let mi = a.multi(node);
            let swapped = a.index(&[mi[1], mi[0], mi[2], mi[3]]);
            assert_eq!(a.class[node as usize], a.class[swapped as usize]);
        }
    }

    #[test]
    fn interp_rules_only_for_small_cuts() {
        // radius chosen so some cut fractions land below 1/2
        let spec = DomainSpec::ball(2, [0.0; 4], 1.0, 0.26).unwrap();
        let lat = build_lattice(&spec).unwrap();
        for rule in &lat.interp {
            assert!(rule.frac < MIN_STEPPED_CUT);
        }
        for slot in 0..lat.interior.len() {
            if lat.interp_rule(slot).is_none() {
                for l in &lat.links[slot][..4] {
                    assert!(l.frac() >= MIN_STEPPED_CUT);
                }
            }
        }
    }
}
