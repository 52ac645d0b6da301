//! Run-time monitors and analytic checks: the admissibility value
//! C(ψ) = 8nδ·sup|D²ψ| + √2·sup_∂|Dψ|, the boundary gradient bound
//! 4nδ(1+ξ)·sup|D²ψ| + √2·sup_∂|Dψ| with its optimal log-barrier parameters
//! (k = 1/δ, νk = 4nδ(1+ξ)·sup|D²ψ|), per-component maximum-principle
//! margins, area monotonicity, the dissipation budget
//! area(0) − area(t) ≈ ∫₀ᵗ∫|H|²√g, the running gauge
//! ξ = sup over elapsed time of max|Df|², the pair-product regime
//! max_{i≠j}|λᵢλⱼ| < 1, and the parabolic minimum principle for *Ω₁.

use crate::domain::{supporting_hyperplane, Lattice};
use crate::error::{Error, Result};
use crate::flow::{StepObserver, Verdict};
use crate::geometry::{geom_sample, star_omega1};
use crate::jet::{jet_at_slot, sup_norm_d, sup_norm_d2, GraphField, Region};
use crate::linalg::{KahanSum, MAX_DIM};
use crate::scenario::Scenario;
use crate::svd::{operator_norm, svd_small};

/// Default scale factor for the maximum-principle tolerance
/// ε_mp = MP_TOL_SCALE · (1 + max|ψ|).
pub const MP_TOL_SCALE: f64 = 1e-8;
/// Default per-step area increase allowance, relative to the initial area.
pub const AREA_TOL_SCALE: f64 = 1e-6;
/// Tolerance for the parabolic minimum principle of *Ω₁.
pub const STAR_OMEGA_TOL: f64 = 1e-6;

/// One row of run diagnostics. `power` (the instantaneous dissipation
/// ∫|H|²√g) feeds the energy trapezoid and is not serialized.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub area: f64,
    pub max_lambda: f64,
    pub max_pair_product: f64,
    pub min_star_omega1: f64,
    pub residual_max: f64,
    pub a2_max: f64,
    pub boundary_max_df: f64,
    pub xi: f64,
    pub energy_spent: f64,
    pub f_max: Vec<f64>,
    pub f_min: Vec<f64>,
    pub power: f64,
    /// Count of interior nodes whose mixed stencils use fallbacks.
    pub fallback_nodes: usize,
}

/// Admissibility value C = 8nδ·sup_Ω|D²ψ| + √2·sup_∂Ω|Dψ| and the flag C < 1.
pub fn theorem_a_value(scn: &Scenario, lat: &Lattice, seed: u64) -> Result<(f64, bool)> {
    let n = lat.n() as f64;
    let delta = lat.spec.diameter();
    let sup_d2 = sup_norm_d2(scn, lat, Region::Closure, seed)?;
    let sup_d_boundary = sup_norm_d(scn, lat, Region::Boundary)?;
    let c = 8.0 * n * delta * sup_d2 + 2f64.sqrt() * sup_d_boundary;
    Ok((c, c < 1.0))
}

/// Boundary gradient bound 4nδ(1+ξ)·sup|D²ψ| + √2·sup_∂|Dψ|.
pub fn boundary_gradient_bound(
    n: usize,
    delta: f64,
    xi: f64,
    sup_d2: f64,
    sup_d_boundary: f64,
) -> f64 {
    4.0 * n as f64 * delta * (1.0 + xi) * sup_d2 + 2f64.sqrt() * sup_d_boundary
}

/// Optimal parameters of the barrier S = ν·log(1 + k·d_P) ∓ (f^α − ψ^α).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BarrierParams {
    pub k: f64,
    pub nu: f64,
    pub nu_k: f64,
}

/// k = 1/δ and νk = 4nδ(1+ξ)·sup|D²ψ|; the pair meets the barrier
/// constraint νk²/(1+kδ)² · 1/(1+ξ) ≥ n·sup|D²ψ| with equality.
pub fn barrier_parameters(n: usize, delta: f64, xi: f64, sup_d2: f64) -> BarrierParams {
    let k = 1.0 / delta;
    let nu_k = 4.0 * n as f64 * delta * (1.0 + xi) * sup_d2;
    BarrierParams { k, nu: nu_k * delta, nu_k }
}

/// Min over Ω̄ lattice nodes of both barrier signs at boundary point `p` for
/// component `alpha`; a value ≥ −tol certifies the barrier numerically.
pub fn barrier_check(
    field: &GraphField,
    scn: &Scenario,
    p: &[f64; MAX_DIM],
    params: &BarrierParams,
    alpha: usize,
) -> Result<f64> {
    let lat = &field.lattice;
    let hp = supporting_hyperplane(&lat.spec, p)?;
    let mut worst = f64::INFINITY;
    for node in lat.non_exterior() {
        let x = lat.coord(node);
        let d = hp.dist(&x).max(0.0);
        let wall = params.nu * (params.k * d).ln_1p();
        let gap = field.value(node)[alpha] - scn.psi(&x)?[alpha];
        worst = worst.min(wall - gap).min(wall + gap);
    }
    Ok(worst)
}

/// Everything `monitor_step` derives once per state.
pub fn monitor_step(
    field: &GraphField,
    prev: Option<&DiagnosticsRecord>,
    adjacent: &[bool],
) -> Result<DiagnosticsRecord> {
    let lat = &field.lattice;
    let m = field.m;
    let mut area = KahanSum::new();
    let mut power = KahanSum::new();
    let mut max_lambda = 0.0f64;
    let mut max_pp = 0.0f64;
    let mut min_so = f64::INFINITY;
    let mut res_max = 0.0f64;
    let mut a2_max = 0.0f64;
    let mut bdf = 0.0f64;
    let mut dfsq = 0.0f64;
    let mut fallback_nodes = 0usize;

    for slot in 0..lat.interior.len() {
        let jet = jet_at_slot(field, slot);
        if jet.fallback {
            fallback_nodes += 1;
        }
        let gs = geom_sample(&jet)?;
        let w = lat.weight[slot];
        let sqrt_g = gs.det_g.sqrt();
        area.add(w * sqrt_g);
        let h2: f64 = gs.h_alpha[..m].iter().map(|v| v * v).sum();
        power.add(w * h2 * sqrt_g);
        max_lambda = max_lambda.max(gs.lambda[0]);
        max_pp = max_pp.max(gs.max_pair_product);
        min_so = min_so.min(gs.star_omega1);
        let rn: f64 = gs.residual[..m].iter().map(|v| v * v).sum::<f64>().sqrt();
        res_max = res_max.max(rn);
        a2_max = a2_max.max(gs.a2);
        let opn = gs.lambda[0];
        dfsq = dfsq.max(opn * opn);
        if adjacent[slot] {
            bdf = bdf.max(opn);
        }
    }

    let (f_max, f_min) = field.component_range();
    let (xi, energy) = match prev {
        None => (dfsq, 0.0),
        Some(p) => (
            p.xi.max(dfsq),
            p.energy_spent + 0.5 * (field.t - p.t) * (p.power + power.value()),
        ),
    };
    Ok(DiagnosticsRecord {
        t: field.t,
        area: area.value(),
        max_lambda,
        max_pair_product: max_pp,
        min_star_omega1: min_so,
        residual_max: res_max,
        a2_max,
        boundary_max_df: bdf,
        xi,
        energy_spent: energy,
        f_max,
        f_min,
        power: power.value(),
        fallback_nodes,
    })
}

/// Per-component maximum-principle margins over a record series.
#[derive(Clone, Debug)]
pub struct MaxPrincipleReport {
    /// max over time of (max f^α − max ψ^α), per component.
    pub upper_margin: Vec<f64>,
    /// max over time of (min ψ^α − min f^α), per component.
    pub lower_margin: Vec<f64>,
    pub epsilon: f64,
    pub holds: bool,
}

pub fn max_principle_check(
    records: &[DiagnosticsRecord],
    psi_max: &[f64],
    psi_min: &[f64],
    epsilon: f64,
) -> Result<MaxPrincipleReport> {
    if records.is_empty() {
        return Err(Error::Empty("diagnostics series".into()));
    }
    let m = psi_max.len();
    let mut upper = vec![f64::NEG_INFINITY; m];
    let mut lower = vec![f64::NEG_INFINITY; m];
    for rec in records {
        for al in 0..m {
            upper[al] = upper[al].max(rec.f_max[al] - psi_max[al]);
            lower[al] = lower[al].max(psi_min[al] - rec.f_min[al]);
        }
    }
    let worst = upper.iter().chain(lower.iter()).fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    Ok(MaxPrincipleReport { upper_margin: upper, lower_margin: lower, epsilon, holds: worst <= epsilon })
}

/// Outcome of the parabolic minimum principle check for *Ω₁.
#[derive(Clone, Debug)]
pub enum StarOmegaReport {
    /// The pair-product regime was lost; the estimate does not apply.
    NotApplicable { max_pair_product: f64 },
    Checked { interior_min: f64, parabolic_min: f64, holds: bool },
}

/// The min of *Ω₁ over interior × (0, T] must be attained (within tolerance)
/// on the parabolic boundary: the initial slice or the lateral boundary.
pub fn star_omega_min_principle(
    records: &[DiagnosticsRecord],
    boundary_min: f64,
) -> Result<StarOmegaReport> {
    if records.is_empty() {
        return Err(Error::Empty("diagnostics series".into()));
    }
    let worst_pp = records.iter().map(|r| r.max_pair_product).fold(0.0f64, f64::max);
    if worst_pp >= 1.0 {
        return Ok(StarOmegaReport::NotApplicable { max_pair_product: worst_pp });
    }
    let parabolic_min = records[0].min_star_omega1.min(boundary_min);
    let interior_min = records[1..]
        .iter()
        .map(|r| r.min_star_omega1)
        .fold(f64::INFINITY, f64::min);
    // a run with no step after t = 0 holds trivially
    let holds = interior_min.is_infinite() || interior_min >= parabolic_min - STAR_OMEGA_TOL;
    Ok(StarOmegaReport::Checked { interior_min, parabolic_min, holds })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    MaxPrinciple,
    AreaIncrease,
    PairProductRegime,
    StarOmegaMin,
}

#[derive(Clone, Debug)]
pub struct Violation {
    pub step: usize,
    pub t: f64,
    pub kind: ViolationKind,
    pub detail: String,
}

#[derive(Clone, Copy, Debug)]
pub struct MonitorConfig {
    /// Halt the run on the first violation instead of recording it.
    pub strict: bool,
    /// Keep every k-th record (the first and last are always kept).
    pub cadence: usize,
    pub mp_tol_scale: f64,
    pub area_tol_scale: f64,
}

impl Default for MonitorConfig {
    fn default() -> Self {
        MonitorConfig {
            strict: false,
            cadence: 1,
            mp_tol_scale: MP_TOL_SCALE,
            area_tol_scale: AREA_TOL_SCALE,
        }
    }
}

/// Step observer that assembles the diagnostics series and the violation log.
pub struct MonitorState {
    pub cfg: MonitorConfig,
    pub records: Vec<DiagnosticsRecord>,
    pub violations: Vec<Violation>,
    pub psi_max: Vec<f64>,
    pub psi_min: Vec<f64>,
    pub epsilon_mp: f64,
    /// min over exact boundary points of the analytic *Ω₁(Dψ).
    pub boundary_star_omega_min: f64,
    adjacent: Vec<bool>,
    last: Option<DiagnosticsRecord>,
    area0: f64,
    error: Option<Error>,
}

impl MonitorState {
    pub fn new(scn: &Scenario, field0: &GraphField, cfg: MonitorConfig) -> Result<MonitorState> {
        let lat = &field0.lattice;
        let (psi_max, psi_min) = field0.component_range();
        let max_abs = psi_max
            .iter()
            .chain(psi_min.iter())
            .fold(0.0f64, |a, &b| a.max(b.abs()));
        let epsilon_mp = cfg.mp_tol_scale * (1.0 + max_abs);

        let mut boundary_star_omega_min = f64::INFINITY;
        for p in lat.boundary_sample_coords() {
            let d = scn.d_psi(&p)?;
            let svd = svd_small(&d)?;
            let k = d.rows.min(d.cols);
            boundary_star_omega_min = boundary_star_omega_min.min(star_omega1(&svd.values[..k]));
        }

        let mut adjacent = vec![false; lat.interior.len()];
        for &slot in &lat.boundary_adjacent {
            adjacent[slot as usize] = true;
        }
        Ok(MonitorState {
            cfg,
            records: Vec::new(),
            violations: Vec::new(),
            psi_max,
            psi_min,
            epsilon_mp,
            boundary_star_omega_min,
            adjacent,
            last: None,
            area0: 0.0,
            error: None,
        })
    }

    pub fn last_record(&self) -> Option<&DiagnosticsRecord> {
        self.last.as_ref()
    }

    pub fn into_error(self) -> Option<Error> {
        self.error
    }

    pub fn star_omega_report(&self) -> Result<StarOmegaReport> {
        star_omega_min_principle(&self.records, self.boundary_star_omega_min)
    }

    pub fn max_principle_report(&self) -> Result<MaxPrincipleReport> {
        max_principle_check(&self.records, &self.psi_max, &self.psi_min, self.epsilon_mp)
    }

    fn check_violations(&mut self, step: usize, rec: &DiagnosticsRecord) {
        let m = self.psi_max.len();
        for al in 0..m {
            if rec.f_max[al] > self.psi_max[al] + self.epsilon_mp
                || rec.f_min[al] < self.psi_min[al] - self.epsilon_mp
            {
                self.violations.push(Violation {
                    step,
                    t: rec.t,
                    kind: ViolationKind::MaxPrinciple,
                    detail: format!(
                        "component {al}: range [{:.6e}, {:.6e}] vs data [{:.6e}, {:.6e}]",
                        rec.f_min[al], rec.f_max[al], self.psi_min[al], self.psi_max[al]
                    ),
                });
            }
        }
        if let Some(prev) = &self.last {
            let tol = self.cfg.area_tol_scale * self.area0;
            if rec.area > prev.area + tol {
                self.violations.push(Violation {
                    step,
                    t: rec.t,
                    kind: ViolationKind::AreaIncrease,
                    detail: format!("area rose {:.6e} -> {:.6e}", prev.area, rec.area),
                });
            }
        }
        if rec.max_pair_product >= 1.0 {
            self.violations.push(Violation {
                step,
                t: rec.t,
                kind: ViolationKind::PairProductRegime,
                detail: format!("max|λᵢλⱼ| = {:.6} ≥ 1", rec.max_pair_product),
            });
        }
        if step > 0 {
            let parabolic =
                self.records.first().map(|r| r.min_star_omega1).unwrap_or(f64::INFINITY);
            let parabolic = parabolic.min(self.boundary_star_omega_min);
            if rec.min_star_omega1 < parabolic - STAR_OMEGA_TOL {
                self.violations.push(Violation {
                    step,
                    t: rec.t,
                    kind: ViolationKind::StarOmegaMin,
                    detail: format!(
                        "*Ω₁ interior min {:.9} below parabolic bound {:.9}",
                        rec.min_star_omega1, parabolic
                    ),
                });
            }
        }
    }
}

impl StepObserver for MonitorState {
    fn observe(&mut self, step: usize, field: &GraphField) -> Verdict {
        let rec = match monitor_step(field, self.last.as_ref(), &self.adjacent) {
            Ok(r) => r,
            Err(e) => {
                self.error = Some(e);
                return Verdict::Halt;
            }
        };
        if step == 0 {
            self.area0 = rec.area;
        }
        let before = self.violations.len();
        self.check_violations(step, &rec);
        let fresh_violation = self.violations.len() > before;
        if step == 0 || self.cfg.cadence == 0 || step % self.cfg.cadence == 0 {
            self.records.push(rec.clone());
        }
        self.last = Some(rec);
        if fresh_violation && self.cfg.strict {
            Verdict::Halt
        } else {
            Verdict::Continue
        }
    }
}

/// Make sure the final record is present in the retained series.
pub fn seal_records(state: &mut MonitorState) {
    if let Some(last) = state.last.clone() {
        if state.records.last() != Some(&last) {
            state.records.push(last);
        }
    }
}

/// Max over boundary-adjacent probes of |Df| in a single state.
pub fn boundary_max_df(field: &GraphField) -> Result<f64> {
    let lat = &field.lattice;
    let mut worst = 0.0f64;
    for &slot in &lat.boundary_adjacent {
        let jet = jet_at_slot(field, slot as usize);
        worst = worst.max(operator_norm(&jet.df)?);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{build_lattice, DomainSpec};
    use crate::flow::{run, DtChoice, Scheme, StepConfig};
    use crate::linalg::SmallMat;
    use crate::scenario;
    use std::sync::Arc;

    fn unit_box(h: f64) -> Arc<Lattice> {
        Arc::new(
            build_lattice(&DomainSpec::boxed(2, [0.0; 4], [1.0, 1.0, 0.0, 0.0], h).unwrap())
                .unwrap(),
        )
    }

    #[test]
    fn admissibility_zero_and_affine() {
        let lat = unit_box(0.25);
        let zero = scenario::affine(SmallMat::zeros(2, 2), [0.0; 4]);
        let (c, ok) = theorem_a_value(&zero, &lat, 7).unwrap();
        assert_eq!(c, 0.0);
        assert!(ok);

        let a = SmallMat::from_rows(&[&[0.5, 0.0], &[0.0, 0.5]]);
        let scn = scenario::affine(a, [0.0; 4]);
        let (c, ok) = theorem_a_value(&scn, &lat, 7).unwrap();
        assert!((c - 0.5 * 2f64.sqrt()).abs() < 1e-12, "C = {c}");
        assert!(ok);
    }

    #[test]
    fn admissibility_positively_homogeneous() {
        let lat = unit_box(0.25);
        let a = SmallMat::from_rows(&[&[0.25, -0.1], &[0.05, 0.2]]);
        let base = scenario::affine(a, [0.0; 4]);
        let (c1, _) = theorem_a_value(&base, &lat, 7).unwrap();
        for scale in [0.5, 2.0] {
            let scaled = scenario::affine(a.scale(scale), [0.0; 4]);
            let (cs, _) = theorem_a_value(&scaled, &lat, 7).unwrap();
            assert!((cs - scale * c1).abs() <= 1e-10 * (1.0 + cs), "homogeneity at {scale}");
        }
    }

    #[test]
    fn gradient_bound_arithmetic() {
        assert!((boundary_gradient_bound(2, 1.0, 0.0, 0.0, 1.0) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(boundary_gradient_bound(2, 1.0, 0.0, 1.0, 0.0), 8.0);
        // affine in xi with slope 4 n delta supD2
        let b0 = boundary_gradient_bound(3, 2.0, 0.0, 0.5, 0.1);
        let b1 = boundary_gradient_bound(3, 2.0, 1.0, 0.5, 0.1);
        assert!((b1 - b0 - 4.0 * 3.0 * 2.0 * 0.5).abs() < 1e-12);
        // xi = 1 link: bound equals the admissibility value
        let (n, delta, d2, db) = (4usize, 2.0, 0.37, 0.81);
        let c = 8.0 * n as f64 * delta * d2 + 2f64.sqrt() * db;
        assert!((boundary_gradient_bound(n, delta, 1.0, d2, db) - c).abs() < 1e-12);
    }

    #[test]
    fn barrier_parameters_meet_constraint_exactly() {
        let p = barrier_parameters(2, 1.0, 0.0, 1.0);
        assert_eq!(p.k, 1.0);
        assert_eq!(p.nu_k, 8.0);
        assert_eq!(p.nu, 8.0);
        for (n, delta, xi, d2) in [(2usize, 1.5, 0.3, 0.7), (4, 2.0, 0.0, 0.012), (3, 0.5, 1.0, 2.0)] {
            let p = barrier_parameters(n, delta, xi, d2);
            assert!((p.k * delta - 1.0).abs() < 1e-15);
            let lhs = p.nu * p.k * p.k / (1.0 + p.k * delta).powi(2) / (1.0 + xi);
            let rhs = n as f64 * d2;
            assert!(
                (lhs - rhs).abs() <= 1e-12 * rhs.max(1e-300),
                "constraint violated: {lhs} vs {rhs}"
            );
        }
        // degenerate barrier for affine data
        let p = barrier_parameters(3, 2.0, 0.1, 0.0);
        assert_eq!(p.nu_k, 0.0);
    }

    #[test]
    fn barrier_check_zero_at_t0() {
        let lat = unit_box(0.25);
        let a = SmallMat::from_rows(&[&[0.4, -0.2]]);
        let scn = scenario::affine(a, [0.1, 0.0, 0.0, 0.0]);
        let field = GraphField::from_scenario(lat.clone(), &scn).unwrap();
        let params = barrier_parameters(2, lat.spec.diameter(), 0.0, 1.0);
        let p = [0.0, 0.5, 0.0, 0.0];
        let min = barrier_check(&field, &scn, &p, &params, 0).unwrap();
        assert!(min.abs() < 1e-12, "barrier min at t=0 must vanish at p, got {min}");
    }

    #[test]
    fn monitor_series_on_affine_run() {
        let lat = unit_box(0.25);
        let a = SmallMat::from_rows(&[&[0.3, 0.1]]);
        let scn = scenario::affine(a, [0.0; 4]);
        let field = GraphField::from_scenario(lat, &scn).unwrap();
        let mut mon = MonitorState::new(&scn, &field, MonitorConfig::default()).unwrap();
        let cfg = StepConfig {
            scheme: Scheme::Explicit,
            dt: DtChoice::Auto,
            safety: 0.8,
            solver_tol: 1e-10,
            picard_iters: 1,
            t_end: 0.01,
            steady_tol: 0.0,
        };
        let traj = run(field, &cfg, 1, &mut mon).unwrap();
        seal_records(&mut mon);
        assert!(traj.steps > 0);
        assert!(mon.violations.is_empty(), "affine run must be violation-free");
        let a0 = mon.records[0].area;
        for rec in &mon.records {
            assert!((rec.area - a0).abs() <= 1e-12 * a0, "area must stay constant");
            assert!(rec.residual_max < 1e-12);
            assert!((rec.min_star_omega1 - mon.records[0].min_star_omega1).abs() < 1e-12);
        }
        let mp = mon.max_principle_report().unwrap();
        assert!(mp.holds);
        for v in mp.upper_margin.iter().chain(mp.lower_margin.iter()) {
            assert!(v.abs() < 1e-12, "affine margins must be zero");
        }
        match mon.star_omega_report().unwrap() {
            StarOmegaReport::Checked { holds, .. } => assert!(holds),
            other => panic!("unexpected {other:?}"),
        }
        // energy stays zero for a stationary graph
        assert!(mon.records.last().unwrap().energy_spent.abs() < 1e-15);
    }

    #[test]
    fn zero_data_monitor_values() {
        let lat = unit_box(0.25);
        let scn = scenario::affine(SmallMat::zeros(2, 2), [0.0; 4]);
        let field = GraphField::from_scenario(lat, &scn).unwrap();
        let mut mon = MonitorState::new(&scn, &field, MonitorConfig::default()).unwrap();
        let _ = mon.observe(0, &field);
        let rec = mon.last_record().unwrap();
        assert_eq!(rec.max_lambda, 0.0);
        assert_eq!(rec.min_star_omega1, 1.0);
        assert_eq!(rec.residual_max, 0.0);
        assert!((rec.area - 1.0).abs() < 1e-12); // unit box, flat graph
    }

    #[test]
    fn strict_mode_halts_on_manufactured_violation() {
        let lat = unit_box(0.25);
        let scn = scenario::affine(SmallMat::zeros(2, 2), [0.0; 4]);
        let field = GraphField::from_scenario(lat.clone(), &scn).unwrap();
        let mut mon = MonitorState::new(
            &scn,
            &field,
            MonitorConfig { strict: true, ..MonitorConfig::default() },
        )
        .unwrap();
        assert_eq!(mon.observe(0, &field), Verdict::Continue);
        // poison an interior value beyond the maximum principle envelope
        let mut bad = field.clone();
        let node = lat.interior[4] as usize;
        bad.values[node * 2] = 10.0;
        bad.t = 0.001;
        assert_eq!(mon.observe(1, &bad), Verdict::Halt);
        assert!(mon
            .violations
            .iter()
            .any(|v| v.kind == ViolationKind::MaxPrinciple));
    }

    #[test]
    fn pair_product_regime_flagged() {
        let lat = unit_box(0.5);
        // slope large enough that two singular values multiply past 1
        let a = SmallMat::from_rows(&[&[1.4, 0.0], &[0.0, 1.3]]);
        let scn = scenario::affine(a, [0.0; 4]);
        let field = GraphField::from_scenario(lat, &scn).unwrap();
        let mut mon = MonitorState::new(&scn, &field, MonitorConfig::default()).unwrap();
        assert_eq!(mon.observe(0, &field), Verdict::Continue); // not strict
        assert!(mon
            .violations
            .iter()
            .any(|v| v.kind == ViolationKind::PairProductRegime));
        match mon.star_omega_report() {
            Ok(StarOmegaReport::NotApplicable { max_pair_product }) => {
                assert!(max_pair_product >= 1.0)
            }
            other => panic!("expected NotApplicable, got {other:?}"),
        }
    }

    #[test]
    fn empty_series_is_an_error() {
        assert!(max_principle_check(&[], &[0.0], &[0.0], 1e-8).is_err());
        assert!(star_omega_min_principle(&[], 1.0).is_err());
    }
}
