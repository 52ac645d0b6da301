//! Time stepping for the nonparametric flow df^α/dt = g^{ij} ∂²f^α/∂x^i∂x^j
//! with Dirichlet boundary data.
//!
//! Two schemes: forward Euler under the parabolic step bound
//! dt = σh²/(2·Σᵢ max g^{ii}), and a lagged-coefficient backward Euler in
//! which the metric is frozen at the current iterate, the m components
//! decouple into linear solves (I − dt·L̃)f_new = f, and an outer loop
//! refreezes the metric from the newest iterate. Nodes slaved to boundary
//! interpolation are updated by their rule in both schemes.

use std::sync::Arc;

use crate::domain::{Lattice, Link, MixedPlan, NodeClass};
use crate::error::{Error, Result};
use crate::geometry::{induced_metric, normal_projection, second_fundamental_form};
use crate::jet::{jet_at_slot, GraphField};
use crate::linalg::{SmallMat, MAX_AMB, MAX_DIM};
use crate::solver::bicgstab;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    Explicit,
    SemiImplicit,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DtChoice {
    Auto,
    Fixed(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepConfig {
    pub scheme: Scheme,
    pub dt: DtChoice,
    /// σ ∈ (0,1) scaling the automatic explicit step bound.
    pub safety: f64,
    /// Relative residual contract for the implicit linear solves (≤ 1e-8).
    pub solver_tol: f64,
    /// Outer metric-refreeze iterations for the semi-implicit scheme (≥ 1).
    pub picard_iters: usize,
    pub t_end: f64,
    /// Residual threshold declaring a steady state; 0 disables the check.
    pub steady_tol: f64,
}

impl StepConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.safety > 0.0 && self.safety < 1.0) {
            return Err(Error::Config {
                line: 0,
                msg: format!("safety = {} must lie in (0, 1)", self.safety),
            });
        }
        if !(self.solver_tol > 0.0 && self.solver_tol <= 1e-8) {
            return Err(Error::Config {
                line: 0,
                msg: format!("solver_tol = {} must lie in (0, 1e-8]", self.solver_tol),
            });
        }
        if self.picard_iters < 1 {
            return Err(Error::Config { line: 0, msg: "picard_iters must be >= 1".into() });
        }
        if let DtChoice::Fixed(dt) = self.dt {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(Error::Config { line: 0, msg: format!("dt = {dt} must be positive") });
            }
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(Error::Config {
                line: 0,
                msg: format!("t_end = {} must be positive", self.t_end),
            });
        }
        if !(self.steady_tol.is_finite() && self.steady_tol >= 0.0) {
            return Err(Error::Config { line: 0, msg: "steady_tol must be >= 0".into() });
        }
        Ok(())
    }
}

/// Explicit step bound dt = σ·h²/(2·Σᵢ maxₓ g^{ii}(x)).
pub fn stable_dt(field: &GraphField, safety: f64) -> Result<f64> {
    let lat = &field.lattice;
    let n = lat.n();
    let mut gmax = [0.0f64; MAX_DIM];
    for slot in 0..lat.interior.len() {
        let jet = jet_at_slot(field, slot);
        let (_, g_inv, _) = induced_metric(&jet)?;
        for i in 0..n {
            gmax[i] = gmax[i].max(g_inv.get(i, i));
        }
    }
    let total: f64 = gmax[..n].iter().sum();
    if total <= 0.0 {
        return Err(Error::NonFinite("degenerate metric in stable_dt".into()));
    }
    Ok(safety * lat.spec.h * lat.spec.h / (2.0 * total))
}

/// Sweep the interpolation-slaved nodes to their fixed point (chains of
/// slaved nodes contract with factor < 1/3 per sweep).
fn interp_sweep(field: &mut GraphField) {
    let lat = field.lattice.clone();
    let m = field.m;
    if lat.interp.is_empty() {
        return;
    }
    for _ in 0..60 {
        let mut change = 0.0f64;
        for rule in &lat.interp {
            let node = lat.interior[rule.slot as usize] as usize;
            for al in 0..m {
                let cut = field.bvalue(rule.cut_bpoint)[al];
                let opp = field.link_value(&rule.opposite)[al];
                let new = (rule.frac * opp + cut) / (1.0 + rule.frac);
                let old = field.values[node * m + al];
                change = change.max((new - old).abs());
                field.values[node * m + al] = new;
            }
        }
        if change <= 1e-15 {
            break;
        }
    }
}

/// One forward-Euler step; also reports the sup of ‖g^{ij}D²f_{ij}‖ over the
/// stepped nodes of the input field.
pub fn step_explicit_with_residual(field: &GraphField, dt: f64) -> Result<(GraphField, f64)> {
    let lat = field.lattice.clone();
    let m = field.m;
    let n = lat.n();
    let mut out = field.clone();
    let mut residual_max = 0.0f64;

    for slot in 0..lat.interior.len() {
        if lat.interp_of_slot[slot] != 0 {
            continue;
        }
        let jet = jet_at_slot(field, slot);
        let (_, g_inv, _) = induced_metric(&jet)?;
        let node = lat.interior[slot] as usize;
        let mut rn = 0.0;
        for al in 0..m {
            let mut r = 0.0;
            for i in 0..n {
                for j in 0..n {
                    r += g_inv.get(i, j) * jet.d2[al].get(i, j);
                }
            }
            rn += r * r;
            let v = field.values[node * m + al] + dt * r;
            if !v.is_finite() {
                return Err(Error::NumericalFailure {
                    node,
                    detail: format!("component {al} became non-finite in explicit step"),
                });
            }
            out.values[node * m + al] = v;
        }
        residual_max = residual_max.max(rn.sqrt());
    }
    interp_sweep(&mut out);
    out.t = field.t + dt;
    Ok((out, residual_max))
}

/// One forward-Euler step f ← f + dt·g^{ij}D²f at the stepped interior
/// nodes; boundary data untouched.
pub fn step_explicit(field: &GraphField, dt: f64) -> Result<GraphField> {
    Ok(step_explicit_with_residual(field, dt)?.0)
}

/// One lagged-coefficient backward-Euler step: metric frozen from the
/// current iterate, m decoupled linear solves, `picard_iters` refreezes.
pub fn step_semi_implicit(field: &GraphField, dt: f64, cfg: &StepConfig) -> Result<GraphField> {
    let lat = field.lattice.clone();
    let m = field.m;
    let slots = lat.interior.len();
    let mut current = field.clone();

    // cap generous enough for the desk-scale systems the engine runs
    let max_iters = 200 + 20 * (slots as f64).sqrt() as usize;

    for _ in 0..cfg.picard_iters {
        // freeze g̃^{-1} from the current iterate
        let mut frozen: Vec<SmallMat> = Vec::with_capacity(slots);
        for slot in 0..slots {
            let jet = jet_at_slot(&current, slot);
            let (_, g_inv, _) = induced_metric(&jet)?;
            frozen.push(g_inv);
        }

        let mut next = current.clone();
        for al in 0..m {
            // unknowns: one value per interior slot (interp rows included)
            let mut b = vec![0.0; slots];
            let mut x0 = vec![0.0; slots];
            for slot in 0..slots {
                let node = lat.interior[slot] as usize;
                x0[slot] = current.values[node * m + al];
                if let Some(rule) = lat.interp_rule(slot) {
                    let cut = field.bvalue(rule.cut_bpoint)[al];
                    let opp_known = match rule.opposite {
                        Link::Node(nd) if lat.class[nd as usize] == NodeClass::Interior => 0.0,
                        Link::Node(nd) => field.value(nd)[al],
                        Link::Cut { bpoint, .. } => field.bvalue(bpoint)[al],
                    };
                    b[slot] = (cut + rule.frac * opp_known) / (1.0 + rule.frac);
                } else {
                    // boundary contribution of the frozen operator
                    let lb = contract_second(
                        &lat,
                        slot,
                        &frozen[slot],
                        0.0,
                        &|nd: u32| {
                            if lat.class[nd as usize] == NodeClass::Interior {
                                0.0
                            } else {
                                field.value(nd)[al]
                            }
                        },
                        &|bp: u32| field.bvalue(bp)[al],
                    );
                    b[slot] = field.values[node * m + al] + dt * lb;
                }
            }

            let apply = |x: &[f64], y: &mut [f64]| {
                for slot in 0..slots {
                    if let Some(rule) = lat.interp_rule(slot) {
                        let opp = match rule.opposite {
                            Link::Node(nd) if lat.class[nd as usize] == NodeClass::Interior => {
                                x[lat.interior_slot[nd as usize] as usize]
                            }
                            _ => 0.0,
                        };
                        y[slot] = x[slot] - rule.frac / (1.0 + rule.frac) * opp;
                    } else {
                        let lx = contract_second(
                            &lat,
                            slot,
                            &frozen[slot],
                            x[slot],
                            &|nd: u32| {
                                let s = lat.interior_slot[nd as usize];
                                if s == u32::MAX {
                                    0.0
                                } else {
                                    x[s as usize]
                                }
                            },
                            &|_bp: u32| 0.0,
                        );
                        y[slot] = x[slot] - dt * lx;
                    }
                }
            };

            let mut x = x0;
            bicgstab(apply, &b, &mut x, cfg.solver_tol, max_iters)?;
            for slot in 0..slots {
                let node = lat.interior[slot] as usize;
                if !x[slot].is_finite() {
                    return Err(Error::NumericalFailure {
                        node,
                        detail: format!("component {al} became non-finite in implicit solve"),
                    });
                }
                next.values[node * m + al] = x[slot];
            }
        }
        current = next;
    }
    current.t = field.t + dt;
    Ok(current)
}

/// Σᵢⱼ gⁱʲ D²ᵢⱼu at `slot` for one scalar component, with node and
/// boundary-intersection values supplied by accessors.
fn contract_second(
    lat: &Lattice,
    slot: usize,
    g_inv: &SmallMat,
    center: f64,
    node_val: &dyn Fn(u32) -> f64,
    cut_val: &dyn Fn(u32) -> f64,
) -> f64 {
    let n = lat.n();
    let h = lat.spec.h;
    let links = &lat.links[slot];
    let mut s = 0.0;
    for axis in 0..n {
        let lm = &links[2 * axis];
        let lp = &links[2 * axis + 1];
        let (tm, tp) = (lm.frac(), lp.frac());
        let val = |l: &Link| match l {
            Link::Node(nd) => node_val(*nd),
            Link::Cut { bpoint, .. } => cut_val(*bpoint),
        };
        let (vm, vp) = (val(lm), val(lp));
        let dd = 2.0 * (tm * vp + tp * vm - (tm + tp) * center) / (tm * tp * (tm + tp) * h * h);
        s += g_inv.get(axis, axis) * dd;
    }
    let node = lat.interior[slot];
    let mi = lat.multi(node);
    for i in 0..n {
        for j in i + 1..n {
            let at = |di: i64, dj: i64| -> f64 {
                if di == 0 && dj == 0 {
                    return center;
                }
                let mut mm = mi;
                mm[i] = (mm[i] as i64 + di) as usize;
                mm[j] = (mm[j] as i64 + dj) as usize;
                node_val(lat.index(&mm))
            };
            let v = match lat.mixed[slot][Lattice::pair_index(i, j)] {
                MixedPlan::Cross => (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * h * h),
                MixedPlan::SidedJ(sg) => {
                    let sg = sg as i64;
                    sg as f64 * ((at(1, sg) - at(-1, sg)) - (at(1, 0) - at(-1, 0)))
                        / (2.0 * h * h)
                }
                MixedPlan::SidedI(sg) => {
                    let sg = sg as i64;
                    sg as f64 * ((at(sg, 1) - at(sg, -1)) - (at(0, 1) - at(0, -1)))
                        / (2.0 * h * h)
                }
                MixedPlan::Corner(si, sj) => {
                    let (si, sj) = (si as i64, sj as i64);
                    (si * sj) as f64 * (at(si, sj) - at(si, 0) - at(0, sj) + center) / (h * h)
                }
                MixedPlan::Unavailable => 0.0,
            };
            s += 2.0 * g_inv.get(i, j) * v;
        }
    }
    s
}

/// Max over interior nodes of ‖g^{ij}D²f_{ij}‖.
pub fn max_system_residual(field: &GraphField) -> Result<f64> {
    let lat = &field.lattice;
    let mut worst = 0.0f64;
    for slot in 0..lat.interior.len() {
        let jet = jet_at_slot(field, slot);
        worst = worst.max(crate::geometry::residual_norm(&jet)?);
    }
    Ok(worst)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    ReachedTEnd,
    SteadyState,
    InvariantViolation,
    NumericalFailure,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Continue,
    Halt,
}

/// Per-step hook; invoked on the initial state and after every step.
pub trait StepObserver {
    fn observe(&mut self, step: usize, field: &GraphField) -> Verdict;
}

pub struct NullObserver;

impl StepObserver for NullObserver {
    fn observe(&mut self, _step: usize, _field: &GraphField) -> Verdict {
        Verdict::Continue
    }
}

#[derive(Debug)]
pub struct Trajectory {
    /// (t, field) at step 0, every `snap_cadence` steps, and the final state.
    pub snapshots: Vec<(f64, GraphField)>,
    pub reason: StopReason,
    pub steps: usize,
    pub t_final: f64,
    pub failure: Option<String>,
}

/// Drive the flow to t_end, steady state, observer halt, or failure.
pub fn run(
    field0: GraphField,
    cfg: &StepConfig,
    snap_cadence: usize,
    observer: &mut dyn StepObserver,
) -> Result<Trajectory> {
    cfg.validate()?;
    if let Some(node) = field0.first_non_finite() {
        return Err(Error::NumericalFailure { node, detail: "non-finite initial data".into() });
    }

    let mut field = field0;
    let mut snapshots = vec![(field.t, field.clone())];
    let mut steps = 0usize;
    let t0 = field.t;

    if observer.observe(0, &field) == Verdict::Halt {
        return Ok(Trajectory {
            t_final: field.t,
            snapshots,
            reason: StopReason::InvariantViolation,
            steps,
            failure: None,
        });
    }

    loop {
        let remaining = cfg.t_end - (field.t - t0);
        if remaining <= 1e-15 * cfg.t_end {
            push_final(&mut snapshots, &field);
            return Ok(Trajectory {
                t_final: field.t,
                snapshots,
                reason: StopReason::ReachedTEnd,
                steps,
                failure: None,
            });
        }
        let dt = match cfg.dt {
            DtChoice::Auto => match cfg.scheme {
                Scheme::Explicit => stable_dt(&field, cfg.safety)?.min(remaining),
                Scheme::SemiImplicit => (cfg.t_end / 64.0).min(remaining),
            },
            DtChoice::Fixed(dt) => dt.min(remaining),
        };

        let stepped = match cfg.scheme {
            Scheme::Explicit => step_explicit_with_residual(&field, dt).map(|(f, _)| f),
            Scheme::SemiImplicit => step_semi_implicit(&field, dt, cfg),
        };
        field = match stepped {
            Ok(f) => f,
            Err(e) => {
                push_final(&mut snapshots, &field);
                return Ok(Trajectory {
                    t_final: field.t,
                    snapshots,
                    reason: StopReason::NumericalFailure,
                    steps,
                    failure: Some(e.to_string()),
                });
            }
        };
        steps += 1;

        if snap_cadence > 0 && steps % snap_cadence == 0 {
            snapshots.push((field.t, field.clone()));
        }
        if observer.observe(steps, &field) == Verdict::Halt {
            push_final(&mut snapshots, &field);
            return Ok(Trajectory {
                t_final: field.t,
                snapshots,
                reason: StopReason::InvariantViolation,
                steps,
                failure: None,
            });
        }
        if cfg.steady_tol > 0.0 {
            let res = max_system_residual(&field)?;
            if res < cfg.steady_tol {
                push_final(&mut snapshots, &field);
                return Ok(Trajectory {
                    t_final: field.t,
                    snapshots,
                    reason: StopReason::SteadyState,
                    steps,
                    failure: None,
                });
            }
        }
    }
}

fn push_final(snapshots: &mut Vec<(f64, GraphField)>, field: &GraphField) {
    if snapshots.last().map(|(t, _)| *t) != Some(field.t) {
        snapshots.push((field.t, field.clone()));
    }
}

/// Max over interior nodes of ‖(the normal part of (0, Δf/dt)) − H‖ for two
/// consecutive states of one run.
pub fn velocity_consistency(prev: &GraphField, next: &GraphField, dt: f64) -> Result<f64> {
    if !Arc::ptr_eq(&prev.lattice, &next.lattice) && prev.lattice.spec != next.lattice.spec {
        return Err(Error::LatticeMismatch("velocity_consistency needs one lattice".into()));
    }
    if prev.m != next.m || prev.values.len() != next.values.len() {
        return Err(Error::LatticeMismatch("field shapes differ".into()));
    }
    let lat = &prev.lattice;
    let (n, m) = (lat.n(), prev.m);
    let mut worst = 0.0f64;
    for slot in 0..lat.interior.len() {
        let node = lat.interior[slot] as usize;
        let jet = jet_at_slot(prev, slot);
        let (sff, _) = second_fundamental_form(&jet)?;
        let mut v = [0.0; MAX_AMB];
        for al in 0..m {
            v[n + al] = (next.values[node * m + al] - prev.values[node * m + al]) / dt;
        }
        let p = normal_projection(&v, &jet.df)?;
        let mut dev = 0.0;
        for a in 0..n + m {
            let d = p[a] - sff.mean[a];
            dev += d * d;
        }
        worst = worst.max(dev.sqrt());
    }
    Ok(worst)
}
