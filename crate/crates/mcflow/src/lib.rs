//! mcflow — a finite-difference simulator for graphical mean curvature flow
//! in arbitrary codimension.
//!
//! A map f: Ω ⊂ ℝⁿ → ℝᵐ (2 ≤ n ≤ 4, 1 ≤ m ≤ 4) evolves on a uniform lattice
//! under the nonparametric flow df^α/dt = g^{ij} ∂²f^α/∂x^i∂x^j with Dirichlet
//! data held on ∂Ω, where g = I + (Df)ᵀDf is the induced graph metric. The
//! crate provides the lattice geometry (boxes and balls, with exact
//! Shortley-Weller boundary intersections), pointwise graph geometry built on
//! a deterministic small-matrix SVD (singular values, area density, the
//! projection gauge *Ω₁, second fundamental form), explicit and
//! lagged-coefficient semi-implicit time stepping, and a set of analytic
//! monitors: the admissibility value 8nδ·sup|D²ψ| + √2·sup|Dψ|, boundary
//! gradient bounds via log-barrier parameters on supporting hyperplanes,
//! per-component maximum-principle margins, the area/energy budget, and the
//! parabolic minimum principle for *Ω₁.

pub mod config;
pub mod csvio;
pub mod domain;
pub mod error;
pub mod flow;
pub mod geometry;
pub mod jet;
pub mod linalg;
pub mod monitors;
pub mod plot;
pub mod scenario;
pub mod snapshot;
pub mod solver;
pub mod svd;

pub mod cli;

pub use error::{Error, Result};
