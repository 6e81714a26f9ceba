//! VARE — vector autoregressive evolution for dynamic multi-objective
//! optimisation.
//!
//! The crate provides:
//! - dynamic benchmark problems (DF1, DF4, DF5, FDA4) with analytic
//!   Pareto-front sampling per environment;
//! - a decomposition-based evolutionary engine with diversity-centred
//!   environmental selection;
//! - two change-response strategies — per-direction population prediction
//!   (PCA + VAR forecasting of archived solutions) and environment-aware
//!   hypermutation — combined adaptively from their recent success rates;
//! - dynamic performance indicators (IGD/MIGD, HV/MHV) and nondominated
//!   ranking of paired scores.
//!
//! The default `parallel` feature runs the data-parallel inner loops
//! (metric evaluation, reference-set sampling, per-direction model fits) on
//! rayon; disabling it yields a dependency-light sequential build with
//! identical results.

pub mod benchmarks;
pub mod directions;
pub mod domain;
pub mod engine;
pub mod error;
pub mod forecast;
pub mod metrics;
pub mod operators;
pub mod response;

mod linalg;

pub use directions::{associate, ReferenceDirectionSet};
pub use domain::{Bounds, DecisionVector, Individual, ObjectiveVector, TimeContext};
pub use error::{Error, Result};
