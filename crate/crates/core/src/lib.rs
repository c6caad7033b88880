//! Minimum-cost multi-commodity flow by column generation over paths or
//! shortest-path trees, with direct LP baselines.
//!
//! Everything is generic over the scalar type (`f32` or `f64`); the aliases at
//! the crate root fix it to `f64`.

pub mod baseline;
pub mod decompose;
pub mod engine;
pub mod graph;
pub mod instance;
pub mod lp;
pub mod master;
pub mod pricing;
pub mod scalar;

pub use engine::{solve, Formulation, HeuristicScope, SolveError, SolverConfig, Status, Strategy};
pub use pricing::PricingStrategy;
pub use scalar::Scalar;

pub type Network = graph::Network<f64>;
pub type Instance = instance::Instance<f64>;
pub type Commodity = instance::Commodity<f64>;
pub type Column = master::Column<f64>;
pub type SolveReport = engine::SolveReport<f64>;
pub type DirectLp = baseline::DirectLp<f64>;
