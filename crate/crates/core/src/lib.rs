//! Staffing and threshold outsourcing for an Erlang-A call center whose
//! arrival rate is random at the time staffing is chosen.
//!
//! The exact route solves the realized M/M/N/T+M chain for every arrival-rate
//! node and scans the staffing level. The diffusion route builds the
//! square-root policy from the limiting cost ẑ and the optimal safety
//! parameter β*. Both are compared in [`policy`], checked against a
//! discrete-event [`sim`]ulator, and driven from the `cosource` binary.

pub mod arrival;
pub mod diffusion;
pub mod error;
pub mod exact;
pub mod normal;
pub mod policy;
pub mod quadrature;
pub mod queue;
pub mod report;
pub mod scalar;
pub mod sim;

pub use arrival::{ArrivalDistribution, QuadratureRule, StandardizedDistribution};
pub use error::{ArrivalError, DiffusionError, PolicyError, QueueError, SimError};
pub use queue::{CostParams, PerformanceMeasures, StationaryModel, SteadyState, Threshold};
