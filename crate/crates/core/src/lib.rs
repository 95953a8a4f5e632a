//! Interactive MAX-MIN ant colony search for early-lifecycle object-oriented
//! class design.
//!
//! A [`DesignProblem`] lists the attributes and methods discovered during
//! analysis and the "uses" between them. The [`aco`] engine groups them into a
//! fixed number of classes, scoring candidates on coupling ([`fitness::cbo`])
//! and two elegance measures ([`fitness::nac`], [`fitness::atmr`]). A designer,
//! human or simulated, periodically rates a displayed candidate; the
//! [`surrogate`] model turns those ratings into objective weights that steer
//! further search. The [`session`] module ties this together, [`service`] and
//! [`http`] expose it to a front-end, and [`runner`] drives headless runs.
//!
//! See the crate's `examples/` directory for one runnable program per
//! capability.

pub mod aco;
pub mod fitness;
pub mod http;
pub mod log;
pub mod problem;
pub mod runner;
pub mod service;
pub mod session;
pub mod surrogate;

pub use aco::{AcoParams, Colony, ColonySnapshot, FreezeSet, PheromoneMatrix};
pub use fitness::{MetricVector, WeightVector};
pub use problem::{DesignProblem, DesignSolution, Element, ProblemScale};
pub use session::{Designer, DesignerAction, DesignerResponse, Session, SessionConfig};
pub use surrogate::SurrogateModel;
