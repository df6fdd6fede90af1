// `!(x > y)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod config_model;
pub mod dgrd;
pub mod distributions;
pub mod error;
pub mod graph;
pub mod grg;
pub mod seeding;
pub mod verify;

pub use distributions::{DegreeDistribution, Mean, MixingLaw};
pub use error::{Error, Result};
pub use graph::{GenerationReport, Multigraph, NodeId, SimpleGraph};
