//! Time-division integrated sensing, communication and computing (ISCC) for
//! satellite-terrestrial networks: radar mutual information, three-tier task
//! completion delays, closed-form task partitioning and PSO subframe allocation.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod channel;
pub mod delay;
pub mod error;
pub mod experiment;
pub mod fixtures;
pub mod generator;
pub mod io;
pub mod model;
pub mod optimizer;
pub mod partition;

pub use error::{Error, Result};
pub use model::*;
