//! Weighted-difference value iteration for discounted MDPs.
//!
//! The weighted-difference iterate `V_k = (T^k V_0 - alpha T^(k-1) V_0) / (1 - alpha)`
//! converges at rate `alpha * beta`, where `beta < 1` is the span-contraction
//! rate of an ergodic MDP, instead of the rate `alpha` of plain value iteration.
//!
//! * [`mdp`]: the model, value and Q-functions, exact policy iteration.
//! * [`bellman`]: the operators and every iteration scheme with its trace.
//! * [`ergodicity`]: the certified coefficient, leading constants and bounds.
//! * [`generator`]: seeded random instances with a guaranteed `rho`.
//! * [`harness`]: file formats, reports and the benchmark behind the `wdvf` binary.

// `!(x > 0.0)` guards intentionally reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bellman;
pub mod ergodicity;
pub mod error;
pub mod generator;
pub mod harness;
pub mod mdp;

pub use error::{Error, Result};
