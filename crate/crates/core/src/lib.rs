//! Solvers for two-player zero-sum games.
//!
//! The crate covers normal-form games (matrix games) and finite extensive-form
//! games with perfect recall. On matrix games it runs magnetic mirror descent
//! (MMD) and the iterated regularized-VI refinement built on top of it; on tree
//! games it trains tabular softmax policies with the sampled Nash policy
//! gradient loop. Exact best responses give exploitability, and an Elo/Swiss
//! tournament ranks saved checkpoints.

pub mod efg;
pub mod error;
pub mod experiment;
pub mod nashpg;
pub mod nfg;
pub mod registry;
pub mod solvers;
pub mod tournament;

pub use error::{Error, Result};
