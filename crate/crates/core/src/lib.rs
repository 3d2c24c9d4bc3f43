//! Discrete-event proof-of-work mining simulator with fee-redistribution
//! contracts.
//!
//! A share of every block's fees is deposited into one or more contracts;
//! each contract pays out a fixed fraction of its balance to every block, so
//! the value of a block follows the long-run average of fees rather than the
//! mempool at the moment it is found. The crate provides the contract
//! arithmetic ([`frsc`]), fee-inflow scenarios ([`fee_model`]), a block tree
//! with forks ([`chain`]), mining strategies ([`strategies`]), Exp3 strategy
//! learning ([`learning`]) and the experiment drivers ([`experiments`]).

pub mod amount;
pub mod chain;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod fee_model;
pub mod frsc;
pub mod learning;
pub mod strategies;

pub use amount::{Amount, Ppm, PPM_ONE, SATS_PER_BTC};
pub use chain::{BlockTree, FrscMode, Miner};
pub use error::{Error, Result};
pub use fee_model::{FeeScenario, InflowRate, SimTime};
pub use frsc::{Frsc, FrscSet, SplitParams};
pub use learning::LearnerState;
pub use strategies::Strategy;
