use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("ratio {0} ppm is outside [0, 1000000]")]
    PpmOutOfRange(u64),

    #[error("redistribution ratios must sum to exactly 1000000 ppm, got {0}")]
    RhoSum(u64),

    #[error("contract set must contain at least one contract")]
    EmptyContractSet,

    #[error("contract window length must be at least 1 block")]
    ZeroLambda,

    #[error("contract share and miner share must sum to 1000000 ppm, got {0}")]
    SplitSum(u64),

    #[error("parity fees are undefined when the contract share is zero")]
    ZeroContractShare,

    #[error("scenario line {line}: {msg}")]
    Scenario { line: usize, msg: String },

    #[error("block {0} does not exist in the tree")]
    UnknownBlock(usize),

    #[error("claim of {claim} sat exceeds the {available} sat claimable at block {parent}")]
    ClaimExceedsAvailable { parent: usize, claim: u64, available: u64 },

    #[error("config key `{key}`: {msg}")]
    Config { key: String, msg: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn config(key: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            msg: msg.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
