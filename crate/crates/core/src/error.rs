use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid dimension: {0}")]
    InvalidDimension(String),

    #[error("need at least {needed} candidate landscapes, got {got}")]
    InsufficientCandidates { needed: usize, got: usize },

    #[error("cannot place {total} individuals: every parcel has zero habitat quality")]
    DegenerateIntensity { total: u64 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("parcel index {index} out of range for {len} parcels")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("wrong solver: {0}")]
    WrongSolver(String),

    #[error("cost of parcel {index} is {value}, not a nonnegative integer; rescale costs to integer units")]
    NonIntegerCost { index: usize, value: f64 },

    #[error("value for species {species} at parcel {parcel} is {value}, not a nonnegative integer; round simulated counts first")]
    NonIntegerValue {
        species: usize,
        parcel: usize,
        value: f64,
    },

    #[error("refusing to enumerate {parcels} parcels (limit {limit})")]
    TooManyParcels { parcels: usize, limit: usize },

    #[error("knapsack table of {cells} cells exceeds the limit of {limit}")]
    TableTooLarge { cells: usize, limit: usize },

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("invalid dynamics parameters: {0}")]
    InvalidParams(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("need at least one interior budget row, got {rows} rows in total")]
    NoInteriorBudgets { rows: usize },

    #[error("no annotation layout for {species} species (at most 5 are supported)")]
    LayoutUnsupported { species: usize },

    #[error("arithmetic overflow while {0}")]
    Overflow(&'static str),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: field `{field}`: {message}")]
    Parse {
        path: PathBuf,
        field: String,
        message: String,
    },
}
