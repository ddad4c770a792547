use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("invalid design: {0}")]
    InvalidDesign(String),

    #[error("level {level} is not valid for a {num_levels}-level factor")]
    InvalidLevel { level: f64, num_levels: u8 },

    #[error("information matrix is singular for model {model}")]
    Singular { model: String },

    #[error("enumeration of {subsets} subsets exceeds the budget of {budget}")]
    BudgetExceeded { subsets: u128, budget: u128 },

    #[error("unknown reference design `{0}`")]
    UnknownDesign(String),

    #[error("reference design `{id}` failed its checksum")]
    Checksum { id: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
