pub mod analysis;
pub mod array_channel;
pub mod cli_io;
pub mod error;
pub mod montecarlo;
pub mod statistic;
pub mod training;

pub use error::{Result, SimError};
pub use num_complex;
