pub mod cli;
pub mod dj;
pub mod error;
pub mod gates;
pub mod linalg;
pub mod par;
pub mod pulse;
pub mod spectrum;
pub mod spin;
pub mod state_prep;

pub use error::{Error, Result};
