pub mod channel;
pub mod cli;
pub mod codec;
pub mod coupled;
pub mod effective_noise;
pub mod error;
pub mod numerics;
pub mod potential;
pub mod state_evolution;

pub use error::{Error, Result};
