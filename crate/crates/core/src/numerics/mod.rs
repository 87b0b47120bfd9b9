//! Numerical building blocks shared by the analysis modules.

pub mod gauss;
pub mod quad;
pub mod solve;
